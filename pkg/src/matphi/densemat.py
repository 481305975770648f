"""Dense matrix kernel with multiplication accounting.

Every full ``n x n`` product goes through :meth:`PhiContext.matmul` so the
caller can compare the work actually done against the cost model (one unit
per product, 4/3 per multiple right-hand-side LU solve).
"""

from __future__ import annotations

import cmath
import enum
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg

__all__ = [
    "Structure",
    "PhiContext",
    "SingularPivotError",
    "as_square_matrix",
    "matmul",
    "lu_solve_multi",
    "one_norm",
    "detect_structure",
    "quasi_blocks",
    "expm2x2",
    "set_exp_blocks",
    "refresh_exp_diagonal",
]

LU_SOLVE_COST = Fraction(4, 3)
DEFAULT_SEED = 20240901


class Structure(str, enum.Enum):
    FULL = "full"
    UPPER_TRIANGULAR = "upper-triangular"
    UPPER_QUASI_TRIANGULAR = "upper-quasi-triangular"

    @property
    def triangular(self) -> bool:
        return self is not Structure.FULL


class SingularPivotError(ArithmeticError):
    """LU factorisation met a pivot at or below the underflow threshold."""

    def __init__(self, index: int, value: float):
        super().__init__(f"singular pivot {value!r} at index {index}")
        self.index = index
        self.value = value


@dataclass
class PhiContext:
    """Run-scoped state: multiplication counter and estimator settings.

    One context belongs to one evaluation at a time; separate contexts can be
    used concurrently.
    """

    seed: int = DEFAULT_SEED
    exact_alpha: bool = False
    t_cols: int = 2
    itmax: int = 5
    count: Fraction = field(default_factory=Fraction)

    def reset(self) -> None:
        self.count = Fraction(0)

    def matmul(self, a, b):
        return matmul(a, b, self)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def as_square_matrix(a, name: str = "A") -> np.ndarray:
    """Validate and convert input to a float64 or complex128 square array."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        a = a.astype(np.complex128)
    else:
        a = a.astype(np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def matmul(a: np.ndarray, b: np.ndarray, ctx: PhiContext | None = None) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply shapes {a.shape} and {b.shape}")
    if ctx is not None:
        ctx.count += 1
    return a @ b


def lu_solve_multi(d: np.ndarray, rhs: np.ndarray, ctx: PhiContext | None = None) -> np.ndarray:
    """Solve ``d @ X = rhs`` by LU with partial pivoting.

    Raises
    ------
    SingularPivotError
        If a pivot of ``U`` is zero or below the smallest normal number.
    """
    if d.shape[0] != d.shape[1] or d.shape[0] != rhs.shape[0]:
        raise ValueError(f"incompatible shapes {d.shape} and {rhs.shape}")
    with warnings.catch_warnings():
        # Exact zero pivots are reported below as SingularPivotError.
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(d, check_finite=False, overwrite_a=False)
    pivots = np.abs(np.diag(lu))
    tiny = np.finfo(np.float64).tiny
    bad = np.flatnonzero(~(pivots > tiny))
    if bad.size:
        k = int(bad[0])
        raise SingularPivotError(k, complex(lu[k, k]) if np.iscomplexobj(lu) else float(lu[k, k]))
    if ctx is not None:
        ctx.count += LU_SOLVE_COST
    return linalg.lu_solve((lu, piv), rhs, check_finite=False)


def one_norm(a: np.ndarray) -> float:
    """Maximum absolute column sum."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(a), axis=0)))


def detect_structure(a: np.ndarray) -> Structure:
    """Classify by the exact zero pattern below the diagonal."""
    if not np.tril(a, -1).any():
        return Structure.UPPER_TRIANGULAR
    if np.tril(a, -2).any():
        return Structure.FULL
    sub = np.diagonal(a, -1) != 0
    if np.any(sub[1:] & sub[:-1]):
        return Structure.FULL
    return Structure.UPPER_QUASI_TRIANGULAR


def quasi_blocks(a: np.ndarray) -> list[tuple[int, int]]:
    """Diagonal blocks ``(start, size)`` of a (quasi-)triangular matrix."""
    n = a.shape[0]
    out = []
    k = 0
    while k < n:
        if k + 1 < n and a[k + 1, k] != 0:
            out.append((k, 2))
            k += 2
        else:
            out.append((k, 1))
            k += 1
    return out


def _cosh_sinhc(q):
    """``(cosh(sqrt(q)), sinh(sqrt(q))/sqrt(q))`` without cancellation near ``q = 0``."""
    if abs(q) < 1e-3:
        # Truncation error below u for |q| < 1e-3.
        c = 1 + q / 2 * (1 + q / 12 * (1 + q / 30 * (1 + q / 56)))
        s = 1 + q / 6 * (1 + q / 20 * (1 + q / 42 * (1 + q / 72)))
        return c, s
    if isinstance(q, complex):
        r = cmath.sqrt(q)
        return cmath.cosh(r), cmath.sinh(r) / r
    if q > 0:
        r = np.sqrt(q)
        return np.cosh(r), np.sinh(r) / r
    r = np.sqrt(-q)
    return np.cos(r), np.sin(r) / r


def _exp_sinch(a, x):
    """``exp(a) * sinh(x) / x``."""
    if abs(x) < 1e-3:
        x2 = x * x
        return np.exp(a) * (1 + x2 / 6 * (1 + x2 / 20 * (1 + x2 / 42)))
    if abs(x) < 1:
        return np.exp(a) * np.sinh(x) / x
    # Split form avoids overflow of exp(a) * sinh(x) when the result is finite.
    return (np.exp(a + x) - np.exp(a - x)) / (2 * x)


def expm2x2(b: np.ndarray) -> np.ndarray:
    """Closed-form exponential of a 2x2 matrix.

    With ``mu = trace/2`` and ``N = B - mu I`` we have ``N^2 = q I`` where
    ``q = ((b11 - b22)/2)^2 + b12 b21``, hence
    ``exp(B) = exp(mu) (cosh(sqrt q) I + sinh(sqrt q)/sqrt q N)``.

    For well separated eigenvalues ``mu +- r`` the diagonal is taken from the
    Sylvester form instead; ``cosh r - h sinh(r)/r`` cancels when ``|h|`` is
    close to a large ``r``.
    """
    b11, b12, b21, b22 = b[0, 0], b[0, 1], b[1, 0], b[1, 1]
    mu = (b11 + b22) / 2
    h = (b11 - b22) / 2
    bc = b12 * b21
    q = h * h + bc
    cplx = np.iscomplexobj(b)
    q = complex(q) if cplx else float(q)
    out = np.empty((2, 2), dtype=b.dtype)
    if abs(q) < 1e-3 or (not cplx and q < 0):
        c, s = _cosh_sinhc(q)
        e = np.exp(mu)
        out[0, 0] = e * (c + s * h)
        out[1, 1] = e * (c - s * h)
        out[0, 1] = e * s * b12
        out[1, 0] = e * s * b21
        return out
    r = cmath.sqrt(q) if cplx else np.sqrt(q)
    # The formulas are even in r; pick the sign making |r + h| = |r| + |h|-ish.
    if (r * np.conj(h)).real < 0:
        r = -r
    rph = r + h
    rmh = bc / rph if rph != 0 else r - h
    ep, em = np.exp(mu + r), np.exp(mu - r)
    out[0, 0] = (ep * rph + em * rmh) / (2 * r)
    out[1, 1] = (ep * rmh + em * rph) / (2 * r)
    s = _exp_sinch(mu, r)
    out[0, 1] = s * b12
    out[1, 0] = s * b21
    return out


def set_exp_blocks(x: np.ndarray, b: np.ndarray, blocks=None) -> np.ndarray:
    """Overwrite the structured part of ``x`` with exact values of ``exp(b)``.

    Diagonal entries of 1x1 blocks, whole 2x2 blocks, and the superdiagonal
    entry linking two consecutive 1x1 blocks.
    """
    if blocks is None:
        blocks = quasi_blocks(b)
    for idx, (k, size) in enumerate(blocks):
        if size == 1:
            x[k, k] = np.exp(b[k, k])
            if idx + 1 < len(blocks) and blocks[idx + 1][1] == 1:
                lam1, lam2 = b[k, k], b[k + 1, k + 1]
                x[k, k + 1] = b[k, k + 1] * _exp_sinch((lam1 + lam2) / 2, (lam1 - lam2) / 2)
        else:
            x[k : k + 2, k : k + 2] = expm2x2(b[k : k + 2, k : k + 2])
    return x


def refresh_exp_diagonal(
    x: np.ndarray,
    a_scaled: np.ndarray,
    two_power: int,
    ctx: PhiContext | None = None,
    blocks=None,
) -> np.ndarray:
    """One squaring step on the (quasi-)triangular path.

    ``x`` approximates ``exp(2**(two_power - 1) * a_scaled)``.  The result is
    ``x @ x`` with its diagonal blocks and first superdiagonal replaced by the
    exact values for ``exp(2**two_power * a_scaled)``.
    """
    if detect_structure(a_scaled) is Structure.FULL:
        raise ValueError("refresh_exp_diagonal needs an upper (quasi-)triangular matrix")
    x = matmul(x, x, ctx)
    return set_exp_blocks(x, a_scaled * 2.0**two_power, blocks)
