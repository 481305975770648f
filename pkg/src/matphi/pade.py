"""Shared-denominator Pade approximants to the phi-functions.

For a degree ``m`` and largest index ``p`` the diagonal ``[m/m]`` approximant
``N_m / D_m`` to ``phi_p`` is built from exact rational coefficients.  The
lower-index approximants follow from ``R_j = z R_{j+1} + 1/j!`` and all share
the denominator ``D_m``.

The module also carries the compiled-in table of backward-error thresholds
``theta[i][p]`` for the optimal degrees ``m_i = floor((i+3)^2/8)`` together
with the offline tooling that regenerates them from the backward-error series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

__all__ = [
    "UNIT_ROUNDOFF",
    "OPTIMAL_DEGREES",
    "THETA",
    "NU1",
    "COND_BOUND_M12",
    "PadeCoeffs",
    "ThetaTable",
    "HtildeSeries",
    "optimal_degree",
    "degree_index",
    "pade_coeffs",
    "pade_coeffs_exact",
    "leading_error_coeff",
    "theta",
    "htilde_series",
    "htilde_eval",
    "regenerate_theta",
    "regenerate_table",
    "pole_radius",
]

UNIT_ROUNDOFF = 2.0**-53

OPTIMAL_DEGREES = (1, 2, 3, 4, 6, 8, 10, 12)

# theta[i][p - 1] for m_i in OPTIMAL_DEGREES and p = 1..10.
_THETA_ROWS = (
    # m=1      m=2      m=3      m=4      m=6      m=8    m=10   m=12
    (2.00e-5, 3.81e-3, 3.97e-2, 1.54e-1, 7.26e-1, 1.76, 3.17, 4.87),  # p=1
    (3.76e-5, 6.09e-3, 5.81e-2, 2.13e-1, 9.28e-1, 2.06, 3.54, 5.28),  # p=2
    (7.37e-5, 9.87e-3, 8.53e-2, 2.94e-1, 1.16, 2.37, 3.91, 5.69),  # p=3
    (1.50e-4, 1.62e-2, 1.26e-1, 4.06e-1, 1.40, 2.69, 4.28, 6.09),  # p=4
    (3.15e-4, 2.70e-2, 1.87e-1, 5.62e-1, 1.66, 3.01, 4.65, 6.50),  # p=5
    (6.86e-4, 4.55e-2, 2.80e-1, 7.79e-1, 1.92, 3.34, 5.02, 6.90),  # p=6
    (1.54e-3, 7.75e-2, 4.18e-1, 1.05, 2.20, 3.68, 5.40, 7.30),  # p=7
    (3.54e-3, 1.33e-1, 6.26e-1, 1.26, 2.48, 4.01, 5.77, 7.69),  # p=8
    (8.35e-3, 2.30e-1, 9.34e-1, 1.48, 2.77, 4.35, 6.14, 8.08),  # p=9
    (2.01e-2, 3.99e-1, 1.16, 1.71, 3.07, 4.69, 6.51, 8.47),  # p=10
)

THETA = tuple(tuple(row[i] for row in _THETA_ROWS) for i in range(8))
"""``THETA[i][p - 1]``: threshold for degree ``OPTIMAL_DEGREES[i]`` and index ``p``."""

NU1 = (3.00, 4.47, 5.65, 7.05, 9.68, 12.3, 15.0, 17.6)
"""Smallest pole modulus of ``D_{m_i}`` for ``p = 1``."""

# Upper bounds on the condition number of D_12(A) at p = 1 and p = 7.  Kept
# for reference only; nothing evaluates them at run time.
COND_BOUND_M12 = {1: 8.98e1, 7: 2.42e2}

P_CLAMP = 7


def optimal_degree(i: int) -> int:
    """Degree ``m_i = floor((i + 3)^2 / 8)`` reached with ``i`` multiplications."""
    return (i + 3) ** 2 // 8


def degree_index(m: int) -> int:
    """Inverse of :func:`optimal_degree`; raises if ``m`` is not optimal."""
    i = math.ceil(math.sqrt(8 * (m + 1)) - 3) - 1
    if i < 0 or optimal_degree(i) != m:
        raise ValueError(f"degree {m} is not in the optimal sequence {OPTIMAL_DEGREES}")
    return i


@dataclass(frozen=True)
class PadeCoeffs:
    """Coefficients (ascending powers) of ``N_m`` and ``D_m`` for ``phi_p``."""

    m: int
    p: int
    num: np.ndarray
    den: np.ndarray


def pade_coeffs_exact(m: int, p: int) -> tuple[list[Fraction], list[Fraction]]:
    """Exact rational coefficients of ``N_m`` and ``D_m``."""
    if m < 1 or p < 0:
        raise ValueError("need m >= 1 and p >= 0")
    f = math.factorial
    scale = Fraction(f(m), f(2 * m + p))
    num = []
    for i in range(m + 1):
        acc = Fraction(0)
        for j in range(i + 1):
            acc += Fraction((-1) ** j * f(2 * m + p - j), f(j) * f(m - j) * f(p + i - j))
        num.append(scale * acc)
    den = [
        scale * Fraction((-1) ** i * f(2 * m + p - i), f(i) * f(m - i))
        for i in range(m + 1)
    ]
    return num, den


def pade_coeffs(m: int, p: int) -> PadeCoeffs:
    """Double-precision coefficients, each rounded once from the exact value."""
    if not 1 <= m <= 12 or p < 1:
        raise ValueError(f"pade_coeffs needs 1 <= m <= 12 and p >= 1, got m={m}, p={p}")
    num, den = pade_coeffs_exact(m, p)
    return PadeCoeffs(
        m=m,
        p=p,
        num=np.array([float(c) for c in num]),
        den=np.array([float(c) for c in den]),
    )


def leading_error_coeff(m: int, p: int) -> Fraction:
    """``(m+p)! m! / ((2m+p)! (2m+p+1)!)``, the magnitude of the first error term."""
    f = math.factorial
    return Fraction(f(m + p) * f(m), f(2 * m + p) * f(2 * m + p + 1))


@dataclass(frozen=True)
class ThetaTable:
    """Thresholds ``theta[i][p]`` plus pole radii ``nu1[i]``."""

    theta: tuple[tuple[float, ...], ...] = THETA
    nu1: tuple[float, ...] = NU1
    u: float = UNIT_ROUNDOFF

    def __call__(self, i: int, p: int) -> float:
        return theta(i, p, self)


DEFAULT_TABLE = ThetaTable()


def theta(i: int, p: int, table: ThetaTable = DEFAULT_TABLE) -> float:
    """Threshold for degree index ``i``; indices ``p > 7`` use the ``p = 7`` column."""
    if not 0 <= i < len(table.theta):
        raise IndexError(f"degree index {i} outside 0..{len(table.theta) - 1}")
    if p < 1:
        raise ValueError("p must be positive")
    return table.theta[i][min(p, P_CLAMP) - 1]


# ---------------------------------------------------------------------------
# Offline regeneration of the theta table.


@dataclass
class HtildeSeries:
    """Absolute coefficients ``|c_k|``, ``k = 2m+p+1 .. K``, of the backward-error series."""

    m: int
    p: int
    coeffs: list  # mpmath.mpf, index 0 <-> k = 2m+p+1
    dps: int
    radius: float  # validated evaluation range

    @property
    def first_order(self) -> int:
        return 2 * self.m + self.p + 1

    @property
    def K(self) -> int:
        return self.first_order + len(self.coeffs) - 1


def _log_series(poly, K):
    """Coefficients ``l_1..l_K`` of ``log(poly(x))`` for a polynomial with ``poly[0] == 1``."""
    deg = len(poly) - 1
    out = [mpmath.mpf(0)] * (K + 1)
    for n in range(1, K + 1):
        acc = n * poly[n] if n <= deg else mpmath.mpf(0)
        for k in range(max(1, n - deg), n):
            acc -= k * out[k] * poly[n - k]
        out[n] = acc / n
    return out


def htilde_series(m: int, p: int, K: int | None = None, dps: int = 120) -> HtildeSeries:
    """Series of ``log(exp(-x) R0(x))`` where ``R0`` is the ``[m+p/m]`` approximant to exp.

    ``R0 = P / D`` with ``P = D * sum_{i<p} x^i/i! + x^p N``, so the series is
    ``-x + log P - log D`` and both logarithms come from a linear recurrence
    on polynomial coefficients.
    """
    if K is None:
        K = 2 * m + p + 250
    num, den = pade_coeffs_exact(m, p)
    trunc_exp = [Fraction(1, math.factorial(i)) for i in range(p)]
    P = [Fraction(0)] * (m + p + 1)
    for a, da in enumerate(den):
        for b, eb in enumerate(trunc_exp):
            P[a + b] += da * eb
    for a, na in enumerate(num):
        P[p + a] += na
    with mpmath.workdps(dps):
        Pm = [mpmath.mpf(c.numerator) / c.denominator for c in P]
        Dm = [mpmath.mpf(c.numerator) / c.denominator for c in den]
        lp = _log_series(Pm, K)
        ld = _log_series(Dm, K)
        c = [lp[k] - ld[k] for k in range(K + 1)]
        c[1] -= 1
        first = 2 * m + p + 1
        coeffs = [abs(c[k]) for k in range(first, K + 1)]
    # Series converges inside the smallest zero of P or D; stay well inside it.
    radius = min(pole_radius(m, p), _min_root_modulus([float(x) for x in P]))
    return HtildeSeries(m=m, p=p, coeffs=coeffs, dps=dps, radius=radius)


def _min_root_modulus(ascending) -> float:
    roots = np.roots(ascending[::-1])
    return float(np.min(np.abs(roots)))


def pole_radius(m: int, p: int) -> float:
    """Smallest modulus of a zero of ``D_m`` (the pole radius ``nu_{m,p}``)."""
    _, den = pade_coeffs_exact(m, p)
    return _min_root_modulus([float(c) for c in den])


def htilde_eval(s: HtildeSeries, x: float):
    """Evaluate the truncated absolute series at ``x``."""
    if x < 0:
        raise ValueError("htilde_eval needs x >= 0")
    if x > s.radius:
        raise ValueError(f"x = {x} exceeds the validated range {s.radius:.4g} of h~_{s.m},{s.p}")
    with mpmath.workdps(s.dps):
        x = mpmath.mpf(x)
        acc = mpmath.mpf(0)
        for c in reversed(s.coeffs):
            acc = acc * x + c
        return acc * x**s.first_order


def _solve_threshold(s: HtildeSeries, power: int, u, tol) -> float:
    # h~(x)/x^power is increasing on (0, radius); bisect in log space.
    def excess(x):
        return htilde_eval(s, x) / mpmath.mpf(x) ** power - u

    lo, hi = 1e-12, s.radius * (1 - 1e-9)
    if excess(lo) > 0 or excess(hi) < 0:
        raise ArithmeticError(
            f"no threshold bracketed for m={s.m}, p={s.p}; raise K or the precision"
        )
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi / lo - 1 < tol:
            return lo
    raise ArithmeticError(f"bisection did not converge for m={s.m}, p={s.p}")


def regenerate_theta(m: int, p: int, K: int | None = None, dps: int = 120, tol: float = 1e-12) -> float:
    """Recompute ``theta_{m,p}`` from the backward-error series.

    The threshold solves ``h~(theta)/theta = u``.  When that root is below one
    the equation is solved again with ``theta^p`` in the denominator, which
    also bounds the backward error in the off-diagonal block.
    """
    if K is None:
        K = 2 * m + p + 250
    if K < 2 * m + p + 150:
        raise ValueError("truncation order K must be at least 2m+p+150")
    s = htilde_series(m, p, K, dps)
    with mpmath.workdps(dps):
        u = mpmath.mpf(2) ** -53
        th = _solve_threshold(s, 1, u, tol)
        if th < 1:
            th = _solve_threshold(s, p, u, tol)
    return th


def regenerate_table(p_values=range(1, 11), K_extra: int = 250, dps: int = 120):
    """Regenerate ``theta[i][p]`` for all optimal degrees; returns ``{(i, p): value}``."""
    out = {}
    for i, m in enumerate(OPTIMAL_DEGREES):
        for p in p_values:
            out[(i, p)] = regenerate_theta(m, p, K=2 * m + p + K_extra, dps=dps)
    return out
