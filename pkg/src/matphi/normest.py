"""1-norm estimates for matrix powers.

``est_power_one_norm`` is the block 1-norm estimator of Higham and Tisseur
applied to ``A^r`` as an implicit operator: only products of ``A`` (or its
adjoint) with ``n x t`` blocks are formed.  ``exact_abs_power_one_norm`` gives
``|| |A|^k ||_1`` exactly via ``|| |A^T|^k e ||_inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MatrixPower",
    "est_power_one_norm",
    "exact_abs_power_one_norm",
    "log2_abs_power_one_norm",
]


@dataclass(frozen=True)
class MatrixPower:
    """The operator ``base ** exponent``, applied by repeated products."""

    base: np.ndarray
    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def matmat(self, x: np.ndarray) -> np.ndarray:
        for _ in range(self.exponent):
            x = self.base @ x
        return x

    def rmatmat(self, x: np.ndarray) -> np.ndarray:
        bh = self.base.conj().T
        for _ in range(self.exponent):
            x = bh @ x
        return x

    def dense(self) -> np.ndarray:
        return np.linalg.matrix_power(self.base, self.exponent)


def _sign(y: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(y):
        mag = np.abs(y)
        out = np.ones_like(y)
        nz = mag > 0
        out[nz] = y[nz] / mag[nz]
        return out
    return np.where(y >= 0, 1.0, -1.0)


def _parallel_to_any(col: np.ndarray, mat: np.ndarray) -> bool:
    # Columns of +-1 vectors are parallel iff |x^T y| == n.
    if mat.size == 0:
        return False
    return bool(np.any(np.abs(col @ mat) == col.size))


def _resample_parallel(s, s_old, rng):
    n, t = s.shape
    for j in range(t):
        for _ in range(n + 10):
            if not (_parallel_to_any(s[:, j], s[:, :j]) or _parallel_to_any(s[:, j], s_old)):
                break
            s[:, j] = rng.choice([-1.0, 1.0], size=n)
    return s


def est_power_one_norm(
    op: MatrixPower | np.ndarray,
    power: int | None = None,
    t: int = 2,
    itmax: int = 5,
    seed: int = 0,
) -> float:
    """Lower-bound estimate of ``||A^r||_1``.

    Parameters
    ----------
    op : MatrixPower or ndarray
        The operator, or a base matrix combined with ``power``.
    t : int
        Block width.  The first start column is the scaled ones vector, the
        others random +-1 columns drawn from ``seed``.
    itmax : int
        Maximum number of iterations.

    Returns
    -------
    float
        ``||A^r x||_1`` for some ``x`` with ``||x||_1 = 1``, hence never above
        the true norm in exact arithmetic.
    """
    if not isinstance(op, MatrixPower):
        op = MatrixPower(np.asarray(op), power if power is not None else 1)
    n = op.n
    if t < 1:
        raise ValueError("t must be >= 1")
    if n <= max(t, 4):
        # Tiny problems: the estimator cannot pick independent columns.
        return float(np.max(np.sum(np.abs(op.matmat(np.eye(n, dtype=op.base.dtype))), axis=0)))

    rng = np.random.default_rng(seed)
    real = not np.iscomplexobj(op.base)
    x = np.ones((n, t))
    if t > 1:
        x[:, 1:] = rng.choice([-1.0, 1.0], size=(n, t - 1))
        x = _resample_parallel(x, np.empty((n, 0)), rng)
    x /= n

    est_old = 0.0
    est = 0.0
    s = np.zeros((n, t))
    ind_hist: list[int] = []
    ind_best = 0
    ind = np.arange(t)
    for k in range(1, itmax + 2):
        y = op.matmat(x)
        col_norms = np.sum(np.abs(y), axis=0)
        j_best = int(np.argmax(col_norms))
        est = float(col_norms[j_best])
        if est > est_old or k == 2:
            ind_best = int(ind[j_best]) if k >= 2 else j_best
        if k >= 2 and est <= est_old:
            est = est_old
            break
        est_old = est
        if k > itmax:
            break
        s_old = s
        s = _sign(y)
        if real:
            if all(_parallel_to_any(s[:, j], s_old) for j in range(t)):
                break
            if t > 1:
                s = _resample_parallel(s, s_old, rng)
        z = op.rmatmat(s)
        h = np.max(np.abs(z), axis=1)
        if k >= 2 and h.max() == h[ind_best]:
            break
        order = np.argsort(-h, kind="stable")
        if t > 1:
            if all(i in ind_hist for i in order[:t]):
                break
            fresh = [i for i in order if i not in ind_hist]
            ind = np.array((fresh + [i for i in order if i in ind_hist])[:t])
        else:
            ind = order[:1]
        x = np.zeros((n, t))
        x[ind, np.arange(t)] = 1.0
        ind_hist.extend(int(i) for i in ind)
    return est


def exact_abs_power_one_norm(a: np.ndarray, k: int) -> float:
    """``|| |A|^k ||_1`` from ``k`` products of ``|A|^T`` with the ones vector."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = np.abs(a).T
    v = np.ones(a.shape[0])
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            v = m @ v
    return float(np.max(v))


def log2_abs_power_one_norm(a: np.ndarray, k: int) -> float:
    """``log2 || |A|^k ||_1``, renormalising each step so it never overflows.

    Returns ``-inf`` when the power vanishes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m = np.abs(a).T
    v = np.ones(a.shape[0])
    log_scale = 0.0
    for _ in range(k):
        v = m @ v
        top = np.max(v)
        if top == 0:
            return -math.inf
        e = math.frexp(top)[1]
        v = np.ldexp(v, -e)
        log_scale += e
    return log_scale + math.log2(np.max(v))
