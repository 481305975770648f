"""Choice of Pade degree and scaling parameter.

The cost of a run with degree ``m_i`` and scaling ``s`` is
``i + p + 4/3 + s (p + 1)`` matrix multiplications.  For every feasible pair
``(m_i, r)`` the smallest admissible ``s`` is the larger of
``ceil(log2(alpha_r / theta_{m_i,p}))`` and the accuracy floor ``t``; the
cheapest cell wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .densemat import LU_SOLVE_COST, PhiContext, one_norm
from .normest import MatrixPower, est_power_one_norm, log2_abs_power_one_norm
from .pade import (
    DEFAULT_TABLE,
    UNIT_ROUNDOFF,
    ThetaTable,
    degree_index,
    leading_error_coeff,
    optimal_degree,
    theta,
)

__all__ = [
    "M_MAX",
    "AlphaSeq",
    "CostMatrix",
    "SelectionResult",
    "alpha_seq",
    "p_hat",
    "delta",
    "r_max",
    "ps_cost",
    "ps_block_size",
    "t_param",
    "build_cost_matrix",
    "choose",
    "select_parameters",
    "predicted_cost",
]

M_MAX = 12


@dataclass
class AlphaSeq:
    """``alpha_r`` for ``r = 2..r_max`` plus the power-norm estimates behind them."""

    values: dict[int, float]
    r_max: int
    power_norms: dict[int, float] = field(default_factory=dict)

    def __getitem__(self, r: int) -> float:
        return self.values[r]


@dataclass
class CostMatrix:
    """Cost ``C[i][r]`` (``None`` where ``2 m_i + p_hat_i + 1 < r (r - 1)``)."""

    entries: list[dict[int, Fraction | None]]
    t_per_degree: list[int]
    p_hat_per_degree: list[int]
    r_max: int

    def cells(self):
        for i, row in enumerate(self.entries):
            for r, c in row.items():
                if c is not None:
                    yield i, r, c


@dataclass
class SelectionResult:
    m: int
    i: int
    tau: int
    r: int | None
    s: int
    p_hat: int
    delta: Fraction
    predicted_cost: Fraction
    alphas: dict[int, float] = field(default_factory=dict)
    t: int = 0

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "i": self.i,
            "tau": self.tau,
            "r": self.r,
            "s": self.s,
            "p_hat": self.p_hat,
            "delta": str(self.delta),
            "t": self.t,
            "alphas": {str(k): v for k, v in self.alphas.items()},
            "predicted_cost": str(self.predicted_cost),
            "predicted_cost_float": float(self.predicted_cost),
        }


def p_hat(theta_value: float, p: int) -> int:
    return p if theta_value >= 1 else 0


def delta(p: int, ph: int) -> Fraction:
    """Exponent of ``theta`` in the backward-error bound: 1 if ``ph == p``, ``p`` if ``ph == 0``."""
    return Fraction((p - 1) * (p - ph), p) + 1


def r_max(m: int, ph: int) -> int:
    """Largest ``r`` with ``r (r - 1) <= 2m + ph + 1``."""
    return (1 + math.isqrt(1 + 4 * (2 * m + ph + 1))) // 2


def ps_cost(m: int, tau: int) -> int:
    """Multiplications for evaluating ``N_m`` and ``D_m`` together with block size ``tau``."""
    divides = 1 if m % tau == 0 else 0
    return tau - 1 + 2 * (m // tau - divides)


def ps_block_size(m: int, i: int | None = None) -> int:
    if i is None:
        i = degree_index(m)
    tau = math.isqrt(2 * m)
    if ps_cost(m, tau) != i:
        tau = math.ceil(math.sqrt(2 * m))
    return tau


def predicted_cost(i: int, p: int, s: int) -> Fraction:
    return i + p + LU_SOLVE_COST + s * (p + 1)


def alpha_seq(a: np.ndarray, rmax: int, ctx: PhiContext | None = None) -> AlphaSeq:
    """``alpha_r = max(||A^r||^(1/r), ||A^(r+1)||^(1/(r+1)))`` for ``r = 2..rmax``."""
    if rmax < 2:
        raise ValueError("r_max must be >= 2")
    ctx = ctx or PhiContext()
    norms = {}
    for k in range(2, rmax + 2):
        with np.errstate(over="ignore", invalid="ignore"):
            if ctx.exact_alpha:
                norms[k] = one_norm(np.linalg.matrix_power(a, k))
            else:
                norms[k] = est_power_one_norm(
                    MatrixPower(a, k), t=ctx.t_cols, itmax=ctx.itmax, seed=ctx.seed
                )
        if not math.isfinite(norms[k]):
            raise OverflowError(f"||A^{k}||_1 overflows; input magnitude too large")
    values = {
        r: max(norms[r] ** (1.0 / r), norms[r + 1] ** (1.0 / (r + 1)))
        for r in range(2, rmax + 1)
    }
    return AlphaSeq(values=values, r_max=rmax, power_norms=norms)


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def t_param(a: np.ndarray, m: int, p: int, dlt: Fraction | float) -> int:
    """Accuracy floor on the scaling parameter from the first backward-error term.

    All factors enter through their logarithms so nothing overflows.
    """
    order = 2 * m + p + 1
    log_abs = log2_abs_power_one_norm(a, order)
    if log_abs == -math.inf:
        return 0
    norm_a = one_norm(a)
    if norm_a == 0:
        return 0
    dlt = float(dlt)
    log_arg = (
        _log2_fraction(leading_error_coeff(m, p))
        + log_abs
        - math.log2(UNIT_ROUNDOFF)
        - dlt * math.log2(norm_a)
    )
    return max(math.ceil(log_arg / (order - dlt)), 0)


def _s_from_alpha(alpha: float, th: float) -> int:
    if alpha == 0:
        return 0
    return max(math.ceil(math.log2(alpha) - math.log2(th)), 0)


def build_cost_matrix(
    a: np.ndarray,
    p: int,
    alphas: AlphaSeq,
    table: ThetaTable = DEFAULT_TABLE,
    i_max: int | None = None,
) -> CostMatrix:
    if i_max is None:
        i_max = degree_index(M_MAX)
    entries, ts, phs = [], [], []
    for i in range(i_max + 1):
        m = optimal_degree(i)
        th = theta(i, p, table)
        ph = p_hat(th, p)
        t = t_param(a, m, p, delta(p, ph))
        row: dict[int, Fraction | None] = {}
        for r in range(2, alphas.r_max + 1):
            if 2 * m + ph + 1 >= r * (r - 1):
                s = max(_s_from_alpha(alphas[r], th), t)
                row[r] = predicted_cost(i, p, s)
            else:
                row[r] = None
        entries.append(row)
        ts.append(t)
        phs.append(ph)
    return CostMatrix(entries=entries, t_per_degree=ts, p_hat_per_degree=phs, r_max=alphas.r_max)


def choose(costs: CostMatrix, p: int) -> SelectionResult:
    """Cheapest cell; ties go to the smaller degree, then the smaller ``r``."""
    best = None
    for i, r, c in costs.cells():
        if best is None or c < best[2]:
            best = (i, r, c)
    if best is None:
        raise ValueError("cost matrix has no feasible cell")
    i, r, c = best
    s = (c - i - p - LU_SOLVE_COST) / (p + 1)
    if s.denominator != 1 or s < 0:
        raise ArithmeticError(f"recovered scaling parameter {s} is not a nonnegative integer")
    m = optimal_degree(i)
    ph = costs.p_hat_per_degree[i]
    return SelectionResult(
        m=m,
        i=i,
        tau=ps_block_size(m, i),
        r=r,
        s=int(s),
        p_hat=ph,
        delta=delta(p, ph),
        predicted_cost=c,
        t=costs.t_per_degree[i],
    )


def select_parameters(
    a: np.ndarray,
    p: int,
    ctx: PhiContext | None = None,
    table: ThetaTable = DEFAULT_TABLE,
    m_max: int = M_MAX,
) -> tuple[SelectionResult, CostMatrix]:
    """Full parameter selection for ``a`` (must not be the zero matrix)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    i_max = math.ceil(math.sqrt(8 * (m_max + 1)) - 3) - 1
    if i_max > degree_index(M_MAX):
        raise ValueError(f"m_max above {M_MAX} is not supported")
    m_top = optimal_degree(i_max)
    ph = p_hat(theta(i_max, p, table), p)
    alphas = alpha_seq(a, r_max(m_top, ph), ctx)
    costs = build_cost_matrix(a, p, alphas, table, i_max)
    sel = choose(costs, p)
    sel.alphas = dict(alphas.values)
    return sel, costs
