"""Scaling and recovering evaluation of ``phi_0(A), ..., phi_p(A)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .densemat import (
    PhiContext,
    Structure,
    as_square_matrix,
    detect_structure,
    lu_solve_multi,
    matmul,
    quasi_blocks,
    refresh_exp_diagonal,
    set_exp_blocks,
)
from .pade import OPTIMAL_DEGREES, PadeCoeffs, degree_index, pade_coeffs, theta
from .selection import SelectionResult, delta, p_hat, predicted_cost, ps_block_size, select_parameters

__all__ = [
    "PhiResult",
    "PowerCache",
    "ps_eval_pair",
    "recover_chain",
    "double_argument_step",
    "phi_funm",
    "phi_funm_fixed",
]


@dataclass
class PhiResult:
    phis: list[np.ndarray]
    selection: SelectionResult | None
    matmul_count: Fraction
    structure: Structure
    estimator: dict | None = None

    def __iter__(self):
        return iter(self.phis)

    def __getitem__(self, j):
        return self.phis[j]

    def diagnostics(self) -> dict:
        out = {
            "schema": 1,
            "p": len(self.phis) - 1,
            "n": int(self.phis[0].shape[0]),
            "structure": self.structure.value,
            "matmul_count": str(self.matmul_count),
            "matmul_count_float": float(self.matmul_count),
        }
        if self.estimator is not None:
            out["estimator"] = dict(self.estimator)
        if self.selection is None:
            out["zero_matrix"] = True
        else:
            out.update(self.selection.as_dict())
        return out


class PowerCache:
    """``I, A, A^2, ..., A^tau`` built in ascending order."""

    def __init__(self, a: np.ndarray, tau: int, ctx: PhiContext | None = None):
        self.tau = tau
        self.powers = [np.eye(a.shape[0], dtype=a.dtype), a]
        for _ in range(2, tau + 1):
            self.powers.append(matmul(self.powers[-1], a, ctx))

    def __getitem__(self, k: int) -> np.ndarray:
        return self.powers[k]


def _chunk(coeffs: np.ndarray, start: int, stop: int, cache: PowerCache) -> np.ndarray:
    out = coeffs[start] * cache[0]
    for j in range(1, stop - start):
        out = out + coeffs[start + j] * cache[j]
    return out


def _ps_poly(coeffs: np.ndarray, cache: PowerCache, ctx) -> np.ndarray:
    m = len(coeffs) - 1
    tau = cache.tau
    nu = m // tau
    top = cache[tau]
    if m % tau == 0:
        # Last chunk is the scalar c_m: fold it in without a product.
        q = coeffs[m] * top + _chunk(coeffs, tau * (nu - 1), tau * nu, cache)
        ks = range(nu - 2, -1, -1)
    else:
        q = _chunk(coeffs, tau * nu, m + 1, cache)
        ks = range(nu - 1, -1, -1)
    for k in ks:
        q = matmul(q, top, ctx) + _chunk(coeffs, tau * k, tau * (k + 1), cache)
    return q


def ps_eval_pair(
    a_scaled: np.ndarray, coeffs: PadeCoeffs, tau: int, ctx: PhiContext | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """``N_m(A)`` and ``D_m(A)`` by Paterson-Stockmeyer with one shared set of powers.

    Uses ``tau - 1 + 2 (floor(m / tau) - [tau | m])`` multiplications.
    """
    if not 1 <= tau <= coeffs.m:
        raise ValueError(f"block size {tau} outside 1..{coeffs.m}")
    cache = PowerCache(a_scaled, tau, ctx)
    return _ps_poly(coeffs.num, cache, ctx), _ps_poly(coeffs.den, cache, ctx)


def recover_chain(
    rp: np.ndarray, a_scaled: np.ndarray, p: int, ctx: PhiContext | None = None
) -> list[np.ndarray]:
    """``[R_0, ..., R_p]`` from ``R_p`` via ``R_j = A R_{j+1} + I / j!``."""
    n = a_scaled.shape[0]
    out = [None] * (p + 1)
    out[p] = rp
    eye = np.eye(n, dtype=np.result_type(rp, a_scaled))
    for j in range(p - 1, -1, -1):
        r = matmul(a_scaled, out[j + 1], ctx)
        r += eye / math.factorial(j)
        out[j] = r
    return out


def double_argument_step(phis: list[np.ndarray], ctx: PhiContext | None = None) -> list[np.ndarray]:
    """Move ``phi_1..phi_p`` from argument ``X`` to ``2X`` in place.

    Slots are rewritten for ``j = p, p-1, ..., 1``.  Writing slot ``j`` only
    reads slots ``0..j`` and those still hold values at ``X``; an ascending
    sweep would read already-updated entries.  ``phi_0`` is left for the
    caller to square.
    """
    p = len(phis) - 1
    for j in range(p, 0, -1):
        acc = matmul(phis[0], phis[j], ctx)
        for k in range(1, j + 1):
            acc += phis[k] / math.factorial(j - k)
        phis[j] = acc * 2.0**-j
    return phis


def _estimator_info(ctx: PhiContext) -> dict:
    return {"t": ctx.t_cols, "itmax": ctx.itmax, "seed": ctx.seed, "exact_alpha": ctx.exact_alpha}


def _zero_result(a: np.ndarray, p: int, structure: Structure) -> PhiResult:
    eye = np.eye(a.shape[0], dtype=a.dtype)
    return PhiResult(
        phis=[eye / math.factorial(j) for j in range(p + 1)],
        selection=None,
        matmul_count=Fraction(0),
        structure=structure,
    )


def _evaluate(a: np.ndarray, p: int, sel: SelectionResult, structure: Structure, ctx: PhiContext):
    a_scaled = a * 2.0**-sel.s
    n_m, d_m = ps_eval_pair(a_scaled, pade_coeffs(sel.m, p), sel.tau, ctx)
    rp = lu_solve_multi(d_m, n_m, ctx)
    phis = recover_chain(rp, a_scaled, p, ctx)
    if structure.triangular:
        blocks = quasi_blocks(a_scaled)
        set_exp_blocks(phis[0], a_scaled, blocks)
    for k in range(1, sel.s + 1):
        double_argument_step(phis, ctx)
        if structure.triangular:
            phis[0] = refresh_exp_diagonal(phis[0], a_scaled, k, ctx, blocks)
        else:
            phis[0] = matmul(phis[0], phis[0], ctx)
    return phis


def phi_funm(a, p: int, ctx: PhiContext | None = None) -> PhiResult:
    """Compute ``phi_0(A) = exp(A), phi_1(A), ..., phi_p(A)``.

    Parameters
    ----------
    a : (n, n) array_like
        Real or complex square matrix with finite entries.
    p : int
        Largest phi index, ``p >= 1``.
    ctx : PhiContext, optional
        Carries the multiplication counter and estimator seed.  A fresh one
        is used when omitted.

    Returns
    -------
    PhiResult
        ``result.phis[j]`` approximates ``phi_j(A)``; ``result.selection``
        holds the chosen degree and scaling parameter.

    Examples
    --------
    >>> import numpy as np
    >>> res = phi_funm(np.zeros((2, 2)), 2)
    >>> res.phis[2]
    array([[0.5, 0. ],
           [0. , 0.5]])
    """
    a = as_square_matrix(a)
    if p < 1:
        raise ValueError("p must be >= 1")
    ctx = ctx if ctx is not None else PhiContext()
    ctx.reset()
    structure = detect_structure(a)
    if not a.any():
        return _zero_result(a, p, structure)
    sel, _ = select_parameters(a, p, ctx)
    phis = _evaluate(a, p, sel, structure, ctx)
    return PhiResult(phis=phis, selection=sel, matmul_count=ctx.count, structure=structure,
                     estimator=_estimator_info(ctx))


def phi_funm_fixed(a, p: int, m: int, s: int | None = None, ctx: PhiContext | None = None) -> PhiResult:
    """Like :func:`phi_funm` with the degree ``m`` forced.

    With ``s`` omitted the scaling parameter is the cheapest one the
    selection logic allows for degree ``m``; otherwise ``s`` is used as given,
    whether or not it meets the accuracy thresholds.
    """
    a = as_square_matrix(a)
    if p < 1:
        raise ValueError("p must be >= 1")
    if m not in OPTIMAL_DEGREES:
        raise ValueError(f"forced degree must be one of {OPTIMAL_DEGREES}")
    if s is not None and s < 0:
        raise ValueError("s must be >= 0")
    ctx = ctx if ctx is not None else PhiContext()
    ctx.reset()
    structure = detect_structure(a)
    i = degree_index(m)
    ph = p_hat(theta(i, p), p)
    r = None
    if s is None:
        s = 0
        if a.any():
            _, costs = select_parameters(a, p, ctx)
            r, cost = min(((rr, c) for rr, c in costs.entries[i].items() if c is not None),
                          key=lambda rc: (rc[1], rc[0]))
            s = int((cost - predicted_cost(i, p, 0)) / (p + 1))
    sel = SelectionResult(
        m=m,
        i=i,
        tau=ps_block_size(m, i),
        r=r,
        s=s,
        p_hat=ph,
        delta=delta(p, ph),
        predicted_cost=predicted_cost(i, p, s),
    )
    phis = _evaluate(a, p, sel, structure, ctx)
    return PhiResult(phis=phis, selection=sel, matmul_count=ctx.count, structure=structure,
                     estimator=_estimator_info(ctx))
