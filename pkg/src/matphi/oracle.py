"""Extended-precision reference values for testing.

``phi_reference`` exponentiates the block matrix ``W = [[A, E], [0, J]]``
(``E = [I 0 ... 0]``, ``J = J_p(0) kron I``) by a scaled Taylor series and
repeated squaring, then reads ``phi_0..phi_p`` off the first block row.  It
shares no code with the Pade path.  Every power of ``W`` keeps the shape
``[[F, G_1 .. G_p], [0, T kron I]]`` with ``T`` a scalar ``p x p`` matrix, so
products are carried out on that representation and the ``n(p+1)``-square
matrix itself is never stored.

``phi_series_direct`` sums ``sum_k A^k / (k + j)!`` and serves as a second,
independent reference.

Arithmetic is python-flint ball arithmetic with radii dropped after every
operation, i.e. plain software floating point with a long mantissa.  The
working precision is a process-wide flint setting; calls here set and
restore it, so do not run them concurrently in one process.
"""

from __future__ import annotations

import contextlib
import math

import flint
import numpy as np

__all__ = [
    "ExtendedMatrix",
    "extended_precision",
    "to_extended",
    "extended_matmul",
    "phi_reference",
    "phi_series_direct",
    "phi_series_lifted",
    "rel_error",
    "scalar_phi",
]

DEFAULT_DIGITS = 64
MAX_TERMS = 10_000


def _bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10)) + 32


@contextlib.contextmanager
def extended_precision(digits: int):
    old = flint.ctx.prec
    flint.ctx.prec = _bits(digits)
    try:
        yield
    finally:
        flint.ctx.prec = old


class ExtendedMatrix:
    """Square matrix held in flint arb/acb form at a fixed digit count."""

    def __init__(self, mat, digits: int):
        self.mat = mat
        self.digits = digits

    @property
    def n(self) -> int:
        return self.mat.nrows()

    @property
    def is_complex(self) -> bool:
        return isinstance(self.mat, flint.acb_mat)

    def to_numpy(self) -> np.ndarray:
        rows = self.mat.tolist()
        if self.is_complex:
            return np.array([[complex(x) for x in row] for row in rows], dtype=np.complex128)
        return np.array([[float(x) for x in row] for row in rows], dtype=np.float64)

    def one_norm(self):
        with extended_precision(self.digits):
            return _one_norm(self.mat)

    def __repr__(self):
        return f"ExtendedMatrix(n={self.n}, digits={self.digits}, complex={self.is_complex})"


def _matcls(is_complex: bool):
    return flint.acb_mat if is_complex else flint.arb_mat


def _one_norm(mat):
    n, m = mat.nrows(), mat.ncols()
    best = flint.arb(0)
    for j in range(m):
        acc = flint.arb(0)
        for i in range(n):
            acc += abs(mat[i, j])
        acc = acc.mid()
        if acc > best:
            best = acc
    return best


def to_extended(a, digits: int = DEFAULT_DIGITS, is_complex: bool | None = None) -> ExtendedMatrix:
    """Exact conversion of a double (or complex double) array."""
    a = np.asarray(a)
    if is_complex is None:
        is_complex = np.iscomplexobj(a)
    with extended_precision(digits):
        if is_complex:
            rows = [[complex(x) for x in row] for row in a]
        else:
            rows = [[float(x) for x in row] for row in a]
        return ExtendedMatrix(_matcls(is_complex)(rows), digits)


def extended_matmul(a, b, digits: int = DEFAULT_DIGITS) -> ExtendedMatrix:
    cplx = np.iscomplexobj(a) or np.iscomplexobj(b)
    xa, xb = to_extended(a, digits, cplx), to_extended(b, digits, cplx)
    with extended_precision(digits):
        return ExtendedMatrix((xa.mat * xb.mat).mid(), digits)


class _WElement:
    """Element ``[[F, G], [0, T kron I]]`` of the algebra generated by ``W``."""

    __slots__ = ("F", "G", "T")

    def __init__(self, F, G, T):
        self.F, self.G, self.T = F, G, T

    def __mul__(self, other):
        F = (self.F * other.F).mid()
        p = len(self.G)
        G = []
        for j in range(p):
            acc = (self.F * other.G[j]).mid()
            for i in range(j + 1):
                tij = other.T[i][j]
                if tij != 0:
                    acc = (acc + self.G[i] * tij).mid()
            G.append(acc)
        T = [[sum((self.T[i][k] * other.T[k][j] for k in range(p)), flint.arb(0)) for j in range(p)]
             for i in range(p)]
        return _WElement(F, G, T)

    def row_norm(self):
        # 1-norm of the first block row [F, G_1, ..., G_p].
        return max([_one_norm(self.F)] + [_one_norm(g) for g in self.G])


def phi_reference(a, p: int, digits: int = DEFAULT_DIGITS) -> list[ExtendedMatrix]:
    """``[phi_0(A), ..., phi_p(A)]`` from the first block row of ``exp(W)``.

    ``W`` is scaled by ``2^-sigma`` so that ``||2^-sigma W||_1 <= 1/4``; the
    Taylor series is summed until a term drops below ``10^-digits`` of the
    partial sum, then the result is squared ``sigma`` times.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("a must be square")
    if p < 0 or p > 16 or n * (p + 1) > 2048:
        raise ValueError("phi_reference is limited to p <= 16 and n(p+1) <= 2048")
    if digits < 32:
        raise ValueError("digits must be >= 32")
    cplx = np.iscomplexobj(a)
    cls = _matcls(cplx)
    A = to_extended(a, digits, cplx).mat
    with extended_precision(digits):
        norm_w = max(float(_one_norm(A)), 1.0)
        sigma = max(0, math.ceil(math.log2(norm_w / 0.25)))
        scale = flint.arb(2) ** -sigma
        As = (A * scale).mid()
        zero = cls(n, n)
        eye = cls(n, n)
        for i in range(n):
            eye[i, i] = 1
        # T part of W: scale * J_p(0).
        T0 = [[flint.arb(1) if i == j else flint.arb(0) for j in range(p)] for i in range(p)]
        total = _WElement(eye, [zero] * p, T0)
        term = _WElement(eye, [zero] * p, T0)
        tol = flint.arb(10) ** -digits
        for k in range(1, MAX_TERMS + 1):
            # term <- term * W_s / k, using the sparsity of W_s.
            F = (term.F * As).mid()
            G = [(term.F * scale).mid()] if p else []
            G += [(term.G[j - 1] * scale).mid() for j in range(1, p)]
            T = [[(term.T[i][j - 1] * scale if j >= 1 else flint.arb(0)) for j in range(p)] for i in range(p)]
            inv_k = flint.arb(1) / k
            term = _WElement((F * inv_k).mid(), [(g * inv_k).mid() for g in G],
                             [[x * inv_k for x in row] for row in T])
            total = _WElement((total.F + term.F).mid(), [(x + y).mid() for x, y in zip(total.G, term.G)],
                              [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(total.T, term.T)])
            if term.row_norm() <= tol * total.row_norm():
                break
        else:
            raise ArithmeticError("Taylor series for exp(W) did not converge within the term cap")
        for _ in range(sigma):
            total = total * total
        return [ExtendedMatrix(total.F, digits)] + [ExtendedMatrix(g, digits) for g in total.G]


def _series_terms(digits: int) -> int:
    # For ||A|| <= 1 the tail after k terms is below 1/k!; need k! > 10^(digits+2).
    terms = 1
    while math.lgamma(terms + 1) / math.log(10) < digits + 2:
        terms += 1
    return terms


def _direct_sums(a, js, digits, terms):
    cplx = np.iscomplexobj(a)
    A = to_extended(a, digits, cplx).mat
    n = a.shape[0]
    with extended_precision(digits):
        if float(_one_norm(A)) > 1 + 1e-12:
            raise ValueError("phi_series_direct needs ||a||_1 <= 1; scale first")
        if terms is None:
            terms = _series_terms(digits)
        power = _matcls(cplx)(n, n)
        for i in range(n):
            power[i, i] = 1
        sums = {j: power * (flint.arb(1) / math.factorial(j)) for j in js}
        for k in range(1, terms + 1):
            power = (power * A).mid()
            for j in js:
                sums[j] = (sums[j] + power * (flint.arb(1) / math.factorial(k + j))).mid()
    return sums


def phi_series_direct(a, j: int, digits: int = DEFAULT_DIGITS, terms: int | None = None) -> ExtendedMatrix:
    """``sum_{k=0}^{terms} A^k / (k + j)!`` for ``||A||_1 <= 1``."""
    a = np.asarray(a)
    return ExtendedMatrix(_direct_sums(a, [j], digits, terms)[j], digits)


def phi_series_lifted(a, p: int, digits: int = DEFAULT_DIGITS) -> list[ExtendedMatrix]:
    """Direct series at ``2^-sigma A`` lifted by the double-argument formula.

    ``phi_j(2X) = 2^-j (phi_0(X) phi_j(X) + sum_{k=1}^{j} phi_k(X) / (j-k)!)``.
    """
    a = np.asarray(a)
    norm = float(np.max(np.sum(np.abs(a), axis=0)))
    sigma = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0 else 0
    sums = _direct_sums(a * 2.0**-sigma, range(p + 1), digits, None)
    vals = [sums[j] for j in range(p + 1)]
    with extended_precision(digits):
        for _ in range(sigma):
            new = list(vals)
            for j in range(p + 1):
                acc = (vals[0] * vals[j]).mid()
                for k in range(1, j + 1):
                    acc = (acc + vals[k] * (flint.arb(1) / math.factorial(j - k))).mid()
                new[j] = (acc * (flint.arb(2) ** -j)).mid()
            vals = new
    return [ExtendedMatrix(v, digits) for v in vals]


def rel_error(ref: ExtendedMatrix, approx) -> float:
    """``||ref - approx||_1 / ||ref||_1`` evaluated in extended precision."""
    if isinstance(approx, ExtendedMatrix):
        other = approx.mat
    else:
        other = to_extended(approx, ref.digits, ref.is_complex).mat
    with extended_precision(ref.digits):
        num = _one_norm((ref.mat - other).mid())
        den = _one_norm(ref.mat)
        if den == 0:
            return float(num)
        return float((num / den).mid())


def scalar_phi(z, p: int, digits: int = DEFAULT_DIGITS):
    """Closed forms ``phi_0 = e^z``, ``phi_j = (phi_{j-1} - 1/(j-1)!) / z`` as mpmath values."""
    import mpmath

    with mpmath.workdps(digits + 10):
        z = mpmath.mpmathify(z)
        if z == 0:
            return [mpmath.mpf(1) / math.factorial(j) for j in range(p + 1)]
        # The recurrence cancels for small |z|; extra digits cover |z| >= 1e-6.
        with mpmath.workdps(digits + 10 + 6 * (p + 1)):
            out = [mpmath.exp(z)]
            for j in range(1, p + 1):
                out.append((out[-1] - mpmath.mpf(1) / math.factorial(j - 1)) / z)
        return [+x for x in out]
