"""
Why the selection looks at norms of powers
==========================================

For a nonnormal matrix ``||A||_1`` can be far larger than the quantities
``||A^r||_1^(1/r)`` that actually govern the truncation error.  Scaling
decisions based on ``||A||_1`` alone would square far too often, which costs
products and loses accuracy.  This script shows the gap for upper triangular
matrices with one large off-diagonal entry.
"""

import numpy as np

from matphi import PhiContext, phi_funm
from matphi.oracle import phi_reference, rel_error

print(f"{'b':>8} {'||A||_1':>9} {'alpha_2':>9} {'s':>3} {'products':>9} {'max error':>10}")
for b in (1e1, 1e3, 1e5, 1e7):
    A = np.array([[1.0, b], [0.0, -1.0]])
    res = phi_funm(A, 3, PhiContext(exact_alpha=True))
    ref = phi_reference(A, 3)
    err = max(rel_error(r, x) for r, x in zip(ref, res.phis))
    print(f"{b:8.0e} {np.linalg.norm(A, 1):9.1e} {res.selection.alphas[2]:9.2e} "
          f"{res.selection.s:>3} {float(res.matmul_count):9.2f} {err:10.1e}")

# Here A^2 = I, so alpha_2 = ||A^3||^(1/3) grows like b^(1/3) rather than b,
# and s goes up by about one per factor of eight in b instead of one per
# factor of two.  The triangular
# path recomputes the diagonal and first superdiagonal of exp(2^k A) exactly
# after every squaring, which keeps the error small even for b = 1e7.
