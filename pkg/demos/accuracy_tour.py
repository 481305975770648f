"""
Accuracy across the test corpus
===============================

Runs every matrix of the synthetic corpus through ``phi_funm`` with p = 6 and
compares each output with a 64-digit reference.  Errors are relative
1-norm errors.  Matrices whose exponential is ill-conditioned (large
``kappa``) may legitimately show larger errors.
"""

from matphi.bench import bench
from matphi.corpus import build_corpus

corpus = build_corpus(seed=0)
report = bench(corpus, p=6)

print(f"{'matrix':24} {'n':>3} {'kappa':>8} {'m':>3} {'s':>3} {'max error':>10}")
for cm in corpus:
    rows = [r for r in report.rows if r.name == cm.name]
    worst = max(r.rel_error for r in rows)
    print(f"{cm.name:24} {cm.n:>3} {cm.kappa:8.1e} {rows[0].m!s:>3} {rows[0].s!s:>3} {worst:10.2e}")

print()
print(report.summary())
