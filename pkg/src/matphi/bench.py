"""Forward-error and cost report over a corpus.

For each matrix and each ``j = 0..p`` the report holds
``||phi_j(A) - X_j||_1 / ||phi_j(A)||_1`` against the extended-precision
reference, the measured multiplication count and the count predicted from
the selected parameters.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .corpus import CorpusMatrix
from .densemat import PhiContext
from .oracle import DEFAULT_DIGITS, phi_reference, rel_error
from .phieval import phi_funm
from .selection import predicted_cost

__all__ = ["BenchRow", "BenchReport", "bench", "evaluate_member"]

FIELDS = [
    "name", "family", "n", "kappa_proxy", "well_conditioned", "j",
    "rel_error", "matmul_count", "predicted_cost", "m", "s", "status",
]


@dataclass
class BenchRow:
    name: str
    family: str
    n: int
    kappa_proxy: float
    well_conditioned: bool
    j: int
    rel_error: float | None
    matmul_count: str
    predicted_cost: str
    m: int | None
    s: int | None
    status: str = "ok"

    def as_dict(self):
        d = dict(self.__dict__)
        d["rel_error"] = "" if self.rel_error is None else f"{self.rel_error:.6e}"
        d["kappa_proxy"] = f"{self.kappa_proxy:.6e}"
        return d


@dataclass
class BenchReport:
    p: int
    rows: list[BenchRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row.as_dict())
        return buf.getvalue()

    def failures(self) -> list[BenchRow]:
        return [r for r in self.rows if r.status != "ok"]

    def summary(self) -> str:
        lines = [f"phi-function benchmark, p = {self.p}, {len({r.name for r in self.rows})} matrices"]
        lines.append(f"{'j':>3} {'max error':>12} {'median error':>13}")
        for j in range(self.p + 1):
            errs = [r.rel_error for r in self.rows if r.j == j and r.rel_error is not None]
            if errs:
                lines.append(f"{j:>3} {max(errs):12.3e} {statistics.median(errs):13.3e}")
        seen = {}
        for r in self.rows:
            if r.status == "ok":
                seen[r.name] = float(eval_fraction(r.matmul_count))
        lines.append(f"total cost: {sum(seen.values()):.2f} matrix multiplications")
        mismatched = sorted({r.name for r in self.rows if r.status == "cost-mismatch"})
        failed = sorted({r.name for r in self.rows if r.status not in ("ok", "cost-mismatch")})
        lines.append(f"cost mismatches: {len(mismatched)}" + (f" ({', '.join(mismatched)})" if mismatched else ""))
        lines.append(f"failures: {len(failed)}" + (f" ({', '.join(failed)})" if failed else ""))
        return "\n".join(lines) + "\n"


def eval_fraction(text: str):
    from fractions import Fraction

    return Fraction(text)


def evaluate_member(cm: CorpusMatrix, p: int, digits: int = DEFAULT_DIGITS, seed: int | None = None) -> list[BenchRow]:
    ctx = PhiContext() if seed is None else PhiContext(seed=seed)
    base = dict(name=cm.name, family=cm.family, n=cm.n, kappa_proxy=cm.kappa, well_conditioned=cm.well_conditioned)
    try:
        res = phi_funm(cm.a, p, ctx)
        ref = phi_reference(cm.a, p, digits)
    except Exception as exc:  # recorded, never fatal
        tag = f"error:{type(exc).__name__}"
        return [BenchRow(**base, j=j, rel_error=None, matmul_count="", predicted_cost="", m=None, s=None, status=tag)
                for j in range(p + 1)]
    sel = res.selection
    if sel is None:
        pred, m, s = res.matmul_count, None, None
    else:
        pred, m, s = predicted_cost(sel.i, p, sel.s), sel.m, sel.s
    rows = []
    for j in range(p + 1):
        err = rel_error(ref[j], res.phis[j])
        status = "ok"
        if err != err or err == float("inf"):
            status, err = "nonfinite-error", None
        elif res.matmul_count != pred:
            status = "cost-mismatch"
        rows.append(BenchRow(**base, j=j, rel_error=err, matmul_count=str(res.matmul_count),
                             predicted_cost=str(pred), m=m, s=s, status=status))
    return rows


def bench(corpus: list[CorpusMatrix], p: int = 10, digits: int = DEFAULT_DIGITS, jobs: int = 1,
          seed: int | None = None) -> BenchReport:
    report = BenchReport(p=p)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(evaluate_member, cm, p, digits, seed) for cm in corpus]
            for fut in futures:
                report.rows.extend(fut.result())
    else:
        for cm in corpus:
            report.rows.extend(evaluate_member(cm, p, digits, seed))
    return report
