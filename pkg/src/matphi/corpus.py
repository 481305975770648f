"""Deterministic synthetic test matrices.

The families target what makes phi-functions hard to compute: strong
nonnormality (Jordan blocks, large superdiagonals, Grcar), triangular and
quasi-triangular structure, wide norm ranges, norms sitting on the
threshold boundaries, and oscillatory 2x2 blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from .mmio import read_mtx, write_mtx
from .pade import THETA

__all__ = ["CorpusMatrix", "build_corpus", "gen_corpus", "load_corpus", "kappa_exp_estimate", "WELL_CONDITIONED_KAPPA"]

WELL_CONDITIONED_KAPPA = 1e3


@dataclass
class CorpusMatrix:
    name: str
    family: str
    a: np.ndarray
    kappa: float

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def well_conditioned(self) -> bool:
        return self.kappa <= WELL_CONDITIONED_KAPPA


def kappa_exp_estimate(a: np.ndarray, iters: int = 8) -> float:
    """Relative condition number of ``exp`` at ``a`` (Frobenius norm), estimated.

    Power iteration on ``L^* L`` where ``L`` is the Frechet derivative of
    ``exp`` at ``a``; its adjoint is the derivative at ``a^*``.
    """
    ea, _ = linalg.expm_frechet(a, np.zeros_like(a))
    z = np.ones_like(a) / a.shape[0]
    gamma = 0.0
    for _ in range(iters):
        _, w = linalg.expm_frechet(a, z)
        _, z = linalg.expm_frechet(a.conj().T, w)
        gamma_new = np.linalg.norm(z, "fro")
        if gamma_new == 0:
            break
        z = z / gamma_new
        if abs(gamma_new - gamma) <= 1e-3 * gamma_new:
            gamma = gamma_new
            break
        gamma = gamma_new
    lnorm = np.sqrt(gamma)
    return float(lnorm * np.linalg.norm(a, "fro") / np.linalg.norm(ea, "fro"))


def _jordan(n, lam):
    return np.diag(np.full(n, float(lam))) + np.diag(np.ones(n - 1), 1)


def _grcar(n, k=3):
    a = np.diag(np.ones(n)) - np.diag(np.ones(n - 1), -1)
    for d in range(1, k + 1):
        a += np.diag(np.ones(n - d), d)
    return a


def _kahan(n, theta=1.2, pert=25.0):
    s, c = np.sin(theta), np.cos(theta)
    r = np.triu(-c * np.ones((n, n)), 1) + np.eye(n)
    r = np.diag(s ** np.arange(n)) @ r
    return r + pert * np.finfo(float).eps * np.diag(np.arange(n, 0, -1.0))


def _quasi_schur(rng, n, spread):
    a = np.triu(rng.standard_normal((n, n)), 1)
    k = 0
    while k + 1 < n:
        re = rng.uniform(-spread, spread / 4)
        im = rng.uniform(0.5, spread)
        ratio = rng.uniform(0.5, 2.0)
        a[k : k + 2, k : k + 2] = [[re, im * ratio], [-im / ratio, re]]
        k += 3 if k + 3 < n else 2
    if k < n:
        a[k, k] = rng.uniform(-spread, 0)
    return a


def _normal_with_radius(rng, n, radius):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = rng.uniform(-1, 1, n)
    lam *= radius / np.max(np.abs(lam))
    a = (q * lam) @ q.T
    # Put the 1-norm itself on the boundary.
    return a * (radius / np.max(np.sum(np.abs(a), axis=0)))


def _families(rng):
    th12_7 = THETA[7][6]
    th6_7 = THETA[4][6]
    out = []

    def add(name, family, a):
        out.append((name, family, np.asarray(a)))

    add("identity_5", "identity", np.eye(5))
    add("jordan_8_m1", "jordan", _jordan(8, -1.0))
    add("jordan_16_half", "jordan", _jordan(16, 0.5))
    add("nilpotent_jordan_12", "nilpotent", _jordan(12, 0.0))
    add("strict_upper_10", "nilpotent", np.triu(rng.standard_normal((10, 10)), 1))
    add("triangular_diag_m1_m8", "triangular", np.diag(-np.arange(1.0, 9.0)) + np.diag(np.ones(7), 1))
    add("overscaling_2", "triangular-big-super", [[1.0, 1e4], [0.0, -1.0]])
    big = np.diag(np.tile([0.5, -0.5], 5))
    big[0, -1] = 1e3
    big += np.triu(0.1 * rng.standard_normal((10, 10)), 1)
    add("overscaling_10", "triangular-big-super", big)
    tri = np.triu(rng.standard_normal((40, 40)), 1) / 4 + np.diag(rng.uniform(-5, 0, 40))
    add("triangular_random_40", "triangular", tri)
    add("kahan_12", "triangular", _kahan(12))
    add("grcar_20", "nonnormal", _grcar(20))
    for n, scale in ((12, 0.01), (20, 1.0), (30, 10.0), (40, 60.0)):
        a = rng.standard_normal((n, n)) / np.sqrt(n) * scale
        add(f"dense_{n}_s{scale:g}", "dense", a)
    add("quasi_schur_10", "quasi-triangular", _quasi_schur(rng, 10, 3.0))
    add("quasi_schur_17", "quasi-triangular", _quasi_schur(rng, 17, 8.0))
    add("near_theta12_below_20", "theta-boundary", _normal_with_radius(rng, 20, th12_7 * (1 - 1e-3)))
    add("near_theta12_above_20", "theta-boundary", _normal_with_radius(rng, 20, th12_7 * (1 + 1e-3)))
    add("near_theta6_below_8", "theta-boundary", _normal_with_radius(rng, 8, th6_7 * (1 - 1e-3)))
    add("rotation_2", "complex-eigenvalues", [[0.0, 20.0], [-20.0, 0.0]])
    rot = np.zeros((8, 8))
    for k, (decay, freq) in enumerate(((-0.1, 2.0), (-1.0, 7.0), (-3.0, 0.5), (0.2, 15.0))):
        rot[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = [[decay, freq], [-freq, decay]]
    add("rotations_8", "complex-eigenvalues", rot)
    add("skew_16", "complex-eigenvalues", (lambda g: (g - g.T) * 2)(rng.standard_normal((16, 16))))
    n = 30
    lap = (np.diag(-2 * np.ones(n)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)) * 10.0
    add("laplacian_30", "stiff", lap)
    add("diag_wide_12", "diagonal", np.diag(np.concatenate([-np.logspace(-3, 1.7, 9), [0.0, 1e-8, 5.0]])))
    c = (rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))) * 0.8
    add("complex_dense_8", "complex", c)
    return out


def build_corpus(seed: int = 0) -> list[CorpusMatrix]:
    rng = np.random.default_rng(seed)
    out = []
    for name, family, a in _families(rng):
        a = np.array(a, dtype=np.complex128 if np.iscomplexobj(a) else np.float64)
        out.append(CorpusMatrix(name=name, family=family, a=a, kappa=kappa_exp_estimate(a)))
    return out


def gen_corpus(seed: int, outdir) -> list[Path]:
    """Write every corpus matrix as ``<name>.mtx`` plus ``manifest.json``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    manifest = {"schema": 1, "seed": seed, "matrices": []}
    for cm in build_corpus(seed):
        path = outdir / f"{cm.name}.mtx"
        write_mtx(path, cm.a, comment=f"{cm.family} (seed {seed})")
        paths.append(path)
        manifest["matrices"].append(
            {
                "name": cm.name,
                "file": path.name,
                "family": cm.family,
                "n": cm.n,
                "kappa_proxy": float(f"{cm.kappa:.6e}"),
                "well_conditioned": cm.well_conditioned,
            }
        )
    mpath = outdir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    paths.append(mpath)
    return paths


def load_corpus(indir) -> list[CorpusMatrix]:
    indir = Path(indir)
    manifest = json.loads((indir / "manifest.json").read_text())
    return [
        CorpusMatrix(name=e["name"], family=e["family"], a=read_mtx(indir / e["file"]), kappa=e["kappa_proxy"])
        for e in manifest["matrices"]
    ]
