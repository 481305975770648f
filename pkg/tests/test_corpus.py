import json

import numpy as np

from matphi.corpus import build_corpus, gen_corpus, kappa_exp_estimate, load_corpus


def test_size_and_shape(corpus):
    assert len(corpus) >= 20
    names = [cm.name for cm in corpus]
    assert len(set(names)) == len(names)
    for cm in corpus:
        assert cm.a.ndim == 2 and cm.a.shape[0] == cm.a.shape[1]
        assert 2 <= cm.n <= 40
        assert np.all(np.isfinite(cm.a))


def test_families_present(corpus):
    fams = {cm.family for cm in corpus}
    for f in ("jordan", "triangular-big-super", "dense", "quasi-triangular", "nilpotent",
              "theta-boundary", "complex-eigenvalues"):
        assert f in fams


def test_alpha2_far_below_norm(corpus):
    found = []
    for cm in corpus:
        norm = np.max(np.sum(np.abs(cm.a), axis=0))
        p2 = np.max(np.sum(np.abs(cm.a @ cm.a), axis=0)) ** 0.5
        p3 = np.max(np.sum(np.abs(cm.a @ cm.a @ cm.a), axis=0)) ** (1 / 3)
        if max(p2, p3) < norm / 10:
            found.append(cm.name)
    assert found


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    pa, pb = gen_corpus(0, a), gen_corpus(0, b)
    assert [p.name for p in pa] == [p.name for p in pb]
    for x, y in zip(pa, pb):
        assert x.read_bytes() == y.read_bytes()
    other = {p.name: p.read_bytes() for p in gen_corpus(1, tmp_path / "c")}
    assert any(other[p.name] != p.read_bytes() for p in pa)


def test_load_round_trip(tmp_path, corpus):
    gen_corpus(0, tmp_path)
    loaded = load_corpus(tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["schema"] == 1 and len(manifest["matrices"]) == len(corpus)
    for x, y in zip(corpus, loaded):
        assert x.name == y.name and np.array_equal(x.a, y.a)


def test_kappa_proxy():
    assert abs(kappa_exp_estimate(np.eye(3)) - 1) < 1e-6
    assert kappa_exp_estimate(np.array([[1.0, 1e4], [0.0, -1.0]])) > 1e3
