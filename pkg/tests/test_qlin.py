import importlib

import numpy as np
import pytest

from holoq import qlin
from holoq.errors import DimensionError, InvalidQumix, QubitLimitError
from holoq.qlin import _pykernels

from conftest import entangled_top, worked_top, sup

P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
MIX = (P0 + P1) / 2
I2 = np.eye(2)


def test_pure_qumix_examples():
    assert np.allclose(qlin.pure_qumix(qlin.basis_ket("0")), P0)
    assert np.allclose(qlin.pure_qumix(sup()), np.full((2, 2), 0.5))
    ghz = qlin.pure_qumix(qlin.ket_from_labels({"000": 1, "111": 1}))
    expected = np.zeros((8, 8))
    expected[np.ix_([0, 7], [0, 7])] = 0.5
    assert np.allclose(ghz, expected)


def test_pure_qumix_rejects_unnormalized():
    with pytest.raises(InvalidQumix):
        qlin.pure_qumix(np.array([1.0, 1.0]))


def test_tensor_examples():
    assert np.allclose(qlin.tensor(P0, P1), np.diag([0, 1, 0, 0]))
    assert np.isclose(np.trace(qlin.tensor(P1, I2 / 2)), 1)
    out = qlin.kron_all([MIX, MIX, P0])
    assert np.allclose(out, np.diag([0.25, 0, 0.25, 0, 0.25, 0, 0.25, 0]))


def test_reduce_examples():
    assert np.allclose(qlin.reduce(entangled_top(), [1]), MIX)
    rho = qlin.random_mixed(3, np.random.default_rng(1))
    assert np.allclose(qlin.reduce(rho, [1, 2, 3]), rho)
    assert np.allclose(qlin.reduce(worked_top(), [3]), P0)


def test_reduce_order_is_respected():
    rho = qlin.kron_all([P0, P1, MIX])
    assert np.allclose(qlin.reduce(rho, [2, 1]), np.kron(P1, P0))


@pytest.mark.parametrize("keep", [[0], [4], [1, 1]])
def test_reduce_errors(keep):
    with pytest.raises(DimensionError):
        qlin.reduce(qlin.kron_all([P0, P0, P0]), keep)


def test_probability_examples():
    assert qlin.probability(I2, P1) == pytest.approx(1)
    v = qlin.ket_from_labels({"011": 1, "001": 1, "110": 1, "101": 1})
    assert qlin.probability(I2, qlin.pure_qumix(v)) == pytest.approx(0.75, abs=1e-12)
    ghz = qlin.pure_qumix(qlin.ket_from_labels({"000": 1, "111": 1}))
    assert qlin.probability(I2, ghz) == pytest.approx(0.5, abs=1e-12)


def test_probability_matches_full_projector(rng):
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for _ in range(10):
        u = qlin.random_unitary(2, rng)
        rho = qlin.random_mixed(3, rng)
        tn = qlin.kron_all([u, u, u])
        proj = tn @ np.kron(np.eye(4), P1) @ tn.conj().T
        assert qlin.probability(u, rho) == pytest.approx(np.trace(proj @ rho).real, abs=1e-12)
    assert qlin.probability(h, qlin.pure_qumix(sup())) == pytest.approx(0)


def test_probability_rejects_invalid():
    with pytest.raises(InvalidQumix):
        qlin.probability(I2, np.diag([0.5, 0.6]))


def test_validate_examples():
    assert qlin.validate_qumix(P0).passed
    bad_trace = qlin.validate_qumix(np.diag([0.5, 0.6]))
    assert not bad_trace.passed
    assert bad_trace.trace_defect == pytest.approx(0.1)
    non_herm = qlin.validate_qumix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    assert not non_herm.passed
    assert non_herm.hermitian_defect == pytest.approx(0.1)
    assert "invalid" in non_herm.describe()


def test_qumix_close_examples():
    assert qlin.qumix_close(P0, P0, 1e-9)
    assert not qlin.qumix_close(P0, P1, 1e-9)
    assert qlin.qumix_close(MIX, qlin.reduce(entangled_top(), [1]), 1e-9)
    with pytest.raises(DimensionError):
        qlin.qumix_close(P0, np.eye(4))


def test_qubit_limit():
    with pytest.raises(QubitLimitError):
        qlin.basis_ket("0" * 13)
    with pytest.raises(DimensionError):
        qlin.n_qubits(np.eye(3))


# --------------------------------------------------------------------------
# properties


def test_reduce_preserves_trace(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        rho = qlin.random_mixed(n, rng)
        k = int(rng.integers(1, n + 1))
        keep = list(rng.choice(np.arange(1, n + 1), size=k, replace=False))
        assert abs(np.trace(qlin.reduce(rho, keep)) - 1) <= 1e-9


def test_reduce_coherence(rng):
    for _ in range(30):
        rho = qlin.random_mixed(4, rng)
        outer = sorted(rng.choice([1, 2, 3, 4], size=3, replace=False))
        inner = sorted(rng.choice(outer, size=2, replace=False))
        mid = qlin.reduce(rho, outer)
        local = [outer.index(q) + 1 for q in inner]
        assert qlin.qumix_close(qlin.reduce(mid, local), qlin.reduce(rho, inner))


def test_probability_affine(rng):
    for _ in range(30):
        u = qlin.random_unitary(2, rng)
        rho, sigma = qlin.random_mixed(3, rng), qlin.random_mixed(3, rng)
        lam = rng.random()
        mix = lam * rho + (1 - lam) * sigma
        expected = lam * qlin.probability(u, rho) + (1 - lam) * qlin.probability(u, sigma)
        assert abs(qlin.probability(u, mix) - expected) <= 1e-9


def test_untouched_factor_preservation(rng):
    for _ in range(30):
        rho = qlin.random_mixed(3, rng)
        start = int(rng.integers(0, 2))
        a = qlin.random_unitary(4, rng)
        out = qlin.apply_kraus_local(rho, start, a)
        rest = [3] if start == 0 else [1]
        assert qlin.qumix_close(qlin.reduce(out, rest), qlin.reduce(rho, rest))


def test_apply_kraus_local_matches_dense(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, n + 1))
        start = int(rng.integers(0, n - m + 1))
        rho = qlin.random_mixed(n, rng)
        u = qlin.random_unitary(2**m, rng)
        full = np.kron(np.kron(np.eye(2**start), u), np.eye(2 ** (n - start - m)))
        assert qlin.qumix_close(qlin.apply_kraus_local(rho, start, u), full @ rho @ full.conj().T)


def test_trace_preservation_of_channels(rng):
    from holoq.gatelib import random_kraus

    for arity in (1, 2, 3):
        ks = random_kraus(arity, rng)
        rho = qlin.random_mixed(4, rng)
        out = qlin.apply_kraus_local(rho, 4 - arity, ks)
        assert qlin.validate_qumix(out).passed


def test_permute_qubits(rng):
    a, b, c = (qlin.random_mixed(1, rng) for _ in range(3))
    rho = qlin.kron_all([a, b, c])
    assert qlin.qumix_close(qlin.permute_qubits(rho, [2, 0, 1]), qlin.kron_all([c, a, b]))


def test_embed_effect():
    e = qlin.embed_effect(P1, 2, 3)
    assert np.allclose(e, np.kron(np.eye(4), P1))


# --------------------------------------------------------------------------
# backends


def test_backend_is_reported():
    assert qlin.BACKEND in ("cython", "python")


def test_pure_python_env_selects_numpy(monkeypatch):
    from holoq.qlin import _backend

    monkeypatch.setenv("HOLOQ_PURE_PYTHON", "1")
    try:
        reloaded = importlib.reload(_backend)
        assert reloaded.BACKEND == "python"
        assert reloaded.partial_trace is _pykernels.partial_trace
    finally:
        monkeypatch.delenv("HOLOQ_PURE_PYTHON")
        importlib.reload(_backend)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_backends_agree(rng, n):
    ck = pytest.importorskip("holoq.qlin._ckernels")
    for _ in range(10):
        rho = qlin.random_mixed(n, rng)
        k = int(rng.integers(1, n + 1))
        keep = sorted(int(x) for x in rng.choice(n, size=k, replace=False))
        assert np.allclose(ck.partial_trace(rho, n, keep), _pykernels.partial_trace(rho, n, keep), atol=1e-13)
        m = int(rng.integers(1, n + 1))
        start = int(rng.integers(0, n - m + 1))
        ks = np.ascontiguousarray(np.stack([qlin.random_unitary(2**m, rng) / np.sqrt(2)] * 2))
        assert np.allclose(
            ck.apply_local(rho, n, start, ks), _pykernels.apply_local(rho, n, start, ks), atol=1e-13
        )
