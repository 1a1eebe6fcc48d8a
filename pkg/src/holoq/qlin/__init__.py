"""Dense density-operator algebra on n-qubit registers.

Qumixes are plain ``complex128`` numpy arrays of shape ``(2**n, 2**n)``;
kets are 1-d arrays of length ``2**n``.  Qubit 0 is the leftmost tensor
factor and the most significant bit of a basis index, so the label
``|x_1 ... x_n>`` sits at integer ``x_1 2^(n-1) + ... + x_n``.
"""

from dataclasses import dataclass
from functools import reduce as _fold

import numpy as np

from ..errors import DimensionError, InvalidQumix, QubitLimitError
from . import _backend

__all__ = [
    "BACKEND",
    "MAX_QUBITS",
    "TOL_HERMITIAN",
    "TOL_POSITIVE",
    "TOL_TRACE",
    "QumixReport",
    "apply_kraus_local",
    "basis_ket",
    "embed_effect",
    "ket_from_labels",
    "kron_all",
    "n_qubits",
    "permute_qubits",
    "probability",
    "pure_qumix",
    "qumix_close",
    "random_mixed",
    "random_pure",
    "random_unitary",
    "reduce",
    "tensor",
    "truth_effect",
    "validate_qumix",
]

BACKEND = _backend.BACKEND

MAX_QUBITS = 12
TOL_HERMITIAN = 1e-9
TOL_TRACE = 1e-9
TOL_POSITIVE = 1e-9

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def n_qubits(rho):
    """Number of qubits of a square matrix or a ket."""
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim or (rho.ndim == 2 and rho.shape[1] != dim):
        raise DimensionError(f"shape {rho.shape} is not a multi-qubit operator")
    if n > MAX_QUBITS:
        raise QubitLimitError(f"{n} qubits exceed the dense limit of {MAX_QUBITS}")
    return n


def check_width(n):
    if n > MAX_QUBITS:
        raise QubitLimitError(f"{n} qubits exceed the dense limit of {MAX_QUBITS}")


def _as_matrix(rho):
    return np.ascontiguousarray(rho, dtype=np.complex128)


def basis_ket(bits):
    """Computational basis ket for a bit string such as ``"010"``."""
    n = len(bits)
    check_width(n)
    v = np.zeros(2**n, dtype=complex)
    v[int(bits, 2) if bits else 0] = 1.0
    return v


def ket_from_labels(terms):
    """Normalized superposition from ``{"010": amp, ...}``."""
    terms = dict(terms)
    n = len(next(iter(terms)))
    v = np.zeros(2**n, dtype=complex)
    for label, amp in terms.items():
        v[int(label, 2)] += amp
    return v / np.linalg.norm(v)


def pure_qumix(v):
    """Projector ``|v><v|`` onto a normalized ket."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    n_qubits(v)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > TOL_TRACE:
        raise InvalidQumix(f"ket has norm {norm:.12g}, expected 1")
    return np.outer(v, v.conj())


def tensor(rho, sigma):
    out = np.kron(rho, sigma)
    n_qubits(out)
    return out


def kron_all(factors):
    return _fold(np.kron, factors, np.ones((1, 1), dtype=complex))


def reduce(rho, keep):
    """Partial trace onto the 1-based qubit indices in ``keep``, in that order."""
    rho = _as_matrix(rho)
    n = n_qubits(rho)
    keep = list(keep)
    if len(set(keep)) != len(keep):
        raise DimensionError(f"duplicate qubit index in {keep}")
    for q in keep:
        if not 1 <= q <= n:
            raise DimensionError(f"qubit index {q} outside 1..{n}")
    zero_based = [q - 1 for q in keep]
    if zero_based == list(range(n)):
        return rho.copy()
    return _backend.partial_trace(rho, n, zero_based)


def reduce_span(rho, start, stop):
    """Partial trace onto the contiguous 0-based qubit range ``[start, stop)``."""
    rho = _as_matrix(rho)
    n = n_qubits(rho)
    if start == 0 and stop == n:
        return rho.copy()
    return _backend.partial_trace(rho, n, list(range(start, stop)))


def permute_qubits(rho, order):
    """Reorder tensor factors: new qubit ``i`` is old qubit ``order[i]`` (0-based)."""
    n = n_qubits(rho)
    order = list(order)
    t = rho.reshape([2] * (2 * n)).transpose(order + [n + q for q in order])
    return np.ascontiguousarray(t.reshape(rho.shape))


def apply_kraus_local(rho, start, kraus):
    """Apply a channel given by ``kraus`` to qubits ``[start, start + m)``."""
    rho = _as_matrix(rho)
    n = n_qubits(rho)
    stack = np.ascontiguousarray(np.asarray(kraus, dtype=np.complex128))
    if stack.ndim == 2:
        stack = stack[None]
    m = stack.shape[1].bit_length() - 1
    if start < 0 or start + m > n:
        raise DimensionError(f"block [{start}, {start + m}) outside {n} qubits")
    if m == n:
        out = np.zeros_like(rho)
        for k in stack:
            out += k @ rho @ k.conj().T
        return out
    return _backend.apply_local(rho, n, start, stack)


def truth_effect(perspective_u):
    """Single-qubit truth projector ``T |1><1| T^dagger``."""
    u = np.asarray(perspective_u, dtype=complex)
    return u @ P1 @ u.conj().T


def embed_effect(effect, start, n):
    """``I ⊗ effect ⊗ I`` with ``effect`` on qubits ``[start, start + m)``."""
    m = effect.shape[0].bit_length() - 1
    return kron_all(
        [np.eye(2**start), effect, np.eye(2 ** (n - start - m))]
    ).astype(complex)


def probability(perspective_u, rho, check=True):
    """Probability that the last qubit of ``rho`` is true under a perspective.

    Computes ``tr(T^{⊗n} (I ⊗ |1><1|) T^{⊗n†} rho)``, which only depends on
    the marginal of the last qubit.
    """
    rho = _as_matrix(rho)
    n = n_qubits(rho)
    if check:
        report = validate_qumix(rho)
        if not report.passed:
            raise InvalidQumix(report.describe())
    last = reduce_span(rho, n - 1, n)
    return float(np.real(np.trace(truth_effect(perspective_u) @ last)))


@dataclass(frozen=True)
class QumixReport:
    hermitian_defect: float
    min_eigenvalue: float
    trace_defect: float

    @property
    def passed(self):
        return (
            self.hermitian_defect <= TOL_HERMITIAN
            and self.min_eigenvalue >= -TOL_POSITIVE
            and self.trace_defect <= TOL_TRACE
        )

    def describe(self):
        verdict = "valid" if self.passed else "invalid"
        return (
            f"{verdict} qumix: hermitian defect {self.hermitian_defect:.3e}, "
            f"min eigenvalue {self.min_eigenvalue:.3e}, "
            f"trace defect {self.trace_defect:.3e}"
        )


def validate_qumix(rho):
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    sym = (rho + rho.conj().T) / 2
    min_eig = float(np.min(np.linalg.eigvalsh(sym)))
    trace_defect = float(abs(np.trace(rho) - 1.0))
    return QumixReport(herm, min_eig, trace_defect)


def qumix_close(rho, sigma, tol=1e-9):
    """Max-entry distance test between two operators of equal size."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"cannot compare shapes {rho.shape} and {sigma.shape}")
    return bool(np.max(np.abs(rho - sigma)) <= tol)


def random_pure(n, rng):
    """Haar-random ket on n qubits."""
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def random_mixed(n, rng, rank=None):
    """Random density operator from a Ginibre matrix of the given rank."""
    d = 2**n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d, rng):
    """Haar-random d×d unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
