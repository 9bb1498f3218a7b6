"""Finite-dimensional state vectors, gates, partial traces and a small Hermitian eigensolver.

State vectors and operators are plain ``numpy`` complex arrays. The only
wrapper type is :class:`Ray`, which fixes a canonical global phase so that
physically identical states compare (and serialize) identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12
    unitary: float = 1e-10
    hermitian: float = 1e-12
    trace: float = 1e-12
    eig_floor: float = 1e-12
    jacobi_offdiag: float = 1e-12
    involution: float = 1e-10
    axis: float = 1e-10
    ray_equal: float = 1e-12
    # moduli within this of the maximum count as tied for the phase convention
    phase_tie: float = 1e-12


TOL = Tolerances()

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"i": PAULI_I, "x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}


@dataclass(frozen=True)
class BipartiteSplit:
    dim_a: int = 2
    dim_b: int = 2

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValidationError(f"split dimensions must be positive, got {self}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def to_json(self) -> dict:
        return {"dim_a": self.dim_a, "dim_b": self.dim_b}

    @classmethod
    def from_json(cls, data: dict) -> "BipartiteSplit":
        return cls(int(data["dim_a"]), int(data["dim_b"]))


def as_state(v) -> np.ndarray:
    """Coerce a ray, sequence or array into a validated complex vector."""
    if isinstance(v, Ray):
        return v.vector
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValidationError(f"state vector must be 1-d with dim >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("state vector has non-finite amplitudes")
    return arr


def normalize(v) -> np.ndarray:
    arr = as_state(v)
    n = np.linalg.norm(arr)
    if n == 0.0:
        raise ValidationError("cannot normalize the zero vector")
    return arr / n


def inner(psi, phi) -> complex:
    """Return ``<psi|phi>``, conjugate-linear in ``psi``."""
    a, b = as_state(psi), as_state(phi)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a, b))


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the joint index is ``i_a * dim_b + i_b``."""
    return np.kron(as_state(a), as_state(b))


def tensor_u(u, v) -> np.ndarray:
    return np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))


def check_unitary(u, tol: float = TOL.unitary) -> np.ndarray:
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"unitary must be square, got shape {m.shape}")
    err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if err > tol:
        raise ValidationError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
    return m


def apply(u, psi) -> np.ndarray:
    m = np.asarray(u, dtype=complex)
    v = as_state(psi)
    if m.shape != (v.shape[0], v.shape[0]):
        raise ValidationError(f"cannot apply {m.shape} operator to dim-{v.shape[0]} state")
    return m @ v


def compose(*gates) -> np.ndarray:
    """Product ``gates[-1] @ ... @ gates[0]``, i.e. gates applied in the given order."""
    out = np.eye(np.asarray(gates[0]).shape[0], dtype=complex)
    for g in gates:
        out = np.asarray(g, dtype=complex) @ out
    return out


def partial_trace_b(psi, split: BipartiteSplit) -> np.ndarray:
    """Reduced density matrix of subsystem A for a pure state on A (x) B."""
    v = as_state(psi)
    if v.shape[0] != split.dim:
        raise ValidationError(
            f"state of dim {v.shape[0]} does not match split {split.dim_a}x{split.dim_b}")
    m = v.reshape(split.dim_a, split.dim_b)
    rho = m @ m.conj().T
    # exact Hermitian symmetrization removes rounding asymmetry
    return 0.5 * (rho + rho.conj().T)


def check_density_matrix(rho) -> np.ndarray:
    m = _check_hermitian(rho)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TOL.trace:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    return m


def hermitian_eigenvalues(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in descending order.

    2x2 inputs use the closed form; larger ones use cyclic Jacobi rotations.
    """
    m = _check_hermitian(h)
    if m.shape[0] == 1:
        return np.array([m[0, 0].real])
    if m.shape[0] == 2:
        return eigenvalues_2x2(m)
    return jacobi_eigenvalues(m)


def eigenvalues_2x2(h) -> np.ndarray:
    a, d = h[0, 0].real, h[1, 1].real
    b = h[0, 1]
    tr = a + d
    # (a - d)^2 + 4|b|^2 == tr^2 - 4 det, without the cancellation
    disc = math.sqrt((a - d) ** 2 + 4.0 * abs(b) ** 2)
    return np.array([(tr + disc) / 2.0, (tr - disc) / 2.0])


def jacobi_eigenvalues(h, max_sweeps: int = 64) -> np.ndarray:
    """Cyclic complex Jacobi sweeps until the off-diagonal Frobenius norm is below tolerance."""
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    target = TOL.jacobi_offdiag * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _offdiag_norm(a) < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r == 0.0:
                    continue
                phase = a[p, q] / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane; A <- G^dag A G
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * phase.conjugate() * col_q
                a[:, q] = s * col_p + c * phase.conjugate() * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                a[p, q] = a[q, p] = 0.0
    else:
        if _offdiag_norm(a) >= target:
            raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(np.diag(a).real)[::-1]


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def bloch_vector(psi) -> np.ndarray:
    v = as_state(psi)
    if v.shape[0] != 2:
        raise ValidationError(f"Bloch vector needs a qubit state, got dim {v.shape[0]}")
    v = v / np.linalg.norm(v)
    ab = v[0].conjugate() * v[1]
    return np.array([2 * ab.real, 2 * ab.imag, abs(v[0]) ** 2 - abs(v[1]) ** 2])


def state_from_bloch(r: Sequence[float]) -> np.ndarray:
    x, y, z = (float(c) for c in r)
    polar = math.atan2(math.hypot(x, y), z)
    azim = math.atan2(y, x)
    return np.array([math.cos(polar / 2), np.exp(1j * azim) * math.sin(polar / 2)])


def rotation_y(alpha: float) -> np.ndarray:
    """``exp(-i alpha sigma_y / 2)``."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pauli_axis(n: Sequence[float]) -> np.ndarray:
    nx, ny, nz = _unit_axis(n)
    return nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z


def pauli_string(tag: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis named by ``tag``, e.g. ``"zx"`` for sigma_z (x) sigma_x."""
    try:
        mats = [PAULIS[ch] for ch in tag.lower()]
    except KeyError:
        raise ValidationError(f"unknown Pauli tag {tag!r}; letters must be from 'ixyz'") from None
    if not mats:
        raise ValidationError("empty Pauli tag")
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def exp_involution(g, theta: float) -> np.ndarray:
    """``exp(-i theta G)`` for a Hermitian involution ``G`` (so it equals ``cos(theta) I - i sin(theta) G``)."""
    m = _check_hermitian(g, tol=TOL.involution)
    eye = np.eye(m.shape[0])
    err = np.max(np.abs(m @ m - eye))
    if err > TOL.involution:
        raise ValidationError(f"generator is not an involution (max |G^2 - I| = {err:.3g})")
    return math.cos(theta) * eye - 1j * math.sin(theta) * m


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR with the diagonal phase fix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


class Ray:
    """A pure state modulo global phase.

    The stored representative is normalized and its first amplitude of
    (numerically) largest modulus is real and nonnegative.
    """

    __slots__ = ("_vec",)

    def __init__(self, v):
        if isinstance(v, Ray):
            v = v.vector
        arr = normalize(v)
        mags = np.abs(arr)
        k = int(np.argmax(mags >= mags.max() - TOL.phase_tie))
        arr = arr * (abs(arr[k]) / arr[k])
        arr[k] = abs(arr[k])
        arr.setflags(write=False)
        self._vec = arr

    @property
    def vector(self) -> np.ndarray:
        return self._vec

    @property
    def dim(self) -> int:
        return self._vec.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Ray):
            return NotImplemented
        return ray_equal(self, other)

    __hash__ = None

    def __repr__(self):
        amps = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self._vec)
        return f"Ray([{amps}])"

    def to_json(self) -> dict:
        return state_to_json(self._vec)

    @classmethod
    def from_json(cls, data: dict) -> "Ray":
        return cls(state_from_json(data))


def ray_equal(r1, r2, tol: float = TOL.ray_equal) -> bool:
    """True when the two states agree up to a global phase (phase-aligned distance <= tol)."""
    a, b = as_state(r1), as_state(r2)
    if a.shape != b.shape:
        return False
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    ov = np.vdot(b, a)
    if abs(ov) == 0.0:
        return False
    return bool(np.linalg.norm(a - b * (ov / abs(ov))) <= tol)


def state_to_json(v) -> dict:
    arr = as_state(v)
    return {"dim": int(arr.shape[0]), "amplitudes": [[float(c.real), float(c.imag)] for c in arr]}


def state_from_json(data: dict) -> np.ndarray:
    try:
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state vector JSON: {exc}") from exc
    if amps.shape[0] != dim:
        raise ValidationError(f"state declares dim {dim} but has {amps.shape[0]} amplitudes")
    return as_state(amps)


def unitary_to_json(u) -> dict:
    m = np.asarray(u, dtype=complex)
    return {"dim": int(m.shape[0]),
            "rows": [[[float(c.real), float(c.imag)] for c in row] for row in m]}


def unitary_from_json(data: dict) -> np.ndarray:
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in data["rows"]])
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed unitary JSON: {exc}") from exc
    if m.shape != (dim, dim):
        raise ValidationError(f"unitary declares dim {dim} but has shape {m.shape}")
    return check_unitary(m)


def _check_hermitian(h, tol: float = TOL.hermitian) -> np.ndarray:
    m = np.asarray(h, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {err:.3g})")
    return m


def _unit_axis(n: Sequence[float]) -> tuple[float, float, float]:
    arr = np.asarray(n, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"axis must be a 3-vector, got shape {arr.shape}")
    if abs(np.linalg.norm(arr) - 1.0) > TOL.axis:
        raise ValidationError(f"axis {arr.tolist()} is not unit length")
    return float(arr[0]), float(arr[1]), float(arr[2])
