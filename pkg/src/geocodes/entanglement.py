"""Keyed entanglement functionals: von Neumann entropy and its twisted variants, plus qubit heights.

Every functional is a callable ``E(x) -> float`` on rays (or raw state
vectors). Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .hilbert import (
    TOL,
    BipartiteSplit,
    ValidationError,
    as_state,
    bloch_vector,
    check_density_matrix,
    check_unitary,
    exp_involution,
    hermitian_eigenvalues,
    partial_trace_b,
    pauli_string,
    tensor_u,
)

FAMILIES = ("twisted_global", "twisted_local", "standard_vn", "qubit_height")
DEFAULT_GENERATORS = {"twisted_global": "zx", "twisted_local": "y"}


def von_neumann_entropy(rho) -> float:
    """``-sum(l * log2(l))`` over the spectrum of ``rho``, with ``0 log 0 = 0``."""
    m = check_density_matrix(rho)
    lam = hermitian_eigenvalues(m)
    if lam[-1] < -TOL.eig_floor:
        raise ValidationError(f"density matrix has negative eigenvalue {lam[-1]!r}")
    s = 0.0
    for l in lam:
        if l > 0.0:
            s -= l * math.log2(l)
    return max(0.0, s)


def binary_entropy(p: float) -> float:
    s = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            s -= q * math.log2(q)
    return s


@dataclass(frozen=True, eq=False)
class StandardVN:
    split: BipartiteSplit = field(default_factory=BipartiteSplit)

    @property
    def dim(self) -> int:
        return self.split.dim

    def __call__(self, x) -> float:
        return von_neumann_entropy(partial_trace_b(as_state(x), self.split))


@dataclass(frozen=True, eq=False)
class TwistedLocal:
    """Entropy after a unitary ``w`` on subsystem A only (value-preserving, see tests)."""

    w: np.ndarray
    split: BipartiteSplit = field(default_factory=BipartiteSplit)

    def __post_init__(self):
        w = check_unitary(self.w)
        if w.shape[0] != self.split.dim_a:
            raise ValidationError(f"local twist must act on dim {self.split.dim_a}, got {w.shape[0]}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "_full", tensor_u(w, np.eye(self.split.dim_b)))

    @property
    def dim(self) -> int:
        return self.split.dim

    def __call__(self, x) -> float:
        return von_neumann_entropy(partial_trace_b(self._full @ as_state(x), self.split))


@dataclass(frozen=True, eq=False)
class TwistedGlobal:
    """Entropy after a unitary ``v`` on the full space."""

    v: np.ndarray
    split: BipartiteSplit = field(default_factory=BipartiteSplit)

    def __post_init__(self):
        v = check_unitary(self.v)
        if v.shape[0] != self.split.dim:
            raise ValidationError(f"global twist must act on dim {self.split.dim}, got {v.shape[0]}")
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.split.dim

    def __call__(self, x) -> float:
        return von_neumann_entropy(partial_trace_b(self.v @ as_state(x), self.split))


@dataclass(frozen=True, eq=False)
class QubitHeight:
    """``(1 + n . r) / 2`` for Bloch vector ``r``: 1 at the ``+n`` pole, 0 at the ``-n`` pole."""

    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        arr = np.asarray(self.axis, dtype=float)
        if arr.shape != (3,) or abs(np.linalg.norm(arr) - 1.0) > TOL.axis:
            raise ValidationError(f"height axis must be a unit 3-vector, got {self.axis!r}")
        object.__setattr__(self, "axis", tuple(float(c) for c in arr))

    @property
    def dim(self) -> int:
        return 2

    def __call__(self, x) -> float:
        return 0.5 * (1.0 + float(np.dot(self.axis, bloch_vector(x))))


Functional = Union[StandardVN, TwistedLocal, TwistedGlobal, QubitHeight]


def evaluate(functional: Functional, x) -> float:
    v = as_state(x)
    if v.shape[0] != functional.dim:
        raise ValidationError(
            f"{type(functional).__name__} expects dim {functional.dim}, got {v.shape[0]}")
    return functional(v)


def make_twist_global(theta: float, generator: str = "zx") -> np.ndarray:
    """``exp(-i theta G)`` with ``G`` a two-qubit Pauli string (default sigma_z (x) sigma_x)."""
    if not math.isfinite(theta):
        raise ValidationError("theta must be finite")
    return exp_involution(pauli_string(generator), theta)


def analytic_e_twisted(j: int, delta: float, theta: float) -> float:
    """Closed-form entropy of ``exp(-i theta Z(x)X)`` applied to ``cos(j delta/2)|00> + sin(j delta/2)|10>``.

    The twisted state's concurrence is ``|sin(j delta) sin(2 theta)|``, and for two
    qubits the Schmidt weights are ``(1 +- sqrt(1 - C^2)) / 2``.
    """
    c = min(1.0, abs(math.sin(j * delta) * math.sin(2.0 * theta)))
    lam = 0.5 * (1.0 + math.sqrt(1.0 - c * c))
    return binary_entropy(lam)


@dataclass(frozen=True)
class GeoKey:
    """Selects one functional from the public family.

    ``family`` and ``generator`` are public protocol data; ``theta`` is the secret.
    For ``qubit_height`` an explicit ``axis`` wins, otherwise the axis is
    ``(sin theta, 0, cos theta)`` so that theta=0 is Z and theta=pi/2 is X.
    """

    family: str = "twisted_global"
    theta: float = math.pi / 4
    generator: Optional[str] = None
    axis: Optional[tuple] = None
    split: BipartiteSplit = field(default_factory=BipartiteSplit)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown key family {self.family!r}; expected one of {FAMILIES}")
        if not math.isfinite(self.theta):
            raise ValidationError("key theta must be finite")
        if self.generator is None and self.family in DEFAULT_GENERATORS:
            object.__setattr__(self, "generator", DEFAULT_GENERATORS[self.family])
        if self.axis is not None:
            object.__setattr__(self, "axis", tuple(float(c) for c in self.axis))
        # build once so a bad generator or axis fails at key construction, not at first use
        self.functional()

    def functional(self) -> Functional:
        if self.family == "standard_vn":
            return StandardVN(self.split)
        if self.family == "twisted_local":
            return TwistedLocal(exp_involution(pauli_string(self.generator), self.theta), self.split)
        if self.family == "twisted_global":
            return TwistedGlobal(make_twist_global(self.theta, self.generator), self.split)
        axis = self.axis
        if axis is None:
            axis = (math.sin(self.theta), 0.0, math.cos(self.theta))
        return QubitHeight(axis)

    def to_json(self) -> dict:
        out = {"family": self.family, "theta": float(self.theta)}
        if self.generator is not None:
            out["generator"] = self.generator
        if self.family == "qubit_height":
            if self.axis is not None:
                out["axis"] = list(self.axis)
        else:
            out["split"] = self.split.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "GeoKey":
        try:
            split = BipartiteSplit.from_json(data["split"]) if "split" in data else BipartiteSplit()
            axis = data.get("axis")
            return cls(family=str(data["family"]), theta=float(data.get("theta", 0.0)),
                       generator=data.get("generator"),
                       axis=tuple(axis) if axis is not None else None, split=split)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed key JSON: {exc}") from exc
