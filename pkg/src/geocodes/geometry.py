"""Fubini-Study geometry on rays: distances, numerical gradients, leaf-relative decomposition.

Distances use ``arccos |<psi|phi>|`` with range ``[0, pi/2]``; on the Bloch
sphere this is half the angle between Bloch vectors. Tangent vectors are
horizontal (orthogonal to the canonical representative of their base ray),
and the metric on them is ``Re <a|b>``. The curve
``cos(t) psi + sin(t) v`` for a unit horizontal ``v`` has unit FS speed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hilbert import Ray, ValidationError, as_state

DEFAULT_H = 1e-5
HORIZONTAL_TOL = 1e-10
DEGENERATE_GRADIENT = 1e-8


class DegenerateDecompositionError(ArithmeticError):
    """The gradient vanishes, so the normal/tangential split is undefined."""


class MoveLabel(str, enum.Enum):
    T = "T"
    U = "U"
    D = "D"
    M = "M"


@dataclass(frozen=True)
class ClassifierThresholds:
    eps_tan: float = 0.05
    eps_norm: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.eps_tan < self.eps_norm:
            raise ValidationError(
                f"need 0 < eps_tan < eps_norm, got eps_tan={self.eps_tan}, eps_norm={self.eps_norm}")


@dataclass(frozen=True)
class StepMetrics:
    delta_s: float
    delta_e: float


class TangentVector:
    """A horizontal vector at a base ray."""

    __slots__ = ("base", "vector")

    def __init__(self, base: Ray, vector, check: bool = True):
        base = base if isinstance(base, Ray) else Ray(base)
        vec = np.array(vector, dtype=complex)
        if vec.shape != base.vector.shape:
            raise ValidationError(f"tangent vector of shape {vec.shape} at dim-{base.dim} ray")
        if check:
            ov = abs(np.vdot(base.vector, vec))
            if ov > HORIZONTAL_TOL * max(1.0, float(np.linalg.norm(vec))):
                raise ValidationError(f"tangent vector is not horizontal (|<base|v>| = {ov:.3g})")
        vec.setflags(write=False)
        self.base = base
        self.vector = vec

    @classmethod
    def project(cls, base, w) -> "TangentVector":
        """Horizontal part of an arbitrary vector ``w`` at ``base``."""
        base = base if isinstance(base, Ray) else Ray(base)
        psi = base.vector
        w = np.asarray(w, dtype=complex)
        return cls(base, w - np.vdot(psi, w) * psi, check=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def unit(self) -> "TangentVector":
        n = self.norm()
        if n == 0.0:
            raise ValidationError("cannot normalize a zero tangent vector")
        return TangentVector(self.base, self.vector / n, check=False)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.base, self.vector + other.vector, check=False)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.base, self.vector - other.vector, check=False)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(self.base, c * self.vector, check=False)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.vector, check=False)

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, norm={self.norm():.6g})"


def fs_distance(r1, r2) -> float:
    a, b = as_state(r1), as_state(r2)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    # canonical argument order makes the result bitwise symmetric
    if a.tobytes() > b.tobytes():
        a, b = b, a
    # arccos|<a|b>| evaluated as atan2(sin, cos): the sine comes from the Lagrange
    # identity 1 - |<a|b>|^2 = sum_{i<j} |a_i b_j - a_j b_i|^2, which keeps small
    # distances accurate
    i, j = np.triu_indices(a.shape[0], 1)
    sin2 = float(np.sum(np.abs(a[i] * b[j] - a[j] * b[i]) ** 2))
    cos = abs(np.sum(a.conj() * b))
    return math.atan2(math.sqrt(sin2), cos)


def fs_inner(a: TangentVector, b: TangentVector) -> float:
    return float(np.vdot(a.vector, b.vector).real)


def step_along(x: Ray, v: TangentVector, t: float) -> Ray:
    """Point at FS distance ``|t|`` along the geodesic leaving ``x`` in unit direction ``v``."""
    psi = x.vector
    return Ray(math.cos(t) * psi + math.sin(t) * v.vector)


def directional_derivative(E: Callable, x: Ray, v: TangentVector, h: float = DEFAULT_H) -> float:
    if not 0.0 < h <= 1e-3:
        raise ValidationError(f"finite-difference step must lie in (0, 1e-3], got {h}")
    return (E(step_along(x, v, h)) - E(step_along(x, v, -h))) / (2.0 * h)


def horizontal_frame(x: Ray) -> list[TangentVector]:
    """Orthonormal real basis ``{v_k, i v_k}`` of the horizontal space at ``x``."""
    psi = x.vector
    d = psi.shape[0]
    # columns of q: psi followed by an orthonormal completion
    q, _ = np.linalg.qr(np.column_stack([psi, np.eye(d, dtype=complex)]))
    frame = []
    for k in range(1, d):
        vk = q[:, k]
        vk = vk - np.vdot(psi, vk) * psi
        vk = vk / np.linalg.norm(vk)
        frame.append(TangentVector(x, vk, check=False))
        frame.append(TangentVector(x, 1j * vk, check=False))
    return frame


def fs_gradient(E: Callable, x, h: float = DEFAULT_H) -> TangentVector:
    x = x if isinstance(x, Ray) else Ray(x)
    grad = np.zeros(x.dim, dtype=complex)
    for b in horizontal_frame(x):
        grad += directional_derivative(E, x, b, h) * b.vector
    return TangentVector(x, grad, check=False)


def decompose(w: TangentVector, grad: TangentVector) -> tuple[TangentVector, TangentVector]:
    """Split ``w`` into its component along ``grad`` and the remainder tangent to the level set."""
    if w.base != grad.base:
        raise ValidationError("decompose needs vectors at the same base ray")
    gg = fs_inner(grad, grad)
    if math.sqrt(gg) <= DEGENERATE_GRADIENT:
        raise DegenerateDecompositionError(
            f"gradient norm {math.sqrt(gg):.3g} is below {DEGENERATE_GRADIENT}; leaf direction undefined")
    w_perp = (fs_inner(w, grad) / gg) * grad
    w_par = w - w_perp
    return w_perp, w_par


def classify_step(x_k, x_k1, E: Callable,
                  th: ClassifierThresholds = ClassifierThresholds()) -> tuple[MoveLabel, StepMetrics]:
    ds = fs_distance(x_k, x_k1)
    de = E(x_k1) - E(x_k)
    metrics = StepMetrics(ds, de)
    if ds == 0.0:
        return MoveLabel.T, metrics
    ratio = de / ds
    if abs(ratio) < th.eps_tan:
        return MoveLabel.T, metrics
    if ratio > th.eps_norm:
        return MoveLabel.U, metrics
    if ratio < -th.eps_norm:
        return MoveLabel.D, metrics
    return MoveLabel.M, metrics
