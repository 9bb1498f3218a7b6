"""Trajectory codes on the two-qubit family ``cos(j d/2)|00> + sin(j d/2)|10>``.

Bits drive a walk on the family index (1 -> ``U+``, 0 -> ``U-``). Two decoders
are provided: :func:`decode_index` recovers the walk from public data alone,
and :func:`decode_profile` reads up/down steps of a keyed functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .entanglement import Functional, GeoKey, StandardVN
from .geometry import ClassifierThresholds, MoveLabel, classify_step, fs_distance
from .hilbert import PAULI_I, Ray, ValidationError, rotation_y, tensor_u

MATCH_TOL = 1e-6
MOVE_TAGS = ("U", "D", "T")


class EncodeRangeError(ValueError):
    def __init__(self, step: int, index: int, cfg: "EncoderConfig"):
        self.step = step
        self.index = index
        super().__init__(
            f"bit {step} drives the walk to j={index}, outside the window [{cfg.j_min}, {cfg.j_max}]")


class DecodeMismatchError(ValueError):
    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"state {position}: {message}")


class UndecodableError(ValueError):
    """Every step classified as tangential or mixed; carries the all-erasure result."""

    def __init__(self, bits: list, labels: str):
        self.bits = bits
        self.labels = labels
        self.erasures = sum(b is None for b in bits)
        super().__init__(
            f"profile is flat under this key: {self.erasures}/{len(bits)} steps are erasures ({labels})")


@dataclass(frozen=True)
class EncoderConfig:
    delta: float = math.pi / 16
    j0: int = 4
    j_min: int = 1
    j_max: int = 7

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValidationError(f"delta must be a positive angle, got {self.delta}")
        if not self.j_min <= self.j0 <= self.j_max:
            raise ValidationError(f"need j_min <= j0 <= j_max, got {self.j_min}, {self.j0}, {self.j_max}")
        # family rays repeat once j delta advances by 2 pi
        if (self.j_max - self.j_min) * self.delta >= 2 * math.pi:
            raise ValidationError("window spans a full period; family indices would be ambiguous")

    @property
    def monotone(self) -> bool:
        """Whether the window lies where the default twisted profile increases with j."""
        return self.j_min >= 0 and self.j_max * self.delta <= math.pi / 2 + 1e-12

    def to_json(self) -> dict:
        return {"delta": self.delta, "j0": self.j0, "j_min": self.j_min, "j_max": self.j_max}

    @classmethod
    def from_json(cls, data: dict, **overrides) -> "EncoderConfig":
        base = cls().to_json()
        base.update({k: data[k] for k in base if k in data})
        base.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(float(base["delta"]), int(base["j0"]), int(base["j_min"]), int(base["j_max"]))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed encoder config: {exc}") from exc


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    moves: Optional[tuple] = None

    def __post_init__(self):
        states = tuple(s if isinstance(s, Ray) else Ray(s) for s in self.states)
        if not states:
            raise ValidationError("a trajectory needs at least one state")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ValidationError(f"trajectory states have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "states", states)
        if self.moves is not None:
            moves = tuple(str(m) for m in self.moves)
            if len(moves) != len(states) - 1:
                raise ValidationError(f"{len(moves)} moves for {len(states)} states")
            bad = [m for m in moves if m not in MOVE_TAGS]
            if bad:
                raise ValidationError(f"unknown move tags {bad}")
            object.__setattr__(self, "moves", moves)

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def to_json(self) -> dict:
        out = {"dim": self.dim, "states": [s.to_json() for s in self.states]}
        if self.moves is not None:
            out["moves"] = list(self.moves)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Trajectory":
        try:
            states = [Ray.from_json(s) for s in data["states"]]
            dim = int(data["dim"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed trajectory JSON: {exc}") from exc
        traj = cls(tuple(states), data.get("moves"))
        if traj.dim != dim:
            raise ValidationError(f"trajectory declares dim {dim} but states have dim {traj.dim}")
        return traj


class Moves(NamedTuple):
    u_plus: np.ndarray
    u_minus: np.ndarray
    t: np.ndarray


def family_state(j: int, delta: float) -> Ray:
    half = j * delta / 2
    return Ray(np.array([math.cos(half), 0.0, math.sin(half), 0.0]))


def elementary_moves(delta: float) -> Moves:
    if not delta > 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    return Moves(tensor_u(rotation_y(delta), PAULI_I),
                 tensor_u(rotation_y(-delta), PAULI_I),
                 np.eye(4, dtype=complex))


def index_walk(bits: Sequence[int], cfg: EncoderConfig) -> list[int]:
    walk = [cfg.j0]
    for k, b in enumerate(bits):
        if b not in (0, 1):
            raise ValidationError(f"bit {k} is {b!r}, expected 0 or 1")
        j = walk[-1] + (1 if b else -1)
        if not cfg.j_min <= j <= cfg.j_max:
            raise EncodeRangeError(k, j, cfg)
        walk.append(j)
    return walk


def encode(bits: Sequence[int], cfg: EncoderConfig) -> Trajectory:
    """Apply ``U+`` for each 1 and ``U-`` for each 0, starting from the public index ``j0``."""
    walk = index_walk(bits, cfg)
    moves = elementary_moves(cfg.delta)
    states = [family_state(cfg.j0, cfg.delta)]
    for b in bits:
        gate = moves.u_plus if b else moves.u_minus
        states.append(Ray(gate @ states[-1].vector))
    # the gate path and the closed-form family must agree
    for k, (s, j) in enumerate(zip(states, walk)):
        if fs_distance(s, family_state(j, cfg.delta)) > MATCH_TOL:
            raise ArithmeticError(f"encoded state {k} drifted off the family")
    return Trajectory(tuple(states), tuple("U" if b else "D" for b in bits))


def recover_indices(traj: Trajectory, cfg: EncoderConfig) -> list[int]:
    if traj.dim != 4:
        raise DecodeMismatchError(0, f"expected two-qubit states, got dim {traj.dim}")
    family = {j: family_state(j, cfg.delta) for j in range(cfg.j_min, cfg.j_max + 1)}
    out = []
    for k, s in enumerate(traj.states):
        j, d = min(((j, fs_distance(s, r)) for j, r in family.items()), key=lambda p: p[1])
        if d > MATCH_TOL:
            raise DecodeMismatchError(k, f"nearest family state j={j} is {d:.3g} rad away")
        out.append(j)
    return out


def decode_index(traj: Trajectory, cfg: EncoderConfig) -> list[Optional[int]]:
    """Bits from the sign of each index step; a repeated index (identity move) is an erasure."""
    js = recover_indices(traj, cfg)
    bits: list[Optional[int]] = []
    for k in range(len(js) - 1):
        step = js[k + 1] - js[k]
        if abs(step) > 1:
            raise DecodeMismatchError(k + 1, f"index jumps by {step}, not a single move")
        bits.append(None if step == 0 else int(step > 0))
    return bits


def classify_trajectory(traj: Trajectory, E: Functional,
                        th: ClassifierThresholds = ClassifierThresholds()) -> list:
    return [classify_step(a, b, E, th) for a, b in zip(traj.states, traj.states[1:])]


def decode_profile(traj: Trajectory, key: GeoKey,
                   th: ClassifierThresholds = ClassifierThresholds()) -> list[Optional[int]]:
    """Read bits as up (1) or down (0) steps of the keyed functional; T and M steps are erasures."""
    E = key.functional()
    labels = [lab for lab, _ in classify_trajectory(traj, E, th)]
    bits = [1 if lab is MoveLabel.U else 0 if lab is MoveLabel.D else None for lab in labels]
    if bits and all(b is None for b in bits):
        raise UndecodableError(bits, "".join(lab.value for lab in labels))
    return bits


def profile(traj: Trajectory, E: Functional) -> list[float]:
    return [float(E(s)) for s in traj.states]


@dataclass(frozen=True)
class EavesdropperReport:
    profile: list = field(default_factory=list)
    moves: str = ""

    @property
    def flat(self) -> bool:
        return max(self.profile) - min(self.profile) <= 1e-12

    def to_json(self) -> dict:
        return {"profile": list(self.profile), "moves": self.moves, "flat": self.flat}


def eavesdropper_view(traj: Trajectory,
                      th: ClassifierThresholds = ClassifierThresholds()) -> EavesdropperReport:
    """What a keyless observer sees: the untwisted entropy profile and its move labels."""
    E = StandardVN()
    labels = classify_trajectory(traj, E, th)
    return EavesdropperReport(profile(traj, E), "".join(lab.value for lab, _ in labels))


def random_message(rng: np.random.Generator, cfg: EncoderConfig, max_len: int = 32) -> list[int]:
    """Uniformly random bits, except that steps at a window edge are forced back inside."""
    length = int(rng.integers(0, max_len + 1)) if cfg.j_max > cfg.j_min else 0
    bits, j = [], cfg.j0
    for _ in range(length):
        if j == cfg.j_max:
            b = 0
        elif j == cfg.j_min:
            b = 1
        else:
            b = int(rng.integers(0, 2))
        bits.append(b)
        j += 1 if b else -1
    return bits
