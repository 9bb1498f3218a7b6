"""Single-qubit BB84 read through Z and X height functions, with intercept-resend eavesdropping.

Bit 0 is the "up" state of the chosen basis (height 1: ``|0>`` or ``|+>``),
bit 1 the "down" state (height 0: ``|1>`` or ``|->``).

Randomness is counter-based: each (round, party) pair owns a Philox stream
keyed by the seed, so results do not depend on evaluation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .entanglement import QubitHeight
from .geometry import fs_distance
from .hilbert import Ray, ValidationError

EIGEN_TOL = 1e-9
# Born probabilities this close to 0 or 1 are snapped so matched-basis outcomes are exact
BORN_SNAP = 1e-12


class Basis(str, enum.Enum):
    Z = "Z"
    X = "X"


class Height(str, enum.Enum):
    UP = "up"
    DOWN = "down"


_S = 1 / math.sqrt(2)
# (basis, bit) -> state; bit 0 is the +1 eigenstate
SIGNALS = {
    (Basis.Z, 0): Ray([1, 0]),
    (Basis.Z, 1): Ray([0, 1]),
    (Basis.X, 0): Ray([_S, _S]),
    (Basis.X, 1): Ray([_S, -_S]),
}
HEIGHTS = {Basis.Z: QubitHeight((0.0, 0.0, 1.0)), Basis.X: QubitHeight((1.0, 0.0, 0.0))}
BIT_OF_HEIGHT = {Height.UP: 0, Height.DOWN: 1}

ALICE, EVE, BOB = 0, 1, 2


@dataclass(frozen=True)
class NoEve:
    def to_json(self) -> dict:
        return {"kind": "none"}


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures every signal in a fixed or uniformly random basis and resends what she saw."""

    basis_policy: str = "random"

    def __post_init__(self):
        if self.basis_policy not in ("Z", "X", "random"):
            raise ValidationError(f"basis policy must be 'Z', 'X' or 'random', got {self.basis_policy!r}")

    def to_json(self) -> dict:
        return {"kind": "intercept", "basis_policy": self.basis_policy}


EveStrategy = Union[NoEve, InterceptResend]


@dataclass(frozen=True)
class RngState:
    seed: int
    counter: int = 0

    def generator(self) -> np.random.Generator:
        # the low 128 counter bits are left free for Philox's own increments
        return np.random.Generator(np.random.Philox(key=self.seed % 2**64, counter=self.counter << 128))

    @classmethod
    def for_round(cls, seed: int, round_index: int, party: int) -> "RngState":
        return cls(seed, round_index * 4 + party)


@dataclass(frozen=True)
class RoundRecord:
    alice_basis: Basis
    alice_bit: int
    bob_basis: Basis
    bob_bit: int
    sifted: bool
    eve_basis: Optional[Basis] = None
    eve_bit: Optional[int] = None

    def to_json(self) -> dict:
        out = {"alice_basis": self.alice_basis.value, "alice_bit": self.alice_bit}
        if self.eve_basis is not None:
            out["eve_basis"] = self.eve_basis.value
            out["eve_bit"] = self.eve_bit
        out.update(bob_basis=self.bob_basis.value, bob_bit=self.bob_bit, sifted=self.sifted)
        return out


@dataclass(frozen=True)
class ProtocolStats:
    n_rounds: int
    n_sifted: int
    n_errors: int
    qber: float
    sift_rate: float

    def to_json(self) -> dict:
        return asdict(self)


def prepare(basis: Basis, bit: int) -> Ray:
    return SIGNALS[Basis(basis), int(bit)]


def born_zero(x: Ray, basis: Basis) -> float:
    """Probability of outcome 0 (the up eigenstate) when measuring ``x`` in ``basis``."""
    p = abs(np.vdot(SIGNALS[basis, 0].vector, x.vector)) ** 2
    if p > 1 - BORN_SNAP:
        return 1.0
    if p < BORN_SNAP:
        return 0.0
    return float(p)


def measure(x: Ray, basis: Basis, rng: Union[RngState, np.random.Generator]) -> tuple[int, Ray]:
    """Projective measurement; returns the outcome bit and the post-measurement eigenstate."""
    if x.dim != 2:
        raise ValidationError(f"BB84 signals are qubits, got dim {x.dim}")
    basis = Basis(basis)
    gen = rng.generator() if isinstance(rng, RngState) else rng
    bit = 0 if gen.random() < born_zero(x, basis) else 1
    return bit, SIGNALS[basis, bit]


def height_label(x: Ray, basis: Basis) -> Height:
    basis = Basis(basis)
    if min(fs_distance(x, SIGNALS[basis, b]) for b in (0, 1)) >= EIGEN_TOL:
        raise ValidationError(f"{x!r} is not an eigenstate of the {basis.value} observable")
    return Height.UP if HEIGHTS[basis](x) > 0.5 else Height.DOWN


def _basis_from(u: float) -> Basis:
    return Basis.Z if u < 0.5 else Basis.X


def run_round(i: int, eve: EveStrategy, seed: int) -> RoundRecord:
    alice = RngState.for_round(seed, i, ALICE).generator()
    a_basis = _basis_from(alice.random())
    a_bit = int(alice.random() < 0.5)
    signal = prepare(a_basis, a_bit)

    e_basis = e_bit = None
    if isinstance(eve, InterceptResend):
        eve_rng = RngState.for_round(seed, i, EVE).generator()
        if eve.basis_policy == "random":
            e_basis = _basis_from(eve_rng.random())
        else:
            e_basis = Basis(eve.basis_policy)
        e_bit, signal = measure(signal, e_basis, eve_rng)

    bob = RngState.for_round(seed, i, BOB).generator()
    b_basis = _basis_from(bob.random())
    b_bit, _ = measure(signal, b_basis, bob)
    return RoundRecord(a_basis, a_bit, b_basis, b_bit, a_basis == b_basis, e_basis, e_bit)


def summarize(records: list[RoundRecord]) -> ProtocolStats:
    n = len(records)
    sifted = [r for r in records if r.sifted]
    errors = sum(r.alice_bit != r.bob_bit for r in sifted)
    qber = errors / len(sifted) if sifted else 0.0
    return ProtocolStats(n, len(sifted), errors, qber, len(sifted) / n if n else 0.0)


def qber_by_basis(records: list[RoundRecord]) -> dict[Basis, float]:
    out = {}
    for basis in Basis:
        rs = [r for r in records if r.sifted and r.alice_basis is basis]
        out[basis] = sum(r.alice_bit != r.bob_bit for r in rs) / len(rs) if rs else 0.0
    return out


def run_protocol(n_rounds: int, eve: EveStrategy = NoEve(),
                 seed: int = 0) -> tuple[ProtocolStats, list[RoundRecord]]:
    if n_rounds < 1:
        raise ValidationError(f"need at least one round, got {n_rounds}")
    records = [run_round(i, eve, seed) for i in range(n_rounds)]
    return summarize(records), records


def _exact_born(x: Ray, basis: Basis, bit: int) -> Fraction:
    p = born_zero(x, basis)
    p = p if bit == 0 else 1.0 - p
    frac = Fraction(round(2 * p), 2)
    if abs(float(frac) - p) > 1e-9:
        raise ArithmeticError(f"Born weight {p} is not in {{0, 1/2, 1}}")
    return frac


def theoretical_qber(eve: EveStrategy, basis: Optional[Basis] = None) -> Fraction:
    """Exact sifted error rate by enumerating every discrete choice with rational Born weights.

    With ``basis`` given, the rate is conditioned on that sifted basis.
    """
    half = Fraction(1, 2)
    if isinstance(eve, InterceptResend):
        if eve.basis_policy == "random":
            eve_choices = [(Basis.Z, half), (Basis.X, half)]
        else:
            eve_choices = [(Basis(eve.basis_policy), Fraction(1))]
    else:
        eve_choices = [(None, Fraction(1))]

    err = Fraction(0)
    total = Fraction(0)
    for a_basis in Basis:
        if basis is not None and a_basis is not basis:
            continue
        for a_bit in (0, 1):
            w_alice = half * half
            state = prepare(a_basis, a_bit)
            branches = []
            for e_basis, w_e in eve_choices:
                if e_basis is None:
                    branches.append((state, w_e))
                    continue
                for e_bit in (0, 1):
                    w = w_e * _exact_born(state, e_basis, e_bit)
                    if w:
                        branches.append((prepare(e_basis, e_bit), w))
            # sifted rounds: Bob's basis equals Alice's
            for received, w in branches:
                for b_bit in (0, 1):
                    p = w_alice * w * _exact_born(received, a_basis, b_bit)
                    total += p
                    if b_bit != a_bit:
                        err += p
    return err / total
