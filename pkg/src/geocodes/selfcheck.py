"""Runtime invariant checks backing the ``selfcheck`` and ``gradcheck`` commands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bb84
from .codes import EncoderConfig, decode_index, decode_profile, encode, family_state, random_message
from .entanglement import (
    GeoKey,
    QubitHeight,
    StandardVN,
    TwistedGlobal,
    TwistedLocal,
    analytic_e_twisted,
    make_twist_global,
)
from .geometry import DEFAULT_H, TangentVector, directional_derivative, fs_distance, fs_gradient, fs_inner
from .hilbert import Ray, random_state, random_unitary

GRADIENT_TOL = 1e-4
LU_TOL = 1e-10
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def check_metric(rng: np.random.Generator, n: int = 200) -> CheckResult:
    worst_tri = 0.0
    for dim in (2, 4):
        for _ in range(n):
            x, y, z = (Ray(random_state(rng, dim)) for _ in range(3))
            dxy, dyx = fs_distance(x, y), fs_distance(y, x)
            if dxy != dyx:
                return CheckResult("metric_axioms", False, f"asymmetric: {dxy!r} vs {dyx!r}")
            if not 0.0 <= dxy <= math.pi / 2:
                return CheckResult("metric_axioms", False, f"distance {dxy} out of range")
            if fs_distance(x, x) > 1e-12:
                return CheckResult("metric_axioms", False, "d(x, x) != 0")
            worst_tri = max(worst_tri, fs_distance(x, z) - fs_distance(x, y) - fs_distance(y, z))
    ok = worst_tri <= 1e-12
    return CheckResult("metric_axioms", ok, f"max triangle excess {worst_tri:.3g} over {2 * n} triples")


def random_functional(rng: np.random.Generator, kind: str):
    if kind == "standard_vn":
        return StandardVN()
    if kind == "twisted_global":
        return TwistedGlobal(make_twist_global(float(rng.uniform(0, math.pi))))
    axis = rng.normal(size=3)
    return QubitHeight(tuple(axis / np.linalg.norm(axis)))


def check_gradient(rng: np.random.Generator, h: float = DEFAULT_H, n: int = 24) -> CheckResult:
    kinds = ("standard_vn", "twisted_global", "qubit_height")
    worst = 0.0
    try:
        for i in range(n):
            E = random_functional(rng, kinds[i % 3])
            x = Ray(random_state(rng, E.dim))
            v = TangentVector.project(x, random_state(rng, E.dim)).unit()
            g = fs_gradient(E, x, h)
            worst = max(worst, abs(fs_inner(g, v) - directional_derivative(E, x, v, h)))
    except ValueError as exc:
        return CheckResult("gradient", False, str(exc))
    return CheckResult("gradient", worst <= GRADIENT_TOL,
                       f"max |g(grad E, v) - D_v E| = {worst:.3g} (h={h:g}, {n} samples)")


def check_lu_invariance(rng: np.random.Generator, n: int = 50) -> CheckResult:
    std = StandardVN()
    worst = 0.0
    for _ in range(n):
        psi = random_state(rng, 4)
        w = random_unitary(rng, 2)
        worst = max(worst, abs(TwistedLocal(w)(psi) - std(psi)))
    return CheckResult("lu_invariance", worst <= LU_TOL,
                       f"max |E_local - E_std| = {worst:.3g}; local twists do not change the entropy")


def check_oracle(rng: np.random.Generator) -> CheckResult:
    delta = math.pi / 32
    worst = 0.0
    for theta in (0.1, 0.4, math.pi / 4, 1.2):
        E = TwistedGlobal(make_twist_global(theta))
        for j in range(17):
            worst = max(worst, abs(E(family_state(j, delta)) - analytic_e_twisted(j, delta, theta)))
    trivial = max(StandardVN()(family_state(j, math.pi / 16)) for j in range(17))
    ok = worst <= ORACLE_TOL and trivial <= 1e-12
    return CheckResult("oracle", ok,
                       f"max |numeric - closed form| = {worst:.3g}; max untwisted family entropy = {trivial:.3g}")


def check_codes(rng: np.random.Generator, n: int = 100) -> CheckResult:
    key = GeoKey("twisted_global", math.pi / 4)
    for _ in range(n):
        cfg = EncoderConfig(j0=int(rng.integers(1, 8)))
        bits = random_message(rng, cfg)
        traj = encode(bits, cfg)
        if decode_index(traj, cfg) != bits:
            return CheckResult("codes", False, f"index decoder failed on {bits}")
        if decode_profile(traj, key) != bits:
            return CheckResult("codes", False, f"profile decoder failed on {bits}")
    return CheckResult("codes", True, f"{n} random messages round-trip through both decoders")


def check_bb84(seed: int, n: int = 4000) -> CheckResult:
    clean, _ = bb84.run_protocol(n, bb84.NoEve(), seed)
    if clean.qber != 0.0:
        return CheckResult("bb84", False, f"no-Eve QBER {clean.qber} != 0")
    attacked, _ = bb84.run_protocol(n, bb84.InterceptResend(), seed)
    expected = float(bb84.theoretical_qber(bb84.InterceptResend()))
    sigma = math.sqrt(expected * (1 - expected) / attacked.n_sifted)
    ok = abs(attacked.qber - expected) <= 3 * sigma
    return CheckResult("bb84", ok, f"no-Eve QBER 0; intercept QBER {attacked.qber:.4f} vs {expected} "
                                   f"(3 sigma = {3 * sigma:.4f})")


def run_checks(seed: int = 0, h: float = DEFAULT_H, groups=None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    table: dict[str, Callable[[], CheckResult]] = {
        "metric_axioms": lambda: check_metric(rng),
        "gradient": lambda: check_gradient(rng, h),
        "lu_invariance": lambda: check_lu_invariance(rng),
        "oracle": lambda: check_oracle(rng),
        "codes": lambda: check_codes(rng),
        "bb84": lambda: check_bb84(seed),
    }
    names = list(table) if groups is None else list(groups)
    return [table[name]() for name in names]
