"""Acceptance criteria, one test per criterion.

Each test records its outcome through the ``criterion`` fixture, and the run
ends with one PASS/FAIL line per criterion under "acceptance criteria".
"""

import math

import numpy as np

from geocodes import bb84
from geocodes.cli import main
from geocodes.codes import (
    EncoderConfig,
    UndecodableError,
    decode_index,
    decode_profile,
    encode,
    family_state,
    random_message,
)
from geocodes.entanglement import (
    GeoKey,
    QubitHeight,
    StandardVN,
    TwistedGlobal,
    TwistedLocal,
    analytic_e_twisted,
    make_twist_global,
    von_neumann_entropy,
)
from geocodes.geometry import (
    MoveLabel,
    TangentVector,
    classify_step,
    decompose,
    directional_derivative,
    fs_distance,
    fs_gradient,
    fs_inner,
    step_along,
)
from geocodes.hilbert import Ray, random_state, random_unitary

KINDS = ("standard_vn", "twisted_global", "qubit_height")


def make_functional(rng, kind):
    if kind == "standard_vn":
        return StandardVN()
    if kind == "twisted_global":
        return TwistedGlobal(make_twist_global(float(rng.uniform(0, math.pi))))
    axis = rng.normal(size=3)
    return QubitHeight(tuple(axis / np.linalg.norm(axis)))


def test_c01_metric_axioms(criterion):
    rng = np.random.default_rng(1)
    asym, out_of_range, worst = 0, 0, -math.inf
    for dim in (2, 4):
        for _ in range(1000):
            x, y, z = (Ray(random_state(rng, dim)) for _ in range(3))
            dxy = fs_distance(x, y)
            asym += dxy != fs_distance(y, x)
            out_of_range += not 0.0 <= dxy <= math.pi / 2
            worst = max(worst, fs_distance(x, z) - fs_distance(x, y) - fs_distance(y, z))
    ok = asym == 0 and out_of_range == 0 and worst <= 1e-12
    criterion("C1 metric axioms", ok,
              f"asymmetric={asym} out_of_range={out_of_range} max_triangle_excess={worst:.2e}")
    assert ok


def test_c02_gradient_consistency(criterion):
    rng = np.random.default_rng(2)
    h = 1e-5
    worst = 0.0
    for i in range(50):
        E = make_functional(rng, KINDS[i % 3])
        x = Ray(random_state(rng, E.dim))
        v = TangentVector.project(x, random_state(rng, E.dim)).unit()
        worst = max(worst, abs(fs_inner(fs_gradient(E, x, h), v) - directional_derivative(E, x, v, h)))
    criterion("C2 gradient consistency", worst <= 1e-4, f"max error {worst:.2e} over 50 triples (tol 1e-4)")
    assert worst <= 1e-4


def test_c03_tangential_preservation(criterion):
    rng = np.random.default_rng(3)
    ts = np.array([1e-2, 1e-3, 1e-4])
    slopes = []
    for i in range(12):
        E = make_functional(rng, KINDS[i % 3])
        x = Ray(random_state(rng, E.dim))
        grad = fs_gradient(E, x)
        _, par = decompose(TangentVector.project(x, random_state(rng, E.dim)), grad)
        par = par.unit()
        errs = [abs(E(step_along(x, par, t)) - E(x)) for t in ts]
        slopes.append(np.polyfit(np.log10(ts), np.log10(errs), 1)[0])
    ok = min(slopes) >= 1.8
    criterion("C3 tangential first-order preservation", ok,
              f"min fitted exponent {min(slopes):.3f} over {len(slopes)} instances (need >= 1.8)")
    assert ok


def test_c04_local_unitary_invariance(criterion):
    rng = np.random.default_rng(4)
    std = StandardVN()
    worst = 0.0
    for _ in range(100):
        psi = random_state(rng, 4)
        w = random_unitary(rng, 2)
        worst = max(worst, abs(std(np.kron(w, np.eye(2)) @ psi) - std(psi)))
        worst = max(worst, abs(TwistedLocal(w)(psi) - std(psi)))
    criterion("C4 local-unitary invariance", worst <= 1e-10, f"max deviation {worst:.2e} (tol 1e-10)")
    assert worst <= 1e-10


def test_c05_family_triviality(criterion):
    worst = max(StandardVN()(family_state(j, math.pi / 16)) for j in range(17))
    criterion("C5 family triviality", worst <= 1e-12, f"max E_std over j in [0, 16] = {worst:.2e}")
    assert worst <= 1e-12


def test_c06_twisted_oracle(criterion):
    worst = 0.0
    for delta in (math.pi / 16, math.pi / 32):
        for theta in np.linspace(0.05, math.pi - 0.05, 12):
            E = TwistedGlobal(make_twist_global(float(theta)))
            for j in range(int(round(math.pi / delta)) + 1):
                worst = max(worst, abs(E(family_state(j, delta)) - analytic_e_twisted(j, delta, float(theta))))
    E = TwistedGlobal(make_twist_global(math.pi / 4))
    delta = math.pi / 64
    prof = [E(family_state(j, delta)) for j in range(1, 32)]
    increasing = all(b > a for a, b in zip(prof, prof[1:]))
    ok = worst <= 1e-9 and increasing
    criterion("C6 twisted-profile oracle", ok, f"max |numeric - analytic| {worst:.2e}; increasing={increasing}")
    assert ok


def test_c07_coding_round_trip(criterion):
    rng = np.random.default_rng(7)
    key, std_key = GeoKey("twisted_global", math.pi / 4), GeoKey("standard_vn")
    index_fail = profile_fail = not_erased = 0
    for _ in range(1000):
        cfg = EncoderConfig(j0=int(rng.integers(1, 8)))
        bits = random_message(rng, cfg)
        traj = encode(bits, cfg)
        index_fail += decode_index(traj, cfg) != bits
        profile_fail += decode_profile(traj, key) != bits
        if bits:
            try:
                decode_profile(traj, std_key)
                not_erased += 1
            except UndecodableError as exc:
                not_erased += exc.erasures != len(bits)
    ok = index_fail == profile_fail == not_erased == 0
    criterion("C7 coding round trip", ok,
              f"1000 messages: index failures {index_fail}, profile failures {profile_fail}, "
              f"standard key non-erasures {not_erased}")
    assert ok


def test_c08_classifier(criterion):
    rng = np.random.default_rng(8)
    t = 1e-4
    wrong = {MoveLabel.U: 0, MoveLabel.D: 0, MoveLabel.T: 0}
    done = 0
    while done < 100:
        E = make_functional(rng, KINDS[done % 3])
        x = Ray(random_state(rng, E.dim))
        grad = fs_gradient(E, x)
        if grad.norm() < 0.5:
            continue
        g = grad.unit()
        _, par = decompose(TangentVector.project(x, random_state(rng, E.dim)), grad)
        for direction, want in ((g, MoveLabel.U), (-g, MoveLabel.D), (par.unit(), MoveLabel.T)):
            label, _ = classify_step(x, step_along(x, direction, t), E)
            wrong[want] += label is not want
        done += 1
    ok = not any(wrong.values())
    criterion("C8 classifier correctness", ok,
              "misclassified out of 100 each: " + ", ".join(f"{k.value}={v}" for k, v in wrong.items()))
    assert ok


def test_c09_bb84_no_eve(criterion):
    stats, _ = bb84.run_protocol(10_000, bb84.NoEve(), seed=9)
    ok = stats.qber == 0.0 and abs(stats.sift_rate - 0.5) <= 0.02
    criterion("C9 BB84 without Eve", ok, f"qber={stats.qber} sift_rate={stats.sift_rate:.4f}")
    assert ok


def test_c10_bb84_disturbance(criterion):
    parts, ok = [], True
    for policy in ("random", "Z", "X"):
        eve = bb84.InterceptResend(policy)
        stats, _ = bb84.run_protocol(10_000, eve, seed=10)
        expected = float(bb84.theoretical_qber(eve))
        ok &= abs(stats.qber - expected) <= 0.02
        parts.append(f"{policy}: {stats.qber:.4f} vs {expected}")
    criterion("C10 BB84 intercept-resend", ok, "; ".join(parts))
    assert ok


def test_c11_determinism(criterion, capsys, tmp_path):
    def run(argv):
        code = main(argv)
        out = capsys.readouterr()
        return code, out.out.encode(), out.err.encode()

    bb = ["bb84", "--rounds", "500", "--eve", "intercept", "--seed", "123", "--json"]
    same_bb84 = run(bb) == run(bb)
    enc = ["encode", "0x5a", "--seed", "123", "--json"]
    same_stdout = run(enc) == run(enc)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run([*enc, "-o", str(a)])
    run([*enc, "-o", str(b)])
    same_file = a.read_bytes() == b.read_bytes()
    ok = same_bb84 and same_stdout and same_file
    criterion("C11 determinism", ok, f"bb84={same_bb84} encode_stdout={same_stdout} encode_file={same_file}")
    assert ok


def test_c12_entropy_anchors(criterion):
    rng = np.random.default_rng(12)
    bell = StandardVN()(np.array([1, 0, 0, 1]) / math.sqrt(2))
    products = [np.kron(random_state(rng, 2), random_state(rng, 2)) for _ in range(200)]
    products += [np.eye(4)[k] for k in range(4)]
    worst_product = max(StandardVN()(p) for p in products)
    mixed = von_neumann_entropy(np.diag([0.75, 0.25]))
    ok = abs(bell - 1.0) <= 1e-12 and worst_product <= 1e-12 and abs(mixed - 0.811278) <= 1e-6
    criterion("C12 entropy anchors", ok,
              f"bell={float(bell)!r} max_product={worst_product:.2e} diag(0.75,0.25)={mixed:.7f}")
    assert ok
