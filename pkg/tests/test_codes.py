import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geocodes.codes import (
    DecodeMismatchError,
    EncodeRangeError,
    EncoderConfig,
    Trajectory,
    UndecodableError,
    decode_index,
    decode_profile,
    elementary_moves,
    encode,
    eavesdropper_view,
    family_state,
    index_walk,
    profile,
    random_message,
    recover_indices,
)
from geocodes.entanglement import GeoKey, StandardVN, TwistedGlobal, make_twist_global
from geocodes.geometry import MoveLabel, fs_distance
from geocodes.hilbert import Ray, ValidationError, check_unitary

KEY = GeoKey("twisted_global", math.pi / 4)
DELTA = math.pi / 16


def test_family_state_closed_form():
    s = family_state(2, DELTA)
    np.testing.assert_allclose(s.vector, [math.cos(DELTA), 0, math.sin(DELTA), 0], atol=1e-15)
    assert fs_distance(family_state(3, DELTA), family_state(5, DELTA)) == pytest.approx(DELTA, abs=1e-12)


def test_elementary_moves_step_the_family():
    m = elementary_moves(DELTA)
    for u in m:
        check_unitary(u)
    for j in range(8):
        psi = family_state(j, DELTA).vector
        assert fs_distance(Ray(m.u_plus @ psi), family_state(j + 1, DELTA)) <= 1e-12
        assert fs_distance(Ray(m.u_minus @ psi), family_state(j - 1, DELTA)) <= 1e-12
        assert fs_distance(Ray(m.t @ psi), family_state(j, DELTA)) == 0.0


def test_encode_example():
    cfg = EncoderConfig(j0=2)
    assert index_walk([1, 1, 0], cfg) == [2, 3, 4, 3]
    traj = encode([1, 1, 0], cfg)
    assert traj.moves == ("U", "U", "D")
    for s, j in zip(traj.states, [2, 3, 4, 3]):
        assert fs_distance(s, family_state(j, DELTA)) <= 1e-12
    assert len(encode([], cfg)) == 1


def test_encode_range_errors():
    with pytest.raises(EncodeRangeError) as info:
        encode([0], EncoderConfig(j0=1))
    assert info.value.step == 0 and info.value.index == 0
    with pytest.raises(EncodeRangeError):
        encode([1, 1, 1, 1], EncoderConfig(j0=4))
    with pytest.raises(ValidationError):
        encode([2], EncoderConfig())


def test_encoder_config_validation():
    with pytest.raises(ValidationError):
        EncoderConfig(delta=0)
    with pytest.raises(ValidationError):
        EncoderConfig(j0=9)
    with pytest.raises(ValidationError):
        EncoderConfig(delta=1.0, j_min=0, j_max=7)
    assert EncoderConfig().monotone
    assert not EncoderConfig(j_max=9, j0=4).monotone


def test_decode_examples():
    cfg = EncoderConfig()
    traj = Trajectory((family_state(2, DELTA), family_state(3, DELTA), family_state(2, DELTA)))
    assert decode_index(traj, cfg) == [1, 0]
    assert decode_profile(traj, KEY) == [1, 0]
    same = Trajectory((family_state(3, DELTA), family_state(3, DELTA)))
    assert decode_index(same, cfg) == [None]


def test_decode_index_rejects_off_family_states():
    bell = Ray(np.array([1, 0, 0, 1]) / math.sqrt(2))
    traj = Trajectory((family_state(4, DELTA), bell))
    with pytest.raises(DecodeMismatchError) as info:
        decode_index(traj, EncoderConfig())
    assert info.value.position == 1
    jump = Trajectory((family_state(2, DELTA), family_state(4, DELTA)))
    with pytest.raises(DecodeMismatchError):
        decode_index(jump, EncoderConfig())
    with pytest.raises(DecodeMismatchError):
        recover_indices(Trajectory((Ray([1, 0]),)), EncoderConfig())


def test_twisted_profile_is_strictly_increasing():
    traj = Trajectory(tuple(family_state(j, DELTA) for j in range(9)))
    prof = profile(traj, TwistedGlobal(make_twist_global(math.pi / 4)))
    assert prof[0] == pytest.approx(0.0, abs=1e-12)
    assert prof[-1] == pytest.approx(1.0, abs=1e-12)
    assert all(b > a for a, b in zip(prof, prof[1:]))


def test_eavesdropper_sees_a_flat_profile():
    traj = encode([1, 0, 1, 1], EncoderConfig())
    report = eavesdropper_view(traj)
    assert report.moves == "TTTT"
    assert report.flat
    assert json.loads(json.dumps(report.to_json()))["flat"] is True


def test_eavesdropper_sees_structure_off_the_family():
    v = make_twist_global(math.pi / 4)
    traj = Trajectory(tuple(Ray(v @ family_state(j, DELTA).vector) for j in (2, 3, 4)))
    report = eavesdropper_view(traj)
    assert not report.flat
    assert report.moves == "UU"


def test_standard_key_gives_only_erasures():
    traj = encode([1, 0, 0], EncoderConfig())
    with pytest.raises(UndecodableError) as info:
        decode_profile(traj, GeoKey("standard_vn"))
    assert info.value.bits == [None, None, None]
    assert info.value.erasures == 3
    assert info.value.labels == "TTT"


def test_no_mixed_labels_with_default_thresholds():
    from geocodes.codes import classify_trajectory
    E = KEY.functional()
    for j0 in range(1, 8):
        cfg = EncoderConfig(j0=j0)
        rng = np.random.default_rng(j0)
        traj = encode(random_message(rng, cfg), cfg)
        assert all(lab is not MoveLabel.M for lab, _ in classify_trajectory(traj, E))


@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_round_trip_property(seed, j0):
    cfg = EncoderConfig(j0=j0)
    bits = random_message(np.random.default_rng(seed), cfg)
    traj = encode(bits, cfg)
    assert decode_index(traj, cfg) == bits
    assert decode_profile(traj, KEY) == bits


def test_random_message_stays_in_window(rng):
    for _ in range(200):
        cfg = EncoderConfig(j0=int(rng.integers(1, 8)))
        bits = random_message(rng, cfg)
        assert len(bits) <= 32
        index_walk(bits, cfg)


def test_trajectory_json_round_trip():
    traj = encode([1, 0, 1], EncoderConfig())
    data = json.loads(json.dumps(traj.to_json()))
    back = Trajectory.from_json(data)
    assert back.moves == traj.moves
    assert all(a == b for a, b in zip(back.states, traj.states))
    assert decode_index(back, EncoderConfig()) == [1, 0, 1]


def test_trajectory_validation():
    with pytest.raises(ValidationError):
        Trajectory(())
    with pytest.raises(ValidationError):
        Trajectory((Ray([1, 0]), Ray([1, 0, 0, 0])))
    with pytest.raises(ValidationError):
        Trajectory((Ray([1, 0]), Ray([0, 1])), ("X",))
    with pytest.raises(ValidationError):
        Trajectory((Ray([1, 0]),), ("U",))
    with pytest.raises(ValidationError):
        Trajectory.from_json({"states": []})
    data = encode([1], EncoderConfig()).to_json()
    data["dim"] = 2
    with pytest.raises(ValidationError):
        Trajectory.from_json(data)


def test_encoder_config_json():
    cfg = EncoderConfig(delta=0.1, j0=3, j_min=2, j_max=9)
    assert EncoderConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    assert EncoderConfig.from_json({"j0": 5}) == EncoderConfig(j0=5)
    assert EncoderConfig.from_json({"j0": 5}, j0=6, delta=None) == EncoderConfig(j0=6)
    with pytest.raises(ValidationError):
        EncoderConfig.from_json({"j0": "abc"})


def test_standard_profile_is_zero_everywhere():
    traj = encode([1, 1, 0, 0, 0], EncoderConfig())
    assert max(profile(traj, StandardVN())) <= 1e-12
