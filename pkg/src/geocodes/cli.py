"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 input or validation error, 3 self-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional

from . import bb84, codes, selfcheck
from .entanglement import FAMILIES, GeoKey
from .geometry import DEFAULT_H, ClassifierThresholds
from .hilbert import ValidationError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _config(args) -> dict:
    return _read_json(args.config) if args.config else {}


def _encoder_config(args) -> codes.EncoderConfig:
    return codes.EncoderConfig.from_json(
        _config(args), delta=args.delta, j0=args.j0, j_min=args.j_min, j_max=args.j_max)


def _thresholds(args) -> ClassifierThresholds:
    cfg = _config(args)
    eps_tan = args.eps_tan if args.eps_tan is not None else cfg.get("eps_tan", 0.05)
    eps_norm = args.eps_norm if args.eps_norm is not None else cfg.get("eps_norm", 0.2)
    return ClassifierThresholds(float(eps_tan), float(eps_norm))


def _key(args, required: bool = True) -> Optional[GeoKey]:
    if args.key is None:
        if required:
            raise UsageError(f"{args.command} needs --key")
        return None
    return GeoKey.from_json(_read_json(args.key))


def _trajectory(path) -> codes.Trajectory:
    return codes.Trajectory.from_json(_read_json(path))


def parse_message(text: str) -> list[int]:
    """``0x``-prefixed hex (4 bits per digit, MSB first) or a plain string of 0s and 1s."""
    text = text.strip()
    if text.lower().startswith("0x"):
        digits = text[2:]
        try:
            return [int(b) for d in digits for b in format(int(d, 16), "04b")]
        except ValueError:
            raise ValidationError(f"invalid hex message {text!r}") from None
    if any(c not in "01" for c in text):
        raise ValidationError(f"message {text!r} must be binary digits or 0x-prefixed hex")
    return [int(c) for c in text]


def _render_bits(bits) -> str:
    return "".join("?" if b is None else str(b) for b in bits)


def cmd_encode(args) -> int:
    cfg = _encoder_config(args)
    bits = parse_message(args.message)
    traj = codes.encode(bits, cfg)
    walk = codes.index_walk(bits, cfg)
    text = _dump(traj.to_json()) + "\n"
    summary = {"bits": "".join(map(str, bits)), "length": len(bits), "walk": walk,
               "moves": "".join(traj.moves), "config": cfg.to_json()}
    if args.json:
        summary_text = _dump(summary)
    else:
        summary_text = f"L={len(bits)} walk j: {' '.join(map(str, walk))} moves: {''.join(traj.moves) or '-'}"
    if args.out:
        Path(args.out).write_text(text)
        print(summary_text)
    else:
        sys.stdout.write(text)
        print(summary_text, file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    traj = _trajectory(args.trajectory)
    if args.mode == "index":
        bits = codes.decode_index(traj, _encoder_config(args))
    else:
        key = _key(args)
        if args.config or any(v is not None for v in (args.delta, args.j0, args.j_min, args.j_max)):
            cfg = _encoder_config(args)
            if key.family == "twisted_global" and not cfg.monotone:
                raise ValidationError("encoder window leaves the region where the twisted profile is monotone")
        try:
            bits = codes.decode_profile(traj, key, _thresholds(args))
        except codes.UndecodableError as exc:
            print(_dump({"bits": _render_bits(exc.bits), "erasures": exc.erasures, "labels": exc.labels})
                  if args.json else _render_bits(exc.bits))
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    out = _render_bits(bits)
    if args.json:
        print(_dump({"bits": out, "erasures": sum(b is None for b in bits)}))
    else:
        print(out)
    return EXIT_OK


def _step_table(traj: codes.Trajectory, key: GeoKey, th: ClassifierThresholds) -> dict:
    E = key.functional()
    prof = codes.profile(traj, E)
    steps = []
    for k, (label, m) in enumerate(codes.classify_trajectory(traj, E, th)):
        steps.append({"k": k, "e_k": prof[k], "delta_s": m.delta_s, "delta_e": m.delta_e,
                      "label": label.value})
    return {"key": key.to_json(), "profile": prof, "steps": steps,
            "moves": "".join(s["label"] for s in steps)}


def _print_table(table: dict) -> None:
    print(f"{'k':>4}  {'e_k':>14}  {'ds_k':>14}  {'de_k':>14}  label")
    for s in table["steps"]:
        print(f"{s['k']:>4}  {s['e_k']:>14.10f}  {s['delta_s']:>14.10f}  {s['delta_e']:>+14.10f}  {s['label']}")


def cmd_profile(args) -> int:
    table = _step_table(_trajectory(args.trajectory), _key(args), _thresholds(args))
    if args.json:
        print(_dump(table))
    else:
        _print_table(table)
    return EXIT_OK


def cmd_classify(args) -> int:
    table = _step_table(_trajectory(args.trajectory), _key(args), _thresholds(args))
    if args.json:
        print(_dump(table))
    else:
        _print_table(table)
        print(f"moves: {table['moves']}")
    return EXIT_OK


def cmd_bb84(args) -> int:
    if args.rounds < 1:
        raise UsageError("--rounds must be at least 1")
    if args.eve == "none":
        eve = bb84.NoEve()
    else:
        eve = bb84.InterceptResend({"z": "Z", "x": "X", "random": "random"}[args.eve_basis])
    stats, records = bb84.run_protocol(args.rounds, eve, args.seed)
    if args.log:
        with open(args.log, "w") as fh:
            for r in records:
                fh.write(json.dumps(r.to_json()) + "\n")
    print(_dump(stats.to_json()))
    return EXIT_OK


def cmd_selfcheck(args, groups=None) -> int:
    results = selfcheck.run_checks(args.seed, args.h, groups)
    passed = all(r.passed for r in results)
    if args.json:
        print(_dump({"passed": passed, "groups": [r.to_json() for r in results]}))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<14} {r.detail}")
    return EXIT_OK if passed else EXIT_CHECK


def cmd_gradcheck(args) -> int:
    return cmd_selfcheck(args, groups=["gradient"])


def cmd_keygen(args) -> int:
    axis = tuple(args.axis) if args.axis else None
    key = GeoKey(args.family, args.theta, args.generator, axis)
    text = _dump(key.to_json()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for every random choice")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--key", help="secret key file (GeoKey JSON)")
    common.add_argument("--config", help="public config file (encoder window and thresholds)")

    encoder = argparse.ArgumentParser(add_help=False)
    encoder.add_argument("--delta", type=float, help="angular step (default pi/16)")
    encoder.add_argument("--j0", type=int, help="public start index (default 4)")
    encoder.add_argument("--j-min", dest="j_min", type=int, help="window lower bound (default 1)")
    encoder.add_argument("--j-max", dest="j_max", type=int, help="window upper bound (default 7)")

    thresholds = argparse.ArgumentParser(add_help=False)
    thresholds.add_argument("--eps-tan", dest="eps_tan", type=float, help="tangential threshold (default 0.05)")
    thresholds.add_argument("--eps-norm", dest="eps_norm", type=float, help="normal threshold (default 0.2)")

    parser = _Parser(prog="geocodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", parents=[common, encoder], help="encode bits into a family trajectory")
    p.add_argument("message", help="binary string, or hex with a 0x prefix")
    p.add_argument("-o", "--out", help="trajectory output path (default: stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common, encoder, thresholds], help="recover bits from a trajectory")
    p.add_argument("trajectory")
    p.add_argument("--mode", choices=("index", "profile"), default="profile")
    p.set_defaults(func=cmd_decode)

    for name, func, text in (("profile", cmd_profile, "entropy profile along a trajectory"),
                             ("classify", cmd_classify, "T/U/D/M label of every step")):
        p = sub.add_parser(name, parents=[common, thresholds], help=text)
        p.add_argument("trajectory")
        p.set_defaults(func=func)

    p = sub.add_parser("bb84", parents=[common], help="simulate the geometric BB84 protocol")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--eve", choices=("none", "intercept"), default="none")
    p.add_argument("--eve-basis", dest="eve_basis", choices=("z", "x", "random"), default="random")
    p.add_argument("--log", help="write one JSON round record per line to this path")
    p.set_defaults(func=cmd_bb84)

    for name, func, text in (("selfcheck", cmd_selfcheck, "run the invariant suite"),
                             ("gradcheck", cmd_gradcheck, "run only the gradient consistency group")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--h", type=float, default=DEFAULT_H, help="finite-difference step")
        p.set_defaults(func=func)

    p = sub.add_parser("keygen", parents=[common], help="write a key file")
    p.add_argument("--family", choices=FAMILIES, default="twisted_global")
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--generator", help="Pauli tag, e.g. zx (global) or y (local)")
    p.add_argument("--axis", type=float, nargs=3, help="height axis (qubit_height only)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_keygen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"geocodes {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except codes.EncodeRangeError as exc:
        print(f"error: encode failed at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValidationError, codes.DecodeMismatchError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
