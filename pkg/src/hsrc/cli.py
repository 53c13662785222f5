"""Command-line entry point: ``hsrc <command> ...``.

Exit status is 0 on success, 1 when the data cannot be recovered or
repaired, and 2 for bad arguments or malformed fragment files.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from pathlib import Path

from . import bandwidth, resilience
from .code import Fragment, decode_linear, encode, join_bytes, make_code, split_bytes
from .container import FragmentFile
from .errors import ContainerError, DomainError, HSRCError
from .field import FieldSpec, make_field
from .repair import pair_table, repair_missing
from .scheduler import ClusterState, plan_repairs, schedule_document

log = logging.getLogger("hsrc")

_W_POWER = re.compile(r"^w(?:\^(\d+))?$")


class UsageError(HSRCError):
    pass


def parse_element(text: str, F: FieldSpec) -> int:
    """An element given as an int (``5``, ``0x13``) or a power of w (``w``, ``w^7``)."""
    t = text.strip().replace("**", "^")
    m = _W_POWER.match(t)
    if m:
        return F.exp(int(m.group(1) or 1))
    try:
        value = int(t, 0)
    except ValueError:
        raise UsageError(f"cannot parse field element {text!r}") from None
    if not 0 <= value < F.order:
        raise UsageError(f"element {text!r} outside GF(2^{F.degree})")
    return value


def parse_list(text: str, F: FieldSpec) -> list[int]:
    return [parse_element(t, F) for t in text.split(",") if t.strip()]


def parse_range(text: str) -> list[float]:
    """``a:b:step`` inclusive of b, or a single value."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad probability range {text!r}") from None
    if len(nums) == 1:
        values = nums
    elif len(nums) == 3 and nums[2] > 0 and nums[1] >= nums[0]:
        a, b, step = nums
        count = int(round((b - a) / step)) + 1
        values = [round(a + i * step, 12) for i in range(count) if a + i * step <= b + 1e-9]
    else:
        raise UsageError(f"bad probability range {text!r}, expected a:b:step")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise UsageError("probabilities must lie in [0, 1]")
    return values


def _field(args) -> FieldSpec:
    return make_field(args.m, "default" if args.modulus is None else args.modulus)


def _default_degree(n: int, k: int) -> int:
    m = 2
    while (1 << m) - 1 < n or (1 << (k - 1)) + 1 > (1 << m) - 1:
        m += 1
    return m


def _label(F: FieldSpec, x: int) -> str:
    e = F.log(x)
    return "1" if e == 0 else "w" if e == 1 else f"w^{e}"


# -- fragment files -------------------------------------------------------------

def _load(paths) -> tuple[FieldSpec, object, list[Fragment], FragmentFile]:
    if not paths:
        raise UsageError("no fragment files given")
    files = [FragmentFile.read(p) for p in paths]
    ref = files[0]
    key = (ref.m, ref.modulus, ref.k, ref.n, ref.length, ref.stripes)
    for p, f in zip(paths, files):
        if (f.m, f.modulus, f.k, f.n, f.length, f.stripes) != key:
            raise ContainerError(f"{p}: header does not match {paths[0]}")
    F = make_field(ref.m, ref.modulus)
    code = make_code(F, ref.k, n=ref.n)
    frags = {}
    for p, f in zip(paths, files):
        if code.point(f.index) != f.point:
            raise ContainerError(f"{p}: point {f.point:#x} does not belong to index {f.index}")
        frags[f.index] = Fragment(f.index, f.point, f.values)
    return F, code, sorted(frags.values(), key=lambda f: f.index), ref


def _fragment_name(index: int) -> str:
    return f"frag-{index:04d}.hsrc"


def cmd_encode(args) -> int:
    F = _field(args)
    code = make_code(F, args.k, n=args.n)
    data = Path(args.infile).read_bytes()
    stripes = split_bytes(data, code.k, code.m)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for frag in encode(stripes, code):
        FragmentFile(code.m, F.modulus, code.k, code.n, frag.index, frag.point, len(data),
                     frag.values).write(out / _fragment_name(frag.index))
    log.info("wrote %d fragments of %d stripes to %s", code.n, len(stripes), out)
    return 0


def cmd_decode(args) -> int:
    F, code, frags, ref = _load(args.fragments)
    stripes = decode_linear(frags, code)
    Path(args.out).write_bytes(join_bytes(stripes, code.m, ref.length))
    return 0


def cmd_repair(args) -> int:
    F, code, frags, ref = _load(args.fragments)
    out = Path(args.outdir) if args.outdir else Path(args.fragments[0]).parent
    out.mkdir(parents=True, exist_ok=True)
    for frag in repair_missing(frags, code):
        FragmentFile(ref.m, ref.modulus, ref.k, ref.n, frag.index, frag.point, ref.length,
                     frag.values).write(out / _fragment_name(frag.index))
        print(out / _fragment_name(frag.index))
    return 0


def cmd_pairs(args) -> int:
    F = _field(args)
    code = make_code(F, args.k, n=args.n)
    target = parse_element(args.target, F)
    table = pair_table(target, code)
    doc = {
        "target": target,
        "target_label": _label(F, target),
        "diversity": table.diversity,
        "pairs": [list(p) for p in table.pairs],
        "pair_labels": [[_label(F, a), _label(F, b)] for a, b in table.pairs],
    }
    print(json.dumps(doc))
    return 0


def cmd_resilience(args) -> int:
    m = args.m or _default_degree(args.n, args.k)
    code = make_code(make_field(m), args.k, n=args.n)
    ps = parse_range(args.pfrag)
    if args.mode != "analytic" and args.trials < 1:
        raise UsageError("--trials must be positive for simulation")
    rows = resilience.resilience_table(code, ps, args.trials, args.seed, args.mode, args.workers)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p_frag", "p_obj_src", "p_obj_ec", "mc_estimate", "mc_stderr", "n", "k", "trials", "seed"])
    fmt = lambda v: "" if v is None else repr(float(v))  # noqa: E731
    trials = args.trials if args.mode != "analytic" else ""
    for r in rows:
        w.writerow([fmt(r.p_frag), fmt(r.p_obj_src), fmt(r.p_obj_ec), fmt(r.mc_estimate),
                    fmt(r.mc_stderr), code.n, code.k, trials, args.seed])
    return 0


def cmd_bandwidth(args) -> int:
    rows = bandwidth.traffic_table(args.n, args.k)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(bandwidth.CSV_COLUMNS)
    for r in rows:
        w.writerow(bandwidth.row_values(r))
    return 0


def cmd_schedule(args) -> int:
    F = _field(args)
    code = make_code(F, args.k, n=args.n)

    def indices(text):
        out = []
        for p in parse_list(text, F):
            if not code.has_point(p):
                raise UsageError(f"{p:#x} is not an evaluation point of this code")
            out.append(code.index_of(p))
        return out

    missing = indices(args.missing)
    available = indices(args.available) if args.available else None
    state = ClusterState.scenario(code, missing, available)
    print(json.dumps(schedule_document(code, state, plan_repairs(code, state))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsrc", description="Homomorphic self-repairing codes.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def code_args(p, need_m=True):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        if need_m:
            p.add_argument("--m", type=int, required=True, help="field degree")
            p.add_argument("--modulus", help="field polynomial as hex, e.g. 0x13")

    p = sub.add_parser("encode", help="split a file into fragment files")
    code_args(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild a file from fragment files")
    p.add_argument("--out", required=True)
    p.add_argument("fragments", nargs="+")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="rebuild every missing fragment file")
    p.add_argument("--outdir", help="defaults to the directory of the first fragment")
    p.add_argument("fragments", nargs="+")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("pairs", help="print the repair pairs of one fragment as JSON")
    code_args(p)
    p.add_argument("--target", required=True, help="point as int or w^e")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("resilience", help="static resilience table as CSV")
    code_args(p, need_m=False)
    p.add_argument("--m", type=int, help="field degree (smallest fitting by default)")
    p.add_argument("--pfrag", default="0.5:0.95:0.05")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("analytic", "sim", "both"), default="analytic")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_resilience)

    p = sub.add_parser("bandwidth", help="repair traffic per lazy threshold as CSV")
    code_args(p, need_m=False)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("schedule", help="plan parallel repairs and print JSON")
    code_args(p)
    p.add_argument("--missing", required=True, help="comma-separated points, e.g. 1,w,w^2")
    p.add_argument("--available", help="defaults to every other point")
    p.set_defaults(func=cmd_schedule)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DomainError as e:
        print(str(e), file=sys.stderr)
        return 1
    except (HSRCError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
