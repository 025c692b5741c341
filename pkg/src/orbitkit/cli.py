"""Command-line front end.

Every verb reads JSON/CSV inputs, runs one library operation and writes a
report. Exit status: 0 on success, 2 when the mathematics says no (the
report then carries the error code), 1 for unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .commutator_analysis import (
    block_values_of,
    closed_range_witnesses,
    solve_commutator,
    tangent_split,
)
from .counterexamples import (
    escape_sweep,
    isclosed_escape,
    nonseparable_demo,
    shift_topology_demo,
)
from .dense_linalg import singular_values_of
from .errors import OrbitkitError
from .expectations import conditional_expectation
from .orbit_analysis import (
    construct_intertwiner,
    epsilon_partition,
    finite_rank_unitary_sequence,
    lagrange_spectral_projector,
    orbit_verdict,
)
from .sampling import SEED_VAR
from .spectral_core import materialize
from .symmetric_norms import NormSpec, ideal_norm, ky_fan_majorizes

log = logging.getLogger("orbitkit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for domain errors here
    def error(self, message):
        raise UsageError(message)


def parse_eigs(text: str) -> list[float]:
    """``harmonic:N``, ``geometric:N`` (powers of 1/2) or a comma-separated list."""
    kind, _, count = text.partition(":")
    if kind == "harmonic":
        return [1.0 / k for k in range(1, int(count) + 1)]
    if kind == "geometric":
        return [2.0 ** -k for k in range(1, int(count) + 1)]
    return [float(t) for t in text.split(",")]


# -- verbs ------------------------------------------------------------------
# Each returns (report, csv_rows).


def _spec(args) -> NormSpec:
    return NormSpec.parse(args.spec or "operator")


def cmd_norm(args):
    x = io.read_matrix(args.inputs[0])
    spec = _spec(args)
    s = singular_values_of(x)
    value = ideal_norm(s, spec)
    rows = [{"k": k + 1, "singular_value": float(v)} for k, v in enumerate(s)]
    return {"spec": spec.to_dict(), "norm": value, "singular_values": s}, rows


def cmd_majorize(args):
    sx = singular_values_of(io.read_matrix(args.inputs[0]))
    sy = singular_values_of(io.read_matrix(args.inputs[1]))
    rep = ky_fan_majorizes(sx, sy, tol=args.tol or 0.0)
    rows = [
        {"n": k + 1, "partial_x": float(a), "partial_y": float(b)}
        for k, (a, b) in enumerate(zip(rep.partial_sums_x, rep.partial_sums_y))
    ]
    return rep.__dict__, rows


def cmd_expectation(args):
    x = io.read_matrix(args.inputs[0])
    fam = io.read_family(args.inputs[1])
    e = conditional_expectation(x, fam)
    return {"expectation": e, "singular_values": singular_values_of(e)}, None


def cmd_commutator_solve(args):
    p = io.read_profile(args.inputs[0])
    if len(args.inputs) == 3:
        fam, y = io.read_family(args.inputs[1]), io.read_matrix(args.inputs[2])
    else:
        y = io.read_matrix(args.inputs[1])
        _, fam = materialize(p, y.shape[0])
    x = solve_commutator(p, fam, y)
    a = np.diag(block_values_of(p, fam)[fam.labels()])
    return {"solution": x, "residual": float(np.linalg.norm(x @ a - a @ x - y))}, None


def cmd_witnesses(args):
    ws = closed_range_witnesses(io.read_profile(args.inputs[0]))
    rows = [
        {"i": w.index_pair[0], "j": w.index_pair[1], "gap": w.gap, "ratio": w.ratio}
        for w in ws
    ]
    return {"witnesses": [w.to_dict() for w in ws], "min_ratio": min(w.ratio for w in ws)}, rows


def cmd_tangent(args):
    split = tangent_split(io.read_profile(args.inputs[0]), io.read_matrix(args.inputs[1]))
    return split.to_dict(), [split.to_dict()]


def cmd_verdict(args):
    kw = {} if args.tol is None else {"tol": args.tol}
    v = orbit_verdict(io.read_profile(args.inputs[0]), io.read_profile(args.inputs[1]), **kw)
    return v.to_dict(), None


def cmd_partition(args):
    cells = epsilon_partition(io.read_profile(args.inputs[0]), _need(args.eps, "--eps"))
    rows = [
        {"cell": k, "center": c, "members": " ".join(map(str, m))}
        for k, (c, m) in enumerate(cells.cells)
    ]
    return cells.to_dict(), rows


def cmd_intertwine(args):
    cert = construct_intertwiner(
        io.read_profile(args.inputs[0]),
        io.read_profile(args.inputs[1]),
        args.eps or 0.0,
        _need(args.dim, "--dim"),
    )
    return cert.to_dict(include_matrix=args.include_matrix), None


def cmd_approx_seq(args):
    a, b = io.read_profile(args.inputs[0]), io.read_profile(args.inputs[1])
    spec, dim, m_max = _spec(args), _need(args.dim, "--dim"), _need(args.m, "--m")
    rows = []
    for m in range(m_max + 1):
        step = finite_rank_unitary_sequence(a, b, m, dim)
        rows.append({"m": m, "distance": step.error_in(spec), "bound": step.bound_in(spec)})
    return {"spec": spec.to_dict(), "steps": rows}, rows


def cmd_projector(args):
    p = io.read_profile(args.inputs[0])
    j = _need(args.n, "--n")
    if len(args.inputs) > 1:
        x = io.read_matrix(args.inputs[1])
    else:
        x, _ = materialize(p, _need(args.dim, "--dim"))
    return {"index": j, "projector": lagrange_spectral_projector(p, j, x)}, None


def cmd_demo_isclosed(args):
    eigs = parse_eigs(args.eigs or "geometric:12")
    spec = _spec(args) if args.spec else NormSpec.trace()
    reports = [isclosed_escape(eigs, spec, args.n)] if args.n else escape_sweep(eigs, spec)
    rows = [r for rep in reports for r in rep.rows()]
    return {"spec": spec.to_dict(), "reports": [r.to_dict() for r in reports]}, rows


def cmd_demo_nonseparable(args):
    spec = NormSpec.parse(args.spec or "ratio:harmonic:128")
    rep = nonseparable_demo(spec, args.n or 64)
    return rep.to_dict(), rep.rows()


def cmd_demo_shift(args):
    eigs = parse_eigs(args.eigs or "harmonic:16")
    ns = [args.n] if args.n else range(2, len(eigs))
    reports = [shift_topology_demo(eigs, n) for n in ns]
    rows = [r for rep in reports for r in rep.rows()]
    return {"reports": [r.to_dict() for r in reports]}, rows


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this verb")
    return value


VERBS = {
    "norm": (cmd_norm, 1, 1),
    "majorize": (cmd_majorize, 2, 2),
    "expectation": (cmd_expectation, 2, 2),
    "commutator-solve": (cmd_commutator_solve, 2, 3),
    "witnesses": (cmd_witnesses, 1, 1),
    "tangent": (cmd_tangent, 2, 2),
    "verdict": (cmd_verdict, 2, 2),
    "partition": (cmd_partition, 1, 1),
    "intertwine": (cmd_intertwine, 2, 2),
    "approx-seq": (cmd_approx_seq, 2, 2),
    "projector": (cmd_projector, 1, 2),
    "demo-isclosed": (cmd_demo_isclosed, 0, 0),
    "demo-nonseparable": (cmd_demo_nonseparable, 0, 0),
    "demo-shift": (cmd_demo_shift, 0, 0),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbitkit", description="Orbits of normal operators in symmetrically normed ideals.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("inputs", nargs="*", help="input files (JSON profiles/matrices, CSV matrices)")
    p.add_argument("--spec", help="norm: operator, trace, schatten:P, kyfan:K, ratio:r1,r2,... or ratio:harmonic:N")
    p.add_argument("--eps", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--eigs", help="demo eigenvalues: harmonic:N, geometric:N or a comma list")
    p.add_argument("--include-matrix", action="store_true", help="embed dense matrices in intertwine reports")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _render(report, rows, fmt: str) -> str:
    if fmt == "csv":
        if rows is None:
            raise UsageError("this verb has no CSV form; use --format json")
        return io.rows_to_csv(rows)
    return io.dumps(report)


def _write_meta(args, argv, status: int) -> None:
    meta = {
        "orbitkit_version": __version__,
        "verb": args.verb,
        "argv": list(argv),
        "exit_status": status,
        "seed": os.environ.get(SEED_VAR),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "finished_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    Path(args.out + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"orbitkit: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    func, lo, hi = VERBS[args.verb]
    status = 0
    try:
        if not lo <= len(args.inputs) <= hi:
            raise UsageError(f"{args.verb} takes {lo}..{hi} input files, got {len(args.inputs)}")
        report, rows = func(args)
        _write(_render(report, rows, args.format), args.out)
    except OrbitkitError as exc:
        status = 2
        body = {"error": exc.code, "message": str(exc)}
        if args.format == "csv":
            _write(io.rows_to_csv([body]), args.out)
        else:
            _write(io.dumps(body), args.out)
        print(f"orbitkit: {exc.code}: {exc}", file=sys.stderr)
    except (UsageError, OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        status = 1
        print(f"orbitkit: {type(exc).__name__}: {exc}", file=sys.stderr)
    if args.out:
        try:
            _write_meta(args, argv, status)
        except OSError as exc:
            print(f"orbitkit: cannot write metadata: {exc}", file=sys.stderr)
            status = status or 1
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
