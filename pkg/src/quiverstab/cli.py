"""Command-line interface: ``quiverstab <command> ...``.

Exit codes: 0 on success, 1 on a domain error (bad file contents, failed
computation), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import dmin as dmin_mod
from .homotopy import homotopy_report
from .io import parse_quiver_file, parse_rational, parse_representation, serialize_quiver, serialize_representation
from .moment import flow
from .quiver import DimensionVector, QuiverError, QuiverSetup, gen_adhm, gen_polygon
from .slope import destabilizing_dimension_vectors, normalization_shift, normalize_alpha, slope_report
from .subrep import plant_instance, stability_verdict

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _HelpShown(Exception):
    pass


@dataclass
class CommandResult:
    text: str
    data: dict | None = None
    exit_code: int = 0

    def render(self, as_json: bool) -> str:
        if as_json and self.data is not None:
            return json.dumps(self.data, sort_keys=True, indent=2) + "\n"
        return self.text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")

    def exit(self, status=0, message=None):
        if status:
            raise UsageError(message or "")
        raise _HelpShown()


def _rat(x: Fraction) -> str:
    return str(x)


def _num(x: float):
    if x is None:
        return None
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{x:.12g}"


def _dmin_value(d):
    return "+inf" if d == math.inf else int(d)


def _slope_dict(rep) -> dict:
    return {"rank": rep.rank, "degree": _rat(rep.degree), "slope": _rat(rep.slope)}


def _parse_subs(tokens, setup: QuiverSetup) -> DimensionVector:
    values = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq or key not in setup.vertices:
            raise UsageError(f"--sub expects vertexid=k with a declared vertex id, got {tok!r}")
        try:
            values[key] = int(val)
        except ValueError:
            raise UsageError(f"--sub value must be an integer, got {tok!r}") from None
    return DimensionVector.from_mapping(setup.vertices, values)


def _load_setup(path: str) -> QuiverSetup:
    return parse_quiver_file(Path(path).read_text(encoding="utf-8"))


def _load_rep(path: str, setup: QuiverSetup):
    return parse_representation(Path(path).read_text(encoding="utf-8"), setup)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quiverstab", description="Stability data for quiver representations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a quiver spec for an example family")
    gsub = gen.add_subparsers(dest="family", required=True, parser_class=_Parser)
    ga = gsub.add_parser("adhm")
    ga.add_argument("--k", type=int, required=True)
    ga.add_argument("--n", type=int, required=True)
    ga.add_argument("-o", "--output")
    gp = gsub.add_parser("polygon")
    gp.add_argument("--sides", required=True, help="comma-separated positive rationals")
    gp.add_argument("-o", "--output")

    sl = sub.add_parser("slope")
    sl.add_argument("file")
    sl.add_argument("--sub", nargs="+", default=None, metavar="VERTEX=K")
    sl.add_argument("--json", action="store_true")

    for name in ("destab", "dmin"):
        c = sub.add_parser(name)
        c.add_argument("file")
        c.add_argument("--json", action="store_true")

    h = sub.add_parser("homotopy")
    h.add_argument("file")
    h.add_argument("--max-degree", type=int, required=True)
    h.add_argument("--json", action="store_true")

    st = sub.add_parser("stability")
    st.add_argument("file")
    st.add_argument("--rep", required=True)
    st.add_argument("--restarts", type=int, default=20)
    st.add_argument("--max-iters", type=int, default=2000)
    st.add_argument("--tol", type=float, default=1e-8)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--flow-steps", type=int, default=20_000)
    st.add_argument("--json", action="store_true")

    fl = sub.add_parser("flow")
    fl.add_argument("file")
    fl.add_argument("--rep", required=True)
    fl.add_argument("--max-steps", type=int, default=100_000)
    fl.add_argument("--tol", type=float, default=1e-9)
    fl.add_argument("--trace")
    fl.add_argument("-o", "--output", help="write the final representation here")
    fl.add_argument("--json", action="store_true")

    pl = sub.add_parser("plant")
    pl.add_argument("file")
    pl.add_argument("--sub", nargs="+", default=None, metavar="VERTEX=K")
    pl.add_argument("--seed", type=int, required=True)
    pl.add_argument("-o", "--output", required=True)
    return p


def _write_or_print(text: str, output: str | None, what: str) -> CommandResult:
    if output:
        Path(output).write_text(text, encoding="utf-8")
        return CommandResult(f"wrote {what} to {output}\n", {"schema_version": SCHEMA_VERSION, "output": output})
    return CommandResult(text, None)


def _cmd_gen(args) -> CommandResult:
    if args.family == "adhm":
        setup = gen_adhm(args.k, args.n)
    else:
        try:
            sides = [parse_rational(s.strip()) for s in args.sides.split(",")]
        except ValueError as exc:
            raise UsageError(f"--sides: {exc}") from None
        setup = gen_polygon(sides)
    return _write_or_print(serialize_quiver(setup), args.output, "quiver spec")


def _cmd_slope(args) -> CommandResult:
    setup = _load_setup(args.file)
    data = {
        "schema_version": SCHEMA_VERSION,
        "ambient": _slope_dict(slope_report(setup.dims, setup.alpha)),
        "normalization_shift": _rat(normalization_shift(setup)),
    }
    lines = [
        f"ambient {setup.dims}: rank {data['ambient']['rank']}, degree {data['ambient']['degree']}, "
        f"slope {data['ambient']['slope']}",
        f"normalization shift: {data['normalization_shift']}",
    ]
    if args.sub:
        sub = _parse_subs(args.sub, setup)
        if sub.is_zero():
            raise QuiverError("sub-dimension vector has rank 0")
        if not sub <= setup.dims:
            raise QuiverError(f"{sub} is not bounded by {setup.dims}")
        rep = _slope_dict(slope_report(sub, setup.alpha))
        norm = slope_report(sub, normalize_alpha(setup))
        data["sub"] = {"vector": str(sub), **rep, "normalized_slope": _rat(norm.slope)}
        lines.append(f"sub {sub}: rank {rep['rank']}, degree {rep['degree']}, slope {rep['slope']}")
        lines.append(f"normalized slope: {data['sub']['normalized_slope']}")
    return CommandResult("\n".join(lines) + "\n", data)


def _candidate_dicts(setup):
    out = []
    for sub, rep in destabilizing_dimension_vectors(setup):
        value = -2 * dmin_mod.euler_characteristic(setup.quiver, setup.dims, sub)
        out.append({"sub": str(sub), **_slope_dict(rep), "minus_two_chi": value})
    return out


def _cmd_destab(args) -> CommandResult:
    setup = _load_setup(args.file)
    cands = _candidate_dicts(setup)
    data = {
        "schema_version": SCHEMA_VERSION,
        "normalization_shift": _rat(normalization_shift(setup)),
        "count": len(cands),
        "candidates": cands,
    }
    lines = [f"normalization shift: {data['normalization_shift']}", f"{len(cands)} destabilizing sub-dimension vectors"]
    lines += [f"{c['sub']}  slope {c['slope']}  -2chi {c['minus_two_chi']}" for c in cands]
    return CommandResult("\n".join(lines) + "\n", data)


def _cmd_dmin(args) -> CommandResult:
    setup = _load_setup(args.file)
    rep = dmin_mod.d_min(setup)
    data = {
        "schema_version": SCHEMA_VERSION,
        "d_min": _dmin_value(rep.d_min),
        "witness": str(rep.witness) if rep.witness is not None else None,
        "minimizers": [str(m) for m in rep.minimizers],
        "candidates": [{"sub": str(c.sub), "minus_two_chi": c.value} for c in rep.per_candidate],
    }
    lines = [f"d_min = {data['d_min']}", f"witness = {data['witness'] if data['witness'] else 'none'}"]
    lines.append("minimizers: " + (" ".join(data["minimizers"]) or "none"))
    lines += [f"  {c['sub']}  -2chi {c['minus_two_chi']}" for c in data["candidates"]]
    return CommandResult("\n".join(lines) + "\n", data)


def _cmd_homotopy(args) -> CommandResult:
    setup = _load_setup(args.file)
    report = homotopy_report(setup, args.max_degree)
    entries = []
    lines = [f"d_min = {_dmin_value(report.d_min)}"]
    for e in report.entries:
        n = e.degree
        if e.conclusive:
            entries.append({"degree": n, "conclusive": True, "stable_locus": "0", "moduli": str(e.moduli_group)})
            if n == 0:
                lines.append("n=0: connected (pi_0(Rep^st) = 0, pi_0(M^st) = 0)")
            else:
                lines.append(f"n={n}: pi_{n}(Rep^st) = 0, pi_{n}(M^st) = pi_{n - 1}(PG_v) = {e.moduli_group}")
        else:
            entries.append({"degree": n, "conclusive": False, "stable_locus": None, "moduli": None})
            lines.append(f"n={n}: no conclusion")
    lines += [f"note: {note}" for note in report.notes]
    data = {
        "schema_version": SCHEMA_VERSION,
        "d_min": _dmin_value(report.d_min),
        "entries": entries,
        "notes": list(report.notes),
    }
    return CommandResult("\n".join(lines) + "\n", data)


def _cmd_stability(args) -> CommandResult:
    setup = _load_setup(args.file)
    rep = _load_rep(args.rep, setup)
    v = stability_verdict(
        rep,
        setup,
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
        flow_steps=args.flow_steps,
    )
    data = {
        "schema_version": SCHEMA_VERSION,
        "verdict": v.verdict.value,
        "flow_energy": _num(v.flow_energy),
        "searched": len(v.searched),
        "evidence": None,
    }
    lines = [f"verdict: {v.verdict.value}"]
    if v.evidence is not None:
        data["evidence"] = {
            "sub": str(v.evidence.sub),
            "slope": _rat(v.evidence.slope.slope),
            "residual": _num(v.evidence.residual),
        }
        lines.append(
            f"witness: {v.evidence.sub} (normalized slope {data['evidence']['slope']}, "
            f"residual {_fmt(data['evidence']['residual'])})"
        )
    lines.append(f"flow energy: {_fmt(data['flow_energy']) if data['flow_energy'] is not None else 'n/a'}")
    lines.append(f"searched {data['searched']} destabilizing sub-dimension vectors")
    return CommandResult("\n".join(lines) + "\n", data)


def _cmd_flow(args) -> CommandResult:
    setup = _load_setup(args.file)
    rep = _load_rep(args.rep, setup)
    result = flow(rep, normalize_alpha(setup), max_steps=args.max_steps, tol=args.tol)
    if args.trace:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "time", "energy", "grad_norm"])
        for i, ((t, f), g) in enumerate(zip(result.energy_trace, result.grad_norms)):
            w.writerow([i, _fmt(t), _fmt(f), _fmt(g)])
        Path(args.trace).write_text(buf.getvalue(), encoding="utf-8")
    if args.output:
        Path(args.output).write_text(serialize_representation(result.final), encoding="utf-8")
    data = {
        "schema_version": SCHEMA_VERSION,
        "converged": result.converged,
        "iterations": result.iterations,
        "initial_energy": _num(result.energy_trace[0][1]),
        "final_energy": _num(result.final_energy),
        "final_grad_norm": _num(result.grad_norms[-1]),
    }
    lines = [
        f"converged: {'yes' if result.converged else 'no'}",
        f"iterations: {data['iterations']}",
        f"initial energy: {_fmt(data['initial_energy'])}",
        f"final energy: {_fmt(data['final_energy'])}",
        f"final gradient norm: {_fmt(data['final_grad_norm'])}",
    ]
    return CommandResult("\n".join(lines) + "\n", data, 0 if result.converged else 1)


def _cmd_plant(args) -> CommandResult:
    setup = _load_setup(args.file)
    sub = _parse_subs(args.sub, setup) if args.sub else None
    rep = plant_instance(setup, sub, seed=args.seed)
    Path(args.output).write_text(serialize_representation(rep), encoding="utf-8")
    what = f"planted representation (sub {sub})" if sub is not None else "random representation"
    return CommandResult(f"wrote {what} to {args.output}\n", {"schema_version": SCHEMA_VERSION, "output": args.output})


_COMMANDS = {
    "gen": _cmd_gen,
    "slope": _cmd_slope,
    "destab": _cmd_destab,
    "dmin": _cmd_dmin,
    "homotopy": _cmd_homotopy,
    "stability": _cmd_stability,
    "flow": _cmd_flow,
    "plant": _cmd_plant,
}


def run(argv) -> CommandResult:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        return _COMMANDS[args.command](args)
    except _HelpShown:
        return CommandResult("", None, 0)
    except UsageError as exc:
        msg = str(exc).strip()
        return CommandResult((msg + "\n") if msg else parser.format_usage(), None, 2)
    except (QuiverError, OSError) as exc:
        return CommandResult(f"error: {exc}\n", None, 1)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    result = run(argv)
    as_json = "--json" in argv
    stream = sys.stdout if result.exit_code == 0 or result.data is not None else sys.stderr
    stream.write(result.render(as_json))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
