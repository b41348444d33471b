"""Command-line entry point for batch runs and for launching the local service.

Subcommands
-----------
validate    parse a machine (builtin name or file) and check well-formedness
target      run one egg search at fixed weights and report the certified bound
opt         alternate search and weight optimization over a ladder of targets
ovi         single search that reweights itself mid-flight every few levels
growth      exact ball sizes of the generated group by brute enumeration
superpoly   structural report backing the stronger growth-exponent bound
export-dot  DOT rendering of the machine (or of its dual)
serve       start the local HTTP session service
bound       print the growth exponent implied by a contraction ratio

Exit codes: 0 when the requested certificate was found (or the check
passed), 2 when the run ended inconclusively (radius or word cap hit,
or a structural check could not be completed), 1 on errors.

JSON output (``--json``) follows the run-result schema from `formats`:
machine, aux, weights, target, status, eta, alpha, radius, egg_size,
per_level_sizes, count_matrix_ref, seed, versions.  The same flags and
seed always produce byte-identical JSON.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .formats import (
    MachineError,
    builtin,
    builtin_blocks,
    builtin_names,
    discover_blocks,
    export_dot,
    format_automaton,
    parse_automaton,
)
from .machine import MealyMachine, dual, validate
from .optimize import OptOptions
from .search import SearchCaps, alpha_from, normalize_weights, search_egg
from .strategies import run_opt, run_ovi
from .superpoly import superpoly_report
from .growth import growth
from .words import AuxiliaryGroup

WORKDIR_ENV = "MEALYBOUND_WORKDIR"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _load_machine(ref: str) -> tuple[MealyMachine, str | None]:
    """Resolve a machine reference to (machine, builtin_name_or_None).

    A reference is either a builtin zoo name or a path to a text file in
    the automaton format.
    """
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as fh:
            m = parse_automaton(fh.read())
        return m, None
    if ref in builtin_names():
        return builtin(ref), ref
    raise CliError(
        f"unknown machine {ref!r}: not a file and not one of {', '.join(builtin_names())}"
    )


def _resolve_aux(m: MealyMachine, name: str | None, blocks_arg: str | None) -> tuple[AuxiliaryGroup, dict]:
    """Build the auxiliary cover group and a JSON-able description of it.

    ``blocks_arg`` accepts ``free`` (free cover), or block declarations like
    ``a;b,c,d`` (blocks separated by ``;``, member states by ``,``).  With no
    argument, builtins use their curated blocks and file machines fall back
    to blocks discovered from the machine's own action.
    """
    if blocks_arg == "free":
        return AuxiliaryGroup.free_group(m), {"kind": "free"}
    if blocks_arg:
        blocks = [part.split(",") for part in blocks_arg.split(";") if part]
        blocks = [[s.strip() for s in block if s.strip()] for block in blocks]
        return AuxiliaryGroup.free_product(m, blocks), {"kind": "free_product", "blocks": blocks}
    if name is not None:
        blocks = builtin_blocks(name)
        if blocks is not None:
            return AuxiliaryGroup.free_product(m, blocks), {
                "kind": "free_product",
                "blocks": [list(b) for b in blocks],
            }
    blocks = discover_blocks(m)
    return AuxiliaryGroup.free_product(m, blocks), {
        "kind": "free_product",
        "blocks": [list(b) for b in blocks],
    }


def _parse_weights(arg: str, k: int) -> list[float]:
    """Parse ``uniform`` or a comma-separated vector; normalize to sum 1."""
    if arg == "uniform":
        return [1.0 / k] * k
    try:
        raw = [float(x) for x in arg.split(",")]
    except ValueError as exc:
        raise CliError(f"bad weight vector {arg!r}: {exc}") from None
    if len(raw) != k:
        raise CliError(f"expected {k} weights (one per generator), got {len(raw)}")
    normalized = normalize_weights(raw)
    if any(abs(a - b) > 1e-12 for a, b in zip(raw, normalized)):
        print(f"note: weights normalized to {_fmt_vec(normalized)}", file=sys.stderr)
    return normalized


def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"


def _machine_text(m: MealyMachine, name: str | None) -> str:
    return name if name is not None else format_automaton(m)


def _caps(args) -> SearchCaps:
    return SearchCaps(max_radius=args.radius_cap, max_words=args.max_words)


def _status_exit(status: str) -> int:
    return EXIT_OK if status == "found" else EXIT_INCONCLUSIVE


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args) -> int:
    m, name = _load_machine(args.machine)
    validate(m)
    gens = [m.states[i] for i in m.generators()]
    if args.json:
        _emit(
            {
                "machine": _machine_text(m, name),
                "states": list(m.states),
                "letters": list(m.letters),
                "degree": m.degree,
                "generators": gens,
                "valid": True,
            }
        )
    else:
        label = name or "machine"
        print(
            f"{label}: ok ({m.n_states} states, degree {m.degree}, "
            f"generators {', '.join(gens)})"
        )
    return EXIT_OK


def _cmd_target(args) -> int:
    m, name = _load_machine(args.machine)
    aux, aux_desc = _resolve_aux(m, name, args.aux_blocks)
    weights = _parse_weights(args.weights, len(m.generators()))
    res, _eng = search_egg(
        m, aux, weights, args.target,
        dedup=args.dedup, caps=_caps(args), workers=args.workers,
    )
    if args.json:
        _emit(res.to_json_dict(machine_text=_machine_text(m, name), aux=aux_desc))
    else:
        alpha = "-" if res.alpha is None else f"{res.alpha:.6f}"
        print(
            f"status {res.status}  radius {res.radius}  egg {res.egg_size}  "
            f"eta {res.eta:.6f}  alpha {alpha}"
        )
    return _status_exit(res.status)


def _opt_options(args) -> OptOptions:
    return OptOptions(seed=args.opt_seed, restarts=args.restarts)


def _strategy_json(run, m, name, aux_desc, seed) -> dict:
    res = run.final.result
    payload = res.to_json_dict(
        machine_text=_machine_text(m, name), aux=aux_desc, seed=seed
    )
    payload["strategy"] = run.kind
    payload["rounds"] = [
        {
            "target": r.target,
            "status": r.status,
            "eta": r.eta,
            "alpha": r.alpha,
            "radius": r.radius,
            "egg_size": r.egg_size,
            "weights_in": list(r.weights_in),
            "weights_out": list(r.weights_out),
        }
        for r in run.rounds
    ]
    return payload


def _print_rounds(run) -> None:
    for i, r in enumerate(run.rounds, 1):
        alpha = "-" if r.alpha is None else f"{r.alpha:.6f}"
        print(
            f"round {i}: target {r.target:g}  status {r.status}  "
            f"radius {r.radius}  egg {r.egg_size}  eta {r.eta:.6f}  "
            f"alpha {alpha}  weights {_fmt_vec(r.weights_out)}"
        )


def _cmd_opt(args) -> int:
    m, name = _load_machine(args.machine)
    aux, aux_desc = _resolve_aux(m, name, args.aux_blocks)
    weights = _parse_weights(args.weights, len(m.generators()))
    targets = [float(t) for t in args.targets.split(",") if t]
    if not targets:
        raise CliError("--targets needs at least one value")
    run = run_opt(
        m, aux, weights, targets,
        update=args.update, caps=_caps(args),
        opt_options=_opt_options(args), dedup=args.dedup, workers=args.workers,
    )
    if args.json:
        _emit(_strategy_json(run, m, name, aux_desc, args.opt_seed))
    else:
        _print_rounds(run)
    return _status_exit(run.final.status)


def _cmd_ovi(args) -> int:
    m, name = _load_machine(args.machine)
    aux, aux_desc = _resolve_aux(m, name, args.aux_blocks)
    weights = _parse_weights(args.weights, len(m.generators()))
    run = run_ovi(
        m, aux, weights, args.target,
        update=args.update, caps=_caps(args),
        opt_options=_opt_options(args), dedup=args.dedup, workers=args.workers,
    )
    if args.json:
        _emit(_strategy_json(run, m, name, aux_desc, args.opt_seed))
    else:
        _print_rounds(run)
    return _status_exit(run.final.status)


def _cmd_growth(args) -> int:
    m, name = _load_machine(args.machine)
    rep = growth(m, args.maxlen)
    if args.json:
        _emit({"machine": _machine_text(m, name), **rep})
    else:
        print("gamma:", " ".join(str(x) for x in rep["gamma"]))
        if not rep["complete"]:
            print(f"note: ball cap reached at length {rep['l_reached']}")
    return EXIT_OK if rep["complete"] else EXIT_INCONCLUSIVE


def _cmd_superpoly(args) -> int:
    m, name = _load_machine(args.machine)
    if args.blocks:
        blocks = [part.split(",") for part in args.blocks.split(";") if part]
        blocks = [[s.strip() for s in b if s.strip()] for b in blocks]
    else:
        blocks = builtin_blocks(name) if name else None
        if blocks is None:
            blocks = discover_blocks(m)
    rep = superpoly_report(m, blocks, max_len=args.maxlen, eta=args.eta)
    if args.json:
        _emit({"machine": _machine_text(m, name), **rep})
    else:
        for key in ("partition", "section_contraction", "first_section_surjective"):
            print(f"{key}: {rep[key]['status']}")
        print(f"verdict: {rep['verdict']}")
        print(f"note: {rep['note']}")
    return EXIT_OK if rep["verdict"] == "consistent" else EXIT_INCONCLUSIVE


def _cmd_export_dot(args) -> int:
    m, name = _load_machine(args.machine)
    target = dual(m) if args.dual else m
    mode = "schreier" if args.schreier else "diagram"
    text = export_dot(target, mode=mode)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    workdir = args.workdir or os.environ.get(WORKDIR_ENV)
    serve(host=args.host, port=args.port, workdir=workdir)
    return EXIT_OK


def _cmd_bound(args) -> int:
    alpha = alpha_from(args.eta, args.d)
    if alpha is None:
        raise CliError(f"eta {args.eta} exceeds 1: no growth bound follows")
    if args.json:
        _emit({"eta": args.eta, "d": args.d, "alpha": alpha})
    else:
        print(f"alpha {alpha:.6f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_machine(p) -> None:
    p.add_argument("machine", help="builtin zoo name or path to an automaton text file")


def _add_search_common(p) -> None:
    p.add_argument("--weights", default="uniform", help="'uniform' or comma-separated values (normalized on ingest)")
    p.add_argument("--radius-cap", type=int, default=256, help="stop inconclusively beyond this syllable radius")
    p.add_argument("--max-words", type=int, default=None, help="abort when the pending frontier exceeds this many words")
    p.add_argument("--aux-blocks", default=None, help="'free' or block spec like 'a;b,c,d' (default: curated/discovered blocks)")
    p.add_argument("--dedup", choices=("global", "level", "none"), default="global")
    p.add_argument("--workers", type=int, default=1, help="search parallelism (results are independent of this)")
    p.add_argument("--json", action="store_true", help="emit the run-result JSON schema on stdout")


def _add_opt_common(p) -> None:
    p.add_argument("--update", type=int, default=None, help="reweight mid-search every this many levels")
    p.add_argument("--opt-seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=16)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mealybound",
        description="Certified subexponential growth bounds for automaton groups.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a machine definition")
    _add_machine(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("target", help="egg search at fixed weights")
    _add_machine(p)
    _add_search_common(p)
    p.add_argument("--target", type=float, required=True, help="contraction ratio the shell must certify")
    p.set_defaults(fn=_cmd_target)

    p = sub.add_parser("opt", help="search/optimize rounds over a target ladder")
    _add_machine(p)
    _add_search_common(p)
    p.add_argument("--targets", required=True, help="comma-separated decreasing targets")
    _add_opt_common(p)
    p.set_defaults(fn=_cmd_opt)

    p = sub.add_parser("ovi", help="single search with mid-flight reweighting")
    _add_machine(p)
    _add_search_common(p)
    p.add_argument("--target", type=float, required=True)
    _add_opt_common(p)
    p.set_defaults(fn=_cmd_ovi)

    p = sub.add_parser("growth", help="exact ball sizes of the generated group")
    _add_machine(p)
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_growth)

    p = sub.add_parser("superpoly", help="structural report for the stronger exponent bound")
    _add_machine(p)
    p.add_argument("--blocks", default=None, help="block spec like 'a;b,c,d'")
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_superpoly)

    p = sub.add_parser("export-dot", help="DOT rendering of the machine")
    _add_machine(p)
    p.add_argument("--dual", action="store_true", help="render the dual machine instead")
    p.add_argument("--schreier", action="store_true", help="render the first-level action graph instead of the state diagram")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_export_dot)

    p = sub.add_parser("serve", help="start the local HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--workdir", default=None, help=f"session directory (default ${WORKDIR_ENV} or a temp dir)")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("bound", help="growth exponent implied by a contraction ratio")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--d", type=int, required=True, help="alphabet size of the machine the ratio was certified on")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_bound)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, MachineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
