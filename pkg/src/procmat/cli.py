"""Command-line interface.

Subcommands: ``validate`` (check a process matrix), ``entropy`` (outcome
probabilities and Shannon report), ``game`` (guess-your-neighbour score),
``optimize`` (entropy maximization over the separable or Feix family).

Exit status: 0 on success, 1 when a validation check fails, 2 on usage or
file-parse errors.  Every output document embeds a run manifest (command,
config echo, library version, RNG generator and seed, wall-clock duration).
The environment variable ``PROCMAT_OUT_DIR`` sets the directory for default
output filenames.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .instruments import (
    gyni_strategy,
    instrument_from_pauli_maps,
    validate_instrument,
)
from .operators import from_pauli_map
from .optimizer import (
    GENERATOR_NAME,
    OBJECTIVES,
    OptimizerConfig,
    feix_maximize,
    multistart,
)
from .process import (
    FeixParams,
    InfeasibleParamsError,
    SepParams,
    as_process,
    feix_process,
    ocb_process,
    separable_from_params,
)
from .stats import (
    InputDist,
    cond_probs,
    entropies,
    game_success,
    joint_dist,
    joint_to_csv,
    table_to_csv,
)

CAUSAL_BOUND = 0.5


class FileFormatError(Exception):
    """An input file that cannot be parsed (exit status 2)."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise FileFormatError(f"cannot read {path}: no such file") from None
    except json.JSONDecodeError as err:
        raise FileFormatError(f"cannot parse {path}: {err}") from None


def _resolve_process(args):
    """Build the requested process matrix and an echo of how it was specified."""
    if getattr(args, "file", None):
        data = _load_json(args.file)
        if not isinstance(data, dict):
            raise FileFormatError(f"{args.file}: expected an object of Pauli coefficients")
        try:
            op = from_pauli_map(data)
        except ValueError as err:
            raise FileFormatError(f"{args.file}: {err}") from None
        return as_process(op), {"process": "file", "file": args.file}
    kind = getattr(args, "process", None)
    if kind == "ocb":
        return ocb_process(), {"process": "ocb"}
    if kind == "feix":
        params = FeixParams(args.q, args.eps)
        return feix_process(params), {"process": "feix", "q": args.q, "eps": args.eps}
    if kind == "sep":
        if args.params:
            data = _load_json(args.params)
            if not isinstance(data, dict):
                raise FileFormatError(f"{args.params}: expected an object of parameters")
            try:
                params = SepParams.from_flat_map(data)
            except ValueError as err:
                raise FileFormatError(f"{args.params}: {err}") from None
        else:
            params = SepParams.zeros()
        triple = separable_from_params(params)
        return triple.mixture, {"process": "sep", "params": args.params or "(zeros)"}
    raise FileFormatError("no process specified: pass ocb, feix, sep, or --file PATH")


def _resolve_instruments(args):
    if getattr(args, "instruments", None):
        data = _load_json(args.instruments)
        if not isinstance(data, dict):
            raise FileFormatError(f"{args.instruments}: expected an object with keys A and B")
        try:
            ins_a = instrument_from_pauli_maps(data["A"], "A")
            ins_b = instrument_from_pauli_maps(data["B"], "B")
        except KeyError as err:
            raise FileFormatError(f"{args.instruments}: missing party key {err}") from None
        except ValueError as err:
            raise FileFormatError(f"{args.instruments}: {err}") from None
        for ins in (ins_a, ins_b):
            report = validate_instrument(ins)
            if not report.valid:
                print(f"instrument {ins.party} failed validation:", file=sys.stderr)
                for line in report.lines():
                    print(line, file=sys.stderr)
                raise _ValidationFailure()
        return ins_a, ins_b, {"instruments": args.instruments}
    return gyni_strategy("A"), gyni_strategy("B"), {"instruments": "built-in"}


class _ValidationFailure(Exception):
    """A semantic validation failure (exit status 1)."""


def _resolve_inputs(args):
    if getattr(args, "inputs", None):
        data = _load_json(args.inputs)
        if isinstance(data, list):
            probs = np.asarray(data, dtype=float)
        elif isinstance(data, dict):
            probs = np.zeros((2, 2))
            for key, value in data.items():
                key = str(key)
                if len(key) != 2 or not key.isdigit():
                    raise FileFormatError(f"{args.inputs}: bad input key {key!r}")
                probs[int(key[0]), int(key[1])] = float(value)
        else:
            raise FileFormatError(f"{args.inputs}: expected a list or object")
        try:
            return InputDist(probs), {"inputs": args.inputs}
        except ValueError as err:
            raise FileFormatError(f"{args.inputs}: {err}") from None
    return InputDist.uniform(), {"inputs": "uniform"}


def _manifest(command: str, config: dict, started: float, seed=None) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": config,
        "rng": {"generator": GENERATOR_NAME if seed is not None else None, "seed": seed},
        "duration_s": round(time.time() - started, 3),
    }


def _print_manifest_text(manifest: dict):
    rng = manifest["rng"]
    rng_text = f"{rng['generator']} seed {rng['seed']}" if rng["seed"] is not None else "none"
    print(f"# procmat {manifest['version']}  command: {manifest['command']}  rng: {rng_text}")
    print(f"# config: {json.dumps(manifest['config'], sort_keys=True)}")


def _csv_comment_manifest(manifest: dict) -> str:
    return f"# manifest: {json.dumps(manifest, sort_keys=True)}\n"


def _g6(value: float) -> str:
    return f"{value:.6g}"


def _entropy_quantities(report) -> dict:
    return {
        "H_AB": report.h_ab,
        "H_A": report.h_a,
        "H_B": report.h_b,
        "H_A_given_B": report.h_a_given_b,
        "I_AB": report.i_ab,
    }


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    started = time.time()
    process, echo = _resolve_process(args)
    report = process.report
    manifest = _manifest("validate", echo, started)
    if args.format == "json":
        doc = {
            "manifest": manifest,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in report.checks
            ],
            "valid": report.valid,
        }
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        out = _csv_comment_manifest(manifest)
        out += "name,residual,tolerance,passed\n"
        for c in report.checks:
            out += f"{c.name},{c.residual!r},{c.tolerance!r},{c.passed}\n"
        print(out, end="")
    else:
        _print_manifest_text(manifest)
        for line in report.lines():
            print(line)
        print("valid" if report.valid else "INVALID")
    return 0 if report.valid else 1


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------


def cmd_entropy(args) -> int:
    started = time.time()
    process, echo = _resolve_process(args)
    ins_a, ins_b, ins_echo = _resolve_instruments(args)
    inputs, in_echo = _resolve_inputs(args)
    if not process.valid:
        print("process matrix failed validation:", file=sys.stderr)
        for line in process.report.lines():
            print(line, file=sys.stderr)
        return 1
    table = cond_probs(process, ins_a, ins_b)
    joint = joint_dist(table, inputs)
    quantities = _entropy_quantities(entropies(joint))
    manifest = _manifest("entropy", {**echo, **ins_echo, **in_echo}, started)
    if args.format == "json":
        doc = {
            "manifest": manifest,
            "cond_probs": {
                f"{a},{b},{x},{y}": table.probs[a, b, x, y]
                for a in range(table.shape[0])
                for b in range(table.shape[1])
                for x in range(table.shape[2])
                for y in range(table.shape[3])
            },
            "joint": {
                f"{a},{b}": joint[a, b]
                for a in range(joint.shape[0])
                for b in range(joint.shape[1])
            },
            "entropies": quantities,
        }
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        out = _csv_comment_manifest(manifest)
        out += "record,a,b,x,y,value\n"
        for line in table_to_csv(table).strip().splitlines()[1:]:
            a, b, x, y, p = line.split(",")
            out += f"cond,{a},{b},{x},{y},{p}\n"
        for line in joint_to_csv(joint).strip().splitlines()[1:]:
            a, b, p = line.split(",")
            out += f"joint,{a},{b},,,{p}\n"
        for name, value in quantities.items():
            out += f"entropy,{name},,,,{float(value)!r}\n"
        print(out, end="")
    else:
        _print_manifest_text(manifest)
        print("p(a,b|x,y):")
        for x in range(table.shape[2]):
            for y in range(table.shape[3]):
                cells = "  ".join(
                    f"p({a},{b})={_g6(table.probs[a, b, x, y])}"
                    for a in range(table.shape[0])
                    for b in range(table.shape[1])
                )
                print(f"  x={x} y={y}:  {cells}")
        print("p(a,b):")
        for a in range(joint.shape[0]):
            for b in range(joint.shape[1]):
                print(f"  p({a},{b}) = {_g6(joint[a, b])}")
        for name, value in quantities.items():
            print(f"{name} = {_g6(value)} bits")
    return 0


# ---------------------------------------------------------------------------
# game
# ---------------------------------------------------------------------------


def cmd_game(args) -> int:
    started = time.time()
    process, echo = _resolve_process(args)
    ins_a, ins_b, ins_echo = _resolve_instruments(args)
    if not process.valid:
        print("process matrix failed validation:", file=sys.stderr)
        for line in process.report.lines():
            print(line, file=sys.stderr)
        return 1
    table = cond_probs(process, ins_a, ins_b)
    score = game_success(table)
    violated = score > CAUSAL_BOUND + 1e-9
    manifest = _manifest("game", {**echo, **ins_echo}, started)
    if args.format == "json":
        doc = {
            "manifest": manifest,
            "p_succ": score,
            "bound": CAUSAL_BOUND,
            "violation": violated,
        }
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        out = _csv_comment_manifest(manifest)
        out += "p_succ,bound,violation\n"
        out += f"{score!r},{CAUSAL_BOUND!r},{violated}\n"
        print(out, end="")
    else:
        _print_manifest_text(manifest)
        print(f"p_succ = {_g6(score)}   (causal bound {CAUSAL_BOUND})")
        print("VIOLATION: exceeds the causal bound" if violated else "within the causal bound")
    return 0


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def _default_out_path(name: str) -> Path:
    base = os.environ.get("PROCMAT_OUT_DIR", ".")
    return Path(base) / name


def _objective_of_process(cfg: OptimizerConfig, process) -> float:
    table = cond_probs(process, cfg.instrument_a, cfg.instrument_b)
    report = entropies(joint_dist(table, cfg.inputs))
    return _entropy_quantities(report)[cfg.objective]


def cmd_optimize(args) -> int:
    started = time.time()
    ins_a, ins_b, ins_echo = _resolve_instruments(args)
    inputs, in_echo = _resolve_inputs(args)
    cfg = OptimizerConfig(
        restarts=args.restarts,
        sweep_tol=args.tol,
        seed=args.seed,
        objective=args.objective,
        instrument_a=ins_a,
        instrument_b=ins_b,
        inputs=inputs,
        record_trace=bool(args.trace),
    )
    reference = _objective_of_process(cfg, ocb_process())
    config_echo = {
        "mode": args.mode,
        "restarts": cfg.restarts,
        "sweep_tol": cfg.sweep_tol,
        "max_sweeps": cfg.max_sweeps,
        "line_tol": cfg.line_tol,
        "psd_tol": cfg.psd_tol,
        "objective": cfg.objective,
        "jobs": args.jobs,
        **ins_echo,
        **in_echo,
    }

    if args.mode == "sep":
        result = multistart(cfg, jobs=args.jobs)
        best_value = result.best_value
        verdict = (
            "inequality satisfied" if reference > best_value else "inequality not satisfied"
        )
        manifest = _manifest("optimize", config_echo, started, seed=cfg.seed)
        doc = {
            "manifest": manifest,
            "best_value": best_value,
            "best_restart": result.best_restart,
            "reference": {"process": "ocb", "objective": cfg.objective, "value": reference},
            "verdict": verdict,
            "best_params": result.best_params.to_flat_map(),
            "restarts": [
                {"restart": r.restart, "seed": r.seed, "value": r.value, "sweeps": r.sweeps}
                for r in result.records
            ],
        }
        if args.trace and result.traces is not None:
            with open(args.trace, "w") as fh:
                fh.write("restart,sweep,objective\n")
                for r, trace in enumerate(result.traces):
                    for s, value in enumerate(trace):
                        fh.write(f"{r},{s},{value!r}\n")
    else:
        params, best_value = feix_maximize(cfg)
        # every point of the eps = 0 slice is causally separable with the same
        # non-signalling part, so the slice maximum lower-bounds the separable
        # maximum the inequality compares against
        sep_floor = max(
            _objective_of_process(cfg, feix_process(FeixParams(q, 0.0)))
            for q in np.linspace(0.0, 1.0, 101)
        )
        if args.sep_max is not None:
            verdict = (
                "inequality satisfied" if best_value > args.sep_max else "inequality not satisfied"
            )
        elif params.eps <= 1e-9 or best_value <= sep_floor + 1e-12:
            verdict = "inequality not satisfied"
        else:
            verdict = "undetermined (supply --sep-max from an optimize sep run)"
        manifest = _manifest("optimize", config_echo, started, seed=cfg.seed)
        doc = {
            "manifest": manifest,
            "best_value": best_value,
            "best_params": {"q": params.q, "eps": params.eps},
            "reference": {"process": "ocb", "objective": cfg.objective, "value": reference},
            "separable_floor": sep_floor,
            "verdict": verdict,
        }

    out_path = Path(args.out) if args.out else _default_out_path(f"optimize_{args.mode}.json")
    with open(out_path, "w") as fh:
        json.dump(doc, fh, indent=2)

    if args.format == "json":
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        out = _csv_comment_manifest(doc["manifest"])
        if args.mode == "sep":
            out += "restart,seed,value,sweeps\n"
            for r in doc["restarts"]:
                out += f"{r['restart']},{r['seed']},{r['value']!r},{r['sweeps']}\n"
            out += f"# best_value: {best_value!r}  reference: {reference!r}  verdict: {verdict}\n"
        else:
            out += "q,eps,value\n"
            out += f"{doc['best_params']['q']!r},{doc['best_params']['eps']!r},{best_value!r}\n"
            out += f"# verdict: {verdict}\n"
        print(out, end="")
    else:
        _print_manifest_text(doc["manifest"])
        print(f"best {cfg.objective} over {args.mode} family = {_g6(best_value)} bits")
        print(f"reference {cfg.objective} (ocb process) = {_g6(reference)} bits")
        print(f"verdict: {verdict}")
        print(f"result written to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_process_arguments(sub):
    sub.add_argument(
        "process",
        nargs="?",
        choices=["ocb", "feix", "sep"],
        help="built-in process family",
    )
    sub.add_argument("--file", help="Pauli-coefficient JSON file for an arbitrary process")
    sub.add_argument("--q", type=float, default=0.5, help="feix mixing weight")
    sub.add_argument("--eps", type=float, default=0.0, help="feix offset")
    sub.add_argument("--params", help="separable-parameter JSON file (default: zeros)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procmat",
        description="Two-party process-matrix toolkit",
    )
    parser.add_argument("--version", action="version", version=f"procmat {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="check process-matrix validity")
    _add_process_arguments(validate)
    validate.add_argument("--format", choices=["text", "json", "csv"], default="text")
    validate.set_defaults(handler=cmd_validate)

    entropy = commands.add_parser("entropy", help="outcome probabilities and entropies")
    _add_process_arguments(entropy)
    entropy.add_argument("--format", choices=["text", "json", "csv"], default="text")
    entropy.add_argument("--instruments", help="instrument JSON file with keys A and B")
    entropy.add_argument("--inputs", help="input-distribution JSON file (default uniform)")
    entropy.set_defaults(handler=cmd_entropy)

    game = commands.add_parser("game", help="guess-your-neighbour game score")
    _add_process_arguments(game)
    game.add_argument("--format", choices=["text", "json", "csv"], default="text")
    game.add_argument("--instruments", help="instrument JSON file with keys A and B")
    game.set_defaults(handler=cmd_game)

    optimize = commands.add_parser("optimize", help="maximize an entropy objective")
    optimize.add_argument("mode", choices=["sep", "feix"])
    optimize.add_argument("--restarts", type=int, default=100)
    optimize.add_argument("--seed", type=int, default=OptimizerConfig().seed)
    optimize.add_argument("--tol", type=float, default=1e-6, help="sweep termination tolerance")
    optimize.add_argument("--objective", choices=list(OBJECTIVES), default="H_AB")
    optimize.add_argument("--jobs", type=int, default=1, help="parallel restart processes")
    optimize.add_argument("--out", help="result JSON path (default optimize_<mode>.json)")
    optimize.add_argument("--trace", help="per-sweep objective CSV path")
    optimize.add_argument(
        "--sep-max",
        type=float,
        default=None,
        help="separable maximum to compare against in feix mode",
    )
    optimize.add_argument("--format", choices=["text", "json", "csv"], default="text")
    optimize.add_argument("--instruments", help="instrument JSON file with keys A and B")
    optimize.add_argument("--inputs", help="input-distribution JSON file (default uniform)")
    optimize.set_defaults(handler=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FileFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except _ValidationFailure:
        return 1
    except InfeasibleParamsError as err:
        print(f"validation failure: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
