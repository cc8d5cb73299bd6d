"""Command line surface.

Every command loads its operands from the text formats in `io`, runs one
operation, and prints a single JSON report to stdout: command name, sha256
digests of the inputs, the effective config (every tolerance and seed), the
result payload, and elapsed milliseconds. Results are deterministic given
flags; elapsed time is the only varying field and sits outside `result`.

Exit codes: 0 ok, 1 selftest failure, 2 file/parse error, 3 validation
error, 4 infeasible decomposition, 5 not a symmetry.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import io as qio
from .errors import (
    FileFormatError,
    InfeasibleError,
    NotASymmetryError,
    ValidationError,
)
from .measure import MeasureConfig, example_measure, is_compatible, measure_symmetric
from .selftest import payload as selftest_payload
from .selftest import run_criteria
from .states import (
    DEFAULT_EPS_MEM,
    DEFAULT_EPS_RANK,
    pure_state,
    subspace_intersection_dim,
    support,
    validate_density,
    validate_effect,
)
from .strength import strength, strength_oracle
from .symmetry import apply_symmetry, verify_theorem, wigner_reconstruct

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_NOT_A_SYMMETRY = 5


def _default_seed() -> int:
    raw = os.environ.get("QCOMPAT_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"QCOMPAT_SEED must be an integer, got {raw!r}") from exc


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 3 or 2..6, got {text!r}")
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"dims range {text!r} is empty or negative")
    return lo, hi


def _digest(path) -> str:
    try:
        data = open(path, "rb").read()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    return hashlib.sha256(data).hexdigest()


def _inputs(**paths) -> dict:
    return {label: {"path": str(p), "sha256": _digest(p)} for label, p in paths.items()}


def _certificate(res) -> dict | None:
    if res.decomposition_a is None:
        return None
    return {
        "weights_a": [float(w) for w in res.decomposition_a.weights],
        "weights_b": [float(w) for w in res.decomposition_b.weights],
        "vectors": [qio.vector_payload(p.vector) for p in res.decomposition_a.pures],
    }


def _cmd_strength(args):
    inputs = _inputs(state=args.state, vector=args.vector)
    eff = validate_effect(qio.load_matrix(args.state), eps_rank=args.tol_rank)
    phi = pure_state(qio.load_vector(args.vector))
    config = {"tol_rank": args.tol_rank, "tol_mem": args.tol_mem, "oracle": bool(args.oracle)}
    res = strength(eff, phi, eps_mem=args.tol_mem)
    result = {
        "value": res.value,
        "in_range": res.in_range,
        "near_boundary": res.near_boundary,
    }
    if args.oracle:
        oracle = strength_oracle(eff, phi)
        result["oracle"] = oracle
        result["difference"] = abs(res.value - oracle)
    return inputs, config, result, EXIT_OK


def _cmd_compat(args):
    inputs = _inputs(a=args.a, b=args.b)
    a = validate_density(qio.load_matrix(args.a), eps_rank=args.tol_rank)
    b = validate_density(qio.load_matrix(args.b), eps_rank=args.tol_rank)
    config = {"tol_rank": args.tol_rank}
    result = {
        "compatible": is_compatible(a, b, eps_rank=args.tol_rank),
        "intersection_dim": subspace_intersection_dim(support(a), support(b), args.tol_rank),
    }
    return inputs, config, result, EXIT_OK


def _cmd_measure(args):
    inputs = _inputs(a=args.a, b=args.b)
    a = validate_density(qio.load_matrix(args.a))
    b = validate_density(qio.load_matrix(args.b))
    cfg = MeasureConfig(
        components=args.components,
        restarts=args.restarts,
        seed=args.seed,
        feas_tol=args.feas_tol,
    )
    config = {
        "components": cfg.components,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "feas_tol": cfg.feas_tol,
        "symmetric": bool(args.symmetric),
    }
    runner = measure_symmetric if args.symmetric else example_measure
    res = runner(a, b, cfg)
    result = {
        "value": float(res.value),
        "residual": float(res.residual),
        "restarts_used": int(res.restarts_used),
        "components": int(res.components),
        "certificate": _certificate(res),
    }
    return inputs, config, result, EXIT_OK


def _cmd_reconstruct(args):
    inputs = _inputs(map=args.map)
    pmap = qio.load_map(args.map)
    config = {"tol": args.tol}
    sym = wigner_reconstruct(pmap, tol=args.tol)
    result = {"antiunitary": bool(sym.antiunitary), "u": qio.matrix_payload(sym.u)}
    return inputs, config, result, EXIT_OK


def _cmd_verify(args):
    if args.symmetry is not None:
        inputs = _inputs(symmetry=args.symmetry)
        sym = qio.load_symmetry(args.symmetry)
        dim = sym.u.shape[0]
        transform = lambda st, s=sym: apply_symmetry(s, st)  # noqa: E731
    else:
        inputs = _inputs(map=args.map)
        sym0 = wigner_reconstruct(qio.load_map(args.map), tol=args.tol)
        dim = sym0.u.shape[0]
        transform = lambda st, s=sym0: apply_symmetry(s, st)  # noqa: E731
    config = {"n_mixed": args.n_mixed, "seed": args.seed, "tol": args.tol}
    res = verify_theorem(transform, dim, n_mixed=args.n_mixed, seed=args.seed, tol=args.tol)
    result = {
        "verdict": bool(res.verdict),
        "max_error": float(res.max_error),
        "n_states": int(res.n_states),
        "failures": list(res.failures),
        "symmetry": {
            "antiunitary": bool(res.symmetry.antiunitary),
            "u": qio.matrix_payload(res.symmetry.u),
        },
    }
    return inputs, config, result, EXIT_OK


def _cmd_selftest(args):
    config = {
        "seed": args.seed,
        "dims": None if args.dims is None else f"{args.dims[0]}..{args.dims[1]}",
        "quick": bool(args.quick),
    }
    outcomes = run_criteria(seed=args.seed, dims_cap=args.dims, quick=args.quick)
    for o in outcomes:
        marker = "PASS" if o.passed else "FAIL"
        print(f"[{marker}] {o.ident}: {o.detail}", file=sys.stderr)
    result = selftest_payload(outcomes)
    code = EXIT_OK if result["all_passed"] else EXIT_SELFTEST
    return {}, config, result, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcompat",
        description="State compatibility toolkit: strength, joint decompositions, symmetry reconstruction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("strength", help="largest weight of a ray inside an effect")
    p.add_argument("--state", required=True, help="effect or density matrix file")
    p.add_argument("--vector", required=True, help="unit vector file")
    p.add_argument("--tol-rank", type=float, default=DEFAULT_EPS_RANK)
    p.add_argument("--tol-mem", type=float, default=DEFAULT_EPS_MEM)
    p.add_argument("--oracle", action="store_true", help="also run the bisection cross-check")
    p.set_defaults(fn=_cmd_strength)

    p = sub.add_parser("compat", help="support intersection test for two states")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tol-rank", type=float, default=DEFAULT_EPS_RANK)
    p.set_defaults(fn=_cmd_compat)

    p = sub.add_parser("measure", help="joint decomposition overlap measure")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--restarts", type=int, default=MeasureConfig().restarts)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--feas-tol", type=float, default=MeasureConfig().feas_tol)
    p.add_argument("--symmetric", action="store_true", help="run both argument orders")
    p.set_defaults(fn=_cmd_measure)

    p = sub.add_parser("reconstruct", help="rebuild the operator behind a pure-state map")
    p.add_argument("--map", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("verify", help="check a stored symmetry or map end to end")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--symmetry")
    group.add_argument("--map")
    p.add_argument("--n-mixed", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("selftest", help="run the built-in acceptance criteria")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dims", type=_parse_dims, default=None, help="restrict dimensions, e.g. 2..6")
    p.add_argument("--quick", action="store_true", help="reduced batch sizes")
    p.set_defaults(fn=_cmd_selftest)
    return parser


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        inputs, config, result, code = args.fn(args)
    except (FileFormatError, OSError) as exc:
        _emit({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_IO
    except NotASymmetryError as exc:
        _emit(
            {
                "command": args.command,
                "error": {
                    "type": type(exc).__name__,
                    "message": str(exc),
                    "probe": exc.probe,
                },
            }
        )
        return EXIT_NOT_A_SYMMETRY
    except InfeasibleError as exc:
        _emit({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        _emit({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_VALIDATION
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    _emit(
        {
            "command": args.command,
            "inputs": inputs,
            "config": config,
            "result": result,
            "elapsed_ms": elapsed_ms,
        }
    )
    return code


if __name__ == "__main__":
    raise SystemExit(main())
