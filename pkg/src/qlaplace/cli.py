"""Command-line front-end: ``qlaplace synthesize|verify|scaling|demo``.

Exit codes: 0 success, 1 verification failed, 2 usage or schema error,
3 resource refusal (simulation or construction too large).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np
import yaml

from . import apps
from .circuit.qasm import to_qasm
from .circuit.simulate import SimulationTooLarge
from .demos import DEMO_NAMES, run_demo
from .numerics import SeriesKind
from .qlt import (
    QltProblem,
    build_qlt,
    plan_series,
    random_problem,
    resource_report,
    verify_qlt,
)
from .schemas import CONFIG_SCHEMAS, DEMO_REPORT_SCHEMA, REPORT_SCHEMA

log = logging.getLogger("qlaplace")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3
# construction is dense in 2^n multiplexor angles; beyond this it is slow
MAX_BUILD_N = 12
CSV_FIELDS = (
    "n",
    "eps",
    "K",
    "terms",
    "size",
    "depth",
    "overhead_size",
    "overhead_depth",
    "qubits",
    "controlled_diagonal_invocations",
    "size_per_Kn",
    "depth_per_Klogn",
    "overhead_size_per_Kn",
    "overhead_depth_per_Klogn",
)


class ConfigError(ValueError):
    """Config failed schema validation or semantic checks."""


class ResourceRefusal(RuntimeError):
    pass


# config handling


def load_config(path: str | Path | None, command: str) -> dict:
    if path is None:
        if command in ("demo",):
            return {}
        raise ConfigError(f"{command} needs --config")
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return validate_config(data if data is not None else {}, command)


def validate_config(data: dict, command: str) -> dict:
    schema = CONFIG_SCHEMAS[command]
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config field '{where}': {err.message}")
    return data


def _to_complex(values: Sequence) -> np.ndarray:
    try:
        return np.array([complex(str(v).replace(" ", "")) if isinstance(v, str) else complex(v) for v in values])
    except ValueError as exc:
        raise ConfigError(f"bad complex literal: {exc}") from exc


def problem_from_config(cfg: dict, seed: int) -> QltProblem:
    kind = SeriesKind(cfg.get("kind", "taylor"))
    eps = float(cfg["eps"])
    if "random" in cfg:
        r = cfg["random"]
        _check_build_size(r["n"])
        p = random_problem(
            r["n"], eps, kind, seed=seed, complex_values=r.get("complex", False), bound=r.get("bound", 1.0)
        )
        x, y = p.x, p.y
    else:
        x, y = _to_complex(cfg["x"]), _to_complex(cfg["y"])
    try:
        p = QltProblem(x, y, eps, kind, cfg.get("K_override"))
    except ValueError as exc:
        raise ConfigError(f"config field 'problem': {exc}") from exc
    _check_build_size(p.n)
    return p


def _check_build_size(n: int) -> None:
    if n > MAX_BUILD_N:
        raise ResourceRefusal(f"n={n} exceeds the construction limit {MAX_BUILD_N}")


def laplace_from_config(cfg: dict) -> apps.ContinuousProblem:
    f = np.asarray(cfg["f_values"], dtype=float)
    N = f.shape[0]
    if N & (N - 1):
        raise ConfigError(f"config field 'laplace/f_values': length {N} is not a power of two")
    if "t_grid" in cfg:
        t = np.asarray(cfg["t_grid"], dtype=float)
        if t.shape[0] != N:
            raise ConfigError("config field 'laplace/t_grid': length differs from f_values")
        dt = t[1] - t[0] if N > 1 else 0.0
        if abs(t[0]) > 1e-12 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
            raise ConfigError("config field 'laplace/t_grid': must be the uniform grid t_i = i*M/N")
        M = dt * N
    else:
        M = float(cfg["M"])
    try:
        return apps.ContinuousProblem(
            n=N.bit_length() - 1,
            eps=float(cfg["eps"]),
            k=float(cfg["k"]),
            a=float(cfg["a"]),
            t0=float(cfg.get("t0", 0.0)),
            f_values=f,
            z_points=_to_complex(cfg["z_points"]),
            M=M,
            kind=SeriesKind(cfg.get("kind", "taylor")),
        )
    except ValueError as exc:
        raise ConfigError(f"config field 'laplace': {exc}") from exc


# output helpers


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    log.info("wrote %s", path)
    return path


def _write_csv(out: Path, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    log.info("wrote %s", path)
    return path


def _write_report(out: Path, report: dict, fmt: str, schema: dict = REPORT_SCHEMA) -> None:
    jsonschema.validate(json.loads(dump_json(report)), schema)
    _write(out, "report.json", dump_json(report))
    _write(out, "report.schema.json", dump_json(schema))
    if fmt == "csv":
        flat = [(k, v) for k, v in sorted(report.items()) if isinstance(v, (int, float, str, bool)) or v is None]
        _write_csv(out, "report.csv", ("key", "value"), flat)


def _qlt_outputs(p: QltProblem, seed: int, command: str, model: str):
    plan = plan_series(p)
    be = build_qlt(p, plan)
    res = resource_report(be, plan, model=model).to_dict()
    report = {"command": command, "problem": "qlt", "seed": seed, **res}
    meta = {"alpha": be.alpha, "eps": be.eps, "K": plan.K, "kind": plan.kind.value, "terms": plan.terms}
    return be, report, to_qasm(be.circuit, meta)


# commands


def cmd_synthesize(cfg: dict, out: Path, seed: int, fmt: str) -> int:
    p = problem_from_config(cfg["problem"], seed)
    _, report, qasm = _qlt_outputs(p, seed, "synthesize", cfg.get("cost_model", "ir"))
    _write(out, "circuit.qasm", qasm)
    _write_report(out, report, fmt)
    return EXIT_OK


def cmd_verify(cfg: dict, out: Path, seed: int, fmt: str) -> int:
    simulate = cfg.get("simulate", True)
    model = cfg.get("cost_model", "ir")
    if "laplace" in cfg:
        return _verify_laplace(laplace_from_config(cfg["laplace"]), out, seed, fmt, simulate)
    p = problem_from_config(cfg["problem"], seed)
    be, report, qasm = _qlt_outputs(p, seed, "verify", model)
    report.update(measured_error=None, passed=None, success_probability=None)
    if simulate:
        result = verify_qlt(p, be)
        if "state" in cfg:
            psi = _to_complex(cfg["state"])
            if psi.shape[0] != p.N:
                raise ConfigError(f"config field 'state': needs {p.N} amplitudes")
            psi = psi / np.linalg.norm(psi)
        else:
            psi = np.full(p.N, 1.0 / math.sqrt(p.N))
        report.update(
            measured_error=result.measured_error,
            passed=result.passed,
            success_probability=apps.success_probability(be, psi),
        )
    _write(out, "circuit.qasm", qasm)
    _write_report(out, report, fmt)
    return EXIT_OK if report["passed"] in (True, None) else EXIT_FAIL


def _verify_laplace(p: apps.ContinuousProblem, out: Path, seed: int, fmt: str, simulate: bool) -> int:
    if not simulate:
        raise ConfigError("config field 'simulate': the laplace pipeline always simulates")
    r = apps.prepare_laplace_state(p)
    res = dict(r.resources) if r.resources else {}
    if r.empty:
        res = {"kind": p.kind.value, "alpha": 1.0, "eps": p.eps, "K": 0, "size": 0, "depth": 0,
               "total_qubits": p.n, "registers": {"system": p.n}, "controlled_diagonal_invocations": 0}
    passed = r.qlt_state_error <= r.qlt_state_budget + 1e-12
    laplace = r.to_dict()
    laplace.pop("resources")
    report = {
        "command": "verify",
        "problem": "laplace",
        "seed": seed,
        **res,
        "measured_error": r.qlt_state_error,
        "passed": passed,
        "success_probability": r.success_probability,
        "laplace": laplace,
    }
    _write_report(out, report, fmt)
    return EXIT_OK if passed else EXIT_FAIL


def scaling_rows(cfg: dict, seed: int) -> list[dict]:
    kind = SeriesKind(cfg.get("kind", "taylor"))
    model = cfg.get("cost_model", "ir")
    rows = []
    for n in cfg["n"]:
        _check_build_size(n)
        for eps in cfg["eps"]:
            p = random_problem(n, eps, kind, seed=seed, bound=cfg.get("bound", 1.0))
            plan = plan_series(p)
            be = build_qlt(p, plan)
            r = resource_report(be, plan, model=model)
            Kn = max(plan.K, 1) * n
            Klog = max(plan.K, 1) * max(1, math.ceil(math.log2(n)))
            rows.append(
                {
                    "n": n,
                    "eps": eps,
                    "K": plan.K,
                    "terms": plan.terms,
                    "size": r.size,
                    "depth": r.depth,
                    "overhead_size": r.overhead_size,
                    "overhead_depth": r.overhead_depth,
                    "qubits": r.total_qubits,
                    "controlled_diagonal_invocations": r.controlled_diagonal_invocations,
                    "size_per_Kn": r.size / Kn,
                    "depth_per_Klogn": r.depth / Klog,
                    "overhead_size_per_Kn": r.overhead_size / Kn,
                    "overhead_depth_per_Klogn": r.overhead_depth / Klog,
                }
            )
    return rows


def cmd_scaling(cfg: dict, out: Path, seed: int, fmt: str) -> int:
    rows = scaling_rows(cfg["scaling"], seed)
    _write_csv(out, "table.csv", CSV_FIELDS, [[row[k] for k in CSV_FIELDS] for row in rows])
    if fmt == "json":
        _write(out, "table.json", dump_json({"seed": seed, "rows": rows}))
    return EXIT_OK


def cmd_demo(name: str, out: Path, seed: int, fmt: str) -> int:
    result = run_demo(name, seed)
    stem = name.replace("-", "_")
    report = json.loads(dump_json(result.report))
    jsonschema.validate(report, DEMO_REPORT_SCHEMA)
    _write(out, f"{stem}.json", dump_json(report))
    _write_csv(out, f"{stem}.csv", result.header, result.rows)
    if result.circuit is not None:
        _write(out, "circuit.qasm", to_qasm(result.circuit))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlaplace", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, fmt_default: str = "json") -> None:
        p.add_argument("--config", type=Path, help="YAML job config")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed (overrides the config)")
        p.add_argument("--format", choices=("json", "csv"), default=fmt_default)

    common(sub.add_parser("synthesize", help="build a QLT circuit and its resource report"))
    common(sub.add_parser("verify", help="build and simulate against the exact oracle"))
    common(sub.add_parser("scaling", help="construction-only resource scaling table"), "csv")
    demo = sub.add_parser("demo", help="run a packaged worked example")
    demo.add_argument("name", help=", ".join(DEMO_NAMES))
    common(demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "demo" and args.name not in DEMO_NAMES:
            raise ConfigError(f"unknown demo {args.name!r}; choose from {', '.join(DEMO_NAMES)}")
        cfg = load_config(args.config, args.command)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if seed < 0:
            raise ConfigError("--seed must be non-negative")
        if args.command == "synthesize":
            return cmd_synthesize(cfg, args.out, seed, args.format)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, seed, args.format)
        if args.command == "scaling":
            return cmd_scaling(cfg, args.out, seed, args.format)
        return cmd_demo(args.name, args.out, seed, args.format)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationTooLarge as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ResourceRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
