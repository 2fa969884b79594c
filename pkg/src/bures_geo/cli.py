"""``bures-geo`` command-line tool.

Every command writes JSON to stdout (or ``--out``); when ``--out`` is given a
run manifest is written next to it as ``<out>.manifest.json``.
Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 violated precondition.
"""

from __future__ import annotations

import argparse
import importlib
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, acceptance, circuits, evolution, geodesics, metrology, states
from .errors import BuresGeoError, DegenerateLambda, InputError
from .serialization import complex_array, dumps, load_state, read_json, write_csv, write_json

CIRCUIT_CROSSCHECK_TOL = 1e-8


def _emit(payload, out: str | None) -> None:
    if out:
        write_json(payload, out)
    else:
        sys.stdout.write(dumps(payload))


def _write_manifest(args, config: dict, seed, outputs: list[str], started: str) -> None:
    if not args.out:
        return
    manifest = {
        "command": args.command,
        "config": config,
        "version": __version__,
        "seed": seed,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    write_json(manifest, f"{args.out}.manifest.json")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# Commands ------------------------------------------------------------------


def cmd_fidelity(args) -> int:
    started = _now()
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    result = {
        "fidelity": states.fidelity(rho, sigma),
        "bures_angle": states.bures_angle(rho, sigma),
        "bures_distance": states.bures_distance(rho, sigma),
    }
    if args.json or args.out:
        _emit(result, args.out)
    else:
        for key, value in result.items():
            print(f"{key} {value!r}")
    _write_manifest(args, {"rho": args.rho, "sigma": args.sigma}, None, [args.out] if args.out else [], started)
    return 0


def _spec_payload(spec, samples: int, intersections: bool) -> dict:
    out = spec.to_dict()
    out["invariant_residuals"] = spec.invariant_residuals()
    if samples > 0:
        taus = np.linspace(0.0, spec.theta, samples)
        out["samples"] = [{"tau": float(t), "state": spec.evaluate(t).to_dict()} for t in taus]
    if intersections:
        out["intersections"] = [b.to_dict() for b in geodesics.boundary_intersections(spec)]
    return out


def cmd_geodesic(args) -> int:
    started = _now()
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    if args.samples < 0:
        raise InputError("--samples must be non-negative")
    if args.enumerate:
        specs = geodesics.enumerate_geodesics(rho, sigma)
    else:
        specs = [geodesics.build_geodesic(rho, sigma, args.signs or "+" * rho.n)]
    payload = {"geodesics": [_spec_payload(s, args.samples, args.intersections) for s in specs]}
    _emit(payload, args.out)
    config = {
        "rho": args.rho,
        "sigma": args.sigma,
        "signs": args.signs,
        "enumerate": args.enumerate,
        "samples": args.samples,
        "intersections": args.intersections,
    }
    _write_manifest(args, config, None, [args.out] if args.out else [], started)
    return 0


def cmd_evolve(args) -> int:
    started = _now()
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    spec = geodesics.build_geodesic(rho, sigma, args.signs or "+" * rho.n)
    ham = evolution.hamiltonian_from_geodesic(spec)
    outputs = []
    if args.circuit:
        circuit = circuits.build_circuit_from_lift(ham.psi, ham.psi_dot, ham.n, ham.n_a, args.tau or 0.0)
        produced = circuits.output_state(circuit, ham.n, ham.n_a)
        expected = evolution.project_evolution(ham, args.tau or 0.0).matrix
        gap = float(np.linalg.norm(produced - expected))
        if gap > CIRCUIT_CROSSCHECK_TOL:
            from .errors import ConvergenceFailure

            raise ConvergenceFailure(f"circuit and Hamiltonian routes differ by {gap:.3e}")
        write_json(circuit.to_dict(), args.circuit)
        outputs.append(args.circuit)
        payload = {"circuit": args.circuit, "qubits": circuit.qubits, "route_difference": gap}
    else:
        state = evolution.project_evolution(ham, args.tau)
        payload = {
            "tau": args.tau,
            "signs": geodesics.format_signs(spec.signs),
            "theta_V": spec.theta,
            "state": state.to_dict(),
            "closed_form_difference": float(np.linalg.norm(state.matrix - spec.evaluate(args.tau).matrix)),
        }
    _emit(payload, args.out)
    if args.out:
        outputs.append(args.out)
    config = {"rho": args.rho, "sigma": args.sigma, "signs": args.signs, "tau": args.tau, "circuit": args.circuit}
    _write_manifest(args, config, None, outputs, started)
    return 0


def _resolve_state(entry, base_dir: Path) -> states.DensityMatrix:
    if isinstance(entry, str):
        return load_state(base_dir / entry)
    if isinstance(entry, dict):
        return states.DensityMatrix.from_dict(entry)
    raise InputError("state entries must be file paths or state objects")


def _load_callable(target: str):
    module_name, _, attr = target.partition(":")
    if not module_name or not attr:
        raise InputError(f"custom family must be 'module:function', got {target!r}")
    try:
        return getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as exc:
        raise InputError(f"cannot load {target!r}: {exc}") from exc


def _build_family(cfg: dict, base_dir: Path):
    """Return (family, geodesic spec or None)."""
    kind = cfg.get("kind")
    if kind == "geodesic":
        rho = _resolve_state(cfg.get("rho"), base_dir)
        sigma = _resolve_state(cfg.get("sigma"), base_dir)
        spec = geodesics.build_geodesic(rho, sigma, cfg.get("signs", "+" * rho.n))
        return metrology.ParametrizedFamily.from_geodesic(spec, float(cfg.get("delta", 1.0))), spec
    if kind == "unitary":
        ham = complex_array(cfg.get("hamiltonian", {}), "hamiltonian")
        psi = complex_array(cfg.get("psi", {}), "psi")
        return metrology.ParametrizedFamily.from_unitary(ham, psi, int(cfg["n"]), int(cfg["n_a"])), None
    if kind == "custom":
        made = _load_callable(str(cfg.get("callable", "")))()
        if isinstance(made, metrology.ParametrizedFamily):
            return made, None
        if callable(made):
            return metrology.ParametrizedFamily(made), None
        raise InputError("custom factory must return a ParametrizedFamily or a callable")
    raise InputError(f"unknown family kind {kind!r}")


def _build_povm(entry, spec, n: int) -> metrology.POVM:
    if entry == "optimal":
        if spec is None:
            raise InputError("povm 'optimal' is only defined for geodesic families")
        return metrology.optimal_povm(spec)
    if entry == "computational":
        return metrology.POVM.computational(n)
    if isinstance(entry, list):
        return metrology.POVM.from_dict(entry)
    raise InputError("povm must be 'optimal', 'computational' or a list of elements")


def _run_experiment(cfg: dict, base_dir: Path, csv_path: str | None) -> tuple[dict, int]:
    try:
        family, spec = _build_family(cfg["family"], base_dir)
        x_true = float(cfg["x_true"])
        n_meas = int(cfg["n_meas"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"experiment config: {exc}") from exc
    seed = int(cfg.get("seed", 0))
    povm = _build_povm(cfg.get("povm", "optimal"), spec, family.state(x_true).n)
    interval = cfg.get("interval")
    exp = metrology.EstimationExperiment(
        family,
        povm,
        x_true,
        n_meas,
        replicates=int(cfg.get("replicates", 200)),
        seed=seed,
        interval=tuple(interval) if interval is not None else None,
    )
    result = metrology.run_experiment(exp)
    summary = result.to_dict()
    summary["ratio"] = result.delta_x / result.crb
    if csv_path:
        write_csv(csv_path, ["replicate", "x_est"], [[k, v] for k, v in enumerate(result.x_est)])
    return {"mode": "experiment", "seed": seed, "summary": summary}, seed


def _run_heisenberg(cfg: dict, csv_path: str | None) -> dict:
    ens = metrology.ProbeEnsembleSpec.uniform(
        1,
        gap=float(cfg.get("gap", 1.0)),
        populations=tuple(cfg.get("populations", (0.7, 0.3))),
        angle=float(cfg.get("angle", 0.3)),
        phase=float(cfg.get("phase", 0.0)),
    )
    kwargs = {"counts": tuple(int(c) for c in cfg.get("counts", (1, 2, 3, 4)))}
    if "x_samples" in cfg:
        kwargs["x_samples"] = tuple(float(x) for x in cfg["x_samples"])
    kwargs["n_meas"] = int(cfg.get("n_meas", 1))
    rows = metrology.heisenberg_scan(ens, **kwargs)
    header = list(metrology.HeisenbergRow._fields)
    if csv_path:
        write_csv(csv_path, header, [list(r) for r in rows])
    return {"mode": "heisenberg", "rows": [r._asdict() for r in rows]}


def cmd_metrology(args) -> int:
    started = _now()
    cfg = read_json(args.config)
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    base_dir = Path(args.config).resolve().parent
    mode = cfg.get("mode", "experiment")
    seed = None
    if mode == "experiment":
        payload, seed = _run_experiment(cfg, base_dir, args.csv)
    elif mode == "heisenberg":
        payload = _run_heisenberg(cfg, args.csv)
    else:
        raise InputError(f"unknown metrology mode {mode!r}")
    _emit(payload, args.out)
    outputs = [p for p in (args.out, args.csv) if p]
    manifest_cfg = dict(cfg)
    if mode == "experiment":
        manifest_cfg.setdefault("seed", seed)
    _write_manifest(args, manifest_cfg, seed, outputs, started)
    return 0


def cmd_selfcheck(args) -> int:
    numbers = args.criteria or None
    results = acceptance.run_all(numbers)
    for res in results:
        print(res.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 0 if not failed else 1


# Entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bures-geo", description="Bures geodesics, evolutions and metrology.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="fidelity, Bures angle and Bures distance of two states")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--json", action="store_true", help="print JSON instead of key/value lines")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("geodesic", help="geodesics joining two invertible states")
    p.add_argument("rho")
    p.add_argument("sigma")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--signs", help="sign string such as '+-' (default all '+')")
    group.add_argument("--enumerate", action="store_true", help="all 2^n geodesics, shortest first")
    p.add_argument("--samples", type=int, default=0, help="number of evenly spaced states along each curve")
    p.add_argument("--intersections", action="store_true", help="include boundary intersections")
    p.add_argument("--out")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("evolve", help="state at time tau, or the circuit that prepares it")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--signs")
    p.add_argument("--tau", type=float)
    p.add_argument("--circuit", help="write the circuit JSON here (power-of-two dimensions)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("metrology", help="run an estimation experiment or a Heisenberg scan")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_metrology)

    p = sub.add_parser("selfcheck", help="run the acceptance checks")
    p.add_argument("criteria", nargs="*", type=int)
    p.set_defaults(func=cmd_selfcheck, out=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "evolve" and args.tau is None and not args.circuit:
        parser.error("evolve needs --tau or --circuit")
    try:
        return args.func(args)
    except DegenerateLambda as exc:
        print(f"error: {exc}", file=sys.stderr)
        for cluster in exc.clusters:
            print(f"  degenerate cluster: eigenvalue indices {list(cluster)}", file=sys.stderr)
        return exc.exit_code
    except BuresGeoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
