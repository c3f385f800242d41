"""Command line driver: ``skewdyn <command> --config FILE [--seed S] [--out DIR]``.

Each command writes ``<command>.csv``, ``<command>_report.json`` and
``<command>_manifest.json`` into the output directory (``render`` writes
images instead of a table).  CSV and report bytes depend only on the config
and the seed; the manifest also records versions and wall time.

Exit codes: 0 success, 2 invalid config, 3 budget exceeded, 4 numerical
failure.  Failures still write a manifest and an ``<command>_error.json``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import time
import warnings
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, render
from .config import ConfigError, ExperimentConfig, load_config
from .measures import (EmpiricalMeasure, discrepancy, integrals, periodic_measure,
                       points_from_csv, points_to_csv,
                       preimage_measure)
from .rational import DegreeCapError, NonCoprimeError, RootFindingError
from .skew import (BudgetExceeded, check_A1, julia_cloud, near_critical_values,
                   periodicity_residual)
from .thermo import (NeighborhoodSpec, branch_count, check_condition,
                     equilibrium_approx, ldp_periodic_scan, ldp_preimage_scan,
                     pressure_periodic, pressure_preimage)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_NUMERIC = 4

THREADS_ENV = "SKEWDYN_THREADS"


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _table(header: list[str], rows) -> str:
    out = [",".join(header)]
    for r in rows:
        out.append(",".join(_cell(v) for v in r))
    return "\n".join(out) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return "inf" if math.isinf(x) and x > 0 else repr(x)
    return str(v)


class Outputs:
    """Collects output files; written in sorted order after the command runs."""

    def __init__(self):
        self.files: dict[str, bytes] = {}
        self.warnings: list[str] = []

    def text(self, name: str, s: str):
        self.files[name] = s.encode("utf-8")

    def binary(self, name: str, b: bytes):
        self.files[name] = b


# ---------------------------------------------------------------------------
# commands


def _base(cfg: ExperimentConfig, fam):
    base = cfg.build_base(fam)
    if near_critical_values(fam, base.z):
        warnings.warn(f"base {base} lies within 1e-6 of a critical value of order <= 5",
                      RuntimeWarning, stacklevel=2)
    return base


def _julia(cfg: ExperimentConfig, fam):
    base = _base(cfg, fam)
    return julia_cloud(fam, base, cfg.burn_in, cfg.count, cfg.seed), base


def cmd_julia_sample(cfg, fam, out: Outputs) -> dict:
    cloud, base = _julia(cfg, fam)
    out.text("julia-sample.csv", points_to_csv(cloud))
    return {"count": len(cloud), "burn_in": cfg.burn_in, "base": str(base),
            "seed": cfg.seed}


def _integral_table(mu: EmpiricalMeasure, D) -> dict:
    return dict(zip(D.labels(), integrals(mu, D).tolist()))


def cmd_preimage_measure(cfg, fam, out: Outputs) -> dict:
    base = _base(cfg, fam)
    mu = preimage_measure(fam, base, cfg.depth, cfg.budget, cfg.mode, cfg.samples, cfg.seed)
    out.text("preimage-measure.csv", mu.to_csv())
    D = cfg.build_dictionary(fam.N)
    return {"depth": cfg.depth, "atoms": len(mu), "base": str(base),
            "sampled": mu.info["sampled"], "integrals": _integral_table(mu, D)}


def cmd_periodic_measure(cfg, fam, out: Outputs) -> dict:
    nu = periodic_measure(fam, cfg.period)
    out.text("periodic-measure.csv", nu.to_csv())
    res = periodicity_residual(fam, nu.points, cfg.period)
    D = cfg.build_dictionary(fam.N)
    info = {k: v for k, v in nu.info.items() if k != "kind"}
    return {**info, "max_residual": float(res.max()),
            "integrals": _integral_table(nu, D)}


def cmd_compare_measures(cfg, fam, out: Outputs) -> dict:
    depths, periods = cfg.depth_list(), cfg.period_list()
    if len(depths) != len(periods):
        raise ConfigError("compare-measures pairs 'depths' with 'periods'; lengths differ")
    base = _base(cfg, fam)
    D = cfg.build_dictionary(fam.N)
    rows, detail = [], []
    for n, m in zip(depths, periods):
        mu = preimage_measure(fam, base, n, cfg.budget, cfg.mode, cfg.samples, cfg.seed)
        nu = periodic_measure(fam, m)
        gap = discrepancy(mu, nu, D)
        rows.append((n, m, gap))
        detail.append({"depth": n, "period": m, "discrepancy": gap,
                       "preimage": integrals(mu, D).tolist(),
                       "periodic": integrals(nu, D).tolist(),
                       "sampled": mu.info["sampled"]})
    out.text("compare-measures.csv", _table(["depth", "period", "discrepancy"], rows))
    return {"base": str(base), "labels": D.labels(), "comparisons": detail}


def cmd_pressure(cfg, fam, out: Outputs) -> dict:
    f = cfg.potential.build()
    base = _base(cfg, fam)
    est = pressure_preimage(fam, f, base, cfg.depth, cfg.budget, cfg.mode,
                            cfg.samples, cfg.seed)
    cond = check_condition(fam, f, est)
    est.condition = cond.to_dict()
    report = {"potential": f.to_json(), "preimage": est.to_dict()}
    out.text("pressure.csv", est.to_csv())
    if cfg.periods:
        per = pressure_periodic(fam, f, max(cfg.period_list()), min(cfg.period_list()))
        report["periodic"] = per.to_dict()
        out.text("pressure_periodic.csv", per.to_csv())
    return report


def cmd_condition_check(cfg, fam, out: Outputs) -> dict:
    f = cfg.potential.build()
    est = pressure_preimage(fam, f, _base(cfg, fam), cfg.depth, cfg.budget,
                            cfg.mode, cfg.samples, cfg.seed)
    c = check_condition(fam, f, est)
    d = c.to_dict()
    out.text("condition-check.csv", _table(list(d), [list(d.values())]))
    return {**d, "depth": cfg.depth, "lipschitz_bound": f.lipschitz_bound(),
            "potential": f.to_json()}


def _neighborhood(cfg, fam, f) -> tuple[NeighborhoodSpec, dict]:
    eps = cfg.epsilon_value()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        center = equilibrium_approx(fam, f, cfg.center_period)
    info = {"center_period": cfg.center_period, "center_atoms": len(center),
            "center_condition": center.info["condition"],
            "center_warnings": [str(w.message) for w in caught]}
    return NeighborhoodSpec(center, cfg.build_dictionary(fam.N), eps), info


def cmd_ldp_preimage(cfg, fam, out: Outputs) -> dict:
    f = cfg.potential.build()
    nbhd, info = _neighborhood(cfg, fam, f)
    samples = max(cfg.samples, 10_000)
    rep = ldp_preimage_scan(fam, f, _base(cfg, fam), nbhd, cfg.depth_list(),
                            cfg.budget, cfg.mode, samples, cfg.seed)
    out.text("ldp-preimage.csv", rep.to_csv())
    return {**rep.to_dict(), **info}


def cmd_ldp_periodic(cfg, fam, out: Outputs) -> dict:
    f = cfg.potential.build()
    nbhd, info = _neighborhood(cfg, fam, f)
    cloud, _ = _julia(cfg, fam)
    rep = ldp_periodic_scan(fam, f, nbhd, cfg.period_list(), julia=cloud)
    out.text("ldp-periodic.csv", rep.to_csv())
    return {**rep.to_dict(), **info}


def cmd_branch_count(cfg, fam, out: Outputs) -> dict:
    if not cfg.regions:
        raise ConfigError("branch-count needs at least one entry in 'regions'")
    rows, reports = [], []
    for i, spec in enumerate(cfg.regions):
        U = spec.build()
        for m in cfg.period_list():
            r = branch_count(fam, U, m, cfg.n_clear, cfg.loop_points)
            d = r.to_dict()
            d["region"] = i
            reports.append(d)
            rows.append((i, m, r.total, r.gamma, r.undecided, r.tau, r.bound,
                         r.accepted, r.holds))
    out.text("branch-count.csv", _table(
        ["region", "m", "total", "gamma", "undecided", "tau", "bound", "accepted", "holds"],
        rows))
    return {"regions": [s.model_dump(mode="json") for s in cfg.regions],
            "results": reports}


def cmd_a1_check(cfg, fam, out: Outputs) -> dict:
    cloud, base = _julia(cfg, fam)
    rep = check_A1(fam, cloud, cfg.max_period, cfg.tol)
    out.text("a1-check.csv", _table(
        ["period", "word", "z", "derivative"],
        [(v["period"], v["word"], v["z"], v["derivative"]) for v in rep["violations"]]))
    return {**rep, "base": str(base)}


def _render_input(cfg, fam, out_dir: Path):
    src = cfg.render.input
    if src is None:
        default = out_dir / "julia-sample.csv"
        if default.exists():
            src = str(default)
    if src is None:
        cloud, _ = _julia(cfg, fam)
        return cloud, None, "julia-sample (generated)"
    path = Path(src)
    if not path.is_absolute() and not path.exists():
        path = out_dir / src
    if not path.exists():
        raise ConfigError(f"render input {src!r} not found")
    batch, weights = points_from_csv(path.read_text(encoding="utf-8"))
    if len(batch) == 0:
        raise ConfigError("render input is empty")
    return batch, weights, path.name


def cmd_render(cfg, fam, out: Outputs, out_dir: Path) -> dict:
    batch, weights, source = _render_input(cfg, fam, out_dir)
    letters = batch.words.leading(1)[:, 0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ras = render.rasterize(batch.z, cfg.render, weights, letters)
    out.warnings += [str(w.message) for w in caught]
    if "ppm" in cfg.render.formats:
        out.binary("render.ppm", render.encode_ppm(ras.image))
    if "png" in cfg.render.formats:
        out.binary("render.png", render.encode_png(ras.image))
    return {"source": source, "points": len(batch), "inside": ras.inside,
            "lit_pixels": ras.lit, "warning": ras.warning,
            "render": cfg.render.model_dump(mode="json")}


COMMANDS: dict[str, Callable] = {
    "julia-sample": cmd_julia_sample,
    "preimage-measure": cmd_preimage_measure,
    "periodic-measure": cmd_periodic_measure,
    "compare-measures": cmd_compare_measures,
    "pressure": cmd_pressure,
    "condition-check": cmd_condition_check,
    "ldp-preimage": cmd_ldp_preimage,
    "ldp-periodic": cmd_ldp_periodic,
    "branch-count": cmd_branch_count,
    "a1-check": cmd_a1_check,
    "render": cmd_render,
}


# ---------------------------------------------------------------------------
# driver


def _versions() -> dict:
    import PIL
    import pydantic
    import scipy
    return {"skewdyn": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__,
            "pydantic": pydantic.VERSION, "pillow": PIL.__version__}


def _threads() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return n


def _fallback_out(config_path) -> Path:
    """Output directory named by a config that failed validation, else ``out``."""
    try:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        return Path(str(raw["out"]))
    except (OSError, ValueError, TypeError, KeyError):
        return Path("out")


def run_command(name: str, config_path: str, seed: int | None = None,
                out: str | None = None) -> int:
    """Run one command; returns the exit status."""
    t0 = time.perf_counter()
    out_dir = Path(out) if out is not None else None
    manifest: dict = {"command": name, "config_path": str(config_path)}
    outputs = Outputs()
    status, error = EXIT_OK, None
    cfg = None
    try:
        if name not in COMMANDS:
            raise ConfigError(f"unknown command {name!r}")
        manifest["threads"] = _threads()
        try:
            cfg = load_config(config_path, seed, out)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(str(exc)) from exc
        out_dir = Path(cfg.out)
        manifest.update(config=cfg.model_dump(mode="json"), config_hash=cfg.digest(),
                        seed=cfg.seed)
        fam = cfg.build_family()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if name == "render":
                report = cmd_render(cfg, fam, outputs, out_dir)
            else:
                report = COMMANDS[name](cfg, fam, outputs)
        outputs.warnings += [str(w.message) for w in caught]
        report = {"command": name, "config_hash": cfg.digest(), **report}
        outputs.text(f"{name}_report.json", _dumps(report))
    except BudgetExceeded as exc:
        status, error = EXIT_BUDGET, ("budget", str(exc))
    except DegreeCapError as exc:
        status, error = EXIT_BUDGET, ("budget", str(exc))
    except (RootFindingError, NonCoprimeError, FloatingPointError, ArithmeticError) as exc:
        status, error = EXIT_NUMERIC, ("numeric", str(exc))
    except ConfigError as exc:
        status, error = EXIT_CONFIG, ("config", str(exc))
    except ValueError as exc:
        # pydantic's ValidationError is a ValueError, and so is every
        # precondition the library checks on its parameters
        status, error = EXIT_CONFIG, ("config", str(exc))
    if out_dir is None:
        out_dir = _fallback_out(config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    if error is not None:
        outputs.files = {}
        outputs.text(f"{name}_error.json", _dumps({"command": name, "category": error[0],
                                                   "message": error[1], "exit": status}))
        print(f"skewdyn {name}: {error[0]} error: {error[1]}", file=sys.stderr)
    for fname in sorted(outputs.files):
        (out_dir / fname).write_bytes(outputs.files[fname])
    manifest.update(
        status=status, versions=_versions(), warnings=outputs.warnings,
        wall_time_s=round(time.perf_counter() - t0, 6),
        outputs={f: hashlib.sha256(b).hexdigest() for f, b in sorted(outputs.files.items())})
    (out_dir / f"{name}_manifest.json").write_text(_dumps(manifest), encoding="utf-8")
    for w in outputs.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewdyn",
                                description="Skew products of rational maps: experiments.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="override the output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run_command(args.command, args.config, args.seed, args.out)


if __name__ == "__main__":
    sys.exit(main())
