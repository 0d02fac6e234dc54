"""Command-line pipelines: ingest -> partition -> metrics -> report.

Subcommands: ``partition``, ``metrics``, ``tgate``, ``compare``.  All
numeric work happens in the library modules; the CLI only wires them
together, so every emitted number is traceable to a module operation.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import click
import numpy as np
import scipy

from . import __version__
from .errors import HampartError
from .fermionic import (
    fro_decompose,
    gfro_decompose,
    lcu_postprocess,
    lr_decompose,
    sd_gfro_decompose,
)
from .grouping import group_lf, group_si
from .metrics import TrotterReport, build_report, csv_header, tgate_count
from .pauli import bravyi_kitaev, jordan_wigner
from .tensors import load_fcidump, load_json, validate

METHODS = ("lr", "fro", "gfro", "sd-gfro", "lr-lcu", "gfro-lcu", "fc-lf", "fc-si")
FERMIONIC = ("lr", "fro", "gfro", "sd-gfro", "lr-lcu", "gfro-lcu")


def _load_tensors(path: Path):
    if path.suffix == ".json":
        return load_json(path)
    return load_fcidump(path)


def _parse_sector(text: str | None):
    if text is None or text == "auto-neutral-ground":
        return "auto-neutral-ground"
    if text.lower() in ("none", "full"):
        return None
    parts = [p.strip() for p in text.split(",")]
    return tuple(float(p) for p in parts)


def _config_dict(ctx_params: dict) -> dict:
    cfg = {k: v for k, v in sorted(ctx_params.items()) if not callable(v)}
    for key, val in cfg.items():
        if isinstance(val, Path):
            cfg[key] = str(val)
    return cfg


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _build_partition(t, method, mapping, threshold, seed, max_fragments):
    if method == "lr":
        return lr_decompose(t, threshold=threshold)
    if method == "lr-lcu":
        return lcu_postprocess(lr_decompose(t, threshold=threshold))
    if method == "gfro":
        return gfro_decompose(
            t, threshold=threshold, max_fragments=max_fragments, seed=seed
        )
    if method == "gfro-lcu":
        return lcu_postprocess(
            gfro_decompose(t, threshold=threshold, max_fragments=max_fragments, seed=seed)
        )
    if method == "sd-gfro":
        return sd_gfro_decompose(
            t, threshold=threshold, max_fragments=max_fragments, seed=seed
        )
    if method == "fro":
        return fro_decompose(
            t, n_fragments=max_fragments or 3, threshold=threshold, seed=seed
        )
    mapper = jordan_wigner if mapping == "jw" else bravyi_kitaev
    hq = mapper(t)
    return group_lf(hq) if method == "fc-lf" else group_si(hq)


def _default_mapping(method: str, mapping: str | None) -> str:
    if mapping is not None:
        return mapping
    return "jw" if method in FERMIONIC else "bk"


_COMMON = [
    click.option(
        "--input",
        "input_path",
        type=click.Path(exists=True, path_type=Path),
        required=True,
        help="FCIDUMP or tensor-JSON file.",
    ),
    click.option("--method", type=click.Choice(METHODS), required=True),
    click.option(
        "--mapping",
        type=click.Choice(("jw", "bk")),
        default=None,
        help="Fermion-qubit mapping (default: jw for fermionic methods, bk for fc-*).",
    ),
    click.option("--threshold", type=float, default=1e-6, show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option(
        "--sector",
        default="auto-neutral-ground",
        show_default=True,
        help='"auto-neutral-ground", "none", "eta,m,s", or comma-separated +-1 labels.',
    ),
    click.option("--epsilon", type=float, default=1e-3, show_default=True),
    click.option("--nelec", type=int, default=None, help="Override the electron count."),
    click.option("--max-qubits", type=int, default=16, show_default=True),
    click.option("--max-fragments", type=int, default=None),
    click.option(
        "--time-budget", type=float, default=None, help="Seconds between metric jobs."
    ),
    click.option(
        "--out",
        "out_dir",
        type=click.Path(path_type=Path),
        default=Path("."),
        show_default=True,
    ),
    click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, path_type=Path),
        default=None,
        help="JSON file with defaults for any option (flags win).",
    ),
]


def _with_common(func):
    for option in reversed(_COMMON):
        func = option(func)
    return func


def _apply_config_file(ctx, params):
    if params.get("config_path") is None:
        return params
    cfg = json.loads(Path(params["config_path"]).read_text())
    merged = dict(params)
    for key, val in cfg.items():
        key = key.replace("-", "_")
        if key not in merged:
            raise click.UsageError(f"unknown config key {key!r}")
        source = ctx.get_parameter_source(key)
        if source is not None and source.name == "DEFAULT":
            merged[key] = Path(val) if key in ("input_path", "out_dir") else val
    return merged


@click.group()
@click.version_option(version=__version__, prog_name="hampart")
def main():
    """Hamiltonian partitioning, Trotter-error bounds and T-gate estimates."""


def _prepare(ctx, params):
    params = _apply_config_file(ctx, params)
    if params["epsilon"] <= 0.0:
        raise click.UsageError("epsilon must be positive")
    method = params["method"]
    params["mapping"] = _default_mapping(method, params["mapping"])
    t = _load_tensors(Path(params["input_path"]))
    problems = validate(t)
    if problems:
        raise HampartError("input tensors invalid: " + "; ".join(problems))
    if t.n_spin > params["max_qubits"]:
        raise HampartError(
            f"input needs {t.n_spin} qubits > cap {params['max_qubits']}"
        )
    if params["nelec"] is None:
        params["nelec"] = t.nelec
    return params, t


@main.command()
@_with_common
@click.pass_context
def partition(ctx, **params):
    """Decompose the Hamiltonian and write partition.json."""
    try:
        params, t = _prepare(ctx, params)
        part = _build_partition(
            t,
            params["method"],
            params["mapping"],
            params["threshold"],
            params["seed"],
            params["max_fragments"],
        )
        out_dir = Path(params["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        part.save_json(out_dir / "partition.json")
        click.echo(f"partition.json written to {out_dir}")
    except HampartError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


@main.command()
@_with_common
@click.pass_context
def metrics(ctx, **params):
    """Full pipeline: partition, metrics, report artifacts, provenance."""
    start = time.monotonic()
    try:
        params, t = _prepare(ctx, params)
        part = _build_partition(
            t,
            params["method"],
            params["mapping"],
            params["threshold"],
            params["seed"],
            params["max_fragments"],
        )
        sector = _parse_sector(params["sector"])
        molecule = Path(params["input_path"]).stem
        if params["method"] in FERMIONIC:
            report = build_report(
                part,
                mapping=params["mapping"],
                nelec=params["nelec"],
                sector=sector,
                epsilon=params["epsilon"],
                molecule=molecule,
                time_budget=params["time_budget"],
            )
        else:
            if isinstance(sector, tuple):
                sector = [int(z) for z in sector]
            report = build_report(
                part,
                mapping=params["mapping"],
                sector=sector,
                epsilon=params["epsilon"],
                molecule=molecule,
                cap=params["max_qubits"],
                time_budget=params["time_budget"],
            )
        out_dir = Path(params["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        part.save_json(out_dir / "partition.json")
        report.save_json(out_dir / "report.json")
        (out_dir / "report.csv").write_text(
            csv_header() + "\n" + report.csv_row() + "\n"
        )
        cfg = _config_dict(params)
        provenance = {
            "config": cfg,
            "config_hash": _config_hash(cfg),
            "versions": {
                "hampart": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": sys.version.split()[0],
            },
            "wall_time_s": time.monotonic() - start,
        }
        (out_dir / "provenance.json").write_text(json.dumps(provenance, indent=1))
        status = "complete" if report.complete else "INCOMPLETE (budget exhausted)"
        click.echo(
            f"{molecule} {params['method']}: fragments={report.n_fragments} "
            f"pairwise={report.commutator_norm_sum:.6e} "
            f"projected={report.projected_commutator_norm_sum:.6e} "
            f"rotations={report.rotation_count} "
            f"t-gates={report.t_gate_count:.3e} [{status}]"
        )
        for note in report.annotations:
            click.echo(f"note: {note}", err=True)
    except HampartError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


@main.command()
@click.option("--alpha", "alpha_val", type=float, required=True)
@click.option("--rotations", type=int, required=True)
@click.option("--epsilon", type=float, default=1e-3, show_default=True)
def tgate(alpha_val, rotations, epsilon):
    """T-gate estimate for a given error measure and rotation count."""
    try:
        total, split = tgate_count(alpha_val, rotations, epsilon)
    except HampartError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"t_gates {total:.6e}")
    for key, val in split.items():
        click.echo(f"{key} {val:.6e}")
    sys.exit(0)


@main.command()
@click.argument("reports", nargs=-1, type=click.Path(exists=True, path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(path_type=Path),
    default=Path("comparison.csv"),
    show_default=True,
)
def compare(reports, out_path):
    """Merge >= 2 report.json files into one CSV sorted by figure of merit."""
    if len(reports) < 2:
        raise click.UsageError("compare needs at least two report files")
    rows = []
    epsilons = set()
    for path in reports:
        path = Path(path)
        if path.is_dir():
            path = path / "report.json"
        obj = json.loads(path.read_text())
        epsilons.add(obj["epsilon"])
        report = TrotterReport(
            **{
                key: obj[key]
                for key in obj
                if key in TrotterReport.__dataclass_fields__
            }
        )
        rows.append(report)
    if len(epsilons) > 1:
        click.echo(
            f"warning: mixed epsilon values {sorted(epsilons)}", err=True
        )
    rows.sort(key=lambda r: (r.molecule, r.figure_of_merit, r.method))
    out_path = Path(out_path)
    out_path.write_text(
        csv_header() + "\n" + "\n".join(r.csv_row() for r in rows) + "\n"
    )
    click.echo(f"{len(rows)} rows written to {out_path}")
    sys.exit(0)


if __name__ == "__main__":
    main()
