"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage or configuration error.
Every JSON artifact carries a ``provenance`` block with the package
version, seed, decoder id and a hash of the run configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import click

from . import __version__
from .catalog import UnsupportedDistance, build_ec_circuit, build_grow_circuit, build_hm_circuit, gadget_entry
from .decoder import DECODER_ID
from .flagverify import BudgetExceeded, DEFAULT_BUDGET, fault_set_count, verify_t_flag
from .lattice import InvalidDistanceError, build_lattice
from .montecarlo import MCStats, extrapolate, fit_alpha, run_campaign
from .noise import LogicalNoiseModel
from .overhead import OverheadError, encoded_report, min_qubits, n_df, encoded_qubits, physical_report
from .protocol import ConfigError, ProtocolSpec

LONG_TRIALS = 10**8
LONG_FAULT_SETS = 10**9
CACHE_ENV = "HSTATEPREP_CACHE"
TABLE2_CONFIGS = ((7, 11, 3), (5, 9, 5), (3, 7, 7))


class ConfigSchemaError(click.UsageError):
    pass


class DomainError(click.ClickException):
    exit_code = 1


# configuration files -------------------------------------------------------------


@dataclass
class EncodedSimConfig:
    d1: int
    d2: int
    d_f: int
    p_lc: list[float]
    p_inject: list[float]
    class_weights: list[float] = field(default_factory=lambda: [1 / 3, 1 / 3, 1 / 3])
    t_only: bool = False


@dataclass
class PhysicalRow:
    d: int
    p_acc: float
    t_hm: int | None = None
    t_ec: int | None = None


@dataclass
class EncodedRow:
    d1: int
    d2: int
    d_f: int
    p_acc_d1: float
    p_a_hf: float = 1.0
    m_df: int | None = None


_NUMBER = (int, float)


def _check_type(name: str, value: Any, annotation: str) -> None:
    ok = {
        "int": isinstance(value, int) and not isinstance(value, bool),
        "float": isinstance(value, _NUMBER) and not isinstance(value, bool),
        "bool": isinstance(value, bool),
        "list[float]": isinstance(value, list) and all(isinstance(v, _NUMBER) for v in value),
        "int | None": value is None or (isinstance(value, int) and not isinstance(value, bool)),
    }.get(annotation, True)
    if not ok:
        raise ConfigSchemaError(f"config key {name!r}: expected {annotation}, got {value!r}")


def parse_config(cls, obj: Any, where: str = "config"):
    """Build a config dataclass, rejecting unknown or missing keys."""
    if not isinstance(obj, dict):
        raise ConfigSchemaError(f"{where}: expected an object")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(obj) - set(fields))
    if unknown:
        raise ConfigSchemaError(f"{where}: unknown keys {unknown}")
    missing = [
        n for n, f in fields.items()
        if n not in obj and f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING
    ]
    if missing:
        raise ConfigSchemaError(f"{where}: missing keys {missing}")
    for n, v in obj.items():
        _check_type(f"{where}.{n}", v, str(fields[n].type))
    return cls(**obj)


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigSchemaError(f"cannot read config {path}: {exc}") from exc


def config_hash(config: Any) -> str:
    text = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def provenance(config: dict, seed: int | None = None) -> dict:
    return {"version": __version__, "seed": seed, "decoder_id": DECODER_ID, "config": config, "config_hash": config_hash(config)}


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"not a comma-separated list of numbers: {text}") from exc


def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError as exc:
        raise click.BadParameter(f"not a number: {text}") from exc
    if v < 1 or v != int(v):
        raise click.BadParameter(f"must be a positive integer, got {text}")
    return int(v)


# commands -------------------------------------------------------------------------


@click.group()
@click.version_option(__version__)
def cli() -> None:
    """Fault-tolerant |H> state preparation toolkit."""


@cli.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def catalog(d: int, out: str) -> None:
    """Write the EC, H_m and growth circuits plus the lattice."""
    root = Path(out)
    root.mkdir(parents=True, exist_ok=True)
    entries = {
        f"EC{d}": build_ec_circuit(d),
        f"Hm{d}": build_hm_circuit(d),
        f"G1-{d}": build_grow_circuit(1, d)[0],
    }
    index = {}
    for name, e in entries.items():
        (root / f"{name}.txt").write_text(e.circuit.to_text())
        index[name] = {"file": f"{name}.txt", "depth": e.circuit.depth, "qubits": e.circuit.num_qubits, "claimed_t": e.claimed_t}
    (root / "lattice.json").write_text(build_lattice(d).to_json())
    meta = {"circuits": index, "lattice": "lattice.json", "provenance": provenance({"command": "catalog", "d": d})}
    (root / "index.json").write_text(json.dumps(meta, indent=2))
    click.echo(f"wrote {len(entries)} circuits to {root}")


def _verify_entry(circuit: str, d: int, face: int | None):
    if circuit == "EC":
        return build_ec_circuit(d)
    if circuit == "Hm":
        return build_hm_circuit(d)
    if circuit == "Hm-reduced":
        return build_hm_circuit(d, reduced=True)
    if circuit == "gadget":
        if face is None:
            raise click.UsageError("--face is required for gadget verification")
        return gadget_entry(d, face)
    raise click.UsageError(f"unknown circuit {circuit}")


@cli.command()
@click.option("--circuit", type=click.Choice(["EC", "Hm", "Hm-reduced", "gadget"]), required=True)
@click.option("--d", "d", type=int, required=True)
@click.option("--t", "t", type=int, required=True)
@click.option("--face", type=int, default=None, help="face index for --circuit gadget")
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True)
@click.option("--out", default=None)
@click.option("--i-know-this-is-long", "long_ok", is_flag=True)
def verify(circuit: str, d: int, t: int, face: int | None, budget: int, out: str | None, long_ok: bool) -> None:
    """Exhaustive t-flag check of a catalog circuit."""
    entry = _verify_entry(circuit, d, face)
    n = fault_set_count(entry, t)
    if n > LONG_FAULT_SETS and not long_ok:
        raise click.UsageError(f"{n} fault sets: pass --i-know-this-is-long to run this")
    report = verify_t_flag(entry, t, budget=max(budget, n) if long_ok else budget)
    body = json.loads(report.to_json())
    body["provenance"] = provenance({"command": "verify", "circuit": circuit, "d": d, "t": t, "face": face})
    _write(out, json.dumps(body, indent=2) + "\n")


def _spec_from(d: int, mode: str, config: str | None) -> tuple[ProtocolSpec, dict]:
    if mode == "physical":
        if config:
            raise ConfigSchemaError("--config is only used in encoded mode")
        return ProtocolSpec(d), {"mode": mode, "d": d}
    if not config:
        raise ConfigSchemaError("encoded mode needs --config")
    raw = _load_json(config)
    c = parse_config(EncodedSimConfig, raw)
    if c.d_f != d:
        raise ConfigSchemaError(f"config d_f = {c.d_f} does not match --d {d}")
    lm = LogicalNoiseModel(tuple(c.p_lc), tuple(c.p_inject), tuple(c.class_weights))
    spec = ProtocolSpec(d, "encoded", c.d1, c.d2, lm, c.t_only)
    return spec, {"mode": mode, "d": d, **dataclasses.asdict(c)}


def _campaign(spec, cfg, ps, trials, seed, jobs, long_ok, checkpoint_dir) -> dict:
    if trials >= LONG_TRIALS and not long_ok:
        raise click.UsageError(f"{trials} trials per point: pass --i-know-this-is-long to run this")
    points = []
    for p in ps:
        ck = None
        if checkpoint_dir:
            Path(checkpoint_dir).mkdir(parents=True, exist_ok=True)
            ck = Path(checkpoint_dir) / f"ckpt-{config_hash({**cfg, 'p': p, 'trials': trials, 'seed': seed})}.json"
        stats = run_campaign(spec, p, trials, seed=seed, workers=jobs, checkpoint=ck)
        points.append(stats.to_dict())
    full = {**cfg, "p": ps, "trials": trials, "seed": seed}
    return {"points": points, "provenance": provenance(full, seed)}


_sim_options = [
    click.option("--d", "d", type=click.Choice(["3", "5", "7"]), required=True),
    click.option("--p", "p", required=True, help="comma-separated physical error rates"),
    click.option("--trials", required=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--jobs", type=int, default=1, show_default=True),
    click.option("--out", default=None),
    click.option("--i-know-this-is-long", "long_ok", is_flag=True),
]


def _apply(options):
    def deco(f):
        for o in reversed(options):
            f = o(f)
        return f

    return deco


@cli.command()
@_apply(_sim_options)
@click.option("--mode", type=click.Choice(["physical", "encoded"]), default="physical", show_default=True)
@click.option("--config", default=None, help="JSON file with the encoded-mode logical noise")
def simulate(d, p, trials, seed, jobs, out, long_ok, mode, config) -> None:
    """Monte Carlo campaign over one or more error rates."""
    spec, cfg = _spec_from(int(d), mode, config)
    result = _campaign(spec, cfg, _float_list(p), _count(trials), seed, jobs, long_ok, os.environ.get(CACHE_ENV))
    _write(out, json.dumps(result, indent=2) + "\n")


@cli.command("reproduce-table1")
@_apply(_sim_options)
def reproduce_table1(d, p, trials, seed, jobs, out, long_ok) -> None:
    """Physical-mode rows of the overhead table: p_L, <n>, min(n), s_O."""
    spec, cfg = _spec_from(int(d), "physical", None)
    result = _campaign(spec, cfg, _float_list(p), _count(trials), seed, jobs, long_ok, os.environ.get(CACHE_ENV))
    rows = []
    for pt in result["points"]:
        stats = MCStats.from_dict(pt)
        o = physical_report(int(d), stats.p_acc) if stats.p_acc > 0 else None
        rows.append({
            "d": int(d), "p": stats.p, "p_L": stats.p_L, "p_L_ci": list(stats.p_L_ci),
            "p_acc": stats.p_acc, "avg_qubits": o.avg_qubits if o else None,
            "avg_qubits_rounded": round(o.avg_qubits) if o else None,
            "min_qubits": min_qubits(int(d)), "spacetime": o.spacetime if o else None,
            "t_hm": o.inputs["t_hm"] if o else None, "t_ec": o.inputs["t_ec"] if o else None,
        })
    result["table"] = rows
    _write(out, json.dumps(result, indent=2) + "\n")


@cli.command("reproduce-table2-min")
@click.option("--out", default=None)
def reproduce_table2_min(out: str | None) -> None:
    """Minimum qubit counts of the three encoded configurations."""
    rows = []
    for d1, d2, df in TABLE2_CONFIGS:
        _, mn = encoded_qubits(d1, d2, df, 1.0, 1.0, n_df(df) + 1)
        rows.append({"d1": d1, "d2": d2, "d_f": df, "min_n_f": mn})
    body = {"rows": rows, "provenance": provenance({"command": "reproduce-table2-min"})}
    _write(out, json.dumps(body, indent=2) + "\n")


@cli.command()
@click.option("--in", "inp", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--extrapolate", "at", default=None, help="comma-separated p values")
@click.option("--out", default=None)
def fit(inp: str, at: str | None, out: str | None) -> None:
    """Fit p_L = alpha p^((d+1)/2) to a simulate output."""
    data = json.loads(Path(inp).read_text())
    points = data.get("points")
    if not points:
        raise ConfigSchemaError(f"{inp} has no 'points'")
    stats = [MCStats.from_dict(pt) for pt in points]
    ds = {s.d for s in stats}
    if len(ds) != 1:
        raise ConfigSchemaError("all points must share one distance")
    usable = [(s.p, s.p_L, s.p_L_ci) for s in stats if s.accepted and s.n_failures]
    if not usable:
        raise DomainError("no point has a failure; nothing to fit")
    f = fit_alpha(usable, ds.pop())
    body = {"fit": f.to_dict(), "provenance": provenance({"command": "fit", "input": data.get("provenance")})}
    if at:
        body["extrapolated"] = {str(p): extrapolate(f, p) for p in _float_list(at)}
    _write(out, json.dumps(body, indent=2) + "\n")


@cli.command()
@click.argument("mode", type=click.Choice(["physical", "encoded"]))
@click.option("--config", required=True, help="JSON file: {\"rows\": [...]} ")
@click.option("--out", default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
def overhead(mode: str, config: str, out: str | None, fmt: str | None) -> None:
    """Qubit and space-time overhead tables."""
    raw = _load_json(config)
    if not isinstance(raw, dict) or set(raw) != {"rows"} or not isinstance(raw["rows"], list):
        raise ConfigSchemaError("overhead config must be an object with exactly one key 'rows' (a list)")
    reports = []
    for i, row in enumerate(raw["rows"]):
        if mode == "physical":
            r = parse_config(PhysicalRow, row, f"rows[{i}]")
            reports.append(physical_report(r.d, r.p_acc, r.t_hm, r.t_ec))
        else:
            r = parse_config(EncodedRow, row, f"rows[{i}]")
            reports.append(encoded_report(r.d1, r.d2, r.d_f, r.p_acc_d1, r.p_a_hf, r.m_df))
    fmt = fmt or ("csv" if out and out.endswith(".csv") else "json")
    prov = provenance({"command": "overhead", "mode": mode, "rows": raw["rows"]})
    if fmt == "json":
        _write(out, json.dumps({"rows": [r.row() for r in reports], "provenance": prov}, indent=2) + "\n")
        return
    rows = [r.row() for r in reports]
    buf = io.StringIO()
    buf.write(f"# provenance {json.dumps(prov, sort_keys=True)}\n")
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["mode"])
    w.writeheader()
    w.writerows(rows)
    _write(out, buf.getvalue())


_DOMAIN_ERRORS = (ConfigError, UnsupportedDistance, InvalidDistanceError, OverheadError, BudgetExceeded, ValueError)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="hstateprep", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except _DOMAIN_ERRORS as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
