"""Batch command line front-end: simulate | estimate | verify | report.

Configuration is a flat INI file (sections of key = value pairs); any key can
be overridden on the command line as ``section.key=value``.  Unknown sections
or keys are rejected.  Every run writes a ``manifest.json`` echoing the fully
resolved configuration, so each numeric output is reproducible from the
manifest alone.  The default output directory comes from ``--out``, then the
``ASSOC_USTAT_OUT_DIR`` environment variable, then ``./artifacts``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from dataclasses import dataclass, fields
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .assocgen import (
    GaussianAR1Spec,
    IIDSpec,
    PositiveMASpec,
    SeedSpec,
    generate,
    spec_to_dict,
    truncate_bounded,
)
from .kernels import KERNEL_IDS, MarginalModel, kernel_by_id
from .longrun import BlockConfig, block_estimator, sigma_u_plugin
from .verification import CheckScales, run_checks

ENV_OUT_DIR = "ASSOC_USTAT_OUT_DIR"

_PROCESS_KEYS = {
    "family", "phi", "innovation_sd", "mean", "marginal", "mu", "var", "a", "b",
    "coeffs", "truncate_c1",
}
_SCALE_KEYS = {f.name for f in fields(CheckScales)}
_SCHEMAS: dict[str, dict[str, set[str]]] = {
    "simulate": {
        "process": _PROCESS_KEYS,
        "simulate": {"n", "seed", "stream", "series_file"},
    },
    "estimate": {
        "estimate": {"input", "ell", "kernel", "marginal_mean", "marginal_var"},
    },
    "verify": {
        "verify": {"criteria"} | _SCALE_KEYS,
    },
    "report": {
        "report": {"input_dir"},
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    config_path: Path | None
    overrides: tuple[str, ...]
    output_dir: Path


def _package_version() -> str:
    try:
        return version("assoc-ustat")
    except PackageNotFoundError:
        return "unknown"


def _read_config(path: Path | None, overrides: tuple[str, ...], command: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"config file not found: {path}")
        parser.read(path)
    cfg = {s: dict(parser.items(s)) for s in parser.sections()}
    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {ov!r}")
        key_part, value = ov.split("=", 1)
        section, key = key_part.split(".", 1)
        cfg.setdefault(section, {})[key.strip()] = value.strip()
    schema = _SCHEMAS[command]
    for section, entries in cfg.items():
        if section not in schema:
            raise ConfigError(f"unknown config section [{section}] for command {command!r}")
        for key in entries:
            if key not in schema[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return cfg


def _get(cfg: dict, section: str, key: str, default=None, required: bool = False):
    value = cfg.get(section, {}).get(key, None)
    if value is None:
        if required:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return default
    return value


def _resolve_out_dir(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(ENV_OUT_DIR)
    return Path(env) if env else Path("artifacts")


def _write_manifest(out_dir: Path, command: str, cfg: dict, cli: CliConfig, extra: dict) -> Path:
    manifest = {
        "command": command,
        "config": cfg,
        "config_path": str(cli.config_path) if cli.config_path else None,
        "overrides": list(cli.overrides),
        "output_dir": str(out_dir),
        "package_version": _package_version(),
    }
    manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _build_process(cfg: dict):
    family = _get(cfg, "process", "family", required=True)
    if family == "gaussian_ar1":
        phi = float(_get(cfg, "process", "phi", required=True))
        default_sd = np.sqrt(max(1.0 - phi**2, 0.0)) if 0 <= phi < 1 else 1.0
        spec = GaussianAR1Spec(
            phi=phi,
            innovation_sd=float(_get(cfg, "process", "innovation_sd", default_sd)),
            mean=float(_get(cfg, "process", "mean", 0.0)),
        )
    elif family == "iid":
        kind = _get(cfg, "process", "marginal", "gaussian")
        if kind == "gaussian":
            marginal = MarginalModel.gaussian(
                float(_get(cfg, "process", "mu", 0.0)),
                float(_get(cfg, "process", "var", 1.0)),
            )
        elif kind == "uniform":
            marginal = MarginalModel.uniform(
                float(_get(cfg, "process", "a", 0.0)),
                float(_get(cfg, "process", "b", 1.0)),
            )
        else:
            raise ConfigError(f"unsupported marginal kind {kind!r} in config")
        spec = IIDSpec(marginal)
    elif family == "positive_ma":
        raw = _get(cfg, "process", "coeffs", required=True)
        spec = PositiveMASpec(tuple(float(c) for c in raw.split(",")))
    else:
        raise ConfigError(f"unknown process family {family!r}")
    c1 = _get(cfg, "process", "truncate_c1")
    if c1 is not None:
        spec = truncate_bounded(spec, float(c1))
    return spec


def _parse_series_file(path: Path) -> np.ndarray:
    if not path.exists():
        raise ConfigError(f"input series file not found: {path}")
    values = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ConfigError(f"malformed series value on line {lineno} of {path}") from None
    if not values:
        raise ConfigError(f"series file {path} contains no values")
    return np.array(values)


def _fmt(v) -> str:
    return repr(float(v))


# -- subcommands ----------------------------------------------------------------


def cmd_simulate(cli: CliConfig, seed_flag: int | None) -> int:
    cfg = _read_config(cli.config_path, cli.overrides, "simulate")
    spec = _build_process(cfg)
    n = int(_get(cfg, "simulate", "n", required=True))
    seed = SeedSpec(
        seed=seed_flag if seed_flag is not None else int(_get(cfg, "simulate", "seed", 0)),
        stream=int(_get(cfg, "simulate", "stream", 0)),
    )
    series = generate(spec, n, seed)

    out = cli.output_dir
    out.mkdir(parents=True, exist_ok=True)
    series_name = _get(cfg, "simulate", "series_file", "series.txt")
    series_path = out / series_name
    with series_path.open("w") as fh:
        for v in series:
            fh.write(_fmt(v) + "\n")

    autocov: dict[str, float | None] = {}
    approximate = getattr(spec, "autocov_is_approximate", False)
    try:
        autocov = {str(lag): spec.autocov(lag) for lag in range(11)}
    except ValueError:
        autocov = {}
    sidecar = {
        "process": spec_to_dict(spec),
        "seed": {"seed": seed.seed, "stream": seed.stream},
        "n": n,
        "series_file": series_name,
        "autocov_lags_0_10": autocov,
        "autocov_is_approximate": approximate,
    }
    sidecar_path = out / (Path(series_name).stem + "_spec.json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "simulate", cfg, cli, {"seed_flag": seed_flag})
    print(f"wrote {series_path} ({n} values) and {sidecar_path}")
    return 0


def cmd_estimate(cli: CliConfig, args: argparse.Namespace) -> int:
    cfg = _read_config(cli.config_path, cli.overrides, "estimate")
    input_path = args.input or _get(cfg, "estimate", "input", required=True)
    ell_text = args.ell or _get(cfg, "estimate", "ell", "cube_root")
    kernel_id = args.kernel or _get(cfg, "estimate", "kernel", "none")

    series = _parse_series_file(Path(input_path))
    block = BlockConfig.from_string(ell_text)
    if kernel_id == "none":
        estimate = block_estimator(series, block)
    else:
        if kernel_id not in KERNEL_IDS:
            raise ConfigError(f"unknown kernel id {kernel_id!r}")
        kernel = kernel_by_id(kernel_id)
        mean = _get(cfg, "estimate", "marginal_mean")
        var = _get(cfg, "estimate", "marginal_var")
        marginal = (
            MarginalModel.gaussian(float(mean), float(var))
            if mean is not None and var is not None
            else None
        )
        estimate = sigma_u_plugin(series, kernel, block, marginal=marginal)

    out = cli.output_dir
    out.mkdir(parents=True, exist_ok=True)
    record = dict(estimate.to_json_dict())
    record.update({"input": str(input_path), "ell_rule": block.describe(), "kernel": kernel_id})
    est_path = out / "estimate.json"
    est_path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "estimate", cfg, cli, {"input": str(input_path)})
    print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def cmd_verify(cli: CliConfig, seed_flag: int | None) -> int:
    cfg = _read_config(cli.config_path, cli.overrides, "verify")
    section = cfg.get("verify", {})
    kwargs = {}
    for f in fields(CheckScales):
        if f.name in section:
            text = section[f.name]
            kwargs[f.name] = float(text) if f.type == "float" else int(float(text))
    if seed_flag is not None:
        kwargs["seed"] = seed_flag
    try:
        scales = CheckScales(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    raw = section.get("criteria", "all").strip()
    names = None if raw == "all" else [c.strip() for c in raw.split(",") if c.strip()]
    try:
        results = run_checks(names, scales)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    out = cli.output_dir
    out.mkdir(parents=True, exist_ok=True)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: observed={res.observed:.6g} ({res.target}) "
              f"[{res.runtime_s:.1f}s] {res.detail}")
    summary = {
        "all_passed": all(r.passed for r in results),
        "results": [
            {
                "name": r.name,
                "passed": r.passed,
                "observed": r.observed,
                "target": r.target,
                "detail": r.detail,
                "runtime_s": round(r.runtime_s, 3),
            }
            for r in results
        ],
        "scales": {f.name: getattr(scales, f.name) for f in fields(CheckScales)},
    }
    (out / "verify_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    with (out / "verify_table.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "passed", "observed", "target", "runtime_s"])
        for r in results:
            writer.writerow([r.name, r.passed, _fmt(r.observed), r.target, f"{r.runtime_s:.3f}"])
    _write_manifest(out, "verify", cfg, cli, {"seed_flag": seed_flag})
    return 0 if summary["all_passed"] else 1


def cmd_report(cli: CliConfig, args: argparse.Namespace) -> int:
    cfg = _read_config(cli.config_path, cli.overrides, "report")
    input_dir = Path(args.input or _get(cfg, "report", "input_dir", required=True))
    if not input_dir.is_dir():
        raise ConfigError(f"report input directory not found: {input_dir}")
    lines = [f"report for {input_dir}", ""]
    for path in sorted(input_dir.glob("*.json")):
        if path.name == "manifest.json":
            continue
        data = json.loads(path.read_text())
        lines.append(f"== {path.name}")
        for key in sorted(data):
            value = data[key]
            if isinstance(value, (int, float, str, bool)) or value is None:
                lines.append(f"  {key}: {value}")
        lines.append("")
    text = "\n".join(lines)
    out = cli.output_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(text + "\n")
    _write_manifest(out, "report", cfg, cli, {"input_dir": str(input_dir)})
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assoc-ustat",
        description="U-statistics over associated sequences: simulate, estimate, verify, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "estimate", "verify", "report"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument("--out", default=None, help=f"output dir (default ${ENV_OUT_DIR} or ./artifacts)")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("overrides", nargs="*", help="config overrides: section.key=value")
    est = sub.choices["estimate"]
    est.add_argument("--input", default=None, help="newline-delimited series file")
    est.add_argument("--ell", default=None, help="block rule: cube_root | log_square_capped | fixed(K)")
    est.add_argument("--kernel", default=None, help="none | " + " | ".join(KERNEL_IDS))
    rep = sub.choices["report"]
    rep.add_argument("--input", default=None, help="directory of result files")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cli = CliConfig(
        command=args.command,
        config_path=args.config,
        overrides=tuple(args.overrides),
        output_dir=_resolve_out_dir(args.out),
    )
    try:
        if args.command == "simulate":
            return cmd_simulate(cli, args.seed)
        if args.command == "estimate":
            return cmd_estimate(cli, args)
        if args.command == "verify":
            return cmd_verify(cli, args.seed)
        return cmd_report(cli, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
