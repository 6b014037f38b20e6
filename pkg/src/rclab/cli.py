"""Command-line harness: ``rclab <subcommand> [--config FILE] [--seed N] [--threads N] [--out DIR]``.

Each subcommand reads an optional YAML mapping whose keys are the fields of
its config class below; unknown keys and wrong types are rejected before any
computation.  Command-line flags override config keys.  The output directory
defaults to ``$RCLAB_OUT`` or ``./rclab-out``.  Every run writes a manifest.

Exit codes: 0 success, 1 computation failure, 2 configuration or usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import io as rio

EXIT_OK, EXIT_COMPUTE, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------- configs
@dataclass
class Common:
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "csv"


@dataclass
class MiptScanConfig(Common):
    L: list[int] = field(default_factory=lambda: [16])
    p: list[float] = field(default_factory=lambda: [0.16])
    trajectories: int = 10
    steps: int | None = None
    boundary: str = "periodic"
    record_every: int = 1
    record_from: int = 0
    observables: list[str] = field(default_factory=lambda: ["I3", "S_half"])


@dataclass
class CollapseConfig(Common):
    inputs: list[str] = field(default_factory=list)
    observable: str = "I3"
    window: int | None = None
    n_knots: int = 8
    pc_range: list[float] = field(default_factory=lambda: [0.12, 0.20])
    nu_range: list[float] = field(default_factory=lambda: [0.8, 2.0])


@dataclass
class PurifyConfig(Common):
    L: list[int] = field(default_factory=lambda: [16])
    p: list[float] = field(default_factory=lambda: [0.25])
    trajectories: int = 10
    threshold: float = 0.5
    max_steps: int | None = None
    boundary: str = "periodic"


@dataclass
class ProbeBetaConfig(Common):
    L: int = 32
    p: list[float] = field(default_factory=lambda: [0.10, 0.12, 0.14])
    ensemble: int = 100
    t0: int | None = None
    t1: int | None = None
    probe_site: int | None = None
    surface: bool = False
    boundary: str = "periodic"
    p_c: float | None = None


@dataclass
class ProbeEtaConfig(Common):
    L: list[int] = field(default_factory=lambda: [16, 32])
    p: float = 0.16
    ensemble: int = 100
    t0: int | None = None
    t1: int | None = None
    surface: bool = False
    boundary: str = "periodic"


@dataclass
class HydroConfig(Common):
    L: int = 12
    dt: float = 0.5
    t_max: float = 10.0
    depth: int = 20
    realizations: int = 1
    sites: list[int] | None = None  # default: site 0 only
    excluded: int = 0
    exact: bool = False
    exact_fixture: str | None = None


@dataclass
class SampleConfig(Common):
    rows: int = 4
    cols: int = 3
    depth: int = 20
    samples: int = 10000
    realizations: int = 1
    excluded_site: int | None = None
    entangler: str = "CNOT"


COMMANDS = {
    "mipt-scan": MiptScanConfig,
    "collapse": CollapseConfig,
    "purify": PurifyConfig,
    "probe-beta": ProbeBetaConfig,
    "probe-eta": ProbeEtaConfig,
    "hydro": HydroConfig,
    "sample": SampleConfig,
}


def _coerce(name, value, tp):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union or (origin is not None and type(None) in args):
        if value is None:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(name, value, inner[0])
    if origin is list:
        if not isinstance(value, list):
            value = [value]
        return [_coerce(name, v, args[0]) for v in value]
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name}: expected a boolean")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}: expected an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}: expected a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{name}: expected a string")
        return value
    raise ConfigError(f"{name}: unsupported type")


def load_config(cls, doc: dict | None, overrides: dict):
    doc = dict(doc or {})
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    doc.update({k: v for k, v in overrides.items() if v is not None})
    values = {k: _coerce(k, v, hints[k]) for k, v in doc.items()}
    cfg = cls(**values)
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.threads < 1:
        raise ConfigError("threads must be positive")
    if cfg.format not in ("csv", "jsonl"):
        raise ConfigError("format must be csv or jsonl")
    for name in ("p",):
        if hasattr(cfg, name):
            ps = getattr(cfg, name)
            for p in ps if isinstance(ps, list) else [ps]:
                if not 0 <= p <= 1:
                    raise ConfigError("p values must lie in [0, 1]")
    if hasattr(cfg, "boundary") and cfg.boundary not in ("periodic", "open"):
        raise ConfigError("boundary must be periodic or open")
    if isinstance(cfg, MiptScanConfig):
        bad = set(cfg.observables) - {"I3", "S_half"}
        if bad:
            raise ConfigError(f"unknown observables: {sorted(bad)}")
        if any(L % 4 for L in cfg.L) and "I3" in cfg.observables:
            raise ConfigError("I3 needs every L divisible by 4")
    if isinstance(cfg, (MiptScanConfig, PurifyConfig)):
        if cfg.trajectories < 1 or any(L < 4 or L % 2 for L in cfg.L):
            raise ConfigError("need trajectories >= 1 and even L >= 4")
    if isinstance(cfg, CollapseConfig) and not cfg.inputs:
        raise ConfigError("collapse needs at least one input file")
    if isinstance(cfg, HydroConfig):
        if not 2 <= cfg.L <= 24:
            raise ConfigError("hydro needs 2 <= L <= 24")
        if cfg.exact and cfg.L > 14:
            raise ConfigError("the exact oracle is limited to L <= 14")
    if isinstance(cfg, SampleConfig):
        if cfg.rows * cfg.cols > 24:
            raise ConfigError("grid exceeds 24 qubits")
        if cfg.entangler not in ("CNOT", "CZ"):
            raise ConfigError("entangler must be CNOT or CZ")


# ---------------------------------------------------------------- commands
def _ext(cfg):
    return "csv" if cfg.format == "csv" else "jsonl"


def cmd_mipt_scan(cfg: MiptScanConfig, out: Path) -> list[Path]:
    from .monitored import run_ensemble, steady_state

    files, agg, summary = [], [], []
    for L in cfg.L:
        for p in cfg.p:
            recs = run_ensemble(
                L,
                p,
                cfg.trajectories,
                cfg.seed,
                cfg.threads,
                steps=cfg.steps,
                boundary=cfg.boundary,
                record_every=cfg.record_every,
                record_from=cfg.record_from,
            )
            rows = []
            for r in recs:
                for obs in cfg.observables:
                    series = r.i3 if obs == "I3" else r.s_half
                    rows += [(L, p, r.config.seed, obs, t, v) for t, v in zip(r.times.tolist(), series.tolist())]
            files.append(rio.write_table(out / f"mipt_L{L}_p{rio.fmt(p)}.{_ext(cfg)}", rio.SCAN_HEADER, rows, cfg.format))
            agg += rows
            for obs in cfg.observables:
                m, e, _ = steady_state(recs, "i3" if obs == "I3" else "s_half")
                summary.append((L, p, obs, m, e, len(recs)))
    files.append(rio.write_table(out / f"mipt_scan.{_ext(cfg)}", rio.SCAN_HEADER, agg, cfg.format))
    files.append(
        rio.write_table(out / "mipt_steady_state.csv", ("L", "p", "observable", "mean", "stderr", "n"), summary)
    )
    return files


def steady_points(rows: list[dict], observable: str, window: int | None):
    """Per-(L, p) mean and standard error of late-time trajectory averages."""
    from .scaling import ScanPoint

    groups: dict = {}
    for r in rows:
        if r["observable"] != observable:
            continue
        groups.setdefault((int(r["L"]), float(r["p"])), {}).setdefault(r["seed"], []).append((r["t"], r["value"]))
    pts = []
    for (L, p), trajs in sorted(groups.items()):
        vals = []
        for series in trajs.values():
            t = np.array([s[0] for s in series], dtype=float)
            v = np.array([s[1] for s in series], dtype=float)
            w = L if window is None else window
            vals.append(v[t > t.max() - w].mean())
        vals = np.array(vals)
        err = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else 0.0
        pts.append(ScanPoint(L, p, float(vals.mean()), max(float(err), 1e-6)))
    return pts


def cmd_collapse(cfg: CollapseConfig, out: Path) -> list[Path]:
    from .scaling import collapse

    rows = []
    for path in cfg.inputs:
        rows += rio.read_table(Path(path))
    pts = steady_points(rows, cfg.observable, cfg.window)
    report = {"config": dataclasses.asdict(cfg), "n_points": len(pts)}
    try:
        fit = collapse(pts, n_knots=cfg.n_knots, pc_range=tuple(cfg.pc_range), nu_range=tuple(cfg.nu_range))
    except ValueError as exc:
        report["error"] = f"degenerate fit: {exc}"
        path = rio.write_json(out / "collapse_report.json", report)
        raise ComputationError(report["error"], [path]) from exc
    report.update(
        estimates={"p_c": fit.p_c, "nu": fit.nu},
        stderr={"p_c": fit.stderr[0], "nu": fit.stderr[1]},
        covariance=fit.covariance,
        quality=fit.quality,
        converged=fit.converged,
        degenerate=fit.degenerate,
    )
    path = rio.write_json(out / "collapse_report.json", report)
    if fit.degenerate:
        raise ComputationError("degenerate fit: no finite-size crossing", [path])
    return [path]


def cmd_purify(cfg: PurifyConfig, out: Path) -> list[Path]:
    from .purification import purification_ensemble

    rows, summary = [], []
    for L in cfg.L:
        for p in cfg.p:
            res = purification_ensemble(
                L, p, cfg.trajectories, cfg.seed, cfg.threads, cfg.threshold, cfg.max_steps, boundary=cfg.boundary
            )
            for r in res:
                seed = r.config.base.seed
                rows.append((L, p, seed, "t_p", 0, r.t_p))
                rows += [(L, p, seed, "S_ref", t + 1, v) for t, v in enumerate(r.s_ref.tolist())]
            tps = np.array([r.t_p for r in res])
            summary.append((L, p, float(np.median(tps)), float(np.mean(np.isfinite(tps))), len(res)))
    return [
        rio.write_table(out / f"purify.{_ext(cfg)}", rio.SCAN_HEADER, rows, cfg.format),
        rio.write_table(out / "purify_summary.csv", ("L", "p", "median_t_p", "purified_fraction", "n"), summary),
    ]


def _probe_config(cfg, L, p, n_probes):
    from .monitored import CircuitConfig
    from .purification import ProbeConfig

    sites = None
    if n_probes == 1 and getattr(cfg, "probe_site", None) is not None:
        sites = (cfg.probe_site,)
    return ProbeConfig(CircuitConfig(L, p, boundary=cfg.boundary), cfg.t0, cfg.t1, sites, cfg.surface)


def cmd_probe_beta(cfg: ProbeBetaConfig, out: Path) -> list[Path]:
    from .purification import order_parameter_probe
    from .scaling import power_law_fit

    rows, summary = [], []
    for p in cfg.p:
        pc = _probe_config(cfg, cfg.L, p, 1)
        m, e, vals = order_parameter_probe(pc, cfg.ensemble, cfg.seed, cfg.threads)
        rows += [(cfg.L, p, k, "S_R", pc.T0 + pc.T1, v) for k, v in enumerate(vals.tolist())]
        summary.append((cfg.L, p, m, e, len(vals)))
    files = [
        rio.write_table(out / f"probe_beta.{_ext(cfg)}", rio.SCAN_HEADER, rows, cfg.format),
        rio.write_table(out / "probe_beta_summary.csv", ("L", "p", "mean", "stderr", "n"), summary),
    ]
    if cfg.p_c is not None:
        sel = [s for s in summary if s[1] < cfg.p_c and s[2] > 0]
        if len(sel) >= 2:
            b, amp, err = power_law_fit([cfg.p_c - s[1] for s in sel], [s[2] for s in sel], [max(s[3], 1e-9) for s in sel])
            files.append(rio.write_json(out / "probe_beta_fit.json", {"beta": b, "amplitude": amp, "stderr": err, "p_c": cfg.p_c}))
    return files


def cmd_probe_eta(cfg: ProbeEtaConfig, out: Path) -> list[Path]:
    from .purification import correlation_probe
    from .scaling import power_law_fit

    rows, summary = [], []
    for L in cfg.L:
        pc = _probe_config(cfg, L, cfg.p, 2)
        m, e, vals = correlation_probe(pc, cfg.ensemble, cfg.seed, cfg.threads)
        rows += [(L, cfg.p, k, "I2_R1R2", pc.T0 + pc.T1, v) for k, v in enumerate(vals.tolist())]
        summary.append((L, cfg.p, m, e, len(vals)))
    files = [
        rio.write_table(out / f"probe_eta.{_ext(cfg)}", rio.SCAN_HEADER, rows, cfg.format),
        rio.write_table(out / "probe_eta_summary.csv", ("L", "p", "mean", "stderr", "n"), summary),
    ]
    good = [s for s in summary if s[2] > 0]
    if len(good) >= 2:
        k, amp, err = power_law_fit([s[0] for s in good], [s[2] for s in good], [max(s[3], 1e-9) for s in good])
        files.append(rio.write_json(out / "probe_eta_fit.json", {"eta": -k, "amplitude": amp, "stderr": err}))
    return files


def cmd_hydro(cfg: HydroConfig, out: Path) -> list[Path]:
    from .dense.heisenberg import HeisenbergChain
    from .dense.typicality import exact_correlation, typicality_correlation

    chain = HeisenbergChain(cfg.L, cfg.dt)
    sites = cfg.sites if cfg.sites is not None else [0]
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    est = typicality_correlation(chain, sites, cfg.excluded, cfg.depth, cfg.t_max, rng, cfg.realizations)
    rows = [
        (cfg.L, r, t, s, est.values[r, k, j])
        for r in range(est.values.shape[0])
        for k, t in enumerate(est.times.tolist())
        for j, s in enumerate(sites)
    ]
    files = [rio.write_table(out / f"hydro.{_ext(cfg)}", rio.CORRELATION_HEADER, rows, cfg.format)]
    exact = None
    if cfg.exact_fixture:
        exact = _load_exact(Path(cfg.exact_fixture), cfg.L, est.times, sites)
    elif cfg.exact:
        ex = exact_correlation(chain, sites, cfg.excluded, cfg.t_max)
        exact = ex.values[0]
        files.append(
            rio.write_table(
                out / f"hydro_exact.{_ext(cfg)}",
                rio.CORRELATION_HEADER,
                [(cfg.L, -1, t, s, exact[k, j]) for k, t in enumerate(est.times.tolist()) for j, s in enumerate(sites)],
                cfg.format,
            )
        )
    if exact is not None:
        dev = np.abs(est.values - exact[None])
        drows = [
            (cfg.L, r, t, s, dev[r, k, j])
            for r in range(dev.shape[0])
            for k, t in enumerate(est.times.tolist())
            for j, s in enumerate(sites)
        ]
        files.append(rio.write_table(out / f"hydro_deviation.{_ext(cfg)}", rio.CORRELATION_HEADER, drows, cfg.format))
        files.append(
            rio.write_json(
                out / "hydro_summary.json",
                {
                    "max_deviation_single": float(dev.max(axis=(1, 2)).max()),
                    "max_deviation_mean": float(np.abs(est.mean - exact).max()),
                    "bound": 3.0 * 2.0 ** (-cfg.L / 2),
                },
            )
        )
    return files


def _load_exact(path: Path, L: int, times, sites) -> np.ndarray:
    table = {}
    for r in rio.read_table(path):
        if int(r["L"]) == L:
            table[(round(float(r["t"]), 9), int(r["site"]))] = float(r["value"])
    try:
        return np.array([[table[(round(float(t), 9), s)] for s in sites] for t in times])
    except KeyError as exc:
        raise ConfigError(f"exact fixture lacks entry {exc}") from exc


def cmd_sample(cfg: SampleConfig, out: Path) -> list[Path]:
    from .dense.entropy import participation_entropy
    from .dense.grid import random_grid_circuit, run_grid_circuit
    from .dense.sampling import porter_thomas_test, sample_counts, xeb

    rng = np.random.Generator(np.random.Philox(cfg.seed))
    n = cfg.rows * cfg.cols
    states = []
    for _ in range(cfg.realizations):
        g = random_grid_circuit(cfg.rows, cfg.cols, cfg.depth, rng, cfg.entangler)
        states.append(run_grid_circuit(g, excluded_site=cfg.excluded_site))
    support = None
    if cfg.excluded_site is not None:
        support = np.nonzero(((np.arange(2**n) >> (n - 1 - cfg.excluded_site)) & 1) == 0)[0]
    (counts, edges), ks = porter_thomas_test(states, support=support)
    first = states[0]
    samples = sample_counts(first, cfg.samples, rng)
    idx = np.repeat([int(b, 2) for b, _ in samples], [c for _, c in samples])
    D = 2**n if support is None else support.size
    summary = {
        "n_qubits": n,
        "D": D,
        "ks_porter_thomas": ks,
        "xeb": xeb(idx, np.abs(first.amplitudes) ** 2),
        "xeb_ideal_reference": math.log(D) + np.euler_gamma - 1,
        "participation_entropy": float(np.mean([participation_entropy(s) for s in states])),
        "participation_reference": math.log(D) - 1 + np.euler_gamma,
        "histogram_counts": counts,
        "histogram_edges_Dz": edges,
    }
    return [
        rio.write_table(out / f"samples.{_ext(cfg)}", rio.SAMPLE_HEADER, samples, cfg.format),
        rio.write_json(out / "sample_summary.json", summary),
    ]


HANDLERS = {
    "mipt-scan": cmd_mipt_scan,
    "collapse": cmd_collapse,
    "purify": cmd_purify,
    "probe-beta": cmd_probe_beta,
    "probe-eta": cmd_probe_eta,
    "hydro": cmd_hydro,
    "sample": cmd_sample,
}


class ComputationError(RuntimeError):
    def __init__(self, msg, files=()):
        super().__init__(msg)
        self.files = list(files)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rclab", description="Random-circuit simulation experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, cls in COMMANDS.items():
        sp = sub.add_parser(name, help=(cls.__doc__ or name).splitlines()[0])
        sp.add_argument("--config", "-c", help="YAML config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out", help="output directory (default $RCLAB_OUT or ./rclab-out)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    cls = COMMANDS[args.command]
    try:
        doc = None
        if args.config:
            with open(args.config) as fh:
                doc = yaml.safe_load(fh)
            if doc is not None and not isinstance(doc, dict):
                raise ConfigError("config must be a mapping")
        cfg = load_config(cls, doc, {"seed": args.seed, "threads": args.threads, "out": args.out})
    except (ConfigError, OSError, yaml.YAMLError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out or os.environ.get("RCLAB_OUT") or "rclab-out")
    try:
        files = HANDLERS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        rio.write_manifest(out, args.command, dataclasses.asdict(cfg), exc.files)
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except Exception as exc:  # noqa: BLE001 - report any numerical failure as exit 1
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    rio.write_manifest(out, args.command, dataclasses.asdict(cfg), files)
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
