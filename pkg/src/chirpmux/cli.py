"""Command-line front end for reproducible chirp-set experiments.

Subcommands: ``waveforms`` (sample and instantaneous-frequency export),
``xcorr`` (delay sweeps, |rho| histograms, segment-count convergence),
``ber`` (analytic error-rate curves), and ``sim`` (Monte Carlo link runs).
Each reads an optional JSON config (``--config``), applies flag overrides,
writes CSV files plus a ``run_manifest.json`` that embeds the resolved
config, and exits 0 only if every requested output was written.  A
manifest is itself a valid ``--config`` document, so any run can be
replayed bit-exactly from its manifest.  Data goes to files only;
diagnostics go to stderr.

Values on the command line are in dB for Es/N0 and in fractions of the
symbol duration for delays; for binary signaling Eb/N0 equals Es/N0.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ber import InterferenceProfile, Interferer, ber_exact, ber_gaussian_delay_avg, ber_sampled
from .correlation import (
    mean_xcorr_vs_delay,
    xcorr_histogram,
    xcorr_quadrature,
    xcorr_segmented,
)
from .simulator import GaussianDelays, LinkConfig, run_link_sim
from .waveforms import ChirpFamily, SignalSetSpec, instantaneous_frequency, synthesize

__all__ = ["main"]

ALL_FAMILIES = tuple(f.value for f in ChirpFamily)

DEFAULTS: dict[str, dict] = {
    "waveforms": {
        "family": "linear",
        "n_users": 10,
        "symbol_duration": 1.0,
        "samples_per_symbol": None,
        "users": None,
    },
    "xcorr": {
        "families": list(ALL_FAMILIES),
        "n_users": 25,
        "symbol_duration": 1.0,
        "eps_over_T": [round(0.02 * j, 10) for j in range(1, 26)],
        "segments": 1024,
        "hist_bins": 50,
        "convergence": None,
    },
    "ber": {
        "families": ["linear"],
        "n_users": 2,
        "symbol_duration": 1.0,
        "method": "exact",
        "eps_over_T": 0.1,
        "sigma_over_T": 0.1,
        "esn0_db": [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
        "n_samples": 20_000,
        "n_draws": 200,
        "segments": 1024,
        "seed": 0,
    },
    "sim": {
        "families": ["linear"],
        "n_users": 10,
        "symbol_duration": 1.0,
        "samples_per_symbol": None,
        "sigma_over_T": 0.1,
        "esn0_db": [0.0, 4.0, 8.0, 12.0],
        "load_k": None,
        "bits_per_point": 100_000,
        "target_errors": 200,
        "block_symbols": 64,
        "seed": 0,
    },
}

# the single-pair convergence study defaults to the rho_25 sinusoidal case
CONVERGENCE_DEFAULTS = {
    "family": "sinusoidal",
    "n_users": 15,
    "pair": [2, 5],
    "eps_over_T": 0.2,
    "segments": [2**j for j in range(3, 12)],
}


def _load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    # a run manifest embeds the original config; accept it for replay
    if "config" in doc and isinstance(doc["config"], dict):
        return doc["config"]
    return doc


def _resolve(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if args.config is not None:
        file_cfg = _load_config(args.config)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(file_cfg)
    if args.family is not None:
        if command == "waveforms":
            cfg["family"] = args.family
        else:
            cfg["families"] = [args.family]
    if args.n_users is not None:
        cfg["n_users"] = args.n_users
    if getattr(args, "eps", None) is not None:
        if command == "xcorr":
            cfg["eps_over_T"] = args.eps
        elif command == "ber":
            if len(args.eps) != 1:
                raise ValueError("ber takes a single --eps value")
            cfg["eps_over_T"] = args.eps[0]
    if getattr(args, "sigma", None) is not None:
        cfg["sigma_over_T"] = args.sigma
    if getattr(args, "esn0_db", None) is not None:
        cfg["esn0_db"] = args.esn0_db
    if getattr(args, "load_k", None) is not None:
        cfg["load_k"] = args.load_k
    if getattr(args, "segments", None) is not None:
        cfg["segments"] = args.segments
    if getattr(args, "bits", None) is not None:
        cfg["n_samples" if command == "ber" else "bits_per_point"] = args.bits
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _cell(value) -> str:
    """One CSV cell; floats use repr so reruns are byte-identical."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, cfg: dict, names: list[str]) -> Path:
    manifest = {
        "command": command,
        "config": cfg,
        "outputs": {name: _sha256(out_dir / name) for name in sorted(names)},
        "version": __version__,
    }
    path = out_dir / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _make_spec(cfg: dict, family: str, n_users: int | None = None) -> SignalSetSpec:
    kwargs = {}
    if cfg.get("samples_per_symbol") is not None:
        kwargs["samples_per_symbol"] = int(cfg["samples_per_symbol"])
    return SignalSetSpec(
        n_users=int(n_users if n_users is not None else cfg["n_users"]),
        family=ChirpFamily(family),
        symbol_duration=float(cfg["symbol_duration"]),
        **kwargs,
    )


def cmd_waveforms(cfg: dict, out_dir: Path) -> list[str]:
    """Per-user sample (t, re, im) and frequency (t, f) CSV files."""
    spec = _make_spec(cfg, cfg["family"])
    users = range(spec.n_users) if cfg["users"] is None else [int(u) for u in cfg["users"]]
    t = spec.time_grid()
    names = []
    for u in users:
        wf = synthesize(spec, u)
        f = instantaneous_frequency(spec, u, t)
        sample_name = f"waveforms_{spec.family.value}_user{u}.csv"
        freq_name = f"frequency_{spec.family.value}_user{u}.csv"
        _write_csv(
            out_dir / sample_name,
            ["t", "re", "im"],
            zip(t, wf.samples.real, wf.samples.imag),
        )
        _write_csv(out_dir / freq_name, ["t", "f"], zip(t, f))
        names += [sample_name, freq_name]
    return names


def cmd_xcorr(cfg: dict, out_dir: Path) -> list[str]:
    """Mean |rho| vs delay and |rho| histogram per family; optional
    segment-count convergence table for one pair."""
    names = []
    mean_rows = []
    hist_rows = []
    for family in cfg["families"]:
        spec = _make_spec(cfg, family)
        delays = np.asarray(cfg["eps_over_T"], dtype=float) * spec.symbol_duration
        stats = xcorr_histogram(spec, delays, bins=int(cfg["hist_bins"]), segments=int(cfg["segments"]))
        mean_rows += [
            (family, frac, mean)
            for frac, mean in zip(stats.delay_fractions, stats.mean_abs)
        ]
        hist_rows += [
            (family, lo, hi, count)
            for lo, hi, count in zip(stats.bin_edges[:-1], stats.bin_edges[1:], stats.counts)
        ]
        print(f"xcorr: {family} N={spec.n_users} done", file=sys.stderr)
    _write_csv(out_dir / "xcorr_mean.csv", ["family", "eps_over_T", "mean_abs_rho"], mean_rows)
    _write_csv(out_dir / "xcorr_hist.csv", ["family", "bin_lo", "bin_hi", "count"], hist_rows)
    names += ["xcorr_mean.csv", "xcorr_hist.csv"]

    if cfg["convergence"] is not None:
        conv = dict(CONVERGENCE_DEFAULTS)
        if isinstance(cfg["convergence"], dict):
            unknown = set(cfg["convergence"]) - set(conv)
            if unknown:
                raise ValueError(f"unknown convergence keys: {sorted(unknown)}")
            conv.update(cfg["convergence"])
        spec = _make_spec(cfg, conv["family"], n_users=conv["n_users"])
        m, k = (int(u) for u in conv["pair"])
        delay = float(conv["eps_over_T"]) * spec.symbol_duration
        reference = xcorr_quadrature(spec, m, k, delay).value
        rows = []
        for n_seg in conv["segments"]:
            approx = xcorr_segmented(spec, m, k, delay, segments=int(n_seg)).value
            rows.append((int(n_seg), abs(approx - reference)))
        _write_csv(out_dir / "xcorr_convergence.csv", ["segments", "abs_error"], rows)
        names.append("xcorr_convergence.csv")
    return names


def cmd_ber(cfg: dict, out_dir: Path) -> list[str]:
    """Analytic BER curves: victim synchronized, all other users delayed.

    ``method`` selects the evaluator: ``exact`` (pattern enumeration),
    ``sampled`` (Monte Carlo over bit patterns), or ``delay_avg``
    (Gaussian-delay average of the exact formula; uses ``sigma_over_T``
    and redraws the same seeded delays at every grid point).
    """
    method = cfg["method"]
    if method not in ("exact", "sampled", "delay_avg"):
        raise ValueError("method must be one of: exact, sampled, delay_avg")
    delay_col = "sigma_over_T" if method == "delay_avg" else "eps_over_T"
    rows = []
    for family in cfg["families"]:
        spec = _make_spec(cfg, family)
        t_sym = spec.symbol_duration
        eps = float(cfg["eps_over_T"]) * t_sym
        sigma = float(cfg["sigma_over_T"]) * t_sym
        profile = InterferenceProfile(
            victim=0,
            interferers=tuple(
                Interferer(user=u, delay=eps) for u in range(1, spec.n_users)
            ),
        )
        for esn0_db in cfg["esn0_db"]:
            esn0 = 10.0 ** (float(esn0_db) / 10.0)
            at_point = profile.at_esn0(esn0)
            if method == "exact":
                point = ber_exact(at_point, spec, segments=int(cfg["segments"]))
            elif method == "sampled":
                point = ber_sampled(
                    at_point,
                    spec,
                    n_samples=int(cfg["n_samples"]),
                    seed=int(cfg["seed"]),
                    segments=int(cfg["segments"]),
                )
            else:
                point = ber_gaussian_delay_avg(
                    at_point,
                    spec,
                    sigma=sigma,
                    n_draws=int(cfg["n_draws"]),
                    seed=int(cfg["seed"]),
                    segments=int(cfg["segments"]),
                )
            delay_val = sigma / t_sym if method == "delay_avg" else eps / t_sym
            ci = "" if point.confidence_halfwidth is None else point.confidence_halfwidth
            rows.append(
                (family, spec.n_users, delay_val, float(esn0_db), point.probability, point.method, ci)
            )
        print(f"ber: {family} N={spec.n_users} method={method} done", file=sys.stderr)
    _write_csv(
        out_dir / "ber.csv",
        ["family", "N", delay_col, "EsN0_dB", "ber", "method", "ci_halfwidth"],
        rows,
    )
    return ["ber.csv"]


def cmd_sim(cfg: dict, out_dir: Path) -> list[str]:
    """Monte Carlo link runs; one aggregate row per family and Eb/N0 point."""
    rows = []
    for family in cfg["families"]:
        spec = _make_spec(cfg, family)
        sigma = float(cfg["sigma_over_T"]) * spec.symbol_duration
        link = LinkConfig(
            spec=spec,
            esn0_db=tuple(float(x) for x in cfg["esn0_db"]),
            n_active=None if cfg["load_k"] is None else int(cfg["load_k"]),
            delay_model=GaussianDelays(sigma),
            bits_per_point=int(cfg["bits_per_point"]),
            target_errors=None if cfg["target_errors"] is None else int(cfg["target_errors"]),
            block_symbols=int(cfg["block_symbols"]),
            seed=int(cfg["seed"]),
        )
        result = run_link_sim(link)
        for idx, point in enumerate(result.aggregate.points):
            rows.append(
                (
                    family,
                    spec.n_users,
                    link.n_active,
                    float(cfg["sigma_over_T"]),
                    float(cfg["esn0_db"][idx]),
                    point.probability,
                    int(result.errors[idx].sum()),
                    int(result.bits[idx].sum()),
                    int(cfg["seed"]),
                )
            )
        print(
            f"sim: {family} N={spec.n_users} K={link.n_active} "
            f"({result.wall_time:.1f}s)",
            file=sys.stderr,
        )
    _write_csv(
        out_dir / "sim.csv",
        ["family", "N", "K", "sigma_over_T", "EbN0_dB", "ber", "errors", "bits", "seed"],
        rows,
    )
    return ["sim.csv"]


_COMMANDS = {
    "waveforms": cmd_waveforms,
    "xcorr": cmd_xcorr,
    "ber": cmd_ber,
    "sim": cmd_sim,
}


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chirpmux",
        description="Chirp signal-set experiments: waveform export, "
        "correlation sweeps, analytic BER, and link simulation.",
    )
    parser.add_argument("--version", action="version", version=f"chirpmux {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("waveforms", "export chirp samples and instantaneous frequency"),
        ("xcorr", "cross-correlation sweeps and histograms"),
        ("ber", "analytic bit error rate curves"),
        ("sim", "Monte Carlo link simulation"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON config (a run manifest also works)")
        sp.add_argument("--family", choices=ALL_FAMILIES)
        sp.add_argument("--n-users", type=int, dest="n_users")
        sp.add_argument("--sigma", type=float, help="delay std dev / T")
        sp.add_argument("--eps", type=_float_list, help="delay(s) / T, comma separated")
        sp.add_argument("--esn0-db", type=_float_list, dest="esn0_db", help="Es/N0 grid in dB")
        sp.add_argument("--load-k", type=int, dest="load_k", help="active users")
        sp.add_argument("--segments", type=int, help="linear segments per symbol")
        sp.add_argument("--bits", type=int, help="bit budget (sim) or pattern draws (ber)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args.command, args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        names = _COMMANDS[args.command](cfg, out_dir)
        _write_manifest(out_dir, args.command, cfg, names)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(names) + 1} files to {out_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
