"""Command-line front end.

Every subcommand is deterministic: given the same config, seed, and
flags it prints the same bytes and writes the same files. Reports carry
no timestamps or environment state, so runs diff cleanly.

Exit codes: 0 on success, 2 for configuration or usage problems, 3 when
an analysis fails at runtime (non-convergent fit, unphysical inversion,
no signal in the data).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, calib, circuit, herald, io, scattering, temporal
from .config import FullConfig, load_config
from .constants import TWO_PI
from .errors import ConfigError, TransducerError
from .model import budget_products, derive_rates, pair_probability, peak_efficiency


def _load(args: argparse.Namespace) -> FullConfig:
    return load_config(args.config)


def _out_dir(args: argparse.Namespace) -> Path | None:
    if args.out is None:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest(out_dir: Path, command: str, cfg: FullConfig,
              settings: dict, outputs: dict[str, str]) -> None:
    io.write_json_report(out_dir / "manifest.json", {
        "command": command,
        "config": cfg.source,
        "settings": settings,
        "outputs": outputs,
        "version": __version__,
    })


def _print_report(title: str, rows: list[tuple[str, str]]) -> None:
    print(title)
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"  {key:<{width}}  {val}")


def cmd_params(args: argparse.Namespace) -> int:
    cfg = _load(args)
    p = cfg.params
    rates = derive_rates(p.optical, p.microwave, p.pump)
    gamma_i = p.mechanical.gamma_i(pump_on=True)
    eta_peak = peak_efficiency(p, rates, gamma_i)
    bw_hz, f_peak = scattering.conversion_bandwidth(p, gamma_i)
    report = {
        "G_o_hz": rates.G_o / TWO_PI,
        "gamma_om_hz": rates.gamma_om / TWO_PI,
        "gamma_mu_hz": rates.gamma_mu / TWO_PI,
        "gamma_i_pump_on_hz": gamma_i / TWO_PI,
        "peak_efficiency": eta_peak,
        "bandwidth_hz": bw_hz,
        "peak_freq_hz": f_peak,
    }
    if p.budget is not None:
        eta_sys, eta_setup = budget_products(p.budget)
        report["eta_sys"] = eta_sys
        report["eta_setup"] = eta_setup
    if p.pump.detuning == "blue":
        report["pair_probability"] = pair_probability(rates, p.pump)
    _print_report("derived transducer parameters", [
        ("pump-enhanced coupling", f"{report['G_o_hz'] / 1e3:.2f} kHz"),
        ("optical damping rate", f"{report['gamma_om_hz'] / 1e3:.2f} kHz"),
        ("microwave damping rate", f"{report['gamma_mu_hz'] / 1e3:.2f} kHz"),
        ("peak efficiency", f"{100 * eta_peak:.3f} %"),
        ("conversion bandwidth", f"{bw_hz / 1e6:.3f} MHz"),
    ])
    out = _out_dir(args)
    if out is not None:
        io.write_json_report(out / "params.json", report)
        _manifest(out, "params", cfg, {}, {"report": "params.json"})
    return 0


def cmd_spectra(args: argparse.Namespace) -> int:
    cfg = _load(args)
    p = cfg.params
    span = args.span_hz if args.span_hz is not None else cfg.spectra["span_hz"]
    points = args.points if args.points is not None else int(cfg.spectra["points"])
    f_m = p.mechanical.omega / TWO_PI
    freqs = np.linspace(f_m - span / 2.0, f_m + span / 2.0, points)
    gamma_on = p.mechanical.gamma_i(pump_on=True)
    gamma_off = p.mechanical.gamma_i(pump_on=False)
    curves = {
        "s_oo": scattering.s_oo(p, freqs, gamma_on),
        "s_mumu_pump_on": scattering.s_mumu(p, freqs, gamma_on, pump_on=True),
        "s_mumu_pump_off": scattering.s_mumu(p, freqs, gamma_off, pump_on=False),
        "s_conversion": scattering.s_conversion(p, freqs, gamma_on),
    }
    peak = float(np.max(np.abs(curves["s_conversion"]) ** 2))
    _print_report("scattering spectra", [
        ("grid", f"{points} points over {span / 1e6:.1f} MHz"),
        ("peak |S_conv|^2", f"{peak:.5f}"),
    ])
    out = _out_dir(args)
    if out is not None:
        outputs = {}
        for name, vals in curves.items():
            fname = f"{name}.csv"
            io.write_complex_csv(out / fname, "freq_hz", freqs, vals)
            outputs[name] = fname
        _manifest(out, "spectra", cfg, {"span_hz": span, "points": points},
                  outputs)
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _load(args)
    p = cfg.params
    freqs, data = io.read_complex_csv(args.data)
    gamma0 = p.mechanical.gamma_i(pump_on=not args.pump_off)
    result = scattering.fit_spectrum(
        freqs, data, args.kind, p, gamma0,
        free=tuple(args.free) if args.free else None,
        pump_on=not args.pump_off)
    rows = []
    for name in result.free:
        val = result.values[name]
        err = result.stderr[name]
        rows.append((name, f"{val / TWO_PI:.6g} +/- {err / TWO_PI:.2g} Hz"))
    rows.append(("residual rms", f"{result.residual_rms:.3e}"))
    _print_report(f"{args.kind} fit ({result.nfev} evaluations)", rows)
    out = _out_dir(args)
    if out is not None:
        io.write_json_report(out / "fit.json", {
            "kind": result.kind,
            "free": list(result.free),
            "values_hz": {k: v / TWO_PI for k, v in result.values.items()},
            "stderr_hz": {k: v / TWO_PI for k, v in result.stderr.items()},
            "residual_rms": result.residual_rms,
            "nfev": result.nfev,
        })
        _manifest(out, "fit", cfg, {"kind": args.kind, "data": str(args.data)},
                  {"report": "fit.json"})
    return 0


def cmd_timedomain(args: argparse.Namespace) -> int:
    cfg = _load(args)
    p = cfg.params
    g = p.microwave.g
    kappa = p.microwave.kappa
    kappa_ext = p.microwave.kappa_ext
    gamma_off = p.mechanical.gamma_i(pump_on=False)
    mode = temporal.emit_single_phonon(g, kappa, kappa_ext, gamma_off,
                                       t_max=args.t_max, dt=args.dt)
    filt = temporal.DemodFilter.exponential(args.bandwidth_hz)
    delay, raw = temporal.optimal_delay(mode, filt)
    matched = mode.extraction_efficiency
    report = {
        "extraction_efficiency": matched,
        "filter_bandwidth_hz": args.bandwidth_hz,
        "optimal_delay_s": delay,
        "filter_overlap": raw,
        "relative_efficiency": raw / matched,
        "energy_total": mode.energy_total,
    }
    rows = [
        ("extracted fraction", f"{matched:.5f}"),
        ("filter overlap", f"{raw:.5f} at delay {delay * 1e9:.1f} ns"),
        ("relative efficiency", f"{raw / matched:.4f}"),
    ]
    noise_res = None
    if args.noise_traj > 0:
        bath = temporal.HeatingBath(**cfg.heating)
        noise_res = temporal.added_noise_mc(
            g, kappa, kappa_ext, gamma_off, bath,
            temporal.DemodFilter.matched(mode),
            t_max=args.t_max, dt=args.dt, n_traj=args.noise_traj,
            seed=args.seed)
        report["added_noise"] = noise_res.n_added
        report["added_noise_stderr"] = noise_res.stderr
        rows.append(("added noise", f"{noise_res.n_added:.3f} "
                     f"+/- {noise_res.stderr:.3f} quanta"))
    _print_report("time-domain readout", rows)
    out = _out_dir(args)
    if out is not None:
        io.write_table_csv(out / "emission.csv", {
            "t_s": mode.times,
            "mech_re": mode.mech.real, "mech_im": mode.mech.imag,
            "out_re": mode.output.real, "out_im": mode.output.imag,
            "cum_ext": mode.cum_ext, "cum_int": mode.cum_int,
        })
        bath = temporal.HeatingBath(**cfg.heating)
        gamma_mu = derive_rates(p.optical, p.microwave, p.pump).gamma_mu
        occ = temporal.heating_trajectory(p.mechanical.gamma_i(pump_on=True),
                                          gamma_mu, bath, mode.times)
        centers, means = temporal.window_means(mode.times, occ, args.window)
        io.write_table_csv(out / "heating.csv", {
            "t_s": centers, "occupation": means,
        })
        io.write_json_report(out / "timedomain.json", report)
        _manifest(out, "timedomain", cfg,
                  {"bandwidth_hz": args.bandwidth_hz, "seed": args.seed,
                   "noise_traj": args.noise_traj},
                  {"emission": "emission.csv", "heating": "heating.csv",
                   "report": "timedomain.json"})
    return 0


def cmd_herald(args: argparse.Namespace) -> int:
    cfg = _load(args)
    ecfg = herald.ExperimentConfig(**cfg.herald)
    acc_ps, acc_all, n_her = herald.simulate_experiment_moments(
        ecfg, args.shots, seed=args.seed)
    report = {
        "shots": args.shots,
        "heralds": n_her,
        "eta_herald": ecfg.eta_herald,
        "mean_power_heralded": acc_ps.mean,
        "mean_power_all": acc_all.mean,
    }
    rows = [
        ("shots", str(args.shots)),
        ("heralds", str(n_her)),
        ("herald purity", f"{ecfg.eta_herald:.4f}"),
    ]
    try:
        res = herald.extract_excess_noise(acc_ps, acc_all, ecfg.n_th,
                                          ecfg.eta_herald, ps_within_all=True)
        report["power_ratio"] = res.ratio
        report["power_ratio_stderr"] = res.ratio_stderr
        report["n_ex"] = res.n_ex
        report["n_ex_stderr"] = res.n_ex_stderr
        rows.append(("power ratio", f"{res.ratio:.4f} +/- {res.ratio_stderr:.4f}"))
        rows.append(("excess noise", f"{res.n_ex:.2f} +/- {res.n_ex_stderr:.2f}"))
    except TransducerError as exc:
        report["extraction_error"] = str(exc)
        rows.append(("extraction", f"failed: {exc}"))
    _print_report("heralded quadrature experiment", rows)
    out = _out_dir(args)
    if out is not None:
        outputs = {"report": "herald.json"}
        if args.shots <= args.csv_limit:
            data = herald.simulate_experiment(ecfg, args.shots, seed=args.seed)
            data.to_csv(out / "shots.csv")
            outputs["shots"] = "shots.csv"
        io.write_json_report(out / "herald.json", report)
        _manifest(out, "herald", cfg, {"shots": args.shots, "seed": args.seed},
                  outputs)
    return 0


def cmd_calib(args: argparse.Namespace) -> int:
    cfg = _load(args)
    p = cfg.params
    budget = p.budget
    noise = p.noise
    if budget is None or noise is None:
        raise ConfigError("calibration needs [budget] and [noise] sections")
    n_referred = calib.added_noise_referred(cfg.calib["n_out"],
                                            cfg.calib["eta_end_to_end"])
    n_ex_model = calib.excess_noise_decomposition(budget.eta_mum, budget.eta_d,
                                                  noise.n_n, noise.n_m)
    n_room = calib.room_temp_reference(p.microwave.omega)
    report = {
        "added_noise_referred": n_referred,
        "excess_noise_model": n_ex_model,
        "excess_noise_measured": noise.n_ex,
        "room_temp_occupation": n_room,
    }
    _print_report("noise calibration", [
        ("input-referred added noise", f"{n_referred:.1f} quanta"),
        ("excess noise, model", f"{n_ex_model:.2f} quanta"),
        ("excess noise, measured", f"{noise.n_ex:.2f} quanta"),
        ("room-temperature reference", f"{n_room:.1f} quanta"),
    ])
    out = _out_dir(args)
    if out is not None:
        io.write_json_report(out / "calib.json", report)
        _manifest(out, "calib", cfg, {}, {"report": "calib.json"})
    return 0


def cmd_circuit(args: argparse.Namespace) -> int:
    cfg = _load(args)
    rlc, c_0, bond, line = circuit.circuit_from_config(cfg.circuit)
    f0, q, linewidth = rlc.resonance()
    coupling = circuit.coupling_rate(rlc, c_0, bond, line,
                                     topology=args.topology)
    kappa_est = circuit.kappa_line_leakage(line)
    report = {
        "f0_hz": f0,
        "quality_factor": q,
        "linewidth_hz": linewidth,
        "coupling_g_hz": coupling.g / TWO_PI,
        "gamma_wg_hz": coupling.gamma_wg / TWO_PI,
        "kappa_leakage_hz": kappa_est / TWO_PI,
        "line_fsr_hz": line.fsr_hz,
        "topology": args.topology,
    }
    _print_report("readout circuit", [
        ("mechanical resonance", f"{f0 / 1e9:.4f} GHz"),
        ("quality factor", f"{q:.0f}"),
        ("intrinsic linewidth", f"{linewidth / 1e3:.1f} kHz"),
        ("coupling rate", f"{coupling.g / TWO_PI / 1e3:.1f} kHz"),
        ("line leakage estimate", f"{kappa_est / TWO_PI / 1e6:.2f} MHz"),
    ])
    out = _out_dir(args)
    if out is not None:
        outputs = {"report": "circuit.json"}
        if args.sweep is not None:
            lo, hi, num = args.sweep
            lengths = np.linspace(lo, hi, int(num))
            g_sweep = circuit.coupling_vs_length(rlc, c_0, bond, line, lengths,
                                                 topology=args.topology)
            io.write_table_csv(out / "coupling_sweep.csv", {
                "length_m": lengths, "g_hz": g_sweep / TWO_PI,
            })
            outputs["sweep"] = "coupling_sweep.csv"
        io.write_json_report(out / "circuit.json", report)
        _manifest(out, "circuit", cfg, {"topology": args.topology}, outputs)
    return 0


def _parse_sweep(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("sweep must be lo:hi:points")
    return float(parts[0]), float(parts[1]), float(parts[2])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transducersim",
        description="Microwave-optical transducer simulation toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", default=None,
                        help="device config TOML (default: bundled device)")
        sp.add_argument("--out", default=None,
                        help="directory for CSV/JSON outputs")

    sp = sub.add_parser("params", help="derived rates and peak efficiency")
    common(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("spectra", help="scattering spectra to CSV")
    common(sp)
    sp.add_argument("--span-hz", type=float, default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.set_defaults(func=cmd_spectra)

    sp = sub.add_parser("fit", help="fit a measured complex spectrum")
    common(sp)
    sp.add_argument("--data", required=True, help="complex spectrum CSV")
    sp.add_argument("--kind", required=True,
                    choices=("oo", "mumu", "conversion"))
    sp.add_argument("--free", nargs="*", default=None,
                    help="override the free parameter set")
    sp.add_argument("--pump-off", action="store_true")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("timedomain", help="phonon readout and demodulation")
    common(sp)
    sp.add_argument("--bandwidth-hz", type=float, default=5e6)
    sp.add_argument("--t-max", type=float, default=3e-6)
    sp.add_argument("--dt", type=float, default=1e-9)
    sp.add_argument("--window", type=float, default=48e-9)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise-traj", type=int, default=0,
                    help="added-noise Monte Carlo trajectories (0 to skip)")
    sp.set_defaults(func=cmd_timedomain)

    sp = sub.add_parser("herald", help="heralded quadrature statistics")
    common(sp)
    sp.add_argument("--shots", type=int, default=200000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv-limit", type=int, default=2_000_000,
                    help="write the shot record only below this size")
    sp.set_defaults(func=cmd_herald)

    sp = sub.add_parser("calib", help="noise budget calibration")
    common(sp)
    sp.set_defaults(func=cmd_calib)

    sp = sub.add_parser("circuit", help="readout circuit model")
    common(sp)
    sp.add_argument("--topology", default="c0_before_bond",
                    choices=("c0_before_bond", "c0_after_bond"))
    sp.add_argument("--sweep", type=_parse_sweep, default=None,
                    metavar="LO:HI:POINTS", help="bond length sweep to CSV")
    sp.set_defaults(func=cmd_circuit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 2
    except TransducerError as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
