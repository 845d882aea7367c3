"""Command-line interface.

Subcommands: nuclides, spectrum, sweep, validate. Physical flags carry
explicit unit suffixes; option precedence is defaults < config file < flags;
the fully resolved configuration is embedded in every output file. Exit
codes: 0 success, 1 validation failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from io import StringIO
from pathlib import Path

import numpy as np

from .errors import DomainError, InputError, NuclideFormatError, UnknownNuclideError
from .franck_condon import validity
from .nuclides import builtin_gamma_mhz, builtin_nuclides, get_nuclide, load_nuclides, phonon_bounds, round_sig_figs
from .optomech import OptomechConfig, derive, zero_point_fluctuation
from .spectrum import LineParams, default_grid, dip_metrics, find_peaks, make_snapshot, spectrum_for
from .units import TWO_PI
from .validation import run_validation

_PHYSICS_OPTIONS = {
    # dest: (flag, type, default, help)
    "mass_ug": ("--mass-ug", float, 0.14, "lever mass in micrograms"),
    "length_mm": ("--length-mm", float, 25.0, "cavity length in millimeters"),
    "omega0_mhz_2pi": ("--omega0-mhz-2pi", float, 0.95, "inherent phonon frequency, as 2*pi x MHz"),
    "gamma0_khz_2pi": ("--gamma0-khz-2pi", float, 0.14, "inherent mechanical damping, as 2*pi x kHz"),
    "kappa_mhz_2pi": ("--kappa-mhz-2pi", float, 0.2, "cavity decay rate, as 2*pi x MHz"),
    "omega_c_rad_s": ("--omega-c-rad-s", float, 1e15, "cavity angular frequency in rad/s"),
    "power_nw": ("--power-nw", float, 0.0, "drive laser power in nanowatts"),
    "delta_c_rad_s": ("--delta-c-rad-s", float, None, "laser-cavity detuning in rad/s (default: -omega_m)"),
    "omega_rabi_rad_s": ("--omega-rabi-rad-s", float, None, "x-ray Rabi frequency in rad/s (default: 1e-3 G)"),
    "n": ("--n", float, 5e6, "phonon occupation"),
    "v": ("--v", float, None, "cavity photon fluctuation occupation (default: mean photon number)"),
    "g0_hz_2pi": ("--g0-hz-2pi", float, 3.9, "vacuum optomechanical coupling, as 2*pi x Hz"),
    "coupling_g_hz_2pi": ("--coupling-g-hz-2pi", float, None, "direct override of the linearized coupling G, as 2*pi x Hz"),
}

_COMMON_OPTIONS = {
    "gamma_convention": ("--gamma-convention", str, "hz", "linewidth column interpretation: hz (2*pi x MHz) or rad_s"),
    "nuclides_file": ("--nuclides-file", str, None, "JSON file with extra nuclides"),
    "grid_points": ("--grid-points", int, 10001, "number of detuning grid points"),
    "grid_span_omega_m": ("--grid-span-omega-m", float, 3.0, "half-width of the grid in units of omega_m"),
}


def _add_options(parser: argparse.ArgumentParser, table: dict, flags_only: set[str] | None = None) -> None:
    for dest, (flag, typ, _default, help_text) in table.items():
        if flags_only and dest not in flags_only:
            continue
        if typ is str and dest == "gamma_convention":
            parser.add_argument(flag, dest=dest, choices=("hz", "rad_s"), default=None, help=help_text)
        else:
            parser.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)


def _resolve(args: argparse.Namespace, tables: list[dict]) -> dict:
    """defaults < config file < explicit flags."""
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise InputError("config file must hold a JSON object")
    resolved = {}
    for table in tables:
        for dest, (_flag, _typ, default, _help) in table.items():
            value = getattr(args, dest, None)
            if value is None and dest in file_values:
                value = file_values[dest]
            if value is None:
                value = default
            resolved[dest] = value
    unknown = set(file_values) - set(resolved) - {"normalize"}
    if unknown:
        raise InputError(f"config file has unknown keys: {sorted(unknown)}")
    if "normalize" in file_values and not getattr(args, "normalize", None):
        resolved["normalize"] = bool(file_values["normalize"])
    return resolved


def _build_config(opts: dict, explicit_g: bool, explicit_power: bool, g0_from_geometry: bool) -> OptomechConfig:
    if explicit_g and explicit_power:
        raise InputError("specify either --power-nw or --coupling-g-hz-2pi, not both")
    if g0_from_geometry and opts.get("_g0_explicit"):
        raise InputError("specify either --g0-hz-2pi or --g0-from-geometry, not both")
    return OptomechConfig(
        mass_kg=opts["mass_ug"] * 1e-9,
        length_m=opts["length_mm"] * 1e-3,
        omega0=TWO_PI * opts["omega0_mhz_2pi"] * 1e6,
        gamma0=TWO_PI * opts["gamma0_khz_2pi"] * 1e3,
        kappa=TWO_PI * opts["kappa_mhz_2pi"] * 1e6,
        omega_c=opts["omega_c_rad_s"],
        power_w=opts["power_nw"] * 1e-9,
        delta_c=opts["delta_c_rad_s"],
        omega_rabi=opts["omega_rabi_rad_s"],
        n_phonon=opts["n"],
        v_photon=opts["v"],
        g0=None if g0_from_geometry else TWO_PI * opts["g0_hz_2pi"],
        g_override=None if opts["coupling_g_hz_2pi"] is None else TWO_PI * opts["coupling_g_hz_2pi"],
    )


def _nuclide_pool(opts: dict):
    extra = []
    if opts.get("nuclides_file"):
        extra = load_nuclides(Path(opts["nuclides_file"]), gamma_convention=opts["gamma_convention"])
    return extra


def cmd_nuclides(args: argparse.Namespace) -> int:
    opts = _resolve(args, [_PHYSICS_OPTIONS, _COMMON_OPTIONS])
    extra = _nuclide_pool(opts)
    if args.nuclide:
        pool = [get_nuclide(args.nuclide, opts["gamma_convention"], extra)]
    else:
        pool = extra + builtin_nuclides(opts["gamma_convention"])
    mass_kg = opts["mass_ug"] * 1e-9
    omega0 = TWO_PI * opts["omega0_mhz_2pi"] * 1e6
    y_zpf = zero_point_fluctuation(mass_kg, omega0)
    n = opts["n"]
    header = f"{'nuclide':<8} {'E (keV)':>10} {'Gamma (rad/s)':>14} {'eta':>11} {'n_min':>10} {'n_max':>10} {'validity':>9}"
    print(header)
    print("-" * len(header))
    for nuc in pool:
        eta = nuc.k_x * y_zpf
        bounds = phonon_bounds(eta)
        flag = validity(eta, n).value
        print(
            f"{nuc.name:<8} {nuc.energy_ev / 1e3:>10.6g} {nuc.gamma:>14.4g} "
            f"{eta:>11.4g} {round_sig_figs(bounds.n_min):>10.3g} {round_sig_figs(bounds.n_max):>10.3g} {flag:>9}"
        )
    return 0


def _spectrum_output(spec, fmt: str, path: Path) -> None:
    text = spec.to_csv() if fmt == "csv" else spec.to_json()
    path.write_text(text, encoding="utf-8")


def cmd_spectrum(args: argparse.Namespace) -> int:
    opts = _resolve(args, [_PHYSICS_OPTIONS, _COMMON_OPTIONS])
    opts["_g0_explicit"] = args.g0_hz_2pi is not None
    config = _build_config(
        opts,
        explicit_g=args.coupling_g_hz_2pi is not None,
        explicit_power=args.power_nw is not None,
        g0_from_geometry=bool(args.g0_from_geometry),
    )
    nuc = get_nuclide(args.nuclide, opts["gamma_convention"], _nuclide_pool(opts))
    spec = spectrum_for(
        config, nuc,
        points=opts["grid_points"], span=opts["grid_span_omega_m"],
        normalize=bool(getattr(args, "normalize", False) or opts.get("normalize", False)),
    )
    spec.snapshot["gamma_convention"] = opts["gamma_convention"]

    fmt = args.format
    out = Path(args.output or f"spectrum_{nuc.name}.{fmt}")
    _spectrum_output(spec, fmt, out)

    derived = derive(config, nuc)
    p = LineParams.from_derived(derived)
    metrics = dip_metrics(config.n_phonon, p)
    print(f"wrote {out}")
    print(f"nuclide {nuc.name}: omega_m = {derived.omega_m:.6g} rad/s, s = {derived.s:.6g} rad/s, "
          f"G = {derived.g:.6g} rad/s, Omega = {derived.omega_rabi:.6g} rad/s")
    print(f"dip: center absorption = {metrics.center_absorption:.6g}, contrast = {metrics.contrast:.4f}, "
          f"split = {metrics.split if metrics.split is not None else 'unsplit'}")
    peaks = find_peaks(spec.delta, spec.absorption)
    peaks.sort(key=lambda t: -t[1])
    print("peaks (delta/omega_m, height):")
    for x, h in peaks[:9]:
        print(f"  {x / derived.omega_m:+8.4f}  {h:.6g}")
    for warning in derived.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.plot:
        from .plotting import plot_spectrum

        reference = None
        if derived.g > 0:
            from dataclasses import replace

            reference = spectrum_for(
                replace(config, power_w=0.0, g_override=None), nuc,
                points=opts["grid_points"], span=opts["grid_span_omega_m"],
                normalize=bool(getattr(args, "normalize", False)),
            )
        plot_spectrum(spec, args.plot, reference=reference)
        print(f"wrote {args.plot}")
    return 0


_SWEEP_SETTERS = {
    "power_nw": lambda cfg, x: {"power_w": x * 1e-9},
    "n": lambda cfg, x: {"n_phonon": x},
    "v": lambda cfg, x: {"v_photon": x},
    "omega_rabi_rad_s": lambda cfg, x: {"omega_rabi": x},
    "kappa_mhz_2pi": lambda cfg, x: {"kappa": TWO_PI * x * 1e6},
}


def cmd_sweep(args: argparse.Namespace) -> int:
    from dataclasses import replace

    opts = _resolve(args, [_PHYSICS_OPTIONS, _COMMON_OPTIONS])
    opts["_g0_explicit"] = args.g0_hz_2pi is not None
    if args.variable not in _SWEEP_SETTERS:
        raise InputError(f"unknown sweep variable {args.variable!r}; choose from {sorted(_SWEEP_SETTERS)}")
    if args.values:
        try:
            values = [float(tok) for tok in args.values.split(",") if tok.strip()]
        except ValueError as exc:
            raise InputError(f"cannot parse --values: {exc}") from exc
    elif args.sweep_from is not None and args.sweep_to is not None and args.count:
        values = list(np.linspace(args.sweep_from, args.sweep_to, args.count))
    else:
        raise InputError("sweep needs --values or --from/--to/--count")
    if len(values) < 2:
        raise InputError(f"sweep needs at least 2 values, got {len(values)}")

    base = _build_config(
        opts,
        explicit_g=args.coupling_g_hz_2pi is not None,
        explicit_power=args.power_nw is not None,
        g0_from_geometry=bool(args.g0_from_geometry),
    )
    nuc = get_nuclide(args.nuclide, opts["gamma_convention"], _nuclide_pool(opts))

    rows = []
    validity_flags = {}
    for value in values:
        config = replace(base, **_SWEEP_SETTERS[args.variable](base, value))
        derived = derive(config, nuc)
        p = LineParams.from_derived(derived)
        grid = default_grid(derived.omega_m, points=opts["grid_points"], span=opts["grid_span_omega_m"])
        from .spectrum import absorption

        vals = absorption(grid, config.n_phonon, p)
        metrics = dip_metrics(config.n_phonon, p)
        validity_flags[value] = validity(derived.eta, config.n_phonon).value
        for dlt, ab in zip(grid, vals):
            rows.append({
                "sweep_variable": args.variable,
                "sweep_value": value,
                "delta_rad_s": float(dlt),
                "delta_over_omega_m": float(dlt / derived.omega_m),
                "absorption": float(ab),
                "dip_center_absorption": metrics.center_absorption,
                "dip_contrast": metrics.contrast,
                "dip_split_rad_s": metrics.split,
            })

    out = Path(args.output or f"sweep_{args.variable}_{nuc.name}.csv")
    buf = StringIO()
    cols = ["sweep_variable", "sweep_value", "delta_rad_s", "delta_over_omega_m",
            "absorption", "dip_center_absorption", "dip_contrast", "dip_split_rad_s"]
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join("" if row[c] is None else (row[c] if isinstance(row[c], str) else repr(row[c])) for c in cols) + "\n")
    out.write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {out} ({len(values)} sweep values x {opts['grid_points']} points)")
    print(f"{'value':>12}  {'contrast':>9}  {'split (rad/s)':>14}  validity")
    for value in values:
        row = next(r for r in rows if r["sweep_value"] == value)
        split = f"{row['dip_split_rad_s']:.6g}" if row["dip_split_rad_s"] is not None else "unsplit"
        print(f"{value:>12.6g}  {row['dip_contrast']:>9.4f}  {split:>14}  {validity_flags[value]}")
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(rows, args.variable, args.plot)
        print(f"wrote {args.plot}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    report = run_validation(inject_failure=args.inject_failure)
    for line in report.summary_lines():
        print(line)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
        print(f"wrote {args.report}")
    if not report.all_passed:
        print("failed criteria: " + ", ".join(report.failed_names()), file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xomit",
        description="Optomechanically tunable nuclear x-ray/VUV absorption spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_nuc = sub.add_parser("nuclides", help="list built-in or user nuclides with Lamb-Dicke diagnostics")
    p_nuc.add_argument("--nuclide", help="show a single nuclide")
    p_nuc.add_argument("--config", help="JSON config file")
    _add_options(p_nuc, _PHYSICS_OPTIONS, flags_only={"mass_ug", "omega0_mhz_2pi", "n"})
    _add_options(p_nuc, _COMMON_OPTIONS)
    p_nuc.set_defaults(func=cmd_nuclides)

    p_spec = sub.add_parser("spectrum", help="compute an absorption spectrum")
    p_spec.add_argument("--nuclide", required=True)
    p_spec.add_argument("--config", help="JSON config file")
    p_spec.add_argument("--output", help="output path (default spectrum_<nuclide>.<fmt>)")
    p_spec.add_argument("--format", choices=("csv", "json"), default="csv")
    p_spec.add_argument("--normalize", action="store_const", const=True, default=None,
                        help="scale so the uncoupled zero-phonon peak is 1")
    p_spec.add_argument("--plot", help="also render a PNG figure to this path")
    p_spec.add_argument("--g0-from-geometry", action="store_true",
                        help="derive the vacuum coupling from omega_c * Y_ZPF / L instead of the pinned value")
    _add_options(p_spec, _PHYSICS_OPTIONS)
    _add_options(p_spec, _COMMON_OPTIONS)
    p_spec.set_defaults(func=cmd_spectrum)

    p_sweep = sub.add_parser("sweep", help="sweep one variable and emit a long-form CSV")
    p_sweep.add_argument("--nuclide", required=True)
    p_sweep.add_argument("--config", help="JSON config file")
    p_sweep.add_argument("--variable", required=True,
                         help=f"one of {sorted(_SWEEP_SETTERS)}")
    p_sweep.add_argument("--values", help="comma-separated sweep values (in the variable's unit)")
    p_sweep.add_argument("--from", dest="sweep_from", type=float, help="linspace start")
    p_sweep.add_argument("--to", dest="sweep_to", type=float, help="linspace stop")
    p_sweep.add_argument("--count", type=int, help="linspace point count")
    p_sweep.add_argument("--output", help="output CSV path")
    p_sweep.add_argument("--plot", help="also render a PNG figure to this path")
    p_sweep.add_argument("--g0-from-geometry", action="store_true")
    _add_options(p_sweep, _PHYSICS_OPTIONS)
    _add_options(p_sweep, _COMMON_OPTIONS)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the built-in validation suite")
    p_val.add_argument("--report", help="write the machine-readable JSON report here")
    p_val.add_argument("--inject-failure", help=argparse.SUPPRESS)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownNuclideError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InputError, NuclideFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
