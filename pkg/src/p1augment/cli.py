"""Command-line front end: config parsing, dispatch, CSV/JSON emission.

Every command is a pure function of (resolved config, seed, input files):
identical inputs give byte-identical output files. Each emitted table
starts with a provenance header ('#' comment lines) that echoes the tool
version and the full resolved configuration, which is sufficient to rerun
the computation. All user-facing numbers are MHz, Gauss, and microseconds.

Config files are INI-style with one section per command, e.g.

    [levels]
    b_min = 0
    b_max = 100
    points = 101
    orientation = both

CLI flags override config-file values. Unknown keys or sections are
rejected. Exit codes: 0 success, 2 config error, 3 numerical failure,
4 input-data error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from . import __version__
from .augmentation import RfDrive, alpha_sweep
from .deer import Lineshape, SpectrumConfig, broaden, stick_spectrum
from .errors import ConfigError, DataError, NumericalError
from .model import LABELS, OrientationClass, P1Parameters, energy_sweep, label_states
from .rabi import DampedSinusoidParams, RabiTrace, fit_damped_sinusoid, simulate_trace

COMMANDS = ("levels", "deer", "alpha", "rabi_sim", "rabi_fit")

_PARAM_KEYS = [
    ("gamma_e", float, -2.8, "electron gyromagnetic ratio, MHz/G (signed)"),
    ("gamma_n", float, 3.077e-4, "nuclear gyromagnetic ratio, MHz/G (signed)"),
    ("a_par", float, 114.0, "axial hyperfine coupling, MHz"),
    ("a_perp", float, 81.34, "transverse hyperfine coupling, MHz"),
    ("q", float, -4.2, "nuclear quadrupole coupling, MHz"),
]
_DRIVE_KEYS = [
    ("b_rf", float, 1.0, "rf drive amplitude, Gauss"),
    ("rf_polarization", str, "1,0,0", "rf polarization vector in the P1 frame, 'x,y,z'"),
]
_OUTPUT_KEYS = [
    ("output", str, "", "output file path (empty: stdout)"),
    ("format", str, "csv", "output format: csv | json"),
]

# key -> (type, default, help) per command, insertion order = emission order
SCHEMAS = {
    "levels": _PARAM_KEYS
    + [
        ("b_min", float, 0.0, "sweep start field, Gauss"),
        ("b_max", float, 100.0, "sweep end field, Gauss"),
        ("points", int, 101, "number of field points (1 needs b_min == b_max)"),
        ("orientation", str, "both", "orientation class: on | off | both"),
    ]
    + _OUTPUT_KEYS,
    "alpha": _PARAM_KEYS
    + [
        ("b_min", float, 10.0, "sweep start field, Gauss"),
        ("b_max", float, 100.0, "sweep end field, Gauss"),
        ("points", int, 10, "number of field points (1 needs b_min == b_max)"),
        ("orientation", str, "both", "orientation class: on | off | both"),
        ("transition", str, "de", "transition labels, two of a..f, e.g. 'de'"),
    ]
    + _DRIVE_KEYS
    + _OUTPUT_KEYS,
    "deer": _PARAM_KEYS
    + [
        ("field", float, 35.0, "static field magnitude, Gauss"),
    ]
    + _DRIVE_KEYS
    + [
        ("f_min", float, 0.0, "spectrum window start, MHz"),
        ("f_max", float, 500.0, "spectrum window end, MHz"),
        ("samples", int, 2001, "number of spectrum samples"),
        ("linewidth", float, 1.0, "line full width at half maximum, MHz"),
        ("lineshape", str, "lorentzian", "line profile: lorentzian | gaussian"),
        ("amplitude_floor", float, 0.0, "drop stick lines below this amplitude"),
    ]
    + _OUTPUT_KEYS,
    "rabi_sim": [
        ("s0", float, 0.01, "oscillation contrast amplitude"),
        ("t_d", float, 5.0, "decay time, microseconds"),
        ("n", float, 1.0, "stretch exponent of the decay envelope"),
        ("freq", float, 1.0, "Rabi frequency, MHz"),
        ("baseline", float, 0.0, "contrast offset"),
        ("t_max", float, 10.0, "trace length, microseconds"),
        ("points", int, 201, "number of time samples"),
        ("noise_sigma", float, 0.0, "Gaussian noise standard deviation (contrast)"),
        ("seed", int, 0, "random seed for the noise generator"),
    ]
    + _OUTPUT_KEYS,
    "rabi_fit": [
        ("input", str, "", "input trace CSV with header 'time_us,signal'"),
        ("fix_n", str, "", "hold the stretch exponent fixed at this value (empty: free)"),
    ]
    + _OUTPUT_KEYS,
}


def _parse_value(command: str, key: str, text: str, kind):
    try:
        if kind is float:
            return float(text)
        if kind is int:
            return int(text)
        return text
    except ValueError:
        raise ConfigError(
            f"config key '{key}' in [{command}] expects {kind.__name__}, got {text!r}"
        ) from None


def load_config_file(path: str, command: str) -> dict:
    """Read the section for `command`, rejecting unknown sections/keys."""
    parser = configparser.RawConfigParser()
    parser.optionxform = str
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section in parser.sections():
        if section not in COMMANDS:
            raise ConfigError(f"unknown config section [{section}]")
    schema = {key: kind for key, kind, _, _ in SCHEMAS[command]}
    values = {}
    if parser.has_section(command):
        for key, text in parser.items(command):
            if key not in schema:
                raise ConfigError(f"unknown config key '{key}' in [{command}]")
            values[key] = _parse_value(command, key, text, schema[key])
    return values


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Defaults, overlaid by config file, overlaid by explicit CLI flags."""
    config = {key: default for key, _, default, _ in SCHEMAS[command]}
    if args.config:
        config.update(load_config_file(args.config, command))
    for key, kind, _, _ in SCHEMAS[command]:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            config[key] = _parse_value(command, key, str(flag_value), kind)
    return config


def _params_from(config: dict) -> P1Parameters:
    try:
        return P1Parameters(
            gamma_e=config["gamma_e"],
            gamma_n=config["gamma_n"],
            a_par=config["a_par"],
            a_perp=config["a_perp"],
            q=config["q"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _orientations_from(config: dict) -> list:
    choice = config["orientation"].strip().lower()
    table = {
        "on": [OrientationClass.ON_AXIS],
        "off": [OrientationClass.OFF_AXIS],
        "both": [OrientationClass.ON_AXIS, OrientationClass.OFF_AXIS],
    }
    if choice not in table:
        raise ConfigError(f"config key 'orientation' must be on | off | both, got {choice!r}")
    return table[choice]


def _drive_from(config: dict) -> RfDrive:
    text = config["rf_polarization"]
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"config key 'rf_polarization' needs three comma-separated numbers, got {text!r}")
    try:
        vec = tuple(float(p) for p in parts)
        return RfDrive(amplitude=config["b_rf"], polarization=vec)
    except ValueError as exc:
        raise ConfigError(f"config key 'rf_polarization'/'b_rf' invalid: {exc}") from None


def _transition_from(config: dict) -> tuple:
    text = config["transition"].strip().lower()
    if len(text) != 2 or text[0] not in LABELS or text[1] not in LABELS or text[0] == text[1]:
        raise ConfigError(f"config key 'transition' must be two distinct labels a..f, got {text!r}")
    return (text[0], text[1])


# --- output ----------------------------------------------------------------


def format_number(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def provenance_lines(command: str, config: dict) -> list:
    lines = [f"# p1augment {__version__}", f"# command = {command}"]
    for key, _, _, _ in SCHEMAS[command]:
        value = config[key]
        text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"# {key} = {text}")
    return lines


def render_csv(command: str, config: dict, columns, rows) -> str:
    lines = provenance_lines(command, config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_number(cell) for cell in row))
    return "\n".join(lines) + "\n"


def render_json(command: str, config: dict, columns, rows) -> str:
    def cell(value):
        if isinstance(value, float):
            return float(f"{value:.9g}")
        return value

    payload = {
        "tool": "p1augment",
        "version": __version__,
        "command": command,
        "config": {key: config[key] for key, _, _, _ in SCHEMAS[command]},
        "columns": list(columns),
        "rows": [[cell(v) for v in row] for row in rows],
    }
    return json.dumps(payload, indent=1) + "\n"


def emit(command: str, config: dict, columns, rows) -> int:
    fmt = config["format"].strip().lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"config key 'format' must be csv | json, got {fmt!r}")
    text = (render_csv if fmt == "csv" else render_json)(command, config, columns, rows)
    path = config["output"]
    if path:
        with open(path, "w", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


# --- commands ---------------------------------------------------------------


def cmd_levels(config: dict) -> tuple:
    params = _params_from(config)
    orientations = _orientations_from(config)
    b_min, b_max, points = config["b_min"], config["b_max"], config["points"]
    rows = []
    for orientation in orientations:
        if points == 1:
            if b_min != b_max:
                raise ConfigError("points = 1 needs b_min == b_max")
            systems = [label_states(params, b_min, orientation)]
        else:
            try:
                systems = energy_sweep(params, b_min, b_max, points, orientation)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        for sys_ in systems:
            for label in LABELS:
                ms, mi = sys_.asymptotic_id[label]
                rows.append(
                    (
                        sys_.field.magnitude,
                        orientation.value,
                        label,
                        sys_.energies[label],
                        ms,
                        mi,
                    )
                )
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    columns = ("field_G", "orientation", "label", "energy_MHz", "asymptotic_mS", "asymptotic_mI")
    return columns, rows


def cmd_alpha(config: dict) -> tuple:
    params = _params_from(config)
    orientations = _orientations_from(config)
    drive = _drive_from(config)
    transition = _transition_from(config)
    rows = []
    for orientation in orientations:
        try:
            curve = alpha_sweep(
                params,
                config["b_min"],
                config["b_max"],
                config["points"],
                orientation,
                drive,
                transition,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        peak = curve.peak_normalized
        for (field, raw, norm), scaled in zip(curve.samples, peak):
            rows.append(
                (field, orientation.value, transition[0], transition[1], raw, norm, scaled)
            )
    rows.sort(key=lambda r: (r[0], r[1]))
    columns = (
        "field_G",
        "orientation",
        "from_label",
        "to_label",
        "alpha_raw",
        "alpha_norm",
        "alpha_peak_norm",
    )
    return columns, rows


def cmd_deer(config: dict) -> tuple:
    params = _params_from(config)
    drive = _drive_from(config)
    shape_text = config["lineshape"].strip().lower()
    try:
        shape = Lineshape(shape_text)
    except ValueError:
        raise ConfigError(
            f"config key 'lineshape' must be lorentzian | gaussian, got {shape_text!r}"
        ) from None
    try:
        spectrum_config = SpectrumConfig(
            f_min=config["f_min"],
            f_max=config["f_max"],
            samples=config["samples"],
            linewidth=config["linewidth"],
            lineshape=shape,
            amplitude_floor=config["amplitude_floor"],
        )
        sticks = stick_spectrum(params, config["field"], drive)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    spectrum = broaden(sticks, spectrum_config)
    stick_rows = [
        (
            "stick",
            line.frequency_mhz,
            line.amplitude,
            line.transition[0],
            line.transition[1],
            line.kind.value,
            line.orientation.value,
        )
        for line in spectrum.sticks
    ]
    stick_rows.sort(key=lambda r: (r[1], r[6], r[3], r[4]))
    curve_rows = [
        ("curve", freq, value, "", "", "", "")
        for freq, value in zip(spectrum.frequencies_mhz, spectrum.contrast)
    ]
    columns = (
        "row_type",
        "frequency_MHz",
        "value",
        "from_label",
        "to_label",
        "transition_class",
        "orientation",
    )
    return columns, stick_rows + curve_rows


def cmd_rabi_sim(config: dict) -> tuple:
    try:
        model = DampedSinusoidParams(
            s0=config["s0"],
            t_d=config["t_d"],
            n=config["n"],
            omega=2.0 * math.pi * config["freq"],
            baseline=config["baseline"],
        )
        if config["points"] < 8:
            raise ValueError("points must be >= 8")
        times = np.linspace(0.0, config["t_max"], config["points"])
        trace = simulate_trace(model, times, config["noise_sigma"], config["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = [(float(t), float(s)) for t, s in zip(trace.times, trace.signal)]
    return ("time_us", "signal"), rows


def read_trace_csv(path: str) -> RabiTrace:
    """Parse a trace file with header time_us,signal ('#' lines ignored)."""
    try:
        with open(path) as handle:
            raw_lines = handle.readlines()
    except OSError as exc:
        raise DataError(f"cannot read trace file {path!r}: {exc}") from None
    body = [
        (i + 1, line.strip())
        for i, line in enumerate(raw_lines)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not body:
        raise DataError(f"trace file {path!r} is empty")
    header_no, header = body[0]
    if [c.strip() for c in header.split(",")] != ["time_us", "signal"]:
        raise DataError(
            f"trace file {path!r} line {header_no}: expected header 'time_us,signal', got {header!r}"
        )
    times, signal = [], []
    for line_no, line in body[1:]:
        cells = line.split(",")
        if len(cells) != 2:
            raise DataError(
                f"trace file {path!r} line {line_no}: expected 2 columns, got {len(cells)}"
            )
        for col, (name, store) in enumerate((("time_us", times), ("signal", signal)), start=1):
            try:
                store.append(float(cells[col - 1]))
            except ValueError:
                raise DataError(
                    f"trace file {path!r} line {line_no}, column {col} ({name}): "
                    f"could not parse {cells[col - 1]!r}"
                ) from None
    try:
        return RabiTrace(times=np.asarray(times), signal=np.asarray(signal))
    except ValueError as exc:
        raise DataError(f"trace file {path!r}: {exc}") from None


def cmd_rabi_fit(config: dict) -> tuple:
    if not config["input"]:
        raise ConfigError("rabi_fit needs an input trace file (key 'input')")
    trace = read_trace_csv(config["input"])
    fix_n = None
    if str(config["fix_n"]).strip():
        fix_n = _parse_value("rabi_fit", "fix_n", str(config["fix_n"]), float)
    try:
        fit = fit_damped_sinusoid(trace, fix_n=fix_n)
    except ValueError as exc:
        raise DataError(f"trace file {config['input']!r}: {exc}") from None
    p, err = fit.params, fit.std_errors
    two_pi = 2.0 * math.pi
    row = (
        p.s0,
        err["s0"],
        p.t_d,
        err["t_d"],
        p.n,
        err["n"],
        p.frequency_mhz,
        err["omega"] / two_pi,
        p.baseline,
        err["baseline"],
        fit.residual_rms,
        fit.converged,
        fit.iterations,
    )
    columns = (
        "s0",
        "s0_err",
        "t_d_us",
        "t_d_err",
        "n",
        "n_err",
        "freq_MHz",
        "freq_err",
        "baseline",
        "baseline_err",
        "residual_rms",
        "converged",
        "iterations",
    )
    return columns, [row]


_HANDLERS = {
    "levels": cmd_levels,
    "alpha": cmd_alpha,
    "deer": cmd_deer,
    "rabi_sim": cmd_rabi_sim,
    "rabi_fit": cmd_rabi_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p1augment",
        description="P1-center spin physics: levels, DEER spectra, augmentation, Rabi fits.",
    )
    parser.add_argument("--version", action="version", version=f"p1augment {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "levels": "field-swept energy levels of the labeled eigenstates",
        "alpha": "gyromagnetic augmentation factor over a field sweep",
        "deer": "DEER stick spectrum and broadened curve at one field",
        "rabi_sim": "simulate a damped Rabi oscillation trace",
        "rabi_fit": "fit the damped-sinusoid model to a trace file",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(
            command.replace("_", "-"), help=descriptions[command], description=descriptions[command]
        )
        sub.set_defaults(command=command)
        sub.add_argument("--config", help="INI config file with a [%s] section" % command)
        for key, kind, default, help_text in SCHEMAS[command]:
            sub.add_argument(
                f"--{key.replace('_', '-')}",
                dest=key,
                default=None,
                help=f"{help_text} (default: {default!r})",
                type=str if kind is str else kind,
            )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args.command, args)
        columns, rows = _HANDLERS[args.command](config)
        return emit(args.command, config, columns, rows)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
