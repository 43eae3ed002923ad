"""``icec`` command line: states, xsec, thermal, spectrum, validate.

All files are written in eV / Mb with a ``#`` metadata header (CSV) or a
``metadata`` object (JSON).  Output depends only on the configuration, so
repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT_ENERGIES, DEFAULT_TEMPERATURES, load_config, parse_energy_grid
from .constants import EV, MB
from .errors import ConfigurationError, DomainError, TableParseError
from .morse import dissociative_states

FLOAT = "{:.16e}"


def _metadata(config, command, **extra):
    meta = {
        "code": "icec",
        "version": __version__,
        "command": command,
        "config_source": config.source,
        "config_hash": config.digest(),
        "CALIBRATION-REQUIRED": not config.calibrated,
        "units": "energies eV, cross sections Mb, differential Mb/eV",
        "parameters": config.physics_parameters(),
    }
    meta.update(extra)
    return meta


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT.format(float(v))


def render(meta, columns, rows, fmt):
    if fmt == "json":
        doc = {"metadata": meta, "columns": list(columns),
               "rows": [[float(x) if not isinstance(x, (bool, int, np.integer)) else x for x in r] for r in rows]}
        return json.dumps(doc, indent=1, sort_keys=True, default=_json_default) + "\n"
    buf = io.StringIO()
    for key in sorted(meta):
        value = meta[key]
        if not isinstance(value, str):
            value = json.dumps(value, sort_keys=True, default=_json_default)
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    return str(o)


def emit(text, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- commands ----------------------------------------------------------------


def cmd_states(config, args):
    model = config.build_model()
    label = args.surface.upper()
    if label not in model.surfaces:
        raise ConfigurationError(f"unknown surface {args.surface!r}; choose from {', '.join(sorted(model.surfaces))}")
    s = model.surfaces[label]
    bound = model.bound_states(s)
    e_max = args.emax * EV
    n_box = len([b for b in dissociative_states(s, model.grid, e_max=e_max)
                 if b.energy_rel_asymptote <= e_max])
    rows = [(b.index, b.energy_rel_min / EV, b.energy_rel_asymptote / EV, b.box_unreliable) for b in bound]
    meta = _metadata(config, "states", surface=label, box_states_below_emax=n_box, emax_eV=args.emax)
    return render(meta, ["n", "energy_rel_min_eV", "energy_rel_asymptote_eV", "box_unreliable"], rows,
                  config.format)


def _energies(config, args, channel):
    if args.energies:
        return parse_energy_grid(args.energies)
    return config.energy_grid(channel.name)


def cmd_xsec(config, args):
    model = config.build_model()
    ch = model.channel(args.channel)
    nu = model.initial_state(ch.initial, args.nu_i)
    grid = _energies(config, args, ch)
    model.prepare(ch, grid[-1] * EV)
    rows = []
    for e in grid:
        bb, bd = model.total_cross_section(ch, e * EV, nu)
        rows.append((e, bb / MB, bd / MB, (bb + bd) / MB, model.pr_reference(ch, e * EV) / MB))
    meta = _metadata(config, "xsec", channel=ch.name, nu_i=args.nu_i, energies=_grid_label(args, config, ch))
    return render(meta, ["epsilon_eV", "sigma_bb_Mb", "sigma_bd_Mb", "sigma_total_Mb", "sigma_PR_Mb"], rows,
                  config.format)


def cmd_thermal(config, args):
    model = config.build_model()
    ch = model.channel(args.channel)
    temps = args.temperatures if args.temperatures is not None else config.temperatures
    if any(t < 0 for t in temps):
        raise ConfigurationError("temperatures must be non-negative")
    grid = _energies(config, args, ch)
    model.prepare(ch, grid[-1] * EV)
    rows = []
    for e in grid:
        row = [e]
        row += [model.thermal_cross_section(ch, e * EV, t) / MB for t in temps]
        row.append(model.pr_reference(ch, e * EV) / MB)
        rows.append(row)
    cols = ["epsilon_eV"] + [f"sigma_{_fmt_t(t)}K_Mb" for t in temps] + ["sigma_PR_Mb"]
    meta = _metadata(config, "thermal", channel=ch.name, temperatures_K=list(temps),
                     energies=_grid_label(args, config, ch))
    return render(meta, cols, rows, config.format)


def _fmt_t(t):
    return f"{t:g}"


def _grid_label(args, config, channel):
    return args.energies or config.energies or DEFAULT_ENERGIES[channel.name]


def cmd_spectrum(config, args):
    """Returns {suffix: text}; suffixes 'sticks', 'continuum' and optionally 'reflection'."""
    model = config.build_model()
    ch = model.channel(args.channel)
    eps = args.energy * EV
    nu = model.initial_state(ch.initial, args.nu_i)
    res = model.spectrum(ch, eps, nu)
    common = dict(channel=ch.name, nu_i=args.nu_i, epsilon_eV=args.energy, closed=res.closed,
                  sigma_PR_Mb=res.pr_reference / MB, display_threshold_Mb=res.display_threshold / MB,
                  sigma_total_bb_Mb=res.sigma_total_bb / MB, sigma_total_bd_Mb=res.sigma_total_bd / MB)
    sticks = [(int(lv), ep / EV, s / MB) for lv, (ep, s) in zip(res.stick_levels, res.sticks)]
    cont = [(ep / EV, ds / MB * EV, w / EV) for (ep, ds), w in zip(res.continuum, res.continuum_weights)]
    out = {
        "sticks": render(_metadata(config, "spectrum", part="sticks", **common),
                         ["nu_f", "epsilon_prime_eV", "sigma_Mb"], sticks, config.format),
        "continuum": render(_metadata(config, "spectrum", part="continuum", **common),
                            ["epsilon_prime_eV", "dsigma_dE_Mb_per_eV", "bin_width_eV"], cont, config.format),
    }
    if args.reflection:
        rp = model.reflection_principle_spectrum(ch, eps, nu)
        out["reflection"] = render(_metadata(config, "spectrum", part="reflection", **common),
                                   ["epsilon_prime_eV", "relative_intensity"],
                                   [(a / EV, b) for a, b in rp], config.format)
    return out


def cmd_validate(config, args):
    from .validate import run_suite

    checks = run_suite(config)
    lines = [c.line() for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", ok


# -- entry point -------------------------------------------------------------


def _temperatures(text):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad temperature list {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="icec", description="Vibrationally resolved ICEC cross sections for (HeNe)+.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML configuration (default: $ICEC_CONFIG or built-in values)")
        sp.add_argument("--output", help="output file; '-' or omitted for stdout")
        sp.add_argument("--format", choices=["csv", "json"], help="output format (overrides the config)")

    sp = sub.add_parser("states", help="bound levels and box-state count of one surface")
    sp.add_argument("surface", help="X, A or B")
    sp.add_argument("--emax", type=float, default=1.0, help="KER limit in eV for the box-state count")
    common(sp)

    sp = sub.add_parser("xsec", help="total cross section vs incoming energy")
    sp.add_argument("--channel", required=True, help="X-B, B-X, A-B or B-A")
    sp.add_argument("--nu-i", type=int, default=0)
    sp.add_argument("--energies", help="start:stop:step in eV (start excluded)")
    common(sp)

    sp = sub.add_parser("thermal", help="Boltzmann-averaged cross section")
    sp.add_argument("--channel", required=True)
    sp.add_argument("--temperatures", type=_temperatures, help=f"comma list in K (default {DEFAULT_TEMPERATURES})")
    sp.add_argument("--energies")
    common(sp)

    sp = sub.add_parser("spectrum", help="outgoing-electron spectrum at one incoming energy")
    sp.add_argument("--channel", required=True)
    sp.add_argument("--energy", type=float, required=True, help="incoming electron energy in eV")
    sp.add_argument("--nu-i", type=int, default=0)
    sp.add_argument("--reflection", action="store_true", help="also write the reflection-principle estimate")
    common(sp)

    sp = sub.add_parser("validate", help="run the oracle suite; exit status 1 on any failure")
    sp.add_argument("--config")
    sp.add_argument("--output")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if getattr(args, "format", None):
            config.format = args.format
        output = args.output if args.output is not None else config.output
        if args.command == "validate":
            text, ok = cmd_validate(config, args)
            emit(text, output)
            return 0 if ok else 1
        if args.command == "spectrum":
            parts = cmd_spectrum(config, args)
            if output is None or output == "-":
                for name, text in parts.items():
                    sys.stdout.write(f"# --- {name} ---\n{text}")
            else:
                base = Path(output)
                ext = base.suffix or f".{config.format}"
                for name, text in parts.items():
                    emit(text, base.with_name(f"{base.stem}_{name}{ext}"))
            return 0
        handler = {"states": cmd_states, "xsec": cmd_xsec, "thermal": cmd_thermal}[args.command]
        emit(handler(config, args), output)
        return 0
    except (ConfigurationError, DomainError, TableParseError) as exc:
        print(f"icec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
