"""Command-line front end: evolve, steady, sweep, reproduce.

Flags use caption units: --rabi-mhz and --delta-mhz / --urr-mhz are /2pi
MHz values, --microwave-rel is the ratio omega/Omega, --gamma-khz is a
plain rate in kHz (--gamma-angular reads it as 2*pi*kHz instead).  When
only one of --delta-mhz / --urr-mhz is given the other follows from
U_rr = 2*Delta.

Exit codes: 0 success, 2 invalid specification, 3 numerical failure,
4 non-unique steady state.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import dynamics, measures, models

EXIT_OK = 0
EXIT_INVALID_SPEC = 2
EXIT_NUMERICAL = 3
EXIT_DEGENERATE = 4

MEASURE_NAMES = ("populations", "fidelity", "chsh", "negativity")
AXIS_NAMES = ("rabi-mhz", "microwave-rel", "delta-mhz", "urr-mhz", "gamma-khz")

# Per-preset defaults for `evolve` (duration ms, samples, outputs).
_EVOLVE_DEFAULTS = {
    "fig2-inset": (300.0, 301, ["populations"]),
    "fig3": (300.0, 301, ["chsh"]),
    "fig5-inset": (200.0, 401, ["populations"]),
}

# reproduce targets: grid axes in caption units, or a time series.
_REPRODUCE = {
    "fig2": ("sweep", "fig2", [("urr-mhz", 1.0, 8.0, 15)], "fidelity"),
    "fig2-inset": ("evolve", "fig2-inset", None, None),
    "fig3": ("evolve", "fig3", None, None),
    "fig5": ("sweep", "fig5", [("urr-mhz", 1.0, 8.0, 15)], "fidelity"),
    "fig5-inset": ("evolve", "fig5-inset", None, None),
    "fig6": ("sweep", "fig6-point",
             [("urr-mhz", 1.0, 10.0, 5), ("gamma-khz", 0.25, 2.5, 5)], "negativity"),
    "fig8a": ("sweep", "fig8a",
              [("rabi-mhz", 0.02, 0.10, 5), ("microwave-rel", 0.002, 0.010, 5)], "fidelity"),
    "fig8b": ("sweep", "fig8b",
              [("urr-mhz", 1.0, 8.0, 5), ("gamma-khz", 0.5, 2.5, 5)], "fidelity"),
    "fig8c": ("sweep", "fig8c",
              [("rabi-mhz", 0.02, 0.10, 5), ("microwave-rel", 0.002, 0.010, 5)], "chsh"),
    "fig8d": ("sweep", "fig8d",
              [("urr-mhz", 1.0, 8.0, 5), ("gamma-khz", 0.5, 2.5, 5)], "chsh"),
    "fig9a": ("sweep", "fig9a",
              [("rabi-mhz", 0.03, 0.08, 5), ("microwave-rel", 0.0025, 0.0125, 5)], "fidelity"),
    "fig9b": ("sweep", "fig9b",
              [("urr-mhz", 1.0, 8.0, 5), ("gamma-khz", 0.5, 2.5, 5)], "fidelity"),
    "fig9c": ("sweep", "fig9c",
              [("rabi-mhz", 0.03, 0.08, 5), ("microwave-rel", 0.0025, 0.0125, 5)], "negativity"),
}


def _norm_key(key: str) -> str:
    return key.strip().lower().replace("-", "").replace("_", "")


# Long flag names accepted in config files (keys compared dash/underscore
# insensitively), mapped to argparse dest names.
_CONFIG_FLAGS = {
    _norm_key(k): dest
    for k, dest in [
        ("preset", "preset"), ("scheme", "scheme"), ("target", "target"),
        ("rabi-mhz", "rabi_mhz"), ("microwave-rel", "microwave_rel"),
        ("delta-mhz", "delta_mhz"), ("urr-mhz", "urr_mhz"),
        ("gamma-khz", "gamma_khz"), ("gamma-angular", "gamma_angular"),
        ("initial", "initial"), ("t-max-ms", "t_max_ms"), ("samples", "samples"),
        ("outputs", "outputs"), ("format", "format"), ("method", "method"),
        ("reduce", "reduce"), ("workers", "workers"),
    ]
}
_CONFIG_BOOL = {"gamma_angular"}
_CONFIG_FLOAT = {"rabi_mhz", "microwave_rel", "delta_mhz", "urr_mhz", "gamma_khz", "t_max_ms"}
_CONFIG_INT = {"samples", "workers"}

# ModelParams field names are also accepted in config files, with absolute
# caption units (/2pi MHz; gamma in kHz).
_CONFIG_FIELDS = {
    _norm_key(k): k
    for k in ("rabi_optical", "rabi_microwave_1", "rabi_microwave_2",
              "detuning", "rydberg_U", "gamma")
}


def _load_config(path: str) -> tuple[dict, dict]:
    """Split a config file into flag-style values and ModelParams field values."""
    raw = models.parse_kv_file(path)
    flags: dict = {}
    fields: dict = {}
    for key, value in raw.items():
        norm = _norm_key(key)
        if norm in _CONFIG_FLAGS:
            dest = _CONFIG_FLAGS[norm]
            if dest in _CONFIG_BOOL:
                flags[dest] = value.lower() in ("1", "true", "yes", "on")
            elif dest in _CONFIG_FLOAT:
                flags[dest] = float(value)
            elif dest in _CONFIG_INT:
                flags[dest] = int(value)
            else:
                flags[dest] = value
        elif norm in _CONFIG_FIELDS:
            fields[_CONFIG_FIELDS[norm]] = float(value)
        else:
            raise ValueError(f"unknown config key {key!r} in {path}")
    return flags, fields


class RunSetup:
    """Resolved model + run options shared by the subcommands."""

    def __init__(self, args, need_initial: bool = False):
        cfg_flags, cfg_fields = _load_config(args.config) if args.config else ({}, {})

        def pick(dest, default=None):
            val = getattr(args, dest, None)
            if val is not None:
                return val
            if dest in cfg_flags:
                return cfg_flags[dest]
            return default

        self.gamma_angular = bool(pick("gamma_angular", False))
        preset_name = pick("preset")
        preset = models.figure_preset(preset_name, self.gamma_angular) if preset_name else None
        self.preset_name = preset_name

        scheme = pick("scheme", preset.variant.scheme if preset else None)
        if scheme is None:
            raise ValueError("no scheme given: use --scheme or --preset")
        target = pick("target", preset.variant.target if preset else None)
        if target is None:
            target = {"bell": "singlet", "qutrit": "phi"}[scheme] if scheme in ("bell", "qutrit") else None
        self.variant = models.SchemeVariant(scheme=scheme, target=target.replace("-", "_"))

        # Caption-unit parameter dict: preset base, then config-file fields,
        # then explicit flags.  Track which keys the user pinned explicitly
        # so sweeps know whether Delta may follow U_rr = 2*Delta.
        caption = {}
        if preset_name:
            caption = {k: v for k, v in models.preset_caption(preset_name).items()
                       if k not in ("scheme", "target", "initial")}
        self.explicit: set = set()
        if "rabi_optical" in cfg_fields:
            caption["rabi_mhz"] = cfg_fields["rabi_optical"]
            self.explicit.add("rabi_mhz")
        if "rabi_microwave_1" in cfg_fields:
            caption.pop("microwave_rel", None)
            caption["microwave_mhz"] = cfg_fields["rabi_microwave_1"]
            self.explicit.add("microwave_mhz")
        if "rabi_microwave_2" in cfg_fields:
            caption["microwave2_mhz"] = cfg_fields["rabi_microwave_2"]
            self.explicit.add("microwave2_mhz")
        if "detuning" in cfg_fields:
            caption["delta_mhz"] = cfg_fields["detuning"]
            self.explicit.add("delta_mhz")
        if "rydberg_U" in cfg_fields:
            caption["urr_mhz"] = cfg_fields["rydberg_U"]
            self.explicit.add("urr_mhz")
        if "gamma" in cfg_fields:
            caption["gamma_khz"] = cfg_fields["gamma"]
            self.explicit.add("gamma_khz")
        for dest, key in [("rabi_mhz", "rabi_mhz"), ("microwave_rel", "microwave_rel"),
                          ("delta_mhz", "delta_mhz"), ("urr_mhz", "urr_mhz"),
                          ("gamma_khz", "gamma_khz")]:
            val = pick(dest)
            if val is not None:
                if key == "microwave_rel":
                    caption.pop("microwave_mhz", None)
                caption[key] = val
                self.explicit.add(key)
        self.caption = caption

        self.initial = pick("initial", preset.initial_state if preset else None)
        if need_initial and self.initial is None:
            raise ValueError("no initial state given: use --initial or --preset")

        # Run options with preset-aware defaults.
        ev_t, ev_n, ev_out = _EVOLVE_DEFAULTS.get(preset_name, (100.0, 101, None))
        self.t_max_ms = float(pick("t_max_ms", ev_t))
        self.samples = int(pick("samples", ev_n))
        outputs = pick("outputs")
        if outputs is None:
            outputs = list(ev_out) if ev_out is not None else ["populations"]
        elif isinstance(outputs, str):
            outputs = [o.strip() for o in outputs.split(",") if o.strip()]
        self.outputs = outputs
        self.steady_outputs = (
            ["fidelity", "chsh"] if scheme == "bell" else ["fidelity", "negativity"]
        )
        if pick("outputs") is not None:
            self.steady_outputs = self.outputs
        self.method = pick("method", "nullspace")
        self.reduce = pick("reduce", "fidelity")
        self.workers = int(pick("workers", 1))
        self.format = pick("format", "csv")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}; expected csv or json")

    def params(self) -> models.ModelParams:
        return models.caption_params(gamma_angular=self.gamma_angular, **self.caption)

    def model(self) -> models.SystemModel:
        return models.build_model(self.params(), self.variant)

    def validate_outputs(self, outputs) -> list:
        for name in outputs:
            if name not in MEASURE_NAMES:
                raise ValueError(
                    f"unknown output {name!r}; expected one of {', '.join(MEASURE_NAMES)}"
                )
            if name == "chsh" and self.variant.scheme != "bell":
                raise ValueError("the chsh measure is only defined for the bell scheme")
        return list(outputs)


def measure_columns(model: models.SystemModel, outputs) -> list:
    """(column name, rho -> float) pairs for the requested measures."""
    cols = []
    for name in outputs:
        if name == "populations":
            for label, ket in model.population_basis():
                cols.append((
                    f"pop_{label}",
                    lambda rho, v=ket: float(measures.populations(rho, [v])[0]),
                ))
        elif name == "fidelity":
            target = model.state(model.variant.target_state)
            cols.append(("fidelity", lambda rho, v=target: measures.fidelity(v, rho)))
        elif name == "chsh":
            flip = model.variant.target == "triplet"
            cols.append(("chsh", lambda rho, f=flip: measures.chsh_correlation(rho, triplet_frame=f)))
        elif name == "negativity":
            cols.append(("negativity", lambda rho, d=model.dims: measures.negativity(rho, d)))
    return cols


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17e}"
    return str(value)


def write_table(out, command: str, columns, rows, fmt: str, timestamp: bool) -> None:
    """Emit a CSV or JSON table to a path or stdout."""
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# rydpump {command}\n")
        if timestamp:
            now = datetime.now(timezone.utc).isoformat(timespec="seconds")
            buf.write(f"# generated: {now}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
        text = buf.getvalue()
    else:
        doc = {"command": command}
        if timestamp:
            doc["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        doc["columns"] = list(columns)
        doc["rows"] = [list(r) for r in rows]
        text = json.dumps(doc, indent=1) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        print(f"wrote {out}")


def cmd_evolve(args) -> int:
    setup = RunSetup(args, need_initial=True)
    outputs = setup.validate_outputs(setup.outputs)
    if setup.t_max_ms < 0:
        raise ValueError(f"t-max-ms must be nonnegative, got {setup.t_max_ms}")
    if setup.t_max_ms > 0 and setup.samples < 2:
        raise ValueError(f"samples must be >= 2 when t-max-ms > 0, got {setup.samples}")
    model = setup.model()
    try:
        rho0 = model.initial_density(setup.initial)
    except KeyError as exc:
        raise ValueError(str(exc)) from None
    liouv = dynamics.build_liouvillian(model)
    t = np.linspace(0.0, setup.t_max_ms * 1e-3, setup.samples)
    cols = measure_columns(model, outputs)
    traj = dynamics.evolve(liouv, rho0, t, observables=dict(cols), store_states=False)
    names = ["time_ms"] + [n for n, _ in cols]
    rows = [
        [traj.times[k] * 1e3] + [float(traj.records[n][k]) for n, _ in cols]
        for k in range(t.size)
    ]
    write_table(args.out, "evolve", names, rows, setup.format, not args.no_timestamp)
    return EXIT_OK


def cmd_steady(args) -> int:
    setup = RunSetup(args)
    outputs = setup.validate_outputs(setup.steady_outputs)
    model = setup.model()
    liouv = dynamics.build_liouvillian(model)
    rho, info = dynamics.steady_state(liouv, method=setup.method, return_info=True)
    cols = measure_columns(model, outputs)
    names = [n for n, _ in cols] + ["residual", "backend"]
    row = [fn(rho) for _, fn in cols] + [info["residual"], info["method"]]
    write_table(args.out, "steady", names, [row], setup.format, not args.no_timestamp)
    return EXIT_OK


def _sweep_task(task: dict):
    """Evaluate one sweep grid point (steady state + reduced measure)."""
    try:
        variant = models.SchemeVariant(scheme=task["scheme"], target=task["target"])
        params = models.caption_params(gamma_angular=task["gamma_angular"], **task["caption"])
        model = models.build_model(params, variant)
        liouv = dynamics.build_liouvillian(model)
        rho = dynamics.steady_state(liouv)
        _, fn = measure_columns(model, [task["reduce"]])[0]
        return task["index"], float(fn(rho)), ""
    except Exception as exc:  # per-point failures recorded, sweep continues
        return task["index"], math.nan, f"{type(exc).__name__}: {exc}"


def _apply_axis(caption: dict, explicit: set, axis: str, value: float) -> dict:
    out = dict(caption)
    key = axis.replace("-", "_")
    if axis == "microwave-rel":
        out.pop("microwave_mhz", None)
        out["microwave_rel"] = value
    else:
        out[key] = value
    # Keep U_rr = 2*Delta unless the other leg was pinned explicitly.
    if axis == "urr-mhz" and "delta_mhz" not in explicit:
        out.pop("delta_mhz", None)
    if axis == "delta-mhz" and "urr_mhz" not in explicit:
        out.pop("urr_mhz", None)
    return out


def cmd_sweep(args) -> int:
    setup = RunSetup(args)
    if not args.axis:
        raise ValueError("sweep requires at least one --axis NAME MIN MAX STEPS")
    if len(args.axis) > 2:
        raise ValueError("sweep supports at most two axes")
    axes = []
    for spec in args.axis:
        name, lo, hi, steps = spec[0], float(spec[1]), float(spec[2]), int(spec[3])
        if name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {name!r}; expected one of {', '.join(AXIS_NAMES)}")
        if steps < 2:
            raise ValueError(f"axis {name!r} needs steps >= 2, got {steps}")
        axes.append((name, np.linspace(lo, hi, steps)))
    reduce_name = setup.validate_outputs([setup.reduce])[0]
    if reduce_name == "populations":
        raise ValueError("sweep reduce must be a scalar measure (fidelity, chsh, negativity)")

    grids = [g for _, g in axes]
    points = [(i,) for i in range(len(grids[0]))]
    if len(grids) == 2:
        points = [(i, j) for i in range(len(grids[0])) for j in range(len(grids[1]))]
    tasks = []
    for index, idx in enumerate(points):
        caption = dict(setup.caption)
        explicit = set(setup.explicit)
        for (axis_name, grid), k in zip(axes, idx):
            caption = _apply_axis(caption, explicit, axis_name, float(grid[k]))
            explicit.add(axis_name.replace("-", "_"))
        tasks.append({
            "index": index, "caption": caption, "scheme": setup.variant.scheme,
            "target": setup.variant.target, "reduce": reduce_name,
            "gamma_angular": setup.gamma_angular,
        })

    if setup.workers > 1:
        with ProcessPoolExecutor(max_workers=setup.workers) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    names = [name.replace("-", "_") for name, _ in axes] + [reduce_name, "error"]
    rows = []
    for (idx, value, err), point in zip(results, points):
        coords = [float(grids[k][point[k]]) for k in range(len(grids))]
        rows.append(coords + [value, err])
    write_table(args.out, "sweep", names, rows, setup.format, not args.no_timestamp)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    kind, preset, axes, reduce_name = _REPRODUCE[args.figure]
    out = str(Path(args.out_dir) / f"{args.figure}.csv")
    forward = argparse.Namespace(
        preset=preset, config=None, scheme=None, target=None, rabi_mhz=None,
        microwave_rel=None, delta_mhz=None, urr_mhz=None, gamma_khz=None,
        gamma_angular=True if args.gamma_angular else None, initial=None,
        t_max_ms=None, samples=None, outputs=None, format="csv", method=None,
        reduce=reduce_name, workers=args.workers, out=out,
        no_timestamp=args.no_timestamp, axis=axes,
    )
    if kind == "evolve":
        return cmd_evolve(forward)
    return cmd_sweep(forward)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--preset", help="benchmark preset (e.g. fig2, fig3, fig5-inset, fig6-point)")
    g.add_argument("--config", help="key-value config file; explicit flags override it")
    g.add_argument("--scheme", choices=("bell", "qutrit"))
    g.add_argument("--target", choices=("singlet", "triplet", "phi", "phi-prime", "phi_prime"))
    g.add_argument("--rabi-mhz", type=float, help="optical Rabi frequency Omega/2pi in MHz")
    g.add_argument("--microwave-rel", type=float, help="microwave amplitude as omega/Omega")
    g.add_argument("--delta-mhz", type=float, help="detuning Delta/2pi in MHz (default U_rr/2)")
    g.add_argument("--urr-mhz", type=float, help="Rydberg interaction U_rr/2pi in MHz (default 2*Delta)")
    g.add_argument("--gamma-khz", type=float, help="decay rate in kHz (plain rate)")
    g.add_argument("--gamma-angular", action="store_true", default=None,
                   help="interpret --gamma-khz as an angular 2*pi*kHz rate")
    g.add_argument("--initial", help="initial state id (e.g. ff, mix4, mix9, singlet, phi)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: print to stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp line for byte-reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydpump",
        description="Dissipative Rydberg-pumping entanglement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="integrate the master equation over a time grid")
    _add_model_args(p)
    p.add_argument("--t-max-ms", type=float, help="evolution time in ms")
    p.add_argument("--samples", type=int, help="number of grid points (>= 2)")
    p.add_argument("--outputs", help="comma list: populations,fidelity,chsh,negativity")
    _add_output_args(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("steady", help="solve for the steady state and its measures")
    _add_model_args(p)
    p.add_argument("--method", choices=("nullspace", "evolve"), default=None,
                   help="steady-state backend (default nullspace)")
    p.add_argument("--outputs", help="comma list of measures")
    _add_output_args(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="steady-state measure over a 1-D or 2-D parameter grid")
    _add_model_args(p)
    p.add_argument("--axis", nargs=4, action="append", metavar=("NAME", "MIN", "MAX", "STEPS"),
                   help=f"swept parameter ({', '.join(AXIS_NAMES)}); repeat for 2-D")
    p.add_argument("--reduce", help="measure evaluated at each grid point (default fidelity)")
    p.add_argument("--workers", type=int, default=None, help="parallel grid workers")
    _add_output_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="write the data behind one benchmark figure")
    p.add_argument("figure", choices=sorted(_REPRODUCE))
    p.add_argument("--out-dir", default=".", help="directory for <figure>.csv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--gamma-angular", action="store_true", default=None)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except dynamics.NonUniqueSteadyStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except dynamics.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC


if __name__ == "__main__":
    sys.exit(main())
