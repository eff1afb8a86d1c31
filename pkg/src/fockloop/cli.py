"""Command-line surface.

Five subcommands cover the package's report paths: qubit-sweep tabulates the
optimal two-level designs, synthesize plans and verifies a target state,
fock-run simulates the conditioned feedback loop, yop dumps a conditional
operator next to its brute-force check, and multiport-check samples network
matrices against their metric invariant.

Primary output is a comma-separated table (--format csv, the default) or a
key-value document (--format kv).  With --out the csv mode also writes a
key-value summary next to the table, and --plot renders a PNG sibling.
Everything is a deterministic function of the configuration: re-runs are
byte-identical.  Exit codes: 0 success, 2 configuration error, 3 numerical
guard tripped, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .conditional import (
    PolynomialState,
    conditional_operator,
    oracle_conditional,
)
from .couplers import (
    AMPLIFIER,
    CONVERTER,
    CouplerAngles,
    CouplerParams,
    heisenberg_matrix,
    params_from_angles,
)
from .errors import (
    CoefficientOverflowError,
    ConfigError,
    TruncationError,
    ZeroMeanError,
    ZeroProbabilityError,
)
from .feedback import FeedbackConfig, simulate_fock_run
from .fock import FockVector, fidelity
from .multiport import (
    ModePartition,
    coupling_matrix,
    metric_deviation,
    random_hermitian,
    two_mode_coupling,
)
from .synthesis import plan_synthesis, qubit_design, synth_product

_NUM = "%.15g"

_PRESETS = {
    "fig4a": {"r2": 3e-3, "eta_d": 1.0, "eta_f": 1.0, "target_n": 4, "cutoff": 32},
    "fig4b": {"r2": 3e-3, "eta_d": 1.0, "eta_f": 0.999, "target_n": 4, "cutoff": 32},
    "fig4c": {"r2": 3e-3, "eta_d": 0.7, "eta_f": 1.0, "target_n": 4, "cutoff": 32},
    "fig4d": {"r2": 3e-3, "eta_d": 0.7, "eta_f": 0.999, "target_n": 4, "cutoff": 32},
}

_CONFIG_KEYS = {
    "qubit-sweep": {"q_min", "q_max", "steps", "out", "format", "plot"},
    "synthesize": {"target", "coupler", "cutoff", "out", "format", "plot"},
    "fock-run": {
        "preset",
        "r2",
        "eta_d",
        "eta_f",
        "target_n",
        "cutoff",
        "trips",
        "out",
        "format",
        "plot",
    },
    "yop": {"coupler", "kind", "idler_in", "idler_out", "cutoff", "out", "format", "plot"},
    "multiport-check": {
        "plain",
        "conjugated",
        "draws",
        "seed",
        "scale",
        "out",
        "format",
        "plot",
    },
}


def _fmt(value) -> str:
    return _NUM % value


def _floats(text: str, count: int, what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise ConfigError(f"{what} needs {count} comma-separated numbers, got {text!r}")
    try:
        return [float(part) for part in parts]
    except ValueError:
        raise ConfigError(f"{what} has a non-numeric entry in {text!r}") from None


def parse_idler_state(spec: str) -> PolynomialState:
    """fock:<n> | coherent:<re>,<im> | amps:<re>,<im>;<re>,<im>;..."""
    head, sep, rest = spec.partition(":")
    if not sep:
        raise ConfigError(f"state spec {spec!r} is missing the kind prefix")
    if head == "fock":
        try:
            n = int(rest)
        except ValueError:
            raise ConfigError(f"fock state needs an integer, got {rest!r}") from None
        if n < 0:
            raise ConfigError("fock state needs a nonnegative photon number")
        return PolynomialState.fock(n)
    if head == "coherent":
        re, im = _floats(rest, 2, "coherent state")
        return PolynomialState.coherent(complex(re, im))
    if head == "amps":
        amps = _parse_amps(rest)
        coeffs = amps / np.sqrt(
            np.concatenate(([1.0], np.cumprod(np.arange(1.0, amps.size))))
        )
        return PolynomialState(tuple(coeffs))
    raise ConfigError(f"unknown state kind {head!r} in {spec!r}")


def _parse_amps(text: str) -> np.ndarray:
    amps = []
    for chunk in text.split(";"):
        re, im = _floats(chunk, 2, "amplitude")
        amps.append(complex(re, im))
    vec = np.asarray(amps, dtype=complex)
    if not np.any(np.abs(vec) > 0):
        raise ConfigError("state amplitudes are all zero")
    return vec


def parse_target_state(spec: str) -> np.ndarray:
    """Finite Fock superposition for synthesis: fock:<n> or amps:..."""
    head, sep, rest = spec.partition(":")
    if not sep:
        raise ConfigError(f"target spec {spec!r} is missing the kind prefix")
    if head == "fock":
        try:
            n = int(rest)
        except ValueError:
            raise ConfigError(f"fock target needs an integer, got {rest!r}") from None
        if n < 0:
            raise ConfigError("fock target needs a nonnegative photon number")
        amps = np.zeros(n + 1, dtype=complex)
        amps[n] = 1.0
        return amps
    if head == "amps":
        return _parse_amps(rest)
    raise ConfigError(f"synthesis target must be finite, got kind {head!r}")


def parse_coupler(spec: str, kind: str) -> CouplerParams | CouplerAngles:
    """trp:<Tre>,<Tim>,<Rre>,<Rim>,<Pre>,<Pim> | angles:<a0>,<a1>,<a2>,<a3> |
    r2:<value>"""
    head, sep, rest = spec.partition(":")
    if not sep:
        raise ConfigError(f"coupler spec {spec!r} is missing the kind prefix")
    if head == "trp":
        tre, tim, rre, rim, pre, pim = _floats(rest, 6, "coupler values")
        return CouplerParams.from_values(
            kind, complex(tre, tim), complex(rre, rim), complex(pre, pim)
        )
    if head == "angles":
        a0, a1, a2, a3 = _floats(rest, 4, "coupler angles")
        return CouplerAngles(kind, (a0, a1, a2, a3))
    if head == "r2":
        (r2,) = _floats(rest, 1, "coupler reflectance")
        if r2 < 0:
            raise ConfigError("reflectance must be nonnegative")
        if kind == AMPLIFIER:
            return CouplerParams.from_values(
                kind, math.sqrt(1.0 + r2), math.sqrt(r2), 1.0
            )
        if r2 > 1:
            raise ConfigError("converter reflectance cannot exceed 1")
        return CouplerParams.from_values(kind, math.sqrt(1.0 - r2), math.sqrt(r2), 1.0)
    raise ConfigError(f"unknown coupler form {head!r} in {spec!r}")


def _load_config(path: str | None, command: str) -> dict[str, str]:
    if path is None:
        return {}
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        message = str(exc).replace("\n", "; ")
        raise ConfigError(f"bad config {path}: {message}") from None
    for section in parser.sections():
        if section not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _CONFIG_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    if parser.has_section(command):
        return dict(parser[command])
    return {}


def _cast_bool(text: str, name: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ConfigError(f"{name} must be a boolean, got {text!r}")


def _cast_trips(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"trips must be comma-separated integers, got {text!r}") from None


class _Settings:
    """Merged view of CLI flags, config-file entries, and defaults,
    in that order of precedence."""

    def __init__(self, args: argparse.Namespace, config: dict[str, str]):
        self._args = args
        self._config = config

    def get(self, name: str, cast, default):
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            text = self._config[name]
            if cast is bool:
                return _cast_bool(text, name)
            if cast is _cast_trips:
                return _cast_trips(text)
            try:
                return cast(text)
            except ValueError:
                raise ConfigError(f"{name} must be {cast.__name__}, got {text!r}") from None
        return default


def _out_paths(settings: _Settings):
    out = settings.get("out", str, None)
    fmt = settings.get("format", str, "csv")
    if fmt not in {"csv", "kv"}:
        raise ConfigError(f"format must be csv or kv, got {fmt!r}")
    plot = settings.get("plot", bool, False)
    if plot and out is None:
        raise ConfigError("--plot needs --out to name the image file")
    return out, fmt, plot


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _kv_text(pairs: list[tuple[str, object]]) -> str:
    lines = []
    for key, value in pairs:
        rendered = value if isinstance(value, str) else _fmt(value)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


def _emit(out: str | None, fmt: str, table: str, summary: str) -> None:
    """csv mode: table to --out (or stdout) plus a .kv summary sibling;
    kv mode: the summary document is the primary output."""
    primary = table if fmt == "csv" else summary
    if out is None:
        sys.stdout.write(primary)
        return
    path = Path(out)
    path.write_text(primary, encoding="utf-8")
    if fmt == "csv":
        path.with_suffix(".kv").write_text(summary, encoding="utf-8")


def _plot_path(out: str) -> str:
    return str(Path(out).with_suffix(".png"))


def _cmd_qubit_sweep(args: argparse.Namespace) -> int:
    settings = _Settings(args, _load_config(args.config, "qubit-sweep"))
    out, fmt, plot = _out_paths(settings)
    q_min = settings.get("q_min", float, 0.1)
    q_max = settings.get("q_max", float, 10.0)
    steps = settings.get("steps", int, 25)
    if not 0 < q_min < q_max:
        raise ConfigError("need 0 < q_min < q_max")
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    grid = np.geomspace(q_min, q_max, steps)
    designs = [qubit_design(q) for q in grid]
    rows = [
        [q, d.refl_mag, d.alpha_mag, d.probability] for q, d in zip(grid, designs)
    ]
    table = _csv_text(["q_mag", "refl_mag", "alpha_mag", "probability"], rows)
    best = max(range(len(designs)), key=lambda i: designs[i].probability)
    summary = _kv_text(
        [
            ("command", "qubit-sweep"),
            ("q_min", q_min),
            ("q_max", q_max),
            ("steps", steps),
            ("best_q_mag", grid[best]),
            ("best_probability", designs[best].probability),
        ]
    )
    _emit(out, fmt, table, summary)
    if plot:
        plotting.plot_qubit_sweep(grid, designs, _plot_path(out))
    return 0


def _cmd_synthesize(args: argparse.Namespace) -> int:
    settings = _Settings(args, _load_config(args.config, "synthesize"))
    out, fmt, plot = _out_paths(settings)
    target_spec = settings.get("target", str, None)
    coupler_spec = settings.get("coupler", str, None)
    if target_spec is None or coupler_spec is None:
        raise ConfigError("synthesize needs --target and --coupler")
    amps = parse_target_state(target_spec)
    coupler = parse_coupler(coupler_spec, AMPLIFIER)
    params = (
        params_from_angles(coupler) if isinstance(coupler, CouplerAngles) else coupler
    )
    plan = plan_synthesis(FockVector(amps), params)
    cutoff = settings.get("cutoff", int, max(24, 8 * plan.degree + 8))
    achieved, measured = synth_product(params, plan.alphas, cutoff)
    target_padded = np.zeros(cutoff, dtype=complex)
    target_padded[: plan.target.cutoff] = plan.target.amps
    fid = fidelity(achieved, FockVector(target_padded))
    if fid < 1.0 - 1e-6:
        raise TruncationError(
            f"synthesized state reaches fidelity {fid:.12f}; raise the cutoff"
        )
    rows = [
        [k + 1, plan.betas[k].real, plan.betas[k].imag, plan.alphas[k].real, plan.alphas[k].imag]
        for k in range(plan.degree)
    ]
    table = _csv_text(["trip", "beta_re", "beta_im", "alpha_re", "alpha_im"], rows)
    summary = _kv_text(
        [
            ("command", "synthesize"),
            ("degree", plan.degree),
            ("cutoff", cutoff),
            ("probability", plan.probability),
            ("probability_measured", measured),
            ("fidelity", fid),
        ]
    )
    _emit(out, fmt, table, summary)
    if plot:
        plotting.plot_synthesis(
            plan.target.probabilities(), achieved.probabilities(), _plot_path(out)
        )
    return 0


def _cmd_fock_run(args: argparse.Namespace) -> int:
    settings = _Settings(args, _load_config(args.config, "fock-run"))
    out, fmt, plot = _out_paths(settings)
    preset_name = settings.get("preset", str, None)
    preset = {}
    if preset_name is not None:
        if preset_name not in _PRESETS:
            raise ConfigError(
                f"unknown preset {preset_name!r}; choose from {sorted(_PRESETS)}"
            )
        preset = _PRESETS[preset_name]
    r2 = settings.get("r2", float, preset.get("r2"))
    eta_d = settings.get("eta_d", float, preset.get("eta_d", 1.0))
    eta_f = settings.get("eta_f", float, preset.get("eta_f", 1.0))
    target_n = settings.get("target_n", int, preset.get("target_n"))
    cutoff = settings.get("cutoff", int, preset.get("cutoff", 32))
    trips = settings.get("trips", _cast_trips, None)
    if r2 is None or target_n is None:
        raise ConfigError("fock-run needs r2 and target_n (or a preset)")
    config = FeedbackConfig(
        r2=r2, eta_d=eta_d, eta_f=eta_f, target_n=target_n, cutoff=cutoff, trips=trips
    )
    result = simulate_fock_run(config)
    rows = [
        [rec.trip, rec.detected, rec.probability, rec.trace, rec.mean]
        for rec in result.records
    ]
    table = _csv_text(["trip", "detected", "probability", "captured", "mean"], rows)
    final = result.state.normalized()
    pairs = [
        ("command", "fock-run"),
        ("r2", r2),
        ("eta_d", eta_d),
        ("eta_f", eta_f),
        ("target_n", target_n),
        ("cutoff", cutoff),
        ("n_trips", result.total_trips),
        ("mean", final.mean()),
        ("mandel_q", result.mandel),
        ("mandel_q_before_last_loss", result.mandel_before_last_loss),
        ("success_probability", result.success_probability),
    ]
    pairs += [(f"schedule_{i + 1}", t) for i, t in enumerate(result.schedule)]
    pairs += [(f"rho_{n}", final.probs[n]) for n in range(min(13, cutoff))]
    summary = _kv_text(pairs)
    _emit(out, fmt, table, summary)
    if plot:
        plotting.plot_fock_run(result, _plot_path(out))
    return 0


def _cmd_yop(args: argparse.Namespace) -> int:
    settings = _Settings(args, _load_config(args.config, "yop"))
    out, fmt, plot = _out_paths(settings)
    kind = settings.get("kind", str, AMPLIFIER)
    if kind not in {AMPLIFIER, CONVERTER}:
        raise ConfigError(f"kind must be {AMPLIFIER} or {CONVERTER}, got {kind!r}")
    coupler_spec = settings.get("coupler", str, None)
    if coupler_spec is None:
        raise ConfigError("yop needs --coupler")
    coupler = parse_coupler(coupler_spec, kind)
    params = (
        params_from_angles(coupler) if isinstance(coupler, CouplerAngles) else coupler
    )
    idler_in = parse_idler_state(settings.get("idler_in", str, "fock:0"))
    idler_out = parse_idler_state(settings.get("idler_out", str, "fock:1"))
    cutoff = settings.get("cutoff", int, 24)
    operator = conditional_operator(params, idler_in, idler_out, cutoff)
    oracle = oracle_conditional(coupler, idler_in, idler_out, cutoff).entries
    interior = cutoff // 2 + 1
    residual = float(
        np.max(np.abs(operator.matrix.entries[:interior, :interior] - oracle[:interior, :interior]))
    )
    entries = operator.matrix.entries
    rows = [
        [r, c, entries[r, c].real, entries[r, c].imag]
        for r in range(cutoff)
        for c in range(cutoff)
    ]
    table = _csv_text(["row", "col", "real", "imag"], rows)
    pairs = [
        ("command", "yop"),
        ("kind", kind),
        ("cutoff", cutoff),
        ("ordering", params.ordering),
        ("trans_re", params.trans.real),
        ("trans_im", params.trans.imag),
        ("refl_re", params.refl.real),
        ("refl_im", params.refl.imag),
        ("phase_re", params.phase.real),
        ("phase_im", params.phase.imag),
        ("interior_size", interior),
        ("oracle_residual", residual),
    ]
    if fmt == "kv":
        pairs += [
            (f"y_{r}_{c}_{part}", val)
            for r in range(cutoff)
            for c in range(cutoff)
            for part, val in (("re", entries[r, c].real), ("im", entries[r, c].imag))
        ]
    summary = _kv_text(pairs)
    _emit(out, fmt, table, summary)
    if plot:
        plotting.plot_operator(entries, _plot_path(out))
    return 0


def _cmd_multiport_check(args: argparse.Namespace) -> int:
    settings = _Settings(args, _load_config(args.config, "multiport-check"))
    out, fmt, plot = _out_paths(settings)
    plain = settings.get("plain", int, 2)
    conjugated = settings.get("conjugated", int, 1)
    draws = settings.get("draws", int, 100)
    seed = settings.get("seed", int, 7)
    scale = settings.get("scale", float, 0.5)
    if draws < 1:
        raise ConfigError("draws must be at least 1")
    partition = ModePartition(plain, conjugated)
    rng = np.random.default_rng(seed)
    deviations = []
    for _ in range(draws):
        h = random_hermitian(partition.size, rng, scale)
        deviations.append(metric_deviation(coupling_matrix(h, partition), partition))
    reduction = {}
    for kind in (AMPLIFIER, CONVERTER):
        worst = 0.0
        for _ in range(10):
            angles = CouplerAngles(kind, tuple(rng.uniform(-0.8, 0.8, size=4)))
            h, part = two_mode_coupling(angles)
            built = coupling_matrix(h, part)
            expected = heisenberg_matrix(params_from_angles(angles))
            worst = max(worst, float(np.max(np.abs(built - expected))))
        reduction[kind] = worst
    rows = [[i + 1, dev] for i, dev in enumerate(deviations)]
    table = _csv_text(["draw", "metric_deviation"], rows)
    summary = _kv_text(
        [
            ("command", "multiport-check"),
            ("plain", plain),
            ("conjugated", conjugated),
            ("draws", draws),
            ("seed", seed),
            ("scale", scale),
            ("max_deviation", max(deviations)),
            ("reduction_amplifier", reduction[AMPLIFIER]),
            ("reduction_converter", reduction[CONVERTER]),
        ]
    )
    _emit(out, fmt, table, summary)
    if plot:
        plotting.plot_metric_deviations(deviations, _plot_path(out))
    return 0


def _add_common(sub: argparse.ArgumentParser, with_cutoff: bool) -> None:
    sub.add_argument("--config", help="INI file with a section per subcommand")
    sub.add_argument("--out", help="primary output file (stdout when omitted)")
    sub.add_argument("--format", choices=["csv", "kv"], help="primary output format")
    sub.add_argument(
        "--plot", action="store_true", default=None, help="render a PNG next to --out"
    )
    if with_cutoff:
        sub.add_argument("--cutoff", type=int, help="photon-number cutoff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockloop",
        description="Conditional state engineering at two-mode couplers.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("qubit-sweep", help="optimal two-level designs")
    _add_common(sweep, with_cutoff=False)
    sweep.add_argument("--q-min", dest="q_min", type=float)
    sweep.add_argument("--q-max", dest="q_max", type=float)
    sweep.add_argument("--steps", type=int)
    sweep.set_defaults(func=_cmd_qubit_sweep)

    synth = commands.add_parser("synthesize", help="plan and verify a target state")
    _add_common(synth, with_cutoff=True)
    synth.add_argument("--target", help="fock:<n> or amps:re,im;re,im;...")
    synth.add_argument("--coupler", help="trp:..., angles:..., or r2:<value>")
    synth.set_defaults(func=_cmd_synthesize)

    run = commands.add_parser("fock-run", help="conditioned feedback-loop run")
    _add_common(run, with_cutoff=True)
    run.add_argument("--preset", help="fig4a, fig4b, fig4c, or fig4d")
    run.add_argument("--r2", type=float)
    run.add_argument("--eta-d", dest="eta_d", type=float)
    run.add_argument("--eta-f", dest="eta_f", type=float)
    run.add_argument("--target-n", dest="target_n", type=int)
    run.add_argument("--trips", type=_cast_trips, help="explicit schedule override")
    run.set_defaults(func=_cmd_fock_run)

    yop = commands.add_parser("yop", help="conditional operator dump and check")
    _add_common(yop, with_cutoff=True)
    yop.add_argument("--kind", choices=[AMPLIFIER, CONVERTER])
    yop.add_argument("--coupler", help="trp:..., angles:..., or r2:<value>")
    yop.add_argument("--idler-in", dest="idler_in", help="incoming idler state")
    yop.add_argument("--idler-out", dest="idler_out", help="detected idler state")
    yop.set_defaults(func=_cmd_yop)

    check = commands.add_parser("multiport-check", help="sample network matrices")
    _add_common(check, with_cutoff=False)
    check.add_argument("--plain", type=int)
    check.add_argument("--conjugated", type=int)
    check.add_argument("--draws", type=int)
    check.add_argument("--seed", type=int)
    check.add_argument("--scale", type=float)
    check.set_defaults(func=_cmd_multiport_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        TruncationError,
        ZeroProbabilityError,
        ZeroMeanError,
        CoefficientOverflowError,
    ) as exc:
        message = str(exc).replace("\n", "; ")
        print(f"fockloop: guard: {message}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        message = str(exc).replace("\n", "; ")
        print(f"fockloop: config: {message}", file=sys.stderr)
        return 2
    except OSError as exc:
        message = str(exc).replace("\n", "; ")
        print(f"fockloop: io: {message}", file=sys.stderr)
        return 4
