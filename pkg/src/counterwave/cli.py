"""Command-line front end.

Commands: ``trajectory``, ``floquet-map``, ``quasimomentum``, ``compton`` and
``presets list|show``. Parameters come from built-in defaults, then a preset,
then a ``key = value`` config file, then command-line flags, each layer
overriding the previous one.

Exit codes: 0 success, 2 invalid configuration, 3 forbidden regime,
4 numerical non-convergence.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from pathlib import Path
import sys

import numpy as np

from . import classical as cl
from . import emission as em
from . import quantum as qm
from . import relkin
from ._output import write_csv, write_svg
from .errors import ConfigError, ForbiddenRegimeError, NonConvergenceError
from .presets import PRESETS, format_config, get_preset
from .specfun import MathieuSpec, mathieu_nu

__all__ = ["main", "build_parser", "RunConfig", "resolve_config", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_FORBIDDEN", "EXIT_NONCONVERGENCE"]

EXIT_OK, EXIT_CONFIG, EXIT_FORBIDDEN, EXIT_NONCONVERGENCE = 0, 2, 3, 4


def _choice(*options):
    def convert(text):
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    convert.__name__ = "choice"
    return convert


# key -> (converter, default, help); None defaults mean "not set"
SCHEMAS = {
    "trajectory": {
        "case": (_choice("node", "delta"), "node", "magnetic node or zero transverse canonical momentum"),
        "xi1": (float, 10.0, "intensity of the wave along +z"),
        "xi2": (float, 10.0, "intensity of the wave along -z"),
        "omega1": (float, 0.01, "frequency of the wave along +z"),
        "omega2": (float, None, "frequency of the wave along -z (default omega1)"),
        "phi_start": (float, 0.0, "node: initial phase phi_bar"),
        "pi_x": (float, None, "node: canonical momentum, x component"),
        "pi_y": (float, None, "node: canonical momentum, y component"),
        "p_frac_x": (float, None, "node: p_x as a fraction of a_x at the start phase"),
        "p_frac_y": (float, None, "node: p_y as a fraction of a_y at the start phase"),
        "pz": (float, 0.0, "delta: initial longitudinal momentum (p0 from the mass shell)"),
        "tau_max": (float, 50.0, "final proper time"),
        "points": (int, 1001, "number of output samples"),
    },
    "floquet-map": {
        "lam_min": (float, -2.0, "smallest lambda"),
        "lam_max": (float, 10.0, "largest lambda"),
        "lam_points": (int, 61, "lambda grid size"),
        "q_min": (float, 0.0, "smallest Q"),
        "q_max": (float, 5.0, "largest Q"),
        "q_points": (int, 26, "Q grid size"),
    },
    "quasimomentum": {
        "sweep": (_choice("p_perp", "xi_sigma"), "p_perp", "swept variable"),
        "min": (float, 1e-2, "sweep start"),
        "max": (float, 1e2, "sweep end"),
        "points": (int, 41, "sweep size"),
        "scale": (_choice("log", "linear"), "log", "sweep spacing"),
        "xi_sigma": (float, 1.0, "total intensity xi1 + xi2 (equal waves)"),
        "omega": (float, 0.01, "common frequency, k_bar^2 = omega^2"),
        "p_perp": (float, 1.0, "transverse momentum"),
    },
    "compton": {
        "xi": (float, 1.0, "wave intensity"),
        "kp": (float, 0.01, "light-front energy k.p"),
        "s_max": (int, 50, "highest harmonic"),
        "scheme": (_choice("adaptive", "gauss"), "adaptive", "quadrature scheme"),
        "l_parallel": (float, None, "node stability check for this photon longitudinal momentum"),
    },
}

DEFAULT_TOL = {"trajectory": 1e-10, "floquet-map": 1e-12, "quasimomentum": 1e-12, "compton": 1e-10}
_COMMON_FILE_KEYS = {"tol": float, "format": _choice("csv", "csv+svg"), "threads": int}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters."""

    command: str
    params: dict
    tol: float
    out: Path
    fmt: str
    threads: int
    stem: str

    def __getitem__(self, key):
        return self.params[key]


def parse_config_text(text, command):
    """Parse ``key = value`` lines (``#`` starts a comment) into typed values."""
    schema = SCHEMAS[command]
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in schema:
            convert = schema[key][0]
        elif key in _COMMON_FILE_KEYS:
            convert = _COMMON_FILE_KEYS[key]
        else:
            raise ConfigError(f"config line {lineno}: unknown key {key!r} for {command}")
        try:
            values[key] = convert(value)
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {exc}") from None
    return values


def _validate(command, p, tol, threads):
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ConfigError("tolerance must be positive")
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    for key, value in p.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key} must be finite")
    if command == "trajectory":
        if p["points"] < 2 or not p["tau_max"] > 0.0:
            raise ConfigError("trajectory needs points >= 2 and tau_max > 0")
    elif command == "floquet-map":
        for axis in ("lam", "q"):
            if p[f"{axis}_points"] < 2 or not p[f"{axis}_min"] < p[f"{axis}_max"]:
                raise ConfigError(f"{axis} range needs points >= 2 and min < max")
    elif command == "quasimomentum":
        if p["points"] < 2 or not p["min"] < p["max"]:
            raise ConfigError("sweep needs points >= 2 and min < max")
        if p["scale"] == "log" and p["min"] <= 0.0:
            raise ConfigError("log sweep needs min > 0")
    elif command == "compton":
        if p["s_max"] < 1:
            raise ConfigError("s_max must be >= 1")


def resolve_config(args):
    """Merge defaults, preset, config file and flags into a RunConfig."""
    command = args.command
    schema = SCHEMAS[command]
    params = {key: spec[1] for key, spec in schema.items()}
    common = {}
    stem = command.replace("-", "_")
    if args.preset:
        preset = get_preset(args.preset)
        if preset.command != command:
            raise ConfigError(f"preset {preset.name!r} belongs to '{preset.command}', not '{command}'")
        params.update(preset.params)
        stem = preset.name
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        for key, value in parse_config_text(text, command).items():
            (common if key in _COMMON_FILE_KEYS else params)[key] = value
    for key in schema:
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    tol = args.tol if args.tol is not None else common.get("tol", DEFAULT_TOL[command])
    fmt = args.format or common.get("format", "csv")
    threads = args.threads if args.threads is not None else common.get("threads", 1)
    _validate(command, params, tol, threads)
    return RunConfig(command, params, float(tol), Path(args.out), fmt, int(threads), stem)


# --------------------------------------------------------------------------
# Commands


_TRAJ_HEADER = ["tau", "t", "x", "y", "z", "p0", "p1", "p2", "p3", "phase", "phase_oracle",
                "t_oracle", "x_oracle", "y_oracle", "z_oracle",
                "conserved_11", "conserved_12", "conserved_21", "conserved_22", "conserved_long"]


def _node_canonical_momentum(bg, p):
    if p["pi_x"] is not None or p["pi_y"] is not None:
        return np.array([0.0, p["pi_x"] or 0.0, p["pi_y"] or 0.0, 0.0])
    fx = -1.0 if p["p_frac_x"] is None else p["p_frac_x"]
    fy = -1.0 if p["p_frac_y"] is None else p["p_frac_y"]
    a = relkin.potential(bg, np.array([p["phi_start"] / bg.wave1.omega, 0.0, 0.0, 0.0]))
    return np.array([0.0, (1.0 + fx) * a[1], (1.0 + fy) * a[2], 0.0])


def cmd_trajectory(cfg, log):
    """Analytic trajectory with the Lorentz-integrator oracle alongside."""
    p = cfg.params
    bg = relkin.Background.head_on(p["xi1"], p["xi2"], p["omega1"], p["omega2"])
    tau = np.linspace(0.0, p["tau_max"], p["points"])
    csv_path = cfg.out / f"{cfg.stem}.csv"
    if p["case"] == "node":
        pi = _node_canonical_momentum(bg, p)
        orbit = cl.magnetic_node_orbit(bg, pi)
        if not orbit.s < 1.0:
            raise ForbiddenRegimeError(f"node parameter s = {orbit.s:.6g} >= 1: no bounded phase")
        analytic = cl.reconstruct_trajectory(bg, "node", tau, pi_in=pi, phi_start=p["phi_start"])
        init = cl.magnetic_node_initial_state(bg, pi, p["phi_start"])
        phase = cl.magnetic_node_phase(orbit, tau, p["phi_start"])
        log(f"case = node, s = {orbit.s:.17g}, varpi2 = {orbit.varpi2:.17g}, mu2 = {orbit.mu2:.17g}")
    else:
        p_in = np.array([math.sqrt(1.0 + p["pz"] ** 2), 0.0, 0.0, p["pz"]])
        if cl.is_rest_state(bg, p_in):
            write_csv(csv_path, ["state", "t", "x", "y", "z", "p0", "p1", "p2", "p3"],
                      [["at rest", 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]])
            log("case = delta, at rest (fixed point between equal waves)")
            return [csv_path]
        orbit = cl.delta_orbit(bg, p_in)
        if not orbit.allowed:
            raise ForbiddenRegimeError(
                f"zero-transverse motion is forbidden: varpi_Delta^2 = {orbit.varpi2:.6g} < 0, "
                "(k_Delta.p)^2 is below k_Delta^2 times the peak of a.a")
        analytic = cl.reconstruct_trajectory(bg, "delta", tau, p_in=p_in)
        init = cl.delta_initial_state(bg, p_in, orbit)
        phase = cl.delta_phases(orbit, bg, p_in, tau)[0]
        log(f"case = delta, regime = {orbit.regime}, varpi2 = {orbit.varpi2:.17g}, "
            f"mu2 = {orbit.mu2:.17g}")
    oracle = cl.integrate_lorentz(bg, init, p["tau_max"], tol=cfg.tol, tau_eval=tau)
    phase_oracle = cl.oracle_phase(bg, oracle, p["case"])
    keys = sorted(relkin.transverse_basis(bg))
    rows = []
    for i in range(len(tau)):
        state = oracle.state(i)
        conserved = [cl.conserved_transverse(bg, state, l, j) for l, j in keys]
        rows.append([tau[i], *analytic.x[i], *analytic.p[i], phase[i], phase_oracle[i],
                     *oracle.x[i], *conserved, cl.conserved_longitudinal(bg, state)])
    write_csv(csv_path, _TRAJ_HEADER, rows)
    log(f"max |phase - phase_oracle| = {float(np.max(np.abs(phase - phase_oracle))):.3e}")
    files = [csv_path]
    if cfg.fmt == "csv+svg":
        orbit_svg = cfg.out / f"{cfg.stem}_orbit.svg"
        write_svg(orbit_svg, [("analytic", analytic.x[:, 1], analytic.x[:, 2]),
                              ("Lorentz", oracle.x[:, 1], oracle.x[:, 2])],
                  title="transverse orbit", xlabel="x", ylabel="y")
        phase_svg = cfg.out / f"{cfg.stem}_phase.svg"
        write_svg(phase_svg, [("analytic", tau, phase), ("Lorentz", tau, phase_oracle)],
                  title="phase", xlabel="tau", ylabel="phase")
        files += [orbit_svg, phase_svg]
    return files


def _map(cfg, func, items):
    if cfg.threads == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(func, items))


def cmd_floquet_map(cfg, log):
    """Mathieu Floquet exponent on a (lambda, Q) grid."""
    p = cfg.params
    lams = np.linspace(p["lam_min"], p["lam_max"], p["lam_points"])
    qs = np.linspace(p["q_min"], p["q_max"], p["q_points"])
    cells = [(lam, q) for q in qs for lam in lams]

    def evaluate(cell):
        return mathieu_nu(MathieuSpec(float(cell[0]), float(cell[1])), rtol=cfg.tol)

    results = _map(cfg, evaluate, cells)
    rows = []
    for (lam, q), fe in zip(cells, results):
        ratio = q / lam if lam != 0.0 else math.copysign(math.inf, q) if q else math.nan
        rows.append([lam, q, fe.nu_re, fe.nu_im, fe.is_band, ratio, 0.0 <= q < 0.5 * lam])
    csv_path = cfg.out / f"{cfg.stem}.csv"
    write_csv(csv_path, ["lam", "Q", "re_nu", "im_nu", "band", "q_over_lam", "wedge"], rows)
    log(f"{sum(not r[4] for r in rows)} of {len(rows)} cells in gaps")
    files = [csv_path]
    if cfg.fmt == "csv+svg":
        svg = cfg.out / f"{cfg.stem}.svg"
        picks = sorted(set(np.linspace(0, len(qs) - 1, min(len(qs), 5)).round().astype(int)))
        im = np.array([r[3] for r in rows]).reshape(len(qs), len(lams))
        write_svg(svg, [(f"Q = {qs[i]:.3g}", lams, im[i]) for i in picks],
                  title="Im nu", xlabel="lambda", ylabel="Im nu")
        files.append(svg)
    return files


_QM_HEADER = ["value", "m2_PW", "m2_HE", "m2_MS", "m2_exact_re", "m2_exact_im", "re_nu", "im_nu",
              "band"]


def _quasimomentum_row(value, p, tol):
    xs = value if p["sweep"] == "xi_sigma" else p["xi_sigma"]
    pp = value if p["sweep"] == "p_perp" else p["p_perp"]
    bg = relkin.Background.head_on(0.5 * xs, 0.5 * xs, p["omega"])
    mom = np.array([math.sqrt(1.0 + pp * pp), pp, 0.0, 0.0])
    m2 = [qm.quasimomentum(bg, mom, "node", model).m_star2 for model in ("PW", "HE", "MS")]
    exact = qm.quasimomentum(bg, mom, "node", "Exact", rtol=tol)
    m2x = complex(exact.m_star2)
    return [value, *m2, m2x.real, m2x.imag, exact.nu.real, exact.nu.imag, exact.is_band]


def cmd_quasimomentum(cfg, log):
    """Effective mass of the node state for every model along a sweep."""
    p = cfg.params
    if p["scale"] == "log":
        values = np.geomspace(p["min"], p["max"], p["points"])
    else:
        values = np.linspace(p["min"], p["max"], p["points"])
    rows = _map(cfg, lambda v: _quasimomentum_row(float(v), p, cfg.tol), values)
    csv_path = cfg.out / f"{cfg.stem}.csv"
    write_csv(csv_path, _QM_HEADER, rows)
    log(f"sweep over {p['sweep']}: {sum(not r[-1] for r in rows)} of {len(rows)} points in gaps")
    files = [csv_path]
    if cfg.fmt == "csv+svg":
        svg = cfg.out / f"{cfg.stem}.svg"
        cols = list(zip(*rows))
        write_svg(svg, [(name, values, cols[i]) for i, name in
                        ((1, "PW"), (2, "HE"), (3, "MS"), (4, "Exact"))],
                  title="effective mass squared", xlabel=p["sweep"], ylabel="m*^2",
                  logx=p["scale"] == "log")
        files.append(svg)
    return files


def cmd_compton(cfg, log):
    """Harmonic emission spectrum with a convergence report."""
    p = cfg.params
    conf = em.EmissionConfig(p["xi"], p["kp"], p["s_max"], quad_tol=cfg.tol)
    spec = em.spectrum(conf, p["scheme"])
    cumulative = spec.cumulative()
    csv_path = cfg.out / f"{cfg.stem}.csv"
    write_csv(csv_path, ["s", "W_s", "cumulative"],
              [[s, w, c] for (s, w), c in zip(spec.entries, cumulative)])
    report = [f"harmonics = {len(spec.entries)}", f"total = {spec.total:.17g}",
              f"tail = {spec.tail:.17g}", f"converged = {str(spec.converged).lower()}",
              f"stopped_early = {str(spec.stopped_early).lower()}"]
    if p["l_parallel"] is not None:
        stab = em.node_emission_stability(p["l_parallel"])
        verdict = "unstable" if stab.unstable else "stable"
        report.append(f"node_emission = {verdict} (longitudinal recoil {stab.recoil:.17g})")
    report_path = cfg.out / f"{cfg.stem}_report.txt"
    report_path.write_text("\n".join(report) + "\n", encoding="utf-8", newline="\n")
    for line in report:
        log(line)
    files = [csv_path, report_path]
    if cfg.fmt == "csv+svg":
        svg = cfg.out / f"{cfg.stem}.svg"
        write_svg(svg, [("W_s", [s for s, _ in spec.entries], [w for _, w in spec.entries])],
                  title="harmonic spectrum", xlabel="s", ylabel="W_s", logy=True)
        files.append(svg)
    if not spec.converged:
        raise NonConvergenceError(
            f"harmonic sum not converged: tail estimate {spec.tail:.3g} exceeds "
            f"{conf.tail_tol:g} x total {spec.total:.3g}")
    return files


COMMANDS = {"trajectory": cmd_trajectory, "floquet-map": cmd_floquet_map,
            "quasimomentum": cmd_quasimomentum, "compton": cmd_compton}


# --------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="counterwave",
        description="Charged scalar dynamics in two counter-propagating circularly polarised waves.",
        epilog="exit codes: 0 ok, 2 invalid configuration, 3 forbidden regime, 4 non-convergence")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, schema in SCHEMAS.items():
        cp = sub.add_parser(command, help=COMMANDS[command].__doc__ or command,
                            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        cp.add_argument("--preset", help="named parameter set (see 'presets list')")
        cp.add_argument("--config", help="file of 'key = value' lines; flags override it")
        cp.add_argument("--out", default=".", help="output directory")
        cp.add_argument("--tol", type=float, default=None,
                        help=f"numerical tolerance (default {DEFAULT_TOL[command]:g})")
        cp.add_argument("--format", choices=("csv", "csv+svg"), default=None,
                        help="output format (default csv)")
        cp.add_argument("--threads", type=int, default=None,
                        help="worker threads for independent sweep points (default 1)")
        group = cp.add_argument_group("parameters")
        for key, (convert, default, text) in schema.items():
            group.add_argument("--" + key.replace("_", "-"), dest=key, type=convert, default=None,
                               help=text if default is None else f"{text} (default {default})")
    pp = sub.add_parser("presets", help="list or show named parameter sets")
    psub = pp.add_subparsers(dest="action", required=True)
    psub.add_parser("list", help="print preset names")
    show = psub.add_parser("show", help="print a preset in config-file syntax")
    show.add_argument("name")
    return parser


def _presets(args, out):
    if args.action == "list":
        width = max(len(n) for n in PRESETS)
        for name, preset in PRESETS.items():
            out.write(f"{name:<{width}}  {preset.command:<14} {preset.description}\n")
        return EXIT_OK
    preset = get_preset(args.name)
    out.write(f"# {preset.name}: {preset.description}\n# command: {preset.command}\n")
    out.write(format_config(preset.params))
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except ConfigError as exc:
        stderr.write(f"counterwave: error: {exc}\n")
        return EXIT_CONFIG
    try:
        if args.command == "presets":
            return _presets(args, stdout)
        cfg = resolve_config(args)
        cfg.out.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[cfg.command](cfg, lambda line: stdout.write(line + "\n"))
        for path in files:
            stdout.write(f"wrote {path}\n")
        return EXIT_OK
    except ConfigError as exc:
        stderr.write(f"counterwave: configuration error: {exc}\n")
        return EXIT_CONFIG
    except ForbiddenRegimeError as exc:
        stderr.write(f"counterwave: forbidden regime: {exc}\n")
        return EXIT_FORBIDDEN
    except NonConvergenceError as exc:
        stderr.write(f"counterwave: not converged: {exc}\n")
        return EXIT_NONCONVERGENCE
