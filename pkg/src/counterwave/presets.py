"""Named parameter sets for the figure reproductions and demo sweeps.

Presets are plain data: each is a command name plus key/value parameters in
the same schema the ``--config`` file uses. Transverse momenta of the node
presets are given as fractions of the potential at the start phase,
p_perp = (frac_x a_x(phi_start), frac_y a_y(phi_start)), so Pi = p + a.
"""
from dataclasses import dataclass, field
import math

from .errors import ConfigError

__all__ = ["Preset", "PRESETS", "get_preset", "format_config"]


@dataclass(frozen=True)
class Preset:
    name: str
    command: str
    description: str
    params: dict = field(default_factory=dict)


_NODE = dict(case="node", xi1=10.0, xi2=10.0, omega1=0.01, omega2=0.01,
             phi_start=math.pi / 4, tau_max=50.0, points=1001)
_DELTA = dict(case="delta", xi1=10.0, xi2=10.0, omega1=0.01, omega2=0.01,
              pz=20.0005, tau_max=50.0, points=1001)

PRESETS = {p.name: p for p in (
    Preset("fig1-thin", "trajectory",
           "Magnetic node, Pi_in = 0: circular transverse orbit, s = 0.",
           dict(_NODE, p_frac_x=-1.0, p_frac_y=-1.0)),
    Preset("fig1-dashed", "trajectory",
           "Magnetic node, p.eps1 = a.eps1, p.eps2 = 0.2 a.eps2 at the start phase.",
           dict(_NODE, p_frac_x=1.0, p_frac_y=0.2)),
    Preset("fig1-thick", "trajectory",
           "Magnetic node, transverse kinetic momentum -> 0 at the start phase (Pi_in = a_in).",
           dict(_NODE, p_frac_x=0.0, p_frac_y=0.0)),
    Preset("fig2-left", "trajectory",
           "Zero transverse canonical momentum, equal waves xi = 10: cusped helix.",
           dict(_DELTA)),
    Preset("fig2-right", "trajectory",
           "Zero transverse canonical momentum, xi1 = 0.01, xi2 = 10: drifting near-circular orbit.",
           dict(_DELTA, xi1=0.01)),
    Preset("rest", "trajectory",
           "Particle at rest between equal waves: fixed point.",
           dict(_DELTA, pz=0.0)),
    Preset("fig3", "quasimomentum",
           "Effective mass vs p_perp at the node, xi_Sigma = 1, k_bar^2 = 0.01^2.",
           dict(sweep="p_perp", min=1e-2, max=1e2, points=41, scale="log",
                xi_sigma=1.0, omega=0.01, p_perp=1.0)),
    Preset("fig4", "quasimomentum",
           "Effective mass vs xi_Sigma at the node, k_bar^2 = 5^2, p_perp = 2: band structure.",
           dict(sweep="xi_sigma", min=0.1, max=100.0, points=121, scale="log",
                xi_sigma=1.0, omega=5.0, p_perp=2.0)),
    Preset("floquet", "floquet-map",
           "Mathieu stability chart over lambda in [-2, 10], Q in [0, 5].",
           dict(lam_min=-2.0, lam_max=10.0, lam_points=61, q_min=0.0, q_max=5.0, q_points=26)),
    Preset("compton", "compton",
           "Harmonic spectrum for xi = 1, k.p = 0.01, up to s = 50.",
           dict(xi=1.0, kp=0.01, s_max=50)),
)}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; run 'presets list'") from None


def format_config(params):
    """Render parameters in config-file syntax, one ``key = value`` per line."""
    lines = []
    for key in sorted(params):
        value = params[key]
        text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
