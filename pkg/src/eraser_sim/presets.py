"""Named experiment files for every panel row of the two figures."""
from __future__ import annotations

from .experiment import ExperimentFile, parse_experiment

_NO_QWP = "qwp.1 = none\nqwp.2 = none\n"
_XI0 = "qwp.1 = 0\nqwp.2 = 0\n"
_XI45 = "qwp.1 = 45\nqwp.2 = 45\n"

# Coincidence-resolved counting needs several photons per window; mu = 1.6 per
# 1 us window gives a ~1e-1 drop per added detector.
_MC = """mode = montecarlo
seed = 1
source.mu = 1.6
source.window = 1e-6
source.integration = 0.1
noise.enabled = true
"""

_CW = """mode = cw
seed = 1
noise.enabled = true
cw.samples = 30
cw.power_uw = 300
outputs = I1,I2,I3,I4,C12,C34,C1234
"""

PRESETS: dict[str, str] = {
    "fig2_top": "mode = analytic\n" + _NO_QWP,
    "fig2_mid": "mode = analytic\n" + _XI0,
    "fig2_bot": "mode = analytic\n" + _XI45,
    "fig2_top_mc": _MC + _NO_QWP,
    "fig2_mid_mc": _MC + _XI0,
    "fig2_bot_mc": _MC + _XI45,
    "faint_mc": "mode = montecarlo\nseed = 1\nsource.mu = 0.01\n" + _XI0,
    "fig3_top": _CW + _XI0,
    "fig3_bot": _CW + _XI45,
}

GROUPS: dict[str, tuple[str, ...]] = {
    "fig2": ("fig2_top", "fig2_mid", "fig2_bot"),
    "fig2_mc": ("fig2_top_mc", "fig2_mid_mc", "fig2_bot_mc"),
    "fig3": ("fig3_top", "fig3_bot"),
}


def names() -> list[str]:
    return sorted(PRESETS) + sorted(GROUPS)


def load(name: str, seed: int | None = None) -> list[ExperimentFile]:
    """Experiment files of a preset or preset group."""
    if name in GROUPS:
        return [exp for member in GROUPS[name] for exp in load(member, seed)]
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; try one of: {', '.join(names())}")
    text = f"name = {name}\n" + PRESETS[name]
    if seed is not None:
        text = "\n".join(l for l in text.splitlines() if not l.startswith("seed")) + f"\nseed = {seed}\n"
    return [parse_experiment(text)]
