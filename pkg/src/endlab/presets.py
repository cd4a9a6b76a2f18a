"""Built-in experiment parameterizations addressable from the CLI.

Each preset is a full configuration (the same shape a config file parses to),
so a preset run echoes and round-trips exactly like a file-driven run.  The
``corollary1-p*`` family uses independent rows of a small-variance bounded
uniform with power norming; ``theorem2-p1.5`` runs a negatively linked chain
in sequence semantics with power-log norming.  Every preset pins delta_list
to the range its construction provably covers; the generic default
(0.1, 1, 10) stays in place for hand-written configs.
"""

from __future__ import annotations

import math

from .dependence import MarginalSpec

__all__ = ["PRESET_NAMES", "preset_config"]

# uniform(-h, h) with sd h/sqrt(3) ~ 0.058: deviations are visible on the
# early schedule and die below Monte Carlo resolution inside the slope window
_BOUNDED_HALF_WIDTH = 0.1


def _corollary1(p: float, name: str) -> dict:
    marginal = MarginalSpec.uniform(-_BOUNDED_HALF_WIDTH, _BOUNDED_HALF_WIDTH)
    if p >= 1.0:
        a = f"pow(exp={1.0 / p!r},scale={(2.0 - p) / (2.0 * p)!r})"
        s = f"pow(exp=1.0,scale={marginal.second_moment()!r})"
    else:
        # variance budget n * a(n)^(2-2p) * E|X|^(2p), with a margin factor 2
        s_exp = (2.0 - p) / p
        s_scale = 2.0 * marginal.abs_moment(2.0 * p) / 2.0 ** (2.0 - 2.0 * p)
        a = f"pow(exp={1.0 / p!r},scale=0.5)"
        s = f"pow(exp={s_exp!r},scale={s_scale!r})"
    return {
        "model": {
            "kind": "independent",
            "marginal": marginal.to_config(),
            "claimed_m": "1.0",
            "dominating": marginal.to_config(),
        },
        "scheme": {
            "a": a,
            "b": f"pow(exp={1.0 / p!r},scale=1.0)",
            "s": s,
        },
        "plan": {
            "name": name,
            "epsilons": "0.1,0.5,1.0",
            "n_schedule": ",".join(str(2 ** k) for k in range(4, 15)),
            "replications": "2000",
            "seed": "42",
            "center": "subtract_mean",
            "semantics": "triangular",
            "weights": "none",
        },
        "check": {
            "alpha": "1.0",
            "delta_list": "0.1,0.5,1.0",
            "n_list": "1,10,100,1000,10000",
            "margin": "0.05",
        },
        "bound": {
            "kind": "bennett",
            "m": "claimed",
        },
        "output": {},
    }


def _corollary1_control() -> dict:
    cfg = _corollary1(1.5, "corollary1-p1.5-control")
    cfg["scheme"]["b"] = "affine(intercept=1.0,slope=0.0)"  # no normalization
    return cfg


def _theorem2(p: float, name: str) -> dict:
    marginal = MarginalSpec.uniform(0.0, 1.0)
    e = 1.0 / p
    return {
        "model": {
            "kind": "fgm_negative",
            "theta": "-1.0",
            "marginal": marginal.to_config(),
            "claimed_m": "1.0",
            "dominating": marginal.to_config(),
        },
        "scheme": {
            "a": f"powlog(exp={e!r},log_exp={-e!r},scale=1.0)",
            "b": f"powlog(exp={e!r},log_exp={1.0 - e!r},scale=1.0)",
            "s": f"pow(exp=1.0,scale={4.0 * marginal.second_moment()!r})",
        },
        "plan": {
            "name": name,
            "epsilons": "0.1,0.5,1.0",
            "n_schedule": ",".join(str(2 ** k) for k in range(6, 15)),
            "replications": "500",
            "seed": "42",
            "center": "subtract_mean",
            "semantics": "sequence",
            "weights": "none",
        },
        "check": {
            "alpha": "1.0",
            "delta_list": "0.1,0.5,1.0",
            "n_list": "1,10,100,1000,10000",
            "margin": "0.05",
        },
        "bound": {
            "kind": "bennett",
            "m": "claimed",
        },
        "output": {},
    }


_BUILDERS = {
    "corollary1-p0.75": lambda: _corollary1(0.75, "corollary1-p0.75"),
    "corollary1-p1.0": lambda: _corollary1(1.0, "corollary1-p1.0"),
    "corollary1-p1.5": lambda: _corollary1(1.5, "corollary1-p1.5"),
    "corollary1-p1.5-control": _corollary1_control,
    "theorem2-p1.5": lambda: _theorem2(1.5, "theorem2-p1.5"),
}

PRESET_NAMES = tuple(sorted(_BUILDERS))


def preset_config(name: str) -> dict:
    """Raw configuration for a named preset (same shape as a parsed file)."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}") from None
    return builder()
