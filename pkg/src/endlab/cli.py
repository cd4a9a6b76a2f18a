"""Command-line front end: bound evaluation, dependence certification,
condition checking, and Monte Carlo experiment runs with deterministic CSV
output.

Exit codes: 0 success (all conditions satisfied for ``check``), 1 domain or
evaluation error, 2 bad flags, 3 some condition violated, 4 some condition
inconclusive with none violated.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import norming
from .dependence import (CertificationError, MarginalSpec, TriangularArrayModel,
                         certify_end_row, load_joint_table)
from .norming import (ConditionReport, MonotoneFunction, NormingScheme,
                      default_probe_grid, parse_monotone)
from .presets import PRESET_NAMES, preset_config
from .simulate import (ExperimentPlan, WeightRule, complete_convergence_diagnostic,
                       row_stat_matrix, strong_law_path_diagnostic, tail_table)

__all__ = ["entry", "main", "parse_config_text", "parse_output_header",
           "dump_config_lines"]


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config file format: [section] headers, key = value lines, # comments
# ---------------------------------------------------------------------------

_SCHEMA = {
    "model": ("kind", "marginal", "theta", "rho", "joint_file", "claimed_m",
              "dominating"),
    "scheme": ("a", "b", "s"),
    "plan": ("name", "epsilons", "n_schedule", "replications", "seed",
             "center", "semantics", "weights"),
    "check": ("alpha", "delta_list", "n_list", "margin", "n_probe_min",
              "n_probe_max", "n_probe_points"),
    "bound": ("kind", "a", "s", "m", "lambda", "p"),
    "output": ("dir",),
}


def parse_config_text(text: str) -> dict:
    """Parse the line-oriented config format; unknown sections or keys are
    errors."""
    cfg: dict = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            cfg.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        cfg[section][key] = value
    return cfg


def dump_config_lines(cfg: dict) -> list:
    lines = []
    for section in _SCHEMA:
        body = cfg.get(section)
        if not body:
            continue
        lines.append(f"[{section}]")
        for key in _SCHEMA[section]:
            if key in body:
                lines.append(f"{key} = {body[key]}")
    return lines


def parse_output_header(path) -> dict:
    """Recover the echoed configuration from an output file's # header."""
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            lines.append(raw[1:].strip())
    return parse_config_text("\n".join(lines))


def _parse_marginal(text: str) -> MarginalSpec:
    text = text.strip()
    if "(" not in text or not text.endswith(")"):
        raise ConfigError(f"bad marginal syntax {text!r}")
    family, body = text[:-1].split("(", 1)
    family = family.strip()
    if family in ("two_point", "discrete"):
        try:
            values_part, probs_part = body.split(";")
        except ValueError:
            raise ConfigError(f"{family} needs 'values;probs', got {text!r}") from None
        values = [float(v) for v in values_part.split(",")]
        probs = [float(v) for v in probs_part.split(",")]
        if family == "two_point":
            return MarginalSpec.two_point(values, probs)
        return MarginalSpec.discrete(values, probs)
    args = [float(v) for v in body.split(",")] if body else []
    if family == "uniform":
        return MarginalSpec.uniform(*args)
    if family == "pareto":
        return MarginalSpec.pareto(*args)
    if family == "normal":
        return MarginalSpec.normal(*args)
    raise ConfigError(f"unknown marginal family {family!r}")


def _parse_weights(text: str) -> WeightRule | None:
    text = text.strip()
    if text in ("none", ""):
        return None
    if "(" in text and text.endswith(")"):
        kind, body = text[:-1].split("(", 1)
        return WeightRule(kind.strip(), float(body) if body else 1.0)
    return WeightRule(text)


def _parse_claimed_m(text: str):
    text = text.strip()
    if "(" in text:
        fn = parse_monotone(text)
        return lambda n: float(fn(float(n)))
    return float(text)


def build_model(cfg: dict):
    body = cfg.get("model", {})
    kind = body.get("kind", "independent")
    marginal = _parse_marginal(body["marginal"]) if "marginal" in body else None
    joints = None
    if kind == "discrete_joint":
        if "joint_file" not in body:
            raise ConfigError("discrete_joint model needs joint_file")
        table = load_joint_table(body["joint_file"])
        joints = {table.n_coords: table}
    model = TriangularArrayModel(
        kind=kind,
        marginal=marginal,
        theta=float(body.get("theta", 0.0)),
        rho=float(body.get("rho", 0.0)),
        joints=joints,
        claimed_m=_parse_claimed_m(body.get("claimed_m", "1.0")),
    )
    dominating = (_parse_marginal(body["dominating"])
                  if "dominating" in body else marginal)
    return model, dominating


def build_scheme(cfg: dict) -> NormingScheme:
    body = cfg.get("scheme", {})
    try:
        return NormingScheme(a=parse_monotone(body["a"]),
                             b=parse_monotone(body["b"]),
                             s=parse_monotone(body["s"]))
    except KeyError as exc:
        raise ConfigError(f"missing scheme entry {exc}") from None


def build_plan(cfg: dict, model, scheme, seed_override=None) -> ExperimentPlan:
    body = cfg.get("plan", {})
    seed = int(body.get("seed", "0")) if seed_override is None else int(seed_override)
    replications = int(body.get("replications", "1000"))
    if replications <= 0:
        raise ConfigError("replications must be positive")
    return ExperimentPlan(
        model=model,
        scheme=scheme,
        epsilons=tuple(float(v) for v in body.get("epsilons", "0.1,0.5,1.0").split(",")),
        n_schedule=tuple(int(v) for v in body.get(
            "n_schedule", ",".join(str(2 ** k) for k in range(4, 17))).split(",")),
        replications=replications,
        seed=seed,
        center=body.get("center", "subtract_mean"),
        semantics=body.get("semantics", "triangular"),
        weights=_parse_weights(body.get("weights", "none")),
        name=body.get("name", "experiment"),
    )


def build_check_params(cfg: dict) -> dict:
    body = cfg.get("check", {})
    grid = default_probe_grid(float(body.get("n_probe_min", "10")),
                              float(body.get("n_probe_max", "1e9")),
                              int(body.get("n_probe_points", "33")))
    return {
        "alpha": float(body.get("alpha", "1.0")),
        "delta_list": tuple(float(v) for v in
                            body.get("delta_list", "0.1,1,10").split(",")),
        "n_list": tuple(int(v) for v in
                        body.get("n_list", "1,10,100,1000,10000").split(",")),
        "margin": float(body.get("margin", "0.05")),
        "n_probe": grid,
    }


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _evidence_text(evidence: dict) -> str:
    parts = []
    for key, value in evidence.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.6g}")
        else:
            parts.append(f"{key}={value}")
    return ";".join(parts)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _tails_from_sum(total: float):
    if total < 0.0:
        raise ValueError("tail sum must be >= 0")
    pieces = max(1, math.ceil(total)) if total > 0 else 1
    share = total / pieces

    def tail(_t, share=share):
        return share

    return [tail] * pieces


def cmd_bound(args) -> int:
    kind = args.kind
    if kind == "fuk-nagaev":
        if args.lam is None or args.p is None:
            print("fuk-nagaev requires --lambda and --p", file=sys.stderr)
            return 2
        inputs = bounds_mod.FukNagaevInputs(
            epsilon=args.eps, lam=args.lam, p=args.p,
            abs_moment_sum=args.s, m=args.m,
            marginal_tails=_tails_from_sum(args.tail_sum))
        result = bounds_mod.fuk_nagaev_bound(inputs)
    else:
        inputs = bounds_mod.BoundInputs(epsilon=args.eps, a=args.a,
                                        s=args.s, m=args.m)
        fn = bounds_mod.bennett_bound if kind == "bennett" \
            else bounds_mod.bernstein_bound
        result = fn(inputs)
    print("kind,eps,bound,log_bound")
    print(f"{kind},{_fmt(args.eps)},{_fmt(result.bound)},{_fmt(result.log_bound)}")
    return 0


def cmd_certify(args) -> int:
    table = load_joint_table(args.joint)
    certificate = certify_end_row(table, args.mode,
                                  max_coords=args.max_coords,
                                  max_atoms_per_coord=args.max_atoms)
    print("row,m_uend,m_lend,m_end,status")
    print(f"{certificate.row},{_fmt(certificate.m_uend)},"
          f"{_fmt(certificate.m_lend)},{_fmt(certificate.m_end)},"
          f"{certificate.status}")
    return 0


def cmd_check(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config_text(fh.read())
    model, dominating = build_model(cfg)
    scheme = build_scheme(cfg)
    params = build_check_params(cfg)
    if args.theorem == "1":
        if dominating is None:
            raise ConfigError("checking the full condition set needs a "
                              "dominating marginal")
        report = norming.check_theorem1_conditions(
            model, scheme, dominating, model.claimed_m_at, params["alpha"],
            n_list=params["n_list"], n_probe=params["n_probe"],
            delta_list=params["delta_list"], margin=params["margin"])
    else:
        report = norming.check_lemma3_conditions(
            model, scheme, model.claimed_m_at, params["alpha"],
            n_list=params["n_list"], n_probe=params["n_probe"],
            delta_list=params["delta_list"], margin=params["margin"])
    print("condition,verdict,evidence")
    for entry_ in report:
        print(f"{entry_.id},{entry_.verdict},{_evidence_text(entry_.evidence)}")
    if report.any_violated:
        return 3
    if report.any_inconclusive:
        return 4
    return 0


def _overlay_bound(cfg, plan, n, eps):
    """Probability-scale bound for P{|normalized sum| > eps} at row n, or
    (nan, reason) when the bound's support precondition fails."""
    body = cfg.get("bound", {})
    kind = body.get("kind", "none")
    if kind in ("none", ""):
        return None, ""
    m_raw = body.get("m", "claimed")
    m_value = plan.model.claimed_m_at(n) if m_raw == "claimed" else float(m_raw)
    a_n = float(body["a"]) if "a" in body else float(plan.scheme.a(n))
    s_n = float(body["s"]) if "s" in body else float(plan.scheme.s(n))
    eps_scaled = eps * float(plan.scheme.b(n))

    weights = plan.weights.vector(n) if plan.weights is not None else np.ones(n)
    supports = []
    for k in range(1, n + 1):
        spec = plan.model.marginal_for(n, k)
        shift = abs(spec.mean()) if plan.center == "subtract_mean" else 0.0
        supports.append(abs(weights[k - 1]) * (spec.support_abs_bound() + shift))
    if max(supports) > a_n * (1.0 + 1e-12):
        return math.nan, "support exceeds a"

    if kind == "bennett":
        result = bounds_mod.bennett_bound(
            bounds_mod.BoundInputs(eps_scaled, a_n, s_n, max(1.0, m_value), n))
        return min(1.0, 2.0 * result.bound), ""
    if kind == "bernstein":
        result = bounds_mod.bernstein_bound(
            bounds_mod.BoundInputs(eps_scaled, a_n, s_n, max(1.0, m_value), n))
        return min(1.0, 2.0 * result.bound), ""
    raise ConfigError(f"unsupported overlay bound {kind!r}")


def cmd_simulate(args) -> int:
    if bool(args.config) == bool(args.preset):
        print("exactly one of --config or --preset is required", file=sys.stderr)
        return 2
    if args.preset:
        cfg = preset_config(args.preset)
    else:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read())
    if args.seed is not None:
        cfg.setdefault("plan", {})["seed"] = str(int(args.seed))
    out_dir = Path(args.out or cfg.get("output", {}).get("dir", "."))
    cfg.setdefault("output", {})["dir"] = str(out_dir)

    model, _dominating = build_model(cfg)
    scheme = build_scheme(cfg)
    plan = build_plan(cfg, model, scheme)

    out_dir.mkdir(parents=True, exist_ok=True)
    header = [f"# {line}" for line in dump_config_lines(cfg)]

    stats = row_stat_matrix(plan)
    estimates = tail_table(plan, stats)

    tails_lines = header + ["experiment,n,epsilon,estimate,half_width,bound,satisfied"]
    for n in plan.n_schedule:
        for eps in plan.epsilons:
            est = estimates[(n, eps)]
            bound_value, note = _overlay_bound(cfg, plan, n, eps)
            if bound_value is None or (isinstance(bound_value, float)
                                       and math.isnan(bound_value)):
                bound_text, satisfied_text = "", ""
            else:
                bound_text = _fmt(bound_value)
                satisfied_text = _fmt(est.value + 3.0 * est.half_width
                                      <= bound_value)
            tails_lines.append(
                f"{plan.name},{n},{_fmt(eps)},{_fmt(est.value)},"
                f"{_fmt(est.half_width)},{bound_text},{satisfied_text}")
    (out_dir / "tails.csv").write_text("\n".join(tails_lines) + "\n",
                                       encoding="utf-8")

    conv_lines = header + ["experiment,epsilon,partial_sum,last_term,slope"]
    for row in complete_convergence_diagnostic(plan, stats):
        conv_lines.append(f"{plan.name},{_fmt(row.epsilon)},"
                          f"{_fmt(row.partial_sum)},{_fmt(row.last_term)},"
                          f"{_fmt(row.slope)}")
    (out_dir / "convergence.csv").write_text("\n".join(conv_lines) + "\n",
                                             encoding="utf-8")

    path_lines = header + ["experiment,N,trailing_sup_p95"]
    for row in strong_law_path_diagnostic(plan, stats):
        path_lines.append(f"{plan.name},{row.start_n},{_fmt(row.trailing_sup_p95)}")
    (out_dir / "trailing_sup.csv").write_text("\n".join(path_lines) + "\n",
                                              encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="endlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate one tail bound")
    p_bound.add_argument("--kind", required=True,
                         choices=("bennett", "bernstein", "fuk-nagaev"))
    p_bound.add_argument("--eps", type=float, required=True)
    p_bound.add_argument("--a", type=float, default=1.0)
    p_bound.add_argument("--s", type=float, required=True)
    p_bound.add_argument("--m", type=float, default=1.0)
    p_bound.add_argument("--lambda", dest="lam", type=float, default=None)
    p_bound.add_argument("--p", type=float, default=None)
    p_bound.add_argument("--tail-sum", dest="tail_sum", type=float, default=0.0)
    p_bound.set_defaults(fn=cmd_bound)

    p_cert = sub.add_parser("certify", help="certify a discrete joint table")
    p_cert.add_argument("--joint", required=True)
    p_cert.add_argument("--mode", choices=("uend", "lend", "end"), default="end")
    p_cert.add_argument("--max-coords", type=int, default=4)
    p_cert.add_argument("--max-atoms", type=int, default=6)
    p_cert.set_defaults(fn=cmd_certify)

    p_check = sub.add_parser("check", help="check norming conditions")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--theorem", choices=("1", "lemma3"), default="1")
    p_check.set_defaults(fn=cmd_check)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    p_sim.add_argument("--config")
    p_sim.add_argument("--preset", choices=PRESET_NAMES)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, CertificationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
