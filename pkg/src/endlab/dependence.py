"""Triangular-array models with controllable row dependence.

Three concrete constructions are supported — independent rows, chains of
negatively parameterised FGM links, and Gaussian copulas with nonpositive
correlations — plus explicit discrete joint tables.  Samplers are keyed by
(seed, row, replication) so replications reproduce independently of
scheduling.  Dependence constants are never assumed: finite joint tables are
certified by exhaustive threshold enumeration, and continuous constructions
are certified through discretizations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, stats

__all__ = [
    "CertificationError",
    "DominationReport",
    "EndCertificate",
    "JointTable",
    "MarginalSpec",
    "TriangularArrayModel",
    "certify_end_row",
    "certify_model_row",
    "check_stochastic_domination",
    "check_weak_mean_domination",
    "discretize_fgm",
    "discretize_fgm_chain",
    "discretize_gaussian",
    "load_joint_table",
    "dump_joint_table",
    "sample_row",
    "sample_rows",
    "rng_for",
]

_FAMILIES = ("two_point", "discrete", "uniform", "pareto", "normal")
_KINDS = ("independent", "fgm_negative", "gaussian_copula", "discrete_joint")


class CertificationError(ValueError):
    """A joint table admits no finite dependence constant (or is invalid)."""


def rng_for(*key) -> np.random.Generator:
    """Derived generator stream for a work item, e.g. (seed, row, replication)."""
    return np.random.default_rng(tuple(int(k) for k in key))


# ---------------------------------------------------------------------------
# marginal laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarginalSpec:
    """One marginal law, with closed-form tails and moments where available.

    Families: two_point/discrete (atoms + masses), uniform(lo, hi),
    pareto(shape, scale) on [scale, inf), normal(loc, sd).
    """

    family: str
    values: tuple = ()
    probs: tuple = ()
    lo: float = 0.0
    hi: float = 0.0
    shape: float = 0.0
    scale: float = 0.0
    loc: float = 0.0
    sd: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown marginal family {self.family!r}")
        if self.family in ("two_point", "discrete"):
            if len(self.values) != len(self.probs) or not self.values:
                raise ValueError("atoms and masses must be non-empty and aligned")
            if any(p < 0.0 for p in self.probs):
                raise ValueError("negative probability mass")
            if abs(sum(self.probs) - 1.0) > 1e-9:
                raise ValueError(f"masses sum to {sum(self.probs)}, not 1")
            if self.family == "two_point" and len(self.values) != 2:
                raise ValueError("two_point needs exactly two atoms")
        elif self.family == "uniform":
            if not self.lo < self.hi:
                raise ValueError("uniform needs lo < hi")
        elif self.family == "pareto":
            if self.shape <= 0.0 or self.scale <= 0.0:
                raise ValueError("pareto needs shape > 0 and scale > 0")
        elif self.family == "normal":
            if self.sd <= 0.0:
                raise ValueError("normal needs sd > 0")

    # constructors -----------------------------------------------------------
    @staticmethod
    def two_point(values, probs=(0.5, 0.5)) -> "MarginalSpec":
        return MarginalSpec("two_point", values=tuple(float(v) for v in values),
                            probs=tuple(float(p) for p in probs))

    @staticmethod
    def discrete(values, probs) -> "MarginalSpec":
        return MarginalSpec("discrete", values=tuple(float(v) for v in values),
                            probs=tuple(float(p) for p in probs))

    @staticmethod
    def uniform(lo, hi) -> "MarginalSpec":
        return MarginalSpec("uniform", lo=float(lo), hi=float(hi))

    @staticmethod
    def pareto(shape, scale=1.0) -> "MarginalSpec":
        return MarginalSpec("pareto", shape=float(shape), scale=float(scale))

    @staticmethod
    def normal(loc, sd) -> "MarginalSpec":
        return MarginalSpec("normal", loc=float(loc), sd=float(sd))

    def _is_atomic(self) -> bool:
        return self.family in ("two_point", "discrete")

    # moments -----------------------------------------------------------------
    def mean(self) -> float:
        if self._is_atomic():
            return float(np.dot(self.values, self.probs))
        if self.family == "uniform":
            return 0.5 * (self.lo + self.hi)
        if self.family == "pareto":
            if self.shape <= 1.0:
                raise ValueError("pareto mean is infinite for shape <= 1")
            return self.shape * self.scale / (self.shape - 1.0)
        return self.loc

    def second_moment(self) -> float:
        if self._is_atomic():
            return float(np.dot(np.square(self.values), self.probs))
        if self.family == "uniform":
            lo, hi = self.lo, self.hi
            return (hi ** 3 - lo ** 3) / (3.0 * (hi - lo))
        if self.family == "pareto":
            if self.shape <= 2.0:
                return math.inf
            return self.shape * self.scale ** 2 / (self.shape - 2.0)
        return self.loc ** 2 + self.sd ** 2

    def abs_moment(self, p: float) -> float:
        """E|X|^p."""
        if self._is_atomic():
            return float(np.dot(np.abs(self.values) ** p, self.probs))
        if self.family == "uniform":
            lo, hi = self.lo, self.hi
            q = p + 1.0

            def piece(u):  # integral of |x|^p from 0 to u, signed
                return math.copysign(abs(u) ** q / q, u)

            return (piece(hi) - piece(lo)) / (hi - lo)
        if self.family == "pareto":
            if p >= self.shape:
                return math.inf
            return self.shape * self.scale ** p / (self.shape - p)
        value, _ = integrate.quad(
            lambda x: abs(x) ** p * stats.norm.pdf(x, self.loc, self.sd),
            self.loc - 12 * self.sd, self.loc + 12 * self.sd,
            epsabs=1e-14, epsrel=1e-10, limit=200)
        return value

    def truncated_second_moment(self, a: float) -> float:
        """E[X^2 ; |X| <= a]."""
        if a < 0.0:
            raise ValueError("truncation level must be >= 0")
        if self._is_atomic():
            v = np.asarray(self.values)
            keep = np.abs(v) <= a
            return float(np.dot(np.square(v[keep]), np.asarray(self.probs)[keep]))
        if self.family == "uniform":
            lo = max(self.lo, -a)
            hi = min(self.hi, a)
            if lo >= hi:
                return 0.0
            return (hi ** 3 - lo ** 3) / (3.0 * (self.hi - self.lo))
        if self.family == "pareto":
            if a <= self.scale:
                return 0.0
            al, xm = self.shape, self.scale
            if al == 2.0:
                return 2.0 * xm ** 2 * math.log(a / xm)
            return al * xm ** al * (a ** (2.0 - al) - xm ** (2.0 - al)) / (2.0 - al)
        lo_z = (-a - self.loc) / self.sd
        hi_z = (a - self.loc) / self.sd
        phi_lo, phi_hi = stats.norm.pdf(lo_z), stats.norm.pdf(hi_z)
        cdf_lo, cdf_hi = stats.norm.cdf(lo_z), stats.norm.cdf(hi_z)
        mu, sd = self.loc, self.sd
        return (mu ** 2 * (cdf_hi - cdf_lo)
                + 2.0 * mu * sd * (phi_lo - phi_hi)
                + sd ** 2 * (cdf_hi - cdf_lo + lo_z * phi_lo - hi_z * phi_hi))

    # tails --------------------------------------------------------------------
    def sf_abs(self, t):
        """P{|X| > t}; accepts scalars or arrays, valid for t >= 0."""
        t = np.asarray(t, dtype=float)
        if self._is_atomic():
            v = np.abs(np.asarray(self.values))
            out = (v > t[..., None]) @ np.asarray(self.probs)
            return out if out.ndim else float(out)
        if self.family == "uniform":
            lo, hi = self.lo, self.hi
            width = hi - lo
            upper = np.clip(hi - np.maximum(lo, t), 0.0, None)
            lower = np.clip(np.minimum(hi, -t) - lo, 0.0, None)
            out = (upper + lower) / width
            return out if out.ndim else float(out)
        if self.family == "pareto":
            out = np.where(t < self.scale, 1.0, (self.scale / np.maximum(t, self.scale)) ** self.shape)
            return out if out.ndim else float(out)
        out = (stats.norm.sf((t - self.loc) / self.sd)
               + stats.norm.cdf((-t - self.loc) / self.sd))
        return out if out.ndim else float(out)

    def sf_abs_integral(self, lo, hi):
        """Integral of P{|X| > t} dt over [lo, hi]; vectorized over segments.

        Uses the identity int_0^t P{|X| > u} du = E[min(|X|, t)].
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if self.family == "normal":
            pairs = np.broadcast_arrays(lo, hi)
            flat = [integrate.quad(self.sf_abs, a, b, epsabs=1e-14,
                                   epsrel=1e-10, limit=200)[0]
                    for a, b in zip(pairs[0].ravel(), pairs[1].ravel())]
            out = np.asarray(flat).reshape(pairs[0].shape)
            return out if out.ndim else float(out)

        def expected_min_abs(t):
            # E[min(|X|, t)] for t >= 0
            t = np.asarray(t, dtype=float)
            if self._is_atomic():
                v = np.abs(np.asarray(self.values))
                p = np.asarray(self.probs)
                return np.minimum(t[..., None], v) @ p
            if self.family == "uniform":
                def positive_part(a, b):
                    # integral of min(x, t) dx over [a, b] with 0 <= a <= b
                    c = np.clip(t, a, b)
                    return 0.5 * (c * c - a * a) + t * (b - c)

                width = self.hi - self.lo
                pos = positive_part(max(self.lo, 0.0), max(self.hi, 0.0))
                neg = positive_part(max(-self.hi, 0.0), max(-self.lo, 0.0))
                return (pos + neg) / width
            al, xm = self.shape, self.scale
            t_ = np.maximum(t, 0.0)
            head = np.minimum(t_, xm)
            tail_hi = np.maximum(t_, xm)
            if al == 1.0:
                tail = xm * np.log(tail_hi / xm)
            else:
                tail = xm ** al * (tail_hi ** (1.0 - al) - xm ** (1.0 - al)) / (1.0 - al)
            return head + tail

        out = expected_min_abs(hi) - expected_min_abs(lo)
        return out if getattr(out, "ndim", 0) else float(out)

    # sampling ------------------------------------------------------------------
    def ppf(self, u):
        """Quantile transform; u in [0, 1)."""
        u = np.asarray(u, dtype=float)
        if self._is_atomic():
            cum = np.cumsum(self.probs)
            cum[-1] = 1.0
            idx = np.searchsorted(cum, u, side="right")
            out = np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]
            return out if out.ndim else float(out)
        if self.family == "uniform":
            out = self.lo + u * (self.hi - self.lo)
            return out if out.ndim else float(out)
        if self.family == "pareto":
            out = self.scale * (1.0 - u) ** (-1.0 / self.shape)
            return out if out.ndim else float(out)
        out = stats.norm.ppf(u, self.loc, self.sd)
        return out if out.ndim else float(out)

    # structure -------------------------------------------------------------------
    def support_abs_bound(self) -> float:
        """Smallest c with P{|X| <= c} = 1 (inf for unbounded families)."""
        if self._is_atomic():
            return float(np.max(np.abs(self.values)))
        if self.family == "uniform":
            return max(abs(self.lo), abs(self.hi))
        return math.inf

    def abs_breakpoints(self) -> list:
        """Thresholds where P{|X| > t} has kinks or jumps."""
        if self._is_atomic():
            return sorted({abs(v) for v in self.values})
        if self.family == "uniform":
            pts = {abs(self.lo), abs(self.hi)}
            if self.lo < 0.0 < self.hi:
                pts.add(0.0)
            return sorted(pts)
        if self.family == "pareto":
            return [self.scale]
        return []

    def to_config(self) -> str:
        if self.family in ("two_point", "discrete"):
            vals = ",".join(repr(v) for v in self.values)
            ps = ",".join(repr(p) for p in self.probs)
            return f"{self.family}({vals};{ps})"
        if self.family == "uniform":
            return f"uniform({self.lo!r},{self.hi!r})"
        if self.family == "pareto":
            return f"pareto({self.shape!r},{self.scale!r})"
        return f"normal({self.loc!r},{self.sd!r})"


# ---------------------------------------------------------------------------
# joint tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JointTable:
    """Explicit finite joint law: ``atoms`` is (n_atoms, n_coords), ``probs``
    the matching masses (summing to 1 within 1e-12)."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if atoms.ndim != 2 or probs.ndim != 1 or atoms.shape[0] != probs.shape[0]:
            raise ValueError("atoms must be (n_atoms, n_coords) with matching masses")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms must be finite")
        if np.any(probs < 0.0):
            raise ValueError("negative probability mass")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {float(probs.sum())!r}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @property
    def n_coords(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    def marginal(self, j: int) -> MarginalSpec:
        values, inverse = np.unique(self.atoms[:, j], return_inverse=True)
        masses = np.zeros(len(values))
        np.add.at(masses, inverse, self.probs)
        total = masses.sum()
        return MarginalSpec.discrete(values, masses / total)


def load_joint_table(path) -> JointTable:
    """Read the line-oriented joint-table format.

    Header ``n=<int> atoms=<int>`` then one line per atom ``x1 ... xn p``;
    ``#`` starts a comment line.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty joint table file")
    header = dict(part.split("=", 1) for part in rows[0].split())
    try:
        n = int(header["n"])
        n_atoms = int(header["atoms"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad joint table header {rows[0]!r}") from exc
    body = rows[1:]
    if len(body) != n_atoms:
        raise ValueError(f"expected {n_atoms} atom lines, found {len(body)}")
    atoms = np.empty((n_atoms, n))
    probs = np.empty(n_atoms)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != n + 1:
            raise ValueError(f"atom line {i + 1} has {len(parts)} fields, wanted {n + 1}")
        try:
            numbers = [float(x) for x in parts]
        except ValueError as exc:
            raise ValueError(f"non-numeric field on atom line {i + 1}: {ln!r}") from exc
        atoms[i] = numbers[:-1]
        probs[i] = numbers[-1]
    return JointTable(atoms, probs)


def dump_joint_table(table: JointTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n={table.n_coords} atoms={table.n_atoms}\n")
        for atom, p in zip(table.atoms, table.probs):
            fields = " ".join(repr(float(x)) for x in atom)
            fh.write(f"{fields} {float(p)!r}\n")


# ---------------------------------------------------------------------------
# array models and samplers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriangularArrayModel:
    """Generative description of one triangular array.

    ``kind`` selects the dependence mechanism; ``marginal`` is either a single
    MarginalSpec used for every coordinate or a callable (n, k) -> spec.
    ``claimed_m`` is the asserted dependence constant per row (a claim, only
    certification makes it an observable).
    """

    kind: str
    marginal: object = None
    theta: float = 0.0
    rho: float = 0.0
    correlation: Callable[[int], np.ndarray] | None = None
    joints: Mapping[int, JointTable] | None = None
    claimed_m: object = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "fgm_negative" and not (-1.0 <= self.theta <= 0.0):
            raise ValueError(f"fgm parameter must lie in [-1, 0], got {self.theta}")
        if self.kind == "gaussian_copula" and self.correlation is None:
            if not (-0.49 <= self.rho <= 0.0):
                # tridiagonal correlation stays positive definite for |rho| < 1/2
                raise ValueError(f"rho must lie in [-0.49, 0], got {self.rho}")
        if self.kind == "discrete_joint":
            if not self.joints:
                raise ValueError("discrete_joint model needs a joint table per row")
        elif self.marginal is None:
            raise ValueError(f"{self.kind} model needs a marginal")

    def marginal_for(self, n: int, k: int) -> MarginalSpec:
        if self.kind == "discrete_joint":
            return self.joint_for(n).marginal(k - 1)
        if callable(self.marginal):
            return self.marginal(n, k)
        return self.marginal

    def iid_marginal(self) -> MarginalSpec | None:
        """The shared marginal when every coordinate has the same law."""
        if self.kind != "discrete_joint" and not callable(self.marginal):
            return self.marginal
        return None

    def joint_for(self, n: int) -> JointTable:
        if self.joints is None or n not in self.joints:
            raise ValueError(f"no joint table configured for row n={n}")
        return self.joints[n]

    def claimed_m_at(self, n: int) -> float:
        if callable(self.claimed_m):
            return float(self.claimed_m(n))
        return float(self.claimed_m)

    def correlation_for(self, n: int) -> np.ndarray:
        if self.correlation is not None:
            r = np.asarray(self.correlation(n), dtype=float)
        else:
            r = np.eye(n)
            off = np.full(n - 1, self.rho)
            r[np.arange(n - 1), np.arange(1, n)] = off
            r[np.arange(1, n), np.arange(n - 1)] = off
        if r.shape != (n, n) or not np.allclose(r, r.T, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric (n, n)")
        if np.any(np.triu(r, 1) > 1e-12):
            raise ValueError("gaussian copula off-diagonals must be <= 0")
        return r


def _fgm_chain_uniforms(innov: np.ndarray, theta: float) -> np.ndarray:
    """Markov chain of FGM(theta)-linked uniforms driven by iid innovations."""
    u = np.empty_like(innov)
    u[:, 0] = innov[:, 0]
    for k in range(1, innov.shape[1]):
        a = theta * (1.0 - 2.0 * u[:, k - 1])
        w = innov[:, k]
        disc = np.maximum((1.0 + a) ** 2 - 4.0 * a * w, 0.0)
        denom = np.maximum((1.0 + a) + np.sqrt(disc), 1e-300)
        u[:, k] = np.where(np.abs(a) < 1e-12, w, 2.0 * w / denom)
    return u


def sample_rows(model: TriangularArrayModel, n: int,
                rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """One row draw per generator; returns an array of shape (len(rngs), n)."""
    if n < 1:
        raise ValueError(f"row length must be >= 1, got {n}")
    reps = len(rngs)
    if model.kind == "discrete_joint":
        table = model.joint_for(n)
        if table.n_coords != n:
            raise ValueError(f"joint table for n={n} has {table.n_coords} coordinates")
        cum = np.cumsum(table.probs)
        cum[-1] = 1.0
        u = np.array([rng.random() for rng in rngs])
        idx = np.searchsorted(cum, u, side="right")
        return table.atoms[np.minimum(idx, table.n_atoms - 1)]

    if model.kind == "gaussian_copula":
        corr = model.correlation_for(n)
        try:
            chol = np.linalg.cholesky(corr)
        except np.linalg.LinAlgError as exc:
            raise ValueError("correlation matrix is not positive definite") from exc
        z = np.stack([rng.standard_normal(n) for rng in rngs])
        uniforms = stats.norm.cdf(z @ chol.T)
    else:
        innov = np.stack([rng.random(n) for rng in rngs])
        if model.kind == "independent":
            uniforms = innov
        else:
            uniforms = _fgm_chain_uniforms(innov, model.theta)

    marginal = model.iid_marginal()
    if marginal is not None:
        return np.asarray(marginal.ppf(uniforms)).reshape(reps, n)
    out = np.empty((reps, n))
    for k in range(n):
        out[:, k] = model.marginal_for(n, k + 1).ppf(uniforms[:, k])
    return out


def sample_row(model: TriangularArrayModel, n: int, seed) -> np.ndarray:
    """Single reproducible row draw; ``seed`` may be an int or a tuple key."""
    return sample_rows(model, n, [np.random.default_rng(seed)])[0]


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndCertificate:
    """Result of an exhaustive orthant-ratio enumeration over one joint table.

    ``m_uend``/``m_lend`` are the smallest constants making the upper/lower
    orthant inequalities hold over every enumerated threshold vector;
    ``status`` is ``exact`` for a table certified as-is and
    ``grid_lower_bound`` when the table discretizes a continuous model.
    """

    row: int
    m_uend: float
    m_lend: float
    m_end: float
    threshold_grid: str
    status: str


def _threshold_cuts(values: np.ndarray) -> np.ndarray:
    uniq = np.unique(values)
    span = uniq[-1] - uniq[0]
    pad = 0.5 * span if span > 0.0 else 1.0
    return np.concatenate([[uniq[0] - pad], uniq, [uniq[-1] + pad]])


def certify_end_row(table: JointTable, mode: str = "end", *,
                    max_coords: int = 4, max_atoms_per_coord: int = 6,
                    status: str = "exact") -> EndCertificate:
    """Enumerate every threshold vector built from coordinate cut points (each
    atom value plus one point strictly below the minimum and one strictly
    above the maximum) and return the maximal joint/product tail ratios.

    Both tails are step functions changing only at atom values, so the
    enumeration is exact for discrete tables.  0/0 ratios are vacuous and
    skipped; a positive joint tail over a zero product tail has no finite
    constant and raises :class:`CertificationError`.
    """
    if mode not in ("uend", "lend", "end"):
        raise ValueError(f"unknown certification mode {mode!r}")
    d = table.n_coords
    if d > max_coords:
        raise ValueError(f"table has {d} coordinates, certification limit is {max_coords}")
    per_coord = [np.unique(table.atoms[:, j]) for j in range(d)]
    widest = max(len(u) for u in per_coord)
    if widest > max_atoms_per_coord:
        raise ValueError(
            f"a coordinate has {widest} distinct atoms, limit is {max_atoms_per_coord}")

    cuts = [_threshold_cuts(table.atoms[:, j]) for j in range(d)]
    gt_masks = [table.atoms[:, j][None, :] > cuts[j][:, None] for j in range(d)]
    le_masks = [~m for m in gt_masks]
    probs = table.probs
    marg_gt = [m @ probs for m in gt_masks]
    marg_le = [m @ probs for m in le_masks]

    m_uend = 0.0
    m_lend = 0.0
    for combo in itertools.product(*(range(len(c)) for c in cuts)):
        joint_mask = gt_masks[0][combo[0]].copy()
        for j in range(1, d):
            joint_mask &= gt_masks[j][combo[j]]
        joint = float(probs[joint_mask].sum())
        prod = float(np.prod([marg_gt[j][combo[j]] for j in range(d)]))
        if prod > 0.0:
            m_uend = max(m_uend, joint / prod)
        elif joint > 0.0:
            raise CertificationError(
                "positive joint upper tail over zero product tail: no finite constant")

        joint_mask = le_masks[0][combo[0]].copy()
        for j in range(1, d):
            joint_mask &= le_masks[j][combo[j]]
        joint = float(probs[joint_mask].sum())
        prod = float(np.prod([marg_le[j][combo[j]] for j in range(d)]))
        if prod > 0.0:
            m_lend = max(m_lend, joint / prod)
        elif joint > 0.0:
            raise CertificationError(
                "positive joint lower tail over zero product tail: no finite constant")

    grid = "x".join(str(len(c)) for c in cuts) + " cut points (atoms plus outer pads)"
    return EndCertificate(row=d, m_uend=m_uend, m_lend=m_lend,
                          m_end=max(m_uend, m_lend), threshold_grid=grid,
                          status=status)


def discretize_fgm(theta: float, resolution: int) -> JointTable:
    """Bivariate FGM copula binned on a resolution x resolution uniform grid;
    atoms sit at cell midpoints."""
    g = int(resolution)
    edges = np.linspace(0.0, 1.0, g + 1)
    u, v = np.meshgrid(edges, edges, indexing="ij")
    cdf = u * v * (1.0 + theta * (1.0 - u) * (1.0 - v))
    cells = cdf[1:, 1:] - cdf[:-1, 1:] - cdf[1:, :-1] + cdf[:-1, :-1]
    mids = 0.5 * (edges[:-1] + edges[1:])
    atoms = np.array([(a, b) for a in mids for b in mids])
    probs = cells.reshape(-1)
    return JointTable(atoms, probs / probs.sum())


def discretize_fgm_chain(theta: float, resolution: int, n_coords: int) -> JointTable:
    """Chain of FGM(theta) links binned on a uniform grid per coordinate."""
    g = int(resolution)
    pair = discretize_fgm(theta, g).probs.reshape(g, g)
    transition = pair * g  # uniform marginal cells have mass 1/g
    mids = (np.arange(g) + 0.5) / g
    probs = {(i,): 1.0 / g for i in range(g)}
    for _ in range(n_coords - 1):
        nxt = {}
        for key, p in probs.items():
            for j in range(g):
                nxt[key + (j,)] = p * transition[key[-1], j]
        probs = nxt
    keys = sorted(probs)
    atoms = np.array([[mids[i] for i in key] for key in keys])
    mass = np.array([probs[k] for k in keys])
    return JointTable(atoms, mass / mass.sum())


def discretize_gaussian(rho: float, resolution: int) -> JointTable:
    """Bivariate Gaussian copula binned on a uniform grid (atoms at midpoints)."""
    g = int(resolution)
    edges = np.linspace(0.0, 1.0, g + 1)
    z = stats.norm.ppf(np.clip(edges, 1e-12, 1.0 - 1e-12))
    z[0], z[-1] = -np.inf, np.inf
    cov = np.array([[1.0, rho], [rho, 1.0]])
    mvn = stats.multivariate_normal(mean=[0.0, 0.0], cov=cov, allow_singular=True)

    def cdf(a, b):
        if np.isinf(a) and a < 0 or np.isinf(b) and b < 0:
            return 0.0
        return float(mvn.cdf([min(a, 38.0), min(b, 38.0)]))

    vals = np.array([[cdf(z[i], z[j]) for j in range(g + 1)] for i in range(g + 1)])
    cells = vals[1:, 1:] - vals[:-1, 1:] - vals[1:, :-1] + vals[:-1, :-1]
    cells = np.clip(cells, 0.0, None)
    mids = 0.5 * (edges[:-1] + edges[1:])
    atoms = np.array([(a, b) for a in mids for b in mids])
    probs = cells.reshape(-1)
    return JointTable(atoms, probs / probs.sum())


def certify_model_row(model: TriangularArrayModel, n: int, *,
                      resolution: int = 5, mode: str = "end",
                      max_coords: int = 4,
                      max_atoms_per_coord: int = 16) -> EndCertificate:
    """Certify one row of a model; continuous constructions go through a
    copula discretization and the certificate is marked ``grid_lower_bound``."""
    if model.kind == "discrete_joint":
        return certify_end_row(model.joint_for(n), mode,
                               max_coords=max_coords,
                               max_atoms_per_coord=max_atoms_per_coord)
    if model.kind == "independent":
        g = int(resolution)
        mids = (np.arange(g) + 0.5) / g
        atoms = np.array(list(itertools.product(mids, repeat=n)))
        probs = np.full(len(atoms), g ** float(-n))
        table = JointTable(atoms, probs / probs.sum())
    elif model.kind == "fgm_negative":
        table = (discretize_fgm(model.theta, resolution) if n == 2
                 else discretize_fgm_chain(model.theta, resolution, n))
    elif model.kind == "gaussian_copula":
        if n != 2:
            raise ValueError("gaussian copula certification supports n=2 only")
        table = discretize_gaussian(model.correlation_for(2)[0, 1], resolution)
    else:  # pragma: no cover - exhaustive over kinds
        raise ValueError(model.kind)
    return certify_end_row(table, mode, max_coords=max_coords,
                           max_atoms_per_coord=max_atoms_per_coord,
                           status="grid_lower_bound")


# ---------------------------------------------------------------------------
# domination checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DominationReport:
    """Outcome of a tail-domination scan over a threshold grid."""

    constant: float
    violated: bool
    witness: tuple | None
    checked: int
    skipped: int

    def ok(self) -> bool:
        return not self.violated and math.isfinite(self.constant)


def _domination_scan(model: TriangularArrayModel, dominating: MarginalSpec,
                     n_max: int, t_grid, reducer) -> DominationReport:
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0.0):
        raise ValueError("threshold grid must be strictly positive")
    constant = 0.0
    witness = None
    checked = skipped = 0
    shared = model.iid_marginal()
    ns = [1] if (shared is not None and model.kind != "discrete_joint") else \
        list(range(1, n_max + 1))
    for n in ns:
        tails = np.stack([model.marginal_for(n, k).sf_abs(t_grid)
                          for k in range(1, n + 1)])
        num = reducer(tails)
        den = dominating.sf_abs(t_grid)
        for i, t in enumerate(t_grid):
            if den[i] == 0.0:
                if num[i] > 0.0:
                    return DominationReport(math.inf, True, (n, float(t)),
                                            checked, skipped)
                skipped += 1
                continue
            checked += 1
            ratio = num[i] / den[i]
            if ratio > constant:
                constant = ratio
                witness = (n, float(t))
    return DominationReport(constant, False, witness, checked, skipped)


def check_weak_mean_domination(model: TriangularArrayModel,
                               dominating: MarginalSpec,
                               n_max: int, t_grid) -> DominationReport:
    """Supremum over the grid of the row-averaged tail ratio
    (1/n) sum_k P{|X_{n,k}| > t} / P{|X| > t}."""
    return _domination_scan(model, dominating, n_max, t_grid,
                            lambda tails: tails.mean(axis=0))


def check_stochastic_domination(model: TriangularArrayModel,
                                dominating: MarginalSpec,
                                n_max: int, t_grid) -> DominationReport:
    """Supremum of the coordinate-wise tail ratio max_k P{|X_k| > t} / P{|X| > t}."""
    return _domination_scan(model, dominating, n_max, t_grid,
                            lambda tails: tails.max(axis=0))
