"""Credal sets of trajectory measures: constraint generation and LP queries.

A credal set is the polytope of probability vectors over the trajectory space
cut out by event lower bounds.  Generators produce the Born family (marginal
pins via inequality pairs) and the wave-packet typicality family (cross-time
intersection lower bounds), plus relaxed/scaled variants.  Queries run on the
embedded simplex solver and return self-verified witnesses, Farkas
certificates and attained lower/upper probabilities.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .events import Event, TrajectorySpace, event_probability, sset_event
from .system import DEFAULT_TAU_NORM, QuantumSystem, SSet

MEASURE_TOL = 1e-9
CERTIFICATE_TOL = 1e-9
FARKAS_MARGIN = 1e-9
VACUOUS_RHS = 1e-12  # right sides at arithmetic-dust level are vacuous


@dataclass(frozen=True)
class TrajectoryMeasure:
    """Explicit probability vector over all trajectories (a polytope point)."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.probs, dtype=float)
        vec.setflags(write=False)
        object.__setattr__(self, "probs", vec)
        if vec.ndim != 1:
            raise ValueError("measure must be a vector")
        low = float(vec.min(initial=0.0))
        if low < -MEASURE_TOL:
            raise ValueError(f"measure has negative entry {low}")
        total = float(vec.sum())
        if abs(total - 1.0) > MEASURE_TOL:
            raise ValueError(f"measure sums to {total!r}, not 1")

    def probability(self, a: Event) -> float:
        return event_probability(self.probs, a)


@dataclass(frozen=True)
class LinearConstraint:
    """Indicator-event lower bound (or pin) on the trajectory measure."""

    event: Event
    relation: str  # ">=" or "=="
    rhs: float
    tag: str  # born | qtr | qtr-min | qtr-eps | qtr-alpha | demand
    label: str  # expression text of the generating event / pair
    origin: tuple[SSet, ...] = ()

    def __post_init__(self) -> None:
        if self.relation not in (">=", "=="):
            raise ValueError(f"unknown relation {self.relation!r}")

    def satisfied_by(self, probs: np.ndarray) -> float:
        """Violation of this row under the given vector (0 when satisfied)."""
        value = event_probability(probs, self.event)
        if self.relation == ">=":
            return max(self.rhs - value, 0.0)
        return abs(value - self.rhs)


@dataclass
class ConstraintSet:
    """Linear rows over the trajectory simplex (simplex rows are implicit)."""

    space: TrajectorySpace
    constraints: list[LinearConstraint] = field(default_factory=list)
    family: str = ""
    tau_norm: float = DEFAULT_TAU_NORM
    emitted: int = 0
    skipped: int = 0
    filtered: int = 0

    def __len__(self) -> int:
        return len(self.constraints)

    def merged(self, other: "ConstraintSet") -> "ConstraintSet":
        if other.space != self.space:
            raise ValueError("cannot merge constraint sets over different spaces")
        family = "+".join(x for x in (self.family, other.family) if x)
        return ConstraintSet(
            space=self.space,
            constraints=self.constraints + other.constraints,
            family=family,
            tau_norm=self.tau_norm,
            emitted=self.emitted + other.emitted,
            skipped=self.skipped + other.skipped,
            filtered=self.filtered + other.filtered,
        )

    def lp_rows(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        """Normalization row followed by one row per constraint."""
        size = self.space.size
        rows = np.ones((1 + len(self.constraints), size))
        rhs = np.ones(1 + len(self.constraints))
        senses = ["=="]
        for i, con in enumerate(self.constraints):
            rows[1 + i] = con.event.bits.astype(float)
            rhs[1 + i] = con.rhs
            senses.append(con.relation)
        return rows, rhs, senses


def _check_space(system: QuantumSystem, space: TrajectorySpace) -> None:
    if (system.m, system.n) != (space.m, space.n):
        raise ValueError(
            f"system is {system.m}x{system.n}, trajectory space is {space.m}x{space.n}"
        )


def born_constraints(
    system: QuantumSystem, space: TrajectorySpace, family: list[SSet]
) -> ConstraintSet:
    """Marginal pins for each sset: P(S) >= w(S) and P(S^c) >= 1 - w(S).

    Together with normalization the pair forces P(S) = w(S); rows with
    non-positive right side are implied by non-negativity and skipped.
    """
    _check_space(system, space)
    if not family:
        raise ValueError("born family must be non-empty")
    cs = ConstraintSet(space=space, family="born")
    for s in family:
        weight = system.weight(s)
        comp = s.complement()
        for target, rhs in ((s, weight), (comp, 1.0 - weight)):
            if rhs <= VACUOUS_RHS:
                cs.skipped += 1
                continue
            cs.constraints.append(
                LinearConstraint(
                    event=sset_event(space, target),
                    relation=">=",
                    rhs=rhs,
                    tag="born",
                    label=target.text(),
                    origin=(s,),
                )
            )
            cs.emitted += 1
    return cs


def _pair_constraint(
    system: QuantumSystem,
    space: TrajectorySpace,
    s1: SSet,
    s2: SSet,
    rhs: float,
    tag: str,
) -> LinearConstraint:
    return LinearConstraint(
        event=sset_event(space, s1) & sset_event(space, s2),
        relation=">=",
        rhs=rhs,
        tag=tag,
        label=f"({s1.text()} & {s2.text()})",
        origin=(s1, s2),
    )


def qtr_constraints(
    system: QuantumSystem,
    space: TrajectorySpace,
    pairs: list[tuple[SSet, SSet]],
    tau_norm: float = DEFAULT_TAU_NORM,
) -> ConstraintSet:
    """Typicality rows P(S1 and S2) >= w(S1) - dist(S1, S2).

    Only cross-time pairs with weights equal within ``tau_norm`` generate a
    row; rows with non-positive right side are skipped as vacuous.
    """
    _check_space(system, space)
    if tau_norm < 0:
        raise ValueError("tau_norm must be >= 0")
    cs = ConstraintSet(space=space, family="qtr", tau_norm=tau_norm)
    for s1, s2 in pairs:
        w1 = system.weight(s1)
        w2 = system.weight(s2)
        if s1.time == s2.time or abs(w1 - w2) > tau_norm:
            cs.filtered += 1
            continue
        rhs = w1 - system.sset_distance(s1, s2)
        if rhs <= VACUOUS_RHS:
            cs.skipped += 1
            continue
        cs.constraints.append(_pair_constraint(system, space, s1, s2, rhs, "qtr"))
        cs.emitted += 1
    return cs


def qtr_variant_constraints(
    system: QuantumSystem,
    space: TrajectorySpace,
    pairs: list[tuple[SSet, SSet]],
    variant: str,
    value: float | None = None,
    tau_norm: float = DEFAULT_TAU_NORM,
) -> ConstraintSet:
    """Relaxations and rescalings of the typicality rule.

    'min'   drops the equal-weight filter and bounds by min(w1, w2) - dist;
    'eps'   keeps only pairs with relative distance <= value (>= 0);
    'alpha' scales the distance penalty: w1 - value * dist (value > 0).
    """
    _check_space(system, space)
    if variant == "min":
        if value is not None:
            raise ValueError("min variant takes no parameter")
    elif variant == "eps":
        if value is None or value < 0:
            raise ValueError("eps variant needs a threshold >= 0")
    elif variant == "alpha":
        if value is None or value <= 0:
            raise ValueError("alpha variant needs a scale > 0")
    else:
        raise ValueError(f"unknown variant {variant!r}")

    tag = f"qtr-{variant}"
    family = tag if value is None else f"{tag}({value:g})"
    cs = ConstraintSet(space=space, family=family, tau_norm=tau_norm)
    for s1, s2 in pairs:
        w1 = system.weight(s1)
        w2 = system.weight(s2)
        if s1.time == s2.time:
            cs.filtered += 1
            continue
        if variant != "min" and abs(w1 - w2) > tau_norm:
            cs.filtered += 1
            continue
        dist = system.sset_distance(s1, s2)
        if variant == "min":
            rhs = min(w1, w2) - dist
        elif variant == "eps":
            if w1 <= 0.0 or dist > value * w1:
                cs.filtered += 1
                continue
            rhs = w1 - dist
        else:
            rhs = w1 - value * dist
        if rhs <= VACUOUS_RHS:
            cs.skipped += 1
            continue
        cs.constraints.append(_pair_constraint(system, space, s1, s2, rhs, tag))
        cs.emitted += 1
    return cs


def lower_bound_constraints(
    space: TrajectorySpace, demands: list[tuple[Event, float, str]]
) -> ConstraintSet:
    """Raw event lower bounds, e.g. user-declared demands from a scenario."""
    cs = ConstraintSet(space=space, family="demand")
    for event, rhs, label in demands:
        if len(event) != space.size:
            raise ValueError("event length does not match space")
        if rhs <= VACUOUS_RHS:
            cs.skipped += 1
            continue
        cs.constraints.append(
            LinearConstraint(event=event, relation=">=", rhs=rhs, tag="demand", label=label)
        )
        cs.emitted += 1
    return cs


def merge_constraint_sets(sets: list[ConstraintSet]) -> ConstraintSet:
    if not sets:
        raise ValueError("nothing to merge")
    merged = sets[0]
    for other in sets[1:]:
        merged = merged.merged(other)
    return merged


# --- certificates ---------------------------------------------------------


@dataclass(frozen=True)
class FarkasCertificate:
    """Non-negative combination of rows proving the polytope empty.

    ``normalization + sum_i multipliers[i] * indicator_i`` is componentwise
    <= 0 over trajectories while ``normalization + sum_i multipliers[i] *
    rhs_i`` is >= the margin, so no probability vector can satisfy all rows.
    """

    multipliers: np.ndarray
    normalization: float
    margin: float


@dataclass(frozen=True)
class FeasibilityCertificate:
    witness: TrajectoryMeasure | None = None
    farkas: FarkasCertificate | None = None

    def __post_init__(self) -> None:
        if (self.witness is None) == (self.farkas is None):
            raise ValueError("exactly one of witness/farkas must be populated")

    @property
    def feasible(self) -> bool:
        return self.witness is not None


def verify_witness(cs: ConstraintSet, probs: np.ndarray) -> float:
    """Max violation of the constraint rows and simplex rows, by direct sums."""
    vec = np.asarray(probs, dtype=float)
    worst = max(abs(float(vec.sum()) - 1.0), max(0.0, -float(vec.min(initial=0.0))))
    for con in cs.constraints:
        worst = max(worst, con.satisfied_by(vec))
    return worst


def verify_farkas(cs: ConstraintSet, cert: FarkasCertificate) -> tuple[float, float]:
    """Recompute the certificate's componentwise slack and margin directly."""
    combo = np.full(cs.space.size, cert.normalization)
    total = cert.normalization
    for mult, con in zip(cert.multipliers, cs.constraints):
        combo += mult * con.event.bits
        total += mult * con.rhs
    return float(combo.max()), float(total)


def feasibility(cs: ConstraintSet) -> FeasibilityCertificate:
    """Phase-1 feasibility with a self-verified witness or Farkas certificate."""
    rows, rhs, senses = cs.lp_rows()
    result = lp.solve_lp(np.zeros(cs.space.size), rows, rhs, senses)
    if result.status == lp.OPTIMAL:
        witness = TrajectoryMeasure(result.x)
        worst = verify_witness(cs, witness.probs)
        if worst > CERTIFICATE_TOL:
            raise lp.SimplexFailure(
                f"witness verification failed: max violation {worst:.3e}"
            )
        return FeasibilityCertificate(witness=witness)
    if result.status != lp.INFEASIBLE:
        raise lp.SimplexFailure(f"unexpected LP status {result.status!r}")

    duals = result.farkas_duals.copy()
    mult = duals[1:]
    for i, con in enumerate(cs.constraints):
        if con.relation == ">=":
            if mult[i] < -1e-8:
                raise lp.SimplexFailure(
                    f"negative multiplier {mult[i]:.3e} on inequality row {i}"
                )
            mult[i] = max(mult[i], 0.0)
    cert = FarkasCertificate(
        multipliers=mult, normalization=float(duals[0]), margin=0.0
    )
    slack, margin = verify_farkas(cs, cert)
    cert = FarkasCertificate(
        multipliers=mult, normalization=float(duals[0]), margin=margin
    )
    if slack > CERTIFICATE_TOL or margin < FARKAS_MARGIN:
        raise lp.SimplexFailure(
            f"Farkas verification failed: slack {slack:.3e}, margin {margin:.3e}"
        )
    return FeasibilityCertificate(farkas=cert)


# --- bounds ----------------------------------------------------------------


@dataclass(frozen=True)
class BoundsResult:
    status: str  # "both-solved" | "infeasible"
    lower: float | None = None
    upper: float | None = None
    argmin: TrajectoryMeasure | None = None
    argmax: TrajectoryMeasure | None = None

    def __post_init__(self) -> None:
        if self.status == "infeasible":
            if self.argmin is not None or self.argmax is not None:
                raise ValueError("infeasible result cannot carry witnesses")
            return
        if self.lower is None or self.upper is None:
            raise ValueError("solved result needs both bounds")
        if not -1e-9 <= self.lower <= self.upper + 1e-9:
            raise ValueError(f"bounds out of order: {self.lower}, {self.upper}")
        if self.upper > 1.0 + 1e-9:
            raise ValueError(f"upper bound {self.upper} exceeds 1")


def lower_upper(cs: ConstraintSet, a: Event) -> BoundsResult:
    """LP min/max of the event's probability over the credal polytope."""
    if len(a) != cs.space.size:
        raise ValueError("event length does not match space")
    rows, rhs, senses = cs.lp_rows()
    objective = a.bits.astype(float)

    low = lp.solve_lp(objective, rows, rhs, senses)
    if low.status == lp.INFEASIBLE:
        return BoundsResult(status="infeasible")
    if low.status != lp.OPTIMAL:
        raise lp.SimplexFailure(f"unexpected LP status {low.status!r}")
    high = lp.solve_lp(objective, rows, rhs, senses, maximize=True)
    if high.status != lp.OPTIMAL:
        raise lp.SimplexFailure(f"unexpected LP status {high.status!r}")

    return BoundsResult(
        status="both-solved",
        lower=float(low.objective),
        upper=float(high.objective),
        argmin=TrajectoryMeasure(low.x),
        argmax=TrajectoryMeasure(high.x),
    )


def born_product_witness(
    system: QuantumSystem, space: TrajectorySpace
) -> TrajectoryMeasure:
    """Independent coupling of the per-time marginals; satisfies every Born pin."""
    _check_space(system, space)
    vec = np.array([1.0])
    for t in range(system.n):
        marginal = np.abs(system.evolve(t)) ** 2
        vec = np.kron(vec, marginal)
    return TrajectoryMeasure(vec)


def huber_check(cs: ConstraintSet) -> float:
    """Non-emptiness criterion for lower-bound rows.

    Maximizes ``sum_i a_i * rhs_i`` over non-negative ``a`` with
    ``sum_i a_i * indicator_i(w) <= 1`` for every trajectory ``w``; the
    credal set is non-empty exactly when the optimum is <= 1.
    """
    for con in cs.constraints:
        if con.relation != ">=":
            raise ValueError("criterion applies to lower-bound rows only")
        if con.event.is_empty and con.rhs > 0:
            raise ValueError(
                f"malformed row: empty event with positive bound {con.rhs!r}"
            )
    if not cs.constraints:
        return 0.0
    k = len(cs.constraints)
    rows = np.zeros((cs.space.size, k))
    for i, con in enumerate(cs.constraints):
        rows[:, i] = con.event.bits
    rhs = np.ones(cs.space.size)
    objective = np.array([con.rhs for con in cs.constraints])
    result = lp.solve_lp(objective, rows, rhs, ["<="] * cs.space.size, maximize=True)
    if result.status != lp.OPTIMAL:
        raise lp.SimplexFailure(f"unexpected LP status {result.status!r}")
    return float(result.objective)


def sample_vertex_measures(
    cs: ConstraintSet, count: int, seed: int
) -> list[TrajectoryMeasure]:
    """Polytope vertices from seeded random linear objectives (reproducible)."""
    rows, rhs, senses = cs.lp_rows()
    rng = np.random.default_rng(seed)
    out: list[TrajectoryMeasure] = []
    for _ in range(count):
        objective = rng.standard_normal(cs.space.size)
        result = lp.solve_lp(objective, rows, rhs, senses)
        if result.status == lp.INFEASIBLE:
            raise ValueError("constraint set is infeasible")
        if result.status != lp.OPTIMAL:
            raise lp.SimplexFailure(f"unexpected LP status {result.status!r}")
        out.append(TrajectoryMeasure(result.x))
    return out


# --- CSV export -------------------------------------------------------------


def format_number(x: float) -> str:
    """Fixed 9 decimal places, no negative zero, locale independent."""
    if abs(x) < 5e-10:
        x = 0.0
    return f"{x:.9f}"


def constraints_csv(cs: ConstraintSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tag", "relation", "rhs", "expression"])
    for con in cs.constraints:
        writer.writerow([con.tag, con.relation, format_number(con.rhs), con.label])
    return buf.getvalue()


def measure_csv(measure: TrajectoryMeasure) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trajectory_index", "probability"])
    for i, p in enumerate(measure.probs):
        writer.writerow([i, format_number(float(p))])
    return buf.getvalue()


def farkas_csv(cert: FarkasCertificate, cs: ConstraintSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "kind", "tag", "expression", "multiplier"])
    writer.writerow(["-1", "normalization", "", "", format_number(cert.normalization)])
    for i, (mult, con) in enumerate(zip(cert.multipliers, cs.constraints)):
        writer.writerow([i, "constraint", con.tag, con.label, format_number(float(mult))])
    writer.writerow(["", "margin", "", "", format_number(cert.margin)])
    return buf.getvalue()
