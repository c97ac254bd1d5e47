"""Shared fixtures and independent oracles for the test suite.

Oracles here never call the package's LP path: bounds are cross-checked by
closed-form marginal arithmetic, brute-force polytope vertex enumeration and
scipy's independent solver.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from iqp.credal import ConstraintSet, LinearConstraint, born_constraints
from iqp.events import Event, TrajectorySpace, sset_event
from iqp.system import QuantumSystem, Region, SSet, hadamard_matrix, identity_matrix

SQRT_HALF = 1.0 / np.sqrt(2.0)


# --- reference systems -------------------------------------------------------


@pytest.fixture
def hti_system() -> QuantumSystem:
    """Hadamard then identity: the two-path splitter with free propagation."""
    return QuantumSystem(
        ["x0", "x1"], [hadamard_matrix(), identity_matrix(2)], [1.0, 0.0]
    )


@pytest.fixture
def mz_system() -> QuantumSystem:
    """Two Hadamard steps: recombining interferometer."""
    return QuantumSystem(
        ["x0", "x1"], [hadamard_matrix(), hadamard_matrix()], [1.0, 0.0]
    )


@pytest.fixture
def balanced_identity_system() -> QuantumSystem:
    """Identity step on an equal-weight state: the Frechet-gap instance."""
    return QuantumSystem(
        ["x0", "x1"], [identity_matrix(2)], [SQRT_HALF, SQRT_HALF]
    )


def sset(t: int, labels: list[int], m: int = 2) -> SSet:
    return SSet(t, Region.from_labels(labels, m))


# --- closed-form oracles ------------------------------------------------------


def frechet_intersection(marginals: list[float]) -> tuple[float, float]:
    """Sharp bounds on an intersection from marginal probabilities alone."""
    lower = max(0.0, sum(marginals) - (len(marginals) - 1))
    return lower, min(marginals)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-ish unitary via QR of a complex Gaussian with phase fixing."""
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_state(rng: np.random.Generator, m: int) -> np.ndarray:
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return z / np.linalg.norm(z)


def random_system(
    rng: np.random.Generator, m: int | None = None, n: int | None = None
) -> QuantumSystem:
    m = m if m is not None else int(rng.integers(2, 4))
    n = n if n is not None else int(rng.integers(2, 4))
    steps = [random_unitary(rng, m) for _ in range(n - 1)]
    labels = [f"x{i}" for i in range(m)]
    return QuantumSystem(labels, steps, random_state(rng, m))


def random_event(rng: np.random.Generator, space: TrajectorySpace) -> Event:
    return Event(rng.random(space.size) < rng.random())


# --- brute-force vertex enumeration -------------------------------------------


def polytope_vertices(
    cs: ConstraintSet, tol: float = 1e-9
) -> list[np.ndarray]:
    """All vertices of the credal polytope by active-set enumeration.

    Rows considered: the normalization equality (always active), every
    constraint row and every non-negativity row.  Usable only at desk scale.
    """
    dim = cs.space.size
    eq_rows = [(np.ones(dim), 1.0)]
    cand_rows: list[tuple[np.ndarray, float]] = []
    for con in cs.constraints:
        if con.relation == "==":
            eq_rows.append((con.event.bits.astype(float), con.rhs))
        else:
            cand_rows.append((con.event.bits.astype(float), con.rhs))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        cand_rows.append((e, 0.0))

    need = dim - len(eq_rows)
    vertices: list[np.ndarray] = []
    seen: set[tuple] = set()
    for combo in combinations(range(len(cand_rows)), need):
        rows = [r for r, _ in eq_rows] + [cand_rows[i][0] for i in combo]
        rhs = [b for _, b in eq_rows] + [cand_rows[i][1] for i in combo]
        mat = np.array(rows)
        if np.linalg.matrix_rank(mat, tol=1e-10) < dim:
            continue
        try:
            x = np.linalg.solve(mat, np.array(rhs))
        except np.linalg.LinAlgError:
            continue
        if x.min() < -tol or abs(x.sum() - 1.0) > tol:
            continue
        ok = True
        for row, bound in cand_rows[: len(cand_rows) - dim]:
            if row @ x < bound - tol:
                ok = False
                break
        if not ok:
            continue
        key = tuple(np.round(x, 9))
        if key not in seen:
            seen.add(key)
            vertices.append(x)
    return vertices


def vertex_bounds(cs: ConstraintSet, event: Event) -> tuple[float, float]:
    """Min/max event probability over brute-force enumerated vertices."""
    values = [float(v[event.bits].sum()) for v in polytope_vertices(cs)]
    assert values, "polytope has no vertices (infeasible?)"
    return min(values), max(values)


def scipy_bounds(cs: ConstraintSet, event: Event) -> tuple[float, float]:
    """Independent LP oracle for lower/upper event probability."""
    from scipy.optimize import linprog

    dim = cs.space.size
    a_eq, b_eq = [np.ones(dim)], [1.0]
    a_ub, b_ub = [], []
    for con in cs.constraints:
        if con.relation == "==":
            a_eq.append(con.event.bits.astype(float))
            b_eq.append(con.rhs)
        else:
            a_ub.append(-con.event.bits.astype(float))
            b_ub.append(-con.rhs)
    kw = dict(
        A_eq=np.array(a_eq),
        b_eq=np.array(b_eq),
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        bounds=[(0, None)] * dim,
        method="highs",
    )
    c = event.bits.astype(float)
    low = linprog(c, **kw)
    high = linprog(-c, **kw)
    assert low.status == 0 and high.status == 0
    return float(low.fun), float(-high.fun)


def scipy_feasible(cs: ConstraintSet) -> bool:
    from scipy.optimize import linprog

    dim = cs.space.size
    a_ub = [-con.event.bits.astype(float) for con in cs.constraints]
    b_ub = [-con.rhs for con in cs.constraints]
    res = linprog(
        np.zeros(dim),
        A_eq=np.ones((1, dim)),
        b_eq=[1.0],
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        bounds=[(0, None)] * dim,
        method="highs",
    )
    return res.status == 0


# --- random constraint-set generators -----------------------------------------


def random_feasible_cs(
    rng: np.random.Generator, system: QuantumSystem, space: TrajectorySpace
) -> ConstraintSet:
    """Born pins plus random event bounds kept below a known member measure."""
    from iqp.credal import born_product_witness, lower_bound_constraints
    from iqp.scenarios import singleton_family

    cs = born_constraints(system, space, singleton_family(system))
    witness = born_product_witness(system, space)
    demands = []
    for i in range(int(rng.integers(1, 4))):
        event = random_event(rng, space)
        value = witness.probability(event)
        if value <= 0.0:
            continue
        demands.append((event, float(value * rng.random()), f"demand{i}"))
    if demands:
        cs = cs.merged(lower_bound_constraints(space, demands))
    return cs


def random_lower_bound_cs(
    rng: np.random.Generator, space: TrajectorySpace
) -> ConstraintSet:
    """Lower-bound rows with random levels; infeasible roughly half the time."""
    cs = ConstraintSet(space=space, family="random")
    n_rows = int(rng.integers(2, 7))
    for i in range(n_rows):
        event = random_event(rng, space)
        if event.is_empty:
            continue
        fraction = event.cardinality / space.size
        rhs = float(min(1.0, fraction * rng.uniform(0.2, 2.2)))
        if rhs <= 0.0:
            continue
        cs.constraints.append(
            LinearConstraint(event=event, relation=">=", rhs=rhs, tag="demand",
                             label=f"random{i}")
        )
        cs.emitted += 1
    return cs
