"""Minimal mixed-integer linear programming engine.

LinearModel holds a bounded minimization model; solve_lp solves its
continuous relaxation; solve_milp runs a depth-first branch-and-bound on
top.  Two builders translate planning problems into models: the full
integrated model over purchases, discards, hires, fires, trainings,
assignments, and workforce stocks, and the purchase/discard/stock model used
when negative effective discard costs push a technology plan outside the
kernel solvers.

Everything is desk scale: per-node LP solves, no cut generation at runtime,
no presolve beyond finite variable bounds.  The model builders instead bake
strength into the formulation itself: each period's demand-covering
substructure in whole operated units is tiny at this scale, so its exact
integer-hull facets are enumerated once at build time and written down as
ordinary rows.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .domain import CostTables, Instance, derive_qualified_pairs

INT_TOL = 1e-6
FEAS_TOL = 1e-6

# period hulls repeat across periods and instances; cache them
_FACET_POINT_GUARD = 200_000
_facet_cache: dict[tuple, tuple] = {}


def _covering_count_facets(
    capacities: tuple[int, ...], demand: int
) -> tuple[tuple[tuple[float, ...], float], ...]:
    """Facets a.W >= b of conv{W integer >= 0 : sum_i capacities[i]*W[i] >= demand}.

    W are per-type unit counts.  Enumeration runs over the box
    W[i] <= ceil(demand / capacities[i]); capping any component at that
    bound alone restores coverage, so every feasible count vector dominates
    a boxed one and the boxed facets with nonnegative normals are valid on
    the whole unbounded set.
    """
    n = len(capacities)
    if n == 0 or demand <= 0:
        return ()
    key = (capacities, demand)
    hit = _facet_cache.get(key)
    if hit is not None:
        return hit
    ubs = [-(-demand // c) for c in capacities]
    facets: list[tuple[tuple[float, ...], float]] = []
    if n == 1:
        facets = [((1.0,), float(ubs[0]))]
    else:
        grid = 1
        for ub in ubs:
            grid *= ub + 1
        if grid <= _FACET_POINT_GUARD:
            pts = [
                p
                for p in itertools.product(*[range(ub + 1) for ub in ubs])
                if sum(c * q for c, q in zip(capacities, p)) >= demand
            ]
            if len(pts) > n:
                arr = np.array(pts, dtype=float)
                try:
                    hull = ConvexHull(arr)
                except QhullError:
                    hull = None
                if hull is not None:
                    seen: dict[tuple[float, ...], float] = {}
                    for eq in hull.equations:
                        a = -eq[:-1]
                        if not (np.all(a >= -1e-9) and np.any(a > 1e-9)):
                            continue
                        a = np.where(a < 1e-9, 0.0, a)
                        coef = tuple(np.round(a / a[a > 0].min(), 9))
                        # support value of the rounded normal over the point
                        # set, so the row is valid by construction
                        rhs = float((arr @ np.asarray(coef)).min())
                        if rhs > 1e-9 and seen.get(coef, -np.inf) < rhs:
                            seen[coef] = rhs
                    facets = sorted(seen.items())
        if not facets:
            # box too large for hull enumeration: fall back to the valid
            # rounded-coefficient rows, one per distinct capacity divisor
            for c in sorted(set(capacities)):
                coef = tuple(float(-(-ci // c)) for ci in capacities)
                facets.append((coef, float(-(-demand // c))))
    out = tuple(facets)
    if len(_facet_cache) > 4096:
        _facet_cache.clear()
    _facet_cache[key] = out
    return out


class LinearModel:
    """Bounded minimization model with ≤ / ≥ / = rows.

    All variable bounds must be finite; branch-and-bound relies on that for
    termination, and the planning builders guarantee it by construction.
    """

    def __init__(self, name: str = "model") -> None:
        self.name = name
        self.var_names: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.obj: list[float] = []
        self.integer: list[bool] = []
        self.rows: list[tuple[dict[int, float], str, float]] = []
        self._cache: tuple | None = None

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_var(
        self,
        name: str,
        lb: float,
        ub: float,
        obj: float = 0.0,
        integer: bool = True,
    ) -> int:
        if not (math.isfinite(lb) and math.isfinite(ub)):
            raise ValueError(f"variable {name} must have finite bounds")
        if ub < lb:
            raise ValueError(f"variable {name} has empty bound range")
        self.var_names.append(name)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.obj.append(float(obj))
        self.integer.append(bool(integer))
        self._cache = None
        return len(self.var_names) - 1

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown row sense {sense!r}")
        self.rows.append((dict(coeffs), sense, float(rhs)))
        self._cache = None

    def matrices(self):
        """(c, A_ub, b_ub, A_eq, b_eq) with ≥ rows negated into ≤ form."""
        if self._cache is not None:
            return self._cache
        n = self.n_vars
        ub_r, ub_c, ub_v, ub_b = [], [], [], []
        eq_r, eq_c, eq_v, eq_b = [], [], [], []
        for coeffs, sense, rhs in self.rows:
            if sense == "=":
                r = len(eq_b)
                for c, v in coeffs.items():
                    eq_r.append(r)
                    eq_c.append(c)
                    eq_v.append(v)
                eq_b.append(rhs)
            else:
                sign = 1.0 if sense == "<=" else -1.0
                r = len(ub_b)
                for c, v in coeffs.items():
                    ub_r.append(r)
                    ub_c.append(c)
                    ub_v.append(sign * v)
                ub_b.append(sign * rhs)
        A_ub = (
            sp.csr_matrix((ub_v, (ub_r, ub_c)), shape=(len(ub_b), n))
            if ub_b
            else None
        )
        A_eq = (
            sp.csr_matrix((eq_v, (eq_r, eq_c)), shape=(len(eq_b), n))
            if eq_b
            else None
        )
        self._cache = (
            np.asarray(self.obj, dtype=float),
            A_ub,
            np.asarray(ub_b, dtype=float) if ub_b else None,
            A_eq,
            np.asarray(eq_b, dtype=float) if eq_b else None,
        )
        return self._cache

    def row_violation(self, values: np.ndarray) -> float:
        worst = 0.0
        for coeffs, sense, rhs in self.rows:
            lhs = sum(v * values[c] for c, v in coeffs.items())
            if sense == "<=":
                worst = max(worst, lhs - rhs)
            elif sense == ">=":
                worst = max(worst, rhs - lhs)
            else:
                worst = max(worst, abs(lhs - rhs))
        return worst

    def is_feasible(self, values: np.ndarray, tol: float = FEAS_TOL) -> bool:
        lo = np.asarray(self.lb) - tol
        hi = np.asarray(self.ub) + tol
        if (values < lo).any() or (values > hi).any():
            return False
        return self.row_violation(values) <= tol

    def objective_value(self, values: np.ndarray) -> float:
        return float(np.dot(self.obj, values))

    def to_lp_format(self) -> str:
        """Model as standard LP-format text, for external cross-checking."""
        out = [f"\\ {self.name}", "Minimize", " obj:"]
        terms = []
        for j, c in enumerate(self.obj):
            if c != 0.0:
                terms.append(f" {'+' if c >= 0 else '-'} {abs(c):.12g} {self.var_names[j]}")
        out[-1] += "".join(terms) if terms else " 0 " + self.var_names[0]
        out.append("Subject To")
        rel = {"<=": "<=", ">=": ">=", "=": "="}
        for r, (coeffs, sense, rhs) in enumerate(self.rows):
            parts = []
            for j in sorted(coeffs):
                v = coeffs[j]
                parts.append(f" {'+' if v >= 0 else '-'} {abs(v):.12g} {self.var_names[j]}")
            out.append(f" c{r}:{''.join(parts)} {rel[sense]} {rhs:.12g}")
        out.append("Bounds")
        for j in range(self.n_vars):
            out.append(f" {self.lb[j]:.12g} <= {self.var_names[j]} <= {self.ub[j]:.12g}")
        generals = [self.var_names[j] for j in range(self.n_vars) if self.integer[j]]
        if generals:
            out.append("General")
            out.append(" " + " ".join(generals))
        out.append("End")
        return "\n".join(out) + "\n"


@dataclass
class LpResult:
    status: str  # Optimal | Infeasible | Unbounded
    values: np.ndarray | None
    objective: float


@dataclass
class MilpSolution:
    status: str  # Optimal | FeasibleGapLimited | TimeLimit | Infeasible
    values: np.ndarray | None
    objective: float
    gap: float
    nodes: int
    runtime: float


def solve_lp(
    model: LinearModel,
    lb: np.ndarray | None = None,
    ub: np.ndarray | None = None,
) -> LpResult:
    """Continuous relaxation, optionally under tightened bounds."""
    c, A_ub, b_ub, A_eq, b_eq = model.matrices()
    lo = np.asarray(model.lb) if lb is None else lb
    hi = np.asarray(model.ub) if ub is None else ub
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=np.column_stack([lo, hi]),
        method="highs",
    )
    if res.status == 0:
        return LpResult("Optimal", np.asarray(res.x), float(res.fun))
    if res.status == 2:
        return LpResult("Infeasible", None, math.inf)
    if res.status == 3:
        return LpResult("Unbounded", None, -math.inf)
    raise RuntimeError(f"relaxation solve failed: {res.message}")


def _generic_rounding(model: LinearModel, relaxed: np.ndarray) -> np.ndarray | None:
    """Round to the nearest integers, then walk violated rows adjusting the
    cheapest helpful variable one unit at a time.  Returns None if the walk
    stalls; branch-and-bound then starts without an incumbent."""
    values = relaxed.copy()
    for j in range(model.n_vars):
        if model.integer[j]:
            values[j] = min(max(round(values[j]), model.lb[j]), model.ub[j])
    for _ in range(500):
        adjusted = False
        for coeffs, sense, rhs in model.rows:
            lhs = sum(v * values[c] for c, v in coeffs.items())
            if sense in ("<=", "=") and lhs > rhs + FEAS_TOL:
                direction = -1.0
            elif sense in (">=", "=") and lhs < rhs - FEAS_TOL:
                direction = 1.0
            else:
                continue
            best = None
            for c, v in coeffs.items():
                if v == 0.0:
                    continue
                step = 1.0 if direction * v > 0 else -1.0
                nxt = values[c] + step
                if nxt < model.lb[c] - FEAS_TOL or nxt > model.ub[c] + FEAS_TOL:
                    continue
                price = step * model.obj[c]
                if best is None or price < best[0]:
                    best = (price, c, step)
            if best is None:
                return None
            values[best[1]] += best[2]
            adjusted = True
            break
        if not adjusted:
            break
    return values if model.is_feasible(values) else None


def solve_milp(
    model: LinearModel,
    time_limit: float = 60.0,
    gap_tolerance: float = 1e-6,
    node_limit: int | None = None,
    warm_start: np.ndarray | None = None,
    rounder=None,
    branch_priority: np.ndarray | None = None,
) -> MilpSolution:
    """Depth-first branch-and-bound over the LP relaxation.

    Branches on the most fractional integer variable (lowest index on ties),
    exploring first the child on the side the relaxation already leans
    toward.  When branch_priority is given (one value per variable, lower
    branches first), the candidate set is the best-priority class that still
    has fractional variables; the planning builders use this to settle
    purchases and hires before assignments.  The incumbent starts from
    warm_start when that vector is feasible, else from a rounding of the
    root relaxation (the supplied rounder, or a generic nearest-integer
    walk).  Optimal is only reported when the remaining tree is exhausted or
    the bound gap closes below 1e-6; a coarser gap_tolerance stops early
    with FeasibleGapLimited.
    """
    t0 = time.perf_counter()
    base_lb = np.asarray(model.lb, dtype=float)
    base_ub = np.asarray(model.ub, dtype=float)
    int_idx = np.array([j for j in range(model.n_vars) if model.integer[j]], dtype=int)
    if branch_priority is not None:
        prio = np.asarray(branch_priority, dtype=float)[int_idx]
    else:
        prio = np.zeros(len(int_idx))

    root = solve_lp(model)
    if root.status == "Infeasible":
        return MilpSolution("Infeasible", None, math.inf, math.inf, 1, time.perf_counter() - t0)
    if root.status == "Unbounded":
        raise ValueError("model is unbounded; planning models must have finite bounds")

    incumbent = None
    inc_obj = math.inf
    rounded = rounder(root.values) if rounder else _generic_rounding(model, root.values)
    for candidate in (warm_start, rounded):
        if candidate is None:
            continue
        cand = np.asarray(candidate, dtype=float)
        if model.is_feasible(cand):
            obj = model.objective_value(cand)
            if obj < inc_obj:
                incumbent, inc_obj = cand, obj

    def snap(values: np.ndarray) -> np.ndarray:
        out = values.copy()
        out[int_idx] = np.round(out[int_idx])
        return out

    def gap_of(bound: float) -> float:
        if not math.isfinite(inc_obj):
            return math.inf
        return (inc_obj - bound) / max(abs(inc_obj), 1e-9)

    # stack entries: (node lower bound, {var: (lo, hi)} cumulative overrides)
    stack: list[tuple[float, dict[int, tuple[float, float]]]] = [(root.objective, {})]
    nodes = 0
    timed_out = False

    while stack:
        if time.perf_counter() - t0 > time_limit:
            timed_out = True
            break
        if node_limit is not None and nodes >= node_limit:
            timed_out = True
            break
        # the global bound is the smallest bound still open
        global_bound = min(entry[0] for entry in stack)
        if gap_of(global_bound) <= gap_tolerance:
            break
        bound, overrides = stack.pop()
        if bound >= inc_obj - 1e-9:
            continue
        nodes += 1
        if overrides:
            lo, hi = base_lb.copy(), base_ub.copy()
            for var, (vlo, vhi) in overrides.items():
                lo[var], hi[var] = vlo, vhi
            res = solve_lp(model, lo, hi)
        else:
            res = root
        if res.status != "Optimal" or res.objective >= inc_obj - 1e-9:
            continue
        frac = res.values[int_idx] - np.floor(res.values[int_idx])
        dist = np.minimum(frac, 1.0 - frac)
        if (dist <= INT_TOL).all():
            cand = snap(res.values)
            if model.is_feasible(cand) and model.objective_value(cand) < inc_obj:
                incumbent, inc_obj = cand, model.objective_value(cand)
            continue
        open_mask = dist > INT_TOL
        best_class = prio[open_mask].min()
        scored = np.where(open_mask & (prio == best_class), dist, -1.0)
        pick = int(int_idx[int(np.argmax(scored))])
        val = res.values[pick]
        floor_v, ceil_v = math.floor(val), math.ceil(val)
        down = dict(overrides)
        down[pick] = (overrides.get(pick, (base_lb[pick], base_ub[pick]))[0], float(floor_v))
        up = dict(overrides)
        up[pick] = (float(ceil_v), overrides.get(pick, (base_lb[pick], base_ub[pick]))[1])
        prefer_up = (val - floor_v) >= 0.5
        first, second = (up, down) if prefer_up else (down, up)
        stack.append((res.objective, second))
        stack.append((res.objective, first))

    runtime = time.perf_counter() - t0
    if incumbent is None:
        status = "TimeLimit" if timed_out else "Infeasible"
        return MilpSolution(status, None, math.inf, math.inf, nodes, runtime)
    final_bound = min((entry[0] for entry in stack), default=inc_obj)
    gap = max(gap_of(final_bound), 0.0)
    if timed_out and gap > gap_tolerance:
        status = "TimeLimit"
    elif gap <= 1e-6:
        status = "Optimal"
    else:
        status = "FeasibleGapLimited"
    return MilpSolution(status, incumbent, float(inc_obj), float(gap), nodes, runtime)


# ---------------------------------------------------------------------------
# model builders


@dataclass(frozen=True, eq=False)
class IntegratedIndex:
    """Variable indices of the integrated model, for decoding solutions."""

    x: np.ndarray  # (n_tech, T)
    v: np.ndarray
    y: np.ndarray  # (n_emp, T)
    w: np.ndarray
    stock_wf: np.ndarray  # (n_emp, T) standing workforce
    pairs: tuple[tuple[int, int], ...]
    z: np.ndarray  # (len(pairs), T)
    edges: tuple[tuple[int, int], ...]
    u: np.ndarray  # (len(edges), T)
    branch_priority: np.ndarray  # per variable; lower branches first


def build_integrated_model(
    instance: Instance, tables: CostTables
) -> tuple[LinearModel, IntegratedIndex]:
    """One model over all decision families.

    Variables per period: purchases and discards per technology type, hires,
    fires, and standing workforce per employee type, assignments per
    qualified pair, and training starts.  Training variables are declared
    over a fixed half-square grid of type pairs; pairs without a training
    edge are pinned to zero.

    Constraints per period: assigned capacity covers demand; assignments per
    technology fit within its cumulative stock, which itself stays
    non-negative; workforce stocks follow hires, fires, training departures,
    and training arrivals; assignments per employee type fit within its
    standing workforce.
    """
    T = instance.horizon
    n_i, n_j = instance.n_tech, instance.n_emp
    caps = np.array([t.capacity for t in instance.technologies], dtype=int)
    demand = np.array(instance.demand, dtype=int)
    weight = tables.weight
    pairs = derive_qualified_pairs(instance.technologies, instance.employees)
    edges = tuple(sorted((o.from_type, o.to_type) for o in instance.trainings))
    durations = {(o.from_type, o.to_type): o.duration for o in instance.trainings}

    # nothing beyond demand-covering quantities is ever bought or hired, so
    # bounds follow the largest demand still ahead of each period
    future_peak = np.maximum.accumulate(demand[::-1])[::-1] if T else demand
    min_cap = int(caps.min()) if n_i else 1

    def units(level: int, cap: int) -> int:
        return int(-(-int(level) // cap)) if level > 0 else 0

    hires_ub = np.array([units(future_peak[t], min_cap) for t in range(T)], dtype=int)
    wf_reach = int(sum(instance.initial_workforce)) + np.cumsum(hires_ub)

    m = LinearModel("integrated")
    x = np.empty((n_i, T), dtype=int)
    v = np.empty((n_i, T), dtype=int)
    y = np.empty((n_j, T), dtype=int)
    w = np.empty((n_j, T), dtype=int)
    swf = np.empty((n_j, T), dtype=int)
    z = np.empty((len(pairs), T), dtype=int)
    u = np.empty((len(edges), T), dtype=int)

    for i in range(n_i):
        for t in range(T):
            x[i, t] = m.add_var(
                f"x_{i}_{t}",
                0,
                units(future_peak[t], int(caps[i])),
                weight[t] * tables.tech_purchase[i, t],
            )
    tech_reach = [
        int(instance.initial_tech[i])
        + np.cumsum([units(future_peak[t], int(caps[i])) for t in range(T)])
        for i in range(n_i)
    ]
    for i in range(n_i):
        for t in range(T):
            v[i, t] = m.add_var(
                f"v_{i}_{t}", 0, int(tech_reach[i][t]), weight[t] * tables.tech_discard[i, t]
            )
    for j in range(n_j):
        for t in range(T):
            y[j, t] = m.add_var(
                f"y_{j}_{t}", 0, int(hires_ub[t]), weight[t] * tables.wf_hire[j, t]
            )
    for j in range(n_j):
        for t in range(T):
            w[j, t] = m.add_var(
                f"w_{j}_{t}", 0, int(wf_reach[t]), weight[t] * tables.wf_fire[j, t]
            )
    for j in range(n_j):
        for t in range(T):
            # standing workforce is integral whenever hires, fires, and
            # trainings are, so it never needs branching
            swf[j, t] = m.add_var(f"wf_{j}_{t}", 0, int(wf_reach[t]), 0.0, integer=False)
    for k, (i, j) in enumerate(pairs):
        for t in range(T):
            z[k, t] = m.add_var(
                f"z_{i}_{j}_{t}",
                0,
                max(units(demand[t], int(caps[i])), 0),
                weight[t] * tables.assign[(i, j)],
            )
    for e, (j, jp) in enumerate(edges):
        l = durations[(j, jp)]
        for t in range(T):
            usable = t + l <= T - 1  # a start that cannot arrive is pointless
            u[e, t] = m.add_var(
                f"u_{j}_{jp}_{t}",
                0,
                int(wf_reach[t]) if usable else 0,
                weight[t] * tables.wf_train[(j, jp)][t],
            )
    # pad the training family out to the declared half-square grid
    grid = (n_j * n_j) // 2
    for t in range(T):
        for s in range(len(edges), grid):
            m.add_var(f"u_pad_{s}_{t}", 0, 0, 0.0)

    # demand coverage in capacity, strengthened by the facets of each
    # period's unit-count hull over the technologies anyone can operate
    usable = sorted({i for (i, _) in pairs})
    sub_caps = tuple(int(caps[i]) for i in usable)
    sub_pos = {i: q for q, i in enumerate(usable)}
    for t in range(T):
        m.add_row({int(z[k, t]): float(caps[i]) for k, (i, j) in enumerate(pairs)}, ">=", float(demand[t]))
        for coef, rhs in _covering_count_facets(sub_caps, int(demand[t])):
            row = {int(z[k, t]): coef[sub_pos[i]] for k, (i, j) in enumerate(pairs) if coef[sub_pos[i]]}
            if row:
                m.add_row(row, ">=", float(rhs))
    # assignments within cumulative technology stock, and stock >= 0
    for i in range(n_i):
        for t in range(T):
            row = {int(z[k, t]): 1.0 for k, (ii, j) in enumerate(pairs) if ii == i}
            for tp in range(t + 1):
                row[int(x[i, tp])] = row.get(int(x[i, tp]), 0.0) - 1.0
                row[int(v[i, tp])] = row.get(int(v[i, tp]), 0.0) + 1.0
            m.add_row(row, "<=", float(instance.initial_tech[i]))
            cum = {int(x[i, tp]): 1.0 for tp in range(t + 1)}
            for tp in range(t + 1):
                cum[int(v[i, tp])] = -1.0
            m.add_row(cum, ">=", -float(instance.initial_tech[i]))
    # workforce flow
    for j in range(n_j):
        for t in range(T):
            row: dict[int, float] = {int(swf[j, t]): 1.0, int(y[j, t]): -1.0, int(w[j, t]): 1.0}
            if t > 0:
                row[int(swf[j, t - 1])] = -1.0
            for e, (src, dst) in enumerate(edges):
                if src == j:
                    row[int(u[e, t])] = row.get(int(u[e, t]), 0.0) + 1.0
                if dst == j:
                    start = t - durations[(src, dst)]
                    if start >= 0:
                        row[int(u[e, start])] = row.get(int(u[e, start]), 0.0) - 1.0
            m.add_row(row, "=", float(instance.initial_workforce[j]) if t == 0 else 0.0)
    # assignments within standing workforce
    for j in range(n_j):
        for t in range(T):
            row = {int(z[k, t]): 1.0 for k, (i, jj) in enumerate(pairs) if jj == j}
            if row:
                row[int(swf[j, t])] = -1.0
                m.add_row(row, "<=", 0.0)

    priority = np.full(m.n_vars, 3.0)
    priority[x.ravel()] = 0.0
    priority[v.ravel()] = 0.0
    priority[y.ravel()] = 1.0
    priority[w.ravel()] = 1.0
    if len(edges):
        priority[u.ravel()] = 1.0
    if len(pairs):
        priority[z.ravel()] = 2.0
    index = IntegratedIndex(
        x=x,
        v=v,
        y=y,
        w=w,
        stock_wf=swf,
        pairs=pairs,
        z=z,
        edges=edges,
        u=u,
        branch_priority=priority,
    )
    return m, index


@dataclass(frozen=True, eq=False)
class TechPlanIndex:
    """Variable indices of the purchase/discard/stock model."""

    x: np.ndarray  # (n, T)
    v: np.ndarray
    stock: np.ndarray


def build_tech_plan_model(
    capacities: np.ndarray,
    purchase_costs: np.ndarray,
    discard_costs: np.ndarray,
    demand: np.ndarray,
    discount: float,
    initial: np.ndarray,
) -> tuple[LinearModel, TechPlanIndex]:
    """Purchases, discards, and stock balances covering demand by capacity.

    Used for a technology plan whenever some effective discard cost is
    negative, which is exactly when the purchase-only kernel's no-discard
    premise fails.
    """
    caps = np.asarray(capacities, dtype=int)
    p = np.asarray(purchase_costs, dtype=float)
    s = np.asarray(discard_costs, dtype=float)
    d = np.asarray(demand, dtype=int)
    init = np.asarray(initial, dtype=int)
    n, T = p.shape
    weight = discount ** np.arange(T, dtype=float)
    future_peak = np.maximum.accumulate(d[::-1])[::-1] if T else d

    def units(level: int, cap: int) -> int:
        return int(-(-int(level) // cap)) if level > 0 else 0

    m = LinearModel("tech_plan")
    x = np.empty((n, T), dtype=int)
    v = np.empty((n, T), dtype=int)
    stock = np.empty((n, T), dtype=int)
    for i in range(n):
        for t in range(T):
            x[i, t] = m.add_var(
                f"x_{i}_{t}", 0, units(future_peak[t], int(caps[i])), weight[t] * p[i, t]
            )
    reach = [
        int(init[i]) + np.cumsum([units(future_peak[t], int(caps[i])) for t in range(T)])
        for i in range(n)
    ]
    for i in range(n):
        for t in range(T):
            v[i, t] = m.add_var(f"v_{i}_{t}", 0, int(reach[i][t]), weight[t] * s[i, t])
    for i in range(n):
        for t in range(T):
            # stock follows integral purchases and discards; no branching
            stock[i, t] = m.add_var(
                f"s_{i}_{t}", 0, int(reach[i][t]), 0.0, integer=False
            )
    for i in range(n):
        for t in range(T):
            row = {int(stock[i, t]): 1.0, int(x[i, t]): -1.0, int(v[i, t]): 1.0}
            if t > 0:
                row[int(stock[i, t - 1])] = -1.0
            m.add_row(row, "=", float(init[i]) if t == 0 else 0.0)
    for t in range(T):
        m.add_row({int(stock[i, t]): float(caps[i]) for i in range(n)}, ">=", float(d[t]))
        for coef, rhs in _covering_count_facets(tuple(int(c) for c in caps), int(d[t])):
            row = {int(stock[i, t]): coef[i] for i in range(n) if coef[i]}
            if row:
                m.add_row(row, ">=", float(rhs))
    return m, TechPlanIndex(x=x, v=v, stock=stock)
