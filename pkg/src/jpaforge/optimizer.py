"""Parameter sweeps and derivative-free design optimization.

A named-parameter layer over the amplifier model: each parameter maps
to exactly one knob of the configuration (odd-mode impedance, matching
reactance slope, flux bias/drive, pump frequency, shunt capacitance).
The optimizer maximizes usable bandwidth at a target gain with bounded
ripple, using a bounded Nelder-Mead simplex; a dense grid mode covers
one- and two-parameter spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .errors import JpaForgeError, NoBandwidthError, UsageError
from .gain import AmplifierConfig, GainMetrics, gain_metrics, gain_sweep
from .network import RuthroffTransformer, SeriesTunedReactance
from .pumpistor import OperatingPoint

# Parameter name -> (unit, which configuration knob it drives).
VALID_PARAMS = {
    "z_oo": "ohm (transformer odd-mode impedance)",
    "reactance_slope": "H (series matching element, centered at w_p/2)",
    "phi_dc_over_phi0": "flux quanta (dc bias)",
    "phi_ac_over_phi0": "flux quanta (pump drive amplitude)",
    "omega_p": "rad/s (pump)",
    "shunt_c": "F (SQUID and environment shunt capacitance)",
}


@dataclass(frozen=True)
class ParameterSpace:
    """Named box constraints over amplifier parameters.

    Coordinate order is canonical (sorted by name), so two spaces with
    the same bounds behave identically regardless of how the mapping
    was written down.
    """

    bounds: dict

    def __post_init__(self):
        if not self.bounds:
            raise UsageError("parameter space is empty")
        clean = {}
        for name in sorted(self.bounds):
            if name not in VALID_PARAMS:
                raise UsageError(
                    "unknown parameter %r; valid names: %s"
                    % (name, ", ".join(sorted(VALID_PARAMS)))
                )
            lo, hi = (float(v) for v in self.bounds[name])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise UsageError("bounds for %r must be finite" % name)
            if not lo < hi:
                raise UsageError(
                    "lower bound must be below upper bound for %r" % name
                )
            clean[name] = (lo, hi)
        object.__setattr__(self, "bounds", clean)

    @property
    def names(self) -> tuple:
        return tuple(self.bounds)

    def lower(self) -> np.ndarray:
        return np.array([self.bounds[n][0] for n in self.names])

    def upper(self) -> np.ndarray:
        return np.array([self.bounds[n][1] for n in self.names])

    def midpoint(self) -> dict:
        return {n: 0.5 * (lo + hi) for n, (lo, hi) in self.bounds.items()}

    def contains(self, values: dict) -> bool:
        return all(
            self.bounds[n][0] <= values[n] <= self.bounds[n][1]
            for n in self.names
        )


def apply_parameters(config: AmplifierConfig, values: dict) -> AmplifierConfig:
    """Return a new configuration with the named parameters replaced.

    The input is never mutated.  Scalar operating-point and capacitance
    updates are applied before any ``reactance_slope`` element so the
    slope element is always centered at half the effective pump
    frequency.
    """
    unknown = set(values) - set(VALID_PARAMS)
    if unknown:
        raise UsageError(
            "unknown parameter %r; valid names: %s"
            % (sorted(unknown)[0], ", ".join(sorted(VALID_PARAMS)))
        )

    op = config.operating_point
    op = OperatingPoint.from_flux_fractions(
        values.get("phi_dc_over_phi0", op.phi_dc_over_phi0),
        values.get("phi_ac_over_phi0", op.phi_ac_over_phi0),
        values.get("omega_p", op.pump_omega),
    )

    squid = config.squid
    env = config.environment
    if "shunt_c" in values:
        c = float(values["shunt_c"])
        squid = replace(squid, shunt_capacitance=c)
        env = replace(env, shunt_capacitance=c)

    if "z_oo" in values:
        elements = []
        seen = False
        for el in env.elements:
            if isinstance(el, RuthroffTransformer):
                spec = replace(el.spec, z_odd=float(values["z_oo"]))
                elements.append(RuthroffTransformer(spec))
                seen = True
            else:
                elements.append(el)
        if not seen:
            raise UsageError(
                "cannot set z_oo: the environment has no transformer"
            )
        env = replace(env, elements=tuple(elements))

    if "reactance_slope" in values:
        slope_el = SeriesTunedReactance(
            slope=float(values["reactance_slope"]),
            center_omega=0.5 * op.pump_omega,
        )
        elements = [
            el for el in env.elements
            if not isinstance(el, SeriesTunedReactance)
        ]
        elements.append(slope_el)
        env = replace(env, elements=tuple(elements))

    return AmplifierConfig(squid=squid, operating_point=op, environment=env)


@dataclass(frozen=True)
class Objective:
    """Flat-gain design objective.

    A point is feasible when the peak gain reaches ``target_gain_db``
    and the in-band ripple stays within ``ripple_limit_db``.  Feasible
    points score the bandwidth (Hz) held at one dB below target;
    infeasible points score zero and carry a violation measure (dB of
    peak deficit plus dB of excess ripple) so the optimizer can climb
    toward feasibility.
    """

    target_gain_db: float
    band: tuple
    omega_grid: np.ndarray
    ripple_limit_db: float = 1.0

    def __post_init__(self):
        lo, hi = self.band
        if not 0 < lo < hi:
            raise UsageError("objective band must satisfy 0 < lo < hi")
        grid = np.asarray(self.omega_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 32:
            raise UsageError("objective needs a 1-D grid of >= 32 points")
        object.__setattr__(self, "omega_grid", grid)

    def evaluate(self, config: AmplifierConfig) -> "ObjectiveResult":
        curve = gain_sweep(config, self.omega_grid)
        if len(curve) < 8:
            # Nearly the whole band is beyond the oscillation threshold.
            return ObjectiveResult(0.0, False, math.nan, math.nan, 0.0,
                                   violation=math.inf)
        try:
            m = gain_metrics(curve, self.target_gain_db - 1.0,
                             band=self.band, classify=False)
            bw = m.bandwidth_at_level_hz
        except NoBandwidthError:
            m = gain_metrics(curve, -math.inf, band=self.band,
                             classify=False)
            bw = 0.0
        deficit = max(0.0, self.target_gain_db - m.peak_gain_db)
        excess = max(0.0, m.ripple_db - self.ripple_limit_db)
        if deficit > 0 or excess > 0:
            return ObjectiveResult(0.0, False, m.peak_gain_db, m.ripple_db,
                                   bw, violation=deficit + excess)
        return ObjectiveResult(bw, True, m.peak_gain_db, m.ripple_db,
                               bw, violation=0.0)


@dataclass(frozen=True)
class ObjectiveResult:
    score: float
    feasible: bool
    peak_gain_db: float
    ripple_db: float
    bandwidth_hz: float
    violation: float


@dataclass(frozen=True)
class TraceEntry:
    """One objective evaluation during a sweep or an optimization."""

    index: int
    values: dict
    score: float
    feasible: bool
    peak_gain_db: float
    ripple_db: float
    violation: float
    error: str | None = None


@dataclass(frozen=True)
class OptimizeResult:
    """Best point plus the full evaluation history.

    ``feasible`` is False when no evaluated point met the objective; in
    that case ``values`` is the least-violating point seen and
    ``metrics`` may be absent.
    """

    values: dict
    config: AmplifierConfig
    metrics: GainMetrics | None
    score: float
    feasible: bool
    violation: float
    trace: tuple
    seed: int
    evaluations: int


@dataclass(frozen=True)
class SweepRow:
    value: float
    metrics: GainMetrics | None
    error: str | None = None


def sweep(config: AmplifierConfig, param: str, grid,
          omega_grid, level_db: float,
          band: tuple | None = None, jobs: int = 1) -> tuple:
    """Evaluate full gain metrics at each value of one named parameter.

    Per-value model or metric failures are recorded in the row rather
    than aborting the sweep; an unknown parameter name is a usage
    error.
    """
    if param not in VALID_PARAMS:
        raise UsageError(
            "unknown parameter %r; valid names: %s"
            % (param, ", ".join(sorted(VALID_PARAMS)))
        )
    rows = []
    for value in grid:
        try:
            cfg = apply_parameters(config, {param: float(value)})
            curve = gain_sweep(cfg, omega_grid, jobs=jobs)
            m = gain_metrics(curve, level_db, band=band)
            rows.append(SweepRow(float(value), m))
        except JpaForgeError as exc:
            rows.append(SweepRow(float(value), None,
                                 "%s: %s" % (type(exc).__name__, exc)))
    return tuple(rows)


class _BudgetExhausted(Exception):
    pass


class _TracedObjective:
    """Wraps Objective.evaluate with bound projection and a trace."""

    def __init__(self, config, space, objective, budget):
        self.config = config
        self.space = space
        self.objective = objective
        self.budget = budget
        self.trace = []
        self.lo = space.lower()
        self.span = space.upper() - space.lower()

    def values_at(self, unit: np.ndarray) -> dict:
        point = self.lo + np.clip(unit, 0.0, 1.0) * self.span
        return {n: float(v) for n, v in zip(self.space.names, point)}

    def __call__(self, unit: np.ndarray) -> float:
        if len(self.trace) >= self.budget:
            raise _BudgetExhausted
        values = self.values_at(unit)
        try:
            res = self.objective.evaluate(
                apply_parameters(self.config, values))
            entry = TraceEntry(len(self.trace), values, res.score,
                               res.feasible, res.peak_gain_db,
                               res.ripple_db, res.violation)
        except JpaForgeError as exc:
            entry = TraceEntry(len(self.trace), values, 0.0, False,
                               math.nan, math.nan, math.inf,
                               "%s: %s" % (type(exc).__name__, exc))
        self.trace.append(entry)
        if entry.feasible:
            return -entry.score
        # Keep infeasible points strictly above every feasible value.
        return 1.0 + entry.violation


def _best_entry(trace) -> TraceEntry:
    feasible = [e for e in trace if e.feasible]
    if feasible:
        return max(feasible, key=lambda e: e.score)
    return min(trace, key=lambda e: e.violation)


def _finish(config, space, objective, traced, seed) -> OptimizeResult:
    best = _best_entry(traced.trace)
    best_config = apply_parameters(config, best.values)
    metrics = None
    if best.error is None and math.isfinite(best.violation):
        curve = gain_sweep(best_config, objective.omega_grid)
        if best.feasible:
            metrics = gain_metrics(curve, objective.target_gain_db - 1.0,
                                   band=objective.band)
        else:
            peak = float(np.max(curve.gains_db()))
            metrics = gain_metrics(curve, peak - 3.0, band=objective.band)
    return OptimizeResult(
        values=best.values,
        config=best_config,
        metrics=metrics,
        score=best.score,
        feasible=best.feasible,
        violation=best.violation,
        trace=tuple(traced.trace),
        seed=seed,
        evaluations=len(traced.trace),
    )


def optimize(config: AmplifierConfig, space: ParameterSpace,
             objective: Objective, budget: int = 500,
             seed: int = 0) -> OptimizeResult:
    """Bounded Nelder-Mead over the space, maximizing the objective.

    The simplex starts from the space midpoint with seed-derived vertex
    perturbations; iterates are projected onto the box before each
    evaluation, so no returned point can leave the bounds.  The run is
    deterministic for identical inputs, and every evaluation appears in
    the trace.
    """
    if budget < 10:
        raise UsageError("budget must be at least 10 evaluations")
    traced = _TracedObjective(config, space, objective, budget)
    n = len(space.names)
    rng = np.random.default_rng(seed)

    x0 = np.full(n, 0.5)
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        step = 0.25 + 0.15 * rng.random()
        sign = 1.0 if rng.random() < 0.5 else -1.0
        simplex[i + 1, i] += sign * step

    try:
        minimize(
            traced, x0, method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxfev": budget,
                "maxiter": 10 * budget,
                "xatol": 1e-6,
                "fatol": 1e-9,
            },
        )
    except _BudgetExhausted:
        pass
    return _finish(config, space, objective, traced, seed)


def grid_search(config: AmplifierConfig, space: ParameterSpace,
                objective: Objective,
                points_per_axis: int = 33) -> OptimizeResult:
    """Dense rectangular search; only 1-D and 2-D spaces are supported.

    Shares the trace/result shape with :func:`optimize` (seed is
    irrelevant and reported as -1).
    """
    n = len(space.names)
    if n > 2:
        raise UsageError("grid mode supports one or two parameters")
    if points_per_axis < 2:
        raise UsageError("need at least two points per axis")
    axes = [np.linspace(0.0, 1.0, points_per_axis) for _ in range(n)]
    traced = _TracedObjective(config, space, objective,
                              budget=points_per_axis ** n)
    if n == 1:
        units = axes[0][:, None]
    else:
        ua, ub = np.meshgrid(axes[0], axes[1], indexing="ij")
        units = np.column_stack([ua.ravel(), ub.ravel()])
    for u in units:
        traced(u)
    return _finish(config, space, objective, traced, seed=-1)
