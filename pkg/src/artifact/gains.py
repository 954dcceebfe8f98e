"""Optimal gains: closed forms for the standard families and a simplex search for the rest."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Literal, Mapping

import numpy as np

from .errors import InvalidArgument, OptimizerAbort
from .phase_space import GaussianState
from .quad_forms import P_PHASE, X_PHASE, Bipartition, QuadratureForm, mode_label

Provenance = Literal["analytic", "optimized", "given"]

# Gains beyond this magnitude are treated as infeasible by the optimiser; the
# normalised products of interest approach their infimum only as gains diverge
# for uncorrelated modes, which is never a useful witness.
GAIN_LIMIT = 50.0
PENALTY = 1e300
STAGNATION_ITERATIONS = 200
STAGNATION_RTOL = 1e-14


@dataclass(frozen=True)
class GainSet:
    """Gains for u = sum h_i q_i(phi_u) and v = sum g_i q_i(phi_v).

    ``target`` is a label such as "1|23" (steered side first) or "global".
    ``phases`` maps a mode to its (phi_u, phi_v) pair; absent modes use (x, p).
    """

    target: str
    h: Mapping[int, float]
    g: Mapping[int, float]
    provenance: Provenance = "given"
    value: float | None = None
    phases: Mapping[int, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        h = {int(k): float(v) for k, v in self.h.items()}
        g = {int(k): float(v) for k, v in self.g.items()}
        if not all(np.isfinite(list(h.values()) + list(g.values()))):
            raise InvalidArgument("gains must be finite")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "phases", {int(k): (float(a), float(b)) for k, (a, b) in self.phases.items()})

    def forms(self, n: int) -> tuple[QuadratureForm, QuadratureForm]:
        u, v = [], []
        for i in range(n):
            pu, pv = self.phases.get(i, (X_PHASE, P_PHASE))
            u.append((self.h.get(i, 0.0), pu))
            v.append((self.g.get(i, 0.0), pv))
        return QuadratureForm(tuple(u)), QuadratureForm(tuple(v))

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "h": {str(k + 1): v for k, v in sorted(self.h.items())},
            "g": {str(k + 1): v for k, v in sorted(self.g.items())},
            "provenance": self.provenance,
            "value": self.value,
            "phases": {str(k + 1): list(v) for k, v in sorted(self.phases.items())},
        }


def uniform_gains(n: int, h: float, g: float, target: str = "global", provenance: Provenance = "analytic") -> GainSet:
    """h_1 = g_1 = 1 and h_i = h, g_i = g for the remaining modes."""
    hs = {0: 1.0, **{i: h for i in range(1, n)}}
    gs = {0: 1.0, **{i: g for i in range(1, n)}}
    return GainSet(target, hs, gs, provenance)


# ---------------------------------------------------------------- closed forms


def _check_r(r: float) -> None:
    if not np.isfinite(r) or r < 0:
        raise InvalidArgument(f"squeezing must be finite and >= 0, got {r}")


def _check_R(R1: float) -> None:
    if not 0.0 <= R1 <= 1.0:
        raise InvalidArgument(f"reflectivity must lie in [0, 1], got {R1}")


def epr_gains(r: float, R1: float = 0.5) -> tuple[float, float]:
    """(g_xs, g_ps) minimising var(x1 - g x2') and var(p1 + g p2') for two squeezed inputs."""
    _check_r(r)
    _check_R(R1)
    T1 = 1.0 - R1
    a, b = np.exp(2 * r), np.exp(-2 * r)
    root = np.sqrt(R1 * T1)
    return float(root * (a - b) / (T1 * a + R1 * b)), float(root * (a - b) / (R1 * a + T1 * b))


def ss_gains(r: float, R1: float = 0.5) -> tuple[float, float]:
    """(g_xs, g_ps) for one squeezed input and one vacuum on a splitter of reflectivity R1."""
    _check_r(r)
    _check_R(R1)
    T1 = 1.0 - R1
    a, b = np.exp(2 * r), np.exp(-2 * r)
    root = np.sqrt(R1 * T1)
    return float(root * (a - 1) / (T1 * a + R1)), float(root * (1 - b) / (R1 + T1 * b))


def ghz_gains(n: int, in_var_x1: float, in_var_x2: float, in_var_p1: float, in_var_p2: float) -> tuple[float, float]:
    """(h, g) minimising var(x1 + h sum x_i) and var(p1 + g sum p_i) for the GHZ network."""
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if min(in_var_x1, in_var_x2, in_var_p1, in_var_p2) <= 0:
        raise InvalidArgument("input variances must be positive")
    h = -(in_var_x1 - in_var_x2) / (in_var_x2 + (n - 1) * in_var_x1)
    g = -(in_var_p1 - in_var_p2) / (in_var_p2 + (n - 1) * in_var_p1)
    return float(h), float(g)


def ghz_gains_for(n: int, r1: float, r2: float) -> tuple[float, float]:
    """ghz_gains for mode 1 p-squeezed by r1 and the others x-squeezed by r2."""
    _check_r(r1)
    _check_r(r2)
    return ghz_gains(n, np.exp(2 * r1), np.exp(-2 * r2), np.exp(-2 * r1), np.exp(2 * r2))


# ---------------------------------------------------------------- Nelder-Mead


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    calls: int
    converged: bool


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Iterable[float],
    tol: float = 1e-6,
    max_calls: int = 10**6,
    step: float = 0.05,
    xtol: float | None = None,
) -> SimplexResult:
    """Downhill simplex with reflection 1, expansion 2, contraction 1/2 and shrink 1/2.

    Stops once the spread of simplex values is below ``tol`` and the simplex
    diameter is below ``xtol`` (default ``tol``), or the call budget runs out.
    A simplex drifting along a flat valley also stops when its values agree
    within ``tol`` and the best value has not improved for a while.
    """
    x0 = np.asarray(list(x0), dtype=float)
    if x0.ndim != 1 or x0.size == 0:
        raise InvalidArgument("x0 must be a non-empty vector")
    xtol = tol if xtol is None else xtol
    calls = 0

    def f(x: np.ndarray) -> float:
        nonlocal calls
        calls += 1
        value = float(objective(x))
        if not np.isfinite(value):
            raise OptimizerAbort(f"objective returned {value} at x = {np.array2string(x, precision=6)}")
        return value

    n = x0.size
    simplex = np.vstack([x0] + [x0 + step * np.eye(n)[i] for i in range(n)])
    values = np.array([f(p) for p in simplex])
    converged = False
    patience = STAGNATION_ITERATIONS * (n + 1)
    last_best, since_improved = np.inf, 0
    while calls < max_calls:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        spread = values[-1] - values[0]
        diameter = np.abs(simplex[1:] - simplex[0]).max()
        if spread <= tol and diameter <= xtol:
            converged = True
            break
        # flat valleys never shrink the simplex; stop once the best value is stuck
        if values[0] < last_best - STAGNATION_RTOL * max(1.0, abs(last_best)):
            last_best, since_improved = values[0], 0
        else:
            since_improved += 1
            if since_improved >= patience and spread <= tol:
                converged = True
                break
        centroid = simplex[:-1].sum(axis=0) / n
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        fr = f(reflected)
        if fr < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            fe = f(expanded)
            if fe < fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
            continue
        if fr < values[-1]:
            contracted = centroid + 0.5 * (reflected - centroid)
            fc = f(contracted)
            if fc <= fr:
                simplex[-1], values[-1] = contracted, fc
                continue
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            fc = f(contracted)
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + 0.5 * (simplex[i] - best)
            values[i] = f(simplex[i])
    i = int(np.argmin(values))
    return SimplexResult(simplex[i].copy(), float(values[i]), calls, converged)


# ---------------------------------------------------------------- steering products


def _direction(n: int, mode: int, phase: float) -> np.ndarray:
    e = np.zeros(2 * n)
    e[2 * mode] = np.cos(phase)
    e[2 * mode + 1] = -np.sin(phase)
    return e


@dataclass(frozen=True)
class SteeringObjective:
    """Normalised product  du dv / C_steered  for gains on a fixed set of modes.

    Variances are quadratic in the gains, so the per-mode Gram matrices are
    computed once and each evaluation is two small quadratic forms.
    """

    state: GaussianState
    steered: frozenset[int]
    steerers: frozenset[int]
    phases: Mapping[int, tuple[float, float]]
    modes: tuple[int, ...]
    gram_u: np.ndarray
    gram_v: np.ndarray
    cross: np.ndarray  # per-mode sin(phi_u - phi_v)
    _pin: int = field(init=False, repr=False, default=0)
    _free: np.ndarray = field(init=False, repr=False, default=None)  # type: ignore[assignment]
    _steered_idx: np.ndarray = field(init=False, repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        # index bookkeeping is fixed per objective; evaluations only do arithmetic
        pin = self.modes.index(self.anchor())
        object.__setattr__(self, "_pin", pin)
        object.__setattr__(self, "_free", np.array([i for i in range(len(self.modes)) if i != pin], dtype=int))
        object.__setattr__(self, "_steered_idx", np.array([i for i, m in enumerate(self.modes) if m in self.steered], dtype=int))

    @classmethod
    def build(
        cls,
        state: GaussianState,
        steered: Iterable[int],
        steerers: Iterable[int],
        phases: Mapping[int, tuple[float, float]] | None = None,
    ) -> SteeringObjective:
        steered, steerers = frozenset(steered), frozenset(steerers)
        n = state.n_modes
        if not steered or not steerers or steered & steerers:
            raise InvalidArgument("steered and steering mode sets must be disjoint and non-empty")
        if max(steered | steerers) >= n or min(steered | steerers) < 0:
            raise InvalidArgument(f"mode sets exceed the {n}-mode state")
        phases = dict(phases or {})
        modes = tuple(sorted(steered | steerers))
        du = np.array([_direction(n, m, phases.get(m, (X_PHASE, P_PHASE))[0]) for m in modes])
        dv = np.array([_direction(n, m, phases.get(m, (X_PHASE, P_PHASE))[1]) for m in modes])
        cross = np.array([np.sin(phases.get(m, (X_PHASE, P_PHASE))[0] - phases.get(m, (X_PHASE, P_PHASE))[1]) for m in modes])
        return cls(state, steered, steerers, phases, modes, du @ state.cov @ du.T, dv @ state.cov @ dv.T, cross)

    @property
    def label(self) -> str:
        return f"{mode_label(self.steered)}|{mode_label(self.steerers)}"

    def numerator(self, h: np.ndarray, g: np.ndarray) -> float:
        return float(np.sqrt(max(h @ self.gram_u @ h, 0.0) * max(g @ self.gram_v @ g, 0.0)))

    def bound(self, h: np.ndarray, g: np.ndarray) -> float:
        idx = self._steered_idx
        return abs(float(np.dot(h[idx] * g[idx], self.cross[idx])))

    def value(self, h: np.ndarray, g: np.ndarray) -> float:
        c = self.bound(h, g)
        return self.numerator(h, g) / c if c > 0 else np.inf

    def anchor(self) -> int:
        """Mode whose gains are pinned to 1: the steered mode when it is alone, else the lowest steerer."""
        return min(self.steered) if len(self.steered) == 1 else min(self.steerers)

    def gain_vectors(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = len(self.modes)
        h, g = np.ones(m), np.ones(m)
        h[self._free], g[self._free] = z[: m - 1], z[m - 1 :]
        return h, g

    def __call__(self, z: np.ndarray) -> float:
        if np.abs(z).max() > GAIN_LIMIT:
            return PENALTY
        h, g = self.gain_vectors(z)
        c = self.bound(h, g)
        if c <= 0:
            return PENALTY
        num = max(h @ self.gram_u @ h, 0.0) * max(g @ self.gram_v @ g, 0.0)
        value = float(np.sqrt(num)) / c
        return value if np.isfinite(value) else PENALTY

    def regression_seed(self) -> np.ndarray:
        """Gains that minimise var(u) and var(v) separately with the anchor pinned."""
        k, free = self._pin, self._free
        out = []
        for gram in (self.gram_u, self.gram_v):
            sub = gram[np.ix_(free, free)]
            out.append(-np.linalg.lstsq(sub, gram[free, k], rcond=None)[0])
        return np.concatenate(out)

    def gainset(self, z: np.ndarray, provenance: Provenance = "optimized") -> GainSet:
        h, g = self.gain_vectors(z)
        return GainSet(
            self.label,
            dict(zip(self.modes, h)),
            dict(zip(self.modes, g)),
            provenance,
            self.value(h, g),
            {m: self.phases[m] for m in self.modes if m in self.phases},
        )


def steering_value(
    state: GaussianState,
    steered: Iterable[int],
    steerers: Iterable[int],
    gains: GainSet,
) -> float:
    """Normalised product for explicit gains (modes missing from ``gains`` get zero weight)."""
    obj = SteeringObjective.build(state, steered, steerers, gains.phases)
    h = np.array([gains.h.get(m, 0.0) for m in obj.modes])
    g = np.array([gains.g.get(m, 0.0) for m in obj.modes])
    return obj.value(h, g)


COARSE_GRID = np.linspace(-3.0, 3.0, 13)
RESTART_SCALE = 0.25


@functools.lru_cache(maxsize=8)
def _grid_points(axis: tuple[float, ...], dim: int) -> np.ndarray:
    mesh = np.meshgrid(*([np.asarray(axis)] * dim), indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, dim)
    pts.flags.writeable = False
    return pts


def coarse_grid_minimum(obj: SteeringObjective, axis: np.ndarray = COARSE_GRID) -> tuple[np.ndarray, float]:
    """Exhaustive scan over the free gains (vectorised); practical up to four free gains."""
    k = obj.modes.index(obj.anchor())
    m = len(obj.modes)
    free = [i for i in range(m) if i != k]
    pts = _grid_points(tuple(axis), 2 * (m - 1))
    H = np.ones((len(pts), m))
    G = np.ones((len(pts), m))
    H[:, free], G[:, free] = pts[:, : m - 1], pts[:, m - 1 :]
    vu = np.einsum("ij,jk,ik->i", H, obj.gram_u, H)
    vv = np.einsum("ij,jk,ik->i", G, obj.gram_v, G)
    idx = [i for i, mode in enumerate(obj.modes) if mode in obj.steered]
    c = np.abs((H[:, idx] * G[:, idx] * obj.cross[idx]).sum(axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(c > 0, np.sqrt(np.clip(vu, 0, None) * np.clip(vv, 0, None)) / c, np.inf)
    i = int(np.argmin(vals))
    return pts[i], float(vals[i])


def _polish(obj: SteeringObjective, z0: np.ndarray, tol: float, max_calls: int) -> SimplexResult:
    # a second run from the first answer rebuilds a collapsed simplex
    first = nelder_mead(obj, z0, tol=tol, max_calls=max_calls)
    second = nelder_mead(obj, first.x, tol=tol, max_calls=max_calls)
    best = second if second.fun <= first.fun else first
    return SimplexResult(best.x, best.fun, first.calls + second.calls, best.converged)


def optimize_steering_gains(
    state: GaussianState,
    steered: Iterable[int],
    steerers: Iterable[int],
    phases: Mapping[int, tuple[float, float]] | None = None,
    tol: float = 1e-6,
    max_calls: int = 10**6,
) -> GainSet:
    """Minimise du dv / C_steered over the gains, pinning the anchor mode's gains to 1.

    With one steered mode the regression gains are returned as they are: the
    bound is then constant and the two variances are separate quadratics.
    Otherwise the simplex starts from them; when a coarse grid scan beats the
    simplex answer by more than 1e-3, five deterministic restarts are run.
    """
    obj = SteeringObjective.build(state, steered, steerers, phases)
    seed = obj.regression_seed()
    seed_ok = obj(seed) < PENALTY
    if seed_ok and len(obj.steered) == 1:
        # the bound is constant, so the regression gains are the exact optimum
        return obj.gainset(seed, "analytic")
    if not seed_ok:
        seed = np.zeros_like(seed)
    n_free = seed.size
    grid_z, grid_f = coarse_grid_minimum(obj) if n_free <= 4 else (None, np.inf)
    if grid_z is not None and obj(seed) >= PENALTY:
        seed = grid_z
    best = _polish(obj, seed, tol, max_calls)
    if grid_z is not None and grid_f < best.fun - 1e-3:
        offsets = np.vstack([np.zeros(n_free)] + [RESTART_SCALE * np.roll(np.linspace(-1, 1, n_free), j) for j in range(4)])
        for off in offsets:
            trial = _polish(obj, grid_z + off, tol, max_calls)
            if trial.fun < best.fun:
                best = trial
    return obj.gainset(best.x)


def optimize_bipartition(state: GaussianState, partition: Bipartition) -> tuple[GainSet, GainSet]:
    """Optimised gains for both steering directions across ``partition``."""
    a, b = partition.sides()
    return optimize_steering_gains(state, a, b), optimize_steering_gains(state, b, a)


def cluster_gainsets() -> tuple[GainSet, GainSet, GainSet]:
    """Rotated forms for the linear cluster, one per steered mode.

    S'_1 = S'_2: u' = -x1 + p2 - x3, v' = p1 - x2.
    S'_3:        u' = -x1 + p2 - x3, v' = p3 - x2.
    Every steered-side and steering-side bound equals 1.
    """
    h = {0: -1.0, 1: 1.0, 2: -1.0}
    u_phase = {0: X_PHASE, 1: P_PHASE, 2: X_PHASE}
    out = []
    for k, g in ((0, {0: 1.0, 1: -1.0, 2: 0.0}), (1, {0: 1.0, 1: -1.0, 2: 0.0}), (2, {0: 0.0, 1: -1.0, 2: 1.0})):
        v_phase = {0: P_PHASE, 1: X_PHASE, 2: P_PHASE}
        rest = [m for m in range(3) if m != k]
        phases = {m: (u_phase[m], v_phase[m]) for m in range(3)}
        out.append(GainSet(f"{k + 1}|{mode_label(rest)}", h, g, "analytic", None, phases))
    return tuple(out)
