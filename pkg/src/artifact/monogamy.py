"""Monogamy relations for steering and entanglement among three modes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Mapping

import numpy as np

from .criteria import PairGains, dgcz, giovannetti_value, optimize_giovannetti
from .errors import InvalidArgument, MonogamyViolation
from .gains import optimize_steering_gains
from .phase_space import GaussianState

SLACK = 1e-9
SATURATION_TOL = 1e-6


@dataclass(frozen=True)
class MonogamyReport:
    relation: str
    lhs: float
    rhs: float
    satisfied: bool
    saturated: bool
    gains: Mapping[str, Any] = field(default_factory=dict)
    details: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "relation": self.relation,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "satisfied": self.satisfied,
            "saturated": self.saturated,
            "gains": dict(self.gains),
            "details": dict(self.details),
        }


def _make(relation: str, lhs: float, rhs: float, strict: bool, **kw: Any) -> MonogamyReport:
    satisfied = lhs >= rhs - SLACK
    report = MonogamyReport(relation, float(lhs), float(rhs), satisfied, abs(lhs - rhs) < SATURATION_TOL, **kw)
    if strict and not satisfied:
        # these relations are theorems; a failure on a physical state is a bug
        raise MonogamyViolation(f"{relation}: lhs {lhs:.12g} < rhs {rhs:.12g}")
    return report


def _check_triple(state: GaussianState, k: int, l: int, m: int) -> None:
    n = state.n_modes
    if len({k, l, m}) != 3 or not all(0 <= i < n for i in (k, l, m)):
        raise InvalidArgument(f"need three distinct modes of the {n}-mode state, got {(k, l, m)}")


def bipartite_steering(state: GaussianState, k: int, l: int) -> tuple[float, float, float]:
    """(S_{k|l}, h, g) for S_{k|l} = d(x_k - h x_l) d(p_k + g p_l) minimised over h and g."""
    gs = optimize_steering_gains(state, [k], [l])
    return float(gs.value), -gs.h[l], gs.g[l]


def collective_steering(state: GaussianState, k: int, others: list[int]) -> float:
    return float(optimize_steering_gains(state, [k], others).value)


def steering_monogamy(state: GaussianState, k: int = 0, l: int = 1, m: int = 2, strict: bool = True) -> tuple[MonogamyReport, MonogamyReport]:
    """S_{k|l} S_{k|m} >= 1 and S_{k|l} S_{k|m} >= max(1, S_{k|lm}^2)."""
    _check_triple(state, k, l, m)
    s_kl, h_kl, g_kl = bipartite_steering(state, k, l)
    s_km, h_km, g_km = bipartite_steering(state, k, m)
    s_klm = collective_steering(state, k, [l, m])
    lhs = s_kl * s_km
    gains = {"h_kl": h_kl, "g_kl": g_kl, "h_km": h_km, "g_km": g_km}
    details = {"S_k|l": s_kl, "S_k|m": s_km, "S_k|lm": s_klm, "k": k + 1, "l": l + 1, "m": m + 1}
    base = _make("monogamy-1", lhs, 1.0, strict, gains=gains, details=details)
    full = _make("monogamy-full", lhs, max(1.0, s_klm**2), strict, gains=gains, details=details)
    return base, full


def entanglement_monogamy_dgcz(state: GaussianState, k: int = 0, l: int = 1, m: int = 2, strict: bool = True) -> tuple[MonogamyReport, MonogamyReport]:
    """B_kl + B_km >= 1 and B_kl + B_km >= max(1, S_{k|lm})."""
    _check_triple(state, k, l, m)
    b_kl = dgcz(state, k, l).value
    b_km = dgcz(state, k, m).value
    s_klm = collective_steering(state, k, [l, m])
    details = {"B_kl": b_kl, "B_km": b_km, "S_k|lm": s_klm, "k": k + 1, "l": l + 1, "m": m + 1}
    return (
        _make("mong-ent", b_kl + b_km, 1.0, strict, details=details),
        _make("mono1", b_kl + b_km, max(1.0, s_klm), strict, details=details),
    )


def entanglement_monogamy_general(
    state: GaussianState,
    k: int = 0,
    l: int = 1,
    m: int = 2,
    strict: bool = True,
    gains: Literal["entanglement", "steering"] = "entanglement",
) -> MonogamyReport:
    """S_kl S_km >= max(1, S_{k|lm}^2) / ((1 + |h_kl g_kl|)(1 + |h_km g_km|)).

    With ``gains="entanglement"`` each S_kl is minimised over its own gains;
    the reversed S_lk is also computed to check S_kl = S_lk.  With
    ``gains="steering"`` S_kl is evaluated at the gains minimising S_{k|l},
    where the relation reduces to the steering monogamy and saturates with it.
    """
    _check_triple(state, k, l, m)
    if gains == "entanglement":
        kl = optimize_giovannetti(state, k, l)
        km = optimize_giovannetti(state, k, m)
    elif gains == "steering":
        kl, km = (_at_steering_gains(state, k, j) for j in (l, m))
    else:
        raise InvalidArgument(f"gains must be 'entanglement' or 'steering', got {gains!r}")
    lk = optimize_giovannetti(state, l, k)
    s_klm = collective_steering(state, k, [l, m])
    rhs = max(1.0, s_klm**2) / ((1 + abs(kl.h * kl.g)) * (1 + abs(km.h * km.g)))
    used = {"h_kl": kl.h, "g_kl": kl.g, "h_km": km.h, "g_km": km.g, "h_lk": lk.h, "g_lk": lk.g}
    details = {
        "S_kl": kl.value,
        "S_km": km.value,
        "S_lk": lk.value,
        "S_k|lm": s_klm,
        "k": k + 1,
        "l": l + 1,
        "m": m + 1,
        "gains": gains,
    }
    return _make("mono2", kl.value * km.value, rhs, strict, gains=used, details=details)


def _at_steering_gains(state: GaussianState, k: int, l: int) -> PairGains:
    _, h, g = bipartite_steering(state, k, l)
    return PairGains(h, g, giovannetti_value(state, k, l, h, g))


def gaussian_steering_mapping(s_ab: float) -> tuple[float, bool]:
    """(G, steerable) from S_{A|B} = exp(-2 G); G is clamped at 0 when S >= 1."""
    if not np.isfinite(s_ab) or s_ab <= 0:
        raise InvalidArgument(f"steering parameter must be positive and finite, got {s_ab}")
    if s_ab >= 1:
        return 0.0, False
    return float(-0.5 * np.log(s_ab)), True
