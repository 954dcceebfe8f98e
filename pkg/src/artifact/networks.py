"""Squeezed-vacuum / beam-splitter networks producing the standard tripartite families.

Every factory builds a :class:`NetworkSpec` and runs it through :func:`build`,
so the covariance always comes from the symplectic pipeline and never from a
hard-coded closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import InvalidArgument
from .phase_space import Axis, GaussianState, apply, beam_splitter, phase_shift, squeezer, vacuum


@dataclass(frozen=True)
class SqueezedInput:
    r: float
    axis: Axis = "p"

    def __post_init__(self) -> None:
        if not np.isfinite(self.r) or self.r < 0:
            raise InvalidArgument(f"input squeezing must be finite and >= 0, got {self.r}")
        if self.axis not in ("x", "p"):
            raise InvalidArgument(f"axis must be 'x' or 'p', got {self.axis!r}")


@dataclass(frozen=True)
class Splitter:
    mode_a: int
    mode_b: int
    R: float


@dataclass(frozen=True)
class NetworkSpec:
    """Inputs (``None`` = vacuum), then splitters in order, then output phase shifts."""

    n_modes: int
    inputs: tuple[SqueezedInput | None, ...]
    splitters: tuple[Splitter, ...] = ()
    phases: tuple[tuple[int, float], ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.n_modes
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidArgument(f"n_modes must be a positive integer, got {n!r}")
        if len(self.inputs) != n:
            raise InvalidArgument(f"expected {n} inputs, got {len(self.inputs)}")
        for s in self.splitters:
            if not (0 <= s.mode_a < n and 0 <= s.mode_b < n) or s.mode_a == s.mode_b:
                raise InvalidArgument(f"splitter {s} references invalid modes for n={n}")
            if not 0.0 <= s.R <= 1.0:
                raise InvalidArgument(f"splitter {s} has reflectivity outside [0, 1]")
        for mode, theta in self.phases:
            if not 0 <= mode < n or not np.isfinite(theta):
                raise InvalidArgument(f"invalid phase shift ({mode}, {theta})")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> NetworkSpec:
        try:
            n = int(doc["n_modes"])
            inputs = tuple(
                None if item is None else SqueezedInput(float(item["r"]), item.get("axis", "p"))
                for item in doc["inputs"]
            )
            splitters = tuple(Splitter(int(a), int(b), float(R)) for a, b, R in doc.get("splitters", []))
            phases = tuple((int(m), float(t)) for m, t in doc.get("phases", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed network spec: {exc}") from exc
        return cls(n, inputs, splitters, phases)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_modes": self.n_modes,
            "inputs": [None if i is None else {"r": i.r, "axis": i.axis} for i in self.inputs],
            "splitters": [[s.mode_a, s.mode_b, s.R] for s in self.splitters],
            "phases": [[m, t] for m, t in self.phases],
        }


def build(spec: NetworkSpec) -> GaussianState:
    state = vacuum(spec.n_modes)
    for mode, item in enumerate(spec.inputs):
        if item is not None:
            state = apply(state, squeezer(mode, item.r, item.axis))
    for s in spec.splitters:
        state = apply(state, beam_splitter(s.mode_a, s.mode_b, s.R))
    for mode, theta in spec.phases:
        state = apply(state, phase_shift(mode, theta))
    return state


def ladder(n: int, R1: float) -> tuple[Splitter, ...]:
    """BS(1,2) with reflectivity R1, then BS(k,k+1) with R = 1/(n-k+1) for k = 2..n-1.

    Written 0-based: the k-th splitter mixes modes k-1 and k.
    """
    if n < 2:
        raise InvalidArgument(f"a ladder needs at least two modes, got {n}")
    out = [Splitter(0, 1, R1)]
    for k in range(2, n):
        out.append(Splitter(k - 1, k, 1.0 / (n - k + 1)))
    return tuple(out)


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgument(f"family needs n >= 2 modes, got {n!r}")


def epr_spec(n: int, r: float, R1: float = 0.5) -> NetworkSpec:
    _check_n(n)
    inputs = (SqueezedInput(r, "p"), SqueezedInput(r, "x")) + (None,) * (n - 2)
    return NetworkSpec(n, inputs, ladder(n, R1))


def ss_spec(n: int, r: float, R1: float = 0.5) -> NetworkSpec:
    _check_n(n)
    inputs = (SqueezedInput(r, "p"),) + (None,) * (n - 1)
    return NetworkSpec(n, inputs, ladder(n, R1))


def asymmetric_r1(n: int, r2: float) -> float:
    """First-input squeezing that optimises the GHZ state for a given r2.

    sinh(2 r1) = (n-1) sinh(2 r2).
    """
    if r2 <= 0:
        raise InvalidArgument("asymmetric GHZ needs r2 > 0 (r1 is undefined otherwise)")
    return 0.5 * float(np.arcsinh((n - 1) * np.sinh(2 * r2)))


def ghz_spec(n: int, r: float, asymmetric: bool = False) -> NetworkSpec:
    _check_n(n)
    r1 = asymmetric_r1(n, r) if asymmetric else r
    inputs = (SqueezedInput(r1, "p"),) + tuple(SqueezedInput(r, "x") for _ in range(n - 1))
    return NetworkSpec(n, inputs, ladder(n, 1.0 / n))


def cv_epr(n: int, r: float, R1: float = 0.5) -> GaussianState:
    """Two oppositely squeezed inputs on modes 1, 2 and vacua elsewhere."""
    return build(epr_spec(n, r, R1))


def cv_ss(n: int, r: float, R1: float = 0.5) -> GaussianState:
    """A single p-squeezed input split over n modes."""
    return build(ss_spec(n, r, R1))


def cv_ghz(n: int, r: float, asymmetric: bool = False) -> GaussianState:
    """Mode 1 p-squeezed and modes 2..n x-squeezed; with ``asymmetric`` r is r2."""
    return build(ghz_spec(n, r, asymmetric))


# Output phases turning the two-splitter network into the linear three-mode cluster.
CLUSTER_PHASES: tuple[tuple[int, float], ...] = ((0, np.pi), (1, -np.pi / 2))


def cluster_spec(r: float, R1: float = 2.0 / 3.0, R2: float = 0.5) -> NetworkSpec:
    inputs = (SqueezedInput(r, "p"), SqueezedInput(r, "x"), SqueezedInput(r, "p"))
    splitters = (Splitter(0, 1, R1), Splitter(1, 2, R2))
    return NetworkSpec(3, inputs, splitters, CLUSTER_PHASES)


def cluster3(r: float, R1: float = 2.0 / 3.0, R2: float = 0.5) -> GaussianState:
    """Tripartite linear cluster state.

    With the default reflectivities the nullifiers are exact:
    var(p1 - x2) = var(p3 - x2) = 2 e^{-2r} and var(p2 - x1 - x3) = 3 e^{-2r}.
    Other reflectivities go through the same pipeline; check
    :func:`cluster_nullifier_residual` before relying on the closed forms.
    """
    return build(cluster_spec(r, R1, R2))


def cluster_nullifier_residual(state: GaussianState, r: float) -> float:
    """Largest deviation of the three nullifier variances from their ideal cluster values."""
    if state.n_modes != 3:
        raise InvalidArgument("cluster nullifiers are defined for three modes")
    targets = [
        (np.array([0, 1, -1, 0, 0, 0]), 2.0),
        (np.array([-1, 0, 0, 1, -1, 0]), 3.0),
        (np.array([0, 0, -1, 0, 0, 1]), 2.0),
    ]
    return max(abs(state.variance(v) - k * np.exp(-2 * r)) for v, k in targets)


FAMILIES = ("epr", "ss", "ghz", "ghz-asym", "cluster")


def family_state(family: str, n: int, r: float, R1: float | None = None) -> GaussianState:
    """Dispatch by name; used by the CLI and sweeps."""
    if family == "epr":
        return cv_epr(n, r, 0.5 if R1 is None else R1)
    if family == "ss":
        return cv_ss(n, r, 0.5 if R1 is None else R1)
    if family == "ghz":
        return cv_ghz(n, r)
    if family == "ghz-asym":
        return cv_ghz(n, r, asymmetric=True)
    if family == "cluster":
        if n != 3:
            raise InvalidArgument("the cluster family has exactly three modes")
        return cluster3(r, 2.0 / 3.0 if R1 is None else R1)
    raise InvalidArgument(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")

