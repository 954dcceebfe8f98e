"""Linear quadrature combinations, their uncertainty bounds and bipartitions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, Unsupported
from .phase_space import GaussianState, variance_of

X_PHASE = 0.0
P_PHASE = -np.pi / 2  # q(-pi/2) = p
MAX_ENUMERATED_MODES = 20


@dataclass(frozen=True)
class QuadratureForm:
    """sum_i c_i q_i(phi_i) with q(phi) = cos(phi) x - sin(phi) p."""

    coeffs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        coeffs = tuple((float(c), float(phi)) for c, phi in self.coeffs)
        if not coeffs:
            raise InvalidArgument("a quadrature form needs at least one mode")
        if not all(np.isfinite(c) and np.isfinite(phi) for c, phi in coeffs):
            raise InvalidArgument("quadrature form coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def xs(cls, weights: Sequence[float]) -> QuadratureForm:
        return cls(tuple((w, X_PHASE) for w in weights))

    @classmethod
    def ps(cls, weights: Sequence[float]) -> QuadratureForm:
        return cls(tuple((w, P_PHASE) for w in weights))

    @property
    def n_modes(self) -> int:
        return len(self.coeffs)

    def weight(self, mode: int) -> float:
        return self.coeffs[mode][0]

    def phase(self, mode: int) -> float:
        return self.coeffs[mode][1]

    def vector(self) -> np.ndarray:
        out = np.zeros(2 * self.n_modes)
        for i, (c, phi) in enumerate(self.coeffs):
            out[2 * i] = c * np.cos(phi)
            out[2 * i + 1] = -c * np.sin(phi)
        return out

    def scaled(self, alpha: float) -> QuadratureForm:
        return QuadratureForm(tuple((alpha * c, phi) for c, phi in self.coeffs))


def linear_forms(h: Sequence[float], g: Sequence[float]) -> tuple[QuadratureForm, QuadratureForm]:
    """u = sum h_i x_i and v = sum g_i p_i."""
    if len(h) != len(g):
        raise InvalidArgument("gain vectors h and g must have equal length")
    return QuadratureForm.xs(h), QuadratureForm.ps(g)


def _check_pair(u: QuadratureForm, v: QuadratureForm) -> None:
    if u.n_modes != v.n_modes:
        raise InvalidArgument(f"forms act on {u.n_modes} and {v.n_modes} modes")


def uncertainty_bound(u: QuadratureForm, v: QuadratureForm, subset: Iterable[int]) -> float:
    """|sum_{i in subset} c_i(u) c_i(v) sin(phi_i(u) - phi_i(v))|, the lower bound on du*dv."""
    _check_pair(u, v)
    total = 0.0
    for i in set(subset):
        if not 0 <= i < u.n_modes:
            raise InvalidArgument(f"mode {i} outside 0..{u.n_modes - 1}")
        (cu, pu), (cv, pv) = u.coeffs[i], v.coeffs[i]
        total += cu * cv * np.sin(pu - pv)
    return float(abs(total))


def steering_product(state: GaussianState, u: QuadratureForm, v: QuadratureForm) -> float:
    _check_pair(u, v)
    return float(np.sqrt(variance_of(state, u) * variance_of(state, v)))


def mode_label(modes: Iterable[int]) -> str:
    return "".join(str(m + 1) for m in sorted(modes))


@dataclass(frozen=True)
class Bipartition:
    """An unordered split A|B of the modes; A|B and B|A compare equal."""

    side_a: frozenset[int]
    side_b: frozenset[int]

    def __init__(self, side_a: Iterable[int], side_b: Iterable[int]) -> None:
        a, b = frozenset(int(m) for m in side_a), frozenset(int(m) for m in side_b)
        if not a or not b or a & b:
            raise InvalidArgument(f"bipartition sides must be disjoint and non-empty, got {set(a)} and {set(b)}")
        # canonical orientation: side_a holds the lowest mode
        if min(b) < min(a):
            a, b = b, a
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @property
    def modes(self) -> frozenset[int]:
        return self.side_a | self.side_b

    def sides(self) -> tuple[frozenset[int], frozenset[int]]:
        return self.side_a, self.side_b

    @property
    def label(self) -> str:
        """Smaller side first, e.g. '2|13'."""
        a, b = self.side_a, self.side_b
        if len(b) < len(a):
            a, b = b, a
        return f"{mode_label(a)}|{mode_label(b)}"

    @staticmethod
    def parse(text: str) -> tuple[frozenset[int], frozenset[int]]:
        """'13|2' -> ({0, 2}, {1}) keeping the written order (e.g. steered|steering)."""
        try:
            left, right = text.split("|")
            a = frozenset(int(ch) - 1 for ch in left.strip())
            b = frozenset(int(ch) - 1 for ch in right.strip())
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse bipartition label {text!r}") from exc
        if not a or not b or a & b or min(a | b) < 0:
            raise InvalidArgument(f"invalid bipartition label {text!r}")
        return a, b

    def __str__(self) -> str:
        return self.label


def enumerate_bipartitions(n: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 bipartitions, ordered by the side holding mode 1."""
    if n < 2:
        raise InvalidArgument(f"bipartitions need at least two modes, got {n}")
    if n > MAX_ENUMERATED_MODES:
        raise Unsupported(f"enumerating bipartitions of {n} > {MAX_ENUMERATED_MODES} modes")
    rest = range(1, n)
    sides = []
    for k in range(0, n - 1):
        for extra in itertools.combinations(rest, k):
            sides.append((0, *extra))
    sides.sort()
    everything = frozenset(range(n))
    return [Bipartition(a, everything - frozenset(a)) for a in sides]
