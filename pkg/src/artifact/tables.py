"""Published optimal-gain tables for the three-mode families and their reproduction.

Each table lists, per squeezing value r, the gains (h~, g~) of the modes that
are not pinned to 1.  For S_{k|lm} the steered mode k is pinned; for S_{lm|k}
the single steering mode k is pinned.  Entries are rounded to two decimals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .gains import ghz_gains_for, optimize_steering_gains
from .networks import asymmetric_r1, cv_epr, cv_ghz, cv_ss
from .phase_space import GaussianState

TABLE_TOL = 0.005
SS_TABLE_R1 = 1.0 / 3.0  # the single-squeezer tables correspond to a 1/3 : 2/3 first splitter


@dataclass(frozen=True)
class GainTable:
    """``directions`` holds (steered, steerers) pairs, 0-based; ``rows`` maps r to the flattened entries."""

    name: str
    family: str
    kind: str  # "fixed" (one uniform h, g) or a direction pair such as "1-23"
    directions: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    rows: dict[float, tuple[float, ...]]

    def columns(self) -> list[str]:
        if self.kind == "fixed":
            return ["h", "g"]
        cols = []
        for steered, steerers in self.directions:
            label = f"S_{_lab(steered)}|{_lab(steerers)}"
            for m in _free_modes(steered, steerers):
                cols += [f"{label}:h{m + 1}", f"{label}:g{m + 1}"]
        return cols


def _lab(modes: tuple[int, ...]) -> str:
    return "".join(str(m + 1) for m in modes)


def _free_modes(steered: tuple[int, ...], steerers: tuple[int, ...]) -> list[int]:
    pinned = steered[0] if len(steered) == 1 else min(steerers)
    return sorted(m for m in set(steered) | set(steerers) if m != pinned)


_K_LM = (((0,), (1, 2)), ((1,), (0, 2)))
_LM_K = (((1, 2), (0,)), ((0, 2), (1,)))


def _sym(pairs: dict[float, tuple[float, float]]) -> dict[float, tuple[float, ...]]:
    return {r: (h, g) * 4 for r, (h, g) in pairs.items()}


TABLES: dict[str, GainTable] = {
    "ghz-fixed": GainTable(
        "ghz-fixed", "ghz", "fixed", (),
        {0.0: (0.0, 0.0), 0.25: (-0.27, 0.36), 0.5: (-0.40, 0.68), 0.75: (-0.46, 0.86), 1.0: (-0.49, 0.95), 1.5: (-0.50, 0.99), 2.0: (-0.50, 1.00)},
    ),
    "ghz-1-23": GainTable(
        "ghz-1-23", "ghz", "1-23", _K_LM,
        _sym({0.25: (-0.27, 0.36), 0.5: (-0.40, 0.68), 0.75: (-0.46, 0.86), 1.0: (-0.49, 0.95), 1.5: (-0.50, 0.99), 2.0: (-0.50, 1.00)}),
    ),
    "ghz-23-1": GainTable(
        "ghz-23-1", "ghz", "23-1", _LM_K,
        _sym({0.25: (-1.37, 1.87), 0.5: (-0.73, 1.23), 0.75: (-0.58, 1.08), 1.0: (-0.53, 1.03), 1.5: (-0.50, 1.00), 2.0: (-0.50, 1.00)}),
    ),
    "ghz-asym-fixed": GainTable(
        "ghz-asym-fixed", "ghz-asym", "fixed", (),
        {0.0: (0.0, 0.0), 0.25: (-0.34, 0.51), 0.5: (-0.45, 0.80), 0.75: (-0.48, 0.97), 1.0: (-0.49, 0.99), 1.5: (-0.50, 1.00), 2.0: (-0.50, 1.00)},
    ),
    "ghz-asym-1-23": GainTable(
        "ghz-asym-1-23", "ghz-asym", "1-23", _K_LM,
        _sym({0.25: (-0.34, 0.51), 0.5: (-0.45, 0.80), 0.75: (-0.48, 0.93), 1.0: (-0.49, 0.97), 1.5: (-0.49, 0.97), 2.0: (-0.50, 1.00)}),
    ),
    "ghz-asym-23-1": GainTable(
        "ghz-asym-23-1", "ghz-asym", "23-1", _LM_K,
        _sym({0.25: (-0.98, 1.48), 0.5: (-0.62, 1.12), 0.75: (-0.54, 1.04), 1.0: (-0.51, 1.01), 1.5: (-0.50, 1.00), 2.0: (-0.50, 1.00)}),
    ),
    "epr-1-23": GainTable(
        "epr-1-23", "epr", "1-23", _K_LM,
        {
            0.25: (-0.33, 0.33, -0.33, 0.33, -0.35, 0.35, 0.06, 0.06),
            0.5: (-0.54, 0.54, -0.54, 0.54, -0.65, 0.65, 0.21, 0.21),
            0.75: (-0.64, 0.64, -0.64, 0.64, -0.90, 0.90, 0.40, 0.40),
            1.0: (-0.68, 0.68, -0.68, 0.68, -1.08, 1.08, 0.58, 0.58),
            1.5: (-0.70, 0.70, -0.70, 0.70, -1.28, 1.28, 0.82, 0.82),
            2.0: (-0.71, 0.71, -0.71, 0.71, -1.36, 1.36, 0.93, 0.93),
        },
    ),
    "epr-23-1": GainTable(
        "epr-23-1", "epr", "23-1", _LM_K,
        {
            0.25: (-1.53, 1.53, -1.53, 1.53, -2.98, 2.98, 0.52, 0.52),
            0.5: (-0.93, 0.93, -0.93, 0.93, -1.71, 1.71, 0.56, 0.56),
            0.75: (-0.78, 0.78, -0.78, 0.78, -1.40, 1.40, 0.63, 0.63),
            1.0: (-0.73, 0.73, -0.73, 0.73, -1.31, 1.31, 0.70, 0.70),
            1.5: (-0.71, 0.71, -0.71, 0.71, -1.32, 1.32, 0.85, 0.85),
            2.0: (-0.71, 0.71, -0.71, 0.71, -1.37, 1.37, 0.93, 0.93),
        },
    ),
    "ss-1-23": GainTable(
        "ss-1-23", "ss", "1-23", _K_LM,
        _sym({0.25: (-0.15, 0.18), 0.5: (-0.27, 0.36), 0.75: (-0.35, 0.54), 1.0: (-0.40, 0.68), 1.5: (-0.46, 0.86), 2.0: (-0.49, 0.95)}),
    ),
    "ss-23-1": GainTable(
        "ss-23-1", "ss", "23-1", _LM_K,
        _sym({0.25: (-2.81, 3.31), 0.5: (-1.37, 1.87), 0.75: (-0.93, 1.43), 1.0: (-0.73, 1.23), 1.5: (-0.58, 1.08), 2.0: (-0.53, 1.03)}),
    ),
}


def table_name(family: str, kind: str) -> str:
    name = f"{family}-{kind}"
    if name not in TABLES:
        raise InvalidArgument(f"no gain table for family {family!r} and kind {kind!r}; known: {', '.join(sorted(TABLES))}")
    return name


def table_state(family: str, r: float) -> GaussianState:
    if family == "ghz":
        return cv_ghz(3, r)
    if family == "ghz-asym":
        return cv_ghz(3, r, asymmetric=True)
    if family == "epr":
        return cv_epr(3, r)
    if family == "ss":
        return cv_ss(3, r, SS_TABLE_R1)
    raise InvalidArgument(f"no gain tables for family {family!r}")


def reproduce_row(name: str, r: float) -> tuple[float, ...]:
    """Gains for one table row, in the table's column order.

    Direction tables come from the simplex optimiser.  The "fixed" tables use
    one (h, g) for all remote modes: the symmetric one is the optimum of
    S_{1|23}, the asymmetric one the closed-form gains.
    """
    table = TABLES[name]
    if table.kind == "fixed":
        if r == 0:
            return 0.0, 0.0
        if table.family == "ghz-asym":
            return ghz_gains_for(3, asymmetric_r1(3, r), r)
        gs = optimize_steering_gains(table_state(table.family, r), [0], [1, 2])
        return gs.h[1], gs.g[1]
    state = table_state(table.family, r)
    out: list[float] = []
    for steered, steerers in table.directions:
        gs = optimize_steering_gains(state, steered, steerers)
        for m in _free_modes(steered, steerers):
            out += [gs.h[m], gs.g[m]]
    return tuple(out)


def row_deviation(name: str, r: float) -> float:
    """Largest |reproduced - published| entry in a row."""
    published = np.array(TABLES[name].rows[r])
    return float(np.max(np.abs(np.array(reproduce_row(name, r)) - published)))
