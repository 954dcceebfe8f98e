"""Zero-mean Gaussian states and the symplectic maps that act on them.

Quadratures follow x = a + a^dagger and p = (a - a^dagger)/i, so the vacuum
has unit variances and [x, p] = 2i.  Phase-space vectors are interleaved as
(x1, p1, x2, p2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Protocol, Sequence

import numpy as np

from .errors import InvalidArgument

Axis = Literal["x", "p"]

SYMMETRY_RTOL = 1e-12
PHYSICALITY_FLOOR = -1e-9
SYMPLECTIC_ATOL = 1e-10


class HasVector(Protocol):
    n_modes: int

    def vector(self) -> np.ndarray: ...


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal Omega with one [[0, 1], [-1, 0]] block per mode."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GaussianState:
    """An N-mode zero-mean Gaussian state given by its covariance matrix."""

    cov: np.ndarray

    def __post_init__(self) -> None:
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.size == 0:
            raise InvalidArgument(f"covariance must be a non-empty 2N x 2N matrix, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise InvalidArgument("covariance has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise InvalidArgument("covariance is not symmetric")
        # symmetrize away round-off so eigvalsh sees an exactly Hermitian matrix
        object.__setattr__(self, "cov", _frozen(0.5 * (cov + cov.T)))
        floor = self.physicality_floor()
        if floor < PHYSICALITY_FLOOR * scale:
            raise InvalidArgument(f"covariance violates the uncertainty principle (min eigenvalue {floor:.3e})")

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def physicality_floor(self) -> float:
        """Smallest eigenvalue of cov + i*Omega; non-negative for physical states."""
        return float(np.linalg.eigvalsh(self.cov + 1j * symplectic_form(self.n_modes))[0])

    def variance(self, vector: np.ndarray) -> float:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (2 * self.n_modes,):
            raise InvalidArgument(f"vector of length {vector.shape} does not match {self.n_modes} modes")
        return float(vector @ self.cov @ vector)

    def block(self, mode: int) -> np.ndarray:
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]


@dataclass(frozen=True)
class SymplecticOp:
    """A symplectic map acting on the listed modes.

    ``matrix`` is the 2k x 2k block on those modes in interleaved order.  Use
    :meth:`embed` for the full 2N x 2N matrix.
    """

    modes: tuple[int, ...]
    matrix: np.ndarray
    description: str = field(default="")

    def __post_init__(self) -> None:
        modes = tuple(int(m) for m in self.modes)
        if len(set(modes)) != len(modes) or any(m < 0 for m in modes):
            raise InvalidArgument(f"mode indices must be distinct and non-negative, got {modes}")
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (2 * len(modes), 2 * len(modes)):
            raise InvalidArgument(f"matrix shape {matrix.shape} does not match modes {modes}")
        omega = symplectic_form(len(modes))
        if np.max(np.abs(matrix @ omega @ matrix.T - omega)) > SYMPLECTIC_ATOL:
            raise InvalidArgument(f"{self.description or 'operation'} is not symplectic")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", _frozen(matrix))

    def embed(self, n: int) -> np.ndarray:
        if n < 1 or max(self.modes, default=-1) >= n:
            raise InvalidArgument(f"{self.description or 'operation'} on modes {self.modes} does not fit {n} modes")
        idx = np.array([2 * m + q for m in self.modes for q in (0, 1)], dtype=int)
        full = np.eye(2 * n)
        full[np.ix_(idx, idx)] = self.matrix
        return full

    def inverse(self) -> SymplecticOp:
        omega = symplectic_form(len(self.modes))
        return SymplecticOp(self.modes, -omega @ self.matrix.T @ omega, f"inverse({self.description})")

    def then(self, outer: SymplecticOp) -> SymplecticOp:
        """The map ``outer`` after ``self``."""
        return compose(outer, self)


def compose(outer: SymplecticOp, inner: SymplecticOp) -> SymplecticOp:
    """outer o inner, acting on the union of both mode sets."""
    modes = tuple(sorted(set(outer.modes) | set(inner.modes)))
    local = {m: i for i, m in enumerate(modes)}

    def lift(op: SymplecticOp) -> np.ndarray:
        idx = np.array([2 * local[m] + q for m in op.modes for q in (0, 1)], dtype=int)
        full = np.eye(2 * len(modes))
        full[np.ix_(idx, idx)] = op.matrix
        return full

    return SymplecticOp(modes, lift(outer) @ lift(inner), f"{outer.description} o {inner.description}")


def vacuum(n: int) -> GaussianState:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgument(f"number of modes must be a positive integer, got {n!r}")
    return GaussianState(np.eye(2 * int(n)))


def identity(n: int) -> SymplecticOp:
    if n < 1:
        raise InvalidArgument(f"number of modes must be positive, got {n}")
    return SymplecticOp(tuple(range(n)), np.eye(2 * n), "identity")


def squeezer(mode: int, r: float, axis: Axis = "p") -> SymplecticOp:
    """Single-mode squeezer; on vacuum the ``axis`` quadrature gets variance exp(-2r)."""
    if not np.isfinite(r) or r < 0:
        raise InvalidArgument(f"squeezing must be finite and non-negative, got {r}; choose the axis instead of a sign")
    if axis == "x":
        diag = [np.exp(-r), np.exp(r)]
    elif axis == "p":
        diag = [np.exp(r), np.exp(-r)]
    else:
        raise InvalidArgument(f"axis must be 'x' or 'p', got {axis!r}")
    return SymplecticOp((mode,), np.diag(diag), f"squeeze[{mode}]({r:g},{axis})")


def beam_splitter(mode_a: int, mode_b: int, R: float) -> SymplecticOp:
    """Beam splitter of reflectivity R.

    out_a = sqrt(R) in_a + sqrt(1-R) in_b and out_b = sqrt(1-R) in_a - sqrt(R) in_b,
    applied identically to the x and p quadratures.
    """
    if mode_a == mode_b:
        raise InvalidArgument(f"beam splitter needs two distinct modes, got {mode_a} twice")
    if not 0.0 <= R <= 1.0:
        raise InvalidArgument(f"reflectivity must lie in [0, 1], got {R}")
    s, t = np.sqrt(R), np.sqrt(1.0 - R)
    return SymplecticOp((mode_a, mode_b), np.kron(np.array([[s, t], [t, -s]]), np.eye(2)), f"bs[{mode_a},{mode_b}]({R:g})")


def phase_shift(mode: int, theta: float) -> SymplecticOp:
    """a -> exp(i theta) a, so x -> cos(theta) x - sin(theta) p."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp((mode,), np.array([[c, -s], [s, c]]), f"phase[{mode}]({theta:g})")


def passive(unitary: np.ndarray, modes: Sequence[int] | None = None) -> SymplecticOp:
    """Linear-optics network a_out = U a_in written on quadratures."""
    u = np.asarray(unitary, dtype=complex)
    k = u.shape[0]
    if u.shape != (k, k) or not np.allclose(u @ u.conj().T, np.eye(k), atol=1e-12):
        raise InvalidArgument("passive network needs a square unitary matrix")
    modes = tuple(range(k)) if modes is None else tuple(modes)
    x, y = u.real, u.imag
    s = np.empty((2 * k, 2 * k))
    s[0::2, 0::2], s[0::2, 1::2] = x, -y
    s[1::2, 0::2], s[1::2, 1::2] = y, x
    return SymplecticOp(modes, s, "passive")


def apply(state: GaussianState, op: SymplecticOp) -> GaussianState:
    s = op.embed(state.n_modes)
    return GaussianState(s @ state.cov @ s.T)


def variance_of(state: GaussianState, form: HasVector | np.ndarray) -> float:
    """Variance of a linear quadrature combination (a form or an explicit 2N vector)."""
    if hasattr(form, "vector"):
        if form.n_modes != state.n_modes:
            raise InvalidArgument(f"form on {form.n_modes} modes used with a {state.n_modes}-mode state")
        vector = form.vector()
    else:
        vector = np.asarray(form, dtype=float)
    return max(state.variance(vector), 0.0)
