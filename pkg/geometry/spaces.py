"""
Finite-dimensional Lp / Linf spaces: norms, one-sided norm derivatives,
extreme supporting functionals.

Every numeric routine has an array form (``*_array``) working on the last axis
so that samplers and optimizers can evaluate thousands of points at once; the
public operations on ``Vector`` delegate to them.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config import settings

logger = logging.getLogger(__name__)


class DescriptorError(ValueError):
    """Raised when a norm descriptor string cannot be parsed."""

    pass


class SpaceMismatchError(ValueError):
    """Raised when operands live in different spaces or have the wrong length."""

    pass


class ZeroVectorError(ValueError):
    """Raised when an operation needs a nonzero base point."""

    pass


class SupportOverflowError(RuntimeError):
    """Raised when the L1 sign-completion enumeration exceeds its cap."""

    pass


@dataclass(frozen=True)
class Space:
    """R^dim with the p-norm (p = inf for the max norm)."""

    dim: int
    p: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def lp(cls, dim: int, p: float) -> "Space":
        return cls(dim=dim, p=p)

    @classmethod
    def linf(cls, dim: int) -> "Space":
        return cls(dim=dim, p=math.inf)

    @classmethod
    def from_descriptor(cls, text: str, dim: int) -> "Space":
        """Parse "lp:2", "lp:1", "lp:3.5", "linf" (also "lp:inf")."""
        token = text.strip().lower()
        if token == "linf":
            return cls.linf(dim)
        if not token.startswith("lp:"):
            raise DescriptorError(f"Unknown norm descriptor: {text!r}")
        try:
            p = float(token[3:])
        except ValueError as e:
            raise DescriptorError(f"Invalid exponent in norm descriptor: {text!r}") from e
        if math.isnan(p) or p < 1.0:
            raise DescriptorError(f"Exponent must be >= 1 in norm descriptor: {text!r}")
        return cls(dim=dim, p=p)

    @property
    def descriptor(self) -> str:
        if self.is_linf:
            return "linf"
        if self.p.is_integer():
            return f"lp:{int(self.p)}"
        return f"lp:{self.p!r}"

    @property
    def is_linf(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_l1(self) -> bool:
        return self.p == 1.0

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    @property
    def is_polyhedral(self) -> bool:
        return self.is_l1 or self.is_linf

    @property
    def is_smooth(self) -> bool:
        """Unique supporting functional at every nonzero point."""
        return 1.0 < self.p < math.inf

    @property
    def is_strictly_convex(self) -> bool:
        return 1.0 < self.p < math.inf

    def dual(self) -> "Space":
        """Dual space with the conjugate exponent (L1 <-> Linf)."""
        if self.is_l1:
            return Space.linf(self.dim)
        if self.is_linf:
            return Space(dim=self.dim, p=1.0)
        return Space(dim=self.dim, p=self.p / (self.p - 1.0))

    def norm(self, coords: np.ndarray) -> np.ndarray:
        """Norm along the last axis; returns a float for 1-D input."""
        a = np.abs(np.asarray(coords, dtype=float))
        if self.is_linf:
            out = a.max(axis=-1)
        elif self.is_l1:
            out = a.sum(axis=-1)
        elif self.is_euclidean:
            out = np.sqrt((a * a).sum(axis=-1))
        else:
            # scale by the max coordinate before powering
            m = a.max(axis=-1, keepdims=True)
            safe = np.where(m > 0, m, 1.0)
            out = (np.squeeze(safe, -1) * ((a / safe) ** self.p).sum(axis=-1) ** (1.0 / self.p))
            out = np.where(np.squeeze(m, -1) > 0, out, 0.0)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def normalize(self, coords: np.ndarray) -> np.ndarray:
        """Scale rows to unit norm; zero rows are left unchanged."""
        arr = np.asarray(coords, dtype=float)
        n = np.asarray(self.norm(arr), dtype=float)
        n = np.where(n > 0, n, 1.0)
        return arr / n[..., None] if arr.ndim > 1 else arr / float(n)


@dataclass(frozen=True)
class Vector:
    """Coordinates tied to a Space; immutable."""

    coords: np.ndarray
    space: Space

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if arr.shape[0] != self.space.dim:
            raise SpaceMismatchError(
                f"Vector has {arr.shape[0]} coordinates, space dimension is {self.space.dim}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def norm(self) -> float:
        return self.space.norm(self.coords)

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def to_list(self) -> List[float]:
        return [float(c) for c in self.coords]


@dataclass(frozen=True)
class Functional:
    """Linear functional on ``predual``; its norm is the dual norm."""

    coords: np.ndarray
    predual: Space

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if arr.shape[0] != self.predual.dim:
            raise SpaceMismatchError(
                f"Functional has {arr.shape[0]} coordinates, predual dimension is {self.predual.dim}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __call__(self, v: Vector) -> float:
        _check_same(self.predual, v.space)
        return float(self.coords @ v.coords)

    def dual_norm(self) -> float:
        return self.predual.dual().norm(self.coords)

    def as_vector(self) -> Vector:
        """The functional as a point of the dual space."""
        return Vector(self.coords, self.predual.dual())

    def to_list(self) -> List[float]:
        return [float(c) for c in self.coords]


@dataclass(frozen=True)
class DerivativePair:
    """Left and right derivatives of t -> ||x + t y|| at 0."""

    left: float
    right: float

    def __post_init__(self):
        slack = 1e-12 * (1.0 + abs(self.left) + abs(self.right))
        if self.left > self.right + slack:
            raise ValueError(f"left derivative {self.left} exceeds right derivative {self.right}")


def _check_same(a: Space, b: Space) -> None:
    if a != b:
        raise SpaceMismatchError(f"Space mismatch: {a.descriptor}^{a.dim} vs {b.descriptor}^{b.dim}")


def norm_eval(space: Space, v: Vector) -> float:
    """Norm of v under the space's norm."""
    _check_same(space, v.space)
    return space.norm(v.coords)


def derivative_arrays(space: Space, X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-sided derivatives of t -> ||x + t y|| at 0, row-wise.

    Rows of X must be nonzero. The derivatives do not depend on the scale of x.

    Returns:
        (left, right) arrays with the batch shape of X.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    rtol = settings.ZERO_COORD_RTOL
    m = np.abs(X).max(axis=-1, keepdims=True)
    sgn = np.sign(X)

    if space.is_linf:
        top = np.abs(X) >= m * (1.0 - rtol)
        vals = sgn * Y
        right = np.where(top, vals, -np.inf).max(axis=-1)
        left = np.where(top, vals, np.inf).min(axis=-1)
        return left, right

    if space.is_l1:
        zero = np.abs(X) <= m * rtol
        s = np.where(zero, 0.0, sgn * Y).sum(axis=-1)
        z = np.where(zero, np.abs(Y), 0.0).sum(axis=-1)
        return s - z, s + z

    U = X / np.asarray(space.norm(X), dtype=float)[..., None]
    d = (np.abs(U) ** (space.p - 1.0) * np.sign(U) * Y).sum(axis=-1)
    return d, d.copy()


def one_sided_derivatives(x: Vector, y: Vector) -> DerivativePair:
    """rho'_-(x, y) and rho'_+(x, y) from the closed forms of the norm family."""
    _check_same(x.space, y.space)
    if x.is_zero():
        raise ZeroVectorError("one-sided derivatives need a nonzero base point")
    left, right = derivative_arrays(x.space, x.coords, y.coords)
    return DerivativePair(left=float(left), right=float(right))


def numeric_derivatives(x: Vector, y: Vector, steps=(1e-4, 5e-5, 2.5e-5)) -> DerivativePair:
    """Difference-quotient fallback with one Richardson step; used to cross-check closed forms."""
    space = x.space
    n0 = space.norm(x.coords)

    def quotient(t: float, sign: float) -> float:
        return (space.norm(x.coords + sign * t * y.coords) - n0) / t

    right = [quotient(t, 1.0) for t in steps]
    left = [-quotient(t, -1.0) for t in steps]
    r = 2.0 * right[-1] - right[-2]
    lft = 2.0 * left[-1] - left[-2]
    return DerivativePair(left=min(lft, r), right=max(lft, r))


def support_extremes(x: Vector) -> List[Functional]:
    """
    Extreme points of J(x) = {f : ||f||* = 1, f(x) = ||x||}.

    Smooth Lp gives the normalized duality map; Linf one signed coordinate
    functional per maximal coordinate; L1 the sign completions over zero
    coordinates, oriented by the first nonzero coordinate so that
    J(-x) lists -f in the same order.

    Raises:
        ZeroVectorError: x = 0.
        SupportOverflowError: more than L1_SUPPORT_CAP completions.
    """
    if x.is_zero():
        raise ZeroVectorError("support functionals need a nonzero point")
    space = x.space
    c = x.coords
    m = float(np.abs(c).max())
    rtol = settings.ZERO_COORD_RTOL

    if space.is_linf:
        top = np.flatnonzero(np.abs(c) >= m * (1.0 - rtol))
        out = []
        for i in top:
            f = np.zeros(space.dim)
            f[i] = np.sign(c[i])
            out.append(Functional(f, space))
        return out

    if space.is_l1:
        zero = np.flatnonzero(np.abs(c) <= m * rtol)
        count = 2 ** len(zero)
        if count > settings.L1_SUPPORT_CAP:
            raise SupportOverflowError(
                f"{count} sign completions exceed the cap of {settings.L1_SUPPORT_CAP}"
            )
        base = np.where(np.abs(c) <= m * rtol, 0.0, np.sign(c))
        orient = float(base[np.flatnonzero(base)[0]])
        out = []
        for pattern in itertools.product((1.0, -1.0), repeat=len(zero)):
            f = base.copy()
            f[zero] = orient * np.asarray(pattern)
            out.append(Functional(f, space))
        return out

    u = c / space.norm(c)
    return [Functional(np.abs(u) ** (space.p - 1.0) * np.sign(u), space)]


def dual_attainer_array(predual: Space, F: np.ndarray) -> np.ndarray:
    """Row-wise unit vectors y of ``predual`` with f(y) = ||f||*."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if predual.is_l1:
        Y = np.zeros_like(F)
        idx = np.abs(F).argmax(axis=1)
        rows = np.arange(F.shape[0])
        Y[rows, idx] = np.where(F[rows, idx] >= 0, 1.0, -1.0)
        return Y
    if predual.is_linf:
        return np.where(F >= 0, 1.0, -1.0)
    q = predual.dual().p
    G = F / np.maximum(np.abs(F).max(axis=1, keepdims=True), 1e-300)
    Y = np.sign(G) * np.abs(G) ** (q - 1.0)
    return predual.normalize(Y)


def dual_attainer(f: Functional) -> Vector:
    """A unit vector y with f(y) = ||f||*; every functional attains its norm in finite dimension."""
    if not np.any(f.coords):
        raise ZeroVectorError("the zero functional attains its norm everywhere")
    return Vector(dual_attainer_array(f.predual, f.coords)[0], f.predual)
