"""
Operator type, norm estimate dataclass and the norm-solver interface.
All operator-norm solvers must inherit from BaseNormSolver.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from geometry import Space, SpaceMismatchError, Vector


@dataclass(frozen=True)
class Operator:
    """Dense real matrix acting from ``domain`` into ``codomain``."""

    matrix: np.ndarray
    domain: Space
    codomain: Space

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape != (self.codomain.dim, self.domain.dim):
            raise SpaceMismatchError(
                f"matrix shape {m.shape} does not match "
                f"({self.codomain.dim}, {self.domain.dim})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], domain: str = "lp:2", codomain: str = "") -> "Operator":
        m = np.array(rows, dtype=float)
        if m.ndim != 2:
            raise SpaceMismatchError("operator rows must form a 2-D matrix")
        dom = Space.from_descriptor(domain, m.shape[1])
        cod = Space.from_descriptor(codomain or domain, m.shape[0])
        return cls(m, dom, cod)

    @classmethod
    def from_images(cls, images: Sequence[Sequence[float]], domain: str = "lp:2", codomain: str = "") -> "Operator":
        """Build from the images of the standard basis vectors (the matrix columns)."""
        return cls.from_rows(np.array(images, dtype=float).T, domain, codomain)

    def check_compatible(self, other: "Operator") -> None:
        if self.domain != other.domain or self.codomain != other.codomain:
            raise SpaceMismatchError("operators act between different spaces")

    def __add__(self, other: "Operator") -> "Operator":
        self.check_compatible(other)
        return Operator(self.matrix + other.matrix, self.domain, self.codomain)

    def __sub__(self, other: "Operator") -> "Operator":
        self.check_compatible(other)
        return Operator(self.matrix - other.matrix, self.domain, self.codomain)

    def __mul__(self, scalar: float) -> "Operator":
        return Operator(float(scalar) * self.matrix, self.domain, self.codomain)

    __rmul__ = __mul__

    def plus(self, other: "Operator", lam: float) -> "Operator":
        """T + lam * A."""
        self.check_compatible(other)
        return Operator(self.matrix + lam * other.matrix, self.domain, self.codomain)

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def image_norms(self, X: np.ndarray) -> np.ndarray:
        """||T x|| for each row x of X."""
        return np.asarray(self.codomain.norm(np.atleast_2d(X) @ self.matrix.T))

    def to_rows(self) -> List[List[float]]:
        return [[float(v) for v in row] for row in self.matrix]


def apply(T: Operator, x: Vector) -> Vector:
    """Matrix-vector product in the codomain."""
    if x.space != T.domain:
        raise SpaceMismatchError(
            f"vector of {x.space.descriptor}^{x.space.dim} outside operator domain "
            f"{T.domain.descriptor}^{T.domain.dim}"
        )
    return Vector(T.matrix @ x.coords, T.codomain)


@dataclass(frozen=True)
class NormEstimate:
    """Operator norm value with an accuracy estimate and a unit maximizer."""

    value: float
    accuracy: float  # 0 for exact methods
    method: str
    maximizer: np.ndarray

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError(f"operator norm must be nonnegative, got {self.value}")
        if self.accuracy < 0.0:
            raise ValueError(f"accuracy estimate must be nonnegative, got {self.accuracy}")

    @property
    def exact(self) -> bool:
        return self.accuracy == 0.0


class BaseNormSolver(ABC):
    """
    Abstract base class for operator-norm backends.

    Subclasses must implement:
    - name: str property identifying the method
    - supports(): whether the (domain, codomain) pair is handled
    - estimate(): compute the norm
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique name identifying this solver."""
        pass

    @abstractmethod
    def supports(self, domain: Space, codomain: Space) -> bool:
        """True when this solver handles the pair."""
        pass

    @abstractmethod
    def estimate(self, T: Operator) -> NormEstimate:
        """
        Compute ||T|| for an operator whose spaces this solver supports.

        Returns:
            NormEstimate with value, accuracy, method name and a unit maximizer.
        """
        pass
