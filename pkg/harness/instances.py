"""
Deterministic random instances for the theorem suites.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional

import numpy as np

from base_reports import OperatorFile, SuiteConfig, VectorFile
from geometry import Functional, Space, Vector, make_rng
from operators import Operator
from theorems import convex_line_min, line_min

logger = logging.getLogger(__name__)

InstanceKind = Literal[
    "vector-pair", "operator-pair", "operator-triple", "orthogonal-operator-pair", "orthogonal-functional-pair"
]


@dataclass(frozen=True)
class Instance:
    """One generated input; only the fields of its kind are set."""

    kind: InstanceKind
    trial: int
    dim: int
    seed: List[int]
    x: Optional[Vector] = None
    y: Optional[Vector] = None
    T: Optional[Operator] = None
    A: Optional[Operator] = None
    B: Optional[Operator] = None
    f: Optional[Functional] = None
    g: Optional[Functional] = None
    lambda0: Optional[float] = None

    def inputs(self) -> Dict[str, Any]:
        """JSON-ready inputs for failure records."""
        out: Dict[str, Any] = {"kind": self.kind, "dim": self.dim, "seed": self.seed}
        for name in ("x", "y"):
            v = getattr(self, name)
            if v is not None:
                out[name] = VectorFile.from_vector(v).model_dump(mode="json")
        for name in ("T", "A", "B"):
            op = getattr(self, name)
            if op is not None:
                out[name] = OperatorFile.from_operator(op).model_dump(mode="json")
        for name in ("f", "g"):
            fn = getattr(self, name)
            if fn is not None:
                out[name] = VectorFile.from_functional(fn).model_dump(mode="json")
        if self.lambda0 is not None:
            out["lambda0"] = self.lambda0
        return out


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, split from the master seed."""
    return make_rng(np.random.SeedSequence([seed, trial]))


def _nonzero_normal(rng: np.random.Generator, shape) -> np.ndarray:
    arr = rng.standard_normal(shape)
    while not np.any(arr):
        arr = rng.standard_normal(shape)
    return arr


def gen_instance(kind: InstanceKind, config: SuiteConfig, trial: int) -> Instance:
    """
    Deterministic instance from (config.seed, trial).

    Matrices and coordinates are standard normal. Orthogonal pairs come from
    line minimization: T + lambda0 A is orthogonal to A when lambda0
    minimizes lambda -> ||T + lambda A|| (likewise for functionals in the
    dual norm).
    """
    dim = config.dim_for(trial)
    rng = trial_rng(config.seed, trial)
    domain = Space.from_descriptor(config.domain, dim)
    codomain = Space.from_descriptor(config.codomain_descriptor, dim)
    seed = [config.seed, trial]

    if kind == "vector-pair":
        x = Vector(_nonzero_normal(rng, dim), domain)
        y = Vector(rng.standard_normal(dim), domain)
        return Instance(kind=kind, trial=trial, dim=dim, seed=seed, x=x, y=y)

    if kind in ("operator-pair", "operator-triple", "orthogonal-operator-pair"):
        T = Operator(_nonzero_normal(rng, (dim, dim)), domain, codomain)
        A = Operator(_nonzero_normal(rng, (dim, dim)), domain, codomain)
        if kind == "operator-pair":
            return Instance(kind=kind, trial=trial, dim=dim, seed=seed, T=T, A=A)
        if kind == "operator-triple":
            B = Operator(_nonzero_normal(rng, (dim, dim)), domain, codomain)
            return Instance(kind=kind, trial=trial, dim=dim, seed=seed, T=T, A=A, B=B)
        lam, _ = line_min(T, A)
        logger.debug(f"trial {trial}: orthogonalized operator pair at lambda0 = {lam:.12g}")
        return Instance(kind=kind, trial=trial, dim=dim, seed=seed, T=T.plus(A, lam), A=A, lambda0=lam)

    if kind == "orthogonal-functional-pair":
        dual = domain.dual()
        fc = _nonzero_normal(rng, dim)
        gc = _nonzero_normal(rng, dim)
        lam, _ = convex_line_min(lambda t: dual.norm(fc + t * gc))
        f = Functional(fc + lam * gc, domain)
        g = Functional(gc, domain)
        return Instance(kind=kind, trial=trial, dim=dim, seed=seed, f=f, g=g, lambda0=lam)

    raise ValueError(f"Unknown instance kind: {kind!r}")
