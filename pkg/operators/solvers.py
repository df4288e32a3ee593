"""
Operator-norm solvers: exact closed forms where they exist, sampled
maximization over the unit sphere otherwise.
"""

import itertools
import logging

import numpy as np
from scipy.optimize import minimize

from config import settings
from geometry import Space, candidate_pool, dual_attainer_array, make_rng, refine_on_sphere

from .base import BaseNormSolver, NormEstimate, Operator

logger = logging.getLogger(__name__)

_SIGN_CHUNK = 1 << 15


class SpectralSolver(BaseNormSolver):
    """L2 -> L2: largest singular value."""

    @property
    def name(self) -> str:
        return "spectral"

    def supports(self, domain: Space, codomain: Space) -> bool:
        return domain.is_euclidean and codomain.is_euclidean

    def estimate(self, T: Operator) -> NormEstimate:
        _, s, vt = np.linalg.svd(T.matrix)
        return NormEstimate(value=float(s[0]), accuracy=0.0, method=self.name, maximizer=vt[0].copy())


class ColumnSolver(BaseNormSolver):
    """L1 domain: the unit ball is the hull of +-e_j, so the norm is the largest column norm."""

    @property
    def name(self) -> str:
        return "columns"

    def supports(self, domain: Space, codomain: Space) -> bool:
        return domain.is_l1

    def estimate(self, T: Operator) -> NormEstimate:
        col_norms = np.atleast_1d(T.codomain.norm(T.matrix.T))
        j = int(col_norms.argmax())
        x = np.zeros(T.domain.dim)
        x[j] = 1.0
        return NormEstimate(value=float(col_norms[j]), accuracy=0.0, method=self.name, maximizer=x)


class SignVectorSolver(BaseNormSolver):
    """Linf domain: max of ||T sigma|| over sign vectors (first sign fixed by symmetry)."""

    @property
    def name(self) -> str:
        return "sign-vectors"

    def supports(self, domain: Space, codomain: Space) -> bool:
        return domain.is_linf and domain.dim <= settings.MAX_SIGN_DIM

    def estimate(self, T: Operator) -> NormEstimate:
        n = T.domain.dim
        best = -1.0
        best_x = np.ones(n)
        signs = itertools.product((1.0, -1.0), repeat=n - 1)
        while True:
            chunk = list(itertools.islice(signs, _SIGN_CHUNK))
            if not chunk:
                break
            S = np.hstack([np.ones((len(chunk), 1)), np.array(chunk).reshape(len(chunk), n - 1)])
            vals = T.image_norms(S)
            k = int(vals.argmax())
            if vals[k] > best:
                best = float(vals[k])
                best_x = S[k].copy()
        return NormEstimate(value=best, accuracy=0.0, method=self.name, maximizer=best_x)


class RowSolver(BaseNormSolver):
    """Lp -> Linf: ||T|| = max_i ||row_i||_q with q the conjugate exponent."""

    @property
    def name(self) -> str:
        return "rows"

    def supports(self, domain: Space, codomain: Space) -> bool:
        return codomain.is_linf

    def estimate(self, T: Operator) -> NormEstimate:
        row_norms = np.atleast_1d(T.domain.dual().norm(T.matrix))
        i = int(row_norms.argmax())
        if row_norms[i] == 0.0:
            x = T.domain.normalize(np.eye(T.domain.dim)[0])
        else:
            x = dual_attainer_array(T.domain, T.matrix[i])[0]
        return NormEstimate(value=float(row_norms[i]), accuracy=0.0, method=self.name, maximizer=x)


class SampledSolver(BaseNormSolver):
    """
    Any pair: sphere sample plus ball vertices, axis-move refinement of the
    best REFINE_KEEP candidates, then a Nelder-Mead polish of the winner on
    the scale-free ratio ||T z|| / ||z||.

    The accuracy estimate is half the gap between the best and 5th-best
    refined values; it is a heuristic and is reported, never asserted.
    """

    @property
    def name(self) -> str:
        return "sampled"

    def supports(self, domain: Space, codomain: Space) -> bool:
        return True

    def estimate(self, T: Operator) -> NormEstimate:
        domain = T.domain
        rng = make_rng(settings.SAMPLING_SEED)
        pool = candidate_pool(domain, settings.NORM_SAMPLE_BUDGET, rng)
        vals = T.image_norms(pool)
        keep = np.argsort(-vals, kind="stable")[: settings.REFINE_KEEP]
        refined, rvals = refine_on_sphere(T.image_norms, pool[keep], domain, rng)

        order = np.argsort(-rvals, kind="stable")
        best_x = refined[order[0]]
        best = float(rvals[order[0]])

        def ratio(z: np.ndarray) -> float:
            nz = domain.norm(z)
            if nz == 0.0:
                return 0.0
            return -float(T.codomain.norm(T.matrix @ z)) / nz

        res = minimize(
            ratio,
            best_x,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 400 * domain.dim},
        )
        if -res.fun > best:
            best = float(-res.fun)
            best_x = domain.normalize(res.x)

        fifth = float(rvals[order[min(4, order.size - 1)]])
        accuracy = 0.5 * max(best - fifth, 0.0)
        logger.debug(f"sampled norm {best:.12g} +- {accuracy:.3g} ({domain.descriptor} -> {T.codomain.descriptor})")
        return NormEstimate(value=best, accuracy=accuracy, method=self.name, maximizer=best_x)
