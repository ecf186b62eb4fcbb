"""
Helmholtz-Hodge decomposition along an embedded submanifold:
X = X_mu + grad(p) + p H with X_mu in Gamma_mu.

The pressure solves the normal equations A p = B^T M_w X of
min_p ||X - B p||_{M_w}, the weak form of (Laplacian - |H|^2) p = c(X).
"""

import logging

import numpy as np

from ..config.settings import settings
from .errors import MeanCurvatureVanishing
from .geometry import as_ambient_field
from .models import AmbientField, DecompositionResult, GeometryCache, SolverMethod
from .operators import OperatorSet, constraint_residual

logger = logging.getLogger(__name__)


def require_mean_curvature(cache: GeometryCache, strict: bool = False):
    """Raise unless H is nonzero somewhere on every component (everywhere if strict)"""
    threshold = settings.EPS_MEAN_CURVATURE ** 2
    curved = cache.mean_curvature_norm_sq > threshold
    if strict:
        flat = np.flatnonzero(~curved)
        if flat.size:
            raise MeanCurvatureVanishing(
                f"Mean curvature vanishes at {flat.size} vertices (first: {int(flat[0])}); "
                "strict mode requires it nowhere zero"
            )
        return
    per_component = np.bincount(cache.component_labels, weights=curved.astype(float), minlength=cache.component_count)
    empty = np.flatnonzero(per_component == 0)
    if empty.size:
        raise MeanCurvatureVanishing(
            f"Mean curvature is identically zero on component {int(empty[0])}; "
            "the pressure operator is not invertible"
        )


def decompose(ops: OperatorSet, cache: GeometryCache, X: AmbientField, *,
              method: SolverMethod = SolverMethod.AUTO, strict: bool = False) -> DecompositionResult:
    """Split X into its Gamma_mu part and B(pressure)"""
    X = as_ambient_field(X, ops.vertex_count, ops.dimension)
    require_mean_curvature(cache, strict)

    pressure, iterations = ops.solve(ops.adjoint_B(X), method)
    range_part = ops.apply_B(pressure)
    X_mu = X - range_part

    residual = constraint_residual(ops, cache, X_mu)
    result = DecompositionResult(
        X_mu=X_mu,
        pressure=pressure,
        constraint_residual_norm=float(np.sqrt(np.sum(ops.mass * residual * residual))),
        orthogonality_defect=abs(ops.inner(X_mu, range_part)),
        solver_iterations=iterations,
    )
    logger.debug(
        "decompose: |c(X_mu)|=%.3e orthogonality=%.3e iterations=%d",
        result.constraint_residual_norm, result.orthogonality_defect, iterations,
    )
    return result


def project(ops: OperatorSet, cache: GeometryCache, X: AmbientField, *,
            method: SolverMethod = SolverMethod.AUTO, strict: bool = False) -> AmbientField:
    """Helmholtz-Hodge projector onto Gamma_mu"""
    return decompose(ops, cache, X, method=method, strict=strict).X_mu
