"""
Discrete intrinsic operators on an embedded mesh.

The constraint-range map is the exact adjoint of the linearized discrete
density, B = -M^{-1} J^T with J = d(mass)/dx. Its tangential part G is the
intrinsic gradient and its normal part K is multiplication by the
mean-curvature vector, so Bp = Gp + K p ~ grad(p) + p H. The divergence is
the negative M-adjoint of G, which makes discrete integration by parts exact.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from ..config.settings import settings
from .errors import SolverBreakdown
from .geometry import as_ambient_field, as_scalar_field, split_tangent_normal, tangent_projector
from .models import AmbientField, EmbeddedMesh, GeometryCache, ScalarField, SolverMethod

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class OperatorSet:
    """Sparse operators assembled from one GeometryCache"""
    dimension: int
    mass: np.ndarray
    G: sparse.csr_matrix
    K: sparse.csr_matrix
    B: sparse.csr_matrix
    A: sparse.csr_matrix
    kernel: np.ndarray
    _factor: Any = field(default=None, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    @property
    def vertex_count(self) -> int:
        return int(self.mass.shape[0])

    @property
    def weights(self) -> np.ndarray:
        """Mass repeated per ambient component (diagonal of M_w on fields)"""
        return np.repeat(self.mass, self.dimension)

    @property
    def M_w(self) -> sparse.dia_matrix:
        return sparse.diags(self.mass)

    def gradient(self, p: ScalarField) -> AmbientField:
        return (self.G @ p).reshape(-1, self.dimension)

    def apply_B(self, p: ScalarField) -> AmbientField:
        return (self.B @ p).reshape(-1, self.dimension)

    def adjoint_B(self, X: AmbientField) -> ScalarField:
        """B^T M_w X"""
        return self.B.T @ (self.weights * X.reshape(-1))

    def inner(self, X: AmbientField, Y: AmbientField) -> float:
        return float(np.dot(self.weights * X.reshape(-1), Y.reshape(-1)))

    def factorization(self) -> Callable[[np.ndarray], np.ndarray]:
        """Sparse LU solve of A, computed once per operator set"""
        with self._lock:
            if self._factor is None:
                self._factor = factorize(self.A, self.kernel)
                logger.debug("factorized pressure operator, V=%d", self.vertex_count)
            return self._factor

    def solve(self, rhs: ScalarField, method: SolverMethod = SolverMethod.AUTO,
              tol: Optional[float] = None) -> Tuple[ScalarField, int]:
        """Solve A p = rhs; returns (p, iterations) with 0 iterations for the direct path"""
        method = SolverMethod(method)
        tol = settings.TOL_SOLVE if tol is None else tol
        if method == SolverMethod.AUTO:
            if self.vertex_count <= settings.DIRECT_SOLVER_MAX_VERTICES:
                try:
                    return self.factorization()(rhs), 0
                except SolverBreakdown as e:
                    logger.warning("%s; falling back to conjugate gradient", e)
            return self._conjugate_gradient(rhs, tol)
        if method == SolverMethod.DIRECT:
            return self.factorization()(rhs), 0
        return self._conjugate_gradient(rhs, tol)

    def _conjugate_gradient(self, rhs: ScalarField, tol: float) -> Tuple[ScalarField, int]:
        rhs = rhs - self.kernel @ (self.kernel.T @ rhs)
        if not np.any(rhs):
            return np.zeros_like(rhs), 0
        diagonal = self.A.diagonal()
        jacobi = splinalg.LinearOperator(self.A.shape, matvec=lambda r: r / diagonal)
        iterations = [0]

        def count(_):
            iterations[0] += 1

        solution, info = splinalg.cg(
            self.A, rhs, rtol=tol, atol=0.0, maxiter=10 * self.vertex_count, M=jacobi, callback=count
        )
        if info != 0:
            raise SolverBreakdown(f"Conjugate gradient did not converge (info={info}, iterations={iterations[0]})")
        solution = solution - self.kernel @ (self.kernel.T @ solution)
        logger.debug("conjugate gradient converged in %d iterations", iterations[0])
        return solution, iterations[0]


def factorize(matrix: sparse.spmatrix, kernel: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Sparse LU solver for a system whose null space is spanned by ``kernel``

    The kernel is pinned by bordering, [[S, Z], [Z^T, 0]], which returns the
    solution orthogonal to Z for consistent right-hand sides.
    """
    size, extra = matrix.shape[0], kernel.shape[1]
    system = matrix.tocsc()
    if extra:
        Z = sparse.csc_matrix(kernel)
        system = sparse.bmat([[system, Z], [Z.T, None]], format="csc")
    try:
        lu = splinalg.splu(system, permc_spec="MMD_AT_PLUS_A")
    except RuntimeError as e:
        raise SolverBreakdown(f"Sparse factorization failed: {e}")

    def solve(rhs: np.ndarray) -> np.ndarray:
        if not extra:
            return lu.solve(rhs)
        return lu.solve(np.concatenate((rhs, np.zeros(extra))))[:size]

    return solve


def build_operators(cache: GeometryCache, mesh: Optional[EmbeddedMesh] = None) -> OperatorSet:
    """Assemble G, K, B = G + K and A = B^T M_w B from the cache"""
    if mesh is not None and mesh.vertex_count != cache.vertex_count:
        raise ValueError("Mesh and geometry cache disagree on the vertex count")
    n = cache.dimension
    weights = np.repeat(cache.mass, n)
    B = (sparse.diags(-1.0 / weights) @ cache.mass_jacobian.T).tocsr()
    G = (tangent_projector(cache) @ B).tocsr()
    K = (B - G).tocsr()
    A = (B.T @ sparse.diags(weights) @ B).tocsr()
    # exact symmetry, independent of the product's summation order
    A = ((A + A.T) * 0.5).tocsr()
    return OperatorSet(dimension=n, mass=cache.mass, G=G, K=K, B=B, A=A, kernel=cache.constraint_kernel)


def divergence(ops: OperatorSet, Xt: AmbientField) -> ScalarField:
    """div := -M_w^{-1} G^T M_w X, the negative adjoint of the gradient"""
    Xt = as_ambient_field(Xt, ops.vertex_count, ops.dimension)
    return -(ops.G.T @ (ops.weights * Xt.reshape(-1))) / ops.mass


def curvature_pairing(ops: OperatorSet, Xn: AmbientField) -> ScalarField:
    """Discrete <X^perp, H>: M_w^{-1} K^T M_w X^perp"""
    Xn = as_ambient_field(Xn, ops.vertex_count, ops.dimension)
    return (ops.K.T @ (ops.weights * Xn.reshape(-1))) / ops.mass


def constraint_residual(ops: OperatorSet, cache: GeometryCache, X: AmbientField) -> ScalarField:
    """c(X) = div(X^T) - <X^perp, H>; X lies in Gamma_mu iff c(X) vanishes"""
    tangential, normal = split_tangent_normal(cache, X)
    return divergence(ops, tangential) - curvature_pairing(ops, normal)


def laplacian(ops: OperatorSet, p: ScalarField) -> ScalarField:
    """Weak Laplace-Beltrami div(grad p)"""
    p = as_scalar_field(p, ops.vertex_count)
    return divergence(ops, ops.gradient(p))
