"""Bilinear finite elements on a structured rectangle.

The rectangle [0, lx] x [0, ly] is cut into nx x ny square cells.
Nodes are numbered row by row, node (i, j) having index
j * (nx + 1) + i.  Vector fields are stored as flat arrays with
interleaved components: the degrees of freedom of node n are 2n
(x component) and 2n + 1 (y component).

Every cell carries 2x2 Gauss points; quadrature point q of cell c
has index 4c + q.  Scalar fields at quadrature points have shape
(n_quad,), tensor fields have shape (n_quad, 6) and are embedded in
3D under plane strain: the zz, xz and yz strains vanish.

Assembly follows the usual pattern of evaluating one reference
element matrix (all cells are congruent) and scattering it through
a COO matrix.

"""
from typing import (  # noqa: F401
    Callable,
    List,
    Optional,
    Tuple,
)

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .config import get_logger
from .errors import (
    ConvergenceError,
    InvalidValueError,
)
from .tensors import (
    ElasticityTensor,
    METRIC,
)


logger = get_logger()

_GAUSS = 1.0 / np.sqrt(3.0)

# Reference coordinates of the local nodes, counter-clockwise from
# the lower-left corner.
_NODE_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_NODE_ETA = np.array([-1.0, -1.0, 1.0, 1.0])

# Reference coordinates of the Gauss points, same ordering.
_QUAD_XI = _GAUSS * _NODE_XI
_QUAD_ETA = _GAUSS * _NODE_ETA

# The two-point rule on an edge [0, h], as fractions of h.
_EDGE_POINTS = np.array([0.5 - 0.5 * _GAUSS, 0.5 + 0.5 * _GAUSS])


class Grid(object):
    """A structured grid of square Q1 cells."""

    def __init__(self, nx, ny, lx=1.0, ly=1.0):
        # type: (int, int, float, float) -> None
        """Create a new grid.

        Args:
            nx: The number of cells along x.
            ny: The number of cells along y.
            lx: The extent of the domain along x.
            ly: The extent of the domain along y.

        Raises:
            InvalidValueError: If there are fewer than two cells per
                axis, or the cells are not square.

        """
        if int(nx) != nx or nx < 2:
            raise InvalidValueError('grid.nx', nx, 'an integer >= 2')
        if int(ny) != ny or ny < 2:
            raise InvalidValueError('grid.ny', ny, 'an integer >= 2')
        if not (lx > 0 and ly > 0):
            raise InvalidValueError(
                'grid.lx/grid.ly', (lx, ly), 'positive extents',
            )
        if abs(lx / nx - ly / ny) > 1e-12 * max(lx / nx, ly / ny):
            raise InvalidValueError(
                'grid.ly', ly, 'square cells, i.e. ly / ny == lx / nx',
            )
        self.nx = int(nx)
        self.ny = int(ny)
        self.lx = float(lx)
        self.ly = float(ly)
        self.h = self.lx / self.nx

        self.n_nodes = (self.nx + 1) * (self.ny + 1)
        self.n_cells = self.nx * self.ny
        self.n_quad = 4 * self.n_cells
        self.n_dofs = 2 * self.n_nodes
        self.area = self.lx * self.ly

        ii, jj = np.meshgrid(
            np.arange(self.nx + 1), np.arange(self.ny + 1), indexing='xy',
        )
        self.node_coordinates = np.stack(
            [ii.ravel() * self.h, jj.ravel() * self.h], axis=-1,
        )

        ci, cj = np.meshgrid(
            np.arange(self.nx), np.arange(self.ny), indexing='xy',
        )
        lower_left = (cj.ravel() * (self.nx + 1) + ci.ravel())
        self.cell_nodes = np.stack([
            lower_left,
            lower_left + 1,
            lower_left + self.nx + 2,
            lower_left + self.nx + 1,
        ], axis=-1)
        self.cell_dofs = np.empty((self.n_cells, 8), dtype=int)
        self.cell_dofs[:, 0::2] = 2 * self.cell_nodes
        self.cell_dofs[:, 1::2] = 2 * self.cell_nodes + 1

        # Shape functions and their physical gradients at the Gauss
        # points, identical for every cell: [q, a] and [q, a, d].
        self.shape_values = 0.25 * (
            (1.0 + np.outer(_QUAD_XI, _NODE_XI))
            * (1.0 + np.outer(_QUAD_ETA, _NODE_ETA))
        )
        scale = 2.0 / self.h
        dxi = 0.25 * _NODE_XI[None, :] * (
            1.0 + np.outer(_QUAD_ETA, _NODE_ETA))
        deta = 0.25 * _NODE_ETA[None, :] * (
            1.0 + np.outer(_QUAD_XI, _NODE_XI))
        self.shape_gradients = scale * np.stack([dxi, deta], axis=-1)
        self.quad_weight = 0.25 * self.h * self.h
        self.quad_weights = np.full(self.n_quad, self.quad_weight)

        origins = self.node_coordinates[lower_left]
        offsets = np.stack([
            0.5 * self.h * (1.0 + _QUAD_XI),
            0.5 * self.h * (1.0 + _QUAD_ETA),
        ], axis=-1)
        self.quad_points = (
            origins[:, None, :] + offsets[None, :, :]
        ).reshape(self.n_quad, 2)

        x, y = self.node_coordinates[:, 0], self.node_coordinates[:, 1]
        tolerance = 1e-9 * self.h
        self.boundary_mask = (
            (x < tolerance) | (y < tolerance)
            | (x > self.lx - tolerance) | (y > self.ly - tolerance)
        )
        self.dirichlet_mask = np.repeat(self.boundary_mask, 2)

        self.strain_matrix = self._strain_matrix()

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and (self.nx, self.ny, self.lx, self.ly)
            == (other.nx, other.ny, other.lx, other.ly)
        )

    def __hash__(self):
        return hash((self.nx, self.ny, self.lx, self.ly))

    def __repr__(self):
        return 'Grid(nx={}, ny={}, lx={}, ly={})'.format(
            self.nx, self.ny, self.lx, self.ly,
        )

    def _strain_matrix(self):
        # type: () -> np.ndarray
        """The map from local dofs to strain components, [q, c, d]."""
        B = np.zeros((4, 6, 8))
        dx = self.shape_gradients[:, :, 0]
        dy = self.shape_gradients[:, :, 1]
        B[:, 0, 0::2] = dx
        B[:, 1, 1::2] = dy
        B[:, 3, 0::2] = 0.5 * dy
        B[:, 3, 1::2] = 0.5 * dx
        return B

    def boundary_edges(self):
        # type: () -> np.ndarray
        """Pairs of node indices spanning the boundary edges."""
        edges = []  # type: List[Tuple[int, int]]
        row = self.nx + 1
        for i in range(self.nx):
            edges.append((i, i + 1))
            top = self.ny * row + i
            edges.append((top, top + 1))
        for j in range(self.ny):
            edges.append((j * row, (j + 1) * row))
            right = j * row + self.nx
            edges.append((right, right + row))
        return np.array(edges, dtype=int)

    @property
    def boundary_length(self):
        # type: () -> float
        return 2.0 * (self.lx + self.ly)

    def interpolate(self, nodal):
        # type: (np.ndarray) -> np.ndarray
        """Evaluate a nodal scalar field at the quadrature points."""
        values = np.asarray(nodal, dtype=float)[self.cell_nodes]
        return np.einsum('qa,ea->eq', self.shape_values, values).ravel()

    def gradient(self, nodal):
        # type: (np.ndarray) -> np.ndarray
        """The gradient of a nodal scalar field, shape (n_quad, 2)."""
        values = np.asarray(nodal, dtype=float)[self.cell_nodes]
        return np.einsum(
            'qad,ea->eqd', self.shape_gradients, values,
        ).reshape(self.n_quad, 2)

    def interpolate_vector(self, u):
        # type: (np.ndarray) -> np.ndarray
        """Evaluate a flat vector field at the quadrature points."""
        nodal = np.asarray(u, dtype=float).reshape(self.n_nodes, 2)
        return np.stack([
            self.interpolate(nodal[:, 0]),
            self.interpolate(nodal[:, 1]),
        ], axis=-1)

    def integrate(self, values):
        # type: (np.ndarray) -> float
        """Integrate quadrature-point values over the domain."""
        return float(np.sum(self.quad_weights * values))

    def nodal(self, function):
        # type: (Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray
        """Sample function(x, y) at the nodes."""
        x, y = self.node_coordinates[:, 0], self.node_coordinates[:, 1]
        return np.asarray(function(x, y), dtype=float) * np.ones_like(x)

    def at_quadrature(self, function):
        # type: (Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray
        """Sample function(x, y) at the quadrature points."""
        x, y = self.quad_points[:, 0], self.quad_points[:, 1]
        return np.asarray(function(x, y), dtype=float) * np.ones_like(x)

    def scatter(self, element_matrix, indices, size):
        # type: (np.ndarray, np.ndarray, int) -> sp.csr_matrix
        element_matrix = 0.5 * (element_matrix + element_matrix.T)
        local = element_matrix.shape[0]
        rows = np.repeat(indices, local, axis=1).ravel()
        cols = np.tile(indices, (1, local)).ravel()
        data = np.tile(element_matrix.ravel(), indices.shape[0])
        return sp.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()


class LinearOperator(object):
    """A sparse symmetric matrix with an optional Dirichlet mask.

    `galerkin` is the plain Galerkin matrix.  `matrix` has the rows
    and columns of the masked dofs eliminated and a unit diagonal put
    in their place, which keeps it symmetric and, for the elasticity
    operator, positive definite.

    """

    def __init__(self, galerkin, dirichlet_mask=None):
        # type: (sp.spmatrix, Optional[np.ndarray]) -> None
        self.galerkin = sp.csr_matrix(galerkin)
        size = self.galerkin.shape[0]
        if dirichlet_mask is None:
            dirichlet_mask = np.zeros(size, dtype=bool)
        self.dirichlet_mask = np.asarray(dirichlet_mask, dtype=bool)
        if self.dirichlet_mask.any():
            free = sp.diags((~self.dirichlet_mask).astype(float))
            fixed = sp.diags(self.dirichlet_mask.astype(float))
            self.matrix = (free @ self.galerkin @ free + fixed).tocsr()
        else:
            self.matrix = self.galerkin

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x):
        # type: (np.ndarray) -> np.ndarray
        return self.matrix @ x

    def quadratic_form(self, x):
        # type: (np.ndarray) -> float
        return float(x @ (self.matrix @ x))

    def constrain(self, b):
        # type: (np.ndarray) -> np.ndarray
        """Zero the entries of a load vector on masked dofs."""
        b = np.array(b, dtype=float)
        b[self.dirichlet_mask] = 0.0
        return b

    def combine(self, alpha, other=None, beta=0.0):
        # type: (float, Optional[LinearOperator], float) -> LinearOperator
        """Form alpha * self + beta * other on the Galerkin level.

        Args:
            alpha: The factor on this operator.
            other: Another operator of the same shape, if any.
            beta: The factor on the other operator.

        Returns:
            A new operator, masked like this one.

        """
        galerkin = alpha * self.galerkin
        if other is not None:
            galerkin = galerkin + beta * other.galerkin
        return LinearOperator(galerkin, self.dirichlet_mask)

    def asymmetry(self):
        # type: () -> float
        difference = abs(self.matrix - self.matrix.T)
        return float(difference.max()) if difference.nnz else 0.0


def assemble_elasticity(grid, D):
    # type: (Grid, ElasticityTensor) -> LinearOperator
    """Assemble the bilinear form of D eps(v) : eps(w), u = 0 on the boundary.

    Args:
        grid: The grid.
        D: The elasticity tensor.

    Returns:
        The operator with every boundary dof eliminated.

    """
    metric_D = METRIC[:, None] * D.matrix()
    B = grid.strain_matrix
    element = grid.quad_weight * np.einsum('qci,cd,qdj->ij', B, metric_D, B)
    galerkin = grid.scatter(element, grid.cell_dofs, grid.n_dofs)
    return LinearOperator(galerkin, grid.dirichlet_mask)


def assemble_laplacian_neumann(grid):
    # type: (Grid) -> LinearOperator
    G = grid.shape_gradients
    element = grid.quad_weight * np.einsum('qad,qbd->ab', G, G)
    return LinearOperator(
        grid.scatter(element, grid.cell_nodes, grid.n_nodes),
    )


def assemble_mass(grid):
    # type: (Grid) -> LinearOperator
    N = grid.shape_values
    element = grid.quad_weight * np.einsum('qa,qb->ab', N, N)
    return LinearOperator(
        grid.scatter(element, grid.cell_nodes, grid.n_nodes),
    )


def assemble_vector_mass(grid):
    # type: (Grid) -> LinearOperator
    """The mass matrix of vector fields, for L2 norms of displacements."""
    return LinearOperator(
        sp.kron(assemble_mass(grid).galerkin, sp.identity(2)).tocsr(),
    )


def assemble_boundary_mass(grid):
    # type: (Grid) -> sp.csr_matrix
    """The mass matrix of the boundary trace, two-point rule per edge.

    Args:
        grid: The grid.

    Returns:
        A (n_nodes, n_nodes) matrix B with g^T B g equal to the
        integral of g squared over the boundary, for g linear
        along each edge.

    """
    edges = grid.boundary_edges()
    values = np.stack([1.0 - _EDGE_POINTS, _EDGE_POINTS], axis=-1)
    element = 0.5 * grid.h * np.einsum('pa,pb->ab', values, values)
    return grid.scatter(element, edges, grid.n_nodes)


def solve_spd(A, b, tol=1e-10, maxit=None, jacobi=False, x0=None,
              context=''):
    # type: (LinearOperator, np.ndarray, float, Optional[int], bool, Optional[np.ndarray], str) -> np.ndarray  # noqa: E501
    """Solve A x = b by the conjugate-gradient method.

    Args:
        A: A symmetric operator, positive definite on its free dofs.
        b: The right-hand side.  Entries on masked dofs are ignored.
        tol: The relative residual to reach, |A x - b| <= tol * |b|.
        maxit: The iteration limit.  Defaults to ten times the size.
        jacobi: Whether to precondition with the diagonal of A.
        x0: An initial guess.
        context: A description of the solve, for error messages.

    Raises:
        ConvergenceError: If the tolerance was not reached within
            the iteration limit.  Carries the final residual.

    Returns:
        The solution, zero on masked dofs.

    """
    b = A.constrain(b)
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros_like(b)
    if maxit is None:
        maxit = 10 * b.size
    preconditioner = None
    if jacobi:
        preconditioner = sp.diags(1.0 / A.matrix.diagonal())
    iterations = [0]

    def _count(_):
        iterations[0] += 1

    if x0 is not None:
        x0 = A.constrain(x0)
    x, info = cg(
        A.matrix,
        b,
        x0=x0,
        rtol=tol,
        atol=0.0,
        maxiter=maxit,
        M=preconditioner,
        callback=_count,
    )
    residual = float(np.linalg.norm(A.matrix @ x - b) / b_norm)
    if info != 0:
        raise ConvergenceError(iterations[0], residual, tol, context)
    logger.debug('cg%s: %d iterations, residual %.3e',
                 ' (' + context + ')' if context else '',
                 iterations[0], residual)
    return x


def strain(grid, u):
    # type: (Grid, np.ndarray) -> np.ndarray
    """The symmetric gradient of a displacement at the quadrature points.

    Args:
        grid: The grid.
        u: A flat displacement vector of length 2 * n_nodes.

    Returns:
        Strains of shape (n_quad, 6), plane strain embedding.

    """
    local = np.asarray(u, dtype=float)[grid.cell_dofs]
    return np.einsum(
        'qcd,ed->eqc', grid.strain_matrix, local,
    ).reshape(grid.n_quad, 6)


def divergence(grid, u):
    # type: (Grid, np.ndarray) -> np.ndarray
    eps = strain(grid, u)
    return eps[:, 0] + eps[:, 1]


def _gather(local_values, indices, size):
    # type: (np.ndarray, np.ndarray, int) -> np.ndarray
    return np.bincount(
        indices.ravel(), weights=local_values.ravel(), minlength=size,
    )


def divergence_scalar_weighted_load(grid, s):
    # type: (Grid, np.ndarray) -> np.ndarray
    """Assemble the load of s * div(v) against vector test functions.

    Args:
        grid: The grid.
        s: Scalar values at the quadrature points.

    Returns:
        A flat load vector of length 2 * n_nodes.

    """
    s = np.asarray(s, dtype=float).reshape(grid.n_cells, 4)
    trace_rows = grid.strain_matrix[:, 0, :] + grid.strain_matrix[:, 1, :]
    local = grid.quad_weight * np.einsum('eq,qd->ed', s, trace_rows)
    return _gather(local, grid.cell_dofs, grid.n_dofs)


def tensor_weighted_load(grid, tau):
    # type: (Grid, np.ndarray) -> np.ndarray
    """Assemble the load of tau : eps(v) against vector test functions."""
    tau = np.asarray(tau, dtype=float).reshape(grid.n_cells, 4, 6)
    local = grid.quad_weight * np.einsum(
        'eqc,c,qcd->ed', tau, METRIC, grid.strain_matrix,
    )
    return _gather(local, grid.cell_dofs, grid.n_dofs)


def body_force_load(grid, F):
    # type: (Grid, np.ndarray) -> np.ndarray
    """Assemble the load of F . v from forces of shape (n_quad, 2)."""
    F = np.asarray(F, dtype=float).reshape(grid.n_cells, 4, 2)
    local = grid.quad_weight * np.einsum(
        'eqk,qa->eak', F, grid.shape_values,
    ).reshape(grid.n_cells, 8)
    return _gather(local, grid.cell_dofs, grid.n_dofs)


def scalar_source_load(grid, s):
    # type: (Grid, np.ndarray) -> np.ndarray
    """Assemble the load of s * v from quadrature values s."""
    s = np.asarray(s, dtype=float).reshape(grid.n_cells, 4)
    local = grid.quad_weight * np.einsum('eq,qa->ea', s, grid.shape_values)
    return _gather(local, grid.cell_nodes, grid.n_nodes)
