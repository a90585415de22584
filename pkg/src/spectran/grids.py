"""Uniform grids and finite-difference assembly for the 1D and 2D operators.

The 1D comparison operator and its Neumann restrictions live on Grid1D; the
full planar operator lives on a Dirichlet Grid2D.  Assembly returns a
compressed-row symmetric matrix whose symmetry has been verified exactly.
"""

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from .errors import ParameterError, ResolutionError, ResolutionWarning, ResourceError
from .model import ModelParams

BOUNDARY_CONDITIONS = ("dirichlet", "neumann")

# Hard cap on 2D unknowns.  Ten double-precision eigenvectors on a grid this
# size already cost ~160 MB, which is the most a desk-scale run should spend.
NODE_CAP_2D = 2_000_000

# A grid resolves the potential when at least eight spacings fit across the
# support half-width; in 2D the channel V(xy) narrows like 1/|y|, so the
# requirement is tightened by the largest |y| in the box.
RESOLUTION_FACTOR = 8.0


@dataclass(frozen=True)
class Grid1D:
    """Uniform nodes on [-half_width, half_width].

    Dirichlet grids store the n interior nodes (spacing 2R/(n+1)); Neumann
    grids store all n nodes including the endpoints (spacing 2R/(n-1)).
    """

    half_width: float
    n: int
    bc: str = "dirichlet"

    def __post_init__(self):
        if not (self.half_width > 0):
            raise ParameterError("half_width must be positive, got %r" % (self.half_width,))
        if self.n < 3:
            raise ParameterError("need at least 3 grid points, got %d" % self.n)
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ParameterError("bc must be one of %s, got %r" % (BOUNDARY_CONDITIONS, self.bc))

    @property
    def spacing(self) -> float:
        denom = self.n + 1 if self.bc == "dirichlet" else self.n - 1
        return 2.0 * self.half_width / denom

    @cached_property
    def nodes(self) -> np.ndarray:
        r, d = self.half_width, self.spacing
        if self.bc == "dirichlet":
            return -r + d * np.arange(1, self.n + 1)
        return -r + d * np.arange(self.n)


@dataclass(frozen=True)
class Grid2D:
    """Interior nodes of a Dirichlet box [-X, X] x [-Y, Y].

    Flattening is x-major: unknown p = i * ny + j sits at (x_i, y_j).
    """

    x_half_width: float
    y_half_width: float
    nx: int
    ny: int
    node_cap: int = NODE_CAP_2D

    def __post_init__(self):
        if not (self.x_half_width > 0 and self.y_half_width > 0):
            raise ParameterError("box half-widths must be positive")
        if self.nx < 3 or self.ny < 3:
            raise ParameterError("need at least 3 points per direction")
        if self.nx * self.ny > self.node_cap:
            raise ResourceError(
                "grid has %d unknowns, exceeding the cap of %d"
                % (self.nx * self.ny, self.node_cap)
            )

    @property
    def dim(self) -> int:
        return self.nx * self.ny

    @property
    def x_spacing(self) -> float:
        return 2.0 * self.x_half_width / (self.nx + 1)

    @property
    def y_spacing(self) -> float:
        return 2.0 * self.y_half_width / (self.ny + 1)

    @cached_property
    def x_nodes(self) -> np.ndarray:
        return -self.x_half_width + self.x_spacing * np.arange(1, self.nx + 1)

    @cached_property
    def y_nodes(self) -> np.ndarray:
        return -self.y_half_width + self.y_spacing * np.arange(1, self.ny + 1)


@dataclass(frozen=True)
class SparseSymmetricOperator:
    """Compressed-row storage of a symmetric matrix with verified symmetry."""

    dim: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    symmetry_checked: bool = False

    @classmethod
    def from_csr(cls, mat: sparse.csr_matrix) -> "SparseSymmetricOperator":
        mat = sparse.csr_matrix(mat)
        mat.sum_duplicates()
        mat.sort_indices()
        asym = (mat - mat.T).tocoo()
        if asym.nnz and np.max(np.abs(asym.data)) != 0.0:
            raise ParameterError("assembled matrix is not exactly symmetric")
        diag = mat.diagonal()
        if not np.all(np.isfinite(diag)):
            raise ParameterError("matrix diagonal contains non-finite entries")
        return cls(mat.shape[0], mat.indptr, mat.indices, mat.data, True)

    def to_csr(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=(self.dim, self.dim)
        )

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_csr() @ x

    def diagonal(self) -> np.ndarray:
        return self.to_csr().diagonal()

    def tridiagonal(self):
        """Extract (diag, offdiag) or raise if the structure is wider."""
        mat = self.to_csr()
        off = mat.diagonal(1)
        resid = mat - sparse.diags(
            [off, mat.diagonal(), off], offsets=[-1, 0, 1], format="csr"
        )
        if resid.nnz and np.max(np.abs(resid.data)) != 0.0:
            raise ParameterError("operator is not tridiagonal")
        return mat.diagonal().copy(), off.copy()


def _second_difference(n: int, spacing: float, bc: str) -> sparse.csr_matrix:
    inv2 = 1.0 / spacing**2
    main = np.full(n, 2.0 * inv2)
    off = np.full(n - 1, -inv2)
    if bc == "neumann":
        # Mirror (ghost-point) closure u_{-1} = u_1, symmetrized by the
        # half-cell similarity transform: interior diagonal everywhere and a
        # sqrt(2) coupling at the ends.  Free eigenvalues are exactly
        # (2/spacing^2)(1 - cos(j pi/(n-1))), j = 0..n-1: the constant mode
        # sits at zero and the effective interval length is exactly 2R, so
        # the eigenvalue error stays O(spacing^2).
        off[0] = -inv2 * np.sqrt(2.0)
        off[-1] = -inv2 * np.sqrt(2.0)
    return sparse.diags([off, main, off], offsets=[-1, 0, 1], format="csr")


def _check_resolution_1d(params: ModelParams, grid: Grid1D, strict: bool) -> None:
    if params.lam == 0.0:
        return
    limit = params.potential.a / RESOLUTION_FACTOR
    if grid.spacing > limit:
        msg = "spacing %.4g exceeds a/%g = %.4g; the potential is under-resolved" % (
            grid.spacing,
            RESOLUTION_FACTOR,
            limit,
        )
        if strict:
            raise ResolutionError(msg)
        warnings.warn(msg, ResolutionWarning, stacklevel=3)


def assemble_L(params: ModelParams, grid: Grid1D, strict: bool = False) -> SparseSymmetricOperator:
    """Discretize -d2/dx2 + omega^2 - lambda V(x) on the given grid.

    Neumann grids realize the restriction of the operator to the interval
    with natural boundary conditions (used for the window-scale search).
    """
    _check_resolution_1d(params, grid, strict)
    mat = _second_difference(grid.n, grid.spacing, grid.bc)
    diag = params.omega**2 - params.lam * params.potential(grid.nodes)
    mat += sparse.diags(diag, format="csr")
    return SparseSymmetricOperator.from_csr(mat)


def assemble_H(params: ModelParams, grid: Grid2D, strict: bool = False) -> SparseSymmetricOperator:
    """Discretize -Lap + omega^2 y^2 - lambda y^2 V(xy) on a Dirichlet box.

    The potential channel V(xy) has x-width a/|y|, so the x spacing should
    resolve a at the largest |y| in the box; a coarser grid warns (the
    computed spectrum degrades near the top of the box) and is rejected in
    strict mode.
    """
    if params.lam > 0.0:
        limit = params.potential.a / (RESOLUTION_FACTOR * grid.y_half_width)
        if grid.x_spacing > limit:
            msg = (
                "x spacing %.4g exceeds a/(%g*y_half_width) = %.4g; "
                "the channel is under-resolved at the top of the box"
                % (grid.x_spacing, RESOLUTION_FACTOR, limit)
            )
            if strict:
                raise ResolutionError(msg)
            warnings.warn(msg, ResolutionWarning, stacklevel=2)
    dxx = _second_difference(grid.nx, grid.x_spacing, "dirichlet")
    dyy = _second_difference(grid.ny, grid.y_spacing, "dirichlet")
    lap = sparse.kron(dxx, sparse.eye(grid.ny), format="csr") + sparse.kron(
        sparse.eye(grid.nx), dyy, format="csr"
    )
    xs, ys = np.meshgrid(grid.x_nodes, grid.y_nodes, indexing="ij")
    well = params.omega**2 * ys**2 - params.lam * ys**2 * params.potential(xs * ys)
    mat = lap + sparse.diags(well.ravel(order="C"), format="csr")
    return SparseSymmetricOperator.from_csr(mat)
