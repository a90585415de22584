"""Eigenvalue solvers: dense tridiagonal and sparse extremal.

The dense path wraps LAPACK's tridiagonal drivers (QL/QR for values,
bisection plus inverse iteration for selected vectors).  The sparse path is
a thick-restart Lanczos iteration with full reorthogonalization, locking
eigenpairs only after an explicit residual check, so every converged pair
carries a certificate ||A v - theta v|| <= tol.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from .errors import ParameterError, SolverError
from .grids import SparseSymmetricOperator

_BREAKDOWN = 1e-12


@dataclass(frozen=True)
class SpectralResult:
    """Sorted eigenvalues with per-pair residuals and solver diagnostics.

    eigenvectors is an (n, p) column set or None; residuals has one entry
    per returned eigenpair with vectors (absolute, unit-norm vectors).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray
    iterations: int
    converged: bool


def dense_tridiagonal_eigs(diag, offdiag, vectors: int = 0, lowest: int | None = None) -> SpectralResult:
    """All eigenvalues of a symmetric tridiagonal matrix, optional vectors.

    vectors > 0 additionally computes eigenvectors of the `vectors` lowest
    pairs by inverse iteration; `lowest` restricts the returned eigenvalues
    to that many from the bottom of the spectrum (cheaper than a full
    decomposition on large grids).
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    if d.ndim != 1 or e.ndim != 1 or e.size != d.size - 1:
        raise ParameterError("need diag of length n and offdiag of length n-1")
    if vectors < 0 or vectors > d.size:
        raise ParameterError("vectors must lie in [0, n]")
    if lowest is not None and not (1 <= lowest <= d.size):
        raise ParameterError("lowest must lie in [1, n]")
    if lowest is not None and vectors > lowest:
        raise ParameterError("cannot return more vectors than eigenvalues")
    # bisection keeps high relative accuracy on the small eigenvalues of
    # stiff grids, where the default MRRR driver only bounds the absolute
    # error by eps * ||A||
    try:
        if lowest is None:
            vals = eigh_tridiagonal(d, e, eigvals_only=True, lapack_driver="stebz")
        else:
            vals = eigh_tridiagonal(
                d,
                e,
                eigvals_only=True,
                select="i",
                select_range=(0, lowest - 1),
                lapack_driver="stebz",
            )
        vecs = None
        residuals = np.empty(0)
        if vectors:
            _, vecs = eigh_tridiagonal(
                d, e, select="i", select_range=(0, vectors - 1), lapack_driver="stebz"
            )
            theta = vals[:vectors]
            av = d[:, None] * vecs
            av[:-1] += e[:, None] * vecs[1:]
            av[1:] += e[:, None] * vecs[:-1]
            residuals = np.linalg.norm(av - vecs * theta[None, :], axis=0)
    except np.linalg.LinAlgError as exc:
        raise SolverError("tridiagonal eigensolver failed: %s" % exc) from exc
    return SpectralResult(vals, vecs, residuals, 1, True)


def _csr_of(a) -> sparse.csr_matrix:
    if isinstance(a, SparseSymmetricOperator):
        return a.to_csr()
    return sparse.csr_matrix(a)


def _reorthogonalize(w: np.ndarray, blocks) -> np.ndarray:
    """Two-pass classical Gram-Schmidt of w against each column block."""
    for _ in range(2):
        for block in blocks:
            if block is not None and block.shape[1]:
                w = w - block @ (block.T @ w)
    return w


def extremal_sparse_eigs(
    a,
    count: int,
    tol: float = 1e-8,
    seed: int = 0,
    max_cycles: int = 200,
    basis_size: int | None = None,
) -> SpectralResult:
    """The `count` smallest eigenpairs of a sparse symmetric matrix.

    Thick-restart Lanczos: each cycle expands an orthonormal basis from the
    retained Ritz vectors, diagonalizes the projected arrowhead-plus-
    tridiagonal matrix, and locks Ritz pairs in ascending order once the
    explicit residual ||A v - theta v|| drops below tol.  Locked vectors are
    deflated from later cycles.  Deterministic for a fixed seed.
    """
    mat = _csr_of(a)
    n = mat.shape[0]
    if count < 1:
        raise ParameterError("count must be at least 1")
    if count >= n:
        raise ParameterError("count=%d must be smaller than the dimension %d" % (count, n))
    m = basis_size if basis_size is not None else max(120, 4 * count + 60)
    m = int(min(n - 1, max(m, count + 2)))
    rng = np.random.default_rng(seed)

    def fresh_vector(blocks):
        for _ in range(5):
            w = rng.standard_normal(n)
            w = _reorthogonalize(w, blocks)
            nw = np.linalg.norm(w)
            if nw > 1e-6 * np.sqrt(n):
                return w / nw
        return None

    locked_vals: list[float] = []
    locked_vecs: list[np.ndarray] = []
    locked_res: list[float] = []
    locked_mat = np.empty((n, 0))

    theta = np.empty(0)
    thick = np.empty((n, 0))
    coupling = np.empty(0)
    v = fresh_vector([])
    matvecs = 0

    for _cycle in range(max_cycles):
        l = theta.size
        width = min(m, n - len(locked_vals))
        if width < l + 2:
            l = max(width - 2, 0)
            theta, thick, coupling = theta[:l], thick[:, :l], coupling[:l]
        basis = np.empty((n, width), order="F")
        basis[:, :l] = thick
        basis[:, l] = v
        alphas = np.empty(width - l)
        betas = np.empty(max(width - l - 1, 0))
        k = l
        w = np.empty(n)
        truncated = False
        while True:
            w = mat @ basis[:, k]
            matvecs += 1
            alphas[k - l] = basis[:, k] @ w
            w = _reorthogonalize(w, [locked_mat, basis[:, : k + 1]])
            k += 1
            if k == width:
                break
            b = np.linalg.norm(w)
            scale = max(np.max(np.abs(alphas[: k - l])), 1.0)
            if b <= _BREAKDOWN * scale:
                repl = fresh_vector([locked_mat, basis[:, :k]])
                if repl is None:
                    truncated = True
                    break
                basis[:, k] = repl
                betas[k - 1 - l] = 0.0
            else:
                basis[:, k] = w / b
                betas[k - 1 - l] = b
        if truncated:
            width = k
            basis = basis[:, :width]
            alphas = alphas[: width - l]
            betas = betas[: max(width - l - 1, 0)]
            beta_last = 0.0
            v_next = None
        else:
            beta_last = float(np.linalg.norm(w))
            v_next = w / beta_last if beta_last > _BREAKDOWN else None

        proj = np.zeros((width, width))
        if l:
            proj[np.arange(l), np.arange(l)] = theta
            proj[:l, l] = coupling
            proj[l, :l] = coupling
        tail = np.arange(l, width)
        proj[tail, tail] = alphas
        for j, b in enumerate(betas):
            proj[l + j, l + j + 1] = b
            proj[l + j + 1, l + j] = b
        try:
            ritz_vals, s = np.linalg.eigh(proj)
        except np.linalg.LinAlgError as exc:
            raise SolverError("projected eigenproblem failed: %s" % exc) from exc
        estimates = np.abs(beta_last * s[-1, :])

        locked_this_cycle = 0
        for i in range(width):
            if len(locked_vals) >= count:
                break
            if estimates[i] > 10.0 * tol and beta_last > 0.0:
                break
            x = basis @ s[:, i]
            x /= np.linalg.norm(x)
            r = float(np.linalg.norm(mat @ x - ritz_vals[i] * x))
            matvecs += 1
            if r > tol:
                break
            locked_vals.append(float(ritz_vals[i]))
            locked_vecs.append(x)
            locked_res.append(r)
            locked_this_cycle += 1
        if locked_this_cycle:
            locked_mat = np.column_stack(locked_vecs)
        if len(locked_vals) >= count:
            break

        keep = min(count - len(locked_vals) + 15, width - locked_this_cycle, m - 2)
        sel = np.arange(locked_this_cycle, locked_this_cycle + keep)
        theta = ritz_vals[sel]
        thick = basis @ s[:, sel]
        coupling = beta_last * s[-1, sel]
        if v_next is None:
            v = fresh_vector([locked_mat, thick])
            coupling = np.zeros_like(coupling)
            if v is None:
                break
        else:
            v = _reorthogonalize(v_next, [locked_mat, thick])
            v /= np.linalg.norm(v)

    order = np.argsort(locked_vals)
    vals = np.array(locked_vals)[order]
    res = np.array(locked_res)[order]
    vecs = locked_mat[:, order] if locked_mat.shape[1] else None
    converged = len(locked_vals) >= count
    if not converged:
        # Pad the partial result with the current best Ritz data so callers
        # can inspect how far the iteration got.
        missing = count - len(locked_vals)
        extra = min(missing, theta.size)
        if extra:
            pad_vals, pad_vecs, pad_res = [], [], []
            for i in range(extra):
                x = thick[:, i] / np.linalg.norm(thick[:, i])
                pad_vals.append(float(theta[i]))
                pad_vecs.append(x)
                pad_res.append(float(np.linalg.norm(mat @ x - theta[i] * x)))
            vals = np.concatenate([vals, pad_vals])
            res = np.concatenate([res, pad_res])
            stack = [vecs] if vecs is not None else []
            vecs = np.column_stack(stack + [np.column_stack(pad_vecs)])
            order = np.argsort(vals)
            vals, res, vecs = vals[order], res[order], vecs[:, order]
        return SpectralResult(vals, vecs, res, matvecs, False)
    return SpectralResult(vals[:count], vecs[:, :count], res[:count], matvecs, True)
