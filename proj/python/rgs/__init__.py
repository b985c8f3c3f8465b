"""Randomized Gram-Schmidt, sketching and GMRES."""

from ._rgs import (
    BreakdownError,
    DimensionError,
    Error,
    InvalidArgument,
    IoError,
    OverflowError,
    PivotError,
    RankDeficientError,
    Sketch,
    classical_factorize,
    epsilon_of,
    fwht,
    laplacian_2d as _laplacian_2d,
    loss_of_orthogonality,
    num_threads,
    omega_bar,
    random_sparse as _random_sparse,
    read_matrix_market as _read_matrix_market,
    required_sketch_dim,
    rgs_factorize,
    set_num_threads,
    synthetic_matrix,
)
from ._rgs import gmres as _gmres

__all__ = [
    "BreakdownError",
    "DimensionError",
    "Error",
    "InvalidArgument",
    "IoError",
    "OverflowError",
    "PivotError",
    "RankDeficientError",
    "Sketch",
    "classical_factorize",
    "epsilon_of",
    "fwht",
    "gmres",
    "laplacian_2d",
    "loss_of_orthogonality",
    "num_threads",
    "omega_bar",
    "random_sparse",
    "read_matrix_market",
    "required_sketch_dim",
    "rgs_factorize",
    "set_num_threads",
    "synthetic_matrix",
]


def _to_scipy(csr):
    import scipy.sparse

    indptr, indices, data, n = csr
    return scipy.sparse.csr_matrix((data, indices, indptr), shape=(n, n))


def laplacian_2d(grid):
    """5-point Laplacian on a grid x grid mesh as a scipy CSR matrix."""
    return _to_scipy(_laplacian_2d(grid))


def random_sparse(n, nnz_per_row=5, seed=1):
    """Unit diagonal plus random off-diagonal entries, as a scipy CSR matrix."""
    return _to_scipy(_random_sparse(n, nnz_per_row, seed))


def read_matrix_market(path):
    return _to_scipy(_read_matrix_market(str(path)))


def gmres(A, b, m=80, variant="rgs", k=400, seed=1, policy="f64", precond=False, tol=0.0):
    """GMRES on a square scipy sparse matrix. Returns a dict with x, the
    residual history, the true final residual and the iteration count."""
    A = A.tocsr()
    A.sort_indices()
    n = A.shape[0]
    return _gmres(A.indptr.tolist(), A.indices.tolist(), A.data.tolist(), n, b, m, variant, k,
                  seed, policy, precond, tol)
