"""CSR sparse matrices compressed with a segment-parallel tANS coder.

The heavy lifting lives in the compiled ``_core`` module; this package adds
small conveniences for scipy sparse matrices.
"""

import numpy as np

from ._core import (
    Container,
    ContainerError,
    MatrixMarketError,
    encode_csr,
    entropy,
    index_entropy_ratio,
    read_mtx,
)
from ._core import gen_graph as _gen_graph

__all__ = [
    "Container",
    "ContainerError",
    "MatrixMarketError",
    "encode",
    "encode_csr",
    "decode",
    "entropy",
    "gen_graph",
    "index_entropy_ratio",
    "read_mtx",
]


def _as_csr(matrix):
    if hasattr(matrix, "tocsr"):
        csr = matrix.tocsr()
        csr.sum_duplicates()
        csr.sort_indices()
        return csr
    raise TypeError("expected a scipy sparse matrix")


def encode(matrix, precision=None, **options):
    """Compress a scipy sparse matrix. Precision follows the dtype unless given."""
    csr = _as_csr(matrix)
    if precision is None:
        precision = 32 if csr.dtype == np.float32 else 64
    rows, cols = csr.shape
    return encode_csr(
        rows,
        cols,
        csr.indptr.astype(np.int64),
        csr.indices.astype(np.int64),
        csr.data,
        precision=precision,
        **options,
    )


def decode(container, threads=1):
    """Rebuild a scipy.sparse.csr_matrix from a container."""
    from scipy.sparse import csr_matrix

    indptr, indices, data = container.decode(threads)
    return csr_matrix((data, indices, indptr), shape=(container.rows, container.cols))


def gen_graph(model, nodes, degree, seed=0, rewire=0.1):
    """Random graph adjacency pattern as a scipy.sparse.csr_matrix."""
    from scipy.sparse import csr_matrix

    rows, cols, (indptr, indices, data) = _gen_graph(model, nodes, degree, seed, rewire)
    return csr_matrix((data, indices, indptr), shape=(rows, cols))
