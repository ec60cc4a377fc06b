"""Block-circulant-with-circulant-blocks (BCCB) operators via the 2D FFT.

A BCCB matrix of size ``L = L1 * L2`` (circulant L1 x L1 blocks arranged
in an L2 x L2 block-circulant pattern) is fully characterized by its
first column ``r``.  Its eigenvalues are the unnormalized forward 2D DFT
of ``r`` reshaped to ``L1 x L2`` first-dimension-fastest, and a
matrix-vector product costs two 2D FFTs plus a Hadamard product instead
of an ``O(L^2)`` dense multiply.

Vectors of length ``L`` use the index convention ``l = l1 + l2 * L1``
throughout, matching the dictionary column order.
"""

from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry
from .errors import InvalidArgumentError, MemoryBudgetError, SingularOperatorError

DENSE_CAP = 4096
SINGULAR_GUARD = 1e-12
COMPLEX_BYTES = 16


@dataclass(frozen=True, slots=True, eq=False)
class FirstColumn:
    """The characterizing first column of a BCCB matrix."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size < 1:
            raise InvalidArgumentError("first column must be a nonempty 1D vector")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _column_values(col) -> np.ndarray:
    """Accept a FirstColumn or a plain 1D array-like."""
    if isinstance(col, FirstColumn):
        return col.values
    values = np.ascontiguousarray(col, dtype=np.complex128)
    if values.ndim != 1:
        raise InvalidArgumentError("first column must be a 1D vector")
    return values


@dataclass(frozen=True, slots=True, eq=False)
class BccbOperator:
    """A BCCB matrix stored implicitly as its ``L1 x L2`` eigenvalue matrix."""

    l1: int
    l2: int
    eigenvalues: np.ndarray
    # Contiguous transposed copy, cached so matvecs reshape without copying.
    _eig_t: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.l1 < 1 or self.l2 < 1:
            raise InvalidArgumentError("block sizes must be positive")
        eigenvalues = np.asarray(self.eigenvalues, dtype=np.complex128)
        if eigenvalues.shape != (self.l1, self.l2):
            raise InvalidArgumentError(
                f"eigenvalue matrix shape {eigenvalues.shape} does not match "
                f"({self.l1}, {self.l2})"
            )
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "_eig_t", np.ascontiguousarray(eigenvalues.T))

    @property
    def dimension(self) -> int:
        return self.l1 * self.l2


def gram_first_column(geometry: ArrayGeometry, l1: int, l2: int) -> FirstColumn:
    """First column of the dictionary Gram ``D_s^H D_s`` on uniform grids.

    Entry ``l1' + l2' * L1`` equals the closed-form phase sum
    ``sum_(m1,m2) exp(+j 2 pi (m1 l1' / L1 + m2 l2' / L2))`` over the
    occupied elements, computed in ``O(M L)`` without forming the Gram.
    """
    if l1 < 1 or l2 < 1:
        raise InvalidArgumentError("grid lengths must be positive")
    m1_idx, m2_idx = geometry.occupied_coordinates()
    phases1 = np.exp(2j * np.pi * np.outer(np.arange(l1), m1_idx) / l1)
    phases2 = np.exp(2j * np.pi * np.outer(np.arange(l2), m2_idx) / l2)
    table = phases1 @ phases2.T
    return FirstColumn(table.ravel(order="F"))


def bccb_from_first_column(col, l1: int, l2: int) -> BccbOperator:
    """Build the operator whose dense form has first column ``col``.

    The eigenvalues are the unnormalized forward 2D DFT of the column
    reshaped to ``L1 x L2`` (first dimension fastest).
    """
    values = _column_values(col)
    if values.size != l1 * l2:
        raise InvalidArgumentError(
            f"first column length {values.size} does not match L1*L2 = {l1 * l2}"
        )
    eigenvalues_t = np.fft.fft2(values.reshape(l2, l1))
    return BccbOperator(l1, l2, eigenvalues_t.T)


def gram_operator(geometry: ArrayGeometry, l1: int, l2: int) -> BccbOperator:
    """Convenience: the Gram of ``geometry`` on uniform grids as a BccbOperator."""
    return bccb_from_first_column(gram_first_column(geometry, l1, l2), l1, l2)


def bccb_matvec(op: BccbOperator, c: np.ndarray) -> np.ndarray:
    """Apply the operator: 2D FFT, Hadamard with the eigenvalues, 2D IFFT."""
    c = np.asarray(c)
    if c.shape != (op.dimension,):
        raise InvalidArgumentError(
            f"vector length {c.shape} does not match L = {op.dimension}"
        )
    # reshape(l2, l1) views the l1-fastest vector as the transposed L1 x L2
    # matrix; the 2D DFT commutes with transposition, so the Hadamard
    # product uses the cached transposed eigenvalues.
    spectrum = np.fft.fft2(c.reshape(op.l2, op.l1))
    spectrum *= op._eig_t
    return np.fft.ifft2(spectrum).ravel()


def bccb_scale_add_identity(op: BccbOperator, alpha: complex, beta: complex) -> BccbOperator:
    """Return the operator ``alpha * R + beta * I`` (eigenvalue shift)."""
    return BccbOperator(op.l1, op.l2, alpha * op.eigenvalues + beta)


def bccb_inverse(op: BccbOperator) -> BccbOperator:
    """Invert the operator entrywise on its eigenvalues.

    Raises
    ------
    SingularOperatorError
        If ``min |eigenvalue|`` falls at or below the relative guard
        ``1e-12 * max |eigenvalue|``.
    """
    magnitudes = np.abs(op.eigenvalues)
    max_magnitude = float(magnitudes.max())
    threshold = SINGULAR_GUARD * max_magnitude
    min_magnitude = float(magnitudes.min())
    if min_magnitude <= threshold:
        raise SingularOperatorError(min_magnitude, threshold)
    return BccbOperator(op.l1, op.l2, 1.0 / op.eigenvalues)


def bccb_first_column(op: BccbOperator) -> FirstColumn:
    """Recover the characterizing first column by inverse 2D DFT."""
    return FirstColumn(np.fft.ifft2(op._eig_t).ravel())


def _dense_from_first_column(values: np.ndarray, l1: int, l2: int) -> np.ndarray:
    """Expand a first column into the dense BCCB matrix by index arithmetic."""
    table = values.reshape(l2, l1).T
    d1 = (np.arange(l1)[:, None] - np.arange(l1)[None, :]) % l1
    d2 = (np.arange(l2)[:, None] - np.arange(l2)[None, :]) % l2
    dense4 = table[d1[None, :, None, :], d2[:, None, :, None]]
    return dense4.reshape(l1 * l2, l1 * l2)


def bccb_to_dense(op: BccbOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Reconstruct the dense ``L x L`` matrix (test/diagnostic use).

    Raises
    ------
    MemoryBudgetError
        If ``L`` exceeds ``cap`` (default 4096).
    """
    size = op.dimension
    if size > cap:
        raise MemoryBudgetError(
            size * size * COMPLEX_BYTES, cap * cap * COMPLEX_BYTES, "dense BCCB reconstruction"
        )
    return _dense_from_first_column(bccb_first_column(op).values, op.l1, op.l2)


def is_bccb(dense: np.ndarray, l1: int, l2: int, tol: float) -> tuple[bool, float]:
    """Check whether a dense matrix is BCCB within ``tol``.

    Entry ``(i, j)`` of a BCCB matrix depends only on
    ``((i1 - j1) mod L1, (i2 - j2) mod L2)``; each equivalence class is
    represented in the first column, so the deviation is measured
    against the expansion of that column.

    Returns
    -------
    (bool, float)
        Whether the maximum absolute deviation is within ``tol``, and
        the deviation itself.
    """
    dense = np.asarray(dense)
    size = l1 * l2
    if dense.shape != (size, size):
        raise InvalidArgumentError(
            f"matrix shape {dense.shape} does not match ({size}, {size})"
        )
    expected = _dense_from_first_column(
        np.ascontiguousarray(dense[:, 0], dtype=np.complex128), l1, l2
    )
    deviation = float(np.max(np.abs(dense - expected)))
    return deviation <= tol, deviation
