"""Uniform harmonic grids and the row-subsampled steering dictionary.

The dictionary columns are 2D steering vectors evaluated on the
Cartesian product of two uniform grids; column ``l1 + l2 * L1`` holds
the tuple ``(f1[l1], f2[l2])``.  Rows follow the occupancy scan order
(m2 outer, m1 inner).  The explicit matrix is materialized lazily under
a configurable memory budget.
"""

from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry
from .errors import InvalidArgumentError, MemoryBudgetError

DEFAULT_MEMORY_BUDGET_BYTES = 8 << 30
COMPLEX_BYTES = 16


@dataclass(frozen=True, slots=True, eq=False)
class UniformGrid:
    """``length`` harmonic grid points ``f[l] = -1/2 + l / length``."""

    length: int
    frequencies: np.ndarray
    gamma: float = 0.5

    def __post_init__(self) -> None:
        if self.length < 1:
            raise InvalidArgumentError("grid length must be positive")
        if self.gamma != 0.5:
            raise InvalidArgumentError("only half-wavelength spacing (gamma = 1/2) is supported")
        frequencies = np.ascontiguousarray(self.frequencies, dtype=np.float64)
        if frequencies.shape != (self.length,):
            raise InvalidArgumentError("frequency vector length does not match the grid length")
        frequencies.setflags(write=False)
        object.__setattr__(self, "frequencies", frequencies)


def make_uniform_grid(length: int) -> UniformGrid:
    """Build the uniform grid ``f[l] = -1/2 + l / length`` on ``[-1/2, 1/2)``."""
    if length < 1:
        raise InvalidArgumentError("grid length must be positive")
    return UniformGrid(length, -0.5 + np.arange(length) / length)


def build_subdictionary(m_count: int, grid: UniformGrid) -> np.ndarray:
    """Return the ``m_count x grid.length`` matrix of 1D steering columns.

    Entry ``(m, l)`` equals ``exp(-j 2 pi f[l] m)``.
    """
    if m_count < 1:
        raise InvalidArgumentError("subdictionary row count must be positive")
    return np.exp(-2j * np.pi * np.outer(np.arange(m_count), grid.frequencies))


@dataclass(frozen=True, slots=True, eq=False)
class SubsampledDictionary:
    """Steering dictionary restricted to the occupied rows of a geometry.

    The ``M x L1 L2`` matrix has entry
    ``exp(-j 2 pi (m1 f1[l1] + m2 f2[l2]))`` at row ``(m1, m2)`` and
    column ``l1 + l2 * L1``.  It is built on first access to
    :attr:`matrix` and cached.
    """

    geometry: ArrayGeometry
    grid1: UniformGrid
    grid2: UniformGrid
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES
    _matrix: np.ndarray | None = field(default=None, init=False, repr=False)

    @property
    def row_count(self) -> int:
        return self.geometry.element_count

    @property
    def column_count(self) -> int:
        return self.grid1.length * self.grid2.length

    @property
    def matrix(self) -> np.ndarray:
        """The explicit row-subsampled dictionary, materialized lazily."""
        if self._matrix is None:
            required = self.row_count * self.column_count * COMPLEX_BYTES
            if required > self.memory_budget_bytes:
                raise MemoryBudgetError(required, self.memory_budget_bytes, "dictionary matrix")
            m1_idx, m2_idx = self.geometry.occupied_coordinates()
            rows1 = np.exp(-2j * np.pi * np.outer(m1_idx, self.grid1.frequencies))
            rows2 = np.exp(-2j * np.pi * np.outer(m2_idx, self.grid2.frequencies))
            matrix = (rows2[:, :, None] * rows1[:, None, :]).reshape(
                self.row_count, self.column_count
            )
            matrix.setflags(write=False)
            object.__setattr__(self, "_matrix", matrix)
        return self._matrix


def build_subsampled_dictionary(
    geometry: ArrayGeometry,
    grid1: UniformGrid,
    grid2: UniformGrid,
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES,
) -> SubsampledDictionary:
    """Build the lazy dictionary for ``geometry`` over two uniform grids.

    Raises
    ------
    MemoryBudgetError
        If the explicit ``M x L`` matrix would exceed the budget.
    """
    required = geometry.element_count * grid1.length * grid2.length * COMPLEX_BYTES
    if required > memory_budget_bytes:
        raise MemoryBudgetError(required, memory_budget_bytes, "dictionary matrix")
    return SubsampledDictionary(geometry, grid1, grid2, memory_budget_bytes)


def apply_forward(dictionary: SubsampledDictionary, c: np.ndarray) -> np.ndarray:
    """Compute ``D_s c`` (length-M output)."""
    c = np.asarray(c)
    if c.shape != (dictionary.column_count,):
        raise InvalidArgumentError(
            f"coefficient length {c.shape} does not match L = {dictionary.column_count}"
        )
    return dictionary.matrix @ c


def apply_adjoint(dictionary: SubsampledDictionary, y: np.ndarray) -> np.ndarray:
    """Compute ``D_s^H y`` (length-L output)."""
    y = np.asarray(y)
    if y.shape != (dictionary.row_count,):
        raise InvalidArgumentError(
            f"measurement length {y.shape} does not match M = {dictionary.row_count}"
        )
    return dictionary.matrix.conj().T @ y


@dataclass(frozen=True, slots=True, eq=False)
class DenseGram:
    """Explicit ``L x L`` Gram matrix ``D_s^H D_s`` for the dense baseline."""

    size: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries)
        if entries.shape != (self.size, self.size):
            raise InvalidArgumentError(
                f"gram shape {entries.shape} does not match size {self.size}"
            )
        object.__setattr__(self, "entries", entries)


def dense_gram(dictionary: SubsampledDictionary) -> DenseGram:
    """Materialize ``D_s^H D_s``.

    Raises
    ------
    MemoryBudgetError
        If the ``L x L`` product would exceed the dictionary's budget.
    """
    size = dictionary.column_count
    required = size * size * COMPLEX_BYTES
    if required > dictionary.memory_budget_bytes:
        raise MemoryBudgetError(required, dictionary.memory_budget_bytes, "dense Gram matrix")
    matrix = dictionary.matrix
    return DenseGram(size, matrix.conj().T @ matrix)
