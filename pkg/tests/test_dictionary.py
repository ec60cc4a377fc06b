"""Dictionary and dense Gram tests against triple-loop oracles."""

import numpy as np
import pytest

from bccblasso.arrays import make_ura, subsample_preserving_aperture
from bccblasso.dictionary import (
    DenseGram,
    UniformGrid,
    apply_adjoint,
    apply_forward,
    build_subdictionary,
    build_subsampled_dictionary,
    dense_gram,
    make_uniform_grid,
)
from bccblasso.errors import InvalidArgumentError, MemoryBudgetError


def oracle_matrix(geometry, grid1, grid2):
    """Entry-by-entry dictionary with column index l = l1 + l2 * L1."""
    m1_idx, m2_idx = geometry.occupied_coordinates()
    l1_count, l2_count = grid1.length, grid2.length
    matrix = np.zeros((geometry.element_count, l1_count * l2_count), dtype=np.complex128)
    for i in range(geometry.element_count):
        for l2 in range(l2_count):
            for l1 in range(l1_count):
                phase = m1_idx[i] * grid1.frequencies[l1] + m2_idx[i] * grid2.frequencies[l2]
                matrix[i, l1 + l2 * l1_count] = np.exp(-2j * np.pi * phase)
    return matrix


def small_dictionary(seed=0):
    geometry = subsample_preserving_aperture(make_ura(6, 4), 14, seed=seed)
    return geometry, build_subsampled_dictionary(geometry, make_uniform_grid(5), make_uniform_grid(3))


def test_uniform_grid_frequencies():
    grid = make_uniform_grid(8)
    expected = np.array([-0.5 + l / 8 for l in range(8)])
    np.testing.assert_array_equal(grid.frequencies, expected)
    assert grid.frequencies[0] == -0.5
    assert grid.frequencies[-1] < 0.5
    # identical spacing 1/L for an odd length too
    grid = make_uniform_grid(7)
    np.testing.assert_allclose(np.diff(grid.frequencies), 1 / 7, rtol=1e-15)


def test_uniform_grid_validation():
    with pytest.raises(InvalidArgumentError):
        make_uniform_grid(0)
    with pytest.raises(InvalidArgumentError):
        UniformGrid(4, np.zeros(3))
    with pytest.raises(InvalidArgumentError):
        UniformGrid(4, np.zeros(4), gamma=1.0)  # only the half-wavelength case


def test_subdictionary_matches_definition():
    grid = make_uniform_grid(6)
    matrix = build_subdictionary(4, grid)
    assert matrix.shape == (4, 6)
    for m in range(4):
        for l in range(6):
            expected = np.exp(-2j * np.pi * m * grid.frequencies[l])
            np.testing.assert_allclose(matrix[m, l], expected, rtol=1e-14)


def test_dictionary_matrix_matches_oracle():
    geometry, dictionary = small_dictionary()
    oracle = oracle_matrix(geometry, dictionary.grid1, dictionary.grid2)
    assert dictionary.matrix.shape == (14, 15)
    np.testing.assert_allclose(dictionary.matrix, oracle, rtol=1e-13, atol=1e-15)
    assert dictionary.row_count == 14
    assert dictionary.column_count == 15


def test_dictionary_matrix_is_cached():
    _, dictionary = small_dictionary()
    assert dictionary.matrix is dictionary.matrix


def test_forward_matches_oracle():
    geometry, dictionary = small_dictionary(seed=1)
    oracle = oracle_matrix(geometry, dictionary.grid1, dictionary.grid2)
    rng = np.random.default_rng(3)
    for _ in range(5):
        c = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        np.testing.assert_allclose(apply_forward(dictionary, c), oracle @ c, rtol=1e-12)


def test_adjoint_matches_oracle_and_pairing():
    geometry, dictionary = small_dictionary(seed=2)
    oracle = oracle_matrix(geometry, dictionary.grid1, dictionary.grid2)
    rng = np.random.default_rng(4)
    for _ in range(5):
        y = rng.standard_normal(14) + 1j * rng.standard_normal(14)
        c = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        np.testing.assert_allclose(apply_adjoint(dictionary, y), oracle.conj().T @ y, rtol=1e-12)
        # <D c, y> == <c, D^H y>
        lhs = np.vdot(y, apply_forward(dictionary, c))
        rhs = np.vdot(apply_adjoint(dictionary, y), c)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_apply_shape_checks():
    _, dictionary = small_dictionary()
    with pytest.raises(InvalidArgumentError):
        apply_forward(dictionary, np.zeros(7, dtype=complex))
    with pytest.raises(InvalidArgumentError):
        apply_adjoint(dictionary, np.zeros(7, dtype=complex))


def test_dense_gram_invariants():
    geometry, dictionary = small_dictionary(seed=5)
    gram = dense_gram(dictionary)
    g = gram.entries
    assert gram.size == 15
    m = geometry.element_count
    np.testing.assert_allclose(g, g.conj().T, atol=1e-12)  # Hermitian
    eigenvalues = np.linalg.eigvalsh(g)
    assert eigenvalues.min() >= -1e-10 * eigenvalues.max()  # PSD
    np.testing.assert_allclose(np.diag(g), m, atol=1e-12)  # unit-modulus columns
    assert np.abs(g).max() <= m + 1e-12
    np.testing.assert_allclose(np.trace(g).real, m * 15, rtol=1e-14)


def test_dense_gram_matches_matrix_product():
    _, dictionary = small_dictionary(seed=6)
    gram = dense_gram(dictionary)
    expected = dictionary.matrix.conj().T @ dictionary.matrix
    np.testing.assert_array_equal(gram.entries, expected)


def test_dense_gram_validation():
    with pytest.raises(InvalidArgumentError):
        DenseGram(3, np.zeros((3, 4), dtype=complex))


def test_memory_budget_enforced():
    geometry = make_ura(6, 4)
    grid = make_uniform_grid(16)
    # 24 x 256 complex dictionary = 98304 bytes
    with pytest.raises(MemoryBudgetError) as info:
        build_subsampled_dictionary(geometry, grid, grid, memory_budget_bytes=90_000)
    assert info.value.required_bytes == 24 * 256 * 16
    assert info.value.budget_bytes == 90_000

    # dictionary fits but the 256 x 256 Gram does not
    dictionary = build_subsampled_dictionary(geometry, grid, grid, memory_budget_bytes=200_000)
    with pytest.raises(MemoryBudgetError) as info:
        dense_gram(dictionary)
    assert info.value.required_bytes == 256 * 256 * 16
