"""LASSO solvers with interchangeable dense and FFT backends.

ISTA, FISTA, and ADMM minimize ``||y - D_s c||_2^2 + tau ||c||_1``
using only the Gram operator ``G = D_s^H D_s`` and the adjoint
right-hand side ``b = D_s^H y``.  The "regular" backend applies a dense
Gram (``O(L^2)`` per iteration); the "fast" backend applies a
:class:`~bccblasso.bccb.BccbOperator` (``O(L log L)`` per iteration).
Timing covers the iteration loop only; precomputation is reported
separately.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .bccb import BccbOperator, bccb_inverse, bccb_matvec, bccb_scale_add_identity
from .dictionary import DenseGram, SubsampledDictionary, UniformGrid, apply_forward
from .errors import ConvergenceError, DivergenceError, InvalidArgumentError

BACKEND_REGULAR = "regular"
BACKEND_FAST = "fast"
STEP_SIZE_INFLATION = 1e-6
POWER_TOL = 1e-10
POWER_MAX_ITER = 5000
POWER_SEED = 0


@dataclass(frozen=True, slots=True, eq=False)
class LassoProblem:
    """Data defining one LASSO instance.

    Parameters
    ----------
    gram : DenseGram or BccbOperator
        Linear-operator handle computing ``G c``.
    adjoint_rhs : ndarray
        ``b = D_s^H y`` of length L.
    tau : float
        Positive sparsity weight.
    y_norm_sq : float, optional
        ``||y||_2^2``; required only when recording objective traces.
    dictionary_matrix : ndarray, optional
        The ``M x L`` dictionary rows.  When present, the regular ADMM
        backend builds its dense shifted inverse from this low-rank
        factor in ``O(M L^2)`` instead of an ``O(L^3)`` dense solve.
    """

    gram: object
    adjoint_rhs: np.ndarray
    tau: float
    y_norm_sq: float | None = None
    dictionary_matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise InvalidArgumentError("tau must be positive")
        rhs = np.ascontiguousarray(self.adjoint_rhs, dtype=np.complex128)
        if rhs.ndim != 1:
            raise InvalidArgumentError("adjoint right-hand side must be 1D")
        if rhs.size != _gram_dimension(self.gram):
            raise InvalidArgumentError(
                f"adjoint right-hand side length {rhs.size} does not match the "
                f"gram dimension {_gram_dimension(self.gram)}"
            )
        object.__setattr__(self, "adjoint_rhs", rhs)

    @property
    def dimension(self) -> int:
        return self.adjoint_rhs.size

    def gram_apply(self, c: np.ndarray) -> np.ndarray:
        """Apply ``G`` through whichever operator backs the problem."""
        if isinstance(self.gram, BccbOperator):
            return bccb_matvec(self.gram, c)
        return self.gram.entries @ c


def _gram_dimension(gram) -> int:
    if isinstance(gram, BccbOperator):
        return gram.dimension
    if isinstance(gram, DenseGram):
        return gram.size
    raise InvalidArgumentError("gram must be a DenseGram or a BccbOperator")


@dataclass(frozen=True, slots=True, eq=False)
class SolverConfig:
    """Iteration count, hyperparameters, and backend selection.

    ``backend`` may be left None to derive it from the problem's gram
    operator type (DenseGram -> regular, BccbOperator -> fast).
    ``record_objective`` enables the per-iteration objective trace; it
    adds work inside the timed loop, so benchmarks leave it off.
    """

    iterations: int
    step_size_mu: float | None = None
    rho: float = 1.0
    initial_c: np.ndarray | None = None
    backend: str | None = None
    record_objective: bool = False
    power_seed: int = POWER_SEED

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InvalidArgumentError("iteration count must be positive")
        if self.step_size_mu is not None and self.step_size_mu <= 0:
            raise InvalidArgumentError("step size must be positive")
        if self.rho <= 0:
            raise InvalidArgumentError("rho must be positive")
        if self.backend not in (None, BACKEND_REGULAR, BACKEND_FAST):
            raise InvalidArgumentError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True, slots=True, eq=False)
class SolverResult:
    """Estimate plus loop timing; precomputation is reported separately."""

    estimate: np.ndarray
    objective_trace: np.ndarray
    per_iteration_seconds: float
    total_seconds: float
    backend: str
    iterations: int
    precompute_seconds: float
    step_size_mu: float | None = None


def soft_threshold(z: np.ndarray, kappa: float) -> np.ndarray:
    """Phase-preserving magnitude shrinkage by ``kappa`` (entrywise).

    Entries with ``|z| <= kappa`` map to exactly zero; the rest keep
    their phase and lose ``kappa`` in magnitude.
    """
    if kappa < 0:
        raise InvalidArgumentError("threshold must be nonnegative")
    z = np.asarray(z, dtype=np.complex128)
    if kappa == 0:
        return z.copy()
    magnitude = np.abs(z)
    with np.errstate(divide="ignore"):
        factor = np.maximum(1.0 - kappa / magnitude, 0.0)
    return z * factor


def max_gram_eigenvalue(
    gram_apply,
    dimension: int,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    seed: int = POWER_SEED,
) -> float:
    """Largest eigenvalue of a Hermitian PSD operator by power iteration.

    Stops when the Rayleigh quotient's relative change falls to ``tol``.

    Raises
    ------
    ConvergenceError
        If the quotient has not settled within ``max_iter`` iterations;
        the exception carries the last estimate.
    """
    if dimension < 1:
        raise InvalidArgumentError("operator dimension must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for iteration in range(max_iter):
        y = gram_apply(x)
        value = float(np.real(np.vdot(x, y)))
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0:
            return 0.0
        if iteration > 0 and abs(value - estimate) <= tol * max(abs(value), np.finfo(float).tiny):
            return value
        estimate = value
        x = y / norm_y
    raise ConvergenceError(
        f"power iteration did not settle within {max_iter} iterations", estimate
    )


def _resolve_backend(problem: LassoProblem, config: SolverConfig, admm: bool = False) -> str:
    backend = config.backend
    if backend is None:
        backend = BACKEND_FAST if isinstance(problem.gram, BccbOperator) else BACKEND_REGULAR
    if backend == BACKEND_FAST and not isinstance(problem.gram, BccbOperator):
        raise InvalidArgumentError("the fast backend needs a BccbOperator gram")
    if backend == BACKEND_REGULAR and not admm and not isinstance(problem.gram, DenseGram):
        raise InvalidArgumentError("the regular backend needs a DenseGram")
    if (
        backend == BACKEND_REGULAR
        and admm
        and problem.dictionary_matrix is None
        and not isinstance(problem.gram, DenseGram)
    ):
        raise InvalidArgumentError(
            "the regular ADMM backend needs a DenseGram or the dictionary rows"
        )
    return backend


def _initial_vector(problem: LassoProblem, config: SolverConfig) -> np.ndarray:
    if config.initial_c is None:
        return np.zeros(problem.dimension, dtype=np.complex128)
    initial = np.array(config.initial_c, dtype=np.complex128)
    if initial.shape != (problem.dimension,):
        raise InvalidArgumentError("initial vector length does not match the problem")
    return initial


def _auto_mu(problem: LassoProblem, config: SolverConfig) -> float:
    lam = max_gram_eigenvalue(problem.gram_apply, problem.dimension, seed=config.power_seed)
    if lam <= 0:
        raise InvalidArgumentError("cannot derive a step size from a zero operator")
    return 1.0 / (lam * (1.0 + STEP_SIZE_INFLATION))


def _check_finite(c: np.ndarray, iteration: int) -> None:
    if not np.all(np.isfinite(c)):
        raise DivergenceError(iteration)


def _require_y_norm(problem: LassoProblem) -> float:
    if problem.y_norm_sq is None:
        raise InvalidArgumentError("recording the objective trace requires y_norm_sq")
    return float(problem.y_norm_sq)


def _objective_from_parts(
    y_norm_sq: float, b: np.ndarray, c: np.ndarray, gc: np.ndarray, tau: float
) -> float:
    """Objective via the Gram identity ``||y||^2 - 2 Re<b,c> + Re<c,Gc> + tau||c||_1``."""
    return (
        y_norm_sq
        - 2.0 * float(np.real(np.vdot(b, c)))
        + float(np.real(np.vdot(c, gc)))
        + tau * float(np.sum(np.abs(c)))
    )


def _prox_gradient_step(
    point: np.ndarray, gradient_base: np.ndarray, b: np.ndarray, mu: float, kappa: float
) -> np.ndarray:
    """One proximal-gradient step ``S_kappa(point - mu G point + mu b)``."""
    return soft_threshold(point - mu * gradient_base + mu * b, kappa)


def ista_solve(problem: LassoProblem, config: SolverConfig) -> SolverResult:
    """Proximal gradient descent: ``c <- S_(mu tau)((I - mu G) c + mu b)``.

    The matrix term is applied as ``c - mu * gram_apply(c)`` on both
    backends.  With the automatic step size the objective trace is
    non-increasing.
    """
    backend = _resolve_backend(problem, config)
    precompute_start = time.perf_counter()
    mu = config.step_size_mu if config.step_size_mu is not None else _auto_mu(problem, config)
    precompute_seconds = time.perf_counter() - precompute_start

    b = problem.adjoint_rhs
    kappa = mu * problem.tau
    c = _initial_vector(problem, config)
    record = config.record_objective
    y_norm_sq = _require_y_norm(problem) if record else 0.0
    trace = np.zeros(config.iterations if record else 0)

    start = time.perf_counter()
    for iteration in range(config.iterations):
        gc = problem.gram_apply(c)
        if record and iteration > 0:
            trace[iteration - 1] = _objective_from_parts(y_norm_sq, b, c, gc, problem.tau)
        c = _prox_gradient_step(c, gc, b, mu, kappa)
        _check_finite(c, iteration)
    elapsed = time.perf_counter() - start
    if record:
        trace[-1] = _objective_from_parts(y_norm_sq, b, c, problem.gram_apply(c), problem.tau)

    return SolverResult(
        estimate=c,
        objective_trace=trace,
        per_iteration_seconds=elapsed / config.iterations,
        total_seconds=elapsed,
        backend=backend,
        iterations=config.iterations,
        precompute_seconds=precompute_seconds,
        step_size_mu=mu,
    )


def _next_alpha(alpha: float) -> float:
    """Momentum recursion ``alpha' = (sqrt(1 + 4 alpha^2) + 1) / 2``."""
    return 0.5 * (np.sqrt(1.0 + 4.0 * alpha * alpha) + 1.0)


def fista_alpha_sequence(count: int) -> np.ndarray:
    """First ``count`` momentum coefficients, starting from ``alpha = 1``."""
    if count < 1:
        raise InvalidArgumentError("sequence length must be positive")
    values = np.empty(count)
    alpha = 1.0
    for index in range(count):
        values[index] = alpha
        alpha = _next_alpha(alpha)
    return values


def fista_solve(problem: LassoProblem, config: SolverConfig) -> SolverResult:
    """ISTA with Nesterov momentum.

    The first step (``alpha = 1``) has inactive momentum and therefore
    reproduces one ISTA step exactly.
    """
    backend = _resolve_backend(problem, config)
    precompute_start = time.perf_counter()
    mu = config.step_size_mu if config.step_size_mu is not None else _auto_mu(problem, config)
    precompute_seconds = time.perf_counter() - precompute_start

    b = problem.adjoint_rhs
    kappa = mu * problem.tau
    c_prev = _initial_vector(problem, config)
    z = c_prev.copy()
    alpha = 1.0
    record = config.record_objective
    y_norm_sq = _require_y_norm(problem) if record else 0.0
    trace = np.zeros(config.iterations if record else 0)

    start = time.perf_counter()
    for iteration in range(config.iterations):
        gz = problem.gram_apply(z)
        c = _prox_gradient_step(z, gz, b, mu, kappa)
        _check_finite(c, iteration)
        alpha_next = _next_alpha(alpha)
        z = c + ((alpha - 1.0) / alpha_next) * (c - c_prev)
        c_prev = c
        alpha = alpha_next
        if record:
            trace[iteration] = _objective_from_parts(
                y_norm_sq, b, c, problem.gram_apply(c), problem.tau
            )
    elapsed = time.perf_counter() - start

    return SolverResult(
        estimate=c_prev,
        objective_trace=trace,
        per_iteration_seconds=elapsed / config.iterations,
        total_seconds=elapsed,
        backend=backend,
        iterations=config.iterations,
        precompute_seconds=precompute_seconds,
        step_size_mu=mu,
    )


def _dense_shifted_inverse(problem: LassoProblem, rho: float) -> np.ndarray:
    """Dense ``P = (G + rho I)^-1`` for the regular ADMM backend.

    Prefers the low-rank route through the dictionary rows ``A``
    (``P = (I - A^H (rho I_M + A A^H)^-1 A) / rho``, an M x M Hermitian
    solve plus one rank-M product); falls back to a direct Hermitian
    solve of ``G + rho I`` when only the dense Gram is available.
    """
    a = problem.dictionary_matrix
    if a is not None:
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[1] != problem.dimension:
            raise InvalidArgumentError("dictionary rows do not match the problem dimension")
        m = a.shape[0]
        small = a @ a.conj().T
        small[np.diag_indices(m)] += rho
        factor = cho_factor(small, lower=False, overwrite_a=True)
        solved = cho_solve(factor, a)
        p = np.matmul(a.conj().T, solved)
        p *= -1.0 / rho
        p[np.diag_indices(problem.dimension)] += 1.0 / rho
        return p
    shifted = problem.gram.entries + rho * np.eye(problem.dimension, dtype=np.complex128)
    factor = cho_factor(shifted, lower=False, overwrite_a=True)
    return cho_solve(factor, np.eye(problem.dimension, dtype=np.complex128))


def admm_solve(
    problem: LassoProblem, config: SolverConfig, iterate_callback=None
) -> SolverResult:
    """Three-step ADMM; the sparse estimate is the final ``z`` iterate.

    Precomputation (outside the timed loop) builds ``P = (G + rho I)^-1``
    and ``q = P b``; each iteration then runs

    ``c = q + rho P (z - v)``, ``z = S_(rho tau)(c + v)``, ``v = v + (c - z)``.

    ``iterate_callback(iteration, c, z, v)``, when given, observes every
    iterate (diagnostic/test hook; adds work inside the timed loop).
    """
    backend = _resolve_backend(problem, config, admm=True)
    rho = config.rho
    b = problem.adjoint_rhs

    precompute_start = time.perf_counter()
    if backend == BACKEND_FAST:
        inverse_op = bccb_inverse(bccb_scale_add_identity(problem.gram, 1.0, rho))

        def papply(vector: np.ndarray) -> np.ndarray:
            return bccb_matvec(inverse_op, vector)

    else:
        p_matrix = _dense_shifted_inverse(problem, rho)

        def papply(vector: np.ndarray) -> np.ndarray:
            return p_matrix @ vector

    q = papply(b)
    precompute_seconds = time.perf_counter() - precompute_start

    kappa2 = rho * problem.tau
    z = _initial_vector(problem, config)
    v = np.zeros(problem.dimension, dtype=np.complex128)
    record = config.record_objective
    y_norm_sq = _require_y_norm(problem) if record else 0.0
    trace = np.zeros(config.iterations if record else 0)

    start = time.perf_counter()
    for iteration in range(config.iterations):
        c = q + rho * papply(z - v)
        _check_finite(c, iteration)
        z = soft_threshold(c + v, kappa2)
        v = v + (c - z)
        if iterate_callback is not None:
            iterate_callback(iteration, c, z, v)
        if record:
            trace[iteration] = _objective_from_parts(
                y_norm_sq, b, z, problem.gram_apply(z), problem.tau
            )
    elapsed = time.perf_counter() - start

    return SolverResult(
        estimate=z,
        objective_trace=trace,
        per_iteration_seconds=elapsed / config.iterations,
        total_seconds=elapsed,
        backend=backend,
        iterations=config.iterations,
        precompute_seconds=precompute_seconds,
        step_size_mu=config.step_size_mu,
    )


def lasso_objective(dictionary, y_s: np.ndarray, c: np.ndarray, tau: float) -> float:
    """Exact objective ``||y - D_s c||_2^2 + tau ||c||_1``.

    ``dictionary`` may be a :class:`SubsampledDictionary`, an explicit
    ``M x L`` matrix, or a callable computing ``D_s c``.
    """
    if tau < 0:
        raise InvalidArgumentError("tau must be nonnegative")
    y_s = np.asarray(y_s)
    c = np.asarray(c)
    if isinstance(dictionary, SubsampledDictionary):
        y_hat = apply_forward(dictionary, c)
    elif callable(dictionary):
        y_hat = np.asarray(dictionary(c))
    else:
        matrix = np.asarray(dictionary)
        if matrix.ndim != 2 or matrix.shape[1] != c.size:
            raise InvalidArgumentError("dictionary matrix does not match the coefficients")
        y_hat = matrix @ c
    if y_hat.shape != y_s.shape:
        raise InvalidArgumentError("measurement length does not match the forward model")
    residual = y_s - y_hat
    return float(np.real(np.vdot(residual, residual))) + tau * float(np.sum(np.abs(c)))


def extract_support(
    c_hat: np.ndarray,
    grid1: UniformGrid,
    grid2: UniformGrid,
    threshold_fraction: float,
) -> list[tuple[float, float, complex]]:
    """Read harmonic estimates off the large entries of ``c_hat``.

    Entries with ``|c| >= threshold_fraction * max |c|`` are mapped
    through ``l = l1 + l2 * L1`` to ``(f1[l1], f2[l2], amplitude)`` and
    returned sorted by descending magnitude.  An all-zero input yields
    an empty list.
    """
    if not 0.0 < threshold_fraction < 1.0:
        raise InvalidArgumentError("threshold fraction must lie strictly between 0 and 1")
    c_hat = np.asarray(c_hat)
    if c_hat.shape != (grid1.length * grid2.length,):
        raise InvalidArgumentError("coefficient length does not match the grids")
    magnitudes = np.abs(c_hat)
    peak = float(magnitudes.max())
    if peak == 0.0:
        return []
    kept = np.flatnonzero(magnitudes >= threshold_fraction * peak)
    kept = kept[np.argsort(-magnitudes[kept], kind="stable")]
    return [
        (
            float(grid1.frequencies[index % grid1.length]),
            float(grid2.frequencies[index // grid1.length]),
            complex(c_hat[index]),
        )
        for index in kept
    ]
