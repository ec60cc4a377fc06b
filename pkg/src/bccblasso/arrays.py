"""Planar array geometry and single-snapshot signal synthesis.

A full uniform rectangular array (URA) places elements on an
``m1_count x m2_count`` half-wavelength grid.  A sparse array keeps a
random subset of those elements while anchoring the extremal rows and
columns, so the outer aperture of the URA is preserved.  Snapshots are
sums of 2D complex exponentials over the occupied elements plus
circular complex Gaussian noise.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .textio import fmt, read_complex_vector, write_complex_vector


@dataclass(frozen=True, slots=True, eq=False)
class ArrayGeometry:
    """Element occupancy of an ``m1_count x m2_count`` half-wavelength grid.

    Parameters
    ----------
    m1_count, m2_count : int
        Grid extents along the two axes.
    occupancy : ndarray of bool, shape (m1_count, m2_count)
        True where an element is present.
    """

    m1_count: int
    m2_count: int
    occupancy: np.ndarray

    def __post_init__(self) -> None:
        if self.m1_count < 1 or self.m2_count < 1:
            raise InvalidArgumentError("grid extents must be positive")
        occupancy = np.ascontiguousarray(self.occupancy, dtype=bool)
        if occupancy.shape != (self.m1_count, self.m2_count):
            raise InvalidArgumentError(
                f"occupancy shape {occupancy.shape} does not match "
                f"({self.m1_count}, {self.m2_count})"
            )
        if not occupancy.any():
            raise InvalidArgumentError("geometry needs at least one occupied element")
        occupancy.setflags(write=False)
        object.__setattr__(self, "occupancy", occupancy)

    @property
    def element_count(self) -> int:
        """Number of occupied elements."""
        return int(np.count_nonzero(self.occupancy))

    def occupied_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(m1, m2)`` index arrays in scan order (m2 outer, m1 inner).

        The scan order matches the flat element index ``m1 + m2 * m1_count``
        used by snapshots and dictionary rows.
        """
        m2_idx, m1_idx = np.nonzero(self.occupancy.T)
        return m1_idx, m2_idx


@dataclass(frozen=True, slots=True)
class Target:
    """A point source described by its harmonic tuple and complex amplitude."""

    f1: float
    f2: float
    amplitude: complex

    def __post_init__(self) -> None:
        for name, value in (("f1", self.f1), ("f2", self.f2)):
            if not -0.5 <= value < 0.5:
                raise InvalidArgumentError(f"{name} = {value!r} outside [-1/2, 1/2)")


@dataclass(frozen=True, slots=True, eq=False)
class Snapshot:
    """A single complex measurement vector across the occupied elements."""

    values: np.ndarray
    geometry: ArrayGeometry
    noise_variance: float

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size != self.geometry.element_count:
            raise InvalidArgumentError(
                f"snapshot length {values.size} does not match the "
                f"{self.geometry.element_count}-element geometry"
            )
        if self.noise_variance < 0:
            raise InvalidArgumentError("noise variance must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def make_ura(m1_count: int, m2_count: int) -> ArrayGeometry:
    """Build a fully occupied uniform rectangular array.

    Parameters
    ----------
    m1_count, m2_count : int
        Positive grid extents.

    Returns
    -------
    ArrayGeometry
        All ``m1_count * m2_count`` grid points occupied.
    """
    if m1_count < 1 or m2_count < 1:
        raise InvalidArgumentError("URA extents must be positive")
    return ArrayGeometry(m1_count, m2_count, np.ones((m1_count, m2_count), dtype=bool))


def subsample_preserving_aperture(ura: ArrayGeometry, m: int, seed: int) -> ArrayGeometry:
    """Randomly keep ``m`` elements of a full URA without shrinking its aperture.

    One randomly chosen element is anchored on each extremal line
    (``m1 = 0``, ``m1 = m1_count - 1``, ``m2 = 0``, ``m2 = m2_count - 1``);
    the remaining elements are drawn uniformly without replacement.

    Parameters
    ----------
    ura : ArrayGeometry
        Fully occupied source array.
    m : int
        Number of elements to keep, ``4 <= m <= ura.element_count``.
    seed : int
        Seed making the draw deterministic.

    Returns
    -------
    ArrayGeometry
        Geometry with exactly ``m`` occupied elements.
    """
    full = ura.m1_count * ura.m2_count
    if ura.element_count != full:
        raise InvalidArgumentError("subsampling expects a fully occupied URA")
    if m < 4:
        raise InvalidArgumentError("need at least 4 elements to anchor both apertures")
    if m > full:
        raise InvalidArgumentError(f"cannot keep {m} of {full} elements")

    rng = np.random.default_rng(seed)
    candidates = [
        (0, int(rng.integers(ura.m2_count))),
        (ura.m1_count - 1, int(rng.integers(ura.m2_count))),
        (int(rng.integers(ura.m1_count)), 0),
        (int(rng.integers(ura.m1_count)), ura.m2_count - 1),
    ]
    anchors: list[tuple[int, int]] = []
    for cell in candidates:
        if cell not in anchors:
            anchors.append(cell)

    # Remaining pool in scan order (m2 outer, m1 inner) for determinism.
    pool = [
        (m1, m2)
        for m2 in range(ura.m2_count)
        for m1 in range(ura.m1_count)
        if (m1, m2) not in anchors
    ]
    extra_count = m - len(anchors)
    chosen = rng.choice(len(pool), size=extra_count, replace=False) if extra_count else []

    occupancy = np.zeros((ura.m1_count, ura.m2_count), dtype=bool)
    for m1, m2 in anchors:
        occupancy[m1, m2] = True
    for index in chosen:
        m1, m2 = pool[int(index)]
        occupancy[m1, m2] = True
    return ArrayGeometry(ura.m1_count, ura.m2_count, occupancy)


def steering_vector(f: float, m_count: int) -> np.ndarray:
    """Return the length-``m_count`` steering vector ``exp(-j 2 pi f m)``."""
    if m_count < 1:
        raise InvalidArgumentError("steering vector length must be positive")
    return np.exp(-2j * np.pi * f * np.arange(m_count))


def angles_to_harmonics(phi: float, theta: float) -> tuple[float, float]:
    """Map azimuth/elevation angles to the harmonic tuple (f1, f2).

    Parameters
    ----------
    phi : float
        Azimuth in radians, within ``[-pi, pi)``.
    theta : float
        Elevation in radians, within ``[0, pi/2)``.

    Returns
    -------
    (float, float)
        ``(cos(phi) sin(theta) / 2, sin(phi) sin(theta) / 2)``.
    """
    if not -np.pi <= phi < np.pi:
        raise InvalidArgumentError(f"phi = {phi!r} outside [-pi, pi)")
    if not 0.0 <= theta < np.pi / 2:
        raise InvalidArgumentError(f"theta = {theta!r} outside [0, pi/2)")
    scale = 0.5 * np.sin(theta)
    return float(np.cos(phi) * scale), float(np.sin(phi) * scale)


def harmonics_to_angles(f1: float, f2: float) -> tuple[float, float]:
    """Invert :func:`angles_to_harmonics`.

    Returns ``phi = 0`` by convention when ``sin(theta) = 0``, where the
    azimuth is undefined.  Raises :class:`DomainError` when the harmonic
    pair is not physically realizable (``4 (f1^2 + f2^2) > 1``).
    """
    radius = float(np.hypot(f1, f2))
    if 2.0 * radius > 1.0:
        raise DomainError(
            f"harmonic pair ({f1!r}, {f2!r}) is unrealizable: 4(f1^2+f2^2) > 1"
        )
    theta = float(np.arcsin(2.0 * radius))
    phi = 0.0 if radius == 0.0 else float(np.arctan2(f2, f1))
    return phi, theta


def synthesize_snapshot(
    geometry: ArrayGeometry,
    targets: list[Target],
    noise_variance: float,
    seed: int,
) -> Snapshot:
    """Simulate one snapshot of the array.

    Each occupied element ``(m1, m2)`` observes
    ``sum_k c_k exp(-j 2 pi (m1 f1_k + m2 f2_k))`` plus circular complex
    Gaussian noise of variance ``noise_variance`` (real and imaginary
    parts each carry half the variance).

    Parameters
    ----------
    geometry : ArrayGeometry
        Array to sample on.
    targets : list of Target
        Point sources; may be empty only when ``noise_variance > 0``.
    noise_variance : float
        Per-element noise power ``sigma^2 >= 0``.
    seed : int
        Seed for the noise draw.

    Returns
    -------
    Snapshot
        Values in occupancy scan order (m2 outer, m1 inner).
    """
    if noise_variance < 0:
        raise InvalidArgumentError("noise variance must be nonnegative")
    if not targets and noise_variance == 0:
        raise InvalidArgumentError("need at least one target or positive noise variance")

    m1_idx, m2_idx = geometry.occupied_coordinates()
    values = np.zeros(geometry.element_count, dtype=np.complex128)
    for target in targets:
        a1 = steering_vector(target.f1, geometry.m1_count)
        a2 = steering_vector(target.f2, geometry.m2_count)
        values = values + target.amplitude * (a1[m1_idx] * a2[m2_idx])
    if noise_variance > 0:
        draws = np.random.default_rng(seed).standard_normal((geometry.element_count, 2))
        values = values + np.sqrt(noise_variance / 2.0) * (draws[:, 0] + 1j * draws[:, 1])
    return Snapshot(values, geometry, float(noise_variance))


def snr_to_noise_variance(targets: list[Target], snr_db: float) -> float:
    """Return the noise variance realizing ``snr_db`` for the given targets.

    The SNR convention is total source power over per-element noise
    variance: ``sigma^2 = sum_k |c_k|^2 / 10^(snr_db / 10)``.
    """
    if not targets:
        raise InvalidArgumentError("SNR is undefined without targets")
    power = float(sum(abs(target.amplitude) ** 2 for target in targets))
    return power / 10.0 ** (snr_db / 10.0)


def geometry_to_json(geometry: ArrayGeometry) -> str:
    """Serialize a geometry as JSON with the occupied (m1, m2) pairs."""
    m1_idx, m2_idx = geometry.occupied_coordinates()
    payload = {
        "m1_count": geometry.m1_count,
        "m2_count": geometry.m2_count,
        "occupied": [[int(a), int(b)] for a, b in zip(m1_idx, m2_idx)],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def geometry_from_json(text: str) -> ArrayGeometry:
    """Parse the JSON produced by :func:`geometry_to_json`."""
    payload = json.loads(text)
    try:
        m1_count = int(payload["m1_count"])
        m2_count = int(payload["m2_count"])
        occupied = payload["occupied"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed geometry record: {exc}") from exc
    occupancy = np.zeros((m1_count, m2_count), dtype=bool)
    for m1, m2 in occupied:
        occupancy[int(m1), int(m2)] = True
    return ArrayGeometry(m1_count, m2_count, occupancy)


def save_geometry(path, geometry: ArrayGeometry) -> None:
    """Write a geometry JSON file."""
    with open(path, "w") as fh:
        fh.write(geometry_to_json(geometry))


def load_geometry(path) -> ArrayGeometry:
    """Read a geometry JSON file."""
    with open(path) as fh:
        return geometry_from_json(fh.read())


def save_snapshot(path, snapshot: Snapshot) -> None:
    """Write snapshot values as (re, im) pairs in occupancy scan order."""
    write_complex_vector(path, snapshot.values)


def load_snapshot_values(path) -> np.ndarray:
    """Read snapshot values written by :func:`save_snapshot`."""
    return read_complex_vector(path)


def save_targets(path, targets: list[Target]) -> None:
    """Write targets as CSV rows of (f1, f2, re, im)."""
    with open(path, "w") as fh:
        fh.write("f1,f2,re,im\n")
        for target in targets:
            amplitude = complex(target.amplitude)
            fh.write(
                f"{fmt(target.f1)},{fmt(target.f2)},"
                f"{fmt(amplitude.real)},{fmt(amplitude.imag)}\n"
            )


def load_targets(path) -> list[Target]:
    """Read targets written by :func:`save_targets`."""
    targets: list[Target] = []
    with open(path) as fh:
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 4:
                continue
            try:
                f1, f2, re, im = (float(part) for part in parts)
            except ValueError:
                continue  # header row
            targets.append(Target(f1, f2, complex(re, im)))
    return targets
