"""Small text-format helpers shared by the file writers.

All numeric output uses 17 significant digits so that doubles survive a
write/read round trip bit for bit.
"""

import csv
import numpy as np


def fmt(x: float) -> str:
    """Render a float with 17 significant digits (lossless for float64)."""
    return format(float(x), ".17g")


def write_complex_vector(path, values: np.ndarray, header: tuple[str, str] = ("re", "im")) -> None:
    """Write a complex vector as a two-column CSV of (re, im) decimal pairs."""
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for z in values:
            writer.writerow((fmt(z.real), fmt(z.imag)))


def read_complex_vector(path) -> np.ndarray:
    """Read a two-column (re, im) CSV back into a complex128 vector."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                re, im = float(row[0]), float(row[1])
            except ValueError:
                continue  # header row
            out.append(complex(re, im))
    return np.asarray(out, dtype=np.complex128)
