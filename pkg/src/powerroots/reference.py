"""Independent reference roots: eigenvalues of the companion matrix (LAPACK QR)."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .blackbox import companion_matrix
from .polycore import Poly


def reference_roots(p: Poly) -> np.ndarray:
    """All zeros of ``p`` as eigenvalues of its companion matrix."""
    return np.linalg.eigvals(companion_matrix(p))


def reference_eigenvalues(T) -> np.ndarray:
    return np.linalg.eigvals(np.asarray(T, dtype=complex))


def multiset_distance(a: Iterable[complex], b: Iterable[complex]) -> float:
    """Largest pairing distance under the optimal one-to-one matching."""
    a = np.asarray(list(a), dtype=complex)
    b = np.asarray(list(b), dtype=complex)
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
