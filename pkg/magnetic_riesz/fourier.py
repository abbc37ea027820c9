"""Fourier truncation of the angular jump 1_[0,pi](|theta|) on the period-4pi torus."""
import math

import numpy as np

from .exceptions import InvalidInputError
from .specialfn import sin_pi

GAUSS_NODES = 8
PANELS_PER_ORDER = 4


def fourier_coefficient(k: int) -> float:
    """c_k = sin(k pi/2)/(pi k), with c_0 = 1/2."""
    k = int(k)
    if k == 0:
        return 0.5
    return sin_pi(0.5 * k) / (math.pi * k)


def _partial_sum(order: int, theta: np.ndarray) -> np.ndarray:
    # c_k is even in k and vanishes for even k != 0
    total = np.full(theta.shape, 0.5)
    for k in range(1, order, 2):
        total += 2.0 * fourier_coefficient(k) * np.cos(0.5 * k * theta)
    return total


def indicator_fourier_partial(M: int, theta):
    """sum_{|k| < M} c_k exp(-i k theta / 2) at theta in [-2 pi, 2 pi]."""
    if int(M) != M or M < 1:
        raise InvalidInputError(f"The truncation order must be a positive integer, got {M}")
    angles = np.asarray(theta, dtype=float)
    if np.any(np.abs(angles) > 2.0 * math.pi * (1 + 1e-12)):
        raise InvalidInputError("theta must lie in [-2 pi, 2 pi]")
    result = _partial_sum(int(M), angles).astype(complex)
    return complex(result) if result.ndim == 0 else result


def indicator(theta) -> np.ndarray:
    return (np.abs(np.asarray(theta, dtype=float)) <= math.pi).astype(float)


def _composite_nodes(order: int):
    """Gauss-Legendre nodes and weights on (-2 pi, 2 pi), panels aligned with the jumps at +-pi."""
    base_x, base_w = np.polynomial.legendre.leggauss(GAUSS_NODES)
    panels = PANELS_PER_ORDER * max(order, 2)
    pieces_x, pieces_w = [], []
    for left in (-2.0 * math.pi, -math.pi, 0.0, math.pi):
        edges = np.linspace(left, left + math.pi, panels + 1)
        centers = 0.5 * (edges[1:] + edges[:-1])
        halves = 0.5 * np.diff(edges)
        pieces_x.append((centers[:, None] + halves[:, None] * base_x[None, :]).ravel())
        pieces_w.append((halves[:, None] * base_w[None, :]).ravel())
    return np.concatenate(pieces_x), np.concatenate(pieces_w)


def truncation_error_norm(M: int, p: float) -> float:
    """|| 1_[0,pi](|theta|) - partial sum of order M ||_{L^p(-2 pi, 2 pi)}."""
    if int(M) != M or M < 2:
        raise InvalidInputError(f"truncation_error_norm needs an integer M >= 2, got {M}")
    if not 2 <= p < math.inf:
        raise InvalidInputError(f"p must lie in [2, infinity), got {p}")
    nodes, weights = _composite_nodes(int(M))
    error = np.abs(indicator(nodes) - _partial_sum(int(M), nodes))

    return float(np.dot(weights, error ** p) ** (1.0 / p))


def partial_sum_l1(M: int) -> float:
    """sum_{|k| < M} |c_k|, the size of the truncated jump as a convolution multiplier."""
    if int(M) != M or M < 1:
        raise InvalidInputError(f"The truncation order must be a positive integer, got {M}")
    return 0.5 + 2.0 * sum(abs(fourier_coefficient(k)) for k in range(1, int(M), 2))
