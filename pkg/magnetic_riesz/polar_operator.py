"""The Bochner-Riesz operator on a polar grid, its free-case oracles and L^p norms.

apply_br factors the kernel as

    K(x, y) = exp(-i G(theta1)) K0(r1, r2, theta1 - theta2) exp(i G(theta2))

so the angular sum is a circular convolution, done with FFTs once per radial
pair.  apply_br_direct evaluates the same double sum entry by entry and is the
reference for the factorized path on small grids.
"""
import logging
import math
from dataclasses import dataclass, field
from threading import Lock
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, special

from .exceptions import GridMismatchError, InvalidInputError, UnsupportedRegimeError
from .geometry import TWO_PI, dist_geo, phase_integral
from .kernels import (
    FOUR_PI_SQ,
    KernelParams,
    branch_factor,
    diffractive_integral,
    gauge_factor,
    kernel_row,
)
from .shape_kind import ShapeKind
from .specialfn import scaled_bessel
from .workers import threaded_map

log = logging.getLogger("processor")

DEFAULT_OPERATOR_TOL = 1e-8
ORACLE_CELLS = 8192
PROJECTION_PADDING = 4
ORACLE_PADDING = 8


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Nodes (r_i, 2 pi k / n_theta) with exact annular cell weights.

    Cell i covers edges[i] <= r < edges[i+1]; weights[i, k] is its area
    (edges[i+1]^2 - edges[i]^2) pi / n_theta.
    """

    radii: np.ndarray
    n_theta: int
    edges: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        edges = np.asarray(self.edges, dtype=float)
        if radii.ndim != 1 or radii.size == 0:
            raise InvalidInputError("A polar grid needs at least one radius")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise InvalidInputError("Grid radii must be positive and increasing")
        if edges.size != radii.size + 1 or np.any(edges[:-1] > radii) or np.any(edges[1:] < radii):
            raise InvalidInputError("Cell edges must bracket the radii")
        n = int(self.n_theta)
        if n < 2 or n & (n - 1):
            raise InvalidInputError(f"n_theta must be a power of two, got {self.n_theta}")
        radii.setflags(write=False)
        edges.setflags(write=False)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "n_theta", n)

    @classmethod
    def uniform(cls, n_r: int, r_max: float, n_theta: int) -> "PolarGrid":
        """n_r cells of equal width on [0, r_max], nodes at the cell midpoints."""
        if n_r < 1 or not r_max > 0:
            raise InvalidInputError("A uniform grid needs n_r >= 1 and r_max > 0")
        edges = np.linspace(0.0, r_max, int(n_r) + 1)
        return cls(0.5 * (edges[1:] + edges[:-1]), n_theta, edges)

    @classmethod
    def geometric(cls, n_r: int, r_max: float, n_theta: int, r_min: float = None) -> "PolarGrid":
        """A disk [0, r_min] followed by geometrically growing annuli up to r_max."""
        r_min = r_min or r_max / 2.0 ** 10
        if n_r < 2 or not 0 < r_min < r_max:
            raise InvalidInputError("A geometric grid needs n_r >= 2 and 0 < r_min < r_max")
        edges = np.concatenate([[0.0], np.geomspace(r_min, r_max, int(n_r))])
        return cls(0.5 * (edges[1:] + edges[:-1]), n_theta, edges)

    @property
    def n_r(self) -> int:
        return self.radii.size

    @property
    def r_max(self) -> float:
        return float(self.edges[-1])

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_theta) / self.n_theta

    @property
    def radial_weights(self) -> np.ndarray:
        """Area of one angular cell in each ring."""
        return math.pi * np.diff(self.edges ** 2) / self.n_theta

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(self.radial_weights[:, None], self.n_theta, axis=1)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_r, self.n_theta

    def mesh(self):
        """(r, theta) arrays of shape (n_r, n_theta)."""
        return np.meshgrid(self.radii, self.thetas, indexing="ij")

    def cartesian(self):
        r, theta = self.mesh()
        return r * np.cos(theta), r * np.sin(theta)

    def scaled(self, factor: float) -> "PolarGrid":
        return PolarGrid(self.radii * factor, self.n_theta, self.edges * factor)

    def same_as(self, other: "PolarGrid") -> bool:
        return (self is other or (self.n_theta == other.n_theta
                                  and np.array_equal(self.edges, other.edges)
                                  and np.array_equal(self.radii, other.radii)))


@dataclass(eq=False)
class GridFunction:
    """Complex node values on a polar grid, with optional per-node error bounds."""

    grid: PolarGrid
    values: np.ndarray
    errors: Optional[np.ndarray] = None
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise GridMismatchError(f"Values of shape {self.values.shape} on a grid of shape {self.grid.shape}")
        if self.errors is not None:
            self.errors = np.broadcast_to(np.asarray(self.errors, dtype=float), self.grid.shape).copy()

    @classmethod
    def from_function(cls, grid: PolarGrid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample fn(r, theta) at the grid nodes."""
        r, theta = grid.mesh()
        return cls(grid, np.asarray(fn(r, theta), dtype=complex))

    @classmethod
    def zeros(cls, grid: PolarGrid) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def _check(self, other: "GridFunction"):
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("Grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "GridFunction":
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def inner(self, other: "GridFunction") -> complex:
        """<f, g> = sum w f conj(g)."""
        self._check(other)
        return complex(np.sum(self.grid.weights * self.values * np.conj(other.values)))

    def rotate(self, steps: int) -> "GridFunction":
        """The function theta -> f(theta - 2 pi steps / n_theta)."""
        return GridFunction(self.grid, np.roll(self.values, int(steps), axis=1))

    def measure(self) -> float:
        """Weighted size of the support (|E| for an indicator)."""
        return float(np.sum(self.grid.weights[self.values != 0]))

    @property
    def max_error(self) -> float:
        return 0.0 if self.errors is None else float(self.errors.max())


@dataclass(frozen=True)
class ShapeSpec:
    """A planar set described by its kind and parameters."""

    kind: ShapeKind
    center: Tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0
    r_in: float = 0.0
    r_out: float = 0.0
    theta_start: float = 0.0
    theta_end: float = 0.0
    direction: float = 0.0
    length: float = 0.0
    width: float = 0.0

    @classmethod
    def ball(cls, radius: float, center=(0.0, 0.0)) -> "ShapeSpec":
        if radius < 0:
            raise InvalidInputError("Ball radius must be nonnegative")
        return cls(ShapeKind.BALL, tuple(center), radius=radius)

    @classmethod
    def annulus(cls, r_in: float, r_out: float, center=(0.0, 0.0)) -> "ShapeSpec":
        if r_in < 0 or r_out < r_in:
            raise InvalidInputError(f"Annulus needs 0 <= r_in <= r_out, got ({r_in}, {r_out})")
        return cls(ShapeKind.ANNULUS, tuple(center), r_in=r_in, r_out=r_out)

    @classmethod
    def sector(cls, r_in: float, r_out: float, theta_start: float, theta_end: float) -> "ShapeSpec":
        if r_in < 0 or r_out < r_in:
            raise InvalidInputError("Sector needs 0 <= r_in <= r_out")
        return cls(ShapeKind.SECTOR, r_in=r_in, r_out=r_out, theta_start=theta_start, theta_end=theta_end)

    @classmethod
    def tube(cls, direction: float, length: float, width: float, center=(0.0, 0.0)) -> "ShapeSpec":
        if length < 0 or width < 0:
            raise InvalidInputError("Tube length and width must be nonnegative")
        return cls(ShapeKind.TUBE, tuple(center), direction=direction, length=length, width=width)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        dx, dy = x - self.center[0], y - self.center[1]
        if self.kind is ShapeKind.BALL:
            return np.hypot(dx, dy) < self.radius
        radius = np.hypot(dx, dy)
        if self.kind is ShapeKind.ANNULUS:
            return (radius >= self.r_in) & (radius < self.r_out)
        if self.kind is ShapeKind.SECTOR:
            angle = np.mod(np.arctan2(dy, dx) - self.theta_start, TWO_PI)
            span = np.mod(self.theta_end - self.theta_start, TWO_PI) or TWO_PI
            return (radius >= self.r_in) & (radius < self.r_out) & (angle < span)
        along = dx * math.cos(self.direction) + dy * math.sin(self.direction)
        across = -dx * math.sin(self.direction) + dy * math.cos(self.direction)
        return (np.abs(along) <= 0.5 * self.length) & (np.abs(across) <= 0.5 * self.width)


def make_indicator(grid: PolarGrid, shape: ShapeSpec) -> GridFunction:
    """Node-wise indicator of the shape; empty intersections give a flagged zero function."""
    x, y = grid.cartesian()
    values = shape.contains(x, y).astype(complex)
    warnings = ()
    if not np.any(values):
        log.warning("Indicator of %s is empty on this grid", shape.kind.value)
        warnings = ("empty",)
    return GridFunction(grid, values, warnings=warnings)


class KernelRowCache:
    """Spectra of gauge-free kernel rows keyed by the radial pair and the kernel parameters.

    Reads are lock-free; insertions take the lock.
    """

    def __init__(self):
        self._rows: Dict[tuple, Tuple[np.ndarray, float]] = {}
        self._lock = Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(params: KernelParams, r1: float, r2: float, n_theta: int, tol: float) -> tuple:
        low, high = (r1, r2) if r1 <= r2 else (r2, r1)
        return (low, high, n_theta, params.delta, params.lam, params.alpha, tol)

    def row(self, params: KernelParams, r1: float, r2: float, n_theta: int, tol: float):
        """(FFT of the row, summed row error) for dtheta = 2 pi k / n_theta."""
        key = self.key(params, r1, r2, n_theta, tol)
        found = self._rows.get(key)
        if found is not None:
            self.hits += 1
            return found
        geometric, diffractive, errors = kernel_row(params, key[0], key[1], n_theta, tol)
        entry = (np.fft.fft(geometric + diffractive), float(errors.sum()))
        with self._lock:
            self.misses += 1
            self._rows.setdefault(key, entry)
        return entry

    def __len__(self):
        return len(self._rows)


def _check_input(f: GridFunction):
    if f.values.shape != f.grid.shape:
        raise GridMismatchError("Grid function does not match its grid")


def apply_br(params: KernelParams,
             f: GridFunction,
             tol: float = DEFAULT_OPERATOR_TOL,
             max_threads: int = None,
             cache: KernelRowCache = None
             ) -> GridFunction:
    """S^delta_lambda(L_A) f on the grid of f, with a per-node error bound."""
    _check_input(f)
    grid = f.grid
    cache = cache if cache is not None else KernelRowCache()
    gauge = np.exp(1j * np.asarray(params.profile.gauge_phase(grid.thetas)))
    twisted = f.values * gauge[None, :]
    spectra = np.fft.fft(twisted, axis=1)
    weights = grid.radial_weights
    peaks = np.abs(f.values).max(axis=1)
    n = grid.n_theta

    def output_ring(i):
        total = np.zeros(n, dtype=complex)
        error = 0.0
        for j in range(grid.n_r):
            if not np.any(twisted[j]):
                continue
            spectrum, row_error = cache.row(params, grid.radii[i], grid.radii[j], n, tol)
            total += weights[j] * spectrum * spectra[j]
            error += weights[j] * row_error * peaks[j]
        return np.fft.ifft(total), error

    rings = threaded_map(output_ring, range(grid.n_r), max_threads, label="output rings")
    values = np.array([ring for ring, _ in rings]) * np.conj(gauge)[None, :]
    errors = np.repeat(np.array([err for _, err in rings])[:, None], n, axis=1)
    log.debug("Kernel rows: %i computed, %i reused", cache.misses, cache.hits)

    return GridFunction(grid, values, errors)


def apply_br_direct(params: KernelParams,
                    f: GridFunction,
                    tol: float = DEFAULT_OPERATOR_TOL,
                    max_threads: int = None
                    ) -> GridFunction:
    """The same operator as a plain double sum over all node pairs."""
    _check_input(f)
    grid = f.grid
    n = grid.n_theta
    thetas = grid.thetas
    differences = thetas[:, None] - thetas[None, :]
    offsets = np.arange(-(n - 1), n)
    distinct = TWO_PI * offsets / n
    index = (np.arange(n)[:, None] - np.arange(n)[None, :]) + (n - 1)
    amplitude = np.exp(1j * np.asarray(phase_integral(params.profile, thetas[:, None], thetas[None, :])))
    amplitude = amplitude * branch_factor(params.alpha, differences) / FOUR_PI_SQ
    on_cut = np.abs(np.abs(differences) - math.pi) < 1e-13
    gauge = gauge_factor(params.profile, thetas[:, None], thetas[None, :])
    amplitude = np.where(on_cut, gauge * math.cos(math.pi * params.alpha) / FOUR_PI_SQ, amplitude)
    pref = params.prefactor
    weights = grid.radial_weights

    def output_ring(i):
        values = np.zeros(n, dtype=complex)
        error = np.zeros(n)
        for j in range(grid.n_r):
            if not np.any(f.values[j]):
                continue
            distance = dist_geo(grid.radii[i], grid.radii[j], differences)
            radial, radial_err = scaled_bessel(params.order, params.lam * distance)
            integral, int_err, _ = diffractive_integral(
                params.order, params.lam, grid.radii[i], grid.radii[j], params.alpha, distinct, tol
            )
            matrix = pref * (radial * amplitude + gauge * integral[index])
            values += weights[j] * matrix @ f.values[j]
            bound = pref * (radial_err / FOUR_PI_SQ + int_err[index])
            error += weights[j] * bound @ np.abs(f.values[j])
        return values, error

    rings = threaded_map(output_ring, range(grid.n_r), max_threads, label="direct rings")
    return GridFunction(grid, np.array([v for v, _ in rings]), np.array([e for _, e in rings]))


def lp_norm(f: GridFunction, p: float) -> float:
    """Weighted discrete L^p norm; p = inf gives the largest modulus."""
    if not p >= 1:
        raise InvalidInputError(f"p must be at least 1, got {p}")
    modulus = np.abs(f.values)
    if math.isinf(p):
        return float(modulus.max())
    return float(np.sum(f.grid.weights * modulus ** p) ** (1.0 / p))


def free_kernel_oracle(delta: float,
                       lam: float,
                       distances: Sequence[float],
                       cells: int = ORACLE_CELLS
                       ) -> np.ndarray:
    """Free (A = 0) Bochner-Riesz kernel from the one-dimensional slice of its multiplier.

    The multiplier (1 - |xi|^2/lam^2)^delta_+ / Gamma(1 + delta) projects onto a line as
    lam sqrt(pi)/Gamma(delta + 3/2) (1 - xi^2/lam^2)^(delta + 1/2)_+; its cell masses are
    integrated exactly through the regularized incomplete beta function and the
    inverse transform is a cosine sum over cell centers.
    """
    if not delta > -1.5:
        raise UnsupportedRegimeError(f"The slice oracle needs delta > -3/2, got {delta}")
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    d = np.asarray(distances, dtype=float)
    if np.any(d < 0):
        raise InvalidInputError("Distances must be nonnegative")
    exponent = delta + 0.5
    reach = float(lam * np.max(d, initial=0.0))
    count = int(cells * max(1, math.ceil(reach / 64.0)))
    edges = np.linspace(0.0, 1.0, count + 1)
    primitive = 0.5 * special.beta(0.5, exponent + 1.0) * special.betainc(0.5, exponent + 1.0, edges ** 2)
    masses = np.diff(primitive) * lam * lam * math.sqrt(math.pi) / special.gamma(delta + 1.5)
    centers = lam * 0.5 * (edges[1:] + edges[:-1])
    flat = d.ravel()
    result = np.empty(flat.shape)
    for start in range(0, flat.size, 256):
        chunk = flat[start:start + 256]
        result[start:start + 256] = np.cos(np.multiply.outer(chunk, centers)) @ masses
    result *= 2.0 / (TWO_PI * TWO_PI)

    return result.reshape(d.shape)


def _cartesian_window(grid: PolarGrid, spacing: float):
    half = int(math.ceil(grid.r_max / spacing))
    axis = spacing * np.arange(-half, half + 1)
    return axis, np.meshgrid(axis, axis, indexing="ij")


def polar_to_cartesian(f: GridFunction, spacing: float):
    """Bilinear resampling onto a square Cartesian window (theta wraps, r clamps, zero outside)."""
    grid = f.grid
    axis, (x, y) = _cartesian_window(grid, spacing)
    radius = np.hypot(x, y)
    angle = np.mod(np.arctan2(y, x), TWO_PI)
    r_index = np.interp(radius, grid.radii, np.arange(grid.n_r))
    t_index = angle / (TWO_PI / grid.n_theta)
    r0 = np.minimum(np.floor(r_index).astype(int), grid.n_r - 1)
    r1 = np.minimum(r0 + 1, grid.n_r - 1)
    rw = r_index - r0
    t0 = np.floor(t_index).astype(int) % grid.n_theta
    t1 = (t0 + 1) % grid.n_theta
    tw = t_index - np.floor(t_index)
    v = f.values
    values = ((1 - rw) * ((1 - tw) * v[r0, t0] + tw * v[r0, t1])
              + rw * ((1 - tw) * v[r1, t0] + tw * v[r1, t1]))
    values = np.where(radius < grid.r_max, values, 0.0)
    return axis, values


def cartesian_to_polar(axis: np.ndarray, values: np.ndarray, grid: PolarGrid) -> np.ndarray:
    """Cubic spline interpolation of Cartesian samples at the polar nodes."""
    x, y = grid.cartesian()
    spacing = axis[1] - axis[0]
    coords = np.array([(x - axis[0]) / spacing, (y - axis[0]) / spacing])
    real = ndimage.map_coordinates(values.real, coords, order=3, mode="nearest")
    imag = ndimage.map_coordinates(values.imag, coords, order=3, mode="nearest")
    return real + 1j * imag


def _default_spacing(grid: PolarGrid, lam: float) -> float:
    ring = float(np.min(np.diff(grid.edges)))
    return min(ring, math.pi / (8.0 * lam))


def _radial_cell_average(delta: float, lam: float, rho: np.ndarray, width: float) -> np.ndarray:
    """(1 - |xi|^2/lam^2)^delta_+ / Gamma(1 + delta) averaged over [rho - width/2, rho + width/2].

    The primitive of the even extension (1 - t^2)^delta_+ is the regularized incomplete
    beta function, so the average is exact across the singular shell |xi| = lam.
    """
    half = 0.5 * width / lam
    scale = 0.5 * special.beta(0.5, delta + 1.0)

    def primitive(t):
        t = np.clip(t, -1.0, 1.0)
        return np.sign(t) * scale * special.betainc(0.5, delta + 1.0, t * t)

    u = rho / lam
    return (primitive(u + half) - primitive(u - half)) / (2.0 * half * special.gamma(1.0 + delta))


def free_multiplier_oracle(delta: float,
                           lam: float,
                           f: GridFunction,
                           spacing: float = None,
                           padding: int = ORACLE_PADDING
                           ) -> GridFunction:
    """Free Bochner-Riesz mean by multiplying the 2D DFT of f by (1 - |xi|^2/lam^2)^delta_+ / Gamma(1 + delta).

    f is resampled to a Cartesian window of half-width r_max, zero-padded to
    ``padding`` times the window and transformed; each frequency cell carries the
    radial average of the multiplier over its width 2 pi / L, L = padding * window.

    Error bounds, with K the free kernel (|K(z)| <= C lam^(1/2 - delta) |z|^(-3/2 - delta)):
      - aliasing: the DFT periodizes K with period L, so a window point picks up
        images at distance at least L - 2 r_max, each bounded by
        C lam^(1/2 - delta) (L - 2 r_max)^(-3/2 - delta) ||f||_1;
      - window: spectrum of the samples above the Nyquist frequency pi / spacing is
        lost; the default spacing keeps it at 8 lam or more;
      - resampling: bilinear to the window and cubic back, O(spacing^2) for smooth f;
      - the cell average differs from point values by O((2 pi / L)^2) away from
        |xi| = lam and is exact across the shell.
    """
    if not -1.0 < delta < 0.0:
        raise UnsupportedRegimeError(f"The multiplier oracle needs delta in (-1, 0), got {delta}")
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    if padding < 2:
        raise InvalidInputError(f"padding must be at least 2, got {padding}")
    spacing = spacing or _default_spacing(f.grid, lam)
    axis, samples = polar_to_cartesian(f, spacing)
    size = int(padding) * axis.size
    spectrum = np.fft.fft2(samples, s=(size, size))
    freq = TWO_PI * np.fft.fftfreq(size, d=spacing)
    fx, fy = np.meshgrid(freq, freq, indexing="ij")
    spectrum *= _radial_cell_average(delta, lam, np.hypot(fx, fy), TWO_PI / (size * spacing))
    filtered = np.fft.ifft2(spectrum)[:axis.size, :axis.size]

    return GridFunction(f.grid, cartesian_to_polar(axis, filtered, f.grid))


def sharp_cutoff_projection(lam: float, f: GridFunction, spacing: float = None) -> GridFunction:
    """P_{|xi| <= lam} f by masking the zero-padded Cartesian FFT."""
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    spacing = spacing or _default_spacing(f.grid, lam)
    axis, samples = polar_to_cartesian(f, spacing)
    size = PROJECTION_PADDING * axis.size
    spectrum = np.fft.fft2(samples, s=(size, size))
    freq = TWO_PI * np.fft.fftfreq(size, d=spacing)
    fx, fy = np.meshgrid(freq, freq, indexing="ij")
    spectrum[np.hypot(fx, fy) > lam] = 0.0
    projected = np.fft.ifft2(spectrum)[:axis.size, :axis.size]

    return GridFunction(f.grid, cartesian_to_polar(axis, projected, f.grid))
