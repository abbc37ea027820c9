"""Adaptive Gauss-Kronrod quadrature and the oscillatory integrator over s.

Both integrators share one vectorized 7/15 point Gauss-Kronrod panel engine.
Integrands are called with a one-dimensional array of nodes and may return
either one value per node or a row of values per node (vector integrands),
in which case every component gets its own value and error estimate.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .exceptions import InvalidInputError, PreconditionError
from .geometry import diffractive_distance, diffractive_slope

log = logging.getLogger("processor")

# Kronrod abscissae on [0, 1] of the 15 point rule; odd entries are the Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

DEFAULT_MAX_EVALUATIONS = 2_000_000
TAIL_START = 5.0
TAIL_STEP = 0.5
MAX_PANEL_WIDTH = 0.5
# |n_s|^2 overflows past s ~ 1400
MAX_CUT = 600.0


@dataclass
class QuadResult:
    """Integral value with its error estimate and the number of integrand calls."""

    value: Union[complex, np.ndarray]
    abs_error_estimate: Union[float, np.ndarray]
    evaluations: int
    converged: bool

    @property
    def max_error(self) -> float:
        return float(np.max(self.abs_error_estimate))


@dataclass
class OscillatorySpec:
    """Integral of exp(i*phase_sign*lam*|n_s|) * amplitude(s) over [lower, infinity)."""

    lam: float
    r1: float
    r2: float
    amplitude: Callable[[np.ndarray], np.ndarray]
    tail_rate: float
    peak_width: Optional[float] = None
    phase_sign: int = 1
    lower: float = 0.0

    def __post_init__(self):
        if not self.tail_rate or self.tail_rate <= 0 or not math.isfinite(self.tail_rate):
            raise PreconditionError(f"tail_rate must be positive, got {self.tail_rate}")
        if self.peak_width is not None and not 0 < self.peak_width <= 2:
            raise InvalidInputError(f"peak_width must be in (0, 2], got {self.peak_width}")
        if self.lam < 0:
            raise InvalidInputError(f"Frequency must be nonnegative, got {self.lam}")
        if self.r1 <= 0 or self.r2 <= 0:
            raise InvalidInputError("Phase radii must be positive")
        if self.phase_sign not in (1, -1):
            raise InvalidInputError("phase_sign must be +1 or -1")
        if self.lower < 0:
            raise InvalidInputError("The lower limit must be nonnegative")


def _evaluate(f, nodes: np.ndarray) -> np.ndarray:
    values = np.asarray(f(nodes))
    if values.ndim == 0 or values.shape[0] != nodes.shape[0]:
        values = np.broadcast_to(values, nodes.shape + values.shape[1:] if values.ndim else nodes.shape)
    return np.array(values)


def _panels(f, lefts: np.ndarray, rights: np.ndarray):
    """Kronrod values and |Kronrod - Gauss| errors for each panel."""
    centers = 0.5 * (lefts + rights)
    halves = 0.5 * (rights - lefts)
    nodes = (centers[:, None] + halves[:, None] * NODES[None, :]).ravel()
    values = _evaluate(f, nodes)
    values = values.reshape((lefts.size, NODES.size) + values.shape[1:])
    extra = (1,) * (values.ndim - 2)
    scale = halves.reshape((-1,) + extra)
    kronrod = scale * np.einsum("k,pk...->p...", KRONROD_WEIGHTS, values)
    gauss = scale * np.einsum("k,pk...->p...", GAUSS_WEIGHTS, values)

    return kronrod, np.abs(kronrod - gauss), nodes.size


def _component_max(errors: np.ndarray) -> np.ndarray:
    return errors.reshape(errors.shape[0], -1).max(axis=1) if errors.ndim > 1 else errors


def adaptive_panels(f,
                    edges: Sequence[float],
                    tol: float,
                    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
                    ) -> QuadResult:
    """Globally adaptive Gauss-Kronrod integration over consecutive panels.

    A panel is accepted once its error is below tol*width/length; the others are
    bisected until the evaluation budget is spent.
    """
    edges = np.asarray(edges, dtype=float)
    length = edges[-1] - edges[0]
    lefts, rights = edges[:-1], edges[1:]
    done_left, done_val, done_err = [], [], []
    evaluations = 0
    while lefts.size:
        vals, errs, count = _panels(f, lefts, rights)
        evaluations += count
        widths = rights - lefts
        worst = _component_max(errs)
        accept = (worst <= tol * widths / length) | (widths <= 1e-13 * max(length, 1.0))
        over_budget = evaluations + 2 * NODES.size * int(np.count_nonzero(~accept)) > max_evaluations
        if over_budget:
            accept[:] = True
        done_left.append(lefts[accept])
        done_val.append(vals[accept])
        done_err.append(errs[accept])
        split = ~accept
        mids = 0.5 * (lefts[split] + rights[split])
        lefts, rights = (np.concatenate([lefts[split], mids]),
                         np.concatenate([mids, rights[split]]))

    order = np.argsort(np.concatenate(done_left), kind="stable")
    values = np.concatenate(done_val)[order]
    errors = np.concatenate(done_err)[order]
    total = values.sum(axis=0)
    error = errors.sum(axis=0)
    converged = bool(np.all(error <= tol))
    if not converged:
        log.warning("Quadrature budget exhausted (error %.3e > tol %.3e)", float(np.max(error)), tol)
    if np.ndim(total) == 0:
        return QuadResult(total.item(), float(error), evaluations, converged)

    return QuadResult(total, error, evaluations, converged)


def integrate_adaptive(f: Callable[[np.ndarray], np.ndarray],
                       a: float,
                       b: float,
                       tol: float = 1e-10,
                       points: Sequence[float] = None,
                       max_evaluations: int = DEFAULT_MAX_EVALUATIONS
                       ) -> QuadResult:
    """Integrate f over [a, b] to absolute tolerance tol."""
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise InvalidInputError(f"Integration limits must be finite with a < b, got [{a}, {b}]")
    if tol <= 0:
        raise InvalidInputError("Tolerance must be positive")
    inner = sorted(p for p in (points or ()) if a < p < b)
    edges = np.unique(np.concatenate([[a], inner, [b]]))

    return adaptive_panels(f, edges, tol, max_evaluations)


def _origin_edges(spec: OscillatorySpec, cut: float) -> np.ndarray:
    """Geometric edges halving from 1 towards the peak/stationary-phase scale."""
    scales = [1.0]
    if spec.peak_width:
        scales.append(spec.peak_width)
    if spec.lam > 0:
        scales.append((spec.lam * spec.r1 * spec.r2) ** -0.5)
    floor = min(scales) / 8.0
    edges = [0.0]
    top = min(1.0, cut)
    point = top
    while point > floor:
        edges.append(point)
        point *= 0.5
    return np.array(edges)


def _phase_edges(spec: OscillatorySpec, start: float, cut: float) -> np.ndarray:
    """Edges at equal phase increments so no panel spans more than half an oscillation."""
    edges = [np.arange(start, cut, MAX_PANEL_WIDTH)]
    if spec.lam > 0:
        step = math.pi / (2.0 * spec.lam)
        first = float(diffractive_distance(spec.r1, spec.r2, start))
        last = float(diffractive_distance(spec.r1, spec.r2, cut))
        count = int((last - first) / step)
        if count > 0:
            phases = first + step * np.arange(1, count + 1)
            ratio = (phases * phases - spec.r1 ** 2 - spec.r2 ** 2) / (2.0 * spec.r1 * spec.r2)
            edges.append(np.arccosh(np.maximum(ratio, 1.0)))
    merged = np.concatenate(edges + [[start, cut]])
    return merged[(merged >= start) & (merged <= cut)]


def _amplitude_bound(spec: OscillatorySpec, s: np.ndarray) -> np.ndarray:
    values = np.abs(np.asarray(spec.amplitude(s)))
    if values.ndim == 0:
        values = np.full(s.shape, float(values))
    return values.reshape(s.size, -1).max(axis=1)


def _choose_cut(spec: OscillatorySpec, tol: float, s_max: Optional[float]):
    """Pick the truncation point and whether the integration-by-parts tail is used."""
    formula = max(TAIL_START, min(math.log(10.0 / tol) / spec.tail_rate, MAX_CUT), spec.lower + TAIL_STEP)
    if s_max is not None:
        candidates = np.array([max(float(s_max), spec.lower + TAIL_STEP)])
    else:
        start = max(TAIL_START, spec.lower + TAIL_STEP)
        candidates = np.append(np.arange(start, formula, TAIL_STEP), formula)
    amplitude = _amplitude_bound(spec, candidates)
    plain = amplitude / spec.tail_rate
    if spec.lam > 0:
        by_parts = amplitude / (spec.lam * diffractive_slope(spec.r1, spec.r2, candidates))
    else:
        by_parts = np.full(candidates.shape, np.inf)
    target = tol / 10.0
    for index, cut in enumerate(candidates):
        if plain[index] <= target or by_parts[index] <= target or index == candidates.size - 1:
            use_parts = by_parts[index] < plain[index]
            return float(cut), use_parts, float(min(plain[index], by_parts[index]))

    return float(candidates[-1]), False, float(plain[-1])


def integrate_oscillatory_s(spec: OscillatorySpec,
                            tol: float = 1e-10,
                            s_max: float = None,
                            max_evaluations: int = DEFAULT_MAX_EVALUATIONS
                            ) -> QuadResult:
    """Integrate exp(i sigma lam |n_s|) psi(s) over [lower, infinity).

    The range is cut at s_max, chosen so the analytic tail bound (or the
    integration-by-parts bound, whose boundary term is then added) stays
    below tol/10.  Panels follow the phase so each covers at most half an
    oscillation, with geometric refinement towards s = 0.
    """
    if tol <= 0:
        raise InvalidInputError("Tolerance must be positive")
    cut, use_parts, tail_error = _choose_cut(spec, tol, s_max)
    sigma = spec.phase_sign

    def integrand(s):
        carrier = np.exp(1j * sigma * spec.lam * diffractive_distance(spec.r1, spec.r2, s))
        values = np.asarray(spec.amplitude(s))
        if values.ndim == 0:
            values = np.full(s.shape, values)
        return carrier.reshape((-1,) + (1,) * (values.ndim - 1)) * values

    pieces = [_phase_edges(spec, spec.lower, cut)]
    if spec.lower == 0:
        pieces.append(_origin_edges(spec, cut))
    edges = np.unique(np.concatenate(pieces))
    body = adaptive_panels(integrand, edges, 0.9 * tol, max_evaluations)
    value = body.value
    if use_parts:
        end = np.array([cut])
        boundary = np.asarray(spec.amplitude(end))
        boundary = boundary.reshape(boundary.shape[1:]) if boundary.ndim else boundary
        phase = np.exp(1j * sigma * spec.lam * float(diffractive_distance(spec.r1, spec.r2, cut)))
        slope = float(diffractive_slope(spec.r1, spec.r2, cut))
        value = value - phase * boundary / (1j * sigma * spec.lam * slope)
        if np.ndim(value) == 0:
            value = complex(value)
    error = body.abs_error_estimate + tail_error
    converged = body.converged and tail_error <= tol / 10.0 * (1 + 1e-12)

    return QuadResult(value, error, body.evaluations + 1, converged)
