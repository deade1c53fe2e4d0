"""
Special-function kernels: Bessel J_m, inverse of J0 on its main lobe, J0 zeros,
Fresnel integrals and the Fresnel gain |G(mu)|.

J_m uses the ascending power series for |x| <= SERIES_LIMIT and the Hankel
asymptotic expansion (with forward recurrence for m >= 2) beyond it. Fresnel
integrals use their power series below 2, adaptive Simpson quadrature between
2 and 6 and the large-argument expansion beyond. All functions are pure.
"""
import math
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np

from config import settings
from models.errors import NumericDomainError
from models.schemas import MainLobeValue

ArrayLike = Union[float, np.ndarray]

SERIES_LIMIT = 12.0
SERIES_TERMS = 80
ASYMPTOTIC_TERMS = 26
FRESNEL_SERIES_LIMIT = 2.0
FRESNEL_ASYMPTOTIC_LIMIT = 6.0


def _series(order: int, x: np.ndarray) -> np.ndarray:
    """J_order(x) = sum_k (-1)^k (x/2)^(2k+order) / (k! (k+order)!)"""
    half = x / 2.0
    term = np.power(half, order) / math.factorial(order)
    total = term.copy()
    q = -(half * half)
    for k in range(1, SERIES_TERMS):
        term = term * q / (k * (k + order))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel(order: int, x: np.ndarray) -> np.ndarray:
    """Large-argument expansion J_v(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), x > 0"""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    converged = np.zeros(x.shape, dtype=bool)
    previous = np.full(x.shape, np.inf)
    for k in range(1, 2 * ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        size = np.abs(term)
        # stop each entry once the series starts to diverge
        converged |= size > previous
        previous = np.where(converged, previous, size)
        contribution = np.where(converged, 0.0, term)
        if k % 2 == 1:
            q = q + (-1.0) ** ((k - 1) // 2) * contribution
        else:
            p = p + (-1.0) ** (k // 2) * contribution
    chi = x - (order / 2.0 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order: int, x: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind J_order(x).

    Accepts scalars or arrays; absolute error stays below 1e-10.
    """
    if isinstance(order, bool) or int(order) != order or order < 0:
        raise NumericDomainError(f"Bessel order must be a non-negative integer, got {order}")
    order = int(order)
    xs = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xs)):
        raise NumericDomainError("Bessel argument must be finite")

    ax = np.abs(xs)
    out = np.empty_like(ax)
    small = (ax <= SERIES_LIMIT) | (ax <= order)
    if np.any(small):
        out[small] = _series(order, ax[small])
    large = ~small
    if np.any(large):
        big = ax[large]
        if order <= 1:
            out[large] = _hankel(order, big)
        else:
            # forward recurrence is stable while order < x
            prev, cur = _hankel(0, big), _hankel(1, big)
            for m in range(1, order):
                prev, cur = cur, (2.0 * m / big) * cur - prev
            out[large] = cur

    if order % 2 == 1:
        out = np.where(xs < 0, -out, out)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _bisect(func, lo: float, hi: float, tol: float) -> float:
    """Root of func on [lo, hi] given a sign change"""
    f_lo = func(lo)
    if f_lo == 0.0:
        return lo
    if func(hi) == 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def _j0_zero(k: int) -> float:
    # McMahon's estimate lies within 0.05 of the k-th zero
    guess = (k - 0.25) * math.pi
    lo, hi = guess - 0.5, guess + 0.5
    return _bisect(lambda t: bessel_j(0, t), lo, hi, 1e-13)


def j0_zeros(count: int) -> List[float]:
    """First `count` positive zeros of J0, strictly increasing"""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise NumericDomainError(f"count must be a positive integer, got {count}")
    return [_j0_zero(k) for k in range(1, int(count) + 1)]


def inv_j0_main_lobe(level: Union[float, MainLobeValue]) -> float:
    """
    Unique y0 in [0, first zero of J0] with J0(y0) = level.

    Found by bisection; monotone decreasing in level.
    """
    value = level.value if isinstance(level, MainLobeValue) else float(level)
    if not (0.0 <= value <= 1.0):
        raise NumericDomainError(f"J0 main-lobe level must lie in [0, 1], got {value}")
    if value == 1.0:
        return 0.0
    first_zero = _j0_zero(1)
    if value == 0.0:
        return first_zero
    return _bisect(lambda t: bessel_j(0, t) - value, 0.0, first_zero, settings.BISECTION_TOL)


def _fresnel_series(x: float) -> Tuple[float, float]:
    """Power series of C and S in a = pi x^2 / 2; accurate for x <= FRESNEL_SERIES_LIMIT"""
    a = math.pi / 2.0 * x * x
    # power_c = (-1)^n a^(2n) / (2n)!, power_s = (-1)^n a^(2n+1) / (2n+1)!
    power_c, power_s = 1.0, a
    c_sum, s_sum = x, x * a / 3.0
    for n in range(1, 40):
        power_c = power_c * -(a * a) / ((2 * n - 1) * (2 * n))
        power_s = power_s * -(a * a) / ((2 * n) * (2 * n + 1))
        c_term = x * power_c / (4 * n + 1)
        s_term = x * power_s / (4 * n + 3)
        c_sum += c_term
        s_sum += s_term
        if abs(c_term) < 1e-18 and abs(s_term) < 1e-18:
            break
    return c_sum, s_sum


def _fresnel_asymptotic(x: float) -> Tuple[float, float]:
    """C = 1/2 + f sin(pi x^2/2) - g cos(.), S = 1/2 - f cos(.) - g sin(.), x >= FRESNEL_ASYMPTOTIC_LIMIT"""
    z = math.pi * x * x
    f = g = 0.0
    f_term = 1.0
    g_term = 1.0 / z
    for k in range(12):
        f += f_term
        g += g_term
        f_term *= -(4 * k + 1) * (4 * k + 3) / (z * z)
        g_term *= -(4 * k + 3) * (4 * k + 5) / (z * z)
    f /= math.pi * x
    g /= math.pi * x
    phase = math.pi / 2.0 * x * x
    sin_p, cos_p = math.sin(phase), math.cos(phase)
    return 0.5 + f * sin_p - g * cos_p, 0.5 - f * cos_p - g * sin_p


def _adaptive_simpson(func, a: float, b: float, tol: float) -> float:
    """Adaptive Simpson quadrature with an explicit stack"""
    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = func(a), func(b)
    m = 0.5 * (a + b)
    fm = func(m)
    stack = [(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = func(lm), func(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth >= 50 or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, eps / 2.0, depth + 1))
            stack.append((m, b, fm, frm, fb, right, eps / 2.0, depth + 1))
    return total


def _fresnel_scalar(x: float) -> Tuple[float, float]:
    if x <= FRESNEL_SERIES_LIMIT:
        return _fresnel_series(x)
    if x >= FRESNEL_ASYMPTOTIC_LIMIT:
        return _fresnel_asymptotic(x)
    c0, s0 = _fresnel_series(FRESNEL_SERIES_LIMIT)
    # integrate cos and sin on panels between consecutive phase multiples of pi
    edges = [FRESNEL_SERIES_LIMIT]
    k = math.floor(FRESNEL_SERIES_LIMIT ** 2) + 1
    while math.sqrt(k) < x:
        edges.append(math.sqrt(k))
        k += 1
    edges.append(x)
    panel_tol = settings.FRESNEL_TOL / max(len(edges) - 1, 1)
    c, s = c0, s0
    for lo, hi in zip(edges[:-1], edges[1:]):
        c += _adaptive_simpson(lambda t: math.cos(math.pi / 2.0 * t * t), lo, hi, panel_tol)
        s += _adaptive_simpson(lambda t: math.sin(math.pi / 2.0 * t * t), lo, hi, panel_tol)
    return c, s


def fresnel(x: float) -> Tuple[float, float]:
    """Fresnel integrals C(x) = int_0^x cos(pi t^2/2) dt and S(x) = int_0^x sin(pi t^2/2) dt"""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise NumericDomainError(f"Fresnel argument must be finite and >= 0, got {x}")
    if x == 0.0:
        return 0.0, 0.0
    return _fresnel_scalar(x)


def g_mu(mu: ArrayLike) -> ArrayLike:
    """|G(mu)| = |C(mu) + jS(mu)| / mu, with the limit 1 at mu = 0"""
    values = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise NumericDomainError("mu must be finite and >= 0")
    flat = values.ravel()
    out = np.empty_like(flat)
    for i, m in enumerate(flat):
        if m < 1e-8:
            out[i] = 1.0
        else:
            c, s = fresnel(m)
            out[i] = math.hypot(c, s) / m
    out = out.reshape(values.shape)
    if np.ndim(mu) == 0:
        return float(out)
    return out
