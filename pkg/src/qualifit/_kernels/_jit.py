import math

import numpy as np
from numba import njit

_SQRT2 = math.sqrt(2.0)


def maybe_jit(func):
    return njit(cache=True, nogil=True)(func)


@njit(cache=True, nogil=True)
def _term(pred, sigma, c, eps_plus, eps_minus):
    if math.isnan(pred):
        return math.inf
    w = 1.0 - eps_plus - eps_minus
    if sigma > 0.0:
        z = (c - pred) / (sigma * _SQRT2)
        cdf = 0.5 * math.erfc(-z)
        sf = 0.5 * math.erfc(z)
    elif pred < c:
        cdf, sf = 1.0, 0.0
    elif pred > c:
        cdf, sf = 0.0, 1.0
    else:
        cdf, sf = 0.5, 0.5
    p = eps_plus + w * cdf
    if p > 0.5:
        return -math.log1p(-(eps_minus + w * sf))
    if p <= 0.0:
        return math.inf
    return -math.log(p)


@njit(cache=True, nogil=True)
def qual_terms(pred, sigma, c, eps_plus, eps_minus):
    n = pred.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = _term(pred[i], sigma[i], c[i], eps_plus[i], eps_minus[i])
    return out


@njit(cache=True, nogil=True)
def qual_nll(pred, sigma, c, eps_plus, eps_minus):
    total = 0.0
    for i in range(pred.shape[0]):
        total += _term(pred[i], sigma[i], c[i], eps_plus[i], eps_minus[i])
    return total


@njit(cache=True, nogil=True)
def chi2_nll(y, f, sigma):
    total = 0.0
    for i in range(y.shape[0]):
        if math.isnan(f[i]):
            return math.inf
        r = (y[i] - f[i]) / sigma[i]
        total += 0.5 * r * r
    return total


@njit(cache=True, nogil=True)
def reduce_bindings(values, lhs_row, lhs_const, rhs_row, rhs_const, sign,
                    mode, i0, w, lo, hi):
    n = lhs_row.shape[0]
    out = np.empty(n)
    for k in range(n):
        if mode[k] == 0:
            j = i0[k]
            a = lhs_const[k]
            if lhs_row[k] >= 0:
                a = values[lhs_row[k], j]
                if w[k] != 0.0:
                    a = a + w[k] * (values[lhs_row[k], j + 1] - a)
            b = rhs_const[k]
            if rhs_row[k] >= 0:
                b = values[rhs_row[k], j]
                if w[k] != 0.0:
                    b = b + w[k] * (values[rhs_row[k], j + 1] - b)
            out[k] = sign[k] * (a - b)
        else:
            best = math.nan
            for j in range(lo[k], hi[k]):
                a = lhs_const[k] if lhs_row[k] < 0 else values[lhs_row[k], j]
                b = rhs_const[k] if rhs_row[k] < 0 else values[rhs_row[k], j]
                e = sign[k] * (a - b)
                if math.isnan(e):
                    best = math.nan
                    break
                if j == lo[k]:
                    best = e
                elif mode[k] == 1:
                    if e > best:
                        best = e
                elif e < best:
                    best = e
            out[k] = best
    return out


@njit(cache=True, nogil=True)
def biphasic_secondary(amp, b, tau_b, d, tau_d, delays):
    out = np.empty(delays.shape[0])
    for i in range(delays.shape[0]):
        t = delays[i]
        v = amp * (1.0 + b * math.exp(-t / tau_b) - d * math.exp(-t / tau_d))
        out[i] = 0.0 if v < 0.0 else v
    return out


@njit(cache=True, nogil=True)
def rk4_fixed(rhs, x0, t_grid, n_sub, params):
    n_t = t_grid.shape[0]
    dim = x0.shape[0]
    out = np.empty((n_t, dim))
    x = x0.copy()
    out[0] = x
    for i in range(n_t - 1):
        h = (t_grid[i + 1] - t_grid[i]) / n_sub[i]
        t = t_grid[i]
        for _ in range(n_sub[i]):
            k1 = rhs(t, x, params)
            k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1, params)
            k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2, params)
            k4 = rhs(t + h, x + h * k3, params)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + h
        for j in range(dim):
            if not math.isfinite(x[j]):
                out[i + 1:] = math.nan
                return out, False
        out[i + 1] = x
    return out, True
