import numpy as np
from scipy.special import erfc

_SQRT2 = np.sqrt(2.0)


def maybe_jit(func):
    return func


def qual_terms(pred, sigma, c, eps_plus, eps_minus):
    pred = np.asarray(pred, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    c = np.asarray(c, dtype=float)
    w = 1.0 - eps_plus - eps_minus
    pos = sigma > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(pos, (c - pred) / (np.where(pos, sigma, 1.0) * _SQRT2), 0.0)
        step = np.where(pred < c, 1.0, np.where(pred > c, 0.0, 0.5))
        cdf = np.where(pos, 0.5 * erfc(-z), step)
        sf = np.where(pos, 0.5 * erfc(z), 1.0 - step)
        p = eps_plus + w * cdf
        hi = -np.log1p(-(eps_minus + w * sf))
        lo = np.where(p > 0.0, -np.log(np.where(p > 0.0, p, 1.0)), np.inf)
    out = np.where(p > 0.5, hi, lo)
    out[np.isnan(pred)] = np.inf
    return out


def qual_nll(pred, sigma, c, eps_plus, eps_minus):
    return float(qual_terms(pred, sigma, c, eps_plus, eps_minus).sum())


def chi2_nll(y, f, sigma):
    f = np.asarray(f, dtype=float)
    if np.isnan(f).any():
        return np.inf
    r = (np.asarray(y) - f) / np.asarray(sigma)
    return float(np.sum(0.5 * r * r))


def reduce_bindings(values, lhs_row, lhs_const, rhs_row, rhs_const, sign,
                    mode, i0, w, lo, hi):
    n = lhs_row.shape[0]
    out = np.empty(n)
    at = mode == 0
    if at.any():
        j = i0[at]

        def side(rows, const):
            r = rows[at]
            safe = np.where(r >= 0, r, 0)
            a = values[safe, j]
            jn = np.minimum(j + 1, values.shape[1] - 1)
            ww = w[at]
            a = np.where(ww != 0.0, a + ww * (values[safe, jn] - a), a)
            return np.where(r >= 0, a, const[at])

        out[at] = sign[at] * (side(lhs_row, lhs_const) - side(rhs_row, rhs_const))
    for k in np.flatnonzero(~at):
        a = values[lhs_row[k], lo[k]:hi[k]] if lhs_row[k] >= 0 else lhs_const[k]
        b = values[rhs_row[k], lo[k]:hi[k]] if rhs_row[k] >= 0 else rhs_const[k]
        e = sign[k] * (np.asarray(a) - np.asarray(b))
        e = np.broadcast_to(e, (hi[k] - lo[k],))
        out[k] = e.max() if mode[k] == 1 else e.min()
    return out


def biphasic_secondary(amp, b, tau_b, d, tau_d, delays):
    v = amp * (1.0 + b * np.exp(-delays / tau_b) - d * np.exp(-delays / tau_d))
    return np.maximum(v, 0.0)


def rk4_fixed(rhs, x0, t_grid, n_sub, params):
    x = np.array(x0, dtype=float)
    out = np.empty((len(t_grid), x.size))
    out[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_loop(rhs, x, out, t_grid, n_sub, params)


def _rk4_loop(rhs, x, out, t_grid, n_sub, params):
    for i in range(len(t_grid) - 1):
        h = (t_grid[i + 1] - t_grid[i]) / n_sub[i]
        t = t_grid[i]
        for _ in range(n_sub[i]):
            k1 = rhs(t, x, params)
            k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1, params)
            k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2, params)
            k4 = rhs(t + h, x + h * k3, params)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + h
        if not np.all(np.isfinite(x)):
            out[i + 1:] = np.nan
            return out, False
        out[i + 1] = x
    return out, True
