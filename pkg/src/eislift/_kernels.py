"""Hot numeric inner loops, JIT-compiled with numba when available.

Every kernel has a pure-numpy twin.  Set ``EISLIFT_PURE_NUMPY=1`` in the
environment to force the numpy path (the package also falls back to it
automatically when numba cannot be imported).  ``python -m eislift.bench``
times both paths on representative workloads.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("EISLIFT_PURE_NUMPY", "") == "1"

try:
    if _FORCE_NUMPY:
        raise ImportError("numpy path forced by EISLIFT_PURE_NUMPY")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# ---------------------------------------------------------------------------
# pair integrals on a shared log-t grid
#
# For a batch of coordinate pairs (v, w) compute
#     A = int t^(-1) exp(-pi*y*((v/t)^2 + (w t)^2)) dt/t
#     B = int t^(+1) exp(-pi*y*((v/t)^2 + (w t)^2)) dt/t
# by the trapezoid rule on t = exp(nodes); `wts` carries h and any endpoint
# weights.  The integrand decays doubly exponentially on both ends, so the
# grid is fixed by the caller from its own tail bound.
# ---------------------------------------------------------------------------


def _pair_logt_integrals_numpy(v, w, y, nodes, wts):
    t = np.exp(nodes)[None, :]
    ex = np.exp(-np.pi * y * ((v[:, None] / t) ** 2 + (w[:, None] * t) ** 2))
    a = (ex / t) @ wts
    b = (ex * t) @ wts
    return a, b


@njit(cache=True)
def _pair_logt_integrals_numba(v, w, y, nodes, wts):  # pragma: no cover
    n = v.shape[0]
    m = nodes.shape[0]
    a = np.zeros(n)
    b = np.zeros(n)
    for i in range(n):
        vi = v[i]
        wi = w[i]
        sa = 0.0
        sb = 0.0
        for j in range(m):
            t = np.exp(nodes[j])
            q = vi / t
            r = wi * t
            e = np.exp(-np.pi * y * (q * q + r * r)) * wts[j]
            sa += e / t
            sb += e * t
        a[i] = sa
        b[i] = sb
    return a, b


def pair_logt_integrals(v, w, y, nodes, wts):
    v = np.ascontiguousarray(v, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    wts = np.ascontiguousarray(wts, dtype=np.float64)
    if HAVE_NUMBA:
        return _pair_logt_integrals_numba(v, w, float(y), nodes, wts)
    return _pair_logt_integrals_numpy(v, w, float(y), nodes, wts)


# ---------------------------------------------------------------------------
# folded theta quadrature over (u, r) for the weight-N torus period
#
# For each pair (v1,v2,w1,w2) accumulate over the grid t1 = u*sqrt(r),
# t2 = u/sqrt(r):
#     sum  (v1/t1 + w1*t1)(v2/t2 + w2*t2) * u^(-4s)
#          * exp(-pi*y*((v1/t1)^2+(v2/t2)^2+(w1*t1)^2+(w2*t2)^2)) * wu*wr
# Returns one complex number per pair (complex because of the u^(-4s)).
# ---------------------------------------------------------------------------


def _phi_pair_grid_numpy(v1, v2, w1, w2, y, s2, u_nodes, u_wts, r_nodes, r_wts):
    u = np.exp(u_nodes)
    sr = np.exp(0.5 * r_nodes)
    t1 = u[:, None] * sr[None, :]
    t2 = u[:, None] / sr[None, :]
    upow = np.exp(np.multiply.outer(u_nodes, np.ones_like(r_nodes)) * (-2.0 * s2))
    wgrid = np.multiply.outer(u_wts, r_wts)
    out = np.empty(v1.shape[0], dtype=np.complex128)
    for i in range(v1.shape[0]):
        q1 = v1[i] / t1
        q2 = v2[i] / t2
        p1 = w1[i] * t1
        p2 = w2[i] * t2
        val = (q1 + p1) * (q2 + p2) * np.exp(
            -np.pi * y * (q1 * q1 + q2 * q2 + p1 * p1 + p2 * p2)
        )
        out[i] = np.sum(val * upow * wgrid)
    return out


@njit(cache=True)
def _phi_pair_grid_numba(v1, v2, w1, w2, y, s2, u_nodes, u_wts, r_nodes, r_wts):  # pragma: no cover
    n = v1.shape[0]
    nu = u_nodes.shape[0]
    nr = r_nodes.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for a in range(nu):
            u = np.exp(u_nodes[a])
            upow = np.exp(-2.0 * s2 * u_nodes[a])
            for b in range(nr):
                sr = np.exp(0.5 * r_nodes[b])
                t1 = u * sr
                t2 = u / sr
                q1 = v1[i] / t1
                q2 = v2[i] / t2
                p1 = w1[i] * t1
                p2 = w2[i] * t2
                g = np.exp(-np.pi * y * (q1 * q1 + q2 * q2 + p1 * p1 + p2 * p2))
                acc += (q1 + p1) * (q2 + p2) * g * upow * u_wts[a] * r_wts[b]
        out[i] = acc
    return out


def phi_pair_grid(v1, v2, w1, w2, y, s2, u_nodes, u_wts, r_nodes, r_wts):
    v1 = np.ascontiguousarray(v1, dtype=np.float64)
    v2 = np.ascontiguousarray(v2, dtype=np.float64)
    w1 = np.ascontiguousarray(w1, dtype=np.float64)
    w2 = np.ascontiguousarray(w2, dtype=np.float64)
    u_nodes = np.ascontiguousarray(u_nodes, dtype=np.float64)
    u_wts = np.ascontiguousarray(u_wts, dtype=np.float64)
    r_nodes = np.ascontiguousarray(r_nodes, dtype=np.float64)
    r_wts = np.ascontiguousarray(r_wts, dtype=np.float64)
    s2c = complex(s2)
    if HAVE_NUMBA:
        return _phi_pair_grid_numba(v1, v2, w1, w2, float(y), s2c, u_nodes, u_wts, r_nodes, r_wts)
    return _phi_pair_grid_numpy(v1, v2, w1, w2, float(y), s2c, u_nodes, u_wts, r_nodes, r_wts)


# ---------------------------------------------------------------------------
# singular-slice sums on a (t1, t2) grid
#
# slice_sum_grid computes, for every grid point,
#     sum_i coef_i * (x1_i * t1)^pw * (x2_i * t2)^pw
#           * exp(-pi * scale * ((x1_i*t1)^2 + (x2_i*t2)^2))
# with pw = +1 (w-type slice) or -1 (v-type slice, pass 1/t as the grid).
# The slice lattices carry odd weights, so the sum must be accumulated over
# the full symmetric point set to keep the analytic cancellation.
# ---------------------------------------------------------------------------


def _slice_sum_grid_numpy(x1, x2, coef, scale, t1, t2):
    a1 = np.multiply.outer(x1, t1)
    a2 = np.multiply.outer(x2, t2)
    val = a1 * a2 * np.exp(-np.pi * scale * (a1 * a1 + a2 * a2))
    return np.tensordot(coef, val, axes=(0, 0))


@njit(cache=True)
def _slice_sum_grid_numba(x1, x2, coef, scale, t1, t2):  # pragma: no cover
    n = x1.shape[0]
    m = t1.shape[0]
    out = np.zeros(m)
    for j in range(m):
        acc = 0.0
        for i in range(n):
            a1 = x1[i] * t1[j]
            a2 = x2[i] * t2[j]
            acc += coef[i] * a1 * a2 * np.exp(-np.pi * scale * (a1 * a1 + a2 * a2))
        out[j] = acc
    return out


def slice_sum_grid(x1, x2, coef, scale, t1, t2):
    x1 = np.ascontiguousarray(x1, dtype=np.float64)
    x2 = np.ascontiguousarray(x2, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    t1 = np.ascontiguousarray(t1, dtype=np.float64)
    t2 = np.ascontiguousarray(t2, dtype=np.float64)
    if HAVE_NUMBA:
        return _slice_sum_grid_numba(x1, x2, coef, float(scale), t1, t2)
    return _slice_sum_grid_numpy(x1, x2, coef, float(scale), t1, t2)


# ---------------------------------------------------------------------------
# Epstein-type direct lattice sum  sum_i  1 / (N_i * |N_i|^(2s))
# where N_i = (v1*tau + w1)(v2*taubar2 + w2) is passed in factored form.
# ---------------------------------------------------------------------------


def _norm_power_sum_numpy(n1, n2, s2):
    prod = n1 * n2
    return np.sum(1.0 / (prod * np.abs(prod) ** s2))


@njit(cache=True)
def _norm_power_sum_numba(n1, n2, s2):  # pragma: no cover
    acc = 0.0 + 0.0j
    for i in range(n1.shape[0]):
        prod = n1[i] * n2[i]
        acc += 1.0 / (prod * np.abs(prod) ** s2)
    return acc


def norm_power_sum(n1, n2, s2):
    n1 = np.ascontiguousarray(n1, dtype=np.complex128)
    n2 = np.ascontiguousarray(n2, dtype=np.complex128)
    if HAVE_NUMBA and abs(complex(s2).imag) == 0.0:
        return complex(_norm_power_sum_numba(n1, n2, float(complex(s2).real)))
    return complex(_norm_power_sum_numpy(n1, n2, complex(s2)))
