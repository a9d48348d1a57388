# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels: scalar-loop twins of ``_kernels_py``.

Same contract as the numpy backend; selected automatically at import when
built (see ``kernels``).  The sweeps are Jacobi style: every pointwise solve
reads the frozen previous iterate, so results match the fallback backend to
rounding.
"""

from libc.math cimport fabs, fmax, fmin, pow, sqrt

import numpy as np

name = "compiled"

cdef double RBIG = 1e9
cdef int BISECT_ITERS = 64

cdef enum Family:
    FAM_LINEAR = 0
    FAM_EIKONAL = 1
    FAM_PLAP = 2
    FAM_PK = 3
    FAM_PUCCI = 4
    FAM_INFLAP = 5

_FAMILY_CODES = {
    "linear": FAM_LINEAR,
    "eikonal": FAM_EIKONAL,
    "plap": FAM_PLAP,
    "pk": FAM_PK,
    "pucci": FAM_PUCCI,
    "inflap": FAM_INFLAP,
}


cdef double _powa(double r, double alpha) nogil:
    if alpha == 1.0:
        return r
    if r <= 0.0:
        return 0.0
    return pow(r, alpha)


cdef class _Prob:
    """C-side view of a CompiledProblem."""
    cdef int family, dim, nfree, ndir, ndir_axis, k_eigs
    cdef double h, alpha, shift0, visc, pexp
    cdef bint band_strict
    cdef long[::1] free
    cdef unsigned char[::1] is_band
    # linear
    cdef double[:, ::1] W
    cdef long[:, ::1] nb
    cdef double[::1] own
    # axis arms
    cdef double[:, ::1] hP, hM
    cdef long[:, ::1] nbP, nbM
    # directional second differences
    cdef double[:, ::1] cP, cM, cO
    cdef long[:, ::1] dnbP, dnbM
    # eikonal
    cdef double[::1] bmag, czero

    def __init__(self, cp):
        self.family = _FAMILY_CODES[cp.family]
        self.dim = cp.dim
        self.nfree = cp.nfree
        self.h = cp.h
        self.alpha = cp.alpha
        self.shift0 = cp.shift0
        self.visc = cp.visc
        self.pexp = cp.pexp
        self.k_eigs = cp.k_eigs
        self.ndir_axis = cp.ndir_axis
        self.band_strict = 1 if cp.band_strict else 0
        self.free = np.ascontiguousarray(cp.free, dtype=np.int64)
        self.is_band = np.ascontiguousarray(cp.is_band, dtype=np.uint8)
        if cp.family == "linear":
            self.W = np.ascontiguousarray(cp.W)
            self.nb = np.ascontiguousarray(cp.nb, dtype=np.int64)
            self.own = np.ascontiguousarray(cp.own)
        else:
            self.hP = np.ascontiguousarray(cp.arm_hP)
            self.hM = np.ascontiguousarray(cp.arm_hM)
            self.nbP = np.ascontiguousarray(cp.arm_nbP, dtype=np.int64)
            self.nbM = np.ascontiguousarray(cp.arm_nbM, dtype=np.int64)
            if cp.d2_cP is not None:
                self.cP = np.ascontiguousarray(cp.d2_cP)
                self.cM = np.ascontiguousarray(cp.d2_cM)
                self.cO = np.ascontiguousarray(cp.d2_cO)
                self.dnbP = np.ascontiguousarray(cp.d2_nbP, dtype=np.int64)
                self.dnbM = np.ascontiguousarray(cp.d2_nbM, dtype=np.int64)
                self.ndir = cp.d2_cP.shape[0]
            if cp.family == "eikonal":
                self.bmag = np.ascontiguousarray(cp.bmag)
                self.czero = np.ascontiguousarray(cp.czero)


def _get_prob(cp):
    prob = getattr(cp, "_cy_prob", None)
    if prob is None:
        prob = _Prob(cp)
        cp._cy_prob = prob
    return prob


cdef double _visc_val(_Prob P, Py_ssize_t i, double r, double[::1] u) nogil:
    cdef double acc = 0.0
    cdef double hp, hm
    cdef Py_ssize_t d
    if P.visc == 0.0:
        return 0.0
    for d in range(P.dim):
        hp = P.hP[d, i]
        hm = P.hM[d, i]
        acc += 2.0 * r / (hp * hm) \
            - 2.0 * u[P.nbP[d, i]] / (hp * (hp + hm)) \
            - 2.0 * u[P.nbM[d, i]] / (hm * (hp + hm))
    return P.visc * acc


cdef double _S_node(_Prob P, Py_ssize_t i, double r, double[::1] u) nogil:
    cdef double acc, e, sp, sm, m, dm, dp, phi_m, phi_p, d2, best, s_ax, s_dg
    cdef double tval, tmax, tmin
    cdef Py_ssize_t d, v
    if P.family == FAM_LINEAR:
        acc = P.own[i] * r
        for v in range(P.W.shape[0]):
            acc -= P.W[v, i] * u[P.nb[v, i]]
        return acc
    acc = _visc_val(P, i, r, u)
    if P.family == FAM_EIKONAL:
        e = 0.0
        for d in range(P.dim):
            sp = (u[P.nbP[d, i]] - r) / P.hP[d, i]
            sm = (u[P.nbM[d, i]] - r) / P.hM[d, i]
            m = fmax(fmax(sp, sm), 0.0)
            e += m * m
        e = sqrt(e)
        return acc - P.bmag[i] * e - P.czero[i] * r
    if P.family == FAM_PLAP:
        dm = (r - u[P.nbM[0, i]]) / P.hM[0, i]
        dp = (u[P.nbP[0, i]] - r) / P.hP[0, i]
        phi_m = pow(fabs(dm), P.pexp - 2.0) * dm
        phi_p = pow(fabs(dp), P.pexp - 2.0) * dp
        return acc + 2.0 * (phi_m - phi_p) / (P.hP[0, i] + P.hM[0, i])
    if P.family == FAM_PK:
        if P.k_eigs == P.dim:
            e = 0.0
            for v in range(P.ndir_axis):
                e += P.cP[v, i] * u[P.dnbP[v, i]] + P.cM[v, i] * u[P.dnbM[v, i]] - P.cO[v, i] * r
            return acc - e
        best = -1e308
        for v in range(P.ndir):
            d2 = P.cP[v, i] * u[P.dnbP[v, i]] + P.cM[v, i] * u[P.dnbM[v, i]] - P.cO[v, i] * r
            if d2 > best:
                best = d2
        return acc - best
    if P.family == FAM_PUCCI:
        s_ax = 0.0
        s_dg = 0.0
        for v in range(P.ndir):
            d2 = P.cP[v, i] * u[P.dnbP[v, i]] + P.cM[v, i] * u[P.dnbM[v, i]] - P.cO[v, i] * r
            if d2 > 0.0:
                if v < 2 or P.dim == 1:
                    s_ax += d2
                else:
                    s_dg += d2
        if P.dim == 1:
            return acc - s_ax
        return acc - fmax(s_ax, s_dg)
    # FAM_INFLAP
    tmax = -1e308
    tmin = 1e308
    for d in range(P.dim):
        tval = r + (u[P.nbP[d, i]] - r) * (P.h / P.hP[d, i])
        if tval > tmax: tmax = tval
        if tval < tmin: tmin = tval
        tval = r + (u[P.nbM[d, i]] - r) * (P.h / P.hM[d, i])
        if tval > tmax: tmax = tval
        if tval < tmin: tmin = tval
    return acc - (tmax + tmin - 2.0 * r) / (P.h * P.h)


def residual(cp, ufull):
    cdef _Prob P = _get_prob(cp)
    cdef double[::1] u = np.ascontiguousarray(ufull)
    out = np.empty(P.nfree)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(P.nfree):
            o[i] = _S_node(P, i, u[P.free[i]], u)
    return out


cdef double _solve_blowup(_Prob P, Py_ssize_t i, double[::1] u, double lam_eff, double rhs) nogil:
    cdef double own, load, root, best, g, lo, hi, mid, vown, vload
    cdef Py_ssize_t v, it
    if P.family == FAM_LINEAR:
        own = P.own[i] - lam_eff
        load = rhs
        for v in range(P.W.shape[0]):
            load += P.W[v, i] * u[P.nb[v, i]]
        if own > 0.0:
            return fmin(load / own, RBIG)
        return RBIG
    if P.family == FAM_PK:
        # visc part: value = vown*r - vload
        vown = 0.0
        vload = 0.0
        if P.visc != 0.0:
            for v in range(P.dim):
                vown += P.visc * 2.0 / (P.hP[v, i] * P.hM[v, i])
                vload += P.visc * (
                    2.0 * u[P.nbP[v, i]] / (P.hP[v, i] * (P.hP[v, i] + P.hM[v, i]))
                    + 2.0 * u[P.nbM[v, i]] / (P.hM[v, i] * (P.hP[v, i] + P.hM[v, i]))
                )
        if P.k_eigs == P.dim:
            own = vown - lam_eff
            load = vload + rhs
            for v in range(P.ndir_axis):
                own += P.cO[v, i]
                load += P.cP[v, i] * u[P.dnbP[v, i]] + P.cM[v, i] * u[P.dnbM[v, i]]
            if own > 0.0:
                return fmin(load / own, RBIG)
            return RBIG
        best = -1.0
        for v in range(P.ndir):
            own = P.cO[v, i] + vown - lam_eff
            load = P.cP[v, i] * u[P.dnbP[v, i]] + P.cM[v, i] * u[P.dnbM[v, i]] + vload + rhs
            if own > 0.0:
                root = load / own
            else:
                root = RBIG
            if root > best:
                best = root
        return fmin(best, RBIG)
    # generic bisection on [0, RBIG]
    g = _S_node(P, i, RBIG, u) - lam_eff * _powa(RBIG, P.alpha) - rhs
    if g <= 0.0:
        return RBIG
    lo = 0.0
    hi = RBIG
    for it in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        g = _S_node(P, i, mid, u) - lam_eff * _powa(mid, P.alpha) - rhs
        if g <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def blowup_sweep(cp, ufull, double lam, double rhs):
    cdef _Prob P = _get_prob(cp)
    cdef double[::1] u = np.ascontiguousarray(ufull)
    cdef double lam_eff = lam - P.shift0
    out = np.empty(P.nfree)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(P.nfree):
            o[i] = _solve_blowup(P, i, u, lam_eff, rhs)
            if P.band_strict and P.is_band[i]:
                o[i] = 0.0
    return out


cdef double _solve_descent(_Prob P, Py_ssize_t i, double[::1] u, double ctol) nogil:
    cdef double ui, s_at_u, own, load, root, lo, hi, mid, g
    cdef Py_ssize_t v, it
    ui = u[P.free[i]]
    if P.family == FAM_LINEAR:
        own = P.own[i]
        load = 0.0
        for v in range(P.W.shape[0]):
            load += P.W[v, i] * u[P.nb[v, i]]
        s_at_u = own * ui - load
        if s_at_u <= ctol:
            return ui
        if own > 0.0:
            return fmin(ui, (load + ctol) / own)
        if P.is_band[i]:
            return 0.0
        return ui
    g = _S_node(P, i, ui, u) + P.shift0 * _powa(ui, P.alpha) - ctol
    if g <= 0.0:
        return ui
    lo = 0.0
    hi = ui
    for it in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        g = _S_node(P, i, mid, u) + P.shift0 * _powa(mid, P.alpha) - ctol
        if g <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def descent_sweep(cp, ufull, double ctol):
    cdef _Prob P = _get_prob(cp)
    cdef double[::1] u = np.ascontiguousarray(ufull)
    out = np.empty(P.nfree)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(P.nfree):
            o[i] = _solve_descent(P, i, u, ctol)
            if P.band_strict and P.is_band[i]:
                o[i] = fmin(o[i], 0.0)
    return out
