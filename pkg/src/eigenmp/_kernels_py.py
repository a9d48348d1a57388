"""Pure-numpy sweep kernels (fallback backend).

Semantics shared with the compiled backend in ``_speedups``:

* ``residual``: per-free-node scheme value S_i(u) at r = u_i.
* ``blowup_sweep``: one Jacobi sweep of the monotone fixed point for
  S_i(r) - lam * r^alpha = rhs; the pointwise solve returns the supremum of
  the feasible set {r >= 0 : g(r) <= 0}, capped at RBIG (an unbounded
  feasible set is how divergence manifests).
* ``descent_sweep``: one Jacobi sweep toward the maximal subsolution below
  the current iterate (max r <= u_i with S_i(r) <= tol; band nodes may
  instead take the Dirichlet branch r = 0).

All solves read the frozen previous iterate, so both backends produce
identical sweeps up to floating-point associativity.
"""

import numpy as np

name = "python"

RBIG = 1e9
_BISECT_ITERS = 64


def _powa(r, alpha):
    if alpha == 1.0:
        return r
    return np.power(np.maximum(r, 0.0), alpha)


def _visc_terms(cp, r, ufull):
    """(own_coef, load) of the -eps*Laplacian part: value = own*r - load."""
    if cp.visc == 0.0:
        return 0.0, 0.0
    uP = ufull[cp.arm_nbP]
    uM = ufull[cp.arm_nbM]
    hP, hM = cp.arm_hP, cp.arm_hM
    cP = 2.0 / (hP * (hP + hM))
    cM = 2.0 / (hM * (hP + hM))
    cO = 2.0 / (hP * hM)
    own = cp.visc * cO.sum(axis=0)
    load = cp.visc * (cP * uP + cM * uM).sum(axis=0)
    return own, load


def _S(cp, r, ufull):
    """Scheme value S_i(r) given neighbor values from ufull (vectorized)."""
    fam = cp.family
    if fam == "linear":
        load = np.einsum("kn,kn->n", cp.W, ufull[cp.nb])
        return cp.own * r - load
    vown, vload = _visc_terms(cp, r, ufull)
    if fam == "eikonal":
        uP = ufull[cp.arm_nbP]
        uM = ufull[cp.arm_nbM]
        sP = (uP - r) / cp.arm_hP
        sM = (uM - r) / cp.arm_hM
        m = np.maximum(np.maximum(sP, sM), 0.0)
        E = np.sqrt((m**2).sum(axis=0)) if cp.dim > 1 else m[0]
        return -cp.bmag * E - cp.czero * r + vown * r - vload
    if fam == "plap":
        uP = ufull[cp.arm_nbP[0]]
        uM = ufull[cp.arm_nbM[0]]
        hP, hM = cp.arm_hP[0], cp.arm_hM[0]
        dM = (r - uM) / hM
        dP = (uP - r) / hP
        p = cp.pexp
        phi = lambda s: np.abs(s) ** (p - 2.0) * s
        return 2.0 * (phi(dM) - phi(dP)) / (hP + hM) + vown * r - vload
    if fam == "pk":
        d2 = cp.d2_cP * ufull[cp.d2_nbP] + cp.d2_cM * ufull[cp.d2_nbM] - cp.d2_cO * r
        if cp.k_eigs == cp.dim:
            val = -d2[: cp.ndir_axis].sum(axis=0)
        else:
            val = -d2.max(axis=0)
        return val + vown * r - vload
    if fam == "pucci":
        d2 = cp.d2_cP * ufull[cp.d2_nbP] + cp.d2_cM * ufull[cp.d2_nbM] - cp.d2_cO * r
        pos = np.maximum(d2, 0.0)
        if cp.dim == 1:
            val = -pos[0]
        else:
            val = -np.maximum(pos[:2].sum(axis=0), pos[2:].sum(axis=0))
        return val + vown * r - vload
    if fam == "inflap":
        uP = ufull[cp.arm_nbP]
        uM = ufull[cp.arm_nbM]
        h = cp.h
        tP = r + (uP - r) * (h / cp.arm_hP)
        tM = r + (uM - r) * (h / cp.arm_hM)
        both = np.concatenate([tP, tM], axis=0)
        val = -(both.max(axis=0) + both.min(axis=0) - 2.0 * r) / h**2
        return val + vown * r - vload
    raise ValueError("unknown family %r" % fam)


def residual(cp, ufull):
    return np.asarray(_S(cp, ufull[cp.free], ufull), dtype=float)


def _bisect_sup(gfun, hi0):
    """Vectorized sup{r in [0, hi0] : g(r) <= 0}; assumes g(0) <= 0."""
    hi0 = np.asarray(hi0, dtype=float)
    unbounded = gfun(hi0) <= 0.0
    lo = np.zeros_like(hi0)
    hi = hi0.copy()
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        ok = gfun(mid) <= 0.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return np.where(unbounded, hi0, lo)


def blowup_sweep(cp, ufull, lam, rhs):
    lam_eff = lam - cp.shift0
    if cp.family == "linear":
        load = np.einsum("kn,kn->n", cp.W, ufull[cp.nb])
        den = cp.own - lam_eff
        with np.errstate(divide="ignore", invalid="ignore"):
            root = (load + rhs) / den
        new = np.where(den > 0.0, np.minimum(root, RBIG), RBIG)
    elif cp.family == "pk":
        # min over branches of affine functions: feasible set is the union,
        # its sup the largest branch root (alpha = 1 for this family).
        vown, vload = _visc_terms(cp, 0.0, ufull)
        uP = cp.d2_cP * ufull[cp.d2_nbP]
        uM = cp.d2_cM * ufull[cp.d2_nbM]
        if cp.k_eigs == cp.dim:
            own = cp.d2_cO[: cp.ndir_axis].sum(axis=0) + vown - lam_eff
            load = (uP + uM)[: cp.ndir_axis].sum(axis=0) + vload + rhs
            with np.errstate(divide="ignore", invalid="ignore"):
                root = load / own
            new = np.where(own > 0.0, np.minimum(root, RBIG), RBIG)
        else:
            own_v = cp.d2_cO + vown - lam_eff
            load_v = uP + uM + vload + rhs
            with np.errstate(divide="ignore", invalid="ignore"):
                roots = np.where(own_v > 0.0, load_v / own_v, RBIG)
            new = np.minimum(roots.max(axis=0), RBIG)
    else:

        def g(r):
            return _S(cp, r, ufull) - lam_eff * _powa(r, cp.alpha) - rhs

        new = _bisect_sup(g, np.full(cp.nfree, RBIG))
    if cp.band_strict:
        new = np.where(cp.is_band == 1, 0.0, new)
    return new


def descent_sweep(cp, ufull, ctol):
    ui = ufull[cp.free]
    shift0 = cp.shift0
    if cp.family == "linear":
        load = np.einsum("kn,kn->n", cp.W, ufull[cp.nb])
        s_at_u = cp.own * ui - load
        keep = s_at_u <= ctol
        with np.errstate(divide="ignore", invalid="ignore"):
            root = (load + ctol) / cp.own
        pos_own = cp.own > 0.0
        new = np.where(pos_own, np.minimum(ui, root), ui)
        # own <= 0: the PDE branch cannot be improved by descending; band
        # nodes fall back to the Dirichlet branch r = 0.
        stuck = (~pos_own) & (~keep)
        new = np.where(stuck & (cp.is_band == 1), 0.0, new)
        new = np.where(keep, ui, new)
    else:

        def gc(r):
            return _S(cp, r, ufull) + shift0 * _powa(r, cp.alpha) - ctol

        at_u = gc(ui)
        keep = at_u <= 0.0
        lo = np.zeros(cp.nfree)
        hi = ui.copy()
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            ok = gc(mid) <= 0.0
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        new = np.where(keep, ui, lo)
    if cp.band_strict:
        new = np.where(cp.is_band == 1, np.minimum(new, 0.0), new)
    return new
