"""Basis-set construction for the fixture generator.

STO-6G is re-derived by the published recipe: least-squares expansion of
Slater orbitals (zeta=1) in 6 Gaussians, shared 2s/2p exponents, then
scaling by the standard molecular Slater exponents.  The derivation is
validated against the textbook STO-3G hydrogen expansion.

6-31G: the hydrogen set is the standard published one; Li and F sets are
re-optimized here following the 6/3-1 sp-shared split-valence
prescription (atomic SCF energy minimization) because no external basis
tabulation is available in this environment.
"""

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

# standard molecular Slater exponents (1s, 2sp) used by the STO-nG family
SLATER_ZETA = {
    "H": (1.24,),
    "Li": (2.69, 0.80),
    "Be": (3.68, 1.15),
    "B": (4.68, 1.50),
    "C": (5.67, 1.72),
    "N": (6.67, 1.95),
    "O": (7.66, 2.25),
    "F": (8.65, 2.55),
}

Z_OF = {"H": 1, "Li": 3, "Be": 4, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9}


def _radial_overlap(f1, f2):
    with np.errstate(all="ignore"):
        val, _ = quad(lambda r: f1(r) * f2(r) * r * r, 0.0, 60.0, limit=400)
    return val


def _norm_radial(f):
    s = _radial_overlap(f, f)
    if not np.isfinite(s) or s <= 0.0:
        return lambda r: np.inf
    return lambda r, s=s: f(r) / np.sqrt(s)


def _sto_radial(n):
    # zeta = 1 Slater radial, n = 1 (e^-r) or 2 (r e^-r)
    if n == 1:
        return _norm_radial(lambda r: np.exp(-r))
    return _norm_radial(lambda r: r * np.exp(-r))


def _gto_radial(alpha, l):
    if l == 0:
        return _norm_radial(lambda r: np.exp(-alpha * r * r))
    return _norm_radial(lambda r: r * np.exp(-alpha * r * r))


def _best_overlap(exps, targets):
    """Max overlaps of contractions on shared `exps` with target radials.

    targets: list of (n_sto, l); returns (total deficiency, coefs list).
    """
    out_coefs = []
    deficiency = 0.0
    for n_sto, l in targets:
        sto = _sto_radial(n_sto)
        gs = [_gto_radial(a, l) for a in exps]
        s = np.array([_radial_overlap(sto, g) for g in gs])
        S = np.array([[_radial_overlap(gi, gj) for gj in gs] for gi in gs])
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(S))):
            return np.inf, []
        try:
            c = np.linalg.solve(S, s)
        except np.linalg.LinAlgError:
            return np.inf, []
        ov = float(np.sqrt(s @ c))
        c = c / np.sqrt(c @ S @ c)
        out_coefs.append(c)
        deficiency += 1.0 - ov
    return deficiency, out_coefs


def fit_sto_ng(n_gauss, targets, x0):
    """Fit shared exponents to one or two Slater targets; returns (exps, coefs)."""
    def objective(logx):
        d, _ = _best_overlap(np.exp(logx), targets)
        return d

    res = minimize(objective, np.log(np.asarray(x0)), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000,
                            "maxfev": 20000})
    exps = np.sort(np.exp(res.x))[::-1]
    _, coefs = _best_overlap(exps, targets)
    return exps, coefs


_STO_NG_CACHE = {}


def sto_ng_zeta1(n_gauss):
    """(exps1s, c1s), (exps2sp, c2s, c2p) for zeta = 1, n_gauss primitives.

    The 6-Gaussian fit is frozen in sto6g_zeta1.json next to this file;
    other sizes (used for validation) are refit on demand.
    """
    if n_gauss in _STO_NG_CACHE:
        return _STO_NG_CACHE[n_gauss]
    if n_gauss == 6:
        import json
        import os
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                            "sto6g_zeta1.json")
        if os.path.exists(path):
            with open(path) as fh:
                d = json.load(fh)
            out = (np.array(d["exps_1s"]), np.array(d["coefs_1s"]),
                   np.array(d["exps_2sp"]), np.array(d["coefs_2s"]),
                   np.array(d["coefs_2p"]))
            _STO_NG_CACHE[6] = out
            return out
    x0_1s = np.geomspace(0.06, 25.0, n_gauss)
    e1, (c1,) = fit_sto_ng(n_gauss, [(1, 0)], x0_1s)
    x0_2sp = np.geomspace(0.04, 12.0, n_gauss)
    e2, (c2s, c2p) = fit_sto_ng(n_gauss, [(2, 0), (2, 1)], x0_2sp)
    _STO_NG_CACHE[n_gauss] = (e1, c1, e2, c2s, c2p)
    return _STO_NG_CACHE[n_gauss]


def sto_ng_shells(element, n_gauss=6):
    """Scaled STO-nG shells for `element`: [(l, exps, coefs), ...]."""
    e1, c1, e2, c2s, c2p = sto_ng_zeta1(n_gauss)
    zetas = SLATER_ZETA[element]
    shells = [(0, e1 * zetas[0] ** 2, c1)]
    if len(zetas) > 1:
        z2 = zetas[1] ** 2
        shells.append((0, e2 * z2, c2s))
        shells.append((1, e2 * z2, c2p))
    return shells


# Published 6-31G hydrogen set (validated in tests by re-optimization).
H_631G = [
    (0, np.array([18.73113696, 2.825394365, 0.6401216923]),
        np.array([0.03349460434, 0.2347269535, 0.8137573261])),
    (0, np.array([0.1612777588]), np.array([1.0])),
]
