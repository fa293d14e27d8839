"""Stability operator of the Gaussian functional: assembly and eigenbasis.

On rotationally symmetric functions u(s) the operator reads
    L u = u'' + ((n-1) r'/r - <gamma,T>/2) u' + (|A|^2 + 1/2) u,
self-adjoint against the Gaussian-weighted rotational measure. Assembly uses
the weighted divergence (flux) form on the staggered grid, so conjugation by
sqrt(weight) yields a symmetric tridiagonal matrix whose entries involve only
ratios of adjacent weights (no underflow). Eigenvalues follow the convention
L h = -lambda h, sorted ascending, so unstable modes have lambda < 0.

Far-field eigenfunction values are invisible to any weighted solve (the
weight spans hundreds of orders of magnitude), so each retained mode's tail
is re-solved in unweighted form by inward three-term marching of
(L + lambda) u = 0 from the outer truncation, which is the stable direction
for the polynomially behaving solution.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import GridTooCoarse, SolverFailure
from .weighted import WeightedGrid, weighted_inner, weighted_norm

__all__ = ["OperatorStencil", "SpectralBasis", "assemble_L", "eigensolve",
           "decay_check", "project", "choose_lambda_star"]

_TRUST_LOG = 41.4   # trust back-transformed nodes with w/w_max >= e^-41.4 ~ 1e-18


@dataclass
class OperatorStencil:
    """Tridiagonal realization of the stability operator on a weighted grid."""

    grid: WeightedGrid
    lower: np.ndarray     # coupling to j-1 (lower[0] unused)
    diag: np.ndarray
    upper: np.ndarray     # coupling to j+1 (upper[-1] unused)
    sym_diag: np.ndarray
    sym_off: np.ndarray   # length N-1
    boundary: str

    @property
    def n_nodes(self):
        return self.diag.size

    def apply(self, u):
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.lower[1:] * u[:-1]
        out[:-1] += self.upper[:-1] * u[1:]
        return out


def assemble_L(profile, n_nodes=2000, boundary="dirichlet", grid=None,
               inner_closure="natural"):
    """Assemble the stability operator stencil for a profile.

    boundary applies at the outer truncation edge (axis edges close naturally
    through the vanishing flux coefficient): "dirichlet" (default, the
    eigenmode convention; the Gaussian weight is numerically zero there
    anyway) or "extrapolate" (one-sided, for measuring truncation
    sensitivity; not symmetrizable, so not eigensolvable).

    inner_closure applies only to end profiles, whose inner boundary sits in
    weight-carrying territory: "natural" (zero flux, the self-adjoint closure
    that keeps an unstable direction and the pointwise L H = H behavior) or
    "dirichlet".
    """
    if grid is None:
        grid = WeightedGrid.from_profile(profile, n_nodes=n_nodes)
    N = grid.n_nodes
    if N < 66:
        raise GridTooCoarse(f"need at least 64 interior nodes, got {N - 2}")
    if boundary not in ("dirichlet", "extrapolate"):
        raise ValueError(f"unknown boundary mode {boundary!r}")
    ds2 = grid.ds**2
    lgn, lge = grid.log_g_node, grid.log_g_edge
    with np.errstate(under="ignore"):
        ratio_lo = np.exp(lge[:-1] - lgn)      # E_j / N_j
        ratio_hi = np.exp(lge[1:] - lgn)       # E_{j+1} / N_j
    c = grid.A2 + 0.5
    lower = ratio_lo / ds2
    upper = ratio_hi / ds2
    diag = -(ratio_lo + ratio_hi) / ds2 + c
    # truncation closures (axis edges already have zero flux ratio)
    if not grid.axis_lo:
        if inner_closure == "natural":
            diag[0] += lower[0]                # cut the inner flux entirely
        elif inner_closure == "dirichlet":
            diag[0] -= lower[0]                # ghost = -u_0
        else:
            raise ValueError(f"unknown inner_closure {inner_closure!r}")
    if not grid.axis_hi:
        if boundary == "dirichlet":
            diag[-1] -= upper[-1]
        else:
            diag[-1] += 2 * upper[-1]
            lower[-1] -= upper[-1]
    lower[0] = 0.0
    upper[-1] = 0.0
    with np.errstate(under="ignore"):
        sym_off = np.exp(lge[1:-1] - 0.5 * (lgn[:-1] + lgn[1:])) / ds2
    return OperatorStencil(grid=grid, lower=lower, diag=diag, upper=upper,
                           sym_diag=diag.copy(), sym_off=sym_off,
                           boundary=boundary)


@dataclass
class SpectralBasis:
    """Lowest eigenpairs of L, orthonormal in the weighted inner product."""

    grid: WeightedGrid
    lam: np.ndarray               # ascending, L h_i = -lam_i h_i
    funcs: np.ndarray             # shape (N, k)
    lambda_star: float
    m_star: int
    decay_exponents: np.ndarray   # fitted far-field growth exponents (or nan)
    gram_error: float
    tail_repaired: np.ndarray     # bool per mode

    @property
    def k(self):
        return self.lam.size

    def mode(self, i):
        return self.funcs[:, i]

    def gram(self):
        w = self.grid.w
        return (self.funcs * w[:, None]).T @ self.funcs

    def summary(self):
        return {
            "eigenvalues": self.lam.tolist(),
            "lambda_star": self.lambda_star,
            "m_star": int(self.m_star),
            "decay_exponents": [None if not np.isfinite(d) else float(d)
                                for d in self.decay_exponents],
            "gram_error": self.gram_error,
            "n_nodes": int(self.grid.n_nodes),
        }


def choose_lambda_star(lams, override=None):
    """Pick lambda* with lambda_m < lambda* < lambda_{m+1} and lambda* > 0.

    The documented default rule (largest-gap midpoint over gaps that start
    at eigenvalues below -0.1) is used when the midpoint is positive;
    otherwise fall back to min(0.25, first positive eigenvalue / 2).
    """
    lams = np.asarray(lams, dtype=float)
    if override is not None:
        lam_star = float(override)
    else:
        lam_star = None
        starts = np.where(lams[:-1] < -0.1)[0]
        if starts.size:
            gaps = lams[starts + 1] - lams[starts]
            j = starts[np.argmax(gaps)]
            mid = 0.5 * (lams[j] + lams[j + 1])
            if mid > 0.05:
                lam_star = mid
        if lam_star is None:
            pos = lams[lams > 0]
            lam_star = min(0.25, 0.5 * pos[0]) if pos.size else 0.25
    m = int(np.sum(lams < lam_star))
    if m == 0 or m >= lams.size:
        return lam_star, m
    # keep a safe separation from both neighbors
    if not (lams[m - 1] < lam_star < lams[m]):
        lam_star = 0.5 * (lams[m - 1] + lams[m])
    return float(lam_star), m


def _tail_march(stencil, lam, u_core, j_match):
    """Re-solve the mode tail in unweighted form, marching inward from the
    outer truncation; amplitude-matched to the trusted core near j_match.

    In exact arithmetic the march reproduces the eigenvector's own tail (it
    enforces the same recurrence rows and outer closure, unique up to scale);
    Miller-style two-sided rescaling keeps the active values representable
    through the regime where the inward-decaying solution dominates.
    """
    N = stencil.n_nodes
    lo, dg, up = stencil.lower, stencil.diag + lam, stencil.upper
    u = np.zeros(N)
    u[N - 1] = 1.0
    u[N - 2] = -dg[N - 1] * u[N - 1] / lo[N - 1]
    for j in range(N - 2, j_match, -1):
        u[j - 1] = (-dg[j] * u[j] - up[j] * u[j + 1]) / lo[j]
        m = max(abs(u[j - 1]), abs(u[j]))
        if m > 1e250 or (0.0 < m < 1e-250):
            with np.errstate(over="ignore", under="ignore"):
                u[j - 1 :] /= m
            u[j - 1 :][~np.isfinite(u[j - 1 :])] = 0.0
    win = slice(max(j_match - 3, 0), j_match + 1)
    denom = float(np.dot(u[win], u[win]))
    if denom <= 0 or not np.isfinite(denom):
        return None
    scale = float(np.dot(u_core[win], u[win])) / denom
    if not np.isfinite(scale) or scale == 0.0:
        return None
    with np.errstate(over="ignore", under="ignore"):
        out = u * scale
    if not np.all(np.isfinite(out[j_match:])):
        return None
    return out


def eigensolve(stencil, k=20, lambda_star=None, decay_window=(20.0, 0.8)):
    """Lowest-k eigenpairs of the symmetrized operator, weighted-orthonormal.

    Tails are repaired by the unweighted inward march wherever the weighted
    back-transform is noise-dominated.
    """
    if stencil.boundary != "dirichlet":
        raise SolverFailure("eigensolve requires the dirichlet boundary closure")
    grid = stencil.grid
    N = stencil.n_nodes
    if k > N // 4:
        raise ValueError("k must be at most a quarter of the node count")
    try:
        mu, v = eigh_tridiagonal(stencil.sym_diag, stencil.sym_off,
                                 select="i", select_range=(N - k, N - 1))
    except Exception as exc:  # pragma: no cover - LAPACK failure path
        raise SolverFailure(f"tridiagonal eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(mu)):
        raise SolverFailure("eigensolver returned non-finite eigenvalues", mu)
    lam = -mu[::-1]
    v = v[:, ::-1]

    logw = grid.log_g_node + np.log(grid.ds)
    logw_max = np.max(logw)
    j_trust = int(np.max(np.where(logw >= logw_max - _TRUST_LOG)[0]))
    funcs = np.zeros((N, k))
    repaired = np.zeros(k, dtype=bool)
    with np.errstate(under="ignore", over="ignore"):
        core_all = v * np.exp(-0.5 * logw)[:, None]
    for i in range(k):
        u = np.zeros(N)
        u[: j_trust + 1] = core_all[: j_trust + 1, i]
        if j_trust < N - 1:
            tail = _tail_march(stencil, lam[i], u, j_trust - 4)
            if tail is not None:
                u[j_trust - 4 :] = tail[j_trust - 4 :]
                repaired[i] = True
        nrm = weighted_norm(u, grid)
        if nrm <= 0:
            raise SolverFailure(f"mode {i} has vanishing weighted norm")
        u /= nrm
        jmx = int(np.argmax(np.abs(u[: j_trust + 1])))
        if u[jmx] < 0:
            u = -u
        funcs[:, i] = u

    w = grid.w
    G = (funcs * w[:, None]).T @ funcs
    gram_err = float(np.max(np.abs(G - np.eye(k))))
    lam_star, m_star = choose_lambda_star(lam, override=lambda_star)
    exps = _fit_decay_exponents(grid, funcs, decay_window)
    return SpectralBasis(grid=grid, lam=lam, funcs=funcs, lambda_star=lam_star,
                         m_star=m_star, decay_exponents=exps,
                         gram_error=gram_err, tail_repaired=repaired)


def _fit_decay_exponents(grid, funcs, window):
    """Log-binned envelope slope of |h| against |gamma| on the far field."""
    rad = grid.radius
    lo, hi_frac = window
    hi = hi_frac * float(rad.max())
    sel = (rad >= lo) & (rad <= hi)
    k = funcs.shape[1]
    out = np.full(k, np.nan)
    if sel.sum() < 32 or hi <= lo:
        return out
    logr = np.log(rad[sel])
    bins = np.linspace(logr.min(), logr.max(), 25)
    which = np.clip(np.digitize(logr, bins) - 1, 0, 23)
    for i in range(k):
        vals = np.abs(funcs[sel, i])
        env_r, env_v = [], []
        for b in range(24):
            m = which == b
            if not m.any():
                continue
            vmax = vals[m].max()
            if vmax < 1e-280:
                continue
            env_r.append(0.5 * (bins[b] + bins[b + 1]))
            env_v.append(np.log(vmax))
        if len(env_r) >= 6:
            A = np.vstack([np.ones(len(env_r)), env_r]).T
            coef, *_ = np.linalg.lstsq(A, np.array(env_v), rcond=None)
            out[i] = coef[1]
    return out


def decay_check(basis, delta=0.05, slack=0.1):
    """Per-mode PASS/FAIL of the polynomial-growth bound on the far field.

    The permitted exponent for eigenvalue lambda is 2(lambda + delta + 1/2)
    plus the fixed slack.
    """
    bounds = 2.0 * (basis.lam + delta + 0.5) + slack
    results = []
    for i in range(basis.k):
        e = basis.decay_exponents[i]
        if not np.isfinite(e):
            results.append((False, float("nan"), float(bounds[i])))
        else:
            results.append((bool(e <= bounds[i]), float(e), float(bounds[i])))
    return results


def project(h, basis, grid=None, m=None):
    """Split h into unstable span (lowest m modes) and the remainder."""
    grid = grid if grid is not None else basis.grid
    m = basis.m_star if m is None else int(m)
    h = np.asarray(h, dtype=float)
    coeffs = np.array([weighted_inner(h, basis.funcs[:, i], grid)
                       for i in range(basis.k)])
    h_u = basis.funcs[:, :m] @ coeffs[:m] if m > 0 else np.zeros_like(h)
    h_s = h - h_u
    return h_u, h_s, coeffs
