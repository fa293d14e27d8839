"""Gaussian-weighted grid, inner products, and homogeneous Hölder norms.

The weighted grid is a staggered uniform-arclength resampling of a profile:
nodes sit at half-integer multiples of the spacing so no node lies on the
rotation axis, and cell edges carry the flux coefficients of the weighted
divergence form. The quadrature weight per node is
    w = r^(n-1) * exp(-|gamma|^2/4) * ds,
the Gaussian weight times the rotational volume element times arc measure.
Weights are handled through their logarithms where underflow matters.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cutoffs import r_tilde

__all__ = ["WeightedGrid", "weighted_inner", "weighted_norm", "HomNorms", "hom_norms"]


@dataclass
class WeightedGrid:
    profile: object
    s: np.ndarray            # staggered nodes
    ds: float
    x: np.ndarray
    r: np.ndarray
    log_g_node: np.ndarray   # log(r^(n-1) e^{-f}) at nodes
    log_g_edge: np.ndarray   # same at the N+1 cell edges
    A2: np.ndarray
    drift: np.ndarray        # <gamma, T>/2 at nodes
    axis_lo: bool            # True when the lower edge is a genuine axis point
    axis_hi: bool

    @property
    def n(self):
        return self.profile.n

    @property
    def n_nodes(self):
        return self.s.size

    @cached_property
    def radius(self):
        return np.hypot(self.x, self.r)

    @cached_property
    def f_potential(self):
        return 0.25 * self.radius**2

    @cached_property
    def r_tilde(self):
        return r_tilde(self.radius)

    @cached_property
    def w(self):
        """Quadrature weights; underflow to zero far out is harmless."""
        with np.errstate(under="ignore"):
            return np.exp(self.log_g_node) * self.ds

    @cached_property
    def weighted_volume(self):
        return float(np.sum(self.w))

    @classmethod
    def from_profile(cls, profile, n_nodes=2000):
        s_lo, s_hi = float(profile.s[0]), float(profile.s[-1])
        ds = (s_hi - s_lo) / n_nodes
        nodes = s_lo + (np.arange(n_nodes) + 0.5) * ds
        edges = s_lo + np.arange(n_nodes + 1) * ds
        spx, spr = profile.splines["x"], profile.splines["r"]
        x, r = spx(nodes), spr(nodes)
        xe, re = spx(edges), spr(edges)
        n = profile.n
        axis_lo = profile.closure in ("compact", "axis")
        axis_hi = profile.closure == "compact"
        with np.errstate(divide="ignore"):
            log_g_node = (n - 1) * np.log(np.maximum(r, 1e-300)) - 0.25 * (x**2 + r**2)
            log_g_edge = (n - 1) * np.log(np.maximum(np.abs(re), 1e-300)) - 0.25 * (xe**2 + re**2)
        if axis_lo:
            log_g_edge[0] = -np.inf
        if axis_hi:
            log_g_edge[-1] = -np.inf
        A2 = profile.splines["A2"](nodes)
        tx, tr = profile.splines["tx"](nodes), profile.splines["tr"](nodes)
        drift = 0.5 * (x * tx + r * tr)
        return cls(profile=profile, s=nodes, ds=ds, x=x, r=r,
                   log_g_node=log_g_node, log_g_edge=log_g_edge,
                   A2=A2, drift=drift, axis_lo=axis_lo, axis_hi=axis_hi)


def weighted_inner(f, g, grid):
    """L2 pairing against the Gaussian-weighted rotational measure."""
    return float(np.sum(np.asarray(f) * np.asarray(g) * grid.w))


def weighted_norm(f, grid):
    f = np.asarray(f)
    return float(np.sqrt(max(np.sum(f * f * grid.w), 0.0)))


@dataclass(frozen=True)
class HomNorms:
    sup_norm: float          # sup r~^gamma |f|
    seminorm: float          # Holder seminorm at weight -(gamma+alpha)
    c0_alpha: float          # their sum
    c1_alpha_minus1: float   # C^{1,alpha}_{hom,-1} norm
    alpha: float
    gamma: float
    pairs_subsampled: bool


def _holder_pieces(values, rt, x, r, alpha, gamma, max_points=1600):
    """(sup r~^g |f|, Holder seminorm with chordal distances). Deterministic
    stride subsampling above max_points; documented in HomNorms."""
    N = values.size
    stride = max(1, int(np.ceil(N / max_points)))
    idx = np.arange(0, N, stride)
    sub = stride > 1
    v, rw, xs, rs = values[idx], rt[idx], x[idx], r[idx]
    sup = float(np.max(rt**gamma * np.abs(values)))
    dv = np.abs(v[:, None] - v[None, :])
    dist = np.hypot(xs[:, None] - xs[None, :], rs[:, None] - rs[None, :])
    wsum = rw[:, None] ** (-(gamma + alpha)) + rw[None, :] ** (-(gamma + alpha))
    np.fill_diagonal(dist, np.inf)
    quot = dv / (wsum * dist**alpha)
    semi = float(np.max(quot))
    return sup, semi, sub


def hom_norms(h, profile_or_grid, alpha=0.5, gamma=1.0, max_points=1600):
    """Discrete homogeneous weighted Hölder norms of a node function.

    Subsamples node pairs (stride) above max_points, per the documented
    non-goal of full pair enumeration on large grids.
    """
    g = profile_or_grid
    h = np.asarray(h, dtype=float)
    rt = g.r_tilde
    x, r = g.x, g.r
    s = g.s
    sup0, semi0, sub = _holder_pieces(h, rt, x, r, alpha, gamma, max_points)
    c0 = sup0 + semi0
    # gradient along arc length for the C^1 composite at weight -1
    dh = np.gradient(h, s, edge_order=2)
    sup_a, semi_a, _ = _holder_pieces(h, rt, x, r, alpha, 1.0, max_points)
    sup_b, semi_b, _ = _holder_pieces(dh, rt, x, r, alpha, 2.0, max_points)
    c1 = (sup_a + semi_a) + (sup_b + semi_b)
    return HomNorms(sup_norm=sup0, seminorm=semi0, c0_alpha=c0,
                    c1_alpha_minus1=c1, alpha=alpha, gamma=gamma,
                    pairs_subsampled=sub)
