"""Generating-curve profiles of rotationally symmetric self-shrinkers.

A profile is a sampled curve s -> (x(s), r(s)) in the half plane {r >= 0},
uniformly spaced in arc length, with tangent, normal, curvature, mean
curvature and the independently evaluated shrinker residual H - <gamma,nu>/2
stored per node. The orientation is fixed so the round sphere has H > 0 and
<gamma, nu> > 0.

Profiles come in three closures:
  * "compact": touches the rotation axis at both ends (sphere),
  * "axis":    touches the axis at one end (hyperplane),
  * "end":     an exact conical shrinker end on [inner, S_max]; the inner
               boundary sits where the continuation stops being graphical.
The entire-closure solve (cap on the axis plus conical end) is exposed for
completeness and raises AxisSingularity, since the inward continuation of a
conical end never closes regularly on the axis.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .cutoffs import r_tilde
from .errors import AxisSingularity, NoConvergence
from .runio import FORMAT_VERSION

__all__ = [
    "ConeSpec",
    "GridConfig",
    "ShrinkerProfile",
    "DecayConstants",
    "solve_profile",
    "make_sphere_profile",
    "make_hyperplane_profile",
    "evaluate_geometry",
    "curvature_decay_report",
    "far_field_slope",
]

_AXIS_EPS = 1e-11


@dataclass(frozen=True)
class ConeSpec:
    """Asymptotic cone: generating ray r = sigma * x, hypersurface dim n."""

    n: int
    sigma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("hypersurface dimension n must be an integer >= 2")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("cone slope sigma must be positive and finite")


@dataclass(frozen=True)
class GridConfig:
    n_nodes: int = 12001
    ode_rtol: float = 1e-13
    ode_atol: float = 1e-15
    ode_max_step: float = 0.25
    phi_stop_factor: float = 0.7   # inner stop at phi = factor * atan(sigma)
    closure: str = "end"           # "end" or "entire"
    polish_correction: bool = True


@dataclass(frozen=True)
class DecayConstants:
    C0: float            # sup r_tilde * |A| over |gamma| >= 2
    C1: float            # sup r_tilde^2 * |grad A| over |gamma| >= 2
    radius_C0: float
    radius_C1: float


def _d1(f, ds):
    """4th-order first derivative; f includes 2 ghost samples at each end."""
    return (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * ds)


def _d2(f, ds):
    """4th-order second derivative; f includes 2 ghost samples at each end."""
    return (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * ds**2)


def evaluate_geometry(x, r, ds, n, ghost_lo, ghost_hi, orientation=None):
    """Position-only geometry evaluation (the independent residual route).

    x, r are the node samples; ghost_lo/ghost_hi are (2, 2) arrays of
    (x, r) continuation samples just outside each end, ordered away from
    the interior. Returns per-node tangent, normal, curvatures, H, |A|^2,
    |grad A| and the shrinker residual.
    """
    xe = np.concatenate([ghost_lo[::-1, 0], x, ghost_hi[:, 0]])
    re = np.concatenate([ghost_lo[::-1, 1], r, ghost_hi[:, 1]])
    xp, rp = _d1(xe, ds), _d1(re, ds)
    xpp, rpp = _d2(xe, ds), _d2(re, ds)
    J = np.hypot(xp, rp)
    tx, tr = xp / J, rp / J
    kappa_raw = (xp * rpp - rp * xpp) / J**3
    nux_raw, nur_raw = rp / J, -xp / J
    if orientation is None:
        sgn = np.median(x * nux_raw + r * nur_raw)
        orientation = 1.0 if sgn >= 0 else -1.0
    o = float(orientation)
    nux, nur = o * nux_raw, o * nur_raw
    kappa_p = o * kappa_raw
    rot = np.where(r > _AXIS_EPS, nur / np.where(r > _AXIS_EPS, r, 1.0), kappa_p)
    H = kappa_p + (n - 1) * rot
    A2 = kappa_p**2 + (n - 1) * rot**2
    # arc-length derivative of the principal curvatures (diagnostic |grad A|)
    dk = np.gradient(kappa_p, ds, edge_order=2)
    dr_ = np.gradient(rot, ds, edge_order=2)
    grad_A = np.sqrt(dk**2 + (n - 1) * dr_**2)
    residual = H - 0.5 * (x * nux + r * nur)
    return dict(tx=tx, tr=tr, nux=nux, nur=nur, kappa_p=kappa_p, rot=rot,
                H=H, A2=A2, grad_A=grad_A, residual=residual, orientation=o)


@dataclass
class ShrinkerProfile:
    """Sampled generating curve with curvature data and cone reference."""

    cone: ConeSpec
    s: np.ndarray
    x: np.ndarray
    r: np.ndarray
    tx: np.ndarray
    tr: np.ndarray
    nux: np.ndarray
    nur: np.ndarray
    H: np.ndarray
    A2: np.ndarray
    grad_A: np.ndarray
    shrinker_residual: np.ndarray
    s_max: float                      # truncation radius |gamma|(outer)
    orientation: float
    closure: str                      # "compact" | "axis" | "end"
    correction_coeff: float = 0.0     # first-order far-field correction a
    ghost_lo: np.ndarray | None = None
    ghost_hi: np.ndarray | None = None
    format_version: str = FORMAT_VERSION

    @property
    def n(self):
        return self.cone.n

    @property
    def ds(self):
        return float(self.s[1] - self.s[0])

    @cached_property
    def radius(self):
        return np.hypot(self.x, self.r)

    @cached_property
    def r_tilde(self):
        return r_tilde(self.radius)

    @cached_property
    def f_potential(self):
        """f = |gamma|^2 / 4, exponent of the Gaussian weight."""
        return 0.25 * self.radius**2

    @cached_property
    def drift(self):
        """<gamma, T> / 2, the tangential drift coefficient."""
        return 0.5 * (self.x * self.tx + self.r * self.tr)

    @cached_property
    def splines(self):
        sp = {}
        for name in ("x", "r", "A2", "H", "grad_A", "nux", "nur", "tx", "tr"):
            sp[name] = CubicSpline(self.s, getattr(self, name))
        return sp

    def kappa_profile(self):
        rot = np.where(self.r > _AXIS_EPS, self.nur / np.where(self.r > _AXIS_EPS, self.r, 1.0), np.nan)
        k = self.H - (self.n - 1) * rot
        bad = ~np.isfinite(k)
        if bad.any():
            k[bad] = self.H[bad] / self.n
        return k

    def max_residual(self):
        return float(np.max(np.abs(self.shrinker_residual)))

    def summary(self):
        return {
            "n": self.n,
            "sigma": self.cone.sigma,
            "closure": self.closure,
            "nodes": int(self.s.size),
            "s_max": self.s_max,
            "radius_min": float(self.radius.min()),
            "radius_max": float(self.radius.max()),
            "max_residual": self.max_residual(),
            "correction_coeff": self.correction_coeff,
            "orientation": self.orientation,
            "format_version": self.format_version,
        }


# ---------------------------------------------------------------------------
# exact model profiles

def make_sphere_profile(n=2, n_nodes=4001):
    """Round shrinking sphere of radius sqrt(2 n), axis endpoints both sides."""
    rho = np.sqrt(2.0 * n)
    L = np.pi * rho
    s = np.linspace(0.0, L, n_nodes)
    ds = s[1] - s[0]
    t = s / rho
    x, r = rho * np.cos(t), rho * np.sin(t)
    tg = lambda tt: (rho * np.cos(tt / rho), rho * np.sin(tt / rho))
    ghost_lo = np.array([tg(-ds), tg(-2 * ds)])
    ghost_hi = np.array([tg(L + ds), tg(L + 2 * ds)])
    # closed forms: outward normal, H = n/rho, |A|^2 = n/rho^2 = 1/2
    tx, tr = -np.sin(t), np.cos(t)
    nux, nur = np.cos(t), np.sin(t)
    H = np.full_like(s, n / rho)
    A2 = np.full_like(s, n / rho**2)
    grad_A = np.zeros_like(s)
    residual = H - 0.5 * (x * nux + r * nur)
    cone = ConeSpec(n=n, sigma=1.0)  # placeholder slope; spheres carry no cone
    prof = ShrinkerProfile(cone=cone, s=s, x=x, r=r, s_max=rho, closure="compact",
                           orientation=1.0, ghost_lo=ghost_lo, ghost_hi=ghost_hi,
                           tx=tx, tr=tr, nux=nux, nur=nur, H=H, A2=A2,
                           grad_A=grad_A, shrinker_residual=residual)
    return prof


def make_hyperplane_profile(n=2, n_nodes=4001, length=60.0):
    """Hyperplane through the origin: generating curve x = 0, r in [0, L]."""
    s = np.linspace(0.0, length, n_nodes)
    ds = s[1] - s[0]
    x = np.zeros_like(s)
    r = s.copy()
    ghost_lo = np.array([[0.0, -ds], [0.0, -2 * ds]])
    ghost_hi = np.array([[0.0, length + ds], [0.0, length + 2 * ds]])
    zero = np.zeros_like(s)
    cone = ConeSpec(n=n, sigma=1.0)
    return ShrinkerProfile(cone=cone, s=s, x=x, r=r, s_max=length, closure="axis",
                           orientation=1.0, ghost_lo=ghost_lo, ghost_hi=ghost_hi,
                           tx=zero, tr=np.ones_like(s), nux=np.ones_like(s),
                           nur=zero, H=zero, A2=zero, grad_A=zero,
                           shrinker_residual=zero.copy())


# ---------------------------------------------------------------------------
# the shrinker ODE in arc length

def _rhs(t, y, n, sgn):
    x, r, phi = y
    c, s_ = np.cos(phi), np.sin(phi)
    if r < 1e-13:
        dphi = x / (2.0 * n) * s_
    else:
        dphi = 0.5 * (x * s_ - r * c) + (n - 1) * c / r
    return (sgn * c, sgn * s_, sgn * dphi)


def _far_field_state(sigma, n, S, a):
    """(x, r, phi) on the end r = sigma x + a/x + b/x^3 at |gamma| = S."""
    b = -a * (1.0 / (1 + sigma**2) + (n - 1) / (2 * sigma**2))
    x = S / np.sqrt(1 + sigma**2)
    for _ in range(12):
        r = sigma * x + a / x + b / x**3
        g = np.hypot(x, r) - S
        dr = sigma - a / x**2 - 3 * b / x**4
        x -= g / ((x + r * dr) / np.hypot(x, r))
    r = sigma * x + a / x + b / x**3
    rp = sigma - a / x**2 - 3 * b / x**4
    return x, r, np.arctan2(rp, 1.0)


def _integrate_end(cone, s_max, a, rtol, atol, phi_stop, max_step=0.25):
    """Inward integration of the conical end until the graphing angle stop.

    The step cap keeps the dense-output interpolant accurate enough that the
    finite-difference residual evaluation is not interpolation-limited.
    """
    y0 = _far_field_state(cone.sigma, cone.n, s_max, a)
    ev_stop = lambda t, y, n, sgn: y[2] - phi_stop
    ev_stop.terminal, ev_stop.direction = True, -1
    ev_axis = lambda t, y, n, sgn: y[1] - 1e-8
    ev_axis.terminal, ev_axis.direction = True, -1
    sol = solve_ivp(_rhs, (0.0, 6.0 * s_max), y0, args=(cone.n, -1),
                    method="DOP853", rtol=rtol, atol=atol, max_step=max_step,
                    events=(ev_stop, ev_axis), dense_output=True)
    if not sol.success:
        raise NoConvergence(f"end integration failed: {sol.message}")
    if len(sol.t_events[0]) == 0:
        raise NoConvergence("inner stop angle never reached; S_max too small?")
    return sol


def _extrapolated_slope(xs, rs):
    """Limit of r/x as x -> infinity, Richardson in 1/x^2."""
    z = 1.0 / xs**2
    y = rs / xs
    A = np.vstack([np.ones_like(z), z, z * z]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef[0]


def solve_profile(cone, s_max, grid=GridConfig()):
    """Solve the shrinker ODE for the profile asymptotic to the given cone.

    closure "end" returns the exact shrinker end on [inner, s_max] (the
    object that exists); closure "entire" attempts the axis-closure bracket
    and raises AxisSingularity, since the rigid inward continuation of a
    conical end never closes regularly on the axis.
    """
    if s_max < 10.0:
        raise ValueError("S_max must give |gamma(S_max)| >= 10")
    n, sigma = cone.n, cone.sigma
    a0 = (n - 1) / sigma
    phi_stop = grid.phi_stop_factor * np.arctan(sigma)

    if grid.closure == "entire":
        _attempt_entire_closure(cone, s_max, grid)

    a_star = a0
    if grid.polish_correction:
        a_star = _polish_correction(cone, s_max, grid, a0, phi_stop)

    sol = _integrate_end(cone, s_max, a_star, grid.ode_rtol, grid.ode_atol,
                         phi_stop, grid.ode_max_step)
    s_total = sol.t[-1]
    N = grid.n_nodes
    svals = np.linspace(0.0, s_total, N)   # s = 0 at the inner boundary
    ds = svals[1] - svals[0]
    Y = sol.sol(s_total - svals)           # dense solution is inward-parametrized
    x, r, phi = Y

    # ghosts on both sides by continuing the exact integrated solution
    outer_state = sol.sol(0.0)
    ext_out = solve_ivp(_rhs, (0.0, 2.5 * ds), outer_state, args=(n, +1),
                        method="DOP853", rtol=grid.ode_rtol, atol=grid.ode_atol,
                        dense_output=True)
    go1, go2 = ext_out.sol(ds), ext_out.sol(2 * ds)
    ghost_hi = np.array([[go1[0], go1[1]], [go2[0], go2[1]]])
    inner_state = sol.sol(s_total)
    ext = solve_ivp(_rhs, (0.0, 2.5 * ds), inner_state, args=(n, -1),
                    method="DOP853", rtol=grid.ode_rtol, atol=grid.ode_atol,
                    dense_output=True)
    g1 = ext.sol(ds)
    g2 = ext.sol(2 * ds)
    ghost_lo = np.array([[g1[0], g1[1]], [g2[0], g2[1]]])

    geo = evaluate_geometry(x, r, ds, n, ghost_lo, ghost_hi)
    prof = ShrinkerProfile(cone=cone, s=svals, x=x, r=r, s_max=s_max, closure="end",
                           orientation=geo["orientation"],
                           correction_coeff=a_star,
                           ghost_lo=ghost_lo, ghost_hi=ghost_hi,
                           **{k: geo[k] for k in
                              ("tx", "tr", "nux", "nur", "H", "A2", "grad_A")},
                           shrinker_residual=geo["residual"])
    return prof


def _polish_correction(cone, s_max, grid, a0, phi_stop):
    """Secant polish of the first-order correction coefficient.

    The interior is provably insensitive to `a` (the conical end is rigid),
    so this only absorbs the truncated-series boundary error: the residual
    polished quantity is the extrapolated far-field slope against sigma.
    """
    sigma = cone.sigma

    def slope_err(a):
        sol = _integrate_end(cone, s_max, a, 1e-10, 1e-12, phi_stop)
        ss = np.linspace(0.0, 0.35 * sol.t[-1], 400)
        x, r, _ = sol.sol(ss)
        return _extrapolated_slope(x, r) - sigma

    da = 0.25 * (1 + abs(a0))
    f0, f1 = slope_err(a0), slope_err(a0 + da)
    if f1 == f0:
        return a0
    a_new = a0 - f0 * da / (f1 - f0)
    if not np.isfinite(a_new) or abs(a_new - a0) > 10 * (1 + abs(a0)):
        return a0
    return float(a_new)


def _attempt_entire_closure(cone, s_max, grid):
    """Bracket the correction coefficient for regular axis closure.

    The continuation's behavior at the axis is classified over an expanding
    bracket; no sign change can occur (the interior is rigid), so this
    terminates in AxisSingularity carrying the diagnostic sweep.
    """
    n = cone.n
    phi_probe = 0.25 * np.arctan(cone.sigma)

    def classify(a):
        try:
            sol = _integrate_end(cone, s_max, a, 1e-9, 1e-11, phi_probe)
        except NoConvergence:
            return np.nan
        x, r, phi = sol.y[:, -1]
        # signed functional: regular closure would have phi -> pi/2 as r -> 0
        return (phi - np.pi / 2) - x * r / (2.0 * n)

    a0 = (n - 1) / cone.sigma
    sweep = []
    width = 2.0
    g_lo = classify(a0 - width)
    g_hi = classify(a0 + width)
    for _ in range(6):
        sweep.append((a0 - width, g_lo, a0 + width, g_hi))
        if np.isfinite(g_lo) and np.isfinite(g_hi) and np.sign(g_lo) != np.sign(g_hi):
            # would bisect here; no known cone reaches this branch
            return
        width *= 3.0
        g_lo, g_hi = classify(a0 - width), classify(a0 + width)
    raise AxisSingularity(
        "the inward continuation of the conical end never closes regularly "
        "on the axis (no entire rotationally symmetric shrinker for this cone)",
        sweep)


# ---------------------------------------------------------------------------
# diagnostics

def curvature_decay_report(profile, min_radius=2.0):
    """Measured decay constants sup r~|A| and sup r~^2 |grad A| on the tail."""
    rad = profile.radius
    mask = rad >= min_radius
    if not mask.any():
        return DecayConstants(np.inf, np.inf, np.nan, np.nan)
    rt = profile.r_tilde[mask]
    q0 = rt * np.sqrt(profile.A2[mask])
    q1 = rt**2 * profile.grad_A[mask]
    i0, i1 = int(np.argmax(q0)), int(np.argmax(q1))
    return DecayConstants(C0=float(q0[i0]), C1=float(q1[i1]),
                          radius_C0=float(rad[mask][i0]),
                          radius_C1=float(rad[mask][i1]))


def far_field_slope(profile, radius=50.0, window=0.6):
    """(extrapolated slope error, raw ratio error) measured at |gamma|=radius."""
    rad = profile.radius
    sel = (rad >= window * radius) & (rad <= radius) & (profile.x > 0)
    if sel.sum() < 8:
        raise ValueError("not enough tail nodes below the requested radius")
    sig_est = _extrapolated_slope(profile.x[sel], profile.r[sel])
    i = int(np.argmin(np.abs(rad - radius)))
    raw = profile.r[i] / profile.x[i] - profile.cone.sigma
    return float(abs(sig_est - profile.cone.sigma)), float(abs(raw))
