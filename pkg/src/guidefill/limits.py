"""Executable continuum-limit theory for the fill scheme.

As the pixel size h goes to zero with the ball radius fixed at r pixels,
filling a half-plane with a fixed guide direction transports the boundary
trace along a computable direction g*: the weighted center of mass of the
"readable" half of the ball.  This module builds those half-ball sets,
evaluates g* and the resulting angle map theta -> theta*, compares against
the continuum integral variant of the same average, and measures empirical
convergence orders of the engine toward its own predicted limit.

Conventions: y grows downward, known data sits above (negative y), and
angles are measured mod pi in (0, pi).  g is normalized to unit length
here; the magnitude of a raw guide vector only rescales mu, so callers
pass the effective mu explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .grid import INPAINT, READABLE

KINDS = ("axis_ball", "rotated_ball")
SEL_TOL = 1e-12


class EmptySetError(ValueError):
    """The half ball holds no points (tiny r with an oblique rotation)."""


class QuadratureError(ArithmeticError):
    """The half-disk quadrature failed its self-consistency tolerance."""


@dataclass(frozen=True)
class HalfBallSet:
    kind: str
    r: int
    g: tuple[float, float]
    points: np.ndarray  # (K, 2) positions with y <= -1


@dataclass(frozen=True)
class LimitPrediction:
    g_star: tuple[float, float]
    theta_star: float  # radians in (0, pi)


def _unit(g) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    n = math.hypot(float(g[0]), float(g[1]))
    if n == 0.0:
        raise ValueError("limit computations need a nonzero guide direction")
    return g / n


def _angle_mod_pi(vx: float, vy: float) -> float:
    a = math.atan2(vy, vx)
    return a + math.pi if a <= 0.0 else a


def half_ball(kind: str, r: int, g=(0.0, 1.0)) -> HalfBallSet:
    """Readable half of the fill ball on an ideal straight front.

    axis_ball: integer offsets (n, m), n^2 + m^2 <= r^2, m <= -1.
    rotated_ball: the same index set carried through the rotation taking
    (0, 1) to the unit guide, kept when the rotated y-component is <= -1.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if r < 1:
        raise ValueError("r must be >= 1")
    pts = []
    if kind == "axis_ball":
        for m in range(-r, 0):
            for n in range(-r, r + 1):
                if n * n + m * m <= r * r:
                    pts.append((float(n), float(m)))
        gg = (0.0, 1.0)
    else:
        u = _unit(g)
        ux, uy = float(u[0]), float(u[1])
        for m in range(-r, r + 1):
            for n in range(-r, r + 1):
                if n * n + m * m > r * r or (n, m) == (0, 0):
                    continue
                px = n * uy + m * ux
                py = -n * ux + m * uy
                if py <= -1.0:
                    pts.append((px, py))
        gg = (ux, uy)
    if not pts:
        raise EmptySetError(
            f"{kind} half ball is empty at r={r} for this direction"
        )
    return HalfBallSet(kind=kind, r=r, g=gg,
                       points=np.array(pts, dtype=np.float64))


def limit_direction(kind: str, r: int, mu: float, g) -> LimitPrediction:
    """Limiting transport direction: weighted half-ball center of mass.

    Finite mu uses the fill weights directly; mu = inf restricts to the
    points nearest the guide line, inverse-distance weighted, exactly as
    the engine's selection rule.
    """
    u = _unit(g)
    if not (0.0 < math.atan2(u[1], u[0]) < math.pi):
        raise ValueError("guide direction must point into the unknown half")
    hb = half_ball(kind, r, u)
    p = hb.points
    dist = np.hypot(p[:, 0], p[:, 1])
    d = -u[1] * p[:, 0] + u[0] * p[:, 1]
    if math.isinf(mu):
        d2 = d * d
        sel = d2 <= d2.min() + SEL_TOL * max(1.0, float(r * r))
        w = sel / dist
    else:
        w = np.exp(-(mu * mu) / (2.0 * float(r * r)) * d * d) / dist
    gs = (w[:, None] * p).sum(axis=0) / w.sum()
    return LimitPrediction(
        g_star=(float(gs[0]), float(gs[1])),
        theta_star=_angle_mod_pi(float(gs[0]), float(gs[1])),
    )


def limit_angle_curve(kind: str, r: int, mu: float, samples: int = 179):
    """theta -> theta* sampled on an even grid over the open (0, 180) deg.

    Returns (theta_deg, theta_star_deg) arrays of length `samples`.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    theta_deg = np.linspace(0.0, 180.0, samples + 2)[1:-1]
    out = np.empty_like(theta_deg)
    for k, td in enumerate(theta_deg):
        th = math.radians(float(td))
        pred = limit_direction(kind, r, mu, (math.cos(th), math.sin(th)))
        out[k] = math.degrees(pred.theta_star)
    return theta_deg, out


def curve_to_csv(theta_deg, theta_star_deg) -> str:
    lines = ["theta_deg,theta_star_deg"]
    for t, s in zip(theta_deg, theta_star_deg):
        lines.append(f"{float(t):.10g},{float(s):.10g}")
    return "\n".join(lines) + "\n"


def integral_limit_direction(mu: float, g, n: int = 2000) -> LimitPrediction:
    """Continuum analogue of limit_direction over the unit lower half disk.

    The 1/|y| weight cancels the polar Jacobian, the radial integral has a
    closed form (Gaussian moments), and the remaining angular integral is
    done with an n-point Gauss-Legendre rule cross-checked against the
    half-resolution rule to 1e-6.
    """
    from scipy.special import erf

    u = _unit(g)
    theta = math.atan2(float(u[1]), float(u[0]))
    if not (0.0 < theta < math.pi):
        raise ValueError("guide direction must point into the unknown half")
    if math.isinf(mu):
        gs = (-float(u[0]) / 2.0, -float(u[1]) / 2.0)
        return LimitPrediction(g_star=gs, theta_star=_angle_mod_pi(*gs))

    def average(m: int) -> np.ndarray:
        x, wq = np.polynomial.legendre.leggauss(m)
        phi = math.pi + (x + 1.0) * (math.pi / 2.0)
        a = (mu * mu) / 2.0 * np.sin(phi - theta) ** 2  # exp(-a rho^2)
        small = a < 1e-12
        safe = np.where(small, 1.0, a)
        # int_0^1 rho e^{-a rho^2} drho  and  int_0^1 e^{-a rho^2} drho
        mom1 = np.where(small, 0.5, -np.expm1(-safe) / (2.0 * safe))
        mom0 = np.where(
            small, 1.0, math.sqrt(math.pi) * erf(np.sqrt(safe)) / (2.0 * np.sqrt(safe))
        )
        den = float((wq * mom0).sum())
        num_x = float((wq * mom1 * np.cos(phi)).sum())
        num_y = float((wq * mom1 * np.sin(phi)).sum())
        return np.array([num_x / den, num_y / den])

    fine = average(n)
    coarse = average(n // 2)
    scale = max(1e-30, float(np.hypot(*fine)))
    if float(np.hypot(*(fine - coarse))) / scale > 1e-6:
        raise QuadratureError(
            f"half-disk quadrature did not settle at n={n} for mu={mu}"
        )
    return LimitPrediction(
        g_star=(float(fine[0]), float(fine[1])),
        theta_star=_angle_mod_pi(float(fine[0]), float(fine[1])),
    )


def transport_solution(trace, theta_star: float, x, y):
    """Weak solution of the limit transport problem.

    u(x, y) = trace((x - cot(theta*) y) mod 1) with a 1-periodic boundary
    trace given on the line y = 0 and transport along theta*.
    """
    if not (0.0 < theta_star < math.pi):
        raise ValueError("theta_star must lie in (0, pi)")
    cot = math.cos(theta_star) / math.sin(theta_star)
    return trace(np.mod(np.asarray(x, dtype=np.float64) - cot * np.asarray(y), 1.0))


def discrete_lp_error(diff: np.ndarray, h: float, p) -> float:
    """Discrete L^p norm of a grid function sampled with spacing h."""
    a = np.abs(np.asarray(diff, dtype=np.float64))
    if p == math.inf:
        return float(a.max())
    return float((np.sum(a ** p) * h * h) ** (1.0 / p))


def convergence_study(trace, kind: str = "rotated_ball", r: int = 3,
                      mu: float = 1.0, g=(0.0, 1.0),
                      resolutions=(128, 256, 512, 1024),
                      p_norms=(1, 2, math.inf)) -> dict:
    """Fill a periodic strip at dyadic resolutions and measure the rate of
    approach to the predicted transport solution.

    The domain is x-periodic on [0, 1) with a known strip of r + 2 rows
    above y = 0 carrying the transported trace; everything below is
    filled with onion ordering and a fixed guide.  Errors are discrete
    L^p norms against the weak solution for the scheme's own theta*;
    orders are log2 ratios between successive resolutions.
    """
    u = _unit(g)
    pred = limit_direction(kind, r, mu, u)
    s = r + 2
    errors: dict[int, dict] = {}
    for N in resolutions:
        h = 1.0 / N
        W, H = N, s + N
        ii = np.arange(W, dtype=np.float64) * h
        yy = (np.arange(H, dtype=np.float64) - (s - 1)) * h
        X, Y = np.meshgrid(ii, yy)
        truth = transport_solution(trace, pred.theta_star, X, Y)
        labels = np.zeros((H, W), dtype=np.uint8)
        labels[s:, :] = INPAINT
        image = truth[..., None].copy()
        image[labels == INPAINT] = 0.0
        params = engine.FillParams(
            r=r, mu=mu, order="onion", neighborhood=kind,
            g_source="fixed", g_fixed=(float(u[0]), float(u[1])),
            periodic_x=True,
        )
        filled, report = engine.inpaint(image, labels, None, params)
        if report.unfillable:
            raise RuntimeError(f"strip fill failed at N={N}")
        diff = filled[s:, :, 0] - truth[s:, :]
        errors[N] = {p: discrete_lp_error(diff, h, p) for p in p_norms}
    orders: dict = {p: [] for p in p_norms}
    res = list(resolutions)
    for a, b in zip(res, res[1:]):
        for p in p_norms:
            ea, eb = errors[a][p], errors[b][p]
            orders[p].append(math.log2(ea / eb) if ea > 0 and eb > 0 else None)
    return {
        "kind": kind, "r": r, "mu": mu,
        "g": (float(u[0]), float(u[1])),
        "theta_star_rad": pred.theta_star,
        "resolutions": tuple(res),
        "errors": errors,
        "orders": orders,
    }


def study_to_csv(study: dict) -> str:
    lines = ["N,p,error,order"]
    res = study["resolutions"]
    for k, N in enumerate(res):
        for p, err in study["errors"][N].items():
            pname = "inf" if p == math.inf else str(p)
            order = "" if k == 0 else study["orders"][p][k - 1]
            order_s = "" if order in ("", None) else f"{order:.6g}"
            lines.append(f"{N},{pname},{err:.10g},{order_s}")
    return "\n".join(lines) + "\n"
