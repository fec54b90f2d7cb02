"""Young and paracontrolled solvers for du = F(u) xi.

Both solvers are damped Picard iterations measured in a Besov norm.  When an
iteration fails (non-finite values, blow-up, persistent growth or the
iteration cap), the damping is halved twice and then the driving signal is
rescaled dyadically: the equation is solved on short windows around anchor
points, each window zoomed to the full localization radius, and the window
solutions are pasted by restarting from the value reached at the next anchor.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .calculus import (WeightFunction, antiderivative, derivative, localizer_profile,
                       make_localizer, make_weight, scale)
from .composition import VectorField, _require_scalar, apply_field, paralinearize
from .errors import SolverError, ValidationError
from .grid import GridSignal, GridSpec, shift
from .littlewood_paley import BesovIndex, DyadicPartition, besov_norm_lp, partition_for
from .parallel import pmap
from .paraproduct import bony_product, commutator, paraproduct, resonant

BLOWUP = 1e8
GROWTH_STREAK = 25
MIN_WINDOW_N = 256


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls plus the Besov index of the solution space.

    ``besov`` defaults per regime: (0.75, inf, inf) for Young and
    (0.4, 4, 2) for the paracontrolled solver.
    """

    T: float = 1.0
    tol: float = 1e-9
    max_iters: int = 200
    damping: float = 1.0
    besov: BesovIndex | None = None
    lambda_min: float = 2.0**-6
    weight_kind: str = "exp_quadratic"
    kappa: float = 0.5

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 < self.damping <= 1.0:
            raise ValidationError(f"damping must lie in (0, 1], got {self.damping}")
        if not 0.0 < self.lambda_min <= 1.0:
            raise ValidationError(f"lambda_min must lie in (0, 1], got {self.lambda_min}")
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T}")

    def index(self, regime: str) -> BesovIndex:
        idx = self.besov
        if idx is None:
            idx = BesovIndex(0.75, np.inf, np.inf) if regime == "young" else BesovIndex(0.4, 4, 2)
        a, p = idx.alpha, idx.p
        if regime == "young":
            if not (0.5 < a <= 1.0 and p >= 2):
                raise ValidationError(f"Young regime needs alpha in (1/2, 1] and p >= 2, got {idx}")
        else:
            if not (1 / 3 < a < 0.5 and p >= 3):
                raise ValidationError(
                    f"paracontrolled regime needs alpha in (1/3, 1/2) and p >= 3, got {idx}")
        if not a > 1.0 / p:
            raise ValidationError(f"rescaling needs alpha > 1/p, got {idx}")
        return idx

    def epsilon(self, regime: str) -> float:
        idx = self.index(regime)
        return 0.5 * (idx.alpha - 1.0 / idx.p)

    def to_dict(self) -> dict:
        b = self.besov
        return {"T": self.T, "tol": self.tol, "max_iters": int(self.max_iters),
                "damping": self.damping, "lambda_min": self.lambda_min,
                "besov": None if b is None else [b.alpha, b.p, b.q],
                "weight_kind": self.weight_kind, "kappa": self.kappa}


@dataclass(frozen=True)
class GeometricRoughPath:
    """(theta, xi = d theta, eta) with theta(0) = 0 and support in [-2T, 2T]."""

    theta: GridSignal
    xi: GridSignal
    eta: GridSignal
    T: float
    provenance: str = "grid_exact"
    theta_norm: float = float("nan")
    eta_norm: float = float("nan")
    cauchy_trace: tuple = ()

    @property
    def spec(self) -> GridSpec:
        return self.theta.spec

    def defect(self, part: DyadicPartition | None = None) -> GridSignal:
        """eta - pi(theta, xi); zero for grid-exact paths."""
        return self.eta - resonant(self.theta, self.xi, partition_for(self.theta, part))


def _check_anchored(theta: GridSignal, T: float):
    spec = theta.spec
    if theta.shape != ():
        raise ValidationError("rough paths are implemented for scalar theta")
    if 2 * T > spec.L / 2 + 1e-12:
        raise ValidationError(f"domain too small: 2T={2 * T} exceeds L/2={spec.L / 2}")
    if theta.at_origin() != 0.0:
        raise ValidationError(f"theta must vanish at 0, got {theta.at_origin()}")
    v = np.abs(theta.values)
    top = float(np.max(v))
    outside = np.abs(spec.x) > 2 * T + 1e-12 * spec.L
    if top > 0 and np.max(v[outside], initial=0.0) > 1e-10 * top:
        raise ValidationError("theta leaks outside [-2T, 2T]")


def grid_exact_path(theta: GridSignal, T: float, idx: BesovIndex | None = None,
                    part: DyadicPartition | None = None) -> GeometricRoughPath:
    """The canonical lift (theta, d theta, pi(theta, d theta)) of a grid signal."""
    _check_anchored(theta, T)
    part = partition_for(theta, part)
    xi = derivative(theta)
    eta = resonant(theta, xi, part)
    tn = en = float("nan")
    if idx is not None:
        tn = besov_norm_lp(theta, idx, part)
        en = besov_norm_lp(eta, BesovIndex(2 * idx.alpha - 1, idx.p / 2, idx.q), part)
    return GeometricRoughPath(theta, xi, eta, float(T), "grid_exact", tn, en)


@dataclass
class SolveReport:
    kind: str
    spec: GridSpec
    T: float
    t: np.ndarray
    u_window: np.ndarray
    u: GridSignal | None
    u_tilde: GridSignal | None = None
    u_sharp: GridSignal | None = None
    iterations: int = 0
    lam: float = 1.0
    damping: float = 1.0
    residual: float = float("nan")
    converged: bool = True
    pasting: list = field(default_factory=list)
    norms: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """JSON-ready diagnostics (arrays are exported separately)."""
        return {"kind": self.kind, "grid": {"L": self.spec.L, "N": self.spec.N}, "T": self.T,
                "iterations": self.iterations, "lambda": self.lam, "damping": self.damping,
                "residual": self.residual, "converged": self.converged,
                "pasting": list(self.pasting), "norms": dict(self.norms),
                "flags": list(self.flags), "config": dict(self.config)}


class _Diverged(Exception):
    pass


def _window_mask(spec: GridSpec, T: float) -> np.ndarray:
    return np.abs(spec.x) <= T + 1e-12 * spec.L


def _picard(step, init: GridSignal, idx: BesovIndex, cfg: SolverConfig, damping: float):
    """Damped fixed-point loop; ``step(u)`` returns (Phi(u), aux).

    Returns (u, aux, iterations, last increment) or raises _Diverged.
    """
    part = partition_for(init, None)
    u = init
    unorm = besov_norm_lp(u, idx, part)
    prev = np.inf
    streak = 0
    for n in range(1, int(cfg.max_iters) + 1):
        cand, aux = step(u)
        if not cand.is_finite():
            raise _Diverged(f"non-finite iterate at step {n}")
        new = cand if damping == 1.0 else GridSignal(
            u.spec, (1.0 - damping) * u.values + damping * cand.values)
        inc = besov_norm_lp(new - u, idx, part)
        nnorm = besov_norm_lp(new, idx, part)
        if not np.isfinite(nnorm) or nnorm > BLOWUP * (1.0 + unorm + besov_norm_lp(init, idx, part)):
            raise _Diverged(f"blow-up at step {n}")
        if inc < cfg.tol * (1.0 + unorm):
            return new, aux, n, inc
        streak = streak + 1 if inc > prev else 0
        if streak >= GROWTH_STREAK:
            raise _Diverged(f"increments grew for {streak} consecutive steps")
        prev, u, unorm = inc, new, nnorm
    raise _Diverged(f"no convergence within {cfg.max_iters} iterations")


def _damped(step, init, idx, cfg):
    """Run _picard with damping d, d/2, d/4; returns (..., damping used)."""
    d = cfg.damping
    last = None
    for _ in range(3):
        try:
            return _picard(step, init, idx, cfg, d) + (d,)
        except _Diverged as e:
            last = e
            d *= 0.5
    raise _Diverged(str(last))


def _lambda_ladder(cfg: SolverConfig):
    lam = 0.5
    while lam >= cfg.lambda_min * (1 - 1e-12):
        yield lam
        lam *= 0.5


def _sub_spec(spec: GridSpec, lam: float) -> GridSpec:
    n = int(round(lam * spec.N))
    return GridSpec(spec.L, min(spec.N, max(n, MIN_WINDOW_N)))


def _zoom(f: GridSignal, anchor: float, lam: float, sub: GridSpec) -> GridSignal:
    """Samples of s -> f(anchor + lam s) on the window grid ``sub``.

    The signal must already be localized around ``anchor``.  Lambda_lam is
    applied on the full grid and the result is decimated to ``sub``.
    """
    z = scale(shift(f, -anchor), lam)
    step = f.spec.N // sub.N
    return GridSignal(sub, z.values[..., ::step])


def _from_window(uw: np.ndarray, lam: float, full: GridSpec, sub: GridSpec, ks: np.ndarray):
    """u at anchor + k dx (full grid) from window samples u_w(k dx / lam)."""
    ratio = sub.N / (lam * full.N)
    idx = sub.origin + np.rint(ks * ratio).astype(int)
    return uw[..., idx]


def _paste(solve_window, spec: GridSpec, T: float, lam: float, reach: float, u0):
    """Sequential restart over anchors t_j with spacing <= lam T / 2.

    ``solve_window(anchor, u_start)`` returns (window samples, window grid,
    iterations, residual).  Fills u on [-reach, reach]; returns (u samples on
    the full grid with NaN outside, trace).
    """
    K = int(np.floor(lam * T / 2 / spec.dx + 1e-9))
    if K < 1:
        raise _Diverged(f"window spacing below one grid step at lambda={lam}")
    kmax = int(np.floor(reach / spec.dx + 1e-9))
    u0 = np.asarray(u0, dtype=float)
    out = np.full(u0.shape + (spec.N,), np.nan)
    o = spec.origin
    out[..., o] = u0
    trace = []
    for sign in (1, -1):
        k0, cur = 0, u0
        while k0 < kmax:
            anchor = sign * k0 * spec.dx
            uw, sub, its, res = solve_window(anchor, cur)
            ks = sign * np.arange(0, min(K, kmax - k0) + 1)
            vals = _from_window(uw, lam, spec, sub, ks)
            out[..., o + sign * k0 + ks] = vals
            cur = vals[..., -1]
            trace.append({"anchor": float(anchor), "iterations": int(its), "residual": float(res)})
            k0 += len(ks) - 1
    return out, trace


# ---------------------------------------------------------------- Young regime

def _young_phi(F: VectorField, xi: GridSignal, phi: np.ndarray, u0, part):
    base = np.asarray(u0, dtype=float)[..., None] * phi

    def step(u):
        prod = bony_product(apply_field(F, u), xi, part).product
        return GridSignal(xi.spec, base + phi * antiderivative(prod).values), None
    return step


def _young_core(u0, xi: GridSignal, F: VectorField, cfg: SolverConfig, idx: BesovIndex):
    spec = xi.spec
    part = partition_for(xi, None)
    phi = make_localizer(cfg.T, spec).values.values
    u0 = np.asarray(u0, dtype=float)
    step = _young_phi(F, xi, phi, u0, part)
    init = GridSignal(spec, u0[..., None] * phi)
    u, _, its, inc, d = _damped(step, init, idx, cfg)
    res = besov_norm_lp(u - step(u)[0], idx, part)
    return u, its, res, d


def _check_young_inputs(u0, xi: GridSignal, F: VectorField):
    u0 = np.asarray(u0, dtype=float)
    want = () if F.is_scalar else (F.m,)
    if u0.shape != want:
        raise ValidationError(f"initial value must have shape {want}, got {u0.shape}")
    xwant = () if F.is_scalar else (F.n,)
    if xi.shape != xwant:
        raise ValidationError(f"driver must have channel shape {xwant}, got {xi.shape}")
    if not xi.is_finite():
        raise ValidationError("driver contains non-finite samples")
    return u0


def young_solve(u0, xi: GridSignal, F: VectorField, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Solve u = phi_T u0 + phi_T int_0^t F(u) xi by Picard iteration."""
    idx = cfg.index("young")
    u0 = _check_young_inputs(u0, xi, F)
    spec = xi.spec
    make_localizer(cfg.T, spec)
    flags = []
    if not F.is_linear and idx.p != np.inf:
        flags.append("outside proven regime: nonlinear F with finite p")
    mask = _window_mask(spec, cfg.T)
    try:
        u, its, res, d = _young_core(u0, xi, F, cfg, idx)
        return SolveReport("young", spec, cfg.T, spec.x[mask], u.values[..., mask], u,
                           iterations=its, lam=1.0, damping=d, residual=res,
                           norms={"u": besov_norm_lp(u, idx)}, flags=flags, config=cfg.to_dict())
    except _Diverged as e:
        flags.append(f"direct iteration failed: {e}")
    eps = cfg.epsilon("young")
    loc_T = cfg.T
    for lam in _lambda_ladder(cfg):
        wcfg = replace(cfg, besov=idx)
        xs = lam ** (1 - idx.alpha + 1 / idx.p + eps)
        Fl = F.scaled(lam ** (idx.alpha - 1 / idx.p - eps))
        sub = _sub_spec(spec, lam)

        def solve_window(anchor, ustart, lam=lam, xs=xs, Fl=Fl, sub=sub):
            loc, _ = localizer_profile(spec.x, 2 * lam * loc_T)
            xw = _zoom(GridSignal(spec, loc * shift(xi, -anchor).values), 0.0, lam, sub) * xs
            uw, its, res, _ = _young_core(ustart, xw, Fl, wcfg, idx)
            return uw.values, sub, its, res
        try:
            vals, trace = _paste(solve_window, spec, cfg.T, lam, cfg.T, u0)
        except _Diverged as e:
            flags.append(f"lambda={lam:g} failed: {e}")
            continue
        # outside [-T, T] the pasted solution is reported as its localized constant extension
        ext = _extend_constant(vals, spec, cfg.T)
        phi = make_localizer(cfg.T, spec).values.values
        u = GridSignal(spec, ext * phi)
        flags.append("pasted: u is exact on [-T, T] only")
        return SolveReport("young", spec, cfg.T, spec.x[mask], vals[..., mask], u,
                           iterations=sum(p["iterations"] for p in trace), lam=lam,
                           damping=cfg.damping, residual=max(p["residual"] for p in trace),
                           pasting=trace, norms={"u": besov_norm_lp(u, idx)}, flags=flags,
                           config=cfg.to_dict())
    raise SolverError(f"lambda underflow: no dyadic lambda >= {cfg.lambda_min:g} restores "
                      f"convergence ({'; '.join(flags)})")


def _extend_constant(vals: np.ndarray, spec: GridSpec, R: float) -> np.ndarray:
    """Replace NaN samples beyond [-R, R] by the boundary values."""
    out = np.array(vals, copy=True)
    o = spec.origin
    k = int(np.floor(R / spec.dx + 1e-9))
    out[..., o + k + 1:] = out[..., o + k: o + k + 1]
    out[..., : o - k] = out[..., o - k: o - k + 1]
    return out


def _ratio(num: float, den: float) -> dict:
    if den == 0.0:
        return {"ratio": 0.0, "degenerate": True, "numerator": num, "denominator": den}
    return {"ratio": num / den, "degenerate": False, "numerator": num, "denominator": den}


def young_lipschitz_probe(pairs, F: VectorField, cfg: SolverConfig = SolverConfig()) -> list[dict]:
    """||u1 - u2||_{a,p,q} / (|u0_1 - u0_2| + ||xi_1 - xi_2||_{a-1,p,q}) per pair.

    ``pairs`` holds ((u0_1, xi_1), (u0_2, xi_2)); pairs are solved concurrently.
    """
    idx = cfg.index("young")
    lower = BesovIndex(idx.alpha - 1, idx.p, idx.q)

    def one(pair):
        (a0, xa), (b0, xb) = pair
        da = float(np.linalg.norm(np.asarray(a0, float) - np.asarray(b0, float)))
        dx = besov_norm_lp(xa - xb, lower)
        if da == 0.0 and dx == 0.0:
            return _ratio(0.0, 0.0)
        ra, rb = young_solve(a0, xa, F, cfg), young_solve(b0, xb, F, cfg)
        return _ratio(besov_norm_lp(ra.u - rb.u, idx), da + dx)
    return pmap(one, pairs)


# ---------------------------------------------------------------- rough regime

def reduced_resonant(u_tilde: GridSignal, u_sharp: GridSignal, rp: GeometricRoughPath,
                     F: VectorField, part: DyadicPartition | None = None,
                     tol: float = 1e-8) -> GridSignal:
    """pi(F(u~), xi) through the five-term expansion with eta for pi(theta, xi).

    F'(u~)F(u~) eta + F'(u~) Gamma(F(u~), theta, xi) + Gamma(F'(u~), T_{F(u~)} theta, xi)
    + pi(T_{F'(u~)} u#, xi) + pi(R_F(u~), xi).
    """
    _require_scalar(F, "reduced_resonant")
    part = partition_for(u_tilde, part)
    th, xi = rp.theta, rp.xi
    Fu = apply_field(F, u_tilde)
    dF = apply_field(F, u_tilde, 1)
    TFth = paraproduct(Fu, th, part)
    gap = np.max(np.abs(u_tilde.values - TFth.values - u_sharp.values))
    scl = 1.0 + np.max(np.abs(u_tilde.values))
    if gap > tol * scl:
        raise ValidationError(f"ansatz residual {gap:.3e} exceeds {tol:g} x {scl:.3g}")
    _, rem = paralinearize(F, u_tilde, part)
    out = (dF * Fu) * rp.eta
    out = out + dF * commutator(Fu, th, xi, part)
    out = out + commutator(dF, TFth, xi, part)
    out = out + resonant(paraproduct(dF, u_sharp, part), xi, part)
    return out + resonant(rem, xi, part)


def _check_weight(psi: WeightFunction, spec: GridSpec, T: float):
    if psi.spec != spec:
        raise ValidationError("weight was built for a different grid")
    if psi.T < T:
        raise ValidationError(f"weight plateau 2*{psi.T} does not cover [-2T, 2T] for T={T}")
    v = psi.values.values
    if np.max(np.abs(v[_window_mask(spec, 2 * T)] - 1.0)) > 1e-12 or np.min(v) <= 0:
        raise ValidationError("weight conditioning failure: psi must be 1 on [-2T, 2T] and positive")


def _rough_core(u0: float, rp: GeometricRoughPath, F: VectorField, psi: WeightFunction,
                cfg: SolverConfig, idx: BesovIndex):
    spec = rp.spec
    part = partition_for(rp.theta, None)
    th, xi = rp.theta, rp.xi
    dlog = psi.derivative.values / psi.values.values
    o = spec.origin

    def step(ut):
        Fu = apply_field(F, ut)
        TFth = paraproduct(Fu, th, part)
        us = ut - TFth
        dU = reduced_resonant(ut, us, rp, F, part)
        dU = dU + paraproduct(xi, Fu, part) - paraproduct(derivative(Fu), th, part)
        dU = dU + GridSignal(spec, dlog * ut.values)
        A = antiderivative(dU).values
        us_new = A + (u0 - TFth.values[o])
        return GridSignal(spec, TFth.values + us_new), us_new

    init = GridSignal(spec, u0 * psi.values.values)
    ut, _, its, inc, d = _damped(step, init, idx, cfg)
    # remainder of the final iterate with respect to its own field
    us = ut - paraproduct(apply_field(F, ut), th, part)
    res = besov_norm_lp(ut - step(ut)[0], idx, part)
    return ut, us, its, res, d


def paracontrolled_solve(u0, rp: GeometricRoughPath, F: VectorField,
                         psi: WeightFunction | None = None,
                         cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Weighted RDE du~ = F(u~) xi + (psi'/psi) u~ in the paracontrolled ansatz.

    Returns u = u~ / psi on [-T, T] together with u~ and u#.
    """
    idx = cfg.index("rough")
    _require_scalar(F, "the paracontrolled solver")
    u0 = float(np.asarray(u0, dtype=float))
    spec = rp.spec
    T = rp.T
    if abs(T - cfg.T) > 1e-12:
        raise ValidationError(f"rough path radius {T} differs from config T={cfg.T}")
    if psi is None:
        psi = make_weight(cfg.weight_kind, cfg.kappa, T, spec)
    _check_weight(psi, spec, T)
    mask = _window_mask(spec, T)
    part = partition_for(rp.theta, None)
    flags = []
    try:
        ut, us, its, res, d = _rough_core(u0, rp, F, psi, cfg, idx)
        u = GridSignal(spec, ut.values / psi.values.values)
        return SolveReport("rough", spec, T, spec.x[mask], u.values[mask], u, ut, us,
                           iterations=its, lam=1.0, damping=d, residual=res,
                           norms=_rough_norms(ut, us, idx, part), flags=flags,
                           config=cfg.to_dict())
    except _Diverged as e:
        flags.append(f"direct iteration failed: {e}")
    eps = cfg.epsilon("rough")
    defect = rp.defect(part)
    dnz = bool(np.any(defect.values != 0.0))
    for lam in _lambda_ladder(cfg):
        a = idx.alpha
        s_th = lam ** (-a + 1 / idx.p + eps)
        s_eta = lam ** (1 - 2 * a + 2 / idx.p + 2 * eps)
        Fl = F.scaled(lam ** (a - 1 / idx.p - eps))
        sub = _sub_spec(spec, lam)
        wpsi = make_weight(psi.kind, psi.kappa, T, sub)

        def solve_window(anchor, ustart, lam=lam, s_th=s_th, s_eta=s_eta, Fl=Fl, sub=sub,
                         wpsi=wpsi):
            loc, _ = localizer_profile(spec.x, lam * T)
            k = spec.index_of(anchor)
            thw = GridSignal(spec, loc * (shift(rp.theta, -anchor).values - rp.theta.values[k]))
            th_l = _zoom(thw, 0.0, lam, sub) * s_th
            th_l = GridSignal(sub, th_l.values - th_l.at_origin())
            xi_l = derivative(th_l)
            eta_l = resonant(th_l, xi_l)
            prov = "grid_exact"
            if dnz:
                dw = GridSignal(spec, loc * loc * shift(defect, -anchor).values)
                eta_l = eta_l + _zoom(dw, 0.0, lam, sub) * s_eta
                prov = "lifted"
            rpw = GeometricRoughPath(th_l, xi_l, eta_l, T, prov)
            ut, _, its, res, _ = _rough_core(float(ustart), rpw, Fl, wpsi, replace(cfg, besov=idx),
                                             idx)
            return ut.values / wpsi.values.values, sub, its, res
        try:
            vals, trace = _paste(solve_window, spec, T, lam, 2 * T, u0)
        except _Diverged as e:
            flags.append(f"lambda={lam:g} failed: {e}")
            continue
        # xi vanishes outside [-2T, 2T], so u is constant there
        uext = _extend_constant(vals, spec, 2 * T)
        u = GridSignal(spec, uext)
        ut = u * psi.values
        us = ut - paraproduct(apply_field(F, ut), rp.theta, part)
        flags.append("pasted")
        return SolveReport("rough", spec, T, spec.x[mask], uext[mask], u, ut, us,
                           iterations=sum(p["iterations"] for p in trace), lam=lam,
                           damping=cfg.damping, residual=max(p["residual"] for p in trace),
                           pasting=trace, norms=_rough_norms(ut, us, idx, part), flags=flags,
                           config=cfg.to_dict())
    raise SolverError(f"lambda underflow: no dyadic lambda >= {cfg.lambda_min:g} restores "
                      f"convergence ({'; '.join(flags)})")


def _rough_norms(ut, us, idx: BesovIndex, part) -> dict:
    return {"u_tilde": besov_norm_lp(ut, idx, part),
            "u_sharp": besov_norm_lp(us, BesovIndex(2 * idx.alpha, idx.p / 2, idx.q), part)}


def ito_lyons_probe(pairs, F: VectorField, psi: WeightFunction | None = None,
                    cfg: SolverConfig = SolverConfig()) -> list[dict]:
    """||psi u1 - psi u2||_{a,p,q} over the input distance
    |u0_1 - u0_2| + ||theta_1 - theta_2||_{a,p,q} + ||eta_1 - eta_2||_{2a-1,p/2,q}.

    ``pairs`` holds ((u0_1, rp_1), (u0_2, rp_2)).
    """
    idx = cfg.index("rough")
    eidx = BesovIndex(2 * idx.alpha - 1, idx.p / 2, idx.q)

    def one(pair):
        (a0, ra), (b0, rb) = pair
        den = (abs(float(a0) - float(b0)) + besov_norm_lp(ra.theta - rb.theta, idx)
               + besov_norm_lp(ra.eta - rb.eta, eidx))
        if den == 0.0:
            return _ratio(0.0, 0.0)
        sa = paracontrolled_solve(a0, ra, F, psi, cfg)
        sb = paracontrolled_solve(b0, rb, F, psi, cfg)
        return _ratio(besov_norm_lp(sa.u_tilde - sb.u_tilde, idx), den)
    return pmap(one, pairs)
