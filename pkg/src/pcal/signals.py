"""Random signal generators and their lift to geometric rough paths.

Generators: Brownian motion through the Schauder (tent function) series,
fractional Brownian motion by circulant embedding of fractional Gaussian
noise, and sparse random series in a periodized Meyer wavelet basis.  All of
them are deterministic per seed; channels and dyadic levels draw from
independent ``SeedSequence`` sub-streams, so truncating a series at a lower
level reuses exactly the same coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import Localizer, derivative, make_localizer
from .errors import ValidationError
from .grid import GridSignal, GridSpec, SpectralSignal, inverse_transform
from .littlewood_paley import (BesovIndex, DyadicPartition, besov_norm_lp, partition_for,
                               regularity_estimate)
from .paraproduct import commutator, resonant
from .solvers import GeometricRoughPath, grid_exact_path


def _streams(seed: int, channels: int | None, *key):
    if channels is None:
        return [np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))]
    return [np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(c,) + key))
            for c in range(channels)]


def _check_radius(spec: GridSpec, T: float):
    if not T > 0 or 2 * T > spec.L / 2 + 1e-12:
        raise ValidationError(f"domain too small: need 2T <= L/2, got T={T}, L={spec.L}")


def _stack(rows, channels):
    return rows[0] if channels is None else np.stack(rows)


# ---------------------------------------------------------------- Brownian motion

def tent(t):
    """min(t, 1 - t) on [0, 1], zero elsewhere."""
    t = np.asarray(t, dtype=float)
    return np.where((t >= 0) & (t <= 1), np.minimum(t, 1.0 - t), 0.0)


def schauder_sum(s: np.ndarray, coeffs: list[np.ndarray], z0: float) -> np.ndarray:
    """z0 s + sum_j sum_k coeffs[j][k] 2^{-j/2} tent(2^j s - k) for s in [0, 1]."""
    out = z0 * s
    for j, c in enumerate(coeffs):
        y = (2.0**j) * s
        k = np.minimum(np.floor(y).astype(int), 2**j - 1)
        out = out + c[k] * 2.0 ** (-j / 2) * tent(y - k)
    return out


def _brownian_levels(spec: GridSpec, T: float) -> int:
    return int(np.ceil(np.log2(4 * T / spec.dx)))


def gen_brownian(spec: GridSpec, T: float, seed: int, J_max: int | None = None,
                 channels: int | None = None) -> GridSignal:
    """Levy-Ciesielski Brownian motion localized to [-2T, 2T] and anchored at 0.

    The series lives on s in [0, 1], which is mapped affinely onto
    t in [-2T, 2T] with s = 1/2 at t = 0; the amplitude is scaled by
    sqrt(4T) so that Var B_t = |t|.  The result is multiplied by phi_T.
    """
    _check_radius(spec, T)
    J = _brownian_levels(spec, T) if J_max is None else int(J_max)
    if J < 0:
        raise ValidationError(f"J_max must be >= 0, got {J}")
    inside = np.abs(spec.x) <= 2 * T
    s = spec.x[inside] / (4 * T) + 0.5
    phi = make_localizer(T, spec).values.values
    rows = []
    for c, rng in enumerate(_streams(seed, channels)):
        z0 = rng.standard_normal()
        coeffs = [rng.standard_normal(2**j) for j in range(J + 1)]
        b = np.zeros(spec.N)
        b[inside] = schauder_sum(s, coeffs, z0)
        b = np.sqrt(4 * T) * (b - b[spec.origin])
        rows.append(phi * b)
    return GridSignal(spec, _stack(rows, channels))


# ---------------------------------------------------------------- fractional BM

def fgn_autocovariance(H: float, n: int) -> np.ndarray:
    """gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2 for k = 0 ... n."""
    k = np.arange(n + 1, dtype=float)
    return 0.5 * (np.abs(k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def _embedding_eigenvalues(H: float, n: int):
    g = fgn_autocovariance(H, n)
    row = np.concatenate([g, g[-2:0:-1]])
    lam = np.fft.fft(row).real
    return lam


def fgn(H: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n samples of unit-step fractional Gaussian noise (Davies-Harte)."""
    m = n
    for _ in range(2):
        lam = _embedding_eigenvalues(H, m)
        if np.min(lam) >= -1e-10 * np.max(lam):
            break
        m *= 2
    else:
        raise ValidationError(f"circulant embedding is not positive definite for H={H}, n={n}")
    lam = np.maximum(lam, 0.0)
    M = lam.size
    w = np.sqrt(lam / M) * (rng.standard_normal(M) + 1j * rng.standard_normal(M))
    return np.fft.fft(w)[:n].real


def gen_fbm(H: float, spec: GridSpec, T: float, seed: int, channels: int | None = None,
            localize: bool = True) -> GridSignal:
    """Fractional Brownian motion on the grid points of [-2T, 2T], anchored at 0.

    With ``localize=False`` the path is extended by its end values outside
    [-2T, 2T] instead of being multiplied by phi_T.
    """
    if not 0.0 < H < 1.0:
        raise ValidationError(f"Hurst index must lie in (0, 1), got {H}")
    _check_radius(spec, T)
    o = spec.origin
    K = int(np.floor(2 * T / spec.dx + 1e-9))
    n = 2 * K
    rows = []
    for rng in _streams(seed, channels):
        inc = fgn(H, n, rng) * spec.dx**H
        path = np.concatenate([[0.0], np.cumsum(inc)])
        b = np.empty(spec.N)
        b[o - K:o + K + 1] = path
        b[:o - K] = path[0]
        b[o + K + 1:] = path[-1]
        rows.append(b - b[o])
    v = _stack(rows, channels)
    if localize:
        v = make_localizer(T, spec).values.values * v
    return GridSignal(spec, v)


def gen_sine_bump(spec: GridSpec, T: float, amp: float = 1.0, freq: float = 1.0) -> GridSignal:
    """amp phi_T(x) sin(freq x): smooth, anchored at 0, supported in [-2T, 2T]."""
    loc = make_localizer(T, spec)
    return GridSignal(spec, amp * loc.values.values * np.sin(freq * spec.x))


def mollify(f: GridSignal, eps: float) -> GridSignal:
    """Gaussian smoothing: multiply the spectrum by exp(-eps^2 xi^2 / 2)."""
    if not eps >= 0:
        raise ValidationError(f"mollification scale must be >= 0, got {eps}")
    xi = f.spec.rfrequencies
    m = np.exp(-0.5 * (eps * xi) ** 2)
    v = np.fft.irfft(m * np.fft.rfft(f.values, axis=-1), n=f.spec.N, axis=-1)
    return GridSignal(f.spec, v)


def gen_weierstrass(spec: GridSpec, alpha0: float, J: int | None = None,
                    unit: float | None = None) -> GridSignal:
    """sum_{k=0}^{J} 2^{-k alpha0} cos(1.5 2^k unit x).

    The default unit is the value closest to 1 for which 1.5 unit is a grid
    frequency, so every tone sits on the grid (no periodization leakage) in
    the middle of its annulus, and each block norm scales exactly by
    2^{-alpha0}.
    J defaults to the largest level whose tone stays below Nyquist and
    inside the partition.
    """
    from .littlewood_paley import top_level
    if unit is None:
        n = max(1, round(3.0 * spec.L / (2.0 * np.pi)))
        unit = 2.0 * np.pi * n / (3.0 * spec.L)
    kmax = int(np.floor(np.log2(spec.xi_nyq / (1.5 * unit)) - 1e-12))
    J = min(top_level(spec), kmax) if J is None else int(J)
    if 1.5 * 2.0**J * unit >= spec.xi_nyq:
        raise ValidationError(f"tone {J} at {1.5 * 2.0**J * unit:g} is above Nyquist {spec.xi_nyq:g}")
    x = spec.x
    v = np.zeros(spec.N)
    for k in range(J + 1):
        v += 2.0 ** (-k * alpha0) * np.cos(1.5 * 2.0**k * unit * x)
    return GridSignal(spec, v)


# ---------------------------------------------------------------- Meyer wavelets

def meyer_nu(x):
    """Auxiliary polynomial x^4 (35 - 84x + 70x^2 - 20x^3), clipped to [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3)


def meyer_hat(w):
    """Continuous transform of the Meyer mother wavelet, int psi(t) e^{-iwt} dt."""
    w = np.asarray(w, dtype=float)
    a = np.abs(w)
    out = np.zeros(w.shape)
    lo = (a >= 2 * np.pi / 3) & (a <= 4 * np.pi / 3)
    hi = (a > 4 * np.pi / 3) & (a <= 8 * np.pi / 3)
    out[lo] = np.sin(0.5 * np.pi * meyer_nu(3 * a[lo] / (2 * np.pi) - 1))
    out[hi] = np.cos(0.5 * np.pi * meyer_nu(3 * a[hi] / (4 * np.pi) - 1))
    return out * np.exp(-0.5j * w)


def meyer_max_level(spec: GridSpec) -> int:
    """Largest j whose band 2^j [2pi/3, 8pi/3] stays below Nyquist."""
    return int(np.floor(np.log2(3 * spec.xi_nyq / (8 * np.pi)) + 1e-12))


def _check_meyer_level(j: int, spec: GridSpec):
    if j < 0 or j > meyer_max_level(spec):
        raise ValidationError(
            f"Meyer level {j} outside [0, {meyer_max_level(spec)}] for L={spec.L}, N={spec.N}")


def meyer_wavelet(j: int, k: int, spec: GridSpec) -> GridSignal:
    """psi_{j,k}(t) = 2^{j/2} psi(2^j t - k), synthesized from its spectrum.

    The periodization is orthonormal when 2L 2^j is an integer.
    """
    _check_meyer_level(j, spec)
    w = spec.frequencies
    c = 2.0 ** (-j / 2) * np.exp(-1j * w * k / 2.0**j) * meyer_hat(w / 2.0**j)
    return inverse_transform(SpectralSignal(spec, c), real=True)


@dataclass(frozen=True)
class RandomSeriesParams:
    """Z_{j,k} = A_{j,k} B_{j,k}, A ~ N(0, 2^{-2js}), B ~ Bernoulli(2^{-jr})."""

    s: float
    r: float
    J_max: int
    seed: int = 0
    law: str = "gaussian"
    wavelet: str = "meyer"

    def __post_init__(self):
        if not self.s > 0:
            raise ValidationError(f"decay exponent s must be positive, got {self.s}")
        if not 0.0 <= self.r < 1.0:
            raise ValidationError(f"sparsity exponent r must lie in [0, 1), got {self.r}")
        if int(self.J_max) < 0:
            raise ValidationError(f"J_max must be >= 0, got {self.J_max}")
        if self.law != "gaussian" or self.wavelet != "meyer":
            raise ValidationError("only gaussian coefficients in the Meyer basis are available")

    @property
    def target_regularity(self) -> float:
        """s + r/4 - 1/2, the p = 4 regularity of the series."""
        return self.s + self.r / 4 - 0.5


def wavelet_coefficients(params: RandomSeriesParams, j: int, channel: int | None = None):
    """(k, Z_{j,k}) for k = -2^j ... 2^j, from the level's own sub-stream."""
    key = (j,) if channel is None else (channel, j)
    rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=key))
    k = np.arange(-(2**j), 2**j + 1)
    A = rng.standard_normal(k.size) * 2.0 ** (-j * params.s)
    B = rng.random(k.size) < 2.0 ** (-j * params.r)
    return k, A * B


def wavelet_synthesis(levels: dict, spec: GridSpec) -> GridSignal:
    """sum over j of sum_k Z_{j,k} psi_{j,k}, from {j: (k, Z)}."""
    w = spec.frequencies
    c = np.zeros(spec.N, dtype=complex)
    for j in sorted(levels):
        _check_meyer_level(j, spec)
        k, z = levels[j]
        nz = z != 0
        if not np.any(nz):
            continue
        phase = np.exp(-1j * np.outer(k[nz] / 2.0**j, w))
        c += 2.0 ** (-j / 2) * meyer_hat(w / 2.0**j) * (z[nz] @ phase)
    return inverse_transform(SpectralSignal(spec, c), real=True)


def gen_wavelet_series(params: RandomSeriesParams, spec: GridSpec, T: float | None = None,
                       J: int | None = None, channels: int | None = None) -> GridSignal:
    """X = sum_{j <= J} sum_{k=-2^j}^{2^j} Z_{j,k} psi_{j,k}; J defaults to params.J_max.

    ``T`` only validates that [-2T, 2T] fits the domain; the series is
    returned unlocalized.
    """
    if T is not None:
        _check_radius(spec, T)
    J = params.J_max if J is None else int(J)
    _check_meyer_level(J, spec)
    from .littlewood_paley import top_level
    if J > top_level(spec):
        raise ValidationError(f"J_max={J} exceeds the partition top level {top_level(spec)}")
    rows = []
    for c in ([None] if channels is None else range(channels)):
        lv = {j: wavelet_coefficients(params, j, c) for j in range(J + 1)}
        rows.append(wavelet_synthesis(lv, spec).values)
    return GridSignal(spec, _stack(rows, channels))


# ---------------------------------------------------------------- lift

@dataclass(frozen=True)
class LiftDiagnostics:
    levels: tuple
    d: tuple
    ratios: tuple
    rate: float
    accepted: bool
    alpha_hat: float
    index: tuple = ()
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "d": list(self.d), "ratios": list(self.ratios),
                "rate": self.rate, "accepted": self.accepted, "alpha_hat": self.alpha_hat,
                "index": list(self.index), "notes": list(self.notes)}


def _localized(X: GridSignal, loc: Localizer, anchor=None) -> GridSignal:
    """phi (X - a), with a = X(0) unless an anchor value is given."""
    o = X.spec.origin
    a = X.values[..., o:o + 1] if anchor is None else anchor
    return GridSignal(X.spec, loc.values.values * (X.values - a))


def lift(source, idx: BesovIndex, T: float, spec: GridSpec | None = None,
         levels: tuple[int, int] | None = None, part: DyadicPartition | None = None,
         ratio_max: float = 0.9):
    """Lift a smooth grid signal or a generator to a geometric rough path.

    ``source`` is a GridSignal (grid-exact lift), a RandomSeriesParams, or a
    callable J -> GridSignal giving the truncation at level J.  Generator
    truncations are localized as phi_T (X_J - X_top(0)), all anchored at the
    origin value of the top truncation, so the returned theta has theta(0) = 0
    and the differences carry no per-level anchoring noise.  The Cauchy
    differences d_J = ||theta_{J+1} - theta_J||_{a,p,q}
    + ||eta_{J+1} - eta_J||_{2a-1,p/2,q} are recorded.  The lift is accepted
    when the last three ratios d_{J+1} / d_J are below ``ratio_max``.
    """
    if isinstance(source, GridSignal):
        rp = grid_exact_path(source, T, idx, part)
        diag = LiftDiagnostics((), (), (), float("nan"), True, float("nan"),
                               (idx.alpha, idx.p, idx.q), ("grid_exact",))
        return rp, diag
    if isinstance(source, RandomSeriesParams):
        if spec is None:
            raise ValidationError("a grid is required to lift a random series")
        params = source
        lo, hi = levels if levels is not None else (max(0, params.J_max - 5), params.J_max)
        gen = lambda J: gen_wavelet_series(params, spec, T, J=J)  # noqa: E731
    elif callable(source):
        if levels is None:
            raise ValidationError("levels are required for a generator callable")
        lo, hi = levels
        gen = source
    else:
        raise ValidationError(f"cannot lift a {type(source).__name__}")
    if hi - lo < 1:
        raise ValidationError(f"need at least two truncation levels, got {lo}..{hi}")
    eidx = BesovIndex(2 * idx.alpha - 1, idx.p / 2, idx.q)
    Xs = [gen(J) for J in range(lo, hi + 1)]
    top = Xs[-1]
    loc = make_localizer(T, top.spec)
    part = partition_for(top, part)
    o = top.spec.origin
    anchor = top.values[..., o:o + 1].copy()
    prev = None
    ds = []
    for X in Xs:
        th = _localized(X, loc, anchor)
        xi = derivative(th)
        eta = resonant(th, xi, part)
        if prev is not None:
            ds.append(besov_norm_lp(th - prev[0], idx, part) + besov_norm_lp(eta - prev[2], eidx, part))
        prev = (th, xi, eta)
    d = np.array(ds)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = d[1:] / d[:-1]
    notes = []
    if d.size >= 2 and np.all(d > 0):
        rate = float(2.0 ** np.polyfit(np.arange(d.size), np.log2(d), 1)[0])
    else:
        rate = float("nan")
    if ratios.size >= 3:
        accepted = bool(np.all(ratios[-3:] < ratio_max))
    else:
        accepted = False
        notes.append("fewer than three ratios")
    th, xi, eta = prev
    fit = None
    if isinstance(source, RandomSeriesParams):
        # wavelet level j lives in LP blocks j+1 and j+2
        fit = (2, min(hi + 2, part.J + 1))
    try:
        ahat = regularity_estimate(th, idx.p, part, fit)
    except Exception as e:  # degenerate fit is a diagnostic, not a failure
        ahat = float("nan")
        notes.append(str(e))
    rp = GeometricRoughPath(th, xi, eta, float(T), "lifted", besov_norm_lp(th, idx, part),
                            besov_norm_lp(eta, eidx, part), tuple(float(v) for v in d))
    diag = LiftDiagnostics(tuple(range(lo, hi + 1)), tuple(float(v) for v in d),
                           tuple(float(v) for v in ratios), rate, accepted, float(ahat),
                           (idx.alpha, idx.p, idx.q), tuple(notes))
    return rp, diag


@dataclass(frozen=True)
class LocalizedResonant:
    direct: GridSignal
    expanded: GridSignal

    @property
    def rel_gap(self) -> float:
        top = float(np.max(np.abs(self.direct.values)))
        gap = float(np.max(np.abs(self.direct.values - self.expanded.values)))
        return gap / top if top > 0 else gap


def localized_resonant(X: GridSignal, loc: Localizer,
                       part: DyadicPartition | None = None) -> LocalizedResonant:
    """pi(phi X, d(phi X)) directly and through the commutator expansion.

    The expansion writes d(phi X) = phi' X + phi dX and

        pi(phi X, h) = phi pi(X, h) + Gamma(phi, X, h) + pi(pi(phi, X), h)
                       + X pi(phi, h) + Gamma(X, phi, h),   h = phi dX,

    which regroups Bony's decomposition of phi X exactly.
    """
    if loc.spec != X.spec:
        raise ValidationError("localizer was built for a different grid")
    part = partition_for(X, part)
    phi, dphi = loc.values, loc.derivative
    pX = phi * X
    dX = derivative(X)
    direct = resonant(pX, derivative(pX), part)
    h = phi * dX
    exp = resonant(pX, dphi * X, part)
    exp = exp + phi * resonant(X, h, part) + commutator(phi, X, h, part)
    exp = exp + resonant(resonant(phi, X, part), h, part) + X * resonant(phi, h, part)
    exp = exp + commutator(X, phi, h, part)
    return LocalizedResonant(direct, exp)
