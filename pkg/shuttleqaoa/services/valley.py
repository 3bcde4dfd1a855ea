# shuttleqaoa/services/valley.py
"""
Shuttling noise: valley excitation in conveyor-mode transport, its average
over a Rice-distributed valley splitting, motional-narrowing dephasing and
shuttle relaxation.

Units: energies in µeV, lengths in nm, times in ns, velocities in nm/ns
(numerically equal to m/s).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special, stats

from ..errors import NumericalError
from .cache import MemoCache
from .channels import check_probability, clamp_probability, dephasing_relaxation_channel, identity_channel
from .metrics import METRICS

log = logging.getLogger(__name__)

HBAR_UEV_NS = 0.6582119569

# Rayleigh limit: the smallest mean/std ratio any Rice distribution reaches.
RICE_MIN_RATIO = math.sqrt(math.pi / (4.0 - math.pi))

# Beyond these ratios the Rice distribution is Gaussian to machine precision.
_ASYMPTOTIC_B = 1e3
_GAUSSIAN_RATIO = 1e3

TAIL_SIGMAS = 12.0

_INNER_TOL = dict(epsabs=1e-14, epsrel=1e-10, limit=200)
_OUTER_TOL = dict(epsabs=1e-12, epsrel=1e-8, limit=200)

_MEAN_CACHE = MemoCache("quad")


# ---- Rice moments ----

def rice_moments(nu, s):
    """(mean, std) of Rice(nu, s)."""
    if s <= 0 or nu < 0:
        raise ValueError("Rice parameters need nu >= 0, s > 0 (got nu=%r, s=%r)" % (nu, s))
    b = nu / s
    if b > _ASYMPTOTIC_B:
        return math.sqrt(nu * nu + s * s), s
    t = b * b / 4.0
    lag = (1.0 + 2.0 * t) * special.i0e(t) + 2.0 * t * special.i1e(t)
    mean = s * math.sqrt(math.pi / 2.0) * lag
    var = 2.0 * s * s + nu * nu - mean * mean
    return mean, math.sqrt(max(var, 0.0))


def _ratio(r):
    m, sd = rice_moments(r, 1.0)
    return m / sd


def rice_params_from_moments(mean, std):
    """
    Invert the Rice moment map. The shape depends only on nu/s, so the
    solve is a bracketed 1-D root on that ratio followed by a rescale.

    Raises:
        ValueError: moments no Rice distribution can have.
        NumericalError: root find did not reproduce the moments.
    """
    if not mean > 0 or not std > 0:
        raise ValueError("mean and std must be positive (got %r, %r)" % (mean, std))
    target = mean / std
    if target < RICE_MIN_RATIO * (1.0 - 1e-12):
        raise ValueError(
            "no Rice distribution has mean/std = %.6g (minimum %.6g)" % (target, RICE_MIN_RATIO))
    if target > _GAUSSIAN_RATIO:
        return math.sqrt(mean * mean - std * std), std
    if target <= RICE_MIN_RATIO:
        r = 0.0
    else:
        try:
            r = optimize.brentq(lambda x: _ratio(x) - target, 0.0, 2.0 * target + 10.0,
                                xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
        except (ValueError, RuntimeError) as exc:
            raise NumericalError("Rice inversion failed for mean=%r std=%r: %s" % (mean, std, exc))
    _, unit_std = rice_moments(r, 1.0)
    s = std / unit_std
    nu = r * s
    m2, s2 = rice_moments(nu, s)
    resid = max(abs(m2 - mean) / mean, abs(s2 - std) / std)
    if resid > 1e-8:
        raise NumericalError("Rice inversion residual %.3g for mean=%r std=%r" % (resid, mean, std))
    return nu, s


@dataclass(frozen=True)
class ValleyDistribution:
    """Rice-distributed valley splitting with its matching moments."""
    mean_Ev: float
    std_Ev: float
    rice_nu: float
    rice_s: float

    @classmethod
    def from_moments(cls, mean_Ev, std_Ev):
        nu, s = rice_params_from_moments(mean_Ev, std_Ev)
        return cls(float(mean_Ev), float(std_Ev), nu, s)

    def pdf_over_e(self, e):
        """pdf(E)/E, finite at E = 0 and free of Bessel overflow."""
        s2 = self.rice_s ** 2
        e = np.asarray(e, dtype=float)
        return np.exp(-(e - self.rice_nu) ** 2 / (2.0 * s2)) * special.i0e(e * self.rice_nu / s2) / s2

    def pdf(self, e):
        return np.asarray(e, dtype=float) * self.pdf_over_e(e)

    def support(self):
        """Integration window [max(0, mean - 12 std), mean + 12 std]; the tail
        beyond it carries less than 1e-30 of the mass."""
        return max(0.0, self.mean_Ev - TAIL_SIGMAS * self.std_Ev), self.mean_Ev + TAIL_SIGMAS * self.std_Ev

    def sample(self, size, rng):
        b = self.rice_nu / self.rice_s
        return stats.rice.rvs(b, scale=self.rice_s, size=size, random_state=rng)

    def key(self):
        return (self.mean_Ev, self.std_Ev)


@dataclass(frozen=True)
class ShuttleParams:
    dot_size_nm: float = 20.0
    noise_corr_length_nm: float = 1000.0
    velocity_mps: float = 10.0
    # relaxation probability per 10 µm of transport
    transverse_flip_rate: float = 1e-4

    def __post_init__(self):
        for name in ("dot_size_nm", "noise_corr_length_nm", "velocity_mps"):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be positive" % name)
        check_probability(self.transverse_flip_rate, "transverse_flip_rate")


# ---- excitation ----

def _coupling(delta_phi, v, dx):
    return HBAR_UEV_NS * v * abs(delta_phi) / dx


def valley_excitation_prob(E_v, delta_phi, v, dx):
    """Excitation probability after moving one dot size at velocity v."""
    if not v > 0 or not dx > 0:
        raise ValueError("velocity and dot size must be positive (got v=%r, dx=%r)" % (v, dx))
    e = np.asarray(E_v, dtype=float)
    a = HBAR_UEV_NS * v * np.abs(np.asarray(delta_phi, dtype=float)) / dx
    gap2 = e * e + a * a
    c = dx / (2.0 * HBAR_UEV_NS * v)
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(gap2 > 0.0, a * a / np.where(gap2 > 0.0, gap2, 1.0), 0.0)
    p = amp * np.sin(c * np.sqrt(gap2)) ** 2
    p = np.clip(p, 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def _quad(fn, lo, hi, label, **kwargs):
    res = integrate.quad(fn, lo, hi, full_output=1, **kwargs)
    if len(res) > 3:
        msg = str(res[3])
        if "roundoff" in msg.lower():
            log.warning("%s: quadrature roundoff on [%.6g, %.6g]: %s", label, lo, hi, msg.splitlines()[0])
        else:
            raise NumericalError("%s: quadrature did not converge on [%.6g, %.6g]: %s"
                                 % (label, lo, hi, msg.splitlines()[0]))
    return res[0]


def _phase_average(dist, delta_phi, v, dx):
    """Energy average of the excitation probability at fixed valley-phase step."""
    a = _coupling(delta_phi, v, dx)
    if a == 0.0:
        return 0.0
    c = dx / (2.0 * HBAR_UEV_NS * v)
    lo, hi = dist.support()
    pts = [dist.rice_nu] if lo < dist.rice_nu < hi else None

    def amplitude(e):
        return e * dist.pdf_over_e(e) * a * a / (e * e + a * a)

    A = _quad(amplitude, lo, hi, "valley amplitude", points=pts, **_INNER_TOL)

    # sin^2 = (1 - cos 2 theta)/2; substitute u = sqrt(E^2 + a^2) so the
    # oscillating part is a plain cosine weight.
    def weighted(u):
        e = math.sqrt(max(u * u - a * a, 0.0))
        return float(dist.pdf_over_e(e)) * a * a / u

    B = _quad(weighted, math.hypot(lo, a), math.hypot(hi, a), "valley oscillation",
              weight="cos", wvar=2.0 * c, **_INNER_TOL)
    return 0.5 * A - 0.5 * B


def _mean_excitation(dist, v, dx):
    METRICS.increment("quad.evaluations")
    total = _quad(lambda phi: _phase_average(dist, phi, v, dx), 0.0, math.pi,
                  "valley phase average", **_OUTER_TOL)
    return clamp_probability(total / math.pi, "mean valley excitation")


def mean_valley_excitation(dist, v, dx):
    """
    Excitation probability per dot size averaged over the valley splitting
    and a uniform valley-phase step in [-pi, pi] (even in the phase, so the
    integral runs over [0, pi]). Memoized per (distribution, v, dx).
    """
    if not v > 0 or not dx > 0:
        raise ValueError("velocity and dot size must be positive (got v=%r, dx=%r)" % (v, dx))
    key = (dist.mean_Ev, dist.std_Ev, float(v), float(dx))
    return _MEAN_CACHE.get_or_compute(key, lambda: _mean_excitation(dist, v, dx))


def mean_valley_excitation_mc(dist, v, dx, samples, seed=0, chunk=1_000_000):
    """Monte Carlo estimate of the mean excitation: (mean, standard error)."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = int(samples)
    if remaining < 2:
        raise ValueError("need at least 2 samples")
    while remaining > 0:
        n = min(chunk, remaining)
        e = dist.sample(n, rng)
        phi = rng.uniform(-math.pi, math.pi, size=n)
        p = valley_excitation_prob(e, phi, v, dx)
        total += float(np.sum(p))
        total_sq += float(np.sum(p * p))
        remaining -= n
    n = int(samples)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)


def clear_cache():
    _MEAN_CACHE.clear()


# ---- shuttle probabilities ----

def adiabatic_dephasing_prob(L_nm, v, sp, coherence):
    """Motional-narrowing dephasing 2 l_c L / (v T2)^2."""
    if math.isinf(coherence.T2_ns):
        return 0.0
    return 2.0 * sp.noise_corr_length_nm * L_nm / (v * coherence.T2_ns) ** 2


def valley_dephasing_prob(L_nm, v, dist, sp):
    """1 - (1 - p_bar)^n with n = L/dx taken as a real number."""
    if L_nm == 0:
        return 0.0
    pbar = mean_valley_excitation(dist, v, sp.dot_size_nm)
    n = L_nm / sp.dot_size_nm
    return -math.expm1(n * math.log1p(-pbar)) if pbar < 1.0 else 1.0


def shuttle_dephasing_prob(L_nm, v, dist, sp, coherence):
    if L_nm < 0:
        raise ValueError("shuttle distance must be >= 0, got %r" % L_nm)
    if L_nm == 0:
        return 0.0
    p_v = valley_dephasing_prob(L_nm, v, dist, sp)
    p_ad = adiabatic_dephasing_prob(L_nm, v, sp, coherence)
    return clamp_probability(1.0 - (1.0 - p_v) * (1.0 - p_ad), "shuttle dephasing")


def shuttle_relaxation_prob(L_nm, v, coherence, sp):
    if L_nm < 0 or not v > 0:
        raise ValueError("need L >= 0 and v > 0 (got L=%r, v=%r)" % (L_nm, v))
    p = L_nm / (v * coherence.T1_ns) + sp.transverse_flip_rate * L_nm / 10_000.0
    return clamp_probability(p, "shuttle relaxation")


def shuttle_channel(L_nm, v, sp, dist, coherence):
    if L_nm == 0:
        return identity_channel()
    p_deph = shuttle_dephasing_prob(L_nm, v, dist, sp, coherence)
    p_relax = shuttle_relaxation_prob(L_nm, v, coherence, sp)
    return dephasing_relaxation_channel(p_deph, p_relax, "shuttle(%.4g nm)" % L_nm)
