"""Potential families, model parameters, and closed-form special functions.

Everything downstream (assembly, 1D analysis, certificates) consumes the
immutable value types defined here.  The potential is a compactly supported,
non-negative C1 function with known support half-width and sup norm; the
windows are smooth bumps normalized so the square integrates to one.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import ParameterError, ValidationError

POTENTIAL_KINDS = ("cosine-bump", "smooth-bump", "tabulated")
WINDOW_ROLES = ("weyl-y", "weyl-x", "trial")

# exp(-1/u) underflows to a denormal around u = 1/700; below that the bump is
# numerically zero and the derivative formulas would produce inf * 0.
_U_FLOOR = 1.0 / 700.0


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """A compactly supported, non-negative potential with bounded slope.

    kind is one of POTENTIAL_KINDS.  For the built-in kinds the amplitude v0
    equals the sup norm exactly; for tabulated data the sup norm comes from
    the samples.  Evaluation outside [-a, a] is exactly zero.
    """

    kind: str
    a: float
    v0: float
    samples: np.ndarray | None = None
    _interp: object = field(default=None, repr=False)

    def __call__(self, x):
        arr, scalar = _as_array(x)
        out = np.zeros_like(arr)
        if self.kind == "cosine-bump":
            # strict mask: cos(pi/2)^2 rounds to ~1e-32, not the exact zero
            # the support contract promises at |x| = a
            m = np.abs(arr) < self.a
            out[m] = self.v0 * np.cos(np.pi * arr[m] / (2.0 * self.a)) ** 2
        elif self.kind == "smooth-bump":
            s = arr / self.a
            u = 1.0 - s * s
            m = u > _U_FLOOR
            out[m] = self.v0 * np.exp(1.0 - 1.0 / u[m])
        else:
            xs = self.samples[:, 0]
            m = (arr >= xs[0]) & (arr <= xs[-1])
            out[m] = self._interp(arr[m])
        return float(out) if scalar else out

    @property
    def sup_norm(self) -> float:
        if self.kind == "tabulated":
            return float(np.max(self.samples[:, 1]))
        return self.v0

    def integral(self) -> float:
        """Integral of V over the line; closed form for the cosine bump."""
        if self.kind == "cosine-bump":
            return self.a * self.v0
        return quadrature.integrate_adaptive(self, -self.a, self.a, rel_tol=1e-12)


def make_potential(kind, a, v0, samples=None, slope_bound=None) -> PotentialSpec:
    """Construct and validate a PotentialSpec.

    For kind "tabulated", `samples` must be an (m, 2) array of (x, V(x))
    pairs covering [-a, a] with non-negative values vanishing at the support
    ends; monotone cubic interpolation is used between samples and the
    discrete slope is checked at 1e4 points against `slope_bound`
    (default 100 * max(V) / a).
    """
    if not (a > 0):
        raise ParameterError("support half-width a must be positive, got %r" % (a,))
    if not (v0 > 0):
        raise ParameterError("amplitude v0 must be positive, got %r" % (v0,))
    if kind not in POTENTIAL_KINDS:
        raise ParameterError("unknown potential kind %r; expected one of %s" % (kind, POTENTIAL_KINDS))
    if kind != "tabulated":
        if samples is not None:
            raise ParameterError("samples are only accepted for the tabulated kind")
        return PotentialSpec(kind, float(a), float(v0))

    if samples is None:
        raise ValidationError("tabulated potential needs (x, V) samples")
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 4:
        raise ValidationError("samples must be an (m, 2) array with m >= 4")
    xs, vs = arr[:, 0], arr[:, 1]
    if np.any(np.diff(xs) <= 0):
        raise ValidationError("sample abscissae must be strictly increasing")
    if xs[0] < -a or xs[-1] > a:
        raise ValidationError("samples extend outside the declared support [-a, a]")
    if np.any(vs < 0):
        raise ValidationError("tabulated potential must be non-negative")
    vmax = float(np.max(vs))
    if vmax == 0.0:
        raise ValidationError("tabulated potential is identically zero")
    edge = 1e-12 * vmax
    if abs(xs[0] + a) > 1e-12 * a or abs(xs[-1] - a) > 1e-12 * a:
        raise ValidationError("samples must cover the full support [-a, a]")
    if vs[0] > edge or vs[-1] > edge:
        raise ValidationError("tabulated potential must vanish at the support ends")

    from scipy.interpolate import PchipInterpolator

    interp = PchipInterpolator(xs, vs, extrapolate=False)
    bound = slope_bound if slope_bound is not None else 100.0 * vmax / a
    probe = np.linspace(xs[0], xs[-1], 10_000)
    if np.max(np.abs(interp.derivative()(probe))) > bound:
        raise ValidationError("tabulated potential slope exceeds the configured bound %g" % bound)
    return PotentialSpec("tabulated", float(a), float(v0), arr, interp)


@dataclass(frozen=True)
class ModelParams:
    """Frequency, coupling, and potential defining both operators.

    The coupling is named `lam` because `lambda` is reserved in Python; the
    config key is still model.lambda.
    """

    omega: float
    lam: float
    potential: PotentialSpec

    def __post_init__(self):
        if not (self.omega > 0):
            raise ParameterError("omega must be positive, got %r" % (self.omega,))
        if not (self.lam >= 0):
            raise ParameterError("lambda must be non-negative, got %r" % (self.lam,))


@dataclass(frozen=True)
class WindowSpec:
    """A smooth bump window, L2-normalized on its support.

    All derivatives vanish at the support endpoints.  `alpha` (trial role
    only) is the minimum of the window over the middle half of its support.
    """

    role: str
    support: tuple
    normalization: float
    alpha: float | None = None

    def _shape(self, z):
        if self.role == "trial":
            u = 1.0 - z * z
            up = -2.0 * z
        else:
            z0, z1 = self.support
            u = (z - z0) * (z1 - z)
            up = z0 + z1 - 2.0 * z
        return u, up, -2.0

    def _masked(self, z):
        arr, scalar = _as_array(z)
        z0, z1 = self.support
        u, up, upp = self._shape(arr)
        m = (arr > z0) & (arr < z1) & (u > _U_FLOOR)
        return arr, scalar, u, up, upp, m

    def value(self, z):
        arr, scalar, u, up, _, m = self._masked(z)
        out = np.zeros_like(arr)
        out[m] = self.normalization * np.exp(-1.0 / u[m])
        return float(out) if scalar else out

    __call__ = value

    def d1(self, z):
        arr, scalar, u, up, _, m = self._masked(z)
        out = np.zeros_like(arr)
        um, upm = u[m], up[m]
        out[m] = self.normalization * np.exp(-1.0 / um) * upm / um**2
        return float(out) if scalar else out

    def d2(self, z):
        arr, scalar, u, up, upp, m = self._masked(z)
        out = np.zeros_like(arr)
        um, upm = u[m], up[m]
        fac = (upm / um**2) ** 2 + upp / um**2 - 2.0 * upm**2 / um**3
        out[m] = self.normalization * np.exp(-1.0 / um) * fac
        return float(out) if scalar else out

    def deriv(self, z, order: int):
        if order == 0:
            return self.value(z)
        if order == 1:
            return self.d1(z)
        if order == 2:
            return self.d2(z)
        raise ParameterError("window derivatives are available up to order 2")


_WINDOW_CACHE: dict = {}


def make_window(role: str) -> WindowSpec:
    """Build one of the three pinned windows.

    weyl-y and weyl-x share the bump exp(-1/((z-1)(2-z))) on [1, 2]; trial is
    exp(-1/(1-z^2)) on [-1, 1].  The normalization making the square integrate
    to one is computed once by adaptive quadrature and cached.
    """
    if role not in WINDOW_ROLES:
        raise ParameterError("unknown window role %r; expected one of %s" % (role, WINDOW_ROLES))
    if role in _WINDOW_CACHE:
        return _WINDOW_CACHE[role]
    support = (-1.0, 1.0) if role == "trial" else (1.0, 2.0)
    raw = WindowSpec(role, support, 1.0)
    sq = quadrature.integrate_adaptive(
        lambda z: raw.value(z) ** 2, support[0], support[1], rel_tol=1e-13
    )
    norm = 1.0 / math.sqrt(sq)
    alpha = None
    if role == "trial":
        # On |z| <= 1/2 the exponent -1/(1 - z^2) is smallest at z = +-1/2.
        alpha = norm * math.exp(-4.0 / 3.0)
    win = WindowSpec(role, support, norm, alpha)
    _WINDOW_CACHE[role] = win
    return win


def oscillator_ground_state(omega: float):
    """Ground eigenvalue and normalized eigenfunction of -d2/dy2 + omega^2 y^2.

    Returns (omega, g) with g(y) = (omega/pi)^(1/4) exp(-omega y^2 / 2).
    """
    if not (omega > 0):
        raise ParameterError("omega must be positive, got %r" % (omega,))
    prefactor = (omega / math.pi) ** 0.25

    def g(y):
        arr, scalar = _as_array(y)
        out = prefactor * np.exp(-0.5 * omega * arr * arr)
        return float(out) if scalar else out

    return float(omega), g
