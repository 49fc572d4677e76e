"""Continuum mode structure of a two-sided Fabry-Perot cavity in 1D.

The mirrors are delta sheets: thin dielectric slabs of thickness l and index
n taken in the limit l -> 0, n -> infinity with n^2 l -> mu finite.  A mirror
is then fully characterized by the single real parameter mu, and the cavity
by (L, mu_left, mu_right).  Units are hbar = c = 1, so k doubles as frequency.

The quasi-mode of index m is the complex zero of D(k) = 1 - r_L r_R e^{2ikL}
near m pi / L; its real part k_c is the resonance center and -Im part kappa_c
the cavity decay rate.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class CavityGeometry:
    """Two-sided cavity: length and the two mirror strengths (units 1/k).

    The refractive weight n(x) = 1 + mu_left delta(x + L/2)
    + mu_right delta(x - L/2) is implied, not stored.  The symmetric
    configuration mu_left == mu_right is the validated regime; asymmetric
    values are accepted but flagged with a warning.
    """

    length: float
    mu_left: float
    mu_right: float

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"cavity length must be positive, got {self.length}")
        if self.mu_left < 0 or self.mu_right < 0:
            raise ValueError("mirror parameters mu must be nonnegative")
        if self.mu_left != self.mu_right:
            warnings.warn(
                "asymmetric mirrors (mu_left != mu_right) are outside the "
                "validated regime",
                stacklevel=2,
            )

    @property
    def symmetric(self) -> bool:
        return self.mu_left == self.mu_right


@dataclass(frozen=True)
class MirrorCoefficients:
    """Amplitude reflection r and transmission t of one delta-sheet mirror at
    wavenumber k.  Lossless: |r|^2 + |t|^2 = 1 and r t* is purely imaginary.
    """

    r: complex
    t: complex
    k: float


@dataclass(frozen=True)
class QuasiModeParams:
    """One cavity resonance: center k_c, decay rate kappa_c, mode index m."""

    k_c: float
    kappa_c: float
    mode_index: int


def mirror_coefficients(k: float, mu: float) -> MirrorCoefficients:
    """Reflection and transmission of a single delta-sheet mirror.

    r = i k mu / (2 - i k mu),  t = 2 / (2 - i k mu).

    The denominator never vanishes for real k, mu, so this is total.
    """
    denom = 2.0 - 1j * k * mu
    return MirrorCoefficients(r=1j * k * mu / denom, t=2.0 / denom, k=k)


def _mirror_r(k: complex, mu: float) -> complex:
    # Same formula continued to complex k; used for D(k) off the real axis.
    return 1j * k * mu / (2.0 - 1j * k * mu)


def d_function(k: complex, geom: CavityGeometry, r_eval_k: float | None = None) -> complex:
    """Resonance denominator D(k) = 1 - r_L(k) r_R(k) e^{2ikL}.

    By default the mirror coefficients are evaluated at the same (possibly
    complex) k as the exponential.  With r_eval_k set, r_L and r_R are frozen
    at that real wavenumber; the quasi-mode (k_c, kappa_c) of
    ``quasimode_params`` is an exact root of the frozen D.
    """
    k_r = k if r_eval_k is None else r_eval_k
    r_l = _mirror_r(k_r, geom.mu_left)
    r_r = _mirror_r(k_r, geom.mu_right)
    return 1.0 - r_l * r_r * cmath.exp(2j * k * geom.length)


def _mode_coefficients(side: str, k: float, geom: CavityGeometry):
    """R, I, J, T coefficients of the piecewise mode function.

    For side="left" these are R_L, I_L, J_L, T_L; for side="right" the roles
    of the two mirrors are interchanged.  T is common to both sides.
    """
    if side == "left":
        mu_near, mu_far = geom.mu_left, geom.mu_right
    elif side == "right":
        mu_near, mu_far = geom.mu_right, geom.mu_left
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    near = mirror_coefficients(k, mu_near)
    far = mirror_coefficients(k, mu_far)
    L = geom.length
    d = 1.0 - near.r * far.r * cmath.exp(2j * k * L)
    big_r = (near.r * cmath.exp(-1j * k * L)
             + far.r * cmath.exp(1j * k * L + 2j * cmath.phase(near.t))) / d
    big_i = near.t / d
    big_j = near.t * far.r * cmath.exp(1j * k * L) / d
    big_t = near.t * far.t / d
    return big_r, big_i, big_j, big_t


def mode_function(side: str, k: float, x: float, geom: CavityGeometry) -> complex:
    """Continuum mode u_L(k, x) or u_R(k, x) of the whole cavity system.

    side="left" is the mode incident from x = -infinity, side="right" from
    x = +infinity.  Requires k > 0.  The function is continuous at both
    mirrors; its derivative jumps by -k^2 mu u there (delta-sheet matching).
    """
    if k <= 0:
        raise ValueError(f"mode_function requires k > 0, got {k}")
    big_r, big_i, big_j, big_t = _mode_coefficients(side, k, geom)
    half = geom.length / 2.0
    if side == "left":
        if x < -half:
            return cmath.exp(1j * k * x) + big_r * cmath.exp(-1j * k * x)
        if x <= half:
            return big_i * cmath.exp(1j * k * x) + big_j * cmath.exp(-1j * k * x)
        return big_t * cmath.exp(1j * k * x)
    # right mode: mirror image, propagating in -x
    if x > half:
        return cmath.exp(-1j * k * x) + big_r * cmath.exp(1j * k * x)
    if x >= -half:
        return big_i * cmath.exp(-1j * k * x) + big_j * cmath.exp(1j * k * x)
    return big_t * cmath.exp(-1j * k * x)


def quasimode_params(geom: CavityGeometry, m: int, refine: int = 0) -> QuasiModeParams:
    """Quasi-mode center and width from the zeros of D(k).

    k_c = m pi / L - Im[ln(r_L r_R)] / (2L)
    kappa_c = -Re[ln(r_L r_R)] / (2L)

    with r_L, r_R evaluated at k = m pi / L.  The logarithm is treated as
    locally constant in k; ``refine`` extra fixed-point passes re-evaluate
    the mirrors at the current k_c estimate (one pass suffices at high
    finesse).
    """
    if m < 1:
        raise ValueError(f"mode index m must be >= 1, got {m}")
    k0 = m * math.pi / geom.length
    k_eval = k0
    for _ in range(refine + 1):
        prod = _mirror_r(k_eval, geom.mu_left) * _mirror_r(k_eval, geom.mu_right)
        mag = abs(prod)
        if not 0.0 < mag < 1.0:
            raise ValueError(
                "quasi-mode undefined: |r_L r_R| must lie in (0, 1) near "
                f"m pi / L, got {mag} (transparent or perfect mirrors)"
            )
        log_prod = cmath.log(prod)
        k_c = k0 - log_prod.imag / (2.0 * geom.length)
        kappa_c = -log_prod.real / (2.0 * geom.length)
        k_eval = k_c
    return QuasiModeParams(k_c=k_c, kappa_c=kappa_c, mode_index=m)
