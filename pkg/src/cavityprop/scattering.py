"""Single-photon packet scattering off an excited atom: two-photon spectra.

The initial state is an excited atom plus one incoming Lorentzian photon
packet at resonance (packet center = omega_a = k_c assumed by the closed
forms).  At long times the system relaxes to two free photons with joint
spectral amplitude C(k1, k2), computed here from the pole structure of the
two-excitation propagator.  The overall free phase e^{-i(k1+k2)t} is
dropped; |C|^2 and all reported quantities are phase-blind.

The amplitude splits into an unlinked part, where the incoming photon never
touches the atom and simply factors against spontaneous emission, and two
linked parts involving the integrals I1 and I2 over intermediate momenta.
Both integrals are evaluated by closing the contour in the lower half-plane
(residues at the packet pole and the coupling pole); adaptive quadrature
along the real line serves as an independent cross-check and as the
fallback when the two poles collide.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .quasimode_propagators import (
    ModelParams,
    PoleEvaluationError,
    coupling,
    coupling_residue,
    phi,
    pole_decomposition,
)

SUBSETS = ("all", "unlinked_only", "unlinked_plus_lowest_linked")


class PoleCollisionError(ValueError):
    """Raised by the residue method when packet and coupling poles coincide."""


@dataclass(frozen=True)
class InputPacket:
    """Lorentzian single-photon packet: spectral width kappa_in, peak at center.

    amplitude(k) = sqrt(kappa_in/pi) / (k - center + i kappa_in), normalized
    to unit integral of |amplitude|^2 with its pole in the lower half-plane
    so the packet arrives causally.
    """

    kappa_in: float
    center: float

    def __post_init__(self):
        if self.kappa_in <= 0:
            raise ValueError(f"kappa_in must be positive, got {self.kappa_in}")

    @property
    def pole(self) -> complex:
        return self.center - 1j * self.kappa_in

    @property
    def residue(self) -> float:
        return math.sqrt(self.kappa_in / math.pi)

    def amplitude(self, k):
        return self.residue / (k - self.center + 1j * self.kappa_in)


def _require_resonance(params: ModelParams):
    if abs(params.omega_a - params.k_c) > 1e-12 * max(1.0, abs(params.k_c)):
        raise ValueError(
            "closed-form scattering requires resonance omega_a = k_c; "
            f"got omega_a={params.omega_a}, k_c={params.k_c}"
        )


def _poles_collide(packet: InputPacket, params: ModelParams) -> bool:
    return abs(packet.pole - params.pole_c) < 1e-12 * params.kappa_c


def _residue_pair(k1, k2, packet: InputPacket, params: ModelParams, tail: Callable):
    """-2 pi i times the two lower-half-plane residues of a linked integrand.

    Both I1 and I2 share the factor g(k') Phi^(1)_11(k1+k2-k') C(k') whose
    lower poles are the coupling pole k_c - i kappa_c and the packet pole;
    tail(k1, k2, kprime) supplies the remaining rational factor.
    """
    if _poles_collide(packet, params):
        raise PoleCollisionError(
            "packet pole equals coupling pole (kappa_in = kappa_c at center = k_c)"
        )
    s = np.asarray(k1) + np.asarray(k2)
    pc = params.pole_c
    pp = packet.pole
    res_g = (
        coupling_residue(params)
        * phi(1, 1, 1, s - pc, params)
        * packet.amplitude(pc)
        * tail(k1, k2, pc)
    )
    res_c = (
        coupling(pp, params)
        * phi(1, 1, 1, s - pp, params)
        * packet.residue
        * tail(k1, k2, pp)
    )
    return -2j * math.pi * (res_g + res_c)


def _quad_complex(f, a, b, **kw):
    re = quad(lambda x: f(x).real, a, b, limit=400, **kw)[0]
    im = quad(lambda x: f(x).imag, a, b, limit=400, **kw)[0]
    return re + 1j * im


def _line_integral(f, params: ModelParams, packet: InputPacket, interior):
    """Adaptive real-line integral with pole-location hints and infinite tails."""
    pts = sorted(
        {params.k_c, packet.center, *interior}
    )
    span = 60.0 * params.kappa_c + 30.0 * packet.kappa_in
    lo = min(pts) - span
    hi = max(pts) + span
    mid = _quad_complex(f, lo, hi, points=pts, epsabs=1e-11, epsrel=1e-11)
    left = _quad_complex(f, -np.inf, lo, epsabs=1e-12)
    right = _quad_complex(f, hi, np.inf, epsabs=1e-12)
    return left + mid + right


def _neville_to_zero(xs, ys):
    # polynomial extrapolation of ys(xs) to x = 0
    n = len(xs)
    t = list(ys)
    for level in range(1, n):
        for i in range(n - level):
            t[i] = t[i + 1] + (t[i + 1] - t[i]) * xs[i + level] / (
                xs[i] - xs[i + level]
            )
    return t[0]


def i1(k1, k2, packet: InputPacket, params: ModelParams, method: str = "residue"):
    """The linked integral with the i delta prescription, lower-half closure.

    I1 = lim_{delta->0+} int dk' g(k') Phi^(1)_11(k1+k2-k') C(k')
         / (k1 - k' + i delta).

    The residue method is exact in the delta -> 0 limit (the prescription
    pole sits in the upper half-plane and never contributes); the quadrature
    method integrates at small finite delta and extrapolates delta -> 0.
    """
    if method == "residue":
        return _residue_pair(
            k1, k2, packet, params, lambda a, b, kp: 1.0 / (np.asarray(a) - kp)
        )
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    s = k1 + k2

    def integrand(kp, delta):
        return (
            coupling(kp, params)
            * phi(1, 1, 1, s - kp, params)
            * packet.amplitude(kp)
            / (k1 - kp + 1j * delta)
        )

    deltas = np.array([1e-2, 1e-3, 1e-4]) * params.kappa_c
    vals = [
        _line_integral(
            lambda kp: integrand(kp, d), params, packet, interior=(k1, s - params.k_c)
        )
        for d in deltas
    ]
    return _neville_to_zero(deltas, vals)


def i2(k1, k2, packet: InputPacket, params: ModelParams, method: str = "residue"):
    """The second linked integral; depends on k1, k2 through k1 + k2 only.

    I2 = int dk' g(k') Phi^(1)_11(k1+k2-k') C(k')
         / (k1 + k2 - k' - k_c + i kappa_c).

    The explicit denominator pole lies at k' = k1+k2-k_c+i kappa_c, in the
    upper half-plane, so under the same lower-half closure as I1 only the
    packet and coupling poles contribute.
    """
    if method == "residue":
        return _residue_pair(
            k1,
            k2,
            packet,
            params,
            lambda a, b, kp: 1.0
            / (np.asarray(a) + np.asarray(b) - kp - params.k_c + 1j * params.kappa_c),
        )
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    s = k1 + k2

    def integrand(kp):
        return (
            coupling(kp, params)
            * phi(1, 1, 1, s - kp, params)
            * packet.amplitude(kp)
            / (s - kp - params.k_c + 1j * params.kappa_c)
        )

    return _line_integral(integrand, params, packet, interior=(k1, s - params.k_c))


def _one_ordering(k1, k2, packet: InputPacket, params: ModelParams, subset: str):
    """The un-symmetrized bracket T(k1, k2); the full amplitude adds T(k2, k1)."""
    g1c = np.conj(coupling(k1, params))
    phi1 = phi(1, 1, 1, np.asarray(k1, dtype=complex), params)
    total = g1c * phi1 * packet.amplitude(k2)
    if subset == "unlinked_only":
        return total
    g2c = np.conj(coupling(k2, params))
    try:
        total = total + g2c * g1c * phi1 * i1(k1, k2, packet, params)
        if subset == "unlinked_plus_lowest_linked":
            return total
        s = np.asarray(k1) + np.asarray(k2)
        cavity = params.lam / (np.asarray(k1) - params.k_c + 1j * params.kappa_c)
        total = total + (
            g2c * g1c * cavity * phi1 * phi(2, 1, 1, s, params) * i2(k1, k2, packet, params)
        )
        return total
    except PoleCollisionError:
        warnings.warn(
            "packet pole collides with the coupling pole; "
            "falling back to quadrature for the linked integrals",
            stacklevel=3,
        )
        k1a, k2a = np.broadcast_arrays(np.asarray(k1, float), np.asarray(k2, float))
        lin1 = np.empty(k1a.shape, dtype=complex)
        lin2 = np.empty(k1a.shape, dtype=complex)
        for idx in np.ndindex(k1a.shape):
            lin1[idx] = i1(k1a[idx], k2a[idx], packet, params, method="quadrature")
            lin2[idx] = i2(k1a[idx], k2a[idx], packet, params, method="quadrature")
        if k1a.shape == ():
            lin1, lin2 = complex(lin1), complex(lin2)
        total = total + g2c * g1c * phi1 * lin1
        if subset == "unlinked_plus_lowest_linked":
            return total
        s = k1a + k2a
        cavity = params.lam / (k1a - params.k_c + 1j * params.kappa_c)
        return total + g2c * g1c * cavity * phi1 * phi(2, 1, 1, s, params) * lin2


def two_photon_amplitude(
    k1, k2, packet: InputPacket, params: ModelParams, subset: str = "all"
):
    """Long-time two-photon amplitude C(k1, k2), exchange symmetric by construction.

    subset selects the diagram classes: "unlinked_only" keeps the
    spectator-photon term alone, "unlinked_plus_lowest_linked" adds the I1
    (single-interaction) term, "all" adds the I2 cavity-mediated term.
    Accepts scalar or broadcastable array momenta.
    """
    if subset not in SUBSETS:
        raise ValueError(f"subset must be one of {SUBSETS}, got {subset!r}")
    _require_resonance(params)
    t12 = _one_ordering(k1, k2, packet, params, subset)
    t21 = _one_ordering(k2, k1, packet, params, subset)
    return (t12 + t21) / math.sqrt(2.0)


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """A bound two-photon amplitude: packet, parameters, and diagram subset."""

    packet: InputPacket
    params: ModelParams
    diagram_subset: str = "all"

    def value(self, k1, k2):
        return two_photon_amplitude(
            k1, k2, self.packet, self.params, self.diagram_subset
        )


@dataclass(frozen=True, eq=False)
class JointSpectrumGrid:
    """|C(k1,k2)|^2 sampled on a square grid, with trapezoid-rule norm."""

    k1_axis: np.ndarray
    k2_axis: np.ndarray
    values: np.ndarray
    params: ModelParams
    packet: InputPacket
    diagram_subset: str
    integrated_norm: float


def joint_spectrum_grid(
    window: float,
    n_points: int,
    packet: InputPacket,
    params: ModelParams,
    subset: str = "all",
) -> JointSpectrumGrid:
    """Sample |C|^2 on [k_c - window, k_c + window]^2 with n_points per axis."""
    if window <= 0:
        raise ValueError(f"window must be positive, got {window}")
    if n_points < 16:
        raise ValueError(f"n_points must be >= 16, got {n_points}")
    axis = np.linspace(params.k_c - window, params.k_c + window, n_points)
    amp = two_photon_amplitude(
        axis[:, None], axis[None, :], packet, params, subset
    )
    values = np.abs(amp) ** 2
    norm = float(np.trapezoid(np.trapezoid(values, axis, axis=1), axis))
    return JointSpectrumGrid(
        k1_axis=axis,
        k2_axis=axis.copy(),
        values=values,
        params=params,
        packet=packet,
        diagram_subset=subset,
        integrated_norm=norm,
    )


_GEOMETRIC_STEPS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0,
                    256.0, 1024.0, 4096.0, 16384.0, 65536.0, 262144.0)


def _axis_breaks(centers) -> np.ndarray:
    """Panel breakpoints resolving each (center, width) ridge, geometric far field."""
    pts = []
    for c, w in centers:
        for m in _GEOMETRIC_STEPS:
            pts.append(c - m * w)
            pts.append(c + m * w)
    pts = np.unique(np.asarray(pts, dtype=float))
    keep = [pts[0]]
    for x in pts[1:]:
        if x - keep[-1] > 1e-9 * max(1.0, abs(x)):
            keep.append(x)
    return np.asarray(keep)


def _panel_nodes(breaks: np.ndarray, order: int):
    """Gauss-Legendre nodes and weights for every panel, flattened."""
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[:-1] + breaks[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrated_norm_exact(
    packet: InputPacket,
    params: ModelParams,
    subset: str = "all",
    order: int = 24,
) -> float:
    """The integral of |C|^2 over the whole plane, by ridge-aware panel quadrature.

    |C|^2 concentrates on three line families: k_i = k_c (emission ridge,
    width set by the slow pole of Phi^(1)_11), k_i = packet center (width
    kappa_in), and the two-photon resonance k1 + k2 = 2 k_c.  Each axis is
    split into Gauss-Legendre panels scaled to those widths, with panels
    growing geometrically out to ~2.6e5 widths; the integrand decays
    quadratically, so the truncated tail is below 1e-5.  The inner panel set
    is rebuilt per outer node because the diagonal ridge moves with k1.
    order is the Gauss-Legendre order per panel.
    """
    pd = pole_decomposition(1, params)
    slow = min(abs(pd.omega_plus.imag), abs(pd.omega_minus.imag))
    w_em = max(slow, 1e-3 * params.kappa_c)
    kc = params.k_c
    outer_centers = [(kc, w_em), (kc, params.kappa_c), (packet.center, packet.kappa_in)]
    k1_nodes, k1_weights = _panel_nodes(_axis_breaks(outer_centers), order)
    total = 0.0
    for k1, w1 in zip(k1_nodes, k1_weights):
        inner_centers = outer_centers + [(2 * kc - k1, w_em), (2 * kc - k1, params.kappa_c)]
        k2_nodes, k2_weights = _panel_nodes(_axis_breaks(inner_centers), order)
        amp = two_photon_amplitude(k1, k2_nodes, packet, params, subset)
        total += w1 * float(np.dot(k2_weights, np.abs(amp) ** 2))
    return total
