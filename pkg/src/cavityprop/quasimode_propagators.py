"""Model parameters, coupling function, and closed-form quasi-mode propagators.

The atom (transition frequency omega_a) couples to the "+" continuum with the
Lorentzian coupling

    g(k) = e^{i phase} sqrt(lam kappa_c / pi) / (k - k_c + i kappa_c),

normalized so that the coupling strength lam = integral |g(k)|^2 dk.  All
k-integrations run over the whole real line.

Phi^(N)_pq(omega) is the resolvent matrix element between atom-plus-quasi-mode
states with N total excitations (p, q = atom occupation at the later/earlier
end).  Every Phi is a ratio of a linear numerator to the common quadratic

    (omega - Omega_+^(N)) (omega - Omega_-^(N))
        = [omega - N (k_c - i kappa_c)]
          x [omega - omega_a - (N-1)(k_c - i kappa_c)] - N lam,

which is how it is evaluated here: the two-pole residue form (A_pm, Omega_pm)
is exposed through ``pole_decomposition`` and is algebraically identical but
ill-conditioned when the square root degenerates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class PoleEvaluationError(ZeroDivisionError):
    """Raised when a propagator is evaluated too close to one of its poles."""


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the atom-cavity model; single source of truth.

    lam has units of frequency^2.  lam = 0 is accepted as the decoupled
    limit (the atom never emits); everything downstream then collapses to
    free evolution.  coupling_phase rotates g(k) by a global phase, which no
    physical |amplitude|^2 can depend on; it exists so tests can assert that.
    """

    omega_a: float
    k_c: float
    kappa_c: float
    lam: float
    n_max: int = 6
    coupling_phase: float = 0.0

    def __post_init__(self):
        if self.kappa_c <= 0:
            raise ValueError(f"kappa_c must be positive, got {self.kappa_c}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def pole_c(self) -> complex:
        """The complex quasi-mode frequency k_c - i kappa_c."""
        return self.k_c - 1j * self.kappa_c


@dataclass(frozen=True)
class PoleDecomposition:
    """Residue weights and pole positions of the two-pole quasi-mode propagator.

    A_plus + A_minus = 1 and Omega_plus + Omega_minus
    = omega_a + (2N-1)(k_c - i kappa_c) hold exactly; degenerate marks the
    collision Omega_plus == Omega_minus where the residue form breaks down.
    """

    n: int
    a_plus: complex
    a_minus: complex
    omega_plus: complex
    omega_minus: complex
    rabi: float = field(default=0.0)  # sqrt(N lam), the N-photon Rabi frequency
    degenerate: bool = field(default=False)


def coupling(k, params: ModelParams):
    """Atom-continuum coupling g(k); accepts real, complex, or array k.

    The single pole sits at k = k_c - i kappa_c, off the real axis, so the
    function is total on physical arguments.
    """
    amp = math.sqrt(params.lam * params.kappa_c / math.pi)
    phase = complex(math.cos(params.coupling_phase), math.sin(params.coupling_phase))
    return amp * phase / (k - params.k_c + 1j * params.kappa_c)


def coupling_residue(params: ModelParams) -> complex:
    """Residue of g(k) at its pole k_c - i kappa_c (used in contour integrals)."""
    amp = math.sqrt(params.lam * params.kappa_c / math.pi)
    phase = complex(math.cos(params.coupling_phase), math.sin(params.coupling_phase))
    return amp * phase


def zeta(omega, params: ModelParams):
    """Self-energy zeta(omega) = lam / (omega - k_c + i kappa_c).

    Equals the integral of |g(k)|^2 / (omega - k) over the real line for
    Im(omega) > 0, continued below.  Errors out at the pole k_c - i kappa_c.
    """
    den = omega - params.k_c + 1j * params.kappa_c
    _check_pole(den, omega, "zeta")
    return params.lam / den


def _check_pole(den, omega, what: str):
    scale = np.maximum(1.0, np.abs(omega))
    bad = np.abs(den) < 1e-13 * scale
    if np.any(bad):
        raise PoleEvaluationError(f"{what} evaluated at a pole (omega={omega!r})")


def pole_decomposition(n: int, params: ModelParams) -> PoleDecomposition:
    """Residues A_pm^(N) and poles Omega_pm^(N), principal square-root branch.

    A_pm = (1/2) [1 pm (d/2) / sqrt(d^2/4 + N lam)],
    Omega_pm = omega_a/2 + (N - 1/2)(k_c - i kappa_c) pm sqrt(d^2/4 + N lam),

    with d = omega_a - k_c + i kappa_c.  The pair {Omega_+, Omega_-} is
    branch independent; only the +/- labels depend on the branch choice.
    """
    if n < 1:
        raise ValueError(f"pole_decomposition requires n >= 1, got {n}")
    d = params.omega_a - params.k_c + 1j * params.kappa_c
    root = np.sqrt(complex(d * d / 4.0 + n * params.lam))
    center = params.omega_a / 2.0 + (n - 0.5) * params.pole_c
    degenerate = bool(abs(root) < 1e-13 * max(1.0, abs(center)))
    if degenerate:
        a_plus = a_minus = complex(0.5)
    else:
        a_plus = 0.5 * (1.0 + (d / 2.0) / root)
        a_minus = 0.5 * (1.0 - (d / 2.0) / root)
    return PoleDecomposition(
        n=n,
        a_plus=a_plus,
        a_minus=a_minus,
        omega_plus=center + root,
        omega_minus=center - root,
        rabi=math.sqrt(n * params.lam),
        degenerate=degenerate,
    )


def phi(n: int, p: int, q: int, omega, params: ModelParams):
    """Quasi-mode propagator Phi^(N)_pq(omega); omega may be an array.

    Phi^(0)_00 = 1/omega.  For N >= 1 the four components share the quadratic
    denominator (omega - Omega_+)(omega - Omega_-):

        Phi_11: numerator omega - N (k_c - i kappa_c)
        Phi_00: numerator omega - omega_a - (N-1)(k_c - i kappa_c)
        Phi_01 = Phi_10: numerator sqrt(N lam)

    Requires n >= p and n >= q (no negative quasi-photon counts); n = 0 only
    supports p = q = 0.  Evaluation at a pole raises PoleEvaluationError.
    """
    if p not in (0, 1) or q not in (0, 1):
        raise ValueError(f"p and q must be 0 or 1, got p={p}, q={q}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n < p or n < q:
        raise ValueError(f"invalid excitation numbers: n={n} < p={p} or q={q}")
    omega = np.asarray(omega, dtype=complex) if np.ndim(omega) else complex(omega)
    if n == 0:
        _check_pole(omega, omega, "phi(0,0,0)")
        return 1.0 / omega
    pd = pole_decomposition(n, params)
    d_plus = omega - pd.omega_plus
    d_minus = omega - pd.omega_minus
    _check_pole(d_plus, omega, f"phi({n},{p},{q})")
    _check_pole(d_minus, omega, f"phi({n},{p},{q})")
    if p == 1 and q == 1:
        num = omega - n * params.pole_c
    elif p == 0 and q == 0:
        num = omega - params.omega_a - (n - 1) * params.pole_c
    else:  # p != q, both off-diagonal components are one and the same function
        num = pd.rabi
    return num / (d_plus * d_minus)


def gamma_sp(params: ModelParams) -> float:
    """Cavity-modified spontaneous-emission (amplitude) decay rate of the atom.

    Defined as the smaller |Im Omega_pm^(1)|, the decay rate of the slow pole
    of Phi^(1)_11.  At resonance this is kappa_c/2 - Re sqrt(kappa_c^2/4 - lam),
    which reduces to the Purcell rate lam/kappa_c for weak coupling and
    saturates at kappa_c/2 when lam >= kappa_c^2/4 (warned: both poles then
    decay equally fast and no single rate dominates).
    """
    pd = pole_decomposition(1, params)
    slow = min(abs(pd.omega_plus.imag), abs(pd.omega_minus.imag))
    fast = max(abs(pd.omega_plus.imag), abs(pd.omega_minus.imag))
    if params.lam > 0 and fast - slow < 1e-12 * max(fast, params.kappa_c):
        warnings.warn(
            "strong coupling (lam > kappa_c^2/4): both poles decay at the "
            "same rate; gamma_sp = kappa_c/2 is not a spontaneous-decay rate",
            stacklevel=2,
        )
    return slow
