"""Shared fixtures.

The discretized-evolution comparison at the acceptance configuration
(M=2000, W=40, t_final=50/gamma_sp) takes several minutes, so it runs once
per session and is shared by the oracle tests and the acceptance gate.
"""

import numpy as np
import pytest

from cavityprop import InputPacket, ModelParams, gamma_sp
from cavityprop import oracle as oracle_mod
from cavityprop.scattering import JointSpectrumGrid, two_photon_amplitude

# slow decay rate of the excited atom at lam=0.1, kappa_c=1, on resonance:
# kappa_c/2 - sqrt(kappa_c^2/4 - lam)
GAMMA_SP_REFERENCE = 0.1127016653792583


@pytest.fixture(scope="session")
def params():
    return ModelParams(omega_a=0.0, k_c=0.0, kappa_c=1.0, lam=0.1)


@pytest.fixture(scope="session")
def gsp(params):
    return gamma_sp(params)


@pytest.fixture(scope="session")
def packet(params, gsp):
    return InputPacket(kappa_in=gsp, center=params.k_c)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def oracle_comparison(params, kappa_in, m, w, t_final, window):
    """Analytic grid on node-aligned axes, then the time-domain comparison."""
    pkt = InputPacket(kappa_in=kappa_in, center=params.k_c)
    model = oracle_mod.build(params, m=m, w=w, kappa_in=kappa_in)
    lo = np.searchsorted(model.k_grid, params.k_c - window)
    hi = np.searchsorted(model.k_grid, params.k_c + window, side="right")
    axes = model.k_grid[lo:hi]
    k1, k2 = np.meshgrid(axes, axes, indexing="ij")
    values = np.abs(two_photon_amplitude(k1, k2, pkt, params)) ** 2
    grid = JointSpectrumGrid(
        k1_axis=axes, k2_axis=axes, values=values, params=params, packet=pkt,
        diagram_subset="all", integrated_norm=float("nan"),
    )
    return oracle_mod.compare_joint_spectrum(model, pkt, t_final, grid, tol=1e-4)


@pytest.fixture(scope="session")
def acceptance_oracle_report(params, gsp):
    # the expensive run: keep every knob at the acceptance configuration
    return oracle_comparison(
        params, kappa_in=gsp, m=2000, w=40.0, t_final=50.0 / gsp, window=1.0
    )
