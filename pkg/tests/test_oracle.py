"""Discretized-continuum time evolution against the analytic amplitudes."""

import math
import warnings

import numpy as np
import pytest
from conftest import GAMMA_SP_REFERENCE, oracle_comparison
from scipy.linalg import get_blas_funcs

from cavityprop.oracle import (
    SectorState,
    _evolve_fixed,
    _kick,
    apply_hamiltonian,
    build,
    compare_joint_spectrum,
    evolve,
    evolve_single_excitation,
    initial_packet_state,
    two_photon_density,
)
from cavityprop.quasimode_propagators import ModelParams, coupling
from cavityprop.scattering import InputPacket


def _inner(x: SectorState, y: SectorState) -> complex:
    return complex(np.vdot(x.b, y.b) + np.vdot(x.c, y.c))


def _random_state(model, rng) -> SectorState:
    m = model.mode_count
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    c = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    c = np.asfortranarray(c + c.T)  # two-photon amplitudes are symmetric
    state = SectorState(b, c)
    n = state.norm()
    state.b /= n
    state.c /= n
    return state


def _sym_product(gc, x):
    return (gc[:, None] * x[None, :] + x[:, None] * gc[None, :]) / math.sqrt(2.0)


def test_build_rejects_bad_discretizations(params):
    with pytest.raises(ValueError):
        build(params, m=32, w=10.0)
    with pytest.raises(ValueError):
        build(params, m=128, w=5.0)
    with pytest.raises(ValueError):
        build(params, m=128, w=10.0, kappa_in=2.0)  # needs w >= 10*kappa_in


def test_grid_and_coupling_layout(params):
    model = build(params, m=101, w=10.0)
    assert model.mode_count == 101
    assert model.k_grid[0] == params.k_c - 10.0
    assert model.k_grid[-1] == params.k_c + 10.0
    assert abs(model.dk - 0.2) < 1e-15
    want = coupling(model.k_grid, params) * math.sqrt(model.dk)
    assert np.allclose(model.couplings, want, rtol=0, atol=0)


def test_coupling_sum_deficit_and_window_trend(params):
    # truncating the Lorentzian |g|^2 to [k_c-W, k_c+W] loses 2/(pi W/kappa_c)
    # of lambda; at the comparison configuration W=40 that is 1.6e-2 relative
    deficit_40 = 1.0 - np.sum(np.abs(build(params, 2000, 40.0).couplings) ** 2) / params.lam
    deficit_80 = 1.0 - np.sum(np.abs(build(params, 2000, 80.0).couplings) ** 2) / params.lam
    assert 1.55e-2 < deficit_40 < 1.65e-2
    assert deficit_40 < 2e-2
    assert deficit_80 < deficit_40


def test_hamiltonian_is_hermitian(params, rng):
    model = build(params, m=64, w=10.0)
    for _ in range(4):
        x = _random_state(model, rng)
        y = _random_state(model, rng)
        lhs = _inner(x, apply_hamiltonian(model, y))
        rhs = np.conj(_inner(y, apply_hamiltonian(model, x)))
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_hamiltonian_sector_action(params, rng):
    model = build(params, m=64, w=10.0)
    g = model.couplings
    gc = np.conj(g)
    m = model.mode_count
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    c = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    c = np.asfortranarray(c + c.T)

    pure_b = apply_hamiltonian(model, SectorState(b.copy(), np.zeros_like(c)))
    want_hb = (params.omega_a + model.k_grid) * b
    assert np.allclose(pure_b.b, want_hb, rtol=1e-13, atol=0)
    assert np.allclose(pure_b.c, _sym_product(gc, b), rtol=1e-13, atol=1e-15)

    pure_c = apply_hamiltonian(model, SectorState(np.zeros_like(b), c))
    want_hc = (model.k_grid[:, None] + model.k_grid[None, :]) * c
    assert np.allclose(pure_c.b, math.sqrt(2.0) * (c @ g), rtol=1e-13, atol=1e-15)
    assert np.allclose(pure_c.c, want_hc, rtol=1e-13, atol=0)


def test_initial_state_is_normalized_packet(params, packet):
    model = build(params, m=256, w=12.0, kappa_in=packet.kappa_in)
    state = initial_packet_state(model, packet)
    assert abs(state.norm() - 1.0) < 1e-14
    assert not state.c.any()
    raw = packet.amplitude(model.k_grid) * math.sqrt(model.dk)
    ratio = state.b / raw
    assert np.allclose(ratio, ratio[0], rtol=1e-12, atol=0)
    # the window holds almost all of the packet, so renormalization is gentle
    assert abs(ratio[0] - 1.0) < 5e-3


def test_interaction_kick_matches_taylor_series(params, rng):
    model = build(params, m=64, w=10.0)
    g = model.couplings
    gc = np.conj(g)
    state = _random_state(model, rng)
    dt = 0.3

    tb, tc = state.b.copy(), state.c.copy()
    sb, sc = tb.copy(), tc.copy()
    for n in range(1, 60):
        tb, tc = math.sqrt(2.0) * (tc @ g), _sym_product(gc, tb)
        tb *= -1j * dt / n
        tc *= -1j * dt / n
        sb += tb
        sc += tc
        if np.abs(tb).max() < 1e-18 and np.abs(tc).max() < 1e-18:
            break

    geru = get_blas_funcs("geru", (state.c,))
    _kick(model, state, dt, geru)
    assert np.allclose(state.b, sb, rtol=0, atol=1e-14)
    assert np.allclose(state.c, sc, rtol=0, atol=1e-14)


def test_zero_coupling_evolution_is_free(packet):
    free = ModelParams(omega_a=0.4, k_c=0.0, kappa_c=1.0, lam=0.0)
    model = build(free, m=64, w=10.0)
    state = initial_packet_state(model, packet)
    b0 = state.b.copy()
    t = 3.7
    out = evolve(model, state, t, tol=1e-6)
    want = b0 * np.exp(-1j * (free.omega_a + model.k_grid) * t)
    assert np.allclose(out.b, want, rtol=1e-12, atol=0)
    assert not out.c.any()


def test_norm_conserved_at_machine_level(params, rng):
    model = build(params, m=96, w=10.0)
    state = _random_state(model, rng)
    out = evolve(model, state, t_final=5.0, tol=1e-6)
    assert abs(out.norm() - 1.0) < 1e-13


def test_two_photon_amplitudes_stay_symmetric(params, packet):
    # each interaction step adds a symmetric rank-2 update via two rank-1
    # BLAS calls, so symmetry drifts only by accumulated rounding
    model = build(params, m=64, w=10.0)
    state = evolve(model, initial_packet_state(model, packet), 8.0, tol=1e-6)
    asym = np.abs(state.c - state.c.T).max()
    assert asym <= 5e-14 * max(1.0, np.abs(state.c).max())


def test_fixed_step_error_scales_fourth_order(params, packet):
    model = build(params, m=64, w=10.0)
    t = 2.0
    ref = _evolve_fixed(model, initial_packet_state(model, packet), t, t / 512, order=4)

    def err(dt):
        out = _evolve_fixed(model, initial_packet_state(model, packet), t, dt, order=4)
        return math.sqrt(
            np.sum(np.abs(out.b - ref.b) ** 2) + np.sum(np.abs(out.c - ref.c) ** 2)
        )

    ratio = err(0.25) / err(0.125)
    assert 10.0 < ratio < 30.0


def test_single_excitation_matches_dense_diagonalization(params):
    model = build(params, m=200, w=10.0)
    m = model.mode_count
    h = np.zeros((m + 1, m + 1), dtype=complex)
    h[0, 0] = params.omega_a
    h[0, 1:] = model.couplings
    h[1:, 0] = np.conj(model.couplings)
    h[np.arange(1, m + 1), np.arange(1, m + 1)] = model.k_grid
    vals, vecs = np.linalg.eigh(h)
    t = 20.0
    psi0 = np.zeros(m + 1, dtype=complex)
    psi0[0] = 1.0
    psi_t = vecs @ (np.exp(-1j * vals * t) * (vecs.conj().T @ psi0))

    betas, gamma = evolve_single_excitation(model, 1.0, np.zeros(m), t, n_steps=2000)
    assert abs(betas[-1] - psi_t[0]) < 1e-9
    assert np.abs(gamma - psi_t[1:]).max() < 1e-9


def test_vacuum_decay_rate_matches_slow_pole(params, gsp):
    # excited atom, no photon: |b(t)|^2 decays at the intensity rate
    # 2*gamma_sp (gamma_sp is the amplitude rate, the slow pole's |Im|).
    # The fit window is in units of the intensity decay time; in amplitude
    # units the same window would span 13 decades and drop below the
    # window-truncation floor of the discretized model (~1e-10 at W=40,
    # set by the cut Lorentzian tails, independent of M).
    g_int = 2.0 * gsp
    model = build(params, m=2000, w=40.0)
    t_final = 30.0 / g_int
    n_steps = 3000
    betas, _ = evolve_single_excitation(model, 1.0, np.zeros(2000), t_final, n_steps)
    times = np.linspace(0.0, t_final, n_steps + 1)
    sel = times >= 5.0 / g_int
    slope = np.polyfit(times[sel], np.log(np.abs(betas[sel]) ** 2), 1)[0]
    assert abs(-slope - g_int) < 0.05 * g_int
    # measured deviation is 4e-6: the cut tails sit far off resonance, so
    # the pole barely moves even though the coupling sum is 1.6% short
    assert abs(-slope - g_int) < 1e-4 * g_int


def test_norm_drift_within_budget_at_tight_tolerance(params, packet, gsp):
    model = build(params, m=128, w=12.0, kappa_in=packet.kappa_in)
    state = initial_packet_state(model, packet)
    out = evolve(model, state, t_final=50.0 / gsp, tol=1e-10)
    assert abs(out.norm() - 1.0) <= 1e-8


def test_step_size_underflow_reported(params, packet):
    model = build(params, m=64, w=10.0)
    state = initial_packet_state(model, packet)
    with pytest.raises(RuntimeError):
        evolve(model, state, t_final=1.0, tol=1e-40)


def test_two_photon_density_undoes_grid_weights(params, rng):
    model = build(params, m=64, w=10.0)
    state = _random_state(model, rng)
    dens = two_photon_density(model, state)
    assert np.allclose(dens, np.abs(state.c) ** 2 / model.dk**2, rtol=1e-14, atol=0)


def test_comparison_requires_settled_evolution(params, packet, gsp):
    model = build(params, m=64, w=10.0)
    with pytest.raises(ValueError, match="t_final"):
        compare_joint_spectrum(model, packet, t_final=10.0 / gsp, grid=None)


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_comparison_report_fields(params, gsp):
    report = oracle_comparison(
        params, kappa_in=gsp, m=64, w=10.0, t_final=30.5 / gsp, window=1.0
    )
    for key in (
        "l2_rel_error",
        "max_rel_error",
        "residual_b_norm",
        "norm_drift",
        "t_final",
        "mode_count",
        "window",
    ):
        assert key in report
    assert report["mode_count"] == 64
    assert report["residual_b_norm"] >= 0.0
    assert report["norm_drift"] < 1e-8


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::UserWarning")
@pytest.mark.parametrize(
    "width_factor,window,bound,measured",
    [
        (10.0, 2.5, 0.05, 0.03715),
        (0.5, 1.0, 0.005, 0.00179),
        # the narrowest packet scatters on the 1/kappa_in timescale, which the
        # grid recurrence time caps before the asymptote is fully reached
        (0.1, 0.5, 0.15, 0.13987),
    ],
)
def test_packet_width_family_tracks_analytic(params, gsp, width_factor, window, bound, measured):
    # M and t_final keep the evolution inside the first grid recurrence
    # (recurrence at pi*(M-1)/W = 282.6, t_final = 266.7)
    report = oracle_comparison(
        params,
        kappa_in=width_factor * gsp,
        m=1800,
        w=20.0,
        t_final=30.0 / gsp + 0.5,
        window=window,
    )
    assert report["l2_rel_error"] < bound
    assert abs(report["l2_rel_error"] - measured) < 0.1 * measured + 1e-4


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::UserWarning")
def test_refinement_study_at_stated_configuration(params, gsp):
    # frozen regression values for the M-refinement study at the comparison
    # configuration (W=40, t_final=50/gamma_sp).  They are NOT monotone in M:
    # the grid recurrence time pi*(M-1)/W is 39.2, 78.5, 157.0 for M=500,
    # 1000, 2000, all below t_final=443.6, so each run contains completed
    # recurrences that re-excite the atom and re-scatter the photon pair.
    # Monotone convergence would need t_final < recurrence time, which the
    # t_final >= 30/gamma_sp precondition forbids for these M at W >= 10.
    l2 = {
        m: oracle_comparison(
            params, kappa_in=gsp, m=m, w=40.0, t_final=50.0 / gsp, window=1.0
        )["l2_rel_error"]
        for m in (500, 1000)
    }
    assert abs(l2[500] - 0.70827) < 0.07
    assert abs(l2[1000] - 1.08114) < 0.11


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::UserWarning")
def test_pre_recurrence_agreement_is_tight(params, packet, gsp):
    # control for the acceptance-configuration comparison: same grid, but the
    # comparison time sits before the first grid recurrence at 157.  The
    # discretized evolution then reproduces the analytic |C|^2 to 0.2%,
    # isolating recurrence pollution (not integrator error) as the source of
    # the large discrepancy at t_final = 50/gamma_sp = 443.6.
    model = build(params, m=2000, w=40.0, kappa_in=packet.kappa_in)
    t = 100.0
    state = evolve(model, initial_packet_state(model, packet), t, tol=1e-4)
    lo = np.searchsorted(model.k_grid, params.k_c - 1.0)
    hi = np.searchsorted(model.k_grid, params.k_c + 1.0, side="right")
    axes = model.k_grid[lo:hi]
    from cavityprop.scattering import two_photon_amplitude

    k1, k2 = np.meshgrid(axes, axes, indexing="ij")
    want = np.abs(two_photon_amplitude(k1, k2, packet, params)) ** 2
    got = two_photon_density(model, state)[lo:hi, lo:hi]
    l2 = math.sqrt(float(np.sum((got - want) ** 2)) / float(np.sum(want**2)))
    assert l2 < 5e-3
