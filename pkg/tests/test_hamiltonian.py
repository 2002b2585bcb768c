import warnings

import numpy as np
import pytest

import geomspin as gs
from geomspin.hamiltonian import ExchangeRegimeWarning


def paper_params(h0, by_r1=None, j=None, varphi=0.0, omega=None, ez=None):
    j = 37.4879 * h0 if j is None else j
    by_r1 = 2 * h0 if by_r1 is None else by_r1
    p = dict(ez=gs.mhz(100.0) if ez is None else ez, dez=145.15 * h0, j=j,
             by_l1=2 * h0, by_r1=by_r1, varphi=varphi)
    if omega is not None:
        p["omega"] = omega
    return gs.DeviceParams(**p)


class TestBuildLab:
    def test_zeeman_diagonal_limit(self):
        p = gs.DeviceParams(ez=1.3, dez=0.4, ez1=0.2, dez1=0.1)
        h = gs.build_lab(p, t=0.7)
        grad = 0.5
        expected = np.diag([1.5, grad / 2, -grad / 2, -1.5])
        assert np.allclose(h, expected, atol=1e-14)

    def test_drive_and_exchange_entries(self):
        p = gs.DeviceParams(ez=1.0, dez=2.0, j=0.15, by_l1=0.3, by_r1=0.07,
                            omega=0.9, varphi=0.4)
        t = 1.3
        h = gs.build_lab(p, t)
        osc = np.cos(p.omega * t + p.varphi)
        assert h[0, 1] == pytest.approx(-0.5j * 0.3 * osc)
        assert h[1, 2] == pytest.approx(0.15 / 2)
        assert h[0, 2] == pytest.approx(-0.5j * 0.07 * osc)

    def test_hermitian_for_random_params(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = gs.DeviceParams(ez=rng.uniform(0.5, 2), dez=rng.uniform(1, 3),
                                ez1=rng.uniform(0, 0.2), dez1=rng.uniform(0, 0.2),
                                j=rng.uniform(0, 0.3), by_l1=rng.uniform(0, 0.4),
                                by_r1=rng.uniform(0, 0.4), omega=rng.uniform(0.5, 2),
                                varphi=rng.uniform(0, 2 * np.pi))
            for t in rng.uniform(0, 10, 3):
                h = gs.build_lab(p, t)
                assert np.linalg.norm(h - h.conj().T) <= 1e-14


class TestBuildRotRwa:
    def test_diagonal_at_bare_resonance(self):
        p = gs.DeviceParams(ez=1.2, ez1=0.1, dez=0.8, dez1=0.05, j=0.04,
                            omega=1.3)
        h = gs.build_rot_rwa(p)
        grad = 0.85
        expected = np.diag([0.0, (-0.04 + grad) / 2, (-0.04 - grad) / 2, 0.0])
        expected[1, 2] = expected[2, 1] = 0.02
        assert np.allclose(h, expected, atol=1e-14)

    def test_drive_entry_magnitude(self, h0):
        p = paper_params(h0)
        h = gs.build_rot_rwa(p)
        assert abs(h[0, 1]) == pytest.approx(2 * h0 / 4)

    def test_right_drive_off_reduces_model(self, h0):
        h = gs.build_rot_rwa(paper_params(h0, by_r1=0.0))
        assert h[0, 2] == 0 and h[1, 3] == 0
        assert abs(h[0, 1]) > 0 and abs(h[2, 3]) > 0

    def test_hermitian(self, h0):
        h = gs.build_rot_rwa(paper_params(h0, varphi=1.1))
        assert np.linalg.norm(h - h.conj().T) <= 1e-14


class TestFrameConsistency:
    def test_drives_off_gives_diagonal_phases(self):
        p = gs.DeviceParams(ez=1.1, dez=0.9, j=0.05, omega=1.0)
        h = gs.build_rot_rwa(p)
        T = 7.0
        u = gs.propagate(gs.PiecewiseConstantHamiltonian([0.0, T], [h]),
                         gs.TimeGrid(0.0, T, 10))
        w, v = np.linalg.eigh(h)
        expected = (v * np.exp(-1j * w * T)) @ v.conj().T
        assert np.linalg.norm(u - expected) <= 1e-8

    def test_lab_frame_matches_rwa(self, h0):
        # the frame must rotate fast compared to the Zeeman gradient or the
        # counter-rotating terms are only marginally detuned; 500 MHz keeps
        # the lab-frame integration affordable while the RWA error stays
        # orders below the 1e-3 budget
        ez = gs.mhz(500.0)
        blocks = gs.effective_blocks(paper_params(h0, ez=ez))
        p = paper_params(h0, ez=ez, omega=blocks.omega_res, varphi=0.2)
        T = 20.0
        u_rot = gs.propagate(gs.PiecewiseConstantHamiltonian([0.0, T], [gs.build_rot_rwa(p)]),
                             gs.TimeGrid(0.0, T, 10))
        steps = gs.auto_steps(lambda t: gs.build_lab(p, t), 0.0, T)
        u_lab = gs.propagate(lambda t: gs.build_lab(p, t), gs.TimeGrid(0.0, T, steps))
        u_lab_in_rot = gs.rotating_frame_map(p, T) @ u_lab
        assert gs.fidelity(u_lab_in_rot, u_rot) >= 0.999


class TestAdiabaticAngle:
    def test_small_exchange_limit(self):
        p = gs.DeviceParams(ez=1.0, dez=1.0, j=1e-6)
        frame = gs.adiabatic_angle(p)
        assert np.sin(frame.theta) == pytest.approx(1.0, abs=1e-6)
        assert np.cos(frame.theta) == pytest.approx(0.0, abs=1e-6)

    def test_zero_exchange_is_explicit_limit(self):
        frame = gs.adiabatic_angle(gs.DeviceParams(ez=1.0, dez=1.0, j=0.0))
        assert frame.theta == pytest.approx(np.pi / 2)

    def test_equal_exchange_and_gradient(self):
        from geomspin.hamiltonian import mixing_angle
        theta = mixing_angle(0.5, 0.5)
        # independent arithmetic from the defining expressions at alpha = 1
        alpha, beta = 1.0, np.sqrt(2.0)
        s = (alpha + beta) / np.sqrt((alpha + beta) ** 2 + 1)
        c = 1.0 / np.sqrt((alpha + beta) ** 2 + 1)
        assert np.sin(theta) == pytest.approx(s, abs=1e-12)
        assert np.cos(theta) == pytest.approx(c, abs=1e-12)
        assert s ** 2 + c ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_basis_is_special_orthogonal(self, h0):
        frame = gs.adiabatic_angle(paper_params(h0))
        w = frame.basis
        assert np.allclose(w.T @ w, np.eye(4), atol=1e-14)
        assert np.linalg.det(w) == pytest.approx(1.0, abs=1e-12)


class TestEffectiveBlocks:
    def test_drive_rate_from_field_amplitude(self, h0):
        # left-dot field of 4 MHz gives a 2 MHz drive rate
        p = gs.DeviceParams(ez=1.0, dez=145.15 * h0, by_l1=gs.mhz(4.0))
        blocks = gs.effective_blocks(p)
        assert gs.rad_per_ns_to_mhz(blocks.h) == pytest.approx(2.0, abs=1e-12)
        assert blocks.phi == pytest.approx(p.varphi + np.pi / 2)

    def test_block_shift_arithmetic_oracle(self, h0):
        p = paper_params(h0)
        blocks = gs.effective_blocks(p)
        # spreadsheet-style arithmetic on the same inputs
        j_over = 37.4879
        de_over = 145.15
        c2_over = de_over + j_over ** 2 / (2 * de_over) - j_over / 2
        c1_over = 0.5 * (de_over + j_over ** 2 / (2 * de_over) - j_over)
        assert blocks.c2 / h0 == pytest.approx(c2_over, abs=1e-9)
        assert blocks.c1 / h0 == pytest.approx(c1_over, abs=1e-9)

    def test_zero_exchange_limits(self):
        p = gs.DeviceParams(ez=1.0, dez=0.8, j=0.0, by_l1=0.1)
        blocks = gs.effective_blocks(p)
        assert blocks.c1 == pytest.approx(0.4, abs=1e-14)
        assert blocks.c2 == pytest.approx(0.8, abs=1e-14)
        assert blocks.h_s2[0, 0] == 0 and blocks.h_s2[1, 1] == 0

    def test_block_eigenvalues(self, h0):
        p = paper_params(h0, varphi=0.77)
        blocks = gs.effective_blocks(p)
        w1 = np.linalg.eigvalsh(blocks.h_s1)
        assert np.allclose(np.sort(w1), [-blocks.h / 2, blocks.h / 2], atol=1e-12)
        w2 = np.linalg.eigvalsh(blocks.h_s2)
        expected = 0.5 * np.sqrt(p.j ** 2 + blocks.h ** 2)
        assert np.allclose(np.sort(w2), [-expected, expected], atol=1e-12)

    def test_s1_traceless_s2_diagonal(self, h0):
        blocks = gs.effective_blocks(paper_params(h0))
        assert abs(np.trace(blocks.h_s1)) <= 1e-15
        j = 37.4879 * h0
        assert blocks.h_s2[0, 0] == pytest.approx(-j / 2)
        assert blocks.h_s2[1, 1] == pytest.approx(j / 2)

    def test_block_reconstruction_matches_full_model(self, paper_cal):
        # propagate the full rotating-frame model (left drive only) and the
        # two-block reconstruction in the adiabatic frame over the CZ gate
        cal = paper_cal
        u_full = np.eye(4, dtype=complex)
        u_blocks = np.eye(4, dtype=complex)
        for phi_eff, tau in ((cal.xi1 - np.pi / 2, cal.tau1),
                             (cal.xi1 + np.pi / 2, cal.tau2)):
            p = gs.DeviceParams(ez=1.0, dez=cal.de_adjusted, j=cal.j,
                                by_l1=2 * cal.h0, by_r1=0.0,
                                omega=1.0 + cal.omega_res_offset,
                                varphi=phi_eff - np.pi / 2)
            blocks = gs.effective_blocks(p)
            frame = gs.adiabatic_angle(p)
            h_recon = gs.reconstruct_from_blocks(blocks, frame.basis)
            u_full = gs.mat_exp(gs.build_rot_rwa(p), tau) @ u_full
            u_blocks = gs.mat_exp(h_recon, tau) @ u_blocks
        assert gs.fidelity(u_full, u_blocks) >= 0.999


class TestRegimeChecks:
    def test_warning_above_soft_ratio(self):
        with pytest.warns(ExchangeRegimeWarning):
            gs.DeviceParams(ez=1.0, dez=1.0, j=0.2)

    def test_error_above_hard_ratio(self):
        with pytest.raises(ValueError, match="exceeds"):
            gs.DeviceParams(ez=1.0, dez=1.0, j=0.6)

    def test_effective_blocks_tags_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            blocks = gs.effective_blocks(gs.DeviceParams(ez=1.0, dez=1.0, j=0.2))
        assert blocks.regime_warning is not None


class TestExchangeInteraction:
    def drive(self, j1_fun, j0=0.1, phi=0.3):
        return gs.ExchangeDrive(j0=j0, j1=j1_fun, omega_p=5.0, phi_p=phi,
                                alpha_p=9.0, beta_p=5.0)

    def test_drive_off_limit(self):
        d = self.drive(lambda t: 0.0, j0=0.2)
        h4, h2 = gs.exchange_interaction(d, 1.0)
        assert np.allclose(h2, 0.0)
        assert h4[1, 1] == pytest.approx(-0.1)
        # local S3 phase accumulates at rate j0/2
        assert d.eta_rate == pytest.approx(0.1)

    def test_rabi_rate_relation(self):
        d = self.drive(lambda t: 0.6 * np.sin(t))
        for t in (0.3, 1.1, 2.9):
            assert d.omega(t) == pytest.approx(0.3 * np.sin(t))

    def test_peak_coupling_of_reduced_block(self):
        omega_max = gs.mhz(50.0)
        d = self.drive(lambda t: 2 * omega_max * np.sin(np.pi * t / 10.0), j0=0.0)
        peak = max(abs(gs.exchange_interaction(d, t)[1][0, 1]) for t in np.linspace(0, 10, 401))
        assert peak == pytest.approx(omega_max / 2, rel=1e-4)

    def test_off_resonance_flagged(self):
        d = gs.ExchangeDrive(j0=0.0, j1=lambda t: 0.1, omega_p=4.0, beta_p=5.0)
        with pytest.warns(ExchangeRegimeWarning, match="resonance"):
            gs.exchange_interaction(d, 0.0)

    def test_static_part(self):
        d = self.drive(lambda t: 0.0)
        h = gs.exchange_static(d)
        assert np.allclose(np.diag(h), [9.0, -2.5, 2.5, -9.0])

    def test_regime_warning_on_large_static_exchange(self):
        with pytest.warns(ExchangeRegimeWarning, match="interaction-picture"):
            gs.ExchangeDrive(j0=1.0, j1=lambda t: 0.0, omega_p=5.0,
                             alpha_p=9.0, beta_p=5.0)

    def test_negative_static_exchange_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            gs.ExchangeDrive(j0=-0.1, j1=lambda t: 0.0, omega_p=5.0)
