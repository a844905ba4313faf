import math

import numpy as np
import pytest

from star.calibration import (
    blue_resonance,
    calibrate,
    calibrate_qubit,
    extract_chi_nbar,
    fit_damped_oscillation,
    linear_fit,
    parabolic_minimum,
    rabi_amplitude_fit,
    red_resonance,
    sideband_phase_scan,
    simulate_chevron,
    simulate_rabi_amplitudes,
    stark_shift_scan,
)
from star.config import loads_config
from star.device import DeviceParams, SidebandConfig, wrap_angle
from star.errors import DomainError, FitError, LayoutError
from star.testing import fast_schedule

T = np.linspace(0, 2e-6, 401)


class TestAjusteDeOscilacao:
    def test_cosseno_amortecido(self):
        y = 0.8 * np.exp(-T / 1e-6) * np.cos(2 * np.pi * 3e6 * T + 0.4) + 0.1
        fit = fit_damped_oscillation(T, y)
        assert fit.converged
        assert fit["freq"] == pytest.approx(3e6, rel=1e-6)
        assert fit["decay"] == pytest.approx(1e6, rel=1e-5)
        assert fit["amp"] == pytest.approx(0.8, rel=1e-6)
        assert fit["phase"] == pytest.approx(0.4, abs=1e-6)
        assert fit["offset"] == pytest.approx(0.1, abs=1e-6)
        assert fit.residual < 1e-6

    def test_deslocamento_que_decai(self):
        t = np.linspace(0, 3e-6, 601)
        gamma = 1e6
        y = np.exp(-gamma * t) * np.cos(2 * np.pi * 2e6 * t) + np.exp(-gamma * t) - 1
        fit = fit_damped_oscillation(t, y, decaying_offset=True)
        assert fit.model == "damped_cosine+decaying_offset"
        assert fit["freq"] == pytest.approx(2e6, rel=1e-5)
        assert fit["decay"] == pytest.approx(gamma, rel=1e-4)
        assert fit["offset_decay"] == pytest.approx(1, rel=1e-4)
        assert fit["offset"] == pytest.approx(-1, rel=1e-4)

    def test_amplitude_negativa_vira_fase(self):
        y = -0.5 * np.cos(2 * np.pi * 4e6 * T)
        fit = fit_damped_oscillation(T, y)
        assert fit["amp"] == pytest.approx(0.5, rel=1e-6)
        assert abs(wrap_angle(fit["phase"] - math.pi)) < 1e-6

    def test_serie_constante(self):
        fit = fit_damped_oscillation(T[:10], np.full(10, 0.3))
        assert not fit.converged
        assert math.isnan(fit["freq"])
        assert fit["offset"] == pytest.approx(0.3)

    def test_poucos_pontos(self):
        with pytest.raises(DomainError):
            fit_damped_oscillation([0, 1, 2], [0, 1, 0])

    def test_resultado_serializavel(self):
        fit = fit_damped_oscillation(T, np.cos(2 * np.pi * 1e6 * T))
        assert set(fit.as_dict()) == {"model", "params", "errors", "residual", "converged", "message"}


class TestAjustesLineares:
    def test_reta(self):
        fit = linear_fit([0, 1, 2, 3], [1, 3, 5, 7])
        assert fit["slope"] == pytest.approx(2)
        assert fit["intercept"] == pytest.approx(1)
        assert fit["r2"] == pytest.approx(1)

    @pytest.mark.parametrize("x, y", [([1, 2], [1, 2]), ([1, 1, 1], [1, 2, 3])])
    def test_grade_degenerada(self, x, y):
        with pytest.raises(FitError):
            linear_fit(x, y)

    def test_amplitude_de_rabi(self):
        fit = rabi_amplitude_fit([0.2, 0.4, 0.6], [8e6, 16e6, 24e6])
        assert fit.slope == pytest.approx(40e6)
        assert fit.intercept == pytest.approx(0, abs=1e-3)
        assert fit.amplitude_for(20e6) == pytest.approx(0.5)
        assert fit.rabi_for(0.5) == pytest.approx(20e6)


class TestChiNbar:
    def test_extracao_exata(self):
        chi = 380e3
        nbar = np.array([4.0, 9.0, 16.0])
        estimate = extract_chi_nbar(nbar, chi * np.sqrt(nbar), chi * nbar)
        assert estimate.chi == pytest.approx(chi)
        assert estimate.nbar_points == pytest.approx(nbar)
        assert estimate.consistent
        assert estimate.exponents == pytest.approx((0.5, 1.0))

    def test_escala_inconsistente(self):
        p = np.array([1.0, 2.0, 4.0])
        estimate = extract_chi_nbar(p, np.sqrt(p), p**2)
        assert not estimate.consistent

    def test_pontos_insuficientes(self):
        with pytest.raises(FitError):
            extract_chi_nbar([4, 9], [1, 2], [1, 2])
        with pytest.raises(FitError):
            extract_chi_nbar([0, 4, 9], [0, 1, 2], [0, 1, 2])

    def test_eixos_diferentes(self):
        with pytest.raises(DomainError):
            extract_chi_nbar([1, 2, 3], [1, 2], [1, 2, 3])


class TestMinimo:
    def test_parabola(self):
        x = np.linspace(-1, 1, 21)
        assert parabolic_minimum(x, (x - 0.13) ** 2) == pytest.approx(0.13)

    def test_minimo_na_borda(self):
        x = np.linspace(0, 1, 5)
        assert parabolic_minimum(x, x) == 0

    def test_grade_periodica(self):
        x = np.linspace(-math.pi, math.pi, 16, endpoint=False)
        y = 1 - np.cos(x - 3.0)
        assert wrap_angle(parabolic_minimum(x, y, periodic=2 * math.pi)) == pytest.approx(3.0, abs=0.01)


class TestSimulacoes:
    def test_ressonancias(self):
        sidebands = SidebandConfig(30e6, -2.5e6, 10)
        assert red_resonance(sidebands) == pytest.approx(32.5e6)
        assert blue_resonance(sidebands) == pytest.approx(27.5e6)

    def test_amplitudes_de_rabi(self):
        amplitudes = [0.2, 0.4, 0.6]
        times = np.linspace(0, 8 / (40e6 * 0.2), 801)
        freqs = simulate_rabi_amplitudes(amplitudes, 40e6, times)
        assert freqs == pytest.approx([8e6, 16e6, 24e6], rel=1e-4)
        assert rabi_amplitude_fit(amplitudes, freqs).slope == pytest.approx(40e6, rel=1e-3)

    def test_deslocamento_de_stark(self):
        params = DeviceParams(chi=(500e3,))
        scan = stark_shift_scan(params, SidebandConfig(30e6, -2e6, 1), [0, 2, 4], T)
        assert scan.shifts[0] == 0
        assert scan.shifts[1:] == pytest.approx([1e6, 2e6], rel=1e-2)
        assert scan.line["slope"] == pytest.approx(500e3, rel=1e-2)
        assert list(scan.to_frame().columns) == ["nbar", "stark_shift_hz"]

    def test_chevron_exige_um_qubit(self):
        with pytest.raises(LayoutError):
            simulate_chevron(DeviceParams(chi=(1e6, 1e6)), SidebandConfig(30e6, -2e6, 1), [32e6], T[:5])

    def test_varredura_de_fase_exige_dois_qubits(self):
        schedule, params = fast_schedule(n=3)
        with pytest.raises(LayoutError):
            sideband_phase_scan(schedule, params, [0.0, 1.0, 2.0])

    def test_tabela_do_chevron(self):
        params = DeviceParams(chi=(500e3,))
        scan = simulate_chevron(params, SidebandConfig(30e6, -2e6, 1), [31e6, 32e6], np.linspace(0, 50e-9, 6), fock_dim=3)
        frame = scan.to_frame()
        assert list(frame.columns) == ["rabi_mhz", "t_ns", "pop_plus"]
        assert len(frame) == 12
        assert frame["pop_plus"].iloc[0] == pytest.approx(1)
        assert frame["pop_plus"].between(0, 1).all()


@pytest.mark.full_suite
def test_calibracao_recupera_os_parametros():
    chi, kappa = 380e3, 100e3
    nbar_grid = [4, 9, 16]
    params = DeviceParams(chi=(chi,), kappa=kappa)
    estimate, kappa_fit, fits = calibrate_qubit(params, SidebandConfig(30e6, -2.5e6, 4), nbar_grid, 1.5e6, 9)
    assert estimate.chi == pytest.approx(chi, rel=0.05)
    assert estimate.nbar_points == pytest.approx(nbar_grid, rel=0.05)
    assert kappa_fit == pytest.approx(kappa, rel=0.15)
    assert "stark" in fits


@pytest.mark.full_suite
def test_varredura_de_fase_encontra_angulo_nulo():
    schedule, params = fast_schedule(rabi=60e6)
    phases = np.linspace(-math.pi, math.pi, 16, endpoint=False)
    scan = sideband_phase_scan(schedule, params, phases, fock_dim=10)
    assert abs(math.sin(scan.phi_min)) < 0.2
    assert scan.concurrence.max() > 0.9


@pytest.mark.full_suite
def test_pipeline_de_calibracao(tiny_src):
    src = tiny_src.replace("[1 MHz, 1 MHz]", "[380 kHz, 410 kHz]").replace('delta = "auto"', "delta = -2.5 MHz")
    src += "\n[experiment.calibration]\nnbar = [4, 9, 16]\nrabi_span = 1.5 MHz\nrabi_points = 9\n"
    outcome = calibrate(loads_config(src), phase=False)
    assert outcome.chi == pytest.approx((380e3, 410e3), rel=0.05)
    assert outcome.rabi_amp_slope == pytest.approx(40e6, rel=1e-3)
    assert outcome.phi_delta_zero is None
    assert "rabi_amplitude" in outcome.as_dict()["fits"]
