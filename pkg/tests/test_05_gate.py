import logging
import math

import numpy as np
import pytest

from star.device import DeviceParams, SidebandConfig, wrap_angle
from star.errors import DomainError
from star.gate import (
    IdealGate,
    UnwindOperator,
    coupling_eigenvalue,
    crossing_time,
    fock_dim_for,
    gate_populations,
    ghz_preparation,
    ideal_gate_unitary,
    population_column,
    population_labels,
    qubit_layout,
    resonator_trajectory,
    run_gate,
    target_states,
    trajectory_area,
    trajectory_phase,
    unwind,
)
from star.operators import DensityMatrix, collective_spin, product_ket, unitary
from star.testing import fast_schedule
from star.tomography import concurrence, state_fidelity

EQUAL = DeviceParams.uniform(2, 1e6)
LOOP = SidebandConfig(30e6, -2e6, 1.0)


class TestGateIdeal:
    def test_unitario(self, check):
        u = ideal_gate_unitary(2).matrix
        check.assert_close(u @ u.conj().T, np.eye(4), atol=1e-12)

    def test_exige_dois_qubits(self):
        with pytest.raises(DomainError):
            ideal_gate_unitary(1)

    def test_autoestado_ganha_fase(self, check):
        out = IdealGate(2).apply("gg")
        check.assert_same_state(out, product_ket(qubit_layout(2), "gg"))
        assert out.vector[0] == pytest.approx(1j)

    def test_maximamente_emaranhado(self):
        out = IdealGate(2).apply("++").density()
        assert concurrence(out) == pytest.approx(1, abs=1e-9)

    def test_alvo_de_dois_qubits(self, check):
        layout = qubit_layout(2)
        plus = product_ket(layout, "++").vector
        minus = product_ket(layout, "--").vector
        target = target_states(2)
        check.assert_close(target.vector, (plus + 1j * minus) / math.sqrt(2), atol=1e-12)
        check.assert_same_state(IdealGate(2).apply("++"), target)

    def test_alvo_na_base_computacional(self):
        target = target_states(3, "ge")
        assert abs(target.vector[0]) == pytest.approx(1 / math.sqrt(2))
        assert abs(target.vector[-1]) == pytest.approx(1 / math.sqrt(2))

    def test_alvo_invalido(self):
        with pytest.raises(DomainError):
            target_states(1)
        with pytest.raises(DomainError):
            target_states(2, "xy")

    def test_preparacao_ghz_de_tres_qubits(self):
        initial, phi = ghz_preparation(3)
        out = IdealGate(3, phi).apply(product_ket(qubit_layout(3), initial))
        assert state_fidelity(out.density(), target_states(3)) == pytest.approx(1, abs=1e-9)


class TestDesenrolamento:
    def test_desfaz_a_rotacao_de_rabi(self, check):
        layout = qubit_layout(2)
        rho = IdealGate(2).apply("++").density()
        angle = 2 * math.pi * 30e6 * (380e-9 + 20e-9)
        u = unitary(collective_spin(layout, "x"), angle)
        rotated = DensityMatrix(layout, u @ rho.matrix @ u.conj().T)
        check.assert_close(unwind(rotated, 30e6, 380e-9, 20e-9), rho, atol=1e-10)

    def test_frequencias_diferentes_emitem_aviso(self, caplog, monkeypatch):
        star_logger = logging.getLogger("star")
        monkeypatch.setattr(star_logger, "propagate", True)
        rho = product_ket(qubit_layout(2), "++").density()
        with caplog.at_level(logging.WARNING, logger="star.gate"):
            unwind(rho, [30e6, 31e6], 100e-9, 0.0)
        assert "média" in caplog.text

    def test_frequencias_iguais_nao_avisam(self, caplog, monkeypatch):
        star_logger = logging.getLogger("star")
        monkeypatch.setattr(star_logger, "propagate", True)
        rho = product_ket(qubit_layout(2), "++").density()
        with caplog.at_level(logging.WARNING, logger="star.gate"):
            unwind(rho, [30e6, 30e6], 100e-9, 0.0)
        assert caplog.text == ""


class TestTrajetorias:
    def test_autovalor_do_acoplamento(self):
        assert coupling_eigenvalue("gg", EQUAL) == pytest.approx(1e6)
        assert coupling_eigenvalue("ge", EQUAL) == pytest.approx(0, abs=1e-6)
        with pytest.raises(DomainError):
            coupling_eigenvalue("++", EQUAL)

    def test_laco_fecha_no_tempo_do_gate(self):
        alpha = resonator_trajectory("gg", EQUAL, LOOP, [0.0, 250e-9, 500e-9])
        assert abs(alpha[0]) == pytest.approx(0, abs=1e-12)
        assert abs(alpha[1]) == pytest.approx(1)
        assert abs(alpha[2]) == pytest.approx(0, abs=1e-9)

    def test_area_e_fase(self):
        assert trajectory_area("gg", EQUAL, LOOP) == pytest.approx(math.pi / 4)
        assert trajectory_phase("gg", EQUAL, LOOP) == pytest.approx(math.pi / 2)
        assert trajectory_phase("ge", EQUAL, LOOP) == pytest.approx(0, abs=1e-12)

    def test_truncagem_pelo_raio_do_laco(self):
        assert fock_dim_for(EQUAL, LOOP) == 11
        assert fock_dim_for(DeviceParams.uniform(4, 1e6), LOOP) > fock_dim_for(EQUAL, LOOP)
        assert fock_dim_for(EQUAL, LOOP, tail=1e-3) < fock_dim_for(EQUAL, LOOP)
        assert fock_dim_for(EQUAL, LOOP.off()) == 2


class TestPopulacoes:
    def test_colunas(self):
        assert population_labels(2) == ["++", "+-", "-+", "--"]
        assert population_column("+-") == "pop_pm"

    def test_cruzamento(self):
        assert crossing_time([0, 1], [0, 1], [1, 0]) == pytest.approx(0.5)
        assert crossing_time([0, 1, 2], [0, 1, 2], [2, 1, 0]) == pytest.approx(1)
        assert crossing_time([0, 1, 2], [0, 0, 0], [1, 1, 1]) is None


def test_registro_da_simulacao():
    schedule, params = fast_schedule(rabi=60e6)
    run = run_gate(schedule.with_t_sq(20e-9), params, fock_dim=6, records=3)
    record = run.record()
    for key in ("schedule_hash", "fidelity", "populations", "hygiene", "state", "programmed_rabi"):
        assert key in record
    assert 0 <= record["fidelity"] <= 1
    assert sum(run.populations().values()) == pytest.approx(1)
    assert run.evolution.times[-1] == pytest.approx(20e-9)
    assert len(record["state"]["real"]) == 4


@pytest.mark.full_suite
def test_gate_rapido_reproduz_o_ideal(check):
    """Ω_R = Ω_SB = 150 MHz, χ iguais, um período de δ, sistema fechado."""
    schedule, params = fast_schedule()
    run = run_gate(schedule, params, fock_dim=10, strict=True)
    check.assert_hygiene(run.evolution)
    assert run.fidelity > 0.999
    assert run.qubits.purity() > 1 - 1e-3


@pytest.mark.full_suite
def test_gate_rapido_com_rampas(check):
    """
    Rampas de 10 ns: a fase da sideband compensa πf·t_r e o desenrolamento
    cobre a área completa do acionamento, 2πf(t_sq + t_r).
    """
    schedule, params = fast_schedule(t_r=10e-9)
    assert schedule.t_sq + schedule.t_r == pytest.approx(500e-9)
    sidebands = schedule.resolved_sidebands()
    assert sidebands.phi_delta == pytest.approx(wrap_angle(-math.pi * 150e6 * 10e-9))
    assert schedule.effective_angle() == pytest.approx(0, abs=1e-12)
    assert UnwindOperator(150e6, schedule.t_sq, schedule.t_r).angle == pytest.approx(2 * math.pi * 150e6 * 500e-9)

    run = run_gate(schedule, params, fock_dim=10, strict=True)
    check.assert_hygiene(run.evolution)
    assert run.angle == pytest.approx(0, abs=1e-12)
    assert run.fidelity > 0.99


@pytest.mark.full_suite
def test_cruzamento_com_parametros_do_chip(chip):
    """
    Dissipação completa do chip: |++⟩ e |−−⟩ se cruzam perto de 310 ns e as
    populações |+−⟩ e |−+⟩ ficam baixas nesse instante.
    """
    grid = np.linspace(260e-9, 360e-9, 11)
    frame = gate_populations(
        chip.schedule,
        chip.device,
        grid,
        fock_dim=chip.fock_dim,
        dissipation=chip.dissipation,
        solver=chip.solver,
    )
    t_cross = crossing_time(frame["t_sq_ns"], frame["pop_pp"], frame["pop_mm"])
    assert t_cross is not None
    assert t_cross == pytest.approx(310, rel=0.1)
    for column in ("pop_pm", "pop_mp"):
        assert np.interp(t_cross, frame["t_sq_ns"], frame[column]) < 0.05
