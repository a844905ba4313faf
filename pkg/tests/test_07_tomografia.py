import math
from functools import partial

import numpy as np
import pytest

from star.errors import DomainError, LayoutError
from star.gate import IdealGate, gate_channel, ideal_gate_unitary, qubit_layout, target_states
from star.operators import DensityMatrix, product_ket
from star.tomography import (
    PauliTransferMatrix,
    average_gate_fidelity,
    average_state_fidelity,
    bell_fidelity_optimized,
    concurrence,
    linear_inversion,
    local_x_rotation,
    pauli_expectations,
    process_fidelity,
    process_inputs,
    process_tomography,
    ptm_of_channel,
    ptm_of_unitary,
    purity,
    sample_expectations,
    state_fidelity,
    state_tomography,
)


def random_density(n: int, rng) -> DensityMatrix:
    d = 2**n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return DensityMatrix(qubit_layout(n), m / np.trace(m))


def werner(p: float) -> np.ndarray:
    bell = target_states(2, "ge").density().matrix
    return p * bell + (1 - p) * np.eye(4) / 4


class TestTomografiaDeEstado:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_inversao_linear_exata(self, check, rng, n):
        rho = random_density(n, rng)
        result = state_tomography(rho, project=False)
        check.assert_close(result.state, rho, atol=1e-12)
        assert result.method == "linear"

    def test_projecao_de_estado_valido_nao_muda_nada(self, check, rng):
        rho = random_density(2, rng)
        result = state_tomography(rho)
        check.assert_close(result.state, rho, atol=1e-10)
        assert result.projection_distance < 1e-10

    def test_base_incompleta(self):
        with pytest.raises(DomainError):
            linear_inversion({"X": 0.1, "Y": 0.2}, 1)

    def test_tabela_de_valores_esperados(self):
        values = pauli_expectations(product_ket(qubit_layout(1), "+").density())
        assert values == pytest.approx({"I": 1, "X": 1, "Y": 0, "Z": 0}, abs=1e-12)
        frame = state_tomography(values, 1).to_frame()
        assert list(frame.columns) == ["pauli", "value"]

    def test_amostragem_deterministica(self):
        values = pauli_expectations(target_states(2).density())
        a = sample_expectations(values, 1000, rng=7)
        b = sample_expectations(values, 1000, rng=7)
        assert a == b
        assert a["II"] == 1.0
        assert all(-1 <= v <= 1 for v in a.values())

    def test_shots_invalidos(self):
        with pytest.raises(DomainError):
            sample_expectations({"X": 0.0}, 0)

    def test_fidelidade_com_shots(self, rng):
        target = target_states(2)
        result = state_tomography(target.density(), shots=5000, rng=rng)
        assert state_fidelity(result.state, target) > 0.95
        assert result.projection_distance >= 0

    def test_ghz_de_tres_qubits_com_shots(self, rng):
        target = target_states(3)
        result = state_tomography(target.density(), shots=1000, rng=rng)
        assert state_fidelity(result.state, target) == pytest.approx(1, abs=0.1)


class TestMetricas:
    @pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 0.9, 1.0])
    def test_concorrencia_de_werner(self, p):
        assert concurrence(werner(p)) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-7)

    def test_concorrencia_exige_dois_qubits(self):
        with pytest.raises(LayoutError):
            concurrence(np.eye(8) / 8)

    def test_fidelidade_entre_estados(self, rng):
        rho = random_density(2, rng)
        sigma = random_density(2, rng)
        assert state_fidelity(rho, rho) == pytest.approx(1, abs=1e-8)
        f = state_fidelity(rho, sigma)
        assert 0 <= f <= 1
        assert f == pytest.approx(state_fidelity(sigma, rho), abs=1e-8)
        assert purity(rho) <= 1

    def test_fidelidade_com_estado_puro(self):
        ket = product_ket(qubit_layout(2), "++")
        mixed = np.eye(4) / 4
        assert state_fidelity(mixed, ket) == pytest.approx(0.25)
        assert state_fidelity(ket, mixed) == pytest.approx(0.25)

    def test_dimensoes_diferentes(self):
        with pytest.raises(LayoutError):
            state_fidelity(np.eye(2) / 2, np.eye(4) / 4)

    def test_fidelidade_media(self):
        assert average_gate_fidelity(1.0, 4) == pytest.approx(1)
        assert average_gate_fidelity(0.0, 2) == pytest.approx(1 / 3)

    def test_bell_otimizada_recupera_rotacao_local(self):
        target = target_states(2)
        r = local_x_rotation([0.7, -0.3])
        rotated = r @ target.density().matrix @ r.conj().T
        assert state_fidelity(rotated, target) < 0.99
        fid, angles = bell_fidelity_optimized(rotated, target)
        assert fid == pytest.approx(1, abs=1e-6)
        assert len(angles) == 2

    def test_bell_otimizada_deterministica(self):
        rho = werner(0.8)
        target = target_states(2, "ge")
        assert bell_fidelity_optimized(rho, target) == bell_fidelity_optimized(rho, target)


class TestTomografiaDeProcesso:
    def test_identidade(self):
        ptm = ptm_of_unitary(np.eye(4))
        assert np.allclose(ptm.matrix, np.eye(16))
        assert ptm.is_trace_preserving()
        assert process_fidelity(ptm, ptm) == pytest.approx(1)

    def test_gate_ideal(self, check):
        gate = IdealGate(2)
        ideal = ptm_of_unitary(ideal_gate_unitary(2))
        measured = process_tomography(lambda label: gate.apply(label).density(), 2)
        check.assert_close(measured.matrix, ideal.matrix, atol=1e-10)
        assert measured.fidelity(ideal) == pytest.approx(1)
        assert len(process_inputs(2)) == 16

    def test_composicao(self, check):
        u = ptm_of_unitary(ideal_gate_unitary(2))
        check.assert_close((u @ u).matrix, ptm_of_unitary(ideal_gate_unitary(2).matrix @ ideal_gate_unitary(2).matrix).matrix)

    def test_amortecimento_de_amplitude(self):
        """
        A fidelidade média sobre as seis entradas de Pauli de um qubit
        coincide com a fidelidade média de gate calculada pela PTM.
        """
        gamma = 0.3
        k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
        k1 = np.array([[0, math.sqrt(gamma)], [0, 0]])

        def channel(m):
            return k0 @ m @ k0.conj().T + k1 @ m @ k1.conj().T

        ptm = ptm_of_channel(channel, 1)
        assert ptm.is_trace_preserving()
        f_avg = average_gate_fidelity(process_fidelity(ptm, ptm_of_unitary(np.eye(2))), 2)
        layout = qubit_layout(1)
        fids = []
        for label in ("g", "e", "+", "-", "i+"):
            rho = product_ket(layout, label).density().matrix
            fids.append(state_fidelity(channel(rho), product_ket(layout, label)))
        minus_i = np.array([1, -1j]) / math.sqrt(2)
        rho = np.outer(minus_i, minus_i.conj())
        fids.append(float(np.vdot(minus_i, channel(rho) @ minus_i).real))
        assert np.mean(fids) == pytest.approx(f_avg, abs=1e-12)

    def test_fidelidade_media_de_estado(self):
        gate = IdealGate(2)
        value = average_state_fidelity(lambda label: gate.apply(label).density(), gate.unitary)
        assert value == pytest.approx(1)

    def test_ptm_com_forma_errada(self):
        with pytest.raises(LayoutError):
            PauliTransferMatrix(2, np.eye(4))
        with pytest.raises(DomainError):
            PauliTransferMatrix(1, 2 * np.eye(4))

    def test_canal_nao_fisico_na_tomografia(self):
        gate = IdealGate(2)
        with pytest.raises(DomainError):
            process_tomography(lambda label: 3 * gate.apply(label).density().matrix, 2)

    def test_ptm_de_tamanhos_diferentes(self):
        with pytest.raises(LayoutError):
            process_fidelity(ptm_of_unitary(np.eye(2)), ptm_of_unitary(np.eye(4)))


@pytest.mark.full_suite
def test_processo_com_parametros_do_chip(chip):
    schedule = chip.schedule
    kwargs = {"fock_dim": chip.fock_dim, "dissipation": chip.dissipation, "solver": chip.solver}
    measured = process_tomography(partial(gate_channel, schedule, chip.device, kwargs), 2)
    ideal = ptm_of_unitary(ideal_gate_unitary(2, schedule.effective_angle()))
    assert measured.is_trace_preserving()
    assert 0.79 <= process_fidelity(measured, ideal) <= 0.90
