import math

import numpy as np
import pytest

from star.errors import DomainError, LayoutError
from star.operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    HilbertLayout,
    Ket,
    all_pauli_labels,
    annihilation,
    collective_spin,
    displacement,
    embed_qubit_op,
    fock_populations,
    number,
    parse_labels,
    partial_trace_resonator,
    pauli_string,
    prepare_product,
    product_ket,
    sqrtm,
    top_fock_population,
    unitary,
)


class TestLayout:
    def test_dimensoes_com_e_sem_ressonador(self):
        layout = HilbertLayout(3, 8)
        assert layout.qubit_dim == 8
        assert layout.dim == 64
        assert layout.has_resonator
        assert not layout.qubits_only().has_resonator
        assert layout.qubits_only().dim == 8

    def test_layout_invalido(self):
        with pytest.raises(LayoutError):
            HilbertLayout(2, 0)
        with pytest.raises(LayoutError):
            HilbertLayout(-1, 4)

    def test_indice_de_qubit_fora_do_intervalo(self):
        with pytest.raises(LayoutError):
            embed_qubit_op(HilbertLayout(2, 3), 2, SIGMA_X)


class TestOperadores:
    def test_ordem_tensorial_qubits_primeiro(self):
        layout = HilbertLayout(2, 3)
        rho = product_ket(layout, "g+").density()
        assert rho.expectation(embed_qubit_op(layout, 0, SIGMA_Z)).real == pytest.approx(1)
        assert rho.expectation(embed_qubit_op(layout, 1, SIGMA_X)).real == pytest.approx(1)
        assert rho.expectation(embed_qubit_op(layout, 1, SIGMA_Z)).real == pytest.approx(0, abs=1e-12)

    def test_aniquilacao_e_numero(self, check):
        layout = HilbertLayout(1, 5)
        a = annihilation(layout).matrix
        ket = product_ket(layout, "g", photons=3)
        expected = math.sqrt(3) * product_ket(layout, "g", photons=2).vector
        check.assert_close(a @ ket.vector, expected, what="a|3⟩")
        assert ket.density().expectation(number(layout)).real == pytest.approx(3)

    def test_sem_ressonador_nao_ha_aniquilacao(self):
        with pytest.raises(LayoutError):
            annihilation(HilbertLayout(2, 1))

    def test_spin_coletivo(self, check):
        layout = HilbertLayout(2, 1)
        jz = collective_spin(layout, "z")
        gg = product_ket(layout, "gg")
        check.assert_close(jz.matrix @ gg.vector, gg.vector)
        jphi = collective_spin(layout, math.pi / 2)
        check.assert_close(jphi.matrix, -collective_spin(layout, "y").matrix)

    def test_pauli_strings(self, check):
        check.assert_close(pauli_string("XZ"), np.kron(SIGMA_X, SIGMA_Z))
        labels = list(all_pauli_labels(2))
        assert len(labels) == 16
        assert labels[0] == "II"
        assert labels[-1] == "ZZ"

    def test_unitario_por_autodecomposicao(self, check):
        check.assert_close(unitary(SIGMA_X / 2, math.pi), -1j * SIGMA_X, atol=1e-12)
        u = unitary(SIGMA_Y, 0.37)
        check.assert_close(u @ u.conj().T, np.eye(2), atol=1e-12)

    def test_deslocamento_produz_estado_coerente(self):
        layout = HilbertLayout(1, 25)
        alpha = 0.5 - 0.3j
        vac = product_ket(layout, "g").vector
        psi = displacement(layout, alpha).matrix @ vac
        a = annihilation(layout).matrix
        assert np.vdot(psi, a @ psi) == pytest.approx(alpha, abs=1e-8)


class TestEstados:
    def test_rotulos(self):
        assert parse_labels("i+i-g") == ["i+", "i-", "g"]
        assert parse_labels(["+", "e"]) == ["+", "e"]
        with pytest.raises(DomainError):
            parse_labels("gx")

    def test_estado_produto_com_rotulos_errados(self):
        with pytest.raises(LayoutError):
            product_ket(HilbertLayout(2, 3), "+")
        with pytest.raises(LayoutError):
            product_ket(HilbertLayout(1, 3), "+", photons=3)

    def test_ket_nao_normalizado(self):
        with pytest.raises(DomainError):
            Ket(HilbertLayout(1, 1), np.array([1.0, 1.0]))

    def test_matriz_densidade_invalida(self):
        layout = HilbertLayout(1, 1)
        with pytest.raises(DomainError):
            DensityMatrix(layout, np.eye(2))
        with pytest.raises(DomainError):
            DensityMatrix(layout, np.array([[1.2, 0], [0, -0.2]]))

    def test_prepara_estado_produto(self):
        rho = prepare_product(HilbertLayout(2, 4), "i+g")
        assert rho.purity() == pytest.approx(1)
        assert rho.trace() == pytest.approx(1)

    def test_traco_parcial_do_ressonador(self, check):
        layout = HilbertLayout(2, 4)
        full = product_ket(layout, "+e", photons=2).density()
        reduced = partial_trace_resonator(full)
        expected = product_ket(layout.qubits_only(), "+e").density()
        assert reduced.layout == layout.qubits_only()
        check.assert_close(reduced, expected)

    def test_populacao_do_ultimo_nivel(self):
        layout = HilbertLayout(1, 3)
        rho = product_ket(layout, "g", photons=2).density()
        assert top_fock_population(rho, layout) == pytest.approx(1)
        assert top_fock_population(product_ket(layout, "g").density(), layout) == 0


class TestRaizQuadrada:
    def test_raiz_de_matriz_psd(self, check, rng):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = a @ a.conj().T
        root = sqrtm(m)
        check.assert_close(root @ root, m, atol=1e-9)

    def test_raiz_de_matriz_nao_psd(self):
        with pytest.raises(DomainError):
            sqrtm(np.diag([1.0, -0.5]))


class TestAlgebra:
    def test_comutador_truncado(self, check):
        layout = HilbertLayout(1, 4)
        a = annihilation(layout)
        comm = a.commutator(a.dag()).matrix
        expected = np.kron(np.eye(2), np.diag([1.0, 1.0, 1.0, -3.0]))
        check.assert_close(comm, expected, atol=1e-12)

    def test_populacoes_de_fock(self, check):
        layout = HilbertLayout(2, 4)
        rho = product_ket(layout, "+g", photons=2).density()
        assert fock_populations(rho) == pytest.approx([0, 0, 1, 0])
        assert rho.eigvals()[-1] == pytest.approx(1)
        check.assert_density(rho)

    def test_matriz_densidade_invalida(self, check):
        with pytest.raises(DomainError):
            check.assert_density(np.diag([0.7, 0.7]))
