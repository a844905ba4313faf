import math

import numpy as np
import pytest

from star.device import DeviceParams, SidebandConfig
from star.errors import DomainError, HygieneError, LayoutError, ResourceError
from star.hamiltonians import HamiltonianModel, build_ms_ideal
from star.lindblad import (
    DissipationSettings,
    SolverSettings,
    build_dissipators,
    closed_system_oracle,
    dressed_dephasing,
    dressed_relaxation,
    evolve,
    expectation_series,
    resonator_decay,
)
from star.operators import SIGMA_X, SIGMA_Z, HilbertLayout, embed_qubit_op, number, product_ket

T_FINAL = 300e-9


def ideal_model(fock_dim: int = 8) -> HamiltonianModel:
    return build_ms_ideal(DeviceParams.uniform(2, 1e6), SidebandConfig(30e6, -2e6, 1.0), fock_dim=fock_dim)


def free_model(layout: HilbertLayout) -> HamiltonianModel:
    return HamiltonianModel("livre", layout, np.zeros((layout.dim, layout.dim), dtype=complex))


class TestOraculo:
    @pytest.mark.parametrize("ket_fast_path", [True, False])
    def test_rk4_contra_exponencial(self, check, ket_fast_path):
        model = ideal_model()
        rho0 = product_ket(model.layout, "+g").density()
        settings = SolverSettings(steps_per_period=2000, ket_fast_path=ket_fast_path)
        result = evolve(rho0, model, times=[0.0, T_FINAL], settings=settings)
        expected = closed_system_oracle(rho0, model.static, T_FINAL)
        check.assert_close(result.final, expected, atol=1e-8, what="ρ(T)")

    def test_rk45_contra_exponencial(self, check):
        model = ideal_model()
        rho0 = product_ket(model.layout, "+-").density()
        settings = SolverSettings(method="rk45", rtol=1e-10, atol=1e-12, ket_fast_path=False)
        result = evolve(rho0, model, times=np.linspace(0.0, T_FINAL, 4), settings=settings)
        expected = closed_system_oracle(rho0, model.static, T_FINAL)
        check.assert_close(result.final, expected, atol=1e-6, what="ρ(T)")

    def test_oraculo_com_dimensao_errada(self):
        rho0 = product_ket(HilbertLayout(1, 1), "g").density()
        with pytest.raises(LayoutError):
            closed_system_oracle(rho0, np.eye(4), 1e-9)


class TestDissipadores:
    def test_decaimento_do_ressonador(self):
        kappa = 1e6
        layout = HilbertLayout(1, 4)
        rho0 = product_ket(layout, "g", photons=1).density()
        t_end = 1 / kappa
        result = evolve(
            rho0,
            free_model(layout),
            [resonator_decay(layout, kappa)],
            times=np.linspace(0, t_end, 5),
            settings=SolverSettings(steps_per_period=200),
            observables={"n": number(layout)},
        )
        assert result["n"][0] == pytest.approx(1)
        assert result["n"][-1] == pytest.approx(math.exp(-1), rel=1e-6)

    def test_defasagem_em_x(self):
        t2 = 1e-6
        layout = HilbertLayout(1, 1)
        result = evolve(
            product_ket(layout, "g").density(),
            free_model(layout),
            [dressed_dephasing(layout, 0, t2, "x")],
            times=np.linspace(0, t2, 5),
            settings=SolverSettings(steps_per_period=200),
            observables={"z": embed_qubit_op(layout, 0, SIGMA_Z)},
        )
        expected = np.exp(-result.times / t2)
        assert result["z"] == pytest.approx(expected, rel=1e-6)

    def test_relaxacao_por_troca(self):
        t1 = 2e-6
        layout = HilbertLayout(1, 1)
        result = evolve(
            product_ket(layout, "+").density(),
            free_model(layout),
            [dressed_relaxation(layout, 0, t1, "flip")],
            times=np.linspace(0, t1, 5),
            settings=SolverSettings(steps_per_period=200),
            observables={"x": embed_qubit_op(layout, 0, SIGMA_X)},
        )
        assert result["x"] == pytest.approx(np.exp(-result.times / t1), rel=1e-6)

    def test_relaxacao_por_abaixamento(self):
        t1 = 2e-6
        layout = HilbertLayout(1, 1)
        result = evolve(
            product_ket(layout, "+").density(),
            free_model(layout),
            [dressed_relaxation(layout, 0, t1, "lower")],
            times=np.linspace(0, 2 * t1, 5),
            settings=SolverSettings(steps_per_period=200),
            observables={"x": embed_qubit_op(layout, 0, SIGMA_X)},
        )
        expected = 2 * np.exp(-result.times / (2 * t1)) - 1
        assert result["x"] == pytest.approx(expected, rel=1e-6, abs=1e-9)

    def test_taxa_negativa_e_eixo_desconhecido(self):
        layout = HilbertLayout(1, 1)
        with pytest.raises(DomainError):
            dressed_relaxation(layout, 0, -1e-6)
        with pytest.raises(DomainError):
            dressed_relaxation(layout, 0, 1e-6, axis="y")
        with pytest.raises(DomainError):
            dressed_dephasing(layout, 0, 1e-6, axis="y")

    def test_canais_do_gate(self, chip):
        device = chip.device.select([0, 1])
        layout = HilbertLayout(2, 4)
        assert len(build_dissipators(device, layout)) == 5
        assert len(build_dissipators(device, layout, DissipationSettings(lifetimes=False))) == 1
        assert len(build_dissipators(device, layout, DissipationSettings(kappa_on=False))) == 4
        assert build_dissipators(device.without_lifetimes(), layout)[0].label == "kappa"
        assert build_dissipators(DeviceParams.uniform(2, 1e6), layout) == []


class TestEvolucao:
    def test_dimensao_acima_do_limite(self):
        model = ideal_model(fock_dim=4)
        with pytest.raises(ResourceError):
            evolve(product_ket(model.layout, "++"), model, times=[0, 1e-9], settings=SolverSettings(max_dim=8))

    def test_tempos_nao_crescentes(self):
        model = ideal_model(fock_dim=4)
        with pytest.raises(DomainError):
            evolve(product_ket(model.layout, "++"), model, times=[0, 1e-9, 1e-9])

    def test_layout_diferente(self):
        model = ideal_model(fock_dim=4)
        with pytest.raises(LayoutError):
            evolve(product_ket(HilbertLayout(2, 5), "++"), model, times=[0, 1e-9])

    def test_metodo_desconhecido(self):
        with pytest.raises(DomainError):
            SolverSettings(method="euler")

    def test_serie_de_valores_esperados(self):
        model = ideal_model(fock_dim=6)
        jz = embed_qubit_op(model.layout, 0, SIGMA_Z)
        result = evolve(
            product_ket(model.layout, "+g").density(),
            model,
            times=np.linspace(0, 100e-9, 6),
            observables={"z0": jz, "x0": embed_qubit_op(model.layout, 0, SIGMA_X)},
            keep_states=True,
        )
        assert expectation_series(result, jz) == pytest.approx(result["z0"], abs=1e-12)
        with pytest.raises(DomainError):
            expectation_series(result, np.triu(np.ones((model.layout.dim, model.layout.dim))))

    def test_serie_exige_estados_guardados(self):
        model = ideal_model(fock_dim=4)
        result = evolve(product_ket(model.layout, "++"), model, times=[0, 1e-9])
        with pytest.raises(DomainError):
            expectation_series(result, number(model.layout))

    def test_higiene_violada_pelo_ultimo_nivel(self):
        layout = HilbertLayout(1, 3)
        result = evolve(product_ket(layout, "g", photons=2), free_model(layout), times=[0, 1e-9])
        assert not result.valid
        with pytest.raises(HygieneError, match="Fock"):
            result.raise_for_hygiene()

    def test_tabela(self):
        model = ideal_model(fock_dim=4)
        result = evolve(
            product_ket(model.layout, "++"),
            model,
            times=[0, 1e-9, 2e-9],
            observables={"n": number(model.layout)},
        )
        frame = result.to_frame()
        assert list(frame.columns) == ["t_ns", "n"]
        assert frame["t_ns"].tolist() == pytest.approx([0, 1, 2])
        assert result.hygiene.max_trace_drift < 1e-7
