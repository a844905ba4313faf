"""
Funções que auxiliam na escrita dos testes: comparações de matrizes e
estados com mensagens legíveis e dispositivos pequenos usados em vários
arquivos de teste.
"""

import numpy as np

from .device import DeviceParams, GateSchedule, RabiPulse, SidebandConfig, gate_condition_delta, gate_time
from .lindblad import EvolutionResult
from .operators import DensityMatrix, Ket, Operator, validate_density


def _array(value) -> np.ndarray:
    for attr in ("matrix", "vector"):
        if hasattr(value, attr):
            return getattr(value, attr)
    return np.asarray(value)


def assert_close(actual, expected, atol: float = 1e-10, what: str = "matriz"):
    """Compara matrizes, kets ou operadores entrada a entrada."""
    a, b = _array(actual), _array(expected)
    assert a.shape == b.shape, f"{what}: forma {a.shape} diferente de {b.shape}"
    err = float(np.abs(a - b).max()) if a.size else 0.0
    assert err <= atol, f"{what}: diferença máxima {err:.3e} acima de {atol:.1e}"


def assert_same_state(a: Ket, b: Ket, atol: float = 1e-10):
    """Kets iguais a menos de fase global."""
    overlap = abs(np.vdot(a.vector, b.vector))
    assert abs(overlap - 1) <= atol, f"estados diferentes: |⟨a|b⟩| = {overlap:.12f}"


def assert_density(rho: DensityMatrix | np.ndarray):
    validate_density(_array(rho))


def assert_hermitian(op: Operator | np.ndarray, atol: float = 1e-12):
    m = _array(op)
    err = float(np.abs(m - m.conj().T).max())
    assert err <= atol, f"operador não hermitiano: ‖H − H†‖ = {err:.3e}"


def assert_hygiene(result: EvolutionResult):
    problems = result.hygiene.problems()
    assert not problems, "higiene violada: " + "; ".join(problems)


def fast_schedule(
    n: int = 2,
    chi: float = 1e6,
    nbar: float = 1.0,
    rabi: float = 150e6,
    t_r: float = 0.0,
    initial: str = "",
) -> tuple[GateSchedule, DeviceParams]:
    """
    Gate curto e rápido (Ω_R = Ω_SB grande, χ iguais, δ na condição do gate),
    o ponto de operação em que o modelo completo se aproxima do ideal.
    """
    device = DeviceParams.uniform(n, chi)
    delta = gate_condition_delta(device, range(n), nbar)
    t_sq = max(gate_time(delta) - t_r, 0.0)
    schedule = GateSchedule(
        qubits=tuple(range(n)),
        pulses=tuple(RabiPulse(rabi, t_r=t_r, t_sq=t_sq) for _ in range(n)),
        sidebands=SidebandConfig(omega_sb=rabi, delta=-delta, nbar=nbar),
        initial=initial,
        gate_angle=0.0,
    )
    return schedule, device
