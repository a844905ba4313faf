"""
O gate STAR: unitário ideal, simulação completa da sequência de pulsos,
desenrolamento da fase de Rabi e trajetórias do ressonador.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.stats import poisson

from .device import TWO_PI, DeviceParams, GateSchedule, RabiPulse, SidebandConfig
from .errors import DomainError, HygieneError
from .hamiltonians import angular, build_full_ham4, renormalized_rabi
from .lindblad import (
    DissipationSettings,
    EvolutionResult,
    SolverSettings,
    build_dissipators,
    check_resources,
    evolve,
)
from .operators import (
    DensityMatrix,
    HilbertLayout,
    Ket,
    Operator,
    basis_projector,
    collective_spin,
    partial_trace_resonator,
    product_ket,
    sigma_phi,
    tensor,
    unitary,
)
from .tomography import state_fidelity

log = logging.getLogger(__name__)

RABI_SPREAD_TOL = 1e-3
FOCK_TAIL = 1e-6


def qubit_layout(n: int) -> HilbertLayout:
    return HilbertLayout(n, 1)


#
# Gate ideal
#
def ideal_gate_unitary(n: int, phi: float = 0.0) -> Operator:
    """U = exp(iπ/2 J_φ²) no espaço dos qubits."""
    if n < 2:
        raise DomainError(f"o gate precisa de pelo menos 2 qubits, recebi {n}")
    layout = qubit_layout(n)
    j = collective_spin(layout, phi).matrix
    return Operator(layout, unitary(j @ j, -math.pi / 2))


@dataclass(frozen=True)
class IdealGate:
    n_qubits: int
    angle: float = 0.0

    @property
    def unitary(self) -> Operator:
        return ideal_gate_unitary(self.n_qubits, self.angle)

    def apply(self, state: Ket | DensityMatrix | str) -> Ket | DensityMatrix:
        u = self.unitary.matrix
        if isinstance(state, str):
            state = product_ket(qubit_layout(self.n_qubits), state)
        if isinstance(state, Ket):
            return Ket(state.layout, u @ state.vector)
        return DensityMatrix(state.layout, u @ state.matrix @ u.conj().T)


def target_states(n: int, basis: str = "pm") -> Ket:
    """
    Estados-alvo GHZ/Bell.

    * "ge": (|g…g⟩ + |e…e⟩)/√2.
    * "pm": (|+…+⟩ + c|−…−⟩)/√2 com a fase relativa c produzida pelo gate ideal
      em |+…+⟩ (n par) ou em |i+…i+⟩ (n ímpar); para n = 2, c = i. A fase global
      é fixada deixando real positivo o coeficiente de |+…+⟩.
    """
    if n < 2:
        raise DomainError(f"estados-alvo exigem n ≥ 2, recebi {n}")
    layout = qubit_layout(n)
    if basis == "ge":
        vec = product_ket(layout, "g" * n).vector + product_ket(layout, "e" * n).vector
        return Ket(layout, vec / math.sqrt(2))
    if basis != "pm":
        raise DomainError(f"base desconhecida: {basis!r}")

    initial = "+" * n if n % 2 == 0 else ["i+"] * n
    out = IdealGate(n).apply(product_ket(layout, initial)).vector
    plus = product_ket(layout, "+" * n).vector
    minus = product_ket(layout, "-" * n).vector
    c_plus, c_minus = np.vdot(plus, out), np.vdot(minus, out)
    relative = c_minus / c_plus
    vec = (plus + relative / abs(relative) * minus) / math.sqrt(2)
    return Ket(layout, vec)


def ghz_preparation(n: int, basis: str = "pm") -> tuple[str, float]:
    """
    Estado inicial produto (mesmo rótulo em todos os qubits) e ângulo φΔ_eff
    cujo gate ideal produz o alvo GHZ da base pedida.
    """
    target = target_states(n, basis).density()
    layout = qubit_layout(n)
    best = (-1.0, "", 0.0)
    for label, phi in product(("+", "-", "g", "e", "i+", "i-"), (0.0, math.pi / 2, math.pi, -math.pi / 2)):
        out = IdealGate(n, phi).apply(product_ket(layout, [label] * n))
        fid = state_fidelity(out.density(), target)
        if fid > best[0] + 1e-12:
            best = (fid, label, phi)
    _, label, phi = best
    return label * n, phi


#
# Desenrolamento
#
@dataclass(frozen=True)
class UnwindOperator:
    """
    Desfaz a rotação coletiva acumulada pelo acionamento de Rabi:
    exp(+i 2π f (t_sq + t_r) J_x), f em Hz.
    """

    rabi: float
    t_sq: float
    t_r: float

    @property
    def angle(self) -> float:
        return TWO_PI * self.rabi * (self.t_sq + self.t_r)

    def matrix(self, n: int) -> np.ndarray:
        jx = collective_spin(qubit_layout(n), "x").matrix
        return unitary(jx, -self.angle)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        u = self.matrix(rho.layout.n_qubits)
        return DensityMatrix(rho.layout, u @ rho.matrix @ u.conj().T, check=rho.check)


def unwind(
    rho: DensityMatrix,
    rabi: float | Sequence[float],
    t_sq: float,
    t_r: float,
) -> DensityMatrix:
    """
    Aplica o desenrolamento ao estado dos qubits. Com frequências de Rabi
    diferentes usa-se a média e emite-se um aviso.
    """
    if rho.layout.has_resonator:
        rho = partial_trace_resonator(rho)
    if not isinstance(rabi, (int, float)):
        values = np.asarray(rabi, dtype=float)
        mean = float(values.mean())
        if np.ptp(values) > RABI_SPREAD_TOL * abs(mean):
            log.warning(
                "frequências de Rabi diferentes %s; desenrolando com a média %.6g Hz",
                [f"{v:.6g}" for v in values],
                mean,
            )
        rabi = mean
    return UnwindOperator(float(rabi), t_sq, t_r).apply(rho)


#
# Trajetórias do ressonador
#
def coupling_operator(params: DeviceParams, phi: float) -> np.ndarray:
    """K = Σ_k χ_k σ_φ,k/2 (Hz) no espaço dos qubits."""
    n = params.n_qubits
    out = np.zeros((2**n, 2**n), dtype=complex)
    for k, chi in enumerate(params.chi):
        ops = [np.eye(2)] * n
        ops[k] = sigma_phi(phi) / 2
        out += chi * tensor(*ops)
    return out


def coupling_eigenvalue(state: Ket | str, params: DeviceParams, phi: float = 0.0) -> float:
    layout = qubit_layout(params.n_qubits)
    ket = product_ket(layout, state) if isinstance(state, str) else state
    k = coupling_operator(params, phi)
    psi = ket.vector
    j = float(np.vdot(psi, k @ psi).real)
    if np.linalg.norm(k @ psi - j * psi) > 1e-9 * max(1.0, abs(j)):
        raise DomainError("o estado dos qubits não é autoestado do acoplamento J_φ")
    return j


def resonator_trajectory(
    state: Ket | str,
    params: DeviceParams,
    sidebands: SidebandConfig,
    t,
    phi: float | None = None,
) -> np.ndarray:
    """
    Trajetória α(t) = (g j/δ)(e^{iδt} − 1) do campo, com g = 2π√n̄ e j o autovalor
    do acoplamento (Hz) no estado dos qubits. É um círculo que fecha em
    t = 1/|δ|.
    """
    phi = sidebands.phi_delta if phi is None else phi
    j = coupling_eigenvalue(state, params, phi)
    delta = angular(sidebands.delta)
    c = TWO_PI * math.sqrt(sidebands.nbar) * j / delta
    t = np.asarray(t, dtype=float)
    return c * (np.exp(1j * delta * t) - 1)


def trajectory_area(state: Ket | str, params: DeviceParams, sidebands: SidebandConfig, phi: float | None = None) -> float:
    phi = sidebands.phi_delta if phi is None else phi
    j = coupling_eigenvalue(state, params, phi)
    c = TWO_PI * math.sqrt(sidebands.nbar) * j / angular(sidebands.delta)
    return math.pi * c * c


def trajectory_phase(state: Ket | str, params: DeviceParams, sidebands: SidebandConfig, phi: float | None = None) -> float:
    """
    Fase acumulada em um laço: duas vezes a área, com sinal oposto ao de δ.
    """
    return -math.copysign(2.0, sidebands.delta) * trajectory_area(state, params, sidebands, phi)


def fock_dim_for(params: DeviceParams, sidebands: SidebandConfig, tail: float = FOCK_TAIL) -> int:
    """
    Menor truncagem que comporta o laço mais largo do gate. Com todos os qubits
    alinhados o raio é √n̄ Σχ_k/|δ|; no ponto mais distante da origem o estado
    coerente tem população de Poisson acima do último nível menor que `tail`.
    """
    if sidebands.delta == 0:
        raise DomainError("sem dessintonia o laço não fecha")
    radius = math.sqrt(sidebands.nbar) * sum(params.chi) / abs(sidebands.delta)
    if radius == 0:
        return 2
    return int(poisson.isf(tail, radius**2)) + 2


#
# Simulação do gate
#
def population_labels(n: int) -> list[str]:
    return ["".join(bits) for bits in product("+-", repeat=n)]


def population_column(label: str) -> str:
    return "pop_" + label.replace("+", "p").replace("-", "m")


def population_observables(layout: HilbertLayout) -> dict[str, np.ndarray]:
    return {
        population_column(label): basis_projector(layout, label).matrix
        for label in population_labels(layout.n_qubits)
    }


@dataclass
class GateRun:
    """Resultado de `run_gate`."""

    schedule: GateSchedule
    qubits: DensityMatrix
    raw_qubits: DensityMatrix
    ideal: Ket
    angle: float
    evolution: EvolutionResult
    programmed_rabi: tuple[float, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def fidelity(self) -> float:
        return state_fidelity(self.qubits, self.ideal)

    def populations(self) -> dict[str, float]:
        layout = self.qubits.layout
        return {
            population_column(label): float(self.qubits.expectation(basis_projector(layout, label)).real)
            for label in population_labels(layout.n_qubits)
        }

    def schedule_hash(self) -> str:
        return hashlib.sha256(repr(self.schedule).encode()).hexdigest()[:16]

    def record(self) -> dict:
        rho = self.qubits.matrix
        return {
            "schedule_hash": self.schedule_hash(),
            "n_qubits": self.schedule.n_qubits,
            "initial": "".join(self.schedule.initial),
            "t_sq": self.schedule.t_sq,
            "t_r": self.schedule.t_r,
            "gate_angle": self.angle,
            "programmed_rabi": list(self.programmed_rabi),
            "fidelity": self.fidelity,
            "populations": self.populations(),
            "hygiene": self.evolution.hygiene.as_dict(),
            "state": {"real": rho.real.tolist(), "imag": rho.imag.tolist()},
        }


def programmed_pulses(schedule: GateSchedule, device: DeviceParams, sidebands: SidebandConfig) -> tuple[RabiPulse, ...]:
    """
    Pulsos efetivamente aplicados: com `renormalize_rabi`, Ω_k − shift_k para
    que a separação de Rabi vestida seja Ω_k.
    """
    if not schedule.renormalize_rabi:
        return schedule.pulses
    shifts = renormalized_rabi(device, sidebands, schedule.rabi)
    return tuple(
        RabiPulse(p.omega - s, t_r=p.t_r, t_sq=p.t_sq) for p, s in zip(schedule.pulses, shifts)
    )


def run_gate(
    schedule: GateSchedule,
    params: DeviceParams,
    fock_dim: int = 10,
    dissipation: DissipationSettings = DissipationSettings(),
    solver: SolverSettings = SolverSettings(),
    records: int = 101,
    cross_kerr: bool = False,
    strict: bool = False,
) -> GateRun:
    """
    Pipeline do gate: Ham4 → equação mestra por rampa, topo e descida →
    traço do ressonador → desenrolamento. O ressonador começa no vácuo do
    referencial deslocado.

    `params` descreve o chip inteiro; `schedule.qubits` seleciona os
    participantes. Com `strict=True` uma violação de higiene levanta
    `HygieneError`.
    """
    device = params.select(schedule.qubits)
    n = device.n_qubits
    layout = HilbertLayout(n, fock_dim)
    check_resources(layout, solver)

    sidebands = schedule.resolved_sidebands()
    pulses = programmed_pulses(schedule, device, sidebands)
    model = build_full_ham4(
        device,
        sidebands,
        pulses,
        fock_dim=fock_dim,
        stark_frame=schedule.sidebands_lead,
        cross_kerr=cross_kerr,
    )
    dissipators = build_dissipators(device, layout, dissipation)
    psi0 = product_ket(layout, schedule.initial)

    t_p = schedule.t_p
    times = np.linspace(0.0, t_p, records) if t_p > 0 else np.array([0.0])
    evolution = evolve(
        psi0,
        model,
        dissipators,
        times=times,
        settings=solver,
        observables=population_observables(layout),
        t_sample=schedule.t_r + schedule.t_sq / 2,
    )
    if strict and not evolution.valid:
        raise HygieneError("; ".join(evolution.hygiene.problems()))

    raw = partial_trace_resonator(evolution.final)
    unwound = unwind(raw, schedule.rabi, schedule.t_sq, schedule.t_r)
    angle = schedule.effective_angle()
    ideal = IdealGate(n, angle).apply(product_ket(qubit_layout(n), schedule.initial))
    run = GateRun(
        schedule=schedule,
        qubits=unwound,
        raw_qubits=raw,
        ideal=ideal,
        angle=angle,
        evolution=evolution,
        programmed_rabi=tuple(p.omega for p in pulses),
    )
    log.debug("gate n=%d t_sq=%.4g s: fidelidade %.6f", n, schedule.t_sq, run.fidelity)
    return run


def _population_point(schedule: GateSchedule, params: DeviceParams, kwargs: dict, t_sq: float) -> dict:
    run = run_gate(schedule.with_t_sq(t_sq), params, **kwargs)
    return {"t_sq_ns": t_sq * 1e9, **run.populations(), "fidelity": run.fidelity}


def gate_populations(
    schedule: GateSchedule,
    params: DeviceParams,
    t_sq_grid: Iterable[float],
    mapper: Callable = map,
    **kwargs,
) -> pd.DataFrame:
    """
    Populações na base ± do estado desenrolado em função de t_sq, uma
    simulação completa (com rampas) por ponto.
    """
    point = partial(_population_point, schedule, params, kwargs)
    return pd.DataFrame(list(mapper(point, list(t_sq_grid))))


def crossing_time(t_sq: Sequence[float], pop_a: Sequence[float], pop_b: Sequence[float]) -> float | None:
    """
    Primeiro cruzamento de pop_a e pop_b, por interpolação linear. Devolve
    None quando as curvas não se cruzam.
    """
    t = np.asarray(t_sq, dtype=float)
    diff = np.asarray(pop_a, dtype=float) - np.asarray(pop_b, dtype=float)
    for j in range(len(diff) - 1):
        if diff[j] == 0:
            return float(t[j])
        if diff[j] * diff[j + 1] < 0:
            return float(t[j] + (t[j + 1] - t[j]) * diff[j] / (diff[j] - diff[j + 1]))
    if len(diff) and diff[-1] == 0:
        return float(t[-1])
    return None


def gate_channel(schedule: GateSchedule, params: DeviceParams, kwargs: dict, initial: str) -> DensityMatrix:
    """
    O gate simulado como canal sobre estados produto: estado desenrolado para
    a entrada `initial`. Usado pela tomografia de processo.
    """
    return run_gate(replace(schedule, initial=initial), params, **kwargs).qubits
