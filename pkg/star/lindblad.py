"""
Integrador da equação mestra de Lindblad

    dρ/dt = −i[H(t), ρ] + Σ_j D[L_j]ρ,    D[L]ρ = LρL† − {L†L, ρ}/2.

O lado direito é avaliado diretamente com produtos de matrizes (nunca se monta
o superoperador). O passo padrão é RK4 fixo, que acerta exatamente os tempos
de registro; o modo adaptativo usa `scipy.integrate.solve_ivp` (RK45).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from .device import TWO_PI, DeviceParams
from .errors import DomainError, HygieneError, IntegrationError, LayoutError, ResourceError
from .hamiltonians import HamiltonianModel
from .operators import (
    SIGMA_MINUS_X,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    HilbertLayout,
    Ket,
    Operator,
    annihilation,
    embed_qubit_op,
    expm,
    is_hermitian,
    top_fock_population,
)

log = logging.getLogger(__name__)

TOP_FOCK_LIMIT = 1e-4
TRACE_DRIFT_LIMIT = 1e-7
MIN_EIGENVALUE_LIMIT = -1e-6
IMAG_RESIDUE_LIMIT = 1e-9


@dataclass(frozen=True)
class SolverSettings:
    method: str = "rk4"
    steps_per_period: int = 50
    rtol: float = 1e-8
    atol: float = 1e-10
    ket_fast_path: bool = True
    max_dim: int = 640

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise DomainError(f"método de integração desconhecido: {self.method!r}")
        if self.steps_per_period < 1:
            raise DomainError("steps_per_period deve ser positivo")


@dataclass(frozen=True)
class DissipationSettings:
    """
    Escolha dos canais de dissipação por qubit.

    `relaxation_axis`: "flip" usa o salto σ_z (troca |+⟩ ↔ |−⟩ nos dois
    sentidos); "lower" usa |−⟩⟨+|. `dephasing_axis`: "x" usa σ_x (defasagem no
    referencial vestido); "z" usa σ_z.
    """

    relaxation_axis: str = "flip"
    dephasing_axis: str = "x"
    lifetimes: bool = True
    kappa_on: bool = True


@dataclass(frozen=True)
class DissipatorSpec:
    """Operador de salto sem a taxa e a taxa (1/s)."""

    label: str
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise DomainError(f"taxa negativa em {self.label}: {self.rate}")

    @property
    def jump(self) -> np.ndarray:
        return math.sqrt(self.rate) * self.operator


def resonator_decay(layout: HilbertLayout, kappa: float) -> DissipatorSpec:
    """
    D[√κ a]. O valor de `kappa` da configuração entra diretamente como taxa
    (1/s): "180 kHz" significa κ = 1,8·10⁵ s⁻¹, sem fator 2π.
    """
    return DissipatorSpec("kappa", annihilation(layout).matrix, kappa)


def dressed_relaxation(layout: HilbertLayout, k: int, t1rho: float, axis: str = "flip") -> DissipatorSpec:
    ops = {"flip": SIGMA_Z, "lower": SIGMA_MINUS_X}
    if axis not in ops:
        raise DomainError(f"eixo de relaxação desconhecido: {axis!r}")
    return DissipatorSpec(f"t1rho_{k}", embed_qubit_op(layout, k, ops[axis]).matrix, 1 / (2 * t1rho))


def dressed_dephasing(layout: HilbertLayout, k: int, t2rho: float, axis: str = "x") -> DissipatorSpec:
    ops = {"x": SIGMA_X, "z": SIGMA_Z}
    if axis not in ops:
        raise DomainError(f"eixo de defasagem desconhecido: {axis!r}")
    return DissipatorSpec(f"t2rho_{k}", embed_qubit_op(layout, k, ops[axis]).matrix, 1 / (2 * t2rho))


def build_dissipators(
    params: DeviceParams,
    layout: HilbertLayout,
    settings: DissipationSettings = DissipationSettings(),
) -> list[DissipatorSpec]:
    """
    Canais do gate: decaimento do ressonador e, para cada qubit com tempo de
    vida finito, relaxação e defasagem vestidas.
    """
    out = []
    if settings.kappa_on and params.kappa > 0 and layout.has_resonator:
        out.append(resonator_decay(layout, params.kappa))
    if settings.lifetimes:
        for k in range(params.n_qubits):
            if math.isfinite(params.t1rho[k]):
                out.append(dressed_relaxation(layout, k, params.t1rho[k], settings.relaxation_axis))
            if math.isfinite(params.t2rho[k]):
                out.append(dressed_dephasing(layout, k, params.t2rho[k], settings.dephasing_axis))
    return out


@dataclass
class Hygiene:
    """Monitoramento numérico de uma evolução."""

    max_trace_drift: float = 0.0
    min_eigenvalue: float = 0.0
    max_top_fock: float = 0.0
    max_hermitian_drift: float = 0.0

    @property
    def valid(self) -> bool:
        return (
            self.max_trace_drift < TRACE_DRIFT_LIMIT
            and self.min_eigenvalue > MIN_EIGENVALUE_LIMIT
            and self.max_top_fock < TOP_FOCK_LIMIT
        )

    def problems(self) -> list[str]:
        out = []
        if self.max_trace_drift >= TRACE_DRIFT_LIMIT:
            out.append(f"desvio de traço {self.max_trace_drift:.2e}")
        if self.min_eigenvalue <= MIN_EIGENVALUE_LIMIT:
            out.append(f"autovalor mínimo {self.min_eigenvalue:.2e}")
        if self.max_top_fock >= TOP_FOCK_LIMIT:
            out.append(f"população do último nível de Fock {self.max_top_fock:.2e}")
        return out

    def update(self, rho: np.ndarray, layout: HilbertLayout, pure: bool = False):
        self.max_trace_drift = max(self.max_trace_drift, abs(np.trace(rho).real - 1))
        if not pure:
            self.min_eigenvalue = min(self.min_eigenvalue, float(np.linalg.eigvalsh(rho).min()))
        if layout.has_resonator:
            self.max_top_fock = max(self.max_top_fock, top_fock_population(rho, layout))

    def as_dict(self) -> dict[str, float | bool]:
        return {
            "max_trace_drift": self.max_trace_drift,
            "min_eigenvalue": self.min_eigenvalue,
            "max_top_fock": self.max_top_fock,
            "max_hermitian_drift": self.max_hermitian_drift,
            "valid": self.valid,
        }


@dataclass
class EvolutionResult:
    """
    Resultado de `evolve`: grade de tempos (s), valores esperados registrados,
    estado final e monitoramento de higiene. `states` guarda ρ(t) em todos os
    tempos quando `keep_states=True`.
    """

    layout: HilbertLayout
    times: np.ndarray
    expectations: dict[str, np.ndarray]
    final: DensityMatrix
    hygiene: Hygiene = field(default_factory=Hygiene)
    states: list[np.ndarray] | None = None

    def __post_init__(self):
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise DomainError("os tempos de registro devem ser estritamente crescentes")

    @property
    def valid(self) -> bool:
        return self.hygiene.valid

    def raise_for_hygiene(self):
        if not self.valid:
            raise HygieneError("evolução inválida: " + "; ".join(self.hygiene.problems()))

    def __getitem__(self, label: str) -> np.ndarray:
        return self.expectations[label]

    def to_frame(self):
        """Tabela com `t_ns` e uma coluna por observável."""
        data = {"t_ns": self.times * 1e9}
        data.update(self.expectations)
        return pd.DataFrame(data)


def check_resources(layout: HilbertLayout, settings: SolverSettings = SolverSettings()):
    if layout.dim > settings.max_dim:
        raise ResourceError(
            f"dimensão {layout.dim} acima do limite configurado ({settings.max_dim})"
        )


def _as_matrix(layout: HilbertLayout, op: Operator | np.ndarray) -> np.ndarray:
    if isinstance(op, Operator):
        layout.check_same(op.layout)
        return op.matrix
    op = np.asarray(op, dtype=complex)
    layout.check_matrix(op)
    return op


def _pure_vector(state: DensityMatrix | Ket) -> np.ndarray | None:
    if isinstance(state, Ket):
        return np.array(state.vector, dtype=complex)
    vals, vecs = np.linalg.eigh(state.matrix)
    if vals[-1] > 1 - 1e-12:
        return vecs[:, -1]
    return None


def step_size(model: HamiltonianModel, dissipators: Sequence[DissipatorSpec], settings: SolverSettings, t_sample: float) -> float:
    """
    dt_max = 1/(steps_per_period·f_max), com f_max a maior frequência do
    Hamiltoniano (avaliado em `t_sample`) ou a maior taxa de dissipação.
    """
    f_max = model.max_frequency(t_sample)
    f_max = max(f_max, sum(d.rate for d in dissipators) / TWO_PI)
    if f_max <= 0:
        return math.inf
    return 1 / (settings.steps_per_period * f_max)


def evolve(
    rho0: DensityMatrix | Ket,
    model: HamiltonianModel,
    dissipators: Sequence[DissipatorSpec] = (),
    times: Sequence[float] | None = None,
    t_span: tuple[float, float] | None = None,
    settings: SolverSettings = SolverSettings(),
    observables: Mapping[str, Operator | np.ndarray] | None = None,
    keep_states: bool = False,
    t_sample: float | None = None,
) -> EvolutionResult:
    """
    Integra a equação mestra de `times[0]` até `times[-1]`, registrando os
    observáveis em cada tempo da grade. Sem `times`, registra apenas os
    extremos de `t_span`.
    """
    layout = model.layout
    layout.check_same(rho0.layout)
    check_resources(layout, settings)
    if times is None:
        if t_span is None:
            raise DomainError("informe times ou t_span")
        times = [t_span[0], t_span[1]] if t_span[1] > t_span[0] else [t_span[0]]
    times = np.asarray(times, dtype=float)
    if len(times) > 1 and np.any(np.diff(times) <= 0):
        raise DomainError("os tempos de registro devem ser estritamente crescentes")

    obs = {label: _as_matrix(layout, op) for label, op in (observables or {}).items()}
    jumps = [d.jump for d in dissipators if d.rate > 0]
    if t_sample is None:
        t_sample = float(times[len(times) // 2])
    dt_max = step_size(model, dissipators, settings, t_sample)

    psi0 = _pure_vector(rho0) if not jumps and settings.ket_fast_path else None
    log.debug(
        "evolução %s: dim=%d, %d registros, %d canais, dt_max=%.3g s, %s",
        model.kind,
        layout.dim,
        len(times),
        len(jumps),
        dt_max,
        "ket" if psi0 is not None else settings.method,
    )

    if psi0 is not None:
        result = _evolve_ket(psi0, model, times, dt_max, settings, obs, keep_states)
    else:
        rho = rho0.matrix if isinstance(rho0, DensityMatrix) else rho0.density().matrix
        result = _evolve_density(np.array(rho), model, jumps, times, dt_max, settings, obs, keep_states)

    if not result.valid:
        log.warning("evolução %s fora dos limites de higiene: %s", model.kind, "; ".join(result.hygiene.problems()))
    return result


def _record(values: dict[str, list], obs: dict[str, np.ndarray], expect):
    for label, op in obs.items():
        values[label].append(complex(expect(op)).real)


def _substeps(dt: float, dt_max: float) -> int:
    if not math.isfinite(dt_max):
        return 1
    return max(1, math.ceil(dt / dt_max - 1e-12))


def _rk4(f, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _evolve_ket(psi, model, times, dt_max, settings, obs, keep_states) -> EvolutionResult:
    layout = model.layout
    hygiene = Hygiene()
    values = {label: [] for label in obs}
    states = [] if keep_states else None

    def rhs(t, y):
        return -1j * (model(t) @ y)

    def record(y):
        _record(values, obs, lambda op: np.vdot(y, op @ y))
        rho = np.outer(y, y.conj())
        hygiene.update(rho, layout, pure=True)
        if states is not None:
            states.append(rho)

    if settings.method == "rk45":
        sol = _solve_ivp(rhs, psi, times, settings)
        for j in range(len(times)):
            record(sol[:, j])
        psi = sol[:, -1]
    else:
        record(psi)
        for t0, t1 in zip(times[:-1], times[1:]):
            n = _substeps(t1 - t0, dt_max)
            h = (t1 - t0) / n
            for j in range(n):
                psi = _rk4(rhs, t0 + j * h, psi, h)
            record(psi)

    final = DensityMatrix(layout, np.outer(psi, psi.conj()), check=False)
    return EvolutionResult(layout, times, _arrays(values), final, hygiene, states)


def _evolve_density(rho, model, jumps, times, dt_max, settings, obs, keep_states) -> EvolutionResult:
    layout = model.layout
    hygiene = Hygiene()
    values = {label: [] for label in obs}
    states = [] if keep_states else None
    decay = sum((L.conj().T @ L for L in jumps), np.zeros_like(rho))

    def rhs(t, y):
        h_eff = model(t) - 0.5j * decay
        out = -1j * (h_eff @ y - y @ h_eff.conj().T)
        for L in jumps:
            out += L @ y @ L.conj().T
        return out

    def record(y):
        _record(values, obs, lambda op: np.trace(op @ y))
        hygiene.update(y, layout)
        if states is not None:
            states.append(y.copy())

    if settings.method == "rk45":
        dim = rho.shape[0]

        def flat_rhs(t, y):
            return rhs(t, y.reshape(dim, dim)).ravel()

        sol = _solve_ivp(flat_rhs, rho.ravel(), times, settings)
        for j in range(len(times)):
            y = sol[:, j].reshape(dim, dim)
            hygiene.max_hermitian_drift = max(hygiene.max_hermitian_drift, np.abs(y - y.conj().T).max())
            record((y + y.conj().T) / 2)
        rho = (sol[:, -1].reshape(dim, dim) + sol[:, -1].reshape(dim, dim).conj().T) / 2
    else:
        record(rho)
        for t0, t1 in zip(times[:-1], times[1:]):
            n = _substeps(t1 - t0, dt_max)
            h = (t1 - t0) / n
            for j in range(n):
                rho = _rk4(rhs, t0 + j * h, rho, h)
                drift = np.abs(rho - rho.conj().T).max()
                hygiene.max_hermitian_drift = max(hygiene.max_hermitian_drift, drift)
                rho = (rho + rho.conj().T) / 2
            record(rho)

    final = DensityMatrix(layout, rho, check=False)
    return EvolutionResult(layout, times, _arrays(values), final, hygiene, states)


def _solve_ivp(rhs, y0, times, settings: SolverSettings) -> np.ndarray:
    if len(times) == 1:
        return np.asarray(y0)[:, None]
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        np.asarray(y0, dtype=complex),
        method="RK45",
        t_eval=times,
        rtol=settings.rtol,
        atol=settings.atol,
    )
    if sol.status != 0:
        raise IntegrationError(f"integrador adaptativo falhou: {sol.message}")
    return sol.y


def _arrays(values: dict[str, list]) -> dict[str, np.ndarray]:
    return {label: np.asarray(v, dtype=float) for label, v in values.items()}


def expectation_series(result: EvolutionResult, operator: Operator | np.ndarray) -> np.ndarray:
    """
    ⟨O⟩(t) = Tr(O ρ(t)) nos tempos registrados. Exige `keep_states=True` na
    evolução e um operador hermitiano.
    """
    op = _as_matrix(result.layout, operator)
    if not is_hermitian(op, 1e-10):
        raise DomainError("expectation_series exige um operador hermitiano")
    if result.states is None:
        raise DomainError("a evolução não guardou os estados (use keep_states=True)")
    values = np.array([np.trace(op @ rho) for rho in result.states])
    residue = np.abs(values.imag).max(initial=0.0)
    if residue > IMAG_RESIDUE_LIMIT:
        raise DomainError(f"resíduo imaginário {residue:.2e} em valor esperado")
    return values.real


def closed_system_oracle(rho0: DensityMatrix, h: np.ndarray, t: float) -> np.ndarray:
    """exp(−iHt) ρ exp(+iHt) para H constante."""
    if h.shape != rho0.matrix.shape:
        raise LayoutError("Hamiltoniano e estado com dimensões diferentes")
    u = expm(-1j * t * h)
    return u @ rho0.matrix @ u.conj().T
