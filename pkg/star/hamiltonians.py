"""
Hamiltonianos do sistema qubits + ressonador.

Três formas são construídas:

* `build_dispersive`: referencial dispersivo com os dois tons de sideband
  acionando o ressonador explicitamente.
* `build_ms_ideal`: Hamiltoniano efetivo independente do tempo, alvo das
  comparações (oscilador de frequência δ acoplado a J_φ).
* `build_full_ham4`: referencial deslocado, com envelopes de Rabi e todos os
  termos dependentes do tempo; é o que o integrador usa no gate.

Internamente tudo está em unidades angulares (rad/s). Os construtores recebem
frequências em Hz e multiplicam por 2π uma única vez.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .device import TWO_PI, DeviceParams, RabiPulse, SidebandConfig
from .errors import LayoutError
from .operators import (
    SIGMA_X,
    SIGMA_Z,
    HilbertLayout,
    Operator,
    annihilation,
    embed_qubit_op,
    is_hermitian,
    number,
    sigma_phi,
)

log = logging.getLogger(__name__)

Coefficient = Callable[[float], complex]


def angular(f: float) -> float:
    return TWO_PI * f


@dataclass(frozen=True)
class ClassicalField:
    """
    Amplitude clássica do campo dos dois tons no referencial deslocado.

    Na forma RWA α(t) = √n̄·cos(Ω_SB t + φΔ), real. Com `pre_rwa=True` as fases
    individuais dos tons são mantidas: α(t) = √n̄·e^{i(φΣ − π/2)}·cos(Ω_SB t + φΔ).
    A fase global e^{i(φΣ − π/2)} é a que a rotação de referencial elimina.
    """

    sidebands: SidebandConfig
    pre_rwa: bool = False

    @property
    def bound(self) -> float:
        return math.sqrt(2 * self.sidebands.nbar)

    def alpha(self, t: float) -> complex:
        sb = self.sidebands
        value = math.sqrt(sb.nbar) * math.cos(angular(sb.omega_sb) * t + sb.phi_delta)
        if self.pre_rwa:
            return value * complex(np.exp(1j * (sb.phi_sigma - math.pi / 2)))
        return complex(value)


@dataclass(frozen=True)
class HamiltonianModel:
    """
    H(t) = static + Σ_j c_j(t)·O_j.

    Os coeficientes podem ser complexos; a hermiticidade da soma é garantida
    pelos construtores, que sempre incluem os pares conjugados.
    """

    kind: str
    layout: HilbertLayout
    static: np.ndarray
    terms: tuple[tuple[np.ndarray, Coefficient], ...] = ()
    params: DeviceParams | None = None
    sidebands: SidebandConfig | None = None
    envelopes: tuple[RabiPulse, ...] = ()
    drive_frequencies: tuple[float, ...] = field(default=())

    def __post_init__(self):
        self.layout.check_matrix(self.static)
        for op, _ in self.terms:
            self.layout.check_matrix(op)

    def __call__(self, t: float) -> np.ndarray:
        h = self.static.copy()
        for op, coef in self.terms:
            c = coef(t)
            if c != 0:
                h += c * op
        return h

    def at(self, t: float) -> Operator:
        return Operator(self.layout, self(t), hermitian=True)

    @property
    def is_static(self) -> bool:
        return not self.terms

    def max_frequency(self, t_sample: float = 0.0) -> float:
        """
        Maior frequência relevante (Hz): a maior frequência de acionamento ou o
        espalhamento do espectro de H(t_sample)/2π.
        """
        spread = np.ptp(np.linalg.eigvalsh(self(t_sample))) / TWO_PI
        return float(max(spread, *self.drive_frequencies, 0.0))

    def check_hermitian(self, times: Sequence[float], tol: float = 1e-10) -> bool:
        return all(is_hermitian(self(t), tol) for t in times)


#
# Peças comuns
#
def _z_coupling(layout: HilbertLayout, params: DeviceParams) -> np.ndarray:
    """Σ_k χ_k σ_z,k (angular), identidade no ressonador."""
    out = np.zeros((layout.dim, layout.dim), dtype=complex)
    for k, chi in enumerate(params.chi):
        out += angular(chi) * embed_qubit_op(layout, k, SIGMA_Z).matrix
    return out


def _cross_kerr(layout: HilbertLayout, params: DeviceParams) -> np.ndarray:
    out = np.zeros((layout.dim, layout.dim), dtype=complex)
    for j, k, chi_jk in params.cross_kerr:
        zj = embed_qubit_op(layout, j, SIGMA_Z).matrix
        zk = embed_qubit_op(layout, k, SIGMA_Z).matrix
        out += angular(chi_jk) * zj @ zk
    return out


def _rabi_terms(layout: HilbertLayout, envelopes: Sequence[RabiPulse]):
    terms = []
    for k, pulse in enumerate(envelopes):
        sx = embed_qubit_op(layout, k, SIGMA_X).matrix
        terms.append((sx / 2, _envelope_coefficient(pulse)))
    return terms


def _envelope_coefficient(pulse: RabiPulse) -> Coefficient:
    def coef(t: float) -> complex:
        return angular(pulse.envelope(t))

    return coef


def _check_params(layout: HilbertLayout, params: DeviceParams, envelopes: Sequence[RabiPulse]):
    if params.n_qubits != layout.n_qubits:
        raise LayoutError(
            f"parâmetros com {params.n_qubits} qubits em layout com {layout.n_qubits}"
        )
    if envelopes and len(envelopes) != layout.n_qubits:
        raise LayoutError(f"{len(envelopes)} envelopes para {layout.n_qubits} qubits")


def layout_for(params: DeviceParams, fock_dim: int = 10) -> HilbertLayout:
    return HilbertLayout(params.n_qubits, fock_dim)


#
# Construtores
#
def build_dispersive(
    params: DeviceParams,
    sidebands: SidebandConfig,
    envelopes: Sequence[RabiPulse] = (),
    fock_dim: int = 10,
) -> HamiltonianModel:
    """
    H(t) = −δ a†a + Σ_k [(Ω_k(t)/2)σ_x,k − χ_k σ_z,k a†a] + ε(t)a† + ε*(t)a.

    O acionamento ε(t) = (√n̄/2)[(Ω_SB+δ)e^{−i(Ω_SB t+φΔ)} + (δ−Ω_SB)e^{i(Ω_SB t+φΔ)}]
    tem como resposta estacionária o campo √n̄·cos(Ω_SB t + φΔ) do referencial
    deslocado. A simulação começa no estado coerente α(0) (veja
    `dispersive_initial_field`).
    """
    layout = layout_for(params, fock_dim)
    _check_params(layout, params, envelopes)
    a = annihilation(layout).matrix
    n = number(layout).matrix
    z = _z_coupling(layout, params)
    delta = angular(sidebands.delta)
    w = angular(sidebands.omega_sb)
    amp = math.sqrt(sidebands.nbar) / 2
    phi = sidebands.phi_delta

    def eps(t: float) -> complex:
        return amp * (
            (w + delta) * np.exp(-1j * (w * t + phi)) + (delta - w) * np.exp(1j * (w * t + phi))
        )

    terms = _rabi_terms(layout, envelopes)
    if sidebands.nbar > 0:
        terms += [(a.conj().T, eps), (a, lambda t: np.conj(eps(t)))]
    return HamiltonianModel(
        kind="dispersive",
        layout=layout,
        static=-delta * n - z @ n + _cross_kerr(layout, params),
        terms=tuple(terms),
        params=params,
        sidebands=sidebands,
        envelopes=tuple(envelopes),
        drive_frequencies=(sidebands.omega_sb, *(p.omega for p in envelopes)),
    )


def dispersive_initial_field(sidebands: SidebandConfig) -> complex:
    return ClassicalField(sidebands).alpha(0.0)


def build_ms_ideal(
    params: DeviceParams,
    sidebands: SidebandConfig,
    phi: float | None = None,
    fock_dim: int = 10,
) -> HamiltonianModel:
    """
    H = −δ d†d − √n̄ Σ_k χ_k (σ_φ,k/2)(d + d†).

    Para χ_k iguais isto é −δ d†d − √n̄ χ J_φ (d + d†), que fecha o laço no
    espaço de fase em t = 1/|δ| quando |δ| = 2√n̄χ. `phi` é o ângulo efetivo do
    gate (padrão: φΔ das sidebands).
    """
    layout = layout_for(params, fock_dim)
    phi = sidebands.phi_delta if phi is None else phi
    a = annihilation(layout).matrix
    x = a + a.conj().T
    spin = np.zeros((layout.dim, layout.dim), dtype=complex)
    for k, chi in enumerate(params.chi):
        spin += angular(chi) * embed_qubit_op(layout, k, sigma_phi(phi) / 2).matrix
    h = -angular(sidebands.delta) * number(layout).matrix
    h -= math.sqrt(sidebands.nbar) * spin @ x
    return HamiltonianModel(
        kind="ms_ideal",
        layout=layout,
        static=h,
        params=params,
        sidebands=sidebands,
    )


def build_full_ham4(
    params: DeviceParams,
    sidebands: SidebandConfig,
    envelopes: Sequence[RabiPulse] = (),
    fock_dim: int = 10,
    stark_frame: bool = True,
    cross_kerr: bool = False,
    pre_rwa: bool = False,
) -> HamiltonianModel:
    """
    Hamiltoniano no referencial deslocado:

        H(t) = −δ d†d + Σ_k (Ω_k(t)/2) σ_x,k
               − [d†d + α(t) d† + α*(t) d + |α(t)|²] Σ_k χ_k σ_z,k
               (+ Σ χ_jk σ_z,j σ_z,k)

    com α(t) dado por `ClassicalField`. Com `stark_frame=True` o valor médio
    n̄/2 de |α|² é removido (sidebands ligadas antes da preparação), restando a
    parte (n̄/2)cos(2Ω_SB t + 2φΔ).
    """
    layout = layout_for(params, fock_dim)
    _check_params(layout, params, envelopes)
    a = annihilation(layout).matrix
    n = number(layout).matrix
    z = _z_coupling(layout, params)
    field_ = ClassicalField(sidebands, pre_rwa=pre_rwa)
    offset = sidebands.nbar / 2 if stark_frame else 0.0

    static = -angular(sidebands.delta) * n - z @ n
    if cross_kerr:
        static = static + _cross_kerr(layout, params)

    terms = _rabi_terms(layout, envelopes)
    if sidebands.nbar > 0:
        zad = z @ a.conj().T
        za = z @ a
        terms += [
            (zad, lambda t: -field_.alpha(t)),
            (za, lambda t: -np.conj(field_.alpha(t))),
            (z, lambda t: -(abs(field_.alpha(t)) ** 2 - offset)),
        ]
    return HamiltonianModel(
        kind="full_ham4",
        layout=layout,
        static=static,
        terms=tuple(terms),
        params=params,
        sidebands=sidebands,
        envelopes=tuple(envelopes),
        drive_frequencies=(2 * sidebands.omega_sb, *(p.omega for p in envelopes)),
    )


#
# Renormalização da frequência de Rabi
#
def _floquet_splitting(rabi: float, chi: float, sidebands: SidebandConfig, slices: int) -> float:
    """
    Separação de quase-energia (Hz) do qubit isolado sob
    (Ω/2)σ_x − (n̄/2)χ cos(2Ω_SB t + 2φΔ) σ_z, de período 1/(2 Ω_SB).
    """
    period = 1 / (2 * sidebands.omega_sb)
    dt = period / slices
    w = angular(rabi)
    g = angular(chi) * sidebands.nbar / 2
    u = np.eye(2, dtype=complex)
    for j in range(slices):
        t = (j + 0.5) * dt
        h = w / 2 * SIGMA_X - g * math.cos(2 * angular(sidebands.omega_sb) * t + 2 * sidebands.phi_delta) * SIGMA_Z
        vals, vecs = np.linalg.eigh(h)
        u = (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T @ u

    vals, vecs = np.linalg.eig(u)
    quasi = -np.angle(vals) / period
    plus = np.array([1, 1]) / math.sqrt(2)
    i_plus = int(np.argmax(np.abs(vecs.conj().T @ plus)))
    i_minus = 1 - i_plus
    zone = TWO_PI / period

    def near(value, target):
        return value + zone * np.round((target - value) / zone)

    e_plus = near(quasi[i_plus], w / 2)
    e_minus = near(quasi[i_minus], -w / 2)
    return float((e_plus - e_minus) / TWO_PI)


def renormalized_rabi(
    params: DeviceParams,
    sidebands: SidebandConfig,
    rabi: Sequence[float] | None = None,
    slices: int = 400,
) -> tuple[float, ...]:
    """
    Deslocamento (Hz) da separação de Rabi efetiva de cada qubit causado pelo
    termo de escala χn̄ que oscila a 2Ω_SB.

    O deslocamento é obtido numericamente pela quase-energia de Floquet do
    qubit isolado. Com `rabi` ausente usa-se Ω_k = Ω_SB.
    """
    if rabi is None:
        rabi = (sidebands.omega_sb,) * params.n_qubits
    if sidebands.nbar == 0:
        return (0.0,) * params.n_qubits
    return tuple(
        _floquet_splitting(w, chi, sidebands, slices) - w for w, chi in zip(rabi, params.chi)
    )
