"""
Parâmetros físicos do chip e configuração de acionamento.

Todas as frequências de configuração são frequências ordinárias (Hz), isto é,
os valores "/2π" das tabelas do dispositivo. A conversão para unidades
angulares acontece uma única vez, na construção dos Hamiltonianos.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError, LayoutError

TWO_PI = 2 * math.pi


def wrap_angle(phi: float) -> float:
    """Reduz um ângulo ao intervalo (−π, π]."""
    return math.pi - (math.pi - phi) % TWO_PI


@dataclass(frozen=True)
class DeviceParams:
    """
    Constantes do chip. Listas por qubit devem ter o mesmo tamanho; tempos de
    vida ausentes valem infinito.

    `chi` é o deslocamento dispersivo já na convenção reduzida à metade
    (χ_k := χ̃_k). `cross_kerr` guarda triplas (j, k, χ_jk).
    """

    chi: tuple[float, ...]
    kappa: float = 0.0
    t1rho: tuple[float, ...] = ()
    t2rho: tuple[float, ...] = ()
    omega_ge: tuple[float, ...] = ()
    anharm: tuple[float, ...] = ()
    omega_c: float = 0.0
    cross_kerr: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        n = len(self.chi)
        object.__setattr__(self, "chi", tuple(float(c) for c in self.chi))
        for name in ("t1rho", "t2rho"):
            values = getattr(self, name)
            if not values:
                values = (math.inf,) * n
            object.__setattr__(self, name, tuple(float(v) for v in values))
        for name in ("t1rho", "t2rho", "omega_ge", "anharm"):
            values = getattr(self, name)
            if values and len(values) != n:
                raise ConfigError(f"{name} tem {len(values)} entradas, esperava {n}")
        if n == 0:
            raise ConfigError("dispositivo sem qubits")
        if any(c <= 0 for c in self.chi):
            raise ConfigError(f"chi deve ser positivo: {self.chi}")
        if self.kappa < 0:
            raise ConfigError(f"kappa negativo: {self.kappa}")
        if any(t <= 0 for t in (*self.t1rho, *self.t2rho)):
            raise ConfigError("tempos de vida devem ser positivos")
        for j, k, _ in self.cross_kerr:
            if not (0 <= j < n and 0 <= k < n) or j == k:
                raise ConfigError(f"par de cross-Kerr inválido: ({j}, {k})")

    @property
    def n_qubits(self) -> int:
        return len(self.chi)

    def select(self, qubits: Sequence[int]) -> "DeviceParams":
        """
        Restringe o dispositivo aos qubits participantes, reindexando-os a
        partir de zero na ordem dada.
        """
        for k in qubits:
            if not 0 <= k < self.n_qubits:
                raise LayoutError(f"qubit {k} não existe no dispositivo")
        index = {q: i for i, q in enumerate(qubits)}

        def pick(values):
            return tuple(values[q] for q in qubits) if values else ()

        return replace(
            self,
            chi=pick(self.chi),
            t1rho=pick(self.t1rho),
            t2rho=pick(self.t2rho),
            omega_ge=pick(self.omega_ge),
            anharm=pick(self.anharm),
            cross_kerr=tuple(
                (index[j], index[k], v)
                for j, k, v in self.cross_kerr
                if j in index and k in index
            ),
        )

    def without_lifetimes(self) -> "DeviceParams":
        inf = (math.inf,) * self.n_qubits
        return replace(self, t1rho=inf, t2rho=inf)

    @classmethod
    def uniform(cls, n: int, chi: float, kappa: float = 0.0, **kwargs) -> "DeviceParams":
        return cls(chi=(chi,) * n, kappa=kappa, **kwargs)


@dataclass(frozen=True)
class SidebandConfig:
    """
    Tons de sideband: meia separação Ω_SB, dessintonia comum δ (com sinal;
    negativa quando os tons ficam abaixo do ressonador), número médio de fótons
    n̄ e fases dos tons vermelho e azul.
    """

    omega_sb: float
    delta: float
    nbar: float
    phi_r: float = 0.0
    phi_b: float = 0.0

    def __post_init__(self):
        if self.omega_sb <= 0:
            raise ConfigError(f"omega_sb deve ser positivo: {self.omega_sb}")
        if self.nbar < 0:
            raise ConfigError(f"nbar negativo: {self.nbar}")
        if abs(self.delta) >= self.omega_sb:
            raise ConfigError(f"|delta| = {abs(self.delta)} deve ser menor que omega_sb")

    @property
    def phi_delta(self) -> float:
        return (self.phi_b - self.phi_r) / 2

    @property
    def phi_sigma(self) -> float:
        return (self.phi_r + self.phi_b + math.pi) / 2

    def with_phi_delta(self, phi: float) -> "SidebandConfig":
        return replace(self, phi_b=self.phi_r + 2 * phi)

    def off(self) -> "SidebandConfig":
        return replace(self, nbar=0.0)


@dataclass(frozen=True)
class RabiPulse:
    """
    Pulso de Rabi com bordas em cosseno:

        A(t) = Ω(1 − cos(πt/t_r))/2   em [0, t_r]
        A(t) = Ω                      em [t_r, t_r + t_sq]
        descida espelhada             em [t_r + t_sq, t_p]
    """

    omega: float
    t_r: float = 0.0
    t_sq: float = 0.0

    def __post_init__(self):
        if self.t_r < 0 or self.t_sq < 0:
            raise ConfigError(f"durações negativas no pulso: t_r={self.t_r}, t_sq={self.t_sq}")

    @property
    def t_p(self) -> float:
        return self.t_sq + 2 * self.t_r

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        t_r, t_p = self.t_r, self.t_p
        if t_r > 0:
            up = self.omega * (1 - np.cos(np.pi * np.clip(t, 0, t_r) / t_r)) / 2
            down = self.omega * (1 - np.cos(np.pi * np.clip(t_p - t, 0, t_r) / t_r)) / 2
        else:
            up = down = np.full_like(t, self.omega)
        out = np.where(t < t_r, up, np.where(t > t_r + self.t_sq, down, self.omega))
        out = np.where((t < 0) | (t > t_p), 0.0, out)
        return out if out.ndim else float(out)

    def area(self, t) -> float:
        """
        Integral analítica ∫₀ᵗ A(s) ds (em Hz·s, ou seja, ciclos).
        """
        t = min(max(float(t), 0.0), self.t_p)
        t_r, omega = self.t_r, self.omega

        def ramp(s):
            if t_r == 0:
                return 0.0
            return omega * (s - t_r / math.pi * math.sin(math.pi * s / t_r)) / 2

        if t <= t_r:
            return ramp(t)
        if t <= t_r + self.t_sq:
            return ramp(t_r) + omega * (t - t_r)
        tail = self.t_p - t
        return 2 * ramp(t_r) + omega * self.t_sq - ramp(tail)

    def ramp_integral(self) -> float:
        return self.area(self.t_r)

    def with_timing(self, t_r: float | None = None, t_sq: float | None = None) -> "RabiPulse":
        return replace(
            self,
            t_r=self.t_r if t_r is None else t_r,
            t_sq=self.t_sq if t_sq is None else t_sq,
        )


@dataclass(frozen=True)
class GateSchedule:
    """
    Sequência completa do gate: qubits participantes, um pulso por qubit,
    sidebands e estado inicial.

    `gate_angle`, quando definido, fixa o ângulo efetivo desejado e a fase da
    sideband azul é recalculada a partir dele (calibração ideal de fase).
    """

    qubits: tuple[int, ...]
    pulses: tuple[RabiPulse, ...]
    sidebands: SidebandConfig
    initial: str = ""
    tomography: str = "ideal"
    sidebands_lead: bool = True
    renormalize_rabi: bool = True
    gate_angle: float | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.qubits:
            raise ConfigError("o gate precisa de pelo menos um qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise ConfigError(f"qubits repetidos: {self.qubits}")
        if len(self.pulses) != len(self.qubits):
            raise ConfigError(f"{len(self.pulses)} pulsos para {len(self.qubits)} qubits")
        timings = {(p.t_r, p.t_sq) for p in self.pulses}
        if len(timings) > 1:
            raise ConfigError(f"pulsos com temporização diferente: {sorted(timings)}")
        if not self.initial:
            object.__setattr__(self, "initial", "+" * len(self.qubits))

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def t_r(self) -> float:
        return self.pulses[0].t_r

    @property
    def t_sq(self) -> float:
        return self.pulses[0].t_sq

    @property
    def t_p(self) -> float:
        return self.pulses[0].t_p

    @property
    def rabi(self) -> tuple[float, ...]:
        return tuple(p.omega for p in self.pulses)

    @property
    def mean_rabi(self) -> float:
        return float(np.mean(self.rabi))

    def with_t_sq(self, t_sq: float) -> "GateSchedule":
        return replace(self, pulses=tuple(p.with_timing(t_sq=t_sq) for p in self.pulses))

    def resolved_sidebands(self) -> SidebandConfig:
        """
        Sidebands com a fase ajustada para `gate_angle` (se houver).
        """
        if self.gate_angle is None:
            return self.sidebands
        phi0 = sideband_phase_for(self.gate_angle, self.mean_rabi, self.t_r)
        return self.sidebands.with_phi_delta(phi0)

    def effective_angle(self) -> float:
        sb = self.resolved_sidebands()
        return effective_gate_angle(sb.phi_delta, self.mean_rabi, self.t_r)


#
# Grandezas derivadas
#
def gate_condition_delta(params: DeviceParams, qubits: Sequence[int], nbar: float) -> float:
    """
    Dessintonia que implementa o gate: δ = 2√n̄·χ_avg (Hz).

    χ_avg é a média aritmética dos χ_k participantes. Devolve o módulo; o
    sinal de δ na configuração das sidebands é escolha de frame.
    """
    if not qubits:
        raise DomainError("conjunto de qubits vazio")
    if nbar <= 0:
        raise DomainError(f"nbar deve ser positivo: {nbar}")
    chi_avg = float(np.mean([params.chi[k] for k in qubits]))
    return 2 * math.sqrt(nbar) * chi_avg


def gate_time(delta: float) -> float:
    """T = 1/δ com δ em Hz (equivalente a 2π/δ em unidades angulares)."""
    if delta <= 0:
        raise DomainError(f"delta deve ser positivo: {delta}")
    return 1 / delta


def effective_gate_angle(phi_delta_0: float, omega_r: float, t_r: float) -> float:
    """
    Ângulo efetivo do gate após a rampa de subida: φΔ(0) + Ω_R·t_r.

    `omega_r` é a frequência de Rabi em Hz. O termo de acionamento é
    (2πf/2)σ_x, ou seja Ω_R = πf na convenção H = Ω_R σ_x, e o resultado é
    φΔ(0) + πf·t_r reduzido a (−π, π].
    """
    return wrap_angle(phi_delta_0 + math.pi * omega_r * t_r)


def sideband_phase_for(angle: float, omega_r: float, t_r: float) -> float:
    """Inverso de `effective_gate_angle`: φΔ(0) que produz o ângulo pedido."""
    return wrap_angle(angle - math.pi * omega_r * t_r)


def delta_chi(chi: Sequence[float]) -> float:
    """Espalhamento fracionário Δχ = (max − min)/média."""
    chi = np.asarray(chi, dtype=float)
    return float((chi.max() - chi.min()) / chi.mean())


def spread_chi(chi_avg: float, dchi: float, n: int) -> tuple[float, ...]:
    """
    Realiza um espalhamento Δχ em torno de χ_avg: {χ(1−Δχ/2), χ(1+Δχ/2)} para
    dois qubits e {χ(1−Δχ/2), χ, χ(1+Δχ/2)} para três. Para n > 3 os valores
    são igualmente espaçados entre os extremos.
    """
    if dchi < 0 or dchi >= 2:
        raise DomainError(f"Δχ fora de [0, 2): {dchi}")
    if n == 1:
        return (chi_avg,)
    return tuple(float(x) for x in chi_avg * np.linspace(1 - dchi / 2, 1 + dchi / 2, n))
