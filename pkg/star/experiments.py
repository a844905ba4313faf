"""
Experimentos em lote: orçamento de erros, varreduras em Δχ, κ, n̄ e N e a
comparação entre acionamentos de Rabi de 30 e 60 MHz.

Cada ponto de varredura é uma simulação completa do gate descrita por um
`GatePoint` (dataclass congelada, serializável para o pool de processos). Os
resultados voltam na ordem da varredura, independente da ordem de término.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from itertools import product
from typing import Any, Callable, Iterable, Sequence

import pandas as pd

from .config import StarConfig
from .device import (
    DeviceParams,
    GateSchedule,
    RabiPulse,
    SidebandConfig,
    gate_condition_delta,
    gate_time,
    spread_chi,
)
from .errors import ConfigError
from .gate import GateRun, crossing_time, fock_dim_for, population_column, run_gate
from .lindblad import DissipationSettings, SolverSettings

log = logging.getLogger(__name__)


def parallel_map(fn: Callable, items: Iterable, jobs: int = 1) -> list:
    """
    Aplica `fn` a cada item preservando a ordem. Com `jobs <= 1` roda no
    próprio processo.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Bloco `[experiment.<nome>]` da configuração mais os parâmetros de execução.
    """

    name: str
    base: StarConfig
    settings: dict[str, Any] = field(default_factory=dict, hash=False)
    jobs: int = 1
    seed: int | None = None

    @classmethod
    def from_config(cls, config: StarConfig, name: str, jobs: int = 1, seed: int | None = None) -> "ExperimentConfig":
        return cls(name, config, config.experiment(name), jobs, seed)

    def value(self, key: str, default: Any = None) -> Any:
        value = self.settings.get(key, default)
        if value is None:
            raise ConfigError(f"[experiment.{self.name}] sem a chave {key!r}")
        return value

    def axis(self, key: str, default: Sequence | None = None) -> tuple:
        """Eixo de varredura: escalares viram listas de um elemento."""
        value = self.value(key, default)
        values = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        if not values:
            raise ConfigError(f"eixo vazio em [experiment.{self.name}]: {key}")
        return values

    @property
    def fock_dim(self) -> int:
        return int(self.settings.get("fock_dim", self.base.fock_dim))

    @property
    def auto_fock(self) -> bool:
        return bool(self.settings.get("auto_fock", True))


#
# Ponto de simulação
#
@dataclass(frozen=True)
class GatePoint:
    """
    Um gate com χ arbitrários, acionamento Ω_R = Ω_SB, δ na condição do gate
    (multiplicada por `1 + delta_error`) e duração 1/δ nominal.

    Com `auto_fock` a truncagem cresce até comportar o laço mais largo
    (`fock_dim_for`); `fock_dim` é o piso.
    """

    chi: tuple[float, ...]
    rabi: float
    nbar: float
    kappa: float = 0.0
    t1rho: tuple[float, ...] = ()
    t2rho: tuple[float, ...] = ()
    delta_error: float = 0.0
    t_r: float = 0.0
    initial: str = ""
    fock_dim: int = 10
    auto_fock: bool = True
    dissipation: DissipationSettings = DissipationSettings()
    solver: SolverSettings = SolverSettings()

    def schedule(self) -> tuple[GateSchedule, DeviceParams]:
        n = len(self.chi)
        device = DeviceParams(chi=self.chi, kappa=self.kappa, t1rho=self.t1rho, t2rho=self.t2rho)
        delta = gate_condition_delta(device, range(n), self.nbar)
        sidebands = SidebandConfig(omega_sb=self.rabi, delta=-delta * (1 + self.delta_error), nbar=self.nbar)
        t_sq = max(gate_time(delta) - self.t_r, 0.0)
        schedule = GateSchedule(
            qubits=tuple(range(n)),
            pulses=tuple(RabiPulse(self.rabi, t_r=self.t_r, t_sq=t_sq) for _ in range(n)),
            sidebands=sidebands,
            initial=self.initial,
            gate_angle=0.0,
        )
        return schedule, device

    def resolved_fock_dim(self) -> int:
        if not self.auto_fock:
            return self.fock_dim
        schedule, device = self.schedule()
        return max(self.fock_dim, fock_dim_for(device, schedule.sidebands))

    def run(self) -> GateRun:
        schedule, device = self.schedule()
        return run_gate(
            schedule,
            device,
            fock_dim=self.resolved_fock_dim(),
            dissipation=self.dissipation,
            solver=self.solver,
            records=11,
        )


def gate_fidelity(point: GatePoint) -> tuple[float, bool]:
    """Fidelidade do ponto e se a evolução respeitou os limites de higiene."""
    run = point.run()
    if not run.evolution.valid:
        log.warning("ponto %s fora dos limites de higiene: %s", point, "; ".join(run.evolution.hygiene.problems()))
    return run.fidelity, run.evolution.valid


def _sweep(exp: ExperimentConfig, points: list[GatePoint], axes: list[dict]) -> pd.DataFrame:
    log.info("%s: %d pontos, %d processos", exp.name, len(points), exp.jobs)
    results = parallel_map(gate_fidelity, points, exp.jobs)
    return pd.DataFrame([{**ax, "fidelity": f, "hygiene_ok": ok} for ax, (f, ok) in zip(axes, results)])


#
# Orçamento de erros
#
ERROR_TERMS = ("rabi", "kappa", "dchi", "lifetimes", "delta_miscal")

TERM_LABELS = {
    "rabi": "Ω_R finito",
    "kappa": "κ",
    "dchi": "Δχ do chip",
    "lifetimes": "tempos de vida",
    "delta_miscal": "δ descalibrado",
}

# Infidelidades acumuladas publicadas, para comparação lado a lado.
REFERENCE_BUDGET = {
    "rabi": {2: 0.0014, 3: 0.0027},
    "kappa": {2: 0.017, 3: 0.019},
    "dchi": {2: 0.0214, 3: 0.068},
    "lifetimes": {2: 0.027, 3: 0.075},
    "delta_miscal": {2: 0.04, 3: 0.11},
}


@dataclass
class ErrorBudgetRow:
    term: str
    infidelity: dict[int, float]
    cumulative: bool = True
    reference: dict[int, float] = field(default_factory=dict)
    hygiene_ok: bool = True

    def __post_init__(self):
        for n, value in self.infidelity.items():
            # Pequenas violações vêm do arredondamento da fidelidade.
            self.infidelity[n] = min(max(value, 0.0), 1.0)

    @property
    def label(self) -> str:
        return TERM_LABELS.get(self.term, self.term)

    def record(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "term": self.term,
            "label": self.label,
            "cumulative": self.cumulative,
            "hygiene_ok": self.hygiene_ok,
        }
        for n in sorted(self.infidelity):
            out[f"infidelity_{n}q"] = self.infidelity[n]
        for n in sorted(self.reference):
            out[f"reference_{n}q"] = self.reference[n]
        return out


def budget_points(config: StarConfig, n: int, settings: dict[str, Any]) -> list[GatePoint]:
    """
    Pontos cumulativos do orçamento para `n` qubits do chip (os primeiros `n`):
    cada termo mantém os anteriores ligados.
    """
    if n > config.device.n_qubits:
        raise ConfigError(f"o chip tem {config.device.n_qubits} qubits, o orçamento pediu {n}")
    chip = config.device.select(range(n))
    chi_avg = sum(chip.chi) / n
    base = GatePoint(
        chi=(chi_avg,) * n,
        rabi=settings.get("rabi", 30e6),
        nbar=settings.get("nbar", config.sidebands.nbar),
        fock_dim=settings.get("fock_dim", config.fock_dim),
        auto_fock=settings.get("auto_fock", True),
        dissipation=DissipationSettings(
            relaxation_axis=config.dissipation.relaxation_axis,
            dephasing_axis=config.dissipation.dephasing_axis,
        ),
        solver=config.solver,
    )
    with_kappa = replace(base, kappa=settings.get("kappa", config.device.kappa))
    with_dchi = replace(with_kappa, chi=chip.chi)
    with_lifetimes = replace(with_dchi, t1rho=chip.t1rho, t2rho=chip.t2rho)
    miscal = replace(with_lifetimes, delta_error=settings.get("delta_miscal", 0.1))
    return [base, with_kappa, with_dchi, with_lifetimes, miscal]


def error_budget(config: StarConfig, jobs: int = 1) -> list[ErrorBudgetRow]:
    """
    Infidelidade acumulada do gate ao ligar, em ordem, Ω_R finito, κ, Δχ,
    tempos de vida e a descalibração de δ. A referência é o gate ideal.
    """
    exp = ExperimentConfig.from_config(config, "error_budget", jobs)
    counts = [int(n) for n in exp.axis("qubit_counts", [2, 3])]
    points, keys = [], []
    for n in counts:
        for term, point in zip(ERROR_TERMS, budget_points(config, n, exp.settings)):
            points.append(point)
            keys.append((term, n))
    log.info("orçamento de erros: %d simulações", len(points))
    results = dict(zip(keys, parallel_map(gate_fidelity, points, jobs)))
    return [
        ErrorBudgetRow(
            term,
            {n: 1 - results[term, n][0] for n in counts},
            reference={n: REFERENCE_BUDGET[term][n] for n in counts if n in REFERENCE_BUDGET[term]},
            hygiene_ok=all(results[term, n][1] for n in counts),
        )
        for term in ERROR_TERMS
    ]


def budget_frame(rows: Sequence[ErrorBudgetRow]) -> pd.DataFrame:
    return pd.DataFrame([row.record() for row in rows])


#
# Varreduras
#
def _ideal_point(exp: ExperimentConfig, **kwargs) -> GatePoint:
    config = exp.base
    return GatePoint(
        rabi=exp.value("rabi", 30e6),
        nbar=exp.value("nbar", config.sidebands.nbar),
        fock_dim=exp.fock_dim,
        auto_fock=exp.auto_fock,
        dissipation=DissipationSettings(lifetimes=False),
        solver=config.solver,
        **kwargs,
    )


def sweep_dchi_kappa(config: StarConfig, jobs: int = 1) -> pd.DataFrame:
    """
    Fidelidade contra Δχ para cada N e κ, com χ médio fixo e tempos de vida
    infinitos. Colunas: n_qubits, kappa_hz, dchi, fidelity, hygiene_ok.
    """
    exp = ExperimentConfig.from_config(config, "dchi_kappa", jobs)
    chi_avg = exp.value("chi_avg", 500e3)
    points, axes = [], []
    for n, kappa, dchi in product(exp.axis("qubit_counts", [2, 3]), exp.axis("kappa"), exp.axis("dchi")):
        n = int(n)
        points.append(_ideal_point(exp, chi=spread_chi(chi_avg, dchi, n), kappa=kappa))
        axes.append({"n_qubits": n, "kappa_hz": kappa, "dchi": dchi})
    return _sweep(exp, points, axes)


def sweep_nbar(config: StarConfig, jobs: int = 1) -> pd.DataFrame:
    """
    Fidelidade do gate de dois qubits contra n̄ para cada κ. O tempo de gate
    acompanha 1/δ = 1/(2√n̄χ). Colunas: kappa_hz, nbar, fidelity, hygiene_ok.
    """
    exp = ExperimentConfig.from_config(config, "nbar", jobs)
    chi = exp.value("chi", 500e3)
    points, axes = [], []
    for kappa, nbar in product(exp.axis("kappa"), exp.axis("nbar")):
        if nbar <= 0:
            raise ConfigError(f"n̄ deve ser positivo na varredura: {nbar}")
        points.append(replace(_ideal_point(exp, chi=(chi, chi), kappa=kappa), nbar=nbar))
        axes.append({"kappa_hz": kappa, "nbar": nbar})
    return _sweep(exp, points, axes)


def scaling_with_N(config: StarConfig, jobs: int = 1) -> pd.DataFrame:
    """
    Fidelidade contra o número de qubits para cada κ, com χ iguais e
    acionamento rápido. Tempos de vida infinitos: o regime é dominado por κ.
    Colunas: n_qubits, kappa_hz, fidelity, hygiene_ok.
    """
    exp = ExperimentConfig.from_config(config, "scaling", jobs)
    chi = exp.value("chi", 1e6)
    points, axes = [], []
    for kappa, n in product(exp.axis("kappa"), exp.axis("qubit_counts", [2, 3, 4])):
        n = int(n)
        points.append(_ideal_point(exp, chi=(chi,) * n, kappa=kappa))
        axes.append({"n_qubits": n, "kappa_hz": kappa})
    return _sweep(exp, points, axes)


#
# 30 MHz contra 60 MHz
#
@dataclass
class RabiComparison:
    traces: pd.DataFrame
    summary: pd.DataFrame
    runs: dict[float, GateRun] = field(default_factory=dict, repr=False)


def _comparison_schedule(config: StarConfig, rabi: float, initial: str, window: float) -> GateSchedule:
    schedule = config.schedule
    sidebands = replace(schedule.sidebands, omega_sb=rabi)
    pulses = tuple(RabiPulse(rabi, t_r=p.t_r, t_sq=window) for p in schedule.pulses)
    return replace(schedule, pulses=pulses, sidebands=sidebands, initial=initial)


def _trace_run(config: StarConfig, initial: str, window: float, records: int, rabi: float) -> GateRun:
    return run_gate(
        _comparison_schedule(config, rabi, initial, window),
        config.device,
        fock_dim=config.fock_dim,
        dissipation=config.dissipation,
        solver=config.solver,
        records=records,
    )


def rabi_30_vs_60(config: StarConfig, jobs: int = 1, records: int = 301) -> RabiComparison:
    """
    Mesma sequência do gate (qubits do chip, rampas, sidebands) com Ω_R = Ω_SB
    em cada valor da lista, a partir de |−−⟩. Registra as populações ± ao
    longo de uma janela de 1.5 tempo de gate e, para cada Ω_R, o cruzamento
    |++⟩/|−−⟩ e a fidelidade de um gate encerrado nesse instante.
    """
    exp = ExperimentConfig.from_config(config, "compare_rabi", jobs)
    rabis = exp.axis("rabi", [30e6, 60e6])
    initial = exp.value("initial", "-" * config.schedule.n_qubits)
    window = 1.5 * gate_time(abs(config.sidebands.delta))
    runs = dict(zip(rabis, parallel_map(partial(_trace_run, config, initial, window, records), rabis, jobs)))

    pp = population_column("+" * len(initial))
    mm = population_column("-" * len(initial))
    frames, crossings = [], {}
    for rabi, run in runs.items():
        frame = run.evolution.to_frame()
        frame.insert(0, "rabi_mhz", rabi * 1e-6)
        frames.append(frame)
        crossings[rabi] = crossing_time(frame["t_ns"].to_numpy() * 1e-9, frame[pp], frame[mm])

    finals = [
        _trace_point(config, initial, rabi, crossings[rabi])
        for rabi in rabis
        if crossings[rabi] is not None
    ]
    fids = dict(zip([r for r in rabis if crossings[r] is not None], parallel_map(_final_fidelity, finals, jobs)))
    summary = pd.DataFrame(
        [
            {
                "rabi_mhz": rabi * 1e-6,
                "crossing_ns": crossings[rabi] * 1e9 if crossings[rabi] is not None else math.nan,
                "fidelity": fids.get(rabi, math.nan),
            }
            for rabi in rabis
        ]
    )
    return RabiComparison(pd.concat(frames, ignore_index=True), summary, runs)


@dataclass(frozen=True)
class _FinalPoint:
    config: StarConfig
    schedule: GateSchedule


def _trace_point(config: StarConfig, initial: str, rabi: float, t_cross: float) -> _FinalPoint:
    schedule = _comparison_schedule(config, rabi, initial, 0.0)
    return _FinalPoint(config, schedule.with_t_sq(max(t_cross - schedule.t_r, 0.0)))


def _final_fidelity(point: _FinalPoint) -> float:
    config = point.config
    return run_gate(
        point.schedule,
        config.device,
        fock_dim=config.fock_dim,
        dissipation=config.dissipation,
        solver=config.solver,
        records=11,
    ).fidelity
