"""
Leitura dos arquivos de configuração do simulador.

A gramática fica em `config.lark`. A análise é feita em duas etapas, como no
compilador do qual este módulo herdou a estrutura: o Lark produz uma árvore e o
`ConfigTransformer` a converte em um dicionário de seções com valores já em
unidades SI. Depois `build_config` valida cada seção e monta os objetos do
domínio (`DeviceParams`, `SidebandConfig`, `GateSchedule`, ...).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable

from lark import Lark, Token, Transformer, UnexpectedInput, v_args

from .device import (
    DeviceParams,
    GateSchedule,
    RabiPulse,
    SidebandConfig,
    gate_condition_delta,
    gate_time,
)
from .errors import ConfigError, StarError
from .lindblad import DissipationSettings, SolverSettings

log = logging.getLogger(__name__)

DIR = Path(__file__).parent
GRAMMAR_PATH = DIR / "config.lark"
BUNDLED_DIR = DIR / "configs"

UNITS: dict[str, tuple[float, str]] = {
    "Hz": (1.0, "freq"),
    "kHz": (1e3, "freq"),
    "MHz": (1e6, "freq"),
    "GHz": (1e9, "freq"),
    "s": (1.0, "time"),
    "ms": (1e-3, "time"),
    "us": (1e-6, "time"),
    "µs": (1e-6, "time"),
    "ns": (1e-9, "time"),
    "rad": (1.0, "angle"),
    "deg": (math.pi / 180, "angle"),
}


class Quantity(float):
    """
    Número já convertido para SI que lembra a dimensão da unidade escrita no
    arquivo (`None` quando o número veio sem unidade).
    """

    dimension: str | None

    def __new__(cls, value: float, dimension: str | None = None):
        obj = super().__new__(cls, value)
        obj.dimension = dimension
        return obj


@dataclass(frozen=True)
class Setting:
    value: Any
    token: Token | None = None


@v_args(inline=True)
class ConfigTransformer(Transformer):
    """
    Converte a árvore do Lark em `{seção: {chave: Setting}}`.
    """

    def start(self, *entries):
        sections: dict[str, dict[str, Setting]] = {}
        current: dict[str, Setting] | None = None
        for kind, key, value in entries:
            if kind == "section":
                if str(key) in sections:
                    raise ConfigError(f"seção [{key}] repetida", key)
                current = sections[str(key)] = {}
            elif current is None:
                raise ConfigError(f"atribuição de {key!r} fora de seção", key)
            elif str(key) in current:
                raise ConfigError(f"chave {key!r} repetida", key)
            else:
                current[str(key)] = Setting(value, key)
        return sections

    def section(self, name: Token):
        return ("section", name, None)

    def name(self, *keys: Token):
        return Token.new_borrow_pos("NAME", ".".join(keys), keys[0])

    def assign(self, key: Token, value):
        return ("assign", key, value)

    def quantity(self, number: Token, unit: Token | None = None):
        text = str(number)
        if unit is None:
            if text.lstrip("+-").isdigit():
                return int(text)
            return Quantity(float(text))
        scale, dimension = UNITS[str(unit)]
        return Quantity(float(text) * scale, dimension)

    def string(self, token: Token):
        return str(token)[1:-1]

    def true(self, _):
        return True

    def false(self, _):
        return False

    def list(self, *items):
        return [item for item in items if item is not None]


parser = Lark(
    GRAMMAR_PATH.open(),
    transformer=ConfigTransformer(),
    parser="lalr",
)


def parse_config(src: str) -> dict[str, dict[str, Setting]]:
    """
    Analisa o texto de uma configuração e devolve as seções cruas.
    """
    try:
        return parser.parse(src)
    except UnexpectedInput as exc:
        raise ConfigError(
            f"erro de sintaxe na linha {exc.line}, coluna {exc.column}:\n"
            f"{exc.get_context(src).rstrip()}"
        ) from exc
    except Exception as exc:
        # O Lark embrulha exceções levantadas dentro do transformer.
        cause = getattr(exc, "orig_exc", None)
        if isinstance(cause, StarError):
            raise cause from None
        raise


#
# Validação
#
def _scalar(dimension: str | None) -> Callable[[Any, Token | None], Any]:
    def check(value, token):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"esperava um número, recebi {value!r}", token)
        found = getattr(value, "dimension", None)
        if dimension and found and found != dimension:
            raise ConfigError(f"unidade de {found} onde se esperava {dimension}", token)
        return float(value)

    return check


def _integer(value, token):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"esperava um inteiro, recebi {value!r}", token)
    return value


def _boolean(value, token):
    if not isinstance(value, bool):
        raise ConfigError(f"esperava true/false, recebi {value!r}", token)
    return value


def _text(*choices: str):
    def check(value, token):
        if not isinstance(value, str):
            raise ConfigError(f"esperava uma string, recebi {value!r}", token)
        if choices and value not in choices:
            raise ConfigError(f"valor {value!r} inválido; opções: {', '.join(choices)}", token)
        return value

    return check


def _list_of(item: Callable):
    def check(value, token):
        if not isinstance(value, list):
            raise ConfigError(f"esperava uma lista, recebi {value!r}", token)
        return tuple(item(v, token) for v in value)

    return check


def _or_auto(item: Callable):
    def check(value, token):
        if value == "auto":
            return "auto"
        return item(value, token)

    return check


FREQ = _scalar("freq")
TIME = _scalar("time")
ANGLE = _scalar("angle")
NUMBER = _scalar(None)

SCHEMA: dict[str, dict[str, Callable]] = {
    "device": {"fock_dim": _integer, "omega_c": FREQ, "kappa": FREQ, "max_dim": _integer},
    "qubits": {
        "omega_ge": _list_of(FREQ),
        "chi": _list_of(FREQ),
        "anharm": _list_of(FREQ),
        "t1rho": _list_of(TIME),
        "t2rho": _list_of(TIME),
    },
    "sidebands": {
        "omega_sb": FREQ,
        "delta": _or_auto(FREQ),
        "nbar": NUMBER,
        "phi_r": ANGLE,
        "phi_b": ANGLE,
    },
    "gate": {
        "qubits": _list_of(_integer),
        "rabi": _list_of(FREQ),
        "t_r": TIME,
        "t_sq": _or_auto(TIME),
        "initial": _text(),
        "gate_angle": ANGLE,
        "sidebands_lead": _boolean,
        "renormalize_rabi": _boolean,
        "rabi_lock": _boolean,
        "tomography": _text("ideal", "none"),
    },
    "dissipation": {
        "relaxation_axis": _text("lower", "flip"),
        "dephasing_axis": _text("x", "z"),
        "lifetimes": _boolean,
        "kappa_on": _boolean,
    },
    "solver": {
        "method": _text("rk4", "rk45"),
        "steps_per_period": _integer,
        "rtol": NUMBER,
        "atol": NUMBER,
        "ket_fast_path": _boolean,
    },
}


def _section(raw: dict, name: str, required: tuple[str, ...] = ()) -> dict[str, Any]:
    entries = raw.get(name, {})
    schema = SCHEMA[name]
    out = {}
    for key, setting in entries.items():
        if key not in schema:
            raise ConfigError(f"chave desconhecida {key!r} na seção [{name}]", setting.token)
        out[key] = schema[key](setting.value, setting.token)
    missing = [key for key in required if key not in out]
    if missing:
        raise ConfigError(f"seção [{name}] sem as chaves: {', '.join(missing)}")
    return out


def _cross_kerr(raw: dict) -> tuple[tuple[int, int, float], ...]:
    out = []
    for key, setting in raw.get("cross_kerr", {}).items():
        parts = key.split("_")
        if len(parts) != 3 or parts[0] != "chi" or not all(p.isdigit() for p in parts[1:]):
            raise ConfigError(f"chave de cross-Kerr deve ter a forma chi_J_K: {key!r}", setting.token)
        out.append((int(parts[1]), int(parts[2]), FREQ(setting.value, setting.token)))
    return tuple(out)


def _experiment_value(value):
    if isinstance(value, list):
        return [_experiment_value(v) for v in value]
    if isinstance(value, Quantity):
        return float(value)
    return value


@dataclass(frozen=True)
class StarConfig:
    """
    Configuração completa carregada de um arquivo.
    """

    device: DeviceParams
    sidebands: SidebandConfig
    schedule: GateSchedule
    fock_dim: int = 10
    dissipation: DissipationSettings = field(default_factory=DissipationSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    experiments: dict[str, dict[str, Any]] = field(default_factory=dict, hash=False)
    source: Path | None = None

    def experiment(self, name: str) -> dict[str, Any]:
        return dict(self.experiments.get(name, {}))

    def echo(self) -> dict[str, Any]:
        """Resumo serializável usado no manifesto dos resultados."""
        return {
            "source": str(self.source) if self.source else None,
            "fock_dim": self.fock_dim,
            "chi": list(self.device.chi),
            "kappa": self.device.kappa,
            "t1rho": [t if math.isfinite(t) else None for t in self.device.t1rho],
            "t2rho": [t if math.isfinite(t) else None for t in self.device.t2rho],
            "omega_sb": self.sidebands.omega_sb,
            "delta": self.sidebands.delta,
            "nbar": self.sidebands.nbar,
            "qubits": list(self.schedule.qubits),
            "rabi": list(self.schedule.rabi),
            "rabi_settings": list(self.schedule.meta.get("rabi_settings", ())),
            "t_r": self.schedule.t_r,
            "t_sq": self.schedule.t_sq,
            "solver": self.solver.method,
        }


def build_config(raw: dict[str, dict[str, Setting]], source: Path | None = None) -> StarConfig:
    """
    Valida as seções cruas e constrói a configuração tipada.
    """
    for name in raw:
        if name not in SCHEMA and name != "cross_kerr" and not name.startswith("experiment."):
            raise ConfigError(f"seção desconhecida [{name}]")

    device = _section(raw, "device")
    qubits = _section(raw, "qubits", required=("chi",))
    params = DeviceParams(
        chi=qubits["chi"],
        kappa=device.get("kappa", 0.0),
        t1rho=qubits.get("t1rho", ()),
        t2rho=qubits.get("t2rho", ()),
        omega_ge=qubits.get("omega_ge", ()),
        anharm=qubits.get("anharm", ()),
        omega_c=device.get("omega_c", 0.0),
        cross_kerr=_cross_kerr(raw),
    )

    gate = _section(raw, "gate", required=("rabi",))
    gate_qubits = gate.get("qubits", tuple(range(len(gate["rabi"]))))
    for k in gate_qubits:
        if not 0 <= k < params.n_qubits:
            raise ConfigError(f"qubit {k} do gate não existe no dispositivo")

    sb = _section(raw, "sidebands", required=("omega_sb", "nbar"))
    delta = sb.get("delta", "auto")
    if delta == "auto":
        # Tons abaixo do ressonador, como no dispositivo de referência.
        delta = -gate_condition_delta(params, gate_qubits, sb["nbar"])
        log.debug("delta automático: %.6g Hz", delta)
    sidebands = SidebandConfig(
        omega_sb=sb["omega_sb"],
        delta=delta,
        nbar=sb["nbar"],
        phi_r=sb.get("phi_r", 0.0),
        phi_b=sb.get("phi_b", 0.0),
    )

    t_r = gate.get("t_r", 0.0)
    t_sq = gate.get("t_sq", "auto")
    if t_sq == "auto":
        t_sq = max(gate_time(abs(sidebands.delta)) - t_r, 0.0)
    if len(gate["rabi"]) != len(gate_qubits):
        raise ConfigError(f"{len(gate['rabi'])} amplitudes de Rabi para {len(gate_qubits)} qubits")
    rabi = gate["rabi"]
    meta = {}
    if gate.get("rabi_lock", False):
        # Cada acionamento fica no centro entre as ressonâncias vermelha e azul.
        rabi_settings = meta["rabi_settings"] = tuple(rabi)
        rabi = [sidebands.omega_sb] * len(rabi)
        log.info("Rabi travado em %.6g Hz (ajustes do equipamento %s)", sidebands.omega_sb, list(rabi_settings))
    schedule = GateSchedule(
        qubits=gate_qubits,
        pulses=tuple(RabiPulse(w, t_r=t_r, t_sq=t_sq) for w in rabi),
        sidebands=sidebands,
        initial=gate.get("initial", ""),
        tomography=gate.get("tomography", "ideal"),
        sidebands_lead=gate.get("sidebands_lead", True),
        renormalize_rabi=gate.get("renormalize_rabi", True),
        gate_angle=gate.get("gate_angle"),
        meta=meta,
    )

    diss = _section(raw, "dissipation")
    solver = _section(raw, "solver")
    fock_dim = device.get("fock_dim", 10)
    if fock_dim < 2:
        raise ConfigError(f"fock_dim deve ser pelo menos 2: {fock_dim}")

    experiments = {
        name.removeprefix("experiment."): {
            key: _experiment_value(s.value) for key, s in entries.items()
        }
        for name, entries in raw.items()
        if name.startswith("experiment.")
    }

    return StarConfig(
        device=params,
        sidebands=sidebands,
        schedule=schedule,
        fock_dim=fock_dim,
        dissipation=DissipationSettings(**diss),
        solver=SolverSettings(
            **solver, **({"max_dim": device["max_dim"]} if "max_dim" in device else {})
        ),
        experiments=experiments,
        source=source,
    )


def resolve_config_path(path: str | Path) -> Path:
    """
    Resolve o caminho de uma configuração. Se o arquivo não existe mas o nome
    coincide com uma configuração distribuída no pacote, usa a distribuída.
    """
    path = Path(path)
    if path.exists():
        return path
    for candidate in (BUNDLED_DIR / path.name, BUNDLED_DIR / f"{path.name}.cfg"):
        if candidate.exists():
            return candidate
    raise ConfigError(f"arquivo de configuração não encontrado: {path}")


def load_config(path: str | Path) -> StarConfig:
    path = resolve_config_path(path)
    log.debug("carregando configuração de %s", path)
    return build_config(parse_config(path.read_text(encoding="utf-8")), source=path)


def loads_config(src: str) -> StarConfig:
    return build_config(parse_config(src))


@lru_cache
def chip_config() -> StarConfig:
    """Configuração distribuída com os valores do chip de referência."""
    return load_config(BUNDLED_DIR / "chip-4q.cfg")
