"""
Versões simuladas dos experimentos de calibração e os ajustes que extraem
deles χ, n̄, κ, a escala de amplitude de Rabi e a fase das sidebands.

Todos os ajustes são determinísticos: a inicialização vem do pico da FFT e de
uma regressão do logaritmo do envelope, seguida de mínimos quadrados
(Levenberg-Marquardt, `scipy.optimize.curve_fit`).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit
from scipy.signal import hilbert
from scipy.stats import linregress

from .device import DeviceParams, GateSchedule, RabiPulse, SidebandConfig, wrap_angle
from .errors import DomainError, FitError, LayoutError
from .gate import run_gate
from .hamiltonians import build_full_ham4
from .lindblad import DissipationSettings, SolverSettings, build_dissipators, evolve
from .operators import SIGMA_X, SIGMA_Z, embed_qubit_op, product_ket
from .tomography import concurrence

log = logging.getLogger(__name__)

MIN_POINTS_PER_PERIOD = 8
FLAT_TOL = 1e-9


@dataclass
class FitResult:
    """
    Estimativas, incertezas (1σ) e norma do resíduo de um ajuste.
    `converged=False` marca ajustes que não convergiram ou não identificáveis.
    """

    model: str
    params: dict[str, float]
    errors: dict[str, float] = field(default_factory=dict)
    residual: float = 0.0
    converged: bool = True
    message: str = ""

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "errors": self.errors,
            "residual": self.residual,
            "converged": self.converged,
            "message": self.message,
        }


#
# Oscilação amortecida
#
def _damped(tau, f, g, a, phi, c):
    return a * np.exp(-g * tau) * np.cos(2 * np.pi * f * tau + phi) + c


def _damped_offset(tau, f, g, a, phi, c, b):
    return _damped(tau, f, g, a, phi, c) + b * np.exp(-g * tau)


def _initial_guess(tau: np.ndarray, y: np.ndarray, trend: bool = False) -> tuple[float, float]:
    """
    Frequência pelo pico da FFT e decaimento pelo log do envelope. Com
    `trend=True` a FFT é feita sobre a derivada, que atenua o deslocamento
    lento.
    """
    uniform = np.linspace(tau[0], tau[-1], len(tau))
    yu = np.interp(uniform, tau, y)
    yu = yu - yu.mean()
    pad = 4 * len(yu)
    signal = np.gradient(yu, uniform) if trend else yu
    spectrum = np.abs(np.fft.rfft(signal - signal.mean(), n=pad))
    freqs = np.fft.rfftfreq(pad, d=uniform[1] - uniform[0])
    f0 = float(freqs[1:][np.argmax(spectrum[1:])])

    envelope = np.abs(hilbert(yu))
    core = slice(len(yu) // 10, len(yu) - len(yu) // 10 or None)
    env, tt = envelope[core], uniform[core]
    mask = env > 1e-12
    g0 = 0.0
    if mask.sum() > 2:
        g0 = max(-linregress(tt[mask], np.log(env[mask])).slope, 0.0)
    return f0, g0


def fit_damped_oscillation(
    t: Sequence[float],
    y: Sequence[float],
    decaying_offset: bool = False,
) -> FitResult:
    """
    Ajusta A·e^{−γt}cos(2πft + φ) + c (mais B·e^{−γt} com
    `decaying_offset=True`). Parâmetros devolvidos: freq (Hz), decay (1/s),
    amp, phase, offset e, se for o caso, offset_decay.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < 4:
        raise DomainError("ajuste de oscilação exige pelo menos 4 pontos")
    model = "damped_cosine+decaying_offset" if decaying_offset else "damped_cosine"
    names = ["freq", "decay", "amp", "phase", "offset"] + (["offset_decay"] if decaying_offset else [])

    if np.ptp(y) < FLAT_TOL * max(1.0, abs(y.mean())):
        params = dict.fromkeys(names, math.nan)
        params.update(amp=0.0, offset=float(y.mean()))
        return FitResult(model, params, converged=False, message="série constante: frequência não identificável")

    t0, scale = t[0], t[-1] - t[0]
    tau = (t - t0) / scale
    f0, g0 = _initial_guess(tau, y, trend=decaying_offset)
    if f0 * MIN_POINTS_PER_PERIOD > len(t):
        log.warning("amostragem com menos de %d pontos por período", MIN_POINTS_PER_PERIOD)

    env = np.exp(-g0 * tau)
    basis = [env * np.cos(2 * np.pi * f0 * tau), env * np.sin(2 * np.pi * f0 * tau), np.ones_like(tau)]
    if decaying_offset:
        basis.append(env)
    coef, *_ = np.linalg.lstsq(np.column_stack(basis), y, rcond=None)
    p0 = [f0, g0, math.hypot(coef[0], coef[1]), math.atan2(-coef[1], coef[0]), coef[2]]
    if decaying_offset:
        p0.append(coef[3])
    func = _damped_offset if decaying_offset else _damped

    converged, message = True, ""
    try:
        popt, pcov = curve_fit(func, tau, y, p0=p0, method="lm", maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        popt, pcov = np.array(p0), np.full((len(p0), len(p0)), np.inf)
        converged, message = False, str(exc)
    if not np.all(np.isfinite(popt)):
        popt, converged, message = np.array(p0), False, "parâmetros não finitos"

    f, g, a, phi = popt[:4]
    if a < 0:
        a, phi = -a, phi + math.pi
    if f < 0:
        f, phi = -f, -phi
    perr = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else np.full(len(popt), np.inf)

    values = [f / scale, g / scale, a, wrap_angle(phi), popt[4]] + ([popt[5]] if decaying_offset else [])
    errors = [perr[0] / scale, perr[1] / scale, perr[2], perr[3], perr[4]] + ([perr[5]] if decaying_offset else [])
    fitted = func(tau, *popt)
    return FitResult(
        model,
        dict(zip(names, map(float, values))),
        dict(zip(names, map(float, errors))),
        residual=float(np.linalg.norm(y - fitted)),
        converged=converged,
        message=message,
    )


#
# Chevron
#
@dataclass
class ChevronScan:
    """
    População de |+⟩ (= (1 + ⟨σ_x⟩)/2) em função da frequência de Rabi
    (linhas) e do tempo (colunas).
    """

    rabi: np.ndarray
    times: np.ndarray
    populations: np.ndarray
    sidebands: SidebandConfig

    def sigma_x(self, row: int) -> np.ndarray:
        return 2 * self.populations[row] - 1

    def to_frame(self) -> pd.DataFrame:
        rabi, times = np.meshgrid(self.rabi, self.times, indexing="ij")
        return pd.DataFrame(
            {
                "rabi_mhz": rabi.ravel() * 1e-6,
                "t_ns": times.ravel() * 1e9,
                "pop_plus": self.populations.ravel(),
            }
        )


def _single_qubit(params: DeviceParams) -> DeviceParams:
    if params.n_qubits != 1:
        raise LayoutError(f"a calibração usa um único qubit, recebi {params.n_qubits}")
    return params


def _spinlock_cut(
    params: DeviceParams,
    sidebands: SidebandConfig,
    times: np.ndarray,
    fock_dim: int,
    dissipation: DissipationSettings,
    solver: SolverSettings,
    stark_frame: bool,
    initial: str,
    rabi: float,
) -> np.ndarray:
    pulse = RabiPulse(rabi, t_r=0.0, t_sq=float(times[-1]))
    model = build_full_ham4(params, sidebands, [pulse], fock_dim=fock_dim, stark_frame=stark_frame)
    layout = model.layout
    result = evolve(
        product_ket(layout, initial),
        model,
        build_dissipators(params, layout, dissipation),
        times=times,
        settings=solver,
        observables={"sx": embed_qubit_op(layout, 0, SIGMA_X)},
    )
    return result["sx"]


def simulate_chevron(
    params: DeviceParams,
    sidebands: SidebandConfig,
    rabi_grid: Sequence[float],
    times: Sequence[float],
    fock_dim: int = 5,
    dissipation: DissipationSettings = DissipationSettings(lifetimes=False),
    solver: SolverSettings = SolverSettings(),
    mapper: Callable = map,
) -> ChevronScan:
    """
    Sequência de spinlocking: qubit em |+⟩, sidebands ligadas, acionamento de
    Rabi constante; registra ⟨σ_x⟩ para cada Ω_R da grade.
    """
    params = _single_qubit(params)
    times = np.asarray(times, dtype=float)
    cut = partial(_spinlock_cut, params, sidebands, times, fock_dim, dissipation, solver, True, "+")
    sx = np.array(list(mapper(cut, list(rabi_grid))))
    pops = np.clip((1 + sx) / 2, 0.0, 1.0)
    return ChevronScan(np.asarray(rabi_grid, dtype=float), times, pops, sidebands)


def red_resonance(sidebands: SidebandConfig) -> float:
    """Ω_R da ressonância com a sideband vermelha: Ω_SB − δ."""
    return sidebands.omega_sb - sidebands.delta


def blue_resonance(sidebands: SidebandConfig) -> float:
    return sidebands.omega_sb + sidebands.delta


def fit_chevron(scan: ChevronScan, decaying_offset: bool = True) -> list[FitResult]:
    return [fit_damped_oscillation(scan.times, scan.sigma_x(j), decaying_offset) for j in range(len(scan.rabi))]


def locate_resonance(
    params: DeviceParams,
    sidebands: SidebandConfig,
    rabi_grid: Sequence[float],
    times: Sequence[float],
    **kwargs,
) -> tuple[FitResult, ChevronScan, list[FitResult]]:
    """
    Varre Ω_R perto de uma ressonância e ajusta f² = f₀² + a(Ω − Ω₀)² às
    frequências dos cortes. f₀ = χ√n̄ é a taxa de troca no centro.
    """
    scan = simulate_chevron(params, sidebands, rabi_grid, times, **kwargs)
    fits = fit_chevron(scan)
    good = [(w, fit["freq"]) for w, fit in zip(scan.rabi, fits) if fit.converged and math.isfinite(fit["freq"])]
    if len(good) < 3:
        raise FitError("cortes do chevron insuficientes para localizar a ressonância")
    w, f = np.array(good).T
    a, b, c = np.polyfit(w, f**2, 2)
    if a <= 0:
        raise FitError("frequências do chevron sem mínimo (ajuste hiperbólico com curvatura negativa)")
    center = -b / (2 * a)
    f0_sq = c - b * b / (4 * a)
    if f0_sq <= 0:
        raise FitError("ajuste hiperbólico sem frequência mínima positiva")
    residual = float(np.linalg.norm(f**2 - np.polyval([a, b, c], w)))
    fit = FitResult(
        "hyperbola",
        {"f0": math.sqrt(f0_sq), "omega0": center, "curvature": a},
        residual=residual,
    )
    return fit, scan, fits


#
# Stark shift (Ramsey)
#
@dataclass
class StarkScan:
    nbar: np.ndarray
    shifts: np.ndarray
    fits: list[FitResult]
    line: FitResult

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"nbar": self.nbar, "stark_shift_hz": self.shifts})


def _ramsey_shift(
    params: DeviceParams,
    sidebands: SidebandConfig,
    times: np.ndarray,
    fock_dim: int,
    solver: SolverSettings,
    nbar: float,
) -> tuple[float, FitResult | None]:
    if nbar == 0:
        return 0.0, None
    sb = replace(sidebands, nbar=nbar)
    dissipation = DissipationSettings(lifetimes=False, kappa_on=False)
    sx = _spinlock_cut(params, sb, times, fock_dim, dissipation, solver, False, "+", 0.0)
    fit = fit_damped_oscillation(times, sx)
    return fit["freq"], fit


def stark_shift_scan(
    params: DeviceParams,
    sidebands: SidebandConfig,
    nbar_grid: Sequence[float],
    times: Sequence[float],
    fock_dim: int = 5,
    solver: SolverSettings = SolverSettings(),
    mapper: Callable = map,
) -> StarkScan:
    """
    Ramsey sob sidebands (sem acionamento de Rabi e sem o referencial de
    Stark): a frequência de precessão de ⟨σ_x⟩ é o deslocamento χn̄. Ajuste
    linear do deslocamento contra n̄; a inclinação é χ.
    """
    params = _single_qubit(params)
    times = np.asarray(times, dtype=float)
    point = partial(_ramsey_shift, params, sidebands, times, fock_dim, solver)
    results = list(mapper(point, list(nbar_grid)))
    shifts = np.array([r[0] for r in results])
    fits = [r[1] for r in results]
    return StarkScan(np.asarray(nbar_grid, dtype=float), shifts, fits, linear_fit(nbar_grid, shifts))


def linear_fit(x: Sequence[float], y: Sequence[float]) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3 or np.ptp(x) == 0:
        raise FitError("ajuste linear exige pelo menos 3 pontos distintos")
    res = linregress(x, y)
    return FitResult(
        "linear",
        {"slope": float(res.slope), "intercept": float(res.intercept), "r2": float(res.rvalue**2)},
        {"slope": float(res.stderr), "intercept": float(res.intercept_stderr)},
        residual=float(np.linalg.norm(y - (res.slope * x + res.intercept))),
    )


#
# χ e n̄
#
@dataclass
class ChiNbarEstimate:
    chi: float
    chi_points: np.ndarray
    nbar_points: np.ndarray
    consistent: bool
    exponents: tuple[float, float]


def extract_chi_nbar(
    powers: Sequence[float],
    chevron_freqs: Sequence[float],
    stark_shifts: Sequence[float],
    tol: float = 0.1,
) -> ChiNbarEstimate:
    """
    Resolve χ√n̄ = f(P) e χn̄ = Δ(P) ponto a ponto: χ = f²/Δ e n̄ = Δ²/f².
    As duas varreduras compartilham o eixo de potência. A escala √P de f e a
    escala linear de Δ são verificadas por regressão log-log; desvios maiores
    que `tol` marcam a estimativa como inconsistente.
    """
    p = np.asarray(powers, dtype=float)
    f = np.asarray(chevron_freqs, dtype=float)
    d = np.asarray(stark_shifts, dtype=float)
    if not (len(p) == len(f) == len(d)):
        raise DomainError("as varreduras não compartilham o eixo de potência")
    mask = (p > 0) & (f > 0) & (d > 0)
    if mask.sum() < 3:
        raise FitError("extração de χ e n̄ exige pelo menos 3 potências não nulas")
    p, f, d = p[mask], f[mask], d[mask]
    chi = f**2 / d
    nbar = d**2 / f**2
    exp_f = linregress(np.log(p), np.log(f)).slope
    exp_d = linregress(np.log(p), np.log(d)).slope
    consistent = abs(exp_f - 0.5) < tol and abs(exp_d - 1.0) < tol
    if not consistent:
        log.warning("escalas inconsistentes: f ∝ P^%.3f, Δ ∝ P^%.3f", exp_f, exp_d)
    return ChiNbarEstimate(float(chi.mean()), chi, nbar, consistent, (float(exp_f), float(exp_d)))


#
# Amplitude de Rabi
#
@dataclass
class RabiAmplitudeFit:
    """Relação linear Ω = slope·amplitude + intercept."""

    fit: FitResult

    @property
    def slope(self) -> float:
        return self.fit["slope"]

    @property
    def intercept(self) -> float:
        return self.fit["intercept"]

    def rabi_for(self, amplitude: float) -> float:
        return self.slope * amplitude + self.intercept

    def amplitude_for(self, rabi: float) -> float:
        return (rabi - self.intercept) / self.slope


def rabi_amplitude_fit(amplitudes: Sequence[float], rabi_freqs: Sequence[float]) -> RabiAmplitudeFit:
    return RabiAmplitudeFit(linear_fit(amplitudes, rabi_freqs))


def _rabi_frequency(times: np.ndarray, solver: SolverSettings, rabi: float) -> float:
    params = DeviceParams(chi=(1.0,))
    sidebands = SidebandConfig(omega_sb=1.0, delta=0.0, nbar=0.0)
    model = build_full_ham4(params, sidebands, [RabiPulse(rabi, t_sq=float(times[-1]))], fock_dim=2)
    layout = model.layout
    result = evolve(
        product_ket(layout, "g"),
        model,
        times=times,
        settings=solver,
        observables={"sz": embed_qubit_op(layout, 0, SIGMA_Z)},
    )
    return fit_damped_oscillation(times, result["sz"])["freq"]


def simulate_rabi_amplitudes(
    amplitudes: Sequence[float],
    scale: float,
    times: Sequence[float],
    solver: SolverSettings = SolverSettings(),
    mapper: Callable = map,
) -> np.ndarray:
    """
    Oscilações de Rabi simuladas (qubit em |g⟩, sem sidebands) para
    Ω = scale·amplitude; devolve a frequência ajustada de cada uma.
    """
    point = partial(_rabi_frequency, np.asarray(times, dtype=float), solver)
    return np.array(list(mapper(point, [scale * a for a in amplitudes])))


#
# Fase das sidebands
#
@dataclass
class PhaseScan:
    phases: np.ndarray
    concurrence: np.ndarray
    phi_min: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"phi_delta_0": self.phases, "concurrence": self.concurrence})


def parabolic_minimum(x: np.ndarray, y: np.ndarray, periodic: float | None = None) -> float:
    """Mínimo da parábola pelos três pontos em torno do menor valor da grade."""
    i = int(np.argmin(y))
    n = len(y)
    if periodic is None and (i == 0 or i == n - 1):
        return float(x[i])
    im, ip = (i - 1) % n, (i + 1) % n
    h = (x[ip] - x[im]) % periodic / 2 if periodic else (x[ip] - x[im]) / 2
    denom = y[im] - 2 * y[i] + y[ip]
    if denom <= 0:
        return float(x[i])
    return float(x[i] + h * (y[im] - y[ip]) / (2 * denom))


def _phase_point(schedule: GateSchedule, params: DeviceParams, kwargs: dict, phi0: float) -> float:
    sched = replace(schedule, gate_angle=None, sidebands=schedule.sidebands.with_phi_delta(phi0))
    run = run_gate(sched, params, **kwargs)
    return concurrence(run.qubits)


def sideband_phase_scan(
    schedule: GateSchedule,
    params: DeviceParams,
    phases: Sequence[float],
    mapper: Callable = map,
    **kwargs,
) -> PhaseScan:
    """
    Concorrência do estado desenrolado em função de φΔ(0), partindo de |gg⟩.
    O mínimo (refinado por parábola) é a fase que zera o ângulo efetivo.
    """
    if schedule.n_qubits != 2:
        raise LayoutError("a varredura de fase usa um gate de dois qubits")
    schedule = replace(schedule, initial="gg")
    phases = np.asarray(phases, dtype=float)
    point = partial(_phase_point, schedule, params, kwargs)
    values = np.array(list(mapper(point, list(phases))))
    if np.ptp(values) < 1e-3:
        raise FitError("varredura de fase sem contraste")
    span = phases[-1] - phases[0] + (phases[1] - phases[0])
    periodic = span if math.isclose(span, 2 * math.pi, rel_tol=1e-9) else None
    return PhaseScan(phases, values, wrap_angle(parabolic_minimum(phases, values, periodic)))


#
# Pipeline completo
#
@dataclass
class CalibrationOutcome:
    chi: tuple[float, ...]
    nbar: tuple[tuple[float, ...], ...]
    kappa: float
    kappa_input: float
    rabi_amp_slope: float
    phi_delta_zero: float | None
    consistent: bool = True
    fits: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "chi": list(self.chi),
            "nbar": [list(row) for row in self.nbar],
            "kappa": self.kappa,
            "kappa_input": self.kappa_input,
            "rabi_amp_slope": self.rabi_amp_slope,
            "phi_delta_zero": self.phi_delta_zero,
            "consistent": self.consistent,
            "fits": self.fits,
        }


def calibrate_qubit(
    params: DeviceParams,
    sidebands: SidebandConfig,
    nbar_grid: Sequence[float],
    rabi_span: float,
    rabi_points: int,
    mapper: Callable = map,
    fock_dim: int = 5,
    solver: SolverSettings = SolverSettings(),
) -> tuple[ChiNbarEstimate, float, dict]:
    """
    Calibração de um qubit: para cada potência, chevron em torno da
    ressonância vermelha (taxa f₀ e decaimento) e Ramsey (deslocamento de
    Stark). Devolve a estimativa de χ e n̄, o κ medido (1/s, o dobro do
    decaimento do chevron) e os ajustes.
    """
    center = red_resonance(sidebands)
    rabi_grid = np.linspace(center - rabi_span / 2, center + rabi_span / 2, rabi_points)
    chi_guess = params.chi[0]
    f0s, kappas, fits = [], [], {}
    for nbar in nbar_grid:
        sb = replace(sidebands, nbar=nbar)
        f_expected = chi_guess * math.sqrt(nbar)
        times = np.linspace(0, 3 / f_expected, 241)
        res, scan, cuts = locate_resonance(params, sb, rabi_grid, times, fock_dim=fock_dim, solver=solver, mapper=mapper)
        f0s.append(res["f0"])
        closest = int(np.argmin(np.abs(scan.rabi - res["omega0"])))
        kappas.append(2 * cuts[closest]["decay"])
        fits[f"chevron_nbar_{nbar:g}"] = res.as_dict()

    stark_times = np.linspace(0, 4 / (chi_guess * min(nbar_grid)), 401)
    stark = stark_shift_scan(params, sidebands, nbar_grid, stark_times, fock_dim=fock_dim, solver=solver, mapper=mapper)
    fits["stark"] = stark.line.as_dict()
    estimate = extract_chi_nbar(nbar_grid, f0s, stark.shifts)
    return estimate, float(np.mean(kappas)), fits


def calibrate(config, mapper: Callable = map, phase: bool = True) -> CalibrationOutcome:
    """
    Pipeline completo a partir de uma `StarConfig`: χ e n̄ de cada qubit do
    gate, κ pelo decaimento do chevron, escala de amplitude de Rabi e fase
    das sidebands (se `phase`).
    """
    exp = config.experiment("calibration")
    nbar_grid = exp.get("nbar", [4, 9, 16])
    rabi_span = exp.get("rabi_span", 1.5e6)
    rabi_points = exp.get("rabi_points", 9)
    schedule = config.schedule

    chis, nbars, kappas, fits, consistent = [], [], [], {}, True
    for k in schedule.qubits:
        device = config.device.select([k]).without_lifetimes()
        estimate, kappa, qubit_fits = calibrate_qubit(
            device, schedule.sidebands, nbar_grid, rabi_span, rabi_points, mapper, solver=config.solver
        )
        log.info("qubit %d: χ = %.6g Hz, κ = %.6g 1/s", k, estimate.chi, kappa)
        chis.append(estimate.chi)
        nbars.append(tuple(float(v) for v in estimate.nbar_points))
        kappas.append(kappa)
        consistent &= estimate.consistent
        fits[f"qubit_{k}"] = qubit_fits

    amplitudes = exp.get("amplitudes", [0.2, 0.4, 0.6, 0.8, 1.0])
    scale = exp.get("amplitude_scale", 40e6)
    rabi_times = np.linspace(0, 8 / (scale * min(amplitudes)), 801)
    freqs = simulate_rabi_amplitudes(amplitudes, scale, rabi_times, config.solver, mapper)
    amp_fit = rabi_amplitude_fit(amplitudes, freqs)
    fits["rabi_amplitude"] = amp_fit.fit.as_dict()

    phi_zero = None
    if phase and schedule.n_qubits == 2:
        points = exp.get("phase_points", 16)
        phases = np.linspace(-math.pi, math.pi, points, endpoint=False)
        scan = sideband_phase_scan(
            schedule,
            config.device,
            phases,
            mapper=mapper,
            fock_dim=config.fock_dim,
            dissipation=config.dissipation,
            solver=config.solver,
        )
        phi_zero = scan.phi_min
        fits["phase_scan"] = {"phases": scan.phases.tolist(), "concurrence": scan.concurrence.tolist()}

    return CalibrationOutcome(
        chi=tuple(chis),
        nbar=tuple(nbars),
        kappa=float(np.mean(kappas)),
        kappa_input=config.device.kappa,
        rabi_amp_slope=amp_fit.slope,
        phi_delta_zero=phi_zero,
        consistent=consistent,
        fits=fits,
    )
