"""
Interface de linha de comando do simulador.

Cada sub-comando carrega uma configuração, roda um experimento e grava as
tabelas e o manifesto em `--out`. Códigos de saída: 0 em sucesso, 2 para erro
de configuração ou de uso, 3 para violações numéricas (higiene, recursos,
integrador).
"""

import argparse
from functools import partial

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from . import __version__
from .calibration import calibrate
from .config import StarConfig, load_config
from .errors import HygieneError, StarError
from .experiments import (
    budget_frame,
    error_budget,
    parallel_map,
    rabi_30_vs_60,
    scaling_with_N,
    sweep_dchi_kappa,
    sweep_nbar,
)
from .gate import crossing_time, gate_channel, gate_populations, ideal_gate_unitary, population_column, run_gate
from .log import setup_logging
from .output import ResultWriter, density_matrix_json
from .tomography import (
    bell_fidelity_optimized,
    concurrence,
    process_fidelity,
    process_tomography,
    ptm_of_unitary,
    state_fidelity,
    state_tomography,
)

console = Console()


def make_argparser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        default="chip-4q",
        help="Arquivo de configuração (ou nome de uma configuração distribuída).",
    )
    common.add_argument("-o", "--out", default="results", help="Pasta de saída.")
    common.add_argument("-j", "--jobs", type=int, default=1, help="Processos para as varreduras.")
    common.add_argument("--seed", type=int, default=None, help="Semente da amostragem de shots.")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="Formato das tabelas.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Mais mensagens (repetível).")
    common.add_argument("-q", "--quiet", action="store_true", help="Só mostra erros.")

    parser = argparse.ArgumentParser(prog="star", description="Simulador do gate STAR")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMANDO")

    gate = sub.add_parser("simulate-gate", parents=[common], help="Simula o gate da configuração.")
    gate.add_argument(
        "--scan",
        type=int,
        default=0,
        help="Número de pontos de uma varredura de t_sq (0 desliga).",
    )
    sub.add_parser("calibrate", parents=[common], help="Calibração simulada de χ, n̄, κ e fases.")
    tomo = sub.add_parser("tomography", parents=[common], help="Tomografia de estado do gate.")
    tomo.add_argument("--shots", type=int, default=None, help="Shots por string de Pauli (0 = exato).")
    qpt = sub.add_parser("qpt", parents=[common], help="Tomografia de processo do gate.")
    qpt.add_argument("--shots", type=int, default=None, help="Shots por string de Pauli (0 = exato).")
    sub.add_parser("error-budget", parents=[common], help="Orçamento de erros acumulado.")
    sweep = sub.add_parser("sweep", parents=[common], help="Varreduras de fidelidade.")
    sweep.add_argument("--kind", choices=("dchi-kappa", "nbar"), required=True)
    sub.add_parser("scaling", parents=[common], help="Fidelidade contra o número de qubits.")
    sub.add_parser("compare-rabi", parents=[common], help="Acionamentos de Rabi de 30 e 60 MHz.")
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Ponto de entrada da CLI; devolve o código de saída.
    """
    parser = make_argparser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    setup_logging(-1 if args.quiet else args.verbose)

    try:
        config = load_config(args.config)
        writer = ResultWriter(args.out, args.format)
        HANDLERS[args.command](config, writer, args)
        writer.manifest(args.command, config.echo(), args.seed, __version__)
    except StarError as exc:
        console.print(f"[bold red]{type(exc).__name__}:[/] {exc}", highlight=False)
        return exc.exit_code
    return 0


def _mapper(args):
    return lambda fn, items: parallel_map(fn, items, args.jobs)


def _run_kwargs(config: StarConfig, **extra) -> dict:
    return {
        "fock_dim": config.fock_dim,
        "dissipation": config.dissipation,
        "solver": config.solver,
        **extra,
    }


def _show(title: str, frame: pd.DataFrame):
    table = Table(title=title)
    for col in frame.columns:
        table.add_column(str(col))
    for row in frame.itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)


def _require_hygiene(name: str, frame: pd.DataFrame):
    """
    As tabelas já foram gravadas; pontos fora dos limites de higiene viram
    código de saída 3.
    """
    bad = int((~frame["hygiene_ok"].astype(bool)).sum())
    if bad:
        raise HygieneError(f"{name}: {bad} de {len(frame)} pontos fora dos limites de higiene")


def cmd_simulate_gate(config: StarConfig, writer: ResultWriter, args):
    schedule = config.schedule
    run = run_gate(schedule, config.device, **_run_kwargs(config, strict=True))
    writer.table("populations", run.evolution.to_frame())
    writer.json("gate", run.record())
    console.print(f"fidelidade do gate: [bold]{run.fidelity:.6f}[/]")

    if args.scan:
        t_max = 1.5 * (schedule.t_sq + schedule.t_r)
        grid = np.linspace(0.0, t_max, args.scan)
        frame = gate_populations(schedule, config.device, grid, mapper=_mapper(args), **_run_kwargs(config))
        writer.table("populations_vs_tsq", frame)
        n = schedule.n_qubits
        pp, mm = population_column("+" * n), population_column("-" * n)
        if pp in frame and mm in frame:
            t_cross = crossing_time(frame["t_sq_ns"], frame[pp], frame[mm])
            if t_cross is not None:
                console.print(f"cruzamento {pp}/{mm} em t_sq = {t_cross:.1f} ns")


def cmd_calibrate(config: StarConfig, writer: ResultWriter, args):
    outcome = calibrate(config, mapper=_mapper(args))
    writer.json("calibration", outcome.as_dict())
    console.print(f"χ (Hz): {', '.join(f'{c:.6g}' for c in outcome.chi)}")
    console.print(f"κ medido: {outcome.kappa:.6g} Hz (entrada {outcome.kappa_input:.6g} Hz)")


def _shots(config: StarConfig, args) -> int:
    if args.shots is not None:
        return args.shots
    return int(config.experiment("tomography").get("shots", 0))


def cmd_tomography(config: StarConfig, writer: ResultWriter, args):
    run = run_gate(config.schedule, config.device, **_run_kwargs(config, strict=True))
    result = state_tomography(run.qubits, shots=_shots(config, args), rng=args.seed)
    writer.table("pauli_expectations", result.to_frame())
    summary = {
        "fidelity": run.fidelity,
        "tomography_fidelity": state_fidelity(result.state, run.ideal),
        "projection_distance": result.projection_distance,
        "state": density_matrix_json(result.state),
    }
    if config.schedule.n_qubits == 2:
        fid, angles = bell_fidelity_optimized(result.state, run.ideal)
        summary.update(concurrence=concurrence(result.state), bell_fidelity=fid, local_angles=list(angles))
    writer.json("tomography", summary)
    console.print(f"fidelidade reconstruída: [bold]{summary['tomography_fidelity']:.6f}[/]")


def cmd_qpt(config: StarConfig, writer: ResultWriter, args):
    schedule = config.schedule
    n = schedule.n_qubits
    channel = partial(gate_channel, schedule, config.device, _run_kwargs(config))
    ptm = process_tomography(channel, n, shots=_shots(config, args), rng=args.seed, mapper=_mapper(args))
    ideal = ptm_of_unitary(ideal_gate_unitary(n, schedule.effective_angle()))
    fid = process_fidelity(ptm, ideal)
    writer.json("ptm", {"measured": ptm.as_dict(), "ideal": ideal.as_dict(), "process_fidelity": fid})
    console.print(f"fidelidade de processo: [bold]{fid:.6f}[/]")


def cmd_error_budget(config: StarConfig, writer: ResultWriter, args):
    frame = budget_frame(error_budget(config, args.jobs))
    writer.table("error_budget", frame)
    _show("Infidelidade acumulada", frame)
    _require_hygiene("error_budget", frame)


def cmd_sweep(config: StarConfig, writer: ResultWriter, args):
    if args.kind == "dchi-kappa":
        name, frame = "sweep_dchi_kappa", sweep_dchi_kappa(config, args.jobs)
    else:
        name, frame = "sweep_nbar", sweep_nbar(config, args.jobs)
    writer.table(name, frame)
    _require_hygiene(name, frame)


def cmd_scaling(config: StarConfig, writer: ResultWriter, args):
    frame = scaling_with_N(config, args.jobs)
    writer.table("scaling", frame)
    _show("Fidelidade contra N", frame)
    _require_hygiene("scaling", frame)


def cmd_compare_rabi(config: StarConfig, writer: ResultWriter, args):
    comparison = rabi_30_vs_60(config, args.jobs)
    writer.table("compare_rabi_traces", comparison.traces)
    writer.table("compare_rabi", comparison.summary)
    _show("30 MHz contra 60 MHz", comparison.summary)


HANDLERS = {
    "simulate-gate": cmd_simulate_gate,
    "calibrate": cmd_calibrate,
    "tomography": cmd_tomography,
    "qpt": cmd_qpt,
    "error-budget": cmd_error_budget,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "compare-rabi": cmd_compare_rabi,
}
