"""
Gravação de resultados: tabelas em CSV ou JSON, matrizes em JSON e o
manifesto da execução.

Os arquivos de resultado dependem apenas da configuração e da semente; tempo
de parede e versão ficam isolados em `manifest.json`.
"""

import json
import logging
import time
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .operators import DensityMatrix

log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def jsonable(value: Any) -> Any:
    """Converte tipos do numpy e números complexos para JSON."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def density_matrix_json(rho: DensityMatrix) -> dict[str, Any]:
    return {
        "n_qubits": rho.layout.n_qubits,
        "fock_dim": rho.layout.fock_dim,
        "real": rho.matrix.real.tolist(),
        "imag": rho.matrix.imag.tolist(),
    }


class ResultWriter:
    """
    Escreve os arquivos de uma execução em `out` e lembra o que foi escrito
    para o manifesto.
    """

    def __init__(self, out: str | Path, fmt: str = "csv"):
        if fmt not in ("csv", "json"):
            raise ValueError(f"formato desconhecido: {fmt}")
        self.out = Path(out)
        self.fmt = fmt
        self.files: list[str] = []
        self.started = time.perf_counter()
        self.out.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str, suffix: str) -> Path:
        path = self.out / f"{name}.{suffix}"
        self.files.append(path.name)
        log.info("gravando %s", path)
        return path

    def table(self, name: str, frame: pd.DataFrame) -> Path:
        if self.fmt == "csv":
            path = self._path(name, "csv")
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            return path
        records = json.loads(frame.to_json(orient="records", double_precision=15))
        return self.json(name, records)

    def json(self, name: str, data: Any) -> Path:
        path = self._path(name, "json")
        path.write_text(json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n")
        return path

    def manifest(self, command: str, config_echo: dict[str, Any], seed: int | None, version: str) -> Path:
        data = {
            "command": command,
            "config": config_echo,
            "seed": seed,
            "version": version,
            "files": sorted(self.files),
            "wall_time_s": time.perf_counter() - self.started,
        }
        path = self.out / "manifest.json"
        path.write_text(json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n")
        return path
