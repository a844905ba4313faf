from pathlib import Path

import numpy as np
import pytest

pytest.register_assert_rewrite("star.testing")

from star import testing  # noqa: E402
from star.config import StarConfig, chip_config  # noqa: E402

BASE_DIR = Path(__file__).parent.parent

TINY_CONFIG = """
# dispositivo pequeno e rápido para os testes da CLI
[device]
fock_dim = 10
kappa = 20 kHz

[qubits]
chi = [1 MHz, 1 MHz]

[sidebands]
omega_sb = 30 MHz
delta = "auto"
nbar = 1

[gate]
qubits = [0, 1]
rabi = [30 MHz, 30 MHz]
t_r = 0 ns
t_sq = "auto"
gate_angle = 0 rad
renormalize_rabi = false
"""


def pytest_addoption(parser):
    parser.addoption(
        "--full-suite",
        action="store_true",
        help="Roda a suíte completa, incluindo simulações longas e critérios de aceitação.",
    )


def pytest_runtest_setup(item):
    if "full_suite" in item.keywords and not item.config.getoption("--full-suite"):
        pytest.skip("need --full-suite option to run this test")


@pytest.fixture
def chip() -> StarConfig:
    """
    Configuração distribuída com os parâmetros do chip de referência.
    """
    return chip_config()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_src() -> str:
    """Texto da configuração pequena (dois qubits, χ = 1 MHz, n̄ = 1)."""
    return TINY_CONFIG


@pytest.fixture
def write_config(tmp_path: Path):
    """
    Grava um arquivo de configuração na pasta temporária e devolve o caminho.
    """

    def write(src: str = TINY_CONFIG, name: str = "device.cfg") -> Path:
        path = tmp_path / name
        path.write_text(src, encoding="utf-8")
        return path

    return write


@pytest.fixture
def check():
    """Funções de asserção de `star.testing`."""
    return testing
