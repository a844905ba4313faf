"""
Tomografia de estado e de processo (matriz de transferência de Pauli) e as
métricas de emaranhamento e fidelidade.

A base de Paulis é {I, X, Y, Z}^⊗n na ordem lexicográfica de `all_pauli_labels`:
"II", "IX", "IY", "IZ", "XI", ...
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from .errors import DomainError, LayoutError
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    HilbertLayout,
    Ket,
    all_pauli_labels,
    pauli_string,
    product_ket,
    sqrtm,
    tensor,
    unitary,
)

log = logging.getLogger(__name__)

PROCESS_INPUTS = ("+", "-", "g", "i-")
PTM_TP_TOL = 1e-6
PURE_TOL = 1e-10


def _qubit_count(dim: int) -> int:
    n = int(round(math.log2(dim)))
    if 2**n != dim:
        raise LayoutError(f"dimensão {dim} não é potência de 2")
    return n


def _matrix(state: DensityMatrix | Ket | np.ndarray) -> np.ndarray:
    if isinstance(state, Ket):
        return np.outer(state.vector, state.vector.conj())
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state, dtype=complex)


#
# Métricas
#
def purity(rho: DensityMatrix | np.ndarray) -> float:
    m = _matrix(rho)
    return float(np.real(np.trace(m @ m)))


def state_fidelity(rho: DensityMatrix | Ket | np.ndarray, target: DensityMatrix | Ket | np.ndarray) -> float:
    """
    Fidelidade de Uhlmann F = (Tr√(√ρ σ √ρ))². Quando um dos estados é puro,
    reduz-se a ⟨ψ|ρ|ψ⟩.
    """
    if isinstance(target, Ket):
        psi = target.vector
        value = np.vdot(psi, _matrix(rho) @ psi).real
        return float(min(max(value, 0.0), 1.0))
    if isinstance(rho, Ket):
        return state_fidelity(target, rho)

    a, b = _matrix(rho), _matrix(target)
    if a.shape != b.shape:
        raise LayoutError(f"estados com dimensões {a.shape} e {b.shape}")
    for m in (b, a):
        vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
        if vals[-1] > 1 - PURE_TOL:
            other = a if m is b else b
            psi = vecs[:, -1]
            return float(min(max(np.vdot(psi, other @ psi).real, 0.0), 1.0))
    root = sqrtm(a)
    value = np.trace(sqrtm(root @ b @ root)).real ** 2
    return float(min(max(value, 0.0), 1.0))


def concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """
    Concorrência de Wootters max(0, λ₁ − λ₂ − λ₃ − λ₄), com λ as raízes dos
    autovalores de ρ ρ̃, ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
    """
    m = _matrix(rho)
    if m.shape != (4, 4):
        raise LayoutError(f"concorrência exige um estado de dois qubits, recebi {m.shape}")
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    flipped = yy @ m.conj() @ yy
    root = sqrtm(m)
    vals = np.linalg.eigvalsh(root @ flipped @ root)
    lam = np.sqrt(np.clip(vals, 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def average_gate_fidelity(process_fidelity: float, d: int) -> float:
    return (d * process_fidelity + 1) / (d + 1)


def local_x_rotation(angles: Sequence[float]) -> np.ndarray:
    return tensor(*(unitary(SIGMA_X / 2, theta) for theta in angles))


def bell_fidelity_optimized(
    rho: DensityMatrix | np.ndarray,
    target: Ket | np.ndarray,
    grid: int = 12,
) -> tuple[float, tuple[float, ...]]:
    """
    Maior fidelidade com o alvo sobre rotações locais exp(−iθ_k σ_x/2).

    Busca em grade seguida de refinamento Nelder-Mead a partir do melhor
    ponto; o resultado é determinístico.
    """
    m = _matrix(rho)
    psi = target.vector if isinstance(target, Ket) else np.asarray(target, dtype=complex)
    n = _qubit_count(m.shape[0])

    def infidelity(angles):
        r = local_x_rotation(angles)
        return 1 - np.vdot(psi, r @ m @ r.conj().T @ psi).real

    axis = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    start = min(product(axis, repeat=n), key=infidelity)
    res = minimize(infidelity, np.array(start), method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-12})
    best = res.x if res.fun <= infidelity(start) else np.array(start)
    return float(1 - infidelity(best)), tuple(float(a) for a in best)


#
# Tomografia de estado
#
def pauli_expectations(rho: DensityMatrix | np.ndarray) -> dict[str, float]:
    """⟨P⟩ para todas as strings de Pauli (incluindo a identidade)."""
    m = _matrix(rho)
    n = _qubit_count(m.shape[0])
    return {label: float(np.trace(pauli_string(label) @ m).real) for label in all_pauli_labels(n)}


def sample_expectations(
    expectations: Mapping[str, float],
    shots: int,
    rng: np.random.Generator | int | None = None,
) -> dict[str, float]:
    """
    Amostragem binomial independente de cada ⟨P⟩ com `shots` repetições por
    configuração. A identidade permanece 1.
    """
    if shots < 1:
        raise DomainError(f"número de shots deve ser positivo: {shots}")
    rng = np.random.default_rng(rng)
    out = {}
    for label, value in expectations.items():
        if set(label) == {"I"}:
            out[label] = 1.0
            continue
        p = min(max((1 + value) / 2, 0.0), 1.0)
        out[label] = 2 * rng.binomial(shots, p) / shots - 1
    return out


@dataclass
class TomographyResult:
    state: DensityMatrix
    expectations: dict[str, float]
    method: str = "linear"
    projection_distance: float = 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"pauli": list(self.expectations), "value": list(self.expectations.values())})


def project_psd(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Projeção no cone PSD por corte de autovalores negativos e renormalização
    do traço. Devolve a matriz projetada e a distância de Frobenius.
    """
    herm = 0.5 * (matrix + matrix.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, 0, None)
    if vals.sum() <= 0:
        raise DomainError("reconstrução sem autovalores positivos")
    vals /= vals.sum()
    projected = (vecs * vals) @ vecs.conj().T
    return projected, float(np.linalg.norm(projected - matrix))


def linear_inversion(expectations: Mapping[str, float], n: int) -> np.ndarray:
    """ρ = Σ_P ⟨P⟩ P / 2^n."""
    labels = list(all_pauli_labels(n))
    missing = [label for label in labels[1:] if label not in expectations]
    if missing:
        raise DomainError(f"base de Paulis incompleta: faltam {len(missing)} strings, ex.: {missing[0]}")
    d = 2**n
    rho = np.eye(d, dtype=complex) / d
    for label in labels[1:]:
        rho += expectations[label] * pauli_string(label) / d
    return rho


def state_tomography(
    source: DensityMatrix | Mapping[str, float],
    n: int | None = None,
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
    project: bool = True,
) -> TomographyResult:
    """
    Tomografia por inversão linear a partir de um estado exato ou de uma
    tabela de valores esperados. Com `shots > 0` os valores são amostrados.
    """
    if isinstance(source, (DensityMatrix, np.ndarray)):
        expectations = pauli_expectations(source)
        n = _qubit_count(_matrix(source).shape[0])
    else:
        expectations = dict(source)
        if n is None:
            n = len(next(iter(expectations)))
    if shots:
        expectations = sample_expectations(expectations, shots, rng)
    rho = linear_inversion(expectations, n)
    layout = HilbertLayout(n, 1)
    if not project:
        return TomographyResult(DensityMatrix(layout, rho, check=False), expectations, "linear")
    projected, distance = project_psd(rho)
    return TomographyResult(DensityMatrix(layout, projected), expectations, "linear+psd", distance)


#
# Tomografia de processo
#
@dataclass(frozen=True)
class PauliTransferMatrix:
    """
    R_ij = Tr(P_i Λ(P_j))/d, d = 2^n, na base {I, X, Y, Z}^⊗n.
    """

    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        d2 = 4**self.n_qubits
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (d2, d2):
            raise LayoutError(f"PTM com forma {m.shape}, esperava {(d2, d2)}")
        if np.abs(m).max() > 1 + PTM_TP_TOL:
            raise DomainError("PTM com entradas fora de [−1, 1]")
        object.__setattr__(self, "matrix", m)

    @property
    def labels(self) -> list[str]:
        return list(all_pauli_labels(self.n_qubits))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def is_trace_preserving(self, tol: float = PTM_TP_TOL) -> bool:
        first = np.zeros(len(self.matrix))
        first[0] = 1
        return bool(np.abs(self.matrix[0] - first).max() < tol)

    def __matmul__(self, other: "PauliTransferMatrix") -> "PauliTransferMatrix":
        return PauliTransferMatrix(self.n_qubits, self.matrix @ other.matrix)

    def fidelity(self, ideal: "PauliTransferMatrix") -> float:
        return process_fidelity(self, ideal)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.matrix, index=self.labels, columns=self.labels)

    def as_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "basis": self.labels, "matrix": self.matrix.tolist()}


def ptm_of_channel(channel: Callable[[np.ndarray], np.ndarray], n: int) -> PauliTransferMatrix:
    """PTM de um mapa linear dado como função de matrizes 2^n × 2^n."""
    d = 2**n
    paulis = [pauli_string(label) for label in all_pauli_labels(n)]
    images = [channel(p) for p in paulis]
    r = np.array([[np.trace(pi @ img).real / d for img in images] for pi in paulis])
    return PauliTransferMatrix(n, r)


def ptm_of_unitary(u: np.ndarray) -> PauliTransferMatrix:
    u = np.asarray(getattr(u, "matrix", u), dtype=complex)
    n = _qubit_count(u.shape[0])
    return ptm_of_channel(lambda m: u @ m @ u.conj().T, n)


def process_fidelity(measured: PauliTransferMatrix, ideal: PauliTransferMatrix) -> float:
    """F_pro = Tr(R_idealᵀ R)/d²."""
    if measured.n_qubits != ideal.n_qubits:
        raise LayoutError(f"PTMs de {measured.n_qubits} e {ideal.n_qubits} qubits")
    d = measured.dim
    return float(np.trace(ideal.matrix.T @ measured.matrix) / d**2)


def process_inputs(n: int = 2) -> list[str]:
    """As 4^n entradas produto de {+, −, g, i−}."""
    return ["".join(labels) for labels in product(PROCESS_INPUTS, repeat=n)]


def process_tomography(
    channel: Callable[[str], DensityMatrix],
    n: int = 2,
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
    mapper: Callable = map,
) -> PauliTransferMatrix:
    """
    Tomografia de processo: aplica o canal a cada entrada, reconstrói a saída
    e resolve R = Out · In⁻¹ com os vetores de Pauli r_i = Tr(P_i ρ).
    """
    inputs = process_inputs(n)
    layout = HilbertLayout(n, 1)
    labels = list(all_pauli_labels(n))
    paulis = [pauli_string(label) for label in labels]

    def vector(rho: np.ndarray) -> np.ndarray:
        return np.array([np.trace(p @ rho).real for p in paulis])

    in_matrix = np.column_stack([vector(_matrix(product_ket(layout, s))) for s in inputs])
    if np.linalg.cond(in_matrix) > 1e10:
        raise DomainError("conjunto de entradas da tomografia de processo é singular")

    outputs = list(mapper(channel, inputs))
    rng = np.random.default_rng(rng)
    columns = []
    for rho in outputs:
        if shots:
            rho = state_tomography(rho, n, shots=shots, rng=rng).state
        columns.append(vector(_matrix(rho)))
    out_matrix = np.column_stack(columns)
    r = out_matrix @ np.linalg.inv(in_matrix)
    return PauliTransferMatrix(n, r)


def average_state_fidelity(channel: Callable[[str], DensityMatrix], ideal_u: np.ndarray, n: int = 2) -> float:
    """Fidelidade média de estado sobre as entradas da tomografia de processo."""
    layout = HilbertLayout(n, 1)
    u = np.asarray(getattr(ideal_u, "matrix", ideal_u), dtype=complex)
    fids = []
    for label in process_inputs(n):
        target = Ket(layout, u @ product_ket(layout, label).vector)
        fids.append(state_fidelity(channel(label), target))
    return float(np.mean(fids))
