"""
Álgebra de operadores densos no espaço qubits ⊗ ressonador.

Convenção de ordenação (única em todo o pacote):

    qubit 0 ⊗ qubit 1 ⊗ ... ⊗ qubit n-1 ⊗ ressonador

e σ_z|g⟩ = +|g⟩, isto é, |g⟩ = (1, 0) e |e⟩ = (0, 1). Os estados vestidos são
|±⟩ = (|g⟩ ± |e⟩)/√2, autoestados de σ_x.

Operadores e estados são valores imutáveis: as matrizes internas são marcadas
como somente leitura e podem ser compartilhadas entre processos.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, LayoutError

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
DENSITY_HERMITIAN_TOL = 1e-10
EIGEN_SLACK = 1e-8
SQRTM_TOL = 1e-6

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": IDENTITY2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

_SQ2 = 1 / np.sqrt(2)
SINGLE_QUBIT_STATES = {
    "g": np.array([1, 0], dtype=complex),
    "e": np.array([0, 1], dtype=complex),
    "+": np.array([_SQ2, _SQ2], dtype=complex),
    "-": np.array([_SQ2, -_SQ2], dtype=complex),
    "i+": np.array([_SQ2, 1j * _SQ2], dtype=complex),
    # (|+⟩ - i|-⟩)/√2, um dos quatro estados de entrada da tomografia de processo
    "i-": np.array([(1 - 1j) / 2, (1 + 1j) / 2], dtype=complex),
}

# Abaixamento na base vestida: |-⟩⟨+|
SIGMA_MINUS_X = np.outer(SINGLE_QUBIT_STATES["-"], SINGLE_QUBIT_STATES["+"].conj())


def _frozen(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HilbertLayout:
    """
    Espaço de n qubits e um modo de ressonador truncado em `fock_dim` níveis.

    `fock_dim = 1` representa o espaço só de qubits (resultado do traço parcial).
    """

    n_qubits: int
    fock_dim: int = 10

    def __post_init__(self):
        if self.n_qubits < 0:
            raise LayoutError(f"número de qubits inválido: {self.n_qubits}")
        if self.fock_dim < 1:
            raise LayoutError(f"fock_dim deve ser >= 2 (ou 1 sem ressonador): {self.fock_dim}")

    @property
    def qubit_dim(self) -> int:
        return 2**self.n_qubits

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.fock_dim

    @property
    def has_resonator(self) -> bool:
        return self.fock_dim >= 2

    def qubits_only(self) -> "HilbertLayout":
        return HilbertLayout(self.n_qubits, 1)

    def check_qubit(self, k: int):
        if not 0 <= k < self.n_qubits:
            raise LayoutError(f"qubit {k} fora do intervalo [0, {self.n_qubits})")

    def check_matrix(self, matrix: np.ndarray):
        if matrix.shape != (self.dim, self.dim):
            raise LayoutError(
                f"matriz {matrix.shape} incompatível com o layout de dimensão {self.dim}"
            )

    def check_same(self, other: "HilbertLayout"):
        if self != other:
            raise LayoutError(f"layouts diferentes: {self} e {other}")


@dataclass(frozen=True)
class Operator:
    """
    Operador denso sobre um `HilbertLayout`.

    Energias estão em frequência angular (rad/s) quando o operador é um
    Hamiltoniano; os demais são adimensionais.
    """

    layout: HilbertLayout
    matrix: np.ndarray = field(repr=False)
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        self.layout.check_matrix(self.matrix)
        if self.hermitian and not is_hermitian(self.matrix, HERMITIAN_TOL):
            raise DomainError("operador marcado como hermitiano não é hermitiano")

    def dag(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T, self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        self.layout.check_same(other.layout)
        return Operator(self.layout, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        self.layout.check_same(other.layout)
        return Operator(
            self.layout, self.matrix + other.matrix, self.hermitian and other.hermitian
        )

    def __sub__(self, other: "Operator") -> "Operator":
        self.layout.check_same(other.layout)
        return Operator(
            self.layout, self.matrix - other.matrix, self.hermitian and other.hermitian
        )

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix, self.hermitian)

    def __mul__(self, scalar: complex) -> "Operator":
        real = np.isreal(scalar)
        return Operator(self.layout, scalar * self.matrix, self.hermitian and bool(real))

    __rmul__ = __mul__

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def norm(self) -> float:
        """Norma infinito (máximo da soma das linhas)."""
        return float(np.linalg.norm(self.matrix, np.inf))


@dataclass(frozen=True)
class Ket:
    layout: HilbertLayout
    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vector", _frozen(self.vector).reshape(-1))
        if self.vector.shape != (self.layout.dim,):
            raise LayoutError(f"vetor de dimensão {self.vector.shape} para layout {self.layout}")
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1) > 1e-12:
            raise DomainError(f"ket com norma {norm}")

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.vector, self.vector.conj()))

    def overlap(self, other: "Ket") -> complex:
        self.layout.check_same(other.layout)
        return complex(np.vdot(self.vector, other.vector))


@dataclass(frozen=True)
class DensityMatrix:
    """
    Matriz densidade: hermitiana, traço unitário, positiva dentro da folga
    numérica. Use `check=False` apenas para estados intermediários do
    integrador.
    """

    layout: HilbertLayout
    matrix: np.ndarray = field(repr=False)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        self.layout.check_matrix(self.matrix)
        if self.check:
            validate_density(self.matrix)

    def expectation(self, op: Operator | np.ndarray) -> complex:
        matrix = op.matrix if isinstance(op, Operator) else op
        return complex(np.trace(matrix @ self.matrix))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


#
# Validação
#
def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) < tol)


def validate_density(matrix: np.ndarray):
    trace = np.trace(matrix)
    if abs(trace - 1) > TRACE_TOL:
        raise DomainError(f"traço da matriz densidade é {trace}")
    if not is_hermitian(matrix, DENSITY_HERMITIAN_TOL):
        raise DomainError("matriz densidade não hermitiana")
    min_eig = np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T)).min()
    if min_eig < -EIGEN_SLACK:
        raise DomainError(f"matriz densidade com autovalor negativo {min_eig:.3e}")


#
# Construção de operadores
#
def tensor(*matrices: np.ndarray) -> np.ndarray:
    return reduce(np.kron, matrices, np.eye(1, dtype=complex))


def embed_qubit_op(layout: HilbertLayout, k: int, op: np.ndarray) -> Operator:
    """
    Retorna I ⊗ ... ⊗ op (posição k) ⊗ ... ⊗ I_fock.
    """
    layout.check_qubit(k)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise LayoutError(f"operador de um qubit deve ser 2x2, recebi {op.shape}")
    factors = [IDENTITY2] * layout.n_qubits
    factors[k] = op
    factors.append(np.eye(layout.fock_dim, dtype=complex))
    return Operator(layout, tensor(*factors), is_hermitian(op))


def embed_resonator_op(layout: HilbertLayout, op: np.ndarray) -> Operator:
    factors = [np.eye(layout.qubit_dim, dtype=complex), np.asarray(op, dtype=complex)]
    return Operator(layout, tensor(*factors), is_hermitian(op))


def qubit_operator(layout: HilbertLayout, op: np.ndarray) -> Operator:
    """
    Operador já escrito no espaço dos qubits (2^n x 2^n), estendido com I_fock.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (layout.qubit_dim, layout.qubit_dim):
        raise LayoutError(f"operador {op.shape} não age em {layout.n_qubits} qubits")
    return Operator(layout, np.kron(op, np.eye(layout.fock_dim)), is_hermitian(op))


def annihilation(layout: HilbertLayout) -> Operator:
    """
    Operador de abaixamento do ressonador: a|n⟩ = √n|n-1⟩.
    """
    if not layout.has_resonator:
        raise LayoutError("layout sem ressonador (fock_dim < 2)")
    a = np.diag(np.sqrt(np.arange(1, layout.fock_dim)), k=1)
    return embed_resonator_op(layout, a)


def number(layout: HilbertLayout) -> Operator:
    a = annihilation(layout)
    return Operator(layout, a.matrix.conj().T @ a.matrix, hermitian=True)


def collective_spin(layout: HilbertLayout, axis: str | float) -> Operator:
    """
    Spin coletivo J_l = Σ_k σ_l,k/2 para l em {x, y, z}, ou, quando `axis` é um
    ângulo φ, J_φ = cos(φ)J_z − sin(φ)J_y.
    """
    if isinstance(axis, str):
        pauli = PAULIS[axis.upper()]
    else:
        pauli = np.cos(axis) * SIGMA_Z - np.sin(axis) * SIGMA_Y
    matrix = sum(
        (embed_qubit_op(layout, k, pauli / 2).matrix for k in range(layout.n_qubits)),
        np.zeros((layout.dim, layout.dim), dtype=complex),
    )
    return Operator(layout, matrix, hermitian=True)


def sigma_phi(phi: float) -> np.ndarray:
    """σ_φ = cos(φ)σ_z − sin(φ)σ_y, o eixo de acoplamento de ângulo φ."""
    return np.cos(phi) * SIGMA_Z - np.sin(phi) * SIGMA_Y


def displacement(layout: HilbertLayout, alpha: complex) -> Operator:
    a = annihilation(layout).matrix
    return Operator(layout, expm(alpha * a.conj().T - np.conj(alpha) * a))


#
# Traço parcial e estados
#
def partial_trace_resonator(rho: DensityMatrix) -> DensityMatrix:
    """
    Traço sobre o slot de Fock; o resultado vive em `layout.qubits_only()`.
    """
    layout = rho.layout
    q, f = layout.qubit_dim, layout.fock_dim
    reduced = np.einsum("ikjk->ij", rho.matrix.reshape(q, f, q, f))
    return DensityMatrix(layout.qubits_only(), reduced, check=rho.check)


def parse_labels(labels: str | Sequence[str]) -> list[str]:
    """
    Converte "++", "i-i-" ou ["g", "+"] na lista de rótulos de cada qubit.
    """
    if not isinstance(labels, str):
        return list(labels)
    out, i = [], 0
    while i < len(labels):
        if labels[i] == "i":
            out.append(labels[i : i + 2])
            i += 2
        else:
            out.append(labels[i])
            i += 1
    for label in out:
        if label not in SINGLE_QUBIT_STATES:
            raise DomainError(f"rótulo de estado desconhecido: {label!r}")
    return out


def product_ket(layout: HilbertLayout, labels: str | Sequence[str], photons: int = 0) -> Ket:
    """
    Estado produto dos qubits com o ressonador no estado de Fock `photons`.
    """
    parsed = parse_labels(labels)
    if len(parsed) != layout.n_qubits:
        raise LayoutError(f"{len(parsed)} rótulos para {layout.n_qubits} qubits")
    if photons >= layout.fock_dim:
        raise LayoutError(f"estado de Fock {photons} fora da truncagem {layout.fock_dim}")
    fock = np.zeros(layout.fock_dim, dtype=complex)
    fock[photons] = 1
    vectors = [SINGLE_QUBIT_STATES[label] for label in parsed]
    return Ket(layout, reduce(np.kron, [*vectors, fock]))


def prepare_product(layout: HilbertLayout, labels: str | Sequence[str]) -> DensityMatrix:
    return product_ket(layout, labels).density()


def basis_projector(layout: HilbertLayout, labels: str | Sequence[str]) -> Operator:
    """Projetor |labels⟩⟨labels| nos qubits, identidade no ressonador."""
    qubits = product_ket(layout.qubits_only(), labels).vector
    return qubit_operator(layout, np.outer(qubits, qubits.conj()))


#
# Funções de matriz
#
def expm(op: Operator | np.ndarray) -> np.ndarray:
    """
    Exponencial de matriz (Padé com scaling-and-squaring do scipy).
    """
    matrix = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    return scipy.linalg.expm(matrix)


def unitary(generator: Operator | np.ndarray, angle: float = 1.0) -> np.ndarray:
    """
    exp(−i·angle·G) para G hermitiano, via autodecomposição.
    """
    matrix = generator.matrix if isinstance(generator, Operator) else generator
    evals, evecs = np.linalg.eigh(matrix)
    return (evecs * np.exp(-1j * angle * evals)) @ evecs.conj().T


def sqrtm(matrix: np.ndarray) -> np.ndarray:
    """
    Raiz quadrada de matriz PSD por autodecomposição, com autovalores
    negativos pequenos truncados em zero.
    """
    matrix = np.asarray(matrix, dtype=complex)
    herm = 0.5 * (matrix + matrix.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    if evals.min(initial=0.0) < -SQRTM_TOL:
        raise DomainError(f"sqrtm de matriz com autovalor {evals.min():.3e}")
    evals = np.clip(evals, 0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def fock_populations(rho: DensityMatrix) -> np.ndarray:
    layout = rho.layout
    q, f = layout.qubit_dim, layout.fock_dim
    diag = np.real(np.diagonal(rho.matrix)).reshape(q, f)
    return diag.sum(axis=0)


def top_fock_population(rho: DensityMatrix | np.ndarray, layout: HilbertLayout) -> float:
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else rho
    if not layout.has_resonator:
        return 0.0
    diag = np.real(np.diagonal(matrix)).reshape(layout.qubit_dim, layout.fock_dim)
    return float(diag[:, -1].sum())


def pauli_string(labels: str) -> np.ndarray:
    """Produto tensorial de Paulis, ex.: "XZ" → σ_x ⊗ σ_z."""
    return tensor(*(PAULIS[c] for c in labels))


def all_pauli_labels(n: int) -> Iterable[str]:
    return ("".join(p) for p in product("IXYZ", repeat=n))
