"""Exact steady state of a small chain from the full Lindblad superoperator.

Fock-basis convention
---------------------
Basis states ``|n_0 n_1 ... n_{L-1}>`` with site 0 as the most significant
tensor factor.  Jordan-Wigner:

    c_j = Z_0 ... Z_{j-1} sigma^-_j,     Z = diag(1, -1),   sigma^- = [[0, 1], [0, 0]]

in the local basis ``(|0>, |1>)``.  Majoranas ``a_j = c_j^dag + c_j`` and
``b_j = i (c_j - c_j^dag)`` sit at indices ``2j`` and ``2j+1``, matching
:mod:`nesscrit.model`.  The Liouvillian acts on row-major ``vec(rho)``:
``vec(A rho B) = (A kron B^T) vec(rho)``.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateSteadyStateError, ModelValidationError
from ..model import LatticeModel, build_generator_vectors

MAX_SITES = 4


def fermion_operators(L: int) -> list:
    """Annihilation operators ``c_0 .. c_{L-1}`` as dense ``2^L`` matrices."""
    Z = np.diag([1.0, -1.0])
    I2 = np.eye(2)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    ops = []
    for j in range(L):
        op = np.ones((1, 1))
        for k in range(L):
            op = np.kron(op, Z if k < j else lower if k == j else I2)
        ops.append(op.astype(complex))
    return ops


def majorana_operators(L: int) -> list:
    out = []
    for c in fermion_operators(L):
        cd = c.conj().T
        out.append(cd + c)
        out.append(1j * (c - cd))
    return out


def liouvillian(H: np.ndarray, jumps) -> np.ndarray:
    dim = H.shape[0]
    eye = np.eye(dim)
    Lv = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for J in jumps:
        JdJ = J.conj().T @ J
        Lv += np.kron(J, J.conj()) - 0.5 * np.kron(JdJ, eye) - 0.5 * np.kron(eye, JdJ.T)
    return Lv


class ExactSteadyState:
    """Kernel of the Lindblad superoperator of a finite model with ``L <= 4`` sites."""

    def __init__(self, model: LatticeModel, kernel_tol: float = 1e-10):
        if not model.is_finite:
            raise ModelValidationError("exact oracle needs a finite chain")
        L = model.chain.L
        if L > MAX_SITES:
            raise ModelValidationError(f"exact oracle is limited to L <= {MAX_SITES}, got {L}")
        self.L = L
        self.w = majorana_operators(L)
        dim = 2**L
        H = np.zeros((dim, dim), dtype=complex)
        if model.hamiltonian is not None:
            K = model.hamiltonian.matrix(L, model.chain.periodic)
            for j in range(2 * L):
                for k in range(2 * L):
                    if K[j, k] != 0:
                        H += 0.25j * K[j, k] * (self.w[j] @ self.w[k])
        self.hamiltonian = H
        jumps = [sum(l[k] * self.w[k] for k in range(2 * L)) for l in build_generator_vectors(model)]
        self.superoperator = liouvillian(H, jumps)

        _, sv, vh = np.linalg.svd(self.superoperator)
        null = sv < kernel_tol * max(sv[0], 1.0)
        self.kernel_dimension = int(null.sum())
        if self.kernel_dimension > 1:
            raise DegenerateSteadyStateError(
                f"Liouvillian kernel has dimension {self.kernel_dimension}; steady state not unique",
                pair=(0.0, 0.0),
            )
        rho = vh[-1].conj().reshape(dim, dim)
        rho = rho / np.trace(rho)
        self.rho = 0.5 * (rho + rho.conj().T)

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ op))

    def two_point(self) -> np.ndarray:
        """``G[j, k] = <w_j w_k>``."""
        n = 2 * self.L
        G = np.empty((n, n), dtype=complex)
        for j in range(n):
            for k in range(n):
                G[j, k] = self.expect(self.w[j] @ self.w[k])
        return G

    @property
    def gamma(self) -> np.ndarray:
        """``Gamma_jk = (i/2) <[w_j, w_k]>`` (real antisymmetric)."""
        G = self.two_point()
        return (0.5j * (G - G.T)).real

    def four_point(self, a: int, b: int, c: int, d: int) -> complex:
        return self.expect(self.w[a] @ self.w[b] @ self.w[c] @ self.w[d])

    def occupation(self) -> float:
        total = 0.0
        for c in fermion_operators(self.L):
            total += self.expect(c.conj().T @ c).real
        return total / self.L


def exact_liouvillian_oracle(model: LatticeModel) -> ExactSteadyState:
    return ExactSteadyState(model)
