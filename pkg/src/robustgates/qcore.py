"""Spin-1/2 operator algebra, propagators and fidelities.

Everything here works on dense numpy arrays. Spin operators follow the
product-operator convention ``I_a = sigma_a / 2``, with spin 0 as the
leftmost tensor factor. Systems are limited to six spins (dim 64), where
dense eigendecomposition is cheap and exact to roundoff.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

MAX_SPINS = 6

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
SPIN_HALF = {axis: 0.5 * m for axis, m in PAULI.items()}
# I+ = Ix + i Iy = |0><1|
RAISING = np.array([[0, 1], [0, 0]], dtype=complex)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the operands, leftmost factor first."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(op) for op in ops))


def _check_n_spins(n_spins: int) -> None:
    if not 1 <= n_spins <= MAX_SPINS:
        raise ValueError(f"n_spins must be in [1, {MAX_SPINS}], got {n_spins}")


def embed(n_spins: int, spin: int, op: np.ndarray) -> np.ndarray:
    """Place a one-spin 2x2 operator on ``spin`` of an ``n_spins`` register."""
    _check_n_spins(n_spins)
    if not 0 <= spin < n_spins:
        raise IndexError(f"spin index {spin} out of range for {n_spins} spins")
    factors = [IDENTITY2] * n_spins
    factors[spin] = np.asarray(op, dtype=complex)
    return tensor(*factors)


def spin_operator(n_spins: int, spin: int, axis: str) -> np.ndarray:
    """Return ``I_axis`` of one spin embedded in an ``n_spins`` system.

    >>> spin_operator(1, 0, "z").real
    array([[ 0.5,  0. ],
           [ 0. , -0.5]])
    """
    if axis not in SPIN_HALF:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    return embed(n_spins, spin, SPIN_HALF[axis])


def raising_operator(n_spins: int, spin: int) -> np.ndarray:
    return embed(n_spins, spin, RAISING)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0, atol=tol)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.allclose(u @ u.conj().T, np.eye(u.shape[0]), rtol=0, atol=tol)


def hermitian_exponential(h: np.ndarray, scale: float) -> np.ndarray:
    """Compute ``exp(-i * scale * h)`` for Hermitian ``h`` by eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("hermitian_exponential requires a Hermitian matrix")
    # symmetrize so eigh sees an exactly Hermitian input
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    phases = np.exp(-1j * scale * evals)
    return (evecs * phases) @ evecs.conj().T


def su2_rotation(angle: float, axis) -> np.ndarray:
    """Closed form of ``exp(-i angle (n . I))`` for a unit 3-vector ``n``."""
    nx, ny, nz = axis
    c = np.cos(angle / 2)
    s = np.sin(angle / 2)
    return np.array(
        [[c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
         [-1j * s * (nx + 1j * ny), c + 1j * s * nz]],
        dtype=complex,
    )


def rotation_unitary(theta: float, phi: float) -> np.ndarray:
    """Ideal ``theta_phi`` pulse: ``exp(-i theta (Ix cos phi + Iy sin phi))``.

    ``theta`` may be negative; a negative rotation about phase ``phi`` is the
    same matrix as a positive one about ``phi + pi``.
    """
    return su2_rotation(theta, (np.cos(phi), np.sin(phi), 0.0))


def z_rotation(angle: float) -> np.ndarray:
    return su2_rotation(angle, (0.0, 0.0, 1.0))


def propagator_fidelity(v: np.ndarray, u: np.ndarray) -> float:
    """``|Tr(V U^dag)| / Tr(U U^dag)``; insensitive to global phase."""
    v = np.asarray(v)
    u = np.asarray(u)
    if v.shape != u.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {u.shape}")
    overlap = abs(np.trace(v @ u.conj().T))
    norm = np.trace(u @ u.conj().T).real
    # clip roundoff above 1 so callers can rely on the [0, 1] range
    return float(min(overlap / norm, 1.0))


def infidelity(v: np.ndarray, u: np.ndarray) -> float:
    """``1 - F`` evaluated without cancellation for nearly equal propagators.

    For unitaries of dimension d, ``1 - |Tr(V U^dag)|/d`` loses all digits
    once the infidelity drops below ~1e-16. Writing ``W = V U^dag`` and
    removing the best global phase, ``d - |Tr W| = ||W e^{-ia} - 1||_F^2 / 2``
    holds exactly for unitary W, and the right side is computed from small
    differences.
    """
    w = np.asarray(v) @ np.asarray(u).conj().T
    d = w.shape[0]
    tr = np.trace(w)
    phase = tr / abs(tr) if abs(tr) > 0 else 1.0
    diff = w * np.conj(phase) - np.eye(d)
    return float(0.5 * np.sum(np.abs(diff) ** 2) / d)


def evolve_state(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Return ``U rho U^dag``."""
    rho = np.asarray(rho)
    u = np.asarray(u)
    if rho.shape != u.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs propagator {u.shape}")
    return u @ rho @ u.conj().T


def pure_density(state: np.ndarray) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def basis_density(n_spins: int, index: int = 0) -> np.ndarray:
    """Pseudo-pure computational basis state ``|index><index|``."""
    _check_n_spins(n_spins)
    dim = 2**n_spins
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho


def check_density_matrix(rho: np.ndarray, tol: float = UNITARY_TOL) -> None:
    """Raise ValueError unless ``rho`` is Hermitian, trace one and PSD."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    return complex(np.trace(np.asarray(rho) @ np.asarray(op)))
