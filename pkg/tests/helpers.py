"""Shared test utilities: product-space embeddings of symmetric states,
brute-force partial traces, and seeded random state generators.

Site convention: product index bits are most-significant-first over sites,
bit value 0 means spin up (sigma_z = +1). The collective basis index i equals
the number of up spins, so i = 0 is all spins down (m = -N/2), matching the
ascending-m ordering of the library.
"""

import math

import numpy as np


def up_count(index: int, num_spins: int) -> int:
    return num_spins - bin(index).count("1")


def symmetric_vector(num_spins: int, excitations: int) -> np.ndarray:
    """Normalized equal superposition of all product states with k up spins."""
    vec = np.zeros(2**num_spins)
    weight = 1.0 / math.sqrt(math.comb(num_spins, excitations))
    for index in range(2**num_spins):
        if up_count(index, num_spins) == excitations:
            vec[index] = weight
    return vec


def embed_symmetric(amplitudes: np.ndarray, num_spins: int) -> np.ndarray:
    """Lift collective-basis amplitudes into the full 2^N product space."""
    state = np.zeros(2**num_spins, dtype=complex)
    for k, amplitude in enumerate(amplitudes):
        state += amplitude * symmetric_vector(num_spins, k)
    return state


def trace_out_tail(rho_full: np.ndarray, num_spins: int, block: int) -> np.ndarray:
    """Partial trace over the last num_spins - block sites, index loop free."""
    dim_block = 2**block
    dim_rest = 2 ** (num_spins - block)
    reshaped = rho_full.reshape(dim_block, dim_rest, dim_block, dim_rest)
    return np.einsum("arbr->ab", reshaped)


def trace_out_tail_loop(rho_full: np.ndarray, num_spins: int, block: int) -> np.ndarray:
    """Same partial trace via explicit index loops (independent reference)."""
    dim_block = 2**block
    dim_rest = 2 ** (num_spins - block)
    out = np.zeros((dim_block, dim_block), dtype=complex)
    for a in range(dim_block):
        for b in range(dim_block):
            for r in range(dim_rest):
                out[a, b] += rho_full[a * dim_rest + r, b * dim_rest + r]
    return out


def project_block_symmetric(rho_block: np.ndarray, block: int) -> np.ndarray:
    """Express a product-space block state in the block's collective basis."""
    basis = np.column_stack([symmetric_vector(block, q) for q in range(block + 1)])
    return basis.T @ rho_block @ basis


def brute_reduced_state(amplitudes: np.ndarray, num_spins: int, block: int) -> np.ndarray:
    """Reference reduction: embed, project, trace, re-express. Exponential cost."""
    psi = embed_symmetric(amplitudes, num_spins)
    rho_full = np.outer(psi, psi.conj())
    return project_block_symmetric(trace_out_tail(rho_full, num_spins, block), block)


def random_amplitudes(rng: np.random.Generator, dim: int) -> np.ndarray:
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    factor = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = factor @ factor.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    gaussian = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(gaussian)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (raw + raw.conj().T) / 2.0
