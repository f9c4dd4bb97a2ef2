"""Sudden-quench charging protocol and its work, power, and entropy observables.

The battery is prepared in the ground state of its Hamiltonian at one field
value; the field is then switched abruptly to a new value and the state evolves
under the post-quench (charging) Hamiltonian. All observables are measured
against the original battery Hamiltonian. Two independent evaluation paths for
the stored work (an eigenbasis closed form and direct expectation values of the
evolved state) are cross-checked on every call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import LmgParams, build_lmg_hamiltonian
from .spectral import (
    NumericsError,
    SpectralDecomposition,
    diagonalize,
    evolve_grid,
    ground_state,
)

__all__ = [
    "QuenchSpec",
    "WorkDistribution",
    "QuenchResult",
    "SuddenQuench",
    "default_time_grid",
    "phase_boundary",
]

DUAL_PATH_TOL = 1e-9
ZERO_WORK_TOL = 1e-12
DEGENERACY_TOL = 1e-10


def default_time_grid(t_max: float = 50.0, points: int = 2000) -> np.ndarray:
    """Uniform grid over [0, t_max]; dense enough for the bundled sweep recipes."""
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max!r}")
    if points < 2:
        raise ValueError(f"points must be at least 2, got {points!r}")
    return np.linspace(0.0, t_max, points)


@dataclass
class QuenchSpec:
    """A sudden field quench: initial parameters, post-quench parameters, time grid."""

    params_initial: LmgParams
    params_charge: LmgParams
    times: np.ndarray = field(default_factory=default_time_grid)

    def __post_init__(self):
        a, b = self.params_initial, self.params_charge
        if (a.num_spins, a.coupling, a.anisotropy) != (b.num_spins, b.coupling, b.anisotropy):
            raise ValueError("initial and charge parameters must share num_spins, coupling, anisotropy")
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size == 0:
            raise ValueError("time grid must be nonempty")
        if self.times[0] != 0.0:
            raise ValueError(f"time grid must start at 0, got {self.times[0]!r}")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("time grid must be strictly increasing")


@dataclass(frozen=True)
class WorkDistribution:
    """Discrete two-point-measurement work distribution {(W_k, p_k)}."""

    work_values: np.ndarray
    probabilities: np.ndarray

    def first_moment(self) -> float:
        return float(self.probabilities @ self.work_values)

    def histogram(self, bin_width: float) -> tuple[np.ndarray, np.ndarray]:
        """Aggregate point masses into uniform bins (plotting aid only)."""
        if bin_width <= 0:
            raise ValueError(f"bin_width must be positive, got {bin_width!r}")
        lo = np.floor(self.work_values.min() / bin_width) * bin_width
        hi = np.ceil(self.work_values.max() / bin_width) * bin_width + bin_width / 2
        edges = np.arange(lo, hi + bin_width, bin_width)
        weights, _ = np.histogram(self.work_values, bins=edges, weights=self.probabilities)
        centers = (edges[:-1] + edges[1:]) / 2.0
        return centers, weights


@dataclass(frozen=True)
class QuenchResult:
    """Time series and summary statistics of one quench run."""

    times: np.ndarray
    work_series: np.ndarray
    power_series: np.ndarray
    entropy_series: np.ndarray
    work_max: float
    work_max_time: float
    power_max: float
    optimal_time: float | None
    average_work: float
    work_variance: float


class SuddenQuench:
    """Diagonalizes the pre- and post-quench Hamiltonians once and serves all observables."""

    def __init__(self, spec: QuenchSpec):
        self.spec = spec
        self.battery = diagonalize(build_lmg_hamiltonian(spec.params_initial))
        self.charger = diagonalize(build_lmg_hamiltonian(spec.params_charge))
        self.ground_energy, self.ground_vector = ground_state(self.battery)
        self._battery_matrix = build_lmg_hamiltonian(spec.params_initial)
        # gaps w_l, overlap matrix O[l, k] = <level_l | charge_k>, amplitudes c_k
        self._gaps = self.battery.eigenvalues - self.ground_energy
        self._overlaps = self.battery.eigenvectors.conj().T @ self.charger.eigenvectors
        self._amplitudes = self.charger.eigenvectors.conj().T @ self.ground_vector
        self._mixed = self._overlaps * self._amplitudes[None, :]

    # -- distribution ------------------------------------------------------

    def work_distribution(self) -> WorkDistribution:
        probabilities = np.abs(self._amplitudes) ** 2
        return WorkDistribution(self.charger.eigenvalues - self.ground_energy, probabilities)

    # -- time series -------------------------------------------------------

    def state_series(self, times: np.ndarray | None = None) -> np.ndarray:
        """Evolved states as columns of a (dim, len(times)) array."""
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        return evolve_grid(self.charger, self.ground_vector, times)

    def level_amplitude_series(self, times: np.ndarray | None = None) -> np.ndarray:
        """<level_l | state(t)> for every battery level, shape (dim, len(times))."""
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        phases = np.exp(-1j * np.outer(self.charger.eigenvalues, times))
        return self._mixed @ phases

    def battery_energy(self, t: float) -> float:
        """<state(t)| H_battery |state(t)> by direct evaluation."""
        psi = self.state_series(np.array([t]))[:, 0]
        return float(np.real(np.vdot(psi, self._battery_matrix @ psi)))

    def stored_work_direct(self, times: np.ndarray | None = None) -> np.ndarray:
        """Stored work from expectation values of evolved states (reference path)."""
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        states = self.state_series(times)
        energies = np.real(np.einsum("it,ij,jt->t", states.conj(), self._battery_matrix, states))
        return energies - self.ground_energy

    def stored_work_series(self, times: np.ndarray | None = None) -> np.ndarray:
        """Stored work from the eigenbasis closed form, cross-checked against the direct path."""
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        populations = np.abs(self.level_amplitude_series(times)) ** 2
        work = self._gaps @ populations
        mismatch = np.max(np.abs(work - self.stored_work_direct(times)))
        if mismatch > DUAL_PATH_TOL:
            raise NumericsError(
                f"stored-work dual-path cross-check failed: max deviation {mismatch:.3e}"
            )
        return work

    def entropy_series(self, times: np.ndarray | None = None) -> np.ndarray:
        """Shannon entropy of the battery-level populations (nats), with 0 ln 0 = 0."""
        populations = np.abs(self.level_amplitude_series(times)) ** 2
        terms = np.where(populations > 0.0, populations * np.log(np.where(populations > 0.0, populations, 1.0)), 0.0)
        return -np.sum(terms, axis=0)

    # -- long-time statistics ---------------------------------------------

    def _degenerate_groups(self, tol: float) -> list[np.ndarray]:
        levels = self.charger.eigenvalues
        breaks = np.nonzero(np.diff(levels) >= tol)[0] + 1
        return np.split(np.arange(levels.size), breaks)

    def long_time_average_work(self, degenerate_aware: bool = False,
                               degeneracy_tol: float = DEGENERACY_TOL) -> float:
        """Infinite-time average of the stored work (dephasing closed form)."""
        if not degenerate_aware:
            populations = np.abs(self._amplitudes) ** 2
            transfer = np.abs(self._overlaps) ** 2
            return float(populations @ (transfer.T @ self._gaps))
        total = 0.0
        for group in self._degenerate_groups(degeneracy_tol):
            merged = self._mixed[:, group].sum(axis=1)
            total += float(self._gaps @ np.abs(merged) ** 2)
        return total

    def work_variance(self, degenerate_aware: bool = False,
                      degeneracy_tol: float = DEGENERACY_TOL) -> float:
        """Long-time variance of the stored work; clamped at 0 against float noise."""
        if not degenerate_aware:
            populations = np.abs(self._amplitudes) ** 2
            transfer = np.abs(self._overlaps) ** 2
            level_work = transfer.T @ self._gaps
            mean = float(populations @ level_work)
            second = float(populations @ level_work**2)
            variance = second - mean**2
        else:
            groups = self._degenerate_groups(degeneracy_tol)
            merged = np.column_stack([self._mixed[:, g].sum(axis=1) for g in groups])
            cross = (merged.conj() * self._gaps[:, None]).T @ merged
            off_diagonal = np.abs(cross) ** 2
            np.fill_diagonal(off_diagonal, 0.0)
            variance = float(off_diagonal.sum())
        if variance < -1e-12:
            raise NumericsError(f"long-time work variance {variance:.3e} below -1e-12")
        return max(variance, 0.0)

    # -- power and summary ---------------------------------------------------

    def power_series(self, times: np.ndarray | None = None) -> np.ndarray:
        """Average charging power work/time; undefined at t=0 and recorded as nan."""
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        work = self.stored_work_series(times)
        with np.errstate(divide="ignore", invalid="ignore"):
            power = np.where(times > 0.0, work / np.where(times > 0.0, times, 1.0), np.nan)
        return power

    def power_summary(self, times: np.ndarray | None = None,
                      t_opt_from: str = "power") -> tuple[float, float | None]:
        """(peak power, optimal charging time); ties resolve to the earliest time.

        t_opt_from selects whether the optimal time maximizes power or work.
        A work series that never leaves zero has no optimum (None).
        """
        if t_opt_from not in ("power", "work"):
            raise ValueError(f"t_opt_from must be 'power' or 'work', got {t_opt_from!r}")
        times = self.spec.times if times is None else np.asarray(times, dtype=float)
        work = self.stored_work_series(times)
        positive = times > 0.0
        if not np.any(positive) or np.max(np.abs(work)) <= ZERO_WORK_TOL:
            return 0.0, None
        power = work[positive] / times[positive]
        power_max = float(np.max(power))
        if t_opt_from == "power":
            optimal = float(times[positive][np.argmax(power)])
        else:
            optimal = float(times[np.argmax(work)])
        return power_max, optimal

    def result(self, t_opt_from: str = "power") -> QuenchResult:
        times = self.spec.times
        work = self.stored_work_series(times)
        power = self.power_series(times)
        entropy = self.entropy_series(times)
        power_max, optimal = self.power_summary(times, t_opt_from=t_opt_from)
        peak = int(np.argmax(work))
        return QuenchResult(
            times=times,
            work_series=work,
            power_series=power,
            entropy_series=entropy,
            work_max=float(work[peak]),
            work_max_time=float(times[peak]),
            power_max=power_max,
            optimal_time=optimal,
            average_work=self.long_time_average_work(),
            work_variance=self.work_variance(),
        )


def phase_boundary(num_spins: int, anisotropy: float, fields: np.ndarray,
                   num_pairs: int, threshold: float = 1e-6,
                   coupling: float = 1.0) -> np.ndarray:
    """Critical field per low-lying doublet from a gap-closing scan.

    Doublet p pairs levels (2p, 2p+1). Its critical field is the largest
    scanned field at which the intra-doublet gap stays below
    threshold * bandwidth; doublets that never close on the grid report nan.
    """
    fields = np.asarray(fields, dtype=float)
    if num_pairs < 1:
        raise ValueError(f"num_pairs must be >= 1, got {num_pairs}")
    if 2 * num_pairs > num_spins:
        raise ValueError(f"num_pairs {num_pairs} exceeds available doublets for num_spins {num_spins}")
    critical = np.full(num_pairs, np.nan)
    for h in fields:
        params = LmgParams(num_spins, coupling=coupling, anisotropy=anisotropy, field=float(h))
        levels = diagonalize(build_lmg_hamiltonian(params)).eigenvalues
        bandwidth = levels[-1] - levels[0]
        for p in range(num_pairs):
            gap = levels[2 * p + 1] - levels[2 * p]
            if gap < threshold * bandwidth and (np.isnan(critical[p]) or h > critical[p]):
                critical[p] = h
    return critical
