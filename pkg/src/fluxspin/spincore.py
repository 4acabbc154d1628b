"""Electron-nuclear spin Hamiltonians and their exact spectra.

The Hamiltonian of one donor electron coupled to its nucleus, in
frequency units (H/h, MHz), with the field B along the quantization
axis z:

    H/h = (g mu_B B / h) Sz (x) 1  +  (A/h) [Sz (x) Iz + (S+ (x) I- + S- (x) I+) / 2]

The isotropy of the coupling makes only |B| physical, and the choice of
B along z keeps every matrix element real, so all spectra come from a
real symmetric eigenproblem.  A cyclic Jacobi eigensolver is used: the
matrices are at most 20x20 and robustness plus bit-reproducible output
matter more than asymptotic speed here.

An independent closed-form solution for the S = 1/2 levels (the
Breit-Rabi expression without a nuclear Zeeman term) serves as a
cross-check oracle for the numerical path.

All functions are pure; returned arrays are freshly allocated and safe
to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constants import MU_B_MHZ_PER_MT
from .species import SpinSpecies, UnsupportedSpeciesError, _is_half_integer


class ConvergenceError(RuntimeError):
    """Eigensolver failed to reach its convergence target."""


@dataclass(frozen=True)
class SpinOperators:
    """Angular momentum matrices for one spin s in the |s, m> basis.

    Basis states are ordered m = s, s-1, ..., -s.  sx, sz and the ladder
    operators are real; sy is purely imaginary.
    """

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray


def spin_operators(s: float) -> SpinOperators:
    """Build the spin matrices for a half-integer spin quantum number s.

    Args:
        s: spin quantum number; 2s must be a non-negative integer.

    Returns:
        SpinOperators with (2s+1)x(2s+1) matrices.  sz is diagonal with
        entries s, s-1, ..., -s; the ladder operators carry the standard
        elements sqrt(s(s+1) - m(m+-1)).
    """
    if not _is_half_integer(s) or s < 0:
        raise ValueError(f"spin quantum number must be a non-negative half-integer, got {s}")
    dim = int(round(2 * s)) + 1
    m = s - np.arange(dim)
    sz = np.diag(m)
    splus = np.zeros((dim, dim))
    for k in range(1, dim):
        splus[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sminus = splus.T.copy()
    sx = (splus + sminus) / 2.0
    sy = (splus - sminus) / 2.0j
    return SpinOperators(sx=sx, sy=sy, sz=sz, splus=splus, sminus=sminus)


def build_hamiltonian(species: SpinSpecies, b_mt: float) -> np.ndarray:
    """Assemble the spin Hamiltonian in MHz at field b_mt (mT, along z).

    The product basis is |m_S, m_I> with the electron index slowest.
    The result is real symmetric and traceless by construction.
    """
    if b_mt < 0:
        raise ValueError(f"field must be non-negative, got {b_mt} mT")
    el = spin_operators(species.S)
    dim_i = int(round(2 * species.I)) + 1
    eye_i = np.eye(dim_i)
    h = species.g * MU_B_MHZ_PER_MT * b_mt * np.kron(el.sz, eye_i)
    if species.I > 0 and species.A != 0.0:
        nu = spin_operators(species.I)
        h = h + species.A * (
            np.kron(el.sz, nu.sz)
            + 0.5 * (np.kron(el.splus, nu.sminus) + np.kron(el.sminus, nu.splus))
        )
    return h


def electron_sz(species: SpinSpecies) -> np.ndarray:
    """Sz of the electron spin in the product basis."""
    dim_i = int(round(2 * species.I)) + 1
    return np.kron(spin_operators(species.S).sz, np.eye(dim_i))


def electron_sx(species: SpinSpecies) -> np.ndarray:
    """Sx of the electron spin in the product basis (microwave drive operator)."""
    dim_i = int(round(2 * species.I)) + 1
    return np.kron(spin_operators(species.S).sx, np.eye(dim_i))


def total_f_squared(species: SpinSpecies) -> np.ndarray:
    """F^2 = (S + I)^2 in the product basis; commutes with H at B = 0."""
    el = spin_operators(species.S)
    dim_i = int(round(2 * species.I)) + 1
    if species.I > 0:
        nu = spin_operators(species.I)
        iz, iplus, iminus = nu.sz, nu.splus, nu.sminus
        i2 = species.I * (species.I + 1) * np.eye(dim_i)
    else:
        iz = iplus = iminus = np.zeros((1, 1))
        i2 = np.zeros((1, 1))
    s2 = species.S * (species.S + 1) * np.eye(el.sz.shape[0])
    return (
        np.kron(s2, np.eye(dim_i))
        + np.kron(np.eye(el.sz.shape[0]), i2)
        + 2.0 * np.kron(el.sz, iz)
        + np.kron(el.splus, iminus)
        + np.kron(el.sminus, iplus)
    )


def _jacobi_eigh(h: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Sweeps run until the off-diagonal Frobenius norm drops below
    1e-12 * ||H||_F, capped at max_sweeps.  Returns (eigenvalues,
    eigenvector columns) in rotation order (unsorted).
    """
    a = np.array(h, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    norm_h = float(np.linalg.norm(a))
    if norm_h == 0.0:
        return np.zeros(n), v
    target = 1e-12 * norm_h
    # Rotations below this contribute negligibly to the off-diagonal norm.
    skip = target / (n * n)

    def off_norm() -> float:
        return float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({max_sweeps}); off-diagonal residual "
            f"{off_norm():.3e} MHz vs target {target:.3e} MHz"
        )
    return np.diag(a).copy(), v


@dataclass(frozen=True)
class EigenSystem:
    """Full spectrum of one Hamiltonian: sorted energies and eigenvectors.

    energies are in MHz, ascending.  vectors[:, k] is the eigenvector of
    energies[k] in the product basis.  Ordering inside degenerate
    clusters follows the basis index of each vector's largest-magnitude
    component, and signs are fixed so that component is positive, which
    makes the output reproducible.
    """

    energies: np.ndarray
    vectors: np.ndarray
    dimension: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "dimension", int(self.energies.shape[0]))

    def orthonormality_defect(self) -> float:
        """Max entrywise deviation of V^T V from the identity."""
        gram = self.vectors.T @ self.vectors
        return float(np.max(np.abs(gram - np.eye(self.dimension))))

    def reconstruction_defect(self, h: np.ndarray) -> float:
        """Max entrywise |V E V^T - H|, in MHz."""
        rebuilt = self.vectors @ np.diag(self.energies) @ self.vectors.T
        return float(np.max(np.abs(rebuilt - h)))


# Energy gaps below this are treated as one degenerate cluster (MHz).
DEGENERACY_TOL_MHZ = 1e-6


def eigensystem(h: np.ndarray, max_sweeps: int = 100) -> EigenSystem:
    """Diagonalize a real symmetric matrix with deterministic ordering.

    Raises:
        ValueError: if h is not symmetric to within 1e-10 relative.
        ConvergenceError: if the Jacobi iteration does not converge.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(float(np.max(np.abs(h))), 1.0)
    if float(np.max(np.abs(h - h.T))) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric to within 1e-10 relative")
    w, v = _jacobi_eigh(0.5 * (h + h.T), max_sweeps=max_sweeps)

    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]

    # Reorder inside degenerate clusters and pin the sign convention.
    n = w.shape[0]
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] <= DEGENERACY_TOL_MHZ:
            stop += 1
        cols = list(range(start, stop))
        keys = [int(np.argmax(np.abs(v[:, k]))) for k in cols]
        ranked = [c for _, c in sorted(zip(keys, cols))]
        v[:, cols] = v[:, ranked]
        w[cols] = w[ranked]
        for k in cols:
            lead = int(np.argmax(np.abs(v[:, k])))
            if v[lead, k] < 0:
                v[:, k] = -v[:, k]
        start = stop
    return EigenSystem(energies=w, vectors=v)


@lru_cache(maxsize=512)
def eigensystem_at(species: SpinSpecies, b_mt: float) -> EigenSystem:
    """Cached spectrum of a species at one field point."""
    return eigensystem(build_hamiltonian(species, b_mt))


def breit_rabi_levels(species: SpinSpecies, b_mt: float) -> np.ndarray:
    """Closed-form S = 1/2 hyperfine + electron Zeeman levels, sorted (MHz).

    For |m_F| < I + 1/2 the two branches are

        E(m_F, +-)/h = -A/4 +- (A(I+1/2)/2) sqrt(1 + 4 m_F xi/(2I+1) + xi^2)

    with xi = g mu_B B / (A(I+1/2)).  The stretched states
    m_F = +-(I+1/2) exist only on the upper branch and are exact product
    states; they are evaluated on the exact linear branch
    E/h = A I/2 +- g mu_B B/2, which stays correct past xi = 1 where the
    square root's absolute value would fold the lower one back up.
    """
    if abs(species.S - 0.5) > 1e-9:
        raise UnsupportedSpeciesError("closed form requires S = 1/2")
    if b_mt < 0:
        raise ValueError(f"field must be non-negative, got {b_mt} mT")
    zeeman = species.g * MU_B_MHZ_PER_MT * b_mt
    i_qn = species.I
    if species.A == 0.0 or i_qn == 0.0:
        half = np.full(int(round(2 * i_qn)) + 1, zeeman / 2.0)
        return np.sort(np.concatenate([-half, half]))
    a = species.A
    scale = a * (i_qn + 0.5)
    xi = zeeman / scale
    two_i_plus_1 = 2 * i_qn + 1
    levels = []
    m_f = -(i_qn - 0.5)
    while m_f <= (i_qn - 0.5) + 1e-9:
        root = np.sqrt(1.0 + 4.0 * m_f * xi / two_i_plus_1 + xi * xi)
        levels.append(-a / 4.0 - scale / 2.0 * root)
        levels.append(-a / 4.0 + scale / 2.0 * root)
        m_f += 1.0
    levels.append(a * i_qn / 2.0 + zeeman / 2.0)
    levels.append(a * i_qn / 2.0 - zeeman / 2.0)
    return np.sort(np.asarray(levels))


@dataclass(frozen=True)
class Transition:
    """One level pair with its frequency and electron-drive intensity."""

    i: int
    j: int
    frequency: float  # MHz, energies[j] - energies[i] >= 0
    intensity: float  # |<i| Sx (x) 1 |j>|^2, dimensionless
    allowed: bool


def transition_table(
    es: EigenSystem, species: SpinSpecies, intensity_floor: float = 1e-6
) -> list[Transition]:
    """All level pairs (i < j) with |<i|Sx|j>|^2 for the electron spin.

    Pairs below intensity_floor are kept but flagged as forbidden.
    """
    if es.dimension != species.dimension:
        raise ValueError(
            f"eigensystem dimension {es.dimension} does not match "
            f"species dimension {species.dimension}"
        )
    sx = electron_sx(species)
    amp = es.vectors.T @ sx @ es.vectors
    rows = []
    for i in range(es.dimension):
        for j in range(i + 1, es.dimension):
            inten = float(amp[i, j] ** 2)
            rows.append(
                Transition(
                    i=i,
                    j=j,
                    frequency=float(es.energies[j] - es.energies[i]),
                    intensity=inten,
                    allowed=inten >= intensity_floor,
                )
            )
    return rows


@dataclass(frozen=True)
class Resonance:
    """A field where one transition matches the probe frequency."""

    field_mt: float
    i: int
    j: int
    intensity: float
    g_eff: float


def g_effective(f_mw_ghz: float, b_mt: float) -> float:
    """Effective g such that h f_mw = g_eff mu_B B_res."""
    return 1000.0 * f_mw_ghz / (MU_B_MHZ_PER_MT * b_mt)


def resonance_fields(
    species: SpinSpecies,
    f_mw_ghz: float,
    b_range: tuple[float, float],
    intensity_floor: float = 1e-6,
    grid_points: int = 2000,
) -> list[Resonance]:
    """Fields inside b_range where any allowed transition hits f_mw.

    Roots of f_ij(B) = f_mw are bracketed by sign changes on a uniform
    field grid and refined by bisection to |delta f| <= 1 kHz.  The level
    frequencies come from the closed-form S = 1/2 solution (which matches
    the numerical spectrum to well below the bisection tolerance);
    intensities are evaluated by diagonalization at each root.

    Returns resonances sorted by field, keeping only intensity >=
    intensity_floor.  An empty result is not an error.
    """
    if f_mw_ghz <= 0:
        raise ValueError(f"probe frequency must be positive, got {f_mw_ghz} GHz")
    b_lo, b_hi = b_range
    if not (b_hi > b_lo >= 0):
        raise ValueError(f"field range must be ascending and non-negative, got {b_range}")
    if grid_points < 2:
        raise ValueError("grid must have at least 2 points")
    f_mw_mhz = 1000.0 * f_mw_ghz
    grid = np.linspace(b_lo, b_hi, grid_points)
    levels = np.vstack([breit_rabi_levels(species, b) for b in grid])
    dim = species.dimension
    found: list[Resonance] = []
    for i in range(dim):
        for j in range(i + 1, dim):
            mismatch = levels[:, j] - levels[:, i] - f_mw_mhz
            signs = np.sign(mismatch)
            hits = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
            exact = np.nonzero(mismatch == 0.0)[0]
            roots = []
            for k in hits:
                lo, hi = grid[k], grid[k + 1]
                f_lo = mismatch[k]
                while True:
                    mid = 0.5 * (lo + hi)
                    lv = breit_rabi_levels(species, mid)
                    f_mid = lv[j] - lv[i] - f_mw_mhz
                    if abs(f_mid) <= 1e-3 or hi - lo < 1e-12:
                        roots.append(mid)
                        break
                    if (f_mid > 0) == (f_lo > 0):
                        lo, f_lo = mid, f_mid
                    else:
                        hi = mid
            roots.extend(grid[k] for k in exact)
            for b_res in roots:
                es = eigensystem_at(species, float(b_res))
                sx = electron_sx(species)
                amp = float(es.vectors[:, i] @ sx @ es.vectors[:, j])
                inten = amp * amp
                if inten >= intensity_floor:
                    found.append(
                        Resonance(
                            field_mt=float(b_res),
                            i=i,
                            j=j,
                            intensity=inten,
                            g_eff=g_effective(f_mw_ghz, float(b_res)),
                        )
                    )
    found.sort(key=lambda r: (r.field_mt, r.i, r.j))
    return found
