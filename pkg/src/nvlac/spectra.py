"""Eigen-decomposition, level tracking across field orientations, and
extraction of the near-degenerate pair that forms an effective two-level
system at an avoided crossing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NotFoundError
from .operators import basis_ket, is_hermitian
from .system import DIMS, ELECTRON, FieldSpec, SpinSystemParams, build_hamiltonian


@dataclass
class EigenSystem:
    """Ascending eigenvalues (MHz) with eigenvectors as matrix columns."""
    values: np.ndarray
    vectors: np.ndarray
    labels: list | None = None


@dataclass
class TlsDescriptor:
    """The extracted two-level system: gap, eigenvectors, drive moment."""
    omega0: float
    psi1: np.ndarray
    psi2: np.ndarray
    moment: float
    theta_star: float = float("nan")


@dataclass
class LevelCurves:
    """Eigenvalue curves followed by eigenvector continuity, not by index."""
    theta_grid: np.ndarray
    curves: np.ndarray          # shape (n_tracks, n_theta), MHz
    track_states: np.ndarray    # final eigenvector per track, columns


def eigensystem(h: np.ndarray, check: bool = True) -> EigenSystem:
    """Full spectral decomposition of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if check and not is_hermitian(h, 1e-10):
        raise InvalidArgumentError("matrix is not Hermitian within tolerance")
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values=values, vectors=vectors)


def reference_pair_states(m_i2: int = 0):
    """Product states ((|-1> +- |+1>)/sqrt2) (x) |-1/2> (x) |m_i2>.

    These are the asymptotic forms of the anti-crossing pair; the branch is
    selected by the spin-1 nuclear projection m_i2 in {+1, 0, -1}.
    """
    inn = {1: 0, 0: 1, -1: 2}[m_i2]
    lo = basis_ket(DIMS, (2, 1, inn))   # electron -1
    hi = basis_ket(DIMS, (0, 1, inn))   # electron +1
    return (lo + hi) / np.sqrt(2), (lo - hi) / np.sqrt(2)


def pair_indices(eig: EigenSystem, refs=None):
    """Indices of the two eigenstates with maximal summed overlap on `refs`.

    Selection is by overlap, never by position in the sorted spectrum, so it
    stays stable through near-degeneracies. Returns (lower, upper).
    """
    if refs is None:
        refs = reference_pair_states()
    score = np.zeros(eig.vectors.shape[1])
    for r in refs:
        score += np.abs(r @ eig.vectors.conj()) ** 2
    idx = np.argsort(score)[-2:]
    return int(idx.min()), int(idx.max())


def tls_extract(eig: EigenSystem, pair, theta_star: float = float("nan")) -> TlsDescriptor:
    """Two-level descriptor for an eigenstate pair.

    The drive moment is |<psi1| Sz |psi2>| with Sz the electron operator on
    the full space.
    """
    i, j = pair
    if not (0 <= i < len(eig.values) and 0 <= j < len(eig.values)) or i == j:
        raise InvalidArgumentError("pair must be two distinct eigenstate indices")
    if eig.values[j] < eig.values[i]:
        i, j = j, i
    psi1, psi2 = eig.vectors[:, i], eig.vectors[:, j]
    moment = float(abs(psi1.conj() @ ELECTRON[2] @ psi2))
    return TlsDescriptor(omega0=float(eig.values[j] - eig.values[i]),
                         psi1=psi1, psi2=psi2, moment=moment, theta_star=theta_star)


def transition_moments(eig: EigenSystem, observable: np.ndarray) -> np.ndarray:
    """Matrix of |<i| O |j>| over all eigenstate pairs."""
    observable = np.asarray(observable, dtype=complex)
    if observable.shape != eig.vectors.shape:
        raise InvalidArgumentError("observable dimension does not match eigensystem")
    return np.abs(eig.vectors.conj().T @ observable @ eig.vectors)


def _eig_at(params, b, phi, theta):
    return eigensystem(build_hamiltonian(params, FieldSpec(b, theta, phi)), check=False)


def _assign(prev_vectors, eig):
    """Greedy maximum-overlap assignment of tracked states onto eigenvectors.

    Repeatedly claims the globally largest remaining overlap. Returns
    (indices, worst_overlap); a low worst_overlap tells the caller the step
    was too coarse and needs refinement.
    """
    overlap = np.abs(prev_vectors.conj().T @ eig.vectors)  # (n_tracks, n_levels)
    n_tracks = overlap.shape[0]
    out = np.full(n_tracks, -1)
    work = overlap.copy()
    worst = 1.0
    for _ in range(n_tracks):
        t, k = np.unravel_index(np.argmax(work), work.shape)
        worst = min(worst, work[t, k])
        out[t] = k
        work[t, :] = -1.0
        work[:, k] = -1.0
    return out, worst


def track_levels(params: SpinSystemParams, b: float, phi: float,
                 theta_grid, subset=None, max_refine: int = 20) -> LevelCurves:
    """Follow eigenvalue curves over a theta sweep by eigenvector overlap.

    `subset` selects which levels to track, as indices into the ascending
    spectrum at the first grid point (default: all). Between grid points the
    assignment is refined adaptively until every step overlap exceeds 0.5,
    so curves may cross and anti-cross without swapping identity.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.ndim != 1 or len(theta_grid) < 1:
        raise InvalidArgumentError("theta_grid must be a non-empty 1-d array")
    if len(theta_grid) > 1 and not np.all(np.diff(theta_grid) > 0):
        raise InvalidArgumentError("theta_grid must be strictly increasing")

    eig = _eig_at(params, b, phi, theta_grid[0])
    if subset is None:
        subset = np.arange(len(eig.values))
    subset = np.asarray(subset, dtype=int)
    curves = np.empty((len(subset), len(theta_grid)))
    curves[:, 0] = eig.values[subset]
    vectors = eig.vectors[:, subset]

    for g in range(1, len(theta_grid)):
        th_prev, th_next = theta_grid[g - 1], theta_grid[g]
        # walk from th_prev to th_next, bisecting any step whose assignment
        # quality drops to 0.5 or below
        stack = [(th_prev, th_next)]
        depth = 0
        while stack:
            a, c = stack.pop()
            eig = _eig_at(params, b, phi, c)
            idx, worst = _assign(vectors, eig)
            if worst <= 0.5 and depth < max_refine:
                depth += 1
                mid = 0.5 * (a + c)
                stack.append((mid, c))
                stack.append((a, mid))
                continue
            vectors = eig.vectors[:, idx]
            if not stack:
                curves[:, g] = eig.values[idx]
            # intermediate refinement points update the reference vectors only
    return LevelCurves(theta_grid=theta_grid, curves=curves, track_states=vectors)


def _golden_min(fn, lo: float, hi: float, tol: float):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    invphi = (np.sqrt(5) - 1) / 2
    a, b = float(lo), float(hi)
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def find_lac(params: SpinSystemParams, b: float, phi: float, theta_range,
             pair=None, coarse_step: float = 0.05, tol: float = 1e-4) -> TlsDescriptor:
    """Locate the angle minimizing the tracked pair gap within `theta_range`.

    The pair is identified at every angle by overlap with `pair` reference
    states (default: the m_i2 = 0 anti-crossing pair). A coarse scan brackets
    the minimum, golden-section search refines it below `tol` degrees.
    Raises NotFoundError when the range holds no interior minimum.
    """
    lo, hi = float(theta_range[0]), float(theta_range[1])
    if not lo < hi:
        raise InvalidArgumentError("theta_range must satisfy lo < hi")
    refs = pair if pair is not None else reference_pair_states()

    def gap(theta):
        eig = _eig_at(params, b, phi, theta)
        i, j = pair_indices(eig, refs)
        return eig.values[j] - eig.values[i]

    n = max(9, int(np.ceil((hi - lo) / coarse_step)) + 1)
    grid = np.linspace(lo, hi, n)
    gaps = np.array([gap(t) for t in grid])
    k = int(np.argmin(gaps))
    if k == 0 or k == n - 1:
        raise NotFoundError(
            "no interior gap minimum in [%g, %g] degrees (edge minimum %g MHz)"
            % (lo, hi, gaps[k]))
    theta_star = _golden_min(gap, grid[k - 1], grid[k + 1], tol)
    eig = _eig_at(params, b, phi, theta_star)
    return tls_extract(eig, pair_indices(eig, refs), theta_star=theta_star)
