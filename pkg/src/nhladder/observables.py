"""State observables and spectral cluster analysis.

Weights come from |psi|^2 of right eigenvectors, normalized to one. Spatial
observables use the combined site ordering (leg A sites 0..L-1, leg B sites
L..2L-1). Cluster analysis groups eigenvalues by gaps along the real axis
and labels each group by where its density lives (left edge, right edge,
both) and by the pair-participation measure of its most complex member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from .eig import SpectrumResult
from .fock import Basis

ENTROPY_CLAMP = 1e-14
DEAD_ZONE = 0.05
EDGE_FRACTION = 0.25
BI_THRESHOLD = 0.30
SIDE_THRESHOLD = 0.60
ALLOWED_LABELS = ("RS", "BiS", "LS", "RB", "LB", "mixed", "unclassified")


def _weights(vector: np.ndarray) -> np.ndarray:
    v = np.asarray(vector)
    w = np.abs(v) ** 2
    total = w.sum()
    if total == 0.0:
        raise ValueError("cannot form weights from a zero vector")
    return w / total


def site_density(vector: np.ndarray, basis: Basis) -> np.ndarray:
    """Expected occupation per combined site; sums to the particle number."""
    if len(vector) != basis.dimension:
        raise ValueError(f"vector length {len(vector)} does not match "
                         f"basis dimension {basis.dimension}")
    return _weights(vector) @ basis.occupations


def polarization(vector: np.ndarray, basis: Basis) -> float:
    """Leg imbalance (N_A - N_B) / (N_A + N_B), in [-1, 1]."""
    dens = site_density(vector, basis)
    cells = basis.cells
    n_a = dens[:cells].sum()
    n_b = dens[cells:].sum()
    return float((n_a - n_b) / (n_a + n_b))


def pair_density(vector: np.ndarray, basis: Basis) -> np.ndarray:
    """Two-site density rho(x1, x2) = <n_x1 n_x2>, including the diagonal
    <n_x^2>. Requires at least two particles."""
    if basis.particles < 2:
        raise ValueError("pair density requires at least two particles")
    if len(vector) != basis.dimension:
        raise ValueError(f"vector length {len(vector)} does not match "
                         f"basis dimension {basis.dimension}")
    w = _weights(vector)
    occ = basis.occupations
    return (occ * w[:, None]).T @ occ


def pair_correlation(vector: np.ndarray, basis: Basis) -> np.ndarray:
    """Connected-ordering matrix <n_x1 n_x2> - delta(x1, x2) <n_x1>, i.e.
    normal-ordered pair expectations."""
    rho = pair_density(vector, basis)
    dens = site_density(vector, basis)
    return rho - np.diag(dens)


def correlation_ncor(vector: np.ndarray, basis: Basis) -> float:
    """Pair participation measure (tr G)^2 - ||G||_F^2 for the normal-ordered
    matrix G; defined for exactly two particles.

    Equals -2 for two pinned distinguishable-site particles, 0 for a single
    doublon, and approaches 4 (1 - 1/L) for a doublon spread evenly over L
    cells of one leg."""
    if basis.particles != 2:
        raise ValueError(f"correlation_ncor is defined for exactly two "
                         f"particles, got {basis.particles}")
    g = pair_correlation(vector, basis)
    return float(np.trace(g) ** 2 - np.sum(g * g))


def site_density_all(eigenvectors: np.ndarray, basis: Basis) -> np.ndarray:
    """Per-state site densities for every eigenvector column; shape
    (n_states, 2L)."""
    w = np.abs(eigenvectors) ** 2
    w = w / w.sum(axis=0)
    return w.T @ basis.occupations


def polarization_all(eigenvectors: np.ndarray, basis: Basis) -> np.ndarray:
    dens = site_density_all(eigenvectors, basis)
    cells = basis.cells
    n_a = dens[:, :cells].sum(axis=1)
    n_b = dens[:, cells:].sum(axis=1)
    return (n_a - n_b) / (n_a + n_b)


def correlation_ncor_all(eigenvectors: np.ndarray, basis: Basis,
                         chunk: int = 128) -> np.ndarray:
    """correlation_ncor for every column, evaluated in chunks."""
    if basis.particles != 2:
        raise ValueError(f"correlation_ncor is defined for exactly two "
                         f"particles, got {basis.particles}")
    occ = basis.occupations
    n_states = eigenvectors.shape[1]
    out = np.empty(n_states)
    w_all = np.abs(eigenvectors) ** 2
    w_all = w_all / w_all.sum(axis=0)
    dens_all = w_all.T @ occ
    for start in range(0, n_states, chunk):
        stop = min(start + chunk, n_states)
        rho = np.einsum("ib,ix,iy->bxy", w_all[:, start:stop], occ, occ,
                        optimize=True)
        dens = dens_all[start:stop]
        trace_g = rho.trace(axis1=1, axis2=2) - dens.sum(axis=1)
        sq = np.sum(rho * rho, axis=(1, 2))
        diag = np.einsum("bxx->bx", rho)
        # ||G||_F^2 where G = rho - diag(dens): only diagonal entries shift.
        sq += np.sum(dens * dens, axis=1) - 2.0 * np.sum(diag * dens, axis=1)
        out[start:stop] = trace_g ** 2 - sq
    return out


def leg_sites(cells: int, leg: str) -> List[int]:
    """Combined site indices of one leg."""
    if leg == "A":
        return list(range(cells))
    if leg == "B":
        return list(range(cells, 2 * cells))
    raise ValueError(f"leg must be 'A' or 'B', got {leg!r}")


def left_half_sites(cells: int) -> List[int]:
    """Combined site indices of cells 1..L//2 on both legs."""
    half = cells // 2
    if half < 1:
        raise ValueError(f"left half is empty for cells={cells}")
    return list(range(half)) + list(range(cells, cells + half))


def _fermion_split_sign(state: Sequence[int], subset: Sequence[int],
                        in_subset: np.ndarray) -> float:
    # Parity of the permutation moving subset creation operators (site order)
    # in front of complement operators.
    crossings = 0
    for s in subset:
        if state[s]:
            for c in range(s):
                if not in_subset[c] and state[c]:
                    crossings += 1
    return -1.0 if crossings % 2 else 1.0


def entanglement_entropy(vector: np.ndarray, basis: Basis,
                         subset: Sequence[int]) -> float:
    """Von Neumann entropy of the reduced state on a site subset.

    Builds the amplitude matrix indexed by (subset occupation, complement
    occupation), takes singular values, and sums -p ln p over p = s^2 with
    contributions below 1e-14 dropped. Fermion amplitudes pick up the
    parity of reordering subset operators in front of complement operators.
    Symmetric under subset <-> complement.
    """
    if len(vector) != basis.dimension:
        raise ValueError(f"vector length {len(vector)} does not match "
                         f"basis dimension {basis.dimension}")
    nsites = basis.nsites
    subset = sorted(int(s) for s in subset)
    if not subset:
        raise ValueError("subset must be non-empty")
    if subset[0] < 0 or subset[-1] >= nsites:
        raise ValueError(f"subset sites must be in 0..{nsites - 1}")
    if len(set(subset)) != len(subset):
        raise ValueError("subset contains duplicate sites")
    if len(subset) == nsites:
        raise ValueError("subset must be a proper subset of the sites")

    in_subset = np.zeros(nsites, dtype=bool)
    in_subset[subset] = True
    complement = [s for s in range(nsites) if not in_subset[s]]
    fermion = basis.statistics == "fermion"

    v = np.asarray(vector, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot compute entropy of a zero vector")
    v = v / norm

    row_index: dict = {}
    col_index: dict = {}
    entries = []
    for i, state in enumerate(basis.states):
        amp = v[i]
        if amp == 0.0:
            continue
        key_sub = tuple(state[s] for s in subset)
        key_comp = tuple(state[c] for c in complement)
        r = row_index.setdefault(key_sub, len(row_index))
        c = col_index.setdefault(key_comp, len(col_index))
        if fermion:
            amp = amp * _fermion_split_sign(state, subset, in_subset)
        entries.append((r, c, amp))

    matrix = np.zeros((len(row_index), len(col_index)), dtype=np.complex128)
    for r, c, amp in entries:
        matrix[r, c] += amp
    singular = np.linalg.svd(matrix, compute_uv=False)
    probs = singular ** 2
    probs = probs[probs >= ENTROPY_CLAMP]
    return float(-np.sum(probs * np.log(probs)))


@dataclass(frozen=True)
class Cluster:
    """A contiguous group of eigenvalues along the real axis.

    members are indices into the originating SpectrumResult, sorted by
    Re(E); representative is the member with the largest |Im(E)|."""

    members: Tuple[int, ...]
    re_range: Tuple[float, float]
    max_im: float
    representative: int
    label: str = "unclassified"

    @property
    def size(self) -> int:
        return len(self.members)


def default_min_gap(jl: float, jr: float) -> float:
    """Gap floor tied to the dominant hop scale: 0.1 max(|jl|, |jr|)."""
    return 0.1 * max(abs(jl), abs(jr))


def cluster_spectrum(result: SpectrumResult, gap_factor: float = 10.0,
                     min_gap: float = 0.1) -> List[Cluster]:
    """Partition the spectrum into clusters separated by real-axis gaps
    larger than max(min_gap, gap_factor * median neighbor gap).

    Every eigenvalue index lands in exactly one cluster; clusters are
    returned ordered by Re(E).
    """
    if gap_factor <= 0.0:
        raise ValueError(f"gap_factor must be positive, got {gap_factor}")
    if min_gap < 0.0:
        raise ValueError(f"min_gap must be non-negative, got {min_gap}")
    ev = result.eigenvalues
    order = np.argsort(ev.real, kind="stable")
    res = ev.real[order]
    gaps = np.diff(res)
    median_gap = float(np.median(gaps)) if len(gaps) else 0.0
    threshold = max(min_gap, gap_factor * median_gap)
    breaks = np.where(gaps > threshold)[0]
    clusters = []
    start = 0
    for stop in list(breaks + 1) + [len(order)]:
        members = order[start:stop]
        ims = np.abs(ev.imag[members])
        rep = members[int(np.argmax(ims))]
        clusters.append(Cluster(members=tuple(int(m) for m in members),
                                re_range=(float(res[start]), float(res[stop - 1])),
                                max_im=float(ev.imag[members].max()),
                                representative=int(rep)))
        start = stop
    return clusters


def _edge_weights(mean_density: np.ndarray, cells: int) -> Tuple[float, float]:
    window = max(1, math.ceil(cells * EDGE_FRACTION))
    total = mean_density.sum()
    if total <= 0.0:
        return 0.0, 0.0
    left = mean_density[:window].sum() + mean_density[cells:cells + window].sum()
    right = mean_density[cells - window:cells].sum() + mean_density[2 * cells - window:].sum()
    return float(left / total), float(right / total)


def _compose_label(ncor: float, left: float, right: float,
                   dead_zone: float) -> str:
    if left >= BI_THRESHOLD and right >= BI_THRESHOLD:
        prefix = "Bi"
    elif left >= SIDE_THRESHOLD:
        prefix = "L"
    elif right >= SIDE_THRESHOLD:
        prefix = "R"
    else:
        prefix = ""
    if math.isnan(ncor):
        return "unclassified"
    if -dead_zone <= ncor <= 0.0 or abs(ncor - 2.0) <= dead_zone:
        return "unclassified"
    if ncor < -dead_zone:
        label = prefix + "S"
    elif ncor > 2.0 + dead_zone:
        label = prefix + "B"
    else:
        label = "mixed"
    return label if label in ALLOWED_LABELS else "unclassified"


def classify_cluster(cluster: Cluster, result: SpectrumResult, basis: Basis,
                     dead_zone: float = DEAD_ZONE) -> str:
    """Label one cluster from its mean density profile and the pair
    participation of its representative.

    Prefix: Bi when both 25 percent edge windows hold at least 30 percent
    of the mean density, else L or R when one side holds at least 60
    percent. Suffix: S (scattering) for representative ncor below the dead
    zone around 0, B (bound) above the dead zone around 2; values between
    give mixed, values inside a dead zone or without a valid prefix and
    suffix combination give unclassified. For particle numbers other than
    two the ncor signal is undefined and the label is unclassified.
    """
    members = np.asarray(cluster.members)
    dens = site_density_all(result.eigenvectors[:, members], basis)
    mean_density = dens.mean(axis=0)
    left, right = _edge_weights(mean_density, basis.cells)
    if basis.particles == 2:
        ncor = correlation_ncor(result.eigenvectors[:, cluster.representative],
                                basis)
    else:
        ncor = math.nan
    return _compose_label(ncor, left, right, dead_zone)


def label_clusters(result: SpectrumResult, basis: Basis,
                   gap_factor: float = 10.0, min_gap: float = 0.1,
                   dead_zone: float = DEAD_ZONE) -> List[Cluster]:
    """cluster_spectrum followed by classify_cluster on each cluster."""
    clusters = cluster_spectrum(result, gap_factor=gap_factor, min_gap=min_gap)
    return [replace(c, label=classify_cluster(c, result, basis, dead_zone))
            for c in clusters]
