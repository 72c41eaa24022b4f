"""Hamiltonian assembly for the non-reciprocal two-leg ladder.

Intra-leg hopping is asymmetric: on leg s the term -jl_s a_x^dag a_{x+1}
moves a particle left and -jr_s a_{x+1}^dag a_x moves it right, with the
asymmetry reversed between the legs. Rungs couple the legs reciprocally
with amplitude +jp on every cell. Diagonal terms are on-site repulsion
(u/2) n(n-1) for bosons or nearest-neighbor repulsion u_nn n_x n_{x+1}
along each leg for fermions, plus a leg imbalance mu (N_A - N_B).
Boundaries are always open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .fock import Basis, apply_single_hop, enumerate_basis

_FINITE_FIELDS = ("jl_a", "jr_a", "jl_b", "jr_b", "jp", "mu", "u", "u_nn")


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set for one ladder Hamiltonian.

    Defaults give the reference non-reciprocal pair jl_a=1, jr_a=0.5 with
    the mirrored asymmetry on leg B and everything else switched off.
    """

    cells: int
    particles: int
    statistics: str = "boson"
    jl_a: float = 1.0
    jr_a: float = 0.5
    jl_b: float = 0.5
    jr_b: float = 1.0
    jp: float = 0.0
    mu: float = 0.0
    u: float = 0.0
    u_nn: float = 0.0

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError(f"cells must be >= 1, got {self.cells}")
        if self.particles < 1:
            raise ValueError(f"particles must be >= 1, got {self.particles}")
        if self.statistics not in ("boson", "fermion"):
            raise ValueError(f"statistics must be 'boson' or 'fermion', "
                             f"got {self.statistics!r}")
        if self.statistics == "fermion" and self.particles > 2 * self.cells:
            raise ValueError(f"cannot place {self.particles} fermions on "
                             f"{2 * self.cells} sites")
        for name in _FINITE_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.statistics == "boson" and self.u_nn != 0.0:
            raise ValueError("u_nn applies to fermions only; use u for bosons")
        if self.statistics == "fermion" and self.u != 0.0:
            raise ValueError("u applies to bosons only; use u_nn for fermions")

    @classmethod
    def from_j_alpha(cls, cells: int, particles: int, j: float, alpha: float,
                     **kwargs) -> "ModelParams":
        """Build amplitudes from a symmetric scale j and imbalance alpha:
        leg A hops with (j e^alpha, j e^-alpha), leg B with the mirror."""
        jl = j * math.exp(alpha)
        jr = j * math.exp(-alpha)
        return cls(cells=cells, particles=particles,
                   jl_a=jl, jr_a=jr, jl_b=jr, jr_b=jl, **kwargs)

    def with_updates(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class SparseOperator:
    """Coordinate-format operator on a fixed basis; duplicates add."""

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dimension, self.dimension), dtype=self.values.dtype)
        np.add.at(dense, (self.rows, self.cols), self.values)
        return dense


def onsite_energy(state: Sequence[int], params: ModelParams) -> float:
    """Diagonal energy of one occupation state: interaction plus mu imbalance."""
    cells = params.cells
    if len(state) != 2 * cells:
        raise ValueError(f"state length {len(state)} does not match 2L={2 * cells}")
    n_a = sum(state[:cells])
    n_b = sum(state[cells:])
    energy = params.mu * (n_a - n_b)
    if params.statistics == "boson":
        energy += 0.5 * params.u * sum(n * (n - 1) for n in state)
    else:
        adj = 0
        for off in (0, cells):
            for x in range(cells - 1):
                adj += state[off + x] * state[off + x + 1]
        energy += params.u_nn * adj
    return energy


def _leg_amplitudes(params: ModelParams):
    # (offset, jl, jr) per leg; leg A occupies combined sites 0..L-1.
    return ((0, params.jl_a, params.jr_a),
            (params.cells, params.jl_b, params.jr_b))


def build_hamiltonian(params: ModelParams, basis: Basis) -> SparseOperator:
    """Assemble the many-body Hamiltonian on the given basis.

    Hop terms: for each leg s and bond (x, x+1), -jl_s moves a particle from
    x+1 to x and -jr_s from x to x+1; rung terms move between legs with +jp
    in both directions. The result conserves particle number by construction
    and has real entries.
    """
    if (basis.cells, basis.particles, basis.statistics) != \
            (params.cells, params.particles, params.statistics):
        raise ValueError(f"basis {basis!r} does not match params "
                         f"(cells={params.cells}, particles={params.particles}, "
                         f"statistics={params.statistics})")
    cells = params.cells
    stats = params.statistics
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []

    def add_hop(state, col, from_site, to_site, coeff):
        if coeff == 0.0:
            return
        moved = apply_single_hop(state, from_site, to_site, stats)
        if moved is None:
            return
        new_state, amp = moved
        rows.append(basis.rank(new_state))
        cols.append(col)
        vals.append(coeff * amp)

    for col, state in enumerate(basis.states):
        diag = onsite_energy(state, params)
        if diag != 0.0:
            rows.append(col)
            cols.append(col)
            vals.append(diag)
        for off, jl, jr in _leg_amplitudes(params):
            for x in range(cells - 1):
                a, b = off + x, off + x + 1
                add_hop(state, col, b, a, -jl)
                add_hop(state, col, a, b, -jr)
        for x in range(cells):
            add_hop(state, col, x, cells + x, params.jp)
            add_hop(state, col, cells + x, x, params.jp)

    return SparseOperator(dimension=basis.dimension,
                          rows=np.asarray(rows, dtype=np.int64),
                          cols=np.asarray(cols, dtype=np.int64),
                          values=np.asarray(vals, dtype=np.float64))


def build_single_particle_matrix(params: ModelParams) -> np.ndarray:
    """Dense 2L x 2L one-particle matrix in the combined site ordering.

    Equals the N=1 many-body Hamiltonian exactly (the N=1 basis index is the
    combined site index and interactions vanish for one particle).
    """
    cells = params.cells
    n = 2 * cells
    h = np.zeros((n, n), dtype=np.float64)
    for off, jl, jr in _leg_amplitudes(params):
        for x in range(cells - 1):
            a, b = off + x, off + x + 1
            h[a, b] -= jl
            h[b, a] -= jr
    for x in range(cells):
        h[x, cells + x] += params.jp
        h[cells + x, x] += params.jp
    sign = np.ones(n)
    sign[cells:] = -1.0
    h += params.mu * np.diag(sign)
    return h


def sector_basis(params: ModelParams, capacity: Optional[int] = None) -> Basis:
    """Enumerate the basis matching a parameter set."""
    return enumerate_basis(params.cells, params.particles, params.statistics,
                           capacity=capacity)
