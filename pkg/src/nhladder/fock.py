"""Occupation-number basis for a two-leg ladder at fixed particle number.

Site convention: a ladder with L cells has 2L sites. Combined site indices
run 0..2L-1 with leg A first, so cell x (1-based) on leg A maps to x-1 and
cell x on leg B maps to L+x-1. Basis states are occupation tuples of length
2L listed in descending lexicographic order, which makes the N=1 basis index
coincide with the combined site index.
"""

from __future__ import annotations

import itertools
import math
import os
from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple

State = Tuple[int, ...]

DEFAULT_CAPACITY = 200_000
CAPACITY_ENV_VAR = "NHSE_CAPACITY"

LEGS = ("A", "B")


class CapacityError(RuntimeError):
    """Requested basis (or matrix) exceeds the configured size budget."""


def resolve_capacity(capacity: Optional[int] = None) -> int:
    """Return the effective capacity: explicit argument, else the
    NHSE_CAPACITY environment variable, else the built-in default."""
    if capacity is not None:
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        return capacity
    env = os.environ.get(CAPACITY_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{CAPACITY_ENV_VAR} must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValueError(f"{CAPACITY_ENV_VAR} must be positive, got {value}")
        return value
    return DEFAULT_CAPACITY


def combined_site(cell: int, leg: str, cells: int) -> int:
    """Map (cell, leg) with 1-based cell to the combined site index."""
    if cells < 1:
        raise ValueError(f"cells must be >= 1, got {cells}")
    if not 1 <= cell <= cells:
        raise ValueError(f"cell must be in 1..{cells}, got {cell}")
    if leg not in LEGS:
        raise ValueError(f"leg must be one of {LEGS}, got {leg!r}")
    return cell - 1 if leg == "A" else cells + cell - 1


def site_cell_leg(site: int, cells: int) -> Tuple[int, str]:
    """Inverse of combined_site: combined index -> (1-based cell, leg)."""
    if not 0 <= site < 2 * cells:
        raise ValueError(f"site must be in 0..{2 * cells - 1}, got {site}")
    if site < cells:
        return site + 1, "A"
    return site - cells + 1, "B"


def basis_dimension(cells: int, particles: int, statistics: str = "boson") -> int:
    """Dimension of the fixed-N sector: C(2L+N-1, N) bosons, C(2L, N) fermions."""
    nsites = 2 * cells
    if statistics == "boson":
        return math.comb(nsites + particles - 1, particles)
    if statistics == "fermion":
        return math.comb(nsites, particles)
    raise ValueError(f"statistics must be 'boson' or 'fermion', got {statistics!r}")


def _iter_states(nsites: int, particles: int, statistics: str) -> Iterator[State]:
    # Position multisets in ascending lexicographic order yield occupation
    # tuples in descending lexicographic order.
    if statistics == "boson":
        combos = itertools.combinations_with_replacement(range(nsites), particles)
    else:
        combos = itertools.combinations(range(nsites), particles)
    for positions in combos:
        occ = [0] * nsites
        for p in positions:
            occ[p] += 1
        yield tuple(occ)


class Basis:
    """Enumerated occupation basis for one (cells, particles, statistics) sector.

    States are stored in descending lexicographic order of occupation tuples.
    """

    def __init__(self, cells: int, particles: int, statistics: str, states: Tuple[State, ...]):
        self.cells = cells
        self.particles = particles
        self.statistics = statistics
        self.states = states
        self._index = {s: i for i, s in enumerate(states)}

    @property
    def nsites(self) -> int:
        return 2 * self.cells

    @property
    def dimension(self) -> int:
        return len(self.states)

    @cached_property
    def occupations(self):
        """Dense (dimension, 2L) integer array of occupation numbers."""
        import numpy as np

        return np.array(self.states, dtype=np.float64)

    def rank(self, state: Sequence[int]) -> int:
        """Index of an occupation tuple; raises ValueError if not in the basis."""
        key = tuple(int(n) for n in state)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"state {key} is not in the basis "
                             f"(cells={self.cells}, particles={self.particles}, "
                             f"statistics={self.statistics})") from None

    def unrank(self, index: int) -> State:
        """Occupation tuple at a basis index; raises ValueError out of range."""
        if not 0 <= index < self.dimension:
            raise ValueError(f"index must be in 0..{self.dimension - 1}, got {index}")
        return self.states[index]

    def __len__(self) -> int:
        return self.dimension

    def __repr__(self) -> str:
        return (f"Basis(cells={self.cells}, particles={self.particles}, "
                f"statistics={self.statistics!r}, dimension={self.dimension})")


def enumerate_basis(cells: int, particles: int, statistics: str = "boson",
                    capacity: Optional[int] = None) -> Basis:
    """Enumerate the fixed particle-number basis of the 2L-site ladder.

    Raises CapacityError if the sector dimension exceeds the capacity budget
    (argument, else NHSE_CAPACITY environment variable, else 200000).
    """
    if cells < 1:
        raise ValueError(f"cells must be >= 1, got {cells}")
    if particles < 1:
        raise ValueError(f"particles must be >= 1, got {particles}")
    if statistics not in ("boson", "fermion"):
        raise ValueError(f"statistics must be 'boson' or 'fermion', got {statistics!r}")
    nsites = 2 * cells
    if statistics == "fermion" and particles > nsites:
        raise ValueError(f"cannot place {particles} fermions on {nsites} sites")
    dim = basis_dimension(cells, particles, statistics)
    cap = resolve_capacity(capacity)
    if dim > cap:
        raise CapacityError(f"basis dimension {dim} exceeds capacity {cap} "
                            f"(cells={cells}, particles={particles}, statistics={statistics})")
    states = tuple(_iter_states(nsites, particles, statistics))
    return Basis(cells, particles, statistics, states)


def apply_single_hop(state: Sequence[int], from_site: int, to_site: int,
                     statistics: str = "boson") -> Optional[Tuple[State, float]]:
    """Apply a_to^dag a_from to an occupation state.

    Returns (new_state, amplitude) or None when the move annihilates the
    state (empty source, or occupied fermion target). Bosons pick up
    sqrt(n_from) * sqrt(n_to + 1); fermions pick up the parity of the number
    of occupied sites strictly between the two sites (Jordan-Wigner string).
    """
    if from_site == to_site:
        raise ValueError("from_site and to_site must differ")
    n = len(state)
    if not (0 <= from_site < n and 0 <= to_site < n):
        raise ValueError(f"site indices must be in 0..{n - 1}, "
                         f"got {from_site}, {to_site}")
    if state[from_site] == 0:
        return None
    if statistics == "fermion":
        if state[to_site] == 1:
            return None
        lo, hi = (from_site, to_site) if from_site < to_site else (to_site, from_site)
        string = sum(state[k] for k in range(lo + 1, hi))
        sign = -1.0 if string % 2 else 1.0
        new = list(state)
        new[from_site] -= 1
        new[to_site] += 1
        return tuple(new), sign
    if statistics != "boson":
        raise ValueError(f"statistics must be 'boson' or 'fermion', got {statistics!r}")
    amp = math.sqrt(state[from_site]) * math.sqrt(state[to_site] + 1)
    new = list(state)
    new[from_site] -= 1
    new[to_site] += 1
    return tuple(new), amp
