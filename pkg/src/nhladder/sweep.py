"""Parameter sweeps, size-transition thresholds, and diagonal-energy tables.

Sweep grids are row-major over one or two linear axes. Every grid point is
an independent job (safe to evaluate in worker processes); per-point
failures are recorded in the row's error column instead of aborting the
sweep. Cluster bookkeeping across points is done in a deterministic pass
after all points are evaluated, so serial and parallel runs produce
identical tables.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .eig import default_eps_im, eigendecompose
from .fock import enumerate_basis
from .model import ModelParams, build_hamiltonian, sector_basis
from .observables import (cluster_spectrum, correlation_ncor, default_min_gap,
                          entanglement_entropy, left_half_sites, leg_sites,
                          polarization, site_density)

AXIS_FIELDS = ("jl_a", "jr_a", "jl_b", "jr_b", "jp", "mu", "u", "u_nn")
OBSERVABLES = ("max_im_global", "max_im_per_cluster", "ncor_of_max_im_state",
               "polarization", "entropies", "threshold")


@dataclass(frozen=True)
class Axis:
    """One linear sweep axis over a model parameter."""

    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_FIELDS:
            raise ValueError(f"axis name must be one of {AXIS_FIELDS}, "
                             f"got {self.name!r}")
        if self.points < 1:
            raise ValueError(f"axis needs at least one point, got {self.points}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis endpoints must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """A sweep request: base parameters, one or two axes, observables."""

    base: ModelParams
    axes: Tuple[Axis, ...]
    observables: Tuple[str, ...] = ("max_im_global",)
    eps_im: Optional[float] = None
    gap_factor: float = 10.0
    min_gap: Optional[float] = None
    threshold_selector: str = "all"
    threshold_bracket: Tuple[float, float] = (0.0, 0.1)
    threshold_resolution: float = 1e-3

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError(f"sweeps take one or two axes, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis name in {names}")
        for obs in self.observables:
            if obs not in OBSERVABLES:
                raise ValueError(f"unknown observable {obs!r}; "
                                 f"choose from {OBSERVABLES}")
        if not self.observables:
            raise ValueError("at least one observable is required")


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a rung-coupling threshold search."""

    jp_star: float
    bracket: Tuple[float, float]
    eps_im: float
    evaluations: int
    used_fallback: bool = False


def _grid_values(spec: SweepSpec) -> List[Tuple[float, ...]]:
    if len(spec.axes) == 1:
        return [(float(v),) for v in spec.axes[0].values()]
    outer, inner = spec.axes
    return [(float(a), float(b))
            for a in outer.values() for b in inner.values()]


def _point_params(spec: SweepSpec, values: Tuple[float, ...]) -> ModelParams:
    updates = {axis.name: v for axis, v in zip(spec.axes, values)}
    return spec.base.with_updates(**updates)


def _observable_columns(observables: Sequence[str]) -> List[str]:
    cols: List[str] = []
    for obs in observables:
        if obs == "max_im_global":
            cols.append("max_im_global")
        elif obs == "max_im_per_cluster":
            cols.extend(["max_im_scattering", "max_im_bound"])
        elif obs == "ncor_of_max_im_state":
            cols.append("ncor_of_max_im_state")
        elif obs == "polarization":
            cols.append("polarization")
        elif obs == "entropies":
            cols.extend(["s_ab", "s_leftright", "rho_a_frac", "rho_left_frac"])
        elif obs == "threshold":
            cols.append("jp_star")
    return cols


def _interaction_scale(params: ModelParams) -> float:
    return params.u if params.statistics == "boson" else params.u_nn


def _cluster_summaries(result, min_gap: float, gap_factor: float):
    clusters = cluster_spectrum(result, gap_factor=gap_factor, min_gap=min_gap)
    out = []
    for c in clusters:
        members = np.asarray(c.members)
        centroid = float(result.eigenvalues[members].real.mean())
        peak = float(np.max(np.abs(result.eigenvalues[members].imag)))
        out.append((centroid, peak))
    return out


def _evaluate_point(spec: SweepSpec, values: Tuple[float, ...],
                    capacity: Optional[int]) -> Dict:
    row: Dict = {axis.name: v for axis, v in zip(spec.axes, values)}
    for col in _observable_columns(spec.observables):
        row[col] = math.nan
    row["error"] = ""
    row["_clusters"] = []
    try:
        params = _point_params(spec, values)
        basis = sector_basis(params, capacity=capacity)
        result = eigendecompose(build_hamiltonian(params, basis),
                                capacity=capacity)
        min_gap = (spec.min_gap if spec.min_gap is not None
                   else default_min_gap(params.jl_a, params.jr_a))
        top = int(np.argmax(np.abs(result.eigenvalues.imag)))
        vec = result.eigenvectors[:, top]
        for obs in spec.observables:
            if obs == "max_im_global":
                row["max_im_global"] = float(np.max(np.abs(result.eigenvalues.imag)))
            elif obs == "max_im_per_cluster":
                row["_clusters"] = _cluster_summaries(result, min_gap,
                                                      spec.gap_factor)
            elif obs == "ncor_of_max_im_state":
                if params.particles == 2:
                    row["ncor_of_max_im_state"] = correlation_ncor(vec, basis)
            elif obs == "polarization":
                row["polarization"] = polarization(vec, basis)
            elif obs == "entropies":
                cells = params.cells
                dens = site_density(vec, basis)
                row["s_ab"] = entanglement_entropy(vec, basis,
                                                   leg_sites(cells, "A"))
                left = left_half_sites(cells)
                row["s_leftright"] = entanglement_entropy(vec, basis, left)
                row["rho_a_frac"] = float(dens[:cells].sum() / params.particles)
                row["rho_left_frac"] = float(dens[left].sum() / params.particles)
            elif obs == "threshold":
                t = find_threshold_jp(params,
                                      cluster_selector=spec.threshold_selector,
                                      eps_im=spec.eps_im,
                                      bracket=spec.threshold_bracket,
                                      resolution=spec.threshold_resolution,
                                      gap_factor=spec.gap_factor,
                                      min_gap=spec.min_gap,
                                      capacity=capacity)
                row["jp_star"] = t.jp_star
    except Exception as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _evaluate_point_task(args) -> Dict:
    spec, values, capacity = args
    return _evaluate_point(spec, values, capacity)


def _assign_cluster_groups(rows: List[Dict], spec: SweepSpec) -> None:
    """Deterministic post-pass: split each point's clusters into scattering
    and bound. The first point with clusters seeds groups by centroid
    proximity to 0 versus the interaction scale; later points inherit the
    group of the nearest centroid from the previous labeled point."""
    previous: List[Tuple[float, str]] = []
    grid = _grid_values(spec)
    for row, values in zip(rows, grid):
        clusters = row.pop("_clusters")
        if not clusters:
            continue
        u_scale = _interaction_scale(_point_params(spec, values))
        groups: List[str] = []
        for centroid, peak in clusters:
            if previous:
                nearest = min(previous, key=lambda p: abs(p[0] - centroid))
                groups.append(nearest[1])
            else:
                bound = u_scale != 0.0 and abs(centroid - u_scale) < abs(centroid)
                groups.append("bound" if bound else "scattering")
        for name in ("scattering", "bound"):
            peaks = [peak for (centroid, peak), g in zip(clusters, groups)
                     if g == name]
            row[f"max_im_{name}"] = max(peaks) if peaks else math.nan
        previous = [(centroid, g) for (centroid, peak), g
                    in zip(clusters, groups)]


def run_sweep(spec: SweepSpec, workers: int = 1,
              capacity: Optional[int] = None) -> List[Dict]:
    """Evaluate the sweep grid and return one row dict per point, row-major.

    Rows carry the axis values, the requested observable columns, and an
    error column that holds the exception tag for failed points (empty on
    success). workers > 1 distributes points over processes; the table is
    identical to the serial one.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    grid = _grid_values(spec)
    if workers == 1:
        rows = [_evaluate_point(spec, values, capacity) for values in grid]
    else:
        tasks = [(spec, values, capacity) for values in grid]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_point_task, tasks))
    if "max_im_per_cluster" in spec.observables:
        _assign_cluster_groups(rows, spec)
    else:
        for row in rows:
            row.pop("_clusters", None)
    return rows


def _max_im_for_selector(result, params: ModelParams, selector: str,
                         gap_factor: float, min_gap: float) -> float:
    if selector == "all":
        return float(np.max(np.abs(result.eigenvalues.imag)))
    if selector not in ("scattering", "bound"):
        raise ValueError(f"cluster_selector must be 'all', 'scattering', or "
                         f"'bound', got {selector!r}")
    u_scale = _interaction_scale(params)
    best = 0.0
    for centroid, peak in _cluster_summaries(result, min_gap, gap_factor):
        bound = u_scale != 0.0 and abs(centroid - u_scale) < abs(centroid)
        group = "bound" if bound else "scattering"
        if group == selector:
            best = max(best, peak)
    return best


def find_threshold_jp(params: ModelParams, cluster_selector: str = "all",
                      eps_im: Optional[float] = None,
                      bracket: Tuple[float, float] = (0.0, 0.1),
                      resolution: float = 1e-3,
                      gap_factor: float = 10.0,
                      min_gap: Optional[float] = None,
                      capacity: Optional[int] = None) -> ThresholdResult:
    """Locate the rung coupling where the selected part of the spectrum
    turns complex (max |Im| exceeds eps_im).

    A five-point pre-scan checks that the indicator crosses eps_im once and
    stays above; if so, bisection narrows the bracket to the requested
    resolution and jp_star is its upper end. A non-monotone pre-scan falls
    back to a full scan at the resolution step and returns the first
    crossing. Raises ValueError when the bracket does not actually bracket
    a crossing.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    if resolution <= 0.0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    basis = sector_basis(params, capacity=capacity)
    if min_gap is None:
        min_gap = default_min_gap(params.jl_a, params.jr_a)

    evaluations = 0
    cache: Dict[float, float] = {}
    eps_holder = {"eps": eps_im}

    def measure(jp: float) -> float:
        nonlocal evaluations
        if jp in cache:
            return cache[jp]
        p = params.with_updates(jp=jp)
        result = eigendecompose(build_hamiltonian(p, basis), capacity=capacity)
        if eps_holder["eps"] is None:
            eps_holder["eps"] = default_eps_im(result.matrix_norm)
        value = _max_im_for_selector(result, p, cluster_selector,
                                     gap_factor, min_gap)
        evaluations += 1
        cache[jp] = value
        return value

    f_lo = measure(lo)
    eps = eps_holder["eps"]
    if f_lo > eps:
        raise ValueError(f"invalid bracket: spectrum already complex at "
                         f"jp={lo} (max |Im| = {f_lo:.3e} > {eps:.3e})")
    f_hi = measure(hi)
    if f_hi <= eps:
        raise ValueError(f"invalid bracket: spectrum still real at "
                         f"jp={hi} (max |Im| = {f_hi:.3e} <= {eps:.3e})")

    scan = np.linspace(lo, hi, 5)
    above = [measure(float(jp)) > eps for jp in scan]
    first_above = above.index(True)
    monotone = all(above[first_above:])

    if monotone:
        b_lo = float(scan[first_above - 1])
        b_hi = float(scan[first_above])
        while b_hi - b_lo > resolution:
            mid = 0.5 * (b_lo + b_hi)
            if measure(mid) > eps:
                b_hi = mid
            else:
                b_lo = mid
        return ThresholdResult(jp_star=b_hi, bracket=(b_lo, b_hi),
                               eps_im=eps, evaluations=evaluations)

    steps = max(1, int(math.ceil((hi - lo) / resolution)))
    grid = [lo + k * (hi - lo) / steps for k in range(steps + 1)]
    prev = lo
    for jp in grid[1:]:
        if measure(float(jp)) > eps:
            return ThresholdResult(jp_star=float(jp), bracket=(prev, float(jp)),
                                   eps_im=eps, evaluations=evaluations,
                                   used_fallback=True)
        prev = float(jp)
    raise ValueError("fallback scan found no crossing inside the bracket")


@dataclass(frozen=True)
class EonsiteTable:
    """Diagonal-energy classification: one row per (interaction quanta,
    leg imbalance) class, and one row per pairwise level crossing inside
    the scanned mu window."""

    classes: List[Dict] = field(default_factory=list)
    crossings: List[Dict] = field(default_factory=list)


def eonsite_table(params: ModelParams, mu_range: Tuple[float, float],
                  capacity: Optional[int] = None) -> EonsiteTable:
    """Classify basis states by diagonal energy E(mu) = e_int + delta_n mu
    and list all class crossings with mu inside mu_range.

    Bosons group by on-site pair count (e_int = u * pairs), fermions by
    same-leg adjacency count (e_int = u_nn * adjacency); delta_n is
    N_A - N_B. The crossing order is |delta_n_i - delta_n_j| / 2, the
    number of rung moves connecting the classes. Supports up to four
    particles.
    """
    lo, hi = float(mu_range[0]), float(mu_range[1])
    if not lo <= hi:
        raise ValueError(f"mu_range must satisfy lo <= hi, got ({lo}, {hi})")
    if params.particles > 4:
        raise ValueError(f"eonsite_table supports up to 4 particles, "
                         f"got {params.particles}")
    basis = enumerate_basis(params.cells, params.particles, params.statistics,
                            capacity=capacity)
    cells = params.cells
    boson = params.statistics == "boson"
    populations: Dict[Tuple[int, int], int] = {}
    for state in basis.states:
        if boson:
            quanta = sum(n * (n - 1) for n in state) // 2
        else:
            quanta = sum(state[off + x] * state[off + x + 1]
                         for off in (0, cells) for x in range(cells - 1))
        delta = sum(state[:cells]) - sum(state[cells:])
        key = (quanta, delta)
        populations[key] = populations.get(key, 0) + 1

    scale = params.u if boson else params.u_nn
    quanta_name = "pairs" if boson else "adjacency"
    classes = []
    for class_id, (quanta, delta) in enumerate(sorted(populations)):
        classes.append({"class_id": class_id,
                        quanta_name: quanta,
                        "delta_n": delta,
                        "e_int": scale * quanta,
                        "population": populations[(quanta, delta)]})

    crossings = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            d_i, d_j = classes[i]["delta_n"], classes[j]["delta_n"]
            if d_i == d_j:
                continue
            mu_star = (classes[i]["e_int"] - classes[j]["e_int"]) / (d_j - d_i)
            if lo <= mu_star <= hi:
                crossings.append({"class_i": i, "class_j": j,
                                  "mu_star": mu_star,
                                  "order": abs(d_i - d_j) // 2,
                                  "e_at_crossing": classes[i]["e_int"]
                                  + d_i * mu_star})
    crossings.sort(key=lambda r: (r["mu_star"], r["class_i"], r["class_j"]))
    return EonsiteTable(classes=classes, crossings=crossings)
