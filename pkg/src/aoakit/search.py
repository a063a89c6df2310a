"""Local Pareto-front search over arrays and orbit-compressed encodings.

The heuristic keeps a Pareto front for the objective pair
(strength-2 p-unbalance, strength-2 tolerance) and repeatedly scans the
radius-r Hamming neighborhood of the front members in a fixed deterministic
order: all single-cell changes (member index, then cell row-major, then
replacement level ascending), then all ordered two-cell changes.  The scan
restarts from the beginning after every successful front insertion and the
search stops when one full scan changes nothing, so the result is a local
Pareto front of radius r.

Compressed encodings (``bicyclic``: run orbits under ((1..s)|(1..r));
``quasicyclic``: all-ones fixed rows plus orbits under ((2..s)|id)) search
over core cells only and expand before every evaluation.

``brute_force_optimum`` is an exhaustive oracle for tiny instances: it pins
the first two columns to the lexicographic lambda-fold full factorial and
enumerates the remaining columns as a sorted multiset (both reductions leave
the optimal objective values unchanged because the metrics are invariant
under level/column/row permutations), optionally under a tolerance cap.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arrays import Array, Exact, tolerance, unbalance

__all__ = [
    "ObjectiveVector",
    "FrontMember",
    "ParetoFront",
    "SearchConfig",
    "ScanReport",
    "front_insert",
    "neighborhood_scan",
    "local_pareto_search",
    "OracleResult",
    "brute_force_optimum",
]

logger = logging.getLogger(__name__)

CROSS_CHECK_DELTA = False
"""When true, every delta-evaluated objective is re-verified by full
recomputation (enabled by the test suite)."""


@dataclass(frozen=True, order=True)
class ObjectiveVector:
    """(Unb_{p,2}, Tol_2), compared componentwise."""

    unbalance: Exact
    tolerance: Exact

    def dominates_or_equals(self, other: "ObjectiveVector") -> bool:
        return self.unbalance <= other.unbalance and self.tolerance <= other.tolerance


@dataclass(frozen=True)
class FrontMember:
    """A front entry: the searched cells, their expansion, and its objectives."""

    cells: np.ndarray
    array: Array
    objective: ObjectiveVector


@dataclass
class ParetoFront:
    """Antichain of members under the componentwise objective order."""

    members: list[FrontMember] = field(default_factory=list)
    complete: bool = True

    def objectives(self) -> list[tuple[Exact, Exact]]:
        return [(m.objective.unbalance, m.objective.tolerance) for m in self.members]

    def best_unbalance(self) -> Exact:
        return min(m.objective.unbalance for m in self.members)

    def best_tolerance(self) -> Exact:
        return min(m.objective.tolerance for m in self.members)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the local search; radius > 2 is rejected at scan time."""

    p: int = 2
    radius: int = 2
    seed: int = 0
    encoding: str = "plain"
    max_passes: int | None = None
    time_budget: float | None = None
    restarts: int = 1
    bicyclic_r: int | None = None

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ValueError("p must be 1 or 2")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.encoding not in ("plain", "bicyclic", "quasicyclic"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def front_insert(front: ParetoFront, member: FrontMember) -> bool:
    """Insert unless dominated-or-equalled; then drop newly dominated members."""
    obj = member.objective
    if any(m.objective.dominates_or_equals(obj) for m in front.members):
        return False
    front.members = [
        m for m in front.members if not obj.dominates_or_equals(m.objective)
    ]
    front.members.append(member)
    return True


class _Encoder:
    """Expansion of searched cell matrices into full arrays, per encoding kind."""

    def __init__(self, kind: str, n_runs: int, k: int, s: int, r: int | None):
        self.kind, self.n_runs, self.k, self.s = kind, n_runs, k, s
        lam = n_runs // (s * s)
        if kind == "plain":
            self.core_shape = (n_runs, k)
        elif kind == "bicyclic":
            if n_runs % s:
                raise ValueError("bicyclic encoding requires s | N")
            if r is None:
                r = max(d for d in range(1, s + 1) if s % d == 0 and d <= k)
            if s % r or not 1 <= r <= k:
                raise ValueError("bicyclic r must divide s and satisfy 1 <= r <= k")
            self.r = r
            self.core_shape = (n_runs // s, k)
        elif kind == "quasicyclic":
            if lam < 1 or n_runs != lam * s * s:
                raise ValueError("quasicyclic encoding requires N = lambda * s^2")
            if (n_runs - lam) % (s - 1):
                raise ValueError("quasicyclic core size is not integral")
            self.lam = lam
            self.core_shape = ((n_runs - lam) // (s - 1), k)
        else:
            raise ValueError(f"unknown encoding {kind!r}")

    def random_cells(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "quasicyclic":
            # core rows must leave the all-ones fixed rows to the fixed part
            while True:
                cells = rng.integers(1, self.s + 1, size=self.core_shape)
                if np.all(cells.max(axis=1) > 1):
                    return cells
        return rng.integers(1, self.s + 1, size=self.core_shape)

    def expand(self, cells: np.ndarray) -> np.ndarray:
        s, k = self.s, self.k
        if self.kind == "plain":
            return cells
        if self.kind == "bicyclic":
            blocks = []
            base = np.arange(k)
            for t in range(s):
                perm = base.copy()
                perm[: self.r] = (np.arange(self.r) - t) % self.r
                blocks.append((cells[:, perm] - 1 + t) % s + 1)
            return np.vstack(blocks)
        blocks = [np.ones((self.lam, k), dtype=np.int64)]
        moving = cells - 2  # levels >= 2 shift cyclically; level 1 is fixed
        for t in range(s - 1):
            block = np.where(cells == 1, 1, (moving + t) % (s - 1) + 2)
            blocks.append(block)
        return np.vstack(blocks)

    def to_array(self, cells: np.ndarray) -> Array:
        return Array(self.expand(cells), self.s)


class _PairTables:
    """Per-column-pair level-pair counts enabling O(k) single-change deltas."""

    def __init__(self, array: Array, p: int):
        self.s, self.p = array.n_levels, p
        n, k = array.n_runs, array.n_factors
        self.lam = n // (self.s * self.s)
        self.cells = array.cells
        self.counts = {}
        for c1, c2 in itertools.combinations(range(k), 2):
            code = (array.cells[:, c1] - 1) * self.s + (array.cells[:, c2] - 1)
            self.counts[c1, c2] = np.bincount(code, minlength=self.s * self.s)
        self.pair_unb = {
            pair: int(np.sum(np.abs(cnt - self.lam) ** p))
            for pair, cnt in self.counts.items()
        }
        self.pair_max = {
            pair: int(np.max(np.abs(cnt - self.lam))) for pair, cnt in self.counts.items()
        }

    def objective(self) -> ObjectiveVector:
        return ObjectiveVector(
            sum(self.pair_unb.values()), max(self.pair_max.values())
        )

    def change(self, i: int, j: int, value: int) -> ObjectiveVector:
        """Objectives after setting cell (i, j) to value, without mutating."""
        s, lam, p = self.s, self.lam, self.p
        old = self.cells[i, j]
        unb_total = sum(self.pair_unb.values())
        maxes = []
        touched = set()
        for c in range(self.cells.shape[1]):
            if c == j:
                continue
            pair = (c, j) if c < j else (j, c)
            touched.add(pair)
            if pair[0] == j:
                code_old = (old - 1) * s + (self.cells[i, c] - 1)
                code_new = (value - 1) * s + (self.cells[i, c] - 1)
            else:
                code_old = (self.cells[i, c] - 1) * s + (old - 1)
                code_new = (self.cells[i, c] - 1) * s + (value - 1)
            cnt = self.counts[pair]
            a_old, a_new = int(cnt[code_old]), int(cnt[code_new])
            delta = (
                abs(a_old - 1 - lam) ** p
                - abs(a_old - lam) ** p
                + abs(a_new + 1 - lam) ** p
                - abs(a_new - lam) ** p
            )
            unb_total += delta
            m = max(abs(a_old - 1 - lam), abs(a_new + 1 - lam))
            prev = self.pair_max[pair]
            if prev > m and (
                abs(a_old - lam) == prev or abs(a_new - lam) == prev
            ):
                # the former argmax may have moved; recount this pair
                dev = np.abs(cnt - lam)
                dev_list = dev.copy()
                dev_list[code_old] = abs(a_old - 1 - lam)
                dev_list[code_new] = abs(a_new + 1 - lam)
                m = int(dev_list.max())
            else:
                m = max(m, prev)
            maxes.append(m)
        tol = max(
            max(maxes, default=0),
            max(
                (v for pair, v in self.pair_max.items() if pair not in touched),
                default=0,
            ),
        )
        return ObjectiveVector(unb_total, tol)


def _evaluate(enc: _Encoder, cells: np.ndarray, p: int) -> FrontMember:
    arr = enc.to_array(cells)
    obj = ObjectiveVector(unbalance(arr, 2, p), tolerance(arr, 2))
    return FrontMember(cells=cells.copy(), array=arr, objective=obj)


@dataclass
class ScanReport:
    """Outcome of one neighborhood scan (stopped at the first insertion)."""

    changed: bool
    examined: int


def neighborhood_scan(front: ParetoFront, radius: int, visitor) -> ScanReport:
    """Visit every radius-r neighbor of every member in the fixed scan order.

    ``visitor(member_index, candidate_cells)`` returns True when the
    candidate was inserted into the front; the scan then stops so the caller
    can restart it against the updated front.
    """
    if radius > 2:
        raise ValueError("radius > 2 is not supported (search need not terminate)")
    examined = 0
    snapshot = list(front.members)
    for stage in (1, 2) if radius >= 2 else (1,):
        for idx, member in enumerate(snapshot):
            cells = member.cells
            rows, cols = cells.shape
            s = member.array.n_levels
            flat = [(i, j) for i in range(rows) for j in range(cols)]
            if stage == 1:
                moves = (((pos, lv),) for pos in flat for lv in range(1, s + 1))
            else:
                moves = (
                    ((p1, l1), (p2, l2))
                    for p1, p2 in itertools.combinations(flat, 2)
                    for l1 in range(1, s + 1)
                    for l2 in range(1, s + 1)
                )
            for move in moves:
                if any(cells[pos] == lv for pos, lv in move):
                    continue
                candidate = cells.copy()
                for pos, lv in move:
                    candidate[pos] = lv
                examined += 1
                if visitor(idx, candidate):
                    return ScanReport(changed=True, examined=examined)
    return ScanReport(changed=False, examined=examined)


def _single_search(
    n_runs: int, k: int, s: int, cfg: SearchConfig, seed: int
) -> ParetoFront:
    enc = _Encoder(cfg.encoding, n_runs, k, s, cfg.bicyclic_r)
    rng = np.random.default_rng(seed)
    front = ParetoFront()
    front_insert(front, _evaluate(enc, enc.random_cells(rng), cfg.p))

    start = time.monotonic()
    passes = 0
    tables: dict[int, _PairTables] = {}

    def visitor(idx: int, candidate: np.ndarray) -> bool:
        if cfg.encoding == "plain":
            if idx not in tables:
                tables[idx] = _PairTables(front.members[idx].array, cfg.p)
            diff = np.argwhere(candidate != front.members[idx].cells)
            if len(diff) == 1:
                i, j = map(int, diff[0])
                obj = tables[idx].change(i, j, int(candidate[i, j]))
                if CROSS_CHECK_DELTA:
                    full = _evaluate(enc, candidate, cfg.p)
                    assert full.objective == obj, "delta evaluation mismatch"
                if any(
                    m.objective.dominates_or_equals(obj) for m in front.members
                ):
                    return False
                member = FrontMember(
                    cells=candidate.copy(),
                    array=enc.to_array(candidate),
                    objective=obj,
                )
                return front_insert(front, member)
        return front_insert(front, _evaluate(enc, candidate, cfg.p))

    while True:
        report = neighborhood_scan(front, cfg.radius, visitor)
        tables.clear()
        passes += 1
        logger.info(
            "pass %d: front size %d, best %s",
            passes,
            len(front.members),
            min(front.objectives()),
        )
        if not report.changed:
            break
        if cfg.max_passes is not None and passes >= cfg.max_passes:
            front.complete = False
            break
        if cfg.time_budget is not None and time.monotonic() - start > cfg.time_budget:
            front.complete = False
            break
    return front


def local_pareto_search(n_runs: int, k: int, s: int, cfg: SearchConfig) -> ParetoFront:
    """Run the two-stage local search; merge fronts over cfg.restarts seeds.

    Every returned member's objectives are recomputed from its expanded array
    before return.
    """
    if n_runs % (s * s):
        raise ValueError("N must be a multiple of s^2")
    merged = ParetoFront()
    for i in range(cfg.restarts):
        front = _single_search(n_runs, k, s, cfg, cfg.seed + i)
        merged.complete = merged.complete and front.complete
        for m in front.members:
            front_insert(merged, m)
    for m in merged.members:
        check = ObjectiveVector(unbalance(m.array, 2, cfg.p), tolerance(m.array, 2))
        if check != m.objective:
            raise AssertionError("stored objectives failed final verification")
    return merged


@dataclass
class OracleResult:
    """Exact minima over the reduced exhaustive space (plus witnesses)."""

    min_unbalance: Exact
    min_tolerance: Exact
    unbalance_witnesses: list[Array]
    tolerance_witnesses: list[Array]
    tol_cap: int | None = None
    states: int = 0


def brute_force_optimum(
    n_runs: int,
    k: int,
    s: int,
    p: int = 2,
    tol_cap: int | None = None,
    max_states: int = 10**8,
    max_witnesses: int = 8,
) -> OracleResult:
    """Exhaustive minimum unbalance/tolerance for tiny (N, k, s).

    The first two columns are pinned to the lambda-fold lexicographic full
    factorial and the remaining k-2 columns range over sorted multisets of
    column vectors.  With ``tol_cap`` the unbalance minimum is taken over
    arrays with Tol_2 <= tol_cap (the hierarchy variant).
    """
    if n_runs % (s * s):
        raise ValueError("N must be a multiple of s^2")
    if k < 2:
        raise ValueError("need at least two columns")
    lam = n_runs // (s * s)
    n_vectors = s**n_runs
    states = math.comb(n_vectors + k - 3, k - 2)
    if states > max_states:
        raise ValueError(f"search space has {states} states (> {max_states})")
    if k > 2 and n_vectors > 10**6:
        raise ValueError(f"column-vector pool has {n_vectors} entries (> 10^6)")

    head = np.array(
        [(u, v) for u in range(1, s + 1) for v in range(1, s + 1)] * lam,
        dtype=np.int64,
    )
    head = head[np.lexsort((head[:, 1], head[:, 0]))]

    vectors = (
        list(itertools.product(range(1, s + 1), repeat=n_runs)) if k > 2 else []
    )
    best_unb = None
    best_tol = None
    unb_wit: list[Array] = []
    tol_wit: list[Array] = []
    for tail in itertools.combinations_with_replacement(vectors, k - 2):
        cells = np.column_stack([head] + [np.array(v, dtype=np.int64) for v in tail])
        arr = Array(cells, s)
        tol = tolerance(arr, 2)
        if best_tol is None or tol < best_tol:
            best_tol, tol_wit = tol, [arr]
        elif tol == best_tol and len(tol_wit) < max_witnesses:
            tol_wit.append(arr)
        if tol_cap is not None and tol > tol_cap:
            continue
        unb = unbalance(arr, 2, p)
        if best_unb is None or unb < best_unb:
            best_unb, unb_wit = unb, [arr]
        elif unb == best_unb and len(unb_wit) < max_witnesses:
            unb_wit.append(arr)
    if best_unb is None:
        raise ValueError(f"no array satisfies the tolerance cap {tol_cap}")
    return OracleResult(
        min_unbalance=best_unb,
        min_tolerance=best_tol,
        unbalance_witnesses=unb_wit,
        tolerance_witnesses=tol_wit,
        tol_cap=tol_cap,
        states=states,
    )
