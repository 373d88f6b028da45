"""Cardinality-constrained Nash-product selection.

Given items with per-player values (f_i, g_i) and a size cap k, the
problem is to pick a k-subset S maximizing the Nash product

    (sum of f over S) * (sum of g over S).

The problem is NP-hard: :func:`reduce_ccss` embeds cardinality-
constrained subset sum into it, which also serves as a generator of
test instances with known answers.  :func:`oracle_exact` solves small
instances by enumeration, :func:`oracle_dp` by dynamic programming over
integer f-sums; the ``heuristic_*`` functions are the polynomial-time
selection rules the simulator uses at scale.

Exactness: integer and Fraction-valued instances are evaluated in exact
arithmetic (Fractions are rescaled to integers internally); float
instances are evaluated in float64.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import EnumerationBudgetError, ReductionInfeasibleError

DEFAULT_ENUMERATION_BUDGET = 5_000_000

_CHUNK = 200_000
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class BilinearInstance:
    """Items with nonnegative per-player values and a selection cap k."""

    items: tuple[tuple[float, float], ...]
    k: int

    def __post_init__(self) -> None:
        n = len(self.items)
        if n == 0:
            raise ValueError("instance has no items")
        if not 1 <= self.k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {self.k}")
        for i, (f, g) in enumerate(self.items):
            if f < 0 or g < 0:
                raise ValueError(f"item {i}: values must be nonnegative, got {f}, {g}")

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def fs(self) -> tuple[float, ...]:
        return tuple(f for f, _ in self.items)

    @property
    def gs(self) -> tuple[float, ...]:
        return tuple(g for _, g in self.items)


@dataclass(frozen=True)
class OracleResult:
    indices: tuple[int, ...]
    value: float


def nash_objective(instance: BilinearInstance, indices: Iterable[int]) -> float:
    """Product of the two players' value sums over the chosen indices."""
    chosen = list(indices)
    if len(set(chosen)) != len(chosen):
        raise ValueError("duplicate indices")
    if len(chosen) > instance.k:
        raise ValueError(f"selection of size {len(chosen)} exceeds k={instance.k}")
    for i in chosen:
        if not 0 <= i < instance.n:
            raise IndexError(f"index {i} out of range for {instance.n} items")
    f_sum = sum(instance.items[i][0] for i in chosen)
    g_sum = sum(instance.items[i][1] for i in chosen)
    return f_sum * g_sum


def _scaled_integer_values(
    values: Sequence,
) -> tuple[list[int], int] | None:
    """Rescale int/Fraction values to exact integers; None if any float."""
    scale = 1
    for v in values:
        if isinstance(v, Fraction):
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
        elif not isinstance(v, int):
            return None
    return [int(v * scale) for v in values], scale


def _iter_combo_chunks(n: int, k: int):
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _enumerate_numpy(fs: np.ndarray, gs: np.ndarray, k: int) -> tuple[tuple[int, ...], float]:
    best_val = None
    best_combo: tuple[int, ...] | None = None
    for combos in _iter_combo_chunks(len(fs), k):
        f_sums = fs[combos].sum(axis=1)
        g_sums = gs[combos].sum(axis=1)
        products = f_sums * g_sums
        # first occurrence of the maximum keeps the lexicographically
        # smallest combination within the chunk
        i = int(np.argmax(products))
        if best_val is None or products[i] > best_val:
            best_val = products[i]
            best_combo = tuple(int(j) for j in combos[i])
    assert best_combo is not None
    return best_combo, best_val


def _enumerate_objects(fs: Sequence, gs: Sequence, k: int) -> tuple[tuple[int, ...], float]:
    best_val = None
    best_combo: tuple[int, ...] | None = None
    for combo in itertools.combinations(range(len(fs)), k):
        v = sum(fs[i] for i in combo) * sum(gs[i] for i in combo)
        if best_val is None or v > best_val:
            best_val = v
            best_combo = combo
    assert best_combo is not None
    return best_combo, best_val


def oracle_exact(
    instance: BilinearInstance,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> OracleResult:
    """Optimal k-subset by full enumeration.

    Ties resolve to the lexicographically smallest index tuple.  The
    subset count C(n, k) must not exceed ``budget``; pass a larger
    budget explicitly to push past the default.
    """
    n, k = instance.n, instance.k
    count = math.comb(n, k)
    if count > budget:
        raise EnumerationBudgetError(n, k, count, budget)

    scaled_f = _scaled_integer_values(instance.fs)
    scaled_g = _scaled_integer_values(instance.gs)
    if scaled_f is not None and scaled_g is not None:
        sf, scale_f = scaled_f
        sg, scale_g = scaled_g
        max_f = sum(sorted(sf)[-k:])
        max_g = sum(sorted(sg)[-k:])
        if max_f * max_g < _INT64_SAFE:
            combo, val = _enumerate_numpy(
                np.array(sf, dtype=np.int64), np.array(sg, dtype=np.int64), k
            )
            val = int(val)
        else:
            combo, val = _enumerate_objects(sf, sg, k)
        if scale_f * scale_g != 1:
            val = Fraction(val, scale_f * scale_g)
        return OracleResult(combo, val)

    combo, val = _enumerate_numpy(
        np.asarray(instance.fs, dtype=np.float64),
        np.asarray(instance.gs, dtype=np.float64),
        k,
    )
    return OracleResult(combo, float(val))


def oracle_dp(instance: BilinearInstance) -> OracleResult:
    """Optimal k-subset by dynamic programming over integer f-sums.

    Requires integer f values.  State: (selected count, f-sum) mapped to
    the best attainable g-sum; pseudo-polynomial in sum(f).  The
    returned value always equals the enumeration oracle's; the index
    tuple may differ on ties.
    """
    fs, gs, k = instance.fs, instance.gs, instance.k
    for i, f in enumerate(fs):
        if not isinstance(f, int):
            raise ValueError(f"item {i}: DP oracle needs integer f values, got {f!r}")

    base = {(0, 0): 0}
    layers: list[dict[tuple[int, int], float]] = []
    dp = base
    for f, g in instance.items:
        new = dict(dp)
        for (size, f_sum), g_best in dp.items():
            if size == k:
                continue
            key = (size + 1, f_sum + f)
            cand = g_best + g
            cur = new.get(key)
            if cur is None or cand > cur:
                new[key] = cand
        layers.append(new)
        dp = new

    best_val = None
    best_state = None
    for (size, f_sum), g_best in dp.items():
        if size != k:
            continue
        v = f_sum * g_best
        if best_val is None or v > best_val or (v == best_val and f_sum < best_state[1]):
            best_val = v
            best_state = (size, f_sum, g_best)
    assert best_state is not None

    # walk back, preferring to skip late items so early indices stay chosen
    chosen: list[int] = []
    size, f_sum, g_best = best_state
    for i in reversed(range(instance.n)):
        prev = layers[i - 1] if i > 0 else base
        if prev.get((size, f_sum)) == g_best:
            continue
        f, g = instance.items[i]
        chosen.append(i)
        size, f_sum, g_best = size - 1, f_sum - f, g_best - g
    assert (size, f_sum) == (0, 0)
    return OracleResult(tuple(reversed(chosen)), best_val)


def _as_float_arrays(instance: BilinearInstance) -> tuple[np.ndarray, np.ndarray]:
    fs = np.array([float(f) for f in instance.fs])
    gs = np.array([float(g) for g in instance.gs])
    return fs, gs


def heuristic_mpp(instance: BilinearInstance) -> tuple[int, ...]:
    """Alternating picks: each side in turn takes its own argmax item.

    The proposer side (f) moves first; ties go to the lowest index.
    """
    fs, gs = _as_float_arrays(instance)
    taken = np.zeros(instance.n, dtype=bool)
    chosen: list[int] = []
    for turn in range(instance.k):
        scores = (fs if turn % 2 == 0 else gs).copy()
        scores[taken] = -1.0
        i = int(np.argmax(scores))
        taken[i] = True
        chosen.append(i)
    return tuple(sorted(chosen))


def heuristic_maxsp(instance: BilinearInstance) -> tuple[int, ...]:
    """Top k items by the per-item value product f_i * g_i."""
    fs, gs = _as_float_arrays(instance)
    products = fs * gs
    order = sorted(range(instance.n), key=lambda i: (-products[i], i))
    return tuple(sorted(order[: instance.k]))


def heuristic_greedy_np(instance: BilinearInstance) -> tuple[int, ...]:
    """Greedy Nash-product ascent: repeatedly add the item that yields
    the largest objective after insertion.

    The first pick coincides with MaxSP's best item since both sums
    start at zero.
    """
    fs, gs = _as_float_arrays(instance)
    taken = np.zeros(instance.n, dtype=bool)
    chosen: list[int] = []
    f_sum = 0.0
    g_sum = 0.0
    for _ in range(instance.k):
        scores = (f_sum + fs) * (g_sum + gs)
        scores[taken] = -1.0
        i = int(np.argmax(scores))
        taken[i] = True
        chosen.append(i)
        f_sum += fs[i]
        g_sum += gs[i]
    return tuple(sorted(chosen))


def heuristic_random(instance: BilinearInstance, seed: int | str = 0) -> tuple[int, ...]:
    """Uniform random k-subset from a seeded generator."""
    rng = random.Random(seed)
    return tuple(sorted(rng.sample(range(instance.n), instance.k)))


HEURISTICS = {
    "mpp": heuristic_mpp,
    "maxsp": heuristic_maxsp,
    "greedy_np": heuristic_greedy_np,
    "random": heuristic_random,
}


@dataclass(frozen=True)
class CcssInstance:
    """Cardinality-constrained subset sum: is there a k-subset of
    ``values`` summing exactly to ``target``?"""

    values: tuple[int, ...]
    target: int
    k: int

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("no values")
        if not 1 <= self.k <= len(self.values):
            raise ValueError(f"k must lie in [1, {len(self.values)}], got {self.k}")
        if self.target < 1:
            raise ValueError(f"target must be >= 1, got {self.target}")
        for i, a in enumerate(self.values):
            if not isinstance(a, int) or a < 1:
                raise ValueError(f"value {i}: must be a positive integer, got {a!r}")


def reduce_ccss(instance: CcssInstance) -> BilinearInstance:
    """Embed subset sum into Nash-product selection.

    With M = 2*target/k, map value a_i to the item (a_i, M - a_i).  A
    k-subset with value sum A scores A*(k*M - A), which peaks uniquely
    at A = target with value target**2; so the subset-sum instance is a
    yes-instance iff the selection optimum equals target**2.  M is kept
    as an exact Fraction when 2*target is not divisible by k.
    """
    two_t = 2 * instance.target
    for i, a in enumerate(instance.values):
        if a * instance.k > two_t:
            raise ReductionInfeasibleError(
                f"value {a} at position {i} exceeds 2*target/k = "
                f"{two_t}/{instance.k}; its mirrored value would be negative"
            )
    if two_t % instance.k == 0:
        m = two_t // instance.k
    else:
        m = Fraction(two_t, instance.k)
    items = tuple((a, m - a) for a in instance.values)
    return BilinearInstance(items=items, k=instance.k)


def decide_ccss(
    instance: CcssInstance, *, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> bool:
    """Decide subset sum exactly through the reduction and the oracle."""
    result = oracle_exact(reduce_ccss(instance), budget=budget)
    return result.value == instance.target * instance.target


def plant_yes_instance(
    n: int, k: int, seed: int, *, lo: int = 20, hi: int = 40
) -> CcssInstance:
    """Random instance with a planted solution: k even values in
    [lo, hi] sum to the target, padded with even decoys that keep the
    reduction feasible."""
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if lo < 2 or hi < lo:
        raise ValueError("need 2 <= lo <= hi")
    rng = random.Random(seed)
    planted = [2 * rng.randrange(lo // 2, hi // 2 + 1) for _ in range(k)]
    target = sum(planted)
    cap = (2 * target) // k
    decoys = [2 * rng.randrange(1, cap // 2 + 1) for _ in range(n - k)]
    values = planted + decoys
    rng.shuffle(values)
    return CcssInstance(tuple(values), target, k)


def perturb_to_no_instance(instance: CcssInstance) -> CcssInstance:
    """Shift an all-even instance's target by one: the odd target is
    unreachable by any subset of even values, a parity certificate that
    the perturbed instance is a no-instance."""
    if any(a % 2 for a in instance.values):
        raise ValueError("parity perturbation needs all-even values")
    if instance.target % 2:
        raise ValueError("parity perturbation needs an even target")
    return CcssInstance(instance.values, instance.target + 1, instance.k)
