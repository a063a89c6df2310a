"""Measuring how far an array is from orthogonal.

An orthogonal array of strength two shows every ordered level pair equally
often in every pair of columns.  Most run sizes cannot support one, so the
workbench quantifies the damage instead: the worst single deviation
(tolerance) and the accumulated deviations (p-unbalance).
"""

import numpy as np

from aoakit.arrays import (
    Array,
    bandwidth,
    count_tuple,
    cyclic_oa,
    hamming_similarity,
    is_oa,
    lower_bound_unb22,
    normalized_unbalance,
    rao_max_factors,
    tolerance,
    trivial_construct,
    unbalance,
    unbalance2_via_hamming,
)

# A perfect reference point: 4 runs, 3 two-level factors.
oa = cyclic_oa(2)
print("orthogonal array, 4 runs x 3 factors:")
print(oa.cells)
print("strength-2?", is_oa(oa, 2))
print("tolerance  ", tolerance(oa, 2))
print()

# Rao's inequality says how many factors an OA of this size could carry.
print("max factors for a strength-2 OA with 4 runs, 2 levels:", rao_max_factors(4, 2))

# One factor more than Rao allows: duplicate a column.  The result keeps
# strength 1 and has an exactly computable strength-2 unbalance.
t0 = trivial_construct(oa)
print("\nduplicated-column array, 4 runs x 4 factors:")
print(t0.cells)
print("tolerance      ", tolerance(t0, 2))
print("unbalance p=1  ", unbalance(t0, 2, 1))
print("unbalance p=2  ", unbalance(t0, 2, 2))
print("bandwidth      ", bandwidth(t0, 2))
print("normalized p=2 ", float(normalized_unbalance(t0, 2, 2)))
print("normalized p=oo", float(normalized_unbalance(t0, 2, np.inf)), "(= tolerance)")

# Individual tuple counts behind those summaries: how often does the pair
# (1, 1) appear in columns 1 and 2?  A balanced pair would appear once.
print("\ncount of (1,1) in columns (1,2):", count_tuple(t0, (1, 1), (1, 2)))
print("count of (1,2) in columns (1,2):", count_tuple(t0, (1, 2), (1, 2)))

# The squared unbalance never needs tuple enumeration: it is a polynomial
# in the Hamming similarities between runs.
h = hamming_similarity(t0)
print("\nrun-pair coincidence counts:")
print(h)
print(
    "squared unbalance via Hamming identity:",
    unbalance2_via_hamming(t0, 2),
    "(direct:", str(unbalance(t0, 2, 2)) + ")",
)

# How good can 4 runs x 4 factors possibly get?  A combinatorial lower
# bound on the squared unbalance, and the t0 array above attains it.
print("\nlower bound on squared unbalance:", lower_bound_unb22(4, 4, 2))

# The same machinery scales to arbitrary arrays, e.g. a random one.
# (The bound needs the run count divisible by the level count squared.)
rng = np.random.default_rng(1)
noisy = Array(rng.integers(1, 4, size=(18, 9)), n_levels=3)
print("\nrandom 18 x 9 array over 3 levels:")
print("tolerance    ", tolerance(noisy, 2))
print("unbalance p=2", unbalance(noisy, 2, 2))
print("lower bound  ", lower_bound_unb22(18, 9, 3), "(not attained by chance)")
