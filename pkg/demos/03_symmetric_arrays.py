"""Group symmetry: storing and searching arrays as orbit cores.

A generator g acts on an array by permuting levels and columns at once.  If
the row multiset is preserved, the array splits into g-orbits and can be
stored (or searched!) as a handful of core rows.  Three families are built
in: bicyclic (levels and columns rotate together), semicyclic (only the
levels a..s rotate), and Klein (two column swaps).
"""

import numpy as np

from aoakit.arrays import Array, tolerance, unbalance
from aoakit.symmetry import (
    act,
    bicyclic_generator,
    compress,
    equivalent,
    expand,
    format_generator,
    is_automorphism,
    klein_generator,
    semicyclic_generator,
)

# A 6-run array over 3 levels whose rows split into two bicyclic orbits.
full = Array(
    np.array(
        [
            [1, 1, 2, 3, 2],
            [3, 2, 2, 1, 3],
            [3, 1, 3, 2, 1],
            [1, 3, 2, 1, 1],
            [3, 2, 1, 2, 2],
            [2, 1, 3, 3, 3],
        ]
    ),
    n_levels=3,
)
g = bicyclic_generator(3, 5, 3)
print("bicyclic generator:", format_generator(g))
print("is an automorphism of the array?", is_automorphism(g, full))

# The generator's action on the array permutes rows, nothing more:
print("\noriginal rows:   ", [tuple(r) for r in full.cells.tolist()])
print("after the action:", [tuple(r) for r in act(g, full).cells.tolist()])

# Compress to orbit representatives, then rebuild.
enc = compress(full, "bicyclic", 3)
print("\ncore rows (2 of 6):", list(enc.core))
print("orbit size:", enc.orbit_size, "-> expands to", enc.expanded_runs, "runs")
rebuilt = expand(enc)
print("expand(compress(a)) equivalent to a?", equivalent(rebuilt, full))

# Metrics are invariant under any level/column action, symmetric or not.
h = bicyclic_generator(3, 5, 1)  # rotate levels only
print(
    "\nunbalance before/after another action:",
    unbalance(full, 2, 2),
    "/",
    unbalance(act(h, full), 2, 2),
)
print("tolerance before/after:", tolerance(full, 2), "/", tolerance(act(h, full), 2))

# Semicyclic arrays may keep fixed rows (those using only the frozen level).
quasi = Array(
    np.array(
        [
            [1, 1, 1, 1, 1],
            [1, 1, 2, 3, 2],
            [1, 1, 3, 2, 3],
            [1, 3, 2, 1, 1],
            [1, 2, 3, 1, 1],
        ]
    ),
    n_levels=3,
)
qenc = compress(quasi, "semicyclic", 2)
print("\nsemicyclic generator:", format_generator(qenc.generator))
print("fixed rows:", list(qenc.fixed_rows))
print("core rows: ", list(qenc.core))
print("round-trips?", equivalent(expand(qenc), quasi))

# Klein symmetry swaps column pairs (1,2) and (3,4) with no level motion.
kg = klein_generator(3, 5)
print("\nklein generator:", format_generator(kg))
eight = Array(
    np.array(
        [
            [1, 1, 1, 1, 1],
            [1, 1, 2, 2, 2],
            [2, 3, 1, 3, 2],
            [3, 2, 3, 1, 2],
            [2, 3, 3, 1, 3],
            [3, 2, 1, 3, 3],
            [2, 2, 2, 3, 1],
            [2, 2, 3, 2, 1],
        ]
    ),
    n_levels=3,
)
print("klein-symmetric?", is_automorphism(kg, eight))
kenc = compress(eight, "klein")
print("core size:", len(kenc.core), "fixed rows:", len(kenc.fixed_rows))
print("round-trips?", equivalent(expand(kenc), eight))
