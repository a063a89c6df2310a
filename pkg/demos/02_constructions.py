"""Algebraic constructions that beat Rao's bound as gently as possible.

Strength-2 orthogonal arrays over a prime power s stop at k = s + 1 factors
(for N = s^2 runs).  The workbench builds arrays that go past that limit
with provably minimal squared unbalance: quadratic "half" columns appended
to a linear orthogonal block, and a doubled block with extension columns.
"""

from aoakit.arrays import lower_bound_unb22, tolerance, unbalance
from aoakit.constructions import ConstructionSpec, construct, verify_construction

# --- The half construction: s^2 runs, s + 1 + kappa factors ---------------
spec = ConstructionSpec(s=3, ell=2, kappa=1, variant="half")
a = construct(spec)
print(f"half construction, s=3, kappa=1: {a.n_runs} runs x {a.n_factors} factors")
print(a.cells)
print("tolerance    ", tolerance(a, 2))
print("unbalance p=2", unbalance(a, 2, 2))
print("lower bound  ", lower_bound_unb22(a.n_runs, a.n_factors, 3), "(attained)")

# Every guarantee is checkable after the fact.  Items: (0) the first block
# is a strength-2 OA, (1a)/(1b) sub-OA structure of the quadratic columns,
# (2) the tolerance value, (3) the unbalance values.
report = verify_construction(a, spec)
for item, passed in report.items.items():
    print(f"  item {item}: {'pass' if passed else 'FAIL'}")
print("  all good?", report.ok)

# Published reference values for one extra column (kappa = 1):
print("\n(s, k, Unb2, Tol) across prime powers:")
for s in (3, 4, 5, 7, 8, 9):
    inst = construct(ConstructionSpec(s=s, ell=2, kappa=1, variant="half"))
    print(
        f"  s={s}: k={inst.n_factors}, "
        f"unb2={unbalance(inst, 2, 2)}, tol={tolerance(inst, 2)}"
    )

# --- The extension construction: 2 s^2 runs, 2(s + 1) + kappa factors ------
# Two stacked blocks double the budget; parity of s picks the variant.
print("\nextension construction with one extra column:")
for s in (3, 4, 5):
    variant = "even_ext" if s % 2 == 0 else "odd_ext"
    ext = construct(ConstructionSpec(s=s, ell=2, kappa=1, variant=variant))
    print(
        f"  s={s}: {ext.n_runs} runs x {ext.n_factors} factors, "
        f"unb1={unbalance(ext, 2, 1)}, unb2={unbalance(ext, 2, 2)}, "
        f"tol={tolerance(ext, 2)}"
    )
    assert unbalance(ext, 2, 2) == lower_bound_unb22(ext.n_runs, ext.n_factors, s)

# --- Larger run sizes: ell = 3 gives s^3 runs ------------------------------
big = construct(ConstructionSpec(s=2, ell=3, kappa=1, variant="half"))
print(f"\nhalf construction at ell=3, s=2: {big.n_runs} runs x {big.n_factors} factors")
print("tolerance    ", tolerance(big, 2))
print("unbalance p=2", unbalance(big, 2, 2))

# Invalid parameters fail fast with a reason.
try:
    construct(ConstructionSpec(s=6, ell=2, kappa=1, variant="half"))
except ValueError as exc:
    print("\nexpected rejection:", exc)
