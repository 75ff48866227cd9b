"""
Lower central series dimensions
===============================

Graded pieces of the unipotent fundamental group of a curve, from the
Witt-type divisor sums, next to the Hodge bound and the quotient bound.
"""
from unipotent.lcs_dims import CurveShape, dim_ladder, witt_compact, witt_open

# the thrice-punctured line has a free fundamental group on two generators
rep = dim_ladder(CurveShape(0, 3), 8)
rows = rep.rows()
print("  ".join(f"{k:>14}" for k in rows[0]))
for row in rows:
    print("  ".join(f"{x:>14}" for x in row.values()))

# d_n m^-n n -> 1: almost every word is a power of a unique Lyndon word
for m in (2, 3):
    print(m, [witt_open(m, n) for n in range(1, 9)])

# a compact genus 2 surface has one relation, which trims every level
print([witt_compact(2, n) for n in range(1, 9)])

# genus one compact gets the once-punctured elliptic ladder, with a warning
ell = dim_ladder(CurveShape(1, compact=True), 4)
print(ell.d, ell.warnings)
