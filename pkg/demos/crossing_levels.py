"""
Where the Selmer bound falls below the De Rham quotient
=======================================================

Cumulative upper bounds for the Selmer variety against the Hodge-side
lower bound, level by level.
"""
from fractions import Fraction

from unipotent.lcs_dims import CurveShape
from unipotent.selmer_bounds import AwayPlace, CurveData, find_crossing, h2_global_bound

rep = find_crossing(CurveData(CurveShape(0, 3)), "conjecture2", 20)
print("crossing level:", rep.crossing)
for r in rep.rows[:10]:
    print(r.level, r.selmer_upper, r.quotient_lower, r.gap)
print(rep.warnings)

# heavier local data pushes the crossing out
heavy = CurveData(CurveShape(1, 2), atp_places=2, away=(AwayPlace(2, 1),), K=2)
print(find_crossing(heavy, "conjecture2", 50).crossing)

# the weak-Jannsen bound grows like 15^(n/4) against 2^n: slowly
data = CurveData(CurveShape(1, 1), K=1, k=2)
for n in (8, 20, 40, 80, 160):
    print(n, float(Fraction(h2_global_bound(n, data, "weak_jannsen"), 2 ** n)))
