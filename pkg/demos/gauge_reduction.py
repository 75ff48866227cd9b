"""
Reducing a unipotent connection to cohomology classes
=====================================================

Each entry of a strictly upper-triangular connection is split into a
combination of dz/z, dz/(z-1) and an exact part, which a gauge change removes.
"""
from unipotent.derham import (ConnMatrix, PlaceSet, gauge_identity_holds, gauge_reduce,
                              parse_ratfunc, partial_fractions, reduce_form)

places = PlaceSet((0, 1))

print(partial_fractions(parse_ratfunc("1/(z*(z-1))"), places).principal)
r = reduce_form(parse_ratfunc("1/(z-1)^2 + 3/z"), places)
print(r.coeffs, r.exact)

# rank three: clearing the first superdiagonal changes the corner entry
omega = ConnMatrix.from_dict(3, {(1, 2): parse_ratfunc("1"), (2, 3): parse_ratfunc("1")})
res = gauge_reduce(omega, places, keep_factors=True)
for row in res.gauge:
    print([str(f) for f in row])
print(res.reduced.nonzero())
print(len(res.factors), gauge_identity_holds(omega, res.gauge, res.reduced))
