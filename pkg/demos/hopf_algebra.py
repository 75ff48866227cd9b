"""
The truncated free Hopf algebra
===============================

Words, coproduct, shuffle, and the exp/log bridge between primitive and
group-like elements.
"""
from fractions import Fraction

from unipotent.ncseries import (NCPoly, coproduct, is_grouplike, is_primitive, nc_exp, nc_log,
                                shuffle)

m, n = 2, 4
x, y = NCPoly.gen(1, m, n), NCPoly.gen(2, m, n)

# the coproduct splits a word into complementary subsequences
print(coproduct(x * y))

# shuffle is its dual: A1A2 ш A1 = 2 A1A1A2 + A1A2A1
print(shuffle((1, 2), (1,)))

# a Lie element is primitive, its exponential is group-like
lie = x + Fraction(1, 2) * (x * y - y * x)
print(is_primitive(lie))
g = nc_exp(lie)
print(is_grouplike(g))
print(nc_log(g).equals(lie))

# a failure comes with a witness pair
bad = NCPoly.one(m, n) + x * y
res = is_grouplike(bad)
print(res.ok, res.witness)
