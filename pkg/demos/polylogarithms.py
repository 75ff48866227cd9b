"""
Iterated integrals and p-adic polylogarithms
============================================

Flat sections of the universal unipotent connection on P^1 - {0, 1, oo}
expand as power series whose coefficients are 1/k, 1/k^2, ...; in the
residue disk of 0 they evaluate to certified p-adic numbers.
"""
from fractions import Fraction

from unipotent.coeffs import PAdicNumber
from unipotent.connection import (UniversalConnection, evaluate_section, form_offset,
                                  independence_test, polylog, shuffle_check, solve_horizontal,
                                  word_tail)
from unipotent.ncseries import format_word, is_grouplike

conn = UniversalConnection.standard()
sec = solve_horizontal(conn, 3, 20)

# words ending in A1 integrate dz/z from the puncture and are skipped
print("divergent:", [format_word(w) for w in sorted(sec.divergent, key=lambda w: (len(w), w))])
print("u_A1A2:", sec[(1, 2)].coeffs[:6])

# the product of two coordinates is a shuffle combination of coordinates
print(shuffle_check(sec, (2,), (1, 2)))

# Li_2(7) in Q_7 against a direct partial sum
val = polylog(7, 2, 7, 60)
print(val)
direct = PAdicNumber.exact(sum(Fraction(7) ** k / k ** 2 for k in range(1, 200)), 7)
print(val.agrees(direct))

# from a regular basepoint every word converges and values are group-like
b = -1
reg = UniversalConnection.from_places(conn.places, b)
sec_b = solve_horizontal(reg, 3, 30)
tail = word_tail(min(form_offset(a, b, 5) for a in reg.forms))
point = evaluate_section(sec_b, PAdicNumber.exact(b + 5, 5), tail)
print(is_grouplike(point))

# no polynomial relation of degree <= 1 among the coordinates
print(independence_test(sec, 1).full_rank)
