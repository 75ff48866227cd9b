"""
A rank-one elliptic curve minus its origin
==========================================

At level three the Selmer side has dimension rank while the De Rham
quotient has dimension two, so rank at most one suffices.
"""
from unipotent.lcs_dims import elliptic_example

for rank in (0, 1, 2):
    rep = elliptic_example(rank)
    print(rank, rep.selmer_u3, rep.dim_u3, rep.dim_f0_u3, rep.derham_quotient, rep.verdict)
