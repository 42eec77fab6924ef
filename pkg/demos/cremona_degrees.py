"""
Degree sequences
================

Composing a map with itself and dividing out the common factor of the forms
gives the degrees d_m of the iterates.
"""

from ffdyn import compose, degree_sequence, delta_estimate, parse_map
from ffdyn.dynamics import degree_sequence_by_lines

sigma = parse_map("map P2: [y*z, x*z, x*y]")
print(compose(sigma, sigma))          # the identity, after removing xyz
seq = degree_sequence(sigma, 8)
print("Cremona", seq.d, "delta", delta_estimate(seq).exact)

g = parse_map("map P1: [t*x^2, y^2]")
seq = degree_sequence(g, 4)
print("d", seq.d, "e", seq.e)

# not geometric: the degrees satisfy d_(m+1) = 2 d_m + 2 d_(m-1)
h = parse_map("map P2: [-y^3 + 2*x^2*y, -y^2*z + 2*x*z^2, 2*y*z^2 - x^2*z]")
seq = degree_sequence(h, 4)
print("exact part", seq.d)

# a line pushed forward mod p gives the same degrees much further out
probe = degree_sequence_by_lines(h, 10)
est = delta_estimate(probe)
print("line probe", probe.d)
print("ratios", [round(r, 4) for r in est.ratio_estimates], "limit 1 + sqrt(3)")
