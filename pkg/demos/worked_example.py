"""
Orbit of a point on P^2 under a monomial map
============================================

The map (x^2 z : y^3 : z^3) has degree 3, but the point (t : 2 : 1) lands
in its indeterminacy locus at t = oo, so its height only doubles.
"""

from ffdyn import (alpha_estimate, check_sufficient_condition, degree_sequence,
                   delta_estimate, orbit, parse_map, parse_point)

f = parse_map("map P2: [x^2*z, y^3, z^3]")
P = parse_point("point P2: [t, 2, 1]")

rec = orbit(f, P, 10)
print("heights      ", rec.heights)
print("cancellations", rec.cancellations)

# heights double, degrees triple
print("alpha", alpha_estimate(rec).exact)
print("delta", delta_estimate(degree_sequence(f, 6)).exact)

cert = check_sufficient_condition(f, P, 8)
print(cert.summary)

# a section of degree 2 that misses the bad point grows at the full rate
Q = parse_point("point P2: [t^2 + 3, t - 5, 2*t^2 + 1]")
rec = orbit(f, Q, 8)
print("heights", rec.heights, "alpha", alpha_estimate(rec).exact)
print(check_sufficient_condition(f, Q, 8).summary)
