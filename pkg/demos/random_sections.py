"""
How often do random sections reach the dynamical degree?
========================================================

Sample sections of degree 2 with small integer coefficients, run their
orbits, and compare the growth of heights with delta = 3.
"""

import numpy as np

from ffdyn import alpha_estimate, check_sufficient_condition, orbit, parse_map
from ffdyn.experiments import sample_sections

f = parse_map("map P2: [x^2*z, y^3, z^3]")
points = sample_sections(n=2, degree=2, count=40, B=5, seed=1)

alphas, certified = [], []
for P in points:
    rec = orbit(f, P, 8)
    alphas.append(alpha_estimate(rec).value)
    certified.append(check_sufficient_condition(f, P, 8, record=rec).holds)

alphas = np.array(alphas)
certified = np.array(certified)
print("reach alpha = 3:", np.sum(np.isclose(alphas, 3)), "of", len(alphas))
print("certificate holds:", certified.sum())
print("alpha among the rest:", np.round(alphas[~certified], 4))
