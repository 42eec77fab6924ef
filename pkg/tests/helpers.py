"""Shared constructions for the test modules."""

from fractions import Fraction

import numpy as np

from ffdyn.experiments import random_map, random_section
from ffdyn.projective import variable_names
from oracles import meets, next_height, sympy_forms


def coeffs(p):
    return [Fraction(int(c.p), int(c.q)) if hasattr(c, "q") else Fraction(int(c))
            for c in p.coeffs()]


def oracle_forms(f):
    grouped = [[(xs, coeffs(c)) for xs, c in terms] for terms in f.grouped_terms()]
    return sympy_forms(grouped, variable_names(f.n))


def oracle_meets(f, P):
    return meets(oracle_forms(f), variable_names(f.n), [coeffs(p) for p in P.polys],
                 P.D, f.d, f.e)


def oracle_next_height(f, P):
    return next_height(oracle_forms(f), variable_names(f.n), [coeffs(p) for p in P.polys],
                       P.D, f.d, f.e)


def random_instances(seed, count, n_choices=(1, 2), box=3):
    """``count`` random (map, point) pairs with small coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(n_choices))
        f = random_map(rng, n, int(rng.integers(2, 4)), int(rng.integers(0, 2)))
        P = random_section(rng, n, int(rng.integers(1, 3)), box)
        if P is not None:
            out.append((f, P))
    return out
