import random

from hypothesis import strategies as st

from morseforge._rat import rat
from morseforge.poly import MultiPoly


def rand_rat(rng: random.Random, height: int):
    return rat(rng.randint(-height, height), rng.randint(1, height))


@st.composite
def rationals(draw, height=30):
    num = draw(st.integers(min_value=-height, max_value=height))
    den = draw(st.integers(min_value=1, max_value=height))
    return rat(num, den)


@st.composite
def polys(draw, dim=None, max_terms=6, max_exp=4, height=30):
    if dim is None:
        dim = draw(st.integers(min_value=1, max_value=3))
    n_terms = draw(st.integers(min_value=0, max_value=max_terms))
    terms = []
    for _ in range(n_terms):
        exps = tuple(
            draw(st.integers(min_value=0, max_value=max_exp)) for _ in range(dim)
        )
        terms.append((exps, draw(rationals(height))))
    return MultiPoly(dim, terms)
