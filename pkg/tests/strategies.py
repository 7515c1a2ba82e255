"""Hypothesis strategies shared by the test modules."""

import random

from hypothesis import strategies as st

from ptsbench.formula import BOT, Atom, Conj, Disj, Impl

atoms = st.sampled_from(["p", "q", "r"]).map(Atom)
atoms_or_bot = st.one_of(atoms, st.just(BOT))

formulas = st.recursive(
    atoms_or_bot,
    lambda inner: st.one_of(
        st.builds(Conj, inner, inner),
        st.builds(Disj, inner, inner),
        st.builds(Impl, inner, inner),
    ),
    max_leaves=8,
)

# Package generators take an explicit Random; seeding from hypothesis keeps
# shrinking meaningful (the seed shrinks toward 0).
rngs = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)
