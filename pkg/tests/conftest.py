from hypothesis import settings
from hypothesis import strategies as st

from achieveset.sets import (EMPTY, NAT, Complement, Finite, Intersection, Progression,
                             SymDiffFinite, Union)

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_ints = st.lists(st.integers(1, 40), max_size=5, unique=True)
finite_sets = small_ints.map(lambda xs: Finite(tuple(xs)))
progressions = st.builds(Progression, st.integers(1, 12), st.integers(1, 6))
leaves = st.one_of(finite_sets, progressions, st.just(NAT), st.just(EMPTY))

semilinear_sets = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.builds(Union, kids, kids),
        st.builds(Intersection, kids, kids),
        st.builds(Complement, kids),
        st.builds(SymDiffFinite, kids, small_ints.map(tuple)),
    ),
    max_leaves=5,
)


def brute(s, n):
    """Members of s in 1..n by direct evaluation."""
    return [m for m in range(1, n + 1) if s.member(m)]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
