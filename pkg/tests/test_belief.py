import itertools
import random

import pytest

import semival as sv
from semival.belief import all_focal_sets
from semival.errors import CapacityError, DomainError, MassError, TotalConflictError

import helpers


@pytest.fixture
def ab(ab_catalog):
    cat = ab_catalog
    U = cat.domain("u")

    def fs(*labels):
        frame = cat.frame("u")
        return sv.FocalSet.of(cat, U, [(frame.index(l),) for l in labels])

    return cat, U, fs


@pytest.fixture
def worked_pair(ab):
    cat, U, fs = ab
    m1 = sv.set_potential(cat, U, [(fs("a"), 0.6), (fs("a", "b"), 0.4)], "bpa")
    m2 = sv.set_potential(cat, U, [(fs("b"), 0.5), (fs("a", "b"), 0.5)], "bpa")
    return cat, U, fs, m1, m2


def test_focal_set_canonicalization(ab):
    cat, U, fs = ab
    f = sv.FocalSet(U, ((1,), (0,), (1,)))
    assert f.configs == ((0,), (1,))
    assert len(sv.FocalSet.empty(U)) == 0
    assert fs("a", "b").complement(cat).configs == ()
    assert fs("a").complement(cat) == fs("b")
    with pytest.raises(DomainError):
        sv.FocalSet.of(cat, U, [(7,)])


def test_set_potential_canonical_form(ab):
    cat, U, fs = ab
    pot = sv.set_potential(cat, U, [(fs("b"), 0.25), (fs("b"), 0.25), (fs("a"), 0.5)])
    assert pot.focal == ((fs("a"), 0.5), (fs("b"), 0.5))
    dropped = sv.set_potential(cat, U, [(fs("a"), 1.0), (fs("b"), 0.0)])
    assert len(dropped.focal) == 1
    with pytest.raises(MassError):
        sv.set_potential(cat, U, [(fs("a"), -0.2)])
    with pytest.raises(MassError):
        sv.set_potential(cat, U, [(fs("a"), 0.7)], "bpa")


def test_combine_worked_example(worked_pair):
    cat, U, fs, m1, m2 = worked_pair
    raw = sv.combine_potentials(m1, m2)
    assert raw.kind == "raw"
    expect = {
        sv.FocalSet.empty(U): 0.30,
        fs("a"): 0.30,
        fs("b"): 0.20,
        fs("a", "b"): 0.20,
    }
    assert set(raw.by_set) == set(expect)
    for k, v in expect.items():
        assert abs(raw.mass(k) - v) < 1e-12


def test_combine_with_vacuous_cylindrifies(ab):
    cat, U, fs = ab
    cat2 = sv.VariableCatalog.of({"u": ("a", "b"), "v": ("0", "1")})
    UU, VV = cat2.domain("u"), cat2.domain("v")
    m = sv.set_potential(cat2, UU, [(sv.FocalSet(UU, ((0,),)), 0.7),
                                    (sv.FocalSet(UU, ((0,), (1,))), 0.3)], "bpa")
    out = sv.combine_potentials(m, sv.vacuous(cat2, VV))
    assert out.domain == cat2.domain("u", "v")
    moved = sv.transport_potential(m, cat2.domain("u", "v"))
    keys = set(out.by_set) | set(moved.by_set)
    assert all(abs(out.mass(k) - moved.mass(k)) < 1e-12 for k in keys)


def test_combine_against_brute_force():
    """Independent oracle: explicit cylinder sets built from raw products."""
    rng = random.Random(4)
    for _ in range(25):
        cat = helpers.random_catalog(rng, max_vars=3, max_frame=3)
        d1 = helpers.random_domain(rng, cat, max_size=2)
        d2 = helpers.random_domain(rng, cat, max_size=2)
        if cat.config_count(d1 | d2) > 9:
            continue
        m1 = helpers.random_mass_function(rng, cat, d1)
        m2 = helpers.random_mass_function(rng, cat, d2)
        got = sv.combine_potentials(m1, m2)

        u = d1 | d2
        union_configs = [c for c in sv.enumerate_configs(cat, u)]
        expect: dict = {}
        for f1, mass1 in m1.focal:
            for f2, mass2 in m2.focal:
                cyl = frozenset(
                    c.values for c in union_configs
                    if sv.restrict(c, d1).values in f1.config_set
                    and sv.restrict(c, d2).values in f2.config_set
                )
                expect[cyl] = expect.get(cyl, 0.0) + mass1 * mass2
        for fset, mass in expect.items():
            assert abs(got.mass(sv.FocalSet(u, tuple(fset))) - mass) < 1e-9


def test_transport_examples():
    cat = sv.VariableCatalog.of({"x": ("0", "1"), "y": ("0", "1")})
    XY, X = cat.domain("x", "y"), cat.domain("x")
    m = sv.set_potential(cat, XY, [(sv.FocalSet(XY, ((0, 0), (0, 1))), 1.0)], "bpa")
    assert sv.transport_potential(m, XY) is m
    down = sv.transport_potential(m, X)
    assert down.focal == ((sv.FocalSet(X, ((0,),)), 1.0),)
    # two distinct focal sets with the same projection merge
    m2 = sv.set_potential(cat, XY, [
        (sv.FocalSet(XY, ((0, 0),)), 0.5),
        (sv.FocalSet(XY, ((0, 1),)), 0.5),
    ], "bpa")
    merged = sv.transport_potential(m2, X)
    assert merged.focal == ((sv.FocalSet(X, ((0,),)), 1.0),)


def test_dempster_worked_example(worked_pair):
    cat, U, fs, m1, m2 = worked_pair
    out = sv.dempster_combine(m1, m2)
    assert out.kind == "bpa"
    assert abs(out.conflict - 0.3) < 1e-12
    assert abs(out.mass(fs("a")) - 3 / 7) < 1e-12
    assert abs(out.mass(fs("b")) - 2 / 7) < 1e-12
    assert abs(out.mass(fs("a", "b")) - 2 / 7) < 1e-12
    assert out.empty_mass() == 0.0


def test_dempster_neutral_and_total_conflict(worked_pair):
    cat, U, fs, m1, _ = worked_pair
    out = sv.dempster_combine(m1, sv.vacuous(cat, U))
    assert out.conflict == 0.0
    assert all(abs(out.mass(k) - m1.mass(k)) < 1e-12 for k in m1.by_set)
    certain_a = sv.set_potential(cat, U, [(fs("a"), 1.0)], "bpa")
    certain_b = sv.set_potential(cat, U, [(fs("b"), 1.0)], "bpa")
    with pytest.raises(TotalConflictError):
        sv.dempster_combine(certain_a, certain_b)


def test_dempster_commutative_associative():
    rng = random.Random(9)
    for _ in range(20):
        cat = helpers.random_catalog(rng, max_vars=2, max_frame=3)
        doms = [helpers.random_domain(rng, cat, max_size=2) for _ in range(3)]
        a, b, c = (helpers.random_bpa(rng, cat, d) for d in doms)
        try:
            ab_ = sv.dempster_combine(a, b)
            ba_ = sv.dempster_combine(b, a)
            abc1 = sv.dempster_combine(ab_, c)
            abc2 = sv.dempster_combine(a, sv.dempster_combine(b, c))
        except TotalConflictError:
            continue
        keys = set(ab_.by_set) | set(ba_.by_set)
        assert all(abs(ab_.mass(k) - ba_.mass(k)) < 1e-9 for k in keys)
        keys = set(abc1.by_set) | set(abc2.by_set)
        assert all(abs(abc1.mass(k) - abc2.mass(k)) < 1e-9 for k in keys)


def test_belief_commonality_examples(ab):
    cat, U, fs = ab
    m = sv.set_potential(cat, U, [(fs("a"), 0.3), (fs("a", "b"), 0.7)], "bpa")
    assert abs(sv.mass_to_belief(m, fs("a")) - 0.3) < 1e-12
    assert abs(sv.mass_to_belief(m, fs("a", "b")) - 1.0) < 1e-12
    assert abs(sv.mass_to_commonality(m, fs("a")) - 1.0) < 1e-12
    assert abs(sv.mass_to_commonality(m, fs("b")) - 0.7) < 1e-12
    vac = sv.vacuous(cat, U)
    assert sv.mass_to_belief(vac, fs("a", "b")) == 1.0
    assert sv.mass_to_belief(vac, fs("a")) == 0.0
    assert sv.mass_to_commonality(vac, fs("a")) == 1.0
    assert sv.mass_to_belief(m, fs("a", "b")) == m.total_mass()


def test_moebius_inversion_examples(ab):
    cat, U, fs = ab
    m = sv.set_potential(cat, U, [(fs("a"), 0.3), (fs("a", "b"), 0.7)], "bpa")
    btable = {s: sv.mass_to_belief(m, s) for s in all_focal_sets(cat, U)}
    back = sv.belief_to_mass(cat, U, btable)
    assert abs(back.mass(fs("a")) - 0.3) < 1e-12
    assert abs(back.mass(fs("a", "b")) - 0.7) < 1e-12
    assert len(back.focal) == 2

    vac = sv.vacuous(cat, U)
    for table_of, invert in (
        (sv.mass_to_belief, sv.belief_to_mass),
        (sv.mass_to_commonality, sv.commonality_to_mass),
    ):
        table = {s: table_of(vac, s) for s in all_focal_sets(cat, U)}
        back = invert(cat, U, table)
        assert back.focal == ((fs("a", "b"), 1.0),)


def test_moebius_round_trips_random():
    rng = random.Random(10)
    count = 0
    while count < 100:
        cat = helpers.random_catalog(rng, max_vars=2, max_frame=2)
        d = helpers.random_domain(rng, cat, max_size=2)
        if cat.config_count(d) > 4:
            continue
        m = helpers.random_mass_function(rng, cat, d)
        subsets = all_focal_sets(cat, d)
        btable = {s: sv.mass_to_belief(m, s) for s in subsets}
        qtable = {s: sv.mass_to_commonality(m, s) for s in subsets}
        back_b = sv.belief_to_mass(cat, d, btable)
        back_q = sv.commonality_to_mass(cat, d, qtable)
        for back in (back_b, back_q):
            keys = set(m.by_set) | set(back.by_set)
            assert all(abs(m.mass(k) - back.mass(k)) < 1e-9 for k in keys)
        count += 1


def test_moebius_cap_and_completeness(ab):
    cat, U, fs = ab
    m = sv.vacuous(cat, U)
    table = {s: sv.mass_to_belief(m, s) for s in all_focal_sets(cat, U)}
    with pytest.raises(CapacityError):
        sv.belief_to_mass(cat, U, table, cap=1)
    incomplete = dict(list(table.items())[:-1])
    with pytest.raises(MassError):
        sv.belief_to_mass(cat, U, incomplete)


def test_support_and_plausibility_examples(ab):
    cat, U, fs = ab
    m = sv.set_potential(cat, U, [(fs("a"), 0.3), (fs("a", "b"), 0.7)], "bpa")
    qsp, sp = sv.degree_of_support(m, fs("a"))
    assert abs(qsp - 0.3) < 1e-12 and abs(sp - 0.3) < 1e-12
    _, sp_full = sv.degree_of_support(m, fs("a", "b"))
    assert abs(sp_full - 1.0) < 1e-12
    assert abs(sv.degree_of_plausibility(m, fs("a")) - 1.0) < 1e-12
    assert abs(sv.degree_of_plausibility(m, fs("b")) - 0.7) < 1e-12
    assert sv.degree_of_plausibility(m, sv.FocalSet.empty(U)) == 0.0
    # duality against the complement
    _, sp_a = sv.degree_of_support(m, fs("a"))
    assert abs(sv.degree_of_plausibility(m, fs("b")) - (1 - sp_a)) < 1e-12


def test_support_of_conflicted_raw_potential(worked_pair):
    cat, U, fs, m1, m2 = worked_pair
    raw = sv.combine_potentials(m1, m2)  # carries conflict 0.3
    qsp, sp = sv.degree_of_support(raw, fs("a"))
    assert abs(qsp - 0.6) < 1e-12
    assert abs(sp - 3 / 7) < 1e-12
    # matches normalizing first and asking afterwards
    dem = sv.dempster_combine(m1, m2)
    _, sp_dem = sv.degree_of_support(dem, fs("a"))
    assert abs(sp - sp_dem) < 1e-12


def test_fully_contradictory_potential_errors(ab):
    cat, U, fs = ab
    dead = sv.set_potential(cat, U, [(sv.FocalSet.empty(U), 1.0)])
    with pytest.raises(TotalConflictError):
        sv.degree_of_support(dead, fs("a"))
    with pytest.raises(TotalConflictError):
        sv.degree_of_plausibility(dead, fs("a"))


def _three_frame():
    cat = sv.VariableCatalog.of({"w": ("p", "q", "r")})
    return cat, cat.domain("w")


def test_duality_exhaustive_on_three_element_frame():
    rng = random.Random(11)
    cat, W = _three_frame()
    for _ in range(40):
        m = helpers.random_mass_function(rng, cat, W)
        for h in all_focal_sets(cat, W):
            pl = sv.degree_of_plausibility(m, h)
            _, sp_c = sv.degree_of_support(m, h.complement(cat))
            assert abs(pl - (1 - sp_c)) < 1e-9


def test_support_monotone():
    rng = random.Random(12)
    cat, W = _three_frame()
    for _ in range(30):
        m = helpers.random_mass_function(rng, cat, W)
        subsets = all_focal_sets(cat, W)
        for h1, h2 in itertools.product(subsets, repeat=2):
            if h1.config_set <= h2.config_set:
                assert sv.degree_of_support(m, h1)[1] <= \
                    sv.degree_of_support(m, h2)[1] + 1e-12


def test_support_monotone_of_order_infinity():
    """Inclusion-exclusion lower bound for up to three inner hypotheses."""
    rng = random.Random(13)
    cat, W = _three_frame()
    subsets = all_focal_sets(cat, W)
    for _ in range(10):
        m = helpers.random_mass_function(rng, cat, W)
        sp = {h: sv.degree_of_support(m, h)[1] for h in subsets}
        for h in subsets:
            inner = [g for g in subsets if g.config_set <= h.config_set]
            for k in (1, 2, 3):
                for hs in itertools.combinations(inner, k):
                    bound = 0.0
                    for r in range(1, k + 1):
                        for picked in itertools.combinations(hs, r):
                            meet = picked[0].config_set
                            for g in picked[1:]:
                                meet = meet & g.config_set
                            bound += (-1) ** (r + 1) * sp[sv.FocalSet(W, tuple(meet))]
                    assert sp[h] >= bound - 1e-9


def test_quasi_support_of_meet_counts_common_refinements(ab):
    cat, U, fs = ab
    rng = random.Random(14)
    for _ in range(20):
        m = helpers.random_mass_function(rng, cat, cat.domain("u"))
        for h1 in all_focal_sets(cat, cat.domain("u")):
            for h2 in all_focal_sets(cat, cat.domain("u")):
                meet = sv.FocalSet(cat.domain("u"),
                                   tuple(h1.config_set & h2.config_set))
                direct = sv.degree_of_quasi_support(m, meet)
                both = sum(
                    mass for f, mass in m.focal
                    if f.config_set <= h1.config_set
                    and f.config_set <= h2.config_set
                )
                assert abs(direct - both) < 1e-12


def test_raw_combination_commutative_associative():
    rng = random.Random(15)
    done = 0
    while done < 25:
        cat = helpers.random_catalog(rng, max_vars=3, max_frame=3)
        doms = [helpers.random_domain(rng, cat, max_size=2) for _ in range(3)]
        if cat.config_count(doms[0] | doms[1] | doms[2]) > 9:
            continue
        a, b, c = (helpers.random_mass_function(rng, cat, d) for d in doms)
        ab_ = sv.combine_potentials(a, b)
        ba_ = sv.combine_potentials(b, a)
        keys = set(ab_.by_set) | set(ba_.by_set)
        assert all(abs(ab_.mass(k) - ba_.mass(k)) < 1e-9 for k in keys)
        left = sv.combine_potentials(ab_, c)
        right = sv.combine_potentials(a, sv.combine_potentials(b, c))
        keys = set(left.by_set) | set(right.by_set)
        assert all(abs(left.mass(k) - right.mass(k)) < 1e-9 for k in keys)
        done += 1


def test_single_singleton_operand_bounds_output(ab):
    cat, U, fs = ab
    cat2 = sv.VariableCatalog.of({"u": ("a", "b"), "v": ("0", "1")})
    UU, VV = cat2.domain("u"), cat2.domain("v")
    point = sv.set_potential(cat2, UU, [(sv.FocalSet(UU, ((0,),)), 1.0)], "bpa")
    other = sv.set_potential(cat2, VV, [
        (sv.FocalSet(VV, ((0,),)), 0.4),
        (sv.FocalSet(VV, ((0,), (1,))), 0.6),
    ], "bpa")
    out = sv.combine_potentials(point, other)
    cylinder = sv.transport_potential(point, cat2.domain("u", "v"))
    cyl_set = cylinder.focal[0][0].config_set
    assert all(f.config_set <= cyl_set for f, _ in out.focal)
