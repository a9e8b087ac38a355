import pytest

from psodkit.errors import InputError, PreconditionError
from psodkit.strata import (
    Chart,
    ChartAtlas,
    Overlap,
    Stratification,
    Stratum,
    nodal_cubic,
    simple_crossing,
    skeleton,
    strata_from_atlas,
    strata_preorder,
    validate,
)


def test_nodal_cubic_is_valid():
    assert validate(nodal_cubic()) == []


def test_two_ambient_strata_is_a_violation():
    s = Stratification(
        (Stratum("X", 0, ("X",)), Stratum("Y", 0, ("Y",))),
        (),
    )
    assert any("codim-0" in v for v in validate(s))


def test_codim_monotonicity_violation():
    s = Stratification(
        (Stratum("X", 0, ("X",)), Stratum("D", 1, ("D",)), Stratum("E", 1, ("E",))),
        (("D", "E"), ("D", "X"), ("E", "X")),
    )
    assert any("monotonicity" in v for v in validate(s))


def test_missing_top_closure_is_a_violation():
    s = Stratification(
        (Stratum("X", 0, ("X",)), Stratum("D", 1, ("D",))),
        (),
    )
    assert any("close over" in v for v in validate(s))


def test_duplicate_component_labels_violation():
    s = Stratification(
        (Stratum("X", 0, ("n",)), Stratum("D", 1, ("n",))),
        (("D", "X"),),
    )
    assert any("globally distinct" in v for v in validate(s))


def test_skeleton():
    nc = nodal_cubic()
    assert [s.id for s in skeleton(nc, 1)] == ["D"]
    assert skeleton(nc, 1)[0].norm_components == ("D~",)
    assert skeleton(nc, 3) == ()
    cross = simple_crossing(2)
    assert [s.id for s in skeleton(cross, 1)] == ["H1", "H2"]


def test_skeleton_partitions_strata():
    for strat in (nodal_cubic(), simple_crossing(3)):
        seen = []
        for k in range(strat.n_d + 1):
            seen.extend(s.id for s in skeleton(strat, k))
        assert sorted(seen) == sorted(s.id for s in strat.strata)


def test_strata_preorder_nodal_chain():
    p = strata_preorder(nodal_cubic())
    assert p.lt("o", "D") and p.lt("D", "X") and p.lt("o", "X")
    assert not p.le("X", "o")


def test_strata_preorder_cross():
    p = strata_preorder(simple_crossing(2))
    assert p.le("H1", "H2") and p.le("H2", "H1")
    assert p.lt("H1&H2", "H1") and p.lt("H1", "X")
    assert p.is_transitive


def test_strata_preorder_single_divisor():
    s = Stratification(
        (Stratum("X", 0, ("X",)), Stratum("D", 1, ("D",))),
        (("D", "X"),),
    )
    p = strata_preorder(s)
    assert p.lt("D", "X")


def test_strata_preorder_total_per_codim_layer():
    p = strata_preorder(simple_crossing(3))
    cross = simple_crossing(3)
    for a in cross.strata:
        for b in cross.strata:
            if a.codim == b.codim:
                assert p.le(a.id, b.id) and p.le(b.id, a.id)


def test_strata_preorder_requires_valid_input():
    bad = Stratification((Stratum("X", 0, ("X",)), Stratum("Y", 0, ("Y",))), ())
    with pytest.raises(PreconditionError):
        strata_preorder(bad)


# ---------------------------------------------------------------------------
# atlases


def test_atlas_simple_cross():
    atlas = ChartAtlas((Chart("U", ("b1", "b2")),))
    s = strata_from_atlas(atlas)
    assert validate(s) == []
    got = sorted((t.codim, t.id) for t in s.strata)
    assert got == [(0, "X"), (1, "B1"), (1, "B2"), (2, "B1&B2")]
    assert all(len(t.norm_components) == 1 for t in s.strata)


def test_atlas_two_charts_glued():
    atlas = ChartAtlas(
        (Chart("U", ("b",)), Chart("V", ("c",))),
        (Overlap("U", "V", {"b": "c"}),),
    )
    s = strata_from_atlas(atlas)
    divisors = [t for t in s.strata if t.codim == 1]
    assert len(divisors) == 1
    assert len(divisors[0].norm_components) == 1


def test_atlas_nodal_monodromy():
    # one chart with two crossing branches identified with each other: an
    # irreducible divisor crossing itself, normalized by a single component
    atlas = ChartAtlas(
        (Chart("U", ("b1", "b2")),),
        (Overlap("U", "U", {"b1": "b2"}),),
    )
    s = strata_from_atlas(atlas)
    assert validate(s) == []
    got = sorted((t.codim, t.id) for t in s.strata)
    assert got == [(0, "X"), (1, "B1"), (2, "B1&B1")]
    divisor = next(t for t in s.strata if t.codim == 1)
    assert len(divisor.norm_components) == 1
    node = next(t for t in s.strata if t.codim == 2)
    assert s.contained_in_closure(node.id, divisor.id)


def test_atlas_simple_nc_single_component_invariant():
    # no self-identifications: every stratum normalizes with one component
    atlas = ChartAtlas(
        (Chart("U", ("b1", "b2")), Chart("V", ("c1", "c2"))),
        (Overlap("U", "V", {"b1": "c1"}),),
    )
    s = strata_from_atlas(atlas)
    assert validate(s) == []
    assert all(len(t.norm_components) == 1 for t in s.strata)


def test_atlas_validation_errors():
    with pytest.raises(InputError):
        Overlap("U", "V", {"b1": "c", "b2": "c"})  # not injective
    with pytest.raises(InputError):
        ChartAtlas(
            (Chart("U", ("b",)),),
            (Overlap("U", "U", {"nope": "b"}),),
        )


def test_atlas_depth_caps_codimension():
    atlas = ChartAtlas((Chart("U", ("b1", "b2", "b3")),))
    s = strata_from_atlas(atlas, depth=2)
    assert max(t.codim for t in s.strata) == 2
    assert validate(s) == []


def test_atlas_output_always_validates():
    import random

    rng = random.Random(9)
    for _ in range(25):
        charts = []
        for ci in range(rng.randint(1, 3)):
            nb = rng.randint(1, 3)
            charts.append(Chart(f"c{ci}", tuple(f"c{ci}b{j}" for j in range(nb))))
        overlaps = []
        for _ in range(rng.randint(0, 3)):
            a = rng.choice(charts)
            b = rng.choice(charts)
            if not a.branches or not b.branches:
                continue
            x, y = rng.choice(a.branches), rng.choice(b.branches)
            if a.id == b.id and x == y:
                continue
            overlaps.append(Overlap(a.id, b.id, {x: y}))
        s = strata_from_atlas(ChartAtlas(tuple(charts), tuple(overlaps)))
        assert validate(s) == []
