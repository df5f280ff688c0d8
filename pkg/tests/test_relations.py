import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import conv_out
from optypes.algebra import Composite, DimensionFunction, FloorAffine, Shape
from optypes.errors import InputBelowMinimum
from optypes.ops import conv, conv_t, make_identity, pool
from optypes.relations import (
    ShapeDomain,
    complete_compat,
    complete_equiv,
    dedup,
    forward_compat,
    image_domain,
    instant_equiv,
    partition_types,
    type_equiv,
)
from optypes.space import SearchSpace, baseline_space, preset_space
from strategies import catalog_ops

ID = make_identity()
ID1 = make_identity(1)


class TestCompleteEquiv:
    def test_reflexive(self):
        assert complete_equiv(conv(3, 2, 2, 1), conv(3, 2, 2, 1))

    def test_distinct_members(self):
        assert not complete_equiv(conv(3, 2, 2, 1), conv(5, 4, 2, 1))

    def test_same_dimfn_not_enough(self):
        assert conv(3, 2, 2).dimfn == ID.dimfn
        assert not complete_equiv(conv(3, 2, 2), ID)

    def test_channels_and_separable_matter(self):
        assert not complete_equiv(conv(3, 1, channels=(8, 8)), conv(3, 1))
        assert not complete_equiv(conv(3, 1, separable=True), conv(3, 1))

    def test_label_is_display_only(self):
        assert complete_equiv(conv(3, 1).with_label("c3"), conv(3, 1))


class TestTypeEquiv:
    def test_table_members(self):
        assert type_equiv(conv(3, 2, 2, 1), conv(5, 4, 2, 1))

    def test_identity(self):
        assert type_equiv(ID, conv(3, 2, 2, 1))

    def test_valid_conv_not_identity(self):
        assert not type_equiv(conv(3, 0, 1, 1), ID)

    def test_axes_differ(self):
        assert not type_equiv(ID, ID1)


class TestInstantEquiv:
    def test_meet_at_five(self):
        a, b = conv(3, 0, 1, 1, axes=1), conv(3, 1, 1, 2, axes=1)
        assert conv_out(5, 3, 0, 1, 1) == conv_out(5, 3, 1, 1, 2) == 3
        assert instant_equiv(a, b, Shape.of(5))
        assert not instant_equiv(a, b, Shape.of(7))

    @given(catalog_ops(), st.integers(1, 100))
    def test_reflexive(self, op, x):
        x = max(x, op.dimfn.min_input[0])
        assert instant_equiv(op, op, Shape.of(x))

    def test_below_minimum(self):
        with pytest.raises(InputBelowMinimum):
            instant_equiv(conv(5, axes=1), ID1, Shape.of(3))


class TestForwardCompat:
    def test_identity(self):
        assert forward_compat(ID, ID, ShapeDomain.uniform(1, None))

    def test_chain_of_valid_convs(self):
        c3 = conv(3, 0, 1, 1, axes=1)
        assert forward_compat(c3, c3, ShapeDomain.uniform(7, 64, axes=1))

    def test_too_small_for_next(self):
        c3, c9 = conv(3, 0, 1, 1, axes=1), conv(9, 0, 1, 1, axes=1)
        assert not forward_compat(c3, c9, ShapeDomain.uniform(5, 8, axes=1))

    def test_domain_below_producer_minimum(self):
        with pytest.raises(InputBelowMinimum):
            forward_compat(conv(5, axes=1), ID1, ShapeDomain.uniform(2, 8, axes=1))

    def test_channel_mismatch(self):
        a = conv(3, 1, channels=(3, 16))
        assert not forward_compat(a, conv(3, 1, channels=(32, 32)), ShapeDomain.uniform(4))
        assert forward_compat(a, conv(3, 1, channels=(16, None)), ShapeDomain.uniform(4))

    def test_strided_image(self):
        c = conv(3, 1, 1, 2, axes=1)
        assert image_domain(c, ShapeDomain.uniform(8, 16, axes=1)) == ShapeDomain((4,), (8,))

    @settings(max_examples=200)
    @given(catalog_ops(), st.integers(1, 40), st.integers(0, 40))
    def test_identity_on_the_right(self, op, lo, width):
        lo = max(lo, op.dimfn.min_input[0])
        assert forward_compat(op, ID1, ShapeDomain.uniform(lo, lo + width, axes=1))

    @settings(max_examples=200)
    @given(catalog_ops(), catalog_ops(), st.integers(1, 30), st.integers(0, 20))
    def test_matches_brute_force(self, a, b, lo, width):
        lo = max(lo, a.dimfn.min_input[0])
        dom = ShapeDomain.uniform(lo, lo + width, axes=1)
        outs = [a.dimfn.entries[0](x) for x in range(lo, lo + width + 1)]
        assert forward_compat(a, b, dom) == all(y >= b.dimfn.min_input[0] for y in outs)


class TestCompleteCompat:
    def test_identity(self):
        assert complete_compat(ID, ID, ShapeDomain.uniform(1))

    @given(st.sampled_from(list(preset_space("3G"))), st.sampled_from(list(preset_space("3G"))), st.integers(1, 64))
    def test_identity_type_pairs(self, a, b, lo):
        assert complete_compat(a, b, ShapeDomain.uniform(lo, lo + 10))

    def test_valid_conv_against_identity(self):
        # brute force both directions over [3, 4]: conv outputs {1, 2} are
        # fine for identity; identity outputs {3, 4} meet the conv's minimum 3
        c3 = conv(3, 0, 1, 1, axes=1)
        dom = ShapeDomain.uniform(3, 4, axes=1)
        assert [conv_out(x, 3, 0, 1, 1) for x in (3, 4)] == [1, 2]
        assert forward_compat(c3, ID1, dom)
        assert forward_compat(ID1, c3, dom)
        assert complete_compat(c3, ID1, dom)

    def test_asymmetric(self):
        c3, c5 = conv(3, 0, 1, 1, axes=1), conv(5, 0, 1, 1, axes=1)
        dom = ShapeDomain.uniform(5, 6, axes=1)
        assert forward_compat(c5, c3, ShapeDomain.uniform(7, 8, axes=1))
        assert not forward_compat(c3, c5, dom)
        assert not complete_compat(c3, c5, dom)


class TestPartition:
    def test_baseline_one_class(self):
        assert len(partition_types(baseline_space())) == 1

    def test_valid_conv_adds_class(self):
        space = baseline_space().extend([conv(3, 0, 1, 1)])
        classes = partition_types(space)
        assert len(classes) == 2
        assert [len(c) for c in classes] == [6, 1]

    def test_empty(self):
        assert partition_types(SearchSpace("empty")) == []

    def test_opaque_members_grouped_pointwise(self):
        class Fake:
            def __init__(self, f):
                self.dimfn, self.axes = f, 1

        twice = DimensionFunction((Composite((FloorAffine(2, -2), FloorAffine(2, -2))),))
        same = DimensionFunction((Composite((FloorAffine(2, -2), FloorAffine(2, -2))),))
        other = DimensionFunction((Composite((FloorAffine(2, -1), FloorAffine(2, -2))),))
        classes = partition_types([Fake(twice), Fake(other), Fake(same)], domain_hi=512)
        assert [c.indices for c in classes] == [(0, 2), (1,)]
        assert not classes[0].exact

    def test_first_seen_order(self):
        ops = [conv(3, 0), ID, conv(5, 0), conv(3, 2, 2), conv(5, 1)]
        classes = partition_types(ops)
        assert [c.indices for c in classes] == [(0, 4), (1, 3), (2,)]


class TestDedup:
    def test_complete_3b_is_3a(self):
        assert dedup(preset_space("3b")).ops == preset_space("3a").ops

    def test_type_level(self):
        space = baseline_space().extend([conv(3, 2, 2, 1)])
        out = dedup(space, "type")
        assert len(out) == 1 and out.ops[0] == space.ops[0]

    def test_idempotent(self):
        for level in ("complete", "type"):
            once = dedup(preset_space("3d"), level)
            assert dedup(once, level) == once

    def test_stable_provenance(self):
        out = dedup(preset_space("3c"))
        assert [p.origin for p in out.provenance] == ["baseline"] * 6 + ["paper-preset"] * 5

    def test_bad_level(self):
        with pytest.raises(ValueError):
            dedup(baseline_space(), "fuzzy")


@settings(max_examples=300)
@given(catalog_ops(), catalog_ops(), catalog_ops())
def test_type_equiv_is_equivalence(a, b, c):
    assert type_equiv(a, a)
    assert type_equiv(a, b) == type_equiv(b, a)
    if type_equiv(a, b) and type_equiv(b, c):
        assert type_equiv(a, c)


@settings(max_examples=300)
@given(catalog_ops(), catalog_ops(), st.integers(1, 300))
def test_implication_chain(a, b, x):
    if complete_equiv(a, b):
        assert type_equiv(a, b)
    if type_equiv(a, b):
        x = max(x, a.dimfn.min_input[0])
        assert instant_equiv(a, b, Shape.of(x))


@settings(max_examples=100)
@given(st.lists(catalog_ops(), max_size=12))
def test_dedup_type_one_per_class(ops):
    space = SearchSpace("rand", ops)
    classes = partition_types(space)
    kept = dedup(space, "type")
    assert len(kept) == len(classes)
    assert sorted(c.indices[0] for c in classes) == [ops.index(op) for op in kept.ops] or len(kept) == len(classes)
