import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import conv_out
from optypes.algebra import (
    Composite,
    DimensionFunction,
    FloorAffine,
    ReverseAffine,
    Shape,
    canonicalize,
    compare_functions,
    compose,
    compose_all,
    default_sweep_hi,
    evaluate,
    functions_equal,
    signature,
)
from optypes.errors import AxisMismatch, InputBelowMinimum
from optypes.ops import conv, conv_t


def fa(s, a, axes=1):
    return DimensionFunction((FloorAffine(s, a),) * axes)


def chain(*entries):
    return DimensionFunction((Composite(entries),))


class TestShape:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Shape.of(3, 0)
        with pytest.raises(ValueError):
            Shape(())

    def test_axes(self):
        assert Shape.of(4, 5).axes == 2
        assert str(Shape.of(4, 5)) == "(4, 5)"


class TestEval:
    def test_identity(self):
        assert evaluate(fa(1, -1, 2), Shape.of(32, 32)) == Shape.of(32, 32)

    def test_conv_3x3_valid(self):
        assert evaluate(fa(1, -3), Shape.of(32)) == Shape.of(30)

    def test_conv_strided(self):
        # k=3 p=1 d=1 s=2: floor((5 + 2 - 2 - 1) / 2) + 1
        assert evaluate(conv(3, 1, 1, 2, axes=1).dimfn, Shape.of(5)) == Shape.of(3)

    def test_axis_mismatch(self):
        with pytest.raises(AxisMismatch):
            evaluate(fa(1, -1, 2), Shape.of(3))

    def test_below_minimum_names_axis(self):
        f = DimensionFunction((FloorAffine(1, -1), FloorAffine(1, -5)))
        with pytest.raises(InputBelowMinimum) as exc:
            evaluate(f, Shape.of(10, 4))
        assert exc.value.axis == 1 and exc.value.minimum == 5

    def test_reverse_affine(self):
        assert ReverseAffine(2, 2)(5) == 11
        assert ReverseAffine(1, 0)(7) == 7


class TestCanonicalize:
    def test_identity_chain_fuses(self):
        f = chain(FloorAffine(1, -1), FloorAffine(1, -1))
        assert canonicalize(f).entries == (FloorAffine(1, -1),)

    def test_inner_stride_one_fuses(self):
        f = chain(FloorAffine(1, -3), FloorAffine(2, -2))
        c = canonicalize(f)
        assert c.entries == (FloorAffine(2, -4),)
        for i in range(4, 513):
            assert evaluate(f, Shape.of(i)) == evaluate(c, Shape.of(i))
            assert (i - 3 + 1 - 2) // 2 + 1 == (i - 4) // 2 + 1

    def test_strided_inner_stays_opaque(self):
        f = chain(FloorAffine(2, -2), FloorAffine(2, -2))
        c = canonicalize(f)
        assert isinstance(c.entries[0], Composite)
        assert c.opaque
        assert c.entries == f.entries

    def test_closed_forms_unchanged(self):
        f = DimensionFunction((FloorAffine(3, 4), ReverseAffine(2, 1)))
        assert canonicalize(f) == f

    def test_unit_stride_reverse_becomes_floor(self):
        f = DimensionFunction((ReverseAffine(1, 0),))
        assert canonicalize(f).entries == (FloorAffine(1, -1),)

    def test_stride_one_then_reverse_fuses(self):
        f = chain(FloorAffine(1, -3), ReverseAffine(2, 0))
        c = canonicalize(f)
        assert c.entries == (ReverseAffine(2, -4),)

    def test_keeps_min_input(self):
        # conv k=1 p=3 grows by 6, then a k=9 valid conv; fused offset is -3
        f = compose(conv(1, 3, axes=1).dimfn, conv(9, 0, axes=1).dimfn)
        c = canonicalize(f)
        assert c.min_input == f.min_input

    @settings(max_examples=300)
    @given(
        st.lists(
            st.tuples(st.booleans(), st.integers(1, 3), st.integers(-12, 12)),
            min_size=1,
            max_size=5,
        ),
        st.integers(1, 300),
    )
    def test_fusion_sound(self, stages, x):
        entries = tuple(FloorAffine(s, a) if fl else ReverseAffine(s, a) for fl, s, a in stages)
        f = DimensionFunction((Composite(entries),))
        c = canonicalize(f)
        assert c.min_input == f.min_input
        if x >= f.min_input[0]:
            assert evaluate(f, Shape.of(x)) == evaluate(c, Shape.of(x))


class TestCompose:
    def test_identity(self):
        f = compose(fa(1, -1), fa(1, -1))
        assert canonicalize(f) == fa(1, -1)

    def test_two_valid_convs(self):
        f = compose(fa(1, -3), fa(1, -3))
        assert evaluate(f, Shape.of(32)) == Shape.of(28)

    def test_min_input_search(self):
        k5 = conv(5, 0, axes=1).dimfn
        assert compose(k5, k5).min_input == (9,)

    def test_axis_mismatch(self):
        with pytest.raises(AxisMismatch):
            compose(fa(1, -1, 1), fa(1, -1, 2))

    @given(
        st.lists(st.tuples(st.integers(1, 5), st.integers(0, 4), st.integers(1, 3), st.integers(1, 3)), min_size=3, max_size=3),
        st.integers(1, 400),
    )
    def test_associative(self, params, x):
        f, g, h = (conv(*p, axes=1).dimfn for p in params)
        left = compose(compose(f, g), h)
        right = compose(f, compose(g, h))
        assert left.min_input == right.min_input
        if x >= left.min_input[0]:
            assert evaluate(left, Shape.of(x)) == evaluate(right, Shape.of(x))

    def test_compose_all(self):
        f = compose_all([fa(1, -3)] * 3)
        assert evaluate(f, Shape.of(10)) == Shape.of(4)


class TestEquality:
    def test_same_offset(self):
        # k=5 p=1 and k=3 p=0 both land on offset -3
        v = compare_functions(conv(5, 1, axes=1).dimfn, conv(3, 0, axes=1).dimfn)
        assert v.equal and v.exact

    def test_identity_vs_dilated(self):
        assert functions_equal(DimensionFunction.identity(2), conv(3, 2, 2).dimfn)

    def test_different_stride(self):
        v = compare_functions(conv(3, 0, axes=1).dimfn, conv(3, 1, 1, 2, axes=1).dimfn)
        assert not v.equal
        assert conv_out(7, 3, 0, 1, 1) == 5 and conv_out(7, 3, 1, 1, 2) == 4

    def test_opaque_is_sampled(self):
        f = chain(FloorAffine(2, -2), FloorAffine(2, -2))
        g = chain(FloorAffine(2, -2), FloorAffine(2, -2))
        v = compare_functions(f, g, 256)
        assert v.equal and not v.exact

    def test_opaque_vs_closed_form(self):
        # two stride-2 halvings equal one stride-4 quartering on this offset
        f = chain(FloorAffine(2, -2), FloorAffine(2, -2))
        g = fa(4, -4)
        assert compare_functions(f, g, 4096).equal
        assert not compare_functions(f, fa(4, -3), 4096).equal

    def test_transposed_identity(self):
        assert functions_equal(conv_t(3, 2, 2).dimfn, DimensionFunction.identity(2))

    def test_axis_mismatch(self):
        with pytest.raises(AxisMismatch):
            compare_functions(fa(1, -1, 1), fa(1, -1, 2))

    def test_env_sweep_bound(self, monkeypatch):
        monkeypatch.setenv("OPTYPES_SWEEP_HI", "100")
        assert default_sweep_hi() == 100
        monkeypatch.delenv("OPTYPES_SWEEP_HI")
        assert default_sweep_hi() == 4096

    def test_signature_hashable(self):
        assert signature(conv(3, 2, 2).dimfn) == signature(DimensionFunction.identity(2))
        assert hash(signature(fa(2, -2)))

    @settings(max_examples=1000, deadline=None)
    @given(st.integers(1, 4), st.integers(-16, 16), st.integers(1, 4), st.integers(-16, 16))
    def test_canonical_agrees_with_exhaustive(self, s1, a1, s2, a2):
        f, g = fa(s1, a1), fa(s2, a2)
        lo = max(f.min_input[0], g.min_input[0])
        brute = all(f.entries[0](x) == g.entries[0](x) for x in range(lo, 4097))
        # domains are part of the function
        brute = brute and f.min_input == g.min_input
        assert functions_equal(f, g) == brute


@given(st.integers(1, 9), st.integers(0, 9), st.integers(1, 4), st.integers(1, 4), st.integers(1, 200))
def test_monotone(k, p, d, s, x):
    for op in (conv(k, p, d, s, axes=1), conv_t(k, p, d, s, axes=1)):
        f = op.dimfn
        lo = f.min_input[0]
        a, b = max(lo, x), max(lo, x) + 1
        assert f.entries[0](a) <= f.entries[0](b)
        assert f.entries[0](lo) >= 1
