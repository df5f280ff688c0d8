import pytest

from optypes.algebra import DimensionFunction, FloorAffine, ReverseAffine, Shape, evaluate
from optypes.errors import InvalidParams
from optypes.ops import (
    ConvParams,
    Kind,
    Operation,
    build_dimfn,
    conv,
    conv_t,
    make_conv,
    make_conv_transpose,
    make_identity,
    make_pool,
    parse_op,
    pool,
)
from optypes.relations import dedup, type_equiv
from optypes.space import baseline_space

IDENT = DimensionFunction.identity(2)


@pytest.mark.parametrize(
    "k,p,d",
    [(3, 2, 2), (5, 12, 6), (1, 0, 1), (3, 3, 3), (5, 4, 2), (5, 6, 3)],
)
def test_identity_type_convs(k, p, d):
    assert make_conv(ConvParams.square(k, p, d, 1)).dimfn == IDENT


def test_conv_offset():
    op = conv(5, 1, 1, 2)
    assert op.dimfn.entries == (FloorAffine(2, -3),) * 2


def test_invalid_params_name_field_and_axis():
    with pytest.raises(InvalidParams) as exc:
        ConvParams((3, 0), (0, 0), (1, 1), (1, 1))
    assert exc.value.field == "kernel" and exc.value.axis == 1
    with pytest.raises(InvalidParams):
        ConvParams.square(3, -1)
    with pytest.raises(InvalidParams):
        ConvParams.square(3, 0, 0)
    with pytest.raises(InvalidParams):
        ConvParams.square(3, 0, 1, 0)


def test_rectangular_kernel():
    op = make_conv(ConvParams((3, 1), (1, 0), (1, 1), (1, 1)))
    assert evaluate(op.dimfn, Shape.of(10, 10)) == Shape.of(10, 10)
    op = make_conv(ConvParams((3, 5), (0, 0), (1, 1), (1, 2)))
    assert evaluate(op.dimfn, Shape.of(10, 11)) == Shape.of(8, 4)


class TestTransposed:
    def test_dilated_identity(self):
        assert conv_t(3, 2, 2).dimfn(Shape.of(32, 32)) == Shape.of(32, 32)

    def test_unit(self):
        op = conv_t(1, 0, 1, 1, axes=1)
        assert all(op.dimfn(Shape.of(i)) == Shape.of(i) for i in range(1, 100))

    def test_upsampling(self):
        # (5 - 1) * 2 - 0 + 2 + 1
        op = make_conv_transpose(ConvParams.square(3, 0, 1, 2, axes=1))
        assert op.dimfn(Shape.of(5)) == Shape.of(11)
        assert op.dimfn.entries == (ReverseAffine(2, 2),)


class TestPool:
    def test_same_pool(self):
        assert make_pool("max", ConvParams.square(3, 1, 1, 1)).dimfn == IDENT

    def test_halving(self):
        assert pool("avg", 2, 0, 2).dimfn(Shape.of(32, 32)) == Shape.of(16, 16)

    def test_unit(self):
        assert pool("max", 1).dimfn == IDENT

    def test_dilation_rejected(self):
        with pytest.raises(InvalidParams):
            make_pool("max", ConvParams.square(3, 1, 2, 1))


def test_identity_has_identity_dimfn():
    assert make_identity(3).dimfn == DimensionFunction.identity(3)
    with pytest.raises(InvalidParams):
        Operation(Kind.IDENTITY, ConvParams.square(1))


@pytest.mark.parametrize(
    "op",
    [conv(3, 1), conv(5, 2, 1, 2), conv_t(3, 0, 1, 2), pool("max", 3, 1), pool("avg", 2, 0, 2), make_identity(), conv(3, 1, separable=True)],
)
def test_dimfn_rebuilds_from_params(op):
    assert build_dimfn(op.kind, op.params, op.axes) == op.dimfn
    clone = Operation(op.kind, op.params, op.axes, op.channels, op.separable)
    assert clone == op


def test_fig2_triple():
    five = conv(5, 2)
    seven = conv(7, 1)
    dilated = conv(3, 2, 2)
    assert type_equiv(five, dilated)
    assert seven.dimfn.entries[0] == FloorAffine(1, -5)
    assert not type_equiv(seven, five)
    assert not type_equiv(seven, dilated)


class TestBaseline:
    def test_size(self):
        assert len(baseline_space()) == 6

    def test_all_identity_type(self):
        ident = make_identity()
        assert all(type_equiv(op, ident) for op in baseline_space())

    def test_no_duplicates(self):
        s = baseline_space()
        assert dedup(s) == s


class TestLiteral:
    def test_conv(self):
        op = parse_op("conv k=3 p=2 d=2 s=1")
        assert op == conv(3, 2, 2, 1)

    def test_defaults(self):
        assert parse_op("conv k=5") == conv(5, 0, 1, 1)

    def test_kinds(self):
        assert parse_op("identity") == make_identity()
        assert parse_op("maxpool k=3 p=1").kind is Kind.MAX_POOL
        assert parse_op("convT k=3 p=2 d=2").kind is Kind.CONV_T
        assert parse_op("sepconv k=3 p=1").separable

    def test_channels_and_axes(self):
        op = parse_op("conv k=3 axes=1 cin=16 cout=32")
        assert op.axes == 1 and op.channels == (16, 32)

    @pytest.mark.parametrize("bad", ["", "dense k=3", "conv p=1", "conv k=x", "conv k=0", "conv q=1", "identity k=1"])
    def test_errors(self, bad):
        with pytest.raises(InvalidParams):
            parse_op(bad)

    def test_label_round_trip(self):
        for text in ("conv k=3 p=2 d=2 s=1", "maxpool k=3 p=1 s=1", "identity", "sepconv k=5 p=2 d=1 s=1"):
            assert parse_op(text).label == text
            assert parse_op(parse_op(text).label) == parse_op(text)
