import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from woplearn import (
    BinaryImage,
    BooleanFunctionTable,
    Interval,
    SizeCapError,
    SubsetOfWindow,
    Window,
    apply_table,
    basis_of,
    characteristic_of,
    erode,
    kernel_of,
    leq,
    parse_table,
    property_report,
    reconstruct,
    render_table,
    union,
)

from oracles import brute_force_basis, random_table, window_3x3

W2 = Window(((0, 0), (0, 1)))
W3 = Window(((0, 0), (0, 1), (1, 0)))


def line_window(n):
    return Window(tuple((0, c) for c in range(n)))


class TestCharacteristicOf:
    def test_identity_realizer(self):
        f = characteristic_of(lambda x: x, W3)
        expect = BooleanFunctionTable.from_predicate(W3, lambda s: s.contains((0, 0)))
        assert f == expect

    def test_erosion_realizer_matches_predicate(self):
        rng = np.random.default_rng(0)
        for size in (1, 3, 5):
            w = line_window(size)
            for _ in range(5):
                mask = int(rng.integers(0, 1 << size))
                a = w.subset_from_mask(mask)
                f = characteristic_of(lambda x: erode(x, a), w)
                expect = BooleanFunctionTable.from_predicate(
                    w, lambda s: mask & ~s.mask == 0
                )
                assert f == expect

    def test_constant_realizer(self):
        f = characteristic_of(
            lambda x: BinaryImage.filled(x.shape, True, x.boundary), W2
        )
        assert f == BooleanFunctionTable.constant(W2, True)

    def test_offcenter_window(self):
        # window that does not contain the origin at all
        w = Window(((-3, -2), (-3, -1)))
        a = w.subset([(-3, -2)])
        f = characteristic_of(lambda x: erode(x, a), w)
        expect = BooleanFunctionTable.from_predicate(w, lambda s: s.contains((-3, -2)))
        assert f == expect

    def test_cap_refused(self):
        w = line_window(5)
        with pytest.raises(SizeCapError):
            characteristic_of(lambda x: x, w, cap=4)


class TestKernel:
    def test_constant_one_kernel_is_powerset(self):
        k = kernel_of(BooleanFunctionTable.constant(W3, True))
        assert len(k.members) == 8

    def test_constant_zero_kernel_empty(self):
        k = kernel_of(BooleanFunctionTable.constant(W3, False))
        assert k.members == frozenset()

    def test_center_reader_kernel(self):
        f = BooleanFunctionTable.from_predicate(W2, lambda s: s.contains((0, 0)))
        k = kernel_of(f)
        assert k.members == {SubsetOfWindow(W2, 0b01), SubsetOfWindow(W2, 0b11)}


class TestBasisOf:
    def test_constant_one(self):
        b = basis_of(BooleanFunctionTable.constant(W3, True))
        assert [iv.render() for iv in b.intervals] == ["[{},{(0,0),(0,1),(1,0)}]"]

    def test_constant_zero(self):
        assert basis_of(BooleanFunctionTable.constant(W3, False)).intervals == ()

    def test_two_point_kernel(self):
        f = BooleanFunctionTable(W2, np.array([False, True, False, True]))
        b = basis_of(f)
        assert [iv.render() for iv in b.intervals] == ["[{(0,0)},{(0,0),(0,1)}]"]

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        for size in (2, 3, 4, 5):
            w = line_window(size)
            for _ in range(20):
                f = random_table(w, rng)
                assert basis_of(f).intervals == brute_force_basis(f)

    def test_cap_refused(self):
        w = line_window(5)
        with pytest.raises(SizeCapError):
            basis_of(BooleanFunctionTable.constant(w, True), cap=4)

    def test_basis_invariants(self):
        rng = np.random.default_rng(2)
        w = line_window(4)
        for _ in range(30):
            f = random_table(w, rng)
            b = basis_of(f)
            kernel = {s.mask for s in kernel_of(f).members}
            # antichain
            for i, a in enumerate(b.intervals):
                for c in b.intervals[i + 1 :]:
                    assert not leq(a, c) and not leq(c, a)
            # every interval lies inside the kernel
            for iv in b.intervals:
                free = iv.upper.mask & ~iv.lower.mask
                sub = free
                while True:
                    assert (iv.lower.mask | sub) in kernel
                    if sub == 0:
                        break
                    sub = (sub - 1) & free
            # every kernel member lies in some interval
            for m in kernel:
                assert any(
                    iv.lower.mask & ~m == 0 and m & ~iv.upper.mask == 0
                    for iv in b.intervals
                )


class TestReconstruct:
    def test_single_full_interval(self):
        from woplearn import Basis

        b = Basis(W3, (Interval(W3.empty(), W3.full()),))
        assert reconstruct(b) == BooleanFunctionTable.constant(W3, True)

    def test_empty_basis(self):
        from woplearn import Basis

        assert reconstruct(Basis(W3, ())) == BooleanFunctionTable.constant(W3, False)

    def test_origin_interval(self):
        from woplearn import Basis

        b = Basis(W3, (Interval(W3.subset([(0, 0)]), W3.full()),))
        expect = BooleanFunctionTable.from_predicate(W3, lambda s: s.contains((0, 0)))
        assert reconstruct(b) == expect

    def test_round_trip_exhaustive_3bit(self):
        w = line_window(3)
        for code in range(1 << 8):
            vals = np.array([(code >> i) & 1 for i in range(8)], dtype=bool)
            f = BooleanFunctionTable(w, vals)
            assert reconstruct(basis_of(f)) == f

    @given(st.integers(min_value=0, max_value=(1 << 16) - 1))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_random_4bit(self, code):
        w = line_window(4)
        vals = np.array([(code >> i) & 1 for i in range(16)], dtype=bool)
        f = BooleanFunctionTable(w, vals)
        assert reconstruct(basis_of(f)) == f

    def test_basis_of_reconstruct_idempotent(self):
        rng = np.random.default_rng(3)
        w = line_window(4)
        for _ in range(30):
            b = basis_of(random_table(w, rng))
            assert basis_of(reconstruct(b)) == b

    def test_increasing_family_has_full_uppers(self):
        rng = np.random.default_rng(4)
        w = line_window(5)
        for _ in range(20):
            masks = [int(m) for m in rng.integers(0, 32, size=3)]
            f = BooleanFunctionTable.from_predicate(
                w, lambda s: any(m & ~s.mask == 0 for m in masks)
            )
            b = basis_of(f)
            assert all(iv.upper.mask == w.full_mask for iv in b.intervals)


class TestPropertyReport:
    def test_increasing_flag(self):
        b = basis_of(
            BooleanFunctionTable.from_predicate(
                W3, lambda s: s.contains((0, 0)) or s.contains((1, 0))
            )
        )
        rep = property_report(b)
        assert rep.is_increasing

    def test_full_interval_from_origin(self):
        from woplearn import Basis

        b = Basis(W3, (Interval(W3.subset([(0, 0)]), W3.full()),))
        rep = property_report(b)
        assert rep.contains_full_interval_from_origin
        assert rep.origin_in_all_lower_endpoints

    def test_degenerate_origin_interval(self):
        from woplearn import Basis

        o = W3.subset([(0, 0)])
        rep = property_report(Basis(W3, (Interval(o, o),)))
        assert rep.origin_in_all_lower_endpoints
        assert not rep.is_increasing
        assert not rep.contains_full_interval_from_origin

    def test_flags_recomputable_from_basis_alone(self):
        rng = np.random.default_rng(5)
        w = window_3x3()
        f = random_table(w, rng)
        b = basis_of(f)
        assert property_report(b) == property_report(basis_of(reconstruct(b)))


class TestTableSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(6)
        for size in (0, 1, 3, 5):
            w = line_window(size)
            f = random_table(w, rng)
            assert parse_table(render_table(f)) == f

    def test_hex_is_little_endian_in_code_order(self):
        w = line_window(3)
        f = BooleanFunctionTable(w, np.array([1, 0, 0, 0, 0, 0, 0, 1], dtype=bool))
        assert render_table(f).splitlines()[1] == "81"

    def test_parse_errors(self):
        from woplearn import ParseError

        with pytest.raises(ParseError):
            parse_table("window: {(0,0)}\nzz\n")
        with pytest.raises(ParseError):
            parse_table("no header")
        with pytest.raises(ParseError):
            parse_table("window: {(0,0)}\nffff\n")  # wrong byte count
