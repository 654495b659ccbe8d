import numpy as np
import pytest

from woplearn import (
    BinaryImage,
    BooleanFunctionTable,
    InputError,
    Interval,
    TOROIDAL,
    ZERO_PAD,
    Window,
    apply_table,
    complement,
    dilate,
    erode,
    intersection,
    interval_operator,
    pointwise,
    reflect,
    shift,
    subset_image,
    union,
)

from oracles import random_image, window_3x3

W2 = Window(((0, 0), (0, 1)))


def ones_at(img):
    return sorted(map(tuple, np.argwhere(img.pixels)))


class TestBinaryImage:
    def test_immutability(self):
        img = BinaryImage.filled((2, 2), False)
        with pytest.raises(ValueError):
            img.pixels[0, 0] = True
        with pytest.raises(AttributeError):
            img.boundary = TOROIDAL

    def test_bad_shapes_rejected(self):
        with pytest.raises(InputError):
            BinaryImage(np.zeros((0, 3), dtype=bool))
        with pytest.raises(InputError):
            BinaryImage(np.zeros(4, dtype=bool))

    def test_unknown_boundary_rejected(self):
        with pytest.raises(InputError):
            BinaryImage(np.zeros((2, 2), dtype=bool), "mirror")


class TestErode:
    def test_identity_element(self):
        rng = np.random.default_rng(1)
        x = random_image(rng, boundary=ZERO_PAD)
        se = W2.subset([(0, 0)])
        assert erode(x, se) == x

    def test_definitional_sliding_window(self):
        x = BinaryImage.from_ones((3, 3), [(1, 1), (1, 2)], ZERO_PAD)
        out = erode(x, W2.full())
        assert ones_at(out) == [(1, 1)]

    def test_empty_element_gives_all_ones(self):
        x = BinaryImage.filled((3, 4), False, ZERO_PAD)
        assert erode(x, W2.empty()) == BinaryImage.filled((3, 4), True, ZERO_PAD)

    def test_zero_pad_reads_zero_outside(self):
        x = BinaryImage.filled((3, 3), True, ZERO_PAD)
        out = erode(x, W2.full())  # probes one column right
        assert ones_at(out) == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]

    def test_toroidal_wraps(self):
        x = BinaryImage.filled((3, 3), True, TOROIDAL)
        assert erode(x, W2.full()) == x


class TestDilate:
    def test_identity_element(self):
        rng = np.random.default_rng(2)
        x = random_image(rng, boundary=ZERO_PAD)
        assert dilate(x, W2.subset([(0, 0)])) == x

    def test_empty_element_gives_all_zeros(self):
        x = BinaryImage.filled((3, 3), True, ZERO_PAD)
        assert dilate(x, W2.empty()) == BinaryImage.filled((3, 3), False, ZERO_PAD)

    def test_definitional_evaluation(self):
        # single centered pixel spreads to the center and one to its left
        x = BinaryImage.from_ones((3, 3), [(1, 1)], ZERO_PAD)
        out = dilate(x, W2.full())
        assert ones_at(out) == [(1, 0), (1, 1)]


class TestPointwise:
    def test_complement_involution(self):
        rng = np.random.default_rng(3)
        x = random_image(rng)
        assert complement(complement(x)) == x

    def test_union_identity(self):
        rng = np.random.default_rng(4)
        x = random_image(rng, boundary=ZERO_PAD)
        zeros = BinaryImage.filled(x.shape, False, ZERO_PAD)
        assert union(x, zeros) == x

    def test_intersection_with_complement_empty(self):
        rng = np.random.default_rng(5)
        x = random_image(rng)
        out = intersection(x, complement(x))
        assert not out.pixels.any()

    def test_dimension_mismatch_rejected(self):
        a = BinaryImage.filled((2, 2), True)
        b = BinaryImage.filled((2, 3), True)
        with pytest.raises(InputError):
            union(a, b)
        with pytest.raises(InputError):
            intersection(a, BinaryImage.filled((2, 2), True, TOROIDAL))

    def test_dispatcher(self):
        x = BinaryImage.filled((2, 2), False)
        assert pointwise("complement", x) == BinaryImage.filled((2, 2), True)
        with pytest.raises(InputError):
            pointwise("union", x)
        with pytest.raises(InputError):
            pointwise("xor", x, x)


class TestIntervalOperator:
    def test_vacuous_constraints_give_all_ones(self):
        rng = np.random.default_rng(6)
        x = random_image(rng)
        iv = Interval(window_3x3().empty(), window_3x3().full())
        assert interval_operator(x, iv).pixels.all()

    @pytest.mark.parametrize("boundary", [ZERO_PAD, TOROIDAL])
    def test_origin_interval_is_identity(self, boundary):
        rng = np.random.default_rng(7)
        w = window_3x3()
        x = random_image(rng, boundary=boundary)
        iv = Interval(w.subset([(0, 0)]), w.full())
        assert interval_operator(x, iv) == x

    def test_lower_only_equals_erosion(self):
        rng = np.random.default_rng(8)
        w = window_3x3()
        for _ in range(50):
            a = w.subset_from_mask(int(rng.integers(0, 1 << 9)))
            x = random_image(rng, boundary=rng.choice([ZERO_PAD, TOROIDAL]))
            assert interval_operator(x, Interval(a, w.full())) == erode(x, a)

    def test_upper_bound_forbids_extra_pixels(self):
        w = W2
        # patch must be exactly {o}
        iv = Interval(w.subset([(0, 0)]), w.subset([(0, 0)]))
        x = BinaryImage.from_ones((1, 3), [(0, 0), (0, 1)], ZERO_PAD)
        # pixel (0,0): patch {o,(0,1)} not <= {o}; pixel (0,1): right neighbor is 0
        assert ones_at(interval_operator(x, iv)) == [(0, 1)]


class TestApplyTable:
    def test_constant_one(self):
        rng = np.random.default_rng(9)
        w = window_3x3()
        x = random_image(rng)
        f = BooleanFunctionTable.constant(w, True)
        assert apply_table(x, w, f).pixels.all()

    def test_center_reader_is_identity(self):
        rng = np.random.default_rng(10)
        w = window_3x3()
        f = BooleanFunctionTable.from_predicate(w, lambda s: s.contains((0, 0)))
        for boundary in (ZERO_PAD, TOROIDAL):
            x = random_image(rng, boundary=boundary)
            assert apply_table(x, w, f) == x

    def test_superset_predicate_equals_erosion(self):
        rng = np.random.default_rng(11)
        w = window_3x3()
        for _ in range(25):
            a_mask = int(rng.integers(0, 1 << 9))
            a = w.subset_from_mask(a_mask)
            f = BooleanFunctionTable.from_predicate(w, lambda s: a_mask & ~s.mask == 0)
            x = random_image(rng)
            assert apply_table(x, w, f) == erode(x, a)

    def test_union_of_erosions_table(self):
        rng = np.random.default_rng(12)
        w = window_3x3()
        am = int(rng.integers(0, 1 << 9))
        bm = int(rng.integers(0, 1 << 9))
        f = BooleanFunctionTable.from_predicate(
            w, lambda s: (am & ~s.mask == 0) or (bm & ~s.mask == 0)
        )
        for _ in range(20):
            x = random_image(rng)
            expect = union(erode(x, w.subset_from_mask(am)), erode(x, w.subset_from_mask(bm)))
            assert apply_table(x, w, f) == expect

    def test_window_table_mismatch_rejected(self):
        f = BooleanFunctionTable.constant(W2, True)
        x = BinaryImage.filled((2, 2), True)
        with pytest.raises(InputError):
            apply_table(x, window_3x3(), f)


class TestShift:
    def test_zero_shift_identity(self):
        rng = np.random.default_rng(13)
        x = random_image(rng)
        assert shift(x, (0, 0)) == x

    def test_inverse(self):
        rng = np.random.default_rng(14)
        x = random_image(rng)
        assert shift(shift(x, (2, -3)), (-2, 3)) == x

    def test_torus_period(self):
        rng = np.random.default_rng(15)
        x = random_image(rng, shape=(5, 7))
        assert shift(x, (5, 7)) == x

    def test_zero_pad_unsupported(self):
        x = BinaryImage.filled((2, 2), True, ZERO_PAD)
        with pytest.raises(InputError):
            shift(x, (1, 0))


class TestLatticeLaws:
    def test_adjunction_with_reflected_element(self):
        rng = np.random.default_rng(16)
        w = window_3x3()
        for _ in range(100):
            a = w.subset_from_mask(int(rng.integers(0, 1 << 9)))
            x = random_image(rng, density=0.3)
            y = random_image(rng, density=0.7)
            assert subset_image(dilate(x, a), y) == subset_image(x, erode(y, reflect(a)))

    def test_monotonicity(self):
        rng = np.random.default_rng(17)
        w = window_3x3()
        for _ in range(100):
            a = w.subset_from_mask(int(rng.integers(0, 1 << 9)))
            x = random_image(rng, density=0.4)
            bigger = BinaryImage(x.pixels | (rng.random(x.shape) < 0.2), x.boundary)
            assert subset_image(erode(x, a), erode(bigger, a))
            assert subset_image(dilate(x, a), dilate(bigger, a))

    def test_apply_table_translation_invariance(self):
        rng = np.random.default_rng(18)
        w = window_3x3()
        for _ in range(50):
            f = BooleanFunctionTable(w, rng.integers(0, 2, size=512).astype(bool))
            x = random_image(rng)
            v = (int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
            assert apply_table(shift(x, v), w, f) == shift(apply_table(x, w, f), v)

    def test_reflect_is_involution(self):
        w = Window(((-1, 2), (0, 0), (3, -1)))
        s = w.subset([(-1, 2), (3, -1)])
        assert reflect(reflect(s)) == s
