import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpbeam.errors import AliasingError, BoxMismatchError, ModeOutsideBoxError, SmallDivisorError
from qpbeam.fourier import (
    FourierField,
    NormSpec,
    TruncationBox,
    bilaplacian,
    coefficient_dump,
    constant_field,
    exp_phase_field,
    field_from_dump,
    field_from_modes,
    galerkin_project,
    multiply,
    phase_antiderivative,
    phase_derivative,
    project_spatial,
    sobolev_norm,
    sobolev_threshold,
    synthesize_on_grid,
    trig_field,
    zero_field,
)
from qpbeam.oracles import grid_product_oracle, random_field, random_phase_field


def norm00(u):
    return sobolev_norm(u, NormSpec(0.0, 0.0))


class TestConstruction:
    def test_constant(self, box):
        one = field_from_modes([(((0, 0), (0,)), 1.0)], box)
        assert one.coefficient(((0, 0), (0,))) == 1.0
        assert norm00(one) == 1.0

    def test_cosine_expansion(self, box):
        # cos(phi_1) cos(x_1) from one coefficient plus symmetry completion
        f = field_from_modes(
            [(((1, 0), (1,)), 0.25), (((1, 0), (-1,)), 0.25)], box
        )
        for k1, j in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
            assert f.coefficient(((k1, 0), (j,))) == 0.25
        grid = synthesize_on_grid(f, (8, 1, 8))
        phi = 2 * np.pi * np.arange(8) / 8
        expected = np.cos(phi)[:, None, None] * np.cos(phi)[None, None, :]
        assert np.allclose(grid, expected, atol=1e-12)

    def test_reality_autofill(self, box):
        g = field_from_modes([(((1, 0), (0,)), 1j)], box)
        assert g.coefficient(((-1, 0), (0,))) == -1j

    def test_duplicates_summed(self, box):
        g = field_from_modes(
            [(((1, 0), (0,)), 0.25), (((1, 0), (0,)), 0.25)], box
        )
        assert g.coefficient(((1, 0), (0,))) == 0.5

    def test_mode_outside_box_rejected(self, box):
        with pytest.raises(ModeOutsideBoxError) as err:
            field_from_modes([(((17, 0), (0,)), 1.0)], box)
        assert err.value.mode == ((17, 0), (0,))

    def test_inconsistent_pair_rejected(self, box):
        with pytest.raises(ValueError):
            field_from_modes(
                [(((1, 0), (0,)), 1.0), (((-1, 0), (0,)), 5.0j)], box
            )

    def test_self_conjugate_must_be_real(self, box):
        with pytest.raises(ValueError):
            field_from_modes([(((0, 0), (0,)), 1.0j)], box)


class TestMultiply:
    def test_identity(self, box, rng):
        w = random_field(box, rng, support=4)
        one = constant_field(box, 1.0)
        diff = multiply(one, w) - w
        assert norm00(diff) < 1e-14

    def test_product_to_sum(self, box):
        c = trig_field(box, "cos", (1, 0), (0,))
        sq = multiply(c, c)
        # cos^2 = 1/2 + 1/2 cos(2 phi_1)
        assert abs(sq.coefficient(((0, 0), (0,))) - 0.5) < 1e-14
        assert abs(sq.coefficient(((2, 0), (0,))) - 0.25) < 1e-14
        assert abs(sq.coefficient(((1, 0), (0,)))) < 1e-14

    def test_box_mismatch(self, box):
        other = TruncationBox(2, 1, 4, 2)
        with pytest.raises(BoxMismatchError):
            multiply(constant_field(box, 1.0), constant_field(other, 1.0))

    def test_grid_oracle(self, box, rng):
        u = random_field(box, rng, support=4, norm=1.3)
        w = random_field(box, rng, support=4, norm=0.7)
        assert grid_product_oracle(u, w) < 1e-12

    def test_exact_when_supports_fit_half_padded_box(self, box, rng):
        # operands inside cutoff (= half of the padded ball): nothing truncated
        u = random_field(box, rng, support=8, j_extent=1)
        w = random_field(box, rng, support=8, j_extent=1)
        prod = multiply(u, w)
        k_support, _ = prod.support_l1()
        assert k_support <= 16
        assert grid_product_oracle(u, w) < 1e-11

    def test_commutative(self, box, rng):
        u = random_field(box, rng, support=5)
        w = random_field(box, rng, support=6)
        diff = multiply(u, w) - multiply(w, u)
        assert norm00(diff) < 1e-13

    def test_associative_up_to_truncation(self, box, rng):
        u = random_field(box, rng, support=3)
        w = random_field(box, rng, support=3)
        z = random_field(box, rng, support=3)
        left = multiply(multiply(u, w), z)
        right = multiply(u, multiply(w, z))
        assert norm00(left - right) < 1e-12

    def test_banach_algebra_constant(self, box, rng):
        s = sobolev_threshold(box.nu, box.d)
        spec = NormSpec(0.2, s)
        # provable Cauchy-Schwarz bound C(s) = 2^s sqrt(sum_m <m>^-2s) over Z^(nu+d),
        # counting lattice shells of <k,j> = max(1, |k|_1, |j|) exactly
        def cube(n):
            return (2 * n**2 + 2 * n + 1) * (2 * n + 1)

        total = cube(1) / 1.0
        for n in range(2, 500):
            total += (cube(n) - cube(n - 1)) / n ** (2 * s)
        total += 20.0 / 499  # tail: shell(n) <= 20 n^2 for n >= 500
        c_bound = 2**s * math.sqrt(total)
        worst = 0.0
        for _ in range(10):
            u = random_field(box, rng, support=6)
            w = random_field(box, rng, support=6)
            ratio = sobolev_norm(multiply(u, w), spec) / (
                sobolev_norm(u, spec) * sobolev_norm(w, spec)
            )
            worst = max(worst, ratio)
        assert worst <= c_bound


class TestNorms:
    def test_zero_field(self, box):
        assert norm00(zero_field(box)) == 0.0

    def test_two_mode_cosine(self, box):
        k, j = (2, 1), (1,)
        c = trig_field(box, "cos", k, j)
        rho, s = 0.3, 2.0
        bracket = max(1, abs(k[0]) + abs(k[1]), abs(j[0]))
        expected = (
            math.sqrt(0.5) * math.exp(rho * (3 + 1)) * bracket**s
        )
        assert abs(sobolev_norm(c, NormSpec(rho, s)) - expected) < 1e-12

    def test_monotonicity_in_parameters(self, box, rng):
        u = random_field(box, rng, support=5)
        assert sobolev_norm(u, NormSpec(0.1, 1.0)) <= sobolev_norm(
            u, NormSpec(0.3, 2.0)
        )

    def test_phase_only_norm_matches(self, box, rng):
        w = random_phase_field(box, rng, support=5)
        # a phase-only field's norm only sees <k> = max(1, |k|_1)
        manual = 0.0
        nz = np.argwhere(w.coeffs != 0)
        for pos in nz:
            k = tuple(int(p - e) for p, e in zip(pos, w.extents))[: box.nu]
            l1 = sum(abs(x) for x in k)
            manual += abs(w.coeffs[tuple(pos)]) ** 2 * math.exp(2 * 0.2 * l1) * max(
                1, l1
            ) ** (2 * 2.0)
        assert abs(sobolev_norm(w, NormSpec(0.2, 2.0)) - math.sqrt(manual)) < 1e-12


class TestProjections:
    def test_constant_split(self, box):
        one = constant_field(box, 1.0)
        assert norm00(project_spatial(one, "mean") - one) == 0.0
        assert norm00(project_spatial(one, "complement")) == 0.0

    def test_product_field_split(self, box):
        f = trig_field(box, "cos", (1, 0), (1,))
        assert norm00(project_spatial(f, "mean")) == 0.0
        assert norm00(project_spatial(f, "complement") - f) == 0.0

    def test_partition_of_identity(self, box, rng):
        g = random_field(box, rng, support=6, zero_spatial_mean=False)
        recombined = project_spatial(g, "mean") + project_spatial(g, "complement")
        assert norm00(recombined - g) == 0.0

    def test_galerkin_split(self, box, rng):
        u = random_field(box, rng, support=8, j_extent=1)
        low = galerkin_project(u, 4, "low")
        tail = galerkin_project(u, 4, "tail")
        assert norm00(low + tail - u) == 0.0
        assert low.support_l1()[0] <= 4

    def test_galerkin_low_of_small_field(self, box, rng):
        u = random_field(box, rng, support=3)
        assert norm00(galerkin_project(u, 4, "low") - u) == 0.0
        assert norm00(galerkin_project(u, 4, "tail")) == 0.0

    @pytest.mark.parametrize("rho_extra,s_extra", [(0.0, 0.0), (0.05, 0.0), (0.0, 2.0), (0.05, 2.0)])
    def test_smoothing_inequalities(self, box, rng, rho_extra, s_extra):
        u = random_field(box, rng, support=8, j_extent=1)
        rho, s = 0.1, 1.0
        for n_cut in (2, 4, 8):
            low = galerkin_project(u, n_cut, "low")
            lhs = sobolev_norm(low, NormSpec(rho + rho_extra, s + s_extra))
            rhs = (
                math.exp(2 * rho_extra * n_cut)
                * n_cut**s_extra
                * sobolev_norm(u, NormSpec(rho, s))
            )
            assert lhs <= rhs * (1 + 1e-12)
            tail = galerkin_project(u, n_cut, "tail")
            for rho_small in (0.02, 0.05, rho):
                lhs_t = sobolev_norm(tail, NormSpec(rho_small, s))
                rhs_t = math.exp(-(rho - rho_small) * n_cut) * sobolev_norm(
                    u, NormSpec(rho, s)
                )
                assert lhs_t <= rhs_t * (1 + 1e-12)

    def test_single_mode_at_cutoff(self, box):
        u = trig_field(box, "cos", (4, 0), (0,))
        low = galerkin_project(u, 4, "low")
        rho_extra, s_extra = 0.1, 2.0
        lhs = sobolev_norm(low, NormSpec(0.1 + rho_extra, 1.0 + s_extra))
        rhs = math.exp(2 * rho_extra * 4) * 4**s_extra * sobolev_norm(u, NormSpec(0.1, 1.0))
        assert lhs <= rhs * (1 + 1e-12)


class TestDifferentialOperators:
    def test_constant_derivative(self, box, omega):
        assert norm00(phase_derivative(constant_field(box, 1.0), omega)) == 0.0

    def test_cos_to_sin(self, box, omega):
        k = (2, -1)
        c = trig_field(box, "cos", k, (0,))
        s = trig_field(box, "sin", k, (0,))
        sigma = float(np.dot(omega.values, k))
        diff = phase_derivative(c, omega) - (-sigma) * s
        assert norm00(diff) < 1e-14

    def test_second_derivative_symbol(self, box, omega, rng):
        u = random_field(box, rng, support=4)
        twice = phase_derivative(phase_derivative(u, omega), omega)
        nz = np.argwhere(u.coeffs != 0)
        for pos in nz[:20]:
            mode = tuple(int(p - e) for p, e in zip(pos, u.extents))
            k, j = mode[: box.nu], mode[box.nu :]
            sigma = float(np.dot(omega.values, k))
            expected = -(sigma**2) * u.coeffs[tuple(pos)]
            assert abs(twice.coefficient((k, j)) - expected) < 1e-13

    def test_antiderivative_of_constant_is_zero(self, box, omega):
        assert norm00(phase_antiderivative(constant_field(box, 1.0), omega)) == 0.0

    def test_antiderivative_single_mode(self, box, omega):
        k = (1, 1)
        e = field_from_modes([((k, (0,)), 0.5)], box)
        anti = phase_antiderivative(e, omega)
        sigma = float(np.dot(omega.values, k))
        assert abs(anti.coefficient((k, (0,))) - 0.5 / (1j * sigma)) < 1e-15

    def test_roundtrip(self, box, omega, rng):
        u = random_field(box, rng, support=5)
        u = u - project_spatial_phase_mean(u)
        roundtrip = phase_antiderivative(phase_derivative(u, omega), omega)
        assert norm00(roundtrip - u) < 1e-12 * max(1.0, norm00(u))

    def test_small_divisor_error(self, box):
        from qpbeam.frequency import FrequencyVector

        resonant = FrequencyVector((0.6, 0.8))
        e = field_from_modes([(((4, -3), (0,)), 1.0)], box)
        with pytest.raises(SmallDivisorError) as err:
            phase_antiderivative(e, resonant)
        assert abs(err.value.value) < 1e-14

    def test_bilaplacian(self, box):
        assert norm00(bilaplacian(constant_field(box, 1.0))) == 0.0
        c = trig_field(box, "cos", (0, 0), (1,))
        assert norm00(bilaplacian(c) - c) < 1e-15

    def test_bilaplacian_two_dimensional(self):
        box2 = TruncationBox(2, 2, 4, 2)
        c = trig_field(box2, "cos", (0, 0), (1, 1))
        # |j|_2^2 = 2 so the symbol is 4
        assert norm00(bilaplacian(c) - 4.0 * c) < 1e-14


def project_spatial_phase_mean(u):
    """Zero out the k = 0 plane (phase mean per spatial mode)."""
    import numpy as np

    from qpbeam.fourier import _build

    arr = u.coeffs.copy()
    nu = u.box.nu
    sl = tuple(
        [slice(e, e + 1) for e in u.extents[:nu]]
        + [slice(None)] * u.box.d
    )
    mean = np.zeros_like(arr)
    mean[sl] = arr[sl]
    return _build(u.box, mean, u.hermitian)


class TestExpAndGrid:
    def test_exp_zero(self, box):
        one_diff = exp_phase_field(zero_field(box)) - constant_field(box, 1.0)
        assert norm00(one_diff) == 0.0

    def test_exp_constant(self, box):
        c = constant_field(box, 0.7)
        out = exp_phase_field(c)
        assert abs(out.coefficient(((0, 0), (0,))) - math.exp(0.7)) < 1e-14

    def test_exp_self_inverse(self, box):
        w = trig_field(box, "cos", (1, 0), (0,), amplitude=0.1)
        prod = multiply(exp_phase_field(w), exp_phase_field(-1.0 * w))
        assert abs(norm00(prod - constant_field(box, 1.0))) < 1e-10

    def test_exp_overflow_cap(self, box):
        w = trig_field(box, "cos", (1, 0), (0,), amplitude=500.0)
        from qpbeam.errors import GridOverflowError

        with pytest.raises(GridOverflowError):
            exp_phase_field(w)

    def test_exp_requires_phase_only(self, box):
        w = trig_field(box, "cos", (1, 0), (1,))
        with pytest.raises(ValueError):
            exp_phase_field(w)

    def test_synthesize_constant(self, box):
        vals = synthesize_on_grid(constant_field(box, 1.0), (4, 4, 4))
        assert np.allclose(vals, 1.0)

    def test_synthesize_cosine(self, box):
        c = trig_field(box, "cos", (1, 0), (0,))
        vals = synthesize_on_grid(c, (8, 1, 1))
        phi = 2 * np.pi * np.arange(8) / 8
        assert np.allclose(vals[:, 0, 0], np.cos(phi), atol=1e-14)

    def test_parseval(self, box, rng):
        u = random_field(box, rng, support=6)
        sizes = tuple(max(2 * e + 1, 3) for e in u.extents)
        vals = synthesize_on_grid(u, sizes)
        assert abs(math.sqrt(float(np.mean(vals**2))) - norm00(u)) < 1e-10

    def test_aliasing_guard(self, box, rng):
        u = random_field(box, rng, support=6, j_extent=1)
        with pytest.raises(AliasingError):
            synthesize_on_grid(u, (3, 3, 3))


class TestDump:
    def test_roundtrip(self, box, rng):
        u = random_field(box, rng, support=4)
        text = coefficient_dump(u)
        back = field_from_dump(text)
        assert back.box == box
        assert norm00(back - u) == 0.0

    def test_header(self, box):
        text = coefficient_dump(constant_field(box, 2.0))
        header = text.splitlines()[0]
        assert header == "# nu=2 d=1 cutoff=8 pad=2"

    def test_sorted_lexicographically(self, box, rng):
        u = random_field(box, rng, support=3)
        lines = coefficient_dump(u).splitlines()[1:]
        modes = [tuple(int(x) for x in ln.split()[:3]) for ln in lines]
        assert modes == sorted(modes)


@settings(max_examples=25, deadline=None)
@given(
    amp=st.floats(min_value=0.01, max_value=2.0),
    k1=st.integers(min_value=-4, max_value=4),
    k2=st.integers(min_value=-4, max_value=4),
    j=st.integers(min_value=-4, max_value=4),
)
def test_reality_preserved_by_pipeline(amp, k1, k2, j):
    box = TruncationBox(2, 1, 8, 2)
    from qpbeam.frequency import golden_frequency

    omega = golden_frequency()
    if (k1, k2, j) == (0, 0, 0):
        return
    u = field_from_modes([(((k1, k2), (j,)), amp * (0.3 + 0.4j))], box)
    outs = [
        multiply(u, u),
        phase_derivative(u, omega),
        bilaplacian(u),
        galerkin_project(u, 4, "low"),
        project_spatial(u, "complement"),
    ]
    for out in outs:
        flipped = np.conj(
            out.coeffs[tuple(slice(None, None, -1) for _ in range(out.coeffs.ndim))]
        )
        assert np.max(np.abs(out.coeffs - flipped)) < 1e-12
