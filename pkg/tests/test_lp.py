"""Band calculus on periodic grids: partitions, d, primitives, supports."""

import numpy as np
import pytest

from lipdeg.bands import (
    BandProfile,
    DyadicPartition,
    GridForm,
    band_decompose,
    band_profile,
    bandlimited_noise_form,
    build_partition,
    exterior_derivative,
    forward_transform,
    grid_axes,
    grid_form,
    inverse_transform,
    kernel_l1_diagnostics,
    lp_norm,
    primitive,
    product_support_radius,
    project_band,
    project_upto,
    spectral_support,
    wedge_grid,
    zero_form,
)
from lipdeg.errors import (
    BandRangeError,
    MeanObstruction,
    NotClosed,
    ParameterError,
    ResolutionError,
    ShapeError,
)

TAU = 2.0 * np.pi


def noise(d, p, N, seed, radius=6.0, T=1.0):
    return bandlimited_noise_form(d, p, N, T=T, radius=radius, seed=seed)


# -- containers and validation -------------------------------------------------


def test_grid_form_validation():
    with pytest.raises(ResolutionError):
        zero_form(2, 1, 48)
    with pytest.raises(ShapeError):
        zero_form(2, 3, 16)
    with pytest.raises(ParameterError):
        GridForm(2, 1, 16, -1.0, np.zeros((2, 16, 16)))
    with pytest.raises(ShapeError):
        GridForm(2, 1, 16, 1.0, np.zeros((3, 16, 16)))


def test_transform_round_trip():
    a = noise(2, 1, 32, seed=1)
    b = inverse_transform(forward_transform(a))
    assert np.max(np.abs(a.data - b.data)) < 1e-12 * np.max(np.abs(a.data))


def test_inverse_transform_rejects_broken_symmetry():
    a = noise(2, 0, 16, seed=2)
    s = forward_transform(a)
    s.data[0, 3, 5] += 1.0  # breaks Hermitian pairing
    with pytest.raises(ShapeError):
        inverse_transform(s)


def test_lp_norm_exact_values():
    N = 64
    f = grid_form(2, 0, N, components={(): lambda x, y: 2.0 + 0.0 * x})
    assert lp_norm(f, 1) == pytest.approx(2.0, abs=1e-14)
    assert lp_norm(f, 2) == pytest.approx(2.0, abs=1e-14)
    assert lp_norm(f, "inf") == pytest.approx(2.0, abs=1e-14)
    g = grid_form(2, 0, N, components={(): lambda x, y: np.sin(TAU * x) + 0.0 * y})
    # discrete |sin| average over N nodes has the closed form (2/N) cot(pi/N)
    assert lp_norm(g, 1) == pytest.approx(2.0 / N / np.tan(np.pi / N), abs=1e-12)
    assert lp_norm(g, 2) == pytest.approx(np.sqrt(0.5), abs=1e-12)


# -- partition structure -------------------------------------------------------


def test_partition_band_range():
    part = build_partition(2, 64, 1.0)
    assert part.k_min == 0
    assert 2.0**part.k_max >= np.sqrt(2) * 32
    part2 = build_partition(3, 32, 4.0)
    assert part2.k_min == -2  # lowest nonzero |xi| = 1/4


def test_partition_sums_to_one_and_plateaus():
    part = build_partition(2, 64, 1.0)
    total = sum(part.band_multiplier(k) for k in part.bands)
    assert np.max(np.abs(total - 1.0)) < 1e-14
    top = part.lowpass_multiplier(part.k_max)
    assert np.all(top == 1.0)  # grid radius below the last cutoff: exact ones
    low = part.lowpass_multiplier(part.k_min)
    assert low[0, 0] == 1.0  # zero mode sits in the lowest band
    for k in part.bands:
        if k > part.k_min:
            assert part.band_multiplier(k)[0, 0] == 0.0


def test_partition_band_disjointness_and_overlap():
    part = build_partition(2, 64, 1.0)
    for k in part.bands:
        for j in part.bands:
            prod = part.band_multiplier(k) * part.band_multiplier(j)
            if abs(k - j) >= 2:
                assert np.all(prod == 0.0)
    # adjacent bands genuinely overlap (partition, not a sharp split)
    mid = part.band_multiplier(3) * part.band_multiplier(4)
    assert np.max(mid) > 1e-4


def test_lowpass_idempotence_is_exact():
    part = build_partition(2, 64, 1.0)
    a = noise(2, 1, 64, seed=3, radius=20.0)
    inner = project_upto(a, 2, part)
    again = project_upto(inner, 5, part)
    assert np.max(np.abs(again.data - inner.data)) < 1e-13 * np.max(np.abs(a.data))
    # multiplier-level identity: chi_5 == 1 on the support of chi_2
    m2, m5 = part.lowpass_multiplier(2), part.lowpass_multiplier(5)
    assert np.all(m5[m2 > 0] == 1.0)


def test_reconstruction_from_bands():
    for d, N, p, seed in [(2, 64, 1, 4), (3, 16, 2, 5)]:
        a = noise(d, p, N, seed=seed, radius=N / 4)
        parts = band_decompose(a)
        total = sum(piece.data for piece in parts.values())
        assert np.max(np.abs(total - a.data)) < 1e-10 * np.max(np.abs(a.data))


def test_band_decompose_matches_project_band():
    a = noise(2, 1, 32, seed=6)
    part = build_partition(2, 32, 1.0)
    pieces = band_decompose(a, part)
    for k in part.bands:
        direct = project_band(a, k, part)
        assert np.max(np.abs(pieces[k].data - direct.data)) < 1e-13


def test_band_index_validation():
    a = noise(2, 0, 16, seed=7)
    part = build_partition(2, 16, 1.0)
    with pytest.raises(BandRangeError):
        project_band(a, part.k_max + 1, part)
    with pytest.raises(BandRangeError):
        part.band_multiplier(part.k_min - 1)


def test_orthogonality_ratio_window():
    for seed in (8, 9):
        a = noise(2, 1, 64, seed=seed, radius=24.0)
        prof = band_profile(a)
        ratio = prof.orthogonality_ratio()
        assert 0.1 <= ratio <= 1.0
        assert ratio >= 0.5 - 1e-9  # at most two bands share any frequency


# -- exterior derivative -------------------------------------------------------


def test_derivative_matches_analytic_gradient():
    N = 32
    a = grid_form(
        2, 1, N, components={(2,): lambda x, y: np.sin(TAU * x) * np.cos(2 * TAU * y)}
    )
    da = exterior_derivative(a)
    x, y = grid_axes(2, N)
    want = TAU * np.cos(TAU * x) * np.cos(2 * TAU * y)
    got = da.component((1, 2))
    assert np.max(np.abs(got - np.broadcast_to(want, (N, N)))) < 1e-10


def test_derivative_squares_to_zero():
    a = noise(3, 1, 16, seed=10, radius=5.0)
    dda = exterior_derivative(exterior_derivative(a))
    scale = np.max(np.abs(a.data)) * (TAU * 16) ** 2
    assert np.max(np.abs(dda.data)) < 1e-12 * scale


def test_derivative_of_top_degree_vanishes():
    a = noise(2, 2, 16, seed=11)
    da = exterior_derivative(a)
    assert da.form_degree == 2
    assert np.all(da.data == 0.0)


def test_derivative_commutes_with_band_projection():
    a = noise(2, 1, 64, seed=12, radius=20.0)
    part = build_partition(2, 64, 1.0)
    scale = TAU * 64 * np.max(np.abs(a.data))
    for k in (2, 4):
        lhs = exterior_derivative(project_band(a, k, part))
        rhs = project_band(exterior_derivative(a), k, part)
        assert np.max(np.abs(lhs.data - rhs.data)) < 1e-10 * scale


# -- primitives ----------------------------------------------------------------


def test_primitive_recovers_potential():
    for T in (1.0, 2.5):
        N = 32
        g = grid_form(
            2,
            0,
            N,
            T,
            components={
                (): lambda x, y: np.cos(TAU * x / T) * np.sin(2 * TAU * y / T)
                + 0.3 * np.sin(3 * TAU * y / T)
            },
        )
        a = exterior_derivative(g)
        rec = primitive(a)
        assert np.max(np.abs(rec.data - g.data)) < 1e-10 * np.max(np.abs(g.data))


def test_primitive_is_right_inverse_in_degree_two():
    b = noise(3, 1, 16, seed=13, radius=5.0)
    a = exterior_derivative(b)
    prim = primitive(a)
    back = exterior_derivative(prim)
    assert np.max(np.abs(back.data - a.data)) < 1e-10 * np.max(np.abs(a.data))


def test_primitive_gains_one_band_factor():
    N, part = 128, build_partition(2, 128, 1.0)
    ratios = {}
    for k in (3, 6):
        u = project_band(noise(2, 0, N, seed=14, radius=60.0), k, part)
        a = exterior_derivative(u)
        prim = primitive(a, band=k, part=part)
        ratios[k] = lp_norm(prim, 2) * 2.0**k / lp_norm(a, 2)
    assert 0.4 < ratios[6] / ratios[3] < 2.5


def test_primitive_obstructions():
    N = 16
    const = grid_form(2, 1, N, components={(1,): lambda x, y: 1.0 + 0.2 * np.sin(TAU * x)})
    with pytest.raises(MeanObstruction):
        primitive(const)
    shear = grid_form(2, 1, N, components={(1,): lambda x, y: np.sin(TAU * y) + 0.0 * x})
    with pytest.raises(NotClosed):
        primitive(shear)


def test_primitive_band_leak_detection():
    part = build_partition(2, 64, 1.0)
    u = project_band(noise(2, 0, 64, seed=15, radius=20.0), 2, part)
    a = exterior_derivative(u)
    with pytest.raises(BandRangeError):
        primitive(a, band=5, part=part)


# -- wedge, supports, kernels ----------------------------------------------------


def test_wedge_grid_cross_term():
    N = 16
    f = lambda x, y: np.sin(TAU * x) + 0.0 * y
    g = lambda x, y: np.cos(TAU * y) + 0.0 * x
    a = grid_form(2, 1, N, components={(1,): f})
    b = grid_form(2, 1, N, components={(2,): g})
    ab = wedge_grid(a, b)
    x, y = grid_axes(2, N)
    want = np.broadcast_to(f(x, y) * g(x, y), (N, N))
    assert np.max(np.abs(ab.component((1, 2)) - want)) < 1e-14
    ba = wedge_grid(b, a)
    assert np.max(np.abs(ba.data + ab.data)) < 1e-14


def test_wedge_grid_degree_overflow():
    a = noise(2, 1, 16, seed=16)
    b = noise(2, 2, 16, seed=17)
    with pytest.raises(ShapeError):
        wedge_grid(a, b)


def test_spectral_support_exact_points():
    N = 16
    a = grid_form(2, 0, N, components={(): lambda x, y: np.cos(3 * TAU * x) + 0.0 * y})
    pts = {tuple(row) for row in spectral_support(a)}
    assert pts == {(3, 0), (-3, 0)}


def test_product_support_is_sum_of_supports():
    N = 64
    a = project_upto(noise(2, 0, N, seed=18, radius=28.0), 3)
    b = project_upto(noise(2, 0, N, seed=19, radius=28.0), 3)
    prod = a.copy_with(a.data * b.data)
    sum_set = {
        (int(u[0] + v[0]), int(u[1] + v[1]))
        for u in spectral_support(a)
        for v in spectral_support(b)
    }
    prod_set = {tuple(int(x) for x in row) for row in spectral_support(prod, 1e-10)}
    assert prod_set <= sum_set  # bit-exact set containment
    assert product_support_radius(a, b) <= 2 * 16.0 + 1e-9


def test_product_support_alias_guard():
    N = 16
    a = grid_form(2, 0, N, components={(): lambda x, y: np.cos(5 * TAU * x) + 0.0 * y})
    with pytest.raises(BandRangeError):
        product_support_radius(a, a)


def test_kernel_diagnostics_uniform_over_bands():
    part = build_partition(2, 64, 1.0)
    diag = kernel_l1_diagnostics(part)
    interior = [k for k in part.bands if part.k_min < k < part.k_max]
    l1s = [diag[k]["l1"] for k in interior]
    dl1s = [diag[k]["dl1_scaled"] for k in interior]
    assert max(l1s) / min(l1s) <= 10.0
    assert max(dl1s) / min(dl1s) <= 10.0
    for k in interior:
        assert diag[k]["l1"] < 50.0


def test_bandlimited_noise_respects_radius():
    a = bandlimited_noise_form(2, 1, 32, radius=7.0, seed=20)
    pts = spectral_support(a, thresh=1e-9)
    assert np.all(np.linalg.norm(pts, axis=1) <= 7.0 + 1e-9)
