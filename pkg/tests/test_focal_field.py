import numpy as np
import pytest
from scipy.special import j0, j1, jn_zeros

from discread.field_core import Grid1D, photon_number
from discread.focal_field import (FocusSpec, Grid2D, encircled_energy, focal_field, focal_line_profile,
                                  focal_slice_x, na_scan, paraxial_focal_field, paraxial_pupil_energy,
                                  radial_integrals, richards_wolf_focal_field, scan_to_csv, slice_width_86,
                                  spot_size_86, spot_size_86_radial, vectorial_total_energy)

LAM = 780e-9
DEFAULT = FocusSpec(LAM, 0.47)


@pytest.fixture(scope="module")
def rw_default():
    return richards_wolf_focal_field(DEFAULT, Grid2D.default(LAM))


@pytest.mark.parametrize("kw", [dict(numerical_aperture=1.0), dict(numerical_aperture=1.2), dict(numerical_aperture=0.0),
                                dict(wavelength=-1.0), dict(model="scalar"), dict(medium_index=0.0),
                                dict(paraxial_aperture="cosine"), dict(filling=-1.0)])
def test_focus_spec_validation(kw):
    with pytest.raises(ValueError):
        FocusSpec(**{"wavelength": LAM, "numerical_aperture": 0.47, **kw})


def test_focus_angle_default():
    assert np.degrees(DEFAULT.theta_max) == pytest.approx(28.0, abs=1.0)


def test_component_hierarchy(rw_default):
    pk = rw_default.peaks()
    assert pk["Ey"] < pk["Ez"] < pk["Ex"]


def test_ey_vanishes_on_axes(rw_default):
    mid = rw_default.grid.n_points // 2
    assert np.abs(rw_default.Ey[mid, :]).max() <= 1e-12 * np.abs(rw_default.Ex).max()
    assert np.abs(rw_default.Ey[:, mid]).max() <= 1e-12 * np.abs(rw_default.Ex).max()


def test_symmetry_classes(rw_default):
    ax, az = np.abs(rw_default.Ex), np.abs(rw_default.Ez)
    tol = 1e-12 * ax.max()
    assert np.abs(ax - ax[:, ::-1]).max() < tol and np.abs(ax - ax[::-1, :]).max() < tol
    assert np.abs(az - az[::-1, :]).max() < tol
    ez = rw_default.Ez
    assert np.abs(ez + ez[:, ::-1]).max() < tol  # odd in x
    mid = rw_default.grid.n_points // 2
    assert np.abs(ez[:, mid]).max() < tol


def test_small_na_vectorial_matches_airy():
    spec_v, spec_p = FocusSpec(LAM, 0.1), FocusSpec(LAM, 0.1, model="paraxial")
    g = Grid1D.centered(3 * LAM / 0.1, 2001)
    a = np.abs(focal_line_profile(spec_v, g).amplitude)
    b = np.abs(focal_line_profile(spec_p, g).amplitude)
    a, b = a / a.max(), b / b.max()
    assert np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(b ** 2)) < 0.01


def _ez_ex(na):
    pk = richards_wolf_focal_field(FocusSpec(LAM, na), Grid2D(2 * LAM / na, 129)).peaks()
    return pk["Ez"] / pk["Ex"]


def test_small_na_longitudinal_component_small():
    r = [_ez_ex(na) for na in (0.05, 0.1, 0.2)]
    assert r[0] < r[1] < r[2]
    # amplitude ratio is linear in the aperture angle at small NA ...
    assert r[0] / r[1] == pytest.approx(0.5, rel=0.05)
    # ... so the 0.02 bound at NA 0.1 holds for the intensity ratio (amplitude ratio ~ 0.036)
    assert r[1] ** 2 < 0.02


def test_airy_first_zero():
    spec = FocusSpec(LAM, 0.47, model="paraxial")
    r = np.linspace(0.4, 0.8, 40001) * LAM / 0.47
    i = np.abs(focal_line_profile(spec, Grid1D(r[0], r[-1], r.size)).amplitude) ** 2
    r0 = r[np.argmin(i)]
    assert r0 == pytest.approx(0.61 * LAM / 0.47, rel=0.005)
    assert r0 == pytest.approx(jn_zeros(1, 1)[0] / (2 * np.pi) * LAM / 0.47, rel=1e-4)


def test_paraxial_scalar_only():
    ff = paraxial_focal_field(DEFAULT, Grid2D(LAM, 33))
    assert not ff.Ey.any() and not ff.Ez.any()


def test_paraxial_parseval():
    spec = FocusSpec(LAM, 0.47, model="paraxial")
    K = 2 * np.pi * 0.47 / LAM
    v = np.linspace(0, 20000, 800001)
    r = v / K
    u2 = (K * K / (2 * np.pi)) ** 2 * np.where(v == 0, 0.25, (j1(np.where(v == 0, 1, v)) / np.where(v == 0, 1, v)) ** 2)
    focal = np.trapezoid(2 * np.pi * r * u2, r)
    assert focal == pytest.approx(paraxial_pupil_energy(spec), rel=1e-4)


def test_paraxial_encircled_energy_oracle():
    spec = FocusSpec(LAM, 0.47, model="paraxial")
    r = np.linspace(0, 10 * LAM / 0.47, 20001)
    v = 2 * np.pi * 0.47 / LAM * r
    np.testing.assert_allclose(encircled_energy(spec, r), 1 - j0(v) ** 2 - j1(v) ** 2, atol=1e-6)


def test_vectorial_encircled_energy_bounded():
    r = np.linspace(0, 20 * LAM / 0.47, 4001)
    ee = encircled_energy(DEFAULT, r)
    assert np.all(np.diff(ee) >= -1e-12)
    assert 0.97 < ee[-1] <= 1.0 + 1e-6


def test_vectorial_total_energy_plane_wave():
    assert vectorial_total_energy(DEFAULT) == pytest.approx(2 * np.pi * (1 - np.cos(DEFAULT.theta_max)), rel=1e-12)


def test_quadrature_converged():
    r = np.linspace(0, 5 * LAM, 301)
    a = radial_integrals(r, DEFAULT, 256)
    b = radial_integrals(r, DEFAULT, 512)
    for x, y in zip(a, b):
        assert np.abs(x - y).max() <= 1e-8 * np.abs(y).max()


def test_spot_size_gaussian():
    w = 1.0
    g = Grid2D(3 * w, 257)
    X, Y = g.mesh()
    d = spot_size_86(np.exp(-2 * (X ** 2 + Y ** 2) / w ** 2), g)
    assert d == pytest.approx(2 * w * np.sqrt(-np.log(0.14) / 2), abs=2 * g.spacing)


def test_spot_size_uniform_disc():
    dd = 2.0
    g = Grid2D(1.5, 301)
    X, Y = g.mesh()
    d = spot_size_86((np.hypot(X, Y) <= dd / 2).astype(float), g)
    assert d == pytest.approx(dd * np.sqrt(0.86), abs=2 * g.spacing)


def test_spot_size_is_minimal(rw_default):
    g, inten = rw_default.grid, rw_default.intensity
    d = spot_size_86(inten, g)
    X, Y = g.mesh()
    rr = np.hypot(X, Y)
    total = inten.sum()
    assert inten[rr <= d / 2].sum() >= 0.86 * total
    smaller = rr[rr < d / 2].max()
    assert inten[rr <= smaller].sum() < 0.86 * total


def test_spot_size_errors():
    g = Grid2D(1.0, 11)
    with pytest.raises(ValueError):
        spot_size_86(np.zeros((11, 11)), g)
    with pytest.raises(ValueError):
        spot_size_86(-np.ones((11, 11)), g)


def test_paraxial_vs_vectorial_spot():
    v47, p47 = spot_size_86_radial(DEFAULT, "vectorial"), spot_size_86_radial(DEFAULT, "paraxial")
    assert abs(v47 / p47 - 1) < 0.05
    s90 = FocusSpec(LAM, 0.9)
    v90, p90 = spot_size_86_radial(s90, "vectorial"), spot_size_86_radial(s90, "paraxial")
    assert v90 / p90 - 1 > 0.10
    assert 0.4 * LAM < v90 < 5 * LAM


def test_grid_and_radial_spot_agree_on_wide_grid():
    spec = FocusSpec(LAM, 0.47, model="paraxial")
    g = Grid2D(8 * LAM, 401)
    d_grid = spot_size_86(focal_field(spec, g).intensity, g)
    # the grid captures less than the full Airy tail, so its D86 is slightly smaller
    d_rad = spot_size_86_radial(spec)
    assert 0.8 < d_grid / d_rad <= 1.0 + 2 * g.spacing / d_rad


@pytest.fixture(scope="module")
def scan():
    return na_scan(FocusSpec(LAM, 0.5), [0.1, 0.2, 0.3, 0.47, 0.6, 0.8, 0.9, 0.95])


def test_na_scan_paraxial_strictly_decreasing(scan):
    d = [r.d86_paraxial for r in scan]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_na_scan_vectorial_floor(scan):
    assert scan[-1].d86_vectorial > 0.4 * LAM


def test_na_scan_small_angle_ratio(scan):
    r = scan[1]
    assert 0.98 <= r.d86_vectorial / r.d86_paraxial <= 1.02


def test_na_scan_vectorial_monotone_up_to_08(scan):
    d = [r.d86_vectorial for r in scan if r.na <= 0.8]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_vectorial_spot_rises_beyond_085(scan):
    # |E|^2 spot of linear polarisation broadens again at very high NA (Ez lobes)
    d = {round(r.na, 2): r.d86_vectorial for r in scan}
    assert d[0.95] > d[0.9] > d[0.8]


def test_tangent_paraxial_shrinks_to_zero():
    d = [spot_size_86_radial(FocusSpec(LAM, na, paraxial_aperture="tangent"), "paraxial")
         for na in (0.9, 0.99, 0.999)]
    assert d[0] > d[1] > d[2] and d[2] < 0.1 * LAM


def test_na_scan_reports_offending_na():
    with pytest.raises(ValueError, match="NA=1.1"):
        na_scan(FocusSpec(LAM, 0.5), [0.5, 1.1])


def test_scan_csv(scan):
    lines = scan_to_csv(scan).splitlines()
    assert lines[0] == "na,d86_paraxial,d86_vectorial" and len(lines) == 9


def test_focal_slice(rw_default):
    s = focal_slice_x(rw_default, 25.0)
    assert photon_number(s) == pytest.approx(25.0, rel=1e-10)
    np.testing.assert_array_equal(s.amplitude, s.amplitude[::-1])
    with pytest.raises(ValueError):
        focal_slice_x(richards_wolf_focal_field(DEFAULT, Grid2D(LAM, 16)))


def test_slice_width_order_lambda():
    w = slice_width_86(DEFAULT)
    d2 = spot_size_86_radial(DEFAULT)
    assert 0.3 * LAM < w < 3 * LAM
    assert w < d2  # a 1-D cut concentrates energy more than the 2-D disc


def test_focal_map_csv_header():
    ff = richards_wolf_focal_field(DEFAULT, Grid2D(LAM, 5))
    lines = ff.to_csv().splitlines()
    assert lines[0] == "x,y,|Ex|,|Ey|,|Ez|,intensity" and len(lines) == 26


def test_gaussian_filling_broadens_central_lobe():
    g = Grid1D(0.0, 1.5 * LAM, 3001)

    def half_max_radius(spec):
        i = np.abs(focal_line_profile(spec, g).amplitude) ** 2
        return g.x[np.argmax(i < 0.5 * i[0])]

    assert half_max_radius(FocusSpec(LAM, 0.47, filling=0.5)) > half_max_radius(DEFAULT)
