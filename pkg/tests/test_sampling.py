import math
from pathlib import Path

import numpy as np
import pytest

from esm2d import (
    DirectionGrid,
    DiscSpec,
    EsmConfig,
    FarFieldData,
    RegConfig,
    SamplingGrid,
    ScattererSpec,
    combine_indicators,
    indicator_at,
    indicator_field,
    read_farfield,
    restrict_aperture,
    run_esm,
    run_multilevel,
    synthesize_farfield,
)
from esm2d.sampling import prepare_kernel

from conftest import SEED, TRUE_CENTER


def test_grid_counts_and_order():
    g = SamplingGrid(-10.0, 10.0, -10.0, 10.0, 0.1)
    assert g.nx == 201 and g.ny == 201 and len(g) == 40401
    pts = g.points
    # row-major: x slowest, y fastest
    assert np.allclose(pts[0], (-10.0, -10.0))
    assert np.allclose(pts[1], (-10.0, -9.9))
    assert np.allclose(pts[g.ny], (-9.9, -10.0))
    assert np.allclose(pts[-1], (10.0, 10.0))


def test_grid_validation():
    with pytest.raises(ValueError):
        SamplingGrid(0.0, 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        SamplingGrid(1.0, 0.0, 0.0, 1.0, 0.1)


def test_restrict_aperture_full_identity(disc_exact_data):
    out = restrict_aperture(disc_exact_data, (0.0, 2.0 * math.pi))
    assert out is disc_exact_data


def test_restrict_aperture_half(disc_exact_data):
    half = restrict_aperture(disc_exact_data, (0.0, math.pi))
    assert len(half.obs) == 26
    assert half.values.shape == (26, 1)
    assert half.aperture == (0.0, math.pi)
    # retained rows match the original data at the same angles
    kept = [i for i, a in enumerate(disc_exact_data.obs.angles) if a < math.pi]
    assert np.array_equal(half.values[:, 0], disc_exact_data.values[kept, 0])


def test_restrict_aperture_wrapped(disc_exact_data):
    arc = (3 * math.pi / 2, 3 * math.pi / 2 + math.pi)
    out = restrict_aperture(disc_exact_data, arc)
    assert len(out.obs) == 26


def test_restrict_aperture_errors(disc_exact_data):
    with pytest.raises(ValueError):
        restrict_aperture(disc_exact_data, (0.0, 0.0))
    with pytest.raises(ValueError):
        restrict_aperture(disc_exact_data, (-1.0, 1.0))


def test_indicator_contrast_inside_vs_outside(paper_cfg, disc_exact_data):
    work, kernel0 = prepare_kernel(paper_cfg, disc_exact_data)
    inside, _ = indicator_at((3.0, 5.0), paper_cfg, kernel0, work)
    outside, _ = indicator_at((-3.0, -5.0), paper_cfg, kernel0, work)
    assert inside * 10.0 <= outside


def test_indicator_zero_data(paper_cfg, obs52, inc0):
    zero = FarFieldData(
        k=1.0, incident=inc0, obs=obs52, values=np.zeros((52, 1), dtype=complex)
    )
    work, kernel0 = prepare_kernel(paper_cfg, zero)
    raw, _ = indicator_at((1.0, 2.0), paper_cfg, kernel0, work)
    assert raw == 0.0
    fld = indicator_field(paper_cfg, zero)
    assert np.all(fld.raw == 0.0) and np.all(fld.normalized == 0.0)


def test_fast_path_equals_direct(paper_cfg, disc_exact_data):
    work, kernel0 = prepare_kernel(paper_cfg, disc_exact_data)
    rng = np.random.default_rng(13)
    for _ in range(10):
        z = rng.uniform(-10.0, 10.0, 2)
        fast, _ = indicator_at(z, paper_cfg, kernel0, work)
        direct, _ = indicator_at(z, paper_cfg, kernel0, work, direct=True)
        assert abs(fast - direct) <= 1e-10 * max(1.0, direct)


def test_field_normalization_and_argmin(disc_exact_field):
    assert float(disc_exact_field.normalized.max()) == 1.0
    assert np.allclose(disc_exact_field.argmin_point, TRUE_CENTER)
    assert disc_exact_field.alpha_used is not None
    assert np.all(disc_exact_field.alpha_used == 1e-5)


def test_field_on_noisy_disc(paper_cfg, disc_noisy_data):
    # At 3% multiplicative noise with fixed alpha the weakly scattering
    # disc localizes to ~3 grid cells (0.3 for the canonical seed; the
    # spread over seeds is 0.3-1.0).  The discrepancy-principle run below
    # tightens this to 0.2.
    fld = indicator_field(paper_cfg, disc_noisy_data)
    assert np.max(np.abs(fld.argmin_point - TRUE_CENTER)) <= 0.35


def test_field_on_noisy_disc_morozov(paper_cfg, disc_noisy_data):
    cfg = EsmConfig(
        disc=paper_cfg.disc, grid=paper_cfg.grid, reg=RegConfig.morozov(0.03)
    )
    fld = indicator_field(cfg, disc_noisy_data)
    assert np.max(np.abs(fld.argmin_point - TRUE_CENTER)) <= 0.2


def test_field_on_noisy_triangle(tri_noisy_field):
    # locates the obstacle from one plane wave at 3% noise
    assert np.hypot(*(tri_noisy_field.argmin_point - TRUE_CENTER)) <= 0.5


def test_run_esm_contract(paper_cfg, disc_exact_data):
    rec = run_esm(paper_cfg, disc_exact_data)
    assert rec.radius == 1.0
    # returned disc contains the true scatterer (rho = 0.8)
    assert np.hypot(rec.center[0] - 3.0, rec.center[1] - 5.0) <= 1.0 - 0.8 + 1e-12


def test_run_esm_origin_disc(paper_cfg, obs52, inc0):
    data = synthesize_farfield(
        ScattererSpec(kind="disc", center=(0.0, 0.0), radius=0.8), 1.0, inc0, obs52
    )
    rec = run_esm(paper_cfg, data)
    h = paper_cfg.grid.spacing
    assert np.hypot(*rec.center) <= h + 1e-12


def test_multilevel_triangle_terminates_at_0p6(paper_cfg, tri_noisy_data):
    rec = run_multilevel(2.4, paper_cfg, tri_noisy_data)
    assert rec.radius == pytest.approx(0.6)
    assert not rec.cap_reached
    radii = [lv.radius for lv in rec.level_history]
    assert radii == [2.4, 1.2, 0.6, 0.3]
    assert rec.level_history[-1].contained is False


def test_multilevel_disc_scatterer(paper_cfg, disc_noisy_data):
    # For a disc scatterer the scattered field extends to everything but
    # the center, so the exit test fires only once regularization washes
    # out the landscape: the loop runs past the circumscribing radius and
    # settles at R = 0.3 with the center still inside the reconstruction.
    rec = run_multilevel(2.4, paper_cfg, disc_noisy_data)
    assert rec.radius == pytest.approx(0.3)
    assert np.hypot(rec.center[0] - 3.0, rec.center[1] - 5.0) <= rec.radius


def test_multilevel_cap_flag(paper_cfg, disc_noisy_data):
    rec = run_multilevel(2.4, paper_cfg, disc_noisy_data, max_levels=1)
    assert rec.cap_reached
    assert rec.radius == pytest.approx(1.2)


def test_multilevel_lshaped_medium_import(paper_cfg):
    """Inhomogeneous-medium data enters through the file format; the run
    needs an externally produced data file."""
    path = Path(__file__).parent / "data" / "lshape_medium.ff"
    if not path.exists():
        pytest.skip("external L-shaped medium data file not provided")
    data = read_farfield(path)
    cfg = EsmConfig(
        disc=DiscSpec(radius=2.4, wavenumber=data.k),
        grid=paper_cfg.grid,
        reg=paper_cfg.reg,
    )
    rec = run_multilevel(2.4, cfg, data)
    assert rec.radius == pytest.approx(0.3)


def test_combine_single_field_identity(disc_exact_field):
    out = combine_indicators([disc_exact_field])
    assert np.array_equal(out.normalized, disc_exact_field.normalized)


def test_combine_self_sum_invariance(disc_exact_field):
    out = combine_indicators([disc_exact_field, disc_exact_field])
    assert np.allclose(out.normalized, disc_exact_field.normalized, atol=1e-15)
    assert out.argmin_index == disc_exact_field.argmin_index


def test_combine_two_directions(paper_cfg, obs52):
    spec = ScattererSpec(kind="disc", center=(3.0, 5.0), radius=0.8)
    inc2 = DirectionGrid((0.0, math.pi / 2.0))
    data = synthesize_farfield(spec, 1.0, inc2, obs52, noise_level=0.03, seed=SEED)
    f0 = indicator_field(paper_cfg, data, incident_index=0)
    f1 = indicator_field(paper_cfg, data, incident_index=1)
    fc = combine_indicators([f0, f1])
    d0 = np.hypot(*(f0.argmin_point - TRUE_CENTER))
    d1 = np.hypot(*(f1.argmin_point - TRUE_CENTER))
    dc = np.hypot(*(fc.argmin_point - TRUE_CENTER))
    assert dc <= max(d0, d1) + 1e-9


def test_combine_two_frequencies(paper_cfg, obs52, inc0):
    # fields from data at different wavenumbers share the grid and sum
    spec = ScattererSpec(kind="disc", center=(3.0, 5.0), radius=0.8)
    fields = []
    dists = []
    for k in (1.0, 2.0):
        data = synthesize_farfield(spec, k, inc0, obs52, noise_level=0.03, seed=SEED)
        cfg = EsmConfig(
            disc=DiscSpec(radius=1.0, wavenumber=k),
            grid=paper_cfg.grid,
            reg=paper_cfg.reg,
        )
        fld = indicator_field(cfg, data)
        fields.append(fld)
        dists.append(float(np.hypot(*(fld.argmin_point - TRUE_CENTER))))
    fc = combine_indicators(fields)
    dc = float(np.hypot(*(fc.argmin_point - TRUE_CENTER)))
    assert dc <= max(dists) + 1e-9
    assert float(fc.normalized.max()) == 1.0


def test_combine_grid_mismatch(paper_cfg, disc_exact_data, disc_exact_field):
    other_cfg = EsmConfig(
        disc=paper_cfg.disc,
        grid=SamplingGrid(-10.0, 10.0, -10.0, 10.0, 0.2),
        reg=paper_cfg.reg,
    )
    other = indicator_field(other_cfg, disc_exact_data)
    with pytest.raises(ValueError):
        combine_indicators([disc_exact_field, other])


def test_half_aperture_localizes(paper_cfg, disc_exact_data):
    half = restrict_aperture(disc_exact_data, (0.0, math.pi))
    fld = indicator_field(paper_cfg, half)
    # kernel rows follow the restricted grid, columns stay full
    _, kernel0 = prepare_kernel(paper_cfg, half)
    assert kernel0.shape == (26, 52)
    assert np.hypot(*(fld.argmin_point - TRUE_CENTER)) <= 0.5


def test_aperture_via_config(paper_cfg, disc_exact_data):
    cfg = EsmConfig(
        disc=paper_cfg.disc,
        grid=paper_cfg.grid,
        reg=paper_cfg.reg,
        aperture=(0.0, math.pi),
    )
    fld = indicator_field(cfg, disc_exact_data)
    assert np.hypot(*(fld.argmin_point - TRUE_CENTER)) <= 0.5


def test_separation_medians(paper_cfg, disc_exact_field):
    pts = paper_cfg.grid.points
    dist = np.hypot(pts[:, 0] - 3.0, pts[:, 1] - 5.0)
    inner = np.median(disc_exact_field.raw[dist <= 0.2])
    outer = np.median(disc_exact_field.raw[dist >= 2.8])
    assert outer >= 5.0 * inner


def test_determinism_bitwise(paper_cfg, disc_noisy_data):
    a = indicator_field(paper_cfg, disc_noisy_data)
    b = indicator_field(paper_cfg, disc_noisy_data)
    assert np.array_equal(a.raw, b.raw)
    assert np.array_equal(a.normalized, b.normalized)
    assert a.argmin_index == b.argmin_index


def test_grid_refinement_stability(disc_exact_data):
    reg = RegConfig.fixed(1e-5)
    coarse = EsmConfig(
        disc=DiscSpec(1.0, 1.0), grid=SamplingGrid(0.0, 6.0, 2.0, 8.0, 0.2), reg=reg
    )
    fine = EsmConfig(
        disc=DiscSpec(1.0, 1.0), grid=SamplingGrid(0.0, 6.0, 2.0, 8.0, 0.1), reg=reg
    )
    za = indicator_field(coarse, disc_exact_data).argmin_point
    zb = indicator_field(fine, disc_exact_data).argmin_point
    assert np.max(np.abs(za - zb)) <= 0.2 + 1e-12


def test_morozov_field_runs(paper_cfg, disc_noisy_data):
    cfg = EsmConfig(
        disc=paper_cfg.disc,
        grid=SamplingGrid(0.0, 6.0, 2.0, 8.0, 0.25),
        reg=RegConfig.morozov(0.03),
    )
    fld = indicator_field(cfg, disc_noisy_data)
    assert fld.alpha_used is not None and fld.morozov_fallback is not None
    ok = ~fld.morozov_fallback
    assert ok.any()
    assert np.all(fld.alpha_used[ok] > 0.0)
    assert np.hypot(*(fld.argmin_point - TRUE_CENTER)) <= 0.5


def test_morozov_scalar_matches_field(paper_cfg, disc_noisy_data):
    cfg = EsmConfig(
        disc=paper_cfg.disc,
        grid=SamplingGrid(2.0, 4.0, 4.0, 6.0, 1.0),
        reg=RegConfig.morozov(0.03),
    )
    work, kernel0 = prepare_kernel(cfg, disc_noisy_data)
    fld = indicator_field(cfg, disc_noisy_data)
    for i, z in enumerate(cfg.grid.points):
        raw, alpha = indicator_at(z, cfg, kernel0, work)
        assert raw == pytest.approx(fld.raw[i], rel=1e-6)
        if not fld.morozov_fallback[i]:
            assert alpha == pytest.approx(fld.alpha_used[i], rel=1e-3)


def test_wavenumber_mismatch(paper_cfg, obs52, inc0):
    data = FarFieldData(
        k=2.0, incident=inc0, obs=obs52, values=np.ones((52, 1), dtype=complex)
    )
    with pytest.raises(ValueError):
        indicator_field(paper_cfg, data)
