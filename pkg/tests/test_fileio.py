import numpy as np
import pytest

from esm2d import (
    DiscSpec,
    EsmConfig,
    FormatError,
    RegConfig,
    SamplingGrid,
    read_farfield,
    read_indicator_grid,
    write_farfield,
    write_indicator_grid,
)
from esm2d.sampling import indicator_field


def test_farfield_roundtrip(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    back = read_farfield(path)
    assert back.k == disc_noisy_data.k
    assert back.noise_level == disc_noisy_data.noise_level
    assert back.seed == disc_noisy_data.seed
    assert back.rng == disc_noisy_data.rng
    assert back.obs.angles == disc_noisy_data.obs.angles
    assert back.incident.angles == disc_noisy_data.incident.angles
    assert np.array_equal(back.values, disc_noisy_data.values)


def test_farfield_write_deterministic(tmp_path, disc_noisy_data):
    p1, p2 = tmp_path / "a.ff", tmp_path / "b.ff"
    write_farfield(p1, disc_noisy_data)
    write_farfield(p2, disc_noisy_data)
    assert p1.read_bytes() == p2.read_bytes()


def test_farfield_line_count(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    lines = path.read_text().splitlines()
    # 52 obs x 1 incident -> exactly 52 data lines
    assert len([l for l in lines if l and l[0].isdigit()]) == 52
    assert lines[0] == "format=esm-ff v1"


def test_missing_k_field(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    text = path.read_text().splitlines()
    text = [l for l in text if not l.startswith("k=")]
    bad = tmp_path / "bad.ff"
    bad.write_text("\n".join(text) + "\n")
    with pytest.raises(FormatError, match="missing header field: k"):
        read_farfield(bad)


def test_version_mismatch(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    text = path.read_text().replace("esm-ff v1", "esm-ff v2")
    bad = tmp_path / "bad.ff"
    bad.write_text(text)
    with pytest.raises(FormatError, match="version mismatch"):
        read_farfield(bad)


def test_duplicate_entry_reports_line(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    lines = path.read_text().splitlines()
    lines.append(lines[-1])  # duplicate the final data line
    bad = tmp_path / "bad.ff"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="duplicate entry"):
        read_farfield(bad)
    try:
        read_farfield(bad)
    except FormatError as exc:
        assert exc.line == len(lines)


def test_missing_data_line(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    lines = path.read_text().splitlines()[:-1]
    bad = tmp_path / "bad.ff"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="dimension mismatch"):
        read_farfield(bad)


def test_index_out_of_range(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    lines = path.read_text().splitlines()
    lines[-1] = "99 0 1.0 2.0"
    bad = tmp_path / "bad.ff"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="outside"):
        read_farfield(bad)


def test_malformed_data_line(tmp_path, disc_noisy_data):
    path = tmp_path / "data.ff"
    write_farfield(path, disc_noisy_data)
    lines = path.read_text().splitlines()
    lines[-1] = "not a data line"
    bad = tmp_path / "bad.ff"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError):
        read_farfield(bad)


@pytest.fixture(scope="module")
def small_field(disc_exact_data):
    cfg = EsmConfig(
        disc=DiscSpec(1.0, 1.0),
        grid=SamplingGrid(0.0, 6.0, 2.0, 8.0, 0.5),
        reg=RegConfig.fixed(1e-5),
    )
    return indicator_field(cfg, disc_exact_data)


def test_indicator_grid_roundtrip(tmp_path, small_field):
    path = tmp_path / "ind.txt"
    write_indicator_grid(path, small_field)
    grid, values = read_indicator_grid(path)
    assert grid == small_field.grid
    assert np.max(np.abs(values - small_field.normalized)) <= 1e-12


def test_indicator_grid_row_count(tmp_path, paper_cfg, disc_exact_field):
    path = tmp_path / "ind.txt"
    write_indicator_grid(path, disc_exact_field)
    lines = [l for l in path.read_text().splitlines() if l and "=" not in l]
    assert len(lines) == 40401


def test_pgm_shape_and_brightest_pixel(tmp_path, small_field):
    path = tmp_path / "ind.txt"
    pgm = write_indicator_grid(path, small_field)
    blob = pgm.read_bytes()
    header, rest = blob.split(b"\n", 1)
    assert header == b"P5"
    dims, rest = rest.split(b"\n", 1)
    w, h = (int(v) for v in dims.split())
    maxval, pixels = rest.split(b"\n", 1)
    g = small_field.grid
    assert (w, h) == (g.nx, g.ny)
    assert maxval == b"255"
    assert len(pixels) == w * h
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)
    # the indicator minimum is the brightest pixel
    m, n = divmod(small_field.argmin_index, g.ny)
    assert img[g.ny - 1 - n, m] == img.max()


def test_pgm_201x201(tmp_path, disc_exact_field):
    path = tmp_path / "big.txt"
    pgm = write_indicator_grid(path, disc_exact_field)
    blob = pgm.read_bytes()
    assert blob.startswith(b"P5\n201 201\n255\n")
    assert len(blob) == len(b"P5\n201 201\n255\n") + 201 * 201


def test_pgm_row_zero_is_ymax(tmp_path, small_field):
    """Pixels at the top row correspond to the largest y coordinate."""
    path = tmp_path / "ind.txt"
    pgm = write_indicator_grid(path, small_field)
    blob = pgm.read_bytes()
    pixels = blob.split(b"\n", 3)[3]
    g = small_field.grid
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(g.ny, g.nx)
    field = small_field.as_matrix()  # (nx, ny)
    expect_top = np.rint(255.0 * (1.0 - field[:, g.ny - 1])).astype(np.uint8)
    assert np.array_equal(img[0], expect_top)


def test_grid_write_deterministic(tmp_path, small_field):
    p1 = tmp_path / "a.txt"
    p2 = tmp_path / "b.txt"
    g1 = write_indicator_grid(p1, small_field)
    g2 = write_indicator_grid(p2, small_field)
    assert p1.read_bytes() == p2.read_bytes()
    assert g1.read_bytes() == g2.read_bytes()
