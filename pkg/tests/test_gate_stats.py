from dataclasses import replace

import pytest

from config import DEFAULT_CONFIGS
from encoders import NEQR_EXAMPLE, WORKED_EXAMPLES, SparseCoefficient, build_dctefrqi, build_mtgsc, build_neqr, build_scmneqr
from errors import InvalidCircuit, MissingGroupMetadata, NotPowerOfTwo
from gate_stats import (
    STATS_COLUMNS,
    block_connections,
    block_position_term,
    complexity_bound,
    count_gates,
    gate_saving,
    jpeg_bpp_proxy,
)
from pipeline import quantized_coefficients


def test_scmneqr_terms_for_reset_example():
    stats = count_gates(build_scmneqr(WORKED_EXAMPLES["scmfrqi"]), (64, 64))
    assert (stats.n_tcn, stats.b_t, stats.b_rg, stats.b_z, stats.b_s0) == (5, 35, 5, 0, 40)
    assert (stats.q_o, stats.s_bit, stats.a_bit) == (10, 0, 5)


def test_mtgsc_discards_zero_controls():
    stats = count_gates(build_mtgsc(WORKED_EXAMPLES["scmfrqi"]), (64, 64))
    assert (stats.b_t, stats.b_z, stats.b_s0) == (35, 25, 15)
    assert stats.prep_gates == 6
    assert stats.bpe == 384
    assert stats.total_gates == 10 + 0 + 15 + 5 + 6 + 384
    assert stats.gates_per_pixel == pytest.approx(stats.total_gates / 4096)


def test_dctefrqi_counts_second_trigger():
    stats = count_gates(build_dctefrqi(WORKED_EXAMPLES["scmfrqi"]), (64, 64))
    assert (stats.b_t, stats.b_rg, stats.b_z, stats.b_s0) == (65, 0, 0, 65)


def test_single_coefficient_example():
    stats = count_gates(build_mtgsc(WORKED_EXAMPLES["example_62"]), (8, 8))
    assert (stats.n_tcn, stats.q_o, stats.b_z) == (1, 5, 3)
    corner = count_gates(build_mtgsc(WORKED_EXAMPLES["corner_77"]), (8, 8))
    assert corner.b_z == 0


def test_sign_gates_counted_separately():
    coeffs = [SparseCoefficient(0, 0, 1, 2, 5, -1), SparseCoefficient(0, 0, 3, 3, 2, -1)]
    stats = count_gates(build_mtgsc(coeffs), (8, 8))
    assert (stats.q_o, stats.s_bit) == (3, 2)


def test_neqr_counts():
    stats = count_gates(build_neqr(NEQR_EXAMPLE), (2, 2))
    assert (stats.q_o, stats.b_t, stats.a_bit, stats.bpe) == (14, 28, 0, 0)
    assert (stats.prep_gates, stats.total_gates) == (2, 44)
    assert stats.gates_per_pixel == 11


@pytest.mark.parametrize("dims, bpe", [((8, 8), 2), ((64, 64), 384), ((512, 512), 49152), ((20, 9), 6 * 3)])
def test_block_position_term(dims, bpe):
    assert block_position_term(*dims) == bpe


def test_scheme_mismatch_and_missing_metadata():
    circuit = build_mtgsc(WORKED_EXAMPLES["example_62"])
    with pytest.raises(InvalidCircuit):
        count_gates(circuit, (8, 8), scheme="scmneqr")
    with pytest.raises(MissingGroupMetadata):
        count_gates(replace(circuit, groups=()), (8, 8))


def test_csv_row_matches_columns():
    stats = count_gates(build_mtgsc(WORKED_EXAMPLES["example_62"]), (8, 8))
    row = stats.csv_row("demo", 8)
    assert len(row) == len(STATS_COLUMNS)
    assert row[:3] == ["mtgsc", "demo", "8"]


@pytest.mark.parametrize("args, expected", [((5, 8, 8), 341), ((1, 2, 2), 9), ((0, 8, 8), 6)])
def test_complexity_bound(args, expected):
    assert complexity_bound(*args) == expected


def test_complexity_bound_rejects_bad_arguments():
    with pytest.raises(ValueError):
        complexity_bound(-1, 8, 8)
    with pytest.raises(NotPowerOfTwo):
        complexity_bound(1, 6, 8)


def test_block_connections_within_bound(rng):
    from image_io import GrayImage

    for _ in range(20):
        img = GrayImage.from_rows(rng.integers(0, 256, size=(64, 64)))
        circuit = build_mtgsc(quantized_coefficients(img, int(rng.choice([8, 16, 32, 36, 70]))))
        for n, connections in block_connections(circuit).values():
            assert connections <= complexity_bound(n, 8, 8)
            # at most 7 trigger lines, 8 bits, a sign, the aux fan-in and the reset
            assert connections <= 18 * n


DEFAULT_Q = DEFAULT_CONFIGS["Q_FACTORS"]


def _gates_per_pixel(img, q):
    coeffs = quantized_coefficients(img, q)
    dims = (img.width, img.height)
    return {
        builder.__name__.removeprefix("build_"): count_gates(builder(coeffs), dims).gates_per_pixel
        for builder in (build_mtgsc, build_scmneqr, build_dctefrqi)
    }


@pytest.mark.parametrize("q", DEFAULT_Q)
@pytest.mark.parametrize("image", ["noise_image", "smooth_image"])
def test_scheme_ordering_at_every_q(request, image, q):
    gpp = _gates_per_pixel(request.getfixturevalue(image), q)
    assert gpp["mtgsc"] < gpp["scmneqr"] < gpp["dctefrqi"]


def test_gates_per_pixel_fall_with_q(noise_image):
    series = [_gates_per_pixel(noise_image, q) for q in DEFAULT_Q]
    for scheme in ("mtgsc", "scmneqr", "dctefrqi"):
        values = [gpp[scheme] for gpp in series]
        assert values == sorted(values, reverse=True)


def test_scheme_ordering_and_saving(noise_image):
    coeffs = quantized_coefficients(noise_image, 8)
    dims = (64, 64)
    mtgsc = count_gates(build_mtgsc(coeffs), dims)
    scmneqr = count_gates(build_scmneqr(coeffs), dims)
    dctefrqi = count_gates(build_dctefrqi(coeffs), dims)
    assert gate_saving(mtgsc, dctefrqi) >= 30
    assert 0 < gate_saving(mtgsc, scmneqr) < gate_saving(mtgsc, dctefrqi)


def test_nonzero_count_falls_with_q(noise_image):
    counts = [len(quantized_coefficients(noise_image, q)) for q in (8, 16, 32, 36, 70)]
    assert counts == sorted(counts, reverse=True)


def test_jpeg_bpp_proxy():
    coeffs = [SparseCoefficient(0, 0, 3, 2, 62), SparseCoefficient(0, 0, 0, 0, 1, -1)]
    assert jpeg_bpp_proxy(coeffs, 64) == pytest.approx((7 + 2) / 64)
