import csv
import json

import numpy as np
import pytest

import pipeline
from circuit import deserialize, serialize
from codec_metrics import psnr
from errors import CoefficientOutOfBounds, ImageTooLarge, MalformedGroup, UsageError
from image_io import GrayImage, load_image
from tests.conftest import write_pgm


def test_blank_block_is_prep_only():
    blank = GrayImage.from_rows(np.zeros((8, 8)))
    result = pipeline.encode_image(blank, 8, "mtgsc")
    assert result.stats.n_tcn == 0
    assert result.stats.total_gates == 6 + 2  # prep plus the block-position term
    assert result.stats.gates_per_pixel == pytest.approx(8 / 64)


def test_encode_records_source(smooth_image):
    result = pipeline.encode_image(smooth_image, 16, "scmneqr")
    assert result.circuit.source == (16, 16, 16)
    assert result.circuit.scheme == "scmneqr"
    assert result.stats.n_tcn == len(result.coefficients)


def test_encode_rejects_bad_arguments(smooth_image):
    with pytest.raises(UsageError):
        pipeline.encode_image(smooth_image, 8, "frqi")
    with pytest.raises(ValueError):
        pipeline.encode_image(smooth_image, 0, "mtgsc")
    with pytest.raises(ImageTooLarge):
        pipeline.encode_image(smooth_image, 8, "neqr")


def test_neqr_round_trip():
    img = GrayImage.from_list(2, 2, [0, 100, 200, 255])
    result = pipeline.encode_image(img, 1, "neqr")
    assert pipeline.decode_image(result.circuit) == img


def test_decode_needs_dims_without_source(smooth_image):
    circuit = pipeline.encode_image(smooth_image, 8, "mtgsc").circuit
    from dataclasses import replace

    bare = replace(circuit, source=None)
    with pytest.raises(UsageError):
        pipeline.decode_image(bare)
    assert pipeline.decode_image(bare, (16, 16), 8) == pipeline.decode_image(circuit)


def test_encode_then_decode_files(tmp_path, smooth_image):
    image_path = write_pgm(tmp_path / "smooth.pgm", smooth_image)
    out = tmp_path / "out"
    encoded = pipeline.cmd_encode(image_path, 8, "mtgsc", out)
    circuit_path = encoded["written"]["circuit"]
    assert circuit_path.name == "smooth_mtgsc_q8.json"
    assert deserialize(circuit_path.read_text()).source == (16, 16, 8)
    with open(out / "stats.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0][:3] == ["scheme", "image", "q"]
    assert rows[1][:3] == ["mtgsc", "smooth", "8"]

    decoded = pipeline.cmd_decode(circuit_path, out / "smooth_q8.pgm", original=image_path)
    recon = load_image(out / "smooth_q8.pgm")
    assert decoded["quality"].psnr == psnr(smooth_image, recon).psnr
    with open(out / "quality.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == pipeline.DECODE_COLUMNS
    assert rows[1][0] == "smooth"


def test_decode_without_original_leaves_psnr_empty(tmp_path, smooth_image):
    image_path = write_pgm(tmp_path / "smooth.pgm", smooth_image)
    encoded = pipeline.cmd_encode(image_path, 32, "dctefrqi", tmp_path)
    result = pipeline.cmd_decode(encoded["written"]["circuit"])
    assert result["quality"] is None
    assert result["written"]["image"].name == "smooth_dctefrqi_q32_recon.pgm"
    with open(tmp_path / "quality.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[1][-2:] == ["", ""]


def test_truncated_circuit_is_malformed(tmp_path, smooth_image):
    image_path = write_pgm(tmp_path / "smooth.pgm", smooth_image)
    circuit_path = pipeline.cmd_encode(image_path, 8, "mtgsc", tmp_path)["written"]["circuit"]
    text = circuit_path.read_text()
    circuit_path.write_text(text[: len(text) // 2])
    with pytest.raises(MalformedGroup):
        pipeline.cmd_decode(circuit_path)


def test_decode_rejects_invalid_circuit_file(tmp_path):
    circuit = pipeline.encode_image(GrayImage.from_list(2, 2, [0, 100, 200, 255]), 1, "neqr").circuit
    doc = json.loads(serialize(circuit))
    doc["gates"][-1]["controls"][0] = [-1, "one"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(MalformedGroup, match="control -1 out of range"):
        pipeline.cmd_decode(path)


def test_neqr_decode_smaller_than_encoded():
    img = GrayImage.from_list(2, 2, [0, 100, 200, 255])
    circuit = pipeline.encode_image(img, 1, "neqr").circuit
    with pytest.raises(CoefficientOutOfBounds):
        pipeline.decode_image(circuit, (1, 1), 1)


def test_quirk_link_written(tmp_path):
    img = GrayImage.from_rows(np.full((8, 8), 90))
    image_path = write_pgm(tmp_path / "flat.pgm", img)
    written = pipeline.cmd_encode(image_path, 8, "mtgsc", tmp_path, quirk=True)["written"]
    assert written["quirk"].read_text().startswith("https://algassert.com/quirk#circuit=")


def test_verify_demo_reports_distance(tmp_path):
    result = pipeline.cmd_verify(demo="example_62", out_dir=tmp_path)
    block = result["report"]["blocks"][0]
    assert block["tv_distance"] == pytest.approx(7 / 64)
    assert block["decodes_equal"]
    saved = json.loads(result["written"]["report"].read_text())
    assert saved["name"] == "example_62"
    assert saved["blocks"][0]["qubits"] == 15


def test_verify_corner_and_empty_blocks():
    corner = pipeline.cmd_verify(demo="corner_77")["report"]["blocks"][0]
    assert corner["tv_distance"] == 0
    assert corner["equivalent"]
    empty = pipeline.verify_coefficients([])
    assert empty["blocks"][0]["tv_distance"] == 0
    assert empty["blocks"][0]["equivalent"]


def test_verify_samples_blocks():
    report = pipeline.cmd_verify(demo="deer16", samples=2)["report"]
    assert len(report["blocks"]) == 2
    assert report["all_decodes_equal"]
    everything = pipeline.cmd_verify(demo="deer16", samples=0)["report"]
    assert [b["block"] for b in everything["blocks"]] == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_verify_circuit_file(tmp_path, smooth_image):
    image_path = write_pgm(tmp_path / "smooth.pgm", smooth_image)
    circuit_path = pipeline.cmd_encode(image_path, 70, "scmneqr", tmp_path)["written"]["circuit"]
    report = pipeline.cmd_verify(circuit_path, samples=1)["report"]
    assert report["scheme"] == "scmneqr"
    assert len(report["blocks"]) == 1


def test_verify_arguments():
    with pytest.raises(UsageError):
        pipeline.cmd_verify()
    with pytest.raises(UsageError):
        pipeline.cmd_verify(demo="lena")


def test_sweep_config_validation():
    with pytest.raises(UsageError):
        pipeline.SweepConfig(q_factors=[]).validate()
    with pytest.raises(UsageError):
        pipeline.SweepConfig(q_factors=[0]).validate()
    with pytest.raises(UsageError):
        pipeline.SweepConfig(schemes=["frqi"]).validate()


def _sweep_images(rng):
    return {
        "noise": GrayImage.from_rows(rng.integers(0, 256, size=(16, 24))),
        "flat": GrayImage.from_rows(np.full((16, 16), 77)),
    }


def test_sweep_outputs(tmp_path, rng):
    config = pipeline.SweepConfig(q_factors=[8, 32], output_dir=tmp_path, emit_recon=True, emit_circuits=True)
    outcome = pipeline.cmd_sweep(config, _sweep_images(rng))
    assert len(outcome.records) == 2 * 2 * 3
    assert not outcome.failures
    with open(tmp_path / "sweep.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == pipeline.SWEEP_COLUMNS
    assert len(rows) == 13
    keys = [(r[1], int(r[2]), r[0]) for r in rows[1:]]
    assert keys == sorted(keys)
    assert (tmp_path / "plots" / "noise.dat").read_text().startswith("# scheme dctefrqi\n")
    assert (tmp_path / "recon" / "flat_mtgsc_q8.pgm").is_file()
    assert (tmp_path / "circuits" / "noise_scmneqr_q32.json").is_file()
    assert set(outcome.savings) == {"dctefrqi", "scmneqr"}
    assert outcome.savings["dctefrqi"] > outcome.savings["scmneqr"] > 0
    assert "mean gate saving of mtgsc vs dctefrqi" in (tmp_path / "summary.txt").read_text()


def test_plot_data_has_two_columns_per_series(tmp_path, rng):
    config = pipeline.SweepConfig(q_factors=[8, 32], schemes=["mtgsc", "dctefrqi"], output_dir=tmp_path)
    outcome = pipeline.cmd_sweep(config, _sweep_images(rng))
    series = (tmp_path / "plots" / "noise.dat").read_text().split("\n\n")
    assert len(series) == 2
    lines = series[0].strip().splitlines()
    assert lines[:2] == ["# scheme dctefrqi", "# gates_per_pixel psnr"]
    expected = [r for r in outcome.records if r.image == "noise" and r.scheme == "dctefrqi"]
    rows = [line.split() for line in lines[2:]]
    assert [float(gpp) for gpp, _ in rows] == [pytest.approx(r.stats.gates_per_pixel, abs=1e-6) for r in expected]
    assert all(len(row) == 2 for row in rows)


def test_sweep_schemes_share_psnr(tmp_path, rng):
    outcome = pipeline.cmd_sweep(pipeline.SweepConfig(q_factors=[16], output_dir=tmp_path), _sweep_images(rng))
    noise = [r for r in outcome.records if r.image == "noise"]
    assert len({r.quality.psnr for r in noise}) == 1
    gpp = {r.scheme: r.stats.gates_per_pixel for r in noise}
    assert gpp["mtgsc"] < gpp["scmneqr"] < gpp["dctefrqi"]


def test_sweep_is_independent_of_thread_count(tmp_path, rng):
    images = _sweep_images(rng)
    outputs = []
    for workers in (1, 4):
        out = tmp_path / f"w{workers}"
        pipeline.cmd_sweep(pipeline.SweepConfig(q_factors=[8, 16, 70], output_dir=out, workers=workers), images)
        outputs.append(((out / "sweep.csv").read_bytes(), (out / "plots" / "noise.dat").read_bytes()))
    assert outputs[0] == outputs[1]


def test_sweep_reports_failing_jobs(tmp_path, rng):
    config = pipeline.SweepConfig(q_factors=[8], schemes=["mtgsc", "neqr"], output_dir=tmp_path)
    outcome = pipeline.cmd_sweep(config, _sweep_images(rng))
    assert len(outcome.records) == 2
    assert [label for label, _ in outcome.failures] == ["flat:8:neqr", "noise:8:neqr"]
    assert all("ImageTooLarge" in message for _, message in outcome.failures)


def test_sweep_from_manifest(tmp_path, smooth_image):
    write_pgm(tmp_path / "a.pgm", smooth_image)
    (tmp_path / "manifest.txt").write_text("a a.pgm 16 16\nmissing missing.pgm 8 8\n")
    config = pipeline.SweepConfig(
        q_factors=[8], schemes=["mtgsc"], output_dir=tmp_path / "out", manifest=tmp_path / "manifest.txt",
    )
    outcome = pipeline.cmd_sweep(config)
    assert [r.image for r in outcome.records] == ["a"]
    assert outcome.failures[0][0] == "missing"
    assert "skipped missing" in "\n".join(outcome.summary_lines())
