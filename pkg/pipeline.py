# pipeline.py

"""
Command handlers behind app.py: encode, decode, verify and the benchmark
sweep. Handlers raise QicError subclasses and return what they wrote; the
CLI decides exit codes and what to print.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from circuit import Circuit, deserialize, quirk_url, serialize, validate
from codec_metrics import QUALITY_COLUMNS, QualityReport, decode_circuit, psnr, reconstruct
from config import DEFAULT_CONFIGS
from encoders import (
    BUILDERS,
    WORKED_EXAMPLES,
    SparseCoefficient,
    build,
    build_mtgsc,
    build_neqr,
    build_scmneqr,
    register_for,
    sparsify,
)
from errors import CoefficientOutOfBounds, InvalidCircuit, MalformedGroup, TooManyQubits, UsageError
from gate_stats import STATS_COLUMNS, GateStats, count_gates, gate_saving, jpeg_bpp_proxy
from image_io import GrayImage, load_image, load_manifest, load_manifest_image, pad_to_block_multiple, save_image
from simulator import compare_circuits
from sweep_worker import SweepJob, run_jobs
from transform import check_q, quantize_pixels

logger = logging.getLogger(__name__)

ALL_SCHEMES = tuple(BUILDERS) + ("neqr",)
SWEEP_COLUMNS = STATS_COLUMNS + QUALITY_COLUMNS + ["jpeg_bpp_proxy"]
DECODE_COLUMNS = ["image", "scheme", "q"] + QUALITY_COLUMNS


# -- Encode / decode --


@dataclass(frozen=True)
class EncodeResult:
    image: GrayImage
    circuit: Circuit
    stats: GateStats
    coefficients: tuple[SparseCoefficient, ...]


def check_scheme(scheme: str) -> str:
    if scheme not in ALL_SCHEMES:
        raise UsageError(f"unknown scheme {scheme!r}, expected one of {', '.join(ALL_SCHEMES)}")
    return scheme


def quantized_coefficients(img: GrayImage, q: int, level_shift: bool = False) -> list[SparseCoefficient]:
    """Pads, transforms and quantizes an image into its sparse coefficient list."""
    padded = pad_to_block_multiple(img)
    return sparsify(quantize_pixels(padded.pixels, q, level_shift))


def encode_image(img: GrayImage, q: int, scheme: str, level_shift: bool = False, coeffs=None) -> EncodeResult:
    q = check_q(q)
    check_scheme(scheme)
    source = (img.width, img.height, q)
    if scheme == "neqr":
        circuit = build_neqr(img, source=source)
        coeffs = ()
    else:
        if coeffs is None:
            coeffs = quantized_coefficients(img, q, level_shift)
        circuit = build(scheme, coeffs, source=source)
    stats = count_gates(circuit, (img.width, img.height))
    return EncodeResult(img, circuit, stats, tuple(coeffs))


def decode_image(circuit: Circuit, dims=None, q=None, level_shift: bool = False) -> GrayImage:
    """
    Rebuilds the image a circuit encodes. dims and q default to the
    circuit's source record.
    """
    if circuit.source is not None:
        width, height, source_q = circuit.source
        dims = dims or (width, height)
        q = q or source_q
    if dims is None or q is None:
        raise UsageError("circuit carries no source record; pass the image dimensions and Q")
    coeffs = decode_circuit(circuit)
    if circuit.scheme == "neqr":
        width, height = dims
        pixels = np.zeros((height, width), dtype=np.int64)
        for c in coeffs:
            if c.x >= width or c.y >= height:
                raise CoefficientOutOfBounds(f"pixel ({c.x},{c.y}) lies outside a {width}x{height} image")
            pixels[c.y, c.x] = c.magnitude
        return GrayImage(width=width, height=height, pixels=pixels)
    return reconstruct(coeffs, dims, q, level_shift)


def read_circuit(path: str | Path) -> Circuit:
    """Loads a circuit file and rejects it unless it passes validation."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        circuit = deserialize(text)
    except InvalidCircuit as e:
        raise MalformedGroup(f"{path}: {e}")
    report = validate(circuit)
    if not report.ok:
        raise MalformedGroup(f"{path}: " + "; ".join(report.violations))
    return circuit


def append_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    new = not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        if new:
            writer.writerow(header)
        writer.writerows(rows)


def cmd_encode(image_path, q: int, scheme: str, out_dir, level_shift: bool = False, quirk: bool = False) -> dict:
    img = load_image(image_path)
    if level_shift:
        logger.warning("level shift is on; gate counts will not match the unshifted reference numbers")
    result = encode_image(img, q, scheme, level_shift)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{Path(image_path).stem}_{scheme}_q{q}"

    circuit_path = out_dir / f"{stem}.json"
    circuit_path.write_text(serialize(result.circuit), encoding="utf-8")
    stats_path = out_dir / "stats.csv"
    append_csv(stats_path, STATS_COLUMNS, [result.stats.csv_row(Path(image_path).stem, q)])
    written = {"circuit": circuit_path, "stats": stats_path}

    if quirk:
        try:
            url_path = out_dir / f"{stem}.quirk.txt"
            url_path.write_text(quirk_url(result.circuit) + "\n", encoding="utf-8")
            written["quirk"] = url_path
        except TooManyQubits as e:
            logger.warning("no visual export for %s: %s", stem, e)
        if len({(c.block_row, c.block_col) for c in result.coefficients}) > 1:
            logger.warning("%s spans several blocks; the visual export shows them on one register", stem)
    return {"written": written, "stats": result.stats}


def cmd_decode(circuit_path, out_path=None, dims=None, q=None, original=None, level_shift: bool = False) -> dict:
    circuit_path = Path(circuit_path)
    circuit = read_circuit(circuit_path)
    img = decode_image(circuit, dims, q, level_shift)
    if out_path is None:
        out_path = circuit_path.with_name(f"{circuit_path.stem}_recon.pgm")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_image(img, out_path)

    q = q or (circuit.source[2] if circuit.source else 0)
    report = None
    row = [circuit_path.stem, circuit.scheme, str(q), "", ""]
    if original is not None:
        report = psnr(load_image(original), img, Path(original).stem, circuit.scheme, q)
        row = [report.image_name, report.scheme, str(q)] + report.csv_row()
    quality_path = out_path.parent / "quality.csv"
    append_csv(quality_path, DECODE_COLUMNS, [row])
    return {"written": {"image": out_path, "quality": quality_path}, "quality": report}


# -- Verify --


def _local(coeffs) -> list[SparseCoefficient]:
    return [SparseCoefficient(0, 0, c.x, c.y, c.magnitude, c.sign) for c in coeffs]


def verify_block(coeffs) -> dict:
    """
    Runs the full-control and modified circuits of one block side by side
    and compares their output distributions and classical decodes.
    """
    local = _local(coeffs)
    reg = register_for(local)
    limit = DEFAULT_CONFIGS["SIM_MAX_QUBITS"]
    if reg.total > limit:
        raise TooManyQubits(f"block register needs {reg.total} qubits, simulator limit is {limit}")
    full = build_scmneqr(local, reg)
    modified = build_mtgsc(local, reg)
    report = compare_circuits(full, modified)
    entry = {"coefficients": len(local), "qubits": reg.total}
    entry.update(report.to_dict())
    del entry["subset"]
    entry["decodes_equal"] = decode_circuit(full) == decode_circuit(modified)
    return entry


def sample_blocks(keys, count: int, seed: int = 0) -> list:
    keys = sorted(keys)
    if count <= 0 or len(keys) <= count:
        return keys
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(keys), size=count, replace=False)
    return [keys[i] for i in sorted(picked)]


def verify_coefficients(coeffs, samples: int | None = None, seed: int = 0) -> dict:
    if samples is None:
        samples = DEFAULT_CONFIGS["VERIFY_SAMPLE_BLOCKS"]
    by_block: dict[tuple[int, int], list[SparseCoefficient]] = {}
    for c in coeffs:
        by_block.setdefault((c.block_row, c.block_col), []).append(c)
    if not by_block:
        by_block[(0, 0)] = []

    blocks, skipped = [], []
    for key in sample_blocks(by_block, samples, seed):
        try:
            entry = verify_block(by_block[key])
        except TooManyQubits as e:
            logger.warning("skipping block %s: %s", key, e)
            skipped.append({"block": list(key), "reason": str(e)})
            continue
        blocks.append({"block": list(key), **entry})
    return {
        "blocks": blocks,
        "skipped": skipped,
        "all_decodes_equal": all(b["decodes_equal"] for b in blocks),
    }


def cmd_verify(circuit_path=None, demo: str | None = None, out_dir=None, samples: int | None = None) -> dict:
    if (circuit_path is None) == (demo is None):
        raise UsageError("verify takes either a circuit file or --demo NAME")
    if demo is not None:
        if demo not in WORKED_EXAMPLES:
            raise UsageError(f"unknown demo {demo!r}, expected one of {', '.join(WORKED_EXAMPLES)}")
        name, scheme, coeffs = demo, "mtgsc", WORKED_EXAMPLES[demo]
    else:
        circuit = read_circuit(circuit_path)
        if circuit.register.aux_qubit is None:
            raise UsageError("verify compares block-scheme circuits; this circuit has no auxiliary qubit")
        name, scheme, coeffs = Path(circuit_path).stem, circuit.scheme, decode_circuit(circuit)

    report = {"name": name, "scheme": scheme}
    report.update(verify_coefficients(coeffs, samples))
    written = {}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{name}_verify.json"
        path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        written["report"] = path
    return {"written": written, "report": report}


# -- Sweep --


@dataclass
class SweepConfig:
    images: list[str] = field(default_factory=list)  # empty: every manifest image
    q_factors: list[int] = field(default_factory=lambda: list(DEFAULT_CONFIGS["Q_FACTORS"]))
    schemes: list[str] = field(default_factory=lambda: list(DEFAULT_CONFIGS["SCHEMES"]))
    output_dir: Path = Path(DEFAULT_CONFIGS["OUTPUT_DIR"])
    manifest: Path | None = None
    level_shift: bool = DEFAULT_CONFIGS["LEVEL_SHIFT"]
    emit_circuits: bool = DEFAULT_CONFIGS["EMIT_CIRCUITS"]
    emit_recon: bool = DEFAULT_CONFIGS["EMIT_RECON"]
    jpeg_proxy: bool = DEFAULT_CONFIGS["JPEG_PROXY"]
    workers: int = DEFAULT_CONFIGS["WORKERS"]

    def validate(self) -> "SweepConfig":
        if not self.q_factors:
            raise UsageError("at least one quantization factor is required")
        for q in self.q_factors:
            if isinstance(q, bool) or not isinstance(q, int) or q < 1:
                raise UsageError(f"quantization factors must be positive integers, got {q!r}")
        if not self.schemes:
            raise UsageError("at least one scheme is required")
        for scheme in self.schemes:
            check_scheme(scheme)
        if self.workers < 0:
            raise UsageError("workers must be zero (automatic) or positive")
        return self


@dataclass(frozen=True)
class SweepRecord:
    image: str
    q: int
    scheme: str
    stats: GateStats
    quality: QualityReport
    jpeg_proxy: float | None

    @property
    def sort_key(self) -> tuple:
        return self.image, self.q, self.scheme

    def csv_row(self) -> list[str]:
        proxy = "" if self.jpeg_proxy is None else f"{self.jpeg_proxy:.6f}"
        return self.stats.csv_row(self.image, self.q) + self.quality.csv_row() + [proxy]


@dataclass
class SweepOutcome:
    records: list[SweepRecord]
    failures: list[tuple[str, str]]
    savings: dict[str, float]
    written: dict[str, Path]

    def summary_lines(self) -> list[str]:
        lines = [
            f"mean gate saving of mtgsc vs {baseline}: {value:.2f}%"
            for baseline, value in self.savings.items()
        ]
        for label, message in self.failures:
            lines.append(f"skipped {label}: {message}")
        return lines


def sweep_job(name: str, img: GrayImage, q: int, scheme: str, config: SweepConfig) -> list[SweepRecord]:
    """Encode, decode and score one (image, Q, scheme) point."""
    proxy = None
    coeffs = None
    if scheme != "neqr":
        coeffs = quantized_coefficients(img, q, config.level_shift)
        if config.jpeg_proxy:
            proxy = jpeg_bpp_proxy(coeffs, img.size)
    result = encode_image(img, q, scheme, config.level_shift, coeffs=coeffs)
    recon = decode_image(result.circuit, level_shift=config.level_shift)
    quality = psnr(img, recon, name, scheme, q)
    stem = f"{name}_{scheme}_q{q}"
    out_dir = Path(config.output_dir)
    if config.emit_circuits:
        path = out_dir / "circuits" / f"{stem}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize(result.circuit), encoding="utf-8")
    if config.emit_recon:
        path = out_dir / "recon" / f"{stem}.pgm"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_image(recon, path)
    return [SweepRecord(name, q, scheme, result.stats, quality, proxy)]


def mean_savings(records: list[SweepRecord]) -> dict[str, float]:
    by_point: dict[tuple[str, int], dict[str, GateStats]] = {}
    for r in records:
        by_point.setdefault((r.image, r.q), {})[r.scheme] = r.stats
    savings = {}
    for baseline in ("dctefrqi", "scmneqr"):
        values = [
            gate_saving(point["mtgsc"], point[baseline])
            for point in by_point.values()
            if "mtgsc" in point and baseline in point
        ]
        if values:
            savings[baseline] = float(np.mean(values))
    return savings


def write_plot_data(records: list[SweepRecord], out_dir: Path) -> list[Path]:
    """
    One whitespace-separated file per image: a '# scheme NAME' header,
    then 'gates_per_pixel psnr' rows in ascending Q, with a blank line
    between series.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    by_image: dict[str, dict[str, list[SweepRecord]]] = {}
    for r in records:
        by_image.setdefault(r.image, {}).setdefault(r.scheme, []).append(r)
    paths = []
    for image, series in sorted(by_image.items()):
        lines = []
        for scheme, rows in sorted(series.items()):
            if lines:
                lines.append("")
            lines.append(f"# scheme {scheme}")
            lines.append("# gates_per_pixel psnr")
            for r in sorted(rows, key=lambda r: r.q):
                lines.append(f"{r.stats.gates_per_pixel:.6f} {r.quality.csv_row()[1]}")
        path = out_dir / f"{image}.dat"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def load_sweep_images(config: SweepConfig) -> tuple[dict[str, GrayImage], list[tuple[str, str]]]:
    if config.manifest:
        manifest = load_manifest(config.manifest, root=Path(config.manifest).parent)
    else:
        manifest = load_manifest()
    images, failures = {}, []
    for entry in manifest.select(config.images):
        try:
            images[entry.name] = load_manifest_image(manifest, entry)
        except Exception as e:
            logger.warning("skipping image %s: %s", entry.name, e)
            failures.append((entry.name, f"{type(e).__name__}: {e}"))
    return images, failures


def cmd_sweep(config: SweepConfig, images: dict[str, GrayImage] | None = None) -> SweepOutcome:
    """
    Runs every (image, Q, scheme) combination. images overrides the manifest
    lookup; a failing (image, Q, scheme) job is reported, not fatal.
    """
    config.validate()
    if config.level_shift:
        logger.warning("level shift is on; gate counts will not match the unshifted reference numbers")
    failures = []
    if images is None:
        images, failures = load_sweep_images(config)

    jobs = [
        SweepJob((name, q, scheme), sweep_job, name, img, q, scheme, config)
        for name, img in sorted(images.items())
        for q in config.q_factors
        for scheme in config.schemes
    ]
    sink = run_jobs(jobs, config.workers)
    records = sink.records()
    failures = sorted(failures + sink.failures())

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(r.csv_row() for r in records)
    plot_paths = write_plot_data(records, out_dir / "plots")

    outcome = SweepOutcome(records, failures, mean_savings(records), {"csv": csv_path})
    summary_path = out_dir / "summary.txt"
    summary_path.write_text("\n".join(outcome.summary_lines()) + "\n", encoding="utf-8")
    outcome.written["summary"] = summary_path
    for path in plot_paths:
        outcome.written[f"plot:{path.stem}"] = path
    return outcome

