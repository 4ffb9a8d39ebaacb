# image_io.py

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from config import DEFAULT_CONFIGS
from errors import CorruptHeader, ImageNotFound, IoFailure, ManifestError, UnsupportedFormat
from utils import dataset_dir

logger = logging.getLogger(__name__)

BLOCK = DEFAULT_CONFIGS["BLOCK_SIZE"]
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit luminance raster; pixels is a (height, width) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        pixels = np.asarray(self.pixels)
        if pixels.size != self.width * self.height:
            raise ValueError(
                f"expected {self.width * self.height} pixels, got {pixels.size}"
            )
        if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
            raise ValueError("pixel values must lie in [0, 255]")
        pixels = pixels.reshape(self.height, self.width).astype(np.uint8)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_rows(cls, rows) -> "GrayImage":
        array = np.asarray(rows)
        return cls(width=array.shape[1], height=array.shape[0], pixels=array)

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "GrayImage":
        return cls(width=width, height=height, pixels=np.asarray(values))

    @property
    def size(self) -> int:
        return self.width * self.height

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: str
    expected_width: int
    expected_height: int


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    root: Path

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def get(self, name: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise ManifestError(f"no manifest entry named {name!r}")

    def resolve(self, entry: ManifestEntry) -> Path:
        path = Path(entry.path)
        return path if path.is_absolute() else self.root / path

    def available(self) -> list[ManifestEntry]:
        return [e for e in self.entries if self.resolve(e).is_file()]

    def select(self, names: list[str] | None) -> list[ManifestEntry]:
        if not names:
            return list(self.entries)
        return [self.get(name) for name in names]


# -- Loading --


def load_image(path: str | Path) -> GrayImage:
    """
    Loads a grayscale raster from a PGM (P2/P5) or PNG file.

    RGB(A) and palette PNGs are converted with the integer BT.601 luma
    Y = round(0.299R + 0.587G + 0.114B).
    """
    path = Path(path)
    if not path.is_file():
        raise ImageNotFound(f"image not found: {path}")
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}")

    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data, path)
    if data.startswith(PNG_MAGIC):
        return _load_png(path)
    raise UnsupportedFormat(f"{path}: not a PGM (P2/P5) or PNG file")


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Reads count header tokens, skipping '#' comments; returns them and the raster offset."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            break
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from a binary raster
    return tokens, pos + 1


def _parse_pgm(data: bytes, path: Path) -> GrayImage:
    tokens, offset = _pgm_tokens(data, 4)
    if len(tokens) < 4:
        raise CorruptHeader(f"{path}: truncated PGM header")
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise CorruptHeader(f"{path}: non-numeric PGM header field")
    if width <= 0 or height <= 0:
        raise CorruptHeader(f"{path}: invalid dimensions {width}x{height}")
    if not 0 < maxval < 65536:
        raise CorruptHeader(f"{path}: invalid maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormat(f"{path}: 16-bit PGM is not supported")

    count = width * height
    if magic == b"P5":
        raster = data[offset:offset + count]
        if len(raster) < count:
            raise CorruptHeader(f"{path}: raster truncated ({len(raster)} of {count} bytes)")
        values = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
    else:
        fields = data[offset - 1:].split()
        if len(fields) < count:
            raise CorruptHeader(f"{path}: raster truncated ({len(fields)} of {count} values)")
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise CorruptHeader(f"{path}: non-numeric sample in ASCII raster")

    if values.max(initial=0) > maxval:
        raise CorruptHeader(f"{path}: sample exceeds maxval {maxval}")
    if maxval != 255:
        values = (values * 255 * 2 + maxval) // (2 * maxval)
    return GrayImage(width=width, height=height, pixels=values)


def _load_png(path: Path) -> GrayImage:
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I", "I;16", "I;16B", "F"):
                raise UnsupportedFormat(f"{path}: {mode} PNG depth is not supported")
            if mode in ("L", "LA"):
                gray = np.asarray(im.getchannel(0), dtype=np.int64)
            elif mode == "1":
                gray = np.asarray(im.convert("L"), dtype=np.int64)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.int64)
                gray = luma(rgb)
    except UnidentifiedImageError:
        raise CorruptHeader(f"{path}: unreadable PNG")
    except OSError as e:
        raise CorruptHeader(f"{path}: {e}")
    return GrayImage.from_rows(gray)


def luma(rgb: np.ndarray) -> np.ndarray:
    """Integer BT.601 luma, rounded half up."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    return (299 * r + 587 * g + 114 * b + 500) // 1000


# -- Saving --


def save_image(img: GrayImage, path: str | Path) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".pgm", ".png"):
        raise UnsupportedFormat(f"cannot write {suffix or 'extensionless'} files, use .pgm or .png")
    try:
        if suffix == ".pgm":
            header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
            with open(path, "wb") as f:
                f.write(header)
                f.write(img.pixels.tobytes())
        else:
            Image.fromarray(np.ascontiguousarray(img.pixels)).save(path, format="PNG")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}")


# -- Padding --


def padded_dims(width: int, height: int, block: int = BLOCK) -> tuple[int, int]:
    return -(-width // block) * block, -(-height // block) * block


def pad_to_block_multiple(img: GrayImage, block: int = BLOCK) -> GrayImage:
    """Grows the raster to block multiples by replicating the last row/column."""
    width, height = padded_dims(img.width, img.height, block)
    if (width, height) == (img.width, img.height):
        return img
    padded = np.pad(
        img.pixels,
        ((0, height - img.height), (0, width - img.width)),
        mode="edge",
    )
    return GrayImage(width=width, height=height, pixels=padded)


def crop(img: GrayImage, width: int, height: int) -> GrayImage:
    if (width, height) == (img.width, img.height):
        return img
    return GrayImage(width=width, height=height, pixels=img.pixels[:height, :width])


# -- Dataset manifest --


def load_manifest(path: str | Path | None = None, root: str | Path | None = None) -> DatasetManifest:
    """
    Parses a manifest table: one `name path width height` row per line.

    Relative image paths resolve against root, which defaults to the
    directory named by QIC_DATASET_DIR (or the configured dataset dir).
    """
    root = Path(root) if root is not None else dataset_dir()
    path = Path(path) if path is not None else root / DEFAULT_CONFIGS["MANIFEST"]
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}")

    entries = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ManifestError(f"{path}:{lineno}: expected 'name path width height'")
        name, image_path, width, height = fields
        if name in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate image name {name!r}")
        seen.add(name)
        try:
            entries.append(ManifestEntry(name, image_path, int(width), int(height)))
        except ValueError:
            raise ManifestError(f"{path}:{lineno}: width and height must be integers")
    return DatasetManifest(entries=tuple(entries), root=root)


def load_manifest_image(manifest: DatasetManifest, entry: ManifestEntry) -> GrayImage:
    img = load_image(manifest.resolve(entry))
    if (img.width, img.height) != (entry.expected_width, entry.expected_height):
        logger.warning(
            "%s is %dx%d, manifest expects %dx%d",
            entry.name, img.width, img.height, entry.expected_width, entry.expected_height,
        )
    return img
