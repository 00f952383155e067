"""Handwritten-digit ingestion: IDX containers, 28x28 -> 10x10 pooling, splits."""
import gzip
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, FormatError

DATA_ENV = "DELAYLEARN_DATA"
IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
GRID = 10
SIDE = 28

# IDX type byte -> numpy big-endian dtype
_IDX_TYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
_IDX_CODES = {v: k for k, v in _IDX_TYPES.items()}


def _open_bytes(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing data file: {path}")
    raw = path.read_bytes()
    if path.suffix == ".gz":
        raw = gzip.decompress(raw)
    return raw


def parse_idx(raw, expected_magic=None):
    """Decode an IDX byte string into a numpy array."""
    if len(raw) < 4:
        raise FormatError("truncated at offset 0: no IDX magic number")
    magic = struct.unpack(">I", raw[:4])[0]
    zero, type_code, ndim = magic >> 16, (magic >> 8) & 0xFF, magic & 0xFF
    if zero != 0 or type_code not in _IDX_TYPES or ndim == 0:
        raise FormatError(f"bad magic number {magic} at offset 0")
    if expected_magic is not None and magic != expected_magic:
        raise FormatError(f"bad magic number {magic} at offset 0, expected {expected_magic}")
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise FormatError(f"truncated at offset {len(raw)}: header needs {header} bytes")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    dtype = _IDX_TYPES[type_code]
    item = int(np.prod(dims[1:], dtype=np.int64)) * dtype.itemsize
    body = len(raw) - header
    if body < dims[0] * item:
        complete = body // item if item else 0
        raise FormatError(f"truncated at item {complete} (offset {header + complete * item})")
    data = np.frombuffer(raw, dtype=dtype, count=int(np.prod(dims, dtype=np.int64)), offset=header)
    return data.reshape(dims).astype(dtype.newbyteorder("="))


def format_idx(array):
    array = np.asarray(array)
    dtype = array.dtype.newbyteorder(">")
    if dtype not in _IDX_CODES:
        raise ValueError(f"dtype {array.dtype} has no IDX encoding")
    magic = (_IDX_CODES[dtype] << 8) | array.ndim
    header = struct.pack(f">I{array.ndim}I", magic, *array.shape)
    return header + array.astype(dtype).tobytes()


def write_idx(array, path):
    data = format_idx(array)
    path = Path(path)
    if path.suffix == ".gz":
        data = gzip.compress(data, mtime=0)
    path.write_bytes(data)


def read_images(path):
    """All images of an IDX image file as a ``(n, 28, 28)`` uint8 array."""
    images = parse_idx(_open_bytes(path), IMAGE_MAGIC)
    if images.shape[1:] != (SIDE, SIDE):
        raise FormatError(f"dimension mismatch at offset 8: images are {images.shape[1:]}, expected 28x28")
    return images


def read_labels(path):
    labels = parse_idx(_open_bytes(path), LABEL_MAGIC)
    if labels.ndim != 1:
        raise FormatError(f"dimension mismatch at offset 4: labels have {labels.ndim} dimensions")
    return labels


def _pool_matrix(n_in=SIDE, n_out=GRID):
    """Integer coverage weights and their per-cell total.

    Work in units of 1/gcd so every boundary is an integer: with 28 -> 10,
    input pixels are 5 units wide and output cells 14.
    """
    g = np.gcd(n_in, n_out)
    w_in, w_out = n_out // g, n_in // g
    m = np.zeros((n_out, n_in))
    for r in range(n_out):
        lo, hi = r * w_out, (r + 1) * w_out
        for i in range(n_in):
            m[r, i] = max(0, min(hi, (i + 1) * w_in) - max(lo, i * w_in))
    return m, w_out


_POOL, _CELL = _pool_matrix()


def downscale(image):
    """Area-average a 28x28 intensity image onto a 10x10 grid scaled to [0, 1]."""
    image = np.asarray(image, dtype=np.float64)
    if image.shape != (SIDE, SIDE):
        raise ValueError(f"expected a 28x28 image, got {image.shape}")
    # integer weights keep the sums exact for 8-bit input; one division at the end
    out = (_POOL @ image @ _POOL.T) / (_CELL * _CELL * 255.0)
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class Instance:
    pixels: np.ndarray  # 10x10, values in [0, 1]
    label: int
    index: int = -1  # position in the source file


@dataclass(frozen=True)
class SplitSpec:
    trained: tuple = (0, 1)
    unseen: tuple = (2,)
    train_count: int = 20
    test_count: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.train_count < 0 or self.test_count <= 0:
            raise ConfigError("train count must be >= 0 and test count > 0")
        if set(self.trained) & set(self.unseen):
            raise ConfigError("a digit cannot be both trained and unseen")


def build_split(images, labels, spec):
    """Seeded per-class train/test selection.

    Each class's indices are shuffled with a generator seeded by
    ``(spec.seed, class)``; trained classes take the first ``train_count``
    for training and the next ``test_count`` for testing, unseen classes
    take ``test_count`` test instances only.
    """
    labels = np.asarray(labels)
    train, test = [], []
    for cls, n_train in [(c, spec.train_count) for c in spec.trained] + [(c, 0) for c in spec.unseen]:
        idx = np.nonzero(labels == cls)[0]
        need = n_train + spec.test_count
        if len(idx) < need:
            raise ConfigError(f"class {cls} has {len(idx)} instances, {need} needed")
        order = np.random.default_rng([spec.seed, int(cls)]).permutation(idx)
        train += [Instance(downscale(images[i]), int(cls), int(i)) for i in order[:n_train]]
        test += [Instance(downscale(images[i]), int(cls), int(i)) for i in order[n_train:need]]
    return train, test


@dataclass
class Dataset:
    images: np.ndarray
    labels: np.ndarray
    source: Path = field(default=None)


def resolve_data_dir(data_dir=None):
    if data_dir is None:
        data_dir = os.environ.get(DATA_ENV)
    if data_dir is None:
        raise DataError(f"no data directory given and {DATA_ENV} is not set")
    path = Path(data_dir)
    if not path.is_dir():
        raise DataError(f"data directory not found: {path}")
    return path


def load_dataset(data_dir=None, images_file="train-images-idx3-ubyte",
                 labels_file="train-labels-idx1-ubyte"):
    root = resolve_data_dir(data_dir)
    images = read_images(root / images_file)
    labels = read_labels(root / labels_file)
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    return Dataset(images, labels, root)
