#!/usr/bin/env python3
"""Build IDX files from the 5000-digit MNIST subset bundled in the mlxtend wheel.

    python scripts/fetch_mnist_subset.py data/

Downloads the wheel with pip (no install), extracts ``mnist_5k.csv.gz`` and
writes ``mnist5k-images-idx3-ubyte.gz`` / ``mnist5k-labels-idx1-ubyte.gz``.
Point a config's ``images_file``/``labels_file`` at the full MNIST files
instead when they are available.
"""
import argparse
import gzip
import io
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

import numpy as np

from delaylearn.dataio import write_idx

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--wheel", type=Path, help="use an already downloaded mlxtend wheel")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel
        if wheel is None:
            subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                            "mlxtend==0.24.0", "-d", tmp], check=True)
            wheel = next(Path(tmp).glob("mlxtend-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            raw = gzip.decompress(zf.read(MEMBER))
    table = np.loadtxt(io.BytesIO(raw), delimiter=",")
    images = table[:, :-1].astype(np.uint8).reshape(-1, 28, 28)
    labels = table[:, -1].astype(np.uint8)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(images, args.out_dir / "mnist5k-images-idx3-ubyte.gz")
    write_idx(labels, args.out_dir / "mnist5k-labels-idx1-ubyte.gz")
    print(f"wrote {len(images)} images to {args.out_dir}")


if __name__ == "__main__":
    main()
