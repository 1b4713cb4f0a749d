"""Regenerate src/qugan/datasets/digits_tsne_358.csv.

MNIST itself cannot be fetched in an offline build, so the fixture embeds
scikit-learn's bundled 8x8 handwritten digits (classes 3, 5, 8; 120 images
each) with t-SNE.  Needs scikit-learn; the package itself does not.
"""
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits
from sklearn.manifold import TSNE

CLASSES = (3, 5, 8)
PER_CLASS = 120
OUT = Path(__file__).resolve().parents[1] / "src" / "qugan" / "datasets" / "digits_tsne_358.csv"


def main(out=OUT):
    digits = load_digits()
    rng = np.random.default_rng(0)
    idx = np.concatenate(
        [rng.choice(np.flatnonzero(digits.target == c), PER_CLASS, replace=False) for c in CLASSES]
    )
    idx.sort()
    emb = TSNE(n_components=2, perplexity=30, init="pca", random_state=0).fit_transform(digits.data[idx])
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("x,y,label\n")
        for (x, y), label in zip(emb, digits.target[idx]):
            fh.write(f"{x:.6f},{y:.6f},{label}\n")
    print(f"wrote {len(idx)} rows to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
