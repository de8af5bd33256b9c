"""word2vec-style embedding files.

Text: header ``<vocab_size> <dim>`` then ``<word> <dim floats>`` per line.
Binary: same header, then per word ``<word><space>`` followed by ``dim``
little-endian float32 values and a newline.
"""

from __future__ import annotations

import numpy as np

from .objective import EmbeddingModel

_F32 = np.dtype("<f4")


def save_word2vec_format(model: EmbeddingModel, path, binary: bool = False) -> None:
    vecs = model.input_vectors
    n, dim = vecs.shape
    if binary:
        with open(path, "wb") as fh:
            fh.write(f"{n} {dim}\n".encode("utf-8"))
            for word, row in zip(model.words, vecs):
                fh.write(word.encode("utf-8") + b" ")
                fh.write(row.astype(_F32).tobytes())
                fh.write(b"\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{n} {dim}\n")
        for word, row in zip(model.words, vecs):
            fh.write(word + " " + " ".join(f"{x:.8g}" for x in row) + "\n")


def load_word2vec_format(path, binary: bool = False) -> EmbeddingModel:
    """Read input vectors back; context vectors of the result are zero."""
    words = []
    if binary:
        with open(path, "rb") as fh:
            n, dim = map(int, fh.readline().split())
            vecs = np.empty((n, dim))
            for i in range(n):
                chars = bytearray()
                while True:
                    ch = fh.read(1)
                    if ch == b" ":
                        break
                    if not ch:
                        raise ValueError(f"{path}: truncated file")
                    if ch != b"\n":
                        chars += ch
                words.append(chars.decode("utf-8"))
                buf = fh.read(dim * 4)
                if len(buf) != dim * 4:
                    raise ValueError(f"{path}: truncated file")
                vecs[i] = np.frombuffer(buf, dtype=_F32)
    else:
        with open(path, encoding="utf-8") as fh:
            n, dim = map(int, fh.readline().split())
            vecs = np.empty((n, dim))
            for i in range(n):
                parts = fh.readline().rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    raise ValueError(f"{path}: line {i + 2} has {len(parts) - 1} values, expected {dim}")
                words.append(parts[0])
                vecs[i] = [float(x) for x in parts[1:]]
    return EmbeddingModel(words, vecs, np.zeros_like(vecs))
