"""Sentence encoders behind one tiny interface: ``.dim`` and ``.encode``.

The default is a MiniLM-class pretrained sentence encoder resolved via
sentence-transformers. ``hash:<dim>`` selects a deterministic,
dependency-free feature-hashing encoder instead -- useful offline and in
tests, where bit-for-bit reproducibility matters more than semantics.
"""
import hashlib

import numpy as np

from .errors import EncoderError

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


class HashEncoder:
    """Deterministic embedding: each token hashes to a fixed Gaussian
    direction; a text is the L2-normalized sum over its tokens."""

    def __init__(self, dim: int):
        if dim < 1:
            raise EncoderError(f"hash encoder dim must be >= 1, got {dim}")
        self.dim = dim

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.standard_normal(self.dim)

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            for token in text.split():
                out[i] += self._token_vector(token)
            norm = np.linalg.norm(out[i])
            if norm > 0:
                out[i] /= norm
        return out.astype(np.float32)


class SentenceTransformerEncoder:
    """Any sentence-transformers model id; loading happens eagerly so a
    bad identifier fails before any input is read."""

    def __init__(self, model_id: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(
                f"encoder {model_id!r} needs the sentence-transformers package") from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise EncoderError(f"cannot load encoder {model_id!r}: {exc}") from exc
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        return np.asarray(
            self._model.encode(list(texts), convert_to_numpy=True),
            dtype=np.float32,
        )


def resolve_encoder(model_id: str):
    """Turn a model identifier string into a ready encoder or die trying."""
    if model_id.startswith("hash:"):
        spec = model_id[len("hash:"):]
        try:
            dim = int(spec)
        except ValueError as exc:
            raise EncoderError(f"bad hash encoder spec {model_id!r}: "
                               f"expected hash:<dim>") from exc
        return HashEncoder(dim)
    return SentenceTransformerEncoder(model_id)
