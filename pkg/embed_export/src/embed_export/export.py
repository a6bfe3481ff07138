"""The export operation: meeting JSONL in, DEMB + manifest JSON out."""
import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .demb import write_matrix
from .encoders import resolve_encoder
from .errors import InputError
from .meetings import read_meeting_texts


@dataclass(frozen=True)
class ExportJob:
    input_path: str
    output_path: str
    model_id: str
    batch_size: int = 64

    def __post_init__(self):
        if not self.input_path or not self.output_path:
            raise InputError("input and output paths must be non-empty")
        if self.batch_size < 1:
            raise InputError(f"batch size must be >= 1, got {self.batch_size}")


def export(job: ExportJob, encoder=None) -> dict:
    """Encode every EDU and write ``output_path`` plus a manifest at
    ``output_path + ".json"``. Returns the manifest.

    The encoder resolves before the input is read, so a bad model id
    fails the same way on an empty and a valid meeting file.
    """
    if encoder is None:
        encoder = resolve_encoder(job.model_id)
    meeting_id, texts = read_meeting_texts(job.input_path)

    chunks = []
    for start in range(0, len(texts), job.batch_size):
        chunk = encoder.encode(texts[start:start + job.batch_size])
        chunks.append(np.asarray(chunk, dtype=np.float32))
    values = np.vstack(chunks)

    if values.shape != (len(texts), encoder.dim):
        raise InputError(
            f"encoder produced {values.shape}, expected ({len(texts)}, {encoder.dim})")
    if not np.all(np.isfinite(values)):
        raise InputError("encoder produced non-finite values")

    write_matrix(values, job.output_path)
    manifest = {
        "encoder": job.model_id,
        "dim": encoder.dim,
        "rows": len(texts),
        "meeting_id": meeting_id,
        "job": dataclasses.asdict(job),
    }
    with open(job.output_path + ".json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return manifest
