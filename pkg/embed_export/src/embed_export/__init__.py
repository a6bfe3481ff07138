"""Batch sentence-encoding of meeting EDUs into DEMB embedding files.

The companion tool to the graphsumm engine: it speaks the same meeting
JSONL and DEMB formats but shares no code with it -- the file formats are
the whole contract.
"""

from .encoders import DEFAULT_MODEL, HashEncoder, resolve_encoder
from .errors import EncoderError, ExportError, InputError
from .export import ExportJob, export

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL", "EncoderError", "ExportError", "ExportJob",
    "HashEncoder", "InputError", "export", "resolve_encoder",
]
