"""Reader for JSON-lines meeting files.

One optional header line (``meeting_id`` present, ``index`` absent), then
one object per EDU with ``index``, ``speaker``, ``text`` and ``label``
keys. EDUs are returned in transcript order: sorted by index, which must
be dense from 0.
"""
import json
import os

from .errors import InputError


def read_meeting_texts(path: str) -> tuple[str, list[str]]:
    """Return (meeting_id, EDU texts in transcript order)."""
    meeting_id = os.path.splitext(os.path.basename(path))[0]
    rows: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise InputError(f"{path}:{lineno}: expected a JSON object")
            if "meeting_id" in obj and "index" not in obj:
                if rows:
                    raise InputError(f"{path}:{lineno}: header line must come first")
                meeting_id = str(obj["meeting_id"])
                continue
            missing = {"index", "speaker", "text", "label"} - obj.keys()
            if missing:
                raise InputError(f"{path}:{lineno}: EDU record missing keys {sorted(missing)}")
            try:
                index, label = int(obj["index"]), int(obj["label"])
            except (TypeError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: index and label must be integers") from exc
            text = str(obj["text"])
            if not text.split():
                raise InputError(f"{path}:{lineno}: EDU {index} has empty text")
            rows.append((index, text))
    if not rows:
        raise InputError(f"{path}: no EDU records found")
    rows.sort()
    indices = [i for i, _ in rows]
    if indices != list(range(len(rows))):
        raise InputError(f"{path}: EDU indices must be dense from 0, got {indices}")
    return meeting_id, [text for _, text in rows]
