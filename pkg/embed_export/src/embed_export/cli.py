"""Command-line entry point.

Exit codes: 0 success, 2 bad input or output row mismatch, 3 encoder
load failure, 1 anything unexpected.
"""
import argparse
import sys

from .encoders import DEFAULT_MODEL
from .errors import ExportError
from .export import ExportJob, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Batch-encode a meeting's EDUs into a DEMB embedding file.")
    parser.add_argument("--in", dest="input", required=True, metavar="MEETING.jsonl",
                        help="meeting JSON-lines file")
    parser.add_argument("--out", dest="output", required=True, metavar="OUT.demb",
                        help="DEMB output path (manifest goes to OUT.demb.json)")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="encoder id: a sentence-transformers model, or "
                             "hash:<dim> for the deterministic offline encoder "
                             f"(default: {DEFAULT_MODEL})")
    parser.add_argument("--batch", type=int, default=64, help="encoding batch size")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(input_path=args.input, output_path=args.output,
                        model_id=args.model, batch_size=args.batch)
        manifest = export(job)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - the last-resort path
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {manifest['rows']} x {manifest['dim']} embeddings "
          f"({manifest['meeting_id']}) to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
