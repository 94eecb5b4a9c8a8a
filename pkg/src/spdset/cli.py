"""Command line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical error.
"""

import argparse
import logging
import sys

from .datasets import load_dataset, synth_dataset
from .exceptions import DataError, InvalidInput, NumericalError, SpdSetError
from .experiment import emit_results, load_config, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _override(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser():
    parser = _Parser(prog="spdset", description="CovDs-S image-set classification")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a randomized-split experiment")
    run.add_argument("--config", required=True,
                     help="config file, or a preset name: cg, eth80, virus, mdsd")
    run.add_argument("--data", required=True, help="dataset root: <class>/<set>/<frames>")
    run.add_argument("--out", required=True, help="result file to write")
    run.add_argument("--set", dest="overrides", action="append", type=_override, default=[],
                     metavar="KEY=VALUE", help="override a config key (repeatable)")

    validate = sub.add_parser("validate", help="check a dataset tree")
    validate.add_argument("--data", required=True)

    synth = sub.add_parser("synth", help="write a synthetic texture dataset")
    synth.add_argument("--out", required=True)
    synth.add_argument("--classes", type=int, default=3)
    synth.add_argument("--sets", type=int, default=10)
    synth.add_argument("--frames", type=int, default=8)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--size", type=int, default=24)
    return parser


def _run(args):
    cfg = load_config(args.config, dict(args.overrides))
    manifest = load_dataset(args.data)
    res = run_experiment(cfg, manifest)
    emit_results(res, args.out)
    print(f"{cfg.descriptor} + {cfg.classifier}: {res.mean:.2f}±{res.std:.2f} "
          f"over {len(res.accuracies)} split(s) -> {args.out}")


def _validate(args):
    manifest = load_dataset(args.data)
    for c in manifest.classes:
        entries = manifest.sets_per_class[c]
        frames = [len(e.frames) for e in entries]
        print(f"{c}: {len(entries)} sets, {min(frames)}-{max(frames)} frames per set")
    print(f"{len(manifest.classes)} classes, {manifest.n_sets} image sets, "
          f"{len(manifest.skipped)} skipped item(s)")


def _synth(args):
    if min(args.classes, args.sets, args.frames) < 1:
        raise InvalidInput("classes, sets and frames must be positive")
    synth_dataset(args.out, args.classes, args.sets, args.frames, args.seed, args.size)
    print(f"wrote {args.classes} x {args.sets} sets x {args.frames} frames to {args.out}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "validate": _validate, "synth": _synth}[args.command]
    try:
        handler(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInput, SpdSetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
