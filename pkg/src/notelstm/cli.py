"""Command-line front end.

Exit codes: 0 success, 1 failed gradient check, 2 bad arguments, 3 I/O or
checkpoint errors, 4 corpus / melody / CSV content errors.
"""

import argparse
import json
import logging
import os
import sys

from . import analysis, plotting, sampling, synthetic
from .checkpoint import load_checkpoint
from .errors import CheckpointError, DomainError, ParseError
from .gradcheck import random_check
from .mathcore import perplexity
from .model import DEFAULT_HIDDEN, DEFAULT_INIT_SCALE, DEFAULT_LAYERS, ModelConfig
from .optim import AdamHyper
from .training import (DEFAULT_SCHEDULE, CsvLossSink, DirectoryCheckpointSink, LossLog,
                       parse_schedule, train)
from .vocab import DEFAULT_WINDOW, dump_corpus, format_melody, load_corpus, parse_melody

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO, EXIT_CONTENT = 0, 1, 2, 3, 4
GRADCHECK_TOLERANCE = 1e-4
SCHEDULE_TEXT = ",".join(str(i) for i in DEFAULT_SCHEDULE)


class UsageError(Exception):
    pass


class ContentError(Exception):
    pass


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read_corpus(path):
    try:
        with open(path, "rb") as fh:
            return load_corpus(fh)
    except ParseError as exc:
        raise ContentError(str(exc)) from exc


def cmd_gen_corpus(args):
    try:
        corpus = synthetic.generate_synthetic_corpus(args.kind, args.length, args.count, args.seed)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    _write_text(args.out, dump_corpus(corpus))
    return EXIT_OK


def cmd_train(args):
    try:
        schedule = parse_schedule(args.checkpoint_at)
    except ValueError as exc:
        raise UsageError(f"bad --checkpoint-at: {exc}") from exc
    iters = max(schedule) if args.iters is None else args.iters
    if iters < max(schedule):
        raise UsageError(f"--iters {iters} is smaller than the last checkpoint {max(schedule)}")
    try:
        hyper = AdamHyper(alpha=args.lr, clip_norm=args.clip if args.clip > 0 else None)
        config = ModelConfig(vocab_size=2, hidden_size=args.hidden, num_layers=args.layers,
                             window_len=args.window, init_scale=args.init_scale,
                             rng_seed=args.seed)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    corpus = _read_corpus(args.corpus)
    resume = load_checkpoint(args.resume) if args.resume else None
    os.makedirs(args.out_dir, exist_ok=True)
    loss_sink = CsvLossSink(os.path.join(args.out_dir, "loss.csv"),
                            keep_before=resume.iteration if resume else None)
    try:
        _, log = train(corpus, config, hyper, schedule=schedule, total_iterations=iters,
                       checkpoint_sink=DirectoryCheckpointSink(args.out_dir),
                       loss_sink=loss_sink, full_vocab=args.full_vocab, resume=resume)
    except DomainError as exc:
        raise ContentError(str(exc)) from exc
    finally:
        loss_sink.close()
    final = log.losses[-1]
    print(f"final_iteration: {log.iterations[-1]}")
    print(f"final_loss: {final!r}")
    print(f"perplexity: {perplexity(final)!r}")
    return EXIT_OK


def _mode(args):
    if args.mode == "greedy":
        return sampling.Greedy()
    try:
        return sampling.Stochastic(args.temperature, args.rng_seed)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def cmd_sample(args):
    if args.n < 1:
        raise UsageError("--n must be positive")
    mode = _mode(args)
    try:
        seed = parse_melody(args.seed_notes)
    except ParseError as exc:
        raise ContentError(str(exc)) from exc
    ckpts = [load_checkpoint(p) for p in args.ckpt]
    try:
        results = sampling.sample_at_checkpoints(ckpts, seed, args.n, mode)
    except DomainError as exc:
        raise ContentError(str(exc)) from exc
    lines = []
    for iteration, melody in results:
        if len(results) > 1:
            lines.append(f"# iteration {iteration}")
        lines.append(sampling.format_annotated(seed, melody) if args.annotated
                     else format_melody(melody))
    sys.stdout.write("\n".join(lines) + "\n")
    if args.figure:
        plotting.plot_melodies([(f"step {it}", m) for it, m in results], args.figure, seed)
    return EXIT_OK


def _read_melodies(args):
    if args.melody_file:
        with open(args.melody_file, "rb") as fh:
            data = fh.read()
    else:
        data = sys.stdin.buffer.read()
    # annotated sampler output: keep only the generated part after "|"
    text = "\n".join(line.split("|")[-1] for line in data.decode("utf-8").splitlines())
    try:
        melodies = load_corpus(text)
    except ParseError as exc:
        raise ContentError(str(exc)) from exc
    if not melodies:
        raise ContentError("no melody found in input")
    return melodies


def cmd_analyze(args):
    melodies = _read_melodies(args)
    try:
        reports = [analysis.interval_report(m) for m in melodies]
    except DomainError as exc:
        raise ContentError(str(exc)) from exc
    out = "".join(json.dumps(r.as_dict()) + "\n" for r in reports)
    _write_text(args.out, out)
    if args.figure:
        plotting.plot_interval_histograms(reports, args.figure)
    return EXIT_OK


def parse_milestones(text):
    """``iteration,loss`` (or whitespace separated) pairs, header optional."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace(",", " ").split()
        if len(fields) < 2:
            raise ContentError(f"milestone line {lineno} needs iteration and loss")
        try:
            pairs.append((int(fields[0]), float(fields[1])))
        except ValueError:
            if lineno == 1 or not pairs:
                continue
            raise ContentError(f"malformed milestone at line {lineno}: {line!r}")
    return pairs


def cmd_report(args):
    curve = None
    if args.milestones:
        with open(args.milestones, encoding="utf-8") as fh:
            pairs = parse_milestones(fh.read())
    else:
        with open(args.loss_csv, encoding="utf-8") as fh:
            try:
                curve = LossLog.from_csv(fh.read())
            except DomainError as exc:
                raise ContentError(str(exc)) from exc
        try:
            at = parse_schedule(args.at)
            pairs = [(i, curve.loss_at(i)) for i in at]
        except ValueError as exc:
            raise ContentError(str(exc)) from exc
    try:
        report = analysis.milestone_report(pairs)
    except DomainError as exc:
        raise ContentError(str(exc)) from exc
    _write_text(args.out, report.to_text())
    if args.csv:
        _write_text(args.csv, _curve_csv(report, curve))
    if args.figure:
        its, losses = (curve.iterations, curve.losses) if curve else (report.iterations, report.losses)
        plotting.plot_loss_curve(its, losses, args.figure, milestones=report,
                                 log_x=args.log_x)
    return EXIT_OK


def _curve_csv(report, curve):
    """Plot-ready rows: whole loss curve if available, else the milestones."""
    if curve is None:
        rows = [(i, l) for i, l in zip(report.iterations, report.losses)]
    else:
        rows = list(zip(curve.iterations, curve.losses))
    first, total = report.losses[0], report.total_improvement
    lines = ["iteration,loss,cumulative_fraction"]
    lines += [f"{i},{l:.17g},{(first - l) / total:.17g}" for i, l in rows]
    return "\n".join(lines) + "\n"


def cmd_gradcheck(args):
    if not 0 < args.eps <= 1e-2:
        raise UsageError("--eps must lie in (0, 1e-2]")
    try:
        err = random_check(args.vocab, args.hidden, args.layers, args.window, args.eps,
                           args.seed, zero_grads=args.zero_grads)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    ok = err < GRADCHECK_TOLERANCE
    print(f"max_relative_error: {err!r}")
    print(f"tolerance: {GRADCHECK_TOLERANCE!r}")
    print(f"status: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser():
    p = argparse.ArgumentParser(prog="notelstm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-corpus", help="write a synthetic corpus")
    g.add_argument("--kind", required=True, choices=synthetic.KINDS)
    g.add_argument("--length", type=int, default=33)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen_corpus)

    t = sub.add_parser("train", help="train and write checkpoints plus loss.csv")
    t.add_argument("--corpus", required=True)
    t.add_argument("--hidden", type=int, default=DEFAULT_HIDDEN)
    t.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    t.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--clip", type=float, default=5.0, help="global-norm clip, 0 disables")
    t.add_argument("--init-scale", type=float, default=DEFAULT_INIT_SCALE)
    t.add_argument("--iters", type=int, default=None,
                   help="total iterations (default: last checkpoint)")
    t.add_argument("--checkpoint-at", default=SCHEDULE_TEXT)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--full-vocab", action="store_true", help="use all 128 pitches")
    t.add_argument("--resume", default=None, help="continue from this checkpoint")
    t.add_argument("--out-dir", required=True)
    t.set_defaults(func=cmd_train)

    s = sub.add_parser("sample", help="generate melodies from checkpoints")
    s.add_argument("--ckpt", required=True, nargs="+")
    s.add_argument("--seed-notes", default=sampling.DEFAULT_SEED_NOTES)
    s.add_argument("--n", type=int, default=sampling.DEFAULT_LENGTH)
    s.add_argument("--mode", choices=("stochastic", "greedy"), default="stochastic")
    s.add_argument("--temperature", type=float, default=1.0)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--annotated", action="store_true", help="prefix the seed and a '|'")
    s.add_argument("--figure", default=None, help="write a pitch-contour figure here")
    s.set_defaults(func=cmd_sample)

    a = sub.add_parser("analyze", help="interval report for melodies")
    a.add_argument("--melody-file", default=None, help="default: read stdin")
    a.add_argument("--out", default="-")
    a.add_argument("--figure", default=None, help="write an interval histogram here")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("report", help="loss-milestone improvement fractions")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--milestones", help="file of iteration,loss pairs")
    src.add_argument("--loss-csv", help="loss.csv written by train")
    r.add_argument("--at", default=SCHEDULE_TEXT, help="iterations to slice from --loss-csv")
    r.add_argument("--out", default="-")
    r.add_argument("--csv", default=None, help="write iteration,loss,cumulative_fraction here")
    r.add_argument("--figure", default=None, help="write the loss-curve figure here")
    r.add_argument("--log-x", action="store_true")
    r.set_defaults(func=cmd_report)

    c = sub.add_parser("gradcheck", help="finite-difference check on a random tiny model")
    c.add_argument("--hidden", type=int, default=3)
    c.add_argument("--layers", type=int, default=2)
    c.add_argument("--vocab", type=int, default=4)
    c.add_argument("--window", type=int, default=5)
    c.add_argument("--eps", type=float, default=1e-5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--zero-grads", action="store_true", help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_gradcheck)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"notelstm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContentError as exc:
        print(f"notelstm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONTENT
    except (OSError, CheckpointError) as exc:
        print(f"notelstm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
