"""Command-line interface.

Subcommands::

    lexrec train-od    build and train word models from a word list
    lexrec train-ld    build a baseline, unigram or tag-bigram language model
    lexrec gen-errors  dump generated corruptions, or corrupt text for a key
    lexrec correct     correct text line by line
    lexrec evaluate    score a correction run against a key

Options can also come from a ``key = value`` file given with ``--config``;
command-line flags win.  Exit status is 0 on success, 1 when some line had
no reading and 2 on configuration or input errors.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import ctr, errorgen, evaluate, ld, od
from .errors import LexrecError, NoHypothesisError

log = logging.getLogger("lexrec")

EXIT_OK, EXIT_NO_HYPOTHESIS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _keyboard(args) -> errorgen.KeyboardLayout:
    if args.keyboard:
        return errorgen.KeyboardLayout.load(args.keyboard)
    return errorgen.KeyboardLayout.bundled(args.layout)


def _functions(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [n for n in names if n not in errorgen.OPERATORS]
    if bad or not names:
        raise UsageError(f"unknown error functions {bad}; choose from {', '.join(errorgen.OPERATORS)}")
    return names


# ---------------------------------------------------------------------------
# commands


def cmd_train_od(args) -> int:
    entries = od.read_word_list(args.lexicon)
    if not entries:
        raise UsageError(f"{args.lexicon} lists no words")
    operators = list(_functions(args.functions))
    if args.with_transpositions and "transposition" not in operators:
        operators.append("transposition")
    lex = od.train_lexicon(
        entries,
        operators=operators,
        kb=_keyboard(args),
        filter_real=args.filter_real_words,
        eps_obs=args.eps_obs,
        delta=args.delta,
        with_space_state=not args.no_space_state,
        max_iters=args.max_iters,
    )
    lex.save(args.out)
    log.info("wrote %d word models to %s", len(lex), args.out)
    return EXIT_OK


def cmd_train_ld(args) -> int:
    kind = args.ld
    if kind == "baseline":
        model = ld.build_baseline()
    elif kind == "unigram":
        if not args.lexicon:
            raise UsageError("--ld unigram needs --lexicon")
        vocab = [w for w, _ in od.read_word_list(args.lexicon)]
        if args.tagged:
            corpus = [[w for w, _ in s] for s in ld.read_tagged(args.tagged)]
        elif args.untagged:
            corpus = ld.read_untagged(args.untagged)
        else:
            raise UsageError("--ld unigram needs --tagged or --untagged")
        eps = 1e-4 if args.eps_obs is None else args.eps_obs
        model = ld.build_unigram(corpus, vocab, eps)
    else:
        if not args.tags:
            raise UsageError("--ld bigram needs --tags")
        tagset = ld.TagSet.load(args.tags)
        eps_obs = 1e-3 if args.eps_obs is None else args.eps_obs
        eps_trans = 1e-3 if args.eps_trans is None else args.eps_trans
        if args.tagged:
            model = ld.build_bigram_supervised(ld.read_tagged(args.tagged), tagset, eps_trans, eps_obs)
        elif args.untagged:
            model = ld.build_bigram_unsupervised(ld.read_untagged(args.untagged), tagset, args.iters, eps_trans, eps_obs)
        else:
            raise UsageError("--ld bigram needs --tagged or --untagged")
        if args.lexicon:
            missing = model.covers(w for w, _ in od.read_word_list(args.lexicon))
            if missing:
                raise UsageError(f"lexicon words without tags: {missing[:5]}")
    ld.save(model, args.out)
    return EXIT_OK


def cmd_gen_errors(args) -> int:
    operators = _functions(args.functions)
    kb = _keyboard(args)
    out = _open_out(args.out)
    try:
        if args.corrupt_text:
            rng = np.random.default_rng(args.seed)
            for line in _read_lines(args.corrupt_text):
                out.write(f"{_corrupt_line(line, rng, operators, kb)}\t{line}\n")
            return EXIT_OK
        words = list(args.word or [])
        if args.lexicon:
            words += [w for w, _ in od.read_word_list(args.lexicon)]
        if not words:
            raise UsageError("give --word, --lexicon or --corrupt-text")
        prefix = "" if args.no_space_state else " "
        vocab = [prefix + w for w in words]
        alphabet = errorgen.FULL_ALPHABET if args.full_alphabet else None
        for w in words:
            corpus = errorgen.make_corpus(prefix + w.lower(), operators, kb, alphabet)
            if args.filter_real_words:
                corpus = errorgen.filter_real_words(corpus, vocab)
            if len(words) > 1:
                out.write(f"# {corpus.source}\n")
            corpus.dump(out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _corrupt_line(line, rng, operators, kb):
    words = line.split()
    if not words:
        return line
    order = rng.permutation(len(words))
    for k in order:
        pick = errorgen.corrupt_once(" " + words[k], rng, operators, kb)
        if pick is not None:
            before = " ".join(words[:k])
            after = " ".join(words[k + 1 :])
            text = (before + pick[0] + (" " + after if after else "")).strip()
            if text and text != line:
                return text
    return line


def cmd_correct(args) -> int:
    lexicon = od.Lexicon.load(args.models)
    model = ld.load(args.ld)
    cfg = ctr.RecognizerConfig(args.beam, args.n_best, args.tags)
    rec = ctr.Recognizer(model, lexicon, cfg)
    if args.input:
        src = open(args.input, encoding="utf-8", newline="\n")
    else:
        src = sys.stdin
        if hasattr(src, "reconfigure"):
            src.reconfigure(newline="\n")
    out = _open_out(args.out)
    failures = 0
    try:
        if args.incremental:
            failures = _correct_incremental(rec, src, out, args.tags)
        else:
            for line in src:
                line = line.rstrip("\r\n")
                failures += _emit(out, line, _recognize(rec, line), args.tags)
    finally:
        if src is not sys.stdin:
            src.close()
        if out is not sys.stdout:
            out.close()
    return EXIT_NO_HYPOTHESIS if failures else EXIT_OK


def _recognize(rec, line):
    if not line:
        return None
    try:
        return rec.recognize(line)
    except NoHypothesisError:
        return None


def _emit(out, line, result, tags) -> int:
    if result is None:
        if line:
            log.warning("no reading for %r; echoing it unchanged", line)
        out.write(line + "\n")
        out.flush()
        return int(bool(line))
    out.write((result.tagged_text() if tags else result.text) + "\n")
    out.flush()
    return 0


def _correct_incremental(rec, src, out, tags) -> int:
    """Feed characters as they arrive; a newline closes the utterance.

    Carriage returns are held back until a later character shows they are
    not part of the line ending.
    """
    failures = 0
    session, text, held = rec.session(), [], 0
    while True:
        ch = src.read(1)
        if ch in ("\n", ""):
            if ch == "" and not text and not held:
                break
            result = None
            if text:
                try:
                    result = session.finalize()
                except NoHypothesisError:
                    pass
            failures += _emit(out, "".join(text), result, tags)
            session, text, held = rec.session(), [], 0
            if ch == "":
                break
        elif ch == "\r":
            held += 1
        else:
            chunk = "\r" * held + ch
            held = 0
            text.append(chunk)
            session = ctr.recognize_incremental(session, chunk)
    return failures


def cmd_evaluate(args) -> int:
    inputs = _read_lines(args.input)
    outputs = _read_lines(args.output)
    if len(inputs) != len(outputs):
        raise UsageError(f"{args.input} and {args.output} differ in length")
    key = evaluate.read_key(args.key)
    lexicon = None
    if args.lexicon:
        lexicon = [w for w, _ in od.read_word_list(args.lexicon)]
    report = evaluate.evaluate(zip(inputs, outputs), key, lexicon)
    report.check()
    sys.stdout.write(report.to_tsv() if args.format == "tsv" else report.pretty())
    return EXIT_OK


def _read_lines(path) -> list[str]:
    try:
        with open(path, encoding="utf-8", newline="\n") as fh:
            return [line.rstrip("\r\n") for line in fh]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _open_out(path):
    if not path or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# argument parsing


def _beam(text: str) -> float:
    value = float(text)
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError("beam must be a non-negative number or inf")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _eps(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file with default options")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised steps")
    common.add_argument("-v", "--verbose", action="store_true")

    kbd = _Parser(add_help=False)
    kbd.add_argument("--keyboard", help="keyboard layout file (char<TAB>neighbours)")
    kbd.add_argument("--layout", default="qwerty", choices=["qwerty", "swedish"])
    kbd.add_argument("--functions", default=",".join(errorgen.TRAINING_DEFAULT), help="comma-separated error functions")
    kbd.add_argument("--filter-real-words", action="store_true")
    kbd.add_argument("--no-space-state", action="store_true", help="models without the leading space state")

    p = _Parser(prog="lexrec", description="Lexical error recovery with coupled word and language HMMs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("train-od", parents=[common, kbd], help="train word models")
    s.add_argument("--lexicon", required=True, help="word list, one word per line")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--with-transpositions", action="store_true")
    s.add_argument("--eps-obs", type=_eps, default=od.EPS_OBS)
    s.add_argument("--delta", type=_positive_int, default=od.DELTA)
    s.add_argument("--max-iters", type=int, default=100)
    s.set_defaults(func=cmd_train_od)

    s = sub.add_parser("train-ld", parents=[common], help="build a language model")
    s.add_argument("--ld", choices=ld.KINDS, default="bigram")
    s.add_argument("--tagged", help="tagged corpus (word/TAG tokens)")
    s.add_argument("--untagged", help="untagged corpus")
    s.add_argument("--tags", help="tag set file")
    s.add_argument("--lexicon", help="word list (unigram vocabulary)")
    s.add_argument("--eps-obs", type=_eps)
    s.add_argument("--eps-trans", type=_eps)
    s.add_argument("--iters", type=int, default=20, help="Baum-Welch iterations for untagged bigrams")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_ld)

    s = sub.add_parser("gen-errors", parents=[common, kbd], help="generate corruptions")
    s.add_argument("--word", action="append", help="word to corrupt (repeatable)")
    s.add_argument("--lexicon", help="word list to corrupt")
    s.add_argument("--full-alphabet", action="store_true", help="insert and substitute any letter")
    s.add_argument("--corrupt-text", help="put one random error in every line of this file")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_gen_errors)

    s = sub.add_parser("correct", parents=[common], help="correct text")
    s.add_argument("input", nargs="?", help="input file (default stdin)")
    s.add_argument("--models", required=True, help="trained word-model directory")
    s.add_argument("--ld", required=True, help="language model file")
    s.add_argument("--beam", type=_beam, default=math.inf)
    s.add_argument("--n-best", type=_positive_int, default=1)
    s.add_argument("--tags", action="store_true", help="annotate words as word/TAG")
    s.add_argument("--incremental", action="store_true", help="feed characters one at a time")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_correct)

    s = sub.add_parser("evaluate", parents=[common], help="score a run against a key")
    s.add_argument("--input", required=True, help="text given to the corrector")
    s.add_argument("--output", required=True, help="corrector output, line-aligned with --input")
    s.add_argument("--key", required=True, help="original<TAB>corrected key file")
    s.add_argument("--lexicon", help="word list deciding real-word errors")
    s.add_argument("--format", choices=["pretty", "tsv"], default="pretty")
    s.set_defaults(func=cmd_evaluate)
    return p


def _apply_config(parser, argv):
    # find the chosen subparser and --config before the real parse
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in argv if a in sub.choices), None)
    if command is None:
        return
    target = sub.choices[command]
    actions = {a.dest: a for a in target._actions}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {command}")
        if action.nargs == 0:
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                defaults[key] = action.type(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None
        else:
            defaults[key] = raw
        if action.required:
            action.required = False
    target.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        print(f"lexrec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="lexrec: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stop quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except (UsageError, LexrecError, ValueError, OSError) as exc:
        print(f"lexrec: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
