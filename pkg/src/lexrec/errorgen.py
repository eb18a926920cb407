"""Synthetic error corpora for training word models.

Six corruption operators are provided: deletion, insertion, substitution,
transposition, white-space insertion and double stroke.  Insertions and
substitutions draw on keyboard neighbours by default, or on a full alphabet
when counting every possible single-error misspelling.
"""
from __future__ import annotations

import functools
import string
from importlib import resources
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError

SPACE = " "

# 26 letters, hyphen and apostrophe
FULL_ALPHABET = string.ascii_lowercase + "-'"


class KeyboardLayout:
    """Immediate left/right neighbours of each key."""

    def __init__(self, neighbours: dict[str, Iterable[str]]):
        self.neighbours = {k: tuple(v) for k, v in neighbours.items()}

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "KeyboardLayout":
        nb: dict[str, list[str]] = {}
        for row in rows:
            for i, ch in enumerate(row):
                near = nb.setdefault(ch, [])
                for j in (i - 1, i + 1):
                    if 0 <= j < len(row) and row[j] not in near:
                        near.append(row[j])
        return cls(nb)

    @classmethod
    def bundled(cls, name: str) -> "KeyboardLayout":
        """A layout shipped with the package: ``"qwerty"`` or ``"swedish"``."""
        return _bundled(name)

    @classmethod
    def qwerty(cls) -> "KeyboardLayout":
        return cls.bundled("qwerty")

    @classmethod
    def load(cls, path) -> "KeyboardLayout":
        """Read ``char<TAB>neighbours`` lines."""
        nb = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                key, sep, near = line.partition("\t")
                if not sep or len(key) != 1:
                    raise InputError(f"{path}:{lineno}: expected 'char<TAB>neighbours'")
                nb[key] = tuple(near)
        return cls(nb)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key in sorted(self.neighbours):
                fh.write(f"{key}\t{''.join(self.neighbours[key])}\n")

    def __getitem__(self, ch: str) -> tuple[str, ...]:
        return self.neighbours.get(ch, ())


@functools.lru_cache(maxsize=None)
def _bundled(name):
    res = resources.files("lexrec") / "data" / f"{name}.kbd"
    if not res.is_file():
        raise InputError(f"no bundled keyboard layout {name!r}")
    with resources.as_file(res) as path:
        return KeyboardLayout.load(path)


# --- raw generators: one item per application, duplicates kept ---


def _deletions(word):
    for i in range(len(word)):
        yield word[:i] + word[i + 1 :]


def _insertions(word, kb=None, alphabet=None):
    for i in range(len(word) + 1):
        if alphabet is not None:
            chars = alphabet
        else:
            chars = []
            for j in (i - 1, i):
                if 0 <= j < len(word):
                    chars.extend(c for c in kb[word[j]] if c not in chars)
        for c in chars:
            yield word[:i] + c + word[i:]


def _substitutions(word, kb=None, alphabet=None):
    for i, ch in enumerate(word):
        chars = [c for c in alphabet if c != ch] if alphabet is not None else kb[ch]
        for c in chars:
            yield word[:i] + c + word[i + 1 :]


def _transpositions(word):
    for i in range(len(word) - 1):
        yield word[:i] + word[i + 1] + word[i] + word[i + 2 :]


def _body_start(word):
    return 1 if word.startswith(SPACE) else 0


def _space_insertions(word):
    start = _body_start(word)
    for i in range(start + 1, len(word)):
        yield word[:i] + SPACE + word[i:]


def _double_strokes(word):
    for i in range(len(word)):
        yield word[: i + 1] + word[i:]


def _clean(word, items):
    return {s for s in items if s and s != word}


def _need(word):
    if not word:
        raise InputError("cannot corrupt an empty word")


def gen_deletions(word: str) -> set[str]:
    _need(word)
    return _clean(word, _deletions(word))


def gen_insertions(word: str, kb: KeyboardLayout | None = None, alphabet: str | None = None) -> set[str]:
    """Insert keyboard neighbours of the characters next to each gap.

    Passing ``alphabet`` switches to full-alphabet mode.
    """
    _need(word)
    return _clean(word, _insertions(word, kb or KeyboardLayout.qwerty(), alphabet))


def gen_substitutions(word: str, kb: KeyboardLayout | None = None, alphabet: str | None = None) -> set[str]:
    _need(word)
    return _clean(word, _substitutions(word, kb or KeyboardLayout.qwerty(), alphabet))


def gen_transpositions(word: str) -> set[str]:
    _need(word)
    return _clean(word, _transpositions(word))


def gen_space_insertions(word: str) -> set[str]:
    """A space at every interior position of the word body."""
    _need(word)
    return _clean(word, _space_insertions(word))


def gen_double_strokes(word: str) -> set[str]:
    _need(word)
    return _clean(word, _double_strokes(word))


def count_single_error_candidates(n: int, alphabet_size: int = 28) -> int:
    """Single-error misspellings of an ``n``-letter word: deletions,
    insertions, substitutions and transpositions."""
    if n < 1:
        raise InputError("word length must be positive")
    k = alphabet_size
    return n + k * (n + 1) + (k - 1) * n + (n - 1)


def raw_single_error_count(word: str, alphabet: str = FULL_ALPHABET) -> int:
    """Number of single-error strings generated in full-alphabet mode,
    counted per application (before deduplication)."""
    return (
        sum(1 for _ in _deletions(word))
        + sum(1 for _ in _insertions(word, alphabet=alphabet))
        + sum(1 for _ in _substitutions(word, alphabet=alphabet))
        + sum(1 for _ in _transpositions(word))
    )


# --- corpora ---

OPERATORS = ("deletion", "insertion", "substitution", "transposition", "space", "double")
TRAINING_DEFAULT = ("deletion", "substitution", "space")


@dataclass
class ErrorCorpus:
    """Corruptions of ``source`` with the operator that produced each one."""

    source: str
    corruptions: list[tuple[str, str]] = field(default_factory=list)

    def strings(self) -> list[str]:
        return [s for s, _ in self.corruptions]

    def training_strings(self) -> list[str]:
        """The source word followed by every corruption."""
        return [self.source] + self.strings()

    def dump(self, fh) -> None:
        for s, tag in self.corruptions:
            fh.write(f"{s}\t{tag}\n")


def _apply(op, word, kb, alphabet):
    if op == "deletion":
        return gen_deletions(word)
    if op == "insertion":
        return gen_insertions(word, kb, alphabet)
    if op == "substitution":
        return gen_substitutions(word, kb, alphabet)
    if op == "transposition":
        return gen_transpositions(word)
    if op == "space":
        return gen_space_insertions(word)
    if op == "double":
        return gen_double_strokes(word)
    raise InputError(f"unknown error operator {op!r}")


def make_corpus(
    word: str,
    operators: Iterable[str] = TRAINING_DEFAULT,
    kb: KeyboardLayout | None = None,
    alphabet: str | None = None,
) -> ErrorCorpus:
    """Apply ``operators`` to ``word``; results are deduplicated, first
    operator wins, and ordered deterministically."""
    kb = kb or KeyboardLayout.qwerty()
    seen = {}
    for op in operators:
        for s in sorted(_apply(op, word, kb, alphabet)):
            seen.setdefault(s, op)
    return ErrorCorpus(word, list(seen.items()))


def space_only_corpus(word: str) -> ErrorCorpus:
    """Corruptions involving only the space character.

    Used for punctuation and number words: the leading space dropped or
    doubled, plus white-space insertions inside the body.
    """
    _need(word)
    items = {}
    if word.startswith(SPACE) and len(word) > 1:
        items[word[1:]] = "deletion"
        items[SPACE + word] = "double"
    for s in sorted(gen_space_insertions(word)):
        items.setdefault(s, "space")
    return ErrorCorpus(word, list(items.items()))


def filter_real_words(corpus: ErrorCorpus, vocabulary: Iterable[str]) -> ErrorCorpus:
    """Drop corruptions that spell a vocabulary word (leading space ignored)."""
    vocab = {w.lstrip(SPACE) for w in vocabulary}
    kept = [(s, tag) for s, tag in corpus.corruptions if s.lstrip(SPACE) not in vocab]
    return ErrorCorpus(corpus.source, kept)


def corrupt_once(word: str, rng, operators: Iterable[str], kb: KeyboardLayout | None = None) -> tuple[str, str] | None:
    """Pick one random corruption of ``word`` from the given operators."""
    corpus = make_corpus(word, operators, kb)
    if not corpus.corruptions:
        return None
    return corpus.corruptions[int(rng.integers(len(corpus.corruptions)))]


def iter_corpora(words: Iterable[str], operators=TRAINING_DEFAULT, kb=None) -> Iterator[ErrorCorpus]:
    for w in words:
        yield make_corpus(w, operators, kb)
