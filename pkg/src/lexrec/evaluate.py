"""Recall and precision of a correction run against a key.

The key is a list of ``(original, corrected)`` utterance pairs.  Utterance
level scores compare whole lines.  Error level scores first align each
utterance with its correction token by token; every differing token group
is one error, classified as misspelling, run-on or split and as a nonword
or real-word error.

For every category the key errors form ``A``.  The outcome ``C`` holds every
key error (changed or not) plus each system change that touches no key
error, and ``B`` the key errors the system corrected exactly.  As ``A`` is
contained in ``C``, precision never exceeds recall.
"""
from __future__ import annotations

import functools
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ClassificationError, EvaluationError, InputError

MAX_GROUP = 4
ROWS = ("utterance", "misspelling", "run-on", "split", "nonword", "real-word", "total")
KINDS = ("misspelling", "run-on", "split")


@functools.lru_cache(maxsize=1 << 16)
def osa_distance(a: str, b: str) -> int:
    """Unit-cost edit distance counting adjacent transpositions as one operation."""
    prev2 = None
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            sub = prev[j - 1] + (a[i - 1] != b[j - 1])
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, sub)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[len(b)]


@dataclass(frozen=True)
class ErrorClass:
    kind: str  # misspelling | run-on | split
    real_word: bool
    multiple: bool


def classify_error(original_span: str, corrected_span: str, lexicon: Iterable[str]) -> ErrorClass:
    """Category of the error that turned ``corrected_span`` into ``original_span``."""
    if original_span == corrected_span:
        raise ClassificationError("identical spans are not an error")
    o, c = original_span.split(), corrected_span.split()
    if len(c) > len(o):
        kind = "run-on"
    elif len(c) < len(o):
        kind = "split"
    else:
        kind = "misspelling"
    vocab = {w.lower() for w in lexicon}
    real = bool(o) and all(t.lower() in vocab for t in o)
    multiple = osa_distance(" ".join(o), " ".join(c)) > 1
    return ErrorClass(kind, real, multiple)


def align_tokens(src: Sequence[str], dst: Sequence[str]) -> list[tuple[int, int, int, int]]:
    """Minimal-edit alignment of two token lists.

    Returns ``(i0, i1, j0, j1)`` groups covering both lists in order.  A group
    is an identical token pair, a one-to-many or many-to-one edit (at most
    ``MAX_GROUP`` tokens on the long side) or a token added or dropped.
    Edit groups cost the character distance between the joined sides.
    """
    n, m = len(src), len(dst)
    INF = float("inf")
    cost = [[INF] * (m + 1) for _ in range(n + 1)]
    back = [[None] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            base = cost[i][j]
            if base == INF:
                continue
            moves = []
            if i < n and j < m and src[i] == dst[j]:
                moves.append((1, 1, 0.0))
            for k in range(1, MAX_GROUP + 1):
                for l in range(1, MAX_GROUP + 1):
                    if (k > 1 and l > 1) or i + k > n or j + l > m:
                        continue
                    a, b = " ".join(src[i : i + k]), " ".join(dst[j : j + l])
                    if a != b:
                        moves.append((k, l, osa_distance(a, b) + 0.001 * (k + l)))
            if i < n:
                moves.append((1, 0, len(src[i]) + 1.0))
            if j < m:
                moves.append((0, 1, len(dst[j]) + 1.0))
            for k, l, c in moves:
                if base + c < cost[i + k][j + l]:
                    cost[i + k][j + l] = base + c
                    back[i + k][j + l] = (i, j)
    groups = []
    i, j = n, m
    while (i, j) != (0, 0):
        pi, pj = back[i][j]
        groups.append((pi, i, pj, j))
        i, j = pi, pj
    groups.reverse()
    return groups


@dataclass(frozen=True)
class Change:
    """One differing token group of an utterance pair."""

    start: int
    end: int
    original: tuple[str, ...]
    replacement: tuple[str, ...]
    cls: ErrorClass

    def categories(self) -> tuple[str, ...]:
        return (self.cls.kind, "real-word" if self.cls.real_word else "nonword", "total")


def changes(original: str, corrected: str, lexicon: Iterable[str]) -> list[Change]:
    src, dst = original.split(), corrected.split()
    vocab = set(lexicon)
    out = []
    for i0, i1, j0, j1 in align_tokens(src, dst):
        a, b = tuple(src[i0:i1]), tuple(dst[j0:j1])
        if a != b:
            out.append(Change(i0, i1, a, b, classify_error(" ".join(a), " ".join(b), vocab)))
    return out


@dataclass
class Row:
    category: str
    a: int = 0
    b: int = 0
    c: int = 0

    @property
    def recall(self) -> float | None:
        return round(100.0 * self.b / self.a, 1) if self.a else None

    @property
    def precision(self) -> float | None:
        return round(100.0 * self.b / self.c, 1) if self.c else None


@dataclass
class Report:
    rows: dict[str, Row]

    def __getitem__(self, category: str) -> Row:
        return self.rows[category]

    def check(self) -> None:
        """Raise if a protocol invariant is violated."""
        for row in self.rows.values():
            if not (row.b <= row.a <= row.c):
                raise EvaluationError(f"inconsistent counts in {row.category}")
            if row.a and row.precision > row.recall:
                raise EvaluationError(f"precision exceeds recall in {row.category}")
        for field in ("a", "b", "c"):
            total = getattr(self.rows["total"], field)
            by_kind = sum(getattr(self.rows[k], field) for k in KINDS)
            by_word = getattr(self.rows["nonword"], field) + getattr(self.rows["real-word"], field)
            if not by_kind == by_word == total:
                raise EvaluationError(f"category sums disagree for |{field.upper()}|")

    def to_tsv(self) -> str:
        out = io.StringIO()
        out.write("category\tA\tB\tC\trecall\tprecision\n")
        for name in ROWS:
            r = self.rows[name]
            out.write(f"{name}\t{r.a}\t{r.b}\t{r.c}\t{_pct(r.recall)}\t{_pct(r.precision)}\n")
        return out.getvalue()

    def pretty(self) -> str:
        out = io.StringIO()
        out.write(f"{'category':<12}{'|A|':>6}{'|B|':>6}{'|C|':>6}{'recall':>9}{'precision':>11}\n")
        for name in ROWS:
            r = self.rows[name]
            out.write(f"{name:<12}{r.a:>6}{r.b:>6}{r.c:>6}{_pct(r.recall):>9}{_pct(r.precision):>11}\n")
        return out.getvalue()


def _pct(x):
    return "-" if x is None else f"{x:.1f}"


def evaluate(
    run_pairs: Iterable[tuple[str, str]],
    key: Iterable[tuple[str, str]],
    lexicon: Iterable[str] | None = None,
) -> Report:
    """Score ``(input, output)`` run pairs against ``(original, corrected)`` key pairs.

    ``lexicon`` decides which tokens are real words; by default the words of
    the corrected key utterances are used.
    """
    outputs: dict[str, str] = {}
    for inp, out in run_pairs:
        if outputs.setdefault(inp, out) != out:
            raise EvaluationError(f"conflicting outputs for input {inp!r}")
    key_pairs = sorted({(o, c) for o, c in key if o != c})
    if lexicon is None:
        lexicon = {w for _, c in key for w in c.split()}
    vocab = set(lexicon)
    missing = [o for o, _ in key_pairs if o not in outputs]
    if missing:
        raise EvaluationError(f"{len(missing)} key utterance(s) missing from the run, e.g. {missing[0]!r}")

    rows = {name: Row(name) for name in ROWS}
    key_inputs = {o for o, _ in key_pairs}
    utt = rows["utterance"]
    utt.a = len(key_pairs)
    utt.b = sum(1 for o, c in key_pairs if outputs[o] == c)
    utt.c = sum(1 for inp, out in outputs.items() if out != inp or inp in key_inputs)

    key_changes = {o: changes(o, c, vocab) for o, c in key_pairs}
    for inp in sorted(outputs):
        out = outputs[inp]
        expected = key_changes.get(inp, [])
        produced = changes(inp, out, vocab) if out != inp else []
        for e in expected:
            hit = any(p.start == e.start and p.end == e.end and p.replacement == e.replacement for p in produced)
            for cat in e.categories():
                rows[cat].a += 1
                rows[cat].c += 1
                rows[cat].b += hit
        for p in produced:
            if not any(p.start < e.end and e.start < p.end for e in expected):
                for cat in p.categories():
                    rows[cat].c += 1
    return Report(rows)


def read_key(path) -> list[tuple[str, str]]:
    """Key file: ``original<TAB>corrected`` per line."""
    pairs = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read key {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            orig, sep, corr = line.partition("\t")
            if not sep or "\t" in corr:
                raise InputError(f"{path}:{lineno}: expected 'original<TAB>corrected'")
            pairs.append((orig, corr))
    return pairs
