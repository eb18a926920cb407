"""
Scoring a correction run
========================

Errors in the key are aligned token by token and classified; recall
counts the key errors fixed exactly, precision also charges changes the
system made where nothing was wrong.
"""
from lexrec import evaluate as ev

key = [
    ("he gaveher roses", "he gave her roses"),
    ("hav e roses", "have roses"),
    ("aboue the cars", "above the cars"),
    ("he gave the roses", "he gave her roses"),
]
run = [
    ("he gaveher roses", "he gave her roses"),
    ("hav e roses", "have roses"),
    ("aboue the cars", "above the cars"),
    ("he gave the roses", "he gave the roses"),  # real-word error missed
    ("the cars", "them cars"),                   # a correct line made wrong
]
lexicon = {"he", "gave", "her", "roses", "have", "e", "above", "the", "them", "cars"}

for orig, corr in key:
    for c in ev.changes(orig, corr, lexicon):
        cls = c.cls
        print(f"{' '.join(c.original)!r:14} -> {' '.join(c.replacement)!r:12} "
              f"{cls.kind:11} {'real-word' if cls.real_word else 'nonword'}")

report = ev.evaluate(run, key, lexicon)
report.check()
print()
print(report.pretty())
