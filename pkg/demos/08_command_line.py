"""
The command-line tools
======================

Train word models and a language model from plain files, correct a file
in batch and incremental mode, then score the run.  Everything happens in
a scratch directory.
"""
import pathlib
import tempfile

from lexrec.cli import main

tmp = pathlib.Path(tempfile.mkdtemp())
(tmp / "words.txt").write_text("he\ngave\nher\nroses\nhave\n")
(tmp / "tags.txt").write_text("PN\nVB\nNN\nhe\tPN\nher\tPN\ngave\tVB\nhave\tVB\nroses\tNN\n")
(tmp / "tagged.txt").write_text("he/PN gave/VB her/PN roses/NN\nhe/PN have/VB roses/NN\n")
(tmp / "input.txt").write_text("he gaveher roses\nhe hve roses\nhe gave her roses\n")
(tmp / "key.txt").write_text("he gaveher roses\the gave her roses\nhe hve roses\the have roses\n")


def run(*argv):
    print("$ lexrec", " ".join(str(a).replace(str(tmp) + "/", "") for a in argv))
    code = main([str(a) for a in argv])
    print(f"  exit {code}")
    return code


run("train-od", "--lexicon", tmp / "words.txt", "--out", tmp / "models")
run("train-ld", "--ld", "bigram", "--tagged", tmp / "tagged.txt", "--tags", tmp / "tags.txt", "--out", tmp / "ld.txt")
run("correct", tmp / "input.txt", "--models", tmp / "models", "--ld", tmp / "ld.txt", "--out", tmp / "out.txt")
print((tmp / "out.txt").read_text())
run("correct", tmp / "input.txt", "--models", tmp / "models", "--ld", tmp / "ld.txt", "--tags", "--incremental")

(tmp / "run.cfg").write_text(f"models = {tmp / 'models'}\nld = {tmp / 'ld.txt'}\nbeam = 8\n")
run("correct", tmp / "input.txt", "--config", tmp / "run.cfg", "--out", tmp / "out2.txt")
print("beam 8 output identical:", (tmp / "out.txt").read_text() == (tmp / "out2.txt").read_text())

run("evaluate", "--input", tmp / "input.txt", "--output", tmp / "out.txt", "--key", tmp / "key.txt")
run("gen-errors", "--word", "roses", "--functions", "transposition")
