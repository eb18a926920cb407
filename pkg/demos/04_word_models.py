"""
Word models and isolated word recognition
=========================================

Every lexicon word gets a left-to-right HMM trained on its own corrupted
spellings.  Recognising a single typed word means finding the model with
the cheapest alignment.
"""
import tempfile

from lexrec import od

words = ["show", "me", "all", "cars", "house", "horse", "mouse"]
lexicon = od.train_lexicon(words)
print(f"{len(lexicon)} models over {lexicon.alphabet.size} symbols")

m = lexicon[" show"]
print("states:", m.hmm.num_states, "(entry, space, s, h, o, w, exit)")

for typed in ["sohw", "shw", "hosue", "mose", "cras", "xyz"]:
    word, cost = od.best_word_isolated(lexicon, typed)
    print(f"{typed!r:8} -> {word.strip()!r:8} cost {cost:6.2f}")

# A narrow beam switches off models that fall behind early on.
print("beam 3:", od.best_word_isolated(lexicon, "hosue", beam=3.0))

# Lexicons save as a manifest plus one file per model.
with tempfile.TemporaryDirectory() as tmp:
    lexicon.save(tmp)
    again = od.Lexicon.load(tmp)
    print("reloaded ids:", again.ids)
