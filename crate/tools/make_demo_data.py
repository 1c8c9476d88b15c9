"""Writes the synthetic demo lexicons bundled under crates/core/assets/data.

The words are generated from simple syllable templates; they imitate the
phonotactics of the two protolanguages only loosely and are not real
reconstructions.
"""
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates/core/assets/data"


def make(rng, n, onsets, vowels, codas, coda_p, max_syl, fixed=()):
    words = list(dict.fromkeys(fixed))
    seen = set(words)
    while len(words) < n:
        syls = rng.choice(range(1, max_syl + 1))
        w = ""
        for s in range(syls):
            if s > 0 or rng.random() < 0.85:
                w += rng.choice(onsets)
            w += rng.choice(vowels)
            if rng.random() < coda_p and (s == syls - 1 or rng.random() < 0.4):
                w += rng.choice(codas)
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def write(name, header, words):
    text = "".join(f"# {h}\n" for h in header) + "".join(w + "\n" for w in words)
    (OUT / name).write_text(text, encoding="utf-8")


def main():
    rng = random.Random(20240601)
    poc = make(
        rng, 300,
        onsets="p t k b d g m n ŋ s r l w j".split(),
        vowels="a a a e i o u u".split(),
        codas="p t k m n ŋ s r l".split(),
        coda_p=0.45, max_syl=3,
        fixed=["talun", "tumpul", "suat", "manuk", "tasik", "ikan", "mata"],
    )
    write("poc_lexicon.txt", ["Synthetic Oceanic-style lexicon for demos; not reconstructed data."], poc)

    ptk = make(
        rng, 300,
        onsets="p t k tʰ kʰ pʰ ts m n ŋ s r l w j h".split(),
        vowels="a a ə i u o e".split(),
        codas="m n ŋ p t k r".split(),
        coda_p=0.6, max_syl=2,
        fixed=["tʰum", "sam", "kʰaŋ", "tsət"],
    )
    write("ptk_lexicon.txt", ["Synthetic Tangkhulic-style lexicon for demos; not reconstructed data."], ptk)

    onsets = "b bl br c ch cr d dr f fl fr g gl gr h j k l m n p pl pr r s sc sl sm sn sp st str t tr v w".split()
    vowels = "a e i o u ea ai ou oo ie".split()
    codas = "b ck d ft g k l ld lk m mp n nd nk nt p r rd rk rn s sh st t x".split()
    fixed = [
        "apolated", "acklay", "anspeckonre", "neyingersalved", "savolcomish", "sataphier",
        "neroceash", "avockdentivery", "tranalk", "albalmenests", "sureau", "niatle",
        "possm", "wanlini", "gargro", "sunt", "tapere", "einstein",
    ]
    nonce = make(rng, 240, onsets, vowels, codas, coda_p=0.5, max_syl=3, fixed=fixed)
    write("nonce_words.txt", ["Pronounceable pseudowords used as seed inputs."], nonce)

    # lexicon for demo_cascade.txt; every law there changes 9 to 41 of these words
    rng = random.Random(77)
    on, vo, co = "p t k m n ŋ s r l w h f v".split(), "a a e i o u".split(), "k t n ŋ s r".split()
    demo, seen = [], set()
    while len(demo) < 200:
        syl = rng.choice([2, 2, 3])
        w = ""
        for s in range(syl):
            if s > 0 or rng.random() < 0.8:
                w += rng.choice(on)
            w += rng.choice(vo)
            if rng.random() < 0.25:
                w += rng.choice(co)
        if w not in seen:
            seen.add(w)
            demo.append(w)
    write("demo_lexicon.txt", ["Synthetic lexicon for the demo cascade."], demo)


if __name__ == "__main__":
    main()
