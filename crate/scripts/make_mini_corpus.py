#!/usr/bin/env python3
"""Build data/mini_corpus.tsv from the CMU Pronouncing Dictionary.

Usage: make_mini_corpus.py <path/to/cmudict.dict> [count] > data/mini_corpus.tsv

Pronunciations are syllabified with the maximal-onset rules of Kyle Gorman's
`syllabify` (MIT License, https://github.com/kylebgorman/syllabify) and then
transliterated from ARPABET into single-character DISC-style symbols.
Word selection is a deterministic hash sample, so reruns are byte-identical.
"""

import hashlib
import re
import sys

SLAX = {"IH1", "IH2", "EH1", "EH2", "AE1", "AE2", "AH1", "AH2", "UH1", "UH2"}

O2 = {
    ("P", "R"), ("T", "R"), ("K", "R"), ("B", "R"), ("D", "R"), ("G", "R"),
    ("F", "R"), ("TH", "R"), ("P", "L"), ("K", "L"), ("B", "L"), ("G", "L"),
    ("F", "L"), ("S", "L"), ("K", "W"), ("G", "W"), ("S", "W"), ("S", "P"),
    ("S", "T"), ("S", "K"), ("HH", "Y"), ("R", "W"),
}
O3 = {("S", "T", "R"), ("S", "K", "L"), ("T", "R", "W")}

# ARPABET -> DISC. AA is written `A` because `#` is reserved in corpus files.
DISC = {
    "AA": "A", "AE": "{", "AH0": "@", "AH": "V", "AO": "$", "AW": "6",
    "AY": "2", "EH": "E", "ER": "3", "EY": "1", "IH": "I", "IY": "i",
    "OW": "5", "OY": "4", "UH": "U", "UW": "u",
    "B": "b", "CH": "J", "D": "d", "DH": "D", "F": "f", "G": "g", "HH": "h",
    "JH": "_", "K": "k", "L": "l", "M": "m", "N": "n", "NG": "N", "P": "p",
    "R": "r", "S": "s", "SH": "S", "T": "t", "TH": "T", "V": "v", "W": "w",
    "Y": "j", "Z": "z", "ZH": "Z",
}


def is_vowel(seg):
    return seg[-1] in "012"


def syllabify(pron):
    nuclei, onsets = [], []
    last = -1
    for j, seg in enumerate(pron):
        if is_vowel(seg):
            nuclei.append([seg])
            onsets.append(pron[last + 1:j])
            last = j
    if not nuclei:
        return None
    codas = []
    for i in range(1, len(onsets)):
        coda = []
        if len(onsets[i]) > 1 and onsets[i][0] == "R":
            nuclei[i - 1].append(onsets[i].pop(0))
        if len(onsets[i]) > 2 and onsets[i][-1] == "Y":
            nuclei[i].insert(0, onsets[i].pop())
        if len(onsets[i]) > 1 and nuclei[i - 1][-1] in SLAX and onsets[i][0] == "S":
            coda.append(onsets[i].pop(0))
        depth = 1
        if len(onsets[i]) > 1 and tuple(onsets[i][-2:]) in O2:
            depth = 3 if len(onsets[i]) >= 3 and tuple(onsets[i][-3:]) in O3 else 2
        while len(onsets[i]) > depth:
            coda.append(onsets[i].pop(0))
        codas.append(coda)
    codas.append(pron[last + 1:])
    return [o + n + c for o, n, c in zip(onsets, nuclei, codas)]


def disc(seg):
    if seg == "AH0":
        return DISC["AH0"]
    return DISC[seg.rstrip("012")]


def main():
    path = sys.argv[1]
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 4000
    seen = set()
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.split("#")[0].split()
            if len(parts) < 2:
                continue
            word, pron = parts[0], parts[1:]
            if not re.fullmatch(r"[a-z]{2,14}", word) or word in seen:
                continue
            seen.add(word)
            syllables = syllabify(pron)
            if syllables is None:
                continue
            text = "-".join("".join(disc(s) for s in syl) for syl in syllables)
            key = hashlib.sha1(word.encode()).hexdigest()
            entries.append((key, word, text))
    entries.sort()
    picked = sorted(entries[:count], key=lambda e: e[1])
    print("# Mini syllabified English lexicon (DISC-style symbols, `A` for DISC `#`).")
    print("# Derived from the CMU Pronouncing Dictionary (BSD-style licence, see")
    print("# data/CMUDICT_LICENSE) with maximal-onset syllabification.")
    print("# Regenerate with scripts/make_mini_corpus.py.")
    for _, word, text in picked:
        print(f"{word}\t{text}")


if __name__ == "__main__":
    main()
