#!/usr/bin/env python3
"""Regenerates the fixture corpus. Output is fully determined by SEED."""

import json
import random
import struct
from pathlib import Path

SEED = 20240611
HERE = Path(__file__).resolve().parent

ANCHORS = {
    "pink": (234, 147, 153),
    "red": (190, 0, 50),
    "orange": (243, 132, 0),
    "brown": (111, 78, 55),
    "yellow": (243, 195, 0),
    "olive": (102, 93, 30),
    "yellow-green": (141, 182, 0),
    "green": (0, 136, 86),
    "blue": (0, 103, 165),
    "purple": (154, 78, 174),
    "white": (242, 243, 244),
    "gray": (132, 132, 130),
    "black": (34, 34, 34),
}
ACHROMATIC = {"white", "gray", "black"}

# surface forms, count, foreground color weights
WORDS = [
    (["hot"] * 20 + ["Hot"] * 3, {"red": 6, "orange": 3, "yellow": 1}),
    (["warm"] * 18, {"orange": 4, "red": 2, "yellow": 3, "brown": 1}),
    (["cold"] * 20, {"blue": 6, "white": 2, "gray": 1}),
    (["chilly"] * 16, {"blue": 4, "purple": 2, "white": 2}),
    (["love"] * 20, {"pink": 5, "red": 4, "purple": 1}),
    (["happy"] * 18, {"yellow": 4, "orange": 2, "pink": 2, "green": 1}),
    (["sad"] * 16, {"gray": 4, "blue": 3, "black": 2}),
    (["day"] * 16, {"yellow": 4, "white": 3, "orange": 1}),
    (["night"] * 16, {"black": 4, "blue": 3, "purple": 2}),
    (["meet"] * 6 + ["meets"] * 5 + ["meeting"] * 5, {c: 1 for c in ANCHORS}),
    (["rare"] * 4, {"green": 1, "olive": 1}),
]
NOISE = ["the", "The", "of", "a", "and", "in", "2019", "3", "1984", "e-mail", "rock'n'roll", "x-ray"]


def jitter(rgb, rng, spread=6):
    return [max(0, min(255, c + rng.randint(-spread, spread))) for c in rgb]


def pick(weights, rng):
    names = sorted(weights)
    return rng.choices(names, [weights[n] for n in names])[0]


def background(fg, rng):
    if fg in ACHROMATIC:
        return "black" if fg == "white" else "white"
    return rng.choice(["white", "white", "black", "gray"])


def observations(rng):
    rows = []
    for forms, weights in WORDS:
        for form in forms:
            fg = pick(weights, rng)
            rows.append((form, fg, background(fg, rng)))
    # achromatic text on chromatic ground: removed by the drop rule
    rows += [("glad", "yellow", "white")] * 4 + [("glad", "white", "red"), ("glad", "black", "yellow")]
    rows += [("hot", "black", "red"), ("day", "white", "blue")]
    for word in NOISE:
        rows.append((word, rng.choice(sorted(ANCHORS)), "white"))
    rng.shuffle(rows)

    lines = []
    for i, (word, fg, bg) in enumerate(rows):
        rec = {"word": word, "fg_rgb": jitter(ANCHORS[fg], rng), "bg_rgb": jitter(ANCHORS[bg], rng)}
        if i % 10 == 0:
            rec["source"] = f"cover-{i:04d}.ppm"
        lines.append(json.dumps(rec, separators=(",", ":")))
    return lines


def embeddings(rng):
    dim = 8
    base = {k: [rng.gauss(0, 1) for _ in range(dim)] for k in ("temp", "mood", "time", "misc")}
    groups = {
        "hot": "temp", "warm": "temp", "cold": "temp", "chilly": "temp",
        "love": "mood", "happy": "mood", "glad": "mood", "sad": "mood",
        "day": "time", "night": "time",
        "rare": "misc", "book": "misc", "cover": "misc",
    }
    rows = []
    for word in sorted(groups):
        v = [b + rng.gauss(0, 0.6) for b in base[groups[word]]]
        rows.append(word + " " + " ".join(f"{x:.6f}" for x in v))
    return [f"{len(rows)} {dim}"] + rows


PAIRS = [
    ("hot", "warm", "synonym", "adj.all"),
    ("cold", "chilly", "synonym", "adj.all"),
    ("happy", "glad", "synonym", "adj.all"),
    ("love", "happy", "synonym", "noun.feeling"),
    ("hot", "cold", "antonym", "adj.all"),
    ("warm", "chilly", "antonym", "adj.all"),
    ("happy", "sad", "antonym", "adj.all"),
    ("day", "night", "antonym", "noun.time"),
    ("wax", "wane", "antonym", "verb.change"),
    ("meet", "night", "antonym", "verb.social"),
]


def ppm(path, width, height, pixel):
    body = bytearray()
    for y in range(height):
        for x in range(width):
            body += bytes(pixel(x, y))
    path.write_bytes(b"P6\n# fixture\n%d %d\n255\n" % (width, height) + bytes(body))


def images(rng):
    out = HERE / "images"
    out.mkdir(exist_ok=True)

    def glyph(fg, bg):
        # a thick bar as the "text", well under half the crop
        return lambda x, y: jitter(fg if 4 <= y < 8 and 3 <= x < 21 else bg, rng, 3)

    ppm(out / "hot.ppm", 24, 12, glyph(ANCHORS["red"], ANCHORS["white"]))
    ppm(out / "cold.ppm", 24, 12, glyph(ANCHORS["blue"], ANCHORS["white"]))
    ppm(out / "night.ppm", 24, 12, glyph(ANCHORS["white"], ANCHORS["black"]))
    (out / "broken.ppm").write_bytes(b"P6\n24 12\n255\n" + bytes(10))
    (out / "images.tsv").write_text(
        "hot.ppm\thot\ncold.ppm\tcold\nnight.ppm\tnight\nbroken.ppm\tday\n"
    )


def main():
    rng = random.Random(SEED)
    (HERE / "observations.jsonl").write_text("\n".join(observations(rng)) + "\n")
    (HERE / "lemmas.tsv").write_text("meets\tmeet\nmeeting\tmeet\nhotter\thot\n")
    (HERE / "stopwords.txt").write_text("the\nof\na\nand\nin\n")
    (HERE / "embeddings.txt").write_text("\n".join(embeddings(rng)) + "\n")
    (HERE / "pairs.tsv").write_text("".join("\t".join(p) + "\n" for p in PAIRS))
    images(rng)


if __name__ == "__main__":
    main()
