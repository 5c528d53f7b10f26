#!/usr/bin/env python3
"""Regenerates the small corpora used by the tests. Output is deterministic."""
import csv
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = random.Random(20250611)

openers = [
    "I lost my job today and I do not know what to do.",
    "My dog passed away last night, I miss him so much.",
    "I finally got accepted into the program I wanted!",
    "My sister has not talked to me in weeks.",
    "I failed my driving test again.",
    "We are moving to a new city next month and I am nervous.",
    "My grandmother is in the hospital.",
    "I had a great time at the concert yesterday.",
    "Nobody came to my birthday party.",
    "I think my friends are ignoring me.",
]
follow_ups = [
    "Yeah, it has been a rough week.",
    "I guess so, thanks for listening.",
    "It was on Tuesday, around noon.",
    "We have been planning it for a while.",
    "I am not sure, maybe later.",
    "My brother said the same thing.",
]
replies = {
    1: ["Oh, what time was that?", "Did you watch the game last night?", "Okay."],
    2: ["That sounds hard, I am sorry.", "Oh no, that must be difficult.", "I hope things get better."],
    3: ["That sounds really painful, it makes sense you feel lost. What would help most right now?",
        "I can hear how much this means to you. Do you want to talk about what happened?",
        "You must feel so hurt. I am here for you, is there anything I can do?"],
}


def rows_for(conv, exchanges, with_level_on_speaker=False):
    out = []
    turn = 0
    for k in range(exchanges):
        text = rng.choice(openers) if k == 0 else rng.choice(follow_ups)
        out.append({"conversation_id": conv, "turn_index": turn, "role": "speaker", "text": text, "level": ""})
        turn += 1
        level = rng.choice([1, 2, 3])
        out.append({"conversation_id": conv, "turn_index": turn, "role": "listener",
                    "text": rng.choice(replies[level]), "level": level})
        turn += 1
    return out


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["conversation_id", "turn_index", "role", "text", "level"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


# EDR style: 56 conversations with three exchanges, 23 with two.
edr = []
for i in range(79):
    edr += rows_for(f"edr{i:03d}", 3 if i < 56 else 2)
write(HERE / "edr.csv", edr)

# EX style: openers plus follow-ups, forty conversations.
ex = []
for i in range(40):
    ex += rows_for(f"ex{i:03d}", rng.choice([2, 3]))
write(HERE / "ex.csv", ex)

lexicon = {
    "lost": (0.18, 0.56), "job": (0.55, 0.45), "miss": (0.25, 0.40), "dog": (0.80, 0.55),
    "passed": (0.45, 0.35), "finally": (0.70, 0.52), "accepted": (0.88, 0.58), "wanted": (0.66, 0.55),
    "failed": (0.10, 0.60), "test": (0.40, 0.62), "nervous": (0.20, 0.80), "hospital": (0.22, 0.70),
    "great": (0.94, 0.72), "concert": (0.85, 0.80), "party": (0.92, 0.86), "ignoring": (0.15, 0.48),
    "rough": (0.21, 0.60), "thanks": (0.89, 0.35), "sorry": (0.20, 0.38), "hard": (0.30, 0.60),
    "difficult": (0.19, 0.62), "hope": (0.88, 0.55), "better": (0.85, 0.45), "painful": (0.06, 0.81),
    "hurt": (0.08, 0.72), "help": (0.80, 0.54), "happy": (1.00, 0.74), "sad": (0.05, 0.29),
    "move": (0.55, 0.60), "new": (0.73, 0.55), "friends": (0.92, 0.50), "birthday": (0.90, 0.74),
}
with open(HERE / "lexicon.tsv", "w") as f:
    f.write("word\tvalence\tarousal\tdominance\n")
    for w, (v, a) in sorted(lexicon.items()):
        f.write(f"{w}\t{v:.3f}\t{a:.3f}\t0.500\n")
