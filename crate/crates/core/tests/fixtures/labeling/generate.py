"""Builds the labeling fixture: 50 posts, their comment trees and gold labels.

Gold labels are written from each scenario's intent (which sentences a
comment targets and whether its thread wins a delta), not by running the
labeler. Post counts per split follow the 1/1000-scaled dataset sizes:
attacked 26/9/9, successful 4/1/1, plus 6 unattacked posts.

Run from this directory: python3 generate.py
"""

import json
import random

rng = random.Random(7)

ONSETS = ["b", "br", "c", "cl", "d", "dr", "f", "fl", "g", "gr", "k", "l", "m", "n", "p", "pl", "r", "s", "st", "t", "tr", "v", "z"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ou"]
CODAS = ["", "n", "r", "l", "m", "x", "nd", "st"]

used = set()


def word():
    while True:
        w = "".join(rng.choice(ONSETS) + rng.choice(VOWELS) for _ in range(rng.choice([2, 3]))) + rng.choice(CODAS)
        if w not in used and len(w) >= 5:
            used.add(w)
            return w


def sentence(n_words=5):
    ws = [word() for _ in range(n_words)]
    text = f"{ws[0].capitalize()} {ws[1]} the {ws[2]} of {ws[3]} and {ws[4]}"
    for w in ws[5:]:
        text += f" with {w}"
    return text + ".", ws


def rebuttal():
    a, b, c = word(), word(), word()
    return f"Honestly {a} {b} is unlike {c}."


def typo(text, n):
    chars = list(text)
    inner = [i for i in range(1, len(chars) - 1)
             if chars[i].isalpha() and chars[i - 1].isalpha() and chars[i + 1].isalpha()]
    for i in rng.sample(inner, n):
        chars[i] = "q" if chars[i] != "q" else "j"
    return "".join(chars)


class Post:
    def __init__(self, pid, t, n_sent):
        self.id = pid
        self.t = t
        self.sentences = []
        self.words = []
        for _ in range(n_sent):
            s, ws = sentence(rng.choice([5, 5, 6, 7]))
            self.sentences.append(s)
            self.words.append(ws)
        self.comments = []
        self.attacked = set()
        self.successful = set()
        self.scenario = ""
        self.next_c = 0

    def body(self):
        # mix of inline sentences and paragraph breaks
        out = []
        for i, s in enumerate(self.sentences):
            out.append(s)
            out.append("\n\n" if i % 4 == 3 else " ")
        return "".join(out).strip()

    def comment(self, body, parent=None, delta=False):
        self.next_c += 1
        cid = f"{self.id}_c{self.next_c}"
        self.comments.append({
            "id": cid,
            "post_id": self.id,
            "parent_id": parent,
            "body": body,
            "created_utc": self.t + 60 * self.next_c,
            "delta_awarded": delta,
        })
        return cid


def quote_block(text, marker=">"):
    return f"{marker} {text}\n\n{rebuttal()}"


def quotes_body(post, idxs, marker=">"):
    return "\n\n".join(quote_block(post.sentences[i], marker) for i in idxs)


def echo(post, i, k):
    ws = post.words[i][:k]
    extra = [word(), word()]
    return f"You keep saying {' '.join(ws)} but {extra[0]} beats {extra[1]}."


def pick(post, k):
    return sorted(rng.sample(range(len(post.sentences)), k))


# scenarios for attacked but never successful posts
def a_exact(p):
    [i] = pick(p, 1)
    p.comment(quotes_body(p, [i]))
    p.attacked |= {i}


def a_typo(p):
    [i] = pick(p, 1)
    p.comment(quote_block(typo(p.sentences[i], 2)))
    p.attacked |= {i}


def a_partial(p):
    [i] = pick(p, 1)
    words = p.sentences[i].split()
    p.comment(quote_block(" ".join(words[2:])))
    p.attacked |= {i}


def a_span(p):
    i = rng.randrange(len(p.sentences) - 1)
    p.comment(quote_block(p.sentences[i] + " " + p.sentences[i + 1]))
    p.attacked |= {i, i + 1}


def a_implicit(p):
    [i] = pick(p, 1)
    p.comment(echo(p, i, 4))
    p.attacked |= {i}


def a_many_quotes_delta(p):
    idxs = pick(p, 4)
    p.comment(quotes_body(p, idxs), delta=True)
    p.attacked |= set(idxs)


def a_new_sentence_delta(p):
    i, j = pick(p, 2)
    top = p.comment(quotes_body(p, [i]))
    p.comment(quotes_body(p, [j]), parent=top, delta=True)
    p.attacked |= {i}


def a_external(p):
    i, j = pick(p, 2)
    outside = " ".join(sentence()[0] for _ in range(2))
    p.comment(quote_block(p.sentences[i] + " " + outside))
    p.comment(quotes_body(p, [j], marker="&gt;"))
    p.attacked |= {j}


def a_twice(p):
    [i] = pick(p, 1)
    p.comment(quotes_body(p, [i]))
    p.comment(quotes_body(p, [i]))
    p.attacked |= {i}


def a_weak_echoes(p):
    i, j, k = pick(p, 3)
    p.comment(f"Because it is what they said there, and they would have been there too.")
    p.comment(echo(p, i, 3))
    p.comment(quotes_body(p, [k]))
    p.attacked |= {k}


def a_reply_only_quote(p):
    i, j = pick(p, 2)
    top = p.comment(quotes_body(p, [i]))
    p.comment(quotes_body(p, [j]), parent=top)
    p.attacked |= {i}


ATTACKED = [a_exact, a_typo, a_partial, a_span, a_implicit, a_many_quotes_delta,
            a_new_sentence_delta, a_external, a_twice, a_weak_echoes, a_reply_only_quote]


# scenarios producing successful sentences
def s_exact_delta(p):
    i, j = pick(p, 2)
    p.comment(quotes_body(p, [i]), delta=True)
    p.comment(quotes_body(p, [j]))
    p.attacked |= {i, j}
    p.successful |= {i}


def s_typo_deep_delta(p):
    [i] = pick(p, 1)
    top = p.comment(quote_block(typo(p.sentences[i], 1)))
    mid = p.comment("Not convinced yet.", parent=top)
    p.comment("Fair enough, you changed my mind.", parent=mid, delta=True)
    p.attacked |= {i}
    p.successful |= {i}


def s_implicit_delta(p):
    [i] = pick(p, 1)
    p.comment(echo(p, i, 5), delta=True)
    p.attacked |= {i}
    p.successful |= {i}


def s_three_quotes_delta(p):
    idxs = pick(p, 3)
    top = p.comment(quotes_body(p, idxs))
    p.comment("Good points.", parent=top, delta=True)
    p.attacked |= set(idxs)
    p.successful |= set(idxs)


def s_requote_same(p):
    i, j = pick(p, 2)
    top = p.comment(quotes_body(p, [i, j]))
    p.comment(quotes_body(p, [j]), parent=top, delta=True)
    p.attacked |= {i, j}
    p.successful |= {i, j}


def s_mixed(p):
    i, j, k = pick(p, 3)
    p.comment(quotes_body(p, [i, j]), delta=True)
    p.comment(quotes_body(p, [j, k]))
    excluded = p.comment(quotes_body(p, [0, 1, 2, 3]) if len(p.sentences) > 4 else quotes_body(p, [k]))
    p.attacked |= {i, j, k}
    p.successful |= {i, j}
    if len(p.sentences) > 4:
        p.attacked |= {0, 1, 2, 3}


SUCCESSFUL = [s_exact_delta, s_typo_deep_delta, s_implicit_delta, s_three_quotes_delta, s_requote_same, s_mixed]


# scenarios leaving a post unattacked
def u_none(p):
    pass


def u_external(p):
    [i] = pick(p, 1)
    outside = " ".join(sentence()[0] for _ in range(2))
    p.comment(quote_block(p.sentences[i] + " " + outside))


def u_stopwords(p):
    p.comment("Because it is what they said there, and they would have been there too.")


def u_three_words(p):
    [i] = pick(p, 1)
    p.comment(echo(p, i, 3))


def u_plain(p):
    p.comment(f"{rebuttal()} {rebuttal()}")


def u_reply_only(p):
    top = p.comment(rebuttal())
    [i] = pick(p, 1)
    p.comment(quotes_body(p, [i]), parent=top, delta=True)


UNATTACKED = [u_none, u_external, u_stopwords, u_three_words, u_plain, u_reply_only]

# per split: (attacked-only, successful, unattacked)
PLAN = {"train": (22, 4, 4), "val": (8, 1, 1), "test": (8, 1, 1)}
BASE = {"train": 1_400_000_000, "val": 1_500_000_000, "test": 1_600_000_000}

posts = []
a_cycle = 0
s_cycle = 0
u_cycle = 0
for split, (n_a, n_s, n_u) in PLAN.items():
    kinds = ["a"] * n_a + ["s"] * n_s + ["u"] * n_u
    rng.shuffle(kinds)
    for k, kind in enumerate(kinds):
        p = Post(f"{split}{k:02d}", BASE[split] + 3600 * k, rng.randint(8, 20))
        if kind == "a":
            f = ATTACKED[a_cycle % len(ATTACKED)]
            a_cycle += 1
        elif kind == "s":
            f = SUCCESSFUL[s_cycle % len(SUCCESSFUL)]
            s_cycle += 1
        else:
            f = UNATTACKED[u_cycle % len(UNATTACKED)]
            u_cycle += 1
        p.scenario = f.__name__
        f(p)
        posts.append((split, p))

with open("posts.jsonl", "w") as fh:
    for _, p in posts:
        fh.write(json.dumps({"id": p.id, "title": f"Post {p.id}", "body": p.body(), "author": "op",
                             "created_utc": p.t}) + "\n")

with open("comments.jsonl", "w") as fh:
    for _, p in posts:
        for c in p.comments:
            fh.write(json.dumps(c) + "\n")

gold = {
    "split": {"train_end_utc": BASE["val"] - 1, "val_end_utc": BASE["test"] - 1, "test_end_utc": BASE["test"] + 10**6},
    "posts": [
        {"id": p.id, "split": split, "scenario": p.scenario, "n_sentences": len(p.sentences),
         "attacked": sorted(p.attacked), "successful": sorted(p.successful)}
        for split, p in posts
    ],
    "datasets": {
        split: {"attacked_posts": n_a + n_s, "successful_posts": n_s} for split, (n_a, n_s, _) in PLAN.items()
    },
}
with open("gold.json", "w") as fh:
    json.dump(gold, fh, indent=1)
    fh.write("\n")
