"""Seeded synthetic persona blogs standing in for crawled influencer posts.

Layout: ``<root>/<domain>/<Raw_Name>.txt``.  Each blog mentions its author's
raw name so that ingestion-time scrubbing has something to remove.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

DOMAIN_VOCAB = {
    "politics": ["election", "parliament", "policy", "diplomacy", "summit", "reform", "governance", "treaty", "voters", "coalition"],
    "economics": ["market", "inflation", "exports", "stocks", "currency", "investment", "trade", "interest rates", "supply chain", "consumers"],
    "technology": ["chips", "software", "artificial intelligence", "startups", "batteries", "satellites", "networks", "research", "smartphones", "data centers"],
    "society": ["education", "housing", "healthcare", "families", "employment", "community", "pensions", "migration", "public services", "young people"],
    "entertainment": ["films", "concerts", "streaming", "celebrities", "box office", "music", "variety shows", "fans", "festivals", "games"],
    "military": ["troops", "frontline", "air defense", "drones", "artillery", "navy", "ceasefire", "border", "weapons", "alliance"],
}
GENERIC_VOCAB = ["the situation", "the public", "the future", "this week", "the latest news", "the debate"]

POSITIVE = ["good", "great", "hope", "progress", "stable", "success", "optimistic", "peace", "opportunity", "recovery"]
NEGATIVE = ["bad", "crisis", "worry", "risk", "decline", "conflict", "fear", "damage", "tension", "loss"]

FIRST = ["Li", "Wang", "Zhang", "Liu", "Chen", "Yang", "Zhao", "Huang", "Zhou", "Wu", "Xu", "Sun", "Ma", "Hu", "Guo", "He"]
LAST = ["Ming", "Hua", "Jun", "Lei", "Fang", "Jing", "Tao", "Yan", "Bo", "Xin", "Qiang", "Li", "Na", "Hao", "Yu", "Wei"]

NEUTRAL_TEMPLATES = [
    "Today I read several reports about {a} and {b}.",
    "Many readers asked me what {a} means for {g}.",
    "Let us look carefully at {a} before drawing conclusions.",
    "The discussion about {a} keeps coming back to {b}.",
    "I spent the afternoon comparing notes on {a} with colleagues.",
    "There are three things to watch in {a} over the coming months.",
]
POSITIVE_TEMPLATES = [
    "I see real {p} in {a} and I am {p2} about {g}.",
    "The {p} around {a} shows what steady work can do.",
    "Honestly, {a} brings {p} news for {g}.",
]
NEGATIVE_TEMPLATES = [
    "The {n} around {a} is growing and {b} could suffer.",
    "I {n2} that {a} will bring more {n} to {g}.",
    "Nobody should ignore the {n} hidden in {a}.",
]


@dataclass
class SyntheticCorpusSpec:
    domains: list = field(default_factory=lambda: list(DOMAIN_VOCAB))
    entities_per_domain: int = 10
    sentences_per_entity: int = 60
    seed: int = 0
    polarity_bias: dict = field(default_factory=dict)
    base_rate: float = 0.25


def _name(rng: random.Random, used: set) -> str:
    while True:
        name = f"{rng.choice(FIRST)} {rng.choice(LAST)}{rng.choice(LAST).lower()}"
        if name not in used:
            used.add(name)
            return name


def _sentence(rng: random.Random, domain: str, p_pos: float, p_neg: float) -> str:
    vocab = DOMAIN_VOCAB.get(domain, GENERIC_VOCAB)
    a, b = rng.sample(vocab, 2)
    g = rng.choice(GENERIC_VOCAB)
    r = rng.random()
    if r < p_pos:
        t = rng.choice(POSITIVE_TEMPLATES)
        return t.format(a=a, b=b, g=g, p=rng.choice(POSITIVE), p2=rng.choice(["optimistic", "hopeful", "glad"]))
    if r < p_pos + p_neg:
        t = rng.choice(NEGATIVE_TEMPLATES)
        return t.format(a=a, b=b, g=g, n=rng.choice(NEGATIVE), n2=rng.choice(["worry", "fear"]))
    return rng.choice(NEUTRAL_TEMPLATES).format(a=a, b=b, g=g)


def generate_corpus(spec: SyntheticCorpusSpec, root: str | Path) -> dict:
    """Write the corpus and return {domain: [raw names]} (the identities to scrub)."""
    root = Path(root)
    rng = random.Random(spec.seed)
    used: set = set()
    written = {}
    for domain in spec.domains:
        bias = spec.polarity_bias.get(domain, 0.0)
        p_pos = max(0.0, spec.base_rate + bias)
        p_neg = max(0.0, spec.base_rate - bias)
        d = root / domain
        d.mkdir(parents=True, exist_ok=True)
        names = []
        for _ in range(spec.entities_per_domain):
            name = _name(rng, used)
            names.append(name)
            paragraphs, current = [], [f"This is {name}, writing about {domain} as usual."]
            for i in range(spec.sentences_per_entity):
                current.append(_sentence(rng, domain, p_pos, p_neg))
                if len(current) >= 6:
                    paragraphs.append(" ".join(current))
                    current = []
            if current:
                paragraphs.append(" ".join(current))
            paragraphs.append(f"Thanks for reading. {name}")
            (d / f"{name.replace(' ', '_')}.txt").write_text("\n\n".join(paragraphs) + "\n", encoding="utf-8")
        written[domain] = names
    return written
