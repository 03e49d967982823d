"""Corpus-adapted sentiment lexicon and continuous valence scoring.

Lexicon adaptation: frequent corpus terms that are not seeds get a polarity
from the difference of their pointwise mutual information with sentences that
contain positive seeds and sentences that contain negative seeds, computed
over sentence co-occurrence.  Terms whose polarity falls inside the neutral
band are screened out as emotionless.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import InvalidInput
from .opinion import split_sentences

_CJK = "㐀-䶿一-鿿豈-﫿"
_TOKEN = re.compile(rf"[{_CJK}]+|[^\W_{_CJK}]+(?:'[^\W_{_CJK}]+)*|[.!?。！？;；]")
_BOUNDARY = set(".!?。！？;；")

STOPWORDS = frozenset(
    """a an the and or but if of to in on at by for with from as is are was were be been being this that these
    those it its it's i you he she we they me him her us them my your his our their there here what which who whom
    when where why how will would can could should may might must shall do does did have has had having than then
    so such very more most also just about into over under again further once all any both each few other some own
    same too only s t ll re ve d m""".split()
)


@dataclass
class SentimentLexicon:
    entries: dict = field(default_factory=dict)
    negators: list = field(default_factory=list)
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        for term, p in self.entries.items():
            if not -1.0 <= p <= 1.0:
                raise InvalidInput(f"polarity of {term!r} outside [-1, 1]: {p}")
            self.source.setdefault(term, "seed")
        overlap = set(self.negators) & set(self.entries)
        if overlap:
            raise InvalidInput(f"negators overlap sentiment terms: {sorted(overlap)}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, term: str) -> bool:
        return term in self.entries

    def vocabulary(self) -> set:
        return set(self.entries) | set(self.negators)

    def to_tsv(self) -> str:
        return "".join(f"{t}\t{p:.6g}\n" for t, p in sorted(self.entries.items()))


@dataclass
class AdaptationConfig:
    min_count: int = 3
    pmi_threshold: float = 0.5
    window: int = 2
    neutral_band: float = 0.1
    smoothing: float = 0.5

    def __post_init__(self):
        if self.pmi_threshold <= 0:
            raise InvalidInput("pmi_threshold must be positive")
        if self.window < 1:
            raise InvalidInput("window must be >= 1")
        if self.min_count < 1:
            raise InvalidInput("min_count must be >= 1")


def read_lexicon(path: str | Path, negator_path: str | Path | None = None) -> SentimentLexicon:
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        term, pol = line.split("\t")
        entries[term.strip().lower()] = float(pol)
    negators = []
    if negator_path is not None:
        negators = [w.strip().lower() for w in Path(negator_path).read_text(encoding="utf-8").splitlines() if w.strip()]
    return SentimentLexicon(entries, negators)


def default_lexicon() -> SentimentLexicon:
    data = resources.files("mavens") / "data"
    with resources.as_file(data / "seed_lexicon.tsv") as lex, resources.as_file(data / "negators.txt") as neg:
        return read_lexicon(lex, neg)


def tokenize(text: str, vocabulary: Iterable[str] = ()) -> list[str]:
    """Lowercase word tokens plus sentence-boundary marks.

    CJK runs are segmented by forward maximum matching against ``vocabulary``;
    characters not covered by any vocabulary word become single-char tokens.
    """
    vocab = [v for v in vocabulary if v and re.match(rf"[{_CJK}]", v)]
    longest = max((len(v) for v in vocab), default=1)
    vset = set(vocab)
    out = []
    for tok in _TOKEN.findall(text.lower().replace("\u2019", "'")):
        if not re.match(rf"[{_CJK}]", tok):
            out.append(tok)
            continue
        i = 0
        while i < len(tok):
            for n in range(min(longest, len(tok) - i), 0, -1):
                if n == 1 or tok[i : i + n] in vset:
                    out.append(tok[i : i + n])
                    i += n
                    break
    return out


def _is_candidate(tok: str) -> bool:
    if tok in _BOUNDARY or tok in STOPWORDS or tok.isdigit():
        return False
    return len(tok) >= 2 or bool(re.match(rf"[{_CJK}]", tok))


def build_lexicon(corpus: Iterable[str], seed: SentimentLexicon, cfg: AdaptationConfig | None = None) -> SentimentLexicon:
    """Seed lexicon plus polar corpus terms discovered by PMI difference."""
    cfg = cfg or AdaptationConfig()
    if not seed.entries:
        raise InvalidInput("seed lexicon must be non-empty")
    corpus = list(corpus)
    vocab = seed.vocabulary()
    sentences = [set(tokenize(s, vocab)) for text in corpus for s in split_sentences(text)]
    sentences = [s for s in sentences if s]
    result = SentimentLexicon(dict(seed.entries), list(seed.negators), dict(seed.source))
    if not sentences:
        return result

    counts = Counter(t for text in corpus for t in tokenize(text, vocab))
    pos_seeds = {t for t, p in seed.entries.items() if p > 0}
    neg_seeds = {t for t, p in seed.entries.items() if p < 0}
    n = len(sentences)
    n_pos = n_neg = 0
    df, joint_pos, joint_neg = Counter(), Counter(), Counter()
    for toks in sentences:
        has_pos, has_neg = bool(toks & pos_seeds), bool(toks & neg_seeds)
        n_pos += has_pos
        n_neg += has_neg
        for t in toks:
            df[t] += 1
            joint_pos[t] += has_pos
            joint_neg[t] += has_neg

    def pmi(joint: int, n_c: int, n_s: int) -> float:
        if n_s == 0:
            return 0.0
        return math.log2((joint + cfg.smoothing) * n / (n_c * n_s))

    negators = set(seed.negators)
    for term in sorted(counts):
        if counts[term] < cfg.min_count or term in seed.entries or term in negators or not _is_candidate(term):
            continue
        pmi_pos = pmi(joint_pos[term], df[term], n_pos)
        pmi_neg = pmi(joint_neg[term], df[term], n_neg)
        if max(pmi_pos, pmi_neg) < cfg.pmi_threshold:
            continue
        polarity = max(-1.0, min(1.0, pmi_pos - pmi_neg))
        if abs(polarity) < cfg.neutral_band:
            continue
        result.entries[term] = polarity
        result.source[term] = "discovered"
    return result


def score_text(text: str, lexicon: SentimentLexicon, cfg: AdaptationConfig | None = None) -> float:
    """Valence of ``text`` in [-1, 1].

    Each matched term contributes its polarity, sign-flipped when a negator
    sits within the preceding ``cfg.window`` tokens of the same sentence.  The
    sum is divided by the total absolute polarity of the matched terms, so a
    text of only +1/-1 terms scores their plain mean.
    """
    cfg = cfg or AdaptationConfig()
    if not lexicon.entries:
        raise InvalidInput("lexicon must be non-empty")
    negators = set(lexicon.negators)
    total, weight = 0.0, 0.0
    recent: list[str] = []
    for tok in tokenize(text, lexicon.vocabulary()):
        if tok in _BOUNDARY:
            recent = []
            continue
        if tok in lexicon.entries:
            p = lexicon.entries[tok]
            if any(t in negators for t in recent[-cfg.window :]):
                p = -p
            total += p
            weight += abs(p)
        recent.append(tok)
    if weight == 0.0:
        return 0.0
    return max(-1.0, min(1.0, total / weight))


@dataclass
class SentimentReport:
    per_text: list
    per_domain: dict
    overall: float

    def to_dict(self, places: int = 4) -> dict:
        return {
            "per_domain": {d: round(m, places) for d, m in self.per_domain.items()},
            "overall": round(self.overall, places),
            "per_text": [{"role_id": r, "domain": d, "score": round(s, places)} for r, d, s in self.per_text],
        }

    def table(self) -> str:
        width = max([len("overall")] + [len(d) for d in self.per_domain])
        lines = [f"{'domain':<{width}}  mean"]
        lines += [f"{d:<{width}}  {m:+.4f}" for d, m in self.per_domain.items()]
        lines.append(f"{'overall':<{width}}  {self.overall:+.4f}")
        return "\n".join(lines)


def aggregate(scores, domain_order=None) -> SentimentReport:
    scores = list(scores)
    if not scores:
        raise InvalidInput("need at least one score")
    by_domain: dict = {}
    for _, domain, s in scores:
        by_domain.setdefault(domain, []).append(s)
    order = [d for d in (domain_order or []) if d in by_domain]
    order += [d for d in by_domain if d not in order]
    per_domain = {d: math.fsum(by_domain[d]) / len(by_domain[d]) for d in order}
    overall = math.fsum(s for _, _, s in scores) / len(scores)
    return SentimentReport(list(scores), per_domain, overall)
