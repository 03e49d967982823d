"""Opinion sentences: segmentation, condensation, TF-IDF, K-means with a knee-picked k."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import AnalysisFailure, InvalidInput

DEFAULT_SKIP_WORDS = (
    "I don't know",
    "I do not know",
    "number",
    "system prompt",
    "as an AI",
    "language model",
    "reference material",
    "不知道",
    "系统提示",
)
DEFAULT_HEDGES = (
    "I think",
    "I believe",
    "I feel that",
    "in my opinion",
    "in my view",
    "to be honest",
    "frankly speaking",
    "it seems that",
    "我认为",
    "我觉得",
    "在我看来",
)
# stripped only when they open a sentence and are followed by a comma
DEFAULT_MARKERS = ("well", "so", "honestly", "frankly", "personally", "of course", "anyway", "besides", "indeed")
MIN_SENTENCE_CHARS = 6

_SENTENCE = re.compile(r"[^.!?。！？\n]+[.!?。！？]*")
_CJK = "㐀-䶿一-鿿豈-﫿"
_CJK_RUN = re.compile(f"[{_CJK}]+")


@dataclass(frozen=True)
class OpinionSentence:
    text: str
    source_role_id: str
    source_domain: str

    def to_dict(self) -> dict:
        return {"text": self.text, "source_role_id": self.source_role_id, "source_domain": self.source_domain}


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE.findall(text) if s.strip()]


def segment_and_filter(responses, skip_words=DEFAULT_SKIP_WORDS, min_chars: int = MIN_SENTENCE_CHARS) -> list[OpinionSentence]:
    """Split packaged role texts into sentences and drop non-opinion ones."""
    skips = [w.lower() for w in skip_words if w]
    out = []
    for r in responses:
        for s in split_sentences(r.packaged_text):
            low = s.lower()
            if len(s) < min_chars or any(w in low for w in skips):
                continue
            out.append(OpinionSentence(s, r.role_id, r.domain))
    return out


class OpinionExtractor(Protocol):
    def __call__(self, sentence: str) -> str: ...


def _alts(words: Sequence[str]) -> str:
    return "|".join(re.escape(w) for w in sorted(words, key=len, reverse=True))


class RuleBasedExtractor:
    """Condense a sentence by stripping hedges, discourse markers and parentheticals."""

    def __init__(self, hedges: Sequence[str] = DEFAULT_HEDGES, markers: Sequence[str] = DEFAULT_MARKERS):
        # CJK text has no spaces, so hedges in it cannot demand word boundaries
        cjk = [h for h in hedges if _CJK_RUN.search(h)]
        latin = [h for h in hedges if h not in cjk]
        alts = [rf"(?<!\w)(?:{_alts(latin)})(?!\w)"] if latin else []
        alts += [rf"(?:{_alts(cjk)})"] if cjk else []
        self._hedge = re.compile(rf"(?:{'|'.join(alts)})\s*[,，:：]?\s*", re.IGNORECASE)
        self._marker = re.compile(rf"^\s*(?:(?:{_alts(markers)})\s*[,，]\s*)+", re.IGNORECASE)
        self._paren = re.compile(r"\s*[(（][^()（）]*[)）]")

    def __call__(self, sentence: str) -> str:
        if not sentence.strip():
            raise InvalidInput("empty sentence")
        s = self._paren.sub("", sentence)
        s = self._hedge.sub("", s)
        s = self._marker.sub("", s)
        s = re.sub(r"\s+", " ", s).strip()
        s = re.sub(r"\s+([,.!?;:])", r"\1", s)
        s = s.lstrip(",，;；:： ")
        if not re.search(r"\w", s):
            return re.sub(r"\s+", " ", sentence).strip()
        return s


_default_extractor = RuleBasedExtractor()


def extract_opinion(sentence: str, extractor: OpinionExtractor | None = None) -> str:
    return (extractor or _default_extractor)(sentence)


# tf-idf ---------------------------------------------------------------


def tokenize(text: str, cjk_bigrams: bool = False) -> list[str]:
    text = text.lower()
    if not cjk_bigrams:
        return re.findall(r"[^\W_]+", text)
    tokens = []
    for piece in re.findall(r"[^\W_]+", text):
        pos = 0
        for m in _CJK_RUN.finditer(piece):
            if m.start() > pos:
                tokens.append(piece[pos : m.start()])
            run = m.group()
            tokens.extend([run] if len(run) == 1 else [run[i : i + 2] for i in range(len(run) - 1)])
            pos = m.end()
        if pos < len(piece):
            tokens.append(piece[pos:])
    return tokens


@dataclass
class TfIdfMatrix:
    rows: np.ndarray
    vocabulary: list
    doc_count: int
    idf: np.ndarray = field(repr=False, default=None)


def tfidf(sentences: Sequence[str], cjk_bigrams: bool = False) -> TfIdfMatrix:
    """Smoothed TF-IDF with L2-normalized rows.

    tf is the raw count, idf = ln((1 + N) / (1 + df)) + 1.
    """
    if not sentences:
        raise InvalidInput("need at least one sentence")
    docs = [tokenize(s, cjk_bigrams) for s in sentences]
    vocab = sorted({t for d in docs for t in d})
    if not vocab:
        raise AnalysisFailure("empty vocabulary after tokenization")
    col = {t: j for j, t in enumerate(vocab)}
    n = len(docs)
    tf = np.zeros((n, len(vocab)))
    for i, d in enumerate(docs):
        for t in d:
            tf[i, col[t]] += 1
    df = (tf > 0).sum(axis=0)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    w = tf * idf
    norms = np.linalg.norm(w, axis=1, keepdims=True)
    w = np.divide(w, norms, out=np.zeros_like(w), where=norms > 0)
    return TfIdfMatrix(w, vocab, n, idf)


# knee -----------------------------------------------------------------


def choose_k(inertia_curve: dict) -> int:
    """Elbow of a decreasing curve: the point farthest from the end-to-end chord.

    Both axes are min-max normalized first; ties go to the smallest k.
    """
    ks = sorted(inertia_curve)
    if not ks:
        raise InvalidInput("empty inertia curve")
    if len(ks) < 3:
        return ks[0]
    x = np.array(ks, dtype=float)
    y = np.array([inertia_curve[k] for k in ks], dtype=float)
    x = (x - x[0]) / (x[-1] - x[0])
    span = y.max() - y.min()
    if span == 0:
        return ks[0]
    y = (y - y.min()) / span
    # chord from (x0, y0) to (x1, y1); perpendicular distance of each point
    dx, dy = x[-1] - x[0], y[-1] - y[0]
    dist = np.abs(dy * (x - x[0]) - dx * (y - y[0])) / math.hypot(dx, dy)
    best = dist.max()
    if best <= 1e-12:
        return ks[0]
    return ks[int(np.flatnonzero(dist >= best - 1e-12)[0])]


# k-means --------------------------------------------------------------


@dataclass
class ClusteringResult:
    k: int
    assignments: list
    centers: np.ndarray
    inertia: float
    inertia_history: list = field(default_factory=list)
    inertia_curve: dict = field(default_factory=dict)
    top_terms: dict = field(default_factory=dict)


def _as_rows(matrix) -> np.ndarray:
    rows = matrix.rows if isinstance(matrix, TfIdfMatrix) else matrix
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    return rows


def _sq_to_centers(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # direct differences, not the dot-product expansion: inertia must be exact
    out = np.empty((len(x), len(centers)))
    for j, c in enumerate(centers):
        diff = x - c
        out[:, j] = np.einsum("ij,ij->i", diff, diff)
    return out


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = [x[rng.integers(n)]]
    closest = ((x - centers[0]) ** 2).sum(1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, ((x - x[idx]) ** 2).sum(1))
    return np.array(centers)


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    centers = centers.copy()
    k = len(centers)
    d = _sq_to_centers(x, centers)
    labels = d.argmin(1)
    inertia = float(d[np.arange(len(x)), labels].sum())
    history = [inertia]
    for _ in range(max_iter):
        new = centers.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = x[members].mean(0)
        # repair empty clusters from the point farthest from its center
        point_d = _sq_to_centers(x, new)[np.arange(len(x)), labels]
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            far = int(point_d.argmax())
            new[j] = x[far]
            point_d[far] = -1.0
        d = _sq_to_centers(x, new)
        new_labels = d.argmin(1)
        new_inertia = float(d[np.arange(len(x)), new_labels].sum())
        stable = np.array_equal(new_labels, labels)
        centers, labels = new, new_labels
        history.append(new_inertia)
        converged = stable or abs(inertia - new_inertia) <= tol * max(inertia, 1e-300)
        inertia = new_inertia
        if converged:
            break
    return centers, labels, inertia, history


def kmeans(
    matrix,
    k: int,
    seed: int = 0,
    restarts: int = 8,
    max_iter: int = 100,
    tol: float = 1e-6,
    init_centers: np.ndarray | None = None,
) -> ClusteringResult:
    """Seeded k-means++ / Lloyd, best of ``restarts`` by inertia.

    ``init_centers`` adds one extra warm-started run alongside the restarts.
    """
    x = _as_rows(matrix)
    n = len(x)
    if k < 1:
        raise InvalidInput("k must be positive")
    if k > n:
        raise InvalidInput(f"k={k} exceeds row count {n}")
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    inits = [_kmeanspp(x, k, np.random.default_rng(s)) for s in seqs]
    if init_centers is not None:
        inits.append(np.asarray(init_centers, dtype=np.float64))
    best = None
    for i, c0 in enumerate(inits):
        centers, labels, inertia, history = _lloyd(x, c0, max_iter, tol)
        if best is None or inertia < best[2]:
            best = (centers, labels, inertia, history)
    centers, labels, inertia, history = best
    # number clusters by first appearance so ids do not depend on init order
    order = list(dict.fromkeys(int(l) for l in labels))
    order += [j for j in range(k) if j not in order]
    relabel = {old: new for new, old in enumerate(order)}
    centers = centers[order]
    res = ClusteringResult(k, [relabel[int(l)] + 1 for l in labels], centers, inertia, history)
    if isinstance(matrix, TfIdfMatrix):
        res.top_terms = top_terms(centers, matrix.vocabulary)
    return res


def top_terms(centers: np.ndarray, vocabulary: Sequence[str], n: int = 10) -> dict:
    out = {}
    for j, c in enumerate(centers):
        order = np.argsort(-c, kind="stable")[:n]
        out[j + 1] = [(vocabulary[i], float(c[i])) for i in order if c[i] > 0]
    return out


def inertia_curve(matrix, k_range, seed: int = 0, restarts: int = 8, max_iter: int = 100, tol: float = 1e-6):
    """Best inertia for each candidate k, plus the fitted results.

    Each k also gets a warm start from the previous k's centers plus the point
    farthest from them, so the curve cannot increase with k.
    """
    x = _as_rows(matrix)
    curve, fits = {}, {}
    prev = None
    for k in k_range:
        warm = None
        if prev is not None and len(prev.centers) == k - 1:
            d = _sq_to_centers(x, prev.centers).min(1)
            warm = np.vstack([prev.centers, x[int(d.argmax())]])
        fit = kmeans(matrix, k, seed, restarts, max_iter, tol, init_centers=warm)
        curve[k] = fit.inertia
        fits[k] = fit
        prev = fit
    return curve, fits


def default_k_range(n: int, k_max: int = 12) -> range:
    return range(2, min(k_max, n - 1) + 1)


def cluster_opinions(matrix: TfIdfMatrix, seed: int = 0, k_max: int = 12, restarts: int = 8) -> ClusteringResult:
    n = matrix.rows.shape[0]
    ks = default_k_range(n, k_max)
    if len(ks) == 0:
        res = kmeans(matrix, 1, seed, restarts)
        res.inertia_curve = {1: res.inertia}
        return res
    curve, fits = inertia_curve(matrix, ks, seed, restarts)
    res = fits[choose_k(curve)]
    res.inertia_curve = curve
    return res


def classical_mds(rows: np.ndarray, dims: int = 2) -> np.ndarray:
    """2-D coordinates from classical multidimensional scaling of Euclidean distances."""
    x = np.asarray(rows, dtype=np.float64)
    n = len(x)
    if n == 0:
        return np.zeros((0, dims))
    sq = _sq_to_centers(x, x)
    j = np.eye(n) - 1.0 / n
    b = -0.5 * j @ sq @ j
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(-vals, kind="stable")[:dims]
    vals, vecs = np.clip(vals[order], 0, None), vecs[:, order]
    for c in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, c])))
        if vecs[i, c] < 0:
            vecs[:, c] = -vecs[:, c]
    coords = vecs * np.sqrt(vals)
    if coords.shape[1] < dims:
        coords = np.hstack([coords, np.zeros((n, dims - coords.shape[1]))])
    return coords
