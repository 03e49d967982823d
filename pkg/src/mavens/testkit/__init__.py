"""Independent oracles, synthetic data and fake backends for tests and demos.

Nothing here imports the numerical code it is meant to check.
"""

from .corpus import SyntheticCorpusSpec, generate_corpus
from .fixtures import aqg_fixture_table, judge_fixture_table, pipeline_fixture_table
from .oracles import (
    adjusted_rand_index,
    brute_force_knee,
    brute_force_topk,
    exhaustive_kmeans,
    reference_l2_sq,
    reference_mean_variance,
    reference_tfidf,
)
from .servers import FakeChatServer, FakeEmbeddingServer

__all__ = [
    "SyntheticCorpusSpec",
    "generate_corpus",
    "aqg_fixture_table",
    "judge_fixture_table",
    "pipeline_fixture_table",
    "adjusted_rand_index",
    "brute_force_knee",
    "brute_force_topk",
    "exhaustive_kmeans",
    "reference_l2_sq",
    "reference_mean_variance",
    "reference_tfidf",
    "FakeChatServer",
    "FakeEmbeddingServer",
]
