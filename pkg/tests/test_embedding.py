import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mavens.embedding import EmbedderSpec, embed, embed_many, hashed_ngram_vector, l2_sq
from mavens.errors import InvalidInput
from mavens.testkit import FakeEmbeddingServer, reference_l2_sq

# frozen from one run of the hashing scheme; any change here is a format break
GOLDEN_ABC_8 = [
    0.37796446681022644,
    0.7559289336204529,
    0.37796446681022644,
    0.0,
    0.0,
    0.0,
    -0.37796446681022644,
    0.0,
]


def test_golden_abc():
    v = embed("abc", EmbedderSpec(dims=8))
    assert v.dtype == np.float32
    assert v.tolist() == GOLDEN_ABC_8


def test_unit_norm_and_shape():
    v = embed("U.S. flu season", EmbedderSpec(dims=64))
    assert v.shape == (64,)
    assert abs(float(np.linalg.norm(v)) - 1.0) < 1e-6


@pytest.mark.parametrize("bad", ["", "   \n"])
def test_rejects_empty(bad):
    with pytest.raises(InvalidInput):
        embed(bad, EmbedderSpec())


def test_l2_examples():
    assert l2_sq([1, 2], [3, 4]) == 8
    assert l2_sq([0, 0, 1], [0, 1, 0]) == 2


def test_l2_dim_mismatch():
    with pytest.raises(InvalidInput):
        l2_sq([1, 2], [1, 2, 3])


@given(st.text(min_size=1, max_size=60).filter(lambda s: s.strip()))
@settings(max_examples=100, deadline=None)
def test_referentially_transparent(text):
    spec = EmbedderSpec(dims=32)
    assert np.array_equal(embed(text, spec), embed(text, spec))
    assert np.array_equal(embed_many([text, text], spec)[1], embed(text, spec))


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=16), st.data())
def test_l2_matches_reference(a, data):
    b = data.draw(st.lists(st.floats(-1e3, 1e3), min_size=len(a), max_size=len(a)))
    assert l2_sq(a, b) == pytest.approx(reference_l2_sq(a, b), rel=1e-9, abs=1e-9)
    assert l2_sq(a, a) == 0.0


def test_single_char_is_padded():
    # " a", "a " and " a " at most three buckets
    v = hashed_ngram_vector("a", 1 << 16)
    assert np.count_nonzero(v) == 3
    assert np.array_equal(hashed_ngram_vector("A  ", 64), hashed_ngram_vector("a", 64))


def test_remote_embedder_batches_and_order():
    def fake(text):
        return [float(len(text)), 1.0, 0.0]

    with FakeEmbeddingServer(fake) as srv:
        spec = EmbedderSpec(kind="remote-service", dims=3, endpoint=srv.url, model="m", batch_size=2, parallelism=2)
        out = embed_many(["a", "bb", "ccc"], spec)
    assert [v[0] for v in out] == [1.0, 2.0, 3.0]
    assert len(srv.requests) == 2
    assert all(r["path"].endswith("/v1/embeddings") for r in srv.requests)


def test_remote_dims_mismatch():
    with FakeEmbeddingServer(lambda t: [1.0, 2.0]) as srv:
        spec = EmbedderSpec(kind="remote-service", dims=3, endpoint=srv.url)
        with pytest.raises(Exception):
            embed("x", spec)
