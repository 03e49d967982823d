import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mavens.errors import FormatError, InvalidInput
from mavens.testkit import brute_force_topk
from mavens.vector_index import FlatIndex


def small():
    idx = FlatIndex(2)
    idx.add("a", [0, 0]).add("b", [1, 0]).add("c", [5, 5])
    return idx


def test_example_top2():
    assert small().search_top_k([0, 0], 2) == [("a", 0.0), ("b", 1.0)]


def test_k_larger_than_count_and_empty():
    assert [i for i, _ in small().search_top_k([0, 0], 10)] == ["a", "b", "c"]
    assert FlatIndex(4).search_top_k(np.zeros(4), 3) == []
    assert small().search_top_k([0, 0], 0) == []


def test_errors():
    idx = small()
    with pytest.raises(InvalidInput):
        idx.add("a", [1, 1])
    with pytest.raises(InvalidInput):
        idx.add("d", [1, 1, 1])
    with pytest.raises(InvalidInput):
        idx.search_top_k([0, 0, 0], 1)
    idx.freeze()
    with pytest.raises(InvalidInput):
        idx.add("z", [0, 1])


def test_count_and_retrieval():
    rng = np.random.default_rng(0)
    vecs = rng.normal(size=(1000, 16)).astype(np.float32)
    idx = FlatIndex(16)
    for i, v in enumerate(vecs):
        idx.add(str(i), v)
    assert len(idx) == 1000
    assert all(np.array_equal(idx.get(str(i)), vecs[i]) for i in range(1000))


def test_ties_keep_insertion_order():
    idx = FlatIndex(1)
    for name in "xyz":
        idx.add(name, [1.0])
    assert [i for i, _ in idx.search_top_k([0.0], 2)] == ["x", "y"]


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    idx = FlatIndex(8)
    for i in range(20):
        idx.add(f"id-{i}", rng.normal(size=8))
    idx.save(tmp_path / "v.bin", tmp_path / "ids.txt")
    back = FlatIndex.load(tmp_path / "v.bin", tmp_path / "ids.txt", dims=8)
    q = rng.normal(size=8)
    assert back.search_top_k(q, 5) == idx.search_top_k(q, 5)
    assert back.ids == idx.ids
    raw = (tmp_path / "v.bin").read_bytes()
    assert raw[:4] == b"MVFI" and len(raw) == 20 + 20 * 8 * 4


def test_load_rejects_bad_files(tmp_path):
    small().save(tmp_path / "v.bin", tmp_path / "ids.txt")
    with pytest.raises(FormatError):
        FlatIndex.load(tmp_path / "v.bin", tmp_path / "ids.txt", dims=3)
    raw = (tmp_path / "v.bin").read_bytes()
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(FormatError):
        FlatIndex.load(tmp_path / "bad.bin", tmp_path / "ids.txt")
    (tmp_path / "short.bin").write_bytes(raw[:-4])
    with pytest.raises(FormatError):
        FlatIndex.load(tmp_path / "short.bin", tmp_path / "ids.txt")
    (tmp_path / "ids2.txt").write_text("a\nb\n")
    with pytest.raises(FormatError):
        FlatIndex.load(tmp_path / "v.bin", tmp_path / "ids2.txt")


@given(
    st.integers(1, 6).flatmap(
        lambda d: st.tuples(
            st.lists(st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=1, max_size=30),
            st.lists(st.integers(-3, 3), min_size=d, max_size=d),
            st.integers(0, 35),
        )
    )
)
@settings(max_examples=200, deadline=None)
def test_matches_brute_force(case):
    vecs, q, k = case
    idx = FlatIndex(len(q))
    for i, v in enumerate(vecs):
        idx.add(f"v{i}", v)
    got = idx.search_top_k(q, k)
    assert [i for i, _ in got] == brute_force_topk([(f"v{i}", v) for i, v in enumerate(vecs)], q, k)
    dists = [d for _, d in got]
    assert dists == sorted(dists)
