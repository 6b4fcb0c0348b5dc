from concurrent.futures import ThreadPoolExecutor

import pytest

from vigil.errors import ChunkNotFoundError, DuplicateKeyError
from vigil.storage import FileChunkStore, MemoryChunkStore


@pytest.fixture(params=["memory", "file"])
def store(request, tmp_path):
    if request.param == "memory":
        return MemoryChunkStore()
    return FileChunkStore(tmp_path / "store")


def test_put_then_get_round_trip(store):
    blob = bytes(range(256)) * 4096  # 1 MiB
    store.put("cam1/000000000000.svf", blob)
    assert store.get("cam1/000000000000.svf") == blob


def test_get_unknown_key(store):
    with pytest.raises(ChunkNotFoundError, match="not found"):
        store.get("cam1/missing.svf")


def test_keys_are_write_once(store):
    store.put("k", b"first")
    with pytest.raises(DuplicateKeyError):
        store.put("k", b"second")
    assert store.get("k") == b"first"


def test_metadata_round_trip(store):
    store.put("k", b"data", metadata={"frame_count": 300, "partial": False})
    assert store.get_metadata("k") == {"frame_count": 300, "partial": False}
    store.put("bare", b"x")
    assert store.get_metadata("bare") == {}


def test_keys_listing_sorted_with_prefix(store):
    store.put("cam2/000000000000.svf", b"a")
    store.put("cam1/000000010000.svf", b"b")
    store.put("cam1/000000000000.svf", b"c")
    assert store.keys() == [
        "cam1/000000000000.svf",
        "cam1/000000010000.svf",
        "cam2/000000000000.svf",
    ]
    assert store.keys(prefix="cam1/") == [
        "cam1/000000000000.svf",
        "cam1/000000010000.svf",
    ]


def test_rejects_traversal_keys(store):
    with pytest.raises(ValueError):
        store.put("../evil", b"x")
    with pytest.raises(ValueError):
        store.put("/abs", b"x")


def test_concurrent_writes_to_distinct_keys(store):
    def write(i: int) -> str:
        return store.put(f"cam{i}/chunk.svf", bytes([i]) * 100)

    with ThreadPoolExecutor(max_workers=8) as pool:
        keys = list(pool.map(write, range(32)))
    assert len(set(keys)) == 32
    for i in range(32):
        assert store.get(f"cam{i}/chunk.svf") == bytes([i]) * 100


def test_concurrent_writers_to_one_key_single_winner(store):
    results = []

    def write(i: int):
        try:
            store.put("contested", bytes([i]))
            results.append(i)
        except DuplicateKeyError:
            pass

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(write, range(16)))
    assert len(results) == 1
    assert store.get("contested") == bytes([results[0]])
