"""Content-addressed artifact store."""

import json
import threading

import pytest

from osdnp import ArtifactStore, ValidationError, instance_hash, serialize_instance
from osdnp.common import content_id


def test_put_is_idempotent(tmp_path):
    store = ArtifactStore(tmp_path)
    a = store.put("instance", {"x": 1})
    b = store.put("instance", {"x": 1})
    assert a == b == content_id({"x": 1})
    assert store.ids("instance") == [a]
    assert store.get(a) == {"x": 1}


def test_id_ignores_key_order(tmp_path):
    store = ArtifactStore(tmp_path)
    a = store.put("solution", {"x": 1, "y": 2})
    b = store.put("solution", {"y": 2, "x": 1})
    assert a == b
    assert len(store.ids()) == 1


def test_kind_mismatch_rejected(tmp_path):
    store = ArtifactStore(tmp_path)
    aid = store.put("instance", {"x": 1})
    with pytest.raises(ValidationError):
        store.put("solution", {"x": 1})
    assert store.kind_of(aid) == "instance"


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValidationError):
        ArtifactStore(tmp_path).put("report", {"x": 1})


def test_missing_id(tmp_path):
    store = ArtifactStore(tmp_path)
    assert store.get("ffff") is None
    assert store.meta("ffff") is None
    assert store.kind_of("ffff") is None


def test_reload_from_disk(tmp_path):
    first = ArtifactStore(tmp_path)
    aid = first.put("scenario", {"t": 0.5})
    iid = first.put("instance", {"stops": []})
    second = ArtifactStore(tmp_path)
    assert second.get(aid) == {"t": 0.5}
    assert second.kind_of(aid) == "scenario"
    assert set(second.ids()) == {aid, iid}
    assert second.ids("instance") == [iid]


def test_meta_and_layout(tmp_path):
    store = ArtifactStore(tmp_path)
    aid = store.put("instance", {"n": 3})
    meta = store.meta(aid)
    assert meta.kind == "instance"
    assert meta.path == f"instance/{aid}.json"
    assert (tmp_path / meta.path).exists()
    # no stray temp files after a clean write
    assert not list(tmp_path.rglob("*.tmp"))
    index = json.loads((tmp_path / "index.json").read_text())
    assert aid in index["artifacts"]


def test_instance_id_matches_instance_hash(tmp_path, corridor):
    store = ArtifactStore(tmp_path)
    aid = store.put("instance", serialize_instance(corridor))
    assert aid == instance_hash(corridor)


def test_concurrent_puts_agree(tmp_path):
    store = ArtifactStore(tmp_path)
    results = []

    def worker(n):
        for i in range(20):
            results.append(store.put("solution", {"i": i}))

    threads = [threading.Thread(target=worker, args=(n,)) for n in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 20
    assert len(store.ids("solution")) == 20
