#!/usr/bin/env python3
"""Record engine HTTP responses as frontend test fixtures.

Run from the repo root after installing the engine package:
    python3 frontend/scripts/record-fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from subsum import Engine, SyntheticSpec, generate_synthetic
from subsum.http_api import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    video = generate_synthetic(SyntheticSpec(
        duration_s=40, fps=1, clusters=4, feature_dim=8, hist_bins=16,
        faces=6, objects=4, cluster_labels=(2, 9, 4, 6), seed=5,
    ))
    engine = Engine()
    engine.register(video.db, "demo")
    client = TestClient(create_app(engine))

    def record(name: str, response):
        assert response.status_code in (200, 422), (name, response.status_code)
        FIXTURES.joinpath(name).write_text(json.dumps(response.json(), indent=2, sort_keys=True))
        print(f"wrote {name}")

    record("dbs.json", client.get("/dbs"))
    record("stats.json", client.get("/dbs/demo/stats"))
    record("keyframes.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "fl", "k": 5, "include_timings": False,
    }))
    record("keyframes_repeat.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "fl", "k": 5, "include_timings": False,
    }))
    record("keyframes_dm.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "dm", "k": 5, "include_timings": False,
    }))
    record("skim.json", client.post("/dbs/demo/summarize", json={
        "mode": "skim", "function": "fl", "budget_s": 12.0, "snippets": "fixed:2",
        "include_timings": False,
    }))
    record("entities.json", client.post("/dbs/demo/summarize", json={
        "mode": "entities", "entity_kind": "face", "function": "dm", "k": 4,
        "include_timings": False,
    }))
    record("query_keyframes.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "fl", "k": 3, "query": "scene:9",
        "include_timings": False,
    }))
    record("with_timings.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "fl", "k": 3,
    }))
    record("empty_query_error.json", client.post("/dbs/demo/summarize", json={
        "mode": "keyframes", "function": "fl", "k": 3, "query": "scene:15",
    }))


if __name__ == "__main__":
    main()
