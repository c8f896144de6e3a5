"""Regenerate the committed test fixtures in frontend/test/fixtures/.

Drives a complete four-stage coding run against the backend purely through
its /api/v1 HTTP routes and saves the raw JSON responses, so the UI tests
render exactly what the real server serves.

Usage: python3 scripts/capture_fixtures.py
"""

import itertools
import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient
from topicgt.server import Workspace, create_app

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"

OUTLIER_TOPICS = (34, 35, 36, 37, 38, 39)
LOW_RATED = {30: (1, 2), 31: (1, 1), 32: (1, 2), 33: (1, 1)}
BOUNDARY_TOPIC = 29
SHARED_TOPIC = 20
CATEGORY_PLAN = (
    ("steering rituals", (0, 1, SHARED_TOPIC)),
    ("planning cadence", (2, 3, SHARED_TOPIC)),
    ("skill growth", (4, 5, SHARED_TOPIC)),
    ("practice sharing", (6, 7, 8)),
    ("tooling backdrop", (9, 10, 11)),
    ("industry backdrop", (12, 13, 14, 15)),
    ("stray cluster one", (16,)),
    ("stray cluster two", (17,)),
    ("stray cluster three", (18,)),
    ("stray cluster four", (19,)),
)
CORE_CATEGORIES = ("cat_1", "cat_2", "cat_3", "cat_4")
DIMENSION_PLAN = (
    ("orchestration axis", ("cat_1", "cat_2")),
    ("adaptation axis", ("cat_3", "cat_4")),
)


def ratings(topic_id: int) -> tuple[int, int]:
    if topic_id in LOW_RATED:
        return LOW_RATED[topic_id]
    if topic_id == BOUNDARY_TOPIC:
        return (2, 2)
    return (4, 5)


def documents() -> list[dict]:
    # 60 stemmer-inert consonant-triple words, rotated through 30 docs of
    # 40 tokens each, so every word clears the default min_df of 2
    pool = ["".join(p) for p in itertools.product("bcdfgh", repeat=3)][:60]
    docs = []
    for d in range(30):
        tokens = [pool[(d * 40 + t) % 60] for t in range(40)]
        docs.append(
            {
                "doc_id": f"d{d:02d}",
                "title": f"Meeting notes {d:02d}",
                "section_tags": [],
                "raw_text": " ".join(tokens),
            }
        )
    return docs


def ok(response, expect=200):
    assert response.status_code == expect, (
        f"{response.request.method} {response.request.url} -> "
        f"{response.status_code}: {response.text}"
    )
    return response.json()


def save(name: str, payload) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(Path.cwd())}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        with TestClient(create_app(Workspace(tmp), max_workers=2)) as client:
            corpus = ok(
                client.post("/api/v1/corpora", json={"documents": documents()}),
                201,
            )

            job = ok(
                client.post(
                    "/api/v1/jobs",
                    json={
                        "kind": "LDA_RUN",
                        "corpus_id": corpus["corpus_id"],
                        "params": {
                            "num_topics": 40,
                            "sweeps": 30,
                            "seed": 11,
                            "top_n_words": 10,
                        },
                    },
                ),
                202,
            )
            while True:
                job = ok(client.get(f"/api/v1/jobs/{job['job_id']}"))
                if job["status"] in ("DONE", "FAILED"):
                    break
                time.sleep(0.02)
            assert job["status"] == "DONE", job
            model_id = job["result_ref"]

            save("model.json", ok(client.get(f"/api/v1/models/{model_id}")))
            save(
                "topic20_documents.json",
                ok(
                    client.get(
                        f"/api/v1/models/{model_id}/topics/{SHARED_TOPIC}/documents?n=5"
                    )
                ),
            )

            pid = "p_replay"
            base = f"/api/v1/projects/{pid}"
            ok(
                client.post(
                    "/api/v1/projects",
                    json={"model_id": model_id, "project_id": pid},
                ),
                201,
            )

            for topic in OUTLIER_TOPICS:
                ok(
                    client.post(
                        f"{base}/outliers",
                        json={
                            "topic_id": topic,
                            "reason": "no coherent theme in the top words",
                        },
                    )
                )
            ok(client.post(f"{base}/advance"))
            save("project_expert.json", ok(client.get(base)))

            view = ok(client.get(base))
            active = [
                c["topic_id"] for c in view["codes"] if c["status"] == "ACTIVE"
            ]
            for topic in active:
                rating_a, rating_b = ratings(topic)
                ok(
                    client.post(
                        f"{base}/labels",
                        json={
                            "expert_id": "expert_a",
                            "topic_id": topic,
                            "label": f"first reading {topic}",
                            "rating": rating_a,
                        },
                    )
                )
                ok(
                    client.post(
                        f"{base}/labels",
                        json={
                            "expert_id": "expert_b",
                            "topic_id": topic,
                            "label": f"second reading {topic}",
                            "rating": rating_b,
                        },
                    )
                )
                ok(
                    client.post(
                        f"{base}/aggregate-labels",
                        json={"topic_id": topic, "label": f"agreed label {topic}"},
                    )
                )
            save("project_labeled.json", ok(client.get(base)))
            ok(client.post(f"{base}/prune-rated", json={"threshold": 2.0}))
            ok(client.post(f"{base}/advance"))

            for name, members in CATEGORY_PLAN:
                created = ok(
                    client.post(
                        f"{base}/categories",
                        json={"name": name, "kind": "GENERIC"},
                    ),
                    201,
                )
                for topic in members:
                    ok(
                        client.post(
                            f"{base}/categories/{created['category']['category_id']}/codes",
                            json={"topic_id": topic},
                        )
                    )
            ok(client.post(f"{base}/prune-singletons"))
            for category_id in CORE_CATEGORIES:
                ok(
                    client.patch(
                        f"{base}/categories/{category_id}", json={"kind": "CORE"}
                    )
                )
            ok(
                client.patch(
                    f"{base}/categories/cat_5",
                    json={"name": "background tooling"},
                )
            )
            save("project_focus.json", ok(client.get(base)))

            ok(client.post(f"{base}/advance"))
            for name, category_ids in DIMENSION_PLAN:
                created = ok(
                    client.post(f"{base}/dimensions", json={"name": name}), 201
                )
                for category_id in category_ids:
                    ok(
                        client.post(
                            f"{base}/dimensions/{created['dimension']['dimension_id']}/categories",
                            json={"category_id": category_id},
                        )
                    )
            ok(
                client.post(
                    f"{base}/memos",
                    json={
                        "kind": "category",
                        "ref_id": "cat_1",
                        "author": "researcher",
                        "text": "members keep referencing coordination habits",
                    },
                ),
                201,
            )
            ok(
                client.post(
                    f"{base}/memos",
                    json={
                        "kind": "project",
                        "ref_id": pid,
                        "author": "researcher",
                        "text": "two aggregate axes emerged from the core categories",
                    },
                ),
                201,
            )

            save("project_funnel.json", ok(client.get(base)))
            save("export.json", ok(client.get(f"{base}/export?format=json")))
            save("projects_list.json", ok(client.get("/api/v1/projects")))


if __name__ == "__main__":
    main()
