"""Record API fixtures for the frontend contract tests.

Drives the real service in-process and freezes its responses under
tests/fixtures/.  Re-run after changing the engine or the wire format:

    python3 scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from tracepatterns.log_model import export_event_log
from tracepatterns.service import create_app
from tracepatterns.synth import PlantSpec, generate

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def record(outcome_kind: str, tmp_dir: Path) -> dict:
    spec = PlantSpec(
        groups=(("p1",), ("p2",)),
        plant_probability=0.5,
        outcome_noise=0.05,
        outcome_kind=outcome_kind,
        n_traces=30,
        filler_range=(3, 5),
        alphabet=("f1", "f2"),
        seed=2,
    )
    log, _ = generate(spec)
    csv_path = tmp_dir / f"{outcome_kind}.csv"
    export_event_log(log, csv_path)

    app = create_app(logs_dir=tmp_dir)
    client = TestClient(app)
    upload = client.post(
        "/logs", json={"csv_text": csv_path.read_text(), "schema": log.schema.to_dict()}
    )
    upload.raise_for_status()
    log_id = upload.json()["log_id"]

    config = {
        "max_iterations": 3,
        "distance": {"numeric_attrs": ["x_num"], "categorical_attrs": ["x_cat"]},
    }
    created = client.post("/sessions", json={"log_id": log_id, "config": config})
    created.raise_for_status()
    session_id = created.json()["session_id"]

    initial = client.get(f"/sessions/{session_id}")
    initial.raise_for_status()

    front_ids = sorted(initial.json()["iterations"][0]["front_ids"])
    extend_request = {"pattern_ids": front_ids, "rules": ["df", "ef"]}
    extended = client.post(f"/sessions/{session_id}/extend", json=extend_request)
    extended.raise_for_status()

    after = client.get(f"/sessions/{session_id}")
    after.raise_for_status()

    dashboards = {}
    iteration0 = initial.json()["iterations"][0]
    wanted = list(iteration0["front_ids"][:2])
    new_iteration = extended.json()["iteration"]
    if new_iteration and new_iteration["front_ids"]:
        wanted.append(new_iteration["front_ids"][0])
    for pattern_id in wanted:
        response = client.get(f"/sessions/{session_id}/patterns/{pattern_id}/dashboard")
        response.raise_for_status()
        dashboards[pattern_id] = response.json()

    return {
        "log_summary": upload.json(),
        "session_initial": initial.json(),
        "extend_request": extend_request,
        "extend_response": extended.json(),
        "session_after_extend": after.json(),
        "dashboards": dashboards,
    }


def main() -> int:
    import tempfile

    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for outcome_kind in ("continuous", "categorical"):
            payload = record(outcome_kind, Path(tmp))
            target = FIXTURES / f"{outcome_kind}.json"
            target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
