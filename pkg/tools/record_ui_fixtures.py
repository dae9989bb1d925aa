#!/usr/bin/env python3
"""Record service exchanges for the frontend contract tests.

Each exchange stores the request the UI is expected to issue together
with the exact response the service gave, so the contract suite can
replay the service without running it and verify every displayed number
traces back to a recorded response field.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from bloomlab.service import create_app

TARGET = "BloomInitiation"
SCIENCE = "demo_science"
CATALOGUE = "demo_catalogue"
OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "recorded.json"

LANDUSE_RUNS = [
    "waste water treatment plant",
    "grazing",
    "waste disposal",
    "aquaculture",
    "poultry",
]


def intervention(landuse: dict, label: str) -> dict:
    return {
        "catalogue": CATALOGUE,
        "intervention": {
            "practice_overrides": {},
            "landuse_overrides": landuse,
            "label": label,
        },
    }


def main() -> None:
    client = TestClient(create_app())
    exchanges = []

    def rec(name: str, method: str, path: str, payload: dict | None = None) -> None:
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=payload)
        request = {"method": method, "path": path}
        if payload is not None:
            request["payload"] = payload
        exchanges.append(
            {
                "name": name,
                "request": request,
                "response": {"status": response.status_code, "body": response.json()},
            }
        )

    rec("models", "GET", "/models")
    rec("nodes", "GET", f"/models/{SCIENCE}/nodes")
    rec("catalogue", "GET", f"/models/{CATALOGUE}")
    rec("sensitivity", "GET", f"/models/{SCIENCE}/sensitivity?target={TARGET}")

    for name in ("typical year", "storm event", "nutrient pool enough"):
        rec(
            f"scenario: {name}",
            "POST",
            f"/models/{SCIENCE}/scenario",
            {"target": TARGET, "name": name},
        )

    rec(
        "inline: empty",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {"target": TARGET, "evidence": {}},
    )
    rec(
        "inline: pool enough",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {"target": TARGET, "evidence": {"nutrients.AvailableNutrientPool": "Enough"}},
    )
    rec(
        "inline: overlap",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {
            "target": TARGET,
            "evidence": {
                "nutrients.AvailableNutrientPool": "Enough",
                "BloomInitiation": "No",
            },
        },
    )

    # the impossible-evidence path needs a readout other than the bloom
    # node because the only zero-mass rows in the demo model involve it
    wind = "air.WindSpeed"
    rec("wind: sensitivity", "GET", f"/models/{SCIENCE}/sensitivity?target={wind}")
    rec(
        "wind: empty",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {"target": wind, "evidence": {}},
    )
    rec(
        "wind: pool enough",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {"target": wind, "evidence": {"nutrients.AvailableNutrientPool": "Enough"}},
    )
    rec(
        "wind: impossible",
        "POST",
        f"/models/{SCIENCE}/scenario",
        {
            "target": wind,
            "evidence": {
                "nutrients.AvailableNutrientPool": "Enough",
                "BloomInitiation": "No",
            },
        },
    )

    catalogue = client.get(f"/models/{CATALOGUE}").json()
    sources = catalogue["body"]["sources"]
    all_ids = [s["id"] for s in sources]
    natveg = [s["id"] for s in sources if s["category"] == "natural vegetation"]

    rec("pipeline: baseline", "POST", "/pipeline/run", intervention({}, ""))
    rec(
        "pipeline: clear the bush",
        "POST",
        "/pipeline/run",
        intervention({sid: "agriculture" for sid in natveg}, "clear the bush"),
    )
    for category in LANDUSE_RUNS:
        rec(
            f"pipeline: all {category}",
            "POST",
            "/pipeline/run",
            intervention({sid: category for sid in all_ids}, f"all {category}"),
        )

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"exchanges": exchanges}, indent=1) + "\n")
    print(f"wrote {len(exchanges)} exchanges to {OUT}")


if __name__ == "__main__":
    main()
