#!/usr/bin/env python3
"""Generate data/rts_gmlc_like.json, the large three-region test case.

The file is committed; this script records how it was produced and can
regenerate it deterministically (fixed seed, pure-Python RNG). The layout
mirrors the shape of the classic three-area reliability test system:

  * 73 buses in three regions (24 + 24 + 25), ids 1xx / 2xx / 3xx,
  * 120 branches: a ring plus chords inside each region and 6 inter-region
    ties, so every region has plenty of fully-interior lines,
  * 96 generating units on ~10 sites per region with a UC-style size mix
    and roughly a 22% system reserve margin, so multi-component outages
    actually shed load,
  * ~8550 MW of total demand on about two thirds of the buses,
  * well-separated regional coordinate blobs so 3-means clustering on bus
    coordinates recovers the regions exactly.

Only the structure matters: downstream runs solve for load shed under
attack, so no attempt is made to reproduce any published dispatch numbers.
"""

import json
import random
from pathlib import Path

SEED = 20260819
OUT = Path(__file__).resolve().parent.parent / "data" / "rts_gmlc_like.json"

REGIONS = [
    {"prefix": 1, "n_bus": 24, "center": (0.0, 0.0)},
    {"prefix": 2, "n_bus": 24, "center": (30.0, 0.0)},
    {"prefix": 3, "n_bus": 25, "center": (15.0, 25.0)},
]
CHORDS = [13, 14, 14]  # extra intra-region lines beyond the ring
TIES = [
    ("112", "211"), ("124", "201"), ("218", "314"),
    ("224", "301"), ("309", "102"), ("325", "121"),
]
# One region's unit fleet (32 units, ~3470 MW): a realistic size mix with a
# couple of large units whose loss matters, giving ~22% system reserve.
REGION_FLEET = (
    [400.0] + [350.0] * 2 + [197.0] * 3 + [155.0] * 4 +
    [100.0] * 5 + [76.0] * 5 + [50.0] * 4 + [20.0] * 8
)
TARGET_DEMAND = 8550.0


def main() -> None:
    rng = random.Random(SEED)
    buses, lines, gens = [], [], []

    region_buses = []
    for reg in REGIONS:
        ids = [str(reg["prefix"] * 100 + i) for i in range(1, reg["n_bus"] + 1)]
        region_buses.append(ids)
        cx, cy = reg["center"]
        for b in ids:
            buses.append({
                "id": b,
                "demand_mw": 0.0,
                "coord": {
                    "lon": round(cx + rng.uniform(-4.0, 4.0), 3),
                    "lat": round(cy + rng.uniform(-4.0, 4.0), 3),
                },
            })

    # Demand: two thirds of the buses carry load, scaled to the target total.
    load_buses = [b for b in buses if rng.random() < 2.0 / 3.0]
    raw = [rng.uniform(50.0, 300.0) for _ in load_buses]
    scale = TARGET_DEMAND / sum(raw)
    for bus, r in zip(load_buses, raw):
        bus["demand_mw"] = round(r * scale, 1)

    line_no = 0
    seen_pairs = set()

    def add_line(a: str, b: str, thermal: float) -> None:
        nonlocal line_no
        line_no += 1
        x = rng.uniform(0.01, 0.12)  # per-unit reactance
        lines.append({
            "id": f"l{line_no}",
            "from": a,
            "to": b,
            "susceptance": round(1.0 / x, 4),
            "thermal_mw": thermal,
        })
        seen_pairs.add((a, b))
        seen_pairs.add((b, a))

    for ids, n_chords in zip(region_buses, CHORDS):
        n = len(ids)
        for i in range(n):  # ring
            add_line(ids[i], ids[(i + 1) % n], rng.choice([175.0, 350.0, 500.0]))
        added = 0
        while added < n_chords:  # chords
            a, b = rng.sample(ids, 2)
            if (a, b) in seen_pairs:
                continue
            add_line(a, b, rng.choice([175.0, 350.0, 500.0]))
            added += 1

    for a, b in TIES:
        add_line(a, b, rng.choice([500.0, 722.0]))

    # 32 units per region clustered on ~10 generation sites.
    gen_no = 0
    for ids in region_buses:
        sites = rng.sample(ids, 10)
        for u, pmax in enumerate(REGION_FLEET):
            gen_no += 1
            gens.append({
                "id": f"g{gen_no}",
                "bus": sites[u % len(sites)],
                "pmax_mw": pmax,
            })

    net = {
        "base_mva": 100.0,
        "angle_bound_rad": 0.6,
        "buses": buses,
        "generators": gens,
        "lines": lines,
    }
    OUT.write_text(json.dumps(net, indent=2) + "\n")
    total_cap = sum(g["pmax_mw"] for g in gens)
    total_dem = sum(b["demand_mw"] for b in buses)
    print(f"wrote {OUT}")
    print(f"  buses={len(buses)} lines={len(lines)} gens={len(gens)}")
    print(f"  demand={total_dem:.1f} MW capacity={total_cap:.1f} MW")


if __name__ == "__main__":
    main()
