#!/usr/bin/env python3
"""Writes the synthetic 50-station scenario under data/.

Each station has a morning and an evening peak whose direction depends on its
role. Days are simulated at the current capacity, so trips.csv only holds
successful customers and status.csv records the minutes each station could serve
rentals (non-empty) and returns (non-full). Output is a pure function of --seed.
"""

import argparse
import json
import math
import random
from pathlib import Path

STATIONS = 50
DAYS = 5
INTERVALS = 48
MINUTES = 30.0


def hourly_rates(role, rng):
    """Per-interval (rental, return) rates per minute."""
    base = rng.uniform(0.5, 2.0) / 60.0
    peak = rng.uniform(5.0, 12.0) / 60.0
    rent, ret = [], []
    for m in range(INTERVALS):
        hour = m * MINUTES / 60.0
        night = 0.15 if hour < 6 or hour >= 23 else 1.0
        morning = math.exp(-((hour - 8.5) ** 2) / 2.0)
        evening = math.exp(-((hour - 18.0) ** 2) / 2.0)
        r = base * night
        t = base * night
        if role == "residential":
            r += peak * morning
            t += peak * evening
        elif role == "business":
            r += peak * evening
            t += peak * morning
        else:
            r += 0.4 * peak * (morning + evening)
            t += 0.4 * peak * (morning + evening)
        rent.append(r)
        ret.append(t)
    return rent, ret


def simulate_day(rent, ret, capacity, bikes, rng, rebalancing=()):
    """Returns (successful events, nonempty, nonfull, full, empty) minute lists."""
    events = []
    nonempty = [0.0] * INTERVALS
    nonfull = [0.0] * INTERVALS
    pending = sorted(rebalancing)
    for m in range(INTERVALS):
        t0 = m * MINUTES * 60.0
        t1 = t0 + MINUTES * 60.0
        total = rent[m] + ret[m]
        now = t0
        while True:
            nxt = now + (rng.expovariate(total / 60.0) if total > 0 else math.inf)
            while pending and pending[0][0] < min(nxt, t1):
                when, count = pending.pop(0)
                nonempty[m] += (when - now) / 60.0 if bikes > 0 else 0.0
                nonfull[m] += (when - now) / 60.0 if bikes < capacity else 0.0
                now = when
                bikes = max(0, min(capacity, bikes + count))
            stop = min(nxt, t1)
            nonempty[m] += (stop - now) / 60.0 if bikes > 0 else 0.0
            nonfull[m] += (stop - now) / 60.0 if bikes < capacity else 0.0
            now = stop
            if nxt >= t1:
                break
            if rng.random() < ret[m] / total:
                if bikes < capacity:
                    bikes += 1
                    events.append((round(now, 3), "return"))
            elif bikes > 0:
                bikes -= 1
                events.append((round(now, 3), "rental"))
    nonempty = [round(min(v, MINUTES), 3) for v in nonempty]
    nonfull = [round(min(v, MINUTES), 3) for v in nonfull]
    full = [round(MINUTES - v, 3) for v in nonfull]
    empty = [round(MINUTES - v, 3) for v in nonempty]
    return events, nonempty, nonfull, full, empty


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    roles = ["residential", "business", "mixed"]
    stations = []
    rates = {}
    for s in range(STATIONS):
        sid = f"st{s:02d}"
        role = roles[s % 3]
        cap = rng.randint(12, 30)
        bikes = rng.randint(cap // 4, 3 * cap // 4)
        stations.append({
            "id": sid,
            "current_docks": cap,
            "current_bikes": bikes,
            "l": max(0, cap - 10),
            "u": cap + 12,
            "lat": round(40.70 + 0.012 * (s // 7) + rng.uniform(-0.002, 0.002), 6),
            "lon": round(-74.02 + 0.012 * (s % 7) + rng.uniform(-0.002, 0.002), 6),
            "role": role,
        })
        rates[sid] = hourly_rates(role, rng)

    trip_rows = []
    status_rows = []
    for st in stations:
        rent, ret = rates[st["id"]]
        for _ in range(DAYS):
            events, nonempty, nonfull, _, _ = simulate_day(rent, ret, st["current_docks"], st["current_bikes"], rng)
            trip_rows += [(st["id"], int(t), kind) for t, kind in events]
            status_rows += [(st["id"], m, nonempty[m], nonfull[m]) for m in range(INTERVALS)]

    with open(out / "trips.csv", "w") as f:
        f.write("station_id,timestamp,kind\n")
        for sid, t, kind in trip_rows:
            f.write(f"{sid},{t},{kind}\n")
    with open(out / "status.csv", "w") as f:
        f.write("station_id,interval,minutes_nonempty,minutes_nonfull\n")
        for sid, m, ne, nf in status_rows:
            f.write(f"{sid},{m},{ne:g},{nf:g}\n")
    with open(out / "stations.json", "w") as f:
        json.dump({"stations": stations}, f, indent=1)
        f.write("\n")

    # Observed days after a reallocation, for the posterior report.
    days = []
    for k, st in enumerate(stations[:8]):
        rent, ret = rates[st["id"]]
        delta = rng.choice([-6, -4, -3, 3, 4, 6])
        after = max(4, st["current_docks"] + delta)
        bikes = min(after, st["current_bikes"])
        reb = [(rng.uniform(30000, 60000), rng.choice([-4, -2, 3, 5]))] if k % 2 == 0 else []
        events, _, _, full, empty = simulate_day(rent, ret, after, bikes, rng, reb)
        days.append({
            "station_id": st["id"],
            "capacity_after": after,
            "bikes_at_open": bikes,
            "capacity_before": st["current_docks"],
            "events": [{"time": t, "kind": kind} for t, kind in events],
            "full_periods": [{"interval": m, "minutes": v} for m, v in enumerate(full) if v > 0],
            "empty_periods": [{"interval": m, "minutes": v} for m, v in enumerate(empty) if v > 0],
            "rebalancing": [{"time": round(t, 3), "count": c} for t, c in reb],
        })
    with open(out / "days.json", "w") as f:
        json.dump({"days": days}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
