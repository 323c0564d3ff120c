"""Regenerate the map and scenario files shipped in src/divdrive/data."""
import json
import math
from pathlib import Path

import numpy as np

from divdrive.sim.maps import right_turn_map, save_map, straight_lane_map

DATA = Path(__file__).resolve().parents[1] / "src" / "divdrive" / "data"


def right_turn_core(lane=4.0, start_y=10.0, radius=6.0, end_x=10.0, spacing=0.25):
    c = lane / 2
    cx, cy = -c + radius, -c + radius
    pts = [(-c, start_y), (-c, cy)]
    n = int(math.ceil(radius * math.pi / 2 / spacing))
    for i in range(1, n + 1):
        ang = math.pi + (math.pi / 2) * i / n  # sweep from west of center to north of center
        pts.append((cx + radius * math.cos(ang), cy + radius * math.sin(ang)))
    pts.append((end_x, -c))
    return [[round(x, 12), round(y, 12)] for x, y in pts]


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    save_map(DATA / "right_turn_map.json", right_turn_map())
    save_map(DATA / "straight_lane_map.json", straight_lane_map())
    follow = {"type": "scripted", "target_speed": 2.0, "lookahead": 4.0}
    right_turn = {
        "id": "right_turn",
        "map": "right_turn_map.json",
        "seed": 0,
        "time_limit": 25.0,
        "mode": "EVAL",
        "ego": 0,
        "weights": {"move": 100.0, "collision": 300.0, "angle": 0.0, "center": 0.0},
        "vehicles": [
            {"name": "ego", "route": "ego", "pose": [-2.0, 10.0, -math.pi / 2], "speed": 0.0,
             "perturb": [-2.0, 2.0], "policy": "ego", "blind_to": []},
            {"name": "oncoming", "route": "oncoming", "pose": [2.0, -24.0, math.pi / 2], "speed": 2.0,
             "perturb": [-3.0, 3.0], "policy": follow, "blind_to": ["ego"]},
        ],
        "core": right_turn_core(),
    }
    straight = {
        "id": "straight_lane",
        "map": "straight_lane_map.json",
        "seed": 0,
        "time_limit": 25.0,
        "mode": "EVAL",
        "ego": 0,
        "weights": {"move": 100.0, "collision": 300.0, "angle": 0.0, "center": 0.0},
        "vehicles": [
            {"name": "ego", "route": "ego", "pose": [4.0, 0.0, 0.0], "speed": 0.0,
             "perturb": [-2.0, 2.0], "policy": "ego", "blind_to": []},
        ],
        "core": [[4.0, 0.0], [26.0, 0.0]],
    }
    for name, sc in (("right_turn", right_turn), ("straight_lane", straight)):
        (DATA / f"{name}_scenario.json").write_text(json.dumps(sc, indent=1) + "\n")


if __name__ == "__main__":
    np.set_printoptions(precision=12)
    main()
