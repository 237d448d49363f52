#!/usr/bin/env python3
"""Writes configs/layouts/factory_default.json.

Hall of 100 m x 40 m with a serpentine AGV route, six gNBs on a 2x3 grid,
five Wi-Fi APs and a LiFi AP every 3 m along the route. Static users are
placed next to the route so every WAT covers them.
"""
import json
import math
import random
import sys

HALL = (100.0, 40.0)
ROUTE = [(5, 5), (95, 5), (95, 15), (5, 15), (5, 25), (95, 25), (95, 35), (5, 35)]
RX_HEIGHT = 1.0
LIFI_SPACING = 3.0


def route_points(step):
    pts = []
    carry = 0.0
    for (x0, y0), (x1, y1) in zip(ROUTE, ROUTE[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        s = carry
        while s <= seg + 1e-9:
            f = s / seg
            pts.append((x0 + f * (x1 - x0), y0 + f * (y1 - y0)))
            s += step
        carry = s - seg
    return pts


def main(out_path, n_users=100, seed=7):
    rng = random.Random(seed)
    nodes = []
    gnb_xy = [(x, y) for y in (5.0, 35.0) for x in (100 / 6, 50.0, 500 / 6)]
    for i, (x, y) in enumerate(gnb_xy, start=1):
        nodes.append({"id": i, "wat": "5G", "pos": [round(x, 3), y, 4.0],
                      "tx_power_dbm": 30.0, "carrier_hz": 3.5e9, "bandwidth_hz": 80e6})
    wifi_xy = [(10.0, 20.0), (30.0, 10.0), (50.0, 30.0), (70.0, 10.0), (90.0, 20.0)]
    for i, (x, y) in enumerate(wifi_xy, start=1):
        nodes.append({"id": i, "wat": "WiFi", "pos": [x, y, 4.0],
                      "tx_power_dbm": 20.0, "carrier_hz": 5e9, "bandwidth_hz": 80e6, "channel": 36})
    for i, (x, y) in enumerate(route_points(LIFI_SPACING), start=1):
        nodes.append({"id": i, "wat": "LiFi", "pos": [round(x, 3), round(y, 3), 3.0],
                      "tx_power_dbm": -28.0, "carrier_hz": 337e12, "bandwidth_hz": 20e6})
    users = []
    anchors = route_points(0.5)
    for uid in range(1, n_users + 1):
        ax, ay = anchors[rng.randrange(len(anchors))]
        r = rng.uniform(0.0, 1.5)
        th = rng.uniform(0.0, 2 * math.pi)
        x = min(max(ax + r * math.cos(th), 0.5), HALL[0] - 0.5)
        y = min(max(ay + r * math.sin(th), 0.5), HALL[1] - 0.5)
        users.append({"id": uid, "pos": [round(x, 3), round(y, 3), RX_HEIGHT]})
    layout = {
        "bounds_m": {"x_min": 0.0, "y_min": 0.0, "x_max": HALL[0], "y_max": HALL[1]},
        "wat_models": {
            "5G": {"model": "log_distance", "pl0_db": 43.3, "exponent": 4.0, "d0_m": 1.0,
                   "noise_figure_db": 7.0, "rs_offset_db": 38.0},
            "WiFi": {"model": "log_distance", "pl0_db": 46.4, "exponent": 3.5, "d0_m": 1.0,
                     "noise_figure_db": 7.0, "rs_offset_db": 28.0},
            "LiFi": {"model": "lambertian", "semi_angle_deg": 45.0, "fov_deg": 60.0,
                     "detector_area_m2": 1e-4, "filter_gain": 1.0, "concentrator_gain": 1.0,
                     "noise_figure_db": 7.0, "rs_offset_db": 18.0},
        },
        "nodes": nodes,
        "static_users": users,
        "agv": {"path": [[x, y, RX_HEIGHT] for x, y in ROUTE], "speed_mps": 0.7, "end": "stop"},
    }
    with open(out_path, "w") as f:
        json.dump(layout, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "configs/layouts/factory_default.json")
