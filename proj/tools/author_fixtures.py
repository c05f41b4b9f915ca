#!/usr/bin/env python3
"""Regenerates the bundled scenes, episodes, scripts and run configurations.

Each scripted route is a list of floor waypoints. For every leg the script picks
the egocentric view facing the leg and the normalized pixel where the floor point
just beyond the waypoint appears, so grounding (which backs off 1.5 agent radii
from the surface hit) lands on the waypoint.
"""

import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

WIDTH, HEIGHT = 128, 96
FX = FY = (WIDTH / 2) / math.tan(math.pi / 4)
CX, CY = (WIDTH - 1) / 2, (HEIGHT - 1) / 2
MOUNT = 1.25
AGENT_RADIUS = 0.18
PULL = 1.5 * AGENT_RADIUS
D_MAX = 3.0
# ego_k looks k quarter turns clockwise of the heading
EGO_OFFSETS = [0.0, -math.pi / 2, math.pi, math.pi / 2]

WALL_H = 2.5
WALL_COLOR = [200, 190, 170]


def box(label, lo, hi, color=None):
    return {"label": label, "min": list(lo), "max": list(hi), "color": color or WALL_COLOR}


def room_walls(x0, y0, x1, y1, t=0.1, prefix="wall"):
    return [
        box(f"{prefix}_south", (x0 - t, y0 - t, 0), (x1 + t, y0, WALL_H)),
        box(f"{prefix}_north", (x0 - t, y1, 0), (x1 + t, y1 + t, WALL_H)),
        box(f"{prefix}_west", (x0 - t, y0, 0), (x0, y1, WALL_H)),
        box(f"{prefix}_east", (x1, y0, 0), (x1 + t, y1, WALL_H)),
    ]


def scene(name, lo, hi, boxes):
    return {
        "format": "gta-scene",
        "version": 1,
        "name": name,
        "floor_height": 0.0,
        "floor_color": [150, 140, 120],
        "bounds": {"min": list(lo), "max": list(hi)},
        "boxes": boxes,
    }


SCENES = {
    "box_room": scene("box_room", (-0.1, -0.1), (4.1, 4.1), room_walls(0, 0, 4, 4)),
    "corridor_L": scene(
        "corridor_L",
        (-0.1, -0.1),
        (6.1, 6.1),
        [
            box("south_wall", (-0.1, -0.1, 0), (6.1, 0.0, WALL_H)),
            box("east_wall", (6.0, -0.1, 0), (6.1, 6.1, WALL_H)),
            box("inner_north_wall", (-0.1, 1.5, 0), (4.5, 1.6, WALL_H)),
            box("inner_west_wall", (4.4, 1.6, 0), (4.5, 6.1, WALL_H)),
            box("west_cap", (-0.1, 0.0, 0), (0.0, 1.5, WALL_H)),
            box("north_cap", (4.5, 6.0, 0), (6.0, 6.1, WALL_H)),
        ],
    ),
    "corridor_straight": scene(
        "corridor_straight", (-0.1, -0.1), (8.1, 1.8), room_walls(0, 0, 8, 1.6)
    ),
    "open_hall": scene(
        "open_hall",
        (-0.1, -0.1),
        (10.1, 8.1),
        room_walls(0, 0, 10, 8)
        + [
            box("pillar_a", (3.0, 3.0, 0), (3.6, 3.6, WALL_H), [120, 120, 200]),
            box("pillar_b", (6.5, 4.5, 0), (7.1, 5.1, WALL_H), [120, 120, 200]),
            box("crate", (8.0, 1.0, 0), (8.8, 1.6, 0.6), [180, 120, 60]),
        ],
    ),
    "two_rooms": scene(
        "two_rooms",
        (-0.1, -0.1),
        (8.1, 4.1),
        room_walls(0, 0, 8, 4)
        + [
            box("divider_south", (3.95, 0.0, 0), (4.05, 1.4, WALL_H)),
            box("divider_north", (3.95, 2.6, 0), (4.05, 4.0, WALL_H)),
            box("sofa", (1.0, 3.0, 0), (2.6, 3.6, 0.8), [90, 60, 140]),
        ],
    ),
}


def ego_pixel(agent, heading, target):
    """View name and normalized (u, v) that grounds to `target` from `agent`."""
    dx, dy = target[0] - agent[0], target[1] - agent[1]
    dist = math.hypot(dx, dy)
    bearing = math.atan2(dy, dx)
    reach = dist + PULL
    hit = (agent[0] + reach * math.cos(bearing), agent[1] + reach * math.sin(bearing))
    for k, off in enumerate(EGO_OFFSETS):
        yaw = heading + off
        fwd = (math.cos(yaw), math.sin(yaw))
        right = (math.sin(yaw), -math.cos(yaw))
        rel = (hit[0] - agent[0], hit[1] - agent[1])
        zc = rel[0] * fwd[0] + rel[1] * fwd[1]
        xc = rel[0] * right[0] + rel[1] * right[1]
        if zc <= 0:
            continue
        px = CX + FX * xc / zc
        py = CY + FY * MOUNT / zc
        if 0 <= px <= WIDTH - 1 and 0 <= py <= HEIGHT - 1:
            u = round(px / (WIDTH - 1) * 1000)
            v = round(py / (HEIGHT - 1) * 1000)
            return f"ego_{k}", u, v
    raise ValueError(f"no ego view sees the floor beyond {target} from {agent}")


def polyline_length(pts):
    return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))


def make_episode(eid, scene_name, start, theta, route, instruction, plan, max_steps=20):
    """`route` lists the waypoints after `start`; the last one is the goal."""
    steps = []
    pos, heading = tuple(start), theta
    for i, wp in enumerate(route):
        if math.dist(pos, wp) > D_MAX - 0.05:
            raise ValueError(f"{eid}: leg {i} is longer than the horizon")
        view, u, v = ego_pixel(pos, heading, wp)
        done = [{"text": t, "done": j < plan_progress(plan, i, len(route))} for j, t in enumerate(plan)]
        steps.append(
            {
                "step": i,
                "response": {
                    "thought": f"Heading for waypoint {i + 1} of {len(route)}.",
                    "todo": done,
                    "action": {"type": "waypoint", "view": view, "u": u, "v": v},
                },
            }
        )
        heading = math.atan2(wp[1] - pos[1], wp[0] - pos[0])
        pos = tuple(wp)
    path = [tuple(start)] + [tuple(p) for p in route]
    episode = {
        "format": "gta-episode",
        "version": 1,
        "id": eid,
        "scene": f"../scenes/{scene_name}.scene",
        "start": {"x": start[0], "y": start[1], "theta": theta},
        "goal": list(route[-1]),
        "instruction": instruction,
        "success_radius": 3.0,
        "shortest_path_length": round(polyline_length(path), 6),
        "reference_path": [list(p) for p in path],
        "max_steps": max_steps,
    }
    script = {
        "format": "gta-script",
        "version": 1,
        "plan": [{"text": t, "done": False} for t in plan],
        "steps": steps,
        "terminal": "stop",
    }
    return episode, script


def plan_progress(plan, step, legs):
    return (step * len(plan)) // legs


SUITE = [
    ("room_cross", "box_room", (0.8, 0.8), 0.0, [(2.6, 0.8), (2.6, 3.0)],
     "Walk along the south wall, then turn left and stop near the north wall.",
     ["Walk along the south wall", "Turn left", "Stop near the north wall"]),
    ("room_diagonal", "box_room", (0.7, 0.7), math.pi / 4, [(2.2, 2.2), (3.3, 3.3)],
     "Cross the room diagonally to the far corner.",
     ["Cross the room", "Stop in the far corner"]),
    ("room_turnaround", "box_room", (3.2, 2.0), math.pi, [(1.2, 2.0), (1.2, 3.5)],
     "Go to the west side of the room and turn right toward the north wall.",
     ["Go to the west side", "Turn right", "Stop by the north wall"]),
    ("corridor_run", "corridor_straight", (0.6, 0.8), 0.0, [(3.2, 0.8), (5.8, 0.8), (7.4, 0.8)],
     "Walk down the corridor to the end.",
     ["Walk down the corridor", "Stop at the end"]),
    ("corridor_return", "corridor_straight", (7.3, 0.8), math.pi, [(4.6, 0.8), (2.0, 0.8)],
     "Turn back along the corridor and stop near the far end.",
     ["Walk back along the corridor", "Stop near the end"]),
    ("l_turn", "corridor_L", (0.75, 0.75), 0.0, [(3.0, 0.75), (5.25, 0.75), (5.25, 3.0), (5.25, 5.25)],
     "Exit the corridor and turn left at the corner, then continue to the end.",
     ["Walk to the corner", "Turn left", "Continue to the end"]),
    ("l_turn_back", "corridor_L", (5.25, 5.3), -math.pi / 2, [(5.25, 3.0), (5.25, 0.75), (2.7, 0.75)],
     "Go down the corridor and turn right at the corner.",
     ["Go down the corridor", "Turn right at the corner", "Stop in the short leg"]),
    ("hall_pillars", "open_hall", (1.0, 1.0), math.pi / 4, [(2.0, 2.6), (2.6, 4.6), (5.2, 5.6)],
     "Pass the first pillar on its left and stop north-west of the second pillar.",
     ["Pass the first pillar", "Reach the second pillar"]),
    ("hall_crate", "open_hall", (5.0, 7.0), -math.pi / 2, [(5.0, 4.5), (6.2, 2.4), (8.4, 2.3)],
     "Head south, then go around toward the crate and stop beside it.",
     ["Head south", "Go to the crate"]),
    ("hall_long", "open_hall", (9.0, 7.0), math.pi, [(6.4, 7.0), (4.2, 6.0), (2.0, 5.0), (1.0, 3.0)],
     "Walk west along the north wall, then down to the west side of the hall.",
     ["Walk west", "Go down the west side"]),
    ("doorway", "two_rooms", (1.5, 1.0), 0.0, [(3.0, 2.0), (5.2, 2.0), (7.0, 3.3)],
     "Exit the room through the doorway and stop in the corner of the next room.",
     ["Exit the room", "Stop in the corner of the next room"]),
    ("doorway_back", "two_rooms", (7.0, 1.0), math.pi, [(5.2, 2.0), (2.8, 2.0), (1.2, 0.8)],
     "Go through the doorway back into the first room.",
     ["Go through the doorway", "Stop in the first room"]),
]


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def main():
    for name, doc in SCENES.items():
        write_json(ROOT / "scenes" / f"{name}.scene", doc)
    names = []
    for eid, scene_name, start, theta, route, instruction, plan in SUITE:
        episode, script = make_episode(eid, scene_name, start, theta, route, instruction, plan)
        write_json(ROOT / "episodes" / f"{eid}.episode", episode)
        write_json(ROOT / "scripts" / f"{eid}.script", script)
        names.append(eid)
    base = {
        "format": "gta-run",
        "version": 1,
        "scene_dir": "scenes",
        "episode_dir": "episodes",
        "script_dir": "scripts",
        "episodes": names,
        "thresholds": {"delta_merge": 0.8, "tau_loop": 3, "delta_s": 0.5, "d_max": D_MAX},
        "max_steps": 20,
        "seed": 0,
    }
    write_json(ROOT / "suite.json", dict(base, backend="scripted", output_dir="../out/suite"))
    write_json(ROOT / "suite_greedy.json", dict(base, backend="greedy", output_dir="../out/greedy"))


if __name__ == "__main__":
    main()
