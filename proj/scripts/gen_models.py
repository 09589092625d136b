#!/usr/bin/env python3
"""Regenerates the bundled model specs under models/.

Run from the repository root: python3 scripts/gen_models.py
"""
import json
import math
import pathlib
from collections import deque

OUT = pathlib.Path(__file__).resolve().parent.parent / "models"


def write(name, doc):
    path = OUT / name
    path.write_text(json.dumps(doc, indent=2) + "\n")
    print("wrote", path)


# --- small closed-loop evaluator used to find reachable cells -------------

def tick(node, x):
    """Returns (status, leaf) of a nested ("seq"|"fal", [...]) / leaf tree."""
    kind = node[0]
    if kind in ("seq", "fal"):
        stop = "success" if kind == "fal" else "failure"
        for child in node[1][:-1]:
            st, leaf = tick(child, x)
            if st != ("success" if kind == "seq" else "failure"):
                return st, leaf
        return tick(node[1][-1], x)
    _, name, succ, fail = node[:4]
    if succ(x):
        return "success", node
    if fail(x):
        return "failure", node
    return "running", node


def closed_loop_reach(tree, starts):
    seen, todo = set(starts), deque(starts)
    while todo:
        x = todo.popleft()
        _, leaf = tick(tree, x)
        if leaf[0] != "act":
            continue
        y = leaf[4](x)
        if y not in seen:
            seen.add(y)
            todo.append(y)
    return seen


def leaf_json(kind, name, cells, succ, fail, ctrl=None, doa=None):
    idx = {c: i for i, c in enumerate(cells)}
    d = {"id": name, "kind": kind,
         "success": [i for i, c in enumerate(cells) if succ(c)],
         "failure": [i for i, c in enumerate(cells) if fail(c)]}
    if ctrl is not None:
        nxt = []
        for c in cells:
            y = ctrl(c)
            nxt.append(idx.get(y, idx[c]))  # leaving the universe: hold
        d["controller"] = nxt
        d["doa"] = doa if doa is not None else "auto"
    return d


def tree_json(node):
    if node[0] in ("seq", "fal"):
        return {node[0]: [tree_json(c) for c in node[1]], "name": node[2]}
    return node[1]


def leaves_of(node):
    if node[0] in ("seq", "fal"):
        for c in node[1]:
            yield from leaves_of(c)
    else:
        yield node


NEVER = lambda x: False


def derive_doa(cells, ctrl, allowed, success):
    """Largest DOA inside `allowed`: goal = fixed points in success, basin =
    cells whose orbit stays in `allowed` and reaches the goal."""
    idx = {c: i for i, c in enumerate(cells)}
    nxt = [idx.get(ctrl(c), i) for i, c in enumerate(cells)]
    ok = [allowed(c) for c in cells]
    goal = [ok[i] and success(c) and nxt[i] == i for i, c in enumerate(cells)]
    basin, tau = [], 1
    for i in range(len(cells)):
        x, steps = i, 0
        while ok[x] and not goal[x] and steps <= len(cells):
            x, steps = nxt[x], steps + 1
        if ok[x] and goal[x]:
            basin.append(i)
            tau = max(tau, steps)
    return {"basin": basin, "goal": [i for i in range(len(cells)) if goal[i]], "tau": tau}


# --- surveying robot -------------------------------------------------------
# state (pos, b, ch, s): pos 0 home / 1 path, battery 0..10, charging flag,
# survey progress 0..K

K = 10
BMAX = 10


def survey_leaves():
    cond = lambda name, p: ("cond", name, p, lambda x, p=p: not p(x))

    def go_home(x):
        pos, b, ch, s = x
        return (0, b - 1, ch, s) if pos == 1 else x

    def charge(x):
        pos, b, ch, s = x
        if pos != 0:
            return x
        nb = min(b + 1, BMAX)
        return (0, nb, int(nb < BMAX), s)

    def go_to_path(x):
        pos, b, ch, s = x
        return (1, b - 1, 0, s) if pos == 0 else x

    def follow_path(x):
        pos, b, ch, s = x
        return (1, max(b - 1, 1), ch, min(s + 1, K)) if pos == 1 else x

    def idle(x):
        pos, b, ch, s = x
        return (0, b, ch, s) if pos == 1 else x

    home = lambda x: x[0] == 0
    path = lambda x: x[0] == 1
    L = {
        "battery_ok": cond("battery_ok", lambda x: x[1] >= 2 and x[2] == 0),
        "at_home": cond("at_home", home),
        "battery_left": cond("battery_left", lambda x: x[1] >= 1),
        "go_home": ("act", "go_home", home, NEVER, go_home),
        "charge": ("act", "charge", lambda x: x[1] == BMAX, path, charge),
        "path_surveyed": cond("path_surveyed", lambda x: x[3] == K),
        "near_path": cond("near_path", path),
        "battery_left_2": cond("battery_left_2", lambda x: x[1] >= 1),
        "go_to_path": ("act", "go_to_path", path, NEVER, go_to_path),
        "follow_path": ("act", "follow_path", lambda x: x[3] == K, NEVER, follow_path),
        "idle": ("act", "idle", home, NEVER, idle),
    }
    return L


def survey_tree(L, follow=None):
    follow = follow or L["follow_path"]
    return ("seq", [
        ("fal", [L["battery_ok"],
                 ("seq", [("fal", [L["at_home"],
                                   ("seq", [L["battery_left"], L["go_home"]], "return")], "home_guard"),
                          L["charge"]], "recharge")], "battery_guard"),
        ("fal", [L["path_surveyed"],
                 ("seq", [("fal", [L["near_path"],
                                   ("seq", [L["battery_left_2"], L["go_to_path"]], "approach")], "path_guard"),
                          follow], "survey_path")], "survey_guard"),
        L["idle"]], "survey")


# every fully charged home state, at any survey progress
SURVEY_STARTS = [(0, BMAX, 0, s) for s in range(K + 1)]


def survey_universe():
    L = survey_leaves()
    return sorted(closed_loop_reach(survey_tree(L), SURVEY_STARTS)), L


def survey_label(c):
    pos, b, ch, s = c
    return f"{'home' if pos == 0 else 'path'} b{b} c{ch} s{s}"


def surveying():
    cells, L = survey_universe()
    tree = survey_tree(L)
    # Idle is only trusted once the survey is done on a charged battery.
    done = lambda x: x[3] == K and x[1] >= 2 and x[2] == 0
    doas = {"idle": derive_doa(cells, L["idle"][4], done, L["idle"][2])}
    leaves = [leaf_json("action" if l[0] == "act" else "condition", l[1], cells, l[2], l[3],
                        l[4] if l[0] == "act" else None, doas.get(l[1])) for l in leaves_of(tree)]
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "coords": [list(map(float, c)) for c in cells],
                     "labels": [survey_label(c) for c in cells]},
        "leaves": leaves,
        "tree": tree_json(tree),
        "abstraction": ["go_home", "charge", "go_to_path", "follow_path", "idle"],
        "analysis": {"seeds": ["go_home:b"]},
    }
    write("surveying.json", doc)
    return cells, L


def surveying_library():
    cells, L = survey_universe()
    done = lambda x: x[3] == K and x[1] >= 2 and x[2] == 0
    pre = {"go_home": ["battery_left"], "charge": ["at_home"], "go_to_path": ["battery_left_2"],
           "follow_path": ["near_path"], "idle": ["battery_ok", "path_surveyed"]}
    ach = {"battery_ok": ["charge"], "at_home": ["go_home"], "battery_left": [],
           "path_surveyed": ["follow_path"], "near_path": ["go_to_path"], "battery_left_2": []}
    actions, conditions = [], []
    for name in ["go_home", "charge", "go_to_path", "follow_path", "idle"]:
        l = L[name]
        doa = derive_doa(cells, l[4], done, l[2]) if name == "idle" else None
        a = leaf_json("action", name, cells, l[2], l[3], l[4], doa)
        del a["kind"]
        a["preconditions"] = pre[name]
        actions.append(a)
    for name in ach:
        l = L[name]
        c = leaf_json("condition", name, cells, l[2], l[3])
        del c["kind"]
        c["achievers"] = ach[name]
        conditions.append(c)
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "coords": [list(map(float, c)) for c in cells],
                     "labels": [survey_label(c) for c in cells]},
        "library": {"root": "idle", "actions": actions, "conditions": conditions},
        "analysis": {"seeds": ["go_home:b"]},
    }
    write("surveying_lib.json", doc)


# --- surveying robot with a data-driven follow-path controller -------------
# state (pos, b, ch, s, r): r = 1 marks a risky posture left by the
# data-driven controller

def with_posture(f, always_reset=False):
    def g(x):
        y = f(x[:4])
        return y + ((0,) if always_reset or y != x[:4] else (x[4],))
    return g


def dd_follow(x):
    pos, b, ch, s, r = x
    return (1, max(b - 1, 1), ch, min(s + 2, K), 1) if pos == 1 else x


def risk_ok(x):
    # fresh arrivals on the path (b = 9) border home cells; keep DD away
    return x[4] == 0 and x[1] <= BMAX - 2


def reduce_risk(x):
    if x[0] != 1:
        return x
    if x[4] == 1:
        return x[:4] + (0,)
    if x[1] == BMAX - 1:
        pos, b, ch, s, _ = x
        return (1, b - 1, ch, min(s + 1, K), 0)
    return x


DD_BUDGET = 6
DD_HYSTERESIS = 2


def surveying_dd():
    L4 = survey_leaves()
    L = {}
    for name, l in L4.items():
        succ = lambda x, p=l[2]: p(x[:4])
        fail = lambda x, p=l[3]: p(x[:4])
        if l[0] == "act":
            L[name] = ("act", name, succ, fail, with_posture(l[4], name == "follow_path"))
        else:
            L[name] = ("cond", name, succ, fail)
    L["path_surveyed_2"] = ("cond", "path_surveyed_2", lambda x: x[3] == K, lambda x: x[3] != K)
    follow = ("fal", [L["path_surveyed_2"], L["follow_path"]], "follow_guard")
    tree = survey_tree(L, follow)

    starts = [s + (0,) for s in SURVEY_STARTS]
    seen, todo = set(starts), deque(starts)
    while todo:
        x = todo.popleft()
        _, leaf = tick(tree, x)
        nexts = [dd_follow(x), reduce_risk(x)]
        if leaf[0] == "act":
            nexts.append(leaf[4](x))
        for y in nexts:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    cells = sorted(seen)
    idx = {c: i for i, c in enumerate(cells)}

    done = lambda x: x[3] == K and x[1] >= 2 and x[2] == 0
    doas = {"idle": derive_doa(cells, L["idle"][4], done, L["idle"][2])}
    leaves = [leaf_json("action" if l[0] == "act" else "condition", l[1], cells, l[2], l[3],
                        l[4] if l[0] == "act" else None, doas.get(l[1])) for l in leaves_of(tree)]
    safe = [i for i, c in enumerate(cells) if risk_ok(c)]
    # Transitions the old or the new closed loop can take.
    pairs = set()
    for i, c in enumerate(cells):
        _, leaf = tick(tree, c)
        nexts = [dd_follow(c), reduce_risk(c), L["follow_path"][4](c)]
        if leaf[0] == "act":
            nexts.append(leaf[4](c))
        for y in nexts:
            j = idx.get(y, i)
            if j != i:
                pairs.add((min(i, j), max(i, j)))
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "adjacency": sorted(pairs),
                     "labels": [survey_label(c[:4]) + f" r{c[4]}" for c in cells]},
        "leaves": leaves,
        "tree": tree_json(tree),
        "abstraction": ["go_home", "charge", "go_to_path", "follow_path", "idle"],
        "analysis": {"seeds": ["go_home:b"]},
        "substitution": {
            "target": "follow_guard",
            "dd": {"name": "data_driven", "controller": [idx.get(dd_follow(c), i) for i, c in enumerate(cells)]},
            "rr": {"name": "reduce_risk", "success": safe, "failure": [],
                   "controller": [idx.get(reduce_risk(c), i) for i, c in enumerate(cells)], "doa": "auto"},
            "rok": safe,
            "time_budget": DD_BUDGET,
            "hysteresis": DD_HYSTERESIS,
        },
    }
    write("surveying_dd.json", doc)


# --- nine-region funnel ------------------------------------------------------
# One cell per prepares-graph vertex. Each funnel i drains its v_b cell into the
# next region of the chain 3 -> 2 -> 1 -> 4 -> 7 -> 8 -> 9 -> 6; B_4 also
# covers v_a(5), which is what closes the loop through v_a(5).

NINE_PRIORITY = [6, 9, 8, 7, 5, 4, 1, 2, 3]
NINE_NEXT = {3: "vb2", 2: "vb1", 1: "vb4", 4: "vb7", 7: "vc7", 8: "vb9", 9: "vb6", 5: "vb6", 6: "vc6"}
NINE_BASIN = {3: ["vb3", "vb2"], 2: ["vb2", "vb1"], 1: ["vb1", "vb4"], 4: ["vb4", "vb7", "va5"],
              7: ["vb7", "vb8", "vc7"], 8: ["vb8", "vb9"], 9: ["vb9", "vb6"], 5: ["vb5", "vb6"],
              6: ["vb6", "vc6"]}
NINE_GOAL = {3: "vb2", 2: "vb1", 1: "vb4", 4: "vb7", 7: "vc7", 8: "vb9", 9: "vb6", 5: "vb6", 6: "vc6"}
NINE_ADJ = [
    ("va1", "va2"), ("va2", "va3"), ("va3", "va6"), ("va1", "va4"), ("va4", "va7"),
    ("va7", "va8"), ("va8", "va9"), ("va9", "va6"),
    ("va1", "vb1"), ("va2", "vb2"), ("va3", "vb3"), ("va4", "vb4"), ("va6", "vb6"),
    ("va7", "vb7"), ("va8", "vb8"), ("va9", "vb9"),
    ("va2", "vb1"), ("va6", "vb3"), ("va9", "vb6"), ("va8", "vb9"), ("va7", "vb8"),
    ("va5", "vb4"), ("va5", "vb5"), ("va5", "vb2"), ("va5", "vb8"), ("va5", "vb6"),
    ("vb3", "vb2"), ("vb2", "vb1"), ("vb1", "vb4"), ("vb4", "vb7"), ("vb7", "vb8"),
    ("vb8", "vb9"), ("vb9", "vb6"), ("vb5", "vb6"), ("vb6", "vc6"), ("vb7", "vc7"),
]


def nine_region_funnel():
    cells = [f"va{i}" for i in range(1, 10)] + [f"vb{i}" for i in range(1, 10)] + ["vc6", "vc7"]
    idx = {c: n for n, c in enumerate(cells)}
    omega = {i: [f"va{i}", f"vb{i}"] + ([f"vc{i}"] if i in (6, 7) else []) for i in range(1, 10)}
    leaves = []
    for p, i in enumerate(NINE_PRIORITY):
        # Cells owned by higher-priority funnels never tick i; count them as
        # success so i's basin may reach into them.
        done = {c for j in NINE_PRIORITY[:p] for c in omega[j]}
        if i in (6, 7):
            done.add(f"vc{i}")
        fail = [c for c in cells if c not in done and c not in omega[i]]
        ctrl = []
        for c in cells:
            if c in NINE_BASIN[i]:
                ctrl.append(idx[NINE_NEXT[i]] if c != NINE_GOAL[i] else idx[c])
            elif c == f"va{i}":
                ctrl.append(idx[f"vb{i}"])
            else:
                ctrl.append(idx[c])
        leaves.append({
            "id": f"funnel{i}", "kind": "action",
            "success": sorted(idx[c] for c in done), "failure": sorted(idx[c] for c in fail),
            "controller": ctrl,
            "doa": {"basin": sorted(idx[c] for c in NINE_BASIN[i]), "goal": [idx[NINE_GOAL[i]]],
                    "tau": 1},
        })
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "labels": cells,
                     "adjacency": sorted([sorted([idx[a], idx[b]]) for a, b in NINE_ADJ])},
        "leaves": leaves,
        "tree": {"fal": [f"funnel{i}" for i in NINE_PRIORITY], "name": "root"},
        "abstraction": [f"funnel{i}" for i in range(1, 10)],
        "analysis": {"seeds": ["funnel3:b"]},
    }
    write("nine_region_funnel.json", doc)


# --- eat tree ----------------------------------------------------------------
# Symbolic universe: one cell per combination of leaf statuses.

EAT_LEAVES = ["eat_apple", "peel_banana", "eat_banana"]


def eat_tree():
    import itertools
    cells = list(itertools.product("RSF", repeat=3))
    idx = {c: n for n, c in enumerate(cells)}
    leaves = []
    for k, name in enumerate(EAT_LEAVES):
        leaves.append({"id": name, "kind": "action",
                       "success": [idx[c] for c in cells if c[k] == "S"],
                       "failure": [idx[c] for c in cells if c[k] == "F"],
                       "controller": list(range(len(cells))), "doa": "auto"})
    # neighbours differ in exactly one leaf status
    adj = [[idx[a], idx[b]] for a in cells for b in cells
           if idx[a] < idx[b] and sum(x != y for x, y in zip(a, b)) == 1]
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "adjacency": adj,
                     "labels": [" ".join(f"{n}={s}" for n, s in zip(("apple", "peel", "banana"), c)) for c in cells]},
        "leaves": leaves,
        "tree": {"fal": ["eat_apple", {"seq": ["peel_banana", "eat_banana"], "name": "eat_peeled_banana"}],
                 "name": "eat"},
        "abstraction": EAT_LEAVES,
    }
    write("eat_tree.json", doc)


# --- counterexample ----------------------------------------------------------
# A line of six cells; "park" only drives cells 3..5 to the end, and holds
# still everywhere else, so v_a(park) never empties.

def counterexample():
    n = 6
    doc = {
        "format": "btconv/1",
        "universe": {"cells": n, "adjacency": [[i, i + 1] for i in range(n - 1)],
                     "labels": [f"x{i}" for i in range(n)]},
        "leaves": [{"id": "park", "kind": "action", "success": [n - 1], "failure": [],
                    "controller": [i if i < 3 else min(i + 1, n - 1) for i in range(n)],
                    "doa": {"basin": [3, 4, 5], "goal": [5], "tau": 2}}],
        "tree": "park",
        "abstraction": ["park"],
        "analysis": {"seeds": ["park:a"]},
    }
    write("counterexample.json", doc)


# --- mobile manipulator ------------------------------------------------------
# state bits: safe, near_object, gripping, near_goal, object_at_goal

MANIP_BITS = ["safe", "near_object", "gripping", "near_goal", "object_at_goal"]


def manipulator_library():
    cells = [tuple((n >> k) & 1 for k in range(5)) for n in range(32)]
    idx = {c: n for n, c in enumerate(cells)}
    SAFE, NOBJ, GRIP, NGOAL, ATGOAL = range(5)
    sets = lambda *kv: (lambda x: tuple(dict(kv).get(k, x[k]) for k in range(5)))
    has = lambda *bits: (lambda x: all(x[b] for b in bits))
    every = lambda x: True
    # The object and the goal lie inside the safe area, so the conditions about
    # them imply "in safe area"; that keeps each B_i inside its ACC successes.
    conditions = [  # id, success, achievers
        ("in_safe_area", has(SAFE), ["go_to_safe_area"]),
        ("safe_area_reachable", every, []),
        ("object_at_goal", has(ATGOAL), ["place_object"]),
        ("object_in_gripper", has(GRIP), ["grasp_object"]),
        ("near_object", has(SAFE, NOBJ), ["go_to_object"]),
        ("object_reachable", has(SAFE), []),
        ("near_goal", has(SAFE, NGOAL), ["go_to_goal"]),
        ("goal_reachable", has(SAFE, GRIP), []),
    ]
    actions = [  # id, preconditions, success, controller
        ("go_to_safe_area", ["safe_area_reachable"], has(SAFE), sets((SAFE, 1))),
        ("go_to_object", ["object_reachable"], lambda x: x[SAFE] and x[NOBJ] and not x[NGOAL],
         sets((NOBJ, 1), (NGOAL, 0))),
        ("grasp_object", ["near_object"], has(GRIP), sets((GRIP, 1))),
        ("go_to_goal", ["goal_reachable"], lambda x: x[SAFE] and x[NGOAL] and not x[NOBJ],
         sets((NGOAL, 1), (NOBJ, 0))),
        ("place_object", ["object_in_gripper", "near_goal"], has(ATGOAL), sets((ATGOAL, 1))),
        ("idle", ["in_safe_area", "object_at_goal"], has(SAFE, ATGOAL), lambda x: x),
    ]
    cond_s = {c[0]: c[1] for c in conditions}
    lib_actions = []
    for name, pre, succ, ctrl in actions:
        basin = lambda x, pre=pre: all(cond_s[p](x) for p in pre)
        a = leaf_json("action", name, cells, succ, NEVER, ctrl, derive_doa(cells, ctrl, basin, succ))
        del a["kind"]
        a["preconditions"] = pre
        lib_actions.append(a)
    lib_conditions = []
    for name, succ, ach in conditions:
        c = leaf_json("condition", name, cells, succ, lambda x, succ=succ: not succ(x))
        del c["kind"]
        c["achievers"] = ach
        lib_conditions.append(c)
    ctrl_of = {a[0]: a[3] for a in actions}

    def running(x):  # the action the backchained tree ticks at x
        if not x[SAFE]:
            return "go_to_safe_area"
        if x[ATGOAL]:
            return "idle"
        if x[GRIP]:
            return "place_object" if x[NGOAL] else "go_to_goal"
        return "grasp_object" if x[NOBJ] else "go_to_object"

    # Physical neighbours are the moves the closed loop can make; letting every
    # controller act everywhere would make e.g. "grasp" neighbour "go to goal".
    adj = sorted({tuple(sorted((idx[x], idx[ctrl_of[running(x)](x)]))) for x in cells
                  if ctrl_of[running(x)](x) != x})
    doc = {
        "format": "btconv/1",
        "universe": {"cells": len(cells), "adjacency": [list(p) for p in adj],
                     "labels": [",".join(b for b, v in zip(MANIP_BITS, c) if v) or "-" for c in cells]},
        "library": {"root": "idle", "actions": lib_actions, "conditions": lib_conditions},
        "analysis": {"seeds": ["go_to_safe_area:b"]},
    }
    write("manipulator_lib.json", doc)


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    surveying()
    surveying_library()
    surveying_dd()
    nine_region_funnel()
    eat_tree()
    counterexample()
    manipulator_library()
