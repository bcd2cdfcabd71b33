"""Reference LP values for the acceptance fixtures, computed with HiGHS.

Writes crates/core/tests/data/oracle_lp.json. Independent of the Rust code:
columns are enumerated outright and the master LPs are written from the
formulas, not from the solver's builders.
"""
import itertools
import json
import math
import random
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

EPS = 1e-6
OUT = Path(__file__).resolve().parent.parent / "crates/core/tests/data/oracle_lp.json"


def cost(theta, members):
    total = 0.0
    for a, b in itertools.combinations(members, 2):
        t = theta.get((min(a, b), max(a, b)))
        if t is None:
            return None
        total += t
    return 2.0 * total


def xi(theta, members, d):
    s = 0.0
    for e in members:
        if e != d:
            t = theta[(min(d, e), max(d, e))]
            s += t * (2.0 if t < 0 else 1.0)
    return EPS + max(0.0, -s)


def solve(costs, a_ub, b_ub):
    res = linprog(costs, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


def rmp_none(n, theta, cols):
    a = np.zeros((n, len(cols)))
    for j, g in enumerate(cols):
        for d in g:
            a[d, j] = 1
    return solve([cost(theta, g) for g in cols], a, np.ones(n))


def rmp_varying(n, theta, cols):
    big = [EPS] * n
    for g in cols:
        for d in g:
            big[d] = max(big[d], xi(theta, g, d))
    a = np.zeros((n, len(cols) + n))
    for j, g in enumerate(cols):
        for d in g:
            a[d, j] = 1
    for d in range(n):
        a[d, len(cols) + d] = -1
    return solve([cost(theta, g) for g in cols] + big, a, np.ones(n))


def rmp_flexible(n, theta, cols, k):
    rows, costs_xi = [], []
    col_rows = [[] for _ in cols]
    for d in range(n):
        vals = sorted({xi(theta, g, d) for g in cols if d in g})
        if not vals:
            continue
        picked = sorted({vals[math.ceil(i * len(vals) / (k + 1)) - 1] for i in range(1, k + 2)})
        prev = 0.0
        for w in picked:
            rows.append((d, w))
            costs_xi.append(w - prev)
            prev = w
        for j, g in enumerate(cols):
            if d in g:
                x = xi(theta, g, d)
                top = min(w for w in picked if w >= x)
                for r, (dd, w) in enumerate(rows):
                    if dd == d and w <= top:
                        col_rows[j].append(r)
    a = np.zeros((len(rows), len(cols) + len(rows)))
    for j, rs in enumerate(col_rows):
        for r in rs:
            a[r, j] = 1
    for r in range(len(rows)):
        a[r, len(cols) + r] = -1
    return solve([cost(theta, g) for g in cols] + costs_xi, a, np.ones(len(rows)))


def golden():
    theta = {(0, 1): -100.0, (1, 2): -100.0, (0, 2): -100.0, (3, 4): -100.0, (2, 3): -1.0, (2, 4): -1.0}
    cols = [(0, 1, 2), (2, 3, 4)]
    return {
        "none": rmp_none(5, theta, cols),
        "varying": rmp_varying(5, theta, cols),
        "flexible": rmp_flexible(5, theta, cols, 5),
    }


def random_instance(rng):
    n = rng.randint(3, 10)
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.5:
                pairs.append((a, b, rng.randint(-8, 6) / 4.0))
    return n, pairs


def enumeration_lp(n, pairs):
    theta = {(a, b): t for a, b, t in pairs}
    cols = []
    for size in range(2, n + 1):
        for g in itertools.combinations(range(n), size):
            c = cost(theta, g)
            if c is not None and c < 0:
                cols.append(g)
    if not cols:
        return 0.0
    return rmp_none(n, theta, cols)


def main():
    rng = random.Random(20240611)
    instances = []
    for _ in range(100):
        n, pairs = random_instance(rng)
        instances.append({"n": n, "pairs": [list(p) for p in pairs], "lp": enumeration_lp(n, pairs)})
    lines = ",\n  ".join(json.dumps(i) for i in instances)
    OUT.write_text('{"golden": %s,\n "instances": [\n  %s\n ]}\n' % (json.dumps(golden()), lines))
    print(json.dumps(golden()))


if __name__ == "__main__":
    main()
