"""Second probe round: stabilized momentum and phase-1 vertex policies."""

import numpy as np
import random

from pd_oracle import (Rule, build_system, lit, neg, marginal, simplex_solve,
                       feasible_vertex)
from probe_sgd import bench_random


def sgd_stab(a, b, variant, seed=7, lr=None, momentum=0.99, tol=1e-3,
             max_epochs=200000, clip_first=None):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, cols = a.shape
    if lr is None:
        lr = 1.0 / cols
    if clip_first is None:
        clip_first = cols
    rng = random.Random(seed)
    pi = np.full(cols, 1.0 / cols)
    vel = np.zeros(cols)
    order = list(range(m))
    best = float(np.max(np.abs(a @ pi - b)))
    for epoch in range(max_epochs):
        rng.shuffle(order)
        for i in order:
            err = float(a[i] @ pi - b[i])
            vel = momentum * vel - lr * 2.0 * err * a[i]
            nxt = pi + vel
            np.clip(nxt[:clip_first], 0.0, 1.0, out=nxt[:clip_first])
            if variant in ("clipreset", "both") and not np.array_equal(
                    nxt, pi + vel):
                vel[:] = 0.0
            pi = nxt
        resid = float(np.max(np.abs(a @ pi - b)))
        if resid < tol:
            return pi, True, epoch + 1, resid
        if variant in ("restart", "both") and resid > best:
            vel[:] = 0.0
        best = min(best, resid)
    return pi, False, max_epochs, float(np.max(np.abs(a @ pi - b)))


rules29 = [Rule(lit(0), [lit(1)], 0.9), Rule(lit(1), [], 0.8)]
a29, b29, _ = build_system(2, rules29, "owa")
rules9 = [Rule(lit(0), [neg(lit(1))], 1.0), Rule(lit(1), [], 1.0),
          Rule(lit(0), [], 0.5)]
a9, b9, _ = build_system(2, rules9, "pcwa")

benches = [(4, 6, 11), (4, 10, 3), (6, 16, 5), (6, 64, 9), (5, 12, 2)]

for variant in ("restart", "clipreset", "both"):
    pi, c1, e1, r1 = sgd_stab(a29, b29, variant, max_epochs=50000)
    ok29 = c1 and abs(marginal(pi, 2, [lit(1)]) - 0.8) <= 2e-3 \
        and abs(pi[3] - 0.72) <= 2e-3
    _, c9, e9, r9 = sgd_stab(a9, b9, variant, max_epochs=2000)
    line = (f"{variant:9s} chain: conv={c1} ep={e1} pins="
            f"{'OK' if ok29 else 'off'} | infeas conv={c9} resid={r9:.1e} |")
    for (n, nr, sd) in benches:
        rb = bench_random(n, nr, sd)
        ab, bb, _ = build_system(n, rb, "owa")
        _, cb, eb, _ = sgd_stab(ab, bb, variant, max_epochs=20000)
        line += f" b({n},{nr}):{'Y' if cb else 'N'}@{eb}"
    print(line)

print()
print("-- phase-1 entering policies vs table-3 noME pins --")
rules15 = [Rule(lit(0), [lit(1)], 0.5), Rule(neg(lit(1)), [lit(2)], 0.5)]
a_owa, b_owa, _ = build_system(3, rules15, "owa")
a_pcwa, b_pcwa, _ = build_system(3, rules15, "pcwa")
pin_owa = [1, 0, 0, 0, 0, 0, 0, 0]
pin_pcwa = [0, 0.5, 0, 0.25, 0, 0, 0, 0.25]


def lexmax_vertex(a, b):
    """Maximize pi(0), fix it, maximize pi(1), ... via repeated LP."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    nw = a.shape[1]
    for w in range(nw):
        c = np.zeros(nw)
        c[w] = -1.0  # simplex_solve minimizes
        st, x, val = simplex_solve(a, b, c)
        if st != "optimal":
            return st, None
        a = np.vstack([a, np.eye(nw)[w]])
        b = np.append(b, x[w])
    return "optimal", x


for name in ("dantzig", "bland"):
    st, v = feasible_vertex(a_owa, b_owa, name)
    st2, v2 = feasible_vertex(a_pcwa, b_pcwa, name)
    print(f"phase1-{name:8s} owa {np.round(v,3)} pcwa {np.round(v2,3)}")

st, v = lexmax_vertex(a_owa, b_owa)
st2, v2 = lexmax_vertex(a_pcwa, b_pcwa)
ok1 = max(abs(v - np.array(pin_owa))) < 1e-2
ok2 = max(abs(v2 - np.array(pin_pcwa))) < 1e-2
print(f"lexmax            owa {np.round(v,3)} hit={ok1} "
      f"pcwa {np.round(v2,3)} hit={ok2}")
