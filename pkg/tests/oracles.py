"""Independent reference implementations used only by the tests.

Nothing here imports the package's loss code: the binary losses are written
out again in mpmath so that finite differences run in 50-digit arithmetic and
the float64 rounding of the difference quotient does not pollute the check.
"""

import mpmath as mp

mp.mp.dps = 50


def mp_binary_loss(kind, r, z):
    m = z * r
    if kind == "hinge":
        return max(mp.mpf(0), 1 - m)
    if kind == "logistic":
        return mp.log(1 + mp.exp(-m))
    if kind == "square":
        return (r - z) ** 2
    if kind == "sigmoid":
        return 1 / (1 + mp.exp(m))
    if kind == "mae":
        return 2 / (1 + mp.exp(m))
    raise ValueError(kind)


def mp_surrogate(kind, h, y, r, c):
    return (h - y) ** 2 * mp_binary_loss(kind, r, -1) + c * mp_binary_loss(kind, r, 1)


def central_diff(f, x, step=1e-6):
    x = mp.mpf(x)
    s = mp.mpf(step)
    return (f(x + s) - f(x - s)) / (2 * s)


def surrogate_fd(kind, h, y, r, c, step=1e-6):
    """(d/dh, d/dr) of the surrogate by high-precision central differences."""
    h, y, r, c = map(mp.mpf, (h, y, r, c))
    dh = central_diff(lambda v: mp_surrogate(kind, v, y, r, c), h, step)
    dr = central_diff(lambda v: mp_surrogate(kind, h, y, v, c), r, step)
    return float(dh), float(dr)


def rel_err(a, b):
    denom = max(abs(a), abs(b))
    return 0.0 if denom == 0 else abs(a - b) / denom


def naive_matmul(a, b):
    n, k = len(a), len(a[0])
    m = len(b[0])
    return [[sum(a[i][p] * b[p][j] for p in range(k)) for j in range(m)] for i in range(n)]


def tally_metrics(h, y, r, c):
    """Per-example loop over the metric definitions, no vectorisation."""
    n = len(y)
    acc_sq, rej_sq, rej_cost = [], [], []
    keep = keep_rejected = drop = drop_accepted = 0
    for i in range(n):
        sq = (h[i] - y[i]) ** 2
        accepted = r[i] > 0
        if accepted:
            acc_sq.append(sq)
        else:
            rej_sq.append(sq)
            rej_cost.append(c[i])
        if sq < c[i]:
            keep += 1
            keep_rejected += not accepted
        else:
            drop += 1
            drop_accepted += accepted
    return {
        "rcr_loss": (sum(acc_sq) + sum(rej_cost)) / n,
        "rej": len(rej_sq) / n,
        "al": sum(acc_sq) / len(acc_sq) if acc_sq else None,
        "rl": sum(rej_sq) / len(rej_sq) if rej_sq else None,
        "ar": keep_rejected / keep if keep else None,
        "ra": drop_accepted / drop if drop else None,
        "n_accepted": len(acc_sq),
    }
