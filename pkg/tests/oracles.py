"""Independent reference implementations used as test oracles.

Nothing here imports the code under test's numerics: the network oracle
recomputes forward pass and cost from scratch in extended precision, and the
metrics oracle counts outcomes element by element.
"""

import math

import numpy as np

from hearo.network import Model

LD = np.longdouble


def _act(kind: int, z):
    if kind == 1:
        return np.maximum(z, LD(0))
    if kind == 2:
        return LD(1) / (LD(1) + np.exp(-z))
    if kind == 3:
        return np.tanh(z)
    return np.where(z > 0, z, LD("0.01") * z)


def ld_cost(weights, biases, kinds, x, y, alpha: float) -> LD:
    """Cross-entropy plus alpha/(2nb)(sum ||W||^2 + sum ||b||^2), in long double."""
    a = np.asarray(x, dtype=LD)
    for w, b, k in zip(weights, biases, kinds):
        a = _act(k, w @ a + b)
    yl = np.asarray(y, dtype=LD)
    nb = a.shape[1]
    ce = -np.sum(yl * np.log(a) + (LD(1) - yl) * np.log(LD(1) - a)) / nb
    reg = sum(np.sum(w * w) for w in weights) + sum(np.sum(b * b) for b in biases)
    return ce + LD(alpha) / (2 * nb) * reg


def ld_preactivations(m: Model, x):
    a = np.asarray(x, dtype=LD)
    out = []
    for w, b, k in zip(m.weights, m.biases, m.hp.activations):
        z = w.astype(LD) @ a + b.astype(LD)
        out.append(z)
        a = _act(int(k), z)
    return out, a


def fd_gradients(m: Model, x, y, alpha: float, h: float = 1e-6):
    """Central differences of the long-double cost for every W and b entry."""
    ws = [w.astype(LD) for w in m.weights]
    bs = [b.astype(LD) for b in m.biases]
    kinds = [int(k) for k in m.hp.activations]
    hl = LD(h)

    def grad_of(params):
        g = np.zeros(params.shape, dtype=np.float64)
        for idx in np.ndindex(*params.shape):
            orig = params[idx]
            params[idx] = orig + hl
            up = ld_cost(ws, bs, kinds, x, y, alpha)
            params[idx] = orig - hl
            down = ld_cost(ws, bs, kinds, x, y, alpha)
            params[idx] = orig
            g[idx] = float((up - down) / (2 * hl))
        return g

    return [grad_of(w) for w in ws], [grad_of(b) for b in bs]


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def enum_confusion(pred, actual):
    tp = tn = fp = fn = 0
    for p, a in zip(pred, actual):
        if p == 1 and a == 1:
            tp += 1
        elif p == 0 and a == 0:
            tn += 1
        elif p == 1:
            fp += 1
        else:
            fn += 1
    return tp, tn, fp, fn


def enum_scores(tp, tn, fp, fn):
    """accuracy, mcc, precision, recall, f1 straight from their definitions."""
    n = tp + tn + fp + fn
    acc = (tp + tn) / n
    factors = [tp + fp, tp + fn, tn + fp, tn + fn]
    if 0 in factors:
        mcc = 0.0
    else:
        mcc = (tp * tn - fp * fn) / math.sqrt(factors[0]) / math.sqrt(factors[1]) / math.sqrt(factors[2]) / math.sqrt(factors[3])
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    return acc, mcc, prec, rec, f1


def gradcheck_instance(seed: int, n_layers: int, nb: int, hidden_kinds, alpha: float = 0.0):
    """A random small network, batch and labels whose ReLU-family units stay off their kink.

    Central differences straddle the kink when a pre-activation lies within h of
    zero, so draws that land closer than 1e-3 are rejected and redrawn.
    """
    from hearo.network import HyperParams, init_model
    from hearo.rng import Xoshiro256

    rng = Xoshiro256(seed)
    while True:
        n_input = 2 + rng.below(4)
        sizes = tuple(1 + rng.below(5) for _ in range(n_layers - 1)) + (1,)
        kinds = tuple(hidden_kinds[(seed + i) % len(hidden_kinds)] for i in range(n_layers - 1)) + (2,)
        hp = HyperParams(sizes, kinds, 0.1, alpha, nb, 1)
        base = init_model(hp, n_input, rng.next_u64())
        biases = tuple(np.array([[0.5 * rng.normal()] for _ in range(n)]) for n in sizes)
        m = Model(base.weights, biases, hp, n_input)
        x = np.array([[rng.normal() for _ in range(nb)] for _ in range(n_input)])
        y = np.array([[float(rng.below(2)) for _ in range(nb)]])
        zs, out = ld_preactivations(m, x)
        kinked = any(
            k in (1, 4) and np.min(np.abs(z)) < 1e-3 for z, k in zip(zs, kinds)
        )
        saturated = np.min(out) < 1e-6 or np.max(out) > 1 - 1e-6
        if not kinked and not saturated:
            return m, x, y


def max_gradcheck_error(m: Model, x, y, alpha: float) -> float:
    from hearo.network import backward, forward

    grads = backward(m, forward(m, x), y, alpha)
    fw, fb = fd_gradients(m, x, y, alpha)
    worst = 0.0
    for an, nu in zip(grads.dw + grads.db, fw + fb):
        for a, n in zip(an.ravel(), nu.ravel()):
            worst = max(worst, relative_error(float(a), float(n)))
    return worst


def separable_toy():
    """24 points on a grid in two features, labeled by the side of x1 + x2 = 0.5."""
    from hearo.dataset import Dataset

    pts = [(a / 3, b / 3) for a in range(-3, 3) for b in range(-2, 2)]
    x = np.array(pts).T
    y = np.array([[1.0 if p + q > 0.5 else 0.0 for p, q in pts]])
    return Dataset(x, y, ("f1", "f2"))
