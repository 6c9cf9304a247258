"""Independent reference implementations used to pin expected test values.

Everything here is deliberately naive (loops, direct formulas) and shares no
code with the library paths it checks.
"""

from __future__ import annotations

import math

import numpy as np


def naive_dense(weights, biases, x):
    """Triple-loop matrix multiply plus bias, one sample per row."""
    n = len(x)
    out_dim = len(weights)
    in_dim = len(weights[0])
    out = [[0.0] * out_dim for _ in range(n)]
    for s in range(n):
        for o in range(out_dim):
            acc = 0.0
            for i in range(in_dim):
                acc += weights[o][i] * x[s][i]
            out[s][o] = acc + biases[o]
    return np.array(out)


def direct_tanh(x: float) -> float:
    """(e^x - e^-x) / (e^x + e^-x) evaluated literally."""
    return (math.exp(x) - math.exp(-x)) / (math.exp(x) + math.exp(-x))


def fd_gradient(loss_fn, blocks: dict[str, np.ndarray], step: float = 1e-6):
    """Central finite differences of ``loss_fn()`` w.r.t. every block entry.

    ``loss_fn`` takes no arguments; the blocks are perturbed in place and
    restored. Returns a dict of gradient arrays mirroring ``blocks``.
    """
    grads = {}
    for name, theta in blocks.items():
        flat = theta.reshape(-1)
        g = np.zeros_like(flat)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            plus = loss_fn()
            flat[i] = original - step
            minus = loss_fn()
            flat[i] = original
            g[i] = (plus - minus) / (2.0 * step)
        grads[name] = g.reshape(theta.shape)
    return grads


def max_relative_error(analytic: dict[str, np.ndarray], numeric: dict[str, np.ndarray]) -> float:
    """Worst entrywise |a - b| / max(1, |a| + |b|) across all blocks."""
    worst = 0.0
    for name, a in analytic.items():
        b = numeric[name]
        denom = np.maximum(1.0, np.abs(a) + np.abs(b))
        worst = max(worst, float(np.max(np.abs(a - b) / denom)))
    return worst


def brute_force_confusion(predictions, truth):
    """Per-pair counting loop for TP/FP/FN/TN."""
    tp = fp = fn = tn = 0
    for p, t in zip(predictions, truth):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1 and t == 0:
            fp += 1
        elif p == 0 and t == 1:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def brute_force_metrics(tp: int, fp: int, fn: int):
    """Precision, recall, F-measure straight from the definitions; 0 when undefined."""
    pr = tp / (tp + fp) if tp + fp > 0 else 0.0
    re = tp / (tp + fn) if tp + fn > 0 else 0.0
    fm = 2.0 * (pr * re) / (pr + re) if pr + re > 0 else 0.0
    return pr, re, fm
