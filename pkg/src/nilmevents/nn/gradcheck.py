"""Finite-difference verification of the hand-derived gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_CHECKABLE_PARAMETERS = 5000


@dataclass
class GradientCheckReport:
    """Worst relative error per parameter block, against central differences."""

    tolerance: float
    step: float
    block_errors: dict[str, float]
    worst_block: str
    worst_error: float
    passed: bool

    def format(self) -> str:
        lines = [f"gradient check (step={self.step:g}, tolerance={self.tolerance:g})"]
        for name in sorted(self.block_errors):
            err = self.block_errors[name]
            mark = "ok  " if err <= self.tolerance else "FAIL"
            lines.append(f"  {mark} {name}: {err:.3e}")
        verdict = "PASSED" if self.passed else f"FAILED (worst: {self.worst_block})"
        lines.append(verdict)
        return "\n".join(lines)


def _relative_error(a: float, b: float) -> float:
    # |a - b| scaled by the larger of 1 and the combined magnitude, so tiny
    # absolute discrepancies on near-zero gradients do not dominate.
    return abs(a - b) / max(1.0, abs(a) + abs(b))


def gradient_check(
    network,
    x,
    labels,
    tolerance: float = 1e-5,
    step: float = 1e-6,
    analytic: dict[str, np.ndarray] | None = None,
) -> GradientCheckReport:
    """Compare analytic gradients against central finite differences.

    ``network`` must expose ``trainable()``, ``running_stats()``,
    ``loss(x, labels)`` and ``loss_and_gradients(x, labels)``. The check is
    deterministic, restores every parameter and running statistic it touches,
    and refuses networks above ``MAX_CHECKABLE_PARAMETERS`` (two loss
    evaluations per parameter).

    A precomputed ``analytic`` gradient dictionary can be supplied to audit
    gradients produced elsewhere (fault injection in tests, for example).
    """
    blocks = network.trainable()
    total = sum(int(b.size) for b in blocks.values())
    if total > MAX_CHECKABLE_PARAMETERS:
        raise ValueError(
            f"network has {total} parameters; finite differences are only "
            f"tractable up to {MAX_CHECKABLE_PARAMETERS}"
        )
    stats_backup = {name: arr.copy() for name, arr in network.running_stats().items()}
    if analytic is None:
        _, analytic = network.loss_and_gradients(x, labels)
    block_errors: dict[str, float] = {}
    try:
        for name, theta in blocks.items():
            grad = analytic[name]
            worst = 0.0
            flat = theta.reshape(-1)
            grad_flat = np.asarray(grad).reshape(-1)
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + step
                loss_plus = network.loss(x, labels)
                flat[i] = original - step
                loss_minus = network.loss(x, labels)
                flat[i] = original
                numeric = (loss_plus - loss_minus) / (2.0 * step)
                worst = max(worst, _relative_error(float(grad_flat[i]), numeric))
            block_errors[name] = worst
    finally:
        for name, arr in network.running_stats().items():
            arr[...] = stats_backup[name]
    worst_block = max(block_errors, key=block_errors.get)
    worst_error = block_errors[worst_block]
    return GradientCheckReport(
        tolerance=tolerance,
        step=step,
        block_errors=block_errors,
        worst_block=worst_block,
        worst_error=worst_error,
        passed=worst_error <= tolerance,
    )
