"""Fixed-point empirical mean of Stiefel points under a retraction/lifting pair.

The mean of samples X_1..X_N is characterized implicitly: it is the point X
whose lifted samples average to zero, equivalently a solution of

    X = retract_X( (1/N) * sum_k lift_X(X_k) ).

The iteration below evaluates the right-hand side at the current iterate and
repeats until the discrepancy between consecutive iterates drops below
``conv_tol`` or ``max_iters`` is reached. An optional positive weighting of
the lifted samples generalizes the rule; weights enter exactly as given, the
1/N factor stays. Large unnormalized weights scale the combined step by
sum(w)/N, which destabilizes the iteration (and can push the step outside the
retraction's domain); callers who want strong emphasis on a sample should
renormalize weights to sum approximately N.

Lifting failures abort the run with the iteration and sample index attached;
running past ``max_iters`` is not an error and is reported through
``converged=False`` with the full trace.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, ValidationError
from .manifold import SampleSet, StiefelPoint, TangentVector, discrepancy
from .maps import MIXED_POLAR_ORTHO, MapPair, lift, retract

WeightSpec = Union[None, Sequence[float], Callable[..., Sequence[float]]]


@dataclass
class AveragingConfig:
    """Knobs of the fixed-point iteration.

    ``weights`` may be ``None`` (unweighted), a sequence of N positive reals,
    or a callable ``(iteration, point, samples) -> sequence`` evaluated once
    per iteration for adaptive schemes. ``epsilon_init`` is the scale of the
    random rotation used when an initial guess is derived from a sample.
    """

    pair: MapPair = MIXED_POLAR_ORTHO
    max_iters: int = 100
    conv_tol: float = 1e-10
    epsilon_init: float = 0.01
    weights: WeightSpec = None

    def __post_init__(self):
        if self.conv_tol <= 0.0:
            raise ValidationError(f"conv_tol must be positive, got {self.conv_tol}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class AveragingReport:
    """Outcome and per-iteration trace of one averaging run.

    ``step_sizes[i]`` is the discrepancy between iterates i and i+1;
    ``iterates_delta_to_center`` tracks the discrepancy of every iterate
    (including the initial guess) to the sample set's center when that is
    known, else ``None``. ``residual_field_norm`` is the norm of the combined
    lifted-sample tangent at the final point divided by N, using the same
    weighting the run used. ``converged`` implies the last step size is below
    the configured tolerance.
    """

    final_point: StiefelPoint
    iterations_used: int
    converged: bool
    step_sizes: list = field(default_factory=list)
    iterates_delta_to_center: Optional[list] = None
    cumulative_time_ns: list = field(default_factory=list)
    wall_time: float = 0.0
    residual_field_norm: float = float("nan")

    def write_trace_csv(self, path) -> None:
        """CSV trace: columns iter, step_size, delta_to_center,
        cumulative_time_ns. Row 0 describes the initial guess, so its
        step_size is empty; delta_to_center is empty throughout when the
        center is unknown."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("iter,step_size,delta_to_center,cumulative_time_ns\n")
            deltas = self.iterates_delta_to_center
            for i in range(self.iterations_used + 1):
                step = "" if i == 0 else f"{self.step_sizes[i - 1]:.17g}"
                dc = "" if deltas is None else f"{deltas[i]:.17g}"
                tns = 0 if i == 0 else self.cumulative_time_ns[i - 1]
                fh.write(f"{i},{step},{dc},{tns}\n")


def _resolve_weights(
    weights: WeightSpec, iteration: int, point: StiefelPoint, samples: SampleSet
) -> Optional[np.ndarray]:
    if weights is None:
        return None
    if callable(weights):
        w = np.asarray(weights(iteration, point, samples), dtype=float)
    else:
        w = np.asarray(weights, dtype=float)
    if w.shape != (len(samples),):
        raise ValidationError(
            f"need one weight per sample ({len(samples)}), got shape {w.shape}"
        )
    if not np.all(w > 0.0):
        raise ValidationError("weights must all be positive")
    return w


def _combined_tangent(
    pair: MapPair,
    point: StiefelPoint,
    samples: SampleSet,
    weights: Optional[np.ndarray],
    iteration: Optional[int],
) -> TangentVector:
    # Samples are combined in index order into a single accumulator so the
    # result is deterministic regardless of how callers schedule the lifts.
    acc = np.zeros_like(point.X)
    for k, xk in enumerate(samples.samples):
        try:
            vk = lift(pair, point, xk)
        except DomainError as exc:
            raise DomainError(
                f"lifting failed at iteration {iteration}, sample {k}: {exc}",
                iteration=iteration,
                sample_index=k,
            ) from exc
        if weights is None:
            acc += vk.V
        else:
            acc += weights[k] * vk.V
    acc /= len(samples)
    # a convex-style combination of tangents at one anchor stays tangent
    return TangentVector._unchecked(point, acc)


def _run(samples: SampleSet, config: AveragingConfig, initial: StiefelPoint,
         weights: WeightSpec) -> AveragingReport:
    if (initial.dims.p, initial.dims.n) != (samples.dims.p, samples.dims.n):
        raise ValidationError(
            f"initial guess dims {initial.dims} do not match samples {samples.dims}"
        )
    center = samples.center
    deltas = None if center is None else [discrepancy(initial, center)]
    steps: list = []
    times: list = []
    x = initial
    converged = False
    t0 = time.perf_counter_ns()
    for i in range(config.max_iters):
        w = _resolve_weights(weights, i, x, samples)
        vbar = _combined_tangent(config.pair, x, samples, w, i)
        x_next = retract(config.pair, x, vbar)
        step = discrepancy(x_next, x)
        steps.append(step)
        times.append(time.perf_counter_ns() - t0)
        if center is not None:
            deltas.append(discrepancy(x_next, center))
        x = x_next
        if step < config.conv_tol:
            converged = True
            break
    wall = (time.perf_counter_ns() - t0) / 1e9

    w = _resolve_weights(weights, len(steps), x, samples)
    residual = _combined_tangent(config.pair, x, samples, w, None).norm()
    return AveragingReport(
        final_point=x,
        iterations_used=len(steps),
        converged=converged,
        step_sizes=steps,
        iterates_delta_to_center=deltas,
        cumulative_time_ns=times,
        wall_time=wall,
        residual_field_norm=residual,
    )


def fixed_point_mean(
    samples: SampleSet, config: AveragingConfig, initial: StiefelPoint
) -> AveragingReport:
    """Unweighted fixed-point mean of ``samples`` under ``config.pair``.

    Iterates from ``initial`` until the step discrepancy falls below
    ``config.conv_tol`` or ``config.max_iters`` is exhausted. Every iterate
    is a validated Stiefel point. Any ``config.weights`` are ignored here;
    use ``weighted_fixed_point_mean`` for the weighted rule.
    """
    return _run(samples, config, initial, weights=None)


def weighted_fixed_point_mean(
    samples: SampleSet, config: AveragingConfig, initial: StiefelPoint
) -> AveragingReport:
    """Weighted fixed-point mean; requires ``config.weights``.

    The combined tangent is (1/N) sum_k w_k lift(X, X_k) with the weights
    used exactly as supplied. With all weights equal to one the trajectory
    matches the unweighted run bit for bit.
    """
    if config.weights is None:
        raise ValidationError("weighted_fixed_point_mean needs config.weights")
    return _run(samples, config, initial, weights=config.weights)


def residual_vector_field(
    point: StiefelPoint, samples: SampleSet, pair: MapPair
) -> float:
    """Norm of the lifted-sample field at ``point``:
    ``|| sum_k lift(point, X_k) ||_F / N`` under the pair's lifting.
    The fixed-point mean is a zero of this field."""
    return _combined_tangent(pair, point, samples, None, None).norm()
