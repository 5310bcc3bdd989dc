"""Hierarchical multi-scale twin regression on residuals.

A stack of Gaussian-kernel twin regressors is trained coarse to fine: layer
v fits the residual left by layers 1..v-1 with kernel scale
``tau_v = tau_1 / n**(v-1)``, its loss weight set to ``S * var(residuals)``.
After the first fit of each layer, points far from the epsilon tube are
pruned and the layer is refit on the kept set with the loss weight scaled up
by the kept fraction's inverse, which cuts support vectors without giving up
accuracy.  The final prediction is the sum over layers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from . import tsvr
from .tsvr import DimensionMismatch, KernelSpec, TrainingSet, TsvrModel, TsvrParams


class InvalidDivisor(Exception):
    """Scale divisor below 2."""


class DegenerateDomain(Exception):
    """Input domain has zero diameter; no first scale can be derived."""


class ZeroVariance(Exception):
    """Residuals are constant; there is nothing left to fit."""


class EmptyPrunedSet(Exception):
    """Second-pass trade-off is undefined for an empty kept set."""


@dataclass(frozen=True)
class HierarchyConfig:
    """Knobs for the layered fit.

    ``tau1=None`` derives the first scale from the input-domain diagonal;
    ``tube_tolerance=None`` uses 0.1 * eps; ``stop_residual_var=None`` uses
    1e-4 * var(Y).  ``base_params`` supplies the per-layer regularization
    (p3, p4); its loss weights are overwritten with the variance rule.
    """

    max_layers: int = 6
    tau1: float | None = None
    scale_divisor: float = 2.0
    s_factor: float = 1.0
    eps: float = 0.1
    tube_tolerance: float | None = None
    stop_residual_var: float | None = None
    # A coarse layer often stalls while finer scales still have structure to
    # capture, so the improvement stop is off by default (0 = stop only when
    # a layer yields no improvement at all).
    stop_rel_improvement: float = 0.0
    base_params: TsvrParams | None = None
    pruning_enabled: bool = True

    def __post_init__(self):
        if self.max_layers < 1:
            raise ValueError("max_layers must be >= 1")
        if self.scale_divisor < 2:
            raise InvalidDivisor("scale divisor must be >= 2")
        if not (0 < self.s_factor <= 5):
            raise ValueError("s_factor must lie in (0, 5]")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.tube_tolerance is not None and self.tube_tolerance <= 0:
            raise ValueError("tube_tolerance must be positive")
        if self.stop_residual_var is not None and self.stop_residual_var < 0:
            raise ValueError("stop_residual_var must be non-negative")
        if self.stop_rel_improvement < 0:
            raise ValueError("stop_rel_improvement must be non-negative")

    def regularization(self) -> tuple[float, float]:
        if self.base_params is None:
            return 0.1, 0.1
        return self.base_params.p3, self.base_params.p4

    def resolved_tube_tolerance(self) -> float:
        if self.tube_tolerance is not None:
            return self.tube_tolerance
        return 0.1 * self.eps if self.eps > 0 else 1e-8


@dataclass(frozen=True)
class LayerState:
    """One trained layer and its bookkeeping.

    ``pruned_indices`` is the tube-proximity set the pruning rule selected
    (the candidate support vectors); ``second_pass_adopted`` records whether
    the refit on that set actually replaced the full-set model.
    """

    index: int
    tau: float
    b_v: float
    b_v_prime: float
    model: TsvrModel
    pruned_indices: NDArray[np.intp]
    residual_variance_in: float
    second_pass_adopted: bool = False


@dataclass(frozen=True)
class HfTsvrModel:
    """Trained hierarchy; prediction is the sum of layer predictions."""

    layers: tuple[LayerState, ...]
    config: HierarchyConfig
    input_dim: int
    training_report: dict = field(default_factory=dict)


def scale_schedule(tau1: float, n: float, v: int) -> list[float]:
    """Geometric scale sequence ``[tau1, tau1/n, ..., tau1/n**(v-1)]``."""
    if tau1 <= 0:
        raise ValueError("tau1 must be positive")
    if n < 2:
        raise InvalidDivisor("scale divisor must be >= 2")
    if v < 1:
        raise ValueError("need at least one layer")
    return [tau1 / n**k for k in range(v)]


def auto_tau1(ts: TrainingSet, factor: float = 1.0) -> float:
    """First-layer scale: the Euclidean diagonal of the input bounding box."""
    if ts.m < 2:
        raise ValueError("need at least two samples to measure the domain")
    extents = ts.a.max(axis=0) - ts.a.min(axis=0)
    diameter = float(np.sqrt(np.sum(extents**2)))
    if diameter == 0.0:
        raise DegenerateDomain("all inputs coincide")
    return factor * diameter


def layer_tradeoff(residuals: NDArray, s_factor: float) -> float:
    """Loss weight for the next layer: s_factor times the residual variance."""
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size == 0:
        raise ValueError("residuals must be non-empty")
    if not (0 < s_factor <= 5):
        raise ValueError("s_factor must lie in (0, 5]")
    variance = float(np.var(residuals))
    if variance == 0.0:
        raise ZeroVariance("constant residuals")
    return s_factor * variance


def prune_set(
    residuals_after: NDArray, eps: float, n: float, tp: float
) -> NDArray[np.intp]:
    """Indices kept for the second pass (0-based).

    Keeps points on the tube border (``| |r| - eps | < tp``) and points well
    inside it (``|r| < eps / n``).  The border test uses |r| so both tube
    sides count.  An empty result is legal and skips the second pass.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if n < 2:
        raise InvalidDivisor("scale divisor must be >= 2")
    if tp <= 0:
        raise ValueError("tp must be positive")
    r = np.abs(np.asarray(residuals_after, dtype=float).ravel())
    keep = (np.abs(r - eps) < tp) | (r < eps / n)
    return np.flatnonzero(keep)


def second_pass_tradeoff(b_v: float, full_size: int, pruned_size: int) -> float:
    """Rescaled loss weight ``b_v * |TS| / |TS'|`` for the pruned refit."""
    if pruned_size < 1:
        raise EmptyPrunedSet("cannot rescale for an empty kept set")
    return b_v * full_size / pruned_size


def _layer_params(config: HierarchyConfig, b: float, tau: float) -> TsvrParams:
    p3, p4 = config.regularization()
    return TsvrParams(
        p1=b, p2=b, p3=p3, p4=p4,
        eps1=config.eps, eps2=config.eps,
        kernel=KernelSpec("gaussian", tau),
    )


def train_hierarchy(ts: TrainingSet, config: HierarchyConfig) -> HfTsvrModel:
    """Train layers on successive residuals until a stopping rule fires.

    Stops when the residual variance falls below the floor, when the
    relative improvement drops below ``stop_rel_improvement``, when the
    residuals go constant, or at ``max_layers``.  A layer that fails to
    reduce the residual variance is discarded and training stops; kept
    layers therefore strictly decrease the variance.
    """
    tau1 = config.tau1 if config.tau1 is not None else auto_tau1(ts)
    taus = scale_schedule(tau1, config.scale_divisor, config.max_layers)
    var_y = float(np.var(ts.y))
    var_floor = (
        config.stop_residual_var
        if config.stop_residual_var is not None
        else 1e-4 * var_y
    )
    tp = config.resolved_tube_tolerance()

    residual = ts.y.copy()
    layers: list[LayerState] = []
    rows: list[dict] = []
    stop_reason = "max_layers"

    for v, tau in enumerate(taus, start=1):
        var_in = float(np.var(residual))
        if var_in == 0.0:
            stop_reason = "zero_variance"
            break
        if var_in <= var_floor:
            stop_reason = "variance_floor"
            break

        b_v = layer_tradeoff(residual, config.s_factor)
        layer_ts = TrainingSet(ts.a, residual)
        t0 = time.perf_counter()
        first_pass = tsvr.train(layer_ts, _layer_params(config, b_v, tau))

        model_v = first_pass
        b_v_prime = b_v
        pruned = np.arange(ts.m)
        adopted = False
        if config.pruning_enabled:
            after = residual - tsvr.predict(first_pass, ts.a)
            var_first = float(np.var(after))
            pruned = prune_set(after, config.eps, config.scale_divisor, tp)
            if 0 < pruned.size < ts.m:
                b_v_prime = second_pass_tradeoff(b_v, ts.m, pruned.size)
                second = tsvr.train(
                    layer_ts.subset(pruned),
                    _layer_params(config, b_v_prime, tau),
                )
                # The refit is a support-vector optimization, not a mandate:
                # adopt it only while it retains a meaningful share of the
                # first-pass improvement (a near-empty tube can select an
                # unrepresentative subset whose refit memorizes a few points).
                var_second = float(np.var(residual - tsvr.predict(second, ts.a)))
                if var_in - var_second >= 0.25 * (var_in - var_first):
                    model_v, adopted = second, True
        elapsed = time.perf_counter() - t0

        next_residual = residual - tsvr.predict(model_v, ts.a)
        var_out = float(np.var(next_residual))
        if var_out >= var_in:
            stop_reason = "no_improvement"
            break

        layers.append(
            LayerState(
                index=v,
                tau=tau,
                b_v=b_v,
                b_v_prime=b_v_prime,
                model=model_v,
                pruned_indices=pruned,
                residual_variance_in=var_in,
                second_pass_adopted=adopted,
            )
        )
        rows.append(
            {
                "layer": v,
                "tau": tau,
                "b_v": b_v,
                "b_v_prime": b_v_prime,
                "sv_count_full": first_pass.support_vector_count(),
                "sv_count_final": model_v.support_vector_count(),
                "prune_set_size": int(pruned.size),
                "second_pass_adopted": adopted,
                "total_points": ts.m,
                "residual_variance_in": var_in,
                "residual_variance_out": var_out,
                "train_seconds": elapsed,
            }
        )
        residual = next_residual

        if (
            config.stop_rel_improvement > 0
            and (var_in - var_out) / var_in <= config.stop_rel_improvement
        ):
            stop_reason = "small_improvement"
            break

    report = {
        "target_variance": var_y,
        "variance_floor": var_floor,
        "stop_reason": stop_reason,
        "layers": rows,
    }
    resolved = replace(config, tau1=tau1)
    return HfTsvrModel(
        layers=tuple(layers),
        config=resolved,
        input_dim=ts.d,
        training_report=report,
    )


def predict_hierarchy(model: HfTsvrModel, x: NDArray) -> float | NDArray[np.float64]:
    """Sum of layer predictions in layer order; 0 for an empty hierarchy."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != model.input_dim:
        raise DimensionMismatch(
            f"query has dimension {x2.shape[1]}, model expects {model.input_dim}"
        )
    total = np.zeros(x2.shape[0])
    for layer in model.layers:
        total = total + np.atleast_1d(tsvr.predict(layer.model, x2))
    return float(total[0]) if single else total
