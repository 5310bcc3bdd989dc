"""Twin support vector regression with one-sided epsilon-insensitive tubes.

The estimator fits two proximal functions ``h1(x) = w1'x + b1`` and
``h2(x) = w2'x + b2`` by solving one box-constrained dual QP each, recovers
the weights through regularized normal equations, and predicts with the
average ``h(x) = (h1(x) + h2(x)) / 2``.  The first QP penalizes points where
h1 rises more than eps1 above the targets, the second penalizes h2 falling
more than eps2 below them, so the pair brackets the data.

Kernel mode replaces the raw inputs with a Gaussian kernel matrix
``K(x, z) = exp(-||x - z||^2 / tau^2)`` against the stored training basis;
every equation keeps its shape, the weight vectors just live in the span of
the basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import cdist

from .qp import BoxQp, QpSolution, solve_box_qp, solve_spd


class DimensionMismatch(Exception):
    """Query point dimension does not match the trained model."""


@dataclass(frozen=True)
class TrainingSet:
    """Crisp regression data: inputs ``a`` (m x d) and targets ``y`` (m,)."""

    a: NDArray[np.float64]
    y: NDArray[np.float64]

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if a.shape[0] != y.size:
            raise ValueError(f"{a.shape[0]} input rows but {y.size} targets")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("need at least one sample and one feature")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
            raise ValueError("training data contains non-finite values")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]

    def subset(self, indices: NDArray[np.intp]) -> "TrainingSet":
        return TrainingSet(self.a[indices], self.y[indices])


@dataclass(frozen=True)
class KernelSpec:
    """Feature map choice: ``linear`` or ``gaussian`` with length scale tau."""

    kind: str = "linear"
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "gaussian"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.tau is None or not self.tau > 0:
                raise ValueError("gaussian kernel needs tau > 0")


@dataclass(frozen=True)
class TsvrParams:
    """Hyperparameters: loss weights p1/p2, regularization p3/p4, tube widths.

    p1 bounds the multipliers of the down-function QP, p2 those of the
    up-function QP; p3/p4 are the ridge terms that make both duals strictly
    convex.  eps1/eps2 may be zero (the tube degenerates gracefully).
    """

    p1: float
    p2: float
    p3: float
    p4: float
    eps1: float = 0.0
    eps2: float = 0.0
    kernel: KernelSpec = field(default_factory=KernelSpec)

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eps1 < 0 or self.eps2 < 0:
            raise ValueError("tube widths must be non-negative")


@dataclass(frozen=True)
class TsvrDiagnostics:
    """Dual vectors and residual norms kept for KKT checks and reporting."""

    alpha: NDArray[np.float64]
    gamma: NDArray[np.float64]
    xi_star_norm: float
    eta_star_norm: float
    dual_objective_down: float
    dual_objective_up: float
    qp_iterations_down: int
    qp_iterations_up: int


@dataclass(frozen=True)
class TsvrModel:
    """Fitted twin regressor.

    ``w1``/``w2`` have length d in linear mode and length m (coefficients
    over ``basis``) in kernel mode.  Immutable; safe to share across threads.
    """

    w1: NDArray[np.float64]
    b1: float
    w2: NDArray[np.float64]
    b2: float
    kernel: KernelSpec
    params: TsvrParams
    basis: NDArray[np.float64] | None
    input_dim: int
    diagnostics: TsvrDiagnostics

    def support_vector_count(self, rel_tol: float = 1e-6) -> int:
        """Points whose down- or up-multiplier is active beyond rel_tol."""
        d = self.diagnostics
        active = (d.alpha > rel_tol * self.params.p1) | (
            d.gamma > rel_tol * self.params.p2
        )
        return int(np.count_nonzero(active))


def gaussian_kernel(x: NDArray, z: NDArray, tau: float) -> NDArray[np.float64]:
    """K_ij = exp(-||x_i - z_j||^2 / tau^2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    z = np.atleast_2d(np.asarray(z, dtype=float))
    return np.exp(-cdist(x, z, "sqeuclidean") / (tau * tau))


def build_design(ts: TrainingSet, kernel: KernelSpec) -> NDArray[np.float64]:
    """Design matrix with the bias column appended.

    Linear: ``[A | 1]`` (m x (d+1)).  Gaussian: ``[K(A, A) | 1]``
    (m x (m+1)).
    """
    ones = np.ones((ts.m, 1))
    if kernel.kind == "linear":
        return np.hstack([ts.a, ones])
    return np.hstack([gaussian_kernel(ts.a, ts.a, kernel.tau), ones])


def _dual_hessian(j: NDArray[np.float64], ridge: float) -> NDArray[np.float64]:
    """H = J (J'J + ridge I)^-1 J', formed by solving, never inverting."""
    m_small = j.T @ j + ridge * np.eye(j.shape[1])
    h = j @ solve_spd(m_small, j.T)
    return 0.5 * (h + h.T)  # kill round-off asymmetry before the QP


def assemble_dual_down(ts: TrainingSet, params: TsvrParams, j: NDArray) -> BoxQp:
    """Dual QP for the down function h1, in minimization form.

    ``min 1/2 a'Ha + c'a`` over ``[0, p1]`` with ``H = J(J'J + p3 I)^-1 J'``
    and ``c = eps1*1 + Y - H Y``; the negated maximization objective.
    """
    j = np.asarray(j, dtype=float)
    if j.shape[0] != ts.m:
        raise ValueError("design matrix row count must equal sample count")
    h = _dual_hessian(j, params.p3)
    c = params.eps1 + ts.y - h @ ts.y
    m = ts.m
    return BoxQp(h, c, np.zeros(m), np.full(m, params.p1))


def assemble_dual_up(ts: TrainingSet, params: TsvrParams, j: NDArray) -> BoxQp:
    """Dual QP for the up function h2 (the mirrored problem).

    ``min 1/2 g'Hg + c'g`` over ``[0, p2]`` with ``H = J(J'J + p4 I)^-1 J'``
    and ``c = H Y - Y + eps2*1``.
    """
    j = np.asarray(j, dtype=float)
    if j.shape[0] != ts.m:
        raise ValueError("design matrix row count must equal sample count")
    h = _dual_hessian(j, params.p4)
    c = h @ ts.y - ts.y + params.eps2
    m = ts.m
    return BoxQp(h, c, np.zeros(m), np.full(m, params.p2))


QpSolver = Callable[[BoxQp], QpSolution]


def _default_solver(problem: BoxQp) -> QpSolution:
    return solve_box_qp(problem)


def train(
    ts: TrainingSet,
    params: TsvrParams,
    qp_solver: QpSolver | None = None,
) -> TsvrModel:
    """Fit both proximal functions and return the averaged regressor.

    ``qp_solver`` may be swapped out (tests drive training through the grid
    oracle); it receives each assembled :class:`~twinreg.qp.BoxQp` and must
    return a :class:`~twinreg.qp.QpSolution`.
    """
    solver = qp_solver or _default_solver
    j = build_design(ts, params.kernel)

    sol_down = solver(assemble_dual_down(ts, params, j))
    sol_up = solver(assemble_dual_up(ts, params, j))
    alpha, gamma = sol_down.alpha, sol_up.alpha

    eye = np.eye(j.shape[1])
    v1 = solve_spd(j.T @ j + params.p3 * eye, j.T @ (ts.y - alpha))
    v2 = solve_spd(j.T @ j + params.p4 * eye, j.T @ (ts.y + gamma))

    xi_star = ts.y - j @ v1
    eta_star = j @ v2 - ts.y
    diagnostics = TsvrDiagnostics(
        alpha=alpha,
        gamma=gamma,
        xi_star_norm=float(np.linalg.norm(xi_star)),
        eta_star_norm=float(np.linalg.norm(eta_star)),
        dual_objective_down=sol_down.objective,
        dual_objective_up=sol_up.objective,
        qp_iterations_down=sol_down.iterations,
        qp_iterations_up=sol_up.iterations,
    )
    basis = ts.a.copy() if params.kernel.kind == "gaussian" else None
    return TsvrModel(
        w1=v1[:-1],
        b1=float(v1[-1]),
        w2=v2[:-1],
        b2=float(v2[-1]),
        kernel=params.kernel,
        params=params,
        basis=basis,
        input_dim=ts.d,
        diagnostics=diagnostics,
    )


def _feature_rows(model: TsvrModel, x: NDArray) -> tuple[NDArray[np.float64], bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != model.input_dim:
        raise DimensionMismatch(
            f"query has dimension {x.shape[1]}, model expects {model.input_dim}"
        )
    if model.kernel.kind == "gaussian":
        rows = gaussian_kernel(x, model.basis, model.kernel.tau)
    else:
        rows = x
    return rows, single


def predict(model: TsvrModel, x: NDArray) -> float | NDArray[np.float64]:
    """Averaged prediction ``(h1(x) + h2(x)) / 2``.

    Accepts a single point (returns a float) or a stack of rows (returns a
    vector).
    """
    rows, single = _feature_rows(model, x)
    values = 0.5 * (rows @ (model.w1 + model.w2) + (model.b1 + model.b2))
    return float(values[0]) if single else values


def predict_components(model: TsvrModel, x: NDArray) -> tuple[NDArray, NDArray]:
    """The two proximal functions evaluated separately (diagnostics)."""
    rows, _ = _feature_rows(model, x)
    return rows @ model.w1 + model.b1, rows @ model.w2 + model.b2


def slack_down(model: TsvrModel, ts: TrainingSet) -> NDArray[np.float64]:
    """Recovered inequality slack of the down problem: max(0, -r - eps1)."""
    h1, _ = predict_components(model, ts.a)
    return np.maximum(0.0, -(ts.y - h1) - model.params.eps1)


def slack_up(model: TsvrModel, ts: TrainingSet) -> NDArray[np.float64]:
    """Mirror slack of the up problem: max(0, -(h2 - y) - eps2)."""
    _, h2 = predict_components(model, ts.a)
    return np.maximum(0.0, -(h2 - ts.y) - model.params.eps2)
