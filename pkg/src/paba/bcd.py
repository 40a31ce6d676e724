"""Block coordinate descent on decomposable objectives, centralised and partitioned.

The partitioned round mirrors the push / compute / pull cycle: every worker
sees the whole parameter vector, computes the gradient of its group's block on
its data subset, and the server sums the per-worker pieces group by group in
fixed ``(k, n)`` order before applying the update.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .errors import InvalidArgumentError

LOSSES = ("logistic", "least_squares")
REGULARIZERS = ("l1", "l2", "none")


@dataclass
class Dataset:
    """Sparse design matrix (CSR, one row per sample) and labels."""

    features: sp.csr_matrix
    labels: np.ndarray

    def __post_init__(self):
        self.features = sp.csr_matrix(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float).reshape(-1)
        if self.features.shape[0] == 0:
            raise InvalidArgumentError("dataset is empty")
        if self.features.shape[0] != self.labels.shape[0]:
            raise InvalidArgumentError("one label per sample required")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx])


def load_libsvm(path, n_features: int | None = None) -> Dataset:
    """Read ``label idx:val ...`` lines with 1-based feature indices."""
    from sklearn.datasets import load_svmlight_file

    X, y = load_svmlight_file(str(path), n_features=n_features, zero_based=False)
    return Dataset(X.tocsr(), y)


def make_synthetic(n_samples: int, dim: int, density: float = 0.05, seed: int = 0,
                   loss: str = "logistic", noise: float = 0.1) -> Dataset:
    """Random sparse features with labels from a sparse ground-truth model."""
    rng = np.random.default_rng(seed)
    X = sp.random(n_samples, dim, density=density, format="csr", random_state=rng,
                  data_rvs=lambda k: rng.standard_normal(k))
    truth = np.zeros(dim)
    support = rng.choice(dim, size=max(1, dim // 10), replace=False)
    truth[support] = rng.standard_normal(support.size) * 3.0
    z = X @ truth + noise * rng.standard_normal(n_samples)
    y = np.where(z >= 0, 1.0, -1.0) if loss == "logistic" else z
    return Dataset(X, y)


@dataclass
class LearningTask:
    """Loss, regulariser and step-size schedule.

    ``step_size`` is either a constant or a callable of the round index; when
    None, :func:`default_step_size` is used.
    """

    loss: str = "logistic"
    reg: str = "l1"
    reg_weight: float = 0.0
    step_size: float | Callable[[int], float] | None = None

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise InvalidArgumentError(f"loss must be one of {LOSSES}")
        if self.reg not in REGULARIZERS:
            raise InvalidArgumentError(f"reg must be one of {REGULARIZERS}")
        if self.reg_weight < 0:
            raise InvalidArgumentError("reg_weight must be >= 0")
        if isinstance(self.step_size, (int, float)) and self.step_size <= 0:
            raise InvalidArgumentError("step_size must be > 0")

    @property
    def smooth(self) -> bool:
        return self.reg != "l1"

    def step(self, round_index: int, dataset: Dataset | None = None) -> float:
        if self.step_size is None:
            if dataset is None:
                raise InvalidArgumentError("default step size needs the dataset")
            return default_step_size(self, dataset)
        if callable(self.step_size):
            eta = float(self.step_size(round_index))
            if eta <= 0:
                raise InvalidArgumentError("step sizes must be > 0")
            return eta
        return float(self.step_size)


@dataclass
class ModelState:
    theta: np.ndarray
    round: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if not np.all(np.isfinite(self.theta)):
            raise InvalidArgumentError("parameters must be finite")


def _check_dim(theta, dataset: Dataset):
    if theta.shape != (dataset.dimension,):
        raise InvalidArgumentError(
            f"parameter length {theta.shape} does not match data dimension {dataset.dimension}"
        )


def _loss_values(task, z, y):
    if task.loss == "logistic":
        return np.logaddexp(0.0, -y * z)
    return 0.5 * (z - y) ** 2


def _loss_slopes(task, z, y):
    """Derivative of the per-sample loss in the margin ``z = x . theta``."""
    if task.loss == "logistic":
        return -y * expit(-y * z)
    return z - y


def _reg_value(task, theta):
    if task.reg == "l1":
        return task.reg_weight * np.abs(theta).sum()
    if task.reg == "l2":
        return task.reg_weight * np.dot(theta, theta)
    return 0.0


def _reg_grad(task, theta):
    if task.reg == "l2":
        return 2.0 * task.reg_weight * theta
    return np.zeros_like(theta)


def objective(task: LearningTask, theta, dataset: Dataset) -> float:
    theta = np.asarray(theta, dtype=float)
    _check_dim(theta, dataset)
    z = dataset.features @ theta
    return float(_loss_values(task, z, dataset.labels).mean() + _reg_value(task, theta))


def accuracy(theta, dataset: Dataset) -> float:
    pred = np.where(dataset.features @ theta >= 0, 1.0, -1.0)
    return float(np.mean(pred == dataset.labels))


def block_gradient(task: LearningTask, theta, data: Dataset, block, group_size: int, n_total: int):
    """One worker's contribution to the gradient of its group's block.

    Loss terms are divided by the full dataset size ``n_total``; for a smooth
    regulariser each of the ``group_size`` workers adds ``1/group_size`` of its
    derivative, so summing a group's contributions gives the full-batch
    block gradient.
    """
    theta = np.asarray(theta, dtype=float)
    start, stop = block
    if not 0 <= start <= stop <= theta.shape[0]:
        raise InvalidArgumentError(f"block {block} out of range for {theta.shape[0]} parameters")
    if data.dimension != theta.shape[0]:
        raise InvalidArgumentError("data dimension does not match parameters")
    if group_size < 1 or n_total < 1:
        raise InvalidArgumentError("group_size and n_total must be >= 1")
    slopes = _loss_slopes(task, data.features @ theta, data.labels)
    grad = data.features[:, start:stop].T @ slopes / n_total
    if task.smooth:
        grad = grad + _reg_grad(task, theta[start:stop]) / group_size
    return np.asarray(grad).reshape(-1)


def full_gradient(task: LearningTask, theta, dataset: Dataset):
    """Full-batch gradient of the smooth part of the objective."""
    slopes = _loss_slopes(task, dataset.features @ theta, dataset.labels)
    grad = np.asarray(dataset.features.T @ slopes).reshape(-1) / dataset.n_samples
    if task.smooth:
        grad = grad + _reg_grad(task, theta)
    return grad


def prox_l1(y, threshold: float):
    """Soft-thresholding, the proximal map of ``threshold * |.|_1``."""
    if threshold < 0:
        raise InvalidArgumentError("threshold must be >= 0")
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.maximum(np.abs(y) - threshold, 0.0)


def _apply(task, theta, grad, eta):
    moved = theta - eta * grad
    if task.reg == "l1":
        return prox_l1(moved, eta * task.reg_weight)
    return moved


def centralized_step(task: LearningTask, state: ModelState, dataset: Dataset) -> ModelState:
    _check_dim(state.theta, dataset)
    eta = task.step(state.round, dataset)
    grad = full_gradient(task, state.theta, dataset)
    return ModelState(_apply(task, state.theta, grad, eta), state.round + 1)


def blocks_from_lengths(block_lens) -> list[tuple[int, int]]:
    """Contiguous ``(start, stop)`` ranges in group order."""
    ends = np.cumsum(np.asarray(block_lens, dtype=np.int64))
    starts = np.concatenate([[0], ends[:-1]])
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def split_samples(n_samples: int, group_sizes: Sequence[int], seed: int = 0) -> list[list[np.ndarray]]:
    """For every group, a random partition of all sample indices into its workers."""
    rng = np.random.default_rng(seed)
    return [np.array_split(rng.permutation(n_samples), n) for n in group_sizes]


def _check_partition(partition, dim):
    covered = np.zeros(dim, dtype=np.int64)
    for start, stop in partition:
        if not 0 <= start <= stop <= dim:
            raise InvalidArgumentError(f"block ({start}, {stop}) out of range")
        covered[start:stop] += 1
    if np.any(covered != 1):
        raise InvalidArgumentError("blocks must cover every parameter exactly once")


def _check_split(split, n_samples):
    for k, subsets in enumerate(split):
        if not subsets:
            raise InvalidArgumentError(f"group {k} has no workers")
        idx = np.sort(np.concatenate([np.asarray(s, dtype=np.int64) for s in subsets]))
        if idx.shape[0] != n_samples or np.any(idx != np.arange(n_samples)):
            raise InvalidArgumentError(f"group {k} subsets must partition the dataset")


def distributed_round(task: LearningTask, state: ModelState, dataset: Dataset,
                      partition, data_split) -> ModelState:
    """One push / compute / pull round over ``partition[k]`` blocks and per-worker subsets."""
    theta = state.theta
    _check_dim(theta, dataset)
    if len(partition) != len(data_split):
        raise InvalidArgumentError("need one data split per group")
    _check_partition(partition, dataset.dimension)
    _check_split(data_split, dataset.n_samples)
    eta = task.step(state.round, dataset)
    grad = np.zeros_like(theta)
    for (start, stop), subsets in zip(partition, data_split):
        if stop == start:
            continue
        acc = np.zeros(stop - start)
        for idx in subsets:
            acc += block_gradient(task, theta, dataset.subset(idx), (start, stop),
                                  len(subsets), dataset.n_samples)
        grad[start:stop] = acc
    return ModelState(_apply(task, theta, grad, eta), state.round + 1)


def default_step_size(task: LearningTask, dataset: Dataset, iters: int = 100) -> float:
    """``1/L`` with ``L`` a power-iteration estimate of the smooth part's Lipschitz constant.

    The estimate is inflated by 5% since power iteration approaches from below.
    """
    X = dataset.features
    v = np.random.default_rng(0).standard_normal(dataset.dimension)
    top = 0.0
    for _ in range(iters):
        w = X.T @ (X @ v) / dataset.n_samples
        top = float(np.linalg.norm(w))
        if top == 0:
            break
        v = w / top
    curvature = 0.25 if task.loss == "logistic" else 1.0
    lip = curvature * top + (2.0 * task.reg_weight if task.reg == "l2" else 0.0)
    return 1.0 / (1.05 * lip) if lip > 0 else 1.0


def with_default_step(task: LearningTask, dataset: Dataset) -> LearningTask:
    """Copy of ``task`` with the default constant step filled in, if it had none."""
    if task.step_size is not None:
        return task
    return replace(task, step_size=default_step_size(task, dataset))


@dataclass
class Trajectory:
    thetas: list = field(default_factory=list)
    objectives: list = field(default_factory=list)


def run_centralized(task: LearningTask, dataset: Dataset, rounds: int, theta0=None) -> Trajectory:
    task = with_default_step(task, dataset)
    state = ModelState(np.zeros(dataset.dimension) if theta0 is None else theta0)
    traj = Trajectory([state.theta], [objective(task, state.theta, dataset)])
    for _ in range(rounds):
        state = centralized_step(task, state, dataset)
        traj.thetas.append(state.theta)
        traj.objectives.append(objective(task, state.theta, dataset))
    return traj
