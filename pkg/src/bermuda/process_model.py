# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Base interface for simulatable Markov models.

Defines the exercise time grid, the model parameter record, the block of
per-path states that models step forward, and the abstract interface every
process model implements. The only thing the pricing engine needs from a
model is the ability to simulate one step of it.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

MODEL_KINDS: tuple[str, ...] = ("multi_gbm", "asian_gbm", "window_gbm", "svsi")
NUMERAIRES: tuple[str, ...] = ("bank", "stock")


class ModelError(ValueError):
    """Raised for invalid model parameters or misuse of a state block."""


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """The finite set of candidate stopping times, with exercise permissions."""

    times: FloatArray
    exercise_mask: BoolArray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        mask = np.asarray(self.exercise_mask, dtype=bool)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "exercise_mask", mask)

        if times.ndim != 1 or times.size < 2:
            raise ModelError("time grid needs at least the two times 0 and T")
        if mask.shape != times.shape:
            raise ModelError("exercise mask must have one entry per grid time")
        if times[0] != 0.0:
            raise ModelError(f"time grid must start at 0, got {times[0]}")
        if np.any(np.diff(times) <= 0.0):
            raise ModelError("time grid must be strictly increasing")
        if not mask[-1]:
            raise ModelError("exercise must be permitted at expiry")

    @classmethod
    def uniform(cls, expiry: float, n_times: int, lockout: float = 0.0) -> TimeGrid:
        """
        Equally spaced grid from 0 to expiry with n_times points.

        Args:
            expiry: Final time T (years).
            n_times: Number of grid times N_T, including 0 and T.
            lockout: Exercise is forbidden at grid times strictly before this.
        """
        if n_times < 2:
            raise ModelError(f"n_times must be at least 2, got {n_times}")
        if expiry <= 0.0:
            raise ModelError(f"expiry must be positive, got {expiry}")
        times = np.linspace(0.0, expiry, n_times)
        # Grid points within rounding of t* count as unlocked
        mask = times >= lockout - 1e-12 * expiry
        return cls(times=times, exercise_mask=mask)

    @property
    def n_times(self) -> int:
        """Number of grid times N_T."""
        return int(self.times.size)

    @property
    def expiry(self) -> float:
        """Final time T."""
        return float(self.times[-1])

    def dt(self, t_index: int) -> float:
        """Length of the interval starting at grid index t_index."""
        return float(self.times[t_index + 1] - self.times[t_index])


@dataclass(frozen=True)
class SvsiParams:
    """Parameters of the stochastic-volatility / stochastic-interest model."""

    rho_s: float = 0.3
    rho_xi: float = 0.3
    rho_r: float = 0.3
    sigma_bar: float = 0.6
    r_bar: float = 0.06
    beta_xi: float = 4.5
    sigma_xi: float = 0.3
    beta_r: float = 0.02
    sigma_r: float = 0.12
    sigma0: float = 0.6
    r0: float = 0.06

    def validate(self) -> None:
        """Check correlations and positivity constraints."""
        for name in ("rho_s", "rho_xi", "rho_r"):
            if abs(getattr(self, name)) >= 1.0:
                raise ModelError(f"{name} must have magnitude below 1")
        for name in ("sigma_bar", "r_bar", "beta_xi", "beta_r", "sigma0", "r0"):
            if getattr(self, name) <= 0.0:
                raise ModelError(f"{name} must be positive")
        # A zero diffusion coefficient freezes that factor
        for name in ("sigma_xi", "sigma_r"):
            if getattr(self, name) < 0.0:
                raise ModelError(f"{name} must be non-negative")


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    A simulatable Markov model for the underlying assets.

    The volatility matrix sigma generates the log-price covariance
    Sigma = sigma sigma^T. Use `ModelSpec.build` to construct one from a
    scalar (or per-asset) volatility and a common pairwise correlation.
    """

    kind: str
    dim: int
    spot: FloatArray
    rate: float
    dividend: float = 0.0
    sigma: FloatArray = field(default_factory=lambda: np.zeros((1, 1)))
    average_window: float = 0.25
    average0: float | None = None
    window: int | None = None
    svsi: SvsiParams | None = None
    numeraire: str = "bank"

    def __post_init__(self) -> None:
        object.__setattr__(self, "spot", np.asarray(self.spot, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=np.float64))
        self.validate()

    @classmethod
    def build(
        cls,
        kind: str,
        dim: int,
        spot: float | list[float],
        rate: float,
        vol: float | list[float] = 0.2,
        correlation: float = 0.0,
        **kwargs: object,
    ) -> ModelSpec:
        """Build a spec from per-asset volatilities and a common correlation."""
        vols = np.broadcast_to(np.asarray(vol, dtype=np.float64), (dim,)).copy()
        spots = np.broadcast_to(np.asarray(spot, dtype=np.float64), (dim,)).copy()
        corr = np.full((dim, dim), float(correlation))
        np.fill_diagonal(corr, 1.0)
        if dim > 1 and abs(correlation) >= 1.0:
            raise ModelError("correlation magnitude must be below 1")
        try:
            chol = np.linalg.cholesky(corr)
        except np.linalg.LinAlgError as e:
            raise ModelError(f"correlation {correlation} is not valid for dim {dim}") from e
        sigma = vols[:, None] * chol
        return cls(kind=kind, dim=dim, spot=spots, rate=rate, sigma=sigma, **kwargs)  # type: ignore[arg-type]

    def validate(self) -> None:
        """Check the model invariants, raising ModelError on failure."""
        if self.kind not in MODEL_KINDS:
            raise ModelError(f"Unknown model kind: {self.kind}. Available: {', '.join(MODEL_KINDS)}")
        if self.dim < 1:
            raise ModelError(f"dim must be positive, got {self.dim}")
        if self.spot.shape != (self.dim,):
            raise ModelError(f"spot must have {self.dim} entries")
        if np.any(self.spot <= 0.0) or not np.all(np.isfinite(self.spot)):
            raise ModelError("initial prices must be positive and finite")
        if self.numeraire not in NUMERAIRES:
            raise ModelError(f"numeraire must be one of {NUMERAIRES}, got {self.numeraire}")

        if self.kind == "svsi":
            if self.svsi is None:
                raise ModelError("svsi model needs svsi parameters")
            self.svsi.validate()
            if self.numeraire != "bank":
                raise ModelError("svsi model supports the bank numeraire only")
            return

        if self.sigma.shape != (self.dim, self.dim):
            raise ModelError(f"sigma must be {self.dim}x{self.dim}")
        cov = self.covariance
        if not np.allclose(cov, cov.T):
            raise ModelError("covariance must be symmetric")
        # Zero volatility is allowed (deterministic model); negative curvature is not
        if np.min(np.linalg.eigvalsh(cov)) < -1e-12:
            raise ModelError("covariance must be positive semi-definite")
        if self.kind in ("asian_gbm", "window_gbm") and self.dim != 1:
            raise ModelError(f"{self.kind} is a single-asset model")
        if self.kind == "asian_gbm":
            if self.average_window <= 0.0:
                raise ModelError("asian initial window must be positive")
            if self.average0 is not None and self.average0 <= 0.0:
                raise ModelError("initial average must be positive")
        if self.kind == "window_gbm" and (self.window is None or self.window < 1):
            raise ModelError("window model needs a positive number of lags")

    @property
    def covariance(self) -> FloatArray:
        """Sigma = sigma sigma^T."""
        return self.sigma @ self.sigma.T

    @property
    def factor(self) -> FloatArray:
        """A lower-triangular L with L L^T = Sigma (any valid factorization works)."""
        cov = self.covariance
        try:
            return np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            # Semi-definite (e.g. zero vol): symmetric square root instead
            w, v = np.linalg.eigh(cov)
            return v * np.sqrt(np.clip(w, 0.0, None))

    @property
    def log_drift(self) -> FloatArray:
        """Drift of log S under the pricing measure."""
        var = np.diag(self.covariance)
        mu = self.rate - 0.5 * var - self.dividend
        if self.numeraire == "stock":
            # Girsanov shift by sigma under the stock measure
            mu = mu + var
        return mu

    def with_numeraire(self, numeraire: str) -> ModelSpec:
        """Copy of this spec simulated under the given numeraire's measure."""
        return replace(self, numeraire=numeraire)


@dataclass
class StateBlock:
    """
    Per-path states at one grid time.

    core holds discounted log prices x = log S - int r ds (one row per path),
    log_discount holds int_0^t r ds, and aux holds model-specific auxiliaries.
    """

    core: FloatArray
    log_discount: FloatArray
    t_index: int
    aux: dict[str, FloatArray] = field(default_factory=dict)

    @property
    def n(self) -> int:
        """Number of paths in the block."""
        return int(self.core.shape[0])

    def log_prices(self) -> FloatArray:
        """Undiscounted log prices log S."""
        return self.core + self.log_discount[:, None]

    def prices(self) -> FloatArray:
        """Undiscounted prices S."""
        return np.exp(self.log_prices())

    def repeat(self, k: int) -> StateBlock:
        """Each row repeated k times consecutively (rows j*k .. j*k+k-1 copy row j)."""
        return StateBlock(
            core=np.repeat(self.core, k, axis=0),
            log_discount=np.repeat(self.log_discount, k),
            t_index=self.t_index,
            aux={name: np.repeat(arr, k, axis=0) for name, arr in self.aux.items()},
        )

    def select(self, rows: npt.NDArray[np.intp] | BoolArray) -> StateBlock:
        """The paths picked by an index array or boolean mask."""
        return StateBlock(
            core=self.core[rows],
            log_discount=self.log_discount[rows],
            t_index=self.t_index,
            aux={name: arr[rows] for name, arr in self.aux.items()},
        )


class ProcessModel(ABC):
    """Base interface for process models: initialise paths, step them one grid time."""

    kind: str = ""

    @property
    def dim(self) -> int:
        """Dimension of the core state."""
        return 1

    @abstractmethod
    def init_paths(self, grid: TimeGrid, n: int) -> StateBlock:
        """
        Create n paths at grid index 0.

        Args:
            grid: The exercise time grid.
            n: Number of paths (at least 1).

        Returns:
            StateBlock at t_index 0.
        """

    @abstractmethod
    def step(self, grid: TimeGrid, block: StateBlock, rng: np.random.Generator) -> StateBlock:
        """
        Advance every path of the block by one grid time.

        Args:
            grid: The exercise time grid.
            block: States at grid index i < N_T - 1.
            rng: Generator supplying this step's randomness.

        Returns:
            New StateBlock at grid index i + 1; the input is not modified.
        """

    def substep(
        self, grid: TimeGrid, block: StateBlock, n_sub: int, rng: np.random.Generator
    ) -> StateBlock:
        """
        Draw n_sub independent one-step successors of every path in the block.

        Successors of row j occupy rows j*n_sub .. j*n_sub + n_sub - 1. The
        caller must pass a generator that is independent of the one used to
        advance the parent paths.
        """
        if n_sub < 1:
            raise ModelError(f"n_sub must be at least 1, got {n_sub}")
        return self.step(grid, block.repeat(n_sub), rng)

    @property
    def supports_exact(self) -> bool:
        """Whether exact_successors is available."""
        return False

    def exact_successors(self, grid: TimeGrid, block: StateBlock) -> tuple[StateBlock, FloatArray]:
        """
        Enumerate the full one-step successor law of every path.

        Returns:
            (successors, weights) where successors holds n*m rows grouped per
            path and weights is n x m with rows summing to 1.
        """
        raise NotImplementedError(f"{type(self).__name__} has no exact successor law")

    def _check_steppable(self, grid: TimeGrid, block: StateBlock) -> None:
        if block.t_index >= grid.n_times - 1:
            raise ModelError(
                f"cannot step past the final grid time (t_index={block.t_index}, "
                f"N_T={grid.n_times})"
            )
        if not np.all(np.isfinite(block.core)):
            raise ModelError("state block has non-finite entries")


def correlation_complement(rho: float) -> float:
    """rho' = sqrt(1 - rho^2)."""
    return math.sqrt(max(0.0, 1.0 - rho * rho))
