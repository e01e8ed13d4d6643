"""
Galerkin theta-scheme Euler-Maruyama for dX = (L - alpha) X dt + sum_i A_i(X) dB^i.

The dynamics use the square truncations P_N (L - alpha) P_N and P_N A_i P_N.
One step solves

    (I - theta dt (L_N - alpha)) x' = (I + (1 - theta) dt (L_N - alpha)) x + sum_i (A_{i,N} x) dW_i

with an LU factorization computed once per system. Paths are advanced in
fixed batches of BATCH_SIZE columns, so results do not depend on the number
of worker threads.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from src.simulation.models import MomentTable, PathState, SimConfig
from src.simulation.rng import BrownianIncrements
from src.spectral.basis import BasisIndexSet, enumerate_indices
from src.spectral.models import ModelSpec
from src.spectral.operators import assemble_A, assemble_L
from src.spectral.space import GradedVector, extend, norm, sobolev_weights
from src.utils.errors import BlowUpError, ConfigError, SolverError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

BATCH_SIZE = 32

# An observable maps (index_set, coefficient block of shape (size, m)) to m values.
Observable = Callable[[BasisIndexSet, np.ndarray], np.ndarray]


class GalerkinSystem:
    """Pre-assembled, pre-factored theta scheme on span_N for a fixed (spec, N, dt, theta)."""

    def __init__(self, spec: ModelSpec, N: int, dt: float, theta: float = 0.5):
        self.spec = spec
        self.dt = dt
        self.theta = theta
        self.index_set = enumerate_indices(spec.d, N)
        size = self.index_set.size

        identity = sparse.identity(size, format="csc")
        drift = assemble_L(spec, N).square_truncate() - spec.alpha * identity
        self.noise = [A_i.square_truncate().tocsr() for A_i in assemble_A(spec, N)]
        self.explicit = (identity + (1.0 - theta) * dt * drift).tocsr()

        self._lu = None
        if theta > 0.0:
            implicit = (identity - theta * dt * drift).tocsc()
            try:
                self._lu = splu(implicit)
            except RuntimeError as e:
                raise SolverError(
                    f"Implicit matrix I - theta*dt*(L_N - alpha) is singular (dt={dt}, theta={theta}): {e}"
                ) from e
        logger.info(f"Galerkin system ready: d={spec.d}, N={N}, size={size}, dt={dt}, theta={theta}")

    @classmethod
    def from_config(cls, spec: ModelSpec, cfg: SimConfig) -> "GalerkinSystem":
        return cls(spec, cfg.N, cfg.dt, cfg.theta)

    @property
    def N(self) -> int:
        return self.index_set.N

    def advance(self, X: np.ndarray, dW: np.ndarray) -> np.ndarray:
        """
        One step for a block of paths.

        Args:
            X: States as columns, shape (size, m)
            dW: Brownian increments, shape (d, m)

        Returns:
            New states, shape (size, m)
        """
        rhs = self.explicit @ X
        for i, A_i in enumerate(self.noise):
            rhs += (A_i @ X) * dW[i][None, :]
        if self._lu is None:
            return rhs
        return self._lu.solve(rhs)

    def step(self, state: PathState, dW: Sequence[float]) -> PathState:
        """
        Advance one path by dt.

        Raises:
            ConfigError: if the state is not on span_N
            BlowUpError: if the new state is not finite
        """
        if state.x.d != self.spec.d or state.x.N != self.N:
            raise ConfigError(f"State must lie in span_N with N={self.N}, got N={state.x.N}")
        dW = np.asarray(dW, dtype=float).reshape(self.spec.d, 1)
        x = self.advance(state.x.coeffs.reshape(-1, 1), dW)[:, 0]
        t = state.t + self.dt
        if not np.all(np.isfinite(x)):
            raise BlowUpError(state.path, t)
        return PathState(t=t, x=GradedVector(self.index_set, x), path=state.path)


def step(
    spec: ModelSpec,
    cfg: SimConfig,
    state: PathState,
    dW: Sequence[float],
    system: Optional[GalerkinSystem] = None,
) -> PathState:
    """One theta-scheme step; pass `system` to reuse its factorization."""
    if system is None:
        system = GalerkinSystem.from_config(spec, cfg)
    return system.step(state, dW)


def _column_norms(weights: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(weights[:, None] * X * X, axis=0))


class _BatchRunner:
    """Runs one fixed batch of paths over the full horizon."""

    def __init__(
        self,
        system: GalerkinSystem,
        cfg: SimConfig,
        x0: np.ndarray,
        weights: np.ndarray,
        observables: Mapping[str, Observable],
    ):
        self.system = system
        self.cfg = cfg
        self.x0 = x0
        self.weights = weights
        self.observables = observables
        self.save_steps = cfg.save_steps()

    def __call__(self, batch: range):
        cfg = self.cfg
        d = self.system.spec.d
        m = len(batch)
        n_save = self.save_steps.shape[0]
        streams = [BrownianIncrements(cfg.seed, j, d, cfg.dt) for j in batch]

        norms = np.empty((m, n_save))
        values = {name: np.empty((m, n_save)) for name in self.observables}
        states: List[PathState] = []
        X = np.repeat(self.x0[:, None], m, axis=1)

        def record(column: int, n: int):
            norms[:, column] = _column_norms(self.weights, X)
            for name, observable in self.observables.items():
                values[name][:, column] = observable(self.system.index_set, X)
            if cfg.dump_states:
                for offset, j in enumerate(batch):
                    states.append(PathState(
                        t=n * cfg.dt, x=GradedVector(self.system.index_set, X[:, offset]), path=j
                    ))

        column = 0
        if self.save_steps[0] == 0:
            record(column, 0)
            column += 1
        for n in range(1, cfg.n_steps + 1):
            dW = np.stack([stream.next() for stream in streams], axis=1)
            X = self.system.advance(X, dW)
            finite = np.all(np.isfinite(X), axis=0)
            if not np.all(finite):
                bad = int(np.argmin(finite))
                raise BlowUpError(batch[bad], n * cfg.dt)
            if column < n_save and self.save_steps[column] == n:
                record(column, n)
                column += 1
        return norms, values, states


def simulate_ensemble(
    spec: ModelSpec,
    cfg: SimConfig,
    x0: GradedVector,
    norm_index: Optional[float] = None,
    observables: Optional[Mapping[str, Observable]] = None,
) -> MomentTable:
    """
    Simulate cfg.paths independent paths from x0 and tabulate ||X_t||_s.

    Args:
        spec: Model coefficients
        cfg: Truncation, time step and ensemble parameters
        x0: Initial condition with x0.N <= cfg.N
        norm_index: Index s of the recorded norms (default p - 2)
        observables: Extra per-path quantities evaluated on the save grid

    Returns:
        MomentTable with rows in path order

    Raises:
        ConfigError: if x0 does not fit the Galerkin space
        SolverError: if the implicit matrix is singular
        BlowUpError: on the first non-finite path state
    """
    if x0.d != spec.d:
        raise ConfigError(f"Initial condition has d={x0.d}, model has d={spec.d}")
    if x0.N > cfg.N:
        raise ConfigError(f"Initial condition has grade {x0.N} above the truncation N={cfg.N}")
    s = spec.p - 2.0 if norm_index is None else float(norm_index)
    observables = dict(observables or {})

    system = GalerkinSystem.from_config(spec, cfg)
    x0 = extend(x0, cfg.N)
    runner = _BatchRunner(system, cfg, x0.coeffs, sobolev_weights(system.index_set, s), observables)

    batches = [range(b, min(b + BATCH_SIZE, cfg.paths)) for b in range(0, cfg.paths, BATCH_SIZE)]
    workers = max(1, min(get_settings().threads, len(batches)))
    logger.info(f"Simulating {cfg.paths} paths x {cfg.n_steps} steps in {len(batches)} batches ({workers} threads)")

    if workers == 1:
        results = [runner(batch) for batch in batches]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(runner, batches))

    values: Dict[str, np.ndarray] = {
        name: np.concatenate([r[1][name] for r in results], axis=0) for name in observables
    }
    states = [state for r in results for state in r[2]] if cfg.dump_states else None
    return MomentTable(
        times=cfg.save_grid(),
        norms=np.concatenate([r[0] for r in results], axis=0),
        norm_index=s,
        x0_norm=norm(x0, s),
        observables=values,
        states=states,
    )
