"""
Per-path random streams.

Stream j of seed s is a Philox generator keyed by SeedSequence(s, spawn_key=(j,)),
so it depends on (s, j) alone and never on how paths are scheduled.
"""
import numpy as np

NOISE_CHUNK_STEPS = 512


def split(seed: int, j: int) -> np.random.Generator:
    """Independent, reproducible generator for stream j of `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(j),))))


class BrownianIncrements:
    """
    Gaussian increments N(0, dt) for one path, drawn in fixed chunks of
    NOISE_CHUNK_STEPS x d standard normals.
    """

    def __init__(self, seed: int, path: int, d: int, dt: float):
        self._generator = split(seed, path)
        self._d = d
        self._scale = float(np.sqrt(dt))
        self._chunk = np.empty((0, d))
        self._cursor = 0

    def next(self) -> np.ndarray:
        if self._cursor == self._chunk.shape[0]:
            self._chunk = self._generator.standard_normal((NOISE_CHUNK_STEPS, self._d))
            self._cursor = 0
        dW = self._scale * self._chunk[self._cursor]
        self._cursor += 1
        return dW

    def take(self, steps: int) -> np.ndarray:
        """The next `steps` increments as a (steps, d) array."""
        return np.array([self.next() for _ in range(steps)]).reshape(steps, self._d)
