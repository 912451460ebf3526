# Standard libraries
import numbers
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Union
# Local libraries
from .errors import InputDomainError, QuadratureConvergenceError
from .logger_utils import LoggerUtils
# Third-party libraries
import numpy as np


class ScanUtils:

    @staticmethod
    def generate_scan_points(start: numbers.Number, stop: numbers.Number, points: int) -> np.ndarray:
        """
        Generates an evenly spaced delay grid including both end points.

        Args:
            start: First delay value.
            stop: Last delay value, strictly greater than `start`.
            points: Number of points, at least 2.

        Returns:
            np.ndarray: The grid.

        Raises:
            TypeError: If an argument has the wrong type.
            InputDomainError: If points < 2, start >= stop, or a bound is not finite.
        """
        if not isinstance(start, numbers.Real) or not isinstance(stop, numbers.Real):
            raise TypeError("start and stop must be numeric.")
        if isinstance(points, bool) or not isinstance(points, numbers.Integral):
            raise TypeError("points must be an integer.")
        if not (np.isfinite(start) and np.isfinite(stop)):
            raise InputDomainError("start and stop must be finite.")
        if points < 2:
            raise InputDomainError(f"A scan needs at least 2 points, got {points}.")
        if start >= stop:
            raise InputDomainError(f"Scan start must be < stop, got start={start}, stop={stop}.")
        return np.linspace(float(start), float(stop), int(points))

    @staticmethod
    def validate_grid(grid: Union[List[float], np.ndarray]) -> np.ndarray:
        """
        Checks that a grid is finite, non-empty and strictly monotone.

        Returns:
            np.ndarray: The grid as a float array, in its original order.

        Raises:
            InputDomainError: If the grid is empty, non-finite or not strictly monotone.
        """
        values = np.asarray(grid, dtype=float).ravel()
        if values.size == 0:
            raise InputDomainError("Scan grid is empty.")
        if not np.all(np.isfinite(values)):
            raise InputDomainError("Scan grid contains non-finite values.")
        if values.size > 1:
            steps = np.diff(values)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise InputDomainError("Scan grid must be strictly monotone.")
        return values

    @staticmethod
    def map_points(func: Callable[[float], float], grid: np.ndarray, threads: int = 1,
                   logger: Optional[logging.Logger] = None) -> np.ndarray:
        """
        Evaluates `func` at every grid point, optionally on a thread pool.

        Results keep the grid order whatever the thread count.

        Raises:
            QuadratureConvergenceError: Re-raised naming the failing scan point.
        """
        logger = logger or LoggerUtils.get_logger()
        if threads < 1:
            raise InputDomainError(f"threads must be >= 1, got {threads}.")

        def evaluate(x: float) -> float:
            try:
                return func(float(x))
            except QuadratureConvergenceError as e:
                if e.scan_point is not None:
                    raise
                raise e.at_scan_point(float(x)) from e

        if threads == 1 or len(grid) < 2:
            values = [evaluate(x) for x in grid]
        else:
            logger.debug(f"[SCAN] Evaluating {len(grid)} points on {threads} threads")
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(evaluate, grid))
        return np.asarray(values, dtype=float)

    @staticmethod
    def apply_noise(values: np.ndarray, relative_sigma: float, seed: Optional[int] = None) -> np.ndarray:
        """
        Multiplies every value by (1 + relative_sigma * N(0, 1)) with a seeded generator.

        Raises:
            InputDomainError: If relative_sigma is negative.
        """
        if relative_sigma < 0:
            raise InputDomainError(f"Noise level must be >= 0, got {relative_sigma}.")
        values = np.asarray(values, dtype=float)
        if relative_sigma == 0:
            return values.copy()
        rng = np.random.default_rng(seed)
        return values * (1.0 + relative_sigma * rng.standard_normal(values.shape))


if __name__ == "__main__":
    # Example usage
    grid = ScanUtils.generate_scan_points(-5.0, 5.0, 11)
    print(grid, ScanUtils.map_points(lambda x: x * x, grid, threads=2))
