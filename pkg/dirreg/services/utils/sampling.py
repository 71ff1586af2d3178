import itertools
import math
from typing import Sequence

import numpy as np
from scipy.stats import norm, qmc

from dirreg.config import MAX_GRID_POINTS


def sphere_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors in R^dim."""
    if dim == 1:
        return np.array([[-1.0], [1.0]])

    if dim == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])

    if dim == 3:
        # fibonacci lattice
        offset = 2.0 / count
        increment = math.pi * (3.0 - math.sqrt(5.0))
        points = []
        for i in range(count):
            y = (i * offset) - 1.0 + offset / 2.0
            radius = math.sqrt(1.0 - y * y)
            phi = ((i + 1.0) % count) * increment
            points.append([math.cos(phi) * radius, y, math.sin(phi) * radius])
        return np.array(points)

    # halton points pushed through the normal quantile; the first point is the origin
    sample = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    gaussian = norm.ppf(np.clip(sample, 1e-12, 1.0 - 1e-12))
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)


def simplex_weights(k: int, resolution: int) -> np.ndarray:
    """All weight vectors in the k-simplex with entries in multiples of 1/resolution."""
    weights = [
        np.array(parts, dtype=float) / resolution
        for parts in _compositions(resolution, k)
    ]
    return np.array(weights).reshape(-1, k)


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first, *rest))
    return out


def simplex_resolution(k: int, target: int) -> int:
    """Largest grid resolution whose simplex grid stays near `target` points."""
    resolution = 1
    while math.comb(resolution + k, k - 1) <= target and resolution < 10_000:
        resolution += 1
    return resolution


def cap_directions(generators: np.ndarray, count: int) -> np.ndarray:
    """Normalized nonnegative combinations of cone generators on a simplex grid."""
    k = generators.shape[0]
    if k == 1:
        g = generators[0]
        return (g / np.linalg.norm(g))[np.newaxis, :]

    weights = simplex_weights(k, simplex_resolution(k, count))
    combos = weights @ generators
    norms = np.linalg.norm(combos, axis=1)
    combos = combos[norms > 1e-9] / norms[norms > 1e-9, np.newaxis]
    return unique_rows(combos)


def unique_rows(points: np.ndarray, decimals: int = 12) -> np.ndarray:
    """Rows deduplicated after rounding, in lexicographic order."""
    if points.shape[0] == 0:
        return points
    # np.unique sorts rows lexicographically; +0.0 folds negative zeros
    _, index = np.unique(np.round(points, decimals) + 0.0, axis=0, return_index=True)
    return points[index]


def box_grid(
    center: np.ndarray,
    radii: np.ndarray | float,
    density: int,
    max_points: int = MAX_GRID_POINTS,
    seed: int = 0,
    blocks: Sequence[int] | None = None,
) -> np.ndarray:
    """
    Grid points in the product of balls around `center`.

    A tensor grid with `density` points per axis is used while it stays
    under `max_points`; beyond that a scrambled Halton set seeded by `seed`
    takes its place. `blocks` splits the coordinates into consecutive groups,
    each of which is restricted to its own ball. The center is always included.
    """
    center = np.asarray(center, dtype=float)
    dim = center.shape[0]
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (dim,))
    blocks = list(blocks) if blocks is not None else [dim]

    if density ** dim <= max_points:
        axes = [np.linspace(c - r, c + r, density) for c, r in zip(center, radii)]
        points = np.array(list(itertools.product(*axes))).reshape(-1, dim)
    else:
        unit = qmc.Halton(d=dim, scramble=True, seed=seed).random(max_points)
        points = center + (2.0 * unit - 1.0) * radii

    scaled = (points - center) / np.where(radii > 0, radii, 1.0)
    keep = np.ones(points.shape[0], dtype=bool)
    start = 0
    for size in blocks:
        keep &= np.linalg.norm(scaled[:, start:start + size], axis=1) <= 1.0 + 1e-12
        start += size

    return unique_rows(np.vstack([center[np.newaxis, :], points[keep]]))


def geometric_values(start: float, ratio: float, count: int) -> list[float]:
    return [start * ratio ** k for k in range(count)]
