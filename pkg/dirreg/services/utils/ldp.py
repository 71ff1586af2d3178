import numpy as np
from scipy.optimize import nnls

# relative size of the last residual entry below which the system is incompatible
_INCOMPATIBLE = 1e-12


def least_distance(G: np.ndarray, h: np.ndarray, tol: float = 1e-9) -> np.ndarray | None:
    """
    Minimum-norm solution of G @ w >= h (least distance programming).

    Solved through one non-negative least squares problem on the stacked
    matrix [G^T; h^T]; returns None when the inequalities are incompatible.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).reshape(-1)
    n = G.shape[1]
    if h.size == 0 or np.all(h <= 0.0):
        return np.zeros(n)

    E = np.vstack([G.T, h[np.newaxis, :]])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u, _ = nnls(E, f, maxiter=50 * (E.shape[0] + E.shape[1]))
    residual = E @ u - f
    if abs(residual[n]) <= _INCOMPATIBLE:
        return None

    w = -residual[:n] / residual[n]
    if np.any(G @ w < h - tol * (1.0 + np.abs(h))):
        return None
    return w


def project_onto_halfspaces(H: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Projection of w onto {u : H @ u >= 0}; Moreau split against the polar cone."""
    if H.shape[0] == 0:
        return np.array(w, dtype=float)
    lam, _ = nnls(-H.T, w, maxiter=50 * (H.shape[0] + H.shape[1]))
    return w + H.T @ lam


def project_onto_generators(G: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Projection of w onto the nonnegative hull of the rows of G."""
    if G.shape[0] == 0:
        return np.zeros_like(w, dtype=float)
    mu, _ = nnls(G.T, w, maxiter=50 * (G.shape[0] + G.shape[1]))
    return G.T @ mu
