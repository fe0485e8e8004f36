"""Legendre quadrature rules and polynomial bases on the reference interval [-1, 1].

Two node families are used throughout: Gauss-Lobatto-Legendre (GLL) nodes,
which include both endpoints and carry the degree-p nodal (Lagrange) and
degree-(p-1) edge (histopolation) bases, and Gauss-Legendre nodes, which are
interior and serve both as collocation points and as quadrature abscissae.

Nodes are found by bracketed Newton iteration on the Legendre recurrence,
seeded with Chebyshev-point initial guesses. Lagrange evaluation uses the
second barycentric formula, which returns an exact Kronecker delta when the
evaluation point coincides with a node.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EvaluationError, RootFindError

_MAX_ORDER = 64
_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITER = 100


def legendre_eval(n: int, x):
    """Evaluate the Legendre polynomial P_n and its derivative at x.

    Uses the three-term recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    with the derivative carried alongside. Works elementwise on arrays.

    Parameters
    ----------
    n : int
        Polynomial degree, n >= 0.
    x : float or ndarray
        Evaluation point(s) in [-1, 1].

    Returns
    -------
    (value, derivative)
        P_n(x) and P_n'(x), scalars or arrays matching x.
    """
    if n < 0:
        raise ValueError(f"Legendre degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    d_prev = np.zeros_like(x)
    if n == 0:
        return p_prev[()], d_prev[()]
    p_cur = x.copy()
    d_cur = np.ones_like(x)
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
        d_next = ((2 * k + 1) * (p_cur + x * d_cur) - k * d_prev) / (k + 1)
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return p_cur[()], d_cur[()]


class QuadratureFamily(enum.Enum):
    GAUSS_LOBATTO_LEGENDRE = "gauss-lobatto-legendre"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [-1, 1]; exactness degree 2n-3 (GLL) or 2n-1 (Gauss)."""

    family: QuadratureFamily
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.nodes)


def _check_order(n: int, smallest: int, what: str):
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"{what} order must be an integer, got {type(n).__name__}")
    if n < smallest or n > _MAX_ORDER:
        raise ValueError(f"{what} order must lie in [{smallest}, {_MAX_ORDER}], got {n}")


def _newton_root(f, x0, lo, hi):
    # Newton safeguarded by a bracket [lo, hi] containing exactly one simple
    # root: fall back to bisection whenever the update would leave it.
    # f returns (residual, derivative).
    flo = f(lo)[0]
    x = min(max(x0, lo), hi)
    for _ in range(_NEWTON_MAX_ITER):
        r, dr = f(x)
        if abs(r) <= _NEWTON_TOL:
            return x
        if flo * r < 0:
            hi = x
        else:
            lo, flo = x, r
        x_new = x - r / dr if dr != 0.0 else 0.5 * (lo + hi)
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise RootFindError(f"node search did not converge within {_NEWTON_MAX_ITER} iterations")


def _symmetrize(nodes: np.ndarray) -> np.ndarray:
    # enforce exact +/- pairing (and an exact middle zero for odd counts)
    return 0.5 * (nodes - nodes[::-1])


@lru_cache(maxsize=None)
def gauss_rule(q: int) -> QuadratureRule:
    """Gauss-Legendre rule with q nodes, exact through degree 2q-1.

    Nodes are the roots of P_q, seeded with the Chebyshev-point estimates
    cos(pi (i + 3/4) / (q + 1/2)) and polished by Newton iteration; weights
    are 2 / ((1 - x^2) P_q'(x)^2).
    """
    _check_order(q, 1, "Gauss")
    nodes = np.empty(q)
    for j in range(1, q + 1):
        # Bruns inequality: the j-th root angle lies in ((j-1/2)pi, j pi)/(q+1/2)
        lo = np.cos(np.pi * j / (q + 0.5))
        hi = np.cos(np.pi * (j - 0.5) / (q + 0.5))
        seed = np.cos(np.pi * (j - 0.25) / (q + 0.5))
        nodes[j - 1] = _newton_root(lambda x: legendre_eval(q, x), seed, lo, hi)
    nodes = _symmetrize(np.sort(nodes))
    _, dP = legendre_eval(q, nodes)
    weights = 2.0 / ((1.0 - nodes**2) * dP**2)
    return QuadratureRule(QuadratureFamily.GAUSS_LEGENDRE, nodes, weights)


@lru_cache(maxsize=None)
def gll_rule(p: int) -> QuadratureRule:
    """Gauss-Lobatto-Legendre rule with p+1 nodes, exact through degree 2p-1.

    Interior nodes are the roots of P_p'; each lies between two consecutive
    Gauss nodes of order p, which gives a safe bracket for the Newton search.
    Weights are 2 / (p (p+1) P_p(x)^2), endpoints included.
    """
    _check_order(p, 1, "GLL")
    nodes = np.empty(p + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if p >= 2:
        brackets = gauss_rule(p).nodes

        def dleg(x):
            P, dP = legendre_eval(p, x)
            # (1 - x^2) P'' = 2 x P' - p (p+1) P
            ddP = (2 * x * dP - p * (p + 1) * P) / (1.0 - x * x)
            return dP, ddP

        for k in range(1, p):
            lo, hi = brackets[k - 1], brackets[k]
            seed = np.cos(np.pi * (p - k) / p)  # Chebyshev-Lobatto estimate
            nodes[k] = _newton_root(dleg, seed, lo, hi)
    nodes = _symmetrize(nodes)
    P, _ = legendre_eval(p, nodes)
    weights = 2.0 / (p * (p + 1) * P**2)
    return QuadratureRule(QuadratureFamily.GAUSS_LOBATTO_LEGENDRE, nodes, weights)


@dataclass(frozen=True)
class NodalBasis:
    """Lagrange basis on distinct nodes, stored with barycentric weights."""

    nodes: np.ndarray
    bary_weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.bary_weights.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    @classmethod
    def from_nodes(cls, nodes) -> "NodalBasis":
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) == 0:
            raise ValueError("nodes must be a nonempty 1-d array")
        diff = np.subtract.outer(nodes, nodes)
        np.fill_diagonal(diff, 1.0)
        if np.min(np.abs(diff)) == 0.0:
            raise ValueError("nodes must be distinct")
        w = 1.0 / np.prod(diff, axis=1)
        w = w / np.max(np.abs(w))  # common scaling cancels in the barycentric form
        return cls(nodes, w)


@dataclass(frozen=True)
class EdgeBasis:
    """Edge (histopolation) functions e_1..e_p attached to a degree-p nodal basis.

    e_i(x) = -sum_{k<i} l_k'(x); its integral over the j-th inter-node
    interval is the Kronecker delta, so edge coefficients carry integrals
    rather than point values.
    """

    nodal: NodalBasis

    @property
    def count(self) -> int:
        return self.nodal.degree


def nodal_eval_all(basis: NodalBasis, x: float) -> np.ndarray:
    """All Lagrange basis values l_i(x); exact Kronecker delta at the nodes."""
    d = x - basis.nodes
    hit = d == 0.0
    if np.any(hit):
        out = np.zeros(len(basis.nodes))
        out[hit] = 1.0
        return out
    phi = basis.bary_weights / d
    return phi / np.sum(phi)


def nodal_deriv_all(basis: NodalBasis, x: float) -> np.ndarray:
    """All Lagrange derivative values l_i'(x).

    Off-node points use the differentiated barycentric form
    l_i'(x) = l_i(x) (sum_j l_j(x)/(x-x_j) - 1/(x-x_i)); at a node the
    classical differentiation-matrix row is used so row sums vanish exactly.
    """
    nodes, w = basis.nodes, basis.bary_weights
    d = x - nodes
    hit = d == 0.0
    if np.any(hit):
        k = int(np.argmax(hit))
        out = np.zeros(len(nodes))
        for i in range(len(nodes)):
            if i != k:
                out[i] = (w[i] / w[k]) / (nodes[k] - nodes[i])
        out[k] = -np.sum(out)
        return out
    l = nodal_eval_all(basis, x)
    s = np.sum(l / d)
    return l * (s - 1.0 / d)


def edge_eval_all(basis: EdgeBasis, x: float) -> np.ndarray:
    """All edge function values e_1..e_p at x."""
    dl = nodal_deriv_all(basis.nodal, x)
    return -np.cumsum(dl)[:-1]


def integrate_quad(rule: QuadratureRule, f) -> float:
    """Apply the quadrature rule to a scalar callable on [-1, 1]."""
    values = np.array([f(x) for x in rule.nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = rule.nodes[~np.isfinite(values)][0]
        raise EvaluationError(f"integrand is non-finite at node {bad!r}")
    return float(np.dot(rule.weights, values))
