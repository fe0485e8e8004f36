"""Discrete calculus on a single spectral element in time.

A time slab [t_start, t_end] is pulled back to the reference interval
[-1, 1]. The primal grid is the p+1 Gauss-Lobatto nodes, the dual grid the p
Gauss nodes, which interleave the primal ones. Degrees of freedom live in
cochains: point values on a grid (0-cochains) or integrals over the primal
sub-intervals (1-cochains). The coboundary takes successive differences via
the incidence matrix; reduction samples or integrates a function into a
cochain; reconstruction interpolates a cochain back to a function.

Two pairings move a primal 1-cochain to the dual grid. The canonical pairing
resamples the reconstructed density at the dual nodes and divides by the
metric root sqrt(g) = (t_end - t_start)/2. The Galerkin pairing integrates
against the dual basis, whose mass matrix is exactly diagonal because the
dual Lagrange basis sits on Gauss points: entries sqrt(g) * w_j.

Grids with t_end < t_start are permitted and represent a reversed time map
(sqrt(g) < 0); integrators use them for backward steps.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .basis import (
    EdgeBasis,
    NodalBasis,
    QuadratureRule,
    edge_eval_all,
    gauss_rule,
    gll_rule,
    nodal_eval_all,
)
from .errors import EvaluationError

# quadrature points per sub-interval when reducing a density to a 1-cochain
_REDUCE1_EXTRA = 4


class CochainKind(enum.Enum):
    PRIMAL0 = "primal0"
    PRIMAL1 = "primal1"
    DUAL0 = "dual0"


@dataclass(frozen=True)
class Cochain:
    """Degrees of freedom of a discrete form: kind plus a value vector."""

    kind: CochainKind
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) == 0:
            raise ValueError("cochain values must be a nonempty 1-d array")
        if self.kind is CochainKind.PRIMAL0 and len(v) < 2:
            raise ValueError("a primal 0-cochain needs at least two values")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    @property
    def order(self) -> int:
        """Polynomial order p of the element the cochain belongs to."""
        if self.kind is CochainKind.PRIMAL0:
            return len(self.values) - 1
        return len(self.values)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Signed node-to-interval incidence of the primal grid, shape (p+1, p)."""

    p: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


def incidence_matrix(p: int) -> IncidenceMatrix:
    """Incidence matrix with column j carrying -1 at node j-1 and +1 at node j."""
    if p < 1:
        raise ValueError(f"order must be at least 1, got {p}")
    E = np.zeros((p + 1, p))
    for j in range(p):
        E[j, j] = -1.0
        E[j + 1, j] = 1.0
    return IncidenceMatrix(p, E)


def coboundary(c: Cochain, E: IncidenceMatrix) -> Cochain:
    """Exterior derivative of a primal 0-cochain: successive differences."""
    if c.kind is not CochainKind.PRIMAL0:
        raise TypeError(f"coboundary expects a primal 0-cochain, got {c.kind}")
    if c.order != E.p:
        raise ValueError(f"cochain order {c.order} does not match incidence order {E.p}")
    return Cochain(CochainKind.PRIMAL1, E.matrix.T @ c.values)


@dataclass(frozen=True)
class ElementGrid:
    """Primal/dual grids and bases of one time element.

    t_end < t_start encodes a reversed time map; t_end == t_start is invalid.
    """

    p: int
    t_start: float
    t_end: float
    primal: QuadratureRule
    dual: QuadratureRule
    primal_basis: NodalBasis
    edge_basis: EdgeBasis
    dual_basis: NodalBasis

    @classmethod
    def build(cls, p: int, t_start: float, t_end: float) -> "ElementGrid":
        if t_end == t_start:
            raise ValueError("element must have nonzero extent")
        primal = gll_rule(p)
        dual = gauss_rule(p)
        primal_basis = NodalBasis.from_nodes(primal.nodes)
        return cls(
            p=p,
            t_start=float(t_start),
            t_end=float(t_end),
            primal=primal,
            dual=dual,
            primal_basis=primal_basis,
            edge_basis=EdgeBasis(primal_basis),
            dual_basis=NodalBasis.from_nodes(dual.nodes),
        )

    @property
    def sqrt_g(self) -> float:
        """Jacobian of the reference-to-time map; negative for reversed elements."""
        return 0.5 * (self.t_end - self.t_start)

    def to_time(self, tau):
        return self.t_start + (np.asarray(tau) + 1.0) * self.sqrt_g

    def to_ref(self, t):
        return (np.asarray(t) - self.t_start) / self.sqrt_g - 1.0


def reduce0(f, grid: ElementGrid, target: CochainKind) -> Cochain:
    """Sample a function of the reference coordinate into a 0-cochain."""
    if target is CochainKind.PRIMAL0:
        nodes = grid.primal.nodes
    elif target is CochainKind.DUAL0:
        nodes = grid.dual.nodes
    else:
        raise TypeError(f"reduce0 target must be a 0-cochain kind, got {target}")
    values = np.array([f(x) for x in nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)][0]
        raise EvaluationError(f"sample is non-finite at node {bad!r}")
    return Cochain(target, values)


def reduce1(density, grid: ElementGrid) -> Cochain:
    """Integrate a reference-coordinate density over each primal sub-interval.

    Each interval uses a mapped Gauss rule with p + 4 points, exact well
    beyond the degrees that appear in the commuting-diagram identities.
    """
    rule = gauss_rule(grid.p + _REDUCE1_EXTRA)
    xi = grid.primal.nodes
    values = np.empty(grid.p)
    for j in range(grid.p):
        a, b = xi[j], xi[j + 1]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        samples = np.array([density(mid + half * s) for s in rule.nodes], dtype=float)
        if not np.all(np.isfinite(samples)):
            raise EvaluationError(f"density is non-finite inside interval ({a!r}, {b!r})")
        values[j] = half * np.dot(rule.weights, samples)
    return Cochain(CochainKind.PRIMAL1, values)


def reconstruct0(c: Cochain, grid: ElementGrid, x: float) -> float:
    """Interpolate a 0-cochain at reference coordinate x."""
    if c.kind is CochainKind.PRIMAL0:
        basis = grid.primal_basis
    elif c.kind is CochainKind.DUAL0:
        basis = grid.dual_basis
    else:
        raise TypeError(f"reconstruct0 expects a 0-cochain, got {c.kind}")
    if len(c.values) != len(basis.nodes):
        raise ValueError(f"cochain order {c.order} does not match grid order {grid.p}")
    return float(np.dot(c.values, nodal_eval_all(basis, x)))


def reconstruct1(c: Cochain, grid: ElementGrid, x: float) -> float:
    """Evaluate the edge expansion of a primal 1-cochain at x (dtau coefficient)."""
    if c.kind is not CochainKind.PRIMAL1:
        raise TypeError(f"reconstruct1 expects a primal 1-cochain, got {c.kind}")
    if c.order != grid.p:
        raise ValueError(f"cochain order {c.order} does not match grid order {grid.p}")
    return float(np.dot(c.values, edge_eval_all(grid.edge_basis, x)))


def canonical_hodge_1to0(c: Cochain, grid: ElementGrid) -> Cochain:
    """Canonical pairing: resample the 1-cochain density at the dual nodes.

    The reconstructed dtau coefficient is divided by sqrt(g) so the result
    carries time-rate units on the dual grid.
    """
    values = np.array([reconstruct1(c, grid, x) for x in grid.dual.nodes])
    return Cochain(CochainKind.DUAL0, values / grid.sqrt_g)


def galerkin_mass_dual(grid: ElementGrid) -> np.ndarray:
    """Diagonal of the dual-basis mass matrix: sqrt(g) * w_j."""
    return grid.sqrt_g * grid.dual.weights


def dual_mass_matrix(grid: ElementGrid, q: int | None = None) -> np.ndarray:
    """Dual-basis mass matrix assembled by explicit quadrature.

    Kept separate from galerkin_mass_dual on purpose: this is the slow route
    used to check that the off-diagonal entries really vanish.
    """
    if q is None:
        q = 2 * grid.p
    rule = gauss_rule(q)
    L = np.array([nodal_eval_all(grid.dual_basis, x) for x in rule.nodes])
    return grid.sqrt_g * (L.T * rule.weights) @ L
