"""Solver-agnostic conic feasibility/optimization layer.

Problems are stated over a real decision vector with linear, second-order-cone
and semidefinite constraints; complex model data must be realified by the
caller (convention: a complex vector z maps to [Re z; Im z], a complex PSD
matrix to the 2x2 real block embedding [[Re, -Im], [Im, Re]]).

The backend is the Clarabel interior-point solver. Every feasible answer is
re-verified by an independent numpy constraint evaluator before it is
returned, so a backend bug cannot silently leak an infeasible point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

from .errors import IrsMecError

DEFAULT_FEAS_TOL = 1e-7

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LinearEq:
    """a @ x == b (row-wise)."""
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class LinearIneq:
    """a @ x <= b (row-wise)."""
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class SecondOrderCone:
    """||f @ x + g||_2 <= c @ x + d."""
    f: np.ndarray
    g: np.ndarray
    c: np.ndarray
    d: float


def tri_len(side):
    return side * (side + 1) // 2


def tri_index(i, j):
    """Index of entry (i, j), i <= j, in column-major upper-triangle order."""
    if i > j:
        i, j = j, i
    return j * (j + 1) // 2 + i


@dataclass(frozen=True)
class PSDConstraint:
    """const + mat(coeff @ x) is positive semidefinite.

    ``coeff`` has one row per upper-triangle entry of the symmetric matrix in
    column-major order (see tri_index); the lower triangle is implied.
    """
    side: int
    const: np.ndarray          # (side, side) symmetric
    coeff: sp.spmatrix         # (tri_len(side), n)

    def matrix(self, x):
        """Dense symmetric matrix at the point x."""
        vals = np.asarray(self.coeff @ x).ravel()
        m = np.zeros((self.side, self.side))
        for j in range(self.side):
            for i in range(j + 1):
                m[i, j] = vals[tri_index(i, j)]
        m = m + m.T - np.diag(np.diag(m))
        return self.const + m


@dataclass
class ConicProblem:
    """A small conic program: minimize objective @ x subject to constraints."""
    num_vars: int
    objective: np.ndarray = None
    constraints: list = field(default_factory=list)

    def add(self, constraint):
        self.constraints.append(constraint)
        return self


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    FAILURE = "numerical-failure"


@dataclass(frozen=True)
class ConicOutcome:
    status: Status
    x: np.ndarray = None
    max_violation: float = math.inf
    objective_value: float = math.nan

    @property
    def feasible(self):
        return self.status is Status.FEASIBLE


def _tri_scale(side):
    """Clarabel scaled-triangle weights: sqrt(2) off the diagonal."""
    scale = np.full(tri_len(side), _SQRT2)
    for j in range(side):
        scale[tri_index(j, j)] = 1.0
    return scale


def _svec_const(mat):
    side = mat.shape[0]
    out = np.empty(tri_len(side))
    for j in range(side):
        for i in range(j + 1):
            out[tri_index(i, j)] = mat[i, j]
    return out


def _assemble(problem):
    n = problem.num_vars
    blocks_a, blocks_b, cones = [], [], []

    eqs = [c for c in problem.constraints if isinstance(c, LinearEq)]
    ineqs = [c for c in problem.constraints if isinstance(c, LinearIneq)]
    socs = [c for c in problem.constraints if isinstance(c, SecondOrderCone)]
    psds = [c for c in problem.constraints if isinstance(c, PSDConstraint)]

    for con in eqs:
        a = np.atleast_2d(con.a)
        blocks_a.append(sp.csc_matrix(a))
        blocks_b.append(np.atleast_1d(con.b).astype(float))
        cones.append(clarabel.ZeroConeT(a.shape[0]))
    for con in ineqs:
        a = np.atleast_2d(con.a)
        blocks_a.append(sp.csc_matrix(a))
        blocks_b.append(np.atleast_1d(con.b).astype(float))
        cones.append(clarabel.NonnegativeConeT(a.shape[0]))
    for con in socs:
        f = np.atleast_2d(con.f)
        rows = np.vstack([-np.atleast_2d(con.c), -f])
        blocks_a.append(sp.csc_matrix(rows))
        blocks_b.append(np.concatenate(([con.d], np.atleast_1d(con.g).astype(float))))
        cones.append(clarabel.SecondOrderConeT(f.shape[0] + 1))
    for con in psds:
        scale = _tri_scale(con.side)
        coeff = sp.diags(scale) @ sp.csc_matrix(con.coeff)
        blocks_a.append(-coeff)
        blocks_b.append(scale * _svec_const(con.const))
        cones.append(clarabel.PSDTriangleConeT(con.side))

    if blocks_a:
        a_mat = sp.vstack(blocks_a, format="csc")
        b_vec = np.concatenate(blocks_b)
    else:
        a_mat = sp.csc_matrix((0, n))
        b_vec = np.zeros(0)
    q = np.zeros(n) if problem.objective is None else np.asarray(problem.objective, dtype=float)
    return a_mat, b_vec, q, cones


def max_violation(problem, x):
    """Worst constraint violation at x, computed independently of the backend."""
    worst = 0.0
    for con in problem.constraints:
        if isinstance(con, LinearEq):
            worst = max(worst, float(np.max(np.abs(np.atleast_2d(con.a) @ x - con.b), initial=0.0)))
        elif isinstance(con, LinearIneq):
            worst = max(worst, float(np.max(np.atleast_2d(con.a) @ x - con.b, initial=0.0)))
        elif isinstance(con, SecondOrderCone):
            lhs = float(np.linalg.norm(np.atleast_2d(con.f) @ x + con.g))
            rhs = float(np.dot(con.c, x) + con.d)
            worst = max(worst, lhs - rhs)
        elif isinstance(con, PSDConstraint):
            eigs = np.linalg.eigvalsh(con.matrix(x))
            worst = max(worst, float(-eigs[0]))
        else:
            raise IrsMecError(f"unknown constraint type {type(con)!r}")
    return worst


_OK = {"Solved", "AlmostSolved"}
_INFEASIBLE = {"PrimalInfeasible", "AlmostPrimalInfeasible"}


def solve(problem, tol=DEFAULT_FEAS_TOL, max_iter=None):
    """Solve the conic problem; see ConicOutcome for status semantics.

    Numerical failure is reported distinctly from infeasibility so callers
    can bracket bisections conservatively. ``max_iter`` caps interior-point
    iterations for callers that prefer a fast conservative answer.
    """
    a_mat, b_vec, q, cones = _assemble(problem)
    p_mat = sp.csc_matrix((problem.num_vars, problem.num_vars))
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    if max_iter is not None:
        settings.max_iter = max_iter
    solver = clarabel.DefaultSolver(p_mat, q, a_mat, b_vec, cones, settings)
    sol = solver.solve()
    name = str(sol.status)

    if name in _INFEASIBLE:
        return ConicOutcome(Status.INFEASIBLE)
    if name not in _OK:
        return ConicOutcome(Status.FAILURE)

    x = np.asarray(sol.x, dtype=float)
    violation = max_violation(problem, x)
    if violation > tol:
        return ConicOutcome(Status.FAILURE, x, violation, float(sol.obj_val))
    return ConicOutcome(Status.FEASIBLE, x, violation, float(sol.obj_val))


def dump_problem(problem, path):
    """Debug dump: objective then constraints as sparse triplets."""
    with open(path, "w") as fh:
        fh.write(f"vars {problem.num_vars}\n")
        if problem.objective is not None:
            for i, v in enumerate(problem.objective):
                if v != 0:
                    fh.write(f"obj {i} {v!r}\n")
        for ci, con in enumerate(problem.constraints):
            kind = type(con).__name__
            fh.write(f"constraint {ci} {kind}\n")
            mats = {"LinearEq": ("a",), "LinearIneq": ("a",),
                    "SecondOrderCone": ("f", "c"), "PSDConstraint": ("coeff",)}
            for attr in mats.get(kind, ()):
                mat = sp.coo_matrix(np.atleast_2d(getattr(con, attr)))
                for r, c, v in zip(mat.row, mat.col, mat.data):
                    fh.write(f"  {attr} {r} {c} {v!r}\n")
