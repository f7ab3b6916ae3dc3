"""Spectral analysis of substitution matrices.

Irreducibility and primitivity are decided on the zero pattern.  The Perron
eigenpair comes from power iteration; the characteristic polynomial is exact
(Faddeev-LeVerrier over Python integers).  Pisot classification looks only at
the irreducible factor of the characteristic polynomial that vanishes at the
Perron root, so spurious eigenvalues of the matrix do not leak into it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .symbolic import SubstitutionMatrix

PISOT_DEADBAND = 1e-9
MAX_FACTOR_DEGREE = 16


class ReducibleMatrixError(ValueError):
    """Raised when Perron data is requested for a reducible matrix."""


def _as_rows(M) -> tuple[tuple[int, ...], ...]:
    if isinstance(M, SubstitutionMatrix):
        return M.rows
    return SubstitutionMatrix(tuple(tuple(int(x) for x in r) for r in M)).rows


def _reach(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        for k in adj[stack.pop()]:
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return seen


def is_irreducible(M) -> bool:
    """Strong connectivity of the graph with an edge j -> i whenever M[i][j] > 0."""
    rows = _as_rows(M)
    m = len(rows)
    fwd = [[i for i in range(m) if rows[i][j] > 0] for j in range(m)]
    back = [[j for j in range(m) if rows[i][j] > 0] for i in range(m)]
    return len(_reach(fwd, 0)) == m and len(_reach(back, 0)) == m


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    exponent: int | None = None
    blocking_entry: tuple[int, int] | None = None
    persistent: bool = False

    def __bool__(self) -> bool:
        return self.primitive


def is_primitive(M) -> PrimitivityResult:
    """Smallest n <= (m-1)^2 + 1 with M^n > 0, or a zero entry that blocks it.

    ``persistent`` marks a blocking entry that is zero in every power
    (no path in the transition graph).
    """
    rows = _as_rows(M)
    m = len(rows)
    A = np.array(rows) > 0
    P = A.copy()
    bound = (m - 1) ** 2 + 1
    for n in range(1, bound + 1):
        if P.all():
            return PrimitivityResult(True, n)
        P = (P.astype(np.int64) @ A.astype(np.int64)) > 0
    # reachability closure: entry (i, j) is persistently zero iff i is unreachable from j
    fwd = [[i for i in range(m) if rows[i][j] > 0] for j in range(m)]
    for j in range(m):
        reach = set()
        stack = list(fwd[j])
        while stack:
            k = stack.pop()
            if k not in reach:
                reach.add(k)
                stack.extend(fwd[k])
        for i in range(m):
            if i not in reach:
                return PrimitivityResult(False, None, (i, j), True)
    Pw = np.linalg.matrix_power(A.astype(np.int64), bound) > 0
    zi, zj = np.argwhere(~Pw)[0]
    return PrimitivityResult(False, None, (int(zi), int(zj)), False)


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    left_eigenvector: tuple[float, ...]
    right_eigenvector: tuple[float, ...]
    iterations_used: int
    residual: float = 0.0


def _power_iterate(A: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int, float]:
    m = A.shape[0]
    # shifting by the identity keeps the eigenvectors and makes an irreducible matrix primitive
    B = A + np.eye(m)
    v = np.full(m, 1.0 / m)
    lam = 0.0
    res = np.inf
    for it in range(1, max_iter + 1):
        w = B @ v
        w /= w.sum()
        Aw = A @ w
        lam = Aw.sum()
        res = np.abs(Aw - lam * w).max()
        v = w
        if res <= tol * max(lam, 1.0):
            return float(lam), v, it, float(res)
    return float(lam), v, max_iter, float(res)


def perron(M, tol: float = 1e-12, max_iter: int = 100_000) -> PerronData:
    """Perron eigenvalue and normalised (sum 1) left/right eigenvectors."""
    rows = _as_rows(M)
    if not is_irreducible(rows):
        raise ReducibleMatrixError(
            "matrix is reducible; analyse its irreducible components (quotient graph) instead"
        )
    A = np.array(rows, dtype=float)
    lam, right, it_r, res_r = _power_iterate(A, tol, max_iter)
    lam_l, left, it_l, res_l = _power_iterate(A.T, tol, max_iter)
    return PerronData(
        eigenvalue=lam,
        left_eigenvector=tuple(float(x) for x in left),
        right_eigenvector=tuple(float(x) for x in right),
        iterations_used=max(it_r, it_l),
        residual=max(res_r, res_l),
    )


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients from the leading term down to the constant."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coefficients]
        while len(c) > 1 and c[0] == 0:
            c.pop(0)
        object.__setattr__(self, "coefficients", tuple(c) or (0,))

    @classmethod
    def x_minus(cls, r: int) -> IntPolynomial:
        return cls((1, -r))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_monic(self) -> bool:
        return self.coefficients[0] == 1

    def __call__(self, x):
        acc = 0
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __mul__(self, other: IntPolynomial) -> IntPolynomial:
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return IntPolynomial(tuple(out))

    def divmod_monic(self, d: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
        """Exact long division by a monic divisor."""
        if not d.is_monic:
            raise ValueError("divisor must be monic")
        rem = list(self.coefficients)
        q = []
        k = d.degree
        while len(rem) - 1 >= k:
            c = rem[0]
            q.append(c)
            for i, dc in enumerate(d.coefficients):
                rem[i] -= c * dc
            rem.pop(0)
        return IntPolynomial(tuple(q) or (0,)), IntPolynomial(tuple(rem) or (0,))

    def roots(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(np.array(self.coefficients, dtype=float)).astype(complex)

    def __str__(self) -> str:
        terms = []
        d = self.degree
        for k, c in enumerate(self.coefficients):
            p = d - k
            if c == 0 and d > 0:
                continue
            mag = abs(c)
            if p == 0:
                body = str(mag)
            else:
                coef = "" if mag == 1 else str(mag)
                body = coef + ("x" if p == 1 else f"x^{p}")
            if not terms:
                terms.append(("-" if c < 0 else "") + body)
            else:
                terms.append(("- " if c < 0 else "+ ") + body)
        return " ".join(terms) if terms else "0"


def char_poly(M) -> IntPolynomial:
    """det(xI - M), exactly, by the Faddeev-LeVerrier recurrence."""
    rows = _as_rows(M)
    n = len(rows)
    A = [list(r) for r in rows]
    coeffs = [1]
    Mk = [[0] * n for _ in range(n)]
    c_prev = 1
    for k in range(1, n + 1):
        # Mk = A * M_{k-1} + c_{k-1} I
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        Mk = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        tr = sum(sum(A[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        c_prev = -tr // k
        coeffs.append(c_prev)
    return IntPolynomial(tuple(coeffs))


def int_det(M) -> int:
    """Exact determinant via the constant term of the characteristic polynomial."""
    rows = _as_rows(M)
    p = char_poly(rows)
    return (-1) ** len(rows) * p.coefficients[-1]


class PisotClass(str, Enum):
    PISOT = "Pisot"
    NON_PISOT = "NonPisot"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PisotReport:
    classification: PisotClass
    minimal_factor: IntPolynomial
    conjugate_moduli: tuple[float, ...]
    perron_value: float = 0.0
    diagnostic: str = ""


def _poly_from_roots(roots: Sequence[complex]) -> IntPolynomial | None:
    c = np.poly(np.array(roots, dtype=complex))
    if np.max(np.abs(c.imag)) > 1e-6:
        return None
    r = np.round(c.real)
    if np.max(np.abs(c.real - r)) > 1e-6:
        return None
    return IntPolynomial(tuple(int(x) for x in r))


def minimal_factor(p: IntPolynomial, root: float) -> IntPolynomial | None:
    """Smallest-degree monic integer divisor of ``p`` vanishing at ``root``.

    Candidate divisors are built from subsets of the numerical roots and
    accepted only if they divide ``p`` exactly; the smallest one is the
    minimal polynomial of ``root``.
    """
    roots = list(p.roots())
    if not roots:
        return None
    k = int(np.argmin([abs(r - root) for r in roots]))
    anchor = roots.pop(k)
    others = roots
    for size in range(0, len(others) + 1):
        for combo in itertools.combinations(range(len(others)), size):
            cand = _poly_from_roots([anchor] + [others[i] for i in combo])
            if cand is None:
                continue
            _, rem = p.divmod_monic(cand)
            if rem.coefficients == (0,):
                return cand
    return None


def classify_pisot(M, deadband: float = PISOT_DEADBAND) -> PisotReport:
    rows = _as_rows(M)
    pd = perron(rows)
    lam = pd.eigenvalue
    p = char_poly(rows)
    if p.degree > MAX_FACTOR_DEGREE:
        return PisotReport(
            PisotClass.INDETERMINATE, p, (), lam, f"characteristic polynomial degree {p.degree} too large to factor"
        )
    f = minimal_factor(p, lam)
    if f is None:
        return PisotReport(PisotClass.INDETERMINATE, p, (), lam, "no integer factor through the Perron root found")
    roots = list(f.roots())
    k = int(np.argmin([abs(r - lam) for r in roots]))
    roots.pop(k)
    moduli = tuple(sorted((float(abs(r)) for r in roots), reverse=True))
    if all(m < 1.0 - deadband for m in moduli):
        cls = PisotClass.PISOT
    elif any(m > 1.0 + deadband for m in moduli):
        cls = PisotClass.NON_PISOT
    else:
        cls = PisotClass.INDETERMINATE
    return PisotReport(cls, f, moduli, lam)


def eigenvalues(M) -> np.ndarray:
    """Numerical eigenvalues sorted by decreasing modulus."""
    ev = np.linalg.eigvals(np.array(_as_rows(M), dtype=float))
    return ev[np.argsort(-np.abs(ev), kind="stable")]
