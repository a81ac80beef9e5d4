"""Exact Jack symmetric functions J_lambda(.; theta) with rational arithmetic.

Jack functions are built by Gram-Schmidt in the monomial basis, where they
are unitriangular, using the theta-deformed power-sum scalar product

    <p_lam, p_mu> = delta_{lam,mu} * theta^(-len(lam)) * prod_i i^{m_i} m_i!

Specializations are homomorphisms fixed by the images of the power sums.
Closed hook-type products give the values of J_lambda on the three
homogeneous specializations without going through the symbolic expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .partitions import Partition, conjugate, hook_data, partitions_of

Number = Union[int, Fraction, float]

DEFAULT_DEGREE_CAP = 10


class DegreeCapError(RuntimeError):
    """Raised when a symbolic expansion above the degree cap is requested."""


def as_theta(theta) -> Fraction:
    t = theta if isinstance(theta, Fraction) else Fraction(theta)
    if t <= 0:
        raise ValueError("theta must be positive")
    return t


# -- specializations ---------------------------------------------------------


@dataclass(frozen=True)
class HomAlpha:
    """Pure-alpha specialization a^N: N variables all equal to a."""

    a: Number
    N: int

    def __post_init__(self):
        _check_positive(self.a, self.N)


@dataclass(frozen=True)
class HomBeta:
    """Pure-beta specialization b_beta^M: beta_1 = ... = beta_M = b / theta."""

    b: Number
    M: int

    def __post_init__(self):
        _check_positive(self.b, self.M)


@dataclass(frozen=True)
class Plancherel:
    """Plancherel specialization tau_s: p_1 -> s, p_k -> 0 for k >= 2."""

    s: Number

    def __post_init__(self):
        if not self.s >= 0:
            raise ValueError("Plancherel parameter must be nonnegative")


Specialization = Union[HomAlpha, HomBeta, Plancherel]


def _check_positive(value, count):
    if not value > 0:
        raise ValueError("specialization value must be positive")
    if int(count) != count or count < 1:
        raise ValueError("specialization count must be a positive integer")


def power_sum_value(k: int, rho: Specialization, theta) -> Number:
    """Image of p_k under rho."""
    if isinstance(rho, HomAlpha):
        return rho.N * rho.a**k
    if isinstance(rho, HomBeta):
        th = _theta_like(theta, rho.b)
        return rho.M * (-th) ** (k - 1) * (rho.b / th) ** k
    if isinstance(rho, Plancherel):
        return rho.s if k == 1 else 0 * rho.s
    raise TypeError(f"unknown specialization {rho!r}")


def _theta_like(theta, x):
    # keep exact arithmetic exact, but let float parameters stay float
    if isinstance(x, float):
        return float(theta)
    return as_theta(theta)


# -- symbolic expressions ----------------------------------------------------


class SymFuncExpr:
    """Homogeneous symmetric function as a sparse map p_lambda -> coefficient."""

    __slots__ = ("terms", "degree")

    def __init__(self, terms: dict, degree: int | None = None):
        clean = {}
        for lam, c in terms.items():
            lam = lam if isinstance(lam, Partition) else Partition(lam)
            if c != 0:
                clean[lam] = c
        degs = {lam.weight() for lam in clean}
        if len(degs) > 1:
            raise ValueError("expression is not homogeneous")
        if degree is None:
            degree = degs.pop() if degs else 0
        elif degs and degs != {degree}:
            raise ValueError("degree does not match the terms")
        self.terms = clean
        self.degree = degree

    def __eq__(self, other):
        if not isinstance(other, SymFuncExpr):
            return NotImplemented
        return self.terms == other.terms and (self.degree == other.degree or not self.terms)

    def __repr__(self):
        inner = " + ".join(f"({c})p{list(lam)}" for lam, c in sorted(self.terms.items(), reverse=True))
        return f"SymFuncExpr({inner or '0'})"

    def coefficient(self, lam) -> Fraction:
        lam = lam if isinstance(lam, Partition) else Partition(lam)
        return self.terms.get(lam, Fraction(0))

    def scale(self, c) -> "SymFuncExpr":
        return SymFuncExpr({lam: c * v for lam, v in self.terms.items()}, self.degree)

    def to_json(self) -> list[dict]:
        out = []
        for lam, c in sorted(self.terms.items(), reverse=True):
            c = Fraction(c)
            out.append({"partition": lam.to_json(), "numerator": c.numerator, "denominator": c.denominator})
        return out

    @classmethod
    def from_json(cls, data) -> "SymFuncExpr":
        return cls({Partition(d["partition"]): Fraction(d["numerator"], d["denominator"]) for d in data})


def power_sum(k: int) -> SymFuncExpr:
    return SymFuncExpr({Partition([k]): Fraction(1)})


def power_product_norm(lam, theta) -> Fraction:
    """<p_lam, p_lam> = theta^(-len) * prod i^{m_i} m_i!."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    th = as_theta(theta)
    z = 1
    for i, m in lam.multiplicities().items():
        z *= i**m * math.factorial(m)
    return Fraction(z) / th ** lam.length()


def scalar_product(f: SymFuncExpr, g: SymFuncExpr, theta) -> Fraction:
    return sum((c * g.terms[lam] * power_product_norm(lam, theta)
                for lam, c in f.terms.items() if lam in g.terms), Fraction(0))


# -- power sums vs monomials -------------------------------------------------


@lru_cache(maxsize=None)
def _basis(n: int) -> tuple[Partition, ...]:
    """Partitions of n in increasing reverse-lex order."""
    return tuple(reversed(partitions_of(n)))


def _times_power_sum(k: int, mono: dict) -> dict:
    """p_k * sum_nu c_nu m_nu, in the monomial basis."""
    out: dict = {}
    for nu, c in mono.items():
        parts = list(nu.parts)
        candidates = {v for v in parts} | {0}
        for v in candidates:
            new = list(parts)
            if v == 0:
                new.append(k)
            else:
                new.remove(v)
                new.append(v + k)
            lam = Partition(sorted(new, reverse=True))
            # each row of lam equal to the new value can receive the x^k factor
            mult = lam.parts.count(v + k)
            out[lam] = out.get(lam, 0) + c * mult
    return out


@lru_cache(maxsize=None)
def _p_to_m(n: int) -> tuple[tuple[int, ...], ...]:
    """Integer matrix A with p_mu = sum_lam A[mu][lam] m_lam (basis order of _basis)."""
    basis = _basis(n)
    index = {lam: i for i, lam in enumerate(basis)}
    rows = []
    for mu in basis:
        mono = {Partition(()): 1}
        for k in mu.parts:
            mono = _times_power_sum(k, mono)
        row = [0] * len(basis)
        for lam, c in mono.items():
            row[index[lam]] = c
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _m_to_p(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of _p_to_m(n): m_lam = sum_mu B[lam][mu] p_mu."""
    A = [[Fraction(x) for x in row] for row in _p_to_m(n)]
    size = len(A)
    inv = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for col in range(size):
        piv = next(r for r in range(col, size) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        f = A[col][col]
        A[col] = [x / f for x in A[col]]
        inv[col] = [x / f for x in inv[col]]
        for r in range(size):
            if r != col and A[r][col] != 0:
                g = A[r][col]
                A[r] = [x - g * y for x, y in zip(A[r], A[col])]
                inv[r] = [x - g * y for x, y in zip(inv[r], inv[col])]
    # p = A m  =>  m = A^{-1} p; rows of A^{-1} are indexed by lam
    return tuple(tuple(row) for row in inv)


def monomial_in_p_basis(lam) -> SymFuncExpr:
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    n = lam.weight()
    basis = _basis(n)
    row = _m_to_p(n)[basis.index(lam)]
    return SymFuncExpr(dict(zip(basis, row)), n)


def to_monomial_basis(expr: SymFuncExpr) -> dict[Partition, Fraction]:
    n = expr.degree
    basis = _basis(n)
    A = _p_to_m(n)
    out: dict = {}
    for mu, c in expr.terms.items():
        for lam, a in zip(basis, A[basis.index(mu)]):
            if a:
                out[lam] = out.get(lam, 0) + c * a
    return {lam: c for lam, c in out.items() if c != 0}


# -- Jack functions ----------------------------------------------------------


@lru_cache(maxsize=None)
def _jack_degree(n: int, theta: Fraction) -> dict:
    basis = _basis(n)
    B = _m_to_p(n)
    norms = [power_product_norm(mu, theta) for mu in basis]

    def dot(u, v):
        return sum((x * y * z for x, y, z in zip(u, v, norms) if x and y), Fraction(0))

    jacks: list[list[Fraction]] = []
    sq: list[Fraction] = []
    for i in range(len(basis)):
        v = list(B[i])
        for J, JJ in zip(jacks, sq):
            c = dot(B[i], J) / JJ
            if c:
                v = [x - c * y for x, y in zip(v, J)]
        jacks.append(v)
        sq.append(dot(v, v))
    return {lam: SymFuncExpr(dict(zip(basis, J)), n) for lam, J in zip(basis, jacks)}


def jack_in_p_basis(lam, theta, degree_cap: int = DEFAULT_DEGREE_CAP) -> SymFuncExpr:
    """J_lam(.; theta) in the power-sum basis, monic in m_lam."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    n = lam.weight()
    if n > degree_cap:
        raise DegreeCapError(f"|lambda| = {n} exceeds the symbolic degree cap {degree_cap}")
    return _jack_degree(n, as_theta(theta))[lam]


def dual_scale_factor(lam, theta) -> Number:
    """prod over cells of (a + theta*l + theta) / (a + theta*l + 1)."""
    th = theta if isinstance(theta, float) else as_theta(theta)
    out = Fraction(1) if not isinstance(th, float) else 1.0
    for arm, leg, _, _ in hook_data(lam):
        out *= (arm + th * leg + th) / (arm + th * leg + 1)
    return out


def specialize(expr: SymFuncExpr, rho: Specialization, theta) -> Number:
    pk: dict[int, Number] = {}
    total = Fraction(0)
    for lam, c in expr.terms.items():
        term = c
        for k in lam.parts:
            if k not in pk:
                pk[k] = power_sum_value(k, rho, theta)
            term = term * pk[k]
        total = total + term
    return total


def omega_theta(expr: SymFuncExpr, theta) -> SymFuncExpr:
    """Automorphism p_k -> (-1)^(k-1) theta^(-1) p_k."""
    th = as_theta(theta)
    out = {}
    for lam, c in expr.terms.items():
        sign = (-1) ** sum(k - 1 for k in lam.parts)
        out[lam] = c * sign / th ** lam.length()
    return SymFuncExpr(out, expr.degree)


def eval_jack(lam, rho: Specialization, theta, dual: bool = False) -> Number:
    """J_lam(rho; theta), or the dual J~_lam when ``dual``, by closed products."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    exact = not isinstance(theta, float) and not _is_float_spec(rho)
    th = as_theta(theta) if exact else float(theta)
    one = Fraction(1) if exact else 1.0

    if isinstance(rho, HomAlpha):
        val = one * rho.a ** lam.weight()
        for arm, leg, coarm, coleg in hook_data(lam):
            val *= (rho.N * th + coarm - th * coleg) / (arm + th * leg + th)
    elif isinstance(rho, HomBeta):
        # J_lam(b_beta^M; theta) = J~_lam'(b^M; 1/theta)
        val = eval_jack(conjugate(lam), HomAlpha(rho.b, rho.M), one / th, dual=True)
    elif isinstance(rho, Plancherel):
        val = one
        for arm, leg, _, _ in hook_data(lam):
            val *= rho.s * th / (arm + th * leg + th)
    else:
        raise TypeError(f"unknown specialization {rho!r}")

    if dual:
        val *= dual_scale_factor(lam, th)
    return val


def _is_float_spec(rho) -> bool:
    return any(isinstance(getattr(rho, f), float) for f in ("a", "b", "s") if hasattr(rho, f))
