"""Exact small-instance checks tying the closed formulas to brute force.

Jack-measure quantities are summed degree by degree in exact rationals.  For
each degree n the sum S_n = sum_{|lam|=n} J_lam(rho1) J~_lam(rho2) is compared
with the n-th Taylor coefficient of the closed normalization, so every
finite-degree comparison is an exact equality; infinite series are then
closed off with a ratio-test tail bound.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Optional

import mpmath
import numpy as np

from .ensemble import CaseParams, build_model, normalization_closed_form, particles, specializations
from .jack import (
    HomAlpha, HomBeta, Plancherel, as_theta, dual_scale_factor, eval_jack,
    jack_in_p_basis, specialize,
)
from .partitions import Partition, conjugate, enumerate_box, hook_data, partitions_of
from .sampler import exact_distribution_small

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class VerificationReport:
    check: str
    params: dict
    status: str
    deviation: float
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = _jsonable(self.witness)
        d["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return d


def _jsonable(x):
    if isinstance(x, Partition):
        return x.to_json()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _params_dict(p: CaseParams) -> dict:
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in p.to_dict().items()}


# -- normalization -------------------------------------------------------------


def _restrictions(rho) -> tuple[Optional[int], Optional[int]]:
    """(max length, max part) outside which J_lam(rho) vanishes."""
    if isinstance(rho, HomAlpha):
        return rho.N, None
    if isinstance(rho, HomBeta):
        return None, rho.M
    return None, None


def _support(rho1, rho2, n: int) -> list[Partition]:
    l1, p1 = _restrictions(rho1)
    l2, p2 = _restrictions(rho2)
    lens = [v for v in (l1, l2) if v is not None]
    parts = [v for v in (p1, p2) if v is not None]
    return partitions_of(n, min(lens) if lens else None, min(parts) if parts else None)


def degree_sums(p: CaseParams, n_max: int) -> list[Fraction]:
    """S_n for n = 0..n_max in exact arithmetic."""
    th = as_theta(p.theta)
    r1, r2 = specializations(p, exact=True)
    out = []
    for n in range(n_max + 1):
        out.append(sum((eval_jack(lam, r1, th) * eval_jack(lam, r2, th, dual=True)
                        for lam in _support(r1, r2, n)), Fraction(0)))
    return out


def _series_data(p: CaseParams):
    """(kind, c, x): H = (1 - x)^(-c) ('rising'), (1 + x)^c ('binomial') or exp(x)."""
    th = as_theta(p.theta)
    F = Fraction
    N = p.N
    c = p.case
    if c == "I":
        return "rising", th * N * p.M, F(p.a) * F(p.b)
    if c == "II":
        return "binomial", N * p.M, F(p.a) * F(p.b)
    if c == "III":
        return "exp", None, th * F(p.a) * N * (N * F(p.t))
    if c == "IV":
        return "rising", F(N * p.M) / th, F(p.a) * F(p.b)
    if c == "V":
        return "exp", None, F(p.a) * N * (N * F(p.t))
    return "exp", None, th * (N * F(p.t1)) * (N * F(p.t2))


def closed_coefficients(p: CaseParams, n_max: int) -> list[Fraction]:
    """Taylor coefficients in the degree grading of the closed normalization."""
    kind, c, x = _series_data(p)
    out = [Fraction(1)]
    for n in range(1, n_max + 1):
        if kind == "rising":
            out.append(out[-1] * (c + n - 1) / n * x)
        elif kind == "binomial":
            out.append(out[-1] * (c - n + 1) / n * x)
        else:
            out.append(out[-1] * x / n)
    return out


def _tail_bound(p: CaseParams, n0: int, last: Fraction) -> Optional[float]:
    """Bound on sum_{n > n0} c_n given c_{n0}, or None if the ratio test fails."""
    kind, c, x = _series_data(p)
    if kind == "binomial":
        return 0.0 if n0 >= c else None
    if kind == "rising":
        r_next = float(x * (c + n0) / (n0 + 1))
        q = max(r_next, float(x))
    else:
        r_next = float(x / (n0 + 1))
        q = r_next
    if q >= 1:
        return None
    return float(last) * r_next / (1 - q)


def _closed_value(p: CaseParams) -> mpmath.mpf:
    kind, c, x = _series_data(p)
    with mpmath.workdps(40):
        X = mpmath.mpf(x.numerator) / x.denominator
        if kind == "rising":
            C = mpmath.mpf(c.numerator) / c.denominator
            return (1 - X) ** (-C)
        if kind == "binomial":
            return (1 + X) ** c
        return mpmath.e**X


def _needed_degree(p: CaseParams, rel_tol: float, n_cap: int) -> Optional[int]:
    kind, c, _ = _series_data(p)
    if kind == "binomial":
        return int(c)
    coeffs = closed_coefficients(p, n_cap)
    total = float(sum(coeffs))
    for n0 in range(1, n_cap + 1):
        tb = _tail_bound(p, n0, coeffs[n0])
        if tb is not None and tb <= rel_tol * total:
            return n0
    return None


def verify_normalization(p: CaseParams, rel_tol: float = 1e-12, n_cap: int = 80) -> VerificationReport:
    """sum_lam J_lam(rho1) J~_lam(rho2) against the closed product."""
    name = f"normalization[{p.case}]"
    n0 = _needed_degree(p, rel_tol, n_cap)
    if n0 is None:
        return VerificationReport(name, _params_dict(p), INCONCLUSIVE, math.nan,
                                  details={"reason": "tail bound not certified"})
    sums = degree_sums(p, n0)
    coeffs = closed_coefficients(p, n0)
    for n, (s, c) in enumerate(zip(sums, coeffs)):
        if s != c:
            return VerificationReport(name, _params_dict(p), FAIL, abs(float(s - c)),
                                      witness=n, details={"sum": s, "closed": c})
    total = sum(sums, Fraction(0))
    kind, _, _ = _series_data(p)
    if kind == "binomial":
        closed = (1 + _series_data(p)[2]) ** _series_data(p)[1]
        ok = total == closed
        return VerificationReport(name, _params_dict(p), PASS if ok else FAIL, 0.0 if ok else 1.0,
                                  details={"degree": n0, "exact": True, "sum": total})
    with mpmath.workdps(40):
        H = _closed_value(p)
        rel = float(abs(mpmath.mpf(total.numerator) / total.denominator - H) / H)
    tail = _tail_bound(p, n0, coeffs[n0]) / float(H)
    log_closed = normalization_closed_form(replace(p, **{k: float(getattr(p, k)) for k in
                                                         ("theta", "a", "b", "t", "t1", "t2")
                                                         if getattr(p, k) is not None}))
    status = PASS if rel <= 1e-10 and tail <= 1e-10 else FAIL
    return VerificationReport(name, _params_dict(p), status, rel,
                              details={"degree": n0, "tail_bound": tail, "log_H": log_closed})


# -- specialization products ------------------------------------------------------


def default_specializations():
    F = Fraction
    return [HomAlpha(F(2, 3), 2), HomAlpha(F(3, 2), 3), HomBeta(F(3, 5), 2), HomBeta(F(4, 3), 3), Plancherel(F(5, 7))]


def verify_specialization_products(max_degree: int = 6, thetas: Iterable = (Fraction(1, 2), 1, 2),
                                   rhos=None) -> VerificationReport:
    """Closed products against Gram-Schmidt Jack functions, exactly."""
    rhos = rhos or default_specializations()
    checked = 0
    for th in thetas:
        th = as_theta(th)
        for n in range(max_degree + 1):
            for lam in partitions_of(n):
                J = jack_in_p_basis(lam, th)
                b = dual_scale_factor(lam, th)
                for rho in rhos:
                    sym = specialize(J, rho, th)
                    for dual in (False, True):
                        lhs = sym * b if dual else sym
                        rhs = eval_jack(lam, rho, th, dual)
                        checked += 1
                        if lhs != rhs:
                            return VerificationReport("specialization_products", {"theta": str(th)}, FAIL,
                                                      abs(float(lhs - rhs)), witness=[lam, repr(rho), dual])
                # closed-form vanishing
                for rho in rhos:
                    zero = ((isinstance(rho, HomAlpha) and lam.length() > rho.N)
                            or (isinstance(rho, HomBeta) and lam.part(1) > rho.M))
                    if zero != (eval_jack(lam, rho, th) == 0):
                        return VerificationReport("specialization_products", {"theta": str(th)}, FAIL, 1.0,
                                                  witness=[lam, repr(rho), "vanishing"])
                # J~(tau_s; theta) = J_lam'(tau_{s theta}; 1/theta)
                s = Fraction(5, 7)
                if eval_jack(lam, Plancherel(s), th, True) != eval_jack(conjugate(lam), Plancherel(s * th), 1 / th):
                    return VerificationReport("specialization_products", {"theta": str(th)}, FAIL, 1.0,
                                              witness=[lam, "plancherel duality"])
    return VerificationReport("specialization_products", {"max_degree": max_degree}, PASS, 0.0,
                              details={"comparisons": checked})


def verify_orthogonality(max_degree: int = 7, thetas=(Fraction(1, 3), Fraction(1, 2), 1, 2, 3)) -> VerificationReport:
    from .jack import scalar_product
    for th in thetas:
        for n in range(1, max_degree + 1):
            parts = partitions_of(n)
            Js = [jack_in_p_basis(l, th) for l in parts]
            for i in range(len(parts)):
                for j in range(i):
                    v = scalar_product(Js[i], Js[j], th)
                    if v != 0:
                        return VerificationReport("orthogonality", {"theta": str(th)}, FAIL, abs(float(v)),
                                                  witness=[parts[i], parts[j]])
    return VerificationReport("orthogonality", {"max_degree": max_degree}, PASS, 0.0)


# -- pmf identification ----------------------------------------------------------


def jack_measure_on_box(p: CaseParams, R: Optional[int] = None):
    """Exact Jack weights of the states in the model's box, normalized over the box."""
    model = build_model(p, R=R)
    th = as_theta(p.theta)
    r1, r2 = specializations(p, exact=True)
    states = list(enumerate_box(model.K, model.R))
    w = [eval_jack(lam, r1, th) * eval_jack(lam, r2, th, dual=True) for lam in states]
    Z = sum(w, Fraction(0))
    return model, states, [x / Z for x in w]


def _float_params(p: CaseParams) -> CaseParams:
    return replace(p, **{k: float(getattr(p, k)) for k in ("theta", "a", "b", "t", "t1", "t2")
                         if getattr(p, k) is not None})


def verify_pmf_match(p: CaseParams, R: Optional[int] = None, tol: float = 1e-11) -> VerificationReport:
    model, states, exact = jack_measure_on_box(p, R)
    numeric = dict(exact_distribution_small(build_model(_float_params(p), R=R)))
    worst, witness = 0.0, None
    for lam, q in zip(states, exact):
        dev = abs(float(q) - numeric[lam])
        if dev > worst:
            worst, witness = dev, lam
    return VerificationReport(f"pmf[{p.case}]", _params_dict(p), PASS if worst <= tol else FAIL, worst,
                              witness=witness, details={"states": len(states), "K": model.K, "R": model.R})


# -- moments -------------------------------------------------------------------------


def expected_size_closed(p: CaseParams):
    """E|lam| for the unconditioned Jack measure (u d/du log H at u = 1)."""
    kind, c, x = _series_data(p)
    if kind == "rising":
        return c * x / (1 - x)
    if kind == "binomial":
        return c * x / (1 + x)
    return x


def verify_moment_identities(p: CaseParams, rel_tol: float = 1e-12, n_cap: int = 80) -> VerificationReport:
    name = f"moments[{p.case}]"
    n0 = _needed_degree(p, rel_tol * 1e-2, n_cap)
    if n0 is None:
        return VerificationReport(name, _params_dict(p), INCONCLUSIVE, math.nan)
    sums = degree_sums(p, n0 + 5)
    closed = expected_size_closed(p)
    kind, _, _ = _series_data(p)
    num = sum((n * s for n, s in enumerate(sums)), Fraction(0))
    den = sum(sums, Fraction(0))
    if kind == "binomial":
        ok = num / den == closed
        return VerificationReport(name, _params_dict(p), PASS if ok else FAIL, 0.0 if ok else 1.0,
                                  details={"E_size": num / den, "exact": True})
    rel = abs(float(num / den / closed) - 1) if closed else abs(float(num / den))
    return VerificationReport(name, _params_dict(p), PASS if rel <= 1e-10 else FAIL, rel,
                              details={"E_size": float(num / den), "closed": float(closed), "degree": n0 + 5})


# -- Jack-Plancherel -----------------------------------------------------------


def jack_plancherel(lam, theta) -> Fraction:
    """n! theta^n / prod (a + theta l + theta)(a + theta l + 1)."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    th = as_theta(theta)
    n = lam.weight()
    den = Fraction(1)
    for arm, leg, _, _ in hook_data(lam):
        den *= (arm + th * leg + th) * (arm + th * leg + 1)
    return math.factorial(n) * th**n / den


def verify_jack_plancherel_identity(n_max: int = 6, theta=Fraction(1, 2), s1=Fraction(1, 2),
                                    s2=Fraction(2, 3)) -> VerificationReport:
    """Poissonized Jack-Plancherel measure equals the Case VI Jack measure.

    Both sides carry the factor exp(-L), L = theta s1 s2, which cancels, so
    the comparison L^n/n! M_n(lam) = J_lam(tau_s1) J~_lam(tau_s2) is exact.
    """
    th = as_theta(theta)
    s1, s2 = Fraction(s1), Fraction(s2)
    L = th * s1 * s2
    params = {"theta": str(th), "s1": str(s1), "s2": str(s2), "n_max": n_max}
    for n in range(n_max + 1):
        parts = partitions_of(n)
        total = sum((jack_plancherel(l, th) for l in parts), Fraction(0))
        if total != 1:
            return VerificationReport("jack_plancherel", params, FAIL, abs(float(total - 1)), witness=n)
        for lam in parts:
            if jack_plancherel(lam, th) != jack_plancherel(conjugate(lam), 1 / th):
                return VerificationReport("jack_plancherel", params, FAIL, 1.0, witness=[lam, "conjugation"])
            lhs = L**n / math.factorial(n) * jack_plancherel(lam, th)
            rhs = eval_jack(lam, Plancherel(s1), th) * eval_jack(lam, Plancherel(s2), th, dual=True)
            if lhs != rhs:
                return VerificationReport("jack_plancherel", params, FAIL, abs(float(lhs - rhs)), witness=lam)
    return VerificationReport("jack_plancherel", params, PASS, 0.0)


# -- symmetry and duality --------------------------------------------------------


def verify_symmetry(p: CaseParams, max_degree: int = 8) -> VerificationReport:
    th = as_theta(p.theta)
    r1, r2 = specializations(p, exact=True)
    for n in range(max_degree + 1):
        for lam in partitions_of(n):
            a = eval_jack(lam, r1, th) * eval_jack(lam, r2, th, dual=True)
            b = eval_jack(lam, r2, th) * eval_jack(lam, r1, th, dual=True)
            if a != b:
                return VerificationReport(f"symmetry[{p.case}]", _params_dict(p), FAIL, abs(float(a - b)), witness=lam)
    return VerificationReport(f"symmetry[{p.case}]", _params_dict(p), PASS, 0.0)


def verify_conjugation_duality(a, b, N: int, M: int, theta, max_degree: int = 8) -> VerificationReport:
    """lam ~ J^theta(a_beta^N, b_beta^M)  iff  lam' ~ J^{1/theta}(a^N, b^M).

    The two normalizations coincide, so unnormalized weights are compared.
    """
    th = as_theta(theta)
    a, b = Fraction(a), Fraction(b)
    params = {"a": str(a), "b": str(b), "N": N, "M": M, "theta": str(th)}
    for n in range(max_degree + 1):
        for lam in partitions_of(n):
            lhs = eval_jack(lam, HomBeta(a, N), th) * eval_jack(lam, HomBeta(b, M), th, dual=True)
            mu = conjugate(lam)
            rhs = eval_jack(mu, HomAlpha(a, N), 1 / th) * eval_jack(mu, HomAlpha(b, M), 1 / th, dual=True)
            if lhs != rhs:
                return VerificationReport("conjugation_duality", params, FAIL, abs(float(lhs - rhs)), witness=lam)
    return VerificationReport("conjugation_duality", params, PASS, 0.0)


# -- loop equation ---------------------------------------------------------------


def nekrasov_observable(p: CaseParams, zs, R: Optional[int] = None):
    """H_K(z) at the points zs, from the exact distribution on the model box."""
    model = build_model(_float_params(p), R=R)
    K, th = model.K, model.theta
    sK = model.wall
    dist = exact_distribution_small(model)
    zs = np.asarray(zs, dtype=complex)
    term_m = np.zeros_like(zs)
    term_p = np.zeros_like(zs)
    r_minus = 0.0
    r_plus = 0.0
    phim0 = np.polynomial.polynomial.polyval(0.0, model.phi_minus)
    phipS = np.polynomial.polynomial.polyval(sK, model.phi_plus)
    for lam, prob in dist:
        ell = particles(lam, K, th)
        term_m += prob * np.prod((zs[:, None] - ell - th) / (zs[:, None] - ell), axis=1)
        term_p += prob * np.prod((zs[:, None] - ell + th - 1) / (zs[:, None] - ell - 1), axis=1)
        if K and ell[-1] == 0:
            r_minus += prob * np.prod((ell[:-1] + th) / ell[:-1])
        if K and abs(ell[0] - (sK - 1)) < 1e-12:
            r_plus += prob * np.prod((sK - ell[1:] + th - 1) / (sK - ell[1:] - 1))
    r_minus *= phim0 * (-th)
    r_plus *= phipS * th
    Hm = np.polynomial.polynomial.polyval(zs, model.phi_minus) * term_m
    Hp = np.polynomial.polynomial.polyval(zs, model.phi_plus) * term_p
    return Hm + Hp - r_minus / zs - r_plus / (zs - sK), model


def verify_nekrasov_polynomial(p: CaseParams, R: Optional[int] = None, tol: float = 1e-9) -> VerificationReport:
    """H_K is a polynomial of degree <= deg Phi: interpolate and test two extra points."""
    model0 = build_model(_float_params(p), R=R)
    deg = max(len(model0.phi_minus), len(model0.phi_plus)) - 1
    rng = np.random.default_rng(12345)
    n_pts = deg + 3
    scale = (model0.wall or 1.0)
    zs = scale * (0.5 + rng.random(n_pts)) + 1j * scale * (0.3 + rng.random(n_pts))
    H, model = nekrasov_observable(p, zs, R)
    fit = np.polynomial.polynomial.polyfit(zs[: deg + 1], H[: deg + 1], deg)
    pred = np.polynomial.polynomial.polyval(zs[deg + 1:], fit)
    resid = np.abs(pred - H[deg + 1:])
    rel = float(resid.max() / max(1.0, np.abs(H).max()))
    return VerificationReport(f"nekrasov[{p.case}]", _params_dict(p), PASS if rel <= tol else FAIL, rel,
                              details={"degree": deg, "K": model.K, "R": model.R})


# -- suites ----------------------------------------------------------------------


def small_instances(theta) -> list[CaseParams]:
    """One rational instance per case with N, M <= 3."""
    F = Fraction
    th = as_theta(theta)
    return [
        CaseParams("I", theta=th, N=2, M=3, a=F(1, 2), b=F(1, 3)),
        CaseParams("II", theta=th, N=2, M=3, a=F(1, 2), b=F(2, 3)),
        CaseParams("III", theta=th, N=2, a=F(1, 3), t=F(1, 4)),
        CaseParams("IV", theta=th, N=2, M=2, a=F(1, 3), b=F(1, 2)),
        CaseParams("V", theta=th, N=2, a=F(1, 3), t=F(1, 4)),
        CaseParams("VI", theta=th, N=2, t1=F(1, 4), t2=F(1, 5)),
    ]


def pmf_instances(theta) -> list[tuple[CaseParams, Optional[int]]]:
    F = Fraction
    th = as_theta(theta)
    return [
        (CaseParams("I", theta=th, N=2, M=3, a=F(1, 2), b=F(1, 3)), 3),
        (CaseParams("I", theta=th, N=3, M=2, a=F(1, 2), b=F(1, 3)), 3),
        (CaseParams("II", theta=th, N=2, M=3, a=F(1, 2), b=F(2, 3)), None),
        (CaseParams("III", theta=th, N=2, a=F(1, 3), t=F(1, 2)), 4),
        (CaseParams("IV", theta=th, N=1, M=2, a=F(1, 3), b=F(1, 2), d=2), None),
        (CaseParams("V", theta=th, N=2, a=F(1, 3), t=F(1, 2), d=1), None),
        (CaseParams("VI", theta=th, N=1, t1=F(1, 2), t2=F(1, 3), d=2), None),
    ]


def run_suite(suite: str = "all", max_degree: int = 6, thetas=(Fraction(1, 2), 1, 2)) -> list[VerificationReport]:
    suites = {"jack", "normalization", "pmf", "moments", "nekrasov", "plancherel", "duality"}
    chosen = suites if suite == "all" else {suite}
    if not chosen <= suites:
        raise ValueError(f"unknown suite {suite!r}")
    out: list[VerificationReport] = []
    if "jack" in chosen:
        out.append(verify_specialization_products(max_degree, thetas))
        out.append(verify_orthogonality(min(max_degree, 7), thetas))
    for th in thetas:
        if "normalization" in chosen:
            out.extend(verify_normalization(p) for p in small_instances(th))
        if "pmf" in chosen:
            out.extend(verify_pmf_match(p, R) for p, R in pmf_instances(th))
        if "moments" in chosen:
            out.extend(verify_moment_identities(p) for p in small_instances(th))
        if "nekrasov" in chosen:
            out.extend(verify_nekrasov_polynomial(p, R) for p, R in pmf_instances(th))
        if "plancherel" in chosen:
            out.append(verify_jack_plancherel_identity(max_degree, th))
        if "duality" in chosen:
            out.append(verify_conjugation_duality(Fraction(1, 3), Fraction(1, 2), 2, 3, th))
            out.extend(verify_symmetry(p) for p in small_instances(th))
    return out
