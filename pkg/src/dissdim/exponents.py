"""Closed-form scaling exponents for dissipation-dimension lower bounds.

Every function here evaluates an explicit formula: the two-term energy
cylinder exponent for inviscid velocity fields, its three-term viscous
analogue, the isotropic space-time exponent for generic conservation laws,
the optimal time-anisotropy parameter, and the admissibility condition for
forced balances.

Extended reals: ``math.inf`` is a legal value for the integrability
exponents ``q`` and ``r``.  Each formula carries hand-written infinity
branches instead of relying on IEEE ``inf`` arithmetic, because the limiting
conventions differ between regimes and silent ``inf - inf`` propagation
would hide a wrong branch.  All arithmetic flows through the input number
types, so passing ``fractions.Fraction`` (or ints) yields exact rational
results while floats yield floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "RegimeError",
    "IntegrabilityClass",
    "ExponentReport",
    "euler_exponent",
    "euler_optimal",
    "euler_unbounded_pressure",
    "conservation_law_exponent",
    "navier_stokes_exponent",
    "case_numerology",
    "case1_optimal_r",
    "forcing_admissible",
    "CASE_UNIFORM_IN_TIME_LR",
    "CASE_BESOV_13",
    "CASE_SOBOLEV_BETA",
]

CASE_UNIFORM_IN_TIME_LR = "uniform_in_time_Lr"
CASE_BESOV_13 = "besov_13"
CASE_SOBOLEV_BETA = "sobolev_beta"

_REL_TOL = 1e-12


class RegimeError(ValueError):
    """Input rejected by a regime's validity conditions."""


def _is_inf(x) -> bool:
    return x == math.inf


def _check_finite_or_inf(name, x):
    if x == -math.inf or (isinstance(x, float) and math.isnan(x)):
        raise RegimeError(f"{name} must be a real number or +inf, got {x!r}")


@dataclass(frozen=True)
class IntegrabilityClass:
    """Integrability of a velocity field: time exponent q, space exponent r.

    ``d`` is the spatial dimension.  For the velocity regimes both
    exponents live in [3, inf]; validation happens here so the formula
    functions can assume a legal class.
    """

    d: int
    q: object = math.inf
    r: object = math.inf

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise RegimeError(f"spatial dimension d must be an integer >= 1, got {self.d!r}")
        for name, value in (("q", self.q), ("r", self.r)):
            _check_finite_or_inf(name, value)
            if value < 3:
                raise RegimeError(f"{name} must satisfy 3 <= {name} <= inf, got {value!r}")


@dataclass(frozen=True)
class ExponentReport:
    """A (s, alpha) pair plus the candidate terms whose minimum defines s."""

    s: object
    alpha: object
    terms: tuple
    regime: str
    convention_applied: str
    d: int
    q: object = None
    r: object = None
    vacuous: bool = field(default=False)
    open_exponent: bool = False
    endpoint_limit: bool = False

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime,
            "d": self.d,
            "q": _json_number(self.q),
            "r": _json_number(self.r),
            "alpha": _json_number(self.alpha),
            "s": _json_number(self.s),
            "terms": [{"label": lab, "value": _json_number(val)} for lab, val in self.terms],
            "convention_applied": self.convention_applied,
            "vacuous": self.vacuous,
            "open_exponent": self.open_exponent,
            "endpoint_limit": self.endpoint_limit,
        }


def _json_number(x):
    if x is None:
        return None
    if _is_inf(x):
        return "inf"
    return float(x)


def _report(terms, alpha, regime, convention, cls=None, d=None, q=None, r=None, **flags):
    s = min(val for _, val in terms)
    if cls is not None:
        d, q, r = cls.d, cls.q, cls.r
    return ExponentReport(
        s=s,
        alpha=alpha,
        terms=tuple(terms),
        regime=regime,
        convention_applied=convention,
        d=d,
        q=q,
        r=r,
        vacuous=bool(s < 0),
        **flags,
    )


def _check_alpha(alpha):
    if not alpha > 0:
        raise RegimeError(f"alpha must be positive, got {alpha!r}")


# ---------------------------------------------------------------------------
# Inviscid (Euler-type) regime: two-term minimum.
# ---------------------------------------------------------------------------

def _euler_terms(d, q, r, alpha):
    """The two cylinder-estimate exponents with their infinity conventions.

    Term one comes from the time-cutoff derivative, term two from the
    spatial-cutoff derivative against the cubic transport flux.
    """
    if _is_inf(r) and _is_inf(q):
        t1 = d
        t2 = d - 1 + alpha
        conv = "q=inf,r=inf"
    elif _is_inf(r):
        t1 = d - alpha * 2 / q
        t2 = d - 1 + alpha * (q - 3) / q
        conv = "r=inf"
    elif _is_inf(q):
        t1 = d * (r - 2) / r
        t2 = d * (r - 3) / r - 1 + alpha
        conv = "q=inf"
    else:
        t1 = d * (r - 2) / r - alpha * 2 / q
        t2 = d * (r - 3) / r - 1 + alpha * (q - 3) / q
        conv = "finite"
    return [("time_cutoff", t1), ("transport_flux", t2)], conv


def euler_exponent(cls: IntegrabilityClass, alpha) -> ExponentReport:
    """Dimension exponent s = min of the two inviscid cylinder terms.

    s = min( d(r-2)/r - alpha*2/q,  d(r-3)/r - 1 + alpha*(q-3)/q )
    with the r=inf / q=inf conventions applied branch by branch.
    A negative minimum sets the ``vacuous`` flag rather than erroring.
    """
    _check_alpha(alpha)
    terms, conv = _euler_terms(cls.d, cls.q, cls.r, alpha)
    return _report(terms, alpha, "euler", conv, cls=cls)


def _alpha_opt(d, q, r):
    # q/(q-1) * (r+d)/r with the obvious limits; q >= 3 guarantees q > 1.
    qfac = 1 if _is_inf(q) else q / (q - 1)
    rfac = 1 if _is_inf(r) else (r + d) / r
    return qfac * rfac


def euler_optimal(cls: IntegrabilityClass) -> ExponentReport:
    """Balance the two inviscid terms: alpha = q/(q-1) * (r+d)/r.

    Returns s = d(r-2)/r - (2/(q-1)) (r+d)/r at that alpha, specialising to
    (s=d, alpha=1) for q = r = inf.  The two min-terms are asserted to agree
    (exactly for rational inputs, to relative 1e-12 for floats).
    """
    d, q, r = cls.d, cls.q, cls.r
    alpha = _alpha_opt(d, q, r)
    report = euler_exponent(cls, alpha)
    (_, t1), (_, t2) = report.terms
    if not _close(t1, t2):
        raise AssertionError(
            f"min-terms failed to balance at alpha_opt: {t1!r} vs {t2!r}"
        )
    return report


def _close(a, b, rel=_REL_TOL):
    if a == b:
        return True
    scale = max(abs(a), abs(b), 1)
    return abs(a - b) <= rel * scale


def euler_unbounded_pressure(cls: IntegrabilityClass) -> ExponentReport:
    """Exponent pair for r = inf without an integrability assumption on p.

    s = d - 2/(q-1) and alpha = q/(q-1); the conclusion then holds at every
    exponent strictly below s, which the ``open_exponent`` flag records.
    """
    if not _is_inf(cls.r):
        raise RegimeError(f"requires r = inf, got r = {cls.r!r}")
    if _is_inf(cls.q):
        raise RegimeError("requires a finite q; use euler_optimal for q = r = inf")
    alpha = cls.q / (cls.q - 1)
    terms, conv = _euler_terms(cls.d, cls.q, cls.r, alpha)
    return _report(terms, alpha, "euler", conv, cls=cls, open_exponent=True)


# ---------------------------------------------------------------------------
# Generic conservation laws: single isotropic space-time exponent.
# ---------------------------------------------------------------------------

def conservation_law_exponent(d: int, r) -> ExponentReport:
    """s = d+1 - r/(r-1) for an entropy pair integrable at exponent r.

    Isotropic (alpha = 1); s = d at r = inf and s = 0 at the lower endpoint
    r = (d+1)/d, below which the formula would go negative and is rejected.
    """
    if not isinstance(d, int) or d < 1:
        raise RegimeError(f"spatial dimension d must be an integer >= 1, got {d!r}")
    _check_finite_or_inf("r", r)
    if _is_inf(r):
        s = d
    else:
        if r * d < d + 1:
            raise RegimeError(f"r must satisfy r >= (d+1)/d, got r = {r!r} for d = {d}")
        s = d + 1 - r / (r - 1)
    return _report(
        [("space_time_divergence", s)], 1, "conservation_law", "r=inf" if _is_inf(r) else "finite",
        d=d, q=None, r=r,
    )


# ---------------------------------------------------------------------------
# Viscous (Navier-Stokes-type) regime: three-term minimum.
# ---------------------------------------------------------------------------

def _ns_terms(d, q, r, alpha):
    if _is_inf(r) and _is_inf(q):
        t1, t2, t3 = d, d - 1 + alpha, d - 2 + alpha
        conv = "q=inf,r=inf"
    elif _is_inf(r):
        t1 = d - alpha * 2 / q
        t2 = d - 1 + alpha * (q - 3) / q
        t3 = d - 2 + alpha * (q - 2) / q
        conv = "r=inf"
    elif _is_inf(q):
        t1 = d * (r - 2) / r
        t2 = -1 + d * (r - 3) / r + alpha
        t3 = -2 + d * (r - 2) / r + alpha
        conv = "q=inf"
    else:
        t1 = d * (r - 2) / r - alpha * 2 / q
        t2 = -1 + d * (r - 3) / r + alpha * (q - 3) / q
        t3 = -2 + d * (r - 2) / r + alpha * (q - 2) / q
        conv = "finite"
    return [("time_cutoff", t1), ("transport_flux", t2), ("laplacian", t3)], conv


def navier_stokes_exponent(cls: IntegrabilityClass, alpha) -> ExponentReport:
    """Three-term viscous cylinder exponent.

    s = min( d(r-2)/r - alpha*2/q,
             -1 + d(r-3)/r + alpha*(q-3)/q,
             -2 + d(r-2)/r + alpha*(q-2)/q )
    with infinity conventions per branch.  At alpha = 2 and finite q, r with
    2/q + d/r >= 1, the minimum collapses to the parabolic closed form
    s = d+1 - 3(d/r + 2/q); negative s is reported via ``vacuous``.
    """
    _check_alpha(alpha)
    terms, conv = _ns_terms(cls.d, cls.q, cls.r, alpha)
    return _report(terms, alpha, "navier_stokes", conv, cls=cls)


# ---------------------------------------------------------------------------
# Named physically relevant cases.
# ---------------------------------------------------------------------------

def case1_optimal_r(d: int):
    """The space exponent 3d/(d-1) at which the uniform-in-time case peaks."""
    if not isinstance(d, int) or d < 2:
        raise RegimeError(f"requires integer d >= 2, got {d!r}")
    from fractions import Fraction

    return Fraction(3 * d, d - 1)


def case_numerology(d: int, case: str, param=None) -> ExponentReport:
    """Exponent pairs for three named integrability scenarios.

    ``uniform_in_time_Lr``: bounded-in-time L^r velocity with
        r in [3, 3d/(d-1)]; alpha = 1 + d/r, s = d - 2d/r.  At the optimal
        r = 3d/(d-1) both equal (2+d)/3.
    ``besov_13``: the endpoint one-third-Besov class; the same optimal pair
        (2+d)/3 holds in the limit, flagged via ``endpoint_limit`` since the
        endpoint itself is reached only through exponents r < 3d/(d-1).
    ``sobolev_beta``: bounded-in-time H^beta velocity with
        beta in (d/6, 5/6), d < 5; alpha = 1 + (d-2*beta)/2, s = 2*beta.
    """
    if not isinstance(d, int) or d < 2:
        raise RegimeError(f"case numerology requires integer d >= 2, got {d!r}")

    if case == CASE_UNIFORM_IN_TIME_LR:
        r = param
        if r is None:
            raise RegimeError("uniform_in_time_Lr requires the space exponent r as param")
        _check_finite_or_inf("r", r)
        r_top = case1_optimal_r(d)
        if not (3 <= r <= r_top):
            raise RegimeError(f"r must lie in [3, 3d/(d-1)] = [3, {r_top}], got {r!r}")
        return euler_optimal(IntegrabilityClass(d, math.inf, r))

    if case == CASE_BESOV_13:
        base = euler_optimal(IntegrabilityClass(d, math.inf, case1_optimal_r(d)))
        return ExponentReport(
            s=base.s, alpha=base.alpha, terms=base.terms, regime=base.regime,
            convention_applied=base.convention_applied, d=base.d, q=base.q, r=base.r,
            vacuous=base.vacuous, endpoint_limit=True,
        )

    if case == CASE_SOBOLEV_BETA:
        beta = param
        if beta is None:
            raise RegimeError("sobolev_beta requires the smoothness beta as param")
        if d >= 5:
            raise RegimeError(f"sobolev_beta requires d < 5, got d = {d}")
        # lower endpoint included (it is exactly the space exponent r = 3);
        # the upper endpoint is excluded (no dissipation survives there)
        lo, hi = _frac(d, 6), _frac(5, 6)
        if not (lo <= beta < hi):
            raise RegimeError(f"beta must lie in [d/6, 5/6), got {beta!r}")
        r = 2 * d / (d - 2 * beta)
        return euler_optimal(IntegrabilityClass(d, math.inf, r))

    raise RegimeError(f"unknown case {case!r}")


def _frac(a, b):
    from fractions import Fraction

    return Fraction(a, b)


# ---------------------------------------------------------------------------
# Forcing admissibility.
# ---------------------------------------------------------------------------

def forcing_admissible(d: int, alpha, s, m, l) -> bool:
    """Whether a force with power density in L^m_t L^l_x preserves exponent s.

    True iff d*(l-1)/l + alpha*(m-1)/m >= s, with (x-1)/x -> 1 as x -> inf.
    """
    if not isinstance(d, int) or d < 1:
        raise RegimeError(f"spatial dimension d must be an integer >= 1, got {d!r}")
    _check_alpha(alpha)
    for name, value in (("m", m), ("l", l)):
        _check_finite_or_inf(name, value)
        if value < 1:
            raise RegimeError(f"{name} must satisfy {name} >= 1, got {value!r}")
    lfac = 1 if _is_inf(l) else (l - 1) / l
    mfac = 1 if _is_inf(m) else (m - 1) / m
    return d * lfac + alpha * mfac >= s
