"""Relative difference sets: verification, classical constructions, quotients."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .errors import (
    DomainError,
    DuplicateElements,
    EvenCharacteristic,
    NotASubgroupOfH,
    NotPrimePower,
    SchemaError,
    SizeLimit,
)
from .field import MAX_FIELD_SIZE, PrimePower, finite_field, is_prime_power
from .groups import (
    AbelianGroup,
    Element,
    Subgroup,
    autocorrelation,
    quotient_group,
)


@dataclass(frozen=True)
class RdsSpec:
    """A candidate ``H``-RDS: a subset of ``group`` avoiding ``forbidden`` differences."""

    group: AbelianGroup
    forbidden: Subgroup
    subset: tuple[Element, ...]

    def __post_init__(self):
        subset = tuple(self.group.element(d) for d in self.subset)
        if len(set(subset)) != len(subset):
            raise DuplicateElements("RDS subset has repeated elements")
        if self.forbidden.group != self.group:
            raise DomainError("forbidden subgroup lives in a different group")
        object.__setattr__(self, "subset", subset)

    @classmethod
    def build(cls, orders: Sequence[int], forbidden_generators: Sequence, subset: Sequence) -> RdsSpec:
        group = AbelianGroup(tuple(orders))
        return cls(group, group.subgroup(forbidden_generators), tuple(subset))

    def to_json(self) -> dict[str, Any]:
        return {
            "orders": list(self.group.orders),
            "forbidden_generators": [list(g) for g in self.forbidden.generators],
            "subset": [list(d) for d in self.subset],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> RdsSpec:
        try:
            orders = [int(n) for n in data["orders"]]
            gens = [_coords(g) for g in data["forbidden_generators"]]
            subset = [_coords(d) for d in data["subset"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad RDS spec JSON: {exc}") from exc
        return cls.build(orders, gens, subset)


def _coords(x) -> tuple[int, ...]:
    if isinstance(x, int):
        return (x,)
    return tuple(int(c) for c in x)


def load_rds(path) -> RdsSpec:
    with open(path, encoding="utf-8") as fh:
        return RdsSpec.from_json(json.load(fh))


@dataclass(frozen=True)
class RdsCertificate:
    N: int
    H: int
    D: int
    Lambda: int | None
    valid: bool
    violation: dict | None = field(default=None, compare=False)

    @property
    def params(self) -> tuple:
        return (self.N, self.H, self.D, self.Lambda)

    def to_json(self) -> dict[str, Any]:
        out = {"N": self.N, "H": self.H, "D": self.D, "Lambda": self.Lambda, "valid": self.valid}
        if self.violation is not None:
            out["violation"] = self.violation
        return out


def verify_rds(spec: RdsSpec) -> RdsCertificate:
    """Exact check of ``chi_D * chi_D~ = Lambda (chi_G - chi_H) + D delta_0``.

    Enumerates all ``D^2`` differences.  An invalid spec is reported with the
    first group element (lexicographic order) where the count is off.
    """
    group, H, subset = spec.group, spec.forbidden, spec.subset
    G, h, D = group.order, H.order, len(subset)
    if D < 1:
        raise DomainError("RDS subset must be nonempty")
    N = G // h
    if G == h:
        lam = Fraction(0)
    else:
        lam = Fraction(D * (D - 1), G - h)
    counts = autocorrelation(group, subset)
    zero = group.identity
    violation = None
    if lam.denominator != 1:
        violation = {"reason": "non-integral Lambda", "Lambda": str(lam)}
    else:
        for g in group.elements():
            if g == zero:
                expected = D
            elif g in H:
                expected = 0
            else:
                expected = lam.numerator
            if counts.get(g, 0) != expected:
                violation = {"element": list(g), "observed": counts.get(g, 0), "expected": expected}
                break
    Lambda = lam.numerator if lam.denominator == 1 else None
    cert = RdsCertificate(N, h, D, Lambda, violation is None, violation)
    if cert.valid:
        assert cert.Lambda * (G - h) == D * (D - 1)
    return cert


def quadratic_rds(Q: int) -> RdsSpec:
    """``{(x, x^2)}`` in ``F_Q x F_Q`` relative to ``{0} x F_Q``; an RDS(Q, Q, Q, 1) for odd Q.

    Coordinates: the first ``k`` entries are the coefficients of ``x``, the
    last ``k`` those of ``x^2`` (group ``Z_p^{2k}``).
    """
    pp = is_prime_power(Q)
    if pp is None:
        raise NotPrimePower(f"{Q} is not a prime power")
    if pp.p == 2:
        raise EvenCharacteristic("the quadratic construction needs odd Q")
    F = finite_field(pp.p, pp.k)
    k = pp.k
    group = AbelianGroup((pp.p,) * (2 * k))
    H = group.subgroup([tuple(int(j == k + i) for j in range(2 * k)) for i in range(k)])
    subset = tuple(x.coeffs + (x * x).coeffs for x in F.elements())
    return RdsSpec(group, H, subset)


def singer_rds(Q: int | PrimePower, J: int) -> RdsSpec:
    """Trace-one hyperplane of ``GF(Q^J)`` over ``GF(Q)``, written in ``Z_{Q^J - 1}``.

    Yields an RDS((Q^J-1)/(Q-1), Q-1, Q^{J-1}, Q^{J-2}) with forbidden subgroup
    ``<(Q^J-1)/(Q-1)>`` (the exponents of ``GF(Q)^x``).
    """
    pp = Q if isinstance(Q, PrimePower) else is_prime_power(Q)
    if pp is None:
        raise NotPrimePower(f"{Q} is not a prime power")
    if J < 2:
        raise DomainError("singer_rds needs J >= 2")
    q = pp.q
    if q**J > MAX_FIELD_SIZE:
        raise SizeLimit(f"Q^J = {q**J} exceeds {MAX_FIELD_SIZE}")
    F = finite_field(pp.p, pp.k * J)
    n = q**J - 1
    traces = F.trace_of_powers(pp.k)
    subset = tuple((int(d),) for d in range(n) if traces[d] == 1)
    group = AbelianGroup.cyclic(n)
    H = group.subgroup([n // (q - 1)])
    assert len(subset) == q ** (J - 1)
    return RdsSpec(group, H, subset)


def quotient_rds(spec: RdsSpec, K: Subgroup) -> RdsSpec:
    """Image of ``spec`` in ``G / K``; an RDS(N, H/|K|, D, |K| Lambda) when ``K <= H``.

    The coordinate map is :meth:`etfforge.groups.GroupQuotient.image`.
    """
    if K.group != spec.group or not K.issubset(spec.forbidden):
        raise NotASubgroupOfH("K must be a subgroup of the forbidden subgroup")
    if K.order == 1:
        return spec
    quo = quotient_group(spec.group, K)
    image = tuple(quo.image(d) for d in spec.subset)
    if len(set(image)) != len(image):
        raise DomainError("subset meets a K-coset twice; is the spec a valid RDS?")
    H = quo.target.subgroup([quo.image(h) for h in spec.forbidden.generators])
    return RdsSpec(quo.target, H, image)
