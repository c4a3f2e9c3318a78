"""Differential operators of order <= 2 with symbolic coefficients.

An operator is a map multi-index -> Expr over an ordered variable tuple;
free variables of coefficients beyond the declared ones (J, E, ...) are
parameters bound at sampling time.  Composition is Leibniz-exact, the
commutator of first-order operators is again first-order (the second-order
parts cancel identically and this is asserted), and operator equality is
decided by a symbolic-zero fast path with seeded numeric sampling as the
fallback.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import expr as ex
from .expr import Expr, ZERO, simplify


class UnsupportedOrderError(ValueError):
    pass


class InconclusiveComparisonError(RuntimeError):
    pass


def _multi_indices(nvars, max_order=2):
    out = []
    for total in range(max_order + 1):
        def rec(prefix, remaining, slots):
            if slots == 0:
                if remaining == 0:
                    out.append(tuple(prefix))
                return
            for k in range(remaining + 1):
                rec(prefix + [k], remaining - k, slots - 1)
        rec([], total, nvars)
    return out


@dataclass(frozen=True)
class DiffOp:
    variables: tuple
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        nv = len(self.variables)
        for idx, coeff in self.coefficients.items():
            idx = tuple(int(k) for k in idx)
            if len(idx) != nv or any(k < 0 for k in idx):
                raise ValueError(f"bad multi-index {idx} for variables {self.variables}")
            if sum(idx) > 2:
                raise UnsupportedOrderError("operators are capped at order 2")
            c = simplify(ex.as_expr(coeff))
            if c != ZERO:
                cleaned[idx] = c
        object.__setattr__(self, "coefficients", cleaned)

    @property
    def order(self):
        return max((sum(idx) for idx in self.coefficients), default=0)

    def coeff(self, idx):
        return self.coefficients.get(tuple(idx), ZERO)

    def is_zero(self):
        return not self.coefficients

    def is_multiplication(self):
        return all(sum(idx) == 0 for idx in self.coefficients)

    def __add__(self, other):
        if self.variables != other.variables:
            raise ValueError("operator variable sets differ")
        out = dict(self.coefficients)
        for idx, c in other.coefficients.items():
            out[idx] = ex.Sum((out.get(idx, ZERO), c))
        return DiffOp(self.variables, out)

    def __sub__(self, other):
        return self + other.scale(ex.const(-1))

    def scale(self, factor):
        f = ex.as_expr(factor)
        return DiffOp(
            self.variables,
            {idx: ex.Product((f, c)) for idx, c in self.coefficients.items()},
        )

    def __repr__(self):
        if not self.coefficients:
            return "<diffop 0>"
        bits = []
        for idx in sorted(self.coefficients):
            c = self.coefficients[idx]
            ds = "".join(
                f"d{v}" * k for v, k in zip(self.variables, idx)
            )
            bits.append(f"({ex.to_text(c)}){'*' + ds if ds else ''}")
        return "<diffop " + " + ".join(bits) + ">"

    @staticmethod
    def zero(variables):
        return DiffOp(tuple(variables), {})

    @staticmethod
    def scalar(variables, value):
        nv = len(tuple(variables))
        return DiffOp(tuple(variables), {(0,) * nv: ex.as_expr(value)})

    @staticmethod
    def partial(variables, var, coeff=1):
        variables = tuple(variables)
        idx = [0] * len(variables)
        idx[variables.index(var)] = 1
        return DiffOp(variables, {tuple(idx): ex.as_expr(coeff)})


def _partial(e, variables, idx):
    out = e
    for v, k in zip(variables, idx):
        for _ in range(k):
            out = ex.differentiate(out, v)
    return out


def apply(op: DiffOp, e: Expr) -> Expr:
    """Apply the operator to an expression; result is in normal form."""
    e = ex.as_expr(e)
    terms = [
        ex.Product((c, _partial(e, op.variables, idx)))
        for idx, c in op.coefficients.items()
    ]
    return simplify(ex.Sum(tuple(terms))) if terms else ZERO


def _binom_prod(alpha, gamma):
    n = 1
    for a, g in zip(alpha, gamma):
        n *= math.comb(a, g)
    return n


def _sub_indices(alpha):
    ranges = [range(a + 1) for a in alpha]
    out = [()]
    for r in ranges:
        out = [p + (k,) for p in out for k in r]
    return out


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """Operator product a . b, Leibniz-exact.

    apply(compose(a, b), e) == apply(a, apply(b, e)) for every e; requires
    order(a) + order(b) <= 2 so the result stays representable.
    """
    if a.variables != b.variables:
        raise ValueError("operator variable sets differ")
    if a.order + b.order > 2:
        raise UnsupportedOrderError(
            f"composition would have order {a.order + b.order} > 2"
        )
    variables = a.variables
    acc = {}
    for alpha, ca in a.coefficients.items():
        for beta, cb in b.coefficients.items():
            for gamma in _sub_indices(alpha):
                coeff = _binom_prod(alpha, gamma)
                dcb = _partial(cb, variables, gamma)
                if dcb == ZERO:
                    continue
                target = tuple(
                    al - g + be for al, g, be in zip(alpha, gamma, beta)
                )
                term = ex.Product((ex.const(coeff), ca, dcb))
                acc[target] = ex.Sum((acc.get(target, ZERO), term))
    return DiffOp(variables, acc)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    """[a, b] for operators of order <= 1; the result has order <= 1."""
    if a.order > 1 or b.order > 1:
        raise UnsupportedOrderError("commutator is defined for order <= 1 operators")
    out = compose(a, b) - compose(b, a)
    bad = [idx for idx in out.coefficients if sum(idx) > 1]
    assert not bad, f"second-order residue in a first-order commutator: {bad}"
    return out


@dataclass(frozen=True)
class SampleSpec:
    """Seeded sampling box for numeric operator comparison.

    ranges maps variable/parameter names to either a 2-tuple (lo, hi) drawn
    uniformly, or a list of discrete choices (e.g. the two orbit labels).
    Declared operator variables and all coefficient parameters must be
    covered.
    """

    ranges: dict
    n: int = 50
    seed: int = 0xC0FFEE

    def draw(self):
        rng = random.Random(self.seed)
        for _ in range(self.n):
            point = {}
            for name, spec in self.ranges.items():
                if isinstance(spec, tuple) and len(spec) == 2 and all(
                    isinstance(v, (int, float)) for v in spec
                ):
                    lo, hi = spec
                    point[name] = rng.uniform(lo, hi)
                else:
                    point[name] = rng.choice(list(spec))
            yield point


@dataclass(frozen=True)
class OpComparison:
    equal: bool
    max_deviation: float
    symbolic: bool
    samples_used: int
    skipped_samples: int


def op_equal(a: DiffOp, b: DiffOp, sample_spec: SampleSpec | None = None,
             tol: float = 1e-12) -> OpComparison:
    """Decide a == b, symbolically when possible, else by seeded sampling.

    The deviation is max |a-b| over coefficients and samples, relative to
    max(1, largest coefficient magnitude seen on either side).
    """
    if a.variables != b.variables:
        raise ValueError("operator variable sets differ")
    diff = a - b
    if diff.is_zero():
        return OpComparison(True, 0.0, True, 0, 0)
    if sample_spec is None:
        raise InconclusiveComparisonError(
            "operators differ symbolically and no sample spec was given"
        )
    names = set()
    for op in (a, b, diff):
        for c in op.coefficients.values():
            names |= ex.free_vars(c)
    missing = names - set(sample_spec.ranges)
    if missing:
        raise ValueError(f"sample spec misses variables {sorted(missing)}")

    indices = sorted(set(a.coefficients) | set(b.coefficients) | set(diff.coefficients))
    arg_names = sorted(names)
    compiled = []
    for idx in indices:
        compiled.append((
            ex.compile_expr(a.coeff(idx), arg_names),
            ex.compile_expr(b.coeff(idx), arg_names),
        ))
    max_dev = 0.0
    scale = 1.0
    used = 0
    skipped = 0
    for point in sample_spec.draw():
        args = [point[n] for n in arg_names]
        try:
            for fa, fb in compiled:
                va = fa(*args)
                vb = fb(*args)
                scale = max(scale, abs(va), abs(vb))
                max_dev = max(max_dev, abs(va - vb))
            used += 1
        except ex.DomainError:
            skipped += 1
    if used == 0:
        raise InconclusiveComparisonError("all samples hit evaluation domain errors")
    rel = max_dev / scale
    return OpComparison(rel <= tol, rel, False, used, skipped)
