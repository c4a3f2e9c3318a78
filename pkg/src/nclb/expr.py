"""Small immutable symbolic expression kernel.

Nodes: rational constants, the imaginary unit, variables, sums, products,
powers with constant exponents, exp, log, and the four Airy kinds.  The
kernel provides exact differentiation, an expand-and-collect normal form
(`simplify`), complex double-precision evaluation, compilation to fast
Python closures, and a parse/print pair for a plain infix syntax.

The normal form is a sum of monomials: rational coefficient times sorted
factors, with same-base powers merged by exponent arithmetic, exponential
factors merged by argument addition, and powers of the imaginary unit folded
mod 4.  It is idempotent and strong enough to cancel every operator identity
the rest of the library relies on symbolically.
"""

from __future__ import annotations

import cmath
import functools
from dataclasses import dataclass
from fractions import Fraction

from .airyfun import airy as _airy_numeric


class ExprError(Exception):
    pass


class MissingVariableError(ExprError):
    pass


class DomainError(ExprError):
    pass


class ExprSyntaxError(ExprError):
    pass


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(Fraction(-1)), as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Product((Const(Fraction(-1)), self))))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Product((self, Power(as_expr(other), Const(Fraction(-1)))))

    def __rtruediv__(self, other):
        return Product((as_expr(other), Power(self, Const(Fraction(-1)))))

    def __neg__(self):
        return Product((Const(Fraction(-1)), self))

    def __pow__(self, other):
        return Power(self, as_expr(other))

    def __repr__(self):
        return f"<expr {to_text(self)}>"


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))


@dataclass(frozen=True, repr=False)
class ImagUnit(Expr):
    pass


I = ImagUnit()


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str


@dataclass(frozen=True, repr=False)
class Sum(Expr):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(as_expr(t) for t in self.terms))


@dataclass(frozen=True, repr=False)
class Product(Expr):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(as_expr(f) for f in self.factors))


@dataclass(frozen=True, repr=False)
class Power(Expr):
    base: Expr
    exponent: Expr

    def __post_init__(self):
        object.__setattr__(self, "base", as_expr(self.base))
        object.__setattr__(self, "exponent", as_expr(self.exponent))
        if free_vars(self.exponent):
            raise ValueError("power exponents must be constant expressions")


@dataclass(frozen=True, repr=False)
class Exp(Expr):
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "arg", as_expr(self.arg))


@dataclass(frozen=True, repr=False)
class Log(Expr):
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "arg", as_expr(self.arg))


AIRY_KINDS = ("Ai", "AiPrime", "Bi", "BiPrime")


@dataclass(frozen=True, repr=False)
class Airy(Expr):
    kind: str
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "arg", as_expr(self.arg))
        if self.kind not in AIRY_KINDS:
            raise ValueError(f"unknown Airy kind {self.kind!r}")


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot treat {type(x).__name__} as an expression (floats "
                    "are not exact; use Fraction)")


def const(p, q=1) -> Const:
    return Const(Fraction(p, q))


def free_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Sum):
        out = frozenset()
        for t in e.terms:
            out |= free_vars(t)
        return out
    if isinstance(e, Product):
        out = frozenset()
        for f in e.factors:
            out |= free_vars(f)
        return out
    if isinstance(e, Power):
        return free_vars(e.base) | free_vars(e.exponent)
    if isinstance(e, (Exp, Log, Airy)):
        return free_vars(e.arg)
    return frozenset()


# --- canonical ordering -----------------------------------------------------

def _sort_key(e):
    if isinstance(e, Const):
        return (0, e.value.numerator, e.value.denominator)
    if isinstance(e, ImagUnit):
        return (1,)
    if isinstance(e, Var):
        return (2, e.name)
    if isinstance(e, Power):
        return (3, _sort_key(e.base), _sort_key(e.exponent))
    if isinstance(e, Exp):
        return (4, _sort_key(e.arg))
    if isinstance(e, Log):
        return (5, _sort_key(e.arg))
    if isinstance(e, Airy):
        return (6, e.kind, _sort_key(e.arg))
    if isinstance(e, Sum):
        return (7, tuple(_sort_key(t) for t in e.terms))
    if isinstance(e, Product):
        return (8, tuple(_sort_key(f) for f in e.factors))
    raise TypeError(f"not an expression: {e!r}")


def _factor_key(f):
    if f[0] == "i":
        return (0,)
    if f[0] == "exp":
        return (1, _sort_key(f[1]))
    return (2, _sort_key(f[1]), _sort_key(f[2]))


# --- normal form ------------------------------------------------------------
# NF is a dict {monomial: Fraction}; a monomial is a sorted tuple of factors
# ("i",), ("exp", arg) or ("pow", base, exponent) with canonical sub-exprs.

def _nf_const(c):
    return {(): c} if c != 0 else {}


def _nf_add(a, b):
    out = dict(a)
    for mono, coeff in b.items():
        acc = out.get(mono, Fraction(0)) + coeff
        if acc == 0:
            out.pop(mono, None)
        else:
            out[mono] = acc
    return out


def _merge_monomials(m1, m2):
    """Combine two factor tuples; returns (coeff_multiplier, monomial)."""
    mult = Fraction(1)
    i_count = 0
    exp_args = []
    pows = {}  # base expr -> list of exponent exprs
    order = []  # first-seen bases, for stable grouping
    for f in m1 + m2:
        if f[0] == "i":
            i_count += 1
        elif f[0] == "exp":
            exp_args.append(f[1])
        else:
            _, base, ex = f
            if base not in pows:
                pows[base] = []
                order.append(base)
            pows[base].append(ex)
    i_count %= 4
    if i_count == 2:
        mult = -mult
        i_count = 0
    elif i_count == 3:
        mult = -mult
        i_count = 1
    factors = []
    if i_count:
        factors.append(("i",))
    if exp_args:
        total = simplify(Sum(tuple(exp_args))) if len(exp_args) > 1 else exp_args[0]
        if total != ZERO:
            factors.append(("exp", total))
    for base in order:
        exps = pows[base]
        ex = simplify(Sum(tuple(exps))) if len(exps) > 1 else exps[0]
        if ex == ZERO:
            continue
        if (isinstance(base, Const) and isinstance(ex, Const)
                and ex.value.denominator == 1
                and not (base.value == 0 and ex.value < 0)):
            mult *= base.value ** int(ex.value)
            continue
        factors.append(("pow", base, ex))
    factors.sort(key=_factor_key)
    return mult, tuple(factors)


def _nf_mul(a, b):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mult, mono = _merge_monomials(m1, m2)
            acc = out.get(mono, Fraction(0)) + c1 * c2 * mult
            if acc == 0:
                out.pop(mono, None)
            else:
                out[mono] = acc
    return out


def _nf_pow_int(a, n):
    out = _nf_const(Fraction(1))
    for _ in range(n):
        out = _nf_mul(out, a)
    return out


def _atom_nf(factor):
    return {(factor,): Fraction(1)}


def _norm(e):
    if isinstance(e, Const):
        return _nf_const(e.value)
    if isinstance(e, ImagUnit):
        return _atom_nf(("i",))
    if isinstance(e, Var):
        return _atom_nf(("pow", e, ONE))
    if isinstance(e, Sum):
        out = {}
        for t in e.terms:
            out = _nf_add(out, _norm(t))
        return out
    if isinstance(e, Product):
        out = _nf_const(Fraction(1))
        for f in e.factors:
            out = _nf_mul(out, _norm(f))
        return out
    if isinstance(e, Exp):
        na = simplify(e.arg)
        if na == ZERO:
            return _nf_const(Fraction(1))
        return _atom_nf(("exp", na))
    if isinstance(e, Log):
        na = simplify(e.arg)
        if na == ONE:
            return {}
        return _atom_nf(("pow", Log(na), ONE))
    if isinstance(e, Airy):
        return _atom_nf(("pow", Airy(e.kind, simplify(e.arg)), ONE))
    if isinstance(e, Power):
        return _norm_power(e)
    raise TypeError(f"not an expression: {e!r}")


def _norm_power(e):
    nb = simplify(e.base)
    ne = simplify(e.exponent)
    if ne == ZERO:
        return _nf_const(Fraction(1))
    if ne == ONE:
        return _norm(nb)
    int_exp = isinstance(ne, Const) and ne.value.denominator == 1
    if isinstance(nb, Const):
        if int_exp:
            n = int(ne.value)
            if nb.value == 0 and n < 0:
                # ill-defined; stays atomic and evaluation reports it
                return _atom_nf(("pow", nb, ne))
            return _nf_const(nb.value ** n)
        if nb.value == 1:
            return _nf_const(Fraction(1))
        return _atom_nf(("pow", nb, ne))
    if isinstance(nb, ImagUnit) and int_exp:
        k = int(ne.value) % 4
        table = {0: _nf_const(Fraction(1)), 1: _atom_nf(("i",)),
                 2: _nf_const(Fraction(-1)), 3: _nf_mul(_nf_const(Fraction(-1)), _atom_nf(("i",)))}
        return table[k]
    if isinstance(nb, Power):
        inner = nb.exponent
        if int_exp and isinstance(inner, Const) and inner.value.denominator == 1:
            merged = Const(inner.value * ne.value)
            return _norm(Power(nb.base, merged))
        return _atom_nf(("pow", nb, ne))
    if isinstance(nb, Product) and int_exp:
        out = _nf_const(Fraction(1))
        for f in nb.factors:
            out = _nf_mul(out, _norm(Power(f, ne)))
        return out
    if isinstance(nb, Sum) and int_exp:
        n = int(ne.value)
        if 2 <= n <= 4:
            return _nf_pow_int(_norm(nb), n)
        return _atom_nf(("pow", nb, ne))
    return _atom_nf(("pow", nb, ne))


def _emit_factor(f):
    if f[0] == "i":
        return I
    if f[0] == "exp":
        return Exp(f[1])
    _, base, ex = f
    if ex == ONE:
        return base
    return Power(base, ex)


def _emit(nf):
    if not nf:
        return ZERO
    terms = []
    for mono in sorted(nf, key=lambda m: tuple(_factor_key(f) for f in m)):
        coeff = nf[mono]
        factors = [_emit_factor(f) for f in mono]
        parts = []
        if coeff != 1 or not factors:
            parts.append(Const(coeff))
        parts.extend(factors)
        terms.append(parts[0] if len(parts) == 1 else Product(tuple(parts)))
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


@functools.lru_cache(maxsize=None)
def simplify(e: Expr) -> Expr:
    """Expand-and-collect normal form; idempotent and semantics-preserving."""
    return _emit(_norm(e))


def is_zero(e: Expr) -> bool:
    return simplify(e) == ZERO


# --- differentiation --------------------------------------------------------

_AIRY_DERIV = {"Ai": "AiPrime", "Bi": "BiPrime"}


def _diff(e, var):
    if isinstance(e, (Const, ImagUnit)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Sum):
        return Sum(tuple(_diff(t, var) for t in e.terms))
    if isinstance(e, Product):
        terms = []
        fs = e.factors
        for i in range(len(fs)):
            terms.append(Product(fs[:i] + (_diff(fs[i], var),) + fs[i + 1:]))
        return Sum(tuple(terms))
    if isinstance(e, Power):
        # exponent is constant, so only the base varies
        c = e.exponent
        return Product((c, Power(e.base, Sum((c, Const(Fraction(-1))))), _diff(e.base, var)))
    if isinstance(e, Exp):
        return Product((_diff(e.arg, var), e))
    if isinstance(e, Log):
        return Product((_diff(e.arg, var), Power(e.arg, Const(Fraction(-1)))))
    if isinstance(e, Airy):
        du = _diff(e.arg, var)
        if e.kind in _AIRY_DERIV:
            return Product((du, Airy(_AIRY_DERIV[e.kind], e.arg)))
        base = "Ai" if e.kind == "AiPrime" else "Bi"
        return Product((du, e.arg, Airy(base, e.arg)))
    raise TypeError(f"not an expression: {e!r}")


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative, returned in normal form."""
    return simplify(_diff(e, var))


# --- substitution -----------------------------------------------------------

def subst(e: Expr, mapping) -> Expr:
    """Replace variables by expressions; result is simplified."""

    def rec(x):
        if isinstance(x, Var):
            return as_expr(mapping.get(x.name, x))
        if isinstance(x, Sum):
            return Sum(tuple(rec(t) for t in x.terms))
        if isinstance(x, Product):
            return Product(tuple(rec(f) for f in x.factors))
        if isinstance(x, Power):
            return Power(rec(x.base), x.exponent)
        if isinstance(x, Exp):
            return Exp(rec(x.arg))
        if isinstance(x, Log):
            return Log(rec(x.arg))
        if isinstance(x, Airy):
            return Airy(x.kind, rec(x.arg))
        return x

    return simplify(rec(e))


# --- evaluation -------------------------------------------------------------

_REAL_TOL = 1e-10


def _require_real(z, what):
    if abs(z.imag) > _REAL_TOL * (1.0 + abs(z.real)):
        raise DomainError(f"{what} requires a real argument, got {z!r}")
    return z.real


def _eval_power(base, exp_val):
    if exp_val.imag == 0.0 and exp_val.real == int(exp_val.real):
        n = int(exp_val.real)
        if base == 0 and n < 0:
            raise DomainError("zero to a negative power")
        return base ** n
    if abs(base.imag) > _REAL_TOL * (1.0 + abs(base.real)) or base.real <= 0.0:
        raise DomainError(
            f"fractional power needs a positive real base, got {base!r}"
        )
    return cmath.exp(exp_val * cmath.log(base))


def evaluate(e: Expr, assignment=None) -> complex:
    """Evaluate to a complex double; raises on missing variables or branch
    violations (log and fractional powers need positive real arguments)."""
    a = assignment or {}

    def rec(x):
        if isinstance(x, Const):
            return complex(x.value)
        if isinstance(x, ImagUnit):
            return 1j
        if isinstance(x, Var):
            try:
                return complex(a[x.name])
            except KeyError:
                raise MissingVariableError(f"no value for variable {x.name!r}") from None
        if isinstance(x, Sum):
            return sum((rec(t) for t in x.terms), 0j)
        if isinstance(x, Product):
            out = 1 + 0j
            for f in x.factors:
                out *= rec(f)
            return out
        if isinstance(x, Power):
            return _eval_power(rec(x.base), evaluate_const(x.exponent))
        if isinstance(x, Exp):
            return cmath.exp(rec(x.arg))
        if isinstance(x, Log):
            z = rec(x.arg)
            if z.real <= 0.0:
                raise DomainError(f"log requires positive real part, got {z!r}")
            return cmath.log(z)
        if isinstance(x, Airy):
            z = _require_real(rec(x.arg), "Airy")
            return complex(_airy_numeric(x.kind, z))
        raise TypeError(f"not an expression: {x!r}")

    val = rec(e)
    if not (cmath.isfinite(val)):
        raise DomainError(f"evaluation produced a non-finite value: {val!r}")
    return val


@functools.lru_cache(maxsize=None)
def evaluate_const(e: Expr) -> complex:
    if free_vars(e):
        raise MissingVariableError("expression is not constant")
    return evaluate(e, {})


# --- compilation ------------------------------------------------------------

def _cexp(z):
    return cmath.exp(z)


def _clog(z):
    z = complex(z)
    if z.real <= 0.0:
        raise DomainError(f"log requires positive real part, got {z!r}")
    return cmath.log(z)


def _cairy(kind, z):
    z = complex(z)
    return complex(_airy_numeric(kind, _require_real(z, "Airy")))


def _cpow(base, exp_val):
    return _eval_power(complex(base), exp_val)


def _cipow(base, n):
    base = complex(base)
    if base == 0 and n < 0:
        raise DomainError("zero to a negative power")
    return base ** n


def compile_expr(e: Expr, varnames):
    """Compile to a Python closure f(*values) -> complex.

    Much faster than tree-walking for inner loops (flows, sampling).  The
    closure enforces the same branch restrictions as `evaluate`.
    """
    names = {}
    for i, v in enumerate(varnames):
        names[v] = f"_a{i}"

    def gen(x):
        if isinstance(x, Const):
            return f"({float(x.value)!r}+0j)"
        if isinstance(x, ImagUnit):
            return "1j"
        if isinstance(x, Var):
            if x.name not in names:
                raise MissingVariableError(
                    f"free variable {x.name!r} not among compile arguments {list(varnames)}"
                )
            return names[x.name]
        if isinstance(x, Sum):
            return "(" + "+".join(gen(t) for t in x.terms) + ")"
        if isinstance(x, Product):
            return "(" + "*".join(gen(f) for f in x.factors) + ")"
        if isinstance(x, Power):
            ev = evaluate_const(x.exponent)
            if ev.imag == 0.0 and ev.real == int(ev.real):
                return f"_cipow({gen(x.base)}, {int(ev.real)})"
            return f"_cpow({gen(x.base)}, {ev!r})"
        if isinstance(x, Exp):
            return f"_cexp({gen(x.arg)})"
        if isinstance(x, Log):
            return f"_clog({gen(x.arg)})"
        if isinstance(x, Airy):
            return f"_cairy({x.kind!r}, {gen(x.arg)})"
        raise TypeError(f"not an expression: {x!r}")

    args = ", ".join(names[v] for v in varnames)
    src = f"def _f({args}):\n    return {gen(simplify(e))}\n"
    ns = {"_cexp": _cexp, "_clog": _clog, "_cairy": _cairy,
          "_cpow": _cpow, "_cipow": _cipow}
    exec(src, ns)  # noqa: S102 - source is generated from the tree above
    return ns["_f"]


# --- printing ---------------------------------------------------------------

_AIRY_NAMES = {"Ai": "Ai", "AiPrime": "Ai'", "Bi": "Bi", "BiPrime": "Bi'"}


def _print_atom(e):
    """Printable without parens in any context."""
    return isinstance(e, (Var, ImagUnit, Exp, Log, Airy)) or (
        isinstance(e, Const) and e.value.denominator == 1 and e.value >= 0
    )


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, ImagUnit):
        return "I"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_text(e.arg)})"
    if isinstance(e, Airy):
        return f"{_AIRY_NAMES[e.kind]}({to_text(e.arg)})"
    if isinstance(e, Power):
        b = to_text(e.base) if _print_atom(e.base) else f"({to_text(e.base)})"
        x = e.exponent
        if isinstance(x, Const) and x.value.denominator == 1 and x.value >= 0:
            return f"{b}^{to_text(x)}"
        return f"{b}^({to_text(x)})"
    if isinstance(e, Product):
        parts = []
        for f in e.factors:
            t = to_text(f)
            if isinstance(f, Sum) or (isinstance(f, Const) and (f.value < 0 or f.value.denominator != 1)):
                t = f"({t})"
            parts.append(t)
        return "*".join(parts) if parts else "1"
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        out = to_text(e.terms[0])
        for t in e.terms[1:]:
            txt = to_text(t)
            if txt.startswith("-"):
                out += f" - {txt[1:]}"
            else:
                out += f" + {txt}"
        return out
    raise TypeError(f"not an expression: {e!r}")


# --- parsing ----------------------------------------------------------------

_FUNCTIONS = {"exp": Exp, "log": Log}
_AIRY_FUNCS = {"Ai": "Ai", "Ai'": "AiPrime", "Bi": "Bi", "Bi'": "BiPrime"}


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j < n and text[j] == "'":
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r} at position {i}")
    tokens.append(("end", "", n))
    return tokens


def parse(text: str) -> Expr:
    """Parse the infix syntax emitted by `to_text`."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None):
        nonlocal pos
        tok = tokens[pos]
        if kind is not None and tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r} at position {tok[2]}, got {tok[1]!r}")
        pos += 1
        return tok

    def parse_sum():
        node = parse_term()
        while peek()[0] in ("+", "-"):
            op = take()[0]
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term():
        node = parse_unary()
        while peek()[0] in ("*", "/"):
            op = take()[0]
            rhs = parse_unary()
            node = node * rhs if op == "*" else node / rhs
        return node

    def parse_unary():
        if peek()[0] == "-":
            take()
            return -parse_unary()
        if peek()[0] == "+":
            take()
            return parse_unary()
        return parse_power()

    def parse_power():
        base = parse_atom()
        if peek()[0] == "^":
            take()
            expo = parse_unary()  # right-assoc, allows x^-2 and x^(a+b)
            return Power(base, expo)
        return base

    def parse_atom():
        tok = peek()
        if tok[0] == "num":
            take()
            return Const(Fraction(int(tok[1])))
        if tok[0] == "(":
            take()
            node = parse_sum()
            take(")")
            return node
        if tok[0] == "name":
            take()
            name = tok[1]
            if peek()[0] == "(":
                take()
                arg = parse_sum()
                take(")")
                if name in _FUNCTIONS:
                    return _FUNCTIONS[name](arg)
                if name in _AIRY_FUNCS:
                    return Airy(_AIRY_FUNCS[name], arg)
                raise ExprSyntaxError(f"unknown function {name!r} at position {tok[2]}")
            if name == "I":
                return I
            if name.endswith("'"):
                raise ExprSyntaxError(f"stray prime in name {name!r} at position {tok[2]}")
            return Var(name)
        raise ExprSyntaxError(f"unexpected token {tok[1]!r} at position {tok[2]}")

    node = parse_sum()
    take("end")
    return node
