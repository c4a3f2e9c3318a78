"""Reduction of an invariant Laplacian to a first-order operator, and its
explicit integration along characteristics.

Inputs come as representation data bundled with a group model: first-order
operators satisfying the algebra's commutation relations, the indices acting
by multiplication, a modular multiplier for non-unimodular groups, and the
kernel's collapsed action.  The pipeline verifies the data, assembles the
transformed Laplacian, certifies that it is first order, extracts the
characteristic field Z and potential V, rectifies, and integrates.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass, replace

from . import expr as ex
from .bilinear import laplacian_data
from .diffop import DiffOp, SampleSpec, apply, commutator, compose, op_equal
from .expr import Expr, Var, ZERO, simplify
from .report import FAIL, PASS, CheckRecord, VerificationError

DEFAULT_SEED = 0xC0FFEE


class NotFirstOrderError(RuntimeError):
    pass


class DomainExitError(RuntimeError):
    def __init__(self, exit_time, point):
        self.exit_time = exit_time
        self.point = point
        super().__init__(f"trajectory left the evaluation domain at t = {exit_time}")


class InconclusiveError(RuntimeError):
    pass


@dataclass(frozen=True)
class JParam:
    """Spectral parameter descriptor: discrete values or a punctured line."""

    kind: str  # "discrete" | "real_nonzero"
    values: tuple = ()
    sample_range: tuple = (0.25, 2.0)  # |J| range used when sampling reals

    def samples(self, rng):
        if self.kind == "discrete":
            return rng.choice(self.values)
        lo, hi = self.sample_range
        return rng.uniform(lo, hi) * rng.choice((-1.0, 1.0))


@dataclass(frozen=True)
class LambdaRep:
    """First-order operator representation on functions over the orbit chart.

    ops[i] realizes basis element i+1; indices in mult_only act by
    multiplication (order 0).  sample_ranges feeds numeric comparisons and
    must cover the q variables and every coefficient parameter except J,
    which is drawn from j_param.
    """

    q_vars: tuple
    ops: tuple
    j_param: JParam
    measure_density: Expr
    mult_only: tuple
    sample_ranges: dict

    @property
    def dim_q(self):
        return len(self.q_vars)

    def sample_spec(self, n=50, seed=DEFAULT_SEED):
        ranges = dict(self.sample_ranges)
        if self.j_param.kind == "discrete":
            ranges["J"] = list(self.j_param.values)
        else:
            # a discrete spread of +-|J| values keeps samples away from 0
            lo, hi = self.j_param.sample_range
            mid = 0.5 * (lo + hi)
            ranges["J"] = [v * s for v in (lo, mid, hi) for s in (1, -1)]
        return SampleSpec(ranges=ranges, n=n, seed=seed)


@dataclass(frozen=True)
class FirstOrderData:
    Z: tuple
    V: Expr
    normalizer: Expr


@dataclass(frozen=True)
class ReducedOperator:
    raw: DiffOp
    first_order: FirstOrderData | None = None


@dataclass(frozen=True)
class Characteristic:
    start: tuple
    step: float
    ts: tuple
    qs: tuple
    phases: tuple | None = None

    @property
    def end(self):
        return self.qs[-1]


# --- representation checks --------------------------------------------------

def verify_lambda_rep(model, n_samples=40, seed=DEFAULT_SEED, strict=False):
    """Commutator closure, multiplication-index coverage, and the
    imaginary-multiplier check for the model's representation data.

    Returns a list of CheckRecords; with strict=True a failing record raises
    VerificationError naming the offending pairs.
    """
    lrep = model.lrep
    L = model.algebra
    n = L.dim
    spec = lrep.sample_spec(n=n_samples, seed=seed)
    records = []

    worst = 0.0
    bad_pairs = []
    used = skipped = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            target = DiffOp.zero(lrep.q_vars)
            for k, coeff in enumerate(L.bracket_basis(i, j)):
                if coeff != 0:
                    target = target + lrep.ops[k].scale(ex.Const(coeff))
            cmp = op_equal(commutator(lrep.ops[i - 1], lrep.ops[j - 1]), target,
                           spec, tol=1e-12)
            worst = max(worst, cmp.max_deviation)
            used += cmp.samples_used
            skipped += cmp.skipped_samples
            if not cmp.equal:
                bad_pairs.append((i, j))
    records.append(CheckRecord(
        check="lambda_rep_commutators",
        status=PASS if not bad_pairs else FAIL,
        max_residual=worst, samples_used=used, seed=seed,
        skipped_samples=skipped,
        detail={"failing_pairs": bad_pairs} if bad_pairs else {},
    ))

    ideal_idx = model.ideal.standard_indices()
    mult_ok = ideal_idx is not None and set(ideal_idx) <= set(lrep.mult_only)
    order_ok = all(lrep.ops[a - 1].is_multiplication() for a in lrep.mult_only)
    records.append(CheckRecord(
        check="multiplication_indices_cover_ideal",
        status=PASS if (mult_ok and order_ok) else FAIL,
        detail={"ideal": ideal_idx, "mult_only": list(lrep.mult_only)},
    ))

    # skew-symmetry witness for multiplication operators: the order-0
    # coefficient i*chi must be purely imaginary at real points
    rng = random.Random(seed)
    worst_re = 0.0
    names = sorted(set().union(*(
        ex.free_vars(lrep.ops[a - 1].coeff((0,) * lrep.dim_q))
        for a in lrep.mult_only
    )) | set(lrep.q_vars))
    fns = {
        a: ex.compile_expr(lrep.ops[a - 1].coeff((0,) * lrep.dim_q), names)
        for a in lrep.mult_only
    }
    for _ in range(n_samples):
        point = {}
        for v in names:
            if v == "J":
                point[v] = lrep.j_param.samples(rng)
            else:
                lo, hi = lrep.sample_ranges[v]
                point[v] = rng.uniform(lo, hi)
        args = [point[v] for v in names]
        for a, fn in fns.items():
            val = fn(*args)
            worst_re = max(worst_re, abs(val.real) / (1.0 + abs(val)))
    records.append(CheckRecord(
        check="multiplication_operators_imaginary",
        status=PASS if worst_re <= 1e-12 else FAIL,
        max_residual=worst_re, samples_used=n_samples, seed=seed,
    ))

    if strict and any(not r.passed for r in records):
        raise VerificationError(records)
    return records


def infinitesimal_action(model, i) -> DiffOp:
    """Generator d/dt of the collapsed kernel action along basis direction i.

    The collapsed action is phi -> exp(i P(q, x)) phi(S(q, x)) with S(q,0)=q
    and P(q,0)=0, so the generator is i dP/dx_i|_0 + sum_A dS_A/dx_i|_0 d_A.
    """
    ka = model.kernel.collapsed
    x_zero = {v: ZERO for v in model.x_vars}
    xi_name = model.x_vars[i - 1]
    q_vars = model.lrep.q_vars
    coeffs = {}
    phase_rate = ex.subst(ex.differentiate(ka.phase, xi_name), x_zero)
    coeffs[(0,) * len(q_vars)] = ex.Product((ex.I, phase_rate))
    for a, s_expr in enumerate(ka.substitutions):
        rate = ex.subst(ex.differentiate(s_expr, xi_name), x_zero)
        if rate != ZERO:
            idx = [0] * len(q_vars)
            idx[a] = 1
            coeffs[tuple(idx)] = rate
    return DiffOp(q_vars, coeffs)


def _test_function_bank(q_vars):
    """Gaussians and polynomial-times-Gaussian probes on the orbit chart.

    Charts with a positive coordinate (name starting with 'q2') are probed
    through log coordinates so the bank lives where the operators do.
    """
    bank = []
    for shift in (0, ex.const(1, 3)):
        quad = []
        for v in q_vars:
            inner = Var(v) if not v.startswith("q2") else ex.Log(Var(v))
            quad.append(ex.Power(inner - shift, 2))
        gauss = ex.Exp(-ex.Sum(tuple(quad)))
        bank.append(gauss)
        bank.append(ex.Product((Var(q_vars[0]), gauss)))
    return bank


def local_lift_check(model, i, n_samples=30, seed=DEFAULT_SEED) -> float:
    """Max relative deviation between the collapsed-action generator and the
    representation operator, probed on a bank of test functions."""
    if model.kernel is None or model.kernel.collapsed is None:
        raise ValueError(f"model {model.name} ships no collapsed kernel action")
    lrep = model.lrep
    gen = infinitesimal_action(model, i)
    op = lrep.ops[i - 1]
    rng = random.Random(seed)
    worst = 0.0
    for phi in _test_function_bank(lrep.q_vars):
        diff = simplify(apply(gen, phi) - apply(op, phi))
        if diff == ZERO:
            continue
        ref = apply(op, phi)
        names = sorted(ex.free_vars(diff) | ex.free_vars(ref) | set(lrep.q_vars))
        fd = ex.compile_expr(diff, names)
        fr = ex.compile_expr(ref, names)
        for _ in range(n_samples):
            point = {}
            for v in names:
                if v == "J":
                    point[v] = lrep.j_param.samples(rng)
                else:
                    lo, hi = lrep.sample_ranges[v]
                    point[v] = rng.uniform(lo, hi)
            args = [point[v] for v in names]
            try:
                dv = abs(fd(*args))
                rv = abs(fr(*args))
            except ex.DomainError:
                continue
            worst = max(worst, dv / max(1.0, rv))
    return worst


# --- assembly ---------------------------------------------------------------

def conjugate_by_multiplier(op: DiffOp, multiplier: Expr) -> DiffOp:
    """Lambda^{-1} . op . Lambda for a nowhere-zero multiplier Lambda(q)."""
    multiplier = simplify(ex.as_expr(multiplier))
    if multiplier == ex.ONE:
        return op
    left = DiffOp.scalar(op.variables, ex.Power(multiplier, -1))
    right = DiffOp.scalar(op.variables, multiplier)
    return compose(left, compose(op, right))


def build_reduced(model, verify=True) -> ReducedOperator:
    """Assemble the transformed Laplacian from representation data.

    raw = sum_ij G^{ij} l~_i l~_j + sum_i C^i l~_i, with l~ the operators
    conjugated by the model's modular multiplier (identity for unimodular
    groups).  When the null-ideal criterion holds, every G^{ij} pairing two
    derivative operators vanishes, so raw has order <= 1; this is not
    assumed here, only produced by the data.
    """
    if verify:
        verify_lambda_rep(model, strict=True)
    lrep = model.lrep
    data = laplacian_data(model.algebra, model.form)
    ops_t = tuple(
        conjugate_by_multiplier(op, model.modular_multiplier) for op in lrep.ops
    )
    n = model.algebra.dim
    raw = DiffOp.zero(lrep.q_vars)
    for i in range(n):
        for j in range(n):
            gij = data.g_inv[i][j]
            if gij == 0:
                continue
            raw = raw + compose(ops_t[i], ops_t[j]).scale(ex.Const(gij))
        ci = data.c_vec[i]
        if ci != 0:
            raw = raw + ops_t[i].scale(ex.Const(ci))
    return ReducedOperator(raw=raw)


def extract_first_order(red: ReducedOperator, normalizer: Expr,
                        energy: Expr | None = None,
                        sample_spec: SampleSpec | None = None) -> ReducedOperator:
    """Split (raw - E)/normalizer into sum Z^A d_A + V.

    Second-order coefficients of raw must vanish; symbolic zero is accepted
    directly and anything else is sampled at 1e-12 before rejecting.
    """
    raw = red.raw
    second = {idx: c for idx, c in raw.coefficients.items() if sum(idx) == 2}
    if second:
        if sample_spec is None:
            raise NotFirstOrderError(
                f"second-order coefficients survive simplification: {sorted(second)}"
            )
        probe = DiffOp(raw.variables, second)
        cmp = op_equal(probe, DiffOp.zero(raw.variables), sample_spec, tol=1e-12)
        if not cmp.equal:
            raise NotFirstOrderError(
                f"second-order part is numerically nonzero (dev {cmp.max_deviation:.3e})"
            )
    energy = Var("E") if energy is None else ex.as_expr(energy)
    normalizer = ex.as_expr(normalizer)
    inv = ex.Power(normalizer, -1)
    nvars = len(raw.variables)
    z = []
    for a in range(nvars):
        idx = tuple(1 if t == a else 0 for t in range(nvars))
        z.append(simplify(ex.Product((raw.coeff(idx), inv))))
    scalar = raw.coeff((0,) * nvars)
    v = simplify(ex.Product((ex.Sum((scalar, -energy)), inv)))
    return replace(red, first_order=FirstOrderData(Z=tuple(z), V=v, normalizer=simplify(normalizer)))


# --- characteristics --------------------------------------------------------

def _compile_with_params(e, q_vars, params):
    names = list(q_vars) + sorted(set(ex.free_vars(e)) - set(q_vars))
    fn = ex.compile_expr(e, names)
    extra = []
    for name in names[len(q_vars):]:
        if name not in params:
            raise ex.MissingVariableError(f"parameter {name!r} not supplied")
        extra.append(complex(params[name]))
    if not extra:
        return fn
    return lambda *q: fn(*q, *extra)


def _rk4(field, state, t0, t_end, step, domain=None, record=None):
    """Classical fixed-step RK4 from t0 to t_end (either direction)."""
    t = t0
    total = t_end - t0
    if total == 0:
        return state, t
    nsteps = max(1, int(round(abs(total) / step)))
    h = total / nsteps
    for _ in range(nsteps):
        if domain is not None and not domain(state):
            raise DomainExitError(t, state)
        k1 = field(t, state)
        k2 = field(t + h / 2, [s + h / 2 * k for s, k in zip(state, k1)])
        k3 = field(t + h / 2, [s + h / 2 * k for s, k in zip(state, k2)])
        k4 = field(t + h, [s + h * k for s, k in zip(state, k3)])
        state = [
            s + h / 6 * (a + 2 * b + 2 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        ]
        t += h
        if record is not None:
            record(t, state)
    if domain is not None and not domain(state):
        raise DomainExitError(t, state)
    return state, t


def flow(Z, q0, t_end, step, params=None, domain=None) -> Characteristic:
    """Integrate dq/dt = Z(q) from q0 with classical RK4 at fixed step.

    Z is a sequence of expressions over the chart variables named q1..qm (or
    a single 'q'); params binds any remaining parameters.  A domain predicate
    over real coordinate tuples turns an excursion into DomainExitError with
    the exit time attached.
    """
    params = params or {}
    m = len(Z)
    q_vars = _chart_names(m)
    fns = [_compile_with_params(ex.as_expr(z), q_vars, params) for z in Z]

    def field(_t, state):
        return [fn(*state) for fn in fns]

    dom = None
    if domain is not None:
        dom = lambda state: domain(tuple(s.real if isinstance(s, complex) else s for s in state))

    ts = [0.0]
    qs = [tuple(complex(x) for x in q0)]

    def rec(t, state):
        ts.append(t)
        qs.append(tuple(state))

    state, _ = _rk4(field, list(qs[0]), 0.0, float(t_end), float(step),
                    domain=dom, record=rec)
    return Characteristic(start=tuple(q0), step=float(step), ts=tuple(ts), qs=tuple(qs))


def _chart_names(m):
    return ("q",) if m == 1 else tuple(f"q{i + 1}" for i in range(m))


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    samples_used: int
    skipped_samples: int


def invariant_residual(Z, u: Expr, samples, params=None) -> ResidualReport:
    """max |Z u| / (|u| * ||Z||) over sample points; domain errors skipped."""
    params = params or {}
    m = len(Z)
    q_vars = _chart_names(m)
    zu = simplify(ex.Sum(tuple(
        ex.Product((ex.as_expr(z), ex.differentiate(ex.as_expr(u), v)))
        for z, v in zip(Z, q_vars)
    )))
    f_zu = _compile_with_params(zu, q_vars, params)
    f_u = _compile_with_params(ex.as_expr(u), q_vars, params)
    f_z = [_compile_with_params(ex.as_expr(z), q_vars, params) for z in Z]
    worst = 0.0
    used = skipped = 0
    for q in samples:
        try:
            znorm = max(abs(fz(*q)) for fz in f_z)
            scale = max(abs(f_u(*q)) * znorm, 1e-300)
            worst = max(worst, abs(f_zu(*q)) / scale)
            used += 1
        except ex.DomainError:
            skipped += 1
    if used == 0:
        raise InconclusiveError("all invariant samples hit domain errors")
    return ResidualReport(worst, used, skipped)


@dataclass(frozen=True)
class RectifyReport:
    max_dev_v: float
    max_dev_u: float
    samples_used: int
    skipped_samples: int


def rectify_check(Z, v: Expr, u, samples, params=None) -> RectifyReport:
    """Certify flow-box coordinates: Zv = 1 and Zu = 0 on the sampled chart."""
    params = params or {}
    m = len(Z)
    q_vars = _chart_names(m)

    def z_of(e):
        return simplify(ex.Sum(tuple(
            ex.Product((ex.as_expr(z), ex.differentiate(ex.as_expr(e), var)))
            for z, var in zip(Z, q_vars)
        )))

    zv = z_of(v)
    f_zv = _compile_with_params(zv, q_vars, params)
    worst_v = 0.0
    used = skipped = 0
    for q in samples:
        try:
            worst_v = max(worst_v, abs(f_zv(*q) - 1.0))
            used += 1
        except ex.DomainError:
            skipped += 1
    if used == 0:
        raise InconclusiveError("all rectification samples hit domain errors")
    worst_u = 0.0
    for ue in u:
        rep = invariant_residual(Z, ue, samples, params)
        worst_u = max(worst_u, rep.max_residual)
    return RectifyReport(worst_v, worst_u, used, skipped)


def solve_reduced(Z, V, energy, phi, q_targets, step, *, v: Expr, u=(),
                  v_ref=0.0, params=None, domain=None):
    """Values of the solution Phi(u) exp(-int_{v_ref}^{v(q)} V dv) at targets.

    The potential is integrated along the characteristic through each target
    by flowing backwards to the reference section v = v_ref; the quadrature
    rides inside the RK4 step, so the phase error is O(step^4).  The energy
    value is bound into V's symbol E.  Returns (values, characteristics).
    """
    params = dict(params or {})
    params.setdefault("E", energy)
    m = len(Z)
    q_vars = _chart_names(m)
    z_fns = [_compile_with_params(ex.as_expr(z), q_vars, params) for z in Z]
    v_fn = _compile_with_params(ex.as_expr(v), q_vars, params)
    u_fns = [_compile_with_params(ex.as_expr(ue), q_vars, params) for ue in u]
    pot_fn = _compile_with_params(ex.as_expr(V), q_vars, params)

    dom = None
    if domain is not None:
        dom = lambda state: domain(tuple(s.real for s in state[:-1]))

    def field(_t, state):
        q = state[:-1]
        rates = [fn(*q) for fn in z_fns]
        rates.append(pot_fn(*q))
        return rates

    values = []
    chars = []
    for target in q_targets:
        q0 = [complex(x) for x in target]
        v_here = v_fn(*q0)
        if abs(v_here.imag) > 1e-9 * (1.0 + abs(v_here)):
            raise ex.DomainError(f"v is not real at {target}: {v_here}")
        t_end = float(v_ref) - v_here.real
        ts = [0.0]
        qs = [tuple(q0)]
        phases = [0j]

        def rec(t, state):
            ts.append(t)
            qs.append(tuple(state[:-1]))
            phases.append(state[-1])

        state, _ = _rk4(field, q0 + [0j], 0.0, t_end, float(step),
                        domain=dom, record=rec)
        # phi(t_end) = -int_{v_ref}^{v(q)} V dv along the characteristic
        phase = state[-1]
        u_vals = tuple(fn(*q0) for fn in u_fns)
        values.append(phi(u_vals, params) * cmath.exp(phase))
        chars.append(Characteristic(
            start=tuple(target), step=float(step), ts=tuple(ts),
            qs=tuple(qs), phases=tuple(phases),
        ))
    return values, chars


# --- residuals --------------------------------------------------------------

_FD1 = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
_FD2 = ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0),
        (1, 16.0 / 12.0), (2, -1.0 / 12.0))


def fd_apply(coeff_fns, psi, point, h):
    """Apply an order-<=2 operator to a sampled field by 4th-order stencils.

    coeff_fns maps multi-index -> callable(*point); psi is callable on
    coordinate tuples; mixed second derivatives use the tensor product of
    first-derivative stencils.
    """
    point = tuple(float(x) for x in point)

    def shifted(axis_offsets):
        p = list(point)
        for axis, k in axis_offsets:
            p[axis] += k * h
        return psi(tuple(p))

    total = 0j
    for idx, cf in coeff_fns.items():
        order = sum(idx)
        cval = cf(*point)
        if order == 0:
            total += cval * shifted([])
        elif order == 1:
            axis = idx.index(1)
            acc = sum(w * shifted([(axis, k)]) for k, w in _FD1)
            total += cval * acc / h
        elif 2 in idx:
            axis = idx.index(2)
            acc = sum(w * shifted([(axis, k)]) for k, w in _FD2)
            total += cval * acc / (h * h)
        else:
            axes = [a for a, v in enumerate(idx) if v == 1]
            acc = 0j
            for k1, w1 in _FD1:
                for k2, w2 in _FD1:
                    acc += w1 * w2 * shifted([(axes[0], k1), (axes[1], k2)])
            total += cval * acc / (h * h)
    return total


def reduced_residual(red: ReducedOperator, psi_hat, energy, samples,
                     params=None, fd_step=1e-2, floor=1e-12) -> ResidualReport:
    """max |raw psi - E psi| / max(|psi|, floor) over samples.

    psi_hat may be an expression (symbolic derivatives; exact zeros detected)
    or a callable on coordinate tuples (4th-order finite differences).
    """
    params = dict(params or {})
    e_val = complex(energy)
    params.setdefault("E", e_val)
    raw = red.raw
    q_vars = raw.variables

    if isinstance(psi_hat, Expr):
        resid = simplify(apply(raw, psi_hat) - Var("E") * psi_hat)
        if resid == ZERO:
            return ResidualReport(0.0, len(list(samples)), 0)
        f_res = _compile_with_params(resid, q_vars, params)
        f_psi = _compile_with_params(psi_hat, q_vars, params)
        worst = 0.0
        used = skipped = 0
        scale = floor
        vals = []
        for q in samples:
            try:
                vals.append((abs(f_res(*q)), abs(f_psi(*q))))
                used += 1
            except ex.DomainError:
                skipped += 1
        if used == 0:
            raise InconclusiveError("all residual samples hit domain errors")
        scale = max(scale, max(p for _, p in vals))
        if scale <= floor:
            raise InconclusiveError("field is numerically zero on all samples")
        worst = max(r for r, _ in vals) / scale
        return ResidualReport(worst, used, skipped)

    coeff_fns = {
        idx: _compile_with_params(c, q_vars, params)
        for idx, c in raw.coefficients.items()
    }
    entries = []
    skipped = 0
    for q in samples:
        try:
            lhs = fd_apply(coeff_fns, psi_hat, q, fd_step)
            pv = psi_hat(tuple(float(x) for x in q))
            entries.append((abs(lhs - e_val * pv), abs(pv)))
        except (ex.DomainError, DomainExitError):
            skipped += 1
    if not entries:
        raise InconclusiveError("all residual samples hit domain errors")
    scale = max(floor, max(p for _, p in entries))
    if scale <= floor:
        raise InconclusiveError("field is numerically zero on all samples")
    return ResidualReport(max(r for r, _ in entries) / scale, len(entries), skipped)
