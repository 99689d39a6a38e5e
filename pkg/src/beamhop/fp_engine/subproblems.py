"""Log-barrier solvers for the two convex inner subproblems.

Both subproblems maximize a sum of logs of concave quadratics over a
convex set (superlevel sets of the same surrogates, plus power or
pattern polytope constraints).  The barrier weight starts at 1 and
shrinks geometrically by 0.2 until the duality-gap proxy (constraint
count times weight) drops below the configured tolerance; inner stages
use the spectral-gradient ascent from ``inner``.

The illumination polytope loses its interior when K * M equals N_s: the
per-slot capacity and per-beam coverage inequalities are then forced
tight everywhere, so that case switches to an equality parametrization
over the null space of the capacity/coverage operator.
"""

from __future__ import annotations

import numpy as np

from ..core_model import PrecoderSet
from ..errors import InfeasibleRateConstraints, MaxIterationsExceeded
from ..pattern import RelaxedPattern
from .auxiliary import AuxiliaryVars
from .inner import maximize_concave
from .vectorize import PatternVectorization

LN2 = np.log(2.0)
BARRIER_SHRINK = 0.2
X_FLOOR = 1e-8          # keeps sqrt gradients finite near zero
INNER_ITERS = 400


def _barrier_stages(make_fun, state, n_constraints, eps, kappa0,
                    final_gtol=1e-9, inner_iters=INNER_ITERS, stop_early=None):
    """Run the shrinking-barrier schedule; returns (state, final kappa).

    Stages stop on a relative gradient reduction; the last stage (the one
    whose duality-gap proxy meets ``eps``) runs to ``final_gtol``.
    """
    kappa = kappa0
    while True:
        last = kappa * n_constraints <= eps
        gtol_abs = final_gtol if last else 1e-12
        gtol_rel = 0.0 if last else 1e-4
        ftol = 1e-13 if last else 0.0
        fun = make_fun(kappa)
        state, _, _, _, converged = maximize_concave(
            fun, state, gtol=gtol_abs, gtol_rel=gtol_rel, max_iters=inner_iters,
            ftol=ftol)
        if last and not converged:
            state, _, _, _, converged = maximize_concave(
                fun, state, gtol=gtol_abs, gtol_rel=gtol_rel,
                max_iters=4 * inner_iters, ftol=ftol)
            if not converged:
                raise MaxIterationsExceeded(
                    "barrier stage did not converge", last_iterate=state)
        if stop_early is not None and stop_early(state):
            return state, kappa
        if last:
            return state, kappa
        kappa *= BARRIER_SHRINK


class _BeamformerProblem:
    """Surrogate-sum maximization over per-slot precoders.

    Constraints: per-beam surrogate sums above their thresholds (rows
    with any positive weight only; zero-weight rows have identically
    zero rate) and per-slot power below budget.
    """

    def __init__(self, h, weights, aux_values, sigma_sq, p_tot, gamma):
        self.h = h
        self.hh = h.conj().T
        self.w = weights
        self.sqrt_w = np.sqrt(weights)
        self.a = aux_values
        self.a2 = np.abs(aux_values) ** 2
        self.sigma_sq = sigma_sq
        self.p_tot = p_tot
        self.gamma = gamma
        self.n_s, self.m = weights.shape
        self.act = np.flatnonzero(weights.sum(axis=1) > 0)
        self.n_constraints = len(self.act) + self.m

    def forward(self, p):
        """Log arguments, cross-link matrices, and per-slot powers."""
        arg = np.empty((self.n_s, self.m))
        cross = np.empty((self.m, self.n_s, self.n_s), dtype=complex)
        powers = np.empty(self.m)
        for t in range(self.m):
            ct = self.h @ p[t]
            cross[t] = ct
            gains = np.abs(ct) ** 2
            own = np.diag(ct)
            interf = gains @ self.w[:, t] - np.diag(gains) * self.w[:, t]
            arg[:, t] = (1.0
                         + 2.0 * self.sqrt_w[:, t] * np.real(np.conj(self.a[:, t]) * own)
                         - self.a2[:, t] * (interf + self.sigma_sq))
            powers[t] = np.sum(np.abs(p[t]) ** 2)
        return arg, cross, powers

    def surrogate_total(self, p) -> float:
        arg, _, _ = self.forward(p)
        if arg.min() <= 0:
            return -np.inf
        return float(np.log2(arg).sum())

    def slacks(self, p):
        arg, _, powers = self.forward(p)
        if arg.min() <= 0:
            return None, None
        f = np.log2(arg)
        gamma_slack = f.sum(axis=1)[self.act] - self.gamma[self.act]
        return gamma_slack, self.p_tot - powers

    def _objective_grad(self, p, arg, cross, coef, kappa, power_slack):
        """Gradient of sum(coef * f) plus the power-barrier term."""
        c = coef / (LN2 * arg)
        grad = np.empty_like(p)
        for t in range(self.m):
            m2 = (c[:, t] * self.a2[:, t])[:, None] * cross[t] * self.w[:, t][None, :]
            np.fill_diagonal(m2, 0.0)
            mt = -m2
            np.fill_diagonal(mt, c[:, t] * self.sqrt_w[:, t] * self.a[:, t])
            cograd = self.hh @ mt - (kappa / power_slack[t]) * p[t]
            grad[t] = 2.0 * cograd
        return grad

    def make_fun(self, kappa):
        def fun(state):
            p = state[0]
            arg, cross, powers = self.forward(p)
            ps = self.p_tot - powers
            if arg.min() <= 0 or ps.min() <= 0:
                return -np.inf, None
            f = np.log2(arg)
            sl = f.sum(axis=1)[self.act] - self.gamma[self.act]
            if sl.size and sl.min() <= 0:
                return -np.inf, None
            value = f.sum() + kappa * (np.log(sl).sum() + np.log(ps).sum())
            coef = np.ones((self.n_s, self.m))
            if sl.size:
                coef[self.act] += (kappa / sl)[:, None]
            grad = self._objective_grad(p, arg, cross, coef, kappa, ps)
            return value, [grad]
        return fun

    def make_phase1_fun(self, kappa):
        def fun(state):
            p, s = state[0], float(state[1])
            arg, cross, powers = self.forward(p)
            ps = self.p_tot - powers
            if arg.min() <= 0 or ps.min() <= 0:
                return -np.inf, None
            f = np.log2(arg)
            sl = f.sum(axis=1)[self.act] - self.gamma[self.act] - s
            if sl.min() <= 0:
                return -np.inf, None
            value = s + kappa * (np.log(sl).sum() + np.log(ps).sum())
            coef = np.zeros((self.n_s, self.m))
            coef[self.act] = (kappa / sl)[:, None]
            grad_p = self._objective_grad(p, arg, cross, coef, kappa, ps)
            grad_s = 1.0 - kappa * np.sum(1.0 / sl)
            return value, [grad_p, np.asarray(grad_s)]
        return fun


def _strictly_power_feasible(p, p_tot, backoff=1e-3):
    """Scale any slot near or above the power budget strictly inside it.

    Warm starts arrive essentially on the power boundary; re-centering
    them slightly keeps the first barrier stages well conditioned.
    """
    p = np.array(p, dtype=complex)
    limit = p_tot * (1.0 - backoff)
    for t in range(p.shape[0]):
        power = np.sum(np.abs(p[t]) ** 2)
        if power > limit:
            p[t] *= np.sqrt(limit / power)
    return p


def solve_beamformer_subproblem(channel, pattern_weights, aux, config,
                                initial=None) -> PrecoderSet:
    """Maximize the surrogate sum over precoders at a frozen auxiliary.

    Returns a feasible precoder set whose objective is within the
    configured tolerance of the subproblem optimum.  When the rate
    thresholds are unreachable at this auxiliary, raises
    InfeasibleRateConstraints carrying the point that maximizes the
    minimum threshold slack.
    """
    h = channel.h
    weights = np.asarray(pattern_weights, dtype=float)
    values = aux.values if isinstance(aux, AuxiliaryVars) else np.asarray(aux, dtype=complex)
    n_s, m = weights.shape
    gamma = np.asarray(config.gamma, dtype=float)
    eps = config.bf_tol

    # Beams with no illumination anywhere have identically zero rate: a
    # positive threshold on such a beam cannot be met by any precoder.
    vacuous = np.flatnonzero(weights.sum(axis=1) == 0)
    doomed = [int(n) for n in vacuous if gamma[n] > 0]

    p_orig = None
    if initial is not None:
        p_orig = initial.slots if isinstance(initial, PrecoderSet) else np.asarray(initial, dtype=complex)
        p0 = _strictly_power_feasible(p_orig, config.p_tot)
        warm = True
    else:
        p0 = matched_filter_init(h, weights, config.p_tot)
        warm = False

    if not np.any(weights > 0):
        zeros = PrecoderSet.fully_digital(np.zeros((m, h.shape[1], n_s), dtype=complex))
        if doomed:
            raise InfeasibleRateConstraints(
                f"beams {doomed} are never illuminated but have positive thresholds",
                best_effort=zeros)
        return zeros

    problem = _BeamformerProblem(h, weights, values, config.sigma_sq,
                                 config.p_tot, gamma)
    kappa0 = 1e-3 if warm else 1.0

    gamma_slack, _ = problem.slacks(p0)
    if gamma_slack is None:
        # Warm start incompatible with the new auxiliary; fall back cold.
        p0 = matched_filter_init(h, weights, config.p_tot)
        kappa0 = 1.0
        gamma_slack, _ = problem.slacks(p0)

    infeasible_min_slack = None
    if gamma_slack.size and gamma_slack.min() <= 0:
        s0 = np.asarray(float(gamma_slack.min()) - 1.0)
        # Phase 1 maximizes the minimum threshold slack; its own barrier
        # keeps the output strictly interior, so it is used unchanged.
        state, _ = _barrier_stages(
            problem.make_phase1_fun, [p0, s0], problem.n_constraints + 1, eps,
            kappa0=1.0,
            stop_early=lambda st: float(st[1]) > 10.0 * eps)
        p0, s_final = state[0], float(state[1])
        if s_final <= 0:
            infeasible_min_slack = s_final

    if infeasible_min_slack is None:
        # Residual target scaled by the objective's own gradient size.
        _, g_obj = problem.make_fun(0.0)([np.array(p0)])
        if g_obj is None:
            raise InfeasibleRateConstraints(
                "could not reach a strictly feasible interior point",
                best_effort=PrecoderSet.fully_digital(p0))
        gscale = max(1.0, np.sqrt(sum(np.sum(np.abs(gi) ** 2) for gi in g_obj)))
        state, _ = _barrier_stages(problem.make_fun, [p0],
                                   problem.n_constraints, eps, kappa0,
                                   final_gtol=gscale * min(1e-4, 100.0 * eps))
        p_final = state[0]
        # The subproblem solution must never fall below the caller's warm
        # start, which keeps the outer fractional-programming ascent
        # monotone.
        if p_orig is not None and problem.surrogate_total(p_final) < problem.surrogate_total(p_orig):
            p_final = p_orig
    else:
        p_final = p0

    result = PrecoderSet.fully_digital(p_final)
    if doomed or infeasible_min_slack is not None:
        detail = (f"beams {doomed} unreachable" if doomed
                  else f"max-min threshold slack {infeasible_min_slack:.3e}")
        raise InfeasibleRateConstraints(
            f"rate thresholds infeasible at this auxiliary: {detail}",
            best_effort=result, min_slack=infeasible_min_slack)
    return result


def matched_filter_init(h, weights, p_tot) -> np.ndarray:
    """Power-feasible matched-filter start: active columns aligned with
    their channel rows, inactive columns zero."""
    n_s = h.shape[0]
    m = weights.shape[1]
    p = np.zeros((m, h.shape[1], n_s), dtype=complex)
    norms = np.linalg.norm(h, axis=1)
    for t in range(m):
        active = np.flatnonzero(weights[:, t] > 0)
        if active.size == 0:
            continue
        # Back off the power boundary so the barrier start is well inside.
        scale = np.sqrt(p_tot / active.size * (1.0 - 1e-3))
        for n in active:
            if norms[n] > 0:
                p[t][:, n] = scale * h[n].conj() / norms[n]
    return p


class _PatternProblem:
    """Surrogate-sum maximization over the stacked relaxed pattern."""

    def __init__(self, vec: PatternVectorization, sigma_sq, gamma, k):
        self.vec = vec
        self.signal = np.maximum(vec.signal, 0.0)  # nonnegative at the update point
        self.interf = vec.interference
        self.a2 = vec.aux_abs_sq
        self.sigma_sq = sigma_sq
        self.gamma = gamma
        self.k = k
        self.n_s, self.m = vec.n_s, vec.m
        self.dim = self.n_s * self.m

        # Rows whose surrogate is identically zero contribute no slack.
        live = ~(np.all(self.signal == 0, axis=1) & np.all(self.a2 == 0, axis=1))
        self.act = np.flatnonzero(live)
        self.doomed = [int(n) for n in np.flatnonzero(~live) if gamma[n] > 0]

        self.equality = (k * self.m == self.n_s)
        if self.equality:
            a_eq = np.zeros((self.m + self.n_s, self.dim))
            for t in range(self.m):
                a_eq[t, self.n_s * t:self.n_s * (t + 1)] = 1.0
            for n in range(self.n_s):
                a_eq[self.m + n, n::self.n_s] = 1.0
            _, sv, vh = np.linalg.svd(a_eq)
            rank = int(np.sum(sv > 1e-10 * sv[0]))
            self.null_basis = vh[rank:].T      # (dim, dim - rank), orthonormal
            self.x0 = np.full(self.dim, k / self.n_s)
        else:
            self.null_basis = None
            self.x0 = np.full(self.dim, 0.5 * (1.0 / self.m + k / self.n_s))

    # Barrier-term count for the duality-gap proxy.
    @property
    def n_constraints(self):
        count = len(self.act) + 2 * self.dim
        if not self.equality:
            count += self.m + self.n_s
        return count

    def to_x(self, state_vec):
        if self.equality:
            return self.x0 + self.null_basis @ state_vec
        return state_vec

    def from_x(self, x):
        if self.equality:
            return self.null_basis.T @ (x - self.x0)
        return x

    def surrogates(self, x):
        xm = x.reshape(self.m, self.n_s)
        if xm.min() <= X_FLOOR:
            return None, None
        interf = np.einsum("ntk,tk->nt", self.interf, xm)
        arg = (1.0 + np.sqrt(xm.T) * self.signal
               - self.a2 * (interf + self.sigma_sq))
        if arg.min() <= 0:
            return None, None
        return np.log2(arg), arg

    def surrogate_total(self, x) -> float:
        g, _ = self.surrogates(x)
        return -np.inf if g is None else float(g.sum())

    def gamma_slacks(self, x):
        g, _ = self.surrogates(x)
        if g is None:
            return None
        return g.sum(axis=1)[self.act] - self.gamma[self.act]

    def _domain_terms(self, x):
        """Box and (inequality-route) polytope slacks; None if violated."""
        xl = x - X_FLOOR
        xu = 1.0 - x
        if xl.min() <= 0 or xu.min() <= 0:
            return None
        xm = x.reshape(self.m, self.n_s)
        if self.equality:
            return xl, xu, None, None
        col = self.k - xm.sum(axis=1)
        cov = xm.sum(axis=0) - 1.0
        if col.min() <= 0 or cov.min() <= 0:
            return None
        return xl, xu, col, cov

    def _grad_objective(self, x, arg, coef, kappa):
        """Gradient in x of sum(coef * g) plus all domain-barrier terms."""
        xm = x.reshape(self.m, self.n_s)
        c = coef / (LN2 * arg)                      # (N_s, M)
        term1 = (c * self.signal).T / (2.0 * np.sqrt(xm))
        term2 = np.einsum("nt,nti->ti", c * self.a2, self.interf)
        gx = (term1 - term2).reshape(-1)
        gx += kappa * (1.0 / (x - X_FLOOR) - 1.0 / (1.0 - x))
        if not self.equality:
            col = self.k - xm.sum(axis=1)
            cov = xm.sum(axis=0) - 1.0
            gx -= np.repeat(kappa / col, self.n_s)
            gx += np.tile(kappa / cov, self.m)
        return gx

    def make_fun(self, kappa):
        def fun(state):
            x = self.to_x(state[0])
            dom = self._domain_terms(x)
            if dom is None:
                return -np.inf, None
            xl, xu, col, cov = dom
            g, arg = self.surrogates(x)
            if g is None:
                return -np.inf, None
            sl = g.sum(axis=1)[self.act] - self.gamma[self.act]
            if sl.size and sl.min() <= 0:
                return -np.inf, None
            value = g.sum() + kappa * (np.log(xl).sum() + np.log(xu).sum())
            if sl.size:
                value += kappa * np.log(sl).sum()
            if not self.equality:
                value += kappa * (np.log(col).sum() + np.log(cov).sum())
            coef = np.ones((self.n_s, self.m))
            if sl.size:
                coef[self.act] += (kappa / sl)[:, None]
            gx = self._grad_objective(x, arg, coef, kappa)
            if self.equality:
                return value, [self.null_basis.T @ gx]
            return value, [gx]
        return fun

    def make_phase1_fun(self, kappa):
        def fun(state):
            x = self.to_x(state[0])
            s = float(state[1])
            dom = self._domain_terms(x)
            if dom is None:
                return -np.inf, None
            xl, xu, col, cov = dom
            g, arg = self.surrogates(x)
            if g is None:
                return -np.inf, None
            sl = g.sum(axis=1)[self.act] - self.gamma[self.act] - s
            if sl.min() <= 0:
                return -np.inf, None
            value = s + kappa * (np.log(sl).sum() + np.log(xl).sum() + np.log(xu).sum())
            if not self.equality:
                value += kappa * (np.log(col).sum() + np.log(cov).sum())
            coef = np.zeros((self.n_s, self.m))
            coef[self.act] = (kappa / sl)[:, None]
            gx = self._grad_objective(x, arg, coef, kappa)
            grad_s = 1.0 - kappa * np.sum(1.0 / sl)
            if self.equality:
                return value, [self.null_basis.T @ gx, np.asarray(grad_s)]
            return value, [gx, np.asarray(grad_s)]
        return fun

    def interior_start(self, initial):
        """Pull a warm point strictly inside the domain.

        Blends slightly toward the interior center so warm starts do not
        sit on the box or polytope boundary, then rescales further if any
        coordinate still falls outside.
        """
        if initial is None:
            return self.x0.copy()
        x = np.asarray(initial, dtype=float)
        if self.equality:
            # Stay on the affine manifold: project through the null basis.
            x = self.to_x(self.from_x(x))
        x = self.x0 + 0.995 * (x - self.x0)
        lo, hi = 2.0 * X_FLOOR, 1.0 - 1e-9
        if x.min() < lo or x.max() > hi:
            center = self.x0
            span = x - center
            limit = 1.0
            for value, c in zip(span, center):
                if value > 0:
                    limit = min(limit, (hi - c) / value)
                elif value < 0:
                    limit = min(limit, (lo - c) / value)
            x = center + 0.98 * max(limit, 0.0) * span
        return x


def solve_pattern_subproblem(vectorization: PatternVectorization, gamma, k,
                             config, initial=None) -> RelaxedPattern:
    """Maximize the stacked surrogate over the relaxed pattern polytope.

    Feasible set: per-slot capacity at most ``k``, every beam covered at
    least once, box [0, 1], and the per-beam surrogate sums above their
    thresholds.  Raises InfeasibleRateConstraints (with the max-min-slack
    point attached) when the thresholds cannot be met.
    """
    n_s, m = vectorization.n_s, vectorization.m
    gamma = np.asarray(gamma, dtype=float)
    eps = config.ip_tol

    if k >= n_s and m == 1:
        return RelaxedPattern(x_vec=np.ones(n_s), n_s=n_s, m=1)

    problem = _PatternProblem(vectorization, config.sigma_sq, gamma, k)
    x_orig = initial.x_vec if isinstance(initial, RelaxedPattern) else initial
    x0 = problem.interior_start(x_orig)
    warm = initial is not None
    kappa0 = 1e-3 if warm else 1.0

    state0 = [problem.from_x(x0)]
    slacks = problem.gamma_slacks(problem.to_x(state0[0]))
    if slacks is None:
        state0 = [problem.from_x(problem.x0.copy())]
        kappa0 = 1.0
        slacks = problem.gamma_slacks(problem.to_x(state0[0]))

    infeasible_min_slack = None
    if slacks.size and slacks.min() <= 0:
        s0 = np.asarray(float(slacks.min()) - 1.0)
        state, _ = _barrier_stages(
            problem.make_phase1_fun, state0 + [s0],
            problem.n_constraints + 1, eps, kappa0=1.0,
            stop_early=lambda st: float(st[1]) > 10.0 * eps)
        state0 = [state[0]]
        if float(state[1]) <= 0:
            infeasible_min_slack = float(state[1])

    if infeasible_min_slack is None:
        _, g_obj = problem.make_fun(0.0)(state0)
        if g_obj is None:
            raise InfeasibleRateConstraints(
                "could not reach a strictly feasible interior pattern",
                best_effort=RelaxedPattern(x_vec=np.clip(problem.to_x(state0[0]), 0, 1),
                                           n_s=n_s, m=m))
        gscale = max(1.0, np.sqrt(sum(np.sum(np.abs(gi) ** 2) for gi in g_obj)))
        state, _ = _barrier_stages(problem.make_fun, state0,
                                   problem.n_constraints, eps, kappa0,
                                   final_gtol=gscale * min(1e-4, 100.0 * eps))
        x_final = problem.to_x(state[0])
        if x_orig is not None:
            x_orig_arr = np.asarray(x_orig, dtype=float)
            if problem.surrogate_total(x_final) < problem.surrogate_total(x_orig_arr):
                x_final = x_orig_arr
    else:
        x_final = problem.to_x(state0[0])

    x_final = np.clip(x_final, 0.0, 1.0)
    result = RelaxedPattern(x_vec=x_final, n_s=n_s, m=m)
    if problem.doomed or infeasible_min_slack is not None:
        detail = (f"beams {problem.doomed} have zero surrogate" if problem.doomed
                  else f"max-min threshold slack {infeasible_min_slack:.3e}")
        raise InfeasibleRateConstraints(
            f"rate thresholds infeasible in the illumination subproblem: {detail}",
            best_effort=result, min_slack=infeasible_min_slack)
    return result
