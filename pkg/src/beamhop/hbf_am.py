"""Hybrid-beamformer factorization by alternating minimization.

Each fully digital slot precoder is approximated as an analog
phase-shifter matrix (entrywise unit modulus) times a small digital
matrix.  The digital step is a least-squares solve; the analog step is
gradient descent on the product-of-unit-circles manifold with entrywise
renormalization as the retraction.  Power is restored by scaling the
digital factor once at the end, so the product's Frobenius norm squared
equals the power budget exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core_model import PrecoderSet
from .errors import SingularGramWarning, SlotFactorizationError

RIDGE = 1e-10
ARMIJO_SLOPE = 1e-4
STEP_SHRINK = 0.5
MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class HybridPrecoder:
    """One slot's analog/digital pair plus the fit diagnostic.

    ``residual`` is the relative Frobenius mismatch against the digital
    target, recorded before the final power normalization.
    """

    f: np.ndarray          # (N_BS, N_RF), entrywise unit modulus
    q: np.ndarray          # (N_RF, N_s), power-normalized
    residual: float
    gram_regularized: bool = False


def _ls_digital(f, p_target):
    gram = f.conj().T @ f
    rhs = f.conj().T @ p_target
    regularized = False
    try:
        if np.linalg.cond(gram) > 1e12:
            raise np.linalg.LinAlgError
        q = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        regularized = True
        q = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), rhs)
    return q, regularized


def ls_digital(f, p_target) -> np.ndarray:
    """Least-squares digital factor for a fixed analog matrix.

    Solves the normal equations; a rank-deficient Gram matrix gets a
    small ridge and emits SingularGramWarning.
    """
    q, regularized = _ls_digital(np.asarray(f, dtype=complex),
                                 np.asarray(p_target, dtype=complex))
    if regularized:
        warnings.warn("analog Gram matrix is rank deficient; ridge added",
                      SingularGramWarning, stacklevel=2)
    return q


def _rdot(a, b) -> float:
    return float(np.real(np.vdot(a, b)))


def _retract(z, fallback):
    mags = np.abs(z)
    out = np.where(mags > 0, z / np.where(mags > 0, mags, 1.0), fallback)
    return out


def riemannian_analog(f_init, q, p_target, max_iters=100, step_rule="armijo") -> np.ndarray:
    """Fit the analog matrix on the unit-modulus manifold.

    Gradient descent with Armijo backtracking (optionally
    Fletcher-Reeves conjugate directions); the entrywise renormalization
    retraction keeps every entry exactly unit modulus, and the fit error
    never increases across accepted steps.
    """
    f = np.asarray(f_init, dtype=complex)
    if np.max(np.abs(np.abs(f) - 1.0)) > 1e-6:
        raise ValueError("analog initializer must be entrywise unit modulus")
    f = f / np.abs(f)
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p_target, dtype=complex)
    qh = q.conj().T
    use_cg = step_rule == "cg"

    def value(mat):
        return 0.5 * np.linalg.norm(p - mat @ q) ** 2

    val = value(f)
    gtol = 1e-11 * max(1.0, np.linalg.norm(q))
    grad_prev = None
    direction = None
    f_prev = None

    for _ in range(max_iters):
        egrad = -(p - f @ q) @ qh
        rgrad = egrad - np.real(egrad * np.conj(f)) * f
        grad = 2.0 * rgrad
        gnorm_sq = _rdot(grad, grad)
        if np.sqrt(gnorm_sq) <= gtol:
            break

        if use_cg and grad_prev is not None:
            beta = gnorm_sq / max(_rdot(grad_prev, grad_prev), 1e-300)
            carried = direction - np.real(direction * np.conj(f)) * f
            direction = -grad + beta * carried
            if _rdot(grad, direction) >= 0:
                direction = -grad
        else:
            direction = -grad
        slope = _rdot(grad, direction)

        # Spectral (secant) estimate of the step, capped at the nominal
        # initial step; a fixed unit step zigzags across the optimum.
        t = 1.0
        if f_prev is not None and grad_prev is not None:
            s = f - f_prev
            y = grad - grad_prev
            sy = _rdot(s, y)
            if sy > 1e-300:
                t = min(1.0, _rdot(s, s) / sy)

        accepted = False
        for _ in range(MAX_BACKTRACKS):
            trial = _retract(f + t * direction, f)
            trial_val = value(trial)
            if trial_val <= val + ARMIJO_SLOPE * t * slope:
                accepted = True
                break
            t *= STEP_SHRINK
        if not accepted:
            break
        f_prev, grad_prev = f, grad
        f, val = trial, trial_val
    return f


def factorize(p_target, config, rng) -> HybridPrecoder:
    """Alternating analog/digital factorization of one slot precoder.

    Random-phase analog starts (``config.hbf_restarts`` of them, best
    residual kept), alternation until the iteration cap or a relative
    residual plateau, then the power normalization.  The target is scaled
    to unit Frobenius norm internally, which makes the whole run
    invariant to input scaling.
    """
    p = np.asarray(p_target, dtype=complex)
    if not np.all(np.isfinite(p)):
        raise ValueError("factorization target must be finite")
    scale = np.linalg.norm(p)
    if scale == 0:
        raise ValueError("factorization target must be nonzero")
    pn = p / scale
    n_bs = p.shape[0]
    n_rf = config.n_rf
    step_rule = "cg" if config.hbf_conjugate_gradient else "armijo"

    best = None
    regularized_any = False
    for _ in range(max(1, config.hbf_restarts)):
        f = np.exp(2j * np.pi * rng.random((n_bs, n_rf)))
        prev_res = np.inf
        q = None
        for _ in range(config.hbf_iters):
            q, reg = _ls_digital(f, pn)
            regularized_any = regularized_any or reg
            f = riemannian_analog(f, q, pn, max_iters=60, step_rule=step_rule)
            res = np.linalg.norm(pn - f @ q)
            # Stop only at genuine stagnation: the alternation crosses
            # long shallow stretches where a loose relative-change test
            # would quit far from its attainable residual.
            if abs(prev_res - res) <= 1e-8 * max(res, 1e-12):
                prev_res = res
                break
            prev_res = res
        q, reg = _ls_digital(f, pn)
        regularized_any = regularized_any or reg
        res = float(np.linalg.norm(pn - f @ q))
        if best is None or res < best[2]:
            best = (f, q, res)

    f, q, residual = best
    q = q * scale
    product_norm = np.linalg.norm(f @ q)
    q = np.sqrt(config.p_tot) / product_norm * q
    return HybridPrecoder(f=f, q=q, residual=residual,
                          gram_regularized=regularized_any)


def factorize_all(precoders, config, rng) -> list:
    """Factorize every slot independently.

    One seed is derived from ``rng`` and reused for each slot, so
    identical slot targets produce identical outputs.  Per-slot failures
    are collected into SlotFactorizationError instead of aborting the
    remaining slots.
    """
    slots = precoders.slots if isinstance(precoders, PrecoderSet) else np.asarray(precoders, dtype=complex)
    if isinstance(rng, np.random.Generator):
        seed = int(rng.integers(0, 2 ** 63 - 1))
    elif rng is None:
        seed = 0
    else:
        seed = int(rng)

    results = {}
    failures = {}
    for t in range(slots.shape[0]):
        try:
            results[t] = factorize(slots[t], config, np.random.default_rng(seed))
        except Exception as err:  # noqa: BLE001 - aggregated below
            failures[t] = err
    if failures:
        raise SlotFactorizationError(failures, results)
    return [results[t] for t in range(slots.shape[0])]


def hybrid_precoder_set(factorized) -> PrecoderSet:
    """Stack per-slot factorizations into a hybrid PrecoderSet."""
    analog = np.stack([hp.f for hp in factorized])
    digital = np.stack([hp.q for hp in factorized])
    return PrecoderSet.hybrid(analog, digital)
