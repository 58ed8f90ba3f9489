"""Lattice basis reduction on the QR representation.

Three algorithms share the same machinery:

* ``lll_reduce_real``  -- classic unbounded LLL for real bases (run it on
  the real block embedding of a complex channel),
* ``fclll_wen``        -- fixed-complexity complex LLL with a per-column
  swap-flag table and a capped per-column iteration count,
* ``mclll``            -- the reduced-iteration modified complex LLL: full
  sweeps, a single scalar swap flag, and (by default) the cheaper Siegel
  swap test in place of the Lovasz test.

All of them return the triple (q_tilde, r_tilde, T) where T is carried in
exact Gaussian-integer arithmetic, plus an execution trace.  FLOP counting
is optional: callers pass a counter/charge-schedule pair (see
``lrmimo.flops``); the algorithms themselves never own a counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    GaussIntMatrix,
    apply_givens_left,
    apply_givens_right,
    givens_theta,
    qr_decompose,
)

DIAG_TOL = 1e-14

# Slack for the floating-point reduction predicates.
PREDICATE_TOL = 1e-9


class ZeroDiagonal(ValueError):
    """Size reduction hit a (near-)zero diagonal entry."""


@dataclass(frozen=True)
class ReductionParams:
    """Knobs shared by every reduction algorithm.

    delta      quality parameter in (1/4, 1]; 3/4 unless stated otherwise.
    zeta       Siegel parameter in [2, 4]; only used to validate that
               delta > 1/zeta when the Siegel condition is selected.
    iter_max   iteration cap (None = unbounded; the classic LLL requires
               None, the fixed-complexity variants require a finite cap).
    condition  "lovasz" or "siegel" swap test.
    """

    delta: float = 0.75
    zeta: float = 2.0
    iter_max: int | None = 6
    condition: str = "siegel"

    def __post_init__(self):
        if not 0.25 < self.delta <= 1.0:
            raise ValueError(f"delta must be in (0.25, 1], got {self.delta}")
        if not 2.0 <= self.zeta <= 4.0:
            raise ValueError(f"zeta must be in [2, 4], got {self.zeta}")
        if self.condition not in ("lovasz", "siegel"):
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.condition == "siegel" and not self.delta > 1.0 / self.zeta:
            raise ValueError("siegel condition requires delta > 1/zeta")
        if self.iter_max is not None and self.iter_max < 1:
            raise ValueError("iter_max must be None or >= 1")


@dataclass
class ReductionState:
    """Algorithm-internal bookkeeping, exposed for tracing and tests.

    cs_flag    scalar swap flag (sweep algorithms) or the per-column flag
               vector of length n+1 (fixed-complexity variant).
    k_seq      pivot columns actually visited, in order (0-based; column k
               addresses the pair (k-1, k)).
    k_seq_idx  number of traversal steps consumed.
    """

    cs_flag: object
    k_seq: list[int] = field(default_factory=list)
    k_seq_idx: int = 0


@dataclass
class ReductionResult:
    """Output of a basis reduction run.

    ``q_tilde @ r_tilde`` equals the input basis times ``t`` (up to float
    roundoff); ``t`` is exactly unimodular.  ``iterations_used`` counts the
    algorithm's own iteration unit: full sweeps for ``mclll``, single
    column visits for ``fclll_wen`` and ``lll_reduce_real``.  ``converged``
    is True only when the run exited through its swap flag rather than the
    iteration cap.
    """

    q_tilde: np.ndarray
    r_tilde: np.ndarray
    t: GaussIntMatrix
    iterations_used: int
    converged: bool
    swap_count: int
    swap_history: list[int]
    visit_swaps: list[int]
    swap_columns: list[int]
    state: ReductionState


def size_reduce_column(r, t: GaussIntMatrix, k: int, l: int,
                       counter=None, charges=None):
    """Single size-reduction step of column ``k`` against column ``l < k``.

    Rounds ``mu`` from ``r[l, k] / r[l, l]`` per component (ties away from
    zero) and, when nonzero, subtracts ``mu`` times column ``l`` from
    column ``k`` in both ``r`` (rows 0..l) and ``t``.  Mutates ``r`` and
    ``t`` in place and returns ``(r, t, mu)``.  Afterwards both components
    of ``r[l, k] / r[l, l]`` have magnitude <= 1/2.
    """
    d = complex(r[l, l])
    if abs(d) < DIAG_TOL:
        raise ZeroDiagonal(f"|r[{l},{l}]| = {abs(d):.3e} below {DIAG_TOL:.0e}")
    ratio = complex(r[l, k]) / d
    mu_re = int(math.copysign(math.floor(abs(ratio.real) + 0.5), ratio.real))
    mu_im = int(math.copysign(math.floor(abs(ratio.imag) + 0.5), ratio.imag))
    if counter is not None:
        counter.size_reduction += charges.size_check
    mu = complex(mu_re, mu_im)
    if mu_re or mu_im:
        r[: l + 1, k] -= mu * r[: l + 1, l]
        t.col_update(k, l, mu_re, mu_im)
        if counter is not None:
            counter.size_reduction += charges.size_update
    return r, t, mu


def lovasz_check(r, k: int, delta: float) -> bool:
    """True when a swap is needed at pivot ``k``:
    ``delta*|r[k-1,k-1]|^2 > |r[k,k]|^2 + |r[k-1,k]|^2``."""
    return delta * abs(r[k - 1, k - 1]) ** 2 > abs(r[k, k]) ** 2 + abs(r[k - 1, k]) ** 2


def siegel_check(r, k: int, delta: float) -> bool:
    """True when a swap is needed at pivot ``k`` under the Siegel test:
    ``delta*|r[k-1,k-1]|^2 > |r[k,k]|^2`` (cross term dropped)."""
    return delta * abs(r[k - 1, k - 1]) ** 2 > abs(r[k, k]) ** 2


def _size_reduce_full(r, t, k, counter, charges):
    """Full size reduction of column ``k`` against l = k-1 .. 0."""
    for l in range(k - 1, -1, -1):
        size_reduce_column(r, t, k, l, counter, charges)
    if counter is not None:
        counter.size_reduction += charges.size_visit


def _swap_and_restore(q, r, t, k, counter, charges):
    """Swap columns (k-1, k) of r and t, then re-triangularize with a
    Givens rotation applied to r from the left and q from the right."""
    r[:, [k - 1, k]] = r[:, [k, k - 1]]
    t.swap_cols(k - 1, k)
    theta = givens_theta(r, k)
    apply_givens_left(theta, r, k, k - 1)
    apply_givens_right(theta, q, k)
    if counter is not None:
        counter.column_swap += charges.column_swap
        counter.givens_computation += charges.givens
        counter.rotation_r += charges.rotation_r
        counter.rotation_q += charges.rotation_q


def _charge_swap_check(counter, charges, condition):
    if counter is not None:
        if condition == "siegel":
            counter.swap_condition += charges.swap_check_siegel
        else:
            counter.swap_condition += charges.swap_check_lovasz


def _check_counting(counter, charges):
    if (counter is None) != (charges is None):
        raise ValueError("counter and charges must be passed together")


def mclll(h, params: ReductionParams | None = None,
          counter=None, charges=None) -> ReductionResult:
    """Reduced-iteration modified complex LLL.

    Runs up to ``params.iter_max`` full sweeps over k = 1..n-1.  Each sweep
    fully size-reduces column k, then applies the swap test (Siegel by
    default); a swap is followed by a Givens re-triangularization and the
    sweep continues at k+1 (no step-back; deferred violations are fixed by
    later sweeps).  A single scalar flag ends the loop as soon as a sweep
    completes without any swap.
    """
    _check_counting(counter, charges)
    params = params or ReductionParams()
    if params.iter_max is None:
        raise ValueError("mclll requires a finite iter_max")
    check = siegel_check if params.condition == "siegel" else lovasz_check
    q, r = qr_decompose(h)
    n = r.shape[0]
    t = GaussIntMatrix.identity(n)
    visited: list[int] = []
    swap_history: list[int] = []
    visit_swaps: list[int] = []
    swap_columns: list[int] = []
    iterations = 0
    converged = False
    for _ in range(params.iter_max):
        iterations += 1
        sweep_swaps = 0
        for k in range(1, n):
            visited.append(k)
            _size_reduce_full(r, t, k, counter, charges)
            _charge_swap_check(counter, charges, params.condition)
            if check(r, k, params.delta):
                _swap_and_restore(q, r, t, k, counter, charges)
                sweep_swaps += 1
                swap_columns.append(k)
                visit_swaps.append(1)
            else:
                visit_swaps.append(0)
        swap_history.append(sweep_swaps)
        if sweep_swaps == 0:
            converged = True
            break
    state = ReductionState(
        cs_flag=1 if (swap_history and swap_history[-1] == 0) else 0,
        k_seq=visited,
        k_seq_idx=len(visited),
    )
    return ReductionResult(q, r, t, iterations, converged,
                           sum(swap_history), swap_history, visit_swaps,
                           swap_columns, state)


def fclll_wen(h, params: ReductionParams, k_seq=None,
              counter=None, charges=None) -> ReductionResult:
    """Fixed-complexity complex LLL with a per-column swap-flag table.

    One iteration visits a single pivot column taken from ``k_seq``
    (cycled when exhausted; defaults to 1, 2, ..., n-1 repeating), clears
    that column's flag, fully size-reduces it and applies the swap test
    (Lovasz by default).  A swap re-raises the flags of columns k-1..k+1.
    The loop stops when the cap is reached or when every flag in 1..n-1 is
    clear; the flag-table summation in that guard is what the modified
    algorithm's scalar flag removes.
    """
    _check_counting(counter, charges)
    if params.iter_max is None:
        raise ValueError("fclll_wen requires a finite iter_max")
    check = siegel_check if params.condition == "siegel" else lovasz_check
    q, r = qr_decompose(h)
    n = r.shape[0]
    if n < 2:
        raise ValueError("fclll_wen needs at least two columns")
    if k_seq is None:
        k_seq = list(range(1, n))
    k_seq = [int(k) for k in k_seq]
    if not k_seq or any(k < 1 or k > n - 1 for k in k_seq):
        raise ValueError("k_seq must be nonempty with entries in [1, n-1]")
    t = GaussIntMatrix.identity(n)
    flags = np.ones(n + 1, dtype=np.int64)
    visited: list[int] = []
    visit_swaps: list[int] = []
    swap_columns: list[int] = []
    idx = 0
    iterations = 0
    converged = False
    while True:
        if iterations >= params.iter_max:
            break
        if counter is not None:
            counter.flag_bookkeeping += charges.csflag_sum
        if int(flags[1:n].sum()) == 0:
            converged = True
            break
        k = k_seq[idx % len(k_seq)]
        idx += 1
        iterations += 1
        visited.append(k)
        flags[k] = 0
        _size_reduce_full(r, t, k, counter, charges)
        _charge_swap_check(counter, charges, params.condition)
        if check(r, k, params.delta):
            _swap_and_restore(q, r, t, k, counter, charges)
            flags[k - 1] = 1
            flags[k] = 1
            flags[k + 1] = 1
            visit_swaps.append(1)
            swap_columns.append(k)
        else:
            visit_swaps.append(0)
    state = ReductionState(cs_flag=flags, k_seq=visited, k_seq_idx=idx)
    return ReductionResult(q, r, t, iterations, converged,
                           sum(visit_swaps), list(visit_swaps), visit_swaps,
                           swap_columns, state)


def lll_reduce_real(h_real, params: ReductionParams | None = None,
                    counter=None, charges=None) -> ReductionResult:
    """Classic LLL on a real basis (e.g. the real embedding of a complex
    channel), run to completion with the Lovasz condition.

    Uses the standard step-back walk: after a swap the working index moves
    to max(k-1, 1), otherwise forward.  ``iterations_used`` counts column
    visits.  T stays an exact integer matrix (imaginary parts all zero).
    """
    _check_counting(counter, charges)
    params = params or ReductionParams(condition="lovasz", iter_max=None)
    if params.iter_max is not None:
        raise ValueError("lll_reduce_real runs unbounded; pass iter_max=None")
    if params.condition != "lovasz":
        raise ValueError("lll_reduce_real uses the lovasz condition")
    h_real = np.asarray(h_real)
    if np.iscomplexobj(h_real) and np.abs(h_real.imag).max() > 0:
        raise ValueError("lll_reduce_real expects a real matrix")
    q, r = qr_decompose(h_real.real)
    n = r.shape[0]
    t = GaussIntMatrix.identity(n)
    visited: list[int] = []
    visit_swaps: list[int] = []
    swap_columns: list[int] = []
    k = 1
    iterations = 0
    while k < n:
        iterations += 1
        visited.append(k)
        _size_reduce_full(r, t, k, counter, charges)
        _charge_swap_check(counter, charges, params.condition)
        if lovasz_check(r, k, params.delta):
            _swap_and_restore(q, r, t, k, counter, charges)
            visit_swaps.append(1)
            swap_columns.append(k)
            k = max(k - 1, 1)
        else:
            visit_swaps.append(0)
            k += 1
    state = ReductionState(cs_flag=1, k_seq=visited, k_seq_idx=len(visited))
    return ReductionResult(q, r, t, iterations, True,
                           sum(visit_swaps), list(visit_swaps), visit_swaps,
                           swap_columns, state)


def is_size_reduced(r, tol: float = PREDICATE_TOL) -> bool:
    """Size-reduction predicate: for every l < k, both components of
    ``r[l, k] / r[l, l]`` have magnitude <= 1/2 (within ``tol``).

    For real matrices this coincides with ``|r[l, k]| <= |r[l, l]| / 2``;
    for complex matrices the component-wise bound is what Gaussian
    rounding can actually enforce.
    """
    r = np.asarray(r)
    n = r.shape[1]
    for k in range(1, n):
        for l in range(k):
            ratio = r[l, k] / r[l, l]
            if abs(ratio.real) > 0.5 + tol or abs(ratio.imag) > 0.5 + tol:
                return False
    return True


def is_lll_reduced(r, delta: float, tol: float = PREDICATE_TOL) -> bool:
    """True when ``r`` is size-reduced and no pivot violates the Lovasz
    condition at parameter ``delta``.  Test oracle only."""
    r = np.asarray(r)
    if not is_size_reduced(r, tol):
        return False
    for k in range(1, r.shape[1]):
        lhs = delta * abs(r[k - 1, k - 1]) ** 2
        rhs = abs(r[k, k]) ** 2 + abs(r[k - 1, k]) ** 2
        if lhs > rhs * (1.0 + tol) + tol:
            return False
    return True


def is_siegel_reduced(r, delta: float, tol: float = PREDICATE_TOL) -> bool:
    """True when ``r`` is size-reduced and no pivot violates the Siegel
    condition ``delta*|r[k-1,k-1]|^2 <= |r[k,k]|^2``."""
    r = np.asarray(r)
    if not is_size_reduced(r, tol):
        return False
    for k in range(1, r.shape[1]):
        lhs = delta * abs(r[k - 1, k - 1]) ** 2
        rhs = abs(r[k, k]) ** 2
        if lhs > rhs * (1.0 + tol) + tol:
            return False
    return True


def factorization_error(h, result: ReductionResult) -> float:
    """Relative Frobenius error ``||h @ T - q_tilde @ r_tilde|| / ||h||``."""
    h = np.asarray(h, dtype=complex)
    lhs = h @ result.t.to_complex()
    rhs = result.q_tilde @ result.r_tilde
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(h))
