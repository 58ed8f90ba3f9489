"""Symbol detection back-ends: plain zero forcing, lattice-reduction-aided
zero forcing with z-domain quantization, and exhaustive maximum likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    back_substitute,
    complex_from_real_vector,
    pseudo_inverse_apply,
    real_embedding_vector,
    round_gaussian,
    round_half_away,
)
from .mimo import Constellation
from .reduction import ReductionResult

ML_SEARCH_LIMIT = 2 ** 20


class SearchSpaceTooLarge(ValueError):
    """ML enumeration would exceed the search-space guard."""


@dataclass
class DetectionResult:
    """Detected symbols (always members of the active constellation) plus,
    for the LR-aided path, the unconstrained z-domain estimate."""

    symbols: np.ndarray
    z_hat: np.ndarray | None
    detector_id: str


def zf_detect(x, h, c: Constellation) -> DetectionResult:
    """Zero forcing: apply the channel pseudo-inverse, slice each entry to
    the nearest constellation point."""
    s_tilde = pseudo_inverse_apply(h, x)
    return DetectionResult(c.points[c.nearest_index(s_tilde)], None, "zf")


def quantize_z_domain(z_tilde, t, c: Constellation) -> np.ndarray:
    """Quantize a z-domain estimate onto the lattice that valid transmit
    vectors occupy after the unimodular change of basis.

    Constellation points map affinely to Gaussian integers via
    ``u = (s/scale + (1+i)*ones) / 2``, so valid z-vectors are
    ``scale * (2*w - t^{-1} (1+i) ones)`` with ``w`` Gaussian-integer.
    Rounds ``w`` component-wise (ties away from zero, matching size
    reduction) and returns the quantized z-domain vector.
    """
    z_tilde = np.asarray(z_tilde, dtype=complex)
    shift = t.solve_integer(np.full(t.n, 1 + 1j))
    w = round_gaussian((z_tilde / c.scale + shift) / 2.0)
    return c.scale * (2.0 * w - shift)


def zf_lr_detect(x, h, red: ReductionResult, c: Constellation) -> DetectionResult:
    """LR-aided zero forcing in the reduced basis.

    Solves the z-domain least squares via the reduction's own factors
    (``z = r_tilde^{-1} q_tilde^H x``, the pseudo-inverse of h @ T applied
    to x), quantizes on the z-domain lattice, maps back through T, and
    clips any out-of-alphabet entry to the nearest constellation point.
    """
    z_tilde = back_substitute(red.r_tilde, red.q_tilde.conj().T @ np.asarray(x, dtype=complex))
    z_q = quantize_z_domain(z_tilde, red.t, c)
    s_raw = red.t.to_complex() @ z_q
    return DetectionResult(c.points[c.nearest_index(s_raw)], z_tilde, "zf-lr")


def zf_lr_detect_real(x, h, red: ReductionResult, c: Constellation) -> DetectionResult:
    """LR-aided zero forcing through the real block embedding.

    ``red`` must come from reducing the real embedding of ``h`` (doubled
    dimensions, plain-integer T).  Works like ``zf_lr_detect`` but on
    stacked [Re; Im] coordinates, where constellation components map to
    integers via ``u = (s_comp/scale + 1) / 2``.
    """
    x_r = real_embedding_vector(np.asarray(x, dtype=complex))
    z_tilde = back_substitute(red.r_tilde, red.q_tilde.conj().T @ x_r).real
    shift = red.t.solve_integer(np.ones(red.t.n)).real
    w = round_half_away((z_tilde / c.scale + shift) / 2.0)
    z_q = c.scale * (2.0 * w - shift)
    s_raw = complex_from_real_vector(red.t.to_complex().real @ z_q)
    return DetectionResult(c.points[c.nearest_index(s_raw)], z_tilde, "zf-lr")


_CANDIDATE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _candidate_vectors(c: Constellation, n_t: int) -> np.ndarray:
    """All constellation vectors of length n_t, rows ordered
    lexicographically by canonical point index."""
    key = (c.m_s, n_t)
    cached = _CANDIDATE_CACHE.get(key)
    if cached is None:
        grids = np.meshgrid(*([np.arange(c.m_s)] * n_t), indexing="ij")
        idx = np.stack(grids, axis=-1).reshape(-1, n_t)
        cached = c.points[idx]
        _CANDIDATE_CACHE[key] = cached
    return cached


def ml_detect(x, h, c: Constellation) -> DetectionResult:
    """Exhaustive maximum likelihood: argmin over all constellation
    vectors of ``||x - h s||^2``, ties broken by lexicographic symbol
    index order.  Guarded by ``ML_SEARCH_LIMIT``."""
    h = np.asarray(h, dtype=complex)
    n_t = h.shape[1]
    if c.m_s ** n_t > ML_SEARCH_LIMIT:
        raise SearchSpaceTooLarge(
            f"{c.m_s}^{n_t} candidates exceed the {ML_SEARCH_LIMIT} guard"
        )
    cand = _candidate_vectors(c, n_t)
    diff = cand @ h.T - np.asarray(x, dtype=complex)[None, :]
    dist = np.einsum("ij,ij->i", diff.conj(), diff).real
    return DetectionResult(cand[int(np.argmin(dist))].copy(), None, "ml")
