"""Monte Carlo BER/FLOP sweep driver.

One frame = one independent channel draw, one symbol vector, one noise
draw.  Frame streams derive from (master seed, frame index), so the same
frame sees the same channel, bits and base noise across algorithms and
SNR points (common random numbers), and changing the frame count never
shifts earlier frames.  Everything downstream of the config is
deterministic, byte-for-byte, including under worker-pool execution:
partial results are merged in frame order and all counts are integers.

Progress goes to the logger (stderr in the CLI); data only to the CSV.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import flops
from .detect import ml_detect, zf_detect, zf_lr_detect, zf_lr_detect_real
from .matcore import RankDeficient, real_embedding
from .mimo import (
    add_noise,
    build_constellation,
    demodulate,
    generate_channel,
    modulate,
    snr_to_noise_variance,
)
from .reduction import ReductionParams, fclll_wen, lll_reduce_real, mclll

logger = logging.getLogger(__name__)

ALGORITHMS = ("zf", "zf-lr-lll", "zf-lr-fclll", "zf-lr-mclll", "ml")
CAPPED_ALGORITHMS = ("zf-lr-fclll", "zf-lr-mclll")

SNR_DEFINITION = "sigma_n^2=n_t/10^(snr_db/10)"

CSV_HEADER = ("algorithm,iter_max,snr_db,frames,bit_errors,ber,ci95,"
              "mean_flops,flop_mode,snr_definition,seed")

_MAX_REDRAWS = 100


@dataclass(frozen=True)
class SimConfig:
    """Full description of a sweep; (config, seed) determines every output byte."""

    snr_db_grid: tuple[float, ...]
    frames: int = 10_000
    n_t: int = 4
    n_r: int = 4
    m_s: int = 16
    iter_max_list: tuple[int, ...] = (6,)
    algorithms: tuple[str, ...] = ("zf", "zf-lr-mclll")
    delta: float = 0.75
    seed: int = 0
    flop_mode: str = "dynamic"
    workers: int = 1

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.n_r < self.n_t:
            raise ValueError(f"need n_r >= n_t, got {self.n_r} < {self.n_t}")
        grid = tuple(self.snr_db_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_db_grid must be nonempty and strictly increasing")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}")
        if any(cap < 1 for cap in self.iter_max_list):
            raise ValueError("iter_max values must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        if self.flop_mode not in ("dynamic", "literal"):
            raise ValueError(f"unknown flop_mode {self.flop_mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class BerRecord:
    """One measured (algorithm, iter_max, snr) cell."""

    algorithm: str
    iter_max: int | None
    snr_db: float
    frames: int
    bit_errors: int
    ber: float
    ci95_halfwidth: float
    mean_flops: float


class FrameResult(NamedTuple):
    bit_errors: int
    flops: float
    redraws: int


@lru_cache(maxsize=8)
def _constellation(m_s: int):
    return build_constellation(m_s)


def _frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    return np.random.default_rng((seed, frame_index))


def _detect_frame(cfg: SimConfig, algorithm: str, iter_max, h, x, c):
    """Run one detector; returns (DetectionResult, reduction FLOPs)."""
    if algorithm == "zf":
        return zf_detect(x, h, c), 0
    if algorithm == "ml":
        return ml_detect(x, h, c), 0
    counter = flops.FlopCounter()
    if algorithm == "zf-lr-mclll":
        params = ReductionParams(delta=cfg.delta, condition="siegel", iter_max=iter_max)
        charges = flops.schedule_for("mclll", cfg.flop_mode, cfg.n_t, cfg.n_r, iter_max)
        red = mclll(h, params, counter, charges)
        return zf_lr_detect(x, h, red, c), counter.total
    if algorithm == "zf-lr-fclll":
        params = ReductionParams(delta=cfg.delta, condition="lovasz", iter_max=iter_max)
        charges = flops.schedule_for("fclll", cfg.flop_mode, cfg.n_t, cfg.n_r, iter_max)
        red = fclll_wen(h, params, None, counter, charges)
        return zf_lr_detect(x, h, red, c), counter.total
    if algorithm == "zf-lr-lll":
        params = ReductionParams(delta=cfg.delta, condition="lovasz", iter_max=None)
        charges = flops.schedule_for("lll", cfg.flop_mode, cfg.n_t, cfg.n_r, None)
        red = lll_reduce_real(real_embedding(h), params, counter, charges)
        return zf_lr_detect_real(x, h, red, c), counter.total
    raise ValueError(f"unknown algorithm {algorithm!r}")


def run_frame(cfg: SimConfig, algorithm: str, iter_max,
              snr_db: float, frame_index: int) -> FrameResult:
    """One Monte Carlo trial: draw channel/bits/noise from the
    (seed, frame_index) stream, detect, count bit errors.

    A rank-deficient channel draw is redrawn from the same stream (the
    whole draw sequence repeats, keeping determinism) and counted.
    """
    rng = _frame_rng(cfg.seed, frame_index)
    c = _constellation(cfg.m_s)
    spec = snr_to_noise_variance(snr_db, cfg.n_t)
    redraws = 0
    for _ in range(_MAX_REDRAWS):
        ch = generate_channel(cfg.n_r, cfg.n_t, rng)
        bits = rng.integers(0, 2, cfg.n_t * c.bits_per_symbol)
        s = modulate(bits, c, cfg.n_t)
        x = add_noise(ch.h @ s, spec, rng)
        try:
            detected, frame_flops = _detect_frame(cfg, algorithm, iter_max, ch.h, x, c)
        except RankDeficient:
            redraws += 1
            logger.warning("frame %d: rank-deficient channel, redrawing", frame_index)
            continue
        errors = int(np.sum(bits != demodulate(detected.symbols, c)))
        return FrameResult(errors, frame_flops, redraws)
    raise RuntimeError(f"frame {frame_index}: {_MAX_REDRAWS} rank-deficient redraws")


def _run_frame_range(cfg: SimConfig, algorithm: str, iter_max,
                     snr_db: float, lo: int, hi: int):
    errors = 0
    total_flops = 0
    redraws = 0
    for idx in range(lo, hi):
        res = run_frame(cfg, algorithm, iter_max, snr_db, idx)
        errors += res.bit_errors
        total_flops += res.flops
        redraws += res.redraws
    return errors, total_flops, redraws


def _cells(cfg: SimConfig):
    """Deterministic cell order: algorithm (config order), iter_max (list
    order; a single uncapped slot for cap-free detectors), then SNR."""
    for alg in cfg.algorithms:
        caps = cfg.iter_max_list if alg in CAPPED_ALGORITHMS else (None,)
        for cap in caps:
            for snr in cfg.snr_db_grid:
                yield alg, cap, snr


def run_sweep(cfg: SimConfig) -> list[BerRecord]:
    """Run the whole sweep and return one record per cell.

    Frames within a cell may run on a process pool (``cfg.workers``);
    per-range results are merged in frame order so worker count never
    changes the output.
    """
    c = _constellation(cfg.m_s)
    total_bits = cfg.frames * cfg.n_t * c.bits_per_symbol
    records = []
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for alg, cap, snr in _cells(cfg):
            if pool is None:
                errors, flops_sum, redraws = _run_frame_range(
                    cfg, alg, cap, snr, 0, cfg.frames)
            else:
                chunk = max(1, math.ceil(cfg.frames / (cfg.workers * 4)))
                bounds = list(range(0, cfg.frames, chunk)) + [cfg.frames]
                futures = [
                    pool.submit(_run_frame_range, cfg, alg, cap, snr, lo, hi)
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                ]
                errors = flops_sum = redraws = 0
                for fut in futures:
                    e, f, rd = fut.result()
                    errors += e
                    flops_sum += f
                    redraws += rd
            ber = errors / total_bits
            ci = 1.96 * math.sqrt(max(ber * (1.0 - ber), 0.0) / total_bits)
            records.append(BerRecord(alg, cap, snr, cfg.frames, errors, ber,
                                     ci, flops_sum / cfg.frames))
            if redraws:
                logger.info("cell %s/%s/%s: %d channel redraws", alg, cap, snr, redraws)
            logger.info("%s iter_max=%s snr=%g dB: ber=%.3e (%d errors)",
                        alg, cap, snr, ber, errors)
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def emit_csv(records, out, *, flop_mode: str, seed: int) -> None:
    """Write records as CSV: fixed header, one row per record, BER in
    scientific notation with 6 significant digits, newline-terminated."""
    close = False
    if isinstance(out, (str, bytes)):
        out = open(out, "w", newline="\n")
        close = True
    try:
        out.write(CSV_HEADER + "\n")
        for r in records:
            cap = "" if r.iter_max is None else str(r.iter_max)
            out.write(
                f"{r.algorithm},{cap},{r.snr_db:g},{r.frames},{r.bit_errors},"
                f"{r.ber:.5e},{r.ci95_halfwidth:.5e},{r.mean_flops:.6g},"
                f"{flop_mode},{SNR_DEFINITION},{seed}\n"
            )
    finally:
        if close:
            out.close()


def load_matrix(path: str) -> np.ndarray:
    """Read a matrix file: first line ``rows cols``, then row-major
    complex entries like ``0.5-1.25j`` separated by whitespace."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: expected 'rows cols' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    entries = tokens[2:]
    if len(entries) != rows * cols:
        raise ValueError(
            f"{path}: expected {rows * cols} entries, found {len(entries)}")
    values = [complex(tok) for tok in entries]
    return np.array(values, dtype=complex).reshape(rows, cols)


def save_matrix(path: str, m) -> None:
    """Write a matrix in the format ``load_matrix`` reads."""
    m = np.asarray(m, dtype=complex)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            fh.write(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
            fh.write("\n")
