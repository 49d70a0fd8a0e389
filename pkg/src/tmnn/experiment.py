"""Run an experiment spec: simulate data, run every solver, write tables and images.

Output layout under the output directory::

    results.csv             one row per solver (schema in RESULTS_COLUMNS)
    reference.ctn3          ground-truth phantom
    mask.ctn3               sampling mask
    kspace.ctn3             measured (zero-filled, possibly noisy) k-space
    reference/frame_TT.pgm  magnitude frames of the phantom
    <method>/recon.ctn3     reconstruction
    <method>/trace.csv      per-iteration trace (with trace=True)
    <method>/recon_TT.pgm   magnitude frames of the reconstruction
    <method>/error_TT.pgm   |recon - reference| frames

PGM gray level = ``round(255 * clip(value / max|reference|, 0, 1))`` for every
image, so reconstructions and error maps of all methods share one scale.
"""

from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentSpec
from .io import save_mask, save_tensor
from .metrics import error_image, snr_db
from .phantoms import make_phantom
from .sampling import (add_noise, apply_A, apply_A_star, pseudo_radial_mask,
                       undersampling_ratio, variable_density_mask)
from .solvers import SolverResult, reconstruct

__all__ = ["RESULTS_COLUMNS", "ExperimentOutcome", "run_experiment", "simulate", "write_pgm"]

logger = logging.getLogger(__name__)

RESULTS_COLUMNS = ("phantom", "mask", "ratio", "noise", "method", "snr_db", "iters", "wall_time_s")
TRACE_COLUMNS = ("iteration", "cost", "residual_tnn", "residual_mnn", "elapsed_s")


@dataclass
class ExperimentOutcome:
    rows: list[dict]
    zero_filled_snr_db: float
    failures: list[str]


def simulate(spec: ExperimentSpec):
    """Return ``(reference, mask, b)`` for the spec (noise included)."""
    ref = make_phantom(spec.phantom)
    n1, n2, n3 = ref.shape
    if spec.mask_scheme == "radial":
        mask = pseudo_radial_mask(n1, n2, n3, spec.mask_lines, spec.mask_seed,
                                  vary_frames=spec.mask_vary_frames)
    else:
        mask = variable_density_mask(n1, n2, n3, spec.mask_ratio, spec.mask_seed,
                                     vary_frames=spec.mask_vary_frames)
    b = apply_A(ref, mask)
    if spec.noise_snr_db is not None:
        b = add_noise(b, mask, spec.noise_snr_db, spec.noise_seed)
    return ref, mask, b


def write_pgm(path, image, scale: float) -> None:
    """Write a real image as binary 8-bit PGM (P5), gray = 255 * image / scale."""
    img = np.asarray(image, dtype=float)
    if scale > 0:
        gray = np.rint(255.0 * np.clip(img / scale, 0.0, 1.0)).astype(np.uint8)
    else:
        gray = np.zeros(img.shape, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def _write_frames(directory: Path, prefix: str, frames, scale: float) -> None:
    for t in range(frames.shape[2]):
        write_pgm(directory / f"{prefix}_{t:02d}.pgm", frames[:, :, t], scale)


def _solve(b, mask, cfg, timing_runs: int):
    result = reconstruct(b, mask, cfg)
    if timing_runs <= 1:
        return result, result.wall_time
    times = [result.wall_time] + [reconstruct(b, mask, cfg).wall_time for _ in range(timing_runs - 1)]
    return result, statistics.median(times)


def _mask_label(spec: ExperimentSpec) -> str:
    return f"radial({spec.mask_lines})" if spec.mask_scheme == "radial" else "random"


def run_experiment(spec: ExperimentSpec, output_dir=None, *, threads: int = 1,
                   trace: bool = False, timing: bool = False) -> ExperimentOutcome:
    """Run all solvers of `spec` and write artifacts.

    ``wall_time_s`` in results.csv is left empty unless ``timing`` is set, in
    which case each solver runs three times and the median solver wall time
    is reported; without it results.csv is byte-reproducible.
    """
    out = Path(output_dir if output_dir is not None else spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ref, mask, b = simulate(spec)
    save_tensor(out / "reference.ctn3", ref)
    save_mask(out / "mask.ctn3", mask)
    save_tensor(out / "kspace.ctn3", b)
    scale = float(np.abs(ref).max())
    (out / "reference").mkdir(exist_ok=True)
    _write_frames(out / "reference", "frame", np.abs(ref), scale)
    zf_snr = snr_db(ref, apply_A_star(b, mask))

    timing_runs = 3 if timing else 1

    def job(item):
        name, cfg = item
        try:
            return name, _solve(b, mask, cfg, timing_runs), None
        except (FloatingPointError, np.linalg.LinAlgError) as exc:
            logger.error("solver %s failed: %s", name, exc)
            return name, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(job, spec.solvers))
    else:
        outcomes = [job(item) for item in spec.solvers]

    base = {
        "phantom": spec.phantom.kind,
        "mask": _mask_label(spec),
        "ratio": f"{undersampling_ratio(mask):.4f}",
        "noise": "none" if spec.noise_snr_db is None else f"{spec.noise_snr_db:g}dB",
    }
    rows, failures = [], []
    for name, solved, err in outcomes:
        if solved is None:
            failures.append(f"{name}: {err}")
            rows.append({**base, "method": name, "snr_db": "nan", "iters": "", "wall_time_s": ""})
            continue
        result, wall = solved
        _write_method(out / name, result, ref, scale, trace)
        rows.append({
            **base,
            "method": name,
            "snr_db": f"{snr_db(ref, result.reconstruction):.4f}",
            "iters": str(result.iters_run),
            "wall_time_s": f"{wall:.4f}" if timing else "",
        })

    with open(out / "results.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULTS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return ExperimentOutcome(rows=rows, zero_filled_snr_db=zf_snr, failures=failures)


def _write_method(directory: Path, result: SolverResult, ref, scale: float, trace: bool) -> None:
    directory.mkdir(exist_ok=True)
    recon = result.reconstruction
    save_tensor(directory / "recon.ctn3", recon)
    _write_frames(directory, "recon", np.abs(recon), scale)
    errors = np.stack([error_image(ref, recon, t) for t in range(ref.shape[2])], axis=2)
    _write_frames(directory, "error", errors, scale)
    if trace:
        with open(directory / "trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for it, cost, r1, r2, el in result.trace_rows():
                writer.writerow([it, repr(cost), repr(r1), repr(r2), f"{el:.6f}"])
