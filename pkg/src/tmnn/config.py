"""Experiment specification files.

Grammar: one ``section.key = value`` assignment per line; ``#`` starts a
comment; blank lines are ignored.  Solver sections are named,
``solver.<name>.<key>``.  Unknown keys, duplicate keys and out-of-range
values are errors.  Every key is optional::

    phantom.kind = cine             # cine | perfusion
    phantom.n1 = 64                 # default per kind (cine 64x64x10,
    phantom.n2 = 64                 #   perfusion 48x24x32)
    phantom.n3 = 10
    phantom.seed = 0
    phantom.motion_amplitude = 0.25
    phantom.uptake_rate = 1.0
    phantom.intensity = 0.05
    mask.scheme = radial            # radial | random
    mask.lines = 30                 # radial only
    mask.ratio = 0.1                # random only, in (0, 1)
    mask.seed = 0
    mask.vary_frames = true
    noise.snr_db = none             # a number in dB, or none
    noise.seed = 1
    output.dir = tmnn-output
    solver.tmnn.lambda1 = 0.1
    solver.tmnn.lambda2 = 0.1       # also mu1, mu2, max_iters, rel_tol,
                                    # variant, allow_unregularized

Without any ``solver.*`` keys the three methods tnn, mnn and tmnn are run,
with weights 0.1 / 0.1 when noise is added and 2.5e-3 / 7.5e-3 without.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .phantoms import PhantomSpec
from .solvers import VARIANTS, SolverConfig

__all__ = ["ConfigError", "ExperimentSpec", "default_solvers", "parse_spec", "parse_spec_text"]


class ConfigError(ValueError):
    """Invalid experiment specification; the message names the line or field."""


@dataclass(frozen=True)
class ExperimentSpec:
    phantom: PhantomSpec = field(default_factory=PhantomSpec)
    mask_scheme: str = "radial"
    mask_lines: int = 30
    mask_ratio: float = 0.1
    mask_seed: int = 0
    mask_vary_frames: bool = True
    noise_snr_db: float | None = None
    noise_seed: int = 1
    solvers: tuple[tuple[str, SolverConfig], ...] = ()
    output_dir: Path = Path("tmnn-output")

    def with_seed(self, seed: int) -> "ExperimentSpec":
        """Replace every seed: phantom ``seed``, mask ``seed + 1``, noise ``seed + 2``."""
        return dataclasses.replace(
            self,
            phantom=dataclasses.replace(self.phantom, seed=seed),
            mask_seed=seed + 1,
            noise_seed=seed + 2,
        )


def default_solvers(noisy: bool) -> tuple[tuple[str, SolverConfig], ...]:
    l1, l2 = (0.1, 0.1) if noisy else (2.5e-3, 7.5e-3)
    return (
        ("tnn", SolverConfig(lambda1=l1, lambda2=0.0)),
        ("mnn", SolverConfig(lambda1=0.0, lambda2=l2)),
        ("tmnn", SolverConfig(lambda1=l1, lambda2=l2)),
    )


def _int(v):
    if not re.fullmatch(r"[+-]?\d+", v):
        raise ValueError(f"expected an integer, got {v!r}")
    return int(v)


def _float(v):
    out = float(v)
    if math.isnan(out):
        raise ValueError("NaN is not allowed")
    return out


def _bool(v):
    low = v.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {v!r}")


def _opt_float(v):
    return None if v.lower() == "none" else _float(v)


def _choice(*options):
    def parse(v):
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {v!r}")
        return v
    return parse


_SCALAR_KEYS = {
    "phantom.kind": _choice("cine", "perfusion"),
    "phantom.n1": _int,
    "phantom.n2": _int,
    "phantom.n3": _int,
    "phantom.seed": _int,
    "phantom.motion_amplitude": _float,
    "phantom.uptake_rate": _float,
    "phantom.intensity": _float,
    "mask.scheme": _choice("radial", "random"),
    "mask.lines": _int,
    "mask.ratio": _float,
    "mask.seed": _int,
    "mask.vary_frames": _bool,
    "noise.snr_db": _opt_float,
    "noise.seed": _int,
    "output.dir": str,
}

_SOLVER_KEYS = {
    "lambda1": _float,
    "lambda2": _float,
    "mu1": _opt_float,
    "mu2": _opt_float,
    "max_iters": _int,
    "rel_tol": _float,
    "variant": _choice(*VARIANTS),
    "allow_unregularized": _bool,
}

_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")
_SOLVER_NAME = re.compile(r"[A-Za-z_][\w-]*")


def _parse_value(key: str, raw: str, lineno: int):
    if key in _SCALAR_KEYS:
        parser = _SCALAR_KEYS[key]
    else:
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "solver" or parts[2] not in _SOLVER_KEYS \
                or not _SOLVER_NAME.fullmatch(parts[1]):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parser = _SOLVER_KEYS[parts[2]]
    try:
        return parser(raw)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {key}: {exc}") from None


def _check_range(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def parse_spec_text(text: str) -> ExperimentSpec:
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    solver_order: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        match = _LINE.match(body)
        if match is None or not match.group(2):
            raise ConfigError(f"line {lineno}: syntax error, expected 'section.key = value': {line.strip()!r}")
        key, raw = match.groups()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        values[key] = _parse_value(key, raw, lineno)
        if key.startswith("solver."):
            name = key.split(".")[1]
            if name not in solver_order:
                solver_order.append(name)

    pkw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("phantom.")}
    try:
        phantom = PhantomSpec(**pkw)
    except ValueError as exc:
        raise ConfigError(f"phantom: {exc}") from None
    for k in ("motion_amplitude", "uptake_rate"):
        _check_range(getattr(phantom, k) >= 0, f"phantom.{k}", "must be >= 0")

    lines = values.get("mask.lines", 30)
    ratio = values.get("mask.ratio", 0.1)
    _check_range(lines >= 1, "mask.lines", f"must be >= 1, got {lines}")
    _check_range(0 < ratio < 1, "mask.ratio", f"must lie in (0, 1), got {ratio}")
    snr = values.get("noise.snr_db")
    _check_range(snr is None or math.isfinite(snr), "noise.snr_db", "must be finite or none")

    solvers = []
    for name in solver_order:
        kw = {k.split(".")[2]: v for k, v in values.items() if k.startswith(f"solver.{name}.")}
        try:
            solvers.append((name, SolverConfig(**kw)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"solver.{name}: {exc}") from None
    if not solvers:
        solvers = list(default_solvers(noisy=snr is not None))

    return ExperimentSpec(
        phantom=phantom,
        mask_scheme=values.get("mask.scheme", "radial"),
        mask_lines=lines,
        mask_ratio=ratio,
        mask_seed=values.get("mask.seed", 0),
        mask_vary_frames=values.get("mask.vary_frames", True),
        noise_snr_db=snr,
        noise_seed=values.get("noise.seed", 1),
        solvers=tuple(solvers),
        output_dir=Path(values.get("output.dir", "tmnn-output")),
    )


def parse_spec(path) -> ExperimentSpec:
    """Read and validate an experiment specification file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_spec_text(text)
