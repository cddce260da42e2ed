"""Heavy-tailed speckle models for SAR returns: densities, moments,
log-cumulants and the seeded synthetic sampler, for both the intensity
and the amplitude variant (amplitude squared equals intensity)."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import specfun


class ModelKind(enum.Enum):
    INTENSITY = "intensity"
    AMPLITUDE = "amplitude"

    @property
    def c_alpha(self) -> float:
        return 1.0 if self is ModelKind.INTENSITY else 4.0

    @property
    def k1_scale(self) -> float:
        return 1.0 if self is ModelKind.INTENSITY else 2.0

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown model {text!r}; expected intensity or amplitude") from None


class MomentUndefinedError(Exception):
    """The requested moment order violates the roughness constraint."""


@dataclass(frozen=True)
class G0Params:
    alpha: float
    gamma: float
    looks: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha < 0.0):
            raise ValueError(f"alpha must be negative, got {self.alpha!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not (math.isfinite(self.looks) and self.looks >= 1.0):
            raise ValueError(f"looks must be >= 1, got {self.looks!r}")


@dataclass(frozen=True)
class LogCumulants:
    k1: float
    k2: float
    n: int | None = None

    def __post_init__(self):
        if self.n is not None:
            if self.n < 1:
                raise ValueError(f"sample size must be positive, got {self.n!r}")
            if self.k2 < 0.0:
                raise ValueError("sample-derived k2 is a variance of logs and cannot be negative")


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    model: ModelKind

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("sample must be a nonempty 1-D array")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError("sample values must be finite and strictly positive")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


def pdf(params: G0Params, z: float, model: ModelKind) -> float:
    """Density at z, assembled in log space for numerical stability."""
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise ValueError(f"z must be positive, got {z!r}")
    a, g, looks = params.alpha, params.gamma, params.looks
    common = (looks * math.log(looks) + specfun.ln_gamma(looks - a)
              - a * math.log(g) - specfun.ln_gamma(-a) - specfun.ln_gamma(looks))
    if model is ModelKind.INTENSITY:
        logf = common + (looks - 1.0) * math.log(z) + (a - looks) * math.log(g + looks * z)
    else:
        logf = (math.log(2.0) + common + (2.0 * looks - 1.0) * math.log(z)
                + (a - looks) * math.log(g + looks * z * z))
    return math.exp(logf)


def moment(params: G0Params, r: float, model: ModelKind) -> float:
    """r-th non-central moment; defined only while the tail is light enough."""
    r = float(r)
    if r <= 0.0:
        raise ValueError(f"moment order must be positive, got {r!r}")
    a, g, looks = params.alpha, params.gamma, params.looks
    # Amplitude moments are intensity moments of half the order.
    h = r if model is ModelKind.INTENSITY else 0.5 * r
    if not a < -h:
        raise MomentUndefinedError(f"moment of order {r} needs alpha < {-h}, got {a}")
    logm = (h * math.log(g / looks) + specfun.ln_gamma(-a - h) + specfun.ln_gamma(looks + h)
            - specfun.ln_gamma(-a) - specfun.ln_gamma(looks))
    return math.exp(logm)


def theoretical_log_cumulants(params: G0Params, model: ModelKind) -> LogCumulants:
    a, g, looks = params.alpha, params.gamma, params.looks
    k1 = math.log(g / looks) + specfun.digamma(looks) - specfun.digamma(-a)
    k2 = specfun.trigamma(looks) + specfun.trigamma(-a)
    if model is ModelKind.AMPLITUDE:
        k1 *= 0.5
        k2 *= 0.25
    return LogCumulants(k1=k1, k2=k2)


def sample_log_cumulants(s: Sample) -> LogCumulants:
    """First two empirical log-cumulants; the second uses divisor n as the
    plain mean squared deviation of the logs."""
    logs = np.log(s.values)
    k1 = float(logs.mean())
    d = logs - k1
    k2 = float((d * d).mean())
    return LogCumulants(k1=k1, k2=k2, n=len(s))


def unit_mean_gamma(alpha: float) -> float:
    """Scale that makes the intensity mean exactly one."""
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha < -1.0):
        raise ValueError(f"unit-mean scale needs alpha < -1, got {alpha!r}")
    return -alpha - 1.0


def sample_g0(params: G0Params, model: ModelKind, n: int, seed: int) -> Sample:
    """n independent draws by inverse transform through the F quantile.

    The generator is counter-based so trials can be split reproducibly;
    identical (params, model, n, seed) always yields the identical sample.
    Uniform draws are taken from the open interval: endpoints and any
    non-finite or nonpositive transform output are redrawn."""
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n!r}")
    a, g, looks = params.alpha, params.gamma, params.looks
    rng = np.random.Generator(np.random.Philox(seed))
    d1, d2 = 2.0 * looks, -2.0 * a
    scale = -g / a

    def draw(count: int) -> np.ndarray:
        u = rng.random(count)
        u[u == 0.0] = np.nan  # boundary of the open interval; redrawn below
        za = np.sqrt(scale * specfun.f_quantile(u, d1, d2))
        return za * za if model is ModelKind.INTENSITY else za

    z = draw(n)
    bad = ~np.isfinite(z) | (z <= 0.0)
    while bad.any():
        z[bad] = draw(int(bad.sum()))
        bad = ~np.isfinite(z) | (z <= 0.0)
    return Sample(values=z, model=model)


def write_sample_csv(s: Sample, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z"])
        for v in s.values:
            writer.writerow([repr(float(v))])


def read_sample_csv(path, model: ModelKind) -> Sample:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["z"]:
            raise ValueError(f"{path}: expected single-column CSV with header 'z'")
        values = []
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 1:
                raise ValueError(f"{path}: expected one value per row, got {row!r}")
            values.append(float(row[0]))
    return Sample(values=np.array(values, dtype=float), model=model)
