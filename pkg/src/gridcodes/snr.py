"""Windowed signal-to-noise tracking, alarms, and a synthetic signal generator.

The health cue is the dB ratio of a window's mean to its standard deviation
(the reciprocal coefficient of variation).  Healthy equipment produces a
narrow band of windowed SNR values; a device drifting toward failure widens
the band, and the widening weakens with hop distance from the device.  The
generator reproduces both behaviors deterministically per seed, standing in
for field measurements that are not distributable.

All computations are pure; windows are independent and assembled in order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DegenerateSignalError, DomainError, ParseError


@dataclass(frozen=True)
class SignalWindow:
    """One analysis window of positive-valued measurements."""

    samples: np.ndarray
    rate: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.ndim != 1 or len(self.samples) < 2:
            raise ConfigError("a window needs at least 2 samples")
        if self.rate <= 0:
            raise ConfigError("sample rate must be positive")


def snr_db(window: SignalWindow | np.ndarray) -> float:
    """10 * log10(mean / sample standard deviation), in dB.

    Scale-invariant: multiplying every sample by a positive constant leaves
    the value unchanged.  A zero-variance window has no defined SNR and a
    non-positive mean indicates corrupt input (magnitudes are positive).
    """
    samples = window.samples if isinstance(window, SignalWindow) else np.asarray(window, float)
    if samples.ndim != 1 or len(samples) < 2:
        raise ConfigError("a window needs at least 2 samples")
    sigma = float(np.std(samples, ddof=1))
    mu = float(np.mean(samples))
    if sigma == 0.0:
        raise DegenerateSignalError("window has zero variance; SNR undefined")
    if mu <= 0.0:
        raise DomainError(f"window mean must be positive, got {mu:g}")
    return 10.0 * np.log10(mu / sigma)


@dataclass(frozen=True)
class SnrSeries:
    """Windowed SNR values plus band statistics over the observation period."""

    values: np.ndarray          # one dB value per full window
    window_len: int
    stride: int
    band_width: float           # max - min, dB
    band_sigma: float           # standard deviation of the values, dB

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def snr_series(signal, window_len: int, stride: int | None = None) -> SnrSeries:
    """Slide a window over the signal and collect per-window SNR values.

    Windows start at 0, window_len-aligned strides; only full windows count.
    Any degenerate window aborts with the window index in the message.
    """
    samples = np.asarray(signal, dtype=float)
    if window_len < 2:
        raise ConfigError("window_len must be at least 2")
    stride = window_len if stride is None else stride
    if stride < 1:
        raise ConfigError("stride must be at least 1")
    if len(samples) < window_len:
        raise DegenerateSignalError(
            f"signal length {len(samples)} is shorter than one window ({window_len})")
    values = []
    for w, start in enumerate(range(0, len(samples) - window_len + 1, stride)):
        chunk = samples[start:start + window_len]
        try:
            values.append(snr_db(chunk))
        except DegenerateSignalError:
            raise DegenerateSignalError(f"window {w} has zero variance") from None
    arr = np.array(values)
    return SnrSeries(
        values=arr, window_len=window_len, stride=stride,
        band_width=float(arr.max() - arr.min()),
        band_sigma=float(arr.std()),
    )


def alarm(series: SnrSeries, threshold_db: float) -> bool:
    """True when the SNR band spread exceeds the normal range."""
    return series.band_width > threshold_db


# -- synthetic generator ---------------------------------------------------------

@dataclass(frozen=True)
class SignalSpec:
    """Parameters of the synthetic per-unit measurement stream.

    The noise level ramps from ``base_sigma`` toward ``base_sigma + growth``
    at ``failure_time`` (defaults to the end of the stream).  The ramp -- the
    failure cue, not the local noise floor -- attenuates by ``attenuation``
    per hop beyond the first, so a sensor two hops out sees a weaker widening
    than one at the device's own bus.
    """

    base_level: float = 1.0
    base_sigma: float = 0.002
    growth: float = 0.02
    rate: float = 30.0
    duration_s: float = 60.0
    seed: int = 0
    hop: int = 1
    attenuation: float = 0.5
    failure_time_s: float | None = None

    def __post_init__(self):
        if self.rate <= 0 or self.duration_s <= 0:
            raise ConfigError("rate and duration must be positive")
        if self.hop < 1:
            raise ConfigError("hop counts from 1 (the device's own bus)")
        if not 0 < self.attenuation <= 1:
            raise ConfigError("attenuation must lie in (0, 1]")
        if self.base_sigma < 0 or self.growth < 0:
            raise ConfigError("noise levels must be non-negative")

    def at_hop(self, hop: int) -> "SignalSpec":
        return replace(self, hop=hop)


def synth_signal(spec: SignalSpec) -> np.ndarray:
    """Deterministic synthetic measurement stream for the given spec."""
    n = int(round(spec.rate * spec.duration_s))
    rng = np.random.default_rng(spec.seed)
    t = np.arange(n) / spec.rate
    fail_at = spec.failure_time_s if spec.failure_time_s is not None else spec.duration_s
    ramp = np.clip(t / fail_at, 0.0, 1.0) if fail_at > 0 else np.ones_like(t)
    sigma = spec.base_sigma + spec.growth * ramp * spec.attenuation ** (spec.hop - 1)
    return spec.base_level + rng.standard_normal(n) * sigma


# -- serialization ----------------------------------------------------------------

def read_signal_csv(text: str) -> np.ndarray:
    """Two-column CSV (timestamp, value); returns the value column."""
    values = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].strip().startswith("#"):
            continue
        if lineno == 1 and not _is_number(row[-1]):
            continue  # header row
        if len(row) != 2:
            raise ParseError(f"expected 2 columns (timestamp, value), got {len(row)}",
                             line=lineno)
        try:
            values.append(float(row[1]))
        except ValueError:
            raise ParseError(f"expected a numeric value, got {row[1]!r}", line=lineno) from None
    return np.array(values)


def write_signal_csv(samples, rate: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["timestamp", "value"])
    for i, v in enumerate(np.asarray(samples, dtype=float)):
        w.writerow([f"{i / rate:.6f}", f"{v:.9f}"])
    return buf.getvalue()


def write_snr_csv(series: SnrSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["window", "snr_db"])
    for i, v in enumerate(series.values):
        w.writerow([i, f"{v:.6f}"])
    return buf.getvalue()


def read_signal_spec(text: str) -> SignalSpec:
    """Generator config: a JSON object of :class:`SignalSpec` fields."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("generator spec must be a JSON object")
    allowed = set(SignalSpec.__dataclass_fields__)
    unknown = doc.keys() - allowed
    if unknown:
        raise ParseError(f"unknown generator field(s): {', '.join(sorted(unknown))}")
    try:
        return SignalSpec(**doc)
    except TypeError as exc:
        raise ParseError(f"malformed generator spec: {exc}") from None


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False
