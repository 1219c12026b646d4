"""Time-trace conditioning, discrete Fourier transform, and peak extraction.

Traces are mean-subtracted before transforming (population signals carry a
large static offset that would otherwise mask the low-frequency peaks) and
zero-padded to a power of two for the radix-2 transform.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError


@dataclass
class TimeTrace:
    """Uniformly sampled real signal: spacing in microseconds plus samples."""
    dt: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass
class SpectrumData:
    """Magnitude spectrum: bin width, frequency axis, amplitudes, phases."""
    df: float
    freqs: np.ndarray
    amplitudes: np.ndarray
    phase: np.ndarray
    axis_unit: str = "MHz"


@dataclass
class Peak:
    """One interpolated spectral peak."""
    frequency: float
    amplitude: float
    bin: int


@dataclass
class PeakList:
    """Peaks sorted by amplitude, largest first."""
    peaks: list

    def __iter__(self):
        return iter(self.peaks)

    def __len__(self):
        return len(self.peaks)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def dft(trace: TimeTrace, window: str | None = "none",
        zero_pad_factor: int = 4) -> SpectrumData:
    """Magnitude spectrum of the mean-subtracted, windowed, padded trace.

    The padded length is the next power of two at or above
    len(samples) * zero_pad_factor. With window "none" and factor 1 the
    transform satisfies Parseval's identity exactly (up to rounding).
    """
    samples = np.asarray(trace.samples, dtype=float)
    if trace.dt <= 0:
        raise InvalidArgumentError("trace.dt must be positive")
    if len(samples) < 8:
        raise InvalidArgumentError("need at least 8 samples")
    if zero_pad_factor < 1:
        raise InvalidArgumentError("zero_pad_factor must be at least 1")
    if window not in (None, "none", "hann"):
        raise InvalidArgumentError("window must be 'none' or 'hann'")
    x = samples - samples.mean()
    if window == "hann":
        x = x * np.hanning(len(x))
    n_pad = _next_pow2(int(np.ceil(len(x) * zero_pad_factor)))
    spectrum = np.fft.rfft(x, n_pad)
    df = 1.0 / (n_pad * trace.dt)
    freqs = np.arange(len(spectrum)) * df
    return SpectrumData(df=df, freqs=freqs,
                        amplitudes=np.abs(spectrum), phase=np.angle(spectrum))


def find_peaks(spec: SpectrumData, rel_threshold: float = 0.2) -> PeakList:
    """Strict local maxima above rel_threshold * max amplitude.

    Peak frequency and amplitude are refined by three-point parabolic
    interpolation. An all-zero spectrum yields an empty list.
    """
    if not 0.0 < rel_threshold < 1.0:
        raise InvalidArgumentError("rel_threshold must lie in (0, 1)")
    amps = spec.amplitudes
    peak_floor = rel_threshold * amps.max() if len(amps) else 0.0
    found = []
    if peak_floor > 0.0:
        for k in range(1, len(amps) - 1):
            b = amps[k]
            if b > amps[k - 1] and b > amps[k + 1] and b >= peak_floor:
                a, c = amps[k - 1], amps[k + 1]
                shift = 0.5 * (a - c) / (a - 2 * b + c)
                found.append(Peak(frequency=float(spec.freqs[k] + shift * spec.df),
                                  amplitude=float(b - 0.25 * (a - c) * shift),
                                  bin=k))
    found.sort(key=lambda p: -p.amplitude)
    return PeakList(peaks=found)


def normalize_axis(spec: SpectrumData, omega1: float) -> SpectrumData:
    """Rescale the frequency axis to units of the drive amplitude."""
    if omega1 <= 0:
        raise InvalidArgumentError("omega1 must be positive")
    return SpectrumData(df=spec.df / omega1, freqs=spec.freqs / omega1,
                        amplitudes=spec.amplitudes, phase=spec.phase,
                        axis_unit="frequency/omega1")
