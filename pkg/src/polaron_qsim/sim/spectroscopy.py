"""FFT spectroscopy of Ramsey signals and the U_imp phase-diagram sweep."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import get_window

from ..errors import ConfigError, NumericalError
from .ed_oracle import exact_signal
from .ramsey import RamseyConfig, RamseySignal, measure_signal

logger = logging.getLogger("polaron_qsim.spectroscopy")

Window = Literal["hann", "none"]
SignalSource = Literal["ed", "circuit"]

MIN_SAMPLES = 8
DEFAULT_PAD = 8


@dataclass(frozen=True)
class SpectralDensity:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    window: Window
    source: str
    real_only: bool
    dt: float
    zero_pad_factor: int

    @property
    def spacing(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


class SpectralPeak(NamedTuple):
    energy: float
    amplitude: float
    degenerate: bool = False


class BranchFit(NamedTuple):
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class PhaseDiagramGrid:
    u_values: np.ndarray
    frequencies: np.ndarray
    amplitude_matrix: np.ndarray
    peak_track: np.ndarray
    peak_amplitudes: np.ndarray

    def normalized(self) -> np.ndarray:
        """Each row scaled to unit maximum; zero rows stay zero."""
        peak = self.amplitude_matrix.max(axis=1, keepdims=True)
        return np.divide(self.amplitude_matrix, peak, out=np.zeros_like(self.amplitude_matrix), where=peak > 0)


def _uniform_step(times: np.ndarray) -> float:
    if times.size < MIN_SAMPLES:
        raise ConfigError(f"FFT needs at least {MIN_SAMPLES} samples, got {times.size}")
    steps = np.diff(times)
    dt = float(steps.mean())
    if dt <= 0 or not np.allclose(steps, dt, rtol=1e-6, atol=1e-9):
        raise ConfigError("FFT needs a uniform, ascending time grid")
    return dt


def fft_spectrum(signal: RamseySignal, window: Window = "hann", zero_pad_factor: int = DEFAULT_PAD) -> SpectralDensity:
    """Magnitude spectrum A(w) = dt * |sum_k w_k S(t_k) exp(+i w t_k)|.

    A component exp(-iEt) of S shows up at w = +E. A real-only signal gives a
    spectrum symmetric in w, flagged by ``real_only``.
    """
    if zero_pad_factor < 1:
        raise ConfigError(f"zero_pad_factor must be >= 1, got {zero_pad_factor}")
    times = np.asarray(signal.times, dtype=float)
    dt = _uniform_step(times)
    s = signal.complex_signal()
    n = s.size
    taper = get_window("hann", n, fftbins=False) if window == "hann" else np.ones(n)
    n_fft = n * zero_pad_factor
    # conj turns numpy's exp(-i w t) kernel into exp(+i w t)
    raw = sp_fft.fft(np.conj(s * taper), n=n_fft)
    amplitudes = dt * np.abs(sp_fft.fftshift(raw))
    frequencies = 2.0 * np.pi * sp_fft.fftshift(sp_fft.fftfreq(n_fft, d=dt))
    return SpectralDensity(
        frequencies=frequencies,
        amplitudes=amplitudes,
        window=window,
        source=signal.provenance,
        real_only=signal.im_s is None,
        dt=dt,
        zero_pad_factor=zero_pad_factor,
    )


def peak_energy(spec: SpectralDensity, search_range: Optional[Tuple[float, float]] = None) -> SpectralPeak:
    """Parabolic-interpolated argmax of A(w) inside ``search_range``."""
    if spec.amplitudes.size == 0:
        raise ConfigError("empty spectrum")
    if search_range is None:
        search_range = (0.0, np.inf) if spec.real_only else (-np.inf, np.inf)
    lo, hi = search_range
    idx = np.flatnonzero((spec.frequencies >= lo - 1e-12) & (spec.frequencies <= hi + 1e-12))
    if idx.size == 0:
        raise ConfigError(f"no frequency bins inside {search_range}")
    a = spec.amplitudes
    sub = a[idx]
    if np.ptp(sub) <= 1e-12 * max(1.0, float(sub.max())):
        return SpectralPeak(float(spec.frequencies[idx[0]]), float(sub[0]), True)
    k = int(idx[np.argmax(sub)])
    energy = float(spec.frequencies[k])
    amplitude = float(a[k])
    if 0 < k < a.size - 1:
        left, centre, right = a[k - 1], a[k], a[k + 1]
        denom = left - 2.0 * centre + right
        if denom < 0:
            delta = 0.5 * (left - right) / denom
            energy += delta * spec.spacing
            amplitude = float(centre - 0.25 * (left - right) * delta)
    return SpectralPeak(energy, amplitude, False)


def _with_u(config: RamseyConfig, u: float) -> RamseyConfig:
    return config.model_copy(update={"params": config.params.model_copy(update={"u_imp": float(u)})})


def sweep_phase_diagram(
    base_config: RamseyConfig,
    u_grid: Sequence[float],
    source: SignalSource = "ed",
    window: Window = "hann",
    zero_pad_factor: int = DEFAULT_PAD,
    search_range: Optional[Tuple[float, float]] = None,
    threads: int = 1,
) -> PhaseDiagramGrid:
    us = np.asarray(u_grid, dtype=float)
    if us.size == 0 or np.any(us <= 0) or np.any(np.diff(us) <= 0):
        raise ConfigError("u_grid must be non-empty, positive and strictly ascending")

    def row(u: float) -> Tuple[SpectralDensity, SpectralPeak]:
        cfg = _with_u(base_config, u)
        signal = exact_signal(cfg) if source == "ed" else measure_signal(cfg)
        spec = fft_spectrum(signal, window, zero_pad_factor)
        return spec, peak_energy(spec, search_range)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, us))
    else:
        rows = [row(u) for u in us]

    logger.info("phase diagram: %d rows from %s signals", len(rows), source)
    return PhaseDiagramGrid(
        u_values=us,
        frequencies=rows[0][0].frequencies,
        amplitude_matrix=np.vstack([spec.amplitudes for spec, _ in rows]),
        peak_track=np.array([p.energy for _, p in rows]),
        peak_amplitudes=np.array([p.amplitude for _, p in rows]),
    )


def linear_branch_fit(grid: PhaseDiagramGrid, u_min: float) -> BranchFit:
    mask = grid.u_values >= u_min
    if int(mask.sum()) < 3:
        raise NumericalError(f"linear branch fit needs >= 3 points with U_imp >= {u_min}, got {int(mask.sum())}")
    x = grid.u_values[mask]
    y = grid.peak_track[mask]
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return BranchFit(float(slope), float(intercept), r2)
