"""Single FFT spectrum and its quasiparticle peak."""
import logging

from ..sim.ed_oracle import exact_signal
from ..sim.ramsey import measure_signal, uniform_grid
from ..sim.spectroscopy import fft_spectrum, peak_energy
from ..state import SimState, Table

logger = logging.getLogger("polaron_qsim.nodes.spectrum")


def run(state: SimState) -> SimState:
    cfg = state.config
    sp = cfg.spectrum
    times = uniform_grid(sp.t_max, sp.dt)
    if sp.source == "ed":
        signal = exact_signal(cfg.ramsey_config(times=times))
    else:
        signal = measure_signal(cfg.ramsey_config(times=times, measure_imaginary=True))
    spec = fft_spectrum(signal, sp.window, sp.zero_pad_factor)
    peak = peak_energy(spec, sp.search_range())
    state.tables["spectrum"] = Table.from_rows(
        ["omega", "amplitude"], zip(spec.frequencies.tolist(), spec.amplitudes.tolist())
    )
    state.summary.update(
        {
            "U_imp": cfg.model.U_imp,
            "source": spec.source,
            "window": spec.window,
            "real_only": spec.real_only,
            "E_peak": peak.energy,
            "peak_amplitude": peak.amplitude,
            "degenerate": peak.degenerate,
        }
    )
    logger.info("spectrum: E_peak=%.4f from %s signal", peak.energy, spec.source)
    return state
