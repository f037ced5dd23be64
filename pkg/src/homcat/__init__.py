"""Two-photon interferometry on the collective frequency axis.

Simulates filtered beam-splitter coincidence experiments whose spectral
state is a two-lobe superposition: delay traces and their beating, the
filter-displacement eraser, chronocyclic Wigner maps with their cat-term
decomposition, time-resolved coincidence detection, the double-slit
momentum analog, and chirped-pump shearing of the map.

Submodules and their names load lazily: the command-line entry point pins
BLAS/OpenMP pools to one thread for byte-reproducible output, which only
works if numpy is not yet imported when the package module executes.
"""

import importlib

__version__ = "1.0.0"

_EXPORTS = {
    "UniformAxis": "axes",
    "FrequencyAxis": "axes",
    "TimeAxis": "axes",
    "HomcatError": "errors",
    "ValidationError": "errors",
    "NumericRegimeError": "errors",
    "GridResolutionError": "errors",
    "NyquistLimitError": "errors",
    "DetectorRegimeError": "errors",
    "FarFieldError": "errors",
    "wavelength_to_angular": "spectral",
    "to_collective": "spectral",
    "to_pair": "spectral",
    "GaussianLobe": "spectral",
    "GaussianFilter": "spectral",
    "filter_product_collective": "spectral",
    "collective_marking_lobe": "spectral",
    "collective_transmission_lobe": "spectral",
    "PumpEnvelope": "spectral",
    "PhaseMatching": "spectral",
    "GaussianPhaseMatching": "spectral",
    "TwoLobePhaseMatching": "spectral",
    "FlatPhaseMatching": "spectral",
    "SampledPhaseMatching": "spectral",
    "BiphotonSpectralState": "spectral",
    "FilterPlacement": "interferometer",
    "HomConfig": "interferometer",
    "PostSelectedState": "interferometer",
    "CoincidenceTrace": "interferometer",
    "apply_beamsplitter_coincidence": "interferometer",
    "apply_filters": "interferometer",
    "coincidence_probability": "interferometer",
    "default_reduced_axis": "interferometer",
    "hom_trace": "interferometer",
    "analytic_beating": "interferometer",
    "analytic_eraser": "interferometer",
    "visibility": "interferometer",
    "ChronocyclicMap": "wigner",
    "CatDecomposition": "wigner",
    "chronocyclic_w_minus": "wigner",
    "cat_decomposition": "wigner",
    "wigner_cut": "wigner",
    "wigner_marginal_over_omega": "wigner",
    "coincidence_from_cut": "wigner",
    "DetectionModel": "timeresolved",
    "JointTemporalAmplitude": "timeresolved",
    "TimeResolvedTrace": "timeresolved",
    "select_regime": "timeresolved",
    "jta_from_jsa": "timeresolved",
    "jsa_from_jta": "timeresolved",
    "time_resolved_coincidence": "timeresolved",
    "time_resolved_coincidence_grid": "timeresolved",
    "time_resolved_trace": "timeresolved",
    "analytic_time_beating": "timeresolved",
    "SlitConfig": "young",
    "MomentumTrace": "young",
    "FractionalTrace": "young",
    "ParityReport": "young",
    "young_joint_detection": "young",
    "analytic_young": "young",
    "fractional_propagation": "young",
    "matched_parity_axis": "young",
    "compare_parity": "young",
    "PumpProfile": "phasegate",
    "PumpDerivedPhaseMatching": "phasegate",
    "ShearReport": "phasegate",
    "CutScan": "phasegate",
    "pump_amplitude": "phasegate",
    "pump_spectral_amplitude": "phasegate",
    "phase_matching_from_pump": "phasegate",
    "pump_from_phase_matching": "phasegate",
    "verify_shear": "phasegate",
    "scan_cuts": "phasegate",
    "EXPERIMENTS": "config",
    "ResolvedConfig": "config",
    "parse_config": "config",
    "resolve_config": "config",
    "print_config": "config",
    "RunResult": "runner",
    "run_experiment": "runner",
    "SubCheck": "selftest",
    "CheckResult": "selftest",
    "SelftestStage": "selftest",
    "build_stage": "selftest",
    "run_selftest": "selftest",
    "format_float": "csvio",
    "write_trace_csv": "csvio",
    "write_map_csv": "csvio",
    "read_map_csv": "csvio",
    "write_family_csv": "csvio",
}

_SUBMODULES = frozenset(
    {
        "axes",
        "cli",
        "config",
        "csvio",
        "errors",
        "interferometer",
        "phasegate",
        "plots",
        "runner",
        "selftest",
        "spectral",
        "timeresolved",
        "wigner",
        "young",
    }
)

__all__ = ["__version__", *sorted(_EXPORTS)]


def __getattr__(name):
    if name in _EXPORTS:
        module = importlib.import_module("." + _EXPORTS[name], __name__)
        value = getattr(module, name)
        globals()[name] = value
        return value
    if name in _SUBMODULES:
        return importlib.import_module("." + name, __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(__all__) | _SUBMODULES)
