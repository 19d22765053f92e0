//! Closed-form and semi-analytic estimates: perturbative quality factors,
//! Landau–Zener rates, wire free-fermion spectra and relaxed-limit thresholds.

mod landau_zener;
mod quality;
mod relaxed;
mod wire;

pub use landau_zener::{lz_max_rate, lz_probability, rabi_frequency};
pub use quality::{alpha1_bound, quality_params, QualityParams};
pub use relaxed::{
    beta_star, incorrect_excited_census, mean_field_crossing, relaxed_crossing, relaxed_ql, threshold_crossing,
    ExcitedCensus,
};
pub use wire::{
    crossing_point, fit_nu, nu1_analytic, wire_fmax_model, wire_lz_params, wire_q1, wire_spectrum, wire_spectrum_levels,
    NuFit, WireLzParams,
};
