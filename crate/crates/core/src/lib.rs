//! Dissipation spectra and Gaussian correlation dynamics of bosonic lattices
//! whose only coupling to the environment is a single squeezed "drain" site.
//!
//! The pipeline is:
//!
//! 1. [`lattice`] builds the hopping matrix `H` and picks the drain site.
//! 2. [`eigen`] diagonalizes `H` and keeps the drain-coupled modes together
//!    with their drain amplitudes and level spacings.
//! 3. [`spectrum`] forms the non-Hermitian dynamical matrix, diagonalizes it
//!    and builds its left eigenvectors and inverse in closed form;
//!    [`approx`] evaluates the large-system dissipation spectrum from `H`
//!    alone, and [`ring`] holds the flux-ring analytics.
//! 4. [`gaussian`], [`evolve`] and [`lightcone`] propagate the correlation
//!    matrices under the squeezed bath and analyse the ballistic light cone.
//!
//! Energies and rates are in units of the hopping rate `J` of the model;
//! times in units of `1/J`.

pub mod approx;
pub mod eigen;
pub mod error;
pub mod evolve;
pub mod gaussian;
pub mod lattice;
pub mod lightcone;
pub mod linalg;
pub mod ring;
pub mod spectrum;

pub use approx::{
    approx_dissipation_spectrum, approx_rate, classify_regime, remainder_r, remainders, ApproxSpectrum, Regime,
    RegimeInfo,
};
pub use eigen::{diagonalize_coupled, diagonalize_coupled_with, level_spacings, EigenOptions, EigenSystem};
pub use error::{Error, Result};
pub use evolve::{
    default_jeff, evolve_exact, evolve_rk4_oracle, intermediate_correlations, steady_state, ExactPropagator,
    Rk4Options,
};
pub use gaussian::{to_site_basis, Basis, BathSpec, GaussianState, TrajectoryRecord};
pub use lattice::{
    build_chain, build_hofstadter, build_ring_flux, build_step_chain, Geometry, LatticeModel, ModelKind, ModelSpec,
};
pub use lightcone::{fit_front_speed, light_cone_profile, light_cone_profile_with, LightConeOptions, LightConeProfile};
pub use ring::{ring_analytics, RingAnalytics};
pub use spectrum::{
    closed_form_inverse, closed_form_left_eigenvectors, dynamical_matrix, exact_dynamical_spectrum, refine_root,
    self_consistency, site_dynamical_matrix, DynamicalSpectrum, ModeVectors,
};

pub use num_complex::Complex64 as C64;
