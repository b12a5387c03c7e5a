//! Spatial correlations of down-converted photon pairs sent through masks
//! and thin lenses.
//!
//! A brute-force engine propagates plane-wave components through each arm
//! with a discretised 1D Fresnel integral and contracts them with the pump
//! angular spectrum. Closed-form coincidence expressions for the pump-idler
//! and idler-signal layouts sit beside it, together with the moire analysis
//! used to compare the two.

pub mod arm;
pub mod biphoton;
pub mod closed_form;
pub mod element;
pub mod error;
pub mod exec;
pub mod field;
pub mod grid;
pub mod moire;
pub mod propagate;
pub mod pump;
pub mod setup;

pub use arm::{arm_transfer_matrix, arm_transfer_matrix_at, Arm, TransferOptions, TransferRoute};
pub use biphoton::{
    coincidence_map, contract, joint_amplitude, joint_amplitude_at, slice, BiphotonState, CoincidenceMap, Contraction,
    EngineOptions, JointAmplitude, Normalization, SliceAxis, SpectralWindow,
};
pub use closed_form::{
    coincidence_idler_signal, coincidence_pump_idler, conditional_image_period, IdlerSignalGeometry,
    PumpIdlerGeometry, ScanAxis,
};
pub use element::{OpticalElement, Wavenumber};
pub use error::{Error, Result};
pub use exec::Execution;
pub use field::{gaussian_beam, ronchi_grating, sinusoidal_grating, with_aperture, SampledField};
pub use grid::{make_position_grid, GridKind, TransverseGrid};
pub use moire::{beat_frequency, fringe_spectrum, visibility, FringeSpectrum};
pub use propagate::{
    apply_element, apply_element_with, check_sampling, fresnel_propagate, fresnel_propagate_with, FresnelOperator,
    PropagationMethod,
};
pub use pump::{build_pump_spectrum, PumpModel, PumpSpectrum};
pub use num_complex::Complex64;
