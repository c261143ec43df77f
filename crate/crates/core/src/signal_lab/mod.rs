//! Synthetic test signals: the three-component validation record and
//! simulated railway wheel runs with known ground truth.

pub mod laws;
pub mod noise;
pub mod run;
pub mod validation;

pub use laws::Law;
pub use noise::gaussian_noise;
pub use run::{
    generate_run, ForceChannel, OorOrder, RunOutput, RunScenario, RunTruth, SpeedLaw,
    StiffnessSegment,
};
pub use validation::{
    correlation, generate_synthetic, generate_validation_signal, score_decomposition, validation_components, ComponentTruth,
    SyntheticComponentSpec, SyntheticSignal, ValidationScore, VALIDATION_DURATION, VALIDATION_NOISE_SIGMA,
    VALIDATION_SAMPLE_RATE,
};
