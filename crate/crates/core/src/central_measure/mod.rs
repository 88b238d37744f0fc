//! The restricted Bernoulli measures `μ_Λ` on lattice words.
//!
//! Given a validated spectrum, `μ_Λ` is the i.i.d.(Λ) measure conditioned on
//! the lattice property holding forever. Its cylinder probabilities depend on
//! a word only through its content, which is what makes it central.

mod sampling;
mod survival;
mod verify;

pub use sampling::{
    cylinder_probability, estimate_spectrum, hoeffding_tail, kernel_solver, rejection_acceptance,
    sample_central_htransform, sample_central_rejection, stream_rng, transition_row, CentralSampleReport,
    FrequencyEstimate, GreedyKernel, HTransformSampler, KernelConfig, RejectionConfig, SamplerKind, TransitionRow,
    CHUNK,
};
pub use survival::{survival, SurvivalBracket, SurvivalConfig, SurvivalSolver};
pub use verify::{
    chi_square_uniform, content_mass, content_uniformity, empirical, exact_centrality, sampler_agreement,
    total_variation, tv_envelope, verify_centrality, words_by_content, AgreementReport, CentralityReport,
    ChiSquareResult, MeasureUnderTest, SamplerUniformity, VerifyConfig, MIN_EXPECTED, P_THRESHOLD,
};
