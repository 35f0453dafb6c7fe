//! Fixed-point solve and existence certificates.

mod ball;
mod certificate;
mod picard;

pub use ball::{ball_check, BallCheckReport};
pub use certificate::{
    certificate, quadratic_test, rigorous_radius, sampled_sups, CertificateMode, ExistenceCertificate,
    QuadraticTest, SampledSups,
};
pub use picard::{picard_solve, picard_solve_with, PicardOptions, SolveReport};
