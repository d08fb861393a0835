//! Nonexistence/existence certificates: the Pucci–Serrin identity evaluated
//! on computed solutions, the sign test that drives the nonexistence
//! argument, and certificates that combine the geometric hypothesis checks
//! with the exponent comparison.
//!
//! A verdict is a pure function of the recorded checks and the exponent
//! (see [`decide`]); any failed hypothesis yields `INCONCLUSIVE`.

mod certificate;
mod hopf;
mod pohozaev;
mod rotational;

pub use certificate::{decide, Certificate, CheckRecord, CheckWitness, ExponentRanges, Verdict};
pub use hopf::certify_hopf;
pub use pohozaev::{final_inequality, pohozaev_terms, ChiKind, PohozaevTerms};
pub use rotational::{certify_ball_product, certify_doubly_starshaped, BallProductCertificate, ALPHA_MARGIN};
