//! Hyperelliptic curves y^2 = h(x) and their Jacobians: Mumford/Cantor
//! arithmetic on odd-degree models, point counts and L-polynomials over
//! finite fields, torsion certificates and the odd-model transform.

pub mod cantor;
pub mod certificate;
pub mod curve;
pub mod model;
pub mod zeta;

pub use cantor::MumfordDiv;
pub use certificate::{
    certificates_independent, divisor_from_certificate, divisor_mod_p, divisor_over_extension, verify_certificate,
    CertificateJson, ReducedDivisor, TorsionCertificate,
};
pub use certificate::display;
pub use curve::{bad_primes, good_primes, is_good_prime, HyperCurve, QCurve};
pub use model::{to_odd_model, OddModel};
pub use zeta::ZetaData;
