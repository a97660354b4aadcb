//! Bilinear group abstraction.
//!
//! The scheme is written against a symmetric pairing `e: G x G -> GT` of
//! prime order `p`. Two backends implement [`Group`]:
//!
//! * [`MockGroup`]: every element is represented by its discrete logarithm.
//!   All operations are exact modular arithmetic on exponents, which makes it
//!   an oracle for protocol identities. It offers no security at all.
//! * [`PairingGroup`]: BLS12-381. Source elements carry images in both pairing
//!   source groups so the asymmetric pairing can be presented symmetrically.
//!
//! Randomness always enters through a [`RandomSource`].

mod mock;
mod pairing;
mod random;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use rand::RngCore;
use thiserror::Error;

pub use mock::{is_prime_u64, MockGroup, MockScalar, MockSource, MockTarget, MOCK_TEST_PRIME};
pub use pairing::{DualPoint, PairingGroup, DEFAULT_CURVE};
pub use random::{draw_nonzero, DynSource, RandomSource, RandomnessError, RngSource, Tape};

/// Wire identifier of a backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BackendId {
    Mock = 0x00,
    Pairing = 0x01,
}

impl BackendId {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x00 => Some(BackendId::Mock),
            0x01 => Some(BackendId::Pairing),
            _ => None,
        }
    }

    pub fn as_byte(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendId::Mock => "mock",
            BackendId::Pairing => "pairing",
        }
    }
}

impl std::fmt::Display for BackendId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BackendId {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mock" => Ok(BackendId::Mock),
            "pairing" => Ok(BackendId::Pairing),
            other => Err(GroupError::UnknownBackend(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("second generator exponent must be nonzero modulo p")]
    DegenerateGenerator,
    #[error("unsupported curve `{0}`")]
    UnsupportedCurve(String),
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("elements belong to different group suites")]
    BackendMismatch,
    #[error("invalid {0} encoding")]
    InvalidEncoding(&'static str),
}

/// Arithmetic in `Z_p`.
///
/// Scalars are plain values; the field object supplies constants, inversion
/// and sampling.
pub trait ScalarField {
    type Scalar: Copy
        + Eq
        + Debug
        + Send
        + Sync
        + Add<Output = Self::Scalar>
        + Sub<Output = Self::Scalar>
        + Mul<Output = Self::Scalar>
        + Neg<Output = Self::Scalar>;

    fn zero(&self) -> Self::Scalar;
    fn one(&self) -> Self::Scalar;
    fn scalar_from_u64(&self, v: u64) -> Self::Scalar;

    fn scalar_from_i64(&self, v: i64) -> Self::Scalar {
        let magnitude = self.scalar_from_u64(v.unsigned_abs());
        if v < 0 {
            -magnitude
        } else {
            magnitude
        }
    }

    fn inverse(&self, s: &Self::Scalar) -> Result<Self::Scalar, GroupError>;

    fn is_zero(&self, s: &Self::Scalar) -> bool {
        *s == self.zero()
    }

    /// Uniform sample from `Z_p`.
    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Scalar;

    /// 32-octet big-endian canonical representative.
    fn scalar_to_bytes(&self, s: &Self::Scalar) -> [u8; 32];

    /// Rejects values `>= p`.
    fn scalar_from_bytes(&self, bytes: &[u8; 32]) -> Result<Self::Scalar, GroupError>;
}

/// A prime-order bilinear group with a fixed pair of source generators.
pub trait Group: ScalarField + Clone + Debug + PartialEq + Send + Sync {
    type Source: Clone + Eq + Debug + Send + Sync;
    type Target: Clone + Eq + Debug + Send + Sync;

    const BACKEND: BackendId;

    /// `g`.
    fn generator(&self) -> Self::Source;
    /// `g2`, published alongside `g`.
    fn second_generator(&self) -> Self::Source;

    fn source_identity(&self) -> Self::Source;
    fn source_mul(&self, x: &Self::Source, y: &Self::Source) -> Self::Source;
    fn source_exp(&self, base: &Self::Source, k: &Self::Scalar) -> Self::Source;

    fn source_inverse(&self, x: &Self::Source) -> Self::Source {
        let minus_one = -self.one();
        self.source_exp(x, &minus_one)
    }

    fn pair(&self, x: &Self::Source, y: &Self::Source) -> Self::Target;

    /// `prod_i e(x_i, y_i)`.
    fn pair_product(&self, pairs: &[(Self::Source, Self::Source)]) -> Self::Target {
        pairs.iter().fold(self.target_identity(), |acc, (x, y)| {
            self.target_mul(&acc, &self.pair(x, y))
        })
    }

    /// `e(g, g)`.
    fn target_generator(&self) -> Self::Target {
        let g = self.generator();
        self.pair(&g, &g)
    }

    fn target_identity(&self) -> Self::Target;
    fn target_mul(&self, x: &Self::Target, y: &Self::Target) -> Self::Target;
    fn target_exp(&self, base: &Self::Target, k: &Self::Scalar) -> Self::Target;
    fn target_inverse(&self, x: &Self::Target) -> Self::Target;

    fn target_div(&self, x: &Self::Target, y: &Self::Target) -> Self::Target {
        self.target_mul(x, &self.target_inverse(y))
    }

    fn random_target<R: RandomSource + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<Self::Target, RandomnessError> {
        let k = rng.next_scalar(self)?;
        Ok(self.target_exp(&self.target_generator(), &k))
    }

    fn source_to_bytes(&self, x: &Self::Source) -> Vec<u8>;
    fn source_from_bytes(&self, bytes: &[u8]) -> Result<Self::Source, GroupError>;
    fn target_to_bytes(&self, x: &Self::Target) -> Vec<u8>;
    fn target_from_bytes(&self, bytes: &[u8]) -> Result<Self::Target, GroupError>;

    /// Canonical encoding of the suite parameters.
    fn params_to_bytes(&self) -> Vec<u8>;
    fn params_from_bytes(bytes: &[u8]) -> Result<Self, GroupError>;
}

/// Parameters accepted by [`suite_new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuiteParams {
    Mock { modulus: u64, g2_exponent: u64 },
    Pairing { curve: String },
}

impl SuiteParams {
    pub fn backend(&self) -> BackendId {
        match self {
            SuiteParams::Mock { .. } => BackendId::Mock,
            SuiteParams::Pairing { .. } => BackendId::Pairing,
        }
    }
}

/// A suite of either backend, for callers that pick the backend at runtime.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum AnySuite {
    Mock(MockGroup),
    Pairing(PairingGroup),
}

impl AnySuite {
    pub fn backend(&self) -> BackendId {
        match self {
            AnySuite::Mock(_) => BackendId::Mock,
            AnySuite::Pairing(_) => BackendId::Pairing,
        }
    }
}

pub fn suite_new(params: &SuiteParams) -> Result<AnySuite, GroupError> {
    match params {
        SuiteParams::Mock {
            modulus,
            g2_exponent,
        } => MockGroup::new(*modulus, *g2_exponent).map(AnySuite::Mock),
        SuiteParams::Pairing { curve } => PairingGroup::new(curve).map(AnySuite::Pairing),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn bilinearity<G: Group>(group: &G, trials: usize) {
        let mut rng = ChaCha20Rng::seed_from_u64(0xb111);
        let g = group.generator();
        let gt = group.target_generator();
        assert_ne!(gt, group.target_identity());
        for _ in 0..trials {
            let a = group.random_scalar(&mut rng);
            let b = group.random_scalar(&mut rng);
            let lhs = group.pair(&group.source_exp(&g, &a), &group.source_exp(&g, &b));
            assert_eq!(lhs, group.target_exp(&gt, &(a * b)));
        }
    }

    #[test]
    fn suite_new_dispatches() {
        let s = suite_new(&SuiteParams::Mock {
            modulus: 13,
            g2_exponent: 7,
        })
        .unwrap();
        assert_eq!(s.backend(), BackendId::Mock);
        assert_eq!(
            suite_new(&SuiteParams::Mock {
                modulus: 12,
                g2_exponent: 7
            }),
            Err(GroupError::NonPrimeModulus(12))
        );
        assert!(matches!(
            suite_new(&SuiteParams::Pairing {
                curve: "bn254".into()
            }),
            Err(GroupError::UnsupportedCurve(_))
        ));
    }

    #[test]
    fn mock_is_bilinear() {
        bilinearity(&MockGroup::new(MOCK_TEST_PRIME, 7).unwrap(), 200);
    }

    #[test]
    fn pairing_is_bilinear() {
        bilinearity(&PairingGroup::new(DEFAULT_CURVE).unwrap(), 20);
    }

    #[test]
    fn pair_product_matches_fold() {
        let group = PairingGroup::default();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pairs: Vec<_> = (0..3)
            .map(|_| {
                let a = group.random_scalar(&mut rng);
                let b = group.random_scalar(&mut rng);
                (
                    group.source_exp(&group.generator(), &a),
                    group.source_exp(&group.second_generator(), &b),
                )
            })
            .collect();
        let folded = pairs.iter().fold(group.target_identity(), |acc, (x, y)| {
            group.target_mul(&acc, &group.pair(x, y))
        });
        assert_eq!(group.pair_product(&pairs), folded);
    }

    #[test]
    fn backend_ids_round_trip() {
        for id in [BackendId::Mock, BackendId::Pairing] {
            assert_eq!(BackendId::from_byte(id.as_byte()), Some(id));
            assert_eq!(id.name().parse::<BackendId>().unwrap(), id);
        }
        assert_eq!(BackendId::from_byte(7), None);
    }
}
