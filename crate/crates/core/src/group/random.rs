use std::collections::VecDeque;

use rand::{CryptoRng, RngCore};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use super::ScalarField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomnessError {
    #[error("randomness tape exhausted")]
    TapeExhausted,
}

/// Where every random exponent comes from.
pub trait RandomSource {
    fn next_scalar<F: ScalarField + ?Sized>(
        &mut self,
        field: &F,
    ) -> Result<F::Scalar, RandomnessError>;
}

impl<S: RandomSource + ?Sized> RandomSource for &mut S {
    fn next_scalar<F: ScalarField + ?Sized>(
        &mut self,
        field: &F,
    ) -> Result<F::Scalar, RandomnessError> {
        (**self).next_scalar(field)
    }
}

/// Draws until the source yields a nonzero scalar.
pub fn draw_nonzero<F, R>(field: &F, rng: &mut R) -> Result<F::Scalar, RandomnessError>
where
    F: ScalarField + ?Sized,
    R: RandomSource + ?Sized,
{
    loop {
        let s = rng.next_scalar(field)?;
        if !field.is_zero(&s) {
            return Ok(s);
        }
    }
}

/// Uniform scalars from a cryptographic RNG.
#[derive(Debug, Clone)]
pub struct RngSource<R>(pub R);

impl<R: RngCore + CryptoRng> RngSource<R> {
    pub fn new(rng: R) -> Self {
        RngSource(rng)
    }
}

impl<R: RngCore + CryptoRng> RandomSource for RngSource<R> {
    fn next_scalar<F: ScalarField + ?Sized>(
        &mut self,
        field: &F,
    ) -> Result<F::Scalar, RandomnessError> {
        Ok(field.random_scalar(&mut self.0))
    }
}

/// Replays a fixed list of integers as scalars (reduced mod p).
///
/// Used for worked transcripts; fails once the list runs out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tape {
    values: VecDeque<u64>,
}

impl Tape {
    pub fn new<I: IntoIterator<Item = u64>>(values: I) -> Self {
        Tape {
            values: values.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.values.len()
    }
}

impl RandomSource for Tape {
    fn next_scalar<F: ScalarField + ?Sized>(
        &mut self,
        field: &F,
    ) -> Result<F::Scalar, RandomnessError> {
        let v = self.values.pop_front().ok_or(RandomnessError::TapeExhausted)?;
        Ok(field.scalar_from_u64(v))
    }
}

/// Runtime-selected source, used by the CLI and the C API.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum DynSource {
    Os(RngSource<rand::rngs::OsRng>),
    Seeded(RngSource<ChaCha20Rng>),
    Tape(Tape),
}

impl DynSource {
    pub fn os() -> Self {
        DynSource::Os(RngSource(rand::rngs::OsRng))
    }

    pub fn seeded(seed: u64) -> Self {
        use rand::SeedableRng;
        DynSource::Seeded(RngSource(ChaCha20Rng::seed_from_u64(seed)))
    }

    pub fn tape<I: IntoIterator<Item = u64>>(values: I) -> Self {
        DynSource::Tape(Tape::new(values))
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, DynSource::Os(_))
    }
}

impl RandomSource for DynSource {
    fn next_scalar<F: ScalarField + ?Sized>(
        &mut self,
        field: &F,
    ) -> Result<F::Scalar, RandomnessError> {
        match self {
            DynSource::Os(r) => r.next_scalar(field),
            DynSource::Seeded(r) => r.next_scalar(field),
            DynSource::Tape(t) => t.next_scalar(field),
        }
    }
}
