//! Operations on encoded objects, with the backend taken from each
//! object's header. This is the layer the command-line tool and the C API
//! drive; every input and output is a canonical wire encoding.

use thiserror::Error;

use crate::format::{
    self, decode_object, decode_object_for, encode_object, peek_header, FormatError, ObjectType,
    SealError,
};
use crate::group::{
    BackendId, Group, GroupError, MockGroup, PairingGroup, RandomSource, SuiteParams,
};
use crate::policy::{AccessMatrix, AttributeSet, PolicyError};
use crate::scheme::{
    self, DelegateeKey, MasterKey, PartialDecryption, ProxyReKey, PublicParams, SchemeError,
    TransformKey, TransformSecret, UserSecretKey,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid suite parameters: {0}")]
    Suite(#[from] GroupError),
    #[error("AEAD authentication failure")]
    AeadAuthenticationFailure,
}

impl From<SealError> for Error {
    fn from(e: SealError) -> Self {
        match e {
            SealError::Scheme(e) => Error::Scheme(e),
            SealError::Format(e) => Error::Format(e),
            SealError::AeadAuthenticationFailure => Error::AeadAuthenticationFailure,
        }
    }
}

/// Coarse classification used for exit codes and C error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The key does not satisfy the policy, or re-encryption is disabled.
    Authorization,
    /// Malformed, mismatched or tampered input.
    Format,
    /// Bad arguments: policy syntax, attribute names, suite parameters, an
    /// exhausted randomness tape.
    Usage,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Scheme(SchemeError::PolicyNotSatisfied | SchemeError::ReencryptionDisabled) => {
                ErrorKind::Authorization
            }
            Error::Scheme(
                SchemeError::EmptyUniverse
                | SchemeError::DuplicateAttribute(_)
                | SchemeError::InvalidAttribute(_)
                | SchemeError::UnknownAttribute(_)
                | SchemeError::EmptyAttributeSet
                | SchemeError::Randomness(_),
            )
            | Error::Policy(_)
            | Error::Suite(_) => ErrorKind::Usage,
            Error::Scheme(_) | Error::Format(_) | Error::AeadAuthenticationFailure => {
                ErrorKind::Format
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! with_backend {
    ($backend:expr, $G:ident => $body:expr) => {
        match $backend {
            BackendId::Mock => {
                type $G = MockGroup;
                $body
            }
            BackendId::Pairing => {
                type $G = PairingGroup;
                $body
            }
        }
    };
}

fn backend_of(bytes: &[u8]) -> Result<BackendId> {
    Ok(peek_header(bytes)?.backend)
}

fn pp_of<G: Group>(pk: &[u8]) -> Result<PublicParams<G>> {
    Ok(decode_object::<G, PublicParams<G>>(pk)?.1)
}

/// Parses a universe listing: attributes separated by commas or
/// whitespace, `#` starts a comment.
pub fn parse_universe(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Returns the encoded `(PK, MSK)`.
pub fn setup<R: RandomSource + ?Sized>(
    suite: &SuiteParams,
    universe: &[String],
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<u8>)> {
    fn run<G: Group, R: RandomSource + ?Sized>(
        group: G,
        universe: &[String],
        rng: &mut R,
    ) -> Result<(Vec<u8>, Vec<u8>)> {
        let (pp, msk) = scheme::setup(group, universe, rng)?;
        Ok((encode_object(&pp.group, &pp), encode_object(&pp.group, &msk)))
    }
    match suite {
        SuiteParams::Mock {
            modulus,
            g2_exponent,
        } => run(MockGroup::new(*modulus, *g2_exponent)?, universe, rng),
        SuiteParams::Pairing { curve } => run(PairingGroup::new(curve)?, universe, rng),
    }
}

pub fn keygen<R: RandomSource + ?Sized>(
    pk: &[u8],
    msk: &[u8],
    attrs: &AttributeSet,
    rng: &mut R,
) -> Result<Vec<u8>> {
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        let msk = decode_object_for::<G, MasterKey<G>>(&pp.group, msk)?;
        let sk = scheme::keygen(&pp, &msk, attrs, rng)?;
        Ok(encode_object(&pp.group, &sk))
    })
}

/// Seals `payload` under `policy`; the result is a sealed file.
pub fn encrypt<R: RandomSource + ?Sized>(
    pk: &[u8],
    policy: &str,
    reencryptable: bool,
    payload: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>> {
    let policy = AccessMatrix::from_policy(policy)?;
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        Ok(format::seal(&pp, &policy, reencryptable, payload, rng)?)
    })
}

/// Returns the encoded `(proxy key, delegatee key)`.
pub fn rkgen<R: RandomSource + ?Sized>(
    pk: &[u8],
    msk: &[u8],
    sk: &[u8],
    delegatee_attrs: &AttributeSet,
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<u8>)> {
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        let msk = decode_object_for::<G, MasterKey<G>>(&pp.group, msk)?;
        let sk = decode_object_for::<G, UserSecretKey<G>>(&pp.group, sk)?;
        let (rk, dk) = scheme::rkgen(&pp, &msk, &sk, delegatee_attrs, rng)?;
        Ok((encode_object(&pp.group, &rk), encode_object(&pp.group, &dk)))
    })
}

pub fn reencrypt<R: RandomSource + ?Sized>(
    pk: &[u8],
    rk: &[u8],
    policy2: &str,
    sealed: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>> {
    let policy2 = AccessMatrix::from_policy(policy2)?;
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        let rk = decode_object_for::<G, ProxyReKey<G>>(&pp.group, rk)?;
        Ok(format::reencrypt_sealed(&pp, &rk, sealed, &policy2, rng)?)
    })
}

/// Opens a sealed file with a secret key (first level) or a delegatee key
/// (re-encrypted), chosen by the key's object type.
pub fn decrypt(pk: &[u8], key: &[u8], sealed: &[u8]) -> Result<Vec<u8>> {
    let key_type = peek_header(key)?.object_type;
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        match key_type {
            ObjectType::DelegateeKey => {
                let dk = decode_object_for::<G, DelegateeKey<G>>(&pp.group, key)?;
                Ok(format::open_second_level(&pp, &dk, sealed)?)
            }
            _ => {
                let sk = decode_object_for::<G, UserSecretKey<G>>(&pp.group, key)?;
                Ok(format::open_first_level(&pp, &sk, sealed)?)
            }
        }
    })
}

/// Returns the encoded `(transformation key, transformation secret)`.
pub fn transform_keygen<R: RandomSource + ?Sized>(
    dk: &[u8],
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<u8>)> {
    with_backend!(backend_of(dk)?, G => {
        let (group, dk) = decode_object::<G, DelegateeKey<G>>(dk)?;
        let (z, tk) = scheme::transform_keygen(&group, &dk, rng)?;
        Ok((encode_object(&group, &tk), encode_object(&group, &z)))
    })
}

/// Returns an encoded partial decryption of a re-encrypted sealed file.
pub fn transform(pk: &[u8], tk: &[u8], sealed: &[u8]) -> Result<Vec<u8>> {
    with_backend!(backend_of(pk)?, G => {
        let pp = pp_of::<G>(pk)?;
        let tk = decode_object_for::<G, TransformKey<G>>(&pp.group, tk)?;
        let pd = format::transform_sealed(&pp, &tk, sealed)?;
        Ok(encode_object(&pp.group, &pd))
    })
}

pub fn finish(z: &[u8], partial: &[u8], sealed: &[u8]) -> Result<Vec<u8>> {
    with_backend!(backend_of(z)?, G => {
        let (group, z) = decode_object::<G, TransformSecret<G>>(z)?;
        let pd = decode_object_for::<G, PartialDecryption<G>>(&group, partial)?;
        Ok(format::finish_sealed(&group, &z, &pd, sealed)?)
    })
}
