//! Canonical binary encoding of keys and ciphertexts, and the sealed-file
//! container used to encrypt arbitrary payloads.
//!
//! Every object starts with a 9-octet header
//!
//! ```text
//! "ABPRE1" | version (0x01) | backend (0x00 mock, 0x01 pairing) | object type
//! ```
//!
//! followed by TLV fields in a fixed order. Field 1 is always the group
//! suite, so an object can be decoded without its public parameters.
//! Decoding is strict: any deviation from the canonical form is an error,
//! which makes `encode(decode(b)) == b` for every accepted `b`.
//! The octet-level layout is documented in `FORMAT.md`.

mod objects;
mod sealed;
#[doc(hidden)]
pub mod wire;

use thiserror::Error;

use crate::group::{BackendId, Group, GroupError};
use crate::policy::PolicyError;

pub use sealed::{
    finish_sealed, kem_wrap, open_first_level, open_second_level, open_sealed_payload,
    reencrypt_sealed, seal, transform_sealed, SealError, SealedCiphertext, SealedFile,
    AEAD_AES_256_GCM, KDF_HKDF_SHA256, NONCE_LEN,
};

pub const MAGIC: &[u8; 6] = b"ABPRE1";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 9;

const SUITE_TAG: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ObjectType {
    PublicParams = 0x01,
    MasterKey = 0x02,
    SecretKey = 0x03,
    ProxyReKey = 0x04,
    DelegateeKey = 0x05,
    CiphertextL1 = 0x06,
    CiphertextL2 = 0x07,
    TransformKey = 0x08,
    TransformSecret = 0x09,
    PartialDecryption = 0x0a,
}

impl ObjectType {
    pub fn from_byte(b: u8) -> Option<Self> {
        use ObjectType::*;
        Some(match b {
            0x01 => PublicParams,
            0x02 => MasterKey,
            0x03 => SecretKey,
            0x04 => ProxyReKey,
            0x05 => DelegateeKey,
            0x06 => CiphertextL1,
            0x07 => CiphertextL2,
            0x08 => TransformKey,
            0x09 => TransformSecret,
            0x0a => PartialDecryption,
            _ => return None,
        })
    }

    /// Objects that must not be written with world-readable permissions.
    pub fn is_secret(self) -> bool {
        use ObjectType::*;
        matches!(
            self,
            MasterKey | SecretKey | ProxyReKey | DelegateeKey | TransformKey | TransformSecret
        )
    }

    pub fn name(self) -> &'static str {
        use ObjectType::*;
        match self {
            PublicParams => "public parameters",
            MasterKey => "master key",
            SecretKey => "secret key",
            ProxyReKey => "proxy re-encryption key",
            DelegateeKey => "delegatee key",
            CiphertextL1 => "first-level ciphertext",
            CiphertextL2 => "re-encrypted ciphertext",
            TransformKey => "transformation key",
            TransformSecret => "transformation secret",
            PartialDecryption => "partial decryption",
        }
    }
}

impl std::fmt::Display for ObjectType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported format version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown backend id {0:#04x}")]
    UnknownBackend(u8),
    #[error("backend mismatch: expected {expected}, found {found}")]
    BackendMismatch { expected: BackendId, found: BackendId },
    #[error("unknown object type {0:#04x}")]
    UnknownObjectType(u8),
    #[error("object type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        expected: ObjectType,
        found: ObjectType,
    },
    #[error("truncated {0}")]
    TruncatedField(&'static str),
    #[error("unexpected field tag {found} (expected {expected})")]
    UnexpectedTag { expected: u8, found: u8 },
    #[error("trailing bytes after object")]
    TrailingBytes,
    #[error("object belongs to a different group suite")]
    SuiteMismatch,
    #[error("invalid element: {0}")]
    InvalidElement(GroupError),
    #[error("invalid attribute `{0}`")]
    InvalidAttribute(String),
    #[error("non-canonical encoding: {0}")]
    NonCanonical(&'static str),
    #[error("invalid access matrix: {0}")]
    InvalidMatrix(PolicyError),
    #[error("unknown {kind} id {id:#04x}")]
    UnknownAlgorithm { kind: &'static str, id: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub backend: BackendId,
    pub object_type: ObjectType,
}

/// Validates and returns the 9-octet header.
pub fn peek_header(bytes: &[u8]) -> Result<Header, FormatError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::TruncatedField("header"));
    }
    if bytes[6] != VERSION {
        return Err(FormatError::UnsupportedVersion(bytes[6]));
    }
    let backend = BackendId::from_byte(bytes[7]).ok_or(FormatError::UnknownBackend(bytes[7]))?;
    let object_type =
        ObjectType::from_byte(bytes[8]).ok_or(FormatError::UnknownObjectType(bytes[8]))?;
    Ok(Header {
        backend,
        object_type,
    })
}

/// An object with a canonical wire encoding under group `G`.
pub trait WireObject<G: Group>: Sized {
    const OBJECT_TYPE: ObjectType;

    #[doc(hidden)]
    fn write_fields(&self, w: &mut wire::Writer<'_, G>);

    #[doc(hidden)]
    fn read_fields(group: &G, r: &mut wire::Reader<'_, '_, G>) -> Result<Self, FormatError>;
}

pub fn encode_object<G: Group, T: WireObject<G>>(group: &G, object: &T) -> Vec<u8> {
    let mut buf = Vec::with_capacity(256);
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.push(G::BACKEND.as_byte());
    buf.push(T::OBJECT_TYPE as u8);
    let mut w = wire::Writer::new(group, buf);
    let params = group.params_to_bytes();
    w.field(SUITE_TAG, |w| w.raw(&params));
    object.write_fields(&mut w);
    w.into_bytes()
}

/// Decodes a complete object; returns its group suite alongside it.
pub fn decode_object<G: Group, T: WireObject<G>>(bytes: &[u8]) -> Result<(G, T), FormatError> {
    let (group, object, used) = decode_object_prefix::<G, T>(bytes)?;
    if used != bytes.len() {
        return Err(FormatError::TrailingBytes);
    }
    Ok((group, object))
}

/// Decodes a complete object that must belong to `group`.
pub fn decode_object_for<G: Group, T: WireObject<G>>(
    group: &G,
    bytes: &[u8],
) -> Result<T, FormatError> {
    let (found, object) = decode_object::<G, T>(bytes)?;
    if &found != group {
        return Err(FormatError::SuiteMismatch);
    }
    Ok(object)
}

/// Decodes an object at the start of `bytes`, returning the octets consumed.
pub fn decode_object_prefix<G: Group, T: WireObject<G>>(
    bytes: &[u8],
) -> Result<(G, T, usize), FormatError> {
    let header = peek_header(bytes)?;
    if header.backend != G::BACKEND {
        return Err(FormatError::BackendMismatch {
            expected: G::BACKEND,
            found: header.backend,
        });
    }
    if header.object_type != T::OBJECT_TYPE {
        return Err(FormatError::TypeMismatch {
            expected: T::OBJECT_TYPE,
            found: header.object_type,
        });
    }
    let body = &bytes[HEADER_LEN..];
    let group = read_suite::<G>(body)?;
    let mut r = wire::Reader::new(&group, body);
    r.field(SUITE_TAG, "suite", |r| {
        r.take(r.remaining().len(), "suite")?;
        Ok(())
    })?;
    let object = T::read_fields(&group, &mut r)?;
    let used = HEADER_LEN + r.position();
    Ok((group, object, used))
}

fn read_suite<G: Group>(body: &[u8]) -> Result<G, FormatError> {
    if body.first() != Some(&SUITE_TAG) {
        return Err(match body.first() {
            Some(&found) => FormatError::UnexpectedTag {
                expected: SUITE_TAG,
                found,
            },
            None => FormatError::TruncatedField("suite"),
        });
    }
    let len = body
        .get(1..5)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")) as usize)
        .ok_or(FormatError::TruncatedField("suite"))?;
    let params = body
        .get(5..5 + len)
        .ok_or(FormatError::TruncatedField("suite"))?;
    let group = G::params_from_bytes(params).map_err(FormatError::InvalidElement)?;
    if group.params_to_bytes() != params {
        return Err(FormatError::NonCanonical("suite parameters"));
    }
    Ok(group)
}
