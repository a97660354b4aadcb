//! KEM-DEM container for arbitrary payloads.
//!
//! ```text
//! ciphertext object (CT1 or CT2) | kdf id | aead id | origin digest (32)
//!   | nonce length (1) | nonce | AEAD ciphertext
//! ```
//!
//! The file key and nonce come from HKDF-SHA-256 over the canonical
//! encoding of the KEM element. The origin digest is SHA-256 of the
//! first-level ciphertext object the file was sealed with; it survives
//! re-encryption unchanged, and the AEAD authenticates it together with
//! the version, backend and algorithm ids.

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Nonce};
use hkdf::Hkdf;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::group::{Group, RandomSource};
use crate::policy::AccessMatrix;
use crate::scheme::{
    self, CiphertextL1, CiphertextL2, DelegateeKey, PartialDecryption, ProxyReKey, PublicParams,
    SchemeError, TransformKey, TransformSecret, UserSecretKey,
};

use super::{
    decode_object_prefix, encode_object, peek_header, FormatError, ObjectType, VERSION,
};

pub const KDF_HKDF_SHA256: u8 = 0x01;
pub const AEAD_AES_256_GCM: u8 = 0x01;
pub const NONCE_LEN: usize = 12;

const AAD_LABEL: &[u8] = b"ABPRE1 sealed";
const KDF_INFO: &[u8] = b"ABPRE1 file key";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SealError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("AEAD authentication failure")]
    AeadAuthenticationFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SealedCiphertext<G: Group> {
    FirstLevel(CiphertextL1<G>),
    SecondLevel(CiphertextL2<G>),
}

impl<G: Group> SealedCiphertext<G> {
    /// The `C` component shared by both levels.
    pub fn c(&self) -> &G::Target {
        match self {
            SealedCiphertext::FirstLevel(ct) => &ct.c,
            SealedCiphertext::SecondLevel(ct) => &ct.c,
        }
    }

    pub fn policy(&self) -> &AccessMatrix {
        match self {
            SealedCiphertext::FirstLevel(ct) => &ct.policy,
            SealedCiphertext::SecondLevel(ct) => &ct.policy2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedFile<G: Group> {
    pub group: G,
    pub ct: SealedCiphertext<G>,
    pub kdf: u8,
    pub aead: u8,
    pub origin_digest: [u8; 32],
    pub nonce: Vec<u8>,
    pub body: Vec<u8>,
}

impl<G: Group> SealedFile<G> {
    pub fn decode(bytes: &[u8]) -> Result<Self, FormatError> {
        let header = peek_header(bytes)?;
        let (group, ct, used) = match header.object_type {
            ObjectType::CiphertextL1 => {
                let (g, ct, n) = decode_object_prefix::<G, CiphertextL1<G>>(bytes)?;
                (g, SealedCiphertext::FirstLevel(ct), n)
            }
            ObjectType::CiphertextL2 => {
                let (g, ct, n) = decode_object_prefix::<G, CiphertextL2<G>>(bytes)?;
                (g, SealedCiphertext::SecondLevel(ct), n)
            }
            found => {
                return Err(FormatError::TypeMismatch {
                    expected: ObjectType::CiphertextL1,
                    found,
                })
            }
        };
        let rest = &bytes[used..];
        if rest.len() < 2 + 32 + 1 {
            return Err(FormatError::TruncatedField("sealed trailer"));
        }
        let (kdf, aead) = (rest[0], rest[1]);
        if kdf != KDF_HKDF_SHA256 {
            return Err(FormatError::UnknownAlgorithm { kind: "KDF", id: kdf });
        }
        if aead != AEAD_AES_256_GCM {
            return Err(FormatError::UnknownAlgorithm {
                kind: "AEAD",
                id: aead,
            });
        }
        let origin_digest: [u8; 32] = rest[2..34].try_into().expect("32 bytes");
        let nonce_len = rest[34] as usize;
        if nonce_len != NONCE_LEN {
            return Err(FormatError::NonCanonical("nonce length"));
        }
        let nonce = rest
            .get(35..35 + nonce_len)
            .ok_or(FormatError::TruncatedField("nonce"))?
            .to_vec();
        let body = rest[35 + nonce_len..].to_vec();
        let file = SealedFile {
            group,
            ct,
            kdf,
            aead,
            origin_digest,
            nonce,
            body,
        };
        Ok(file)
    }

    /// Decodes and checks that the file belongs to `group`.
    pub fn decode_for(group: &G, bytes: &[u8]) -> Result<Self, FormatError> {
        let file = Self::decode(bytes)?;
        if &file.group != group {
            return Err(FormatError::SuiteMismatch);
        }
        Ok(file)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = match &self.ct {
            SealedCiphertext::FirstLevel(ct) => encode_object(&self.group, ct),
            SealedCiphertext::SecondLevel(ct) => encode_object(&self.group, ct),
        };
        out.extend_from_slice(&self.trailer());
        out.extend_from_slice(&self.body);
        out
    }

    fn trailer(&self) -> Vec<u8> {
        let mut t = vec![self.kdf, self.aead];
        t.extend_from_slice(&self.origin_digest);
        t.push(self.nonce.len() as u8);
        t.extend_from_slice(&self.nonce);
        t
    }

    fn aad(&self) -> Vec<u8> {
        let mut aad = AAD_LABEL.to_vec();
        aad.push(VERSION);
        aad.push(G::BACKEND.as_byte());
        aad.extend_from_slice(&self.trailer());
        aad
    }

    /// A first-level file must still carry the ciphertext it was sealed with.
    fn check_origin(&self) -> Result<(), SealError> {
        if let SealedCiphertext::FirstLevel(ct) = &self.ct {
            if digest(&encode_object(&self.group, ct)) != self.origin_digest {
                return Err(SealError::AeadAuthenticationFailure);
            }
        }
        Ok(())
    }
}

fn digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

fn derive<G: Group>(group: &G, kem: &G::Target) -> ([u8; 32], [u8; NONCE_LEN]) {
    let ikm = group.target_to_bytes(kem);
    let mut okm = [0u8; 32 + NONCE_LEN];
    Hkdf::<Sha256>::new(None, &ikm)
        .expand(KDF_INFO, &mut okm)
        .expect("output length is valid for HKDF-SHA-256");
    let key = okm[..32].try_into().expect("32 bytes");
    let nonce = okm[32..].try_into().expect("12 bytes");
    (key, nonce)
}

/// Draws a random KEM element first, then encrypts it.
pub fn kem_wrap<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    policy: &AccessMatrix,
    reencryptable: bool,
    rng: &mut R,
) -> Result<(G::Target, CiphertextL1<G>), SchemeError> {
    let kem = pp.group.random_target(rng)?;
    let ct = scheme::encrypt(pp, &kem, policy, reencryptable, rng)?;
    Ok((kem, ct))
}

pub fn seal<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    policy: &AccessMatrix,
    reencryptable: bool,
    payload: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>, SealError> {
    let group = &pp.group;
    let (kem, ct) = kem_wrap(pp, policy, reencryptable, rng)?;
    let (key, nonce) = derive(group, &kem);
    let mut file = SealedFile {
        group: group.clone(),
        origin_digest: digest(&encode_object(group, &ct)),
        ct: SealedCiphertext::FirstLevel(ct),
        kdf: KDF_HKDF_SHA256,
        aead: AEAD_AES_256_GCM,
        nonce: nonce.to_vec(),
        body: Vec::new(),
    };
    let aad = file.aad();
    file.body = Aes256Gcm::new(&key.into())
        .encrypt(
            Nonce::from_slice(&nonce),
            Payload {
                msg: payload,
                aad: &aad,
            },
        )
        .expect("AES-GCM encryption of an in-memory payload");
    Ok(file.encode())
}

/// Decrypts the payload given the recovered KEM element.
pub fn open_sealed_payload<G: Group>(
    file: &SealedFile<G>,
    kem: &G::Target,
) -> Result<Vec<u8>, SealError> {
    file.check_origin()?;
    let (key, _) = derive(&file.group, kem);
    Aes256Gcm::new(&key.into())
        .decrypt(
            Nonce::from_slice(&file.nonce),
            Payload {
                msg: &file.body,
                aad: &file.aad(),
            },
        )
        .map_err(|_| SealError::AeadAuthenticationFailure)
}

pub fn open_first_level<G: Group>(
    pp: &PublicParams<G>,
    sk: &UserSecretKey<G>,
    bytes: &[u8],
) -> Result<Vec<u8>, SealError> {
    let file = SealedFile::decode_for(&pp.group, bytes)?;
    let SealedCiphertext::FirstLevel(ct) = &file.ct else {
        return Err(FormatError::TypeMismatch {
            expected: ObjectType::CiphertextL1,
            found: ObjectType::CiphertextL2,
        }
        .into());
    };
    let kem = scheme::decrypt_l1(pp, sk, ct)?;
    open_sealed_payload(&file, &kem)
}

pub fn open_second_level<G: Group>(
    pp: &PublicParams<G>,
    dk: &DelegateeKey<G>,
    bytes: &[u8],
) -> Result<Vec<u8>, SealError> {
    let file = SealedFile::decode_for(&pp.group, bytes)?;
    let ct2 = second_level(&file)?;
    let kem = scheme::decrypt_l2(pp, dk, ct2)?;
    open_sealed_payload(&file, &kem)
}

fn second_level<G: Group>(file: &SealedFile<G>) -> Result<&CiphertextL2<G>, SealError> {
    match &file.ct {
        SealedCiphertext::SecondLevel(ct2) => Ok(ct2),
        SealedCiphertext::FirstLevel(_) => Err(FormatError::TypeMismatch {
            expected: ObjectType::CiphertextL2,
            found: ObjectType::CiphertextL1,
        }
        .into()),
    }
}

/// Replaces the embedded first-level ciphertext by its re-encryption and
/// carries the sealed payload over untouched.
pub fn reencrypt_sealed<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    rk: &ProxyReKey<G>,
    bytes: &[u8],
    policy2: &AccessMatrix,
    rng: &mut R,
) -> Result<Vec<u8>, SealError> {
    let mut file = SealedFile::decode_for(&pp.group, bytes)?;
    let SealedCiphertext::FirstLevel(ct) = &file.ct else {
        return Err(FormatError::TypeMismatch {
            expected: ObjectType::CiphertextL1,
            found: ObjectType::CiphertextL2,
        }
        .into());
    };
    if !ct.is_reencryptable() {
        return Err(SchemeError::ReencryptionDisabled.into());
    }
    file.check_origin()?;
    let ct2 = scheme::reencrypt(pp, rk, ct, policy2, rng)?;
    file.ct = SealedCiphertext::SecondLevel(ct2);
    Ok(file.encode())
}

pub fn transform_sealed<G: Group>(
    pp: &PublicParams<G>,
    tk: &TransformKey<G>,
    bytes: &[u8],
) -> Result<PartialDecryption<G>, SealError> {
    let file = SealedFile::decode_for(&pp.group, bytes)?;
    Ok(scheme::transform_apply(pp, tk, second_level(&file)?)?)
}

pub fn finish_sealed<G: Group>(
    group: &G,
    secret: &TransformSecret<G>,
    pd: &PartialDecryption<G>,
    bytes: &[u8],
) -> Result<Vec<u8>, SealError> {
    let file = SealedFile::decode_for(group, bytes)?;
    let ct2 = second_level(&file)?;
    let kem = scheme::finish_decrypt(group, secret, &ct2.c, pd);
    open_sealed_payload(&file, &kem)
}
