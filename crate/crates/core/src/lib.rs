//! Ciphertext-policy attribute-based proxy re-encryption with outsourced
//! decryption, over a BLS12-381 pairing or a discrete-log test group.
//!
//! * [`group`]: the bilinear group abstraction and both backends.
//! * [`policy`]: boolean policies, the LSSS compiler and reconstruction.
//! * [`scheme`]: the cryptographic operations.
//! * [`format`]: canonical encodings and the sealed-file container.
//! * [`workflow`]: the same operations on encoded objects.
//! * [`cli`]: the `abpre` tool.

pub mod cli;
pub mod format;
pub mod group;
pub mod policy;
pub mod scheme;
pub mod workflow;
