use std::collections::BTreeMap;

use crate::group::Group;
use crate::policy::{AccessMatrix, AttributeSet};

/// Attribute-indexed key components, sorted by attribute.
pub type AttributeMap<T> = BTreeMap<String, T>;

pub(crate) fn key_set<T>(map: &AttributeMap<T>) -> AttributeSet {
    map.keys().map(String::as_str).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams<G: Group> {
    pub group: G,
    /// Declared attribute universe, in setup order.
    pub universe: Vec<String>,
    pub e_gg_alpha: G::Target,
    pub g_a: G::Source,
    pub h: AttributeMap<G::Source>,
}

impl<G: Group> PublicParams<G> {
    pub fn g(&self) -> G::Source {
        self.group.generator()
    }

    pub fn g2(&self) -> G::Source {
        self.group.second_generator()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.h.contains_key(attr)
    }
}

/// `(alpha, a)`, both nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey<G: Group> {
    pub alpha: G::Scalar,
    pub a: G::Scalar,
}

/// `K = g^(alpha + a t)`, `L = g^t`, `K_x = h_x^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSecretKey<G: Group> {
    pub k: G::Source,
    pub l: G::Source,
    pub k_x: AttributeMap<G::Source>,
}

impl<G: Group> UserSecretKey<G> {
    pub fn attrs(&self) -> AttributeSet {
        key_set(&self.k_x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiphertextRow<G: Group> {
    /// `g^(a lambda_i) h_rho(i)^(-r_i)`
    pub c: G::Source,
    /// `g^(r_i)`
    pub d: G::Source,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiphertextL1<G: Group> {
    pub policy: AccessMatrix,
    /// `m * e(g,g)^(alpha s)`
    pub c: G::Target,
    /// `g^s`
    pub c_prime: G::Source,
    /// `g2^s`; absent when the encryptor disabled re-encryption.
    pub c_hat: Option<G::Source>,
    pub rows: Vec<CiphertextRow<G>>,
}

impl<G: Group> CiphertextL1<G> {
    pub fn is_reencryptable(&self) -> bool {
        self.c_hat.is_some()
    }
}

/// Proxy half of a re-encryption key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyReKey<G: Group> {
    /// `K g2^(a d)`
    pub k_p: G::Source,
    /// `L g2^d`
    pub l_p: G::Source,
    /// `K_x g2^d`, keyed by the delegator's attributes.
    pub k_px: AttributeMap<G::Source>,
    /// `a d t1`. The proxy holds this scalar in the clear; what it leaks
    /// has not been analyzed.
    pub rk_scalar: G::Scalar,
}

impl<G: Group> ProxyReKey<G> {
    pub fn delegator_attrs(&self) -> AttributeSet {
        key_set(&self.k_px)
    }
}

/// Delegatee half of a re-encryption key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegateeKey<G: Group> {
    /// `g2^d`
    pub ak: G::Source,
    /// `g^(1/t1)`
    pub l_dd: G::Source,
    /// `h_x^(1/t1)`
    pub k_ddx: AttributeMap<G::Source>,
}

impl<G: Group> DelegateeKey<G> {
    pub fn attrs(&self) -> AttributeSet {
        key_set(&self.k_ddx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiphertextL2<G: Group> {
    pub policy2: AccessMatrix,
    /// Carried over from the first-level ciphertext.
    pub c: G::Target,
    /// `e(C', K') / prod_{i in I1} (e(C_i, L') e(D_i, K'_rho(i)))^(omega_i)`
    pub t0: G::Target,
    /// `prod_{i in I1} (C_i D_i)^(omega_i)`
    pub p: G::Source,
    pub rows2: Vec<CiphertextRow<G>>,
}

/// Delegatee key blinded by `1/z`, handed to a transformation server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformKey<G: Group> {
    /// Unblinded `g2^d`, so the server can compute `e(P, AK)`. Whether
    /// exposing it weakens the outsourcing model is an open question.
    pub ak: G::Source,
    pub l_tk: G::Source,
    pub k_tkx: AttributeMap<G::Source>,
}

impl<G: Group> TransformKey<G> {
    pub fn attrs(&self) -> AttributeSet {
        key_set(&self.k_tkx)
    }
}

/// The blinding exponent `z` the delegatee keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformSecret<G: Group> {
    pub z: G::Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDecryption<G: Group> {
    /// `T0 * e(P, AK)`
    pub t0_full: G::Target,
    /// `J^(1/z)`
    pub t1: G::Target,
}
