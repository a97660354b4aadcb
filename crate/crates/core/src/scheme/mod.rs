//! Ciphertext-policy attribute-based proxy re-encryption.
//!
//! Roles: an authority runs [`setup`], [`keygen`] and [`rkgen`]; a delegator
//! is the holder of a [`UserSecretKey`]; a proxy holds a [`ProxyReKey`] and
//! runs [`reencrypt`]; a delegatee holds a [`DelegateeKey`] and runs
//! [`decrypt_l2`], or outsources the pairing work with [`transform_keygen`],
//! [`transform_apply`] and [`finish_decrypt`].
//!
//! The target policy of a re-encryption is chosen by the proxy at
//! [`reencrypt`] time, not baked into the re-encryption key.
//!
//! Caveats of the construction as implemented:
//!
//! * [`rkgen`] needs the master key, so delegation is not
//!   non-interactive: the authority takes part in every delegation.
//! * The proxy learns the scalar `a*d*t1` in the clear.
//! * A [`TransformKey`] carries `AK = g2^d` so the transformer can evaluate
//!   `e(P, AK)`.

mod types;

use crate::group::{draw_nonzero, Group, GroupError, RandomSource, RandomnessError};
use crate::policy::{
    is_valid_attribute, make_shares, satisfying_rows, AccessMatrix, AttributeSet,
    Reconstruction,
};

use thiserror::Error;

pub use types::{
    AttributeMap, CiphertextL1, CiphertextL2, CiphertextRow, DelegateeKey, MasterKey,
    PartialDecryption, ProxyReKey, PublicParams, TransformKey, TransformSecret, UserSecretKey,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("attribute universe is empty")]
    EmptyUniverse,
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("invalid attribute name `{0}`")]
    InvalidAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute set is empty")]
    EmptyAttributeSet,
    #[error("policy not satisfied")]
    PolicyNotSatisfied,
    #[error("re-encryption disabled for this ciphertext")]
    ReencryptionDisabled,
    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(&'static str),
    #[error(transparent)]
    Randomness(#[from] RandomnessError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Pairing values inside first-level decryption:
/// `e(g,g)^(alpha s) = key_pairing / row_product`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstLevelTerms<G: Group> {
    /// `e(C', K)`
    pub key_pairing: G::Target,
    /// `prod_{i in I} (e(C_i, L) e(D_i, K_rho(i)))^(omega_i)`
    pub row_product: G::Target,
}

/// Pairing values inside second-level decryption:
/// `e(g,g)^(alpha s) = T0 * delegatee_pairing * share_product`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondLevelTerms<G: Group> {
    /// `J = prod_{i in I2} (e(C'_i, L'') e(D'_i, K''_rho(i)))^(omega'_i)`
    pub share_product: G::Target,
    /// `e(P, AK)`
    pub delegatee_pairing: G::Target,
}

fn check_known<'a, G: Group>(
    pp: &PublicParams<G>,
    attrs: impl IntoIterator<Item = &'a str>,
) -> Result<(), SchemeError> {
    for a in attrs {
        if !pp.contains(a) {
            return Err(SchemeError::UnknownAttribute(a.to_string()));
        }
    }
    Ok(())
}

fn check_key_attrs<G: Group>(pp: &PublicParams<G>, attrs: &AttributeSet) -> Result<(), SchemeError> {
    if attrs.is_empty() {
        return Err(SchemeError::EmptyAttributeSet);
    }
    check_known(pp, attrs.iter())
}

fn reconstruct<G: Group>(
    group: &G,
    matrix: &AccessMatrix,
    attrs: &AttributeSet,
) -> Result<Reconstruction<G::Scalar>, SchemeError> {
    satisfying_rows(group, matrix, attrs).ok_or(SchemeError::PolicyNotSatisfied)
}

fn pow<G: Group>(group: &G, x: &G::Source, k: &G::Scalar) -> G::Source {
    if *k == group.one() {
        x.clone()
    } else {
        group.source_exp(x, k)
    }
}

/// `prod_{i in I} (e(C_i, l) e(D_i, k_map[rho(i)]))^(omega_i)`, evaluated as
/// one multi-pairing over `(C_i^omega_i, l)` and `(D_i^omega_i, k_rho(i))`.
fn row_product<G: Group>(
    group: &G,
    matrix: &AccessMatrix,
    rows: &[CiphertextRow<G>],
    rec: &Reconstruction<G::Scalar>,
    l: &G::Source,
    k_map: &AttributeMap<G::Source>,
) -> G::Target {
    let mut pairs = Vec::with_capacity(2 * rec.rows.len());
    for (i, w) in rec.iter() {
        let k = &k_map[matrix.label(i)];
        pairs.push((pow(group, &rows[i].c, &w), l.clone()));
        pairs.push((pow(group, &rows[i].d, &w), k.clone()));
    }
    group.pair_product(&pairs)
}

fn check_rows<G: Group>(matrix: &AccessMatrix, rows: &[CiphertextRow<G>]) -> Result<(), SchemeError> {
    if rows.len() != matrix.row_count() {
        return Err(SchemeError::MalformedCiphertext(
            "row count differs from policy",
        ));
    }
    Ok(())
}

/// Draws `alpha`, `a`, then one exponent per universe attribute for `h_x`.
pub fn setup<G: Group, R: RandomSource + ?Sized>(
    group: G,
    universe: &[String],
    rng: &mut R,
) -> Result<(PublicParams<G>, MasterKey<G>), SchemeError> {
    if universe.is_empty() {
        return Err(SchemeError::EmptyUniverse);
    }
    let mut seen = AttributeSet::new();
    for a in universe {
        if !is_valid_attribute(a) {
            return Err(SchemeError::InvalidAttribute(a.clone()));
        }
        if !seen.insert(a.clone()) {
            return Err(SchemeError::DuplicateAttribute(a.clone()));
        }
    }

    let alpha = draw_nonzero(&group, rng)?;
    let a = draw_nonzero(&group, rng)?;
    let g = group.generator();
    let mut h = AttributeMap::new();
    for attr in universe {
        let eta = rng.next_scalar(&group)?;
        h.insert(attr.clone(), group.source_exp(&g, &eta));
    }
    let pp = PublicParams {
        e_gg_alpha: group.target_exp(&group.target_generator(), &alpha),
        g_a: group.source_exp(&g, &a),
        universe: universe.to_vec(),
        h,
        group,
    };
    Ok((pp, MasterKey { alpha, a }))
}

pub fn keygen<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    msk: &MasterKey<G>,
    attrs: &AttributeSet,
    rng: &mut R,
) -> Result<UserSecretKey<G>, SchemeError> {
    check_key_attrs(pp, attrs)?;
    let group = &pp.group;
    let t = rng.next_scalar(group)?;
    let k = group.source_exp(&pp.g(), &(msk.alpha + msk.a * t));
    let k_x = attrs
        .iter()
        .map(|x| (x.to_string(), group.source_exp(&pp.h[x], &t)))
        .collect();
    Ok(UserSecretKey {
        k,
        l: group.source_exp(&pp.g(), &t),
        k_x,
    })
}

/// Draws `s`, the remaining share-vector entries, then `r_1..r_l`.
pub fn encrypt<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    m: &G::Target,
    policy: &AccessMatrix,
    reencryptable: bool,
    rng: &mut R,
) -> Result<CiphertextL1<G>, SchemeError> {
    check_known(pp, policy.rho().iter().map(String::as_str))?;
    let group = &pp.group;
    let g = pp.g();

    let s = rng.next_scalar(group)?;
    let shares = make_shares(group, policy, s, rng)?;
    let mut rows = Vec::with_capacity(policy.row_count());
    for (i, lambda) in shares.iter().enumerate() {
        let r = rng.next_scalar(group)?;
        let h = &pp.h[policy.label(i)];
        let c = group.source_mul(
            &group.source_exp(&pp.g_a, lambda),
            &group.source_exp(h, &-r),
        );
        rows.push(CiphertextRow {
            c,
            d: group.source_exp(&g, &r),
        });
    }

    Ok(CiphertextL1 {
        policy: policy.clone(),
        c: group.target_mul(m, &group.target_exp(&pp.e_gg_alpha, &s)),
        c_prime: group.source_exp(&g, &s),
        c_hat: reencryptable.then(|| group.source_exp(&pp.g2(), &s)),
        rows,
    })
}

pub fn first_level_terms<G: Group>(
    pp: &PublicParams<G>,
    sk: &UserSecretKey<G>,
    ct: &CiphertextL1<G>,
) -> Result<FirstLevelTerms<G>, SchemeError> {
    check_rows(&ct.policy, &ct.rows)?;
    let group = &pp.group;
    let rec = reconstruct(group, &ct.policy, &sk.attrs())?;
    Ok(FirstLevelTerms {
        key_pairing: group.pair(&ct.c_prime, &sk.k),
        row_product: row_product(group, &ct.policy, &ct.rows, &rec, &sk.l, &sk.k_x),
    })
}

pub fn decrypt_l1<G: Group>(
    pp: &PublicParams<G>,
    sk: &UserSecretKey<G>,
    ct: &CiphertextL1<G>,
) -> Result<G::Target, SchemeError> {
    let group = &pp.group;
    let terms = first_level_terms(pp, sk, ct)?;
    let blinding = group.target_div(&terms.key_pairing, &terms.row_product);
    Ok(group.target_div(&ct.c, &blinding))
}

/// Draws nonzero `d`, then nonzero `t1`.
pub fn rkgen<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    msk: &MasterKey<G>,
    sk: &UserSecretKey<G>,
    delegatee_attrs: &AttributeSet,
    rng: &mut R,
) -> Result<(ProxyReKey<G>, DelegateeKey<G>), SchemeError> {
    check_key_attrs(pp, delegatee_attrs)?;
    let group = &pp.group;
    let d = draw_nonzero(group, rng)?;
    let t1 = draw_nonzero(group, rng)?;
    let t1_inv = group.inverse(&t1)?;

    let g2_d = group.source_exp(&pp.g2(), &d);
    let proxy = ProxyReKey {
        k_p: group.source_mul(&sk.k, &group.source_exp(&pp.g2(), &(msk.a * d))),
        l_p: group.source_mul(&sk.l, &g2_d),
        k_px: sk
            .k_x
            .iter()
            .map(|(x, k)| (x.clone(), group.source_mul(k, &g2_d)))
            .collect(),
        rk_scalar: msk.a * d * t1,
    };
    let delegatee = DelegateeKey {
        ak: g2_d,
        l_dd: group.source_exp(&pp.g(), &t1_inv),
        k_ddx: delegatee_attrs
            .iter()
            .map(|x| (x.to_string(), group.source_exp(&pp.h[x], &t1_inv)))
            .collect(),
    };
    Ok((proxy, delegatee))
}

/// Draws the share-vector tail for `policy2`, then `r'_1..r'_l`.
pub fn reencrypt<G: Group, R: RandomSource + ?Sized>(
    pp: &PublicParams<G>,
    rk: &ProxyReKey<G>,
    ct: &CiphertextL1<G>,
    policy2: &AccessMatrix,
    rng: &mut R,
) -> Result<CiphertextL2<G>, SchemeError> {
    let c_hat = ct.c_hat.as_ref().ok_or(SchemeError::ReencryptionDisabled)?;
    check_rows(&ct.policy, &ct.rows)?;
    check_known(pp, policy2.rho().iter().map(String::as_str))?;
    let group = &pp.group;
    let rec = reconstruct(group, &ct.policy, &rk.delegator_attrs())?;

    let t0 = group.target_div(
        &group.pair(&ct.c_prime, &rk.k_p),
        &row_product(group, &ct.policy, &ct.rows, &rec, &rk.l_p, &rk.k_px),
    );
    let p = rec.iter().fold(group.source_identity(), |acc, (i, w)| {
        let cd = group.source_mul(&ct.rows[i].c, &ct.rows[i].d);
        group.source_mul(&acc, &pow(group, &cd, &w))
    });

    let shares = make_shares(group, policy2, rk.rk_scalar, rng)?;
    let mut rows2 = Vec::with_capacity(policy2.row_count());
    for (i, lambda) in shares.iter().enumerate() {
        let r = rng.next_scalar(group)?;
        let h = &pp.h[policy2.label(i)];
        let c = group.source_mul(
            &group.source_exp(c_hat, &-*lambda),
            &group.source_exp(h, &-r),
        );
        rows2.push(CiphertextRow {
            c,
            d: group.source_exp(&pp.g(), &r),
        });
    }

    Ok(CiphertextL2 {
        policy2: policy2.clone(),
        c: ct.c.clone(),
        t0,
        p,
        rows2,
    })
}

pub fn second_level_terms<G: Group>(
    pp: &PublicParams<G>,
    dk: &DelegateeKey<G>,
    ct2: &CiphertextL2<G>,
) -> Result<SecondLevelTerms<G>, SchemeError> {
    check_rows(&ct2.policy2, &ct2.rows2)?;
    let group = &pp.group;
    let rec = reconstruct(group, &ct2.policy2, &dk.attrs())?;
    Ok(SecondLevelTerms {
        share_product: row_product(group, &ct2.policy2, &ct2.rows2, &rec, &dk.l_dd, &dk.k_ddx),
        delegatee_pairing: group.pair(&ct2.p, &dk.ak),
    })
}

pub fn decrypt_l2<G: Group>(
    pp: &PublicParams<G>,
    dk: &DelegateeKey<G>,
    ct2: &CiphertextL2<G>,
) -> Result<G::Target, SchemeError> {
    let group = &pp.group;
    let terms = second_level_terms(pp, dk, ct2)?;
    let blinding = group.target_mul(
        &group.target_mul(&ct2.t0, &terms.delegatee_pairing),
        &terms.share_product,
    );
    Ok(group.target_div(&ct2.c, &blinding))
}

/// Draws nonzero `z` and blinds the delegatee key by `1/z`.
pub fn transform_keygen<G: Group, R: RandomSource + ?Sized>(
    group: &G,
    dk: &DelegateeKey<G>,
    rng: &mut R,
) -> Result<(TransformSecret<G>, TransformKey<G>), SchemeError> {
    let z = draw_nonzero(group, rng)?;
    let z_inv = group.inverse(&z)?;
    let tk = TransformKey {
        ak: dk.ak.clone(),
        l_tk: group.source_exp(&dk.l_dd, &z_inv),
        k_tkx: dk
            .k_ddx
            .iter()
            .map(|(x, k)| (x.clone(), group.source_exp(k, &z_inv)))
            .collect(),
    };
    Ok((TransformSecret { z }, tk))
}

pub fn transform_apply<G: Group>(
    pp: &PublicParams<G>,
    tk: &TransformKey<G>,
    ct2: &CiphertextL2<G>,
) -> Result<PartialDecryption<G>, SchemeError> {
    check_rows(&ct2.policy2, &ct2.rows2)?;
    let group = &pp.group;
    let rec = reconstruct(group, &ct2.policy2, &tk.attrs())?;
    Ok(PartialDecryption {
        t0_full: group.target_mul(&ct2.t0, &group.pair(&ct2.p, &tk.ak)),
        t1: row_product(group, &ct2.policy2, &ct2.rows2, &rec, &tk.l_tk, &tk.k_tkx),
    })
}

/// `C / (T0_full * T1^z)`.
pub fn finish_decrypt<G: Group>(
    group: &G,
    secret: &TransformSecret<G>,
    c: &G::Target,
    pd: &PartialDecryption<G>,
) -> G::Target {
    let blinding = group.target_mul(&pd.t0_full, &group.target_exp(&pd.t1, &secret.z));
    group.target_div(c, &blinding)
}
