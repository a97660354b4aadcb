//! BLS12-381 backend.
//!
//! BLS12-381 has an asymmetric pairing `G1 x G2 -> GT`. A [`DualPoint`] holds
//! `(g1^x, g2^x)` for the same `x`, and `pair(u, v) = e(u.g1, v.g2)`, which is
//! a symmetric bilinear map on the cyclic group of dual points.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, Group as _};
use ark_ff::{BigInteger, Field, PrimeField, UniformRand, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::RngCore;
use sha2::{Digest, Sha256};

use super::{BackendId, Group, GroupError, ScalarField};

pub const DEFAULT_CURVE: &str = "bls12-381";

const G2_DERIVATION_TAG: &[u8] = b"abpre/bls12-381/second-generator";

type Gt = PairingOutput<Bls12_381>;

/// A source element given by its images in both pairing source groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualPoint {
    pub g1: G1Projective,
    pub g2: G2Projective,
}

impl DualPoint {
    fn generator() -> Self {
        DualPoint {
            g1: G1Projective::generator(),
            g2: G2Projective::generator(),
        }
    }

    fn mul(&self, k: &Fr) -> Self {
        DualPoint {
            g1: self.g1 * k,
            g2: self.g2 * k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingGroup {
    second: DualPoint,
}

impl Default for PairingGroup {
    fn default() -> Self {
        PairingGroup::new(DEFAULT_CURVE).expect("default curve is supported")
    }
}

impl PairingGroup {
    pub fn new(curve: &str) -> Result<Self, GroupError> {
        match curve.to_ascii_lowercase().as_str() {
            "bls12-381" | "bls12_381" | "bls12381" => {}
            _ => return Err(GroupError::UnsupportedCurve(curve.to_string())),
        }
        Ok(PairingGroup {
            second: DualPoint::generator().mul(&Self::second_generator_exponent()),
        })
    }

    /// `g2 = g^k` with `k` derived by hashing a fixed tag. The dual
    /// representation needs `k`, so it is public. Anyone can then turn
    /// `g^s` into `g2^s`, and omitting `C_hat` only disables re-encryption
    /// at the API level on this backend.
    pub fn second_generator_exponent() -> Fr {
        let mut counter = 0u32;
        loop {
            let digest = Sha256::new()
                .chain_update(G2_DERIVATION_TAG)
                .chain_update(counter.to_be_bytes())
                .finalize();
            let k = Fr::from_be_bytes_mod_order(&digest);
            if !k.is_zero() {
                return k;
            }
            counter += 1;
        }
    }
}

impl ScalarField for PairingGroup {
    type Scalar = Fr;

    fn zero(&self) -> Fr {
        Fr::zero()
    }

    fn one(&self) -> Fr {
        Fr::from(1u64)
    }

    fn scalar_from_u64(&self, v: u64) -> Fr {
        Fr::from(v)
    }

    fn inverse(&self, s: &Fr) -> Result<Fr, GroupError> {
        s.inverse().ok_or(GroupError::ZeroInverse)
    }

    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fr {
        let mut rng = rng;
        Fr::rand(&mut rng)
    }

    fn scalar_to_bytes(&self, s: &Fr) -> [u8; 32] {
        let bytes = s.into_bigint().to_bytes_be();
        let mut out = [0u8; 32];
        out[32 - bytes.len()..].copy_from_slice(&bytes);
        out
    }

    fn scalar_from_bytes(&self, bytes: &[u8; 32]) -> Result<Fr, GroupError> {
        let s = Fr::from_be_bytes_mod_order(bytes);
        if &self.scalar_to_bytes(&s) != bytes {
            return Err(GroupError::InvalidEncoding("scalar"));
        }
        Ok(s)
    }
}

impl Group for PairingGroup {
    type Source = DualPoint;
    type Target = Gt;

    const BACKEND: BackendId = BackendId::Pairing;

    fn generator(&self) -> DualPoint {
        DualPoint::generator()
    }

    fn second_generator(&self) -> DualPoint {
        self.second
    }

    fn source_identity(&self) -> DualPoint {
        DualPoint {
            g1: G1Projective::zero(),
            g2: G2Projective::zero(),
        }
    }

    fn source_mul(&self, x: &DualPoint, y: &DualPoint) -> DualPoint {
        DualPoint {
            g1: x.g1 + y.g1,
            g2: x.g2 + y.g2,
        }
    }

    fn source_exp(&self, base: &DualPoint, k: &Fr) -> DualPoint {
        base.mul(k)
    }

    fn source_inverse(&self, x: &DualPoint) -> DualPoint {
        DualPoint {
            g1: -x.g1,
            g2: -x.g2,
        }
    }

    fn pair(&self, x: &DualPoint, y: &DualPoint) -> Gt {
        Bls12_381::pairing(x.g1, y.g2)
    }

    fn pair_product(&self, pairs: &[(DualPoint, DualPoint)]) -> Gt {
        if pairs.is_empty() {
            return Gt::zero();
        }
        let lefts: Vec<G1Affine> =
            G1Projective::normalize_batch(&pairs.iter().map(|(x, _)| x.g1).collect::<Vec<_>>());
        let rights: Vec<G2Affine> =
            G2Projective::normalize_batch(&pairs.iter().map(|(_, y)| y.g2).collect::<Vec<_>>());
        Bls12_381::multi_pairing(lefts, rights)
    }

    fn target_identity(&self) -> Gt {
        Gt::zero()
    }

    // GT is written additively by arkworks.
    fn target_mul(&self, x: &Gt, y: &Gt) -> Gt {
        *x + *y
    }

    fn target_exp(&self, base: &Gt, k: &Fr) -> Gt {
        *base * k
    }

    fn target_inverse(&self, x: &Gt) -> Gt {
        -*x
    }

    /// Compressed G1 (48 octets) followed by compressed G2 (96 octets).
    fn source_to_bytes(&self, x: &DualPoint) -> Vec<u8> {
        let mut out = Vec::with_capacity(144);
        x.g1.into_affine()
            .serialize_compressed(&mut out)
            .expect("vec write");
        x.g2.into_affine()
            .serialize_compressed(&mut out)
            .expect("vec write");
        out
    }

    fn source_from_bytes(&self, bytes: &[u8]) -> Result<DualPoint, GroupError> {
        if bytes.len() != 144 {
            return Err(GroupError::InvalidEncoding("source element"));
        }
        let g1 = G1Affine::deserialize_compressed(&bytes[..48])
            .map_err(|_| GroupError::InvalidEncoding("source element"))?;
        let g2 = G2Affine::deserialize_compressed(&bytes[48..])
            .map_err(|_| GroupError::InvalidEncoding("source element"))?;
        // Both halves must share one discrete log: e(g1, h) = e(g, g2).
        let check = Bls12_381::multi_pairing(
            [g1, -G1Affine::generator()],
            [G2Affine::generator(), g2],
        );
        if !check.is_zero() {
            return Err(GroupError::InvalidEncoding("source element"));
        }
        Ok(DualPoint {
            g1: g1.into(),
            g2: g2.into(),
        })
    }

    fn target_to_bytes(&self, x: &Gt) -> Vec<u8> {
        let mut out = Vec::with_capacity(x.compressed_size());
        x.serialize_compressed(&mut out).expect("vec write");
        out
    }

    fn target_from_bytes(&self, bytes: &[u8]) -> Result<Gt, GroupError> {
        let t = Gt::deserialize_compressed(bytes)
            .map_err(|_| GroupError::InvalidEncoding("target element"))?;
        if self.target_to_bytes(&t) != bytes {
            return Err(GroupError::InvalidEncoding("target element"));
        }
        Ok(t)
    }

    fn params_to_bytes(&self) -> Vec<u8> {
        DEFAULT_CURVE.as_bytes().to_vec()
    }

    fn params_from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        if bytes != DEFAULT_CURVE.as_bytes() {
            let name = String::from_utf8_lossy(bytes).into_owned();
            return Err(GroupError::UnsupportedCurve(name));
        }
        Ok(PairingGroup::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn curve_names() {
        assert!(PairingGroup::new("BLS12-381").is_ok());
        assert_eq!(
            PairingGroup::new("secp256k1"),
            Err(GroupError::UnsupportedCurve("secp256k1".into()))
        );
    }

    #[test]
    fn second_generator_is_consistent() {
        let group = PairingGroup::default();
        let g = group.generator();
        let g2 = group.second_generator();
        assert_ne!(g2, group.source_identity());
        assert_eq!(group.pair(&g, &g2), group.pair(&g2, &g));
    }

    #[test]
    fn element_encodings_round_trip() {
        let group = PairingGroup::default();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let k = group.random_scalar(&mut rng);
        let x = group.source_exp(&group.generator(), &k);
        let bytes = group.source_to_bytes(&x);
        assert_eq!(group.source_from_bytes(&bytes).unwrap(), x);

        let t = group.target_exp(&group.target_generator(), &k);
        let tb = group.target_to_bytes(&t);
        assert_eq!(group.target_from_bytes(&tb).unwrap(), t);

        let sb = group.scalar_to_bytes(&k);
        assert_eq!(group.scalar_from_bytes(&sb).unwrap(), k);
        assert!(group.scalar_from_bytes(&[0xff; 32]).is_err());
    }

    #[test]
    fn mismatched_dual_point_is_rejected() {
        let group = PairingGroup::default();
        let bad = DualPoint {
            g1: G1Projective::generator(),
            g2: G2Projective::generator() * Fr::from(2u64),
        };
        let bytes = group.source_to_bytes(&bad);
        assert!(group.source_from_bytes(&bytes).is_err());
    }

    #[test]
    fn scalar_inverse() {
        let group = PairingGroup::default();
        let three = group.scalar_from_u64(3);
        assert_eq!(three * group.inverse(&three).unwrap(), group.one());
        assert_eq!(group.inverse(&group.zero()), Err(GroupError::ZeroInverse));
    }
}
