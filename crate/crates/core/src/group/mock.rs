//! Discrete-log mock backend: `g^x` is stored as `x`, `e(g^x, g^y)` as `x*y`.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, RngCore};

use super::{BackendId, Group, GroupError, ScalarField};

/// 2^61 - 1, the default modulus for randomized mock runs.
pub const MOCK_TEST_PRIME: u64 = (1 << 61) - 1;

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// An element of `Z_p`. Carries its modulus; mixing moduli panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MockScalar {
    value: u64,
    modulus: u64,
}

impl MockScalar {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "mock scalars from different suites"
        );
    }
}

impl Add for MockScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        let v = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        MockScalar {
            value: v as u64,
            modulus: self.modulus,
        }
    }
}

impl Sub for MockScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for MockScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        MockScalar {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for MockScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let value = if self.value == 0 {
            0
        } else {
            self.modulus - self.value
        };
        MockScalar {
            value,
            modulus: self.modulus,
        }
    }
}

/// `g^x`, stored as `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MockSource(pub u64);

/// `e(g,g)^x`, stored as `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MockTarget(pub u64);

impl MockSource {
    pub fn exponent(&self) -> u64 {
        self.0
    }
}

impl MockTarget {
    pub fn exponent(&self) -> u64 {
        self.0
    }
}

/// Group of prime order `p` with `g = 1` and `g2 = g2_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MockGroup {
    modulus: u64,
    g2_exponent: u64,
}

impl MockGroup {
    pub fn new(modulus: u64, g2_exponent: u64) -> Result<Self, GroupError> {
        if !is_prime_u64(modulus) {
            return Err(GroupError::NonPrimeModulus(modulus));
        }
        let g2_exponent = g2_exponent % modulus;
        if g2_exponent == 0 {
            return Err(GroupError::DegenerateGenerator);
        }
        Ok(MockGroup {
            modulus,
            g2_exponent,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn g2_exponent(&self) -> u64 {
        self.g2_exponent
    }

    pub fn scalar(&self, v: u64) -> MockScalar {
        MockScalar {
            value: v % self.modulus,
            modulus: self.modulus,
        }
    }

    pub fn source(&self, exponent: u64) -> MockSource {
        MockSource(exponent % self.modulus)
    }

    pub fn target(&self, exponent: u64) -> MockTarget {
        MockTarget(exponent % self.modulus)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn read_u64_be32(&self, bytes: &[u8]) -> Result<u64, GroupError> {
        if bytes.len() != 32 || bytes[..24].iter().any(|&b| b != 0) {
            return Err(GroupError::InvalidEncoding("mock value"));
        }
        let v = u64::from_be_bytes(bytes[24..].try_into().expect("8 bytes"));
        if v >= self.modulus {
            return Err(GroupError::InvalidEncoding("mock value"));
        }
        Ok(v)
    }
}

fn u64_be32(v: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[24..].copy_from_slice(&v.to_be_bytes());
    out
}

impl ScalarField for MockGroup {
    type Scalar = MockScalar;

    fn zero(&self) -> MockScalar {
        self.scalar(0)
    }

    fn one(&self) -> MockScalar {
        self.scalar(1)
    }

    fn scalar_from_u64(&self, v: u64) -> MockScalar {
        self.scalar(v)
    }

    fn inverse(&self, s: &MockScalar) -> Result<MockScalar, GroupError> {
        if s.value == 0 {
            return Err(GroupError::ZeroInverse);
        }
        Ok(self.scalar(pow_mod(s.value, self.modulus - 2, self.modulus)))
    }

    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> MockScalar {
        self.scalar(rng.gen_range(0..self.modulus))
    }

    fn scalar_to_bytes(&self, s: &MockScalar) -> [u8; 32] {
        u64_be32(s.value)
    }

    fn scalar_from_bytes(&self, bytes: &[u8; 32]) -> Result<MockScalar, GroupError> {
        self.read_u64_be32(bytes).map(|v| self.scalar(v))
    }
}

impl Group for MockGroup {
    type Source = MockSource;
    type Target = MockTarget;

    const BACKEND: BackendId = BackendId::Mock;

    fn generator(&self) -> MockSource {
        MockSource(1 % self.modulus)
    }

    fn second_generator(&self) -> MockSource {
        MockSource(self.g2_exponent)
    }

    fn source_identity(&self) -> MockSource {
        MockSource(0)
    }

    fn source_mul(&self, x: &MockSource, y: &MockSource) -> MockSource {
        MockSource(self.add(x.0, y.0))
    }

    fn source_exp(&self, base: &MockSource, k: &MockScalar) -> MockSource {
        MockSource(mul_mod(base.0, k.value, self.modulus))
    }

    fn source_inverse(&self, x: &MockSource) -> MockSource {
        MockSource(self.neg(x.0))
    }

    fn pair(&self, x: &MockSource, y: &MockSource) -> MockTarget {
        MockTarget(mul_mod(x.0, y.0, self.modulus))
    }

    fn target_identity(&self) -> MockTarget {
        MockTarget(0)
    }

    fn target_mul(&self, x: &MockTarget, y: &MockTarget) -> MockTarget {
        MockTarget(self.add(x.0, y.0))
    }

    fn target_exp(&self, base: &MockTarget, k: &MockScalar) -> MockTarget {
        MockTarget(mul_mod(base.0, k.value, self.modulus))
    }

    fn target_inverse(&self, x: &MockTarget) -> MockTarget {
        MockTarget(self.neg(x.0))
    }

    fn source_to_bytes(&self, x: &MockSource) -> Vec<u8> {
        u64_be32(x.0).to_vec()
    }

    fn source_from_bytes(&self, bytes: &[u8]) -> Result<MockSource, GroupError> {
        self.read_u64_be32(bytes).map(MockSource)
    }

    fn target_to_bytes(&self, x: &MockTarget) -> Vec<u8> {
        u64_be32(x.0).to_vec()
    }

    fn target_from_bytes(&self, bytes: &[u8]) -> Result<MockTarget, GroupError> {
        self.read_u64_be32(bytes).map(MockTarget)
    }

    /// `p` as 8 octets, then the `g2` exponent as 32 octets.
    fn params_to_bytes(&self) -> Vec<u8> {
        let mut out = self.modulus.to_be_bytes().to_vec();
        out.extend_from_slice(&u64_be32(self.g2_exponent));
        out
    }

    fn params_from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        if bytes.len() != 40 {
            return Err(GroupError::InvalidEncoding("mock suite"));
        }
        let modulus = u64::from_be_bytes(bytes[..8].try_into().expect("8 bytes"));
        let group = MockGroup::new(modulus, 1)?;
        let g2 = group.read_u64_be32(&bytes[8..])?;
        MockGroup::new(modulus, g2)
    }
}
