//! Exact field elements: rationals in characteristic 0, residues mod a prime otherwise.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Error;

/// The base field, identified by its characteristic (0 means ℚ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Field {
    p: u64,
}

impl Field {
    pub const RATIONALS: Field = Field { p: 0 };

    /// `p` must be 0 or a prime below 2^31.
    pub fn new(characteristic: u64) -> Result<Field, Error> {
        if characteristic == 0 {
            return Ok(Field::RATIONALS);
        }
        if characteristic >= (1 << 31) || !is_prime(characteristic) {
            return Err(Error::Validation(format!("characteristic {characteristic} is not 0 or a prime below 2^31")));
        }
        Ok(Field { p: characteristic })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        if self.p == 0 {
            Scalar::Q(BigRational::from_integer(BigInt::from(n)))
        } else {
            let p = self.p as i64;
            Scalar::Fp { v: n.rem_euclid(p) as u64, p: self.p }
        }
    }

    pub fn ratio(&self, num: i64, den: i64) -> Result<Scalar, Error> {
        let d = self.int(den);
        let inv = d.inv().ok_or_else(|| Error::Validation("zero denominator".into()))?;
        Ok(&self.int(num) * &inv)
    }

    /// Reduces an arbitrary rational into this field; fails when the denominator vanishes mod p.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, Error> {
        if self.p == 0 {
            return Ok(Scalar::Q(q.clone()));
        }
        let m = BigInt::from(self.p);
        let n = q.numer().mod_floor(&m).to_u64().unwrap();
        let d = q.denom().mod_floor(&m).to_u64().unwrap();
        let den = Scalar::Fp { v: d, p: self.p };
        let inv = den.inv().ok_or_else(|| Error::Validation(format!("denominator of {q} vanishes mod {}", self.p)))?;
        Ok(&Scalar::Fp { v: n, p: self.p } * &inv)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "QQ")
        } else {
            write!(f, "GF({})", self.p)
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Mixing scalars from different fields is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::RATIONALS,
            Scalar::Fp { p, .. } => Field { p: *p },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { v, p } => Scalar::Fp { v: pow_mod(*v, p - 2, *p), p: *p },
        })
    }

    /// Integer multiple `n * self`.
    pub fn times(&self, n: i64) -> Scalar {
        self * &self.field().int(n)
    }

    /// Numerator and denominator in characteristic 0; the residue over 1 otherwise.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Q(q) => (q.numer().clone(), q.denom().clone()),
            Scalar::Fp { v, .. } => (BigInt::from(*v), BigInt::one()),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(q) if q.is_negative())
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp { v: (a + b) % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp { v: a * b % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::new(7).unwrap();
        let a = f.int(3);
        let b = f.int(5);
        assert_eq!(&a + &b, f.int(1));
        assert_eq!(&a * &b, f.int(1));
        assert_eq!(&(&a * &a.inv().unwrap()), &f.one());
        assert_eq!(f.int(-1), f.int(6));
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(Field::new(6).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(2).is_ok());
    }

    #[test]
    fn rationals_stay_reduced() {
        let f = Field::RATIONALS;
        let h = f.ratio(2, 4).unwrap();
        assert_eq!(h.to_ratio(), (BigInt::from(1), BigInt::from(2)));
        assert!(f.ratio(1, 0).is_err());
    }

    #[test]
    fn reduce_rational_mod_p() {
        let f = Field::new(5).unwrap();
        let q = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(f.from_rational(&q).unwrap(), f.int(3));
        let bad = BigRational::new(BigInt::from(1), BigInt::from(5));
        assert!(f.from_rational(&bad).is_err());
    }
}
