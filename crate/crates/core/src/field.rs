//! Coefficient fields: the rationals and prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Descriptor of the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    /// Integers modulo a prime `p`.
    Prime(u64),
}

impl Field {
    /// Builds `F_p`, rejecting moduli that are not prime.
    pub fn prime(p: u64) -> Option<Field> {
        is_prime(p).then_some(Field::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> FieldElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(self, v: &BigInt) -> FieldElem {
        match self {
            Field::Rationals => FieldElem::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                FieldElem::Modular(Fp { value: r.to_u64().unwrap_or(0), modulus: p })
            }
        }
    }

    /// `num / den` in this field; `None` when `den` vanishes in the field.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Option<FieldElem> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return None;
        }
        Some(&self.from_bigint(num) * &d.inv()?)
    }

    /// Binomial coefficient reduced into the field.
    pub fn binomial(self, n: u64, k: u64) -> FieldElem {
        if k > n {
            return self.zero();
        }
        let k = k.min(n - k);
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        self.from_bigint(&acc)
    }

    /// The field an element belongs to.
    pub fn of(e: &FieldElem) -> Field {
        match e {
            FieldElem::Rational(_) => Field::Rationals,
            FieldElem::Modular(f) => Field::Prime(f.modulus),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
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

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Residue class modulo a prime, `0 <= value < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

/// An element of `Q` or `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Modular(Fp),
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_zero(),
            FieldElem::Modular(f) => f.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_one(),
            FieldElem::Modular(f) => f.value == 1,
        }
    }

    pub fn field(&self) -> Field {
        Field::of(self)
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElem::Rational(q) => FieldElem::Rational(q.recip()),
            FieldElem::Modular(f) => FieldElem::Modular(Fp {
                value: pow_mod(f.value, f.modulus - 2, f.modulus),
                modulus: f.modulus,
            }),
        })
    }

    pub fn pow(&self, e: i64) -> Option<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field().one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Some(acc)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(q) => Some(q),
            FieldElem::Modular(_) => None,
        }
    }

    /// True for coefficients printed with a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_negative(),
            FieldElem::Modular(_) => false,
        }
    }

    /// Denominator of a rational coefficient (1 for prime fields).
    pub fn denominator(&self) -> BigInt {
        match self {
            FieldElem::Rational(q) => q.denom().clone(),
            FieldElem::Modular(_) => BigInt::one(),
        }
    }
}

fn same_modulus(a: &Fp, b: &Fp) -> u64 {
    assert_eq!(a.modulus, b.modulus, "coefficients from different prime fields");
    a.modulus
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Modular(a), FieldElem::Modular(b)) => {
                let p = same_modulus(a, b);
                FieldElem::Modular(Fp { value: ((a.value as u128 + b.value as u128) % p as u128) as u64, modulus: p })
            }
            _ => panic!("coefficients from different fields"),
        }
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Modular(a), FieldElem::Modular(b)) => {
                let p = same_modulus(a, b);
                FieldElem::Modular(Fp { value: mul_mod(a.value, b.value, p), modulus: p })
            }
            _ => panic!("coefficients from different fields"),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Modular(f) => FieldElem::Modular(Fp {
                value: if f.value == 0 { 0 } else { f.modulus - f.value },
                modulus: f.modulus,
            }),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElem::Modular(x) => write!(f, "{}", x.value),
        }
    }
}
