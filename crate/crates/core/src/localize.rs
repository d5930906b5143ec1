//! Elements of a localization `R_c` written as `num / c^k`.
//!
//! Values are normalized on construction: a constant denominator is folded
//! into the numerator and powers of `c` dividing the numerator are cancelled.
//! Since `R` is a domain this reduced form is unique, so equality is
//! structural; cross-multiplication is used as a fallback anyway.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::field::FieldElem;
use crate::poly::{div_rem_dense, Poly, PolyError, RingElem, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizeError {
    #[error("operands are localized at different denominators")]
    MismatchedDenominators,
    #[error("old denominator {old} does not divide a power of {new}")]
    NotDividingPower { old: String, new: String },
    #[error("{0} is not a semi-invariant")]
    NotSemiInvariant(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The tracked denominator `c`, shared by all values of one epoch.
pub type Denominator = Arc<Poly>;

pub fn same_den(a: &Denominator, b: &Denominator) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone)]
pub struct Localized {
    num: Poly,
    exp: u32,
    den: Denominator,
}

impl Localized {
    /// `num / den^exp`, normalized.
    pub fn new(num: Poly, exp: u32, den: &Denominator) -> Localized {
        assert!(!den.is_zero(), "zero denominator");
        let mut num = num;
        let mut exp = exp;
        if let Some(lambda) = den.constant_value() {
            if exp > 0 {
                num = num.scale(&lambda.pow(-(exp as i64)).expect("nonzero constant"));
                exp = 0;
            }
        }
        while exp > 0 && !num.is_zero() {
            match num.exact_divide(den) {
                Ok(Some(q)) => {
                    num = q;
                    exp -= 1;
                }
                _ => break,
            }
        }
        if num.is_zero() {
            exp = 0;
        }
        Localized { num, exp, den: den.clone() }
    }

    pub fn from_poly(p: Poly, den: &Denominator) -> Localized {
        Localized { num: p, exp: 0, den: den.clone() }
    }

    pub fn zero(den: &Denominator) -> Localized {
        Localized::from_poly(Poly::zero(den.table()), den)
    }

    pub fn one(den: &Denominator) -> Localized {
        Localized::from_poly(Poly::one(den.table()), den)
    }

    /// `1 / den`.
    pub fn den_inverse(den: &Denominator) -> Localized {
        Localized::new(Poly::one(den.table()), 1, den)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn den(&self) -> &Denominator {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.num.is_one()
    }

    pub fn involves(&self, v: VarId) -> bool {
        self.num.involves(v)
    }

    pub fn involves_any(&self, vars: &[VarId]) -> bool {
        self.num.involves_any(vars)
    }

    fn check(&self, other: &Localized) -> Result<(), LocalizeError> {
        if same_den(&self.den, &other.den) {
            Ok(())
        } else {
            Err(LocalizeError::MismatchedDenominators)
        }
    }

    pub fn checked_add(&self, other: &Localized) -> Result<Localized, LocalizeError> {
        self.check(other)?;
        let e = self.exp.max(other.exp);
        let a = &self.num * &self.den.pow(e - self.exp);
        let b = &other.num * &self.den.pow(e - other.exp);
        Ok(Localized::new(a.checked_add(&b)?, e, &self.den))
    }

    pub fn checked_sub(&self, other: &Localized) -> Result<Localized, LocalizeError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Localized) -> Result<Localized, LocalizeError> {
        self.check(other)?;
        Ok(Localized::new(self.num.checked_mul(&other.num)?, self.exp + other.exp, &self.den))
    }

    pub fn pow(&self, e: u32) -> Localized {
        Localized::new(self.num.pow(e), self.exp * e, &self.den)
    }

    pub fn scale(&self, c: &FieldElem) -> Localized {
        Localized { num: self.num.scale(c), exp: if c.is_zero() { 0 } else { self.exp }, den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Localized {
        Localized::new(&self.num * p, self.exp, &self.den)
    }

    /// `self / other` if the quotient lies in `R_c[...]` with a polynomial
    /// numerator, i.e. `other.num` divides `self.num * c^j`.
    pub fn exact_divide(&self, other: &Localized) -> Result<Option<Localized>, LocalizeError> {
        self.check(other)?;
        let scaled = &self.num * &self.den.pow(other.exp);
        Ok(scaled.exact_divide(&other.num)?.map(|q| Localized::new(q, self.exp, &self.den)))
    }

    /// Unit witness if the numerator divides a power of `c`.
    pub fn invert(&self) -> Option<UnitWitness> {
        if self.is_zero() {
            return None;
        }
        let e = Poly::divides_power(&self.num, &self.den).ok()??;
        let q = self.den.pow(e).exact_divide(&self.num).ok()??;
        let inverse = Localized::new(&q * &self.den.pow(self.exp), e, &self.den);
        Some(UnitWitness { elem: self.clone(), inverse })
    }

    /// The same element written over powers of `new_den`.
    pub fn rebase(&self, new_den: &Denominator) -> Result<Localized, LocalizeError> {
        if same_den(&self.den, new_den) {
            return Ok(Localized { num: self.num.clone(), exp: self.exp, den: new_den.clone() });
        }
        if self.exp == 0 {
            return Ok(Localized::from_poly(self.num.clone(), new_den));
        }
        let e = Poly::divides_power(&self.den, new_den)?.ok_or_else(|| LocalizeError::NotDividingPower {
            old: self.den.to_string(),
            new: new_den.to_string(),
        })?;
        let q = new_den.pow(e).exact_divide(&self.den)?.expect("divides by construction");
        Ok(Localized::new(&self.num * &q.pow(self.exp), e * self.exp, new_den))
    }

    /// Coefficients of the powers of `v`.
    pub fn split_by(&self, v: VarId) -> BTreeMap<i32, Localized> {
        self.num.split_by(v).into_iter().map(|(k, p)| (k, Localized::new(p, self.exp, &self.den))).collect()
    }

    pub fn coeff(&self, v: VarId, k: i32) -> Localized {
        Localized::new(self.num.coeff(v, k), self.exp, &self.den)
    }

    pub fn coeff_monomial(&self, vars: &[VarId], exps: &[i32]) -> Localized {
        Localized::new(self.num.coeff_monomial(vars, exps), self.exp, &self.den)
    }

    /// Division with remainder in `R_c[v]` by `g`, whose leading
    /// `v`-coefficient is inverted by `inv_lead`.
    pub fn divide_univ(
        &self,
        g: &Localized,
        v: VarId,
        inv_lead: &Localized,
    ) -> Result<(Localized, Localized), LocalizeError> {
        self.check(g)?;
        self.check(inv_lead)?;
        let fs = self.dense_in(v)?;
        let gs = g.dense_in(v)?;
        if gs.len() < 2 {
            return Err(PolyError::ConstantDivisor(self.den.table().name(v).to_string()).into());
        }
        if !gs.last().unwrap().checked_mul(inv_lead)?.is_one() {
            return Err(PolyError::NotInverse.into());
        }
        let (q, r) = div_rem_dense(&fs, &gs, inv_lead);
        Ok((self.assemble(&q, v), self.assemble(&r, v)))
    }

    fn dense_in(&self, v: VarId) -> Result<Vec<Localized>, LocalizeError> {
        let parts = self.split_by(v);
        if parts.keys().next().is_some_and(|&e| e < 0) {
            return Err(PolyError::NegativeExponent(self.den.table().name(v).to_string()).into());
        }
        let top = parts.keys().next_back().copied().unwrap_or(-1);
        let mut out = vec![Localized::zero(&self.den); (top + 1) as usize];
        for (e, c) in parts {
            out[e as usize] = c;
        }
        Ok(out)
    }

    fn assemble(&self, coeffs: &[Localized], v: VarId) -> Localized {
        let table = self.den.table();
        let mut out = Localized::zero(&self.den);
        for (e, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let ve = Poly::var_pow(table, v, e as i32).expect("nonnegative");
                out = &out + &c.mul_poly(&ve);
            }
        }
        out
    }

    /// Evaluates with `num` mapped by `f` and `1/c` replaced by `inv_c`.
    pub fn map_with(&self, f: impl Fn(&Poly) -> Localized, inv_c: &Localized) -> Localized {
        &f(&self.num) * &inv_c.pow(self.exp)
    }
}

impl PartialEq for Localized {
    fn eq(&self, other: &Self) -> bool {
        if !same_den(&self.den, &other.den) {
            return false;
        }
        if self.exp == other.exp {
            return self.num == other.num;
        }
        &self.num * &self.den.pow(other.exp) == &other.num * &self.den.pow(self.exp)
    }
}

impl Eq for Localized {}

impl RingElem for Localized {
    fn zero_like(&self) -> Self {
        Localized::zero(&self.den)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Add for &Localized {
    type Output = Localized;
    fn add(self, rhs: &Localized) -> Localized {
        self.checked_add(rhs).expect("mismatched denominators")
    }
}

impl Sub for &Localized {
    type Output = Localized;
    fn sub(self, rhs: &Localized) -> Localized {
        self.checked_sub(rhs).expect("mismatched denominators")
    }
}

impl Mul for &Localized {
    type Output = Localized;
    fn mul(self, rhs: &Localized) -> Localized {
        self.checked_mul(rhs).expect("mismatched denominators")
    }
}

impl Neg for &Localized {
    type Output = Localized;
    fn neg(self) -> Localized {
        Localized { num: -&self.num, exp: self.exp, den: self.den.clone() }
    }
}

impl fmt::Display for Localized {
    /// `num` alone or `(num)/(c^k)`; see `dsl::format_localized` for the
    /// content-cleared form used in output files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else if self.exp == 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})^{}", self.num, self.den, self.exp)
        }
    }
}

impl fmt::Debug for Localized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Localized({self})")
    }
}

/// An invertible element together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitWitness {
    pub elem: Localized,
    pub inverse: Localized,
}

impl UnitWitness {
    pub fn is_valid(&self) -> bool {
        (&self.elem * &self.inverse).is_one()
    }

    pub fn inverted(&self) -> UnitWitness {
        UnitWitness { elem: self.inverse.clone(), inverse: self.elem.clone() }
    }

    /// `elem^e` for any integer `e`.
    pub fn pow(&self, e: i64) -> Localized {
        if e >= 0 {
            self.elem.pow(e as u32)
        } else {
            self.inverse.pow(e.unsigned_abs() as u32)
        }
    }

    pub fn rebase(&self, new_den: &Denominator) -> Result<UnitWitness, LocalizeError> {
        Ok(UnitWitness { elem: self.elem.rebase(new_den)?, inverse: self.inverse.rebase(new_den)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::{VarKind, VarTable};

    fn setup() -> (Arc<VarTable>, Poly, Poly, Poly, Poly) {
        let mut t = VarTable::new(Field::Rationals);
        for (n, k) in [("x", VarKind::Base), ("y", VarKind::Base), ("w", VarKind::Base), ("z", VarKind::Additive)] {
            t.push(n, k);
        }
        let t = Arc::new(t);
        let v = |i| Poly::var(&t, VarId(i));
        (t.clone(), v(0), v(1), v(2), v(3))
    }

    fn half(t: &Arc<VarTable>) -> FieldElem {
        t.field().from_ratio(&1.into(), &2.into()).unwrap()
    }

    #[test]
    fn arithmetic_over_common_denominator() {
        let (_, x, y, _, _) = setup();
        let c: Denominator = Arc::new(y.clone());
        let a = Localized::new(x.clone(), 2, &c);
        let b = Localized::from_poly(y.clone(), &c);
        let sum = &a + &b;
        assert_eq!(sum.numerator(), &(&x + &y.pow(3)));
        assert_eq!(sum.exp(), 2);
        let prod = &Localized::new(x.clone(), 1, &c) * &Localized::from_poly(y.clone(), &c);
        assert_eq!(prod, Localized::from_poly(x.clone(), &c));
        assert_eq!(prod.exp(), 0);
        let zero = &Localized::new(x.clone(), 1, &c) - &Localized::new(x.clone(), 1, &c);
        assert!(zero.is_zero());
    }

    #[test]
    fn mismatched_denominators() {
        let (_, x, y, _, _) = setup();
        let a = Localized::new(x.clone(), 1, &Arc::new(y.clone()));
        let b = Localized::new(x.clone(), 1, &Arc::new(x.clone()));
        assert_eq!(a.checked_add(&b), Err(LocalizeError::MismatchedDenominators));
    }

    #[test]
    fn inversion() {
        let (_, x, y, _, _) = setup();
        let c: Denominator = Arc::new(y.clone());
        let w = Localized::from_poly(y.clone(), &c).invert().unwrap();
        assert_eq!(w.inverse, Localized::den_inverse(&c));
        assert!(w.is_valid());
        assert!(Localized::from_poly(x.clone(), &c).invert().is_none());
        let c2: Denominator = Arc::new(y.pow(2));
        let a = Localized::new(y.clone(), 1, &Arc::new(y.clone()));
        assert!(a.is_one());
        let b = Localized::new(y.clone(), 1, &c2);
        assert!(b.invert().unwrap().is_valid());
    }

    #[test]
    fn rebasing() {
        let (t, x, y, w, _) = setup();
        let c: Denominator = Arc::new(y.clone());
        let a = Localized::new(x.clone(), 1, &c);
        let c2: Denominator = Arc::new(y.pow(2));
        let r = a.rebase(&c2).unwrap();
        assert_eq!(r.numerator(), &(&x * &y));
        let inv = (&(&y * &w).scale(&t.field().from_i64(2)) - &x.pow(2)).clone();
        let c3: Denominator = Arc::new(&y * &inv);
        let r3 = a.rebase(&c3).unwrap();
        assert_eq!(r3.numerator(), &(&x * &inv));
        assert_eq!(r3.exp(), 1);
        assert!(a.rebase(&Arc::new(x.clone())).is_err());
    }

    #[test]
    fn division_in_localization() {
        let (t, x, y, w, z) = setup();
        let c: Denominator = Arc::new(y.clone());
        let h = half(&t);
        let f = Localized::from_poly(&(&w + &(&x * &z)) + &(&y * &z.pow(2)).scale(&h), &c);
        let g = Localized::from_poly(&x + &(&y * &z), &c);
        let inv = Localized::den_inverse(&c);
        let (q, r) = f.divide_univ(&g, VarId(3), &inv).unwrap();
        assert_eq!(&(&q * &g) + &r, f);
        let expected_q = &Localized::from_poly(z.scale(&h), &c) + &Localized::new(x.scale(&h), 1, &c);
        assert_eq!(q, expected_q);
        let expected_r = Localized::new(&(&w * &y) - &x.pow(2).scale(&h), 1, &c);
        assert_eq!(r, expected_r);
        let bad = Localized::one(&c);
        assert!(f.divide_univ(&g, VarId(3), &bad).is_err());
    }
}
