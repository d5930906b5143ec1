//! Exact sparse multivariate (Laurent) polynomials over `Q` and `F_p`.
//!
//! A [`Poly`] is a map from [`Monomial`] to nonzero [`FieldElem`] attached to
//! a shared [`VarTable`]. Torus and Laurent slice variables may carry
//! negative exponents; all other variables are polynomial.

mod monomial;
mod subst;
mod univ;
mod vars;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, FieldElem};

pub use monomial::Monomial;
pub use subst::Substitution;
pub use univ::{div_rem_dense, RingElem};
pub use vars::{Var, VarId, VarKind, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials belong to different variable tables")]
    MismatchedTables,
    #[error("variable {0} is Laurent but its image is not invertible")]
    NonInvertibleImage(String),
    #[error("negative exponent on non-Laurent variable {0}")]
    NegativeExponent(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("supplied inverse does not invert the leading coefficient")]
    NotInverse,
    #[error("divisor must have positive degree in {0}")]
    ConstantDivisor(String),
    #[error("operation requires a polynomial without negative exponents")]
    LaurentNotAllowed,
}

/// Degree with a distinct sentinel for the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Finite value, treating `-inf` as `-1`.
    pub fn or_minus_one(self) -> i64 {
        self.finite().unwrap_or(-1)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Sparse polynomial in canonical form: no stored zero coefficients.
#[derive(Clone)]
pub struct Poly {
    table: Arc<VarTable>,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for Poly {}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Poly {
    pub fn zero(table: &Arc<VarTable>) -> Poly {
        Poly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> Poly {
        Poly::constant(table, table.field().one())
    }

    pub fn constant(table: &Arc<VarTable>, c: FieldElem) -> Poly {
        Poly::from_term(table, Monomial::one(table.len()), c)
    }

    pub fn from_int(table: &Arc<VarTable>, c: i64) -> Poly {
        Poly::constant(table, table.field().from_i64(c))
    }

    pub fn var(table: &Arc<VarTable>, v: VarId) -> Poly {
        Poly::from_term(table, Monomial::var(table.len(), v, 1), table.field().one())
    }

    /// `v^e`; negative `e` only for Laurent variables.
    pub fn var_pow(table: &Arc<VarTable>, v: VarId, e: i32) -> Result<Poly, PolyError> {
        if e < 0 && !table.kind(v).is_laurent() {
            return Err(PolyError::NegativeExponent(table.name(v).to_string()));
        }
        Ok(Poly::from_term(table, Monomial::var(table.len(), v, e), table.field().one()))
    }

    pub fn from_term(table: &Arc<VarTable>, m: Monomial, c: FieldElem) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { table: table.clone(), terms }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(table: &Arc<VarTable>, terms: impl IntoIterator<Item = (Monomial, FieldElem)>) -> Poly {
        let mut p = Poly::zero(table);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&FieldElem> {
        self.leading_term().map(|(_, c)| c)
    }

    /// Value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<FieldElem> {
        match self.terms.len() {
            0 => Some(self.field().zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// A single term whose variables are all Laurent, i.e. a unit.
    pub fn is_unit_monomial(&self) -> bool {
        self.terms.len() == 1
            && self.terms.keys().all(|m| {
                m.exponents().iter().enumerate().all(|(i, &e)| e == 0 || self.table.kind(VarId(i)).is_laurent())
            })
    }

    fn add_term(&mut self, m: Monomial, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_table(&self, other: &Poly) -> Result<(), PolyError> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(PolyError::MismatchedTables)
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_table(other)?;
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c);
        }
        Ok(big)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_table(other)?;
        let mut out = Poly::zero(&self.table);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table);
        }
        Poly { table: self.table.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table);
        }
        Poly { table: self.table.clone(), terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.table);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn involves(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    pub fn involves_any(&self, vars: &[VarId]) -> bool {
        vars.iter().any(|&v| self.involves(v))
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|m| m.exponents().iter().any(|&e| e < 0))
    }

    /// Coefficient of `v^k`, a polynomial not involving `v`.
    pub fn coeff(&self, v: VarId, k: i32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) == k)
            .map(|(m, c)| (m.with_exp(v, 0), c.clone()))
            .collect();
        Poly { table: self.table.clone(), terms }
    }

    /// Coefficient of the monomial `prod vars^exps`, not involving `vars`.
    pub fn coeff_monomial(&self, vars: &[VarId], exps: &[i32]) -> Poly {
        assert_eq!(vars.len(), exps.len());
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| vars.iter().zip(exps).all(|(&v, &e)| m.exp(v) == e))
            .map(|(m, c)| {
                let mut e = m.exponents().to_vec();
                for &v in vars {
                    e[v.0] = 0;
                }
                (Monomial::from_exponents(e), c.clone())
            })
            .collect();
        Poly { table: self.table.clone(), terms }
    }

    /// Coefficients of the powers of `v`.
    pub fn split_by(&self, v: VarId) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(v))
                .or_insert_with(|| Poly::zero(&self.table))
                .terms
                .insert(m.with_exp(v, 0), c.clone());
        }
        out
    }

    /// Coefficients of the monomials in `vars` (keys are restricted
    /// monomials).
    pub fn split_by_vars(&self, vars: &[VarId]) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = m.restrict(vars);
            let rest = m.div(&key);
            out.entry(key).or_insert_with(|| Poly::zero(&self.table)).terms.insert(rest, c.clone());
        }
        out
    }

    /// Degree in `v`: the largest exponent for ordinary variables (`-inf` for
    /// zero), the largest absolute exponent for Laurent variables (0 for
    /// zero).
    pub fn deg_in(&self, v: VarId) -> Degree {
        if self.table.kind(v).is_laurent() {
            return Degree::Finite(self.terms.keys().map(|m| m.exp(v).unsigned_abs() as i64).max().unwrap_or(0));
        }
        self.terms.keys().map(|m| m.exp(v) as i64).max().map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn total_degree(&self) -> Degree {
        self.terms.keys().map(|m| m.total_degree()).max().map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Scaled so that the leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(c) => self.scale(&c.inv().expect("nonzero")),
        }
    }

    pub fn derivative(&self, v: VarId) -> Poly {
        let field = self.field();
        let mut out = Poly::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                out.add_term(m.with_exp(v, e - 1), &(c * &field.from_i64(e as i64)));
            }
        }
        out
    }

    /// Evaluates at a point given for every variable of the table.
    /// Returns `None` when a negative power of zero is required.
    pub fn eval(&self, point: &[FieldElem]) -> Option<FieldElem> {
        assert_eq!(point.len(), self.table.len());
        let mut acc = self.field().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e != 0 {
                    t = &t * &point[i].pow(e as i64)?;
                }
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Exact quotient `self / n` if `n` divides `self`, `None` otherwise.
    ///
    /// Laurent variables are first shifted to nonnegative exponents with
    /// minimal exponent 0 on both sides; then `n | f` in the Laurent ring iff
    /// the shifted divisor divides the shifted dividend, and single-divisor
    /// division is exact: every step must cancel the leading term.
    pub fn exact_divide(&self, n: &Poly) -> Result<Option<Poly>, PolyError> {
        self.check_table(n)?;
        if n.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        if let Some(c) = n.constant_value() {
            return Ok(Some(self.scale(&c.inv().expect("nonzero"))));
        }
        let nv = self.table.len();
        let mut shift_f = vec![0i32; nv];
        let mut shift_n = vec![0i32; nv];
        for v in self.table.ids() {
            if self.table.kind(v).is_laurent() {
                shift_f[v.0] = self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0);
                shift_n[v.0] = n.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0);
            }
        }
        let sf = Monomial::from_exponents(shift_f);
        let sn = Monomial::from_exponents(shift_n);
        let one = self.field().one();
        let mut rem = self.mul_term(&sf.inverse(), &one);
        let divisor = n.mul_term(&sn.inverse(), &one);
        let (lm, lc) = divisor.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let lc_inv = lc.inv().expect("nonzero");
        let mut quot = Poly::zero(&self.table);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm);
            if qm.exponents().iter().any(|&e| e < 0) {
                return Ok(None);
            }
            let qc = c * &lc_inv;
            rem = &rem - &divisor.mul_term(&qm, &qc);
            quot.add_term(qm, &qc);
        }
        Ok(Some(quot.mul_term(&sf.div(&sn), &one)))
    }

    /// Least `m` with `n | c^m`, if any.
    ///
    /// Over a field, `n | c^m` for some `m` iff every irreducible factor of
    /// `n` divides `c`; the multiplicity of such a factor in `n` is at most
    /// `totaldeg(n)`, so `n | c^totaldeg(n)` decides the question.
    pub fn divides_power(n: &Poly, c: &Poly) -> Result<Option<u32>, PolyError> {
        n.check_table(c)?;
        if n.is_zero() || c.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if n.has_negative_exponents() || c.has_negative_exponents() {
            return Err(PolyError::LaurentNotAllowed);
        }
        if n.is_constant() {
            return Ok(Some(0));
        }
        let bound = n.total_degree().finite().unwrap_or(0) as u32;
        if c.pow(bound).exact_divide(n)?.is_none() {
            return Ok(None);
        }
        let mut power = Poly::one(&c.table);
        for m in 0..=bound {
            if power.exact_divide(n)?.is_some() {
                return Ok(Some(m));
            }
            power = &power * c;
        }
        unreachable!("n divides c^bound")
    }

    /// Division with remainder by `g` as univariate polynomials in `v`:
    /// `self = q g + r` with `deg_v r < deg_v g`. `inv_lead` must invert the
    /// leading `v`-coefficient of `g` exactly (it may be a Laurent unit).
    pub fn divide_univ(&self, g: &Poly, v: VarId, inv_lead: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check_table(g)?;
        self.check_table(inv_lead)?;
        let fs = dense_in(self, v)?;
        let gs = dense_in(g, v)?;
        if gs.len() < 2 {
            return Err(PolyError::ConstantDivisor(self.table.name(v).to_string()));
        }
        if !(gs.last().unwrap() * inv_lead).is_one() {
            return Err(PolyError::NotInverse);
        }
        let (q, r) = div_rem_dense(&fs, &gs, inv_lead);
        Ok((assemble_in(&q, v, &self.table), assemble_in(&r, v, &self.table)))
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Poly, PolyError> {
        s.apply(self)
    }
}

/// Coefficient vector of `p` in `v` (index = exponent).
fn dense_in(p: &Poly, v: VarId) -> Result<Vec<Poly>, PolyError> {
    let parts = p.split_by(v);
    if parts.keys().next().is_some_and(|&e| e < 0) {
        return Err(PolyError::NegativeExponent(p.table.name(v).to_string()));
    }
    let top = parts.keys().next_back().copied().unwrap_or(-1);
    let mut out = vec![Poly::zero(&p.table); (top + 1) as usize];
    for (e, c) in parts {
        out[e as usize] = c;
    }
    Ok(out)
}

fn assemble_in(coeffs: &[Poly], v: VarId, table: &Arc<VarTable>) -> Poly {
    let one = table.field().one();
    let mut out = Poly::zero(table);
    for (e, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &c.mul_term(&Monomial::var(table.len(), v, e as i32), &one);
        }
    }
    out
}

impl RingElem for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(&self.table)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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

impl Add for &Poly {
    type Output = Poly;
    /// Panics on mismatched tables; see [`Poly::checked_add`].
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("mismatched variable tables")
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.check_table(rhs).expect("mismatched variable tables");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("mismatched variable tables")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("mismatched variable tables")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { table: self.table.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Renders a monomial as `x^2*y*t^-1` (empty for the unit monomial).
pub fn format_monomial(table: &VarTable, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(table.name(VarId(i)).to_string()),
            _ => parts.push(format!("{}^{}", table.name(VarId(i)), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    /// Terms in descending monomial order, e.g. `-x^2 + 2*y*w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = format_monomial(&self.table, m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
