use std::cmp::Ordering;

use super::VarId;

/// Exponent vector over a [`super::VarTable`].
///
/// The derived ordering is the global monomial order: total degree first,
/// ties broken lexicographically with earlier variables dominating.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: i64,
    exps: Box<[i32]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { degree: 0, exps: vec![0; nvars].into_boxed_slice() }
    }

    pub fn from_exponents(exps: Vec<i32>) -> Self {
        let degree = exps.iter().map(|&e| e as i64).sum();
        Monomial { degree, exps: exps.into_boxed_slice() }
    }

    pub fn var(nvars: usize, v: VarId, e: i32) -> Self {
        let mut exps = vec![0; nvars];
        exps[v.0] = e;
        Self::from_exponents(exps)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exps
    }

    pub fn exp(&self, v: VarId) -> i32 {
        self.exps[v.0]
    }

    pub fn total_degree(&self) -> i64 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<i32> = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect();
        Monomial { degree: self.degree + other.degree, exps: exps.into_boxed_slice() }
    }

    /// Exponent-wise difference `self / other`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let exps: Vec<i32> = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a - b).collect();
        Monomial { degree: self.degree - other.degree, exps: exps.into_boxed_slice() }
    }

    pub fn inverse(&self) -> Monomial {
        let exps: Vec<i32> = self.exps.iter().map(|e| -e).collect();
        Monomial { degree: -self.degree, exps: exps.into_boxed_slice() }
    }

    pub fn with_exp(&self, v: VarId, e: i32) -> Monomial {
        let mut exps = self.exps.to_vec();
        exps[v.0] = e;
        Self::from_exponents(exps)
    }

    /// Restriction to a variable subset; the others are zeroed.
    pub fn restrict(&self, vars: &[VarId]) -> Monomial {
        let mut exps = vec![0; self.exps.len()];
        for &v in vars {
            exps[v.0] = self.exps[v.0];
        }
        Self::from_exponents(exps)
    }

    /// Compares the restrictions of two monomials to `vars` under the
    /// global order.
    pub fn cmp_on(&self, other: &Monomial, vars: &[VarId]) -> Ordering {
        self.restrict(vars).cmp(&other.restrict(vars))
    }
}
