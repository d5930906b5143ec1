use std::collections::HashMap;
use std::sync::Arc;

use super::{Monomial, Poly, PolyError, VarId, VarTable};

/// Ring homomorphism given by images of some variables; the rest are fixed.
///
/// A Laurent variable occurring in the input must map to a unit monomial or
/// carry an explicitly declared inverse.
#[derive(Clone, Debug)]
pub struct Substitution {
    table: Arc<VarTable>,
    images: Vec<Option<Poly>>,
    inverses: Vec<Option<Poly>>,
}

impl Substitution {
    pub fn new(table: &Arc<VarTable>) -> Self {
        Substitution { table: table.clone(), images: vec![None; table.len()], inverses: vec![None; table.len()] }
    }

    pub fn with(mut self, v: VarId, image: Poly) -> Self {
        self.set(v, image);
        self
    }

    pub fn set(&mut self, v: VarId, image: Poly) {
        self.images[v.0] = Some(image);
    }

    /// Maps `v` to `image`, declaring `inverse` as its inverse.
    pub fn set_invertible(&mut self, v: VarId, image: Poly, inverse: Poly) {
        self.images[v.0] = Some(image);
        self.inverses[v.0] = Some(inverse);
    }

    pub fn image(&self, v: VarId) -> Option<&Poly> {
        self.images[v.0].as_ref()
    }

    fn inverse_of(&self, v: VarId) -> Result<Poly, PolyError> {
        if let Some(inv) = &self.inverses[v.0] {
            return Ok(inv.clone());
        }
        let img = self.images[v.0].as_ref().expect("mapped");
        if img.is_unit_monomial() {
            let (m, c) = img.leading_term().unwrap();
            return Ok(Poly::from_term(img.table(), m.inverse(), c.inv().expect("nonzero")));
        }
        Err(PolyError::NonInvertibleImage(self.table.name(v).to_string()))
    }

    pub(super) fn apply(&self, p: &Poly) -> Result<Poly, PolyError> {
        let mapped: Vec<VarId> = self.table.ids().filter(|v| self.images[v.0].is_some()).collect();
        for &v in &mapped {
            if self.table.kind(v).is_laurent() && p.involves(v) {
                self.inverse_of(v)?;
            } else if p.terms().any(|(m, _)| m.exp(v) < 0) {
                return Err(PolyError::NegativeExponent(self.table.name(v).to_string()));
            }
        }
        let target = self.images.iter().flatten().next().map_or_else(|| p.table().clone(), |q| q.table().clone());
        let mut cache: HashMap<(usize, i32), Poly> = HashMap::new();
        let mut out = Poly::zero(&target);
        for (m, c) in p.terms() {
            let mut rest = m.exponents().to_vec();
            let mut factor = Poly::constant(&target, c.clone());
            for &v in &mapped {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                rest[v.0] = 0;
                if !cache.contains_key(&(v.0, e)) {
                    let base = if e < 0 { self.inverse_of(v)? } else { self.images[v.0].clone().unwrap() };
                    cache.insert((v.0, e), base.pow(e.unsigned_abs()));
                }
                factor = &factor * &cache[&(v.0, e)];
            }
            let rest = Monomial::from_exponents(rest);
            out = &out + &factor.mul_term(&rest, &target.field().one());
        }
        Ok(out)
    }
}
