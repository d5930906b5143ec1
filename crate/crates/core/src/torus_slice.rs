//! Local slices for a factor `t_j` of the torus acting on `R_c`.

use std::cmp::Reverse;
use std::sync::Arc;

use crate::action::{ActionSpec, Character, Coaction};
use crate::error::{Error, Result};
use crate::localize::{Denominator, Localized, UnitWitness};
use crate::poly::{Monomial, VarId};

/// `Phi` restricted to the torus `t_j..t_m` on elements of `R_c`, where `c`
/// is a semi-invariant of weight `den_weight`.
pub struct TorusAction<'a> {
    spec: &'a ActionSpec,
    phi: Coaction,
    j: usize,
    kept: Vec<VarId>,
    den_weight: Character,
}

impl<'a> TorusAction<'a> {
    /// The action of `t_j..t_m` (`j` 0-based).
    pub fn new(spec: &'a ActionSpec, j: usize, den_weight: Character) -> Self {
        TorusAction { spec, phi: spec.restrict_torus(j), j, kept: spec.torus()[j..].to_vec(), den_weight }
    }

    pub fn t(&self) -> VarId {
        self.spec.torus()[self.j]
    }

    pub fn den_weight(&self) -> &Character {
        &self.den_weight
    }

    pub fn set_den_weight(&mut self, w: Character) {
        self.den_weight = w;
    }

    pub fn apply(&self, a: &Localized) -> Localized {
        self.phi.apply(self.spec, a, &self.den_weight)
    }

    /// `max |k|` over the `t_j`-exponents of `Phi_T(a)`; 0 for zero.
    pub fn degree(&self, a: &Localized) -> i64 {
        self.apply(a).numerator().deg_in(self.t()).finite().unwrap_or(0)
    }

    fn character(&self, mono: &Monomial) -> Character {
        Character(self.spec.torus().iter().map(|&t| mono.exp(t)).collect())
    }

    /// The torus-monomial coefficients of `Phi_T(a)`, ascending.
    pub fn components(&self, a: &Localized) -> Vec<(Monomial, Localized)> {
        let image = self.apply(a);
        image
            .numerator()
            .split_by_vars(&self.kept)
            .into_iter()
            .map(|(m, p)| (m, Localized::new(p, image.exp(), image.den())))
            .collect()
    }

    /// `a = sum a_chi` with each `a_chi` a semi-invariant of weight `chi`.
    pub fn decompose(&self, a: &Localized) -> Result<Vec<(Character, Localized)>> {
        let one = self.spec.field().one();
        let mut out = Vec::new();
        for (mono, coef) in self.components(a) {
            if self.apply(&coef) != coef.mul_poly(&crate::poly::Poly::from_term(self.spec.table(), mono.clone(), one.clone())) {
                return Err(Error::Internal(format!("component {coef} of {a} is not a semi-invariant")));
            }
            out.push((self.character(&mono), coef));
        }
        Ok(out)
    }
}

/// A local slice for `t_j`: a unit `s` of weight `weight` (with
/// `t_j`-exponent `-degree`) in `R_den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmSlice {
    pub s: UnitWitness,
    pub degree: u32,
    pub den: Denominator,
    pub den_weight: Character,
    pub weight: Character,
}

/// Symmetric division `e = q d + r` with `-d/2 < r <= d/2`.
pub fn symmetric_divmod(e: i64, d: i64) -> (i64, i64) {
    if d == 0 {
        return (0, e);
    }
    let r0 = e.rem_euclid(d);
    let r = if 2 * r0 > d { r0 - d } else { r0 };
    ((e - r) / d, r)
}

/// Runs the multiplicative slice algorithm on `generators`. The
/// denominator may grow; the returned slice carries the final one.
pub fn gm_slice(action: &mut TorusAction, generators: &[Localized], max_iter: usize) -> Result<GmSlice> {
    let spec = action.spec;
    let mut den = generators.first().map(|g| g.den().clone()).ok_or_else(|| Error::TrivialAction("no generators".into()))?;
    let mut gens = generators.to_vec();
    let one = Localized::one(&den);
    let mut s = UnitWitness { elem: one.clone(), inverse: one };
    let mut weight = Character::trivial(spec.m());
    let mut d: i64 = 0;
    let t = action.t();
    for _ in 0..max_iter {
        let mut best: Option<((i64, usize, Reverse<Monomial>), i64, i64, Localized, Character)> = None;
        for (i, g) in gens.iter().enumerate() {
            for (mono, coef) in action.components(g) {
                let e = mono.exp(t) as i64;
                let off = if d == 0 { e != 0 } else { e % d != 0 };
                if !off {
                    continue;
                }
                let (q, r) = symmetric_divmod(e, d);
                let key = (r.abs(), i, Reverse(mono.clone()));
                if best.as_ref().map_or(true, |(k, ..)| key < *k) {
                    best = Some((key, q, r, coef, action.character(&mono)));
                }
            }
        }
        let Some((_, q, r, b, b_weight)) = best else {
            if d == 0 {
                return Err(Error::TrivialAction(format!("{} acts trivially", spec.table().name(t))));
            }
            debug_assert_eq!(spec.weight_of_localized(&s.elem, action.den_weight()).as_ref(), Some(&weight));
            return Ok(GmSlice { s, degree: d as u32, den, den_weight: action.den_weight().clone(), weight });
        };
        let mut hat = &s.pow(q) * &b;
        let hat_weight = weight.pow(q as i32).mul(&b_weight);
        if hat.invert().is_none() {
            let (num, _) = spec.semi_invariant_numerator(&hat)?;
            let new_den: Denominator = Arc::new((&num * &den).monic());
            let new_weight = spec
                .weight_of(&new_den)
                .ok_or_else(|| Error::Internal(format!("denominator {new_den} is not a semi-invariant")))?;
            hat = hat.rebase(&new_den)?;
            gens = gens.iter().map(|g| g.rebase(&new_den)).collect::<std::result::Result<_, _>>()?;
            den = new_den;
            action.set_den_weight(new_weight);
        }
        let hat_unit = hat.invert().ok_or_else(|| Error::Internal(format!("{hat} is not invertible after localizing")))?;
        if r < 0 {
            s = hat_unit;
            weight = hat_weight;
        } else {
            s = hat_unit.inverted();
            weight = hat_weight.pow(-1);
        }
        d = r.abs();
    }
    Err(Error::CapExceeded(max_iter))
}

/// `pi(a)`: substitutes `t_j^{kd} -> s^k` and `t_{j+1..m} -> 1` in `Phi_T(a)`.
pub fn pi_gm(action: &TorusAction, slice: &GmSlice, a: &Localized) -> Result<Localized> {
    let d = slice.degree as i32;
    let mut out = Localized::zero(a.den());
    for (mono, coef) in action.components(a) {
        let e = mono.exp(action.t());
        if e % d != 0 {
            return Err(Error::Internal(format!("exponent {e} of {a} is not divisible by {d}")));
        }
        out = &out + &(&coef * &slice.s.pow((e / d) as i64));
    }
    Ok(out)
}
