//! Local slices for a single additive group factor.
//!
//! All elements live in a localization `R_c` whose denominator `c` is
//! invariant under the factor, so the coaction extends to `R_c` without a
//! character twist.

use crate::action::{ActionSpec, Character, Coaction};
use crate::error::{Error, Result};
use crate::localize::Localized;
use crate::poly::{Degree, VarId};

/// The restriction `phi_i: R_c -> R_c[z_i]` of a coaction.
pub struct GaAction<'a> {
    spec: &'a ActionSpec,
    phi: Coaction,
    z: VarId,
    trivial: Character,
}

impl<'a> GaAction<'a> {
    /// `phi_i` for the additive factor `i` (0-based).
    pub fn new(spec: &'a ActionSpec, i: usize) -> Self {
        GaAction { spec, phi: spec.restrict_phi(i), z: spec.additive()[i], trivial: Character::trivial(spec.m()) }
    }

    pub fn z(&self) -> VarId {
        self.z
    }

    pub fn apply(&self, a: &Localized) -> Localized {
        self.phi.apply(self.spec, a, &self.trivial)
    }

    /// `deg_z phi(a)`, with `-inf` for zero.
    pub fn degree(&self, a: &Localized) -> Degree {
        self.apply(a).numerator().deg_in(self.z)
    }

    pub fn is_invariant(&self, a: &Localized) -> bool {
        !self.apply(a).involves(self.z)
    }
}

/// A local slice `s` of degree `d` with denominator `lead`, the leading
/// `z`-coefficient of `image = phi(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaSlice {
    pub s: Localized,
    pub degree: u32,
    pub lead: Localized,
    pub image: Localized,
}

impl GaSlice {
    pub fn new(action: &GaAction, s: Localized) -> GaSlice {
        let image = action.apply(&s);
        let degree = image.numerator().deg_in(action.z).finite().unwrap_or(0) as u32;
        let lead = image.coeff(action.z, degree as i32);
        GaSlice { s, degree, lead, image }
    }

    /// Inverse of the denominator in the current localization, if any.
    pub fn lead_inverse(&self) -> Option<Localized> {
        self.lead.invert().map(|w| w.inverse)
    }
}

/// Division with remainder principle: `(m, r, b)` with
/// `c^m a = r s + b`, `c` the leading coefficient of `phi(s)`.
///
/// Pseudo-division of `phi(a)` by `phi(s)` that multiplies by `c` only
/// when a leading coefficient is not already divisible by it.
pub fn dwr(action: &GaAction, s: &Localized, a: &Localized) -> Result<(u32, Localized, Localized)> {
    let z = action.z;
    let g = dense(&action.apply(s), z);
    let mut rem = dense(&action.apply(a), z);
    let d = g.len() - 1;
    if d == 0 {
        return Err(Error::Internal(format!("{s} is invariant and cannot be divided by")));
    }
    let lead = g[d].clone();
    let zero = Localized::zero(s.den());
    let mut m = 0u32;
    let mut quot = vec![zero.clone(); rem.len().saturating_sub(d).max(1)];
    for k in (d..rem.len()).rev() {
        if rem[k].is_zero() {
            continue;
        }
        let coef = match rem[k].exact_divide(&lead)? {
            Some(q) => q,
            None => {
                m += 1;
                for x in rem.iter_mut().chain(quot.iter_mut()) {
                    *x = &*x * &lead;
                }
                rem[k].exact_divide(&lead)?.expect("multiplied by the divisor")
            }
        };
        for j in 0..=d {
            rem[k - d + j] = &rem[k - d + j] - &(&coef * &g[j]);
        }
        quot[k - d] = coef;
    }
    let mut r = quot[0].clone();
    let mut b = rem[0].clone();
    while m > 0 {
        match (r.exact_divide(&lead)?, b.exact_divide(&lead)?) {
            (Some(r2), Some(b2)) => {
                r = r2;
                b = b2;
                m -= 1;
            }
            _ => break,
        }
    }
    Ok((m, r, b))
}

fn dense(a: &Localized, z: VarId) -> Vec<Localized> {
    let parts = a.split_by(z);
    let top = parts.keys().next_back().copied().unwrap_or(0);
    let mut out = vec![Localized::zero(a.den()); top as usize + 1];
    for (e, c) in parts {
        out[e as usize] = c;
    }
    out
}

/// Searches a local slice among the coefficients of the images of
/// `generators`, iterating the division principle in positive
/// characteristic.
pub fn find_local_slice(action: &GaAction, generators: &[Localized], max_iter: usize) -> Result<GaSlice> {
    let char0 = action.spec.field().characteristic() == 0;
    let mut current: Vec<Localized> = generators.to_vec();
    let mut last_max = i64::MAX;
    let mut slice = None;
    for _ in 0..max_iter {
        let degrees: Vec<i64> = current.iter().map(|b| action.degree(b).finite().unwrap_or(0)).collect();
        let max = degrees.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return slice.ok_or_else(|| Error::TrivialAction("the additive factor acts trivially".into()));
        }
        assert!(max < last_max, "slice search must lower the maximal degree");
        last_max = max;
        let mut best: Option<(i64, usize, i32, Localized)> = None;
        for (i, b) in current.iter().enumerate() {
            for (k, coef) in action.apply(b).split_by(action.z) {
                let deg = action.degree(&coef).finite().unwrap_or(0);
                if deg == 0 {
                    continue;
                }
                if best.as_ref().map_or(true, |(bd, bi, bk, _)| (deg, i, k) < (*bd, *bi, *bk)) {
                    best = Some((deg, i, k, coef));
                }
            }
        }
        let (_, _, _, s) = best.expect("a generator of positive degree has a noninvariant coefficient");
        let found = GaSlice::new(action, s);
        if char0 {
            debug_assert_eq!(found.degree, 1);
            return Ok(found);
        }
        current = generators
            .iter()
            .map(|a| dwr(action, &found.s, a).map(|(_, _, b)| b))
            .collect::<Result<_>>()?;
        slice = Some(found);
    }
    Err(Error::CapExceeded(max_iter))
}

/// `pi(a)`: the remainder of `phi(a)` divided by `phi(s)`.
pub fn pi_ga(action: &GaAction, slice: &GaSlice, inv_lead: &Localized, a: &Localized) -> Result<Localized> {
    let (_, r) = action.apply(a).divide_univ(&slice.image, action.z, inv_lead)?;
    if r.involves(action.z) {
        return Err(Error::Internal(format!("remainder of {a} is not invariant")));
    }
    Ok(r)
}

/// Coefficients `f_0, f_1, ...` of `a = sum f_j s^j` with invariant `f_j`.
pub fn expand_in_slice(
    action: &GaAction,
    slice: &GaSlice,
    inv_lead: &Localized,
    a: &Localized,
) -> Result<Vec<Localized>> {
    if slice.degree == 0 {
        return Err(Error::Internal(format!("{} is invariant, not a slice", slice.s)));
    }
    let bound = action.degree(a).finite().unwrap_or(0) as usize / slice.degree as usize + 1;
    let mut out = Vec::new();
    let mut rest = a.clone();
    while !rest.is_zero() {
        if out.len() > bound {
            return Err(Error::Internal(format!("expansion of {a} does not terminate")));
        }
        let (q, r) = action.apply(&rest).divide_univ(&slice.image, action.z, inv_lead)?;
        if r.involves(action.z) {
            return Err(Error::Internal(format!("remainder of {rest} is not invariant")));
        }
        out.push(r);
        rest = q.coeff(action.z, 0);
    }
    if out.is_empty() {
        out.push(Localized::zero(a.den()));
    }
    Ok(out)
}
