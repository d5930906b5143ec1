//! Invariants of a solvable group: the additive stages followed by the
//! torus stages, each shrinking the ring to the invariants of one more
//! factor while localizing at a growing semi-invariant `c`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::action::{ActionSpec, Character};
use crate::error::{Error, Result};
use crate::ga_slice::{expand_in_slice, find_local_slice, pi_ga, GaAction, GaSlice};
use crate::localize::{Denominator, Localized, UnitWitness};
use crate::poly::{Poly, VarId};
use crate::torus_slice::{gm_slice, pi_gm, GmSlice, TorusAction};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Safety cap on the iterations of each slice search.
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// Additive factor `z_i` (0-based).
    Additive(usize),
    /// Torus factor `t_j` (0-based).
    Torus(usize),
}

/// Summary of one non-skipped stage: which factor, which output slice
/// (index into `u` or `s`), and the slice degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageInfo {
    pub kind: StageKind,
    pub slice: usize,
    pub degree: u32,
}

#[derive(Clone, Debug)]
pub enum StageSlice {
    Ga(GaSlice),
    Gm(GmSlice),
}

/// Full state of a stage, kept for inspection: the slice, the
/// denominators before and after, and the retracted generators.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub info: StageInfo,
    pub slice: StageSlice,
    pub den_before: Denominator,
    pub den_after: Denominator,
    pub images: Vec<Localized>,
}

/// `K[x_1..x_n, w] / relations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub vars: Vec<String>,
    pub relations: Vec<Poly>,
}

/// Result of the solvable pipeline.
///
/// `(R_c)^G = K[b^-1, b_1..b_n]` and
/// `R_c = (R_c)^G[u_1..u_k, s_1^±..s_r^±]`.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub spec: ActionSpec,
    pub c: Denominator,
    pub weight: Character,
    pub b: Localized,
    pub b_images: Vec<Localized>,
    pub u: Vec<Localized>,
    pub s: Vec<UnitWitness>,
    pub stages: Vec<StageInfo>,
    pub records: Vec<StageRecord>,
    pub kernel: Vec<Poly>,
    pub presentation: Presentation,
}

struct State<'a> {
    spec: &'a ActionSpec,
    den: Denominator,
    weight: Character,
    b: Vec<Localized>,
    u: Vec<Localized>,
    s: Vec<UnitWitness>,
    stages: Vec<StageInfo>,
    records: Vec<StageRecord>,
}

impl<'a> State<'a> {
    fn new(spec: &'a ActionSpec) -> Self {
        let den: Denominator = Arc::new(Poly::one(spec.table()));
        let b = spec.gens().into_iter().map(|g| Localized::from_poly(g, &den)).collect();
        State {
            spec,
            den,
            weight: Character::trivial(spec.m()),
            b,
            u: Vec::new(),
            s: Vec::new(),
            stages: Vec::new(),
            records: Vec::new(),
        }
    }


    /// Moves all live values to the localization at `den`.
    fn rebase(&mut self, den: &Denominator, weight: Character) -> Result<()> {
        if Arc::ptr_eq(den, &self.den) {
            return Ok(());
        }
        for b in self.b.iter_mut().chain(self.u.iter_mut()) {
            *b = b.rebase(den)?;
        }
        for s in self.s.iter_mut() {
            *s = s.rebase(den)?;
        }
        self.den = den.clone();
        self.weight = weight;
        Ok(())
    }

    /// A semi-invariant `c'` with `(R_c)_{c~} = R_{c'}`, built from the
    /// numerator of `c~`.
    fn grow_denominator(&self, lead: &Localized) -> Result<(Denominator, Character)> {
        let p = lead.numerator();
        if Poly::divides_power(p, &self.den)?.is_some() {
            return Ok((self.den.clone(), self.weight.clone()));
        }
        let next = Arc::new((p * &*self.den).monic());
        let w = self
            .spec
            .weight_of(&next)
            .ok_or_else(|| Error::Internal(format!("denominator {next} is not a semi-invariant")))?;
        Ok((next, w))
    }

    fn additive_stage(&mut self, i: usize, opts: &Options) -> Result<()> {
        let spec = self.spec;
        let action = GaAction::new(spec, i);
        let found = find_local_slice(&action, &self.b, opts.max_iter)?;
        let d = found.degree;
        let (mut s, mut lead) = (found.s, found.lead);
        for i2 in i + 1..spec.l() {
            let later = GaAction::new(spec, i2);
            let k = later.degree(&lead).finite().unwrap_or(0) as i32;
            s = later.apply(&s).coeff(later.z(), k);
            lead = later.apply(&lead).coeff(later.z(), k);
        }
        if spec.m() > 0 {
            let full = spec.full();
            let image_c = full.apply(spec, &lead, &self.weight);
            let top = image_c
                .numerator()
                .split_by_vars(spec.torus())
                .into_keys()
                .next_back()
                .ok_or_else(|| Error::Internal("vanishing slice denominator".into()))?;
            let t_star: Vec<i32> = spec.torus().iter().map(|&t| top.exp(t)).collect();
            let target = spec.chars()[i].pow(d as i32).mul(&Character(t_star.clone()));
            let mut vars = spec.torus().to_vec();
            vars.extend_from_slice(spec.additive());
            let zeros = vec![0; spec.l()];
            s = full.apply(spec, &s, &self.weight).coeff_monomial(&vars, &[target.0, zeros.clone()].concat());
            lead = image_c.coeff_monomial(&vars, &[t_star, zeros].concat());
        }
        let den_before = self.den.clone();
        let (den, weight) = self.grow_denominator(&lead)?;
        self.rebase(&den, weight)?;
        let slice = GaSlice::new(&action, s.rebase(&den)?);
        if slice.degree != d || slice.lead != lead.rebase(&den)? {
            return Err(Error::Internal(format!("slice {} lost its degree", slice.s)));
        }
        let inv = slice
            .lead_inverse()
            .ok_or_else(|| Error::Internal(format!("slice denominator {} is not invertible", slice.lead)))?;
        self.b = self.b.iter().map(|b| pi_ga(&action, &slice, &inv, b)).collect::<Result<_>>()?;
        let info = StageInfo { kind: StageKind::Additive(i), slice: self.u.len(), degree: d };
        self.u.push(slice.s.clone());
        self.stages.push(info);
        self.records.push(StageRecord {
            info,
            slice: StageSlice::Ga(slice),
            den_before,
            den_after: self.den.clone(),
            images: self.b.clone(),
        });
        Ok(())
    }

    fn torus_stage(&mut self, j: usize, opts: &Options) -> Result<()> {
        let mut action = TorusAction::new(self.spec, j, self.weight.clone());
        let slice = gm_slice(&mut action, &self.b, opts.max_iter)?;
        let den_before = self.den.clone();
        self.rebase(&slice.den, slice.den_weight.clone())?;
        self.b = self.b.iter().map(|b| pi_gm(&action, &slice, b)).collect::<Result<_>>()?;
        let info = StageInfo { kind: StageKind::Torus(j), slice: self.s.len(), degree: slice.degree };
        self.s.push(slice.s.clone());
        self.stages.push(info);
        self.records.push(StageRecord {
            info,
            slice: StageSlice::Gm(slice),
            den_before,
            den_after: self.den.clone(),
            images: self.b.clone(),
        });
        Ok(())
    }
}

/// Each stage only sees its own factor `phi_i`. A `z_i` that moves the
/// generators under `Phi` but not under `phi_i` (as in `x + z1*z2`) has
/// no local slice.
fn reject_entangled_factors(spec: &ActionSpec) -> Result<()> {
    let full = spec.images();
    for i in 0..spec.l() {
        let z = spec.additive()[i];
        let phi = spec.restrict_phi(i);
        let own = spec.gens().iter().any(|g| phi.apply_poly(g).involves(z));
        if !own && full.iter().any(|img| img.involves(z)) {
            return Err(Error::TrivialAction(format!("{} acts trivially on its own", spec.table().name(z))));
        }
    }
    Ok(())
}

/// Invariants of the unipotent part only: the additive stages.
pub fn unipotent_invariants(spec: &ActionSpec, opts: &Options) -> Result<QuotientPresentation> {
    run(spec, opts, false)
}

/// The full pipeline: additive stages, then torus stages.
pub fn solvable_invariants(spec: &ActionSpec, opts: &Options) -> Result<QuotientPresentation> {
    run(spec, opts, true)
}

fn run(spec: &ActionSpec, opts: &Options, torus: bool) -> Result<QuotientPresentation> {
    reject_entangled_factors(spec)?;
    let mut st = State::new(spec);
    for i in 0..spec.l() {
        let action = GaAction::new(spec, i);
        if !st.b.iter().all(|b| action.is_invariant(b)) {
            st.additive_stage(i, opts)?;
        }
    }
    if torus {
        for j in 0..spec.m() {
            let action = TorusAction::new(spec, j, st.weight.clone());
            let t = spec.torus()[j];
            if st.b.iter().any(|b| action.apply(b).involves(t)) {
                st.torus_stage(j, opts)?;
            }
        }
    }
    finish(spec, st.den, st.weight, st.b, st.u, st.s, st.stages, st.records)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &ActionSpec,
    c: Denominator,
    weight: Character,
    b_images: Vec<Localized>,
    u: Vec<Localized>,
    s: Vec<UnitWitness>,
    stages: Vec<StageInfo>,
    records: Vec<StageRecord>,
) -> Result<QuotientPresentation> {
    let b = eval_at(spec, &c, &b_images, &c);
    let one = Localized::one(&c);
    let mut kernel: Vec<Poly> = u.iter().map(|x| x.numerator().clone()).collect();
    kernel.extend(s.iter().map(|w| (&w.elem - &one).numerator().clone()));
    let presentation = build_presentation(spec, &c, &kernel);
    Ok(QuotientPresentation { spec: spec.clone(), c, weight, b, b_images, u, s, stages, records, kernel, presentation })
}

/// `K[x_1..x_n, w]/(w c - 1, kernel...)`.
pub fn build_presentation(spec: &ActionSpec, c: &Poly, kernel: &[Poly]) -> Presentation {
    let table = spec.table();
    let mut vars: Vec<String> = spec.base().iter().map(|&v| table.name(v).to_string()).collect();
    vars.push(table.name(spec.pres_var()).to_string());
    let w = Poly::var(table, spec.pres_var());
    let mut relations = vec![&(&w * c) - &Poly::one(table)];
    relations.extend(kernel.iter().cloned());
    Presentation { vars, relations }
}

/// `p(v_1..v_n)` for a polynomial `p` in the base variables.
pub fn eval_at(spec: &ActionSpec, p: &Poly, values: &[Localized], den: &Denominator) -> Localized {
    let mut powers: HashMap<(usize, i32), Localized> = HashMap::new();
    // sum numerators over a common power of the denominator and reduce once
    let mut terms: Vec<(Poly, u32)> = Vec::new();
    for (mono, coef) in p.terms() {
        let mut num = Poly::constant(spec.table(), coef.clone());
        let mut exp = 0;
        for (i, &v) in spec.base().iter().enumerate() {
            let e = mono.exp(v);
            if e != 0 {
                let pw = powers.entry((i, e)).or_insert_with(|| values[i].pow(e as u32));
                num = &num * pw.numerator();
                exp += pw.exp();
            }
        }
        terms.push((num, exp));
    }
    let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let mut den_powers: HashMap<u32, Poly> = HashMap::new();
    let mut sum = Poly::zero(spec.table());
    for (num, exp) in terms {
        let shift = den_powers.entry(top - exp).or_insert_with(|| den.pow(top - exp));
        sum += &(&num * shift);
    }
    Localized::new(sum, top, den)
}

impl QuotientPresentation {
    pub fn k(&self) -> usize {
        self.u.len()
    }

    pub fn r(&self) -> usize {
        self.s.len()
    }

    /// Inverse of `b = pi(c)`; it exists because `b` is a unit of `R_c`.
    pub fn b_inverse(&self) -> Option<Localized> {
        self.b.invert().map(|w| w.inverse)
    }

    /// The composite retraction `pi: R_c -> (R_c)^G`.
    pub fn pi(&self, a: &Localized) -> Result<Localized> {
        let a = a.rebase(&self.c)?;
        let image = eval_at(&self.spec, a.numerator(), &self.b_images, &self.c);
        if a.exp() == 0 {
            return Ok(image);
        }
        let inv = self.b_inverse().ok_or_else(|| Error::Internal(format!("b = {} is not a unit", self.b)))?;
        Ok(&image * &inv.pow(a.exp()))
    }

    /// Writes `a` as a Laurent polynomial in the slice indeterminates
    /// (`_x*` for the `u`, `_y*` for the `s`) with `G`-invariant
    /// coefficients, using only `c`, the slices and the stage list.
    pub fn reconstruct(&self, a: &Localized) -> Result<Localized> {
        let a = a.rebase(&self.c)?;
        self.expand_from(0, &a)
    }

    fn expand_from(&self, stage: usize, a: &Localized) -> Result<Localized> {
        let Some(info) = self.stages.get(stage) else {
            return Ok(a.clone());
        };
        let spec = &self.spec;
        let table = spec.table();
        let mut out = Localized::zero(&self.c);
        match info.kind {
            StageKind::Additive(i) => {
                let action = GaAction::new(spec, i);
                let u = self.u.get(info.slice).ok_or_else(|| Error::Verification(format!("no slice u_{}", info.slice + 1)))?;
                let slice = GaSlice::new(&action, u.clone());
                if slice.degree == 0 || slice.degree != info.degree {
                    return Err(Error::Verification(format!("{u} is not a slice of degree {}", info.degree)));
                }
                let inv = slice
                    .lead_inverse()
                    .ok_or_else(|| Error::Verification(format!("slice denominator {} is not a unit", slice.lead)))?;
                let var = spec.slice_vars()[info.slice];
                for (e, f) in expand_in_slice(&action, &slice, &inv, a)?.iter().enumerate() {
                    if f.is_zero() {
                        continue;
                    }
                    let inner = self.expand_from(stage + 1, f)?;
                    out = &out + &inner.mul_poly(&Poly::var_pow(table, var, e as i32)?);
                }
            }
            StageKind::Torus(j) => {
                let action = TorusAction::new(spec, j, self.weight.clone());
                let unit = self.s.get(info.slice).ok_or_else(|| Error::Verification(format!("no slice s_{}", info.slice + 1)))?;
                let d = info.degree as i32;
                if d == 0 {
                    return Err(Error::Verification("torus slice of degree 0".into()));
                }
                let var = spec.slice_laurent_vars()[info.slice];
                let t = spec.torus()[j];
                let mut by_exp: std::collections::BTreeMap<i32, Localized> = Default::default();
                for (mono, coef) in action.components(a) {
                    let slot = by_exp.entry(mono.exp(t)).or_insert_with(|| Localized::zero(&self.c));
                    *slot = &*slot + &coef;
                }
                for (e, part) in by_exp {
                    if e % d != 0 {
                        return Err(Error::Verification(format!("weight {e} of a component is not a multiple of {d}")));
                    }
                    let k = e / d;
                    let inner = self.expand_from(stage + 1, &(&part * &unit.pow(k as i64)))?;
                    out = &out + &inner.mul_poly(&Poly::var_pow(table, var, -k)?);
                }
            }
        }
        Ok(out)
    }

    /// Substitutes `_x_k -> u_k` and `_y_j -> s_j` in a reconstruction.
    pub fn evaluate_expansion(&self, expansion: &Localized) -> Localized {
        let spec = &self.spec;
        let mut vars: Vec<VarId> = spec.slice_vars()[..self.k()].to_vec();
        vars.extend_from_slice(&spec.slice_laurent_vars()[..self.r()]);
        let mut out = Localized::zero(&self.c);
        for (mono, coef) in expansion.numerator().split_by_vars(&vars) {
            let mut term = Localized::new(coef, expansion.exp(), &self.c);
            for (k, &v) in spec.slice_vars()[..self.k()].iter().enumerate() {
                let e = mono.exp(v);
                if e != 0 {
                    term = &term * &self.u[k].pow(e as u32);
                }
            }
            for (j, &v) in spec.slice_laurent_vars()[..self.r()].iter().enumerate() {
                let e = mono.exp(v);
                if e != 0 {
                    term = &term * &self.s[j].pow(e as i64);
                }
            }
            out = &out + &term;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_localized, parse_poly, parse_spec};
    use crate::gallery;

    fn run(text: &str) -> QuotientPresentation {
        solvable_invariants(&parse_spec(text).unwrap(), &Options::default()).unwrap()
    }

    fn loc(q: &QuotientPresentation, s: &str) -> Localized {
        parse_localized(&q.c, s).unwrap()
    }

    fn poly(q: &QuotientPresentation, s: &str) -> Poly {
        parse_poly(q.spec.table(), s).unwrap()
    }

    fn check_structure(q: &QuotientPresentation) {
        let spec = &q.spec;
        let phi = spec.full();
        assert_eq!(spec.weight_of(&q.c).as_ref(), Some(&q.weight));
        for b in q.b_images.iter().chain([&q.b]) {
            assert_eq!(&phi.apply(spec, b, &q.weight), b, "{b} is not invariant");
            assert_eq!(&q.pi(b).unwrap(), b);
        }
        for u in &q.u {
            assert!(q.pi(u).unwrap().is_zero());
        }
        for s in &q.s {
            assert!(s.is_valid());
            assert!(q.pi(&s.elem).unwrap().is_one());
        }
        assert_eq!(q.kernel.len(), q.k() + q.r());
        assert!(q.k() + q.r() <= spec.n());
        assert_eq!(q.presentation.relations.len(), q.k() + q.r() + 1);
        for g in spec.gens() {
            let g = Localized::from_poly(g, &q.c);
            let expansion = q.reconstruct(&g).unwrap();
            assert_eq!(q.evaluate_expansion(&expansion), g);
        }
    }

    #[test]
    fn weitzenboeck() {
        let q = run(gallery::WEITZENBOECK);
        assert_eq!(*q.c, poly(&q, "y"));
        assert!(q.weight.is_trivial());
        assert_eq!(q.u, vec![loc(&q, "x")]);
        assert_eq!(q.b_images, vec![loc(&q, "0"), loc(&q, "y"), loc(&q, "(2*y*w - x^2)/(2*y)")]);
        assert_eq!(q.presentation.vars, ["x", "y", "w", "v"]);
        let rels: Vec<String> = q.presentation.relations.iter().map(|r| r.to_string()).collect();
        assert_eq!(rels, ["y*v - 1", "x"]);
        assert_eq!(q.stages, vec![StageInfo { kind: StageKind::Additive(0), slice: 0, degree: 1 }]);
        check_structure(&q);
    }

    #[test]
    fn weitzenboeck_expansion_of_w() {
        // w = pi(w) + u^2/(2y)
        let q = run(gallery::WEITZENBOECK);
        let w = loc(&q, "w");
        let e = q.reconstruct(&w).unwrap();
        let x1 = q.spec.slice_vars()[0];
        assert_eq!(e.coeff(x1, 0), loc(&q, "(2*y*w - x^2)/(2*y)"));
        assert!(e.coeff(x1, 1).is_zero());
        assert_eq!(e.coeff(x1, 2), loc(&q, "1/(2*y)"));
        assert_eq!(q.evaluate_expansion(&e), w);
    }

    #[test]
    fn char_p_slices() {
        for p in [2, 3] {
            let spec = parse_spec(&gallery::char_p(p)).unwrap();
            let q = unipotent_invariants(&spec, &Options::default()).unwrap();
            assert!(q.c.is_one());
            assert_eq!(q.u, vec![loc(&q, "x")]);
            assert_eq!(q.stages[0].degree, p as u32);
            check_structure(&q);
        }
    }

    #[test]
    fn shear() {
        let q = run(gallery::SHEAR);
        assert_eq!(*q.c, poly(&q, "x2"));
        assert_eq!(q.b_images, vec![loc(&q, "0"), loc(&q, "x2")]);
        assert_eq!(q.u, vec![loc(&q, "x1")]);
        check_structure(&q);
    }

    #[test]
    fn scaling() {
        let q = run(gallery::SCALING);
        assert_eq!(*q.c, poly(&q, "x1"));
        assert!(q.b.is_one());
        assert_eq!(q.b_images, vec![loc(&q, "1"), loc(&q, "x2/x1")]);
        assert_eq!(q.s[0].elem, loc(&q, "1/x1"));
        assert_eq!(q.s[0].inverse, loc(&q, "x1"));
        assert_eq!(q.pi(&loc(&q, "x2")).unwrap(), loc(&q, "x2/x1"));
        check_structure(&q);
    }

    #[test]
    fn additive_times_torus() {
        let q = run(gallery::GAGM);
        assert_eq!(*q.c, poly(&q, "y"));
        assert_eq!(q.weight.0, vec![1]);
        assert_eq!(q.u, vec![loc(&q, "x")]);
        assert_eq!(q.s[0].elem, loc(&q, "1/y"));
        assert_eq!(q.b_images, vec![loc(&q, "0"), loc(&q, "1"), loc(&q, "u")]);
        assert!(q.b.is_one());
        assert_eq!(q.kernel, vec![poly(&q, "x"), poly(&q, "1 - y")]);
        check_structure(&q);
    }

    #[test]
    fn affine_group() {
        let q = run(gallery::AFFINE);
        assert_eq!(*q.c, poly(&q, "x - y").monic());
        assert_eq!(q.u, vec![loc(&q, "x")]);
        assert_eq!(q.b_images, vec![loc(&q, "0"), loc(&q, "1")]);
        check_structure(&q);
    }

    #[test]
    fn trivial_action() {
        let q = run("field Q\nvars x y\nmap x = x\nmap y = y\n");
        assert!(q.c.is_one());
        assert_eq!(q.b_images, vec![loc(&q, "x"), loc(&q, "y")]);
        assert!(q.kernel.is_empty());
        assert_eq!(q.presentation.relations, vec![poly(&q, "0") + Poly::var(q.spec.table(), q.spec.pres_var()) - Poly::one(q.spec.table())]);
        check_structure(&q);
    }

    #[test]
    fn entangled_factors_are_trivial() {
        let spec = parse_spec("field Q\nvars x\nunipotent z1 z2\nmap x = x + z1*z2\n").unwrap();
        let err = solvable_invariants(&spec, &Options::default()).unwrap_err();
        assert!(matches!(err, Error::TrivialAction(_)), "{err}");
    }

    #[test]
    fn unipotent_part_keeps_torus() {
        let spec = parse_spec(gallery::GAGM).unwrap();
        let q = unipotent_invariants(&spec, &Options::default()).unwrap();
        assert_eq!(q.r(), 0);
        assert_eq!(q.b_images, vec![loc(&q, "0"), loc(&q, "y"), loc(&q, "u")]);
    }
}
