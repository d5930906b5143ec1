//! Groups in standard solvable form and their coactions.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::Field;
use crate::localize::{Localized, LocalizeError};
use crate::poly::{Monomial, Poly, Substitution, VarId, VarKind, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("duplicate variable name {0}")]
    DuplicateVariable(String),
    #[error("identity axiom fails for {var}: setting group variables to the identity gives {got}")]
    IdentityAxiom { var: String, got: String },
    #[error("image of {var} has a negative exponent in additive variable {additive}")]
    NegativeAdditiveExponent { var: String, additive: String },
    #[error("image of {var} involves {other}, which is not a base, additive or torus variable")]
    ForeignVariable { var: String, other: String },
    #[error("expected {expected} {what}, got {got}")]
    Arity { what: &'static str, expected: usize, got: usize },
    #[error("image of {0} belongs to a different variable table")]
    WrongTable(String),
}

/// A character `t_1^{e_1} ... t_m^{e_m}` of the torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character(pub Vec<i32>);

impl Character {
    pub fn trivial(m: usize) -> Character {
        Character(vec![0; m])
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Character) -> Character {
        Character(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, k: i32) -> Character {
        Character(self.0.iter().map(|e| e * k).collect())
    }

    /// The character as a monomial in the torus variables of `spec`.
    pub fn monomial(&self, spec: &ActionSpec) -> Monomial {
        let mut exps = vec![0; spec.table.len()];
        for (&v, &e) in spec.torus.iter().zip(&self.0) {
            exps[v.0] = e;
        }
        Monomial::from_exponents(exps)
    }

    /// Renders as `t1^2*t2^-1`, or `1` when trivial.
    pub fn display(&self, spec: &ActionSpec) -> String {
        if self.is_trivial() {
            return "1".to_string();
        }
        crate::poly::format_monomial(&spec.table, &self.monomial(spec))
    }
}

/// A coaction `Phi` (or one of its restrictions) given by images of the base
/// variables, together with the torus variables it keeps.
#[derive(Clone, Debug)]
pub struct Coaction {
    images: Vec<Poly>,
    subst: Substitution,
    kept_torus: Vec<bool>,
}

impl Coaction {
    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn apply_poly(&self, p: &Poly) -> Poly {
        p.substitute(&self.subst).expect("base variables are polynomial")
    }

    /// Image of `a = p / c^k` where `c` has weight `den_weight`:
    /// `chi^{-k} Phi(p) / c^k`.
    pub fn apply(&self, spec: &ActionSpec, a: &Localized, den_weight: &Character) -> Localized {
        let image = self.apply_poly(a.numerator());
        let k = a.exp() as i32;
        let mut exps = vec![0; spec.table.len()];
        for (idx, (&v, &e)) in spec.torus.iter().zip(&den_weight.0).enumerate() {
            if self.kept_torus[idx] {
                exps[v.0] = -k * e;
            }
        }
        let factor = Monomial::from_exponents(exps);
        Localized::new(image.mul_term(&factor, &spec.field().one()), a.exp(), a.den())
    }
}

/// A validated group action in standard solvable form on `K[x_1..x_n]`.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    table: Arc<VarTable>,
    base: Vec<VarId>,
    additive: Vec<VarId>,
    torus: Vec<VarId>,
    chars: Vec<Character>,
    images: Vec<Poly>,
    pres_var: VarId,
    ga_aux: VarId,
    torus_copies: Vec<VarId>,
    slice_vars: Vec<VarId>,
    slice_laurent_vars: Vec<VarId>,
}

/// Variable layout of a spec before the images are known.
#[derive(Clone, Debug)]
pub struct Skeleton {
    table: Arc<VarTable>,
    base: Vec<VarId>,
    additive: Vec<VarId>,
    torus: Vec<VarId>,
}

impl Skeleton {
    pub fn new(field: Field, base: &[&str], additive: &[&str], torus: &[&str]) -> Result<Skeleton, ActionError> {
        let mut table = VarTable::new(field);
        let mut ids = [Vec::new(), Vec::new(), Vec::new()];
        let kinds = [VarKind::Base, VarKind::Additive, VarKind::Torus];
        for (slot, (names, kind)) in [base, additive, torus].iter().zip(kinds).enumerate() {
            for name in names.iter() {
                if table.lookup(name).is_some() {
                    return Err(ActionError::DuplicateVariable(name.to_string()));
                }
                ids[slot].push(table.push(*name, kind));
            }
        }
        let user: Vec<String> = table.ids().map(|v| table.name(v).to_string()).collect();
        let pres_name = ["w", "v", "u"]
            .iter()
            .map(|s| s.to_string())
            .chain((1..).map(|i| format!("w{i}")))
            .find(|n| !user.contains(n))
            .unwrap();
        table.push(pres_name, VarKind::Auxiliary);
        table.push("_w", VarKind::Auxiliary);
        for j in 1..=ids[2].len() {
            table.push(format!("_s{j}"), VarKind::Torus);
        }
        for i in 1..=ids[1].len() {
            table.push(format!("_x{i}"), VarKind::Slice);
        }
        for j in 1..=ids[2].len() {
            table.push(format!("_y{j}"), VarKind::SliceLaurent);
        }
        let [base, additive, torus] = ids;
        Ok(Skeleton { table: Arc::new(table), base, additive, torus })
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn base(&self) -> &[VarId] {
        &self.base
    }

    pub fn additive(&self) -> &[VarId] {
        &self.additive
    }

    pub fn torus(&self) -> &[VarId] {
        &self.torus
    }

    /// Attaches characters and images and validates the result.
    pub fn build(self, chars: Vec<Character>, images: Vec<Poly>) -> Result<ActionSpec, ActionError> {
        let n = self.base.len();
        let l = self.additive.len();
        let m = self.torus.len();
        if images.len() != n {
            return Err(ActionError::Arity { what: "images", expected: n, got: images.len() });
        }
        if chars.len() != l {
            return Err(ActionError::Arity { what: "characters", expected: l, got: chars.len() });
        }
        if let Some(c) = chars.iter().find(|c| c.0.len() != m) {
            return Err(ActionError::Arity { what: "character exponents", expected: m, got: c.0.len() });
        }
        let find = |kind| self.table.ids().find(|&v| self.table.kind(v) == kind).unwrap();
        let first_aux = find(VarKind::Auxiliary);
        let t = &self.table;
        let ids_named = |prefix: &str, count: usize| -> Vec<VarId> {
            (1..=count).map(|i| t.lookup(&format!("{prefix}{i}")).unwrap()).collect()
        };
        let spec = ActionSpec {
            torus_copies: ids_named("_s", m),
            slice_vars: ids_named("_x", l),
            slice_laurent_vars: ids_named("_y", m),
            pres_var: first_aux,
            ga_aux: t.lookup("_w").unwrap(),
            table: self.table.clone(),
            base: self.base,
            additive: self.additive,
            torus: self.torus,
            chars,
            images,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ActionSpec {
    fn validate(&self) -> Result<(), ActionError> {
        let group: Vec<VarId> = self.additive.iter().chain(&self.torus).copied().collect();
        let mut identity = Substitution::new(&self.table);
        for &z in &self.additive {
            identity.set(z, Poly::zero(&self.table));
        }
        for &t in &self.torus {
            identity.set(t, Poly::one(&self.table));
        }
        for (i, img) in self.images.iter().enumerate() {
            let name = self.table.name(self.base[i]).to_string();
            if !Arc::ptr_eq(img.table(), &self.table) && **img.table() != *self.table {
                return Err(ActionError::WrongTable(name));
            }
            for v in self.table.ids() {
                if img.involves(v) && !self.base.contains(&v) && !group.contains(&v) {
                    return Err(ActionError::ForeignVariable { var: name, other: self.table.name(v).to_string() });
                }
            }
            for &z in &self.additive {
                if img.terms().any(|(m, _)| m.exp(z) < 0) {
                    return Err(ActionError::NegativeAdditiveExponent {
                        var: name,
                        additive: self.table.name(z).to_string(),
                    });
                }
            }
            let at_identity = img.substitute(&identity).expect("identity substitution");
            if at_identity != Poly::var(&self.table, self.base[i]) {
                return Err(ActionError::IdentityAxiom { var: name, got: at_identity.to_string() });
            }
        }
        Ok(())
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn base(&self) -> &[VarId] {
        &self.base
    }

    pub fn additive(&self) -> &[VarId] {
        &self.additive
    }

    pub fn torus(&self) -> &[VarId] {
        &self.torus
    }

    pub fn chars(&self) -> &[Character] {
        &self.chars
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn l(&self) -> usize {
        self.additive.len()
    }

    pub fn m(&self) -> usize {
        self.torus.len()
    }

    /// Localization variable `w` of the presentation `K[x, w]/(w c - 1, ...)`.
    pub fn pres_var(&self) -> VarId {
        self.pres_var
    }

    /// Polynomial slice indeterminates, one per additive factor.
    pub fn slice_vars(&self) -> &[VarId] {
        &self.slice_vars
    }

    /// Laurent slice indeterminates, one per torus factor.
    pub fn slice_laurent_vars(&self) -> &[VarId] {
        &self.slice_laurent_vars
    }

    pub fn gens(&self) -> Vec<Poly> {
        self.base.iter().map(|&v| Poly::var(&self.table, v)).collect()
    }

    fn coaction(&self, images: Vec<Poly>, kept_torus: Vec<bool>) -> Coaction {
        let mut subst = Substitution::new(&self.table);
        for (&v, img) in self.base.iter().zip(&images) {
            subst.set(v, img.clone());
        }
        Coaction { images, subst, kept_torus }
    }

    fn restricted(&self, keep_z: Option<usize>, keep_t_from: usize) -> Coaction {
        let mut sub = Substitution::new(&self.table);
        for (i, &z) in self.additive.iter().enumerate() {
            if keep_z != Some(i) {
                sub.set(z, Poly::zero(&self.table));
            }
        }
        for (j, &t) in self.torus.iter().enumerate() {
            if j < keep_t_from {
                sub.set(t, Poly::one(&self.table));
            }
        }
        let images = self.images.iter().map(|p| p.substitute(&sub).expect("unit images")).collect();
        let kept = (0..self.m()).map(|j| j >= keep_t_from).collect();
        self.coaction(images, kept)
    }

    /// The full coaction `Phi`.
    pub fn full(&self) -> Coaction {
        self.coaction(self.images.clone(), vec![true; self.m()])
    }

    /// `phi_i`: keeps `z_i` (0-based), sends the other `z` to 0 and all `t`
    /// to 1.
    pub fn restrict_phi(&self, i: usize) -> Coaction {
        self.restricted(Some(i), self.m())
    }

    /// `Phi` with all `z` sent to 0 and `t_1..t_{j-1}` to 1 (`j` 0-based).
    pub fn restrict_torus(&self, j: usize) -> Coaction {
        self.restricted(None, j)
    }

    /// `chi` with `Phi(p) = chi * p`, if `p` is a semi-invariant.
    pub fn weight_of(&self, p: &Poly) -> Option<Character> {
        if p.is_zero() {
            return None;
        }
        let image = self.full().apply_poly(p);
        let (mono, _) = image.leading_term()?;
        let key = mono.div(p.leading_term()?.0);
        if key.restrict(&self.torus) != key {
            return None;
        }
        let chi = Character(self.torus.iter().map(|&t| key.exp(t)).collect());
        let expected = p.mul_term(&key, &self.field().one());
        (image == expected).then_some(chi)
    }

    /// Weight of `p / c^k` given the weight of `c`.
    pub fn weight_of_localized(&self, a: &Localized, den_weight: &Character) -> Option<Character> {
        let w = self.weight_of(a.numerator())?;
        Some(w.mul(&den_weight.pow(-(a.exp() as i32))))
    }

    /// Numerator `p = a c^k` of a semi-invariant `a`, with its weight.
    pub fn semi_invariant_numerator(&self, a: &Localized) -> Result<(Poly, Character), LocalizeError> {
        let p = a.numerator().clone();
        match self.weight_of(&p) {
            Some(w) => Ok((p, w)),
            None => Err(LocalizeError::NotSemiInvariant(a.to_string())),
        }
    }

    /// Checks `phi_i(g(w)) = g(w + z_i)` for `g = phi_i(x)` on every
    /// generator; returns the failing generators.
    pub fn check_ga_coaction(&self, i: usize) -> Vec<String> {
        let phi = self.restrict_phi(i);
        let z = self.additive[i];
        let w = Poly::var(&self.table, self.ga_aux);
        let to_w = Substitution::new(&self.table).with(z, w.clone());
        let shift = Substitution::new(&self.table).with(z, &w + &Poly::var(&self.table, z));
        let mut failures = Vec::new();
        for (k, g) in phi.images().iter().enumerate() {
            let lhs = phi.apply_poly(&g.substitute(&to_w).unwrap());
            let rhs = g.substitute(&shift).unwrap();
            if lhs != rhs {
                failures.push(self.table.name(self.base[k]).to_string());
            }
        }
        failures
    }

    /// Checks coassociativity of the `t_j`-action: re-applying the
    /// coaction after renaming `t_j` to `s_j` agrees with `t_j -> s_j t_j`.
    pub fn check_torus_coaction(&self, j: usize) -> Vec<String> {
        let mut sub = Substitution::new(&self.table);
        for &z in &self.additive {
            sub.set(z, Poly::zero(&self.table));
        }
        for (jj, &t) in self.torus.iter().enumerate() {
            if jj != j {
                sub.set(t, Poly::one(&self.table));
            }
        }
        let images: Vec<Poly> = self.images.iter().map(|p| p.substitute(&sub).unwrap()).collect();
        let phi = self.coaction(images, vec![true; self.m()]);
        let t = self.torus[j];
        let s = Poly::var(&self.table, self.torus_copies[j]);
        let rename = Substitution::new(&self.table).with(t, s.clone());
        let scaled = Substitution::new(&self.table).with(t, &s * &Poly::var(&self.table, t));
        let mut failures = Vec::new();
        for (k, g) in phi.images().iter().enumerate() {
            let lhs = phi.apply_poly(&g.substitute(&rename).unwrap());
            let rhs = g.substitute(&scaled).unwrap();
            if lhs != rhs {
                failures.push(self.table.name(self.base[k]).to_string());
            }
        }
        failures
    }

    /// Checks `phi_i(psi(a)) = sum_k chi_i^k psi(c_k) z_i^k` for each `a` in
    /// `elements`, where `phi_i(a) = sum_k c_k z_i^k` and `psi` is `Phi`
    /// with `z_i -> 0`. The elements must be invariant under the additive
    /// factors before `i`.
    pub fn check_compat(&self, i: usize, elements: &[Poly]) -> Vec<String> {
        let z = self.additive[i];
        let phi = self.restrict_phi(i);
        let mut zero_zi = Substitution::new(&self.table);
        zero_zi.set(z, Poly::zero(&self.table));
        let full_images: Vec<Poly> = self.images.iter().map(|p| p.substitute(&zero_zi).unwrap()).collect();
        let psi = self.coaction(full_images, vec![true; self.m()]);
        let chi = &self.chars[i];
        let one = self.field().one();
        let mut failures = Vec::new();
        for a in elements {
            let lhs = phi.apply_poly(&psi.apply_poly(a));
            let mut rhs = Poly::zero(&self.table);
            for (k, c) in phi.apply_poly(a).split_by(z) {
                let mut mono = chi.pow(k).monomial(self);
                mono = mono.mul(&Monomial::var(self.table.len(), z, k));
                rhs = &rhs + &psi.apply_poly(&c).mul_term(&mono, &one);
            }
            if lhs != rhs {
                failures.push(a.to_string());
            }
        }
        failures
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::dsl::print_spec(self))
    }
}
