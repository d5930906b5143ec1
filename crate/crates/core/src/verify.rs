//! Independent checks of a computed (or decoded) result.
//!
//! `verify_output` re-derives every property symbolically from the final
//! outputs alone. `numeric_spotcheck` evaluates invariants at random
//! points and their translates by random group elements.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::ActionSpec;
use crate::field::{Field, FieldElem};
use crate::localize::Localized;
use crate::pipeline::{build_presentation, eval_at, QuotientPresentation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

/// Outcome of `verify_output`, one entry per property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<16} {}", c.name, if c.passed { "ok" } else { "FAILED" })?;
            for w in &c.witnesses {
                writeln!(f, "    {w}")?;
            }
        }
        Ok(())
    }
}

struct Collector {
    name: &'static str,
    witnesses: Vec<String>,
}

impl Collector {
    fn new(name: &'static str) -> Self {
        Collector { name, witnesses: Vec::new() }
    }

    fn require(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.witnesses.push(witness());
        }
    }

    fn finish(self) -> Check {
        Check { name: self.name, passed: self.witnesses.is_empty(), witnesses: self.witnesses }
    }
}

fn b_name(i: usize) -> String {
    format!("b_{}", i + 1)
}

/// Checks invariance, semi-invariance, kernel, reconstruction, counting
/// and idempotence.
pub fn verify_output(q: &QuotientPresentation) -> Report {
    let spec = &q.spec;
    let phi = spec.full();
    let mut checks = Vec::new();

    let mut c = Collector::new("invariance");
    let named = q.b_images.iter().enumerate().map(|(i, b)| (b_name(i), b)).chain([("b".to_string(), &q.b)]);
    for (name, b) in named {
        let image = phi.apply(spec, b, &q.weight);
        c.require(&image == b, || format!("Phi({name}) - {name} = {}", &image - b));
    }
    let expected_b = eval_at(spec, &q.c, &q.b_images, &q.c);
    c.require(expected_b == q.b, || format!("b = {} but c(b_1..b_n) = {expected_b}", q.b));
    checks.push(c.finish());

    let mut c = Collector::new("semi_invariance");
    match spec.weight_of(&q.c) {
        Some(w) if w == q.weight => {}
        Some(w) => c.require(false, || format!("c = {} has weight {} not {}", q.c, w.display(spec), q.weight.display(spec))),
        None => c.require(false, || format!("c = {} is not a semi-invariant", q.c)),
    }
    checks.push(c.finish());

    let mut c = Collector::new("kernel");
    for (i, u) in q.u.iter().enumerate() {
        match q.pi(u) {
            Ok(p) => c.require(p.is_zero(), || format!("pi(u_{}) = {p}", i + 1)),
            Err(e) => c.require(false, || format!("pi(u_{}): {e}", i + 1)),
        }
    }
    for (j, s) in q.s.iter().enumerate() {
        c.require(s.is_valid(), || format!("s_{} * s_{}^-1 = {}", j + 1, j + 1, &s.elem * &s.inverse));
        match q.pi(&s.elem) {
            Ok(p) => c.require(p.is_one(), || format!("pi(s_{}) = {p}", j + 1)),
            Err(e) => c.require(false, || format!("pi(s_{}): {e}", j + 1)),
        }
    }
    let one = Localized::one(&q.c);
    let mut kernel: Vec<_> = q.u.iter().map(|u| u.numerator().clone()).collect();
    kernel.extend(q.s.iter().map(|s| (&s.elem - &one).numerator().clone()));
    c.require(kernel == q.kernel, || "kernel generators differ from the slice numerators".into());
    let pres = build_presentation(spec, &q.c, &kernel);
    c.require(pres == q.presentation, || "presentation differs from (w c - 1, kernel)".into());
    checks.push(c.finish());

    let mut c = Collector::new("reconstruction");
    for (g, &v) in spec.gens().into_iter().zip(spec.base()) {
        let name = spec.table().name(v).to_string();
        let g = Localized::from_poly(g, &q.c);
        match q.reconstruct(&g) {
            Ok(e) => {
                let back = q.evaluate_expansion(&e);
                c.require(back == g, || format!("{name} reconstructs to {back}"));
            }
            Err(e) => c.require(false, || format!("{name}: {e}")),
        }
    }
    checks.push(c.finish());

    let mut c = Collector::new("counting");
    let (k, r) = (q.k(), q.r());
    c.require(q.kernel.len() == k + r, || format!("{} kernel generators for k + r = {}", q.kernel.len(), k + r));
    c.require(k + r <= spec.n(), || format!("k + r = {} exceeds n = {}", k + r, spec.n()));
    c.require(q.presentation.relations.len() == k + r + 1, || {
        format!("{} relations for k + r + 1 = {}", q.presentation.relations.len(), k + r + 1)
    });
    checks.push(c.finish());

    let mut c = Collector::new("idempotence");
    for (i, b) in q.b_images.iter().enumerate() {
        match q.pi(b) {
            Ok(p) => c.require(&p == b, || format!("pi({}) = {p}", b_name(i))),
            Err(e) => c.require(false, || format!("pi({}): {e}", b_name(i))),
        }
    }
    checks.push(c.finish());

    Report { checks }
}

/// Outcome of a numeric spot check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpotReport {
    pub seed: u64,
    pub trials: usize,
    /// Trials where every probe agreed.
    pub agreed: usize,
    /// Trials abandoned because no point off `c = 0` was found.
    pub skipped: usize,
    pub disagreements: Vec<String>,
}

impl SpotReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

const MAX_RETRIES: usize = 20;

fn random_elem(rng: &mut ChaCha8Rng, field: Field, nonzero: bool) -> FieldElem {
    loop {
        let v = match field {
            Field::Rationals => {
                let num = BigInt::from(rng.gen_range(-30i64..=30));
                let den = BigInt::from(rng.gen_range(1i64..=12));
                field.from_ratio(&num, &den).expect("nonzero denominator")
            }
            Field::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
        };
        if !nonzero || !v.is_zero() {
            return v;
        }
    }
}

fn eval_localized(a: &Localized, point: &[FieldElem]) -> Option<FieldElem> {
    let num = a.numerator().eval(point)?;
    let den = a.den().eval(point)?.pow(a.exp() as i64)?;
    Some(&num * &den.inv()?)
}

/// Evaluates each probe at random points `p` and at `g . p` for random
/// group elements `g`; invariants must agree exactly.
pub fn spotcheck_probes(spec: &ActionSpec, probes: &[(String, Localized)], trials: usize, seed: u64) -> SpotReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = spec.table();
    let field = spec.field();
    let mut report = SpotReport { seed, trials, agreed: 0, skipped: 0, disagreements: Vec::new() };
    'trial: for trial in 0..trials {
        for _ in 0..MAX_RETRIES {
            let mut point = vec![field.zero(); table.len()];
            let mut params = vec![field.zero(); table.len()];
            for &v in spec.base() {
                point[v.0] = random_elem(&mut rng, field, false);
            }
            for &z in spec.additive() {
                params[z.0] = random_elem(&mut rng, field, false);
            }
            for &t in spec.torus() {
                params[t.0] = random_elem(&mut rng, field, true);
            }
            let mut moved = params.clone();
            for (&v, img) in spec.base().iter().zip(spec.images()) {
                let mut at = params.clone();
                for &x in spec.base() {
                    at[x.0] = point[x.0].clone();
                }
                moved[v.0] = img.eval(&at).expect("torus parameters are nonzero");
            }
            let pairs: Option<Vec<_>> = probes
                .iter()
                .map(|(_, a)| Some((eval_localized(a, &point)?, eval_localized(a, &moved)?)))
                .collect();
            let Some(pairs) = pairs else { continue };
            let mut ok = true;
            for ((name, _), (before, after)) in probes.iter().zip(pairs) {
                if before != after {
                    ok = false;
                    report.disagreements.push(format!("trial {trial}: {name} takes {before} and {after}"));
                }
            }
            if ok {
                report.agreed += 1;
            }
            continue 'trial;
        }
        report.skipped += 1;
    }
    report
}

/// Spot check of `b` and every `b_i`.
pub fn numeric_spotcheck(q: &QuotientPresentation, trials: usize, seed: u64) -> SpotReport {
    let mut probes: Vec<(String, Localized)> =
        q.b_images.iter().enumerate().map(|(i, b)| (b_name(i), b.clone())).collect();
    probes.push(("b".into(), q.b.clone()));
    spotcheck_probes(&q.spec, &probes, trials, seed)
}
