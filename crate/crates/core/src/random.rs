//! Seeded generator of valid triangular solvable actions over `Q`.
//!
//! The base variables are split into one block per additive factor plus
//! a block of parameters. `z_i` acts on its block by `exp(z_i D_i)` for a
//! triangular derivation `D_i` that kills the parameters and is
//! homogeneous of torus weight `delta_i`; the torus scales each variable
//! by its weight. The character of `z_i` is then `t^-delta_i`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{ActionSpec, Character, Skeleton};
use crate::field::Field;
use crate::poly::{Monomial, Poly, Substitution, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomConfig {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    /// Largest total degree of a derivation image.
    pub max_degree: u32,
    /// Largest absolute value of a torus weight of a parameter.
    pub max_weight: i32,
}

impl RandomConfig {
    pub fn new(n: usize, l: usize, m: usize) -> Self {
        assert!(l <= n, "every additive factor needs a variable");
        RandomConfig { n, l, m, max_degree: 2, max_weight: 2 }
    }
}

fn nonzero_coeff(rng: &mut ChaCha8Rng) -> i64 {
    let c: i64 = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

fn weight_of(weights: &[Vec<i32>], mono: &[u32], m: usize) -> Vec<i32> {
    let mut w = vec![0; m];
    for (k, &e) in mono.iter().enumerate() {
        for j in 0..m {
            w[j] += weights[k][j] * e as i32;
        }
    }
    w
}

/// A random valid action; equal seeds give equal specs.
pub fn random_action(cfg: &RandomConfig, seed: u64) -> ActionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, l, m) = (cfg.n, cfg.l, cfg.m);
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let znames: Vec<String> = (1..=l).map(|i| format!("z{i}")).collect();
    let tnames: Vec<String> = (1..=m).map(|j| format!("t{j}")).collect();
    fn refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    let skeleton =
        Skeleton::new(Field::Rationals, &refs(&names), &refs(&znames), &refs(&tnames)).expect("distinct names");
    let table = skeleton.table().clone();
    let base = skeleton.base().to_vec();

    // block[k] = Some(i) if x_k is moved by z_i, None for parameters
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut block: Vec<Option<usize>> = vec![None; n];
    for (pos, &k) in order.iter().enumerate() {
        block[k] = if pos < l {
            Some(pos)
        } else if l > 0 && rng.gen_bool(0.5) {
            Some(rng.gen_range(0..l))
        } else {
            None
        };
    }

    let deltas: Vec<Vec<i32>> = (0..l).map(|_| (0..m).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    let mut weights: Vec<Vec<i32>> = vec![vec![0; m]; n];
    let mut derivation: Vec<Poly> = vec![Poly::zero(&table); n];
    let mut seen: Vec<usize> = Vec::new();
    // visit variables in index order so a derivation image only uses
    // earlier variables of its block and parameters
    let params: Vec<usize> = (0..n).filter(|&k| block[k].is_none()).collect();
    for &k in &params {
        weights[k] = (0..m).map(|_| rng.gen_range(-cfg.max_weight..=cfg.max_weight)).collect();
    }
    for k in 0..n {
        let Some(i) = block[k] else { continue };
        let first_in_block = !seen.contains(&i);
        seen.push(i);
        let support: Vec<usize> =
            (0..n).filter(|&j| block[j].is_none() || (j < k && block[j] == Some(i))).collect();
        let active = first_in_block || rng.gen_bool(0.6);
        if !active {
            weights[k] = (0..m).map(|_| rng.gen_range(-cfg.max_weight..=cfg.max_weight)).collect();
            continue;
        }
        let degree = rng.gen_range(0..=cfg.max_degree);
        let mut exps = vec![0u32; n];
        if !support.is_empty() {
            for _ in 0..degree {
                exps[*support.choose(&mut rng).unwrap()] += 1;
            }
        }
        let w = weight_of(&weights, &exps, m);
        weights[k] = w.iter().zip(&deltas[i]).map(|(a, d)| a - d).collect();
        let mono = Monomial::from_exponents(
            (0..table.len()).map(|v| base.iter().position(|b| b.0 == v).map_or(0, |p| exps[p] as i32)).collect(),
        );
        let term = Poly::from_term(&table, mono, Field::Rationals.from_i64(nonzero_coeff(&mut rng)));
        derivation[k] = term;
    }

    let apply_d = |p: &Poly| -> Poly {
        let mut out = Poly::zero(&table);
        for (k, &v) in base.iter().enumerate() {
            if !derivation[k].is_zero() && p.involves(v) {
                out = &out + &(&p.derivative(v) * &derivation[k]);
            }
        }
        out
    };

    let mut torus_sub = Substitution::new(&table);
    for (k, &v) in base.iter().enumerate() {
        let mut mono = Monomial::var(table.len(), v, 1);
        for (j, &t) in skeleton.torus().iter().enumerate() {
            mono = mono.with_exp(t, weights[k][j]);
        }
        torus_sub.set(v, Poly::from_term(&table, mono, Field::Rationals.one()));
    }

    let mut images = Vec::with_capacity(n);
    for (k, &v) in base.iter().enumerate() {
        let mut image = Poly::zero(&table);
        if let Some(i) = block[k] {
            let z: VarId = skeleton.additive()[i];
            let mut term = Poly::var(&table, v);
            let mut j: u32 = 0;
            let mut fact = Field::Rationals.one();
            while !term.is_zero() {
                let zj = Poly::var_pow(&table, z, j as i32).expect("nonnegative");
                image = &image + &(&term * &zj).scale(&fact.inv().expect("char 0"));
                j += 1;
                fact = &fact * &Field::Rationals.from_i64(j as i64);
                term = apply_d(&term);
                assert!(j < 64, "derivation is not nilpotent");
            }
        } else {
            image = Poly::var(&table, v);
        }
        images.push(image.substitute(&torus_sub).expect("unit monomials"));
    }
    let chars = deltas.iter().map(|d| Character(d.iter().map(|x| -x).collect())).collect();
    skeleton.build(chars, images).expect("generated action is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_spec, print_spec};

    #[test]
    fn deterministic() {
        let cfg = RandomConfig::new(4, 2, 2);
        assert_eq!(print_spec(&random_action(&cfg, 5)), print_spec(&random_action(&cfg, 5)));
    }

    #[test]
    fn generated_actions_satisfy_axioms() {
        for seed in 0..40 {
            let n = 1 + seed as usize % 4;
            let cfg = RandomConfig::new(n, (seed as usize % 3).min(n), seed as usize / 3 % 3);
            let spec = random_action(&cfg, seed);
            for i in 0..spec.l() {
                assert!(spec.check_ga_coaction(i).is_empty(), "seed {seed}\n{}", print_spec(&spec));
            }
            for j in 0..spec.m() {
                assert!(spec.check_torus_coaction(j).is_empty(), "seed {seed}\n{}", print_spec(&spec));
            }
            if spec.l() > 0 {
                assert!(spec.check_compat(0, &spec.gens()).is_empty(), "seed {seed}\n{}", print_spec(&spec));
            }
            let again = parse_spec(&print_spec(&spec)).unwrap();
            assert_eq!(again.images(), spec.images());
            assert_eq!(again.chars(), spec.chars());
        }
    }
}
