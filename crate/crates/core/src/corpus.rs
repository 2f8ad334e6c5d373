//! A reproducible corpus of small random DG algebras with harmonious retracts.
//!
//! Each algebra is either a monomial algebra (words in a few generators modulo a
//! random monomial ideal) or a small algebra built around one vanishing product,
//! plus a direct summand given by a random complex with vanishing products. Both
//! families are associative and satisfy the Leibniz rule by construction, and the
//! basis is rescaled at random so structure constants are genuine rationals.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ainfty::AInfinity;
use crate::error::Result;
use crate::graded::{Basis, GradedModule, Vector};
use crate::multimap::MultiMap;
use crate::retract::{harmonious_retract, DeformationRetract};
use crate::scalar::Scalar;

pub const MAX_DIMENSION: usize = 6;
pub const MIN_DEGREE: i32 = -3;
pub const MAX_DEGREE: i32 = 3;

/// One corpus member and the coordinates that regenerate it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusInstance {
    pub seed: u64,
    pub index: usize,
    pub algebra: AInfinity,
    pub retract: DeformationRetract,
}

/// The generator for instance `index` of the corpus with the given seed.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Basis degrees, nonzero products `e_i e_j = e_k` before rescaling, and differential entries.
#[derive(Default)]
struct Draft {
    degrees: Vec<i32>,
    products: Vec<(usize, usize, usize)>,
    differential: Vec<(usize, usize, Scalar)>,
}

impl Draft {
    fn push(&mut self, degree: i32) -> usize {
        self.degrees.push(degree);
        self.degrees.len() - 1
    }

    fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.products.iter().find(|(a, b, _)| (*a, *b) == (i, j)).map(|t| t.2)
    }
}

fn nonzero_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num: i64 = *[-3, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    let den: i64 = *[1, 1, 1, 2, 3].choose(rng).expect("nonempty");
    Scalar::ratio(num, den)
}

fn in_range(d: i32) -> bool {
    (MIN_DEGREE..=MAX_DEGREE).contains(&d)
}

/// Draws one random DG algebra of total dimension at most [`MAX_DIMENSION`].
pub fn random_dga(rng: &mut ChaCha8Rng, truncation: usize) -> Result<AInfinity> {
    let mut draft = if rng.gen_bool(0.4) { massey_draft(rng) } else { monomial_draft(rng) };
    while draft.degrees.len() < MAX_DIMENSION && rng.gen_bool(0.5) {
        let d = rng.gen_range(MIN_DEGREE..=MAX_DEGREE);
        let low = draft.push(d);
        if draft.degrees.len() < MAX_DIMENSION && in_range(d + 1) && rng.gen_bool(0.6) {
            let high = draft.push(d + 1);
            draft.differential.push((high, low, nonzero_scalar(rng)));
        }
    }
    assemble(rng, &draft, truncation)
}

/// Words in up to three generators closed under taking subwords, with an optional inner
/// differential `∂x = λ(ax − (−1)^{|x|}xa)` for a generator `a` of degree −1 with `a² = 0`.
fn monomial_draft(rng: &mut ChaCha8Rng) -> Draft {
    let budget = rng.gen_range(2..=MAX_DIMENSION);
    let with_inner = rng.gen_bool(0.6);
    let n_gens = rng.gen_range(1..=3usize);
    let mut gen_degrees: Vec<i32> = (0..n_gens).map(|_| rng.gen_range(-2..=2)).collect();
    if with_inner {
        gen_degrees[0] = -1;
    }
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut draft = Draft::default();
    for (g, &d) in gen_degrees.iter().enumerate().take(budget) {
        draft.push(d);
        words.push(vec![g]);
    }
    let mut frontier = words.clone();
    for _ in 2..=3 {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..n_gens {
                let mut cand = w.clone();
                cand.push(g);
                let forbidden = with_inner && cand.windows(2).any(|p| p == [0, 0]);
                let suffix_ok = words.iter().any(|x| x[..] == cand[1..]);
                let d: i32 = cand.iter().map(|&x| gen_degrees[x]).sum();
                if forbidden || !suffix_ok || !in_range(d) || draft.degrees.len() >= budget {
                    continue;
                }
                if rng.gen_bool(0.55) {
                    draft.push(d);
                    words.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            let uv: Vec<usize> = u.iter().chain(v).copied().collect();
            if let Some(k) = words.iter().position(|w| *w == uv) {
                draft.products.push((i, j, k));
            }
        }
    }
    if with_inner {
        let lambda = nonzero_scalar(rng);
        for x in 0..draft.degrees.len() {
            if let Some(k) = draft.product(0, x) {
                draft.differential.push((x, k, lambda.clone()));
            }
            if let Some(k) = draft.product(x, 0) {
                let c = if draft.degrees[x].rem_euclid(2) == 0 { -lambda.clone() } else { lambda.clone() };
                draft.differential.push((x, k, c));
            }
        }
    }
    draft
}

/// Cycles `c`, a product `p = c_i c_j` killed by `∂u = p`, and products `u c_k`, `c_l u`
/// carrying the resulting triple product.
fn massey_draft(rng: &mut ChaCha8Rng) -> Draft {
    loop {
        let n_cycles = rng.gen_range(1..=3usize);
        let degrees: Vec<i32> = (0..n_cycles).map(|_| rng.gen_range(-2..=2)).collect();
        let (i, j) = (rng.gen_range(0..n_cycles), rng.gen_range(0..n_cycles));
        let right = rng.gen_range(0..n_cycles);
        let left = rng.gen_range(0..n_cycles);
        let (with_right, with_left) = match rng.gen_range(0..3) {
            0 => (true, false),
            1 => (false, true),
            _ => (true, true),
        };
        let p_deg = degrees[i] + degrees[j];
        let u_deg = p_deg + 1;
        let dim = n_cycles + 2 + usize::from(with_right) + usize::from(with_left);
        let ok = dim <= MAX_DIMENSION
            && in_range(u_deg)
            && in_range(p_deg)
            && (!with_right || in_range(u_deg + degrees[right]))
            && (!with_left || in_range(u_deg + degrees[left]));
        if !ok {
            continue;
        }
        let mut draft = Draft::default();
        for &d in &degrees {
            draft.push(d);
        }
        let p = draft.push(p_deg);
        let u = draft.push(u_deg);
        draft.products.push((i, j, p));
        draft.differential.push((u, p, Scalar::one()));
        if with_right {
            let m = draft.push(u_deg + degrees[right]);
            draft.products.push((u, right, m));
        }
        if with_left {
            let m = draft.push(u_deg + degrees[left]);
            draft.products.push((left, u, m));
        }
        return draft;
    }
}

fn assemble(rng: &mut ChaCha8Rng, draft: &Draft, truncation: usize) -> Result<AInfinity> {
    let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
    let basis: Vec<Basis> = draft
        .degrees
        .iter()
        .map(|d| {
            let c = counts.entry(*d).or_insert(0);
            *c += 1;
            Basis::new(*d, *c - 1)
        })
        .collect();
    let module = GradedModule::new(counts);
    let scale: Vec<Scalar> = basis.iter().map(|_| nonzero_scalar(rng)).collect();
    let mut mu2 = MultiMap::zero(module.clone(), module.clone(), 2, 0);
    for (i, j, k) in &draft.products {
        let c = (&scale[*i] * &scale[*j]) * scale[*k].inverse().expect("nonzero");
        mu2.add_entry(vec![basis[*i], basis[*j]], &Vector::single(basis[*k], c))?;
    }
    let mut d = MultiMap::zero(module.clone(), module.clone(), 1, -1);
    for (x, y, c) in &draft.differential {
        let c = (c * &scale[*x]) * scale[*y].inverse().expect("nonzero");
        d.add_entry(vec![basis[*x]], &Vector::single(basis[*y], c))?;
    }
    AInfinity::new(module, d, [mu2], truncation)
}

/// `size` instances with harmonious retracts, instance `i` drawn from `instance_rng(seed, i)`.
pub fn corpus(size: usize, seed: u64, truncation: usize) -> Result<Vec<CorpusInstance>> {
    (0..size).map(|index| corpus_instance(seed, index, truncation)).collect()
}

pub fn corpus_instance(seed: u64, index: usize, truncation: usize) -> Result<CorpusInstance> {
    let mut rng = instance_rng(seed, index);
    let algebra = random_dga(&mut rng, truncation)?;
    let retract = harmonious_retract(&algebra.complex())?;
    Ok(CorpusInstance { seed, index, algebra, retract })
}

/// A degree-2 map `k` with one entry for which `h + ∂k − k∂` breaks a side condition, if any.
pub fn side_condition_breaker(r: &DeformationRetract) -> Result<Option<DeformationRetract>> {
    let v = r.big().module();
    for x in v.basis() {
        for y in v.basis_in_degree(x.degree + 2) {
            let mut k = MultiMap::zero(v.clone(), v.clone(), 1, 2);
            k.add_entry(vec![x], &Vector::single(y, Scalar::one()))?;
            let shifted = r.with_homotopy_shift(&k)?;
            if !shifted.side_conditions().all() {
                return Ok(Some(shifted));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::check_structure;

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = corpus(12, 7, 4).unwrap();
        let b = corpus(12, 7, 4).unwrap();
        assert_eq!(a, b);
        for inst in &a {
            let dims = inst.algebra.carrier().total_dim();
            assert!((1..=MAX_DIMENSION).contains(&dims));
            assert!(inst.algebra.carrier().dims().keys().all(|d| in_range(*d)));
            assert!(check_structure(&inst.algebra, 4).unwrap().is_zero(), "instance {}", inst.index);
        }
    }

    #[test]
    fn streams_differ_between_indices() {
        let a = corpus_instance(1, 0, 3).unwrap();
        let b = corpus_instance(1, 1, 3).unwrap();
        assert_ne!(a.algebra, b.algebra);
    }
}
