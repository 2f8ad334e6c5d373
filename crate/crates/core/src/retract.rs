//! Chain complexes, deformation retracts and their side conditions, exact
//! homology, harmonious retracts onto homology and the named desk instances.

use std::collections::BTreeMap;

use crate::ainfty::{expect_shape, AInfinity};
use crate::error::{Error, Result};
use crate::graded::{Basis, GradedModule, Vector};
use crate::linalg::{extend_independent, Matrix};
use crate::multimap::MultiMap;
use crate::scalar::Scalar;

/// A graded module with a differential of degree −1 squaring to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    module: GradedModule,
    differential: MultiMap,
}

impl ChainComplex {
    pub fn new(module: GradedModule, differential: MultiMap) -> Result<Self> {
        expect_shape(&differential, &module, &module, 1, -1, "differential")?;
        if !differential.after(&differential)?.is_zero() {
            return Err(Error::NotAComplex);
        }
        Ok(ChainComplex { module, differential })
    }

    /// The complex with zero differential.
    pub fn trivial(module: GradedModule) -> Self {
        let differential = MultiMap::zero(module.clone(), module.clone(), 1, -1);
        ChainComplex { module, differential }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn differential(&self) -> &MultiMap {
        &self.differential
    }
}

impl AInfinity {
    pub fn complex(&self) -> ChainComplex {
        ChainComplex { module: self.carrier().clone(), differential: self.differential().clone() }
    }
}

/// The matrix of an arity-one map on the degree-`degree` part of its source.
pub fn degree_block(map: &MultiMap, degree: i32) -> Matrix {
    let cols = map.source().dim(degree);
    let rows = map.target().dim(degree + map.degree());
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        if let Some(v) = map.get(&[Basis::new(degree, j)]) {
            for (b, c) in v.iter() {
                m[(b.index, j)] = c.clone();
            }
        }
    }
    m
}

/// The arity-one map with the given per-degree matrices.
pub fn map_from_blocks(
    source: &GradedModule,
    target: &GradedModule,
    degree: i32,
    blocks: &BTreeMap<i32, Matrix>,
) -> Result<MultiMap> {
    let mut map = MultiMap::zero(source.clone(), target.clone(), 1, degree);
    for (&d, m) in blocks {
        for j in 0..m.cols() {
            let v: Vector = (0..m.rows())
                .filter(|&i| !m[(i, j)].is_zero())
                .map(|i| (Basis::new(d + degree, i), m[(i, j)].clone()))
                .collect();
            map.add_entry(vec![Basis::new(d, j)], &v)?;
        }
    }
    Ok(map)
}

/// The four extra identities `fg = 1`, `fh = 0`, `hg = 0`, `hh = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideConditions {
    pub fg_identity: bool,
    pub fh_zero: bool,
    pub hg_zero: bool,
    pub hh_zero: bool,
}

impl SideConditions {
    pub fn all(&self) -> bool {
        self.fg_identity && self.fh_zero && self.hg_zero && self.hh_zero
    }
}

/// `f : V → W`, `g : W → V` chain maps and `h : V → V` of degree +1 with `gf − 1 = ∂h + h∂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationRetract {
    big: ChainComplex,
    small: ChainComplex,
    f: MultiMap,
    g: MultiMap,
    h: MultiMap,
    side: SideConditions,
}

impl DeformationRetract {
    pub fn new(big: ChainComplex, small: ChainComplex, f: MultiMap, g: MultiMap, h: MultiMap) -> Result<Self> {
        let (v, w) = (&big.module, &small.module);
        expect_shape(&f, v, w, 1, 0, "f")?;
        expect_shape(&g, w, v, 1, 0, "g")?;
        expect_shape(&h, v, v, 1, 1, "h")?;
        let (dv, dw) = (&big.differential, &small.differential);
        if !f.after(dv)?.compare(&dw.after(&f)?)? {
            return Err(Error::InvalidRetract("f is not a chain map".into()));
        }
        if !g.after(dw)?.compare(&dv.after(&g)?)? {
            return Err(Error::InvalidRetract("g is not a chain map".into()));
        }
        let lhs = g.after(&f)?.sub(&MultiMap::identity(v))?;
        let rhs = dv.after(&h)?.add(&h.after(dv)?)?;
        if !lhs.compare(&rhs)? {
            return Err(Error::InvalidRetract("gf − 1 differs from ∂h + h∂".into()));
        }
        let side = SideConditions {
            fg_identity: f.after(&g)?.compare(&MultiMap::identity(w))?,
            fh_zero: f.after(&h)?.is_zero(),
            hg_zero: h.after(&g)?.is_zero(),
            hh_zero: h.after(&h)?.is_zero(),
        };
        Ok(DeformationRetract { big, small, f, g, h, side })
    }

    pub fn big(&self) -> &ChainComplex {
        &self.big
    }

    pub fn small(&self) -> &ChainComplex {
        &self.small
    }

    pub fn f(&self) -> &MultiMap {
        &self.f
    }

    pub fn g(&self) -> &MultiMap {
        &self.g
    }

    pub fn h(&self) -> &MultiMap {
        &self.h
    }

    pub fn side_conditions(&self) -> SideConditions {
        self.side
    }

    /// The retract with `h` replaced by `h + ∂k − k∂` for `k` of degree 2.
    pub fn with_homotopy_shift(&self, k: &MultiMap) -> Result<Self> {
        let v = &self.big.module;
        expect_shape(k, v, v, 1, 2, "k")?;
        let dv = &self.big.differential;
        let h = self.h.add(&dv.after(k)?)?.sub(&k.after(dv)?)?;
        DeformationRetract::new(self.big.clone(), self.small.clone(), self.f.clone(), self.g.clone(), h)
    }

    /// The retract with `h` replaced by `h + g c f` for `c` of degree 1 on `W` with `∂c + c∂ = 0`.
    pub fn with_small_twist(&self, c: &MultiMap) -> Result<Self> {
        let w = &self.small.module;
        expect_shape(c, w, w, 1, 1, "c")?;
        let h = self.h.add(&self.g.after(&c.after(&self.f)?)?)?;
        DeformationRetract::new(self.big.clone(), self.small.clone(), self.f.clone(), self.g.clone(), h)
    }
}

/// `V_i = B_i ⊕ H_i ⊕ C_i` by leftmost-pivot elimination, stored as vectors in the standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub boundaries: BTreeMap<i32, Vec<Vec<Scalar>>>,
    pub harmonic: BTreeMap<i32, Vec<Vec<Scalar>>>,
    pub complement: BTreeMap<i32, Vec<Vec<Scalar>>>,
}

fn unit_vector(len: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); len];
    v[i] = Scalar::one();
    v
}

fn relevant_degrees(m: &GradedModule) -> Vec<i32> {
    m.dims().iter().filter(|(_, &n)| n > 0).map(|(&d, _)| d).collect()
}

pub fn splitting(c: &ChainComplex) -> Splitting {
    let v = &c.module;
    let degrees = relevant_degrees(v);
    let mut complement = BTreeMap::new();
    for &d in &degrees {
        let mut m = degree_block(&c.differential, d);
        let pivots = m.rref();
        complement.insert(d, pivots.iter().map(|&j| unit_vector(v.dim(d), j)).collect::<Vec<_>>());
    }
    let mut boundaries = BTreeMap::new();
    let mut harmonic = BTreeMap::new();
    for &d in &degrees {
        let bs: Vec<Vec<Scalar>> = match complement.get(&(d + 1)) {
            Some(cs) => {
                let m = degree_block(&c.differential, d + 1);
                cs.iter().map(|x: &Vec<Scalar>| m.mul_vec(x)).collect()
            }
            None => Vec::new(),
        };
        let cycles = degree_block(&c.differential, d).nullspace();
        harmonic.insert(d, extend_independent(&bs, &cycles, v.dim(d)));
        boundaries.insert(d, bs);
    }
    Splitting { boundaries, harmonic, complement }
}

/// Homology dimensions by exact rank computation; rejects non-complexes.
pub fn homology(c: &ChainComplex) -> Result<GradedModule> {
    if !c.differential.after(&c.differential)?.is_zero() {
        return Err(Error::NotAComplex);
    }
    let v = &c.module;
    let dims = relevant_degrees(v).into_iter().map(|d| {
        let kernel = v.dim(d) - degree_block(&c.differential, d).rank();
        let image = degree_block(&c.differential, d + 1).rank();
        (d, kernel - image)
    });
    Ok(GradedModule::new(dims))
}

/// The retract onto homology: `f` is the projection along `B ⊕ C`, `g` the inclusion of `H`,
/// and `h = −(∂|_C)^{−1}` on `B`, zero on `H ⊕ C`.
pub fn harmonious_retract(c: &ChainComplex) -> Result<DeformationRetract> {
    let v = &c.module;
    let split = splitting(c);
    let w = GradedModule::new(split.harmonic.iter().map(|(&d, hs)| (d, hs.len())));
    let mut f_blocks = BTreeMap::new();
    let mut g_blocks = BTreeMap::new();
    let mut h_blocks = BTreeMap::new();
    for &d in split.harmonic.keys() {
        let (bs, hs, cs) = (&split.boundaries[&d], &split.harmonic[&d], &split.complement[&d]);
        let n = v.dim(d);
        let columns: Vec<Vec<Scalar>> = bs.iter().chain(hs).chain(cs).cloned().collect();
        let coords = Matrix::from_columns(n, &columns).inverse()?;
        let mut f = Matrix::zeros(hs.len(), n);
        for k in 0..hs.len() {
            for j in 0..n {
                f[(k, j)] = coords[(bs.len() + k, j)].clone();
            }
        }
        f_blocks.insert(d, f);
        g_blocks.insert(d, Matrix::from_columns(n, hs));
        let up: &[Vec<Scalar>] = split.complement.get(&(d + 1)).map(Vec::as_slice).unwrap_or(&[]);
        let mut h = Matrix::zeros(v.dim(d + 1), n);
        for (jb, cvec) in up.iter().enumerate() {
            for j in 0..n {
                let beta = &coords[(jb, j)];
                if beta.is_zero() {
                    continue;
                }
                for (i, x) in cvec.iter().enumerate() {
                    let t = beta * x;
                    h[(i, j)] -= &t;
                }
            }
        }
        h_blocks.insert(d, h);
    }
    let f = map_from_blocks(v, &w, 0, &f_blocks)?;
    let g = map_from_blocks(&w, v, 0, &g_blocks)?;
    let h = map_from_blocks(v, v, 1, &h_blocks)?;
    let retract = DeformationRetract::new(c.clone(), ChainComplex::trivial(w), f, g, h)?;
    debug_assert!(retract.side_conditions().all());
    Ok(retract)
}

fn b(d: i32, i: usize) -> Basis {
    Basis::new(d, i)
}

fn entries(
    source: &GradedModule,
    target: &GradedModule,
    arity: usize,
    degree: i32,
    table: &[(&[Basis], Basis, Scalar)],
) -> MultiMap {
    let mut m = MultiMap::zero(source.clone(), target.clone(), arity, degree);
    for (ins, out, c) in table {
        m.add_entry(ins.to_vec(), &Vector::single(*out, c.clone())).expect("instance entries are homogeneous");
    }
    m
}

/// Basis of the Massey instance: `x, y, z` in degree 1, `p, q` in 2, `u, w` in 3, `m, m′` in 4.
pub mod massey {
    use crate::graded::Basis;

    pub const X: Basis = Basis::new(1, 0);
    pub const Y: Basis = Basis::new(1, 1);
    pub const Z: Basis = Basis::new(1, 2);
    pub const P: Basis = Basis::new(2, 0);
    pub const Q: Basis = Basis::new(2, 1);
    pub const U: Basis = Basis::new(3, 0);
    pub const W: Basis = Basis::new(3, 1);
    pub const M: Basis = Basis::new(4, 0);
    pub const M_PRIME: Basis = Basis::new(4, 1);
}

/// The DG algebra with `∂u = p`, `∂w = q`, `xy = p`, `yz = q`, `uz = m`, `xw = m′`.
pub fn instance_massey(truncation: usize) -> Result<AInfinity> {
    use massey::*;
    let v = GradedModule::new([(1, 3), (2, 2), (3, 2), (4, 2)]);
    let one = Scalar::one();
    let d = entries(&v, &v, 1, -1, &[(&[U], P, one.clone()), (&[W], Q, one.clone())]);
    let mu2 = entries(
        &v,
        &v,
        2,
        0,
        &[(&[X, Y], P, one.clone()), (&[Y, Z], Q, one.clone()), (&[U, Z], M, one.clone()), (&[X, W], M_PRIME, one)],
    );
    AInfinity::new(v, d, [mu2], truncation)
}

/// `Q[t, dt]/(t³, t²dt)` with `1, t, t²` in degree 0 and `dt, t·dt` in degree −1.
pub fn instance_forms(truncation: usize) -> Result<AInfinity> {
    let v = GradedModule::new([(-1, 2), (0, 3)]);
    let (one_, t, t2, dt, tdt) = (b(0, 0), b(0, 1), b(0, 2), b(-1, 0), b(-1, 1));
    let one = Scalar::one();
    let d = entries(&v, &v, 1, -1, &[(&[t], dt, one.clone()), (&[t2], tdt, Scalar::from_int(2))]);
    let mut table: Vec<(Vec<Basis>, Basis, Scalar)> = Vec::new();
    for x in v.basis() {
        table.push((vec![one_, x], x, one.clone()));
        if x != one_ {
            table.push((vec![x, one_], x, one.clone()));
        }
    }
    for (l, r, out) in [(t, t, t2), (t, dt, tdt), (dt, t, tdt)] {
        table.push((vec![l, r], out, one.clone()));
    }
    let borrowed: Vec<(&[Basis], Basis, Scalar)> =
        table.iter().map(|(i, o, c)| (i.as_slice(), *o, c.clone())).collect();
    let mu2 = entries(&v, &v, 2, 0, &borrowed);
    AInfinity::new(v, d, [mu2], truncation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_differential_retract_is_identity() {
        let v = GradedModule::new([(0, 2), (1, 1)]);
        let r = harmonious_retract(&ChainComplex::trivial(v.clone())).unwrap();
        assert_eq!(r.f(), &MultiMap::identity(&v));
        assert!(r.h().is_zero());
    }

    #[test]
    fn exact_complex_has_zero_homology() {
        let v = GradedModule::new([(0, 1), (1, 1)]);
        let d = entries(&v, &v, 1, -1, &[(&[b(1, 0)], b(0, 0), Scalar::one())]);
        let c = ChainComplex::new(v, d).unwrap();
        assert_eq!(homology(&c).unwrap().total_dim(), 0);
        let r = harmonious_retract(&c).unwrap();
        assert!(r.side_conditions().all());
    }
}
