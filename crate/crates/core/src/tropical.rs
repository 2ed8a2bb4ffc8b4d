//! The tropical variety of X as a quasifan, P-cone types, elementary cones, shifts of relations.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::{mask_indices, Mask};
use crate::coxdata::{CoxRing, Factor};
use crate::exactmath::{gcd_vec, rank_of, solve_linear, to_rats, Int, IntMatrix};
use crate::polyhedra::{refine_fan, Cone, Fan};
use crate::variety::Variety;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropError {
    #[error("cone {0} is not an X-cone: its interior misses the tropical variety")]
    NotXCone(String),
    #[error("relation is not shiftable: {0}")]
    NotShiftable(String),
    #[error("relation has a single monomial; its push-down is a unit")]
    Degenerate,
    #[error("polynomial exponent vectors have {got} entries, expected {expected}")]
    Shape { got: usize, expected: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConeType {
    Leaf,
    Big,
    Special,
}

impl fmt::Display for ConeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeType::Leaf => "leaf",
            ConeType::Big => "big",
            ConeType::Special => "special",
        })
    }
}

/// trop(X) = Δ × Qˢ with Δ the fan of flags of flats, one factor per indecomposable piece of A.
#[derive(Clone, Debug)]
pub struct TropicalData {
    pub ambient: usize,
    pub s: usize,
    /// rays e_F of Δ, embedded in Q^{r+s}
    pub rays: Vec<Vec<Int>>,
    /// (factor, flat) of each ray
    pub ray_flats: Vec<(usize, Mask)>,
    /// maximal cones of Δ as indices into `rays`
    pub cones: Vec<Vec<usize>>,
    pub coarsened: bool,
    quasifan: Fan,
}

fn block_coordinate(f: &Factor, i: usize) -> Option<usize> {
    (i != f.blocks.start).then(|| f.p0_rows.start + i - f.blocks.start - 1)
}

fn flat_vector(f: &Factor, flat: Mask, ambient: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); ambient];
    for i in mask_indices(flat) {
        match block_coordinate(f, i) {
            Some(c) => v[c] += 1,
            None => {
                for c in f.p0_rows.clone() {
                    v[c] -= 1;
                }
            }
        }
    }
    v
}

/// Maximal chains of nonempty proper flats inside one factor.
fn factor_chains(ring: &CoxRing, f: &Factor) -> Vec<Vec<Mask>> {
    let arr = &ring.arrangement;
    let fmask: Mask = f.blocks.clone().fold(0, |m, i| m | 1 << i);
    let top = arr.rank(fmask);
    let c = top - 1;
    if c == 0 {
        return vec![vec![]];
    }
    let flats: BTreeSet<Mask> = (1..=fmask)
        .filter(|m| m & !fmask == 0)
        .map(|m| arr.closure(m))
        .filter(|&m| arr.rank(m) < top)
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Mask>> =
        flats.iter().rev().filter(|&&m| arr.rank(m) == 1).map(|&m| vec![m]).collect();
    while let Some(chain) = stack.pop() {
        if chain.len() == c {
            out.push(chain);
            continue;
        }
        let last = *chain.last().unwrap();
        let k = chain.len() + 1;
        for &g in flats.iter().rev().filter(|&&g| arr.rank(g) == k && g & last == last) {
            let mut next = chain.clone();
            next.push(g);
            stack.push(next);
        }
    }
    out
}

fn same_cone(a: &Cone, b: &Cone) -> bool {
    a.dim() == b.dim() && a.rays() == b.rays() && a.lineality() == b.lineality()
}

/// Connected components of the restriction of the matroid to `flat`.
fn flat_components(ring: &CoxRing, flat: Mask) -> Vec<Mask> {
    let arr = &ring.arrangement;
    let idx = mask_indices(flat);
    let mut comp: Vec<Mask> = idx.iter().map(|&i| 1 << i).collect();
    let mut sub = flat;
    while sub != 0 {
        let size = sub.count_ones() as usize;
        let circuit = size >= 2
            && arr.rank(sub) + 1 == size
            && mask_indices(sub).iter().all(|&j| arr.rank(sub & !(1 << j)) == size - 1);
        if circuit {
            let hit: Mask = comp.iter().filter(|&&c| c & sub != 0).fold(0, |a, c| a | c);
            comp.retain(|&c| c & sub == 0);
            comp.push(hit);
        }
        sub = (sub - 1) & flat;
    }
    comp.sort_unstable();
    comp
}

/// The tropical quasifan; `coarsen_cones` keeps only rays of connected flats (nested-set structure).
pub fn trop_quasifan(ring: &CoxRing, coarsen_cones: bool) -> TropicalData {
    let ambient = ring.ambient_dim();
    let s = ring.s;
    let lin: Vec<Vec<Int>> = (ambient - s..ambient)
        .map(|k| {
            let mut e = vec![Int::zero(); ambient];
            e[k] = Int::one();
            e
        })
        .collect();
    let mut rays: Vec<Vec<Int>> = Vec::new();
    let mut ray_flats = Vec::new();
    // per factor: list of cones as ray index sets
    let mut per_factor: Vec<Vec<Vec<usize>>> = Vec::new();
    for (t, f) in ring.factors.iter().enumerate() {
        let chains = factor_chains(ring, f);
        let mut idx_of = |flat: Mask, rays: &mut Vec<Vec<Int>>| -> usize {
            if let Some(k) = ray_flats.iter().position(|x| *x == (t, flat)) {
                return k;
            }
            rays.push(flat_vector(f, flat, ambient));
            ray_flats.push((t, flat));
            rays.len() - 1
        };
        let mut cones: Vec<Vec<usize>> = chains
            .iter()
            .map(|ch| {
                let flats: BTreeSet<Mask> = if coarsen_cones {
                    // nested sets of connected flats: e_F is the sum over the components of F
                    ch.iter().flat_map(|&fl| flat_components(ring, fl)).collect()
                } else {
                    ch.iter().copied().collect()
                };
                let mut ids: Vec<usize> = flats.into_iter().map(|fl| idx_of(fl, &mut rays)).collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        cones.sort();
        cones.dedup();
        per_factor.push(cones);
    }
    let mut cones: Vec<Vec<usize>> = vec![vec![]];
    for fc in &per_factor {
        cones = cones
            .iter()
            .flat_map(|c| {
                fc.iter().map(move |d| {
                    let mut x = c.clone();
                    x.extend(d.iter().copied());
                    x.sort_unstable();
                    x
                })
            })
            .collect();
    }
    // drop rays no longer used after coarsening, keep indices stable
    let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
    let remap: Vec<Option<usize>> = {
        let mut k = 0;
        (0..rays.len())
            .map(|i| {
                used.contains(&i).then(|| {
                    k += 1;
                    k - 1
                })
            })
            .collect()
    };
    let rays: Vec<Vec<Int>> = rays.into_iter().enumerate().filter(|(i, _)| used.contains(i)).map(|(_, r)| r).collect();
    let ray_flats = ray_flats.into_iter().enumerate().filter(|(i, _)| used.contains(i)).map(|(_, r)| r).collect();
    let mut cones: Vec<Vec<usize>> =
        cones.into_iter().map(|c| c.into_iter().map(|i| remap[i].unwrap()).collect()).collect();
    cones.sort();
    let geo = cones
        .iter()
        .map(|c| {
            let g: Vec<Vec<Int>> = c.iter().map(|&k| rays[k].clone()).collect();
            Cone::from_generators(ambient, &g, &lin)
        })
        .collect();
    TropicalData {
        ambient,
        s,
        rays,
        ray_flats,
        cones,
        coarsened: coarsen_cones,
        quasifan: Fan::new(ambient, geo),
    }
}

impl TropicalData {
    pub fn quasifan(&self) -> &Fan {
        &self.quasifan
    }

    pub fn lineality_cone(&self) -> Cone {
        let lin: Vec<Vec<Int>> = (self.ambient - self.s..self.ambient)
            .map(|k| {
                let mut e = vec![Int::zero(); self.ambient];
                e[k] = Int::one();
                e
            })
            .collect();
        Cone::from_generators(self.ambient, &[], &lin)
    }

    /// σ ∩ τ over the maximal cones τ, nonzero and deduplicated.
    pub fn pieces(&self, sigma: &Cone) -> Vec<Cone> {
        let mut out: Vec<Cone> = Vec::new();
        for t in &self.quasifan.cones {
            let p = sigma.intersect(t);
            if !p.is_zero_cone() && !out.iter().any(|q| same_cone(q, &p)) {
                out.push(p);
            }
        }
        out
    }

    /// σ ⊆ |trop(X)|, by facet pairing of the full-dimensional pieces.
    pub fn covers(&self, sigma: &Cone, pieces: &[Cone]) -> bool {
        let d = sigma.dim();
        if d == 0 {
            return true;
        }
        let full: Vec<&Cone> = pieces.iter().filter(|p| p.dim() == d).collect();
        if full.is_empty() {
            return false;
        }
        let facet_sets = |p: &Cone| -> Vec<Vec<Vec<Int>>> {
            p.facets()
                .iter()
                .map(|h| {
                    p.rays().iter().filter(|r| crate::exactmath::dot(h, r).is_zero()).cloned().collect()
                })
                .collect()
        };
        let all: Vec<Vec<Vec<Vec<Int>>>> = full.iter().map(|p| facet_sets(p)).collect();
        for (i, fs) in all.iter().enumerate() {
            for f in fs {
                let on_boundary = sigma
                    .facets()
                    .iter()
                    .any(|g| f.iter().all(|r| crate::exactmath::dot(g, r).is_zero()));
                if on_boundary {
                    continue;
                }
                let shared = all.iter().enumerate().any(|(j, gs)| j != i && gs.contains(f));
                if !shared {
                    return false;
                }
            }
        }
        true
    }

    pub fn classify(&self, sigma: &Cone) -> Option<ConeType> {
        let pieces = self.pieces(sigma);
        if self.covers(sigma, &pieces) {
            return Some(ConeType::Leaf);
        }
        let meet = sigma.intersect(&self.lineality_cone());
        if !meet.is_zero_cone() && sigma.relative_interior_contains_int(&meet.ray_sum()) {
            return Some(ConeType::Big);
        }
        pieces
            .iter()
            .any(|p| sigma.relative_interior_contains_int(&p.ray_sum()))
            .then_some(ConeType::Special)
    }

    /// Rays of σ ⊓ trop(X) lying in the relative interior of σ.
    pub fn interior_rays(&self, sigma: &Cone) -> Vec<Vec<Int>> {
        let mut out: Vec<Vec<Int>> = Vec::new();
        for p in self.pieces(sigma) {
            for r in p.rays() {
                if sigma.relative_interior_contains_int(r) && !out.contains(r) {
                    out.push(r.clone());
                }
            }
        }
        out.sort();
        out
    }
}

/// Tags a P-cone given by its columns.
pub fn classify_cone(ring: &CoxRing, trop: &TropicalData, cols: &[usize]) -> Result<ConeType, TropError> {
    let all = ring.columns();
    let gens: Vec<Vec<Int>> = cols.iter().map(|&j| all[j].clone()).collect();
    let sigma = Cone::from_generators(ring.ambient_dim(), &gens, &[]);
    trop.classify(&sigma).ok_or_else(|| {
        let labels = ring.exponents.labels();
        TropError::NotXCone(cols.iter().map(|&j| labels[j].clone()).collect::<Vec<_>>().join(","))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryCone {
    /// all columns of σ
    pub cols: Vec<usize>,
    pub kind: ConeType,
    /// (block i, variable index of v_{i j_i}) for i ∈ I
    pub picks: Vec<(usize, usize)>,
    pub ell: Vec<Int>,
    pub v_sigma: Vec<Int>,
    pub c_sigma: Int,
    pub ray: Vec<Int>,
}

impl ElementaryCone {
    pub fn blocks(&self) -> Vec<usize> {
        self.picks.iter().map(|p| p.0).collect()
    }

    /// ∏_{i∈I} l_{i j_i}
    pub fn l_product(&self, ring: &CoxRing) -> Int {
        self.picks.iter().fold(Int::one(), |acc, &(_, v)| acc * Int::from(ring.exponents.exponent(v).unwrap()))
    }
}

/// Column sets of all nonzero cones of Σ.
pub fn fan_cones(x: &Variety) -> Vec<Vec<usize>> {
    let cols = x.ring.columns();
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (c, geo) in x.cones.iter().zip(&x.fan.cones) {
        // position of each sorted cone ray among the columns of c
        let ray_col: Vec<usize> = geo
            .rays()
            .iter()
            .map(|r| *c.iter().find(|&&j| &cols[j] == r).expect("rays of Σ are columns of P"))
            .collect();
        for f in geo.face_ray_sets() {
            if f.is_empty() {
                continue;
            }
            let mut js: Vec<usize> = f.iter().map(|&k| ray_col[k]).collect();
            js.sort_unstable();
            out.insert(js);
        }
    }
    out.into_iter().collect()
}

/// The elementary cone data of σ, if σ is elementary.
pub fn elementary_data(ring: &CoxRing, trop: &TropicalData, cols: &[usize]) -> Option<ElementaryCone> {
    elementary_data_where(ring, trop, cols, |_| true)
}

/// As [`elementary_data`], but σ is only classified when `keep` accepts the unclassified data;
/// `keep` must not read `kind`.
pub fn elementary_data_where(
    ring: &CoxRing,
    trop: &TropicalData,
    cols: &[usize],
    keep: impl Fn(&ElementaryCone) -> bool,
) -> Option<ElementaryCone> {
    let exps = &ring.exponents;
    let mut picks: Vec<(usize, usize)> = Vec::new();
    for &j in cols {
        if let Some(i) = exps.block_of(j) {
            if picks.iter().any(|p| p.0 == i) {
                return None;
            }
            picks.push((i, j));
        }
    }
    if picks.is_empty() {
        return None;
    }
    picks.sort_unstable();
    let all = ring.columns();
    let ls: Vec<Int> = picks.iter().map(|&(_, v)| Int::from(exps.exponent(v).unwrap())).collect();
    let prod: Int = ls.iter().product();
    let ell: Vec<Int> = ls.iter().map(|l| &prod / l).collect();
    let mut v_sigma = vec![Int::zero(); ring.ambient_dim()];
    for (k, &(_, v)) in picks.iter().enumerate() {
        for (a, b) in v_sigma.iter_mut().zip(&all[v]) {
            *a += &ell[k] * b;
        }
    }
    let c_sigma = gcd_vec(&v_sigma);
    if c_sigma.is_zero() {
        return None;
    }
    let ray = v_sigma.iter().map(|x| x / &c_sigma).collect();
    let mut e = ElementaryCone { cols: cols.to_vec(), kind: ConeType::Special, picks, ell, v_sigma, c_sigma, ray };
    if !keep(&e) {
        return None;
    }
    let gens: Vec<Vec<Int>> = cols.iter().map(|&j| all[j].clone()).collect();
    let sigma = Cone::from_generators(ring.ambient_dim(), &gens, &[]);
    // an interior ray of σ ⊓ trop(X) can only be ϱ_σ
    if !sigma.relative_interior_contains_int(&e.v_sigma) {
        return None;
    }
    e.kind = trop.classify(&sigma)?;
    if e.kind == ConeType::Leaf || trop.interior_rays(&sigma).is_empty() {
        return None;
    }
    Some(e)
}

/// All elementary cones among the cones of Σ.
pub fn elementary_cones(x: &Variety, trop: &TropicalData) -> Vec<ElementaryCone> {
    let cones = fan_cones(x);
    crate::par::map(&cones, |c| elementary_data(&x.ring, trop, c)).into_iter().flatten().collect()
}

/// Σ^(1) ∪ {ϱ_σ}, sorted.
pub fn refinement_rays(x: &Variety, elementary: &[ElementaryCone]) -> Vec<Vec<Int>> {
    let mut out: BTreeSet<Vec<Int>> = x.ring.columns().into_iter().collect();
    out.extend(elementary.iter().map(|e| e.ray.clone()));
    out.into_iter().collect()
}

/// Σ ⊓ trop(X) computed directly.
pub fn refined_fan(x: &Variety, trop: &TropicalData) -> Fan {
    refine_fan(&x.fan, trop.quasifan())
}

/// k: number of independent relations vanishing on V(T_{i j_i}; i ∈ I).
pub fn vanishing_relations(ring: &CoxRing, blocks: &[usize]) -> usize {
    let cols: Vec<Vec<Int>> = blocks.iter().map(|&i| ring.arrangement.matrix().col(i)).collect();
    blocks.len() - rank_of(&cols)
}

/// A polynomial as (coefficient, exponent vector) terms.
pub type Polynomial = Vec<(Int, Vec<Int>)>;

pub fn relation_polynomial(ring: &CoxRing, k: usize) -> Polynomial {
    ring.relations
        .support(k)
        .into_iter()
        .map(|i| (ring.relations.coeffs[k][i].clone(), ring.exponents.monomial(i)))
        .collect()
}

/// The shift g′ of g along P → P′: same push-down, no monomial factors.
pub fn pushdown_shift(g: &Polynomial, p: &IntMatrix, p_new: &IntMatrix) -> Result<Polynomial, TropError> {
    if g.len() < 2 {
        return Err(TropError::Degenerate);
    }
    for (_, e) in g {
        if e.len() != p.cols() {
            return Err(TropError::Shape { got: e.len(), expected: p.cols() });
        }
    }
    let pt = p.transpose();
    let base = &g[0].1;
    let mut shifted: Vec<Vec<Int>> = Vec::new();
    for (_, e) in g {
        let diff: Vec<Int> = e.iter().zip(base).map(|(a, b)| a - b).collect();
        let sol = solve_linear(&pt, &to_rats(&diff));
        let w = sol
            .particular()
            .ok_or_else(|| TropError::NotShiftable("exponent differences leave the row lattice of P".into()))?;
        if w.iter().any(|q| !q.is_integer()) {
            return Err(TropError::NotShiftable("push-down exponents are not integral".into()));
        }
        let w: Vec<Int> = w.iter().map(|q| q.to_integer()).collect();
        shifted.push(p_new.transpose().mul_vec(&w));
    }
    let n = p_new.cols();
    let mins: Vec<Int> = (0..n).map(|j| shifted.iter().map(|e| e[j].clone()).min().unwrap()).collect();
    Ok(g.iter()
        .zip(shifted)
        .map(|((c, _), e)| (c.clone(), e.iter().zip(&mins).map(|(a, m)| a - m).collect()))
        .collect())
}

/// Degree of a term-wise common factor check; zero when g has no monomial factor.
pub fn has_monomial_factor(g: &Polynomial) -> bool {
    let Some(first) = g.first() else { return false };
    (0..first.1.len()).any(|j| g.iter().all(|(_, e)| e[j].is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ints;
    use crate::variety::tests::running_variety;

    #[test]
    fn running_example_trop() {
        let x = running_variety();
        let fine = trop_quasifan(&x.ring, false);
        let coarse = trop_quasifan(&x.ring, true);
        assert_eq!(coarse.cones.len(), 10);
        assert_eq!(fine.cones.len(), 14);
        assert_eq!(coarse.rays.len(), 7);
        assert!(coarse.cones.iter().all(|c| c.len() == 2));
        // e0 = -(e1+...+e4)
        let e0 = ints(&[-1, -1, -1, -1, 0]);
        assert!(coarse.rays.contains(&e0));
    }

    #[test]
    fn running_example_cone_types() {
        let x = running_variety();
        let t = trop_quasifan(&x.ring, true);
        let mut counts = [0; 3];
        for c in &x.cones {
            match classify_cone(&x.ring, &t, c).unwrap() {
                ConeType::Leaf => counts[0] += 1,
                ConeType::Big => counts[1] += 1,
                ConeType::Special => counts[2] += 1,
            }
        }
        assert_eq!(counts, [4, 1, 4]);
        assert_eq!(classify_cone(&x.ring, &t, &[1, 2, 3, 4, 5]).unwrap(), ConeType::Big);
        assert_eq!(classify_cone(&x.ring, &t, &[0, 3, 5, 6]).unwrap(), ConeType::Special);
        assert_eq!(classify_cone(&x.ring, &t, &[4, 5, 6]).unwrap(), ConeType::Leaf);
    }

    #[test]
    fn running_example_elementary() {
        let x = running_variety();
        let t = trop_quasifan(&x.ring, true);
        // the maximal cone with v1 is special, but its tropical ray sits in the face without v1
        assert!(elementary_data(&x.ring, &t, &[0, 3, 5, 6]).is_none());
        let e = elementary_data(&x.ring, &t, &[0, 3, 5]).unwrap();
        assert_eq!(e.kind, ConeType::Special);
        assert_eq!(e.blocks(), vec![0, 2, 4]);
        assert_eq!(e.ell, ints(&[4, 2, 2]));
        assert_eq!(e.v_sigma, ints(&[-4, 0, -4, 0, -4]));
        assert_eq!(e.c_sigma, Int::from(4));
        assert_eq!(vanishing_relations(&x.ring, &e.blocks()), 1);
        let all = elementary_cones(&x, &t);
        let rays = refinement_rays(&x, &all);
        assert_eq!(rays.len(), 12);
        let direct: BTreeSet<Vec<Int>> = refined_fan(&x, &t).rays().into_iter().collect();
        assert_eq!(direct, rays.into_iter().collect());
    }

    #[test]
    fn fine_and_coarse_agree_on_refinement() {
        let x = running_variety();
        let a: BTreeSet<Vec<Int>> = refined_fan(&x, &trop_quasifan(&x.ring, true)).rays().into_iter().collect();
        let b: BTreeSet<Vec<Int>> = refined_fan(&x, &trop_quasifan(&x.ring, false)).rays().into_iter().collect();
        assert!(a.is_subset(&b));
    }

    #[test]
    fn shift_identity_and_new_ray() {
        let x = running_variety();
        let g1 = relation_polynomial(&x.ring, 0);
        let same = pushdown_shift(&g1, &x.ring.p, &x.ring.p).unwrap();
        assert_eq!(same, g1);
        // append the special ray of σ = cone(v01, v21, v41, v1)
        let mut cols = x.ring.columns();
        cols.push(ints(&[-1, 0, -1, 0, -1]));
        let p2 = IntMatrix::from_cols(5, &cols);
        for k in 0..2 {
            let g = relation_polynomial(&x.ring, k);
            let h = pushdown_shift(&g, &x.ring.p, &p2).unwrap();
            assert!(!has_monomial_factor(&h));
            let gains: Vec<bool> = h.iter().map(|(_, e)| e[7].is_positive()).collect();
            let supp = x.ring.relations.support(k);
            if supp.iter().all(|i| [0, 2, 4].contains(i)) {
                assert!(gains.iter().all(|b| !b));
            } else {
                // only the block-0 monomial picks up the new variable
                let want: Vec<bool> = supp.iter().map(|&i| i == 0).collect();
                assert_eq!(gains, want);
            }
        }
        assert_eq!(pushdown_shift(&vec![(Int::one(), ints(&[1, 0, 0, 0, 0, 0, 0]))], &x.ring.p, &p2), Err(TropError::Degenerate));
    }
}
