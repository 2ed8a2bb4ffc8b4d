//! Rational polyhedral cones via double description, fans and truncated cells.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::{
    clear_denominators, dot, dot_mixed, primitive_vector, rank_of, rational_kernel_rat, rat_from,
    to_rats, Int, IntMatrix, Rat,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("not log-terminal cell: truncated cone is unbounded along {0}")]
    Unbounded(String),
}

/// A cone `lin + cone(rays)`, kept in both descriptions.
///
/// Rays are primitive and orthogonal to the lineality space, so two equal cones
/// have identical ray lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    ambient: usize,
    rays: Vec<Vec<Int>>,
    lineality: Vec<Vec<Int>>,
    facets: Vec<Vec<Int>>,
    equations: Vec<Vec<Int>>,
}

fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn neg(v: &[Int]) -> Vec<Int> {
    v.iter().map(|x| -x).collect()
}

/// Orthogonal complement of span(rows) as primitive integer vectors.
fn orth(rows: &[Vec<Int>], ambient: usize) -> Vec<Vec<Int>> {
    let r: Vec<Vec<Rat>> = rows.iter().map(|v| to_rats(v)).collect();
    rational_kernel_rat(&r, ambient)
}

/// Removes the component of `v` in span(basis) (orthogonal projection), then makes it primitive.
fn project_off(v: &[Int], basis: &[Vec<Int>]) -> Vec<Int> {
    if basis.is_empty() {
        return primitive_vector(v).unwrap_or_else(|_| v.to_vec());
    }
    // solve Gram system for the projection coefficients
    let k = basis.len();
    let gram: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| rat_from(&dot(&basis[i], &basis[j]))).collect())
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|b| rat_from(&dot(b, v))).collect();
    let coeffs = crate::exactmath::solve_linear_rat(&gram, k, &rhs);
    let c = coeffs.particular().expect("Gram matrix of a basis is invertible").to_vec();
    let w: Vec<Rat> = (0..v.len())
        .map(|t| {
            let mut x = rat_from(&v[t]);
            for (ci, b) in c.iter().zip(basis) {
                x -= ci * rat_from(&b[t]);
            }
            x
        })
        .collect();
    if w.iter().all(Zero::is_zero) {
        return vec![Int::zero(); v.len()];
    }
    clear_denominators(&w)
}

/// Incremental double description: intersects `lin + cone(rays)` with the halfspaces
/// `<h, x> >= 0` for h in `constraints`. `known` is an inequality description of the
/// starting cone (used for the adjacency test).
fn double_description(
    ambient: usize,
    mut lin: Vec<Vec<Int>>,
    mut rays: Vec<Vec<Int>>,
    mut known: Vec<Vec<Int>>,
    constraints: &[Vec<Int>],
) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    for h in constraints {
        if is_zero_vec(h) {
            continue;
        }
        if let Some(pos) = lin.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l0 = lin.swap_remove(pos);
            let mut hl0 = dot(h, &l0);
            if hl0.is_negative() {
                l0 = neg(&l0);
                hl0 = -hl0;
            }
            let shift = |v: &Vec<Int>| -> Vec<Int> {
                let hv = dot(h, v);
                let w: Vec<Int> = v.iter().zip(&l0).map(|(a, b)| a * &hl0 - b * &hv).collect();
                primitive_vector(&w).unwrap_or(w)
            };
            lin = lin.iter().map(shift).filter(|v| !is_zero_vec(v)).collect();
            rays = rays.iter().map(shift).filter(|v| !is_zero_vec(v)).collect();
            rays.push(primitive_vector(&l0).expect("lineality vector is nonzero"));
            known.push(h.clone());
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|r| dot(h, r)).collect();
        let (mut plus, mut zero, mut minus) = (Vec::new(), Vec::new(), Vec::new());
        for (i, v) in vals.iter().enumerate() {
            if v.is_positive() {
                plus.push(i);
            } else if v.is_zero() {
                zero.push(i);
            } else {
                minus.push(i);
            }
        }
        if minus.is_empty() {
            known.push(h.clone());
            continue;
        }
        let tight: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| known.iter().map(|k| dot(k, r).is_zero()).collect())
            .collect();
        let lin_rows = lin.clone();
        let target = ambient.saturating_sub(lin.len() + 2);
        let mut next: Vec<Vec<Int>> = plus.iter().chain(&zero).map(|&i| rays[i].clone()).collect();
        for &p in &plus {
            for &n in &minus {
                let common: Vec<Vec<Int>> = known
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| tight[p][*k] && tight[n][*k])
                    .map(|(_, h)| h.clone())
                    .collect();
                // lineality directions are orthogonal to every tight constraint already
                let mut rows = common;
                rows.extend(lin_rows.iter().cloned());
                if rank_of(&rows) < target + lin_rows.len() {
                    continue;
                }
                // combinatorial check: no third ray tight on all common constraints
                let third = (0..rays.len()).any(|t| {
                    t != p
                        && t != n
                        && (0..known.len()).all(|k| !(tight[p][k] && tight[n][k]) || tight[t][k])
                });
                if third {
                    continue;
                }
                let w: Vec<Int> = rays[p]
                    .iter()
                    .zip(&rays[n])
                    .map(|(a, b)| a * &(-&vals[n]) + b * &vals[p])
                    .collect();
                if let Ok(w) = primitive_vector(&w) {
                    next.push(w);
                }
            }
        }
        let mut seen = BTreeSet::new();
        next.retain(|v| seen.insert(v.clone()));
        rays = next;
        known.push(h.clone());
    }
    (lin, rays)
}

impl Cone {
    /// `cone(gens) + span(lin_gens)`.
    pub fn from_generators(ambient: usize, gens: &[Vec<Int>], lin_gens: &[Vec<Int>]) -> Cone {
        // facets and equations: the dual cone {h : <h,g> >= 0}
        let mut constraints: Vec<Vec<Int>> = gens.to_vec();
        for l in lin_gens {
            constraints.push(l.clone());
            constraints.push(neg(l));
        }
        let full: Vec<Vec<Int>> = (0..ambient)
            .map(|i| {
                let mut e = vec![Int::zero(); ambient];
                e[i] = Int::from(1);
                e
            })
            .collect();
        let (dual_lin, dual_rays) = double_description(ambient, full, Vec::new(), Vec::new(), &constraints);
        Cone::assemble(ambient, gens, lin_gens, dual_lin, dual_rays)
    }

    /// `{x : <h,x> >= 0 for h in ineqs, <e,x> = 0 for e in eqs}`.
    pub fn from_inequalities(ambient: usize, ineqs: &[Vec<Int>], eqs: &[Vec<Int>]) -> Cone {
        let mut constraints: Vec<Vec<Int>> = Vec::new();
        for e in eqs {
            constraints.push(e.clone());
            constraints.push(neg(e));
        }
        constraints.extend(ineqs.iter().cloned());
        let full: Vec<Vec<Int>> = (0..ambient)
            .map(|i| {
                let mut e = vec![Int::zero(); ambient];
                e[i] = Int::from(1);
                e
            })
            .collect();
        let (lin, rays) = double_description(ambient, full, Vec::new(), Vec::new(), &constraints);
        Cone::from_generators(ambient, &rays, &lin)
    }

    fn assemble(
        ambient: usize,
        gens: &[Vec<Int>],
        lin_gens: &[Vec<Int>],
        dual_lin: Vec<Vec<Int>>,
        dual_rays: Vec<Vec<Int>>,
    ) -> Cone {
        let mut span_rows: Vec<Vec<Int>> = gens.to_vec();
        span_rows.extend(lin_gens.iter().cloned());
        let equations = orth(&span_rows, ambient);
        debug_assert_eq!(equations.len(), dual_lin.len());
        // canonical facet normals: projected into the span
        let mut facets: Vec<Vec<Int>> = dual_rays
            .iter()
            .map(|h| project_off(h, &equations))
            .filter(|h| !is_zero_vec(h))
            .collect();
        facets.sort();
        facets.dedup();
        let mut lin_rows = facets.clone();
        lin_rows.extend(equations.iter().cloned());
        let lineality = crate::exactmath::hermite_normal_form(&orth(&lin_rows, ambient));
        let lin_dim = lineality.len();
        let mut rays: Vec<Vec<Int>> = Vec::new();
        for g in gens {
            let r = project_off(g, &lineality);
            if is_zero_vec(&r) {
                continue;
            }
            let mut tight: Vec<Vec<Int>> =
                facets.iter().filter(|h| dot(h, &r).is_zero()).cloned().collect();
            tight.extend(equations.iter().cloned());
            if rank_of(&tight) + lin_dim + 1 == ambient && !rays.contains(&r) {
                rays.push(r);
            }
        }
        rays.sort();
        Cone { ambient, rays, lineality, facets, equations }
    }

    pub fn zero(ambient: usize) -> Cone {
        Cone::from_generators(ambient, &[], &[])
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<Int>] {
        &self.lineality
    }

    pub fn facets(&self) -> &[Vec<Int>] {
        &self.facets
    }

    pub fn equations(&self) -> &[Vec<Int>] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_zero_cone(&self) -> bool {
        self.dim() == 0
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(self.ambient, &ineqs, &eqs)
    }

    pub fn contains_int(&self, v: &[Int]) -> bool {
        self.equations.iter().all(|e| dot(e, v).is_zero())
            && self.facets.iter().all(|h| !dot(h, v).is_negative())
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.equations.iter().all(|e| dot_mixed(v, e).is_zero())
            && self.facets.iter().all(|h| !dot_mixed(v, h).is_negative())
    }

    pub fn relative_interior_contains(&self, v: &[Rat]) -> bool {
        self.equations.iter().all(|e| dot_mixed(v, e).is_zero())
            && self.facets.iter().all(|h| dot_mixed(v, h).is_positive())
    }

    pub fn relative_interior_contains_int(&self, v: &[Int]) -> bool {
        self.equations.iter().all(|e| dot(e, v).is_zero())
            && self.facets.iter().all(|h| dot(h, v).is_positive())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains_int(r))
            && other
                .lineality
                .iter()
                .all(|l| self.contains_int(l) && self.contains_int(&neg(l)))
    }

    /// Faces as sets of ray indices, each with the number of lineality directions implied.
    /// Includes the minimal face (empty ray set) and the cone itself.
    pub fn face_ray_sets(&self) -> Vec<Vec<usize>> {
        let tight: Vec<BTreeSet<usize>> = self
            .facets
            .iter()
            .map(|h| (0..self.rays.len()).filter(|&i| dot(h, &self.rays[i]).is_zero()).collect())
            .collect();
        let all: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut faces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        faces.insert(all);
        let mut frontier: Vec<BTreeSet<usize>> = faces.iter().cloned().collect();
        while let Some(f) = frontier.pop() {
            for t in &tight {
                let g: BTreeSet<usize> = f.intersection(t).copied().collect();
                if faces.insert(g.clone()) {
                    frontier.push(g);
                }
            }
        }
        faces.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// The face spanned by a subset of rays (plus lineality).
    pub fn face(&self, ray_idx: &[usize]) -> Cone {
        let gens: Vec<Vec<Int>> = ray_idx.iter().map(|&i| self.rays[i].clone()).collect();
        Cone::from_generators(self.ambient, &gens, &self.lineality)
    }

    pub fn ray_sum(&self) -> Vec<Int> {
        let mut s = vec![Int::zero(); self.ambient];
        for r in &self.rays {
            for (a, b) in s.iter_mut().zip(r) {
                *a += b;
            }
        }
        s
    }
}

/// A fan (or quasifan when the cones share a lineality space), stored by maximal cones.
#[derive(Clone, Debug)]
pub struct Fan {
    pub ambient: usize,
    pub cones: Vec<Cone>,
}

impl Fan {
    pub fn new(ambient: usize, cones: Vec<Cone>) -> Fan {
        Fan { ambient, cones }
    }

    pub fn is_pointed(&self) -> bool {
        self.cones.iter().all(Cone::is_pointed)
    }

    /// All rays of the fan, sorted and deduplicated.
    pub fn rays(&self) -> Vec<Vec<Int>> {
        let set: BTreeSet<Vec<Int>> = self.cones.iter().flat_map(|c| c.rays.iter().cloned()).collect();
        set.into_iter().collect()
    }

    /// Pairwise intersections of `self` with the cones of `other`, keeping the maximal pieces.
    pub fn refine(&self, other: &Fan) -> Fan {
        refine_fan(self, other)
    }
}

pub fn refine_fan(f: &Fan, g: &Fan) -> Fan {
    let pairs: Vec<(usize, usize)> =
        (0..f.cones.len()).flat_map(|i| (0..g.cones.len()).map(move |j| (i, j))).collect();
    let pieces: Vec<Cone> = crate::par::map(&pairs, |&(i, j)| f.cones[i].intersect(&g.cones[j]));
    let mut uniq: Vec<Cone> = Vec::new();
    for p in pieces {
        if !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    let maximal: Vec<Cone> = uniq
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !uniq
                .iter()
                .enumerate()
                .any(|(j, d)| *i != j && d.dim() > c.dim() && d.contains_cone(c))
        })
        .map(|(_, c)| c.clone())
        .collect();
    let nonzero: Vec<Cone> = maximal.iter().filter(|c| !c.is_zero_cone()).cloned().collect();
    let cones = if nonzero.is_empty() { maximal } else { nonzero };
    Fan::new(f.ambient, cones)
}

/// `cone ∩ {<u, .> >= -1}`.
#[derive(Clone, Debug)]
pub struct TruncatedCell {
    pub cone: Cone,
    pub u: Vec<Rat>,
}

impl TruncatedCell {
    pub fn is_bounded(&self) -> bool {
        self.cone.is_pointed() && self.cone.rays().iter().all(|r| dot_mixed(&self.u, r).is_negative())
    }

    /// Vertices other than the origin: `r / -<u,r>` for every ray.
    pub fn vertices(&self) -> Result<Vec<Vec<Rat>>, PolyError> {
        if let Some(l) = self.cone.lineality().first() {
            return Err(PolyError::Unbounded(crate::exactmath::fmt_int_vec(l)));
        }
        self.cone
            .rays()
            .iter()
            .map(|r| {
                let ur = dot_mixed(&self.u, r);
                if !ur.is_negative() {
                    return Err(PolyError::Unbounded(crate::exactmath::fmt_int_vec(r)));
                }
                let s = -ur.recip();
                Ok(r.iter().map(|x| rat_from(x) * &s).collect())
            })
            .collect()
    }

    pub fn contains(&self, p: &[Int]) -> bool {
        self.cone.contains_int(p) && dot_mixed(&self.u, p) >= Rat::from_integer(Int::from(-1))
    }

    /// All lattice points of the cell, via its bounding box.
    pub fn lattice_points(&self) -> Result<Vec<Vec<Int>>, PolyError> {
        let verts = self.vertices()?;
        let n = self.cone.ambient();
        let mut lo = vec![Int::zero(); n];
        let mut hi = vec![Int::zero(); n];
        for v in &verts {
            for t in 0..n {
                let f = v[t].floor().to_integer();
                let c = v[t].ceil().to_integer();
                if f < lo[t] {
                    lo[t] = f;
                }
                if c > hi[t] {
                    hi[t] = c;
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            // odometer
            let mut t = 0;
            loop {
                if t == n {
                    return Ok(out);
                }
                if cur[t] < hi[t] {
                    cur[t] += 1;
                    break;
                }
                cur[t] = lo[t].clone();
                t += 1;
            }
        }
    }
}

/// Generators given as rational vectors, scaled to primitive integer vectors.
pub fn integral_generators(v: &[Vec<Rat>]) -> Vec<Vec<Int>> {
    v.iter().filter(|x| x.iter().any(|q| !q.is_zero())).map(|x| clear_denominators(x)).collect()
}

pub fn int_matrix_cols(m: &IntMatrix, idx: &[usize]) -> Vec<Vec<Int>> {
    idx.iter().map(|&j| m.col(j)).collect()
}
