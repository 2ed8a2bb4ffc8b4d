//! Explicit varieties X(A,P,Σ): faces of the orthant, local criteria, divisor class cones.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::Mask;
use crate::coxdata::CoxRing;
use crate::exactmath::{
    rank_of, rat_from, smith_normal_form, solve_linear_rat, to_rats, GroupElement,
    Int, Rat,
};
use crate::polyhedra::{Cone, Fan};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("no complete quotient: {0}")]
    NotPositivelyGraded(String),
    #[error("class is not in the interior of the moving cone")]
    NotMovable,
    #[error("cone {0} of the fan does not have the listed columns as rays")]
    BadCone(String),
    #[error("column {0} of P is not a ray of the fan")]
    MissingRay(String),
    #[error("not projective over the chosen data: semiample cone is not full-dimensional")]
    NotProjective,
    #[error("index {0} out of range in fan description")]
    BadIndex(usize),
    #[error("class has {got} coordinates, expected {expected}")]
    ClassShape { got: usize, expected: usize },
    #[error("more than 24 variables are not supported")]
    TooManyVariables,
}

/// A face γ₀ of the positive orthant, given by the variables that do not vanish on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceRecord {
    pub gamma0: Mask,
    /// blocks whose monomial survives
    pub surviving: Mask,
    /// blocks with exactly one vanishing variable, of exponent one
    pub gradient_support: Mask,
    pub xbar_face: bool,
    pub x_face: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factoriality {
    Factorial,
    QFactorialOnly,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    /// all strata smooth, but some point is not factorial
    QuasismoothOnly { witness: Mask },
    Singular { witness: Mask },
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Smooth => write!(f, "smooth"),
            Smoothness::QuasismoothOnly { .. } => write!(f, "quasismooth only"),
            Smoothness::Singular { .. } => write!(f, "singular"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DivisorClassCones {
    pub eff: Cone,
    pub mov: Cone,
    pub sample: Cone,
    /// the X-faces are exactly the X̄-faces whose orbit cone contains SAmple in its relative interior
    pub projective: bool,
    /// for Picard rank two: (τ⁻, τ⁺), the parts of Eff clockwise and counterclockwise of SAmple
    pub tau: Option<(Cone, Cone)>,
}

impl DivisorClassCones {
    pub fn ample_contains(&self, u: &[Rat]) -> bool {
        self.projective && self.sample.relative_interior_contains(u)
    }
}

/// Per-variety cache of orbit cones Q(γ₀), keyed by the set of distinct degrees involved.
struct OrbitCones {
    rho: usize,
    degree_id: Vec<usize>,
    distinct: Vec<Vec<Int>>,
    cache: HashMap<u64, Cone>,
}

impl OrbitCones {
    fn new(ring: &CoxRing) -> Self {
        let q = ring.degree_matrix();
        let mut distinct: Vec<Vec<Int>> = Vec::new();
        let mut degree_id = Vec::new();
        for c in q.columns() {
            let id = match distinct.iter().position(|d| d == &c) {
                Some(i) => i,
                None => {
                    distinct.push(c);
                    distinct.len() - 1
                }
            };
            degree_id.push(id);
        }
        OrbitCones { rho: q.rows(), degree_id, distinct, cache: HashMap::new() }
    }

    fn key(&self, gamma0: Mask) -> u64 {
        (0..self.degree_id.len())
            .filter(|v| gamma0 >> v & 1 == 1)
            .fold(0u64, |k, v| k | 1 << self.degree_id[v])
    }

    fn get(&mut self, gamma0: Mask) -> &Cone {
        let key = self.key(gamma0);
        let rho = self.rho;
        let distinct = &self.distinct;
        self.cache.entry(key).or_insert_with(|| {
            let gens: Vec<Vec<Int>> =
                (0..distinct.len()).filter(|i| key >> i & 1 == 1).map(|i| distinct[i].clone()).collect();
            Cone::from_generators(rho, &gens, &[])
        })
    }
}

pub fn mask_vars(m: Mask, nvars: usize) -> Vec<usize> {
    (0..nvars).filter(|v| m >> v & 1 == 1).collect()
}

/// Surviving blocks and gradient support of a face.
pub fn face_pattern(ring: &CoxRing, gamma0: Mask) -> (Mask, Mask) {
    let exps = &ring.exponents;
    let mut surviving = 0;
    let mut grad = 0;
    for i in 0..exps.blocks() {
        let off: Vec<usize> = exps.block_range(i).filter(|v| gamma0 >> v & 1 == 0).collect();
        if off.is_empty() {
            surviving |= 1 << i;
        } else if off.len() == 1 && exps.exponent(off[0]) == Some(1) {
            grad |= 1 << i;
        }
    }
    (surviving, grad)
}

/// The orbit of the complementary face meets X̄ iff the dead monomials form a flat.
pub fn xbar_face_test(ring: &CoxRing, gamma0: Mask) -> bool {
    let (surviving, _) = face_pattern(ring, gamma0);
    let dead = ring.arrangement.full_mask() & !surviving;
    ring.arrangement.is_flat(dead)
}

/// Rank of the relation matrix on the columns with nonvanishing monomial gradient.
pub fn stratum_rank(ring: &CoxRing, gamma0: Mask) -> usize {
    let (s, s1) = face_pattern(ring, gamma0);
    let cols = s | s1;
    let rows: Vec<Vec<Int>> = ring
        .relations
        .coeffs
        .iter()
        .map(|r| (0..r.len()).filter(|i| cols >> i & 1 == 1).map(|i| r[i].clone()).collect())
        .collect();
    if rows.first().is_none_or(|r| r.is_empty()) {
        return 0;
    }
    rank_of(&rows)
}

pub fn stratum_smooth(ring: &CoxRing, gamma0: Mask) -> bool {
    stratum_rank(ring, gamma0) == ring.relations.len()
}

fn all_masks(nvars: usize) -> impl Iterator<Item = Mask> {
    0..(1u32 << nvars)
}

/// Maximal cone of Σ with its facet/column incidences.
#[derive(Clone, Debug)]
struct MaxCone {
    cols: Mask,
    facet_tight: Vec<Mask>,
}

impl MaxCone {
    fn has_face(&self, j: Mask) -> bool {
        if j & !self.cols != 0 {
            return false;
        }
        let closure = self
            .facet_tight
            .iter()
            .filter(|t| j & !**t == 0)
            .fold(self.cols, |acc, t| acc & t);
        closure == j
    }
}

#[derive(Clone, Debug)]
pub struct Variety {
    pub ring: CoxRing,
    /// maximal cones as sorted column index lists
    pub cones: Vec<Vec<usize>>,
    pub fan: Fan,
    max_cones: Vec<MaxCone>,
    faces: Vec<FaceRecord>,
}

impl Variety {
    /// X(A,P,Σ) for an explicit list of maximal cones (column indices).
    pub fn new(ring: CoxRing, cones: Vec<Vec<usize>>) -> Result<Self, VarietyError> {
        let nv = ring.nvars();
        if nv > 24 {
            return Err(VarietyError::TooManyVariables);
        }
        let cols = ring.columns();
        let labels = ring.exponents.labels();
        let mut geo = Vec::new();
        let mut max_cones = Vec::new();
        let mut covered: Mask = 0;
        let mut cones = cones;
        for c in cones.iter_mut() {
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&j| j >= nv) {
                return Err(VarietyError::BadIndex(bad));
            }
        }
        for c in &cones {
            let gens: Vec<Vec<Int>> = c.iter().map(|&j| cols[j].clone()).collect();
            let cone = Cone::from_generators(ring.ambient_dim(), &gens, &[]);
            let name = c.iter().map(|&j| labels[j].clone()).collect::<Vec<_>>().join(",");
            if cone.rays().len() != c.len() || !cone.is_pointed() {
                return Err(VarietyError::BadCone(name));
            }
            let mask = c.iter().fold(0, |m, &j| m | 1 << j);
            covered |= mask;
            let facet_tight = cone
                .facets()
                .iter()
                .map(|h| {
                    c.iter()
                        .filter(|&&j| crate::exactmath::dot(h, &cols[j]).is_zero())
                        .fold(0, |m, &j| m | 1 << j)
                })
                .collect();
            max_cones.push(MaxCone { cols: mask, facet_tight });
            geo.push(cone);
        }
        if let Some(j) = (0..nv).find(|j| covered >> j & 1 == 0) {
            return Err(VarietyError::MissingRay(labels[j].clone()));
        }
        let full = (1u32 << nv) - 1;
        let faces = all_masks(nv)
            .map(|g| {
                let (surviving, gradient_support) = face_pattern(&ring, g);
                let dead = ring.arrangement.full_mask() & !surviving;
                let xbar = ring.arrangement.is_flat(dead);
                let comp = full & !g;
                let x_face = xbar && max_cones.iter().any(|m| m.has_face(comp));
                FaceRecord { gamma0: g, surviving, gradient_support, xbar_face: xbar, x_face }
            })
            .collect();
        let fan = Fan::new(ring.ambient_dim(), geo);
        Ok(Variety { ring, cones, fan, max_cones, faces })
    }

    /// X(A,P,Σ) with Σ the GIT fan of the chamber of `u` (free coordinates of K).
    pub fn from_ample(ring: CoxRing, u: &[Rat]) -> Result<Self, VarietyError> {
        let cones = fan_from_ample(&ring, u)?;
        Variety::new(ring, cones)
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn dim(&self) -> usize {
        self.ring.s + self.ring.c()
    }

    pub fn picard_rank(&self) -> usize {
        self.ring.picard_rank()
    }

    pub fn faces(&self) -> &[FaceRecord] {
        &self.faces
    }

    pub fn face(&self, gamma0: Mask) -> &FaceRecord {
        &self.faces[gamma0 as usize]
    }

    pub fn x_faces(&self) -> Vec<&FaceRecord> {
        self.faces.iter().filter(|f| f.x_face).collect()
    }

    /// Whether cone(v_j : j ∈ cols) is a cone of Σ.
    pub fn fan_contains(&self, cols: Mask) -> bool {
        self.max_cones.iter().any(|m| m.has_face(cols))
    }

    pub fn point_factoriality(&self, gamma0: Mask) -> Factoriality {
        point_factoriality(&self.ring, gamma0)
    }

    pub fn smoothness_report(&self) -> Smoothness {
        let mut quasi_witness = None;
        let mut smooth_cache: HashMap<Mask, bool> = HashMap::new();
        for f in self.faces.iter().filter(|f| f.x_face) {
            let key = f.surviving | f.gradient_support << 16;
            let ok = *smooth_cache.entry(key).or_insert_with(|| stratum_smooth(&self.ring, f.gamma0));
            if !ok {
                return Smoothness::Singular { witness: f.gamma0 };
            }
            if quasi_witness.is_none() && self.point_factoriality(f.gamma0) != Factoriality::Factorial {
                quasi_witness = Some(f.gamma0);
            }
        }
        match quasi_witness {
            Some(w) => Smoothness::QuasismoothOnly { witness: w },
            None => Smoothness::Smooth,
        }
    }

    pub fn divisor_class_cones(&self) -> DivisorClassCones {
        let mut oc = OrbitCones::new(&self.ring);
        let (eff, mov) = eff_and_mov(&self.ring, &mut oc);
        let rho = self.picard_rank();
        let keys: BTreeSet<u64> = self.faces.iter().filter(|f| f.x_face).map(|f| oc.key(f.gamma0)).collect();
        let mut sample: Option<Cone> = None;
        for f in self.faces.iter().filter(|f| f.x_face) {
            let key = oc.key(f.gamma0);
            if !keys.contains(&key) {
                continue;
            }
            let q = oc.get(f.gamma0).clone();
            sample = Some(match sample {
                None => q,
                Some(s) => s.intersect(&q),
            });
        }
        let sample = sample.unwrap_or_else(|| Cone::zero(rho));
        let projective = !sample.is_zero_cone() && {
            let w = to_rats(&sample.ray_sum());
            self.faces.iter().filter(|f| f.xbar_face).all(|f| oc.get(f.gamma0).relative_interior_contains(&w) == f.x_face)
        };
        let tau = (rho == 2).then(|| tau_decomposition(&eff, &sample)).flatten();
        DivisorClassCones { eff, mov, sample, projective, tau }
    }

    /// −K_X as a group element.
    pub fn anticanonical_class(&self) -> GroupElement {
        anticanonical_class(&self.ring)
    }

    pub fn anticanonical_free(&self) -> Vec<Rat> {
        to_rats(&self.anticanonical_class().free)
    }

    pub fn is_fano(&self) -> Result<bool, VarietyError> {
        self.is_fano_with(&self.divisor_class_cones())
    }

    pub fn is_fano_with(&self, cones: &DivisorClassCones) -> Result<bool, VarietyError> {
        if !cones.projective {
            return Err(VarietyError::NotProjective);
        }
        Ok(cones.ample_contains(&self.anticanonical_free()))
    }
}

/// Q-factorial iff Q(γ₀) is full-dimensional; factorial iff deg(γ₀) generates K.
pub fn point_factoriality(ring: &CoxRing, gamma0: Mask) -> Factoriality {
    let nv = ring.nvars();
    let q = ring.degree_matrix();
    let in_face = mask_vars(gamma0, nv);
    let gens: Vec<Vec<Int>> = in_face.iter().map(|&v| q.col(v)).collect();
    if rank_of(&gens) < ring.picard_rank() {
        return Factoriality::Neither;
    }
    // deg(γ₀) generates K iff the columns v_j, j ∉ γ₀, extend to a lattice basis
    let off: Vec<usize> = (0..nv).filter(|v| gamma0 >> v & 1 == 0).collect();
    if off.is_empty() {
        return Factoriality::Factorial;
    }
    let pj = ring.p.select_cols(&off);
    let snf = smith_normal_form(&pj);
    if snf.rank() == off.len() && snf.d.iter().all(|d| d.is_one()) {
        Factoriality::Factorial
    } else {
        Factoriality::QFactorialOnly
    }
}

fn eff_and_mov(ring: &CoxRing, oc: &mut OrbitCones) -> (Cone, Cone) {
    let nv = ring.nvars();
    let full: Mask = (1u32 << nv) - 1;
    let eff = oc.get(full).clone();
    let mut mov: Option<Cone> = None;
    for v in 0..nv {
        let q = oc.get(full & !(1 << v)).clone();
        mov = Some(match mov {
            None => q,
            Some(m) => m.intersect(&q),
        });
    }
    let mov = mov.unwrap_or_else(|| eff.clone());
    (eff, mov)
}

fn det2(a: &[Int], b: &[Int]) -> Int {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Orders the two rays of a 2-dimensional cone in Q² counterclockwise.
fn ccw_rays(c: &Cone) -> Option<(Vec<Int>, Vec<Int>)> {
    match c.rays() {
        [a, b] if c.is_pointed() => {
            if det2(a, b).is_positive() {
                Some((a.clone(), b.clone()))
            } else {
                Some((b.clone(), a.clone()))
            }
        }
        [a] if c.is_pointed() => Some((a.clone(), a.clone())),
        _ => None,
    }
}

fn tau_decomposition(eff: &Cone, sample: &Cone) -> Option<(Cone, Cone)> {
    let (e1, e2) = ccw_rays(eff)?;
    let (a1, a2) = ccw_rays(sample)?;
    let minus = Cone::from_generators(2, &[e1, a1], &[]);
    let plus = Cone::from_generators(2, &[a2, e2], &[]);
    Some((minus, plus))
}

/// −K_X = Σ deg T_ij + Σ deg S_k − Σ deg g.
pub fn anticanonical_class(ring: &CoxRing) -> GroupElement {
    let nv = ring.nvars();
    let mut v = vec![Int::one(); nv];
    for k in 0..ring.relations.len() {
        let i = ring.relations.support(k)[0];
        for (a, b) in v.iter_mut().zip(ring.exponents.monomial(i)) {
            *a -= b;
        }
    }
    ring.class(&v)
}

/// The rational form −w_X computed from a Q-basis of ker P, mapped to the free coordinates of K.
pub fn rational_anticanonical(ring: &CoxRing) -> Vec<Rat> {
    let qt = crate::exactmath::rational_kernel(&ring.p);
    let mut w: Vec<Rat> = vec![Rat::zero(); qt.len()];
    for (t, row) in qt.iter().enumerate() {
        let mut acc = Rat::zero();
        for x in row {
            acc += rat_from(x);
        }
        // relation degree: the first factor's block-0 monomial
        for f in &ring.factors {
            let nrel = ring
                .relations
                .coeffs
                .iter()
                .filter(|c| f.blocks.clone().any(|i| !c[i].is_zero()))
                .count();
            let b0 = f.blocks.start;
            for (j, v) in ring.exponents.block_range(b0).enumerate() {
                let l = Int::from(nrel as u64 * u64::from(ring.exponents.l[b0][j]));
                acc -= Rat::from_integer(l) * rat_from(&row[v]);
            }
        }
        w[t] = acc;
    }
    // express in the degree basis: Q̃ = M·Q, so −w_X = M·(−K)
    let q = ring.degree_matrix();
    let qrows: Vec<Vec<Rat>> = q.columns().iter().map(|c| to_rats(c)).collect();
    // solve for each row of M: Q^T m = q̃ row
    let rho = q.rows();
    let mut m = Vec::new();
    for row in &qt {
        let b = to_rats(row);
        let sol = solve_linear_rat(&qrows, rho, &b);
        m.push(sol.particular().expect("Q and Q̃ span the same space").to_vec());
    }
    // −w_X = M·k  ⇒  k = M⁻¹ −w_X
    let sol = solve_linear_rat(&m, rho, &w);
    sol.particular().expect("M is invertible").to_vec()
}

/// Σ = {P(γ₀*) : γ₀ X̄-face with u ∈ Q(γ₀)°}, by its maximal cones. Q(γ₀)° is the relative
/// interior, so u may sit in a lower-dimensional GIT cone; X is then not Q-factorial.
pub fn fan_from_ample(ring: &CoxRing, u: &[Rat]) -> Result<Vec<Vec<usize>>, VarietyError> {
    let rho = ring.picard_rank();
    if u.len() != rho {
        return Err(VarietyError::ClassShape { got: u.len(), expected: rho });
    }
    let nv = ring.nvars();
    if nv > 24 {
        return Err(VarietyError::TooManyVariables);
    }
    ring.check_positive_grading().map_err(|e| VarietyError::NotPositivelyGraded(e.to_string()))?;
    let mut oc = OrbitCones::new(ring);
    let (_, mov) = eff_and_mov(ring, &mut oc);
    if mov.dim() < rho || !mov.relative_interior_contains(u) {
        return Err(VarietyError::NotMovable);
    }
    let mut relevant: Vec<Mask> = Vec::new();
    let mut verdict: HashMap<u64, bool> = HashMap::new();
    for g in all_masks(nv) {
        if !xbar_face_test(ring, g) {
            continue;
        }
        let key = oc.key(g);
        let v = match verdict.get(&key) {
            Some(v) => *v,
            None => {
                let q = oc.get(g);
                let v = q.relative_interior_contains(u);
                verdict.insert(key, v);
                v
            }
        };
        if v {
            relevant.push(g);
        }
    }
    let minimal: Vec<Mask> = relevant
        .iter()
        .copied()
        .filter(|&g| !relevant.iter().any(|&h| h != g && h & g == h))
        .collect();
    let full: Mask = (1u32 << nv) - 1;
    let mut cones: Vec<Vec<usize>> = minimal.iter().map(|&g| mask_vars(full & !g, nv)).collect();
    cones.sort();
    Ok(cones)
}
