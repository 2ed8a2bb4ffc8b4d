//! Bounded search for canonical Fano honestly special arrangement threefolds of Picard rank at
//! most two with isotropy at most two, and the smooth arrangement-product family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use crate::anticanon::{anticanonical_complex, ell_sigma, singularity_type, SingularityVerdict};
use crate::arrangement::{mask_indices, Arrangement, Mask};
use crate::coxdata::{complete_from_degrees, product_ring, CoxRing, ExponentData, Primality};
use crate::exactmath::{det, hermite_normal_form, rational_kernel, Int, IntMatrix, Rat};
use crate::par::{self, Execution};
use crate::tropical::{elementary_data_where, fan_cones, trop_quasifan, ConeType, ElementaryCone};
use crate::variety::{fan_from_ample, Smoothness, Variety, VarietyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("parameter {name} reaches the search window edge {value}: no finite bound found")]
    Unbounded { name: String, value: i64 },
    #[error("invalid product data: {0}")]
    Product(String),
    #[error("only isotropy order two is supported, got {0}")]
    Isotropy(u32),
    #[error("{0}")]
    Build(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    I,
    II,
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationType::I => "I",
            RelationType::II => "II",
        })
    }
}

impl RelationType {
    /// The relation supports: type I has one dependent triple, type II two meeting in block 0.
    fn relations(self) -> [[i64; 5]; 2] {
        match self {
            RelationType::I => [[1, 1, 1, 1, 0], [0, 1, -1, 0, 1]],
            RelationType::II => [[1, 1, 0, 1, 0], [1, 0, 1, 0, 1]],
        }
    }

    /// A 3×5 matrix whose kernel is spanned by the relation coefficients.
    pub fn matrix(self) -> IntMatrix {
        let rel = IntMatrix::from_rows(&self.relations().map(|r| r.to_vec()));
        let rows = rational_kernel(&rel);
        IntMatrix::from_int_rows(5, rows).expect("kernel rows have five entries")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseId {
    Rho1A,
    Rho1B,
    Rho2A,
    Rho2B,
    Rho2C,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::Rho1A => "1a",
            CaseId::Rho1B => "1b",
            CaseId::Rho2A => "2a",
            CaseId::Rho2B => "2b",
            CaseId::Rho2C => "2c",
        })
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "1a" => CaseId::Rho1A,
            "1b" => CaseId::Rho1B,
            "2a" => CaseId::Rho2A,
            "2b" => CaseId::Rho2B,
            "2c" => CaseId::Rho2C,
            _ => return Err(format!("unknown case {s:?} (expected 1a, 1b, 2a, 2b or 2c)")),
        })
    }
}

pub const ALL_CASES: [CaseId; 5] = [CaseId::Rho1A, CaseId::Rho1B, CaseId::Rho2A, CaseId::Rho2B, CaseId::Rho2C];

impl CaseId {
    pub fn picard_rank(self) -> usize {
        match self {
            CaseId::Rho1A | CaseId::Rho1B => 1,
            _ => 2,
        }
    }

    /// Exponent vectors per block and m.
    pub fn exponents(self) -> (Vec<Vec<u32>>, usize) {
        let one = vec![2];
        let two = vec![1, 1];
        match self {
            CaseId::Rho1A => (vec![one.clone(); 5], 1),
            CaseId::Rho1B => (vec![two, one.clone(), one.clone(), one.clone(), one], 0),
            CaseId::Rho2A => (vec![one.clone(); 5], 2),
            CaseId::Rho2B => (vec![one.clone(), two, one.clone(), one.clone(), one], 1),
            CaseId::Rho2C => (vec![one.clone(), two.clone(), two, one.clone(), one], 0),
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            CaseId::Rho1A | CaseId::Rho2A => &["x"],
            CaseId::Rho1B | CaseId::Rho2B => &["x", "y"],
            CaseId::Rho2C => &["x", "y", "z"],
        }
    }

    /// Normalizations: x > y where both occur, z > 0.
    pub fn admissible(self, p: &[i64]) -> bool {
        match self {
            CaseId::Rho1A | CaseId::Rho2A => true,
            CaseId::Rho1B | CaseId::Rho2B => p[0] > p[1],
            CaseId::Rho2C => p[0] > p[1] && p[2] > 0,
        }
    }

    /// The last row of P.
    pub fn d_row(self, p: &[i64]) -> Vec<i64> {
        match self {
            CaseId::Rho1A => vec![p[0], 1, 1, 1, 1, 1],
            CaseId::Rho1B => vec![p[0], p[1], 1, 1, 1, 1],
            CaseId::Rho2A => vec![p[0], 1, 1, 1, 1, 1, -1],
            CaseId::Rho2B => vec![1, p[0], p[1], 1, 1, 1, 1],
            CaseId::Rho2C => vec![1, p[0], p[1], p[2], 0, 1, 1],
        }
    }
}

/// One search case: a P-shape, a relation type and a labeling of the five lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCase {
    pub id: CaseId,
    pub rtype: RelationType,
    /// A-column placed at block i
    pub labeling: [usize; 5],
    pub window: i64,
}

impl SearchCase {
    pub fn representative(id: CaseId) -> Self {
        SearchCase { id, rtype: RelationType::II, labeling: [0, 1, 2, 3, 4], window: 8 }
    }

    pub fn arrangement(&self) -> Arrangement {
        let a = self.rtype.matrix().select_cols(&self.labeling);
        Arrangement::new(a).expect("relation types give valid arrangements")
    }

    pub fn build(&self, params: &[i64]) -> Result<CoxRing, String> {
        let (l, m) = self.id.exponents();
        let exps = ExponentData::new(l, m).map_err(|e| e.to_string())?;
        let d = IntMatrix::from_rows(&[self.id.d_row(params)]);
        let ring = CoxRing::build(self.arrangement(), exps, Some(&d)).map_err(|e| e.to_string())?;
        ring.check_positive_grading().map_err(|e| e.to_string())?;
        Ok(ring)
    }

    pub fn grid(&self) -> Vec<Vec<i64>> {
        let k = self.id.param_names().len();
        let w = self.window;
        let mut out = Vec::new();
        let mut cur = vec![-w; k];
        loop {
            if self.id.admissible(&cur) {
                out.push(cur.clone());
            }
            let mut t = 0;
            loop {
                if t == k {
                    return out;
                }
                if cur[t] < w {
                    cur[t] += 1;
                    break;
                }
                cur[t] = -w;
                t += 1;
            }
        }
    }
}

/// Dependent triples of a labeled five-line arrangement.
fn triples(a: &Arrangement) -> BTreeSet<Mask> {
    (0..32u32).filter(|m| m.count_ones() == 3 && a.rank(*m) == 2).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// Every relation type crossed with every labeling of the lines that changes the labeled matroid.
pub fn enumerate_cases() -> Vec<SearchCase> {
    let mut out = Vec::new();
    for id in ALL_CASES {
        for rtype in [RelationType::II, RelationType::I] {
            let base = rtype.matrix();
            let mut seen: BTreeSet<BTreeSet<Mask>> = BTreeSet::new();
            for p in permutations(5) {
                let a = Arrangement::new(base.select_cols(&p)).expect("valid");
                if seen.insert(triples(&a)) {
                    let labeling = [p[0], p[1], p[2], p[3], p[4]];
                    out.push(SearchCase { id, rtype, labeling, window: 8 });
                }
            }
        }
    }
    out
}

/// −K_X in free coordinates.
fn minus_k(ring: &CoxRing) -> Vec<Rat> {
    crate::exactmath::to_rats(&crate::variety::anticanonical_class(ring).free)
}

/// X with Σ the chamber of −K, when −K is ample there.
pub fn fano_variety(ring: &CoxRing) -> Result<Variety, VarietyError> {
    let u = minus_k(ring);
    let cones = fan_from_ample(ring, &u)?;
    Variety::new(ring.clone(), cones)
}

/// Every elementary big cone σ has ℓ_σ ≥ c_σ; only cones violating the bound get classified.
fn big_cones_nonnegative(x: &Variety) -> bool {
    let trop = trop_quasifan(&x.ring, true);
    let violates = |e: &ElementaryCone| ell_sigma(x, e).0 < e.c_sigma;
    !fan_cones(x)
        .iter()
        .filter_map(|c| elementary_data_where(&x.ring, &trop, c, violates))
        .any(|e| e.kind == ConeType::Big)
}

/// Grid points where P is valid, −K is ample in its chamber and every big cone has discrepancy ≥ 0.
pub fn bound_parameters_with(case: &SearchCase, exec: Execution) -> Result<Vec<Vec<i64>>, ClassifyError> {
    let grid = case.grid();
    let keep = par::map_with(exec, &grid, |p| {
        let Ok(ring) = case.build(p) else { return false };
        let Ok(x) = fano_variety(&ring) else { return false };
        big_cones_nonnegative(&x)
    });
    let out: Vec<Vec<i64>> = grid.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    for p in &out {
        for (t, &v) in p.iter().enumerate() {
            if v.abs() == case.window {
                return Err(ClassifyError::Unbounded { name: case.id.param_names()[t].into(), value: v });
            }
        }
    }
    Ok(out)
}

pub fn bound_parameters(case: &SearchCase) -> Result<Vec<Vec<i64>>, ClassifyError> {
    bound_parameters_with(case, Execution::Parallel)
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub case: SearchCase,
    pub params: Vec<i64>,
    pub variety: Variety,
    pub singularity: SingularityVerdict,
    pub fano: bool,
    pub honest: bool,
    pub k_prime: Vec<Primality>,
    pub minus_k: Vec<Rat>,
}

impl Candidate {
    pub fn ring(&self) -> &CoxRing {
        &self.variety.ring
    }

    pub fn verified(&self) -> bool {
        self.fano && self.honest && self.singularity.is_canonical()
    }
}

#[derive(Clone, Debug)]
pub struct Rejection {
    pub case: SearchCase,
    pub params: Vec<i64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    pub picard: Option<usize>,
    pub isotropy: Option<u32>,
    pub cases: Option<Vec<CaseId>>,
    pub exec: Execution,
}

#[derive(Clone, Debug, Default)]
pub struct SearchResult {
    pub candidates: Vec<Candidate>,
    pub rejected: Vec<Rejection>,
    /// cases whose bound search failed
    pub errors: Vec<(SearchCase, String)>,
}

/// Full analysis of one grid point.
pub fn analyze(case: &SearchCase, params: &[i64]) -> Result<Candidate, String> {
    let ring = case.build(params)?;
    let honest = ring.honesty().is_honest();
    let k_prime = ring.k_prime_variables();
    let x = fano_variety(&ring).map_err(|e| format!("no Fano chamber: {e}"))?;
    let fano = x.is_fano().map_err(|e| e.to_string())?;
    let trop = trop_quasifan(&x.ring, true);
    let ac = anticanonical_complex(&x, &trop).map_err(|e| e.to_string())?;
    let singularity = singularity_type(&x, &ac).map_err(|e| e.to_string())?;
    let minus_k = minus_k(&x.ring);
    Ok(Candidate { case: case.clone(), params: params.to_vec(), variety: x, singularity, fano, honest, k_prime, minus_k })
}

pub fn run_search(config: &SearchConfig) -> Result<SearchResult, ClassifyError> {
    if let Some(iso) = config.isotropy {
        if iso != 2 {
            return Err(ClassifyError::Isotropy(iso));
        }
    }
    let cases: Vec<SearchCase> = enumerate_cases()
        .into_iter()
        .filter(|c| config.picard.is_none_or(|p| c.id.picard_rank() == p))
        .filter(|c| config.cases.as_ref().is_none_or(|v| v.contains(&c.id)))
        .collect();
    let mut result = SearchResult::default();
    let mut jobs: Vec<(SearchCase, Vec<i64>)> = Vec::new();
    for case in cases {
        match bound_parameters_with(&case, config.exec) {
            Ok(points) => jobs.extend(points.into_iter().map(|p| (case.clone(), p))),
            Err(e) => result.errors.push((case, e.to_string())),
        }
    }
    let analyzed = par::map_with(config.exec, &jobs, |(case, p)| analyze(case, p));
    for ((case, params), r) in jobs.into_iter().zip(analyzed) {
        match r {
            Ok(c) if c.verified() && c.k_prime.iter().all(|p| *p != Primality::NotPrime) => {
                result.candidates.push(c)
            }
            Ok(c) => {
                let reason = if !c.honest {
                    "not honestly special".to_string()
                } else if !c.fano {
                    "not Fano".to_string()
                } else if !c.singularity.is_canonical() {
                    c.singularity.verdict.to_string()
                } else {
                    "generator not K-prime".to_string()
                };
                result.rejected.push(Rejection { case, params, reason })
            }
            Err(reason) => result.rejected.push(Rejection { case, params, reason }),
        }
    }
    Ok(result)
}

/// Normal-form key of R(A,P): lexicographic minimum over relabelings of blocks, of variables
/// inside a block and of the free variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DedupeKey {
    pub rtype: RelationType,
    pub triples: Vec<Vec<usize>>,
    pub l: Vec<Vec<u32>>,
    pub m: usize,
    pub lattice: Vec<Vec<Int>>,
}

fn within_block_orders(l: &[Vec<u32>]) -> Vec<Vec<Vec<usize>>> {
    // all orderings of each block, combined
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for block in l {
        let perms = permutations(block.len());
        out = out
            .into_iter()
            .flat_map(|acc| {
                perms.iter().map(move |p| {
                    let mut a = acc.clone();
                    a.push(p.clone());
                    a
                })
            })
            .collect();
    }
    out
}

pub fn dedupe_key(ring: &CoxRing, rtype: RelationType) -> DedupeKey {
    let exps = &ring.exponents;
    let nb = exps.blocks();
    let arr = &ring.arrangement;
    let tri = triples(arr);
    let mut best: Option<DedupeKey> = None;
    for bp in permutations(nb) {
        // bp[k] = old block placed at position k
        let l: Vec<Vec<u32>> = bp.iter().map(|&i| exps.l[i].clone()).collect();
        let inv: Vec<usize> = {
            let mut v = vec![0; nb];
            for (k, &i) in bp.iter().enumerate() {
                v[i] = k;
            }
            v
        };
        let mut t: Vec<Vec<usize>> = tri
            .iter()
            .map(|&m| {
                let mut x: Vec<usize> = mask_indices(m).iter().map(|&i| inv[i]).collect();
                x.sort_unstable();
                x
            })
            .collect();
        t.sort();
        if let Some(b) = &best {
            if (rtype, &t, &l) > (b.rtype, &b.triples, &b.l) {
                continue;
            }
        }
        for inner in within_block_orders(&l) {
            for sp in permutations(exps.m) {
                let mut cols = Vec::new();
                for (k, &i) in bp.iter().enumerate() {
                    let range: Vec<usize> = exps.block_range(i).collect();
                    for &j in &inner[k] {
                        cols.push(range[j]);
                    }
                }
                for &k in &sp {
                    cols.push(exps.s_var(k));
                }
                let l_sorted: Vec<Vec<u32>> = bp
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| inner[k].iter().map(|&j| exps.l[i][j]).collect())
                    .collect();
                let lattice = hermite_normal_form(&ring.p.select_cols(&cols).to_rows());
                let key = DedupeKey { rtype, triples: t.clone(), l: l_sorted, m: exps.m, lattice };
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
    }
    best.expect("at least one labeling")
}

/// Invariants that isomorphic candidates share.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoarseInvariants {
    pub rtype: RelationType,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub n: Vec<usize>,
    pub dets: Vec<Int>,
}

pub fn coarse_invariants(c: &Candidate) -> CoarseInvariants {
    let ring = c.ring();
    let mut n = ring.exponents.n.clone();
    n.sort_unstable();
    let q = ring.degree_matrix();
    let k = crate::variety::anticanonical_class(ring).free;
    let mut dets: Vec<Int> = if q.rows() == 2 {
        q.columns()
            .iter()
            .map(|w| det(&IntMatrix::from_cols(2, &[w.clone(), k.clone()])).abs())
            .collect()
    } else {
        q.columns().iter().map(|w| w[0].abs()).collect()
    };
    dets.sort();
    CoarseInvariants { rtype: c.case.rtype, free_rank: ring.picard_rank(), torsion: ring.torsion(), n, dets }
}

#[derive(Clone, Debug)]
pub struct DedupeGroup {
    pub key: DedupeKey,
    pub representative: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Deduped {
    pub groups: Vec<DedupeGroup>,
    /// pairs of groups with equal coarse invariants: possibly isomorphic, undecided
    pub possibly_isomorphic: Vec<(usize, usize)>,
}

pub fn dedupe(cands: &[Candidate]) -> Deduped {
    let keys = par::map(cands, |c| dedupe_key(c.ring(), c.case.rtype));
    let mut by_key: BTreeMap<DedupeKey, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        by_key.entry(k).or_default().push(i);
    }
    let groups: Vec<DedupeGroup> = by_key
        .into_iter()
        .map(|(key, members)| DedupeGroup { key, representative: members[0], members })
        .collect();
    let inv: Vec<CoarseInvariants> = groups.iter().map(|g| coarse_invariants(&cands[g.representative])).collect();
    let mut possibly_isomorphic = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            if inv[i] == inv[j] {
                possibly_isomorphic.push((i, j));
            }
        }
    }
    Deduped { groups, possibly_isomorphic }
}

/// The representatives of a dedupe, in key order.
pub fn representatives(cands: &[Candidate], d: &Deduped) -> Vec<Candidate> {
    d.groups.iter().map(|g| cands[g.representative].clone()).collect()
}

#[derive(Clone, Debug)]
pub struct ProductCandidate {
    pub k1: usize,
    pub k2: usize,
    pub a: Vec<i64>,
    pub variety: Variety,
    pub smoothness: Smoothness,
    pub fano: bool,
    pub dim: usize,
}

/// Checks aᵢ ≥ aᵢ₊₂ ≥ 0, aᵢ + aᵢ₊₁ = 0 for odd i, a_{k₂} = 0 for odd k₂ (1-based).
pub fn check_product_params(k1: usize, k2: usize, a: &[i64]) -> Result<(), ClassifyError> {
    let bad = |s: String| Err(ClassifyError::Product(s));
    if k1 < 5 || k2 < 5 {
        return bad(format!("need k1, k2 >= 5, got {k1}, {k2}"));
    }
    if a.len() != k2 {
        return bad(format!("a has {} entries, expected k2 = {k2}", a.len()));
    }
    for i in (0..k2.saturating_sub(1)).step_by(2) {
        if a[i] + a[i + 1] != 0 {
            return bad(format!("a{} + a{} must vanish", i + 1, i + 2));
        }
    }
    for i in (0..k2).step_by(2) {
        if i + 2 < k2 && !(a[i] >= a[i + 2] && a[i + 2] >= 0) {
            return bad(format!("need a{} >= a{} >= 0", i + 1, i + 3));
        }
    }
    if a[0] < 0 {
        return bad("need a1 >= 0".into());
    }
    if k2 % 2 == 1 && a[k2 - 1] != 0 {
        return bad(format!("a{k2} must vanish for odd k2"));
    }
    Ok(())
}

/// One factor T₁T₂ + T₃T₄ + … (+ T_k²) as an indecomposable K₀-graded ring.
fn quadric_factor(k: usize) -> CoxRing {
    let q = k.div_ceil(2);
    let mut rows = Vec::new();
    for i in 0..q - 1 {
        let mut r = vec![0i64; q];
        r[i] = 1;
        r[q - 1] = -1;
        rows.push(r);
    }
    let mut l = vec![vec![1, 1]; k / 2];
    if k % 2 == 1 {
        l.push(vec![2]);
    }
    let arr = Arrangement::new(IntMatrix::from_rows(&rows)).expect("valid factor");
    CoxRing::build(arr, ExponentData::new(l, 0).expect("valid"), None).expect("valid factor ring")
}

/// Degree matrix [1 … 1 | a₁ … a_{k₂}; 0 … 0 | 1 … 1].
pub fn product_degrees(k1: usize, a: &[i64]) -> IntMatrix {
    let mut top = vec![1i64; k1];
    top.extend_from_slice(a);
    let mut bottom = vec![0i64; k1];
    bottom.extend(std::iter::repeat_n(1, a.len()));
    IntMatrix::from_rows(&[top, bottom])
}

pub fn product_family(k1: usize, k2: usize, a: &[i64]) -> Result<ProductCandidate, ClassifyError> {
    check_product_params(k1, k2, a)?;
    let factors = [quadric_factor(k1), quadric_factor(k2)];
    let q = product_degrees(k1, a);
    let p0 = product_ring(&factors, 0, None).map_err(|e| ClassifyError::Build(e.to_string()))?.p;
    let d = complete_from_degrees(&p0, &q).map_err(|e| ClassifyError::Build(e.to_string()))?;
    let ring = product_ring(&factors, 0, Some(&d))
        .and_then(|r| r.with_grading(&q))
        .map_err(|e| ClassifyError::Build(e.to_string()))?;
    let u = vec![Rat::from_integer(Int::from(a[0] + 1)), Rat::from_integer(Int::from(1))];
    let x = Variety::from_ample(ring, &u).map_err(|e| ClassifyError::Build(e.to_string()))?;
    let smoothness = x.smoothness_report();
    let fano = x.is_fano().map_err(|e| ClassifyError::Build(e.to_string()))?;
    let dim = x.dim();
    Ok(ProductCandidate { k1, k2, a: a.to_vec(), variety: x, smoothness, fano, dim })
}

/// All admissible a-vectors for k₂ with a₁ ≤ max.
pub fn product_parameters(k2: usize, max: i64) -> Vec<Vec<i64>> {
    let pairs = k2 / 2;
    let mut out = Vec::new();
    let mut cur = vec![0i64; pairs];
    loop {
        if cur.windows(2).all(|w| w[0] >= w[1]) {
            let mut a = Vec::with_capacity(k2);
            for &v in &cur {
                a.push(v);
                a.push(-v);
            }
            if k2 % 2 == 1 {
                a.push(0);
            }
            out.push(a);
        }
        let mut t = 0;
        loop {
            if t == pairs {
                out.sort();
                return out;
            }
            if cur[t] < max {
                cur[t] += 1;
                break;
            }
            cur[t] = 0;
            t += 1;
        }
    }
}

/// The Fano criterion with the strict bound: −K = (k₁−2, k₂−2) lies in cone((1,0),(a₁,1))°.
pub fn product_fano_criterion(k1: usize, k2: usize, a1: i64) -> bool {
    a1 >= 0 && a1 * (k2 as i64 - 2) < k1 as i64 - 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_types_have_expected_triples() {
        let t2 = triples(&Arrangement::new(RelationType::II.matrix()).unwrap());
        assert_eq!(t2, [0b01011, 0b10101].into_iter().collect());
        let t1 = triples(&Arrangement::new(RelationType::I.matrix()).unwrap());
        assert_eq!(t1, [0b10110].into_iter().collect());
    }

    #[test]
    fn case_counts() {
        let cases = enumerate_cases();
        assert_eq!(cases.len(), 5 * (15 + 10));
        assert_eq!(cases.iter().filter(|c| c.id.picard_rank() == 1).count(), 2 * 25);
    }

    #[test]
    fn rank_one_a_bound() {
        let b = bound_parameters(&SearchCase::representative(CaseId::Rho1A)).unwrap();
        assert_eq!(b, vec![vec![-5]]);
    }

    #[test]
    fn rank_two_a_empty() {
        assert!(bound_parameters(&SearchCase::representative(CaseId::Rho2A)).unwrap().is_empty());
    }

    #[test]
    fn product_smallest() {
        let p = product_family(6, 5, &[0, 0, 0, 0, 0]).unwrap();
        assert_eq!(p.smoothness, Smoothness::Smooth);
        assert!(p.fano);
        assert_eq!(p.dim, 7);
        let p = product_family(6, 6, &[2, -2, 0, 0, 0, 0]).unwrap();
        assert_eq!(p.smoothness, Smoothness::Smooth);
        assert!(!p.fano);
        assert!(product_family(6, 5, &[1, 1, 0, 0, 0]).is_err());
    }

    #[test]
    fn product_parameter_counts() {
        assert_eq!(product_parameters(5, 3).len(), 10);
        assert_eq!(product_parameters(8, 3).len(), 35);
    }

    #[test]
    fn dedupe_key_invariant_under_block_column_swap() {
        let case = SearchCase::representative(CaseId::Rho2B);
        let r1 = case.build(&[-2, -3]).unwrap();
        let r2 = case.build(&[-3, -2]).unwrap();
        assert_eq!(dedupe_key(&r1, case.rtype), dedupe_key(&r2, case.rtype));
    }
}
