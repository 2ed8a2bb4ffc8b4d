//! Discrepancies along Σ ⊓ trop(X), the anticanonical complex, singularity verdicts.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::{
    dot_mixed, fmt_int_vec, smith_normal_form, solve_linear_rat,
    to_rats, Int, IntMatrix, Rat,
};
use crate::polyhedra::{Fan, PolyError, TruncatedCell};
use crate::tropical::{elementary_cones, refined_fan, vanishing_relations, ElementaryCone, TropicalData};
use crate::variety::Variety;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnticanonError {
    #[error("not Q-Gorenstein on chart {0}")]
    NotQGorenstein(String),
    #[error("ray {0} of the refinement is neither a ray of the fan nor an elementary ray")]
    UnexpectedRay(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaySource {
    /// column of P
    Original(usize),
    /// index into the elementary cone list
    Elementary(usize),
}

#[derive(Clone, Debug)]
pub struct RayDiscrepancy {
    pub ray: Vec<Int>,
    pub source: RaySource,
    pub ell: Option<Int>,
    pub c: Int,
    pub a: Rat,
    /// the point where 𝒜 leaves the ray, when a > -1
    pub vertex: Option<Vec<Rat>>,
}

/// ℓ_σ = Σ ℓ_{σ,i} − k·∏ l_{i j_i}, returned with k.
pub fn ell_sigma(x: &Variety, e: &ElementaryCone) -> (Int, usize) {
    let k = vanishing_relations(&x.ring, &e.blocks());
    let sum: Int = e.ell.iter().sum();
    (sum - Int::from(k) * e.l_product(&x.ring), k)
}

#[derive(Clone, Debug)]
pub struct ACComplex {
    pub elementary: Vec<ElementaryCone>,
    pub rays: Vec<RayDiscrepancy>,
    pub refined: Fan,
    pub cells: Vec<TruncatedCell>,
    pub bounded: bool,
}

fn discrepancies(x: &Variety, elementary: &[ElementaryCone]) -> Vec<RayDiscrepancy> {
    let mut out: Vec<RayDiscrepancy> = x
        .ring
        .columns()
        .into_iter()
        .enumerate()
        .map(|(j, v)| RayDiscrepancy {
            vertex: Some(to_rats(&v)),
            ray: v,
            source: RaySource::Original(j),
            ell: None,
            c: Int::one(),
            a: Rat::zero(),
        })
        .collect();
    for (k, e) in elementary.iter().enumerate() {
        if out.iter().any(|d| d.ray == e.ray) {
            continue;
        }
        let (ell, _) = ell_sigma(x, e);
        let a = Rat::new(ell.clone(), e.c_sigma.clone()) - Rat::one();
        let vertex = ell
            .is_positive()
            .then(|| e.v_sigma.iter().map(|t| Rat::new(t.clone(), ell.clone())).collect());
        out.push(RayDiscrepancy {
            ray: e.ray.clone(),
            source: RaySource::Elementary(k),
            ell: Some(ell),
            c: e.c_sigma.clone(),
            a,
            vertex,
        });
    }
    out
}

/// u with ⟨u, v⟩ = b_v on the given rays; solved on the span of the rays.
fn chart_form(rays: &[Vec<Int>], b: &[Rat], ambient: usize) -> Option<Vec<Rat>> {
    let rows: Vec<Vec<Rat>> = rays.iter().map(|r| to_rats(r)).collect();
    solve_linear_rat(&rows, ambient, b).particular().map(<[Rat]>::to_vec)
}

pub fn anticanonical_complex(x: &Variety, trop: &TropicalData) -> Result<ACComplex, AnticanonError> {
    let elementary = elementary_cones(x, trop);
    let rays = discrepancies(x, &elementary);
    let refined = refined_fan(x, trop);
    let ambient = x.ring.ambient_dim();
    let cells = crate::par::map(&refined.cones, |c| -> Result<TruncatedCell, AnticanonError> {
        let mut b = Vec::new();
        for r in c.rays() {
            let d = rays
                .iter()
                .find(|d| &d.ray == r)
                .ok_or_else(|| AnticanonError::UnexpectedRay(fmt_int_vec(r)))?;
            b.push(-(&d.a + Rat::one()));
        }
        let u = chart_form(c.rays(), &b, ambient)
            .ok_or_else(|| AnticanonError::NotQGorenstein(c.rays().iter().map(|r| fmt_int_vec(r)).collect::<Vec<_>>().join(" ")))?;
        Ok(TruncatedCell { cone: c.clone(), u })
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>, _>>()?;
    let bounded = cells.iter().all(TruncatedCell::is_bounded);
    Ok(ACComplex { elementary, rays, refined, cells, bounded })
}

impl ACComplex {
    /// Vertices of 𝒜 other than the origin, deduplicated.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let set: BTreeSet<Vec<Rat>> = self.rays.iter().filter_map(|d| d.vertex.clone()).collect();
        set.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Terminal,
    Canonical,
    LogTerminal,
    NotLogTerminal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Terminal => "terminal",
            Verdict::Canonical => "canonical (not terminal)",
            Verdict::LogTerminal => "log terminal (not canonical)",
            Verdict::NotLogTerminal => "not log terminal",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SingularityVerdict {
    pub verdict: Verdict,
    /// offending lattice points, or rays along which 𝒜 is unbounded
    pub witnesses: Vec<Vec<Int>>,
}

impl SingularityVerdict {
    pub fn is_canonical(&self) -> bool {
        self.verdict <= Verdict::Canonical
    }
}

pub fn singularity_type(x: &Variety, ac: &ACComplex) -> Result<SingularityVerdict, AnticanonError> {
    if !ac.bounded {
        let mut w: Vec<Vec<Int>> = ac
            .cells
            .iter()
            .flat_map(|c| c.cone.rays().iter().filter(|r| !dot_mixed(&c.u, r).is_negative()).cloned())
            .collect();
        w.sort();
        w.dedup();
        return Ok(SingularityVerdict { verdict: Verdict::NotLogTerminal, witnesses: w });
    }
    let minus_one = -Rat::one();
    let per_cell = crate::par::map(&ac.cells, |c| c.lattice_points().map(|pts| (c.u.clone(), pts)));
    let mut interior: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut boundary: BTreeSet<Vec<Int>> = BTreeSet::new();
    for r in per_cell {
        let (u, pts) = r?;
        for p in pts {
            if p.iter().all(Zero::is_zero) {
                continue;
            }
            if dot_mixed(&u, &p) > minus_one {
                interior.insert(p);
            } else {
                boundary.insert(p);
            }
        }
    }
    if !interior.is_empty() {
        return Ok(SingularityVerdict { verdict: Verdict::LogTerminal, witnesses: interior.into_iter().collect() });
    }
    let cols: BTreeSet<Vec<Int>> = x.ring.columns().into_iter().collect();
    let extra: Vec<Vec<Int>> = boundary.into_iter().filter(|p| !cols.contains(p)).collect();
    if extra.is_empty() {
        Ok(SingularityVerdict { verdict: Verdict::Terminal, witnesses: vec![] })
    } else {
        Ok(SingularityVerdict { verdict: Verdict::Canonical, witnesses: extra })
    }
}

#[derive(Clone, Debug)]
pub struct GorensteinReport {
    /// per maximal cone: the linear form u_σ with ⟨u_σ, v⟩ = −1 on its rays, if solvable
    pub charts: Vec<(Vec<usize>, Option<Vec<Rat>>)>,
    /// the Gorenstein index, when every chart is solvable
    pub index: Option<Int>,
}

impl GorensteinReport {
    pub fn is_q_gorenstein(&self) -> bool {
        self.index.is_some()
    }
}

/// Least ι such that M·u = ι·b has an integral solution u (None if no rational one).
fn integral_multiple(m: &IntMatrix, b: &[Int]) -> Option<Int> {
    let snf = smith_normal_form(m);
    let ub = snf.u.mul_vec(b);
    let rank = snf.rank();
    if ub[rank..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(
        snf.d[..rank]
            .iter()
            .zip(&ub)
            .fold(Int::one(), |acc, (d, y)| acc.lcm(&(d / d.gcd(y)))),
    )
}

pub fn gorenstein_check(x: &Variety) -> GorensteinReport {
    let cols = x.ring.columns();
    let ambient = x.ring.ambient_dim();
    let mut index = Some(Int::one());
    let mut charts = Vec::new();
    for c in &x.cones {
        let rays: Vec<Vec<Int>> = c.iter().map(|&j| cols[j].clone()).collect();
        let b = vec![-Rat::one(); rays.len()];
        let u = chart_form(&rays, &b, ambient);
        index = match (&index, &u) {
            (Some(i), Some(_)) => {
                let m = IntMatrix::from_int_rows(ambient, rays.clone()).expect("rays have ambient length");
                integral_multiple(&m, &vec![-Int::one(); rays.len()]).map(|k| i.lcm(&k))
            }
            _ => None,
        };
        charts.push((c.clone(), u));
    }
    GorensteinReport { charts, index }
}
