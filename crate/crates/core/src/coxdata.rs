//! The graded rings R(A,P₀), R(A,P) and their product versions.

use std::fmt;
use std::ops::Range;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyhedra::Cone;
use crate::arrangement::{mask_of, Arrangement, ArrangementError, PositionType};
use crate::exactmath::{
    det, gcd_vec, int, kernel_basis, rational_kernel, solve_linear, Cokernel, GroupElement, Int,
    IntMatrix, MathError,
};

#[derive(Debug, Error)]
pub enum RingError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("exponent data: {0}")]
    Exponents(String),
    #[error("column {0} of P is not primitive")]
    NonPrimitiveColumn(String),
    #[error("columns {0} and {1} of P coincide")]
    RepeatedColumn(String, String),
    #[error("P has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("relation {0} is not homogeneous")]
    Inhomogeneous(usize),
    #[error("degree rows do not annihilate the rows of P")]
    BadGrading,
    #[error("the degree of {0} has no free part, so R is not positively graded")]
    ZeroDegree(String),
    #[error("the weight cone is not pointed")]
    WeightConeNotPointed,
    #[error("factor {0} is decomposable")]
    DecomposableFactor(usize),
}

/// Block sizes nᵢ, exponents lᵢⱼ and the number m of free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentData {
    pub n: Vec<usize>,
    pub l: Vec<Vec<u32>>,
    pub m: usize,
}

impl ExponentData {
    pub fn new(l: Vec<Vec<u32>>, m: usize) -> Result<Self, RingError> {
        if l.iter().any(Vec::is_empty) {
            return Err(RingError::Exponents("every block needs at least one variable".into()));
        }
        if l.iter().flatten().any(|&x| x == 0) {
            return Err(RingError::Exponents("exponents must be positive".into()));
        }
        let n = l.iter().map(Vec::len).collect();
        Ok(ExponentData { n, l, m })
    }

    pub fn blocks(&self) -> usize {
        self.n.len()
    }

    /// Number of T variables.
    pub fn n_total(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.n_total() + self.m
    }

    pub fn block_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.n[..i].iter().sum();
        start..start + self.n[i]
    }

    pub fn var(&self, i: usize, j: usize) -> usize {
        self.block_range(i).start + j
    }

    pub fn s_var(&self, k: usize) -> usize {
        self.n_total() + k
    }

    /// Block of a variable, `None` for the free variables S_k.
    pub fn block_of(&self, v: usize) -> Option<usize> {
        let mut acc = 0;
        for (i, &ni) in self.n.iter().enumerate() {
            if v < acc + ni {
                return Some(i);
            }
            acc += ni;
        }
        None
    }

    pub fn exponent(&self, v: usize) -> Option<u32> {
        self.block_of(v).map(|i| self.l[i][v - self.block_range(i).start])
    }

    /// Exponent vector of the monomial Tᵢ^{lᵢ}.
    pub fn monomial(&self, i: usize) -> Vec<Int> {
        let mut e = vec![Int::zero(); self.nvars()];
        for (j, v) in self.block_range(i).enumerate() {
            e[v] = Int::from(self.l[i][j]);
        }
        e
    }

    pub fn label(&self, v: usize) -> String {
        match self.block_of(v) {
            Some(i) => {
                let j = v - self.block_range(i).start + 1;
                if i < 10 && j < 10 {
                    format!("T{i}{j}")
                } else {
                    format!("T{i}_{j}")
                }
            }
            None => format!("S{}", v - self.n_total() + 1),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.nvars()).map(|v| self.label(v)).collect()
    }
}

/// A group of consecutive blocks forming one arrangement factor, with its rows of P₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub blocks: Range<usize>,
    pub p0_rows: Range<usize>,
}

/// Coefficient rows of the relations g_v = Σ vᵢ Tᵢ^{lᵢ}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    pub coeffs: Vec<Vec<Int>>,
}

impl RelationSet {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Blocks with nonzero coefficient in relation `k`.
    pub fn support(&self, k: usize) -> Vec<usize> {
        (0..self.coeffs[k].len()).filter(|&i| !self.coeffs[k][i].is_zero()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primality {
    Prime,
    NotPrime,
    Undecided,
}

/// Why a ring is (not) honestly special.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Honesty {
    Honest,
    /// some lᵢⱼnᵢ = 1: the variable can be eliminated
    ExponentOne { var: usize },
    /// A splits; a singleton block is a variable that occurs in no relation
    Decomposable { blocks: Vec<Vec<usize>> },
    GeneralPosition,
}

impl Honesty {
    pub fn is_honest(&self) -> bool {
        matches!(self, Honesty::Honest)
    }
}

impl fmt::Display for Honesty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Honesty::Honest => write!(f, "honestly special"),
            Honesty::ExponentOne { var } => {
                write!(f, "not honest: linear variable reduction (variable {var})")
            }
            Honesty::Decomposable { blocks } => {
                let free = blocks.iter().any(|b| b.len() == 1);
                let kind = if free { "free-variable reduction" } else { "decomposable arrangement" };
                let parts: Vec<String> = blocks
                    .iter()
                    .map(|b| format!("{{{}}}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                    .collect();
                write!(f, "not honest: {kind} {}", parts.join(" "))
            }
            Honesty::GeneralPosition => write!(f, "not honest: general position"),
        }
    }
}

/// R(A,P) (or R(A,P₀) when no d-rows are given) with its grading.
#[derive(Clone, Debug)]
pub struct CoxRing {
    pub arrangement: Arrangement,
    pub exponents: ExponentData,
    pub relations: RelationSet,
    pub factors: Vec<Factor>,
    /// full P = [P₀; d]
    pub p: IntMatrix,
    pub s: usize,
    cokernel: Cokernel,
    degrees: Vec<GroupElement>,
}

fn p0_rows(exps: &ExponentData, blocks: Range<usize>) -> Vec<Vec<Int>> {
    let b0 = blocks.start;
    let mut rows = Vec::new();
    for i in blocks.clone().skip(1) {
        let mut row = vec![Int::zero(); exps.nvars()];
        for (j, v) in exps.block_range(b0).enumerate() {
            row[v] = -Int::from(exps.l[b0][j]);
        }
        for (j, v) in exps.block_range(i).enumerate() {
            row[v] = Int::from(exps.l[i][j]);
        }
        rows.push(row);
    }
    rows
}

impl CoxRing {
    /// Single-factor ring; `d` holds the s extra rows of P (none: K₀-grading).
    pub fn build(arr: Arrangement, exps: ExponentData, d: Option<&IntMatrix>) -> Result<Self, RingError> {
        let blocks = exps.blocks();
        let factors = vec![Factor { blocks: 0..blocks, p0_rows: 0..blocks - 1 }];
        Self::assemble(arr, exps, factors, d)
    }

    fn assemble(
        arr: Arrangement,
        exps: ExponentData,
        factors: Vec<Factor>,
        d: Option<&IntMatrix>,
    ) -> Result<Self, RingError> {
        if exps.blocks() != arr.ncols() {
            return Err(RingError::Exponents(format!(
                "{} blocks given but A has {} columns",
                exps.blocks(),
                arr.ncols()
            )));
        }
        let nv = exps.nvars();
        let mut rows = Vec::new();
        for f in &factors {
            rows.extend(p0_rows(&exps, f.blocks.clone()));
        }
        let p0 = IntMatrix::from_int_rows(nv, rows)?;
        let (p, s) = match d {
            Some(d) => {
                if d.cols() != nv {
                    return Err(RingError::Exponents(format!(
                        "d-rows have {} entries, expected n+m = {nv}",
                        d.cols()
                    )));
                }
                (p0.vstack(d), d.rows())
            }
            None => (p0, 0),
        };
        let labels = exps.labels();
        if d.is_some() {
            let cols = p.columns();
            for (j, c) in cols.iter().enumerate() {
                if gcd_vec(c) != Int::one() {
                    return Err(RingError::NonPrimitiveColumn(labels[j].clone()));
                }
                if let Some(k) = cols[..j].iter().position(|x| x == c) {
                    return Err(RingError::RepeatedColumn(labels[k].clone(), labels[j].clone()));
                }
            }
            let rank = p.rank();
            if rank != p.rows() {
                return Err(RingError::RankDeficient { rank, expected: p.rows() });
            }
        }
        let coeffs = rational_kernel(arr.matrix());
        let relations = RelationSet { coeffs };
        let cokernel = Cokernel::new(&p.transpose());
        let degrees = (0..nv).map(|v| cokernel.class_of_unit(v)).collect();
        let ring = CoxRing { arrangement: arr, exponents: exps, relations, factors, p, s, cokernel, degrees };
        ring.relation_degrees()?;
        Ok(ring)
    }

    /// R₀ = ℂ: the free degrees are nonzero and span a pointed cone. Needed for complete X.
    pub fn check_positive_grading(&self) -> Result<(), RingError> {
        let rho = self.picard_rank();
        let free: Vec<Vec<Int>> = self.degrees.iter().map(|g| g.free.clone()).collect();
        if let Some(v) = free.iter().position(|w| w.iter().all(|x| x.is_zero())) {
            return Err(RingError::ZeroDegree(self.exponents.label(v)));
        }
        if !Cone::from_generators(rho, &free, &[]).is_pointed() {
            return Err(RingError::WeightConeNotPointed);
        }
        Ok(())
    }

    /// Replaces the free coordinates of K by the given degree rows (a unimodular change).
    pub fn with_grading(mut self, q: &IntMatrix) -> Result<Self, RingError> {
        let zero = q.mul(&self.p.transpose());
        if (0..zero.rows()).any(|i| zero.row(i).iter().any(|x| !x.is_zero())) {
            return Err(RingError::BadGrading);
        }
        self.cokernel.rebase(q)?;
        self.degrees = (0..self.exponents.nvars()).map(|v| self.cokernel.class_of_unit(v)).collect();
        Ok(self)
    }

    pub fn c(&self) -> usize {
        self.arrangement.matrix().rows() - self.factors.len()
    }

    pub fn r(&self) -> usize {
        self.arrangement.ncols() - self.factors.len()
    }

    pub fn nvars(&self) -> usize {
        self.exponents.nvars()
    }

    /// dim R = n + m − r + c
    pub fn dim(&self) -> usize {
        self.nvars() - self.relations.len()
    }

    pub fn picard_rank(&self) -> usize {
        self.cokernel.free_rank()
    }

    pub fn torsion(&self) -> Vec<Int> {
        self.cokernel.torsion_orders()
    }

    pub fn class(&self, v: &[Int]) -> GroupElement {
        self.cokernel.class(v)
    }

    pub fn degree(&self, var: usize) -> &GroupElement {
        &self.degrees[var]
    }

    pub fn degrees(&self) -> &[GroupElement] {
        &self.degrees
    }

    /// Free parts of the degrees as a ρ × (n+m) matrix.
    pub fn degree_matrix(&self) -> IntMatrix {
        self.cokernel.free_map().clone()
    }

    /// Columns of P, the primitive generators v_ij and v_k.
    pub fn columns(&self) -> Vec<Vec<Int>> {
        self.p.columns()
    }

    pub fn ambient_dim(&self) -> usize {
        self.p.rows()
    }

    pub fn relation_degrees(&self) -> Result<Vec<GroupElement>, RingError> {
        let exps = &self.exponents;
        (0..self.relations.len())
            .map(|k| {
                let supp = self.relations.support(k);
                let degs: Vec<GroupElement> =
                    supp.iter().map(|&i| self.class(&exps.monomial(i))).collect();
                if degs.windows(2).any(|w| w[0] != w[1]) {
                    return Err(RingError::Inhomogeneous(k));
                }
                Ok(degs.into_iter().next().expect("relations have at least two terms"))
            })
            .collect()
    }

    pub fn honesty(&self) -> Honesty {
        let exps = &self.exponents;
        for i in 0..exps.blocks() {
            for (j, &l) in exps.l[i].iter().enumerate() {
                if l as usize * exps.n[i] == 1 {
                    return Honesty::ExponentOne { var: exps.var(i, j) };
                }
            }
        }
        let blocks = self.arrangement.decompose();
        if blocks.len() > 1 {
            return Honesty::Decomposable { blocks };
        }
        if self.arrangement.position_type() == PositionType::General {
            return Honesty::GeneralPosition;
        }
        Honesty::Honest
    }

    /// K-primality of every generator. S_k are always prime.
    pub fn k_prime_variables(&self) -> Vec<Primality> {
        let exps = &self.exponents;
        let arr = &self.arrangement;
        let nb = exps.blocks();
        let block_result: Vec<Primality> = (0..nb)
            .map(|i| {
                // lines through a_i: rank-2 flats containing i
                let mut result = Primality::Prime;
                for f in arr.flats().iter().filter(|f| f.rank == 2 && f.mask >> i & 1 == 1) {
                    let others: Vec<usize> = f.indices().into_iter().filter(|&k| k != i).collect();
                    if others.len() < 2 {
                        continue;
                    }
                    if others.len() > 2 {
                        if result == Primality::Prime {
                            result = Primality::Undecided;
                        }
                        continue;
                    }
                    let (k, k2) = (others[0], others[1]);
                    if self.binomial_splits(k, k2) {
                        return Primality::NotPrime;
                    }
                }
                result
            })
            .collect();
        (0..exps.nvars())
            .map(|v| match exps.block_of(v) {
                Some(i) => block_result[i],
                None => Primality::Prime,
            })
            .collect()
    }

    /// Whether Tₖ^{lₖ} − λT_{k'}^{l_{k'}} has a K-homogeneous factorization.
    fn binomial_splits(&self, k: usize, k2: usize) -> bool {
        let exps = &self.exponents;
        let mut all: Vec<Int> = exps.l[k].iter().map(|&x| Int::from(x)).collect();
        all.extend(exps.l[k2].iter().map(|&x| Int::from(x)));
        let g = gcd_vec(&all);
        let mut p = int(2);
        let mut rest = g;
        while rest > Int::one() {
            if rest.is_multiple_of(&p) {
                let a: Vec<Int> = exps.monomial(k).iter().map(|x| x / &p).collect();
                let b: Vec<Int> = exps.monomial(k2).iter().map(|x| x / &p).collect();
                if self.class(&a) == self.class(&b) {
                    return true;
                }
                while rest.is_multiple_of(&p) {
                    rest /= &p;
                }
            }
            p += 1;
        }
        false
    }

    pub fn is_product(&self) -> bool {
        self.factors.len() > 1
    }
}

/// R_prod: tensor product of K₀-graded indecomposable rings, with m free variables and d-rows.
pub fn product_ring(
    factors: &[CoxRing],
    m: usize,
    d: Option<&IntMatrix>,
) -> Result<CoxRing, RingError> {
    let mut l = Vec::new();
    let mut fac = Vec::new();
    let mut a_blocks: Vec<IntMatrix> = Vec::new();
    let (mut b, mut r) = (0, 0);
    for (t, f) in factors.iter().enumerate() {
        if f.arrangement.decompose().len() > 1 {
            return Err(RingError::DecomposableFactor(t));
        }
        let nb = f.exponents.blocks();
        l.extend(f.exponents.l.iter().cloned());
        fac.push(Factor { blocks: b..b + nb, p0_rows: r..r + nb - 1 });
        b += nb;
        r += nb - 1;
        a_blocks.push(f.arrangement.matrix().clone());
    }
    let rows: usize = a_blocks.iter().map(IntMatrix::rows).sum();
    let mut a = IntMatrix::zeros(rows, b);
    let (mut ro, mut co) = (0, 0);
    for blk in &a_blocks {
        for i in 0..blk.rows() {
            for j in 0..blk.cols() {
                a.set(ro + i, co + j, blk.get(i, j).clone());
            }
        }
        ro += blk.rows();
        co += blk.cols();
    }
    let exps = ExponentData::new(l, m)?;
    CoxRing::assemble(Arrangement::new(a)?, exps, fac, d)
}

/// Inverse of a unimodular matrix.
fn unimodular_inverse(v: &IntMatrix) -> Result<IntMatrix, MathError> {
    let n = v.rows();
    if det(v).abs() != Int::one() {
        return Err(MathError::Shape("matrix is not unimodular".into()));
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<_> = (0..n).map(|i| crate::exactmath::rat(i64::from(i == j), 1)).collect();
        let x = solve_linear(v, &e);
        let x = x.particular().ok_or_else(|| MathError::Shape("singular".into()))?.to_vec();
        cols.push(x.iter().map(|q| q.to_integer()).collect());
    }
    Ok(IntMatrix::from_cols(n, &cols))
}

/// Rows completing the P₀-rows of `exps`/`factors` to a lattice basis of ker_Z(Q).
pub fn complete_from_degrees(p0: &IntMatrix, q: &IntMatrix) -> Result<IntMatrix, RingError> {
    let basis = kernel_basis(q);
    let bmat = IntMatrix::from_int_rows(q.cols(), basis.clone())?;
    // coordinates of P₀ rows in the kernel basis
    let bt = bmat.transpose();
    let mut coords = Vec::new();
    for i in 0..p0.rows() {
        let b: Vec<_> = p0.row(i).iter().map(crate::exactmath::rat_from).collect();
        let x = solve_linear(&bt, &b);
        let x = x.particular().ok_or(RingError::BadGrading)?.to_vec();
        if x.iter().any(|t| !t.is_integer()) {
            return Err(RingError::BadGrading);
        }
        coords.push(x.iter().map(|t| t.to_integer()).collect());
    }
    let c = IntMatrix::from_int_rows(basis.len(), coords)?;
    let snf = crate::exactmath::smith_normal_form(&c);
    if snf.d.iter().any(|x| x != &Int::one()) {
        return Err(RingError::BadGrading);
    }
    let vinv = unimodular_inverse(&snf.v)?;
    let extra: Vec<usize> = (p0.rows()..basis.len()).collect();
    Ok(vinv.select_rows(&extra).mul(&bmat))
}

impl CoxRing {
    /// The P₀ part of P.
    pub fn p0(&self) -> IntMatrix {
        let r: Vec<usize> = (0..self.r()).collect();
        self.p.select_rows(&r)
    }

    /// Index set of blocks as a mask.
    pub fn block_mask(&self, blocks: &[usize]) -> u32 {
        mask_of(blocks)
    }
}
