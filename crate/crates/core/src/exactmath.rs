//! Big-integer matrices, Smith/Hermite normal forms and exact linear solves.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MathError {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_from(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn to_rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_mixed(a: &[Rat], b: &[Int]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * rat_from(y))
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    /// Builds from rows; every row must have `cols` entries.
    pub fn from_int_rows(cols: usize, rows: Vec<Vec<Int>>) -> Result<Self, MathError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(MathError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: n, cols, data })
    }

    /// Convenience for literals. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_int_rows(cols, rows.iter().map(|r| ints(r)).collect())
            .expect("ragged matrix literal")
    }

    pub fn from_cols(rows: usize, cols: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_int_rows(self.cols, rows).expect("row selection keeps width")
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.to_rows())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &Int) {
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let cells: Vec<String> =
                self.row(i).iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Fraction-free (Bareiss) elimination; returns the rank.
pub fn rank_of(rows: &[Vec<Int>]) -> usize {
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = Int::one();
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if m[i][col].is_zero() {
                // still needs the Bareiss scaling to keep later divisions exact
                for j in col + 1..ncols {
                    let v = &m[i][j] * &m[rank][col];
                    m[i][j] = v / &prev;
                }
                continue;
            }
            for j in col + 1..ncols {
                let v = &m[i][j] * &m[rank][col] - &m[i][col] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = Int::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

pub fn rank_of_rat(rows: &[Vec<Rat>]) -> usize {
    rref(rows).1.len()
}

/// Reduced row echelon form over Q. Returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..ncols {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn lcm_of_denominators(v: &[Rat]) -> Int {
    v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a rational vector to a primitive integer vector (same direction).
pub fn clear_denominators(v: &[Rat]) -> Vec<Int> {
    let l = lcm_of_denominators(v);
    let w: Vec<Int> = v.iter().map(|x| (x * rat_from(&l)).to_integer()).collect();
    primitive_vector(&w).unwrap_or(w)
}

/// Primitive integer Q-basis of the right kernel, first nonzero entry positive.
pub fn rational_kernel(m: &IntMatrix) -> Vec<Vec<Int>> {
    let rows: Vec<Vec<Rat>> = m.to_rows().iter().map(|r| to_rats(r)).collect();
    rational_kernel_rat(&rows, m.cols())
}

pub fn rational_kernel_rat(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Int>> {
    let (red, pivots) = rref(rows);
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[f].clone();
        }
        out.push(sign_normalize(clear_denominators(&v)));
    }
    out
}

fn sign_normalize(mut v: Vec<Int>) -> Vec<Int> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    v
}

pub fn gcd_vec(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divides out the gcd of the entries.
pub fn primitive_vector(v: &[Int]) -> Result<Vec<Int>, MathError> {
    let g = gcd_vec(v);
    if g.is_zero() {
        return Err(MathError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// U·M·V = diag(d), d a divisor chain of nonnegative entries (length min(rows, cols)).
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub d: Vec<Int>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let steps = rows.min(cols);
    'outer: for t in 0..steps {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !a.get(i, t).is_zero() {
                    let q = -a.get(i, t).div_floor(&p);
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= a.get(i, t).is_zero();
                }
            }
            for j in t + 1..cols {
                if !a.get(t, j).is_zero() {
                    let q = -a.get(t, j).div_floor(&p);
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= a.get(t, j).is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = Int::one();
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    let d = (0..steps).map(|t| a.get(t, t).clone()).collect();
    SmithDecomposition { d, u, v }
}

/// Row-style Hermite normal form; zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        // euclid on column entries below r
        loop {
            let nz: Vec<usize> = (r..m.len()).filter(|&i| !m[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if !m[i][col].is_zero() {
                    let q = m[i][col].div_floor(&m[r][col]);
                    let pivot_row = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                    done &= m[i][col].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if m[r][col].is_zero() {
            continue;
        }
        if m[r][col].is_negative() {
            m[r].iter_mut().for_each(|x| *x = -x.clone());
        }
        let pivot_row = m[r].clone();
        for i in 0..r {
            let q = m[i][col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Lattice basis of ker(M) ∩ Z^cols in Hermite form.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let vecs: Vec<Vec<Int>> = (rank..m.cols()).map(|j| snf.v.col(j)).collect();
    if vecs.is_empty() {
        return vecs;
    }
    hermite_normal_form(&vecs)
}

pub fn det(m: &IntMatrix) -> Int {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.to_rows();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Int::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        Int::one()
    } else {
        sign * a[n - 1][n - 1].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    Solved { particular: Vec<Rat>, kernel: Vec<Vec<Int>> },
}

impl LinearSolution {
    pub fn particular(&self) -> Option<&[Rat]> {
        match self {
            LinearSolution::Solved { particular, .. } => Some(particular),
            LinearSolution::Inconsistent => None,
        }
    }
}

/// Exact solution of M·x = b; free variables set to zero in the particular solution.
pub fn solve_linear(m: &IntMatrix, b: &[Rat]) -> LinearSolution {
    let rows: Vec<Vec<Rat>> = m.to_rows().iter().map(|r| to_rats(r)).collect();
    solve_linear_rat(&rows, m.cols(), b)
}

pub fn solve_linear_rat(rows: &[Vec<Rat>], ncols: usize, b: &[Rat]) -> LinearSolution {
    let aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&ncols) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (row, &p) in red.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    LinearSolution::Solved { particular: x, kernel: rational_kernel_rat(rows, ncols) }
}

/// Z^rows / im(M) for an integer matrix M, read off from its Smith form.
#[derive(Clone, Debug)]
pub struct Cokernel {
    /// rows of U giving free coordinates (possibly rebased)
    free_map: IntMatrix,
    /// rows of U with their torsion orders d > 1
    torsion_map: Vec<(Vec<Int>, Int)>,
}

/// Element of a finitely generated abelian group Z^k ⊕ ⊕ Z/d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub free: Vec<Int>,
    pub torsion: Vec<Int>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

impl Cokernel {
    pub fn new(m: &IntMatrix) -> Self {
        let snf = smith_normal_form(m);
        let rank = snf.rank();
        let free_rows: Vec<Vec<Int>> = (rank..m.rows()).map(|i| snf.u.row(i).to_vec()).collect();
        let free_map = IntMatrix::from_int_rows(m.rows(), free_rows).expect("rows of U");
        let torsion_map = (0..rank)
            .filter(|&i| snf.d[i] > Int::one())
            .map(|i| (snf.u.row(i).to_vec(), snf.d[i].clone()))
            .collect();
        Cokernel { free_map, torsion_map }
    }

    pub fn free_rank(&self) -> usize {
        self.free_map.rows()
    }

    pub fn torsion_orders(&self) -> Vec<Int> {
        self.torsion_map.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn free_map(&self) -> &IntMatrix {
        &self.free_map
    }

    pub fn class(&self, y: &[Int]) -> GroupElement {
        let free = self.free_map.mul_vec(y);
        let torsion = self
            .torsion_map
            .iter()
            .map(|(row, d)| dot(row, y).mod_floor(d))
            .collect();
        GroupElement { free, torsion }
    }

    pub fn class_of_unit(&self, j: usize) -> GroupElement {
        let mut e = vec![Int::zero(); self.free_map.cols()];
        e[j] = Int::one();
        self.class(&e)
    }

    /// Replaces the free coordinates by `target = G·free_map` with G unimodular.
    /// Fails unless `target` is such a change of basis.
    pub fn rebase(&mut self, target: &IntMatrix) -> Result<(), MathError> {
        let rho = self.free_rank();
        if target.rows() != rho || target.cols() != self.free_map.cols() {
            return Err(MathError::Shape("grading matrix has wrong shape".into()));
        }
        // G = target_cols · F_cols^{-1} for a set of columns where F is invertible
        let fcols = self.free_map.columns();
        let mut chosen = Vec::new();
        let mut chosen_vecs: Vec<Vec<Int>> = Vec::new();
        for (j, c) in fcols.iter().enumerate() {
            let mut trial = chosen_vecs.clone();
            trial.push(c.clone());
            if rank_of(&trial) == trial.len() {
                chosen.push(j);
                chosen_vecs = trial;
            }
            if chosen.len() == rho {
                break;
            }
        }
        if chosen.len() < rho {
            return Err(MathError::Shape("degenerate free part".into()));
        }
        // solve X · F_c = T_c row by row: F_c^T x^T = t^T
        let fc = self.free_map.select_cols(&chosen);
        let fct = fc.transpose();
        let mut g_rows = Vec::with_capacity(rho);
        for i in 0..rho {
            let t: Vec<Rat> = chosen.iter().map(|&j| rat_from(target.get(i, j))).collect();
            let sol = solve_linear(&fct, &t);
            let x = sol
                .particular()
                .ok_or_else(|| MathError::Shape("grading not in free span".into()))?;
            if x.iter().any(|q| !q.is_integer()) {
                return Err(MathError::Shape("grading change is not integral".into()));
            }
            g_rows.push(x.iter().map(|q| q.to_integer()).collect());
        }
        let g = IntMatrix::from_int_rows(rho, g_rows)?;
        if det(&g).abs() != Int::one() {
            return Err(MathError::Shape("grading change is not unimodular".into()));
        }
        let new_map = g.mul(&self.free_map);
        // torsion-free agreement on all unit vectors
        if &new_map != target {
            return Err(MathError::Shape("grading does not match the degree map".into()));
        }
        self.free_map = new_map;
        Ok(())
    }
}

pub fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn fmt_rat_vec(v: &[Rat]) -> String {
    format!("({})", v.iter().map(fmt_rat).collect::<Vec<_>>().join(","))
}

pub fn fmt_int_vec(v: &[Int]) -> String {
    format!("({})", v.iter().map(Int::to_string).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag_check(m: &IntMatrix, s: &SmithDecomposition) {
        let prod = s.u.mul(m).mul(&s.v);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let want = if i == j && i < s.d.len() { s.d[i].clone() } else { Int::zero() };
                assert_eq!(prod.get(i, j), &want);
            }
        }
        for w in s.d.windows(2) {
            assert!(w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        assert_eq!(det(&s.u).abs(), Int::one());
        assert_eq!(det(&s.v).abs(), Int::one());
    }

    #[test]
    fn snf_small_cases() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.d, ints(&[2, 2]));
        let z = IntMatrix::zeros(2, 2);
        assert_eq!(smith_normal_form(&z).d, ints(&[0, 0]));
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m);
        diag_check(&m, &s);
        assert_eq!(s.d, ints(&[2, 6, 12]));
    }

    #[test]
    fn running_example_class_group() {
        let p = IntMatrix::from_rows(&[
            vec![-1, -1, 2, 0, 0, 0, 0],
            vec![-1, -1, 0, 2, 0, 0, 0],
            vec![-1, -1, 0, 0, 2, 0, 0],
            vec![-1, -1, 0, 0, 0, 2, 0],
            vec![-2, -3, 1, 1, 1, 1, 1],
        ]);
        let k = Cokernel::new(&p.transpose());
        assert_eq!(k.free_rank(), 2);
        assert_eq!(k.torsion_orders(), ints(&[2, 2, 2]));
    }

    #[test]
    fn kernels() {
        assert!(kernel_basis(&IntMatrix::identity(3)).is_empty());
        let k = kernel_basis(&IntMatrix::from_rows(&[vec![1, 1]]));
        assert_eq!(k, vec![ints(&[1, -1])]);
        let a = IntMatrix::from_rows(&[
            vec![1, 0, 0, 1, 1],
            vec![0, 1, 0, 1, 0],
            vec![0, 0, 1, 0, 1],
        ]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        // (1,1,0,-1,0) and (1,0,1,0,-1) lie in the lattice spanned by k
        for target in [ints(&[1, 1, 0, -1, 0]), ints(&[1, 0, 1, 0, -1])] {
            let mut rows = k.clone();
            rows.push(target);
            assert_eq!(rank_of(&rows), 2);
        }
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive_vector(&ints(&[-4, 0, -4, 0, -4])).unwrap(), ints(&[-1, 0, -1, 0, -1]));
        assert_eq!(primitive_vector(&ints(&[0, 6, -9])).unwrap(), ints(&[0, 2, -3]));
        assert_eq!(primitive_vector(&ints(&[0, 0])), Err(MathError::ZeroVector));
    }

    #[test]
    fn solve_examples() {
        let m = IntMatrix::from_rows(&[vec![1, 1]]);
        match solve_linear(&m, &[rat(2, 1)]) {
            LinearSolution::Solved { particular, kernel } => {
                assert_eq!(particular, vec![rat(2, 1), rat(0, 1)]);
                assert_eq!(kernel, vec![ints(&[1, -1])]);
            }
            LinearSolution::Inconsistent => panic!(),
        }
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(solve_linear(&m, &[rat(1, 1), rat(3, 1)]), LinearSolution::Inconsistent);
    }

    #[test]
    fn rank_one_case_a_big_cone_solve() {
        // <u, v_i> = -2 on the five big-cone rays is solvable iff the ray sum (0,0,0,0,4+x) is nonzero
        for x in -8i64..=0 {
            let rays = IntMatrix::from_rows(&[
                vec![-2, -2, -2, -2, x],
                vec![2, 0, 0, 0, 1],
                vec![0, 2, 0, 0, 1],
                vec![0, 0, 2, 0, 1],
                vec![0, 0, 0, 2, 1],
            ]);
            let sol = solve_linear(&rays, &vec![rat(-2, 1); 5]);
            assert_eq!(sol == LinearSolution::Inconsistent, x == -4, "x = {x}");
        }
    }

    #[test]
    fn hnf_is_canonical() {
        let a = vec![ints(&[2, 4]), ints(&[1, 3])];
        let b = vec![ints(&[1, 3]), ints(&[3, 7])];
        assert_eq!(hermite_normal_form(&a), hermite_normal_form(&b));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..7, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
                IntMatrix::from_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn snf_reconstructs(m in small_matrix()) {
            let s = smith_normal_form(&m);
            diag_check(&m, &s);
        }

        #[test]
        fn kernel_is_saturated(m in small_matrix()) {
            let k = kernel_basis(&m);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
                prop_assert_eq!(primitive_vector(v).unwrap(), v.clone());
            }
            prop_assert_eq!(k.len(), m.cols() - m.rank());
            if !k.is_empty() {
                let km = IntMatrix::from_int_rows(m.cols(), k).unwrap();
                let s = smith_normal_form(&km);
                prop_assert!(s.d.iter().all(|d| d == &Int::one()));
            }
        }

        #[test]
        fn primitive_idempotent(v in proptest::collection::vec(-30i64..30, 1..6)) {
            let v = ints(&v);
            if let Ok(p) = primitive_vector(&v) {
                prop_assert_eq!(primitive_vector(&p).unwrap(), p.clone());
                prop_assert_eq!(gcd_vec(&p), Int::one());
            }
        }

        #[test]
        fn bareiss_rank_matches_rref(m in small_matrix()) {
            let rows: Vec<Vec<Rat>> = m.to_rows().iter().map(|r| to_rats(r)).collect();
            prop_assert_eq!(m.rank(), rank_of_rat(&rows));
        }
    }
}
