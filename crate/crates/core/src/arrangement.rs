//! Hyperplane arrangements given by the columns of A: rank oracle, flats, decomposition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coxdata::ExponentData;
use crate::exactmath::{rank_of, Int, IntMatrix};

/// Subsets of columns as bitmasks.
pub type Mask = u32;

pub const MAX_COLUMNS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("A must have full row rank (rank {rank}, {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("columns {0} and {1} of A are linearly dependent")]
    DependentColumns(usize, usize),
    #[error("column {0} of A is zero")]
    ZeroColumn(usize),
    #[error("at most {MAX_COLUMNS} columns supported, got {0}")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionType {
    General,
    Special,
}

#[derive(Clone, Debug)]
pub struct Flat {
    pub mask: Mask,
    pub rank: usize,
}

impl Flat {
    pub fn indices(&self) -> Vec<usize> {
        mask_indices(self.mask)
    }
}

pub fn mask_indices(m: Mask) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

pub fn mask_of(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

/// The arrangement matrix A with its rank table (one entry per column subset).
#[derive(Clone, Debug)]
pub struct Arrangement {
    a: IntMatrix,
    ranks: Vec<u8>,
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

impl Arrangement {
    pub fn new(a: IntMatrix) -> Result<Self, ArrangementError> {
        let ncols = a.cols();
        if ncols > MAX_COLUMNS {
            return Err(ArrangementError::TooLarge(ncols));
        }
        let cols = a.columns();
        let mut ranks = vec![0u8; 1 << ncols];
        for m in 1..(1u32 << ncols) {
            let rows: Vec<Vec<Int>> = mask_indices(m).iter().map(|&j| cols[j].clone()).collect();
            ranks[m as usize] = rank_of(&rows) as u8;
        }
        let full = ranks[(1usize << ncols) - 1] as usize;
        if full != a.rows() {
            return Err(ArrangementError::RankDeficient { rank: full, rows: a.rows() });
        }
        for i in 0..ncols {
            if ranks[1 << i] == 0 {
                return Err(ArrangementError::ZeroColumn(i));
            }
            for j in i + 1..ncols {
                if ranks[(1 << i) | (1 << j)] < 2 {
                    return Err(ArrangementError::DependentColumns(i, j));
                }
            }
        }
        Ok(Arrangement { a, ranks })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    /// Number of columns, r + 1.
    pub fn ncols(&self) -> usize {
        self.a.cols()
    }

    pub fn r(&self) -> usize {
        self.a.cols() - 1
    }

    /// Complexity c (A has c + 1 rows).
    pub fn c(&self) -> usize {
        self.a.rows() - 1
    }

    pub fn full_mask(&self) -> Mask {
        ((1u64 << self.ncols()) - 1) as Mask
    }

    pub fn rank(&self, m: Mask) -> usize {
        self.ranks[m as usize] as usize
    }

    pub fn closure(&self, m: Mask) -> Mask {
        let r = self.rank(m);
        (0..self.ncols())
            .filter(|&j| self.rank(m | 1 << j) == r)
            .fold(m, |acc, j| acc | 1 << j)
    }

    pub fn is_flat(&self, m: Mask) -> bool {
        self.closure(m) == m
    }

    pub fn flats(&self) -> Vec<Flat> {
        let set: BTreeSet<Mask> = (0..=self.full_mask()).map(|m| self.closure(m)).collect();
        let mut flats: Vec<Flat> =
            set.into_iter().map(|mask| Flat { mask, rank: self.rank(mask) }).collect();
        flats.sort_by_key(|f| (f.rank, f.mask));
        flats
    }

    /// Maximal chains F₁ ⊂ … ⊂ F_c of proper nonzero flats, rank(F_k) = k.
    pub fn maximal_chains(&self) -> Vec<Vec<Mask>> {
        let flats = self.flats();
        let c = self.c();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Mask>> =
            flats.iter().filter(|f| f.rank == 1).map(|f| vec![f.mask]).collect();
        stack.reverse();
        if c == 0 {
            return out;
        }
        while let Some(chain) = stack.pop() {
            if chain.len() == c {
                out.push(chain);
                continue;
            }
            let last = *chain.last().unwrap();
            let k = chain.len() + 1;
            for f in flats.iter().rev().filter(|f| f.rank == k && f.mask & last == last) {
                let mut next = chain.clone();
                next.push(f.mask);
                stack.push(next);
            }
        }
        out
    }

    pub fn position_type(&self) -> PositionType {
        let c1 = self.c() + 1;
        let general = (1..=self.full_mask())
            .filter(|m| (m.count_ones() as usize) <= c1)
            .all(|m| self.rank(m) == m.count_ones() as usize);
        if general {
            PositionType::General
        } else {
            PositionType::Special
        }
    }

    /// Finest decomposition into blocks with independent spans (connected components).
    pub fn decompose(&self) -> Vec<Vec<usize>> {
        let n = self.ncols();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for m in 1..=self.full_mask() {
            let size = m.count_ones() as usize;
            if self.rank(m) + 1 != size {
                continue;
            }
            // circuit: dependent, every one-element deletion independent
            let is_circuit = mask_indices(m).iter().all(|&j| self.rank(m & !(1 << j)) == size - 1);
            if is_circuit {
                let idx = mask_indices(m);
                for w in idx.windows(2) {
                    let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[a] = b;
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            match root_of[r] {
                Some(b) => blocks[b].push(i),
                None => {
                    root_of[r] = Some(blocks.len());
                    blocks.push(vec![i]);
                }
            }
        }
        blocks
    }

    pub fn is_indecomposable(&self, exps: &ExponentData) -> bool {
        self.decompose().len() == 1
            && exps.l.iter().zip(&exps.n).all(|(li, &ni)| li.iter().all(|&l| l as usize * ni > 1))
    }
}
