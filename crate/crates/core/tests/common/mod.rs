//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use arrvar::arrangement::Arrangement;
use arrvar::classifier::RelationType;
use arrvar::coxdata::{CoxRing, ExponentData};
use arrvar::exactmath::{dot, rational_kernel, Int, IntMatrix, Rat};
use arrvar::io::{parse_input, InputSpec};
use arrvar::variety::Variety;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

/// PRIME − 1 = 4q with q prime: −1 is a square and odd roots are unique.
pub const PRIME: u64 = 1_000_589;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// All `.arr` fixtures, sorted by name.
pub fn fixtures() -> Vec<(String, InputSpec)> {
    let mut out: Vec<(String, InputSpec)> = std::fs::read_dir(fixture_dir())
        .expect("fixture directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "arr").then_some(p)
        })
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let spec = parse_input(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, spec)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Blocks containing a variable outside γ₀.
fn dead_blocks(ring: &CoxRing, gamma0: u32) -> Vec<usize> {
    let e = &ring.exponents;
    (0..e.blocks()).filter(|&i| e.block_range(i).any(|v| gamma0 >> v & 1 == 0)).collect()
}

/// Basis of {x : ⟨aᵢ, x⟩ = 0 for i ∈ dead}.
fn dead_kernel(ring: &CoxRing, dead: &[usize]) -> Vec<Vec<Int>> {
    let a = ring.arrangement.matrix();
    if dead.is_empty() {
        return IntMatrix::identity(a.rows()).to_rows();
    }
    let rows: Vec<Vec<Int>> = dead.iter().map(|&i| a.col(i)).collect();
    rational_kernel(&IntMatrix::from_int_rows(a.rows(), rows).unwrap())
}

/// γ₀ is an X̄-face iff some x has Aᵀx vanishing exactly on the dead blocks.
pub fn xbar_face_by_realization(ring: &CoxRing, gamma0: u32) -> bool {
    let dead = dead_blocks(ring, gamma0);
    let w = dead_kernel(ring, &dead);
    let a = ring.arrangement.matrix();
    (0..a.cols()).filter(|i| !dead.contains(i)).all(|j| {
        let aj = a.col(j);
        w.iter().any(|k| !dot(&aj, k).is_zero())
    })
}

fn modp(x: &Int) -> u64 {
    let p = Int::from(PRIME);
    ((x % &p + &p) % &p).to_u64().unwrap()
}

fn mul(a: u64, b: u64) -> u64 {
    a * b % PRIME
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, PRIME - 2)
}

/// Tonelli–Shanks.
fn sqrt(c: u64) -> Option<u64> {
    if c == 0 {
        return Some(0);
    }
    if pow(c, (PRIME - 1) / 2) != 1 {
        return None;
    }
    let (mut q, mut s) = (PRIME - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..).find(|&z| pow(z, (PRIME - 1) / 2) == PRIME - 1).unwrap();
    let (mut m, mut c2, mut t, mut r) = (s, pow(z, q), pow(c, q), pow(c, q.div_ceil(2)));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow(c2, 1 << (m - i - 1));
        m = i;
        c2 = mul(b, b);
        t = mul(t, c2);
        r = mul(r, b);
    }
    Some(r)
}

/// Some t with tˡ = c, if one exists.
fn root(c: u64, l: u32) -> Option<u64> {
    let mut t = c;
    let mut l = l as u64;
    while l.is_multiple_of(2) {
        t = sqrt(t)?;
        l /= 2;
    }
    // odd l is prime to PRIME − 1
    assert!(l < (PRIME - 1) / 4, "exponent too large for the sampling prime");
    let k = (0..l).map(|e| e * (PRIME - 1) + 1).find(|k| k % l == 0).unwrap();
    Some(pow(t, k / l))
}

/// A random F_p-point of X̄ with support exactly γ₀, or None after failed attempts.
pub fn sample_stratum_point(ring: &CoxRing, gamma0: u32, rng: &mut impl Rng) -> Option<Vec<u64>> {
    let e = &ring.exponents;
    let dead = dead_blocks(ring, gamma0);
    let w = dead_kernel(ring, &dead);
    let a = ring.arrangement.matrix();
    'attempt: for _ in 0..500 {
        let mut x = vec![0u64; a.rows()];
        for k in &w {
            let c = rng.gen_range(1..PRIME);
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi = (*xi + mul(c, modp(ki))) % PRIME;
            }
        }
        let mut z = vec![0u64; e.nvars()];
        for (v, zv) in z.iter_mut().enumerate() {
            if gamma0 >> v & 1 == 1 {
                *zv = rng.gen_range(1..PRIME);
            }
        }
        for i in 0..e.blocks() {
            if dead.contains(&i) {
                continue;
            }
            let y = (0..a.rows()).fold(0, |acc, r| (acc + mul(modp(a.get(r, i)), x[r])) % PRIME);
            if y == 0 {
                continue 'attempt;
            }
            let vars: Vec<usize> = e.block_range(i).collect();
            let (last, rest) = vars.split_last().unwrap();
            let partial = rest.iter().fold(1, |acc, &v| mul(acc, pow(z[v], e.exponent(v).unwrap() as u64)));
            match root(mul(y, inv(partial)), e.exponent(*last).unwrap()) {
                Some(t) => z[*last] = t,
                None => continue 'attempt,
            }
        }
        return Some(z);
    }
    None
}

fn monomial(ring: &CoxRing, i: usize, z: &[u64], skip: Option<usize>) -> u64 {
    let e = &ring.exponents;
    e.block_range(i).fold(1, |acc, v| {
        let l = e.exponent(v).unwrap() as u64;
        if Some(v) == skip {
            mul(acc, mul(l % PRIME, pow(z[v], l - 1)))
        } else {
            mul(acc, pow(z[v], l))
        }
    })
}

pub fn relations_vanish(ring: &CoxRing, z: &[u64]) -> bool {
    ring.relations.coeffs.iter().all(|row| {
        row.iter().enumerate().fold(0, |acc, (i, c)| (acc + mul(modp(c), monomial(ring, i, z, None))) % PRIME) == 0
    })
}

/// Rank over F_p of the Jacobian of the relations at z.
pub fn jacobian_rank(ring: &CoxRing, z: &[u64]) -> usize {
    let e = &ring.exponents;
    let mut m: Vec<Vec<u64>> = ring
        .relations
        .coeffs
        .iter()
        .map(|row| {
            (0..e.nvars())
                .map(|v| match e.block_of(v) {
                    Some(i) => mul(modp(&row[i]), monomial(ring, i, z, Some(v))),
                    None => 0,
                })
                .collect()
        })
        .collect();
    rank_mod_p(&mut m)
}

fn rank_mod_p(m: &mut [Vec<u64>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let iv = inv(m[rank][c]);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = mul(m[r][c], iv);
                for k in 0..cols {
                    m[r][k] = (m[r][k] + PRIME - mul(f, m[rank][k])) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A random honestly special instance with Picard number at most two, its ample class and X.
pub struct Instance {
    pub ring: CoxRing,
    pub ample: Vec<Rat>,
    pub variety: Variety,
}

fn random_arrangement(rng: &mut impl Rng) -> Arrangement {
    let rtype = if rng.gen_bool(0.5) { RelationType::I } else { RelationType::II };
    let mut labels = [0usize, 1, 2, 3, 4];
    labels.shuffle(rng);
    Arrangement::new(rtype.matrix().select_cols(&labels)).unwrap()
}

/// Tries until an honest instance with a valid GIT chamber turns up.
pub fn random_honest_instance(rng: &mut impl Rng) -> Instance {
    loop {
        if let Some(i) = try_instance(rng) {
            return i;
        }
    }
}

fn try_instance(rng: &mut impl Rng) -> Option<Instance> {
    let arr = random_arrangement(rng);
    let s = rng.gen_range(1..=2usize);
    // ρ = n + m − 4 − s ≤ 2
    let total = rng.gen_range(5 + s..=6 + s);
    let m = rng.gen_range(0..=total - 5);
    let n_extra = total - m - 5;
    let mut n = [1usize; 5];
    for _ in 0..n_extra {
        n[rng.gen_range(0..5)] += 1;
    }
    let l: Vec<Vec<u32>> = n
        .iter()
        .map(|&ni| (0..ni).map(|_| if ni == 1 { rng.gen_range(2..=3) } else { rng.gen_range(1..=3) }).collect())
        .collect();
    let exps = ExponentData::new(l, m).ok()?;
    let nv = exps.nvars();
    let d: Vec<Vec<i64>> = (0..s).map(|_| (0..nv).map(|_| rng.gen_range(-4..=4)).collect()).collect();
    let ring = CoxRing::build(arr, exps, Some(&IntMatrix::from_rows(&d))).ok()?;
    if !ring.honesty().is_honest() || ring.picard_rank() == 0 || ring.picard_rank() > 2 {
        return None;
    }
    ring.check_positive_grading().ok()?;
    // a random positive combination of the degrees, pushed into the moving cone by luck
    let mut u = vec![Rat::zero(); ring.picard_rank()];
    for g in ring.degrees() {
        let c = Rat::from_integer(Int::from(rng.gen_range(1..=5)));
        for (a, b) in u.iter_mut().zip(&g.free) {
            *a += &c * Rat::from_integer(b.clone());
        }
    }
    let variety = Variety::from_ample(ring.clone(), &u).ok()?;
    Some(Instance { ring, ample: u, variety })
}
