//! The bracketed-section input format.
//!
//! ```text
//! [arrangement]
//! 1 0 0 1 1
//! 0 1 0 1 0
//! 0 0 1 0 1
//! [exponents]
//! n = 2 1 1 1 1
//! l = 1 1 | 2 | 2 | 2 | 2
//! m = 1
//! [P]
//! -2 -3 1 1 1 1 1
//! [grading]
//! -1 1 0 0 0 0 1
//! 1 1 1 1 1 1 1
//! [fan]
//! 1 2 3 4 5
//! 0 3 5 6
//! ```
//!
//! `[P]` holds the d-rows only; the upper part of P is fixed by the exponents. `[grading]`
//! optionally fixes the free coordinates of Cl(X). Fan cones list 0-based variable indices
//! in the order T₀₁,…,T₀n₀,T₁₁,…,S₁,…,S_m. Instead of cones, `[fan]` may hold
//! `ample = [1, 3]` (a class in the free coordinates) or `ample = anticanonical`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::coxdata::{CoxRing, ExponentData};
use crate::exactmath::{fmt_rat, Int, IntMatrix, Rat};
use crate::variety::{anticanonical_class, Variety};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanSpec {
    Cones(Vec<Vec<usize>>),
    Ample(Vec<Rat>),
    Anticanonical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSpec {
    pub a: Vec<Vec<Int>>,
    pub n: Vec<usize>,
    pub l: Vec<Vec<u32>>,
    pub m: usize,
    pub d: Vec<Vec<Int>>,
    pub grading: Option<Vec<Vec<Int>>>,
    pub fan: Option<FanSpec>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Arrangement,
    Exponents,
    P,
    Grading,
    Fan,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

fn int_row(line: usize, text: &str) -> Result<Vec<Int>, ParseError> {
    text.split_whitespace()
        .map(|t| t.parse::<BigInt>().or_else(|_| err(line, format!("not an integer: {t:?}"))))
        .collect()
}

fn usize_row(line: usize, text: &str) -> Result<Vec<usize>, ParseError> {
    text.split_whitespace()
        .map(|t| t.parse::<usize>().or_else(|_| err(line, format!("not a nonnegative integer: {t:?}"))))
        .collect()
}

fn parse_rat(line: usize, t: &str) -> Result<Rat, ParseError> {
    let t = t.trim();
    let bad = || ParseError { line, msg: format!("not a rational number: {t:?}") };
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

fn key_value(line: usize, text: &str) -> Result<(String, String), ParseError> {
    match text.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => err(line, format!("expected key = value, got {text:?}")),
    }
}

pub fn parse_input(text: &str) -> Result<InputSpec, ParseError> {
    let mut section = Section::None;
    let mut seen: Vec<&str> = Vec::new();
    let mut a: Vec<Vec<Int>> = Vec::new();
    let mut a_line = 0;
    let mut n: Option<(usize, Vec<usize>)> = None;
    let mut l: Option<(usize, Vec<Vec<u32>>)> = None;
    let mut m: Option<usize> = None;
    let mut d: Vec<(usize, Vec<Int>)> = Vec::new();
    let mut grading: Vec<(usize, Vec<Int>)> = Vec::new();
    let mut has_grading = false;
    let mut cones: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut ample: Option<FanSpec> = None;
    let mut has_fan = false;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            section = match name {
                "arrangement" => Section::Arrangement,
                "exponents" => Section::Exponents,
                "P" => Section::P,
                "grading" => {
                    has_grading = true;
                    Section::Grading
                }
                "fan" => {
                    has_fan = true;
                    Section::Fan
                }
                _ => return err(line, format!("unknown section [{name}]")),
            };
            if seen.contains(&name) {
                return err(line, format!("section [{name}] appears twice"));
            }
            seen.push(match section {
                Section::Arrangement => "arrangement",
                Section::Exponents => "exponents",
                Section::P => "P",
                Section::Grading => "grading",
                _ => "fan",
            });
            continue;
        }
        match section {
            Section::None => return err(line, "content before the first section"),
            Section::Arrangement => {
                let row = int_row(line, body)?;
                if let Some(first) = a.first() {
                    if row.len() != first.len() {
                        return err(line, format!("row has {} entries, expected {}", row.len(), first.len()));
                    }
                } else {
                    a_line = line;
                }
                a.push(row);
            }
            Section::Exponents => {
                let (k, v) = key_value(line, body)?;
                match k.as_str() {
                    "n" => n = Some((line, usize_row(line, &v)?)),
                    "l" => {
                        let blocks = v
                            .split('|')
                            .map(|b| {
                                b.split_whitespace()
                                    .map(|t| match t.parse::<u32>() {
                                        Ok(x) if x > 0 => Ok(x),
                                        _ => err(line, format!("exponent must be a positive integer: {t:?}")),
                                    })
                                    .collect::<Result<Vec<u32>, _>>()
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        l = Some((line, blocks));
                    }
                    "m" => {
                        m = Some(v.parse().or_else(|_| err(line, format!("m must be a nonnegative integer: {v:?}")))?)
                    }
                    _ => return err(line, format!("unknown exponent key {k:?}")),
                }
            }
            Section::P => d.push((line, int_row(line, body)?)),
            Section::Grading => grading.push((line, int_row(line, body)?)),
            Section::Fan => {
                if body.starts_with("ample") {
                    let (_, v) = key_value(line, body)?;
                    if v == "anticanonical" {
                        ample = Some(FanSpec::Anticanonical);
                    } else {
                        let inner = v
                            .strip_prefix('[')
                            .and_then(|s| s.strip_suffix(']'))
                            .ok_or_else(|| ParseError { line, msg: "expected ample = [a, b, ...]".into() })?;
                        let u = inner.split(',').map(|t| parse_rat(line, t)).collect::<Result<Vec<_>, _>>()?;
                        ample = Some(FanSpec::Ample(u));
                    }
                } else {
                    cones.push((line, usize_row(line, body)?));
                }
            }
        }
    }
    if a.is_empty() {
        return err(last_line, "missing [arrangement]");
    }
    let (n_line, n) = n.ok_or(ParseError { line: last_line, msg: "missing n in [exponents]".into() })?;
    if n.len() != a[0].len() {
        return err(n_line, format!("n has {} entries but A has {} columns", n.len(), a[0].len()));
    }
    let _ = a_line;
    let l = match l {
        Some((line, l)) => {
            if l.len() != n.len() {
                return err(line, format!("l has {} blocks, expected {}", l.len(), n.len()));
            }
            for (i, (li, &ni)) in l.iter().zip(&n).enumerate() {
                if li.len() != ni {
                    return err(line, format!("block {i} of l has {} entries, n says {ni}", li.len()));
                }
            }
            l
        }
        None => return err(n_line, "missing l in [exponents]"),
    };
    let m = m.unwrap_or(0);
    let nvars: usize = n.iter().sum::<usize>() + m;
    for (line, row) in &d {
        if row.len() != nvars {
            return err(*line, format!("d-row has {} entries, expected n+m = {nvars}", row.len()));
        }
    }
    for (line, row) in &grading {
        if row.len() != nvars {
            return err(*line, format!("grading row has {} entries, expected n+m = {nvars}", row.len()));
        }
    }
    for (line, c) in &cones {
        if let Some(&j) = c.iter().find(|&&j| j >= nvars) {
            return err(*line, format!("index {j} out of range (n+m = {nvars})"));
        }
    }
    if ample.is_some() && !cones.is_empty() {
        return err(cones[0].0, "[fan] mixes cones and an ample class");
    }
    let fan = match ample {
        Some(f) => Some(f),
        None if has_fan => Some(FanSpec::Cones(cones.into_iter().map(|(_, c)| c).collect())),
        None => None,
    };
    Ok(InputSpec {
        a,
        n,
        l,
        m,
        d: d.into_iter().map(|(_, r)| r).collect(),
        grading: has_grading.then(|| grading.into_iter().map(|(_, r)| r).collect()),
        fan,
    })
}

fn write_rows(out: &mut String, rows: &[Vec<Int>]) {
    for r in rows {
        let s: Vec<String> = r.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", s.join(" "));
    }
}

pub fn serialize(spec: &InputSpec) -> String {
    let mut out = String::from("[arrangement]\n");
    write_rows(&mut out, &spec.a);
    out.push_str("\n[exponents]\n");
    let n: Vec<String> = spec.n.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "n = {}", n.join(" "));
    let l: Vec<String> = spec
        .l
        .iter()
        .map(|b| b.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    let _ = writeln!(out, "l = {}", l.join(" | "));
    let _ = writeln!(out, "m = {}", spec.m);
    out.push_str("\n[P]\n");
    write_rows(&mut out, &spec.d);
    if let Some(g) = &spec.grading {
        out.push_str("\n[grading]\n");
        write_rows(&mut out, g);
    }
    match &spec.fan {
        Some(FanSpec::Cones(cs)) => {
            out.push_str("\n[fan]\n");
            for c in cs {
                let s: Vec<String> = c.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{}", s.join(" "));
            }
        }
        Some(FanSpec::Ample(u)) => {
            let s: Vec<String> = u.iter().map(fmt_rat).collect();
            let _ = writeln!(out, "\n[fan]\nample = [{}]", s.join(", "));
        }
        Some(FanSpec::Anticanonical) => out.push_str("\n[fan]\nample = anticanonical\n"),
        None => {}
    }
    out
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("arrangement: {0}")]
    Arrangement(#[from] crate::arrangement::ArrangementError),
    #[error("ring: {0}")]
    Ring(#[from] crate::coxdata::RingError),
    #[error("matrix: {0}")]
    Math(#[from] crate::exactmath::MathError),
    #[error("variety: {0}")]
    Variety(#[from] crate::variety::VarietyError),
    #[error("the input has no [fan] section")]
    NoFan,
}

impl InputSpec {
    pub fn ring(&self) -> Result<CoxRing, BuildError> {
        let cols = self.a[0].len();
        let arr = Arrangement::new(IntMatrix::from_int_rows(cols, self.a.clone())?)?;
        let exps = ExponentData::new(self.l.clone(), self.m)?;
        let nv = exps.nvars();
        let d = IntMatrix::from_int_rows(nv, self.d.clone())?;
        let ring = CoxRing::build(arr, exps, (!self.d.is_empty()).then_some(&d))?;
        match &self.grading {
            Some(g) => Ok(ring.with_grading(&IntMatrix::from_int_rows(nv, g.clone())?)?),
            None => Ok(ring),
        }
    }

    pub fn variety(&self) -> Result<Variety, BuildError> {
        let ring = self.ring()?;
        match &self.fan {
            None => Err(BuildError::NoFan),
            Some(FanSpec::Cones(c)) => Ok(Variety::new(ring, c.clone())?),
            Some(FanSpec::Ample(u)) => Ok(Variety::from_ample(ring, u)?),
            Some(FanSpec::Anticanonical) => {
                let u = crate::exactmath::to_rats(&anticanonical_class(&ring).free);
                Ok(Variety::from_ample(ring, &u)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ints;

    pub const RUN: &str = include_str!("../fixtures/run.arr");

    #[test]
    fn parses_running_example() {
        let s = parse_input(RUN).unwrap();
        assert_eq!(s.n, vec![2, 1, 1, 1, 1]);
        assert_eq!(s.l, vec![vec![1, 1], vec![2], vec![2], vec![2], vec![2]]);
        assert_eq!(s.m, 1);
        assert_eq!(s.d, vec![ints(&[-2, -3, 1, 1, 1, 1, 1])]);
        match &s.fan {
            Some(FanSpec::Cones(c)) => assert_eq!(c.len(), 9),
            other => panic!("unexpected fan {other:?}"),
        }
        let x = s.variety().unwrap();
        assert_eq!(x.dim(), 3);
    }

    #[test]
    fn round_trip() {
        let s = parse_input(RUN).unwrap();
        let once = serialize(&s);
        assert_eq!(parse_input(&once).unwrap(), s);
        assert_eq!(serialize(&parse_input(&once).unwrap()), once);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = RUN.replace("l = 1 1 | 2 | 2 | 2 | 2", "l = 1 1 | 2 | 2 | 2");
        let e = parse_input(&bad).unwrap_err();
        let want = RUN.lines().position(|l| l.starts_with("l =")).unwrap() + 1;
        assert_eq!(e.line, want);
        let e = parse_input("[arrangement]\n1 x\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_input("[nope]\n").unwrap_err();
        assert!(e.msg.contains("unknown section"));
    }

    #[test]
    fn ample_variant() {
        let text = RUN.split("[fan]").next().unwrap().to_string() + "[fan]\nample = [1, 3]\n";
        let s = parse_input(&text).unwrap();
        assert_eq!(s.fan, Some(FanSpec::Ample(vec![Rat::from_integer(1.into()), Rat::from_integer(3.into())])));
        let x = s.variety().unwrap();
        assert_eq!(x.cones.len(), 9);
    }
}
