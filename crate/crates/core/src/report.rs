//! Command dispatch and report rendering for the command-line frontend.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::anticanon::{anticanonical_complex, gorenstein_check, singularity_type, RaySource};
use crate::arrangement::PositionType;
use crate::classifier::{
    dedupe, product_family, run_search, CaseId, Candidate, ClassifyError, SearchConfig,
};
use crate::coxdata::{CoxRing, Primality};
use crate::exactmath::{fmt_rat, GroupElement, Int, Rat};
use crate::io::{BuildError, InputSpec};
use crate::par::Execution;
use crate::tropical::{trop_quasifan, TropicalData};
use crate::variety::{mask_vars, Variety};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("{0}")]
    Analysis(String),
    #[error("command {0} needs an input file")]
    NeedsInput(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Ring,
    Variety,
    Trop { coarsen: bool },
    AComplex,
    SingType,
    Fano,
    Classify { picard: Option<usize>, isotropy: Option<u32>, case: Option<CaseId> },
    Product { k1: usize, k2: usize, a: Vec<i64> },
    Decompose,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ring => "ring",
            Command::Variety => "variety",
            Command::Trop { .. } => "trop",
            Command::AComplex => "acomplex",
            Command::SingType => "singtype",
            Command::Fano => "fano",
            Command::Classify { .. } => "classify",
            Command::Product { .. } => "product",
            Command::Decompose => "decompose",
        }
    }

    pub fn needs_input(&self) -> bool {
        !matches!(self, Command::Classify { .. } | Command::Product { .. })
    }
}

/// A report: the variable mapping (when there is one) and an ordered body.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub variables: Vec<String>,
    pub body: Map<String, Value>,
}

impl Report {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.body.get(key)
    }

    pub fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), json!(self.command));
        if !self.variables.is_empty() {
            top.insert("variables".into(), json!(self.variables));
        }
        top.insert("report".into(), Value::Object(self.body.clone()));
        serde_json::to_string_pretty(&Value::Object(top)).expect("report values serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.variables.is_empty() {
            let map: Vec<String> = self.variables.iter().enumerate().map(|(j, l)| format!("{j}={l}")).collect();
            let _ = writeln!(out, "# variables: {}", map.join(" "));
        }
        for (k, v) in &self.body {
            write_text(&mut out, k, v, 0);
        }
        out
    }
}

fn is_scalar_list(v: &[Value]) -> bool {
    v.iter().all(|x| !x.is_object() && !(x.is_array() && x.as_array().is_some_and(|a| !is_scalar_list(a))))
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn write_text(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in m {
                write_text(out, k, x, depth + 1);
            }
        }
        Value::Array(a) if !is_scalar_list(a) || a.len() > 8 && a.iter().all(Value::is_array) => {
            let _ = writeln!(out, "{pad}{key}: ({})", a.len());
            for (i, x) in a.iter().enumerate() {
                write_text(out, &i.to_string(), x, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", inline(other));
        }
    }
}

pub fn fmt_group(g: &GroupElement, torsion: &[Int]) -> String {
    let free: Vec<String> = g.free.iter().map(ToString::to_string).collect();
    let mut s = format!("({})", free.join(","));
    for (a, d) in g.torsion.iter().zip(torsion) {
        let _ = write!(s, " [{a} mod {d}]");
    }
    s
}

fn rats(v: &[Rat]) -> Value {
    json!(v.iter().map(fmt_rat).collect::<Vec<_>>())
}

fn ints(v: &[Int]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn int_rows(rows: &[Vec<Int>]) -> Value {
    Value::Array(rows.iter().map(|r| ints(r)).collect())
}

fn class_group(ring: &CoxRing) -> String {
    let mut parts = Vec::new();
    match ring.picard_rank() {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(ring.torsion().iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn cone_labels(ring: &CoxRing, cols: &[usize]) -> String {
    let labels = ring.exponents.labels();
    format!("{{{}}}", cols.iter().map(|&j| labels[j].clone()).collect::<Vec<_>>().join(","))
}

fn ring_body(ring: &CoxRing) -> Map<String, Value> {
    let torsion = ring.torsion();
    let labels = ring.exponents.labels();
    let mut m = Map::new();
    m.insert("class_group".into(), json!(class_group(ring)));
    m.insert("ring_dimension".into(), json!(ring.dim()));
    m.insert("variety_dimension".into(), json!(ring.s + ring.c()));
    m.insert("complexity".into(), json!(ring.c()));
    m.insert("P".into(), int_rows(&ring.p.to_rows()));
    let degrees: Map<String, Value> =
        ring.degrees().iter().zip(&labels).map(|(g, l)| (l.clone(), json!(fmt_group(g, &torsion)))).collect();
    m.insert("degrees".into(), Value::Object(degrees));
    let rels: Vec<Value> = (0..ring.relations.len())
        .map(|k| {
            let terms: Vec<String> = ring
                .relations
                .support(k)
                .into_iter()
                .map(|i| {
                    let mono: Vec<String> = ring
                        .exponents
                        .block_range(i)
                        .map(|v| match ring.exponents.exponent(v) {
                            Some(1) => labels[v].clone(),
                            Some(e) => format!("{}^{e}", labels[v]),
                            None => unreachable!("block variables carry exponents"),
                        })
                        .collect();
                    format!("{}*{}", ring.relations.coeffs[k][i], mono.join("*"))
                })
                .collect();
            json!(terms.join(" + "))
        })
        .collect();
    m.insert("relations".into(), Value::Array(rels));
    match ring.relation_degrees() {
        Ok(d) => {
            m.insert("relation_degrees".into(), json!(d.iter().map(|g| fmt_group(g, &torsion)).collect::<Vec<_>>()));
        }
        Err(e) => {
            m.insert("relation_degrees".into(), json!(e.to_string()));
        }
    }
    m.insert("anticanonical_class".into(), json!(fmt_group(&crate::variety::anticanonical_class(ring), &torsion)));
    m.insert("honesty".into(), json!(ring.honesty().to_string()));
    let kp: Map<String, Value> = ring
        .k_prime_variables()
        .iter()
        .zip(&labels)
        .map(|(p, l)| {
            let s = match p {
                Primality::Prime => "prime",
                Primality::NotPrime => "not prime",
                Primality::Undecided => "undecided",
            };
            (l.clone(), json!(s))
        })
        .collect();
    m.insert("k_prime".into(), Value::Object(kp));
    m
}

fn variety_body(x: &Variety) -> Result<Map<String, Value>, CommandError> {
    let ring = &x.ring;
    let mut m = Map::new();
    m.insert("dimension".into(), json!(x.dim()));
    m.insert("class_group".into(), json!(class_group(ring)));
    m.insert(
        "maximal_cones".into(),
        json!(x.cones.iter().map(|c| cone_labels(ring, c)).collect::<Vec<_>>()),
    );
    let xf: Vec<String> = x
        .x_faces()
        .iter()
        .map(|f| cone_labels(ring, &mask_vars(f.gamma0, x.nvars())))
        .collect();
    m.insert("x_faces".into(), json!(xf));
    m.insert("smoothness".into(), json!(x.smoothness_report().to_string()));
    let cones = x.divisor_class_cones();
    m.insert("effective_cone".into(), int_rows(cones.eff.rays()));
    m.insert("moving_cone".into(), int_rows(cones.mov.rays()));
    m.insert("semiample_cone".into(), int_rows(cones.sample.rays()));
    m.insert("projective".into(), json!(cones.projective));
    if let Some((minus, plus)) = &cones.tau {
        m.insert("tau_minus".into(), int_rows(minus.rays()));
        m.insert("tau_plus".into(), int_rows(plus.rays()));
    }
    m.insert("anticanonical_class".into(), rats(&x.anticanonical_free()));
    let fano = x.is_fano_with(&cones).map_err(|e| CommandError::Analysis(e.to_string()))?;
    m.insert("fano".into(), json!(fano));
    Ok(m)
}

fn trop_body(x: &Variety, trop: &TropicalData) -> Result<Map<String, Value>, CommandError> {
    let ring = &x.ring;
    let mut m = Map::new();
    m.insert("coarsened".into(), json!(trop.coarsened));
    let rays: Vec<Value> = trop
        .rays
        .iter()
        .zip(&trop.ray_flats)
        .map(|(r, (f, mask))| {
            let flat: Vec<String> = crate::arrangement::mask_indices(*mask).iter().map(ToString::to_string).collect();
            json!({ "ray": ints(r), "factor": f, "flat": flat.join(",") })
        })
        .collect();
    m.insert("rays".into(), Value::Array(rays));
    m.insert(
        "maximal_cones".into(),
        json!(trop
            .cones
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()),
    );
    m.insert("lineality_dim".into(), json!(trop.s));
    let mut types = Map::new();
    let (mut big, mut special, mut leaf) = (0, 0, 0);
    for c in &x.cones {
        let t = crate::tropical::classify_cone(ring, trop, c).map_err(|e| CommandError::Analysis(e.to_string()))?;
        match t {
            crate::tropical::ConeType::Big => big += 1,
            crate::tropical::ConeType::Special => special += 1,
            crate::tropical::ConeType::Leaf => leaf += 1,
        }
        types.insert(cone_labels(ring, c), json!(t.to_string()));
    }
    m.insert("cone_types".into(), Value::Object(types));
    m.insert("counts".into(), json!({ "big": big, "special": special, "leaf": leaf }));
    Ok(m)
}

fn acomplex_body(x: &Variety) -> Result<Map<String, Value>, CommandError> {
    let ring = &x.ring;
    let trop = trop_quasifan(ring, true);
    let ac = anticanonical_complex(x, &trop).map_err(|e| CommandError::Analysis(e.to_string()))?;
    let mut m = Map::new();
    let elem: Vec<Value> = ac
        .elementary
        .iter()
        .map(|e| {
            let (ell, k) = crate::anticanon::ell_sigma(x, e);
            json!({
                "cone": cone_labels(ring, &e.cols),
                "type": e.kind.to_string(),
                "v_sigma": ints(&e.v_sigma),
                "ell": ell.to_string(),
                "c": e.c_sigma.to_string(),
                "k": k,
            })
        })
        .collect();
    m.insert("elementary_cones".into(), Value::Array(elem));
    let rays: Vec<Value> = ac
        .rays
        .iter()
        .map(|d| {
            let source = match d.source {
                RaySource::Original(j) => ring.exponents.label(j),
                RaySource::Elementary(k) => format!("elementary {k}"),
            };
            json!({
                "ray": ints(&d.ray),
                "source": source,
                "discrepancy": fmt_rat(&d.a),
                "vertex": d.vertex.as_ref().map(|v| rats(v)).unwrap_or(Value::Null),
            })
        })
        .collect();
    m.insert("rays".into(), Value::Array(rays));
    m.insert("cells".into(), json!(ac.cells.len()));
    m.insert("bounded".into(), json!(ac.bounded));
    m.insert("vertices".into(), Value::Array(ac.vertices().iter().map(|v| rats(v)).collect()));
    m.insert(
        "linear_forms".into(),
        Value::Array(ac.cells.iter().map(|c| rats(&c.u)).collect()),
    );
    Ok(m)
}

fn singtype_body(x: &Variety) -> Result<Map<String, Value>, CommandError> {
    let trop = trop_quasifan(&x.ring, true);
    let ac = anticanonical_complex(x, &trop).map_err(|e| CommandError::Analysis(e.to_string()))?;
    let v = singularity_type(x, &ac).map_err(|e| CommandError::Analysis(e.to_string()))?;
    let g = gorenstein_check(x);
    let mut m = Map::new();
    m.insert("singularities".into(), json!(v.verdict.to_string()));
    m.insert("witnesses".into(), int_rows(&v.witnesses));
    m.insert("q_gorenstein".into(), json!(g.is_q_gorenstein()));
    m.insert("gorenstein_index".into(), g.index.map(|i| json!(i.to_string())).unwrap_or(Value::Null));
    Ok(m)
}

fn fano_body(x: &Variety) -> Result<Map<String, Value>, CommandError> {
    let cones = x.divisor_class_cones();
    let mut m = Map::new();
    m.insert("anticanonical_class".into(), rats(&x.anticanonical_free()));
    m.insert("semiample_cone".into(), int_rows(cones.sample.rays()));
    let fano = x.is_fano_with(&cones).map_err(|e| CommandError::Analysis(e.to_string()))?;
    m.insert("fano".into(), json!(fano));
    Ok(m)
}

fn candidate_record(c: &Candidate) -> Value {
    let ring = c.ring();
    let torsion = ring.torsion();
    let labels = ring.exponents.labels();
    let q: Map<String, Value> =
        ring.degrees().iter().zip(&labels).map(|(g, l)| (l.clone(), json!(fmt_group(g, &torsion)))).collect();
    let params: Map<String, Value> =
        c.case.id.param_names().iter().zip(&c.params).map(|(n, v)| (n.to_string(), json!(v))).collect();
    json!({
        "case": c.case.id.to_string(),
        "relation_type": c.case.rtype.to_string(),
        "labeling": c.case.labeling.to_vec(),
        "parameters": params,
        "class_group": class_group(ring),
        "degrees": q,
        "anticanonical_class": fmt_group(&crate::variety::anticanonical_class(ring), &torsion),
        "singularities": c.singularity.verdict.to_string(),
    })
}

fn classify_body(
    picard: Option<usize>,
    isotropy: Option<u32>,
    case: Option<CaseId>,
    exec: Execution,
) -> Result<Map<String, Value>, CommandError> {
    let config = SearchConfig { picard, isotropy, cases: case.map(|c| vec![c]), exec };
    let result = run_search(&config)?;
    let d = dedupe(&result.candidates);
    let mut m = Map::new();
    m.insert("candidates".into(), json!(result.candidates.len()));
    m.insert("rejected".into(), json!(result.rejected.len()));
    m.insert("classes".into(), json!(d.groups.len()));
    let table: Vec<Value> = d
        .groups
        .iter()
        .map(|g| {
            let mut rec = candidate_record(&result.candidates[g.representative]);
            rec["members"] = json!(g.members.len());
            rec
        })
        .collect();
    m.insert("table".into(), Value::Array(table));
    m.insert(
        "possibly_isomorphic".into(),
        json!(d.possibly_isomorphic.iter().map(|(a, b)| format!("{a}~{b}")).collect::<Vec<_>>()),
    );
    if !result.errors.is_empty() {
        m.insert(
            "errors".into(),
            json!(result.errors.iter().map(|(c, e)| format!("{} {:?}: {e}", c.id, c.labeling)).collect::<Vec<_>>()),
        );
    }
    Ok(m)
}

fn product_body(k1: usize, k2: usize, a: &[i64]) -> Result<Map<String, Value>, CommandError> {
    let p = product_family(k1, k2, a)?;
    let mut m = Map::new();
    let fano = if p.fano { "Fano" } else { "not Fano" };
    m.insert("summary".into(), json!(format!("{}, {fano}, dim {}", p.smoothness, p.dim)));
    m.insert("smoothness".into(), json!(p.smoothness.to_string()));
    m.insert("fano".into(), json!(p.fano));
    m.insert("dimension".into(), json!(p.dim));
    m.insert("degrees".into(), int_rows(&p.variety.ring.degree_matrix().to_rows()));
    m.insert("anticanonical_class".into(), rats(&p.variety.anticanonical_free()));
    Ok(m)
}

fn decompose_body(spec: &InputSpec) -> Result<Map<String, Value>, CommandError> {
    let ring = spec.ring()?;
    let arr = &ring.arrangement;
    let mut m = Map::new();
    let blocks = arr.decompose();
    m.insert("components".into(), json!(blocks));
    m.insert("indecomposable".into(), json!(arr.is_indecomposable(&ring.exponents)));
    let pos = match arr.position_type() {
        PositionType::General => "general",
        PositionType::Special => "special",
    };
    m.insert("position".into(), json!(pos));
    m.insert("honesty".into(), json!(ring.honesty().to_string()));
    Ok(m)
}

/// Runs one command; `spec` is required by every command except `classify` and `product`.
pub fn run_command(spec: Option<&InputSpec>, command: &Command, exec: Execution) -> Result<Report, CommandError> {
    let need = || spec.ok_or(CommandError::NeedsInput(command.name()));
    let mut variables = Vec::new();
    let body = match command {
        Command::Ring => {
            let ring = need()?.ring()?;
            variables = ring.exponents.labels();
            ring_body(&ring)
        }
        Command::Decompose => {
            let s = need()?;
            variables = s.ring()?.exponents.labels();
            decompose_body(s)?
        }
        Command::Classify { picard, isotropy, case } => classify_body(*picard, *isotropy, *case, exec)?,
        Command::Product { k1, k2, a } => product_body(*k1, *k2, a)?,
        _ => {
            let x = need()?.variety()?;
            variables = x.ring.exponents.labels();
            match command {
                Command::Variety => variety_body(&x)?,
                Command::Trop { coarsen } => trop_body(&x, &trop_quasifan(&x.ring, *coarsen))?,
                Command::AComplex => acomplex_body(&x)?,
                Command::SingType => singtype_body(&x)?,
                Command::Fano => fano_body(&x)?,
                _ => unreachable!("handled above"),
            }
        }
    };
    Ok(Report { command: command.name().into(), variables, body })
}
