//! Acceptance criteria; prints one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use arrvar::anticanon::{anticanonical_complex, ell_sigma, singularity_type};
use arrvar::arrangement::PositionType;
use arrvar::classifier::{
    bound_parameters, dedupe, dedupe_key, enumerate_cases, fano_variety, product_fano_criterion, product_family,
    product_parameters, representatives, run_search, CaseId, RelationType, SearchCase, SearchConfig,
};
use arrvar::exactmath::{to_rats, Int, Rat};
use arrvar::io::{FanSpec, InputSpec};
use arrvar::tropical::{classify_cone, elementary_cones, refined_fan, trop_quasifan, ConeType};
use arrvar::variety::{
    fan_from_ample, rational_anticanonical, stratum_rank, xbar_face_test, Smoothness, Variety, VarietyError,
};
use common::{fixtures, jacobian_rank, random_honest_instance, relations_vanish, sample_stratum_point};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn running() -> InputSpec {
    fixtures().into_iter().find(|(n, _)| n == "run").expect("run.arr").1
}

fn fixture_varieties() -> Vec<(String, Variety)> {
    fixtures()
        .into_iter()
        .filter(|(_, s)| s.fan.is_some())
        .map(|(n, s)| {
            let x = s.variety().unwrap_or_else(|e| panic!("{n}: {e}"));
            (n, x)
        })
        .collect()
}

fn running_example_pipeline() -> Result<String, String> {
    let x = running().variety().map_err(|e| e.to_string())?;
    let ring = &x.ring;
    ensure(ring.picard_rank() == 2 && ring.torsion() == vec![Int::from(2); 3], || {
        format!("Cl(X) has rank {} and torsion {:?}", ring.picard_rank(), ring.torsion())
    })?;
    ensure(ring.dim() == 5, || format!("ring dimension {}", ring.dim()))?;
    ensure(x.dim() == 3 && ring.c() == 2, || format!("dim {} complexity {}", x.dim(), ring.c()))?;

    let trop = trop_quasifan(ring, true);
    let want: [(&[usize], ConeType); 9] = [
        (&[1, 2, 3, 4, 5], ConeType::Big),
        (&[0, 3, 5, 6], ConeType::Special),
        (&[0, 2, 4, 6], ConeType::Special),
        (&[0, 1, 3, 5], ConeType::Special),
        (&[0, 1, 2, 4], ConeType::Special),
        (&[4, 5, 6], ConeType::Leaf),
        (&[3, 4, 6], ConeType::Leaf),
        (&[2, 5, 6], ConeType::Leaf),
        (&[2, 3, 6], ConeType::Leaf),
    ];
    ensure(x.cones.len() == 9, || format!("{} maximal cones", x.cones.len()))?;
    for (cols, t) in want {
        ensure(x.cones.iter().any(|c| c == cols), || format!("cone {cols:?} missing from Σ"))?;
        let got = classify_cone(ring, &trop, cols).map_err(|e| e.to_string())?;
        ensure(got == t, || format!("cone {cols:?} is {got}, expected {t}"))?;
    }

    // Δ in the first four coordinates: e₀ = −Σeᵢ, e₅ = e₀+e₂+e₄, e₆ = e₀+e₁+e₃
    let e = |v: [i64; 4]| v.map(Int::from).to_vec();
    let named = [
        e([-1, -1, -1, -1]),
        e([1, 0, 0, 0]),
        e([0, 1, 0, 0]),
        e([0, 0, 1, 0]),
        e([0, 0, 0, 1]),
        e([-1, 0, -1, 0]),
        e([0, -1, 0, -1]),
    ];
    let listed = [(0, 5), (0, 6), (1, 2), (1, 4), (1, 6), (2, 3), (2, 5), (3, 4), (3, 6), (4, 5)];
    let want: BTreeSet<BTreeSet<Vec<Int>>> =
        listed.iter().map(|&(i, j)| [named[i].clone(), named[j].clone()].into_iter().collect()).collect();
    let got: BTreeSet<BTreeSet<Vec<Int>>> = trop
        .cones
        .iter()
        .map(|c| c.iter().map(|&k| trop.rays[k][..4].to_vec()).collect())
        .collect();
    ensure(trop.cones.len() == 10 && got == want, || format!("Δ has cones {got:?}"))?;
    Ok("Cl = Z^2 + (Z/2)^3, dim R = 5, dim X = 3, 1 big + 4 special + 4 leaf, 10 cones in Δ".into())
}

/// The ranges stated in the bounding argument, intersected with the search window.
fn stated(id: CaseId) -> BTreeSet<Vec<i64>> {
    let case = SearchCase::representative(id);
    case.grid()
        .into_iter()
        .filter(|p| match id {
            CaseId::Rho1A => p[0] == -5,
            CaseId::Rho1B => p[0] == -1 && p[1] == -3,
            CaseId::Rho2A => false,
            CaseId::Rho2B => p[0] <= -1 && p[1] == -3,
            CaseId::Rho2C => (-3..=-2).contains(&p[1]) && (-2..0).contains(&p[0]) && (1..=2).contains(&p[2]),
        })
        .collect()
}

fn bound_reproduction() -> Result<String, String> {
    let mut notes = Vec::new();
    for id in [CaseId::Rho1A, CaseId::Rho1B, CaseId::Rho2A, CaseId::Rho2B, CaseId::Rho2C] {
        let got: BTreeSet<Vec<i64>> =
            bound_parameters(&SearchCase::representative(id)).map_err(|e| e.to_string())?.into_iter().collect();
        let range = stated(id);
        ensure(got.is_subset(&range), || format!("{id}: {got:?} leaves the stated range {range:?}"))?;
        match id {
            CaseId::Rho2B => {
                // the stated range also admits x = −1, where −K sits on the boundary of Mov(X)
                ensure(got == BTreeSet::from([vec![-2, -3]]), || format!("2b: {got:?}"))?;
                let ring = SearchCase::representative(id).build(&[-1, -3])?;
                let u = to_rats(&arrvar::variety::anticanonical_class(&ring).free);
                ensure(matches!(fan_from_ample(&ring, &u), Err(VarietyError::NotMovable)), || {
                    "2b x=-1: -K unexpectedly movable".into()
                })?;
                notes.push("2b: x=-1 dropped, -K not in Mov interior".to_string());
            }
            CaseId::Rho2C => {
                // the stated box, cut by the vertex condition 0 < 1 + 2(x+z)/3 <= 1
                let cut: BTreeSet<Vec<i64>> =
                    range.iter().filter(|p| (-1..=0).contains(&(p[0] + p[2]))).cloned().collect();
                ensure(got == cut, || format!("2c: {got:?}, expected {cut:?}"))?;
            }
            _ => ensure(got == range, || format!("{id}: {got:?}, expected {range:?}"))?,
        }
    }
    Ok(format!("1a {{-5}}, 1b {{(-1,-3)}}, 2a empty, 2b {{(-2,-3)}}, 2c 4 points; {}", notes.join("; ")))
}

/// Elementary cone count and, when a verdict exists, whether X is canonical.
fn check_discrepancies(x: &Variety) -> Result<(usize, Option<bool>), String> {
    let trop = trop_quasifan(&x.ring, true);
    let refined = refined_fan(x, &trop);
    let refined_rays: BTreeSet<Vec<Int>> = refined.rays().into_iter().collect();
    let ac = anticanonical_complex(x, &trop).map_err(|e| e.to_string())?;
    let mut canonical = None;
    if let Ok(v) = singularity_type(x, &ac) {
        let scan = canonical_by_scan(&ac);
        ensure(v.is_canonical() == scan.is_ok(), || format!("lattice scan disagrees with verdict {}", v.verdict))?;
        canonical = Some(v.is_canonical());
    }
    let elementary = elementary_cones(x, &trop);
    for e in &elementary {
        ensure(refined_rays.contains(&e.ray), || format!("ray {:?} of {:?} not in Σ ⊓ trop", e.ray, e.cols))?;
        let all = x.ring.columns();
        let gens: Vec<Vec<Int>> = e.cols.iter().map(|&j| all[j].clone()).collect();
        let sigma = arrvar::polyhedra::Cone::from_generators(x.ring.ambient_dim(), &gens, &[]);
        let interior = trop.interior_rays(&sigma);
        ensure(interior == vec![e.ray.clone()], || format!("{:?}: interior rays {interior:?}", e.cols))?;
        let (ell, _) = ell_sigma(x, e);
        if ell > Int::zero() {
            let vertex: Vec<Rat> = e.v_sigma.iter().map(|t| Rat::new(t.clone(), ell.clone())).collect();
            for c in ac.cells.iter().filter(|c| c.cone.rays().contains(&e.ray)) {
                let val = arrvar::exactmath::dot_rat(&c.u, &vertex);
                ensure(val == -Rat::one(), || format!("{:?}: <u, v'> = {val}", e.cols))?;
            }
        }
    }
    Ok((elementary.len(), canonical))
}

fn discrepancy_cross_validation() -> Result<String, String> {
    let mut cones = 0;
    let mut varieties = 0;
    let mut verdicts = [0usize; 2];
    let mut tally = |(n, c): (usize, Option<bool>)| {
        cones += n;
        varieties += 1;
        if let Some(c) = c {
            verdicts[usize::from(c)] += 1;
        }
    };
    for (name, x) in fixture_varieties() {
        tally(check_discrepancies(&x).map_err(|e| format!("{name}: {e}"))?);
    }
    for id in [CaseId::Rho1A, CaseId::Rho1B] {
        let case = SearchCase::representative(id);
        for p in case.grid() {
            let Ok(ring) = case.build(&p) else { continue };
            let Ok(x) = fano_variety(&ring) else { continue };
            tally(check_discrepancies(&x).map_err(|e| format!("{id} {p:?}: {e}"))?);
        }
    }
    Ok(format!(
        "{cones} elementary cones over {varieties} varieties; lattice scan matches {} canonical and {} non-canonical verdicts",
        verdicts[1], verdicts[0]
    ))
}

fn no_smooth_ones() -> Result<String, String> {
    let mut checked = 0;
    for case in enumerate_cases() {
        for p in case.grid() {
            let Ok(ring) = case.build(&p) else { continue };
            if !ring.honesty().is_honest() {
                continue;
            }
            let Ok(x) = fano_variety(&ring) else { continue };
            ensure(x.smoothness_report() != Smoothness::Smooth, || format!("{} {:?} {p:?} is smooth", case.id, case.labeling))?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..1000 {
        let inst = random_honest_instance(&mut rng);
        ensure(inst.variety.smoothness_report() != Smoothness::Smooth, || {
            format!("random instance {k} is smooth: P = {:?}, u = {:?}", inst.ring.p.to_rows(), inst.ample)
        })?;
    }
    Ok(format!("{checked} sweep varieties and 1000 random instances, none smooth"))
}

fn product_family_sweep() -> Result<String, String> {
    let mut count = 0;
    let mut boundary = Vec::new();
    let mut min_dim = usize::MAX;
    for k1 in 5..=8 {
        for k2 in 5..=8 {
            for a in product_parameters(k2, 3) {
                let p = product_family(k1, k2, &a).map_err(|e| e.to_string())?;
                ensure(p.smoothness == Smoothness::Smooth, || format!("({k1},{k2},{a:?}) is {}", p.smoothness))?;
                let strict = product_fano_criterion(k1, k2, a[0]);
                ensure(p.fano == strict, || format!("({k1},{k2},{a:?}): fano {} vs criterion {strict}", p.fano))?;
                if a[0] * (k2 as i64 - 2) == k1 as i64 - 2 {
                    // equality in the bound: −K is nef, on the boundary ray of the ample cone
                    let cones = p.variety.divisor_class_cones();
                    let k = p.variety.anticanonical_free();
                    ensure(cones.sample.contains(&k) && !cones.ample_contains(&k), || {
                        format!("({k1},{k2},{a:?}): -K not on the ample boundary")
                    })?;
                    boundary.push(format!("({k1},{k2},a1={})", a[0]));
                }
                min_dim = min_dim.min(p.dim);
                count += 1;
            }
        }
    }
    boundary.dedup();
    ensure(min_dim == 6, || format!("minimum dimension {min_dim}"))?;
    Ok(format!(
        "{count} members smooth, Fano iff 0 <= a1 < (k1-2)/(k2-2), min dim 6; nef but not ample at {}",
        boundary.join(" ")
    ))
}

fn oracle_equivalences() -> Result<String, String> {
    let mut faces = 0;
    for (name, spec) in fixtures() {
        let ring = spec.ring().map_err(|e| format!("{name}: {e}"))?;
        for g in 0..1u32 << ring.nvars() {
            let lib = xbar_face_test(&ring, g);
            let oracle = common::xbar_face_by_realization(&ring, g);
            ensure(lib == oracle, || format!("{name} face {g:#b}: matroid {lib}, realization {oracle}"))?;
            faces += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    for (name, x) in fixture_varieties() {
        let ring = &x.ring;
        for f in x.faces().iter().filter(|f| f.xbar_face) {
            let want = stratum_rank(ring, f.gamma0);
            for _ in 0..100 {
                let z = sample_stratum_point(ring, f.gamma0, &mut rng)
                    .ok_or_else(|| format!("{name}: no point on stratum {:#b}", f.gamma0))?;
                ensure(relations_vanish(ring, &z), || format!("{name}: sample off X̄"))?;
                let got = jacobian_rank(ring, &z);
                ensure(got == want, || format!("{name} face {:#b}: rank {got} at a sample, criterion {want}", f.gamma0))?;
            }
            tested += 1;
        }
    }
    Ok(format!("{faces} faces agree with realizability; {tested} strata x 100 points agree on Jacobian rank"))
}

/// Cell data in machine integers: facets (≥ 0), equations (= 0), and u scaled by its
/// denominator: ⟨u, p⟩ > −1 iff ⟨num, p⟩ > −den.
struct IntCell {
    facets: Vec<Vec<i64>>,
    equations: Vec<Vec<i64>>,
    num: Vec<i64>,
    den: i64,
}

fn small(v: &[Int]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).expect("small entries")).collect()
}

fn idot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Canonical iff 𝒜 is bounded and no nonzero lattice point has ⟨u, p⟩ > −1 in a cell containing it.
fn canonical_by_scan(ac: &arrvar::anticanon::ACComplex) -> Result<(), String> {
    let mut cells = Vec::new();
    let mut lo: Vec<i64> = Vec::new();
    let mut hi: Vec<i64> = Vec::new();
    for c in &ac.cells {
        ensure(c.cone.is_pointed(), || "cell with lineality".into())?;
        let den = c.u.iter().fold(Int::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
        let num: Vec<Int> = c.u.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        let (num, den) = (small(&num), i64::try_from(&den).unwrap());
        if lo.is_empty() {
            lo = vec![0; num.len()];
            hi = vec![0; num.len()];
        }
        for r in c.cone.rays() {
            let r = small(r);
            let ur = idot(&num, &r);
            ensure(ur < 0, || format!("unbounded along {r:?}"))?;
            // vertex r·den/(−ur)
            for t in 0..r.len() {
                let v = Rat::new(Int::from(r[t] * den), Int::from(-ur));
                lo[t] = lo[t].min(i64::try_from(&v.floor().to_integer()).unwrap());
                hi[t] = hi[t].max(i64::try_from(&v.ceil().to_integer()).unwrap());
            }
        }
        cells.push(IntCell {
            facets: c.cone.facets().iter().map(|f| small(f)).collect(),
            equations: c.cone.equations().iter().map(|f| small(f)).collect(),
            num,
            den,
        });
    }
    let n = lo.len();
    let mut p = lo.clone();
    loop {
        if p.iter().any(|&t| t != 0) {
            for c in &cells {
                if idot(&c.num, &p) > -c.den
                    && c.facets.iter().all(|f| idot(f, &p) >= 0)
                    && c.equations.iter().all(|f| idot(f, &p) == 0)
                {
                    return Err(format!("lattice point {p:?} inside the anticanonical complex"));
                }
            }
        }
        let mut t = 0;
        loop {
            if t == n {
                return Ok(());
            }
            if p[t] < hi[t] {
                p[t] += 1;
                break;
            }
            p[t] = lo[t];
            t += 1;
        }
    }
}

fn spec_of(x: &Variety) -> InputSpec {
    let ring = &x.ring;
    let r = ring.p.rows();
    InputSpec {
        a: ring.arrangement.matrix().to_rows(),
        n: ring.exponents.n.clone(),
        l: ring.exponents.l.clone(),
        m: ring.exponents.m,
        d: ring.p.to_rows()[r - ring.s..].to_vec(),
        grading: Some(ring.degree_matrix().to_rows()),
        fan: Some(FanSpec::Cones(x.cones.clone())),
    }
}

fn final_list() -> Result<String, String> {
    let result = run_search(&SearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(result.errors.is_empty(), || format!("search errors: {:?}", result.errors))?;
    let d = dedupe(&result.candidates);
    let reps = representatives(&result.candidates, &d);
    for c in &reps {
        let tag = format!("{} {:?} {:?}", c.case.id, c.case.labeling, c.params);
        // rebuilt from the text format with the fine tropical structure
        let text = arrvar::io::serialize(&spec_of(&c.variety));
        let x = arrvar::io::parse_input(&text).map_err(|e| e.to_string())?.variety().map_err(|e| e.to_string())?;
        ensure(x.is_fano().map_err(|e| e.to_string())?, || format!("{tag}: not Fano after rebuild"))?;
        let k = rational_anticanonical(&x.ring);
        let cones = x.divisor_class_cones();
        ensure(cones.ample_contains(&k), || format!("{tag}: rational -w_X not ample"))?;
        let ac = anticanonical_complex(&x, &trop_quasifan(&x.ring, true)).map_err(|e| e.to_string())?;
        canonical_by_scan(&ac).map_err(|e| format!("{tag}: {e}"))?;
        let arr = &x.ring.arrangement;
        let exps = &x.ring.exponents;
        let honest = arr.position_type() == PositionType::Special
            && arr.decompose().len() == 1
            && exps.l.iter().zip(&exps.n).all(|(l, &n)| l.iter().all(|&e| e as usize * n > 1));
        ensure(honest, || format!("{tag}: not honestly special"))?;
        // every cone of Σ sits on the X-faces
        ensure(x.faces().iter().filter(|f| f.x_face).count() > 0, || format!("{tag}: no X-faces"))?;
    }
    let run = running().ring().map_err(|e| e.to_string())?;
    let key = dedupe_key(&run, RelationType::II);
    ensure(d.groups.iter().any(|g| g.key == key), || "running example class missing".into())?;
    let again = dedupe(&reps);
    ensure(again.groups.len() == reps.len() && again.groups.iter().all(|g| g.members.len() == 1), || {
        "dedupe is not idempotent".into()
    })?;
    let cases: BTreeSet<String> = reps.iter().map(|c| c.case.id.to_string()).collect();
    Ok(format!(
        "{} candidates, {} classes (cases {}), all re-verified; running example present; dedupe idempotent",
        result.candidates.len(),
        reps.len(),
        cases.into_iter().collect::<Vec<_>>().join(",")
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 7] = [
        (1, "running-example pipeline", Duration::from_secs(5), running_example_pipeline),
        (2, "parameter bounds", Duration::from_secs(60), bound_reproduction),
        (3, "discrepancy cross-validation", Duration::from_secs(30), discrepancy_cross_validation),
        (4, "no smooth honestly special varieties", Duration::from_secs(600), no_smooth_ones),
        (5, "smooth product family", Duration::from_secs(120), product_family_sweep),
        (6, "oracle equivalences", Duration::from_secs(300), oracle_equivalences),
        (7, "final list properties", Duration::from_secs(1800), final_list),
    ];
    let only: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let r = r.and_then(|s| {
            if dt > limit {
                Err(format!("took {dt:.1?}, limit {limit:?}"))
            } else {
                Ok(s)
            }
        });
        match r {
            Ok(s) => println!("PASS {n} {name}: {s} [{:.1}s]", dt.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL {n} {name}: {e} [{:.1}s]", dt.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
