//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Randomized parts are seeded from `CUSPCOBORD_SEED` (default `20260101`).

#[path = "../common/mod.rs"]
mod common;
mod enumerate;
mod oracle;

use std::path::Path;
use std::time::{Duration, Instant};

use cuspcobord::cobordism_group::generator;
use cuspcobord::invariants::signed_defect;
use cuspcobord::morse_model::{alternating_count, BoundaryCriticalPoint, InteriorCriticalPoint};
use cuspcobord::moves::{apply_move, enumerate_moves, normalize_even, normalize_odd, NormalizeOutcome, ObstructionKind};
use cuspcobord::normal_forms::{
    detect_singular_set, perturbed_fold_image, swallow_tail_singular_curve, GridSpec, LocalMap, NormalFormError,
    Profile, Tolerances,
};
use cuspcobord::{chi_plus, cobordism_invariant, MorseDescriptor, Sign, SignAssignment, SingularPattern};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances and budgets.
const C1_BUDGET: Duration = Duration::from_millis(1);
const C2_BUDGET: Duration = Duration::from_millis(1);
const C3_BUDGET: Duration = Duration::from_secs(5);
const C4_BUDGET: Duration = Duration::from_secs(10);
const C5_BUDGET: Duration = Duration::from_secs(60);
const C6_BUDGET: Duration = Duration::from_secs(300);
const C7_BUDGET: Duration = Duration::from_secs(30);
const C8_BUDGET: Duration = Duration::from_secs(30);
const C3_PAIRS: usize = 1000;
const C4_MAX_POINTS: usize = 6;
const C4_MAX_INDEX: i64 = 3;
const C5_MAX_COMPONENTS: usize = 3;
const C5_MAX_CUSPS: usize = 3;
const C7_SEQUENCES: usize = 10_000;
const CURVE_TOL: f64 = 1e-8;
const CUSP_TOL: f64 = 1e-6;
const IMAGE_TOL: f64 = 1e-8;
const JACOBIAN_TOL: f64 = 1e-6;
const MIN_BIRTH_T: f64 = 0.01;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn seed() -> u64 {
    std::env::var("CUSPCOBORD_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_260_101)
}

fn fmt_duration(d: Duration) -> String {
    if d < Duration::from_millis(1) {
        format!("{:.1} µs", d.as_secs_f64() * 1e6)
    } else if d < Duration::from_secs(1) {
        format!("{:.2} ms", d.as_secs_f64() * 1e3)
    } else {
        format!("{:.2} s", d.as_secs_f64())
    }
}

fn load(name: &str) -> MorseDescriptor {
    let text = std::fs::read_to_string(common::corpus().join(name)).expect("corpus file");
    serde_json::from_str(&text).expect("descriptor json")
}

fn c1(fig1: &MorseDescriptor, fig2: &MorseDescriptor) -> Outcome {
    let (a, b) = (chi_plus(fig1), chi_plus(fig2));
    if (a, b) == (1, 0) {
        pass(format!("chi_plus(fig1) = {a}, chi_plus(fig2) = {b}"))
    } else {
        fail(format!("chi_plus(fig1) = {a}, chi_plus(fig2) = {b}, expected 1 and 0"))
    }
}

fn c2(fig2: &MorseDescriptor) -> Outcome {
    let mut values = Vec::new();
    for n in 2..=7 {
        let Ok(g) = generator(n) else { return fail(format!("generator({n}) failed")) };
        let class = cobordism_invariant(&g);
        let ok = if n % 2 == 0 { class.value == 1 } else { class.value.abs() == 1 };
        if !ok || !class.is_generator() {
            return fail(format!("n = {n}: invariant {class}"));
        }
        values.push(format!("{n}:{}", class.value));
    }
    let g2 = generator(2).unwrap();
    let data = |d: &MorseDescriptor| d.boundary.iter().map(|p| (p.mu, p.sigma)).collect::<Vec<_>>();
    if data(&g2) != data(fig2) || cobordism_invariant(fig2) != cobordism_invariant(&g2) {
        return fail("generator(2) does not match the fig2 disk");
    }
    pass(format!("invariants {}; generator(2) = fig2 disk", values.join(" ")))
}

fn random_descriptor(rng: &mut ChaCha8Rng, n: i64, tag: &str) -> MorseDescriptor {
    let count = 2 * rng.random_range(0..=3usize);
    let boundary: Vec<BoundaryCriticalPoint> = (0..count)
        .map(|k| {
            let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            BoundaryCriticalPoint::new(format!("{tag}b{k}"), rng.random_range(0..n), sign)
        })
        .collect();
    let chi_b = alternating_count(&boundary);
    let chi_m = if n % 2 == 1 { chi_b / 2 } else { rng.random_range(-3..=3) };
    let mut d = MorseDescriptor::from_boundary(n, chi_m, boundary);
    d.oriented = rng.random_bool(0.5);
    for k in 0..rng.random_range(0..3) {
        d.interior.push(InteriorCriticalPoint::new(format!("{tag}i{k}"), rng.random_range(0..=n)));
    }
    d
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let mut failures = 0;
    let mut checked = 0;
    for n in [2, 3] {
        for _ in 0..C3_PAIRS {
            let (d1, d2) = (random_descriptor(&mut rng, n, "a"), random_descriptor(&mut rng, n, "b"));
            assert!(d1.validate().is_valid() && d2.validate().is_valid(), "generator produced an invalid descriptor");
            let union = d1.disjoint_union(&d2).expect("same dimension");
            let sum = cobordism_invariant(&d1) + cobordism_invariant(&d2);
            let inverse = cobordism_invariant(&d1.reverse()) == -cobordism_invariant(&d1);
            if !union.validate().is_valid() || cobordism_invariant(&union) != sum || !inverse {
                failures += 1;
            }
            checked += 1;
        }
    }
    let detail = format!("{checked} random pairs over n in {{2, 3}}, {failures} failures");
    if failures == 0 { pass(detail) } else { fail(detail) }
}

fn c4() -> Outcome {
    let mut lists: Vec<Vec<i64>> = vec![vec![]];
    let mut cases = 0u64;
    let mut failures = 0u64;
    for _ in 0..=C4_MAX_POINTS {
        let mut next = Vec::new();
        for mus in &lists {
            let boundary: Vec<BoundaryCriticalPoint> =
                mus.iter().enumerate().map(|(k, &mu)| BoundaryCriticalPoint::new(format!("x{k}"), mu, Sign::Plus)).collect();
            let chi_p = alternating_count(&boundary);
            for mask in 0u32..1 << mus.len() {
                let sigma: SignAssignment = boundary
                    .iter()
                    .enumerate()
                    .map(|(k, b)| (b.id.clone(), if mask >> k & 1 == 0 { Sign::Plus } else { Sign::Minus }))
                    .collect();
                cases += 1;
                match signed_defect(chi_p, &boundary, &sigma) {
                    Ok((l, r)) if l == r => {}
                    _ => failures += 1,
                }
            }
            if mus.len() < C4_MAX_POINTS {
                for mu in 0..=C4_MAX_INDEX {
                    let mut m = mus.clone();
                    m.push(mu);
                    next.push(m);
                }
            }
        }
        lists = next;
    }
    let detail = format!("{cases} (list, sigma) cases, {failures} failures");
    if failures == 0 { pass(detail) } else { fail(detail) }
}

fn enumeration() -> Vec<(i64, Vec<SingularPattern>)> {
    [2, 3, 4].into_iter().map(|n| (n, enumerate::patterns(n, C5_MAX_COMPONENTS, C5_MAX_CUSPS))).collect()
}

fn c5(all: &[(i64, Vec<SingularPattern>)]) -> Outcome {
    let mut cases = 0u64;
    let mut failures = Vec::new();
    for (n, patterns) in all {
        for p in patterns {
            if !p.validate().is_valid() {
                failures.push(format!("enumerated pattern rejected: {p:?}"));
                continue;
            }
            let skeleton = oracle::Skeleton::new(p);
            let mut sigma = enumerate::sign_assignment(p, 0);
            for mask in 0u32..1 << p.boundary_points.len() {
                enumerate::set_mask(p, &mut sigma, mask);
                let facts = skeleton.facts(mask);
                let conditions = if n % 2 == 0 { p.check_condition_even(&sigma) } else { p.check_condition_odd(&sigma) };
                let exists = p.vector_field_exists(&sigma);
                cases += 1;
                let expected: Vec<bool> = facts.iter().map(oracle::field_exists).collect();
                let oracle_cond: Vec<bool> = facts
                    .iter()
                    .map(|f| if n % 2 == 0 { oracle::even_condition(f) } else { oracle::odd_condition(f) })
                    .collect();
                let good = matches!(&conditions, Ok(c) if *c == expected && *c == oracle_cond)
                    && exists == Ok(expected.iter().all(|&b| b));
                if !good && failures.len() < 5 {
                    failures.push(format!("n = {n} mask = {mask}: {p:?}"));
                }
            }
        }
    }
    let counts: Vec<String> = all.iter().map(|(n, ps)| format!("n={n}: {} patterns", ps.len())).collect();
    let detail = format!("{} ; {cases} (pattern, sigma) cases, {} failures", counts.join(", "), failures.len());
    if failures.is_empty() { pass(detail) } else { fail(format!("{detail}; first: {}", failures[0])) }
}

fn check_normalization(p: &SingularPattern, sigma: &SignAssignment) -> Result<bool, String> {
    let n = p.n;
    let (outcome, holds) = if n % 2 == 0 {
        let chi_v = (p.total_cusps() as i64 + p.boundary_points.len() as i64 / 2).rem_euclid(2);
        let holds = (chi_v - oracle::chi_plus(p, sigma)).rem_euclid(2) == 0;
        let out = normalize_even(p, sigma, chi_v, n == 2).map_err(|e| format!("error {e}"))?;
        if let NormalizeOutcome::Obstructed(o) = &out {
            let w = &o.witness;
            let expect = (chi_v.rem_euclid(2), oracle::chi_plus(p, sigma).rem_euclid(2));
            if o.kind != ObstructionKind::ParityMismatch || (w.lhs, w.rhs) != expect || w.modulus != Some(2) || w.lhs == w.rhs {
                return Err(format!("bad parity witness {o:?}"));
            }
        }
        (out, holds)
    } else {
        let sum = oracle::signed_sum(p, sigma);
        let out = normalize_odd(p, sigma).map_err(|e| format!("error {e}"))?;
        if let NormalizeOutcome::Obstructed(o) = &out {
            let w = &o.witness;
            let expect = (oracle::alternating_count(p) / 2, oracle::chi_plus(p, sigma));
            if o.kind != ObstructionKind::SignSumNonzero || w.signed_sum != Some(sum) || (w.lhs, w.rhs) != expect || w.lhs == w.rhs {
                return Err(format!("bad sign-sum witness {o:?}"));
            }
        }
        (out, sum == 0)
    };
    match outcome {
        NormalizeOutcome::Normalized(trace) => {
            if !holds {
                return Err("normalized although the condition fails".into());
            }
            if trace.initial != *p || !trace.verify() {
                return Err("trace does not replay".into());
            }
            let fin = &trace.final_pattern;
            if !fin.validate().is_valid() || fin.boundary_points != p.boundary_points || !oracle::normalized(fin, sigma) {
                return Err("final pattern fails the componentwise check".into());
            }
            Ok(true)
        }
        NormalizeOutcome::Obstructed(_) if holds => Err("obstructed although the condition holds".into()),
        NormalizeOutcome::Obstructed(_) => Ok(false),
    }
}

fn c6(all: &[(i64, Vec<SingularPattern>)]) -> Outcome {
    let (mut normalized, mut obstructed) = (0u64, 0u64);
    let mut failures = Vec::new();
    for (_, patterns) in all {
        for p in patterns {
            let mut sigma = enumerate::sign_assignment(p, 0);
            for mask in 0u32..1 << p.boundary_points.len() {
                enumerate::set_mask(p, &mut sigma, mask);
                match check_normalization(p, &sigma) {
                    Ok(true) => normalized += 1,
                    Ok(false) => obstructed += 1,
                    Err(e) => {
                        if failures.len() < 5 {
                            failures.push(format!("{e}: n = {} mask = {mask}: {p:?}", p.n));
                        } else {
                            failures.push(String::new());
                        }
                    }
                }
            }
        }
    }
    let detail = format!("{normalized} normalized, {obstructed} obstructed, {} failures", failures.len());
    if failures.is_empty() { pass(detail) } else { fail(format!("{detail}; first: {}", failures[0])) }
}

fn c7(all: &[(i64, Vec<SingularPattern>)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 0x7);
    let starts: Vec<SingularPattern> = all
        .iter()
        .flat_map(|(_, ps)| ps.iter().filter(|p| p.components.len() <= 2 && p.total_cusps() <= 4))
        .map(|p| {
            let chi = (p.total_cusps() as i64 + p.boundary_points.len() as i64 / 2).rem_euclid(2);
            p.clone().with_chi_ambient(chi)
        })
        .collect();
    let (mut moves, mut failures) = (0u64, Vec::new());
    for _ in 0..C7_SEQUENCES {
        let mut p = starts.choose(&mut rng).unwrap().clone();
        let steps = rng.random_range(1..=6);
        for _ in 0..steps {
            let options = enumerate_moves(&p, true);
            let Some(m) = options.choose(&mut rng) else { break };
            let before = p.total_cusps() as i64;
            let q = match apply_move(&p, m) {
                Ok(q) => q,
                Err(e) => {
                    failures.push(format!("{m:?} rejected: {e}"));
                    break;
                }
            };
            moves += 1;
            let delta = q.total_cusps() as i64 - before;
            if !q.validate().is_valid() || delta.abs() != 2 || q.lemma51_check() != Ok(true) {
                failures.push(format!("{m:?}: delta {delta}, valid {}", q.validate().is_valid()));
                break;
            }
            p = q;
            if p.total_cusps() > 10 {
                break;
            }
        }
    }
    let detail = format!("{C7_SEQUENCES} sequences, {moves} moves, {} failures", failures.len());
    if failures.is_empty() { pass(detail) } else { fail(format!("{detail}; first: {}", failures[0])) }
}

fn c8() -> Outcome {
    let grid: GridSpec = "-2:2:41,-2.5:2.5:11".parse().unwrap();
    let tol = Tolerances::default();
    let mut worst_curve = 0.0f64;
    let mut worst_cusp = 0.0f64;
    for t in [1.0, -1.0, 0.25, -0.25] {
        let map = LocalMap::swallow_tail(3, t, 0).unwrap();
        let curve = swallow_tail_singular_curve(t).unwrap();
        let det = detect_singular_set(&map, &grid, &tol).unwrap();
        for s in &det.samples {
            worst_curve = worst_curve.max(curve.deviation(&s.point));
        }
        let mut xs: Vec<f64> = det.cusps().map(|c| c.point[1]).collect();
        xs.sort_by(f64::total_cmp);
        if t > 0.0 {
            if xs.len() != 2 {
                return fail(format!("t = {t}: {} cusps", xs.len()));
            }
            worst_cusp = worst_cusp.max((xs[0] + t.sqrt()).abs()).max((xs[1] - t.sqrt()).abs());
        } else if !xs.is_empty() {
            return fail(format!("t = {t}: {} cusps", xs.len()));
        }
    }
    for t in [MIN_BIRTH_T, -MIN_BIRTH_T, 0.1, -0.1, 0.5, -0.5, 2.0, -2.0] {
        let det = detect_singular_set(&LocalMap::swallow_tail(2, t, 0).unwrap(), &grid, &tol).unwrap();
        if det.cusps().count() != if t > 0.0 { 2 } else { 0 } {
            return fail(format!("cusp birth: t = {t} gives {} cusps", det.cusps().count()));
        }
    }
    if worst_curve >= CURVE_TOL || worst_cusp >= CUSP_TOL {
        return fail(format!("curve deviation {worst_curve:e}, cusp error {worst_cusp:e}"));
    }

    let beta = Profile::bump(0.0, 2.0, 1.0).unwrap();
    let mut worst_image = 0.0f64;
    for amp in [0.0, 0.3, 0.5, 1.0, -0.8] {
        let alpha = Profile::bump(0.25, 1.0, amp).unwrap();
        let r = perturbed_fold_image(3, 1, alpha, beta, &grid, &tol).unwrap();
        if !r.passes {
            return fail(format!("perturbed fold with amplitude {amp}: {r:?}"));
        }
        worst_image = worst_image.max(r.max_image_error).max(r.max_fibre_norm);
    }
    let over = perturbed_fold_image(3, 1, Profile::bump(0.0, 1.0, 1.2).unwrap(), beta, &grid, &tol);
    if !matches!(over, Err(NormalFormError::ConditionViolated { .. })) || worst_image >= IMAGE_TOL {
        return fail(format!("perturbation: worst image error {worst_image:e}, violation check {over:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 0x8);
    let bump = Profile::bump(0.0, 1.5, 0.4).unwrap();
    let maps = [
        LocalMap::fold(4, 2).unwrap(),
        LocalMap::cusp(4, 1).unwrap(),
        LocalMap::swallow_tail(4, 0.5, 1).unwrap(),
        LocalMap::swallow_tail(3, -1.0, 0).unwrap(),
        LocalMap::perturbed_fold(3, 1, bump, beta).unwrap(),
    ];
    let mut worst_jac = 0.0f64;
    for map in &maps {
        for _ in 0..500 {
            let p: Vec<f64> = (0..map.n).map(|_| rng.random_range(-1.5..1.5)).collect();
            worst_jac = worst_jac.max(map.jacobian_relative_error(&p).unwrap());
        }
    }
    if worst_jac >= JACOBIAN_TOL {
        return fail(format!("Jacobian relative error {worst_jac:e}"));
    }
    pass(format!(
        "curve dev {worst_curve:.1e} < {CURVE_TOL:e}, cusp err {worst_cusp:.1e} < {CUSP_TOL:e}, image err {worst_image:.1e} < {IMAGE_TOL:e}, Jacobian {worst_jac:.1e} < {JACOBIAN_TOL:e}"
    ))
}

fn c9() -> Outcome {
    let scratch = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-golden");
    let cases = common::cases();
    let mut mismatches = Vec::new();
    for case in &cases {
        for m in common::check_case(case, &scratch) {
            mismatches.push(format!("{}: {m}", case.name));
        }
    }
    let detail = format!("{} corpus commands, {} golden mismatches", cases.len(), mismatches.len());
    if mismatches.is_empty() { pass(detail) } else { fail(format!("{detail}: {}", mismatches.join(", "))) }
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |id: &str| filter.is_empty() || filter.iter().any(|f| f.eq_ignore_ascii_case(id));
    let mut all_ok = true;
    let mut report = |id: &str, title: &str, budget: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        if !selected(id) {
            return;
        }
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_budget = budget.is_none_or(|b| elapsed < b);
        let ok = out.ok && in_budget;
        all_ok &= ok;
        let timing = match budget {
            Some(b) => format!("{} {} {}", fmt_duration(elapsed), if in_budget { "<" } else { ">=" }, fmt_duration(b)),
            None => fmt_duration(elapsed),
        };
        println!("[{}] {id} {title}: {} ({timing})", if ok { "PASS" } else { "FAIL" }, out.detail);
    };
    println!("acceptance suite, seed {}", seed());
    let (fig1, fig2) = (load("fig1.json"), load("fig2.json"));
    report("C1", "figure reproduction", Some(C1_BUDGET), &mut || c1(&fig1, &fig2));
    report("C2", "generator values", Some(C2_BUDGET), &mut || c2(&fig2));
    report("C3", "homomorphism and inverse laws", Some(C3_BUDGET), &mut c3);
    report("C4", "signed defect identity", Some(C4_BUDGET), &mut c4);
    let all = enumeration();
    report("C5", "predicate equivalences", Some(C5_BUDGET), &mut || c5(&all));
    report("C6", "normalization soundness and completeness", Some(C6_BUDGET), &mut || c6(&all));
    report("C7", "move invariants", Some(C7_BUDGET), &mut || c7(&all));
    report("C8", "numerics", Some(C8_BUDGET), &mut c8);
    report("C9", "CLI golden determinism", None, &mut c9);
    if !all_ok {
        eprintln!("acceptance: at least one criterion failed");
        std::process::exit(1);
    }
}
