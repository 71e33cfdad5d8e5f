//! Command implementations; each returns the full stdout text and exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cuspcobord::cobordism_group::GroupError;
use cuspcobord::invariants::{morse_van_schaack, InvariantError};
use cuspcobord::moves::{normalize_even, normalize_odd, MoveError, NormalizeOutcome, Obstruction};
use cuspcobord::normal_forms::{
    detect_singular_set, perturbed_fold_image, render_svg, samples_to_csv, trace_curves, GridSpec, LocalMap,
    NormalFormError, Profile, RunManifest, Tolerances,
};
use cuspcobord::singular_pattern::PatternError;
use cuspcobord::{chi_plus_sigma, cobordism_invariant, is_cobordant, MorseDescriptor, SignAssignment, SingularPattern};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::{Cli, Command, PatternAction, PatternOptions, TraceArgs, TraceKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn new(text: String, code: u8) -> Self {
        Self { text, code }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Invariant { file } => invariant(file, cli.json),
        Command::Cobordant { first, second } => cobordant(first, second, cli.json),
        Command::Extendable { file, sigma } => extendable(file, sigma.as_deref(), cli.json),
        Command::Pattern { action } => match action {
            PatternAction::Validate { pattern } => pattern_validate(pattern, cli.json),
            PatternAction::Check { opts } => pattern_check(opts, cli.json),
            PatternAction::Normalize { opts, assume_removable, out } => {
                pattern_normalize(opts, *assume_removable, out.as_deref(), cli.json)
            }
        },
        Command::Trace(args) => trace(args, cli.json),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn load_descriptor(path: &Path) -> Result<MorseDescriptor, CliError> {
    let d: MorseDescriptor = read_json(path)?;
    let report = d.validate();
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("{}: {}", path.display(), report.to_string().replace('\n', "; "))));
    }
    Ok(d)
}

fn invariant_value(d: &MorseDescriptor) -> Value {
    let class = cobordism_invariant(d);
    json!({
        "n": d.n,
        "chi_M": d.chi_m,
        "chi_plus": cuspcobord::chi_plus(d),
        "invariant": class.value,
        "group": class.group_name(),
    })
}

fn invariant(file: &Path, as_json: bool) -> Result<Output, CliError> {
    let d = load_descriptor(file)?;
    let v = invariant_value(&d);
    let text = if as_json {
        pretty(&v)
    } else {
        format!("n={} chi_M={} chi_plus={} invariant={} group={}\n", v["n"], v["chi_M"], v["chi_plus"], v["invariant"], v["group"].as_str().unwrap_or_default())
    };
    Ok(Output::new(text, 0))
}

fn cobordant(first: &Path, second: &Path, as_json: bool) -> Result<Output, CliError> {
    let (a, b) = (load_descriptor(first)?, load_descriptor(second)?);
    let yes = is_cobordant(&a, &b)?;
    let (ca, cb) = (cobordism_invariant(&a), cobordism_invariant(&b));
    let text = if as_json {
        pretty(&json!({
            "cobordant": yes,
            "first": invariant_value(&a),
            "second": invariant_value(&b),
        }))
    } else {
        format!(
            "cobordant={} first={} second={} group={}\n",
            if yes { "yes" } else { "no" },
            ca.value,
            cb.value,
            ca.group_name()
        )
    };
    Ok(Output::new(text, if yes { 0 } else { 1 }))
}

fn extendable(file: &Path, sigma: Option<&Path>, as_json: bool) -> Result<Output, CliError> {
    let d = load_descriptor(file)?;
    let sigma = match sigma {
        Some(path) => read_json::<SignAssignment>(path)?,
        None => SignAssignment::stored(&d.boundary),
    };
    let chi_plus = chi_plus_sigma(&d.boundary, &sigma)?;
    let holds = morse_van_schaack(d.n, d.chi_m, &d.boundary, &sigma)?;
    let relation = if d.n % 2 == 0 {
        let (l, r) = (chi_plus.rem_euclid(2), d.chi_m.rem_euclid(2));
        format!("{l} {} {r} mod 2", if holds { "≡" } else { "≢" })
    } else {
        format!("{chi_plus} {} {}", if holds { "=" } else { "≠" }, d.chi_m)
    };
    let verdict = if holds { "holds" } else { "FAILS" };
    let text = if as_json {
        pretty(&json!({
            "n": d.n,
            "chi_M": d.chi_m,
            "chi_plus": chi_plus,
            "extendable": holds,
            "relation": relation,
        }))
    } else {
        format!(
            "n={} chi_M={} chi_plus={} extendable={}\nnecessary condition {verdict} ({relation})\n",
            d.n,
            d.chi_m,
            chi_plus,
            if holds { "yes" } else { "no" }
        )
    };
    Ok(Output::new(text, if holds { 0 } else { 1 }))
}

fn load_pattern(opts: &PatternOptions) -> Result<(SingularPattern, SignAssignment), CliError> {
    let p: SingularPattern = read_json(&opts.pattern)?;
    let sigma = match &opts.sigma {
        Some(path) => read_json::<SignAssignment>(path)?,
        None => SignAssignment::stored(&p.boundary_points),
    };
    Ok((p, sigma))
}

fn pattern_validate(path: &Path, as_json: bool) -> Result<Output, CliError> {
    let p: SingularPattern = read_json(path)?;
    let report = p.validate();
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    let valid = report.is_valid();
    let text = if as_json {
        pretty(&json!({
            "valid": valid,
            "n": p.n,
            "components": p.components.len(),
            "cusps": p.total_cusps(),
            "violations": violations,
        }))
    } else {
        let mut s = format!(
            "{} n={} components={} cusps={}\n",
            if valid { "valid" } else { "invalid" },
            p.n,
            p.components.len(),
            p.total_cusps()
        );
        for v in &violations {
            let _ = writeln!(s, "violation: {v}");
        }
        s
    };
    Ok(Output::new(text, if valid { 0 } else { 1 }))
}

fn pattern_check(opts: &PatternOptions, as_json: bool) -> Result<Output, CliError> {
    let (p, sigma) = load_pattern(opts)?;
    let even = p.n % 2 == 0;
    let conditions = if even { p.check_condition_even(&sigma)? } else { p.check_condition_odd(&sigma)? };
    let field = p.vector_field_exists(&sigma)?;
    let chi_v = opts.chi_v.or(p.chi_ambient);
    let lemma51 = match chi_v {
        Some(chi) => Some(p.clone().with_chi_ambient(chi).lemma51_check()?),
        None => None,
    };
    let aggregate: Option<(String, String)> = if even {
        match (chi_v, lemma51) {
            (Some(chi), Some(true)) => {
                let (l, r) = p.aggregate_even(&sigma, chi)?;
                Some((l.to_string(), r.to_string()))
            }
            _ => None,
        }
    } else {
        let (l, r) = p.aggregate_odd(&sigma)?;
        Some((l.to_string(), r.to_string()))
    };
    let all = conditions.iter().all(|&b| b);
    let rows: Vec<Value> = p
        .components
        .iter()
        .zip(&conditions)
        .enumerate()
        .map(|(k, (c, ok))| {
            json!({
                "component": k,
                "kind": if c.is_circle() { "circle" } else { "interval" },
                "cusps": c.cusp_count(),
                "condition": ok,
            })
        })
        .collect();
    let text = if as_json {
        pretty(&json!({
            "n": p.n,
            "condition": if even { "even" } else { "odd" },
            "components": rows,
            "all_conditions": all,
            "vector_field_exists": field,
            "chi_v": chi_v,
            "lemma51": lemma51,
            "aggregate": aggregate.as_ref().map(|(l, r)| json!({"lhs": l, "rhs": r})),
        }))
    } else {
        let mut s = format!("n={} condition={}\n", p.n, if even { "even" } else { "odd" });
        for row in &rows {
            let _ = writeln!(
                s,
                "component={} kind={} cusps={} condition={}",
                row["component"],
                row["kind"].as_str().unwrap_or_default(),
                row["cusps"],
                row["condition"]
            );
        }
        let _ = writeln!(s, "all_conditions={all} vector_field_exists={field}");
        if let (Some(chi), Some(l51)) = (chi_v, lemma51) {
            let _ = writeln!(s, "chi_v={chi} lemma51={l51}");
        }
        if let Some((l, r)) = &aggregate {
            let _ = writeln!(s, "aggregate lhs={l} rhs={r}");
        }
        s
    };
    Ok(Output::new(text, if all { 0 } else { 1 }))
}

fn obstruction_line(o: &Obstruction) -> String {
    let kind = serde_json::to_value(o.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
    let mut s = format!("normalized=no obstruction={kind} lhs={} rhs={}", o.witness.lhs, o.witness.rhs);
    if let Some(m) = o.witness.modulus {
        let _ = write!(s, " modulus={m}");
    }
    if let Some(sum) = o.witness.signed_sum {
        let _ = write!(s, " signed_sum={sum}");
    }
    let _ = writeln!(s, "\nrelation: {}", o.witness.relation);
    s
}

fn pattern_normalize(
    opts: &PatternOptions,
    assume_removable: bool,
    out: Option<&Path>,
    as_json: bool,
) -> Result<Output, CliError> {
    let (p, sigma) = load_pattern(opts)?;
    let outcome = if p.n % 2 == 0 {
        let chi_v = opts
            .chi_v
            .or(p.chi_ambient)
            .ok_or_else(|| CliError::Invalid("even dimension needs --chi-v or chi_ambient".into()))?;
        normalize_even(&p, &sigma, chi_v, assume_removable)?
    } else {
        normalize_odd(&p, &sigma)?
    };
    match outcome {
        NormalizeOutcome::Normalized(trace) => {
            if let Some(path) = out {
                write_file(path, &pretty(&trace))?;
            }
            let text = if as_json {
                pretty(&trace)
            } else {
                format!(
                    "normalized=yes moves={} cusps_before={} cusps_after={} components_after={} replay={}\n",
                    trace.moves.len(),
                    trace.initial.total_cusps(),
                    trace.final_pattern.total_cusps(),
                    trace.final_pattern.components.len(),
                    if trace.verify() { "ok" } else { "FAILED" }
                )
            };
            Ok(Output::new(text, 0))
        }
        NormalizeOutcome::Obstructed(o) => {
            let text = if as_json { pretty(&o) } else { obstruction_line(&o) };
            Ok(Output::new(text, 1))
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn trace(args: &TraceArgs, as_json: bool) -> Result<Output, CliError> {
    let grid: GridSpec = args.grid.parse()?;
    let tol = Tolerances { margin: args.margin, ..Tolerances::default() };
    let mut summary = serde_json::Map::new();
    let mut code = 0;
    let map = match args.kind {
        TraceKind::Swallowtail => {
            summary.insert("t".into(), json!(args.t));
            LocalMap::swallow_tail(args.n, args.t, args.i)?
        }
        TraceKind::Fold => LocalMap::fold(args.n, args.i)?,
        TraceKind::Cusp => LocalMap::cusp(args.n, args.i)?,
        TraceKind::PerturbedFold => {
            let alpha = Profile::bump(args.alpha_center, args.alpha_radius, args.alpha_amp)?;
            let beta = Profile::bump(args.beta_center, args.beta_radius, args.beta_amp)?;
            let report = perturbed_fold_image(args.n, args.i, alpha, beta, &grid, &tol)?;
            if !report.passes {
                code = 1;
            }
            summary.insert("condition_sup".into(), json!(format!("{:.6}", report.condition.sup_exact)));
            summary.insert("max_fibre_norm".into(), json!(format!("{:.3e}", report.max_fibre_norm)));
            summary.insert("max_image_error".into(), json!(format!("{:.3e}", report.max_image_error)));
            summary.insert("image_matches".into(), json!(report.passes));
            LocalMap::perturbed_fold(args.n, args.i, alpha, beta)?
        }
    };
    let detection = detect_singular_set(&map, &grid, &tol)?;
    let csv = args.csv;
    let content = if csv { samples_to_csv(&map, &detection) } else { render_svg(&trace_curves(&map, &detection)) };
    let Some(out) = &args.out else {
        return Ok(Output::new(content, code));
    };
    write_file(out, &content)?;
    let mut outputs = vec![file_name(out)];
    if let Some(path) = &args.manifest {
        outputs.push(file_name(path));
        let manifest = RunManifest::new(&map, &grid, &tol, &detection, outputs.clone());
        write_file(path, &pretty(&manifest))?;
    }
    summary.insert("map".into(), json!(map.name()));
    summary.insert("n".into(), json!(args.n));
    summary.insert("samples".into(), json!(detection.samples.len()));
    summary.insert("cusps".into(), json!(detection.cusps().count()));
    summary.insert("format".into(), json!(if csv { "csv" } else { "svg" }));
    summary.insert("outputs".into(), json!(outputs));
    let text = if as_json {
        pretty(&Value::Object(summary))
    } else {
        let mut s = String::new();
        for key in ["map", "n", "t", "samples", "cusps", "format"] {
            if let Some(v) = summary.get(key) {
                let _ = write!(s, "{}{key}={}", if s.is_empty() { "" } else { " " }, v.as_str().map_or(v.to_string(), str::to_owned));
            }
        }
        s.push('\n');
        if summary.contains_key("condition_sup") {
            for key in ["condition_sup", "max_fibre_norm", "max_image_error", "image_matches"] {
                let v = &summary[key];
                let _ = write!(s, "{key}={} ", v.as_str().map_or(v.to_string(), str::to_owned));
            }
            s.pop();
            s.push('\n');
        }
        s
    };
    Ok(Output::new(text, code))
}
