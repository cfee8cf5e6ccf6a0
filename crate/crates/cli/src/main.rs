//! Command-line front end: run protocols, screen candidate letter bases,
//! verify the analyzer, compute eavesdropper statistics and detection curves,
//! and print the efficiency table of known schemes.
//!
//! Every command emits a report document carrying a provenance block (seed,
//! request hash, version) so results can be replayed bit-exactly.
//!
//! Exit codes: 0 success, 2 validation/parse error, 3 vulnerable verdict
//! under `screen-basis --strict`.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qkd_core::attacks::{
    by_name, exact_eve_stats, strategy_sweep, AttackStrategy, EveStats, InterceptParams,
};
use qkd_core::basisclass::{parse_letter_basis, screen_basis, LetterBasis, Verdict};
use qkd_core::infotheory::{scheme_table, Qualifier};
use qkd_core::optics::{
    analyze_letter, analyzer_transform, apply_mode_transform, discriminate, encode_letter,
    sample_click, ClickPattern,
};
use qkd_core::protocol::{
    detection_curve, render_records, render_summary, run_protocol, ProtocolConfig, TimingParams,
};
use qkd_core::qstate::derive_rng;

const EXIT_VALIDATION: u8 = 2;
const EXIT_VULNERABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "qkd", version, about = "Two-qubit QKD simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a protocol run described by a TOML config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed from the config
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Classify a letter basis and screen it for known vulnerabilities
    ScreenBasis {
        #[arg(long)]
        basis: PathBuf,
        /// Exit with status 3 when the verdict is vulnerable
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Verify the analyzer's click distributions exactly and by sampling
    AnalyzerCheck {
        #[arg(long, default_value_t = 100_000)]
        shots: usize,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Exact information gain / detection probability of an attack on a basis
    EveStats {
        #[arg(long)]
        basis: PathBuf,
        /// Attack name, optionally with parameters:
        /// none | local-measure-2 | ancilla-swap |
        /// intercept-resend,theta1=<angle|pass>,theta2=<angle|pass>
        #[arg(long)]
        attack: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Sweep intercept-resend parameters over a grid against a basis
    Sweep {
        #[arg(long)]
        basis: PathBuf,
        /// Grid spec: theta1=<axis>,theta2=<axis> where <axis> is
        /// start:end:count, a single angle, or "pass"
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Cumulative detection probability 1-(1-p)^N for N = 1..n_max
    DetectionCurve {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Efficiency table of known key-distribution schemes
    Table1 {
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

// ---------------------------------------------------------------------------
// Report document
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct Provenance {
    version: String,
    /// Master seed of any randomized computation in the payload.
    seed: Option<u64>,
    /// SHA-256 of the canonical resolved request.
    request_sha256: String,
}

#[derive(Serialize, Deserialize)]
struct ReportDocument {
    command: String,
    provenance: Provenance,
    payload: Value,
}

impl ReportDocument {
    fn new(command: &str, seed: Option<u64>, request: &Value, payload: Value) -> Self {
        let canonical = serde_json::to_string(request).expect("request serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        ReportDocument {
            command: command.into(),
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").into(),
                seed,
                request_sha256: hex::encode(digest),
            },
            payload,
        }
    }
}

/// What each command hands back: the report plus its format renderings.
struct Rendered {
    doc: ReportDocument,
    human: String,
    csv: String,
}

impl Rendered {
    fn print(&self, format: Format) {
        match format {
            Format::Human => print!("{}", self.human),
            Format::Csv => print!("{}", self.csv),
            Format::Json => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&self.doc).expect("report serializes")
                );
            }
        }
    }
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

// ---------------------------------------------------------------------------
// Run config file
// ---------------------------------------------------------------------------

#[derive(Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_test_fraction")]
    test_fraction: f64,
    #[serde(default = "default_seed")]
    seed: u64,
    /// Attack spec, same syntax as `eve-stats --attack`.
    #[serde(default = "default_attack")]
    attack: String,
    /// "canonical" | "bell" | "product" | path to a basis file.
    #[serde(default = "default_basis")]
    basis: String,
    #[serde(default)]
    timing: TimingSection,
}

fn default_steps() -> usize {
    1000
}
fn default_test_fraction() -> f64 {
    0.5
}
fn default_seed() -> u64 {
    42
}
fn default_attack() -> String {
    "none".into()
}
fn default_basis() -> String {
    "canonical".into()
}

#[derive(Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
struct TimingSection {
    #[serde(default = "default_path_length")]
    path_length: f64,
    #[serde(default = "default_ring_length")]
    ring_length: f64,
    #[serde(default = "default_speed")]
    speed: f64,
}

impl Default for TimingSection {
    fn default() -> Self {
        Self {
            path_length: default_path_length(),
            ring_length: default_ring_length(),
            speed: default_speed(),
        }
    }
}

fn default_path_length() -> f64 {
    100.0
}
fn default_ring_length() -> f64 {
    60.0
}
fn default_speed() -> f64 {
    1.0
}

fn load_basis_named(name: &str) -> Result<LetterBasis<f64>> {
    match name {
        "canonical" => Ok(LetterBasis::canonical_202()),
        "bell" => Ok(LetterBasis::bell_004()),
        "product" => Ok(LetterBasis::product_400()),
        path => load_basis_file(&PathBuf::from(path)),
    }
}

fn load_basis_file(path: &PathBuf) -> Result<LetterBasis<f64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read basis file {}", path.display()))?;
    parse_letter_basis(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// Attack and grid spec parsing
// ---------------------------------------------------------------------------

fn parse_angle(v: &str) -> Result<Option<f64>> {
    if v == "pass" {
        return Ok(None);
    }
    v.parse::<f64>()
        .map(Some)
        .map_err(|_| anyhow!("bad angle {v:?} (expected a real number or \"pass\")"))
}

fn parse_attack(spec: &str) -> Result<AttackStrategy<f64>> {
    let mut parts = spec.split(',');
    let name = parts.next().unwrap_or("").trim();
    let params: Vec<&str> = parts.map(str::trim).collect();
    if name != "intercept-resend" {
        if !params.is_empty() {
            bail!("attack {name:?} takes no parameters");
        }
        return by_name(name).ok_or_else(|| {
            anyhow!(
                "unknown attack {name:?}; expected none, local-measure-2, \
                 ancilla-swap or intercept-resend"
            )
        });
    }
    let mut theta1 = None;
    let mut theta2 = None;
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| anyhow!("bad attack parameter {p:?} (expected key=value)"))?;
        match key.trim() {
            "theta1" => theta1 = parse_angle(value.trim())?,
            "theta2" => theta2 = parse_angle(value.trim())?,
            other => bail!("unknown intercept-resend parameter {other:?}"),
        }
    }
    Ok(AttackStrategy::intercept_resend(theta1, theta2))
}

/// One grid axis: a list of measurement angles, `None` meaning "pass".
fn parse_axis(spec: &str) -> Result<Vec<Option<f64>>> {
    if spec == "pass" {
        return Ok(vec![None]);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_angle(single)?]),
        [start, end, count] => {
            let start: f64 = start.parse().map_err(|_| anyhow!("bad axis start {start:?}"))?;
            let end: f64 = end.parse().map_err(|_| anyhow!("bad axis end {end:?}"))?;
            let count: usize = count.parse().map_err(|_| anyhow!("bad axis count {count:?}"))?;
            if count == 0 {
                bail!("axis count must be at least 1");
            }
            if count == 1 {
                return Ok(vec![Some(start)]);
            }
            let step = (end - start) / (count - 1) as f64;
            Ok((0..count).map(|k| Some(start + step * k as f64)).collect())
        }
        _ => bail!("bad axis {spec:?} (expected start:end:count, an angle, or \"pass\")"),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<InterceptParams<f64>>> {
    let mut axis1 = vec![None];
    let mut axis2 = vec![None];
    let mut seen = Vec::new();
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("bad grid component {part:?} (expected key=axis)"))?;
        let key = key.trim();
        if seen.contains(&key.to_string()) {
            bail!("grid names {key:?} twice");
        }
        seen.push(key.to_string());
        match key {
            "theta1" => axis1 = parse_axis(value.trim())?,
            "theta2" => axis2 = parse_axis(value.trim())?,
            other => bail!("unknown grid axis {other:?} (expected theta1 or theta2)"),
        }
    }
    if seen.is_empty() {
        bail!("empty grid spec");
    }
    Ok(axis1
        .iter()
        .flat_map(|&theta1| axis2.iter().map(move |&theta2| InterceptParams { theta1, theta2 }))
        .collect())
}

fn angle_label(a: Option<f64>) -> String {
    a.map_or_else(|| "pass".into(), |v| format!("{v:.6}"))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_run(path: &PathBuf, seed_override: Option<u64>, _format: Format) -> Result<Rendered> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut file: RunConfigFile =
        toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))?;
    if let Some(seed) = seed_override {
        file.seed = seed;
    }
    let basis = load_basis_named(&file.basis)?;
    let attack = parse_attack(&file.attack)?;
    let config = ProtocolConfig {
        steps: file.steps,
        basis,
        attack,
        test_fraction: file.test_fraction,
        master_seed: file.seed,
        timing: TimingParams {
            path_length: file.timing.path_length,
            ring_length: file.timing.ring_length,
            speed: file.timing.speed,
        },
    };
    let run = run_protocol(&config)?;

    let key_string = |k: &[u8]| k.iter().map(|b| b.to_string()).collect::<String>();
    let request = serde_json::to_value(&file)?;
    let payload = json!({
        "config": request,
        "summary": {
            "key_bits": run.summary.alice_key.len(),
            "tested_pairs": run.summary.tested_pairs,
            "mismatches": run.summary.mismatches,
            "detected": run.summary.eavesdropper_detected,
            "efficiency": run.summary.efficiency.value,
            "exceeds_bound": run.summary.efficiency.exceeds_bound,
            "alice_key": key_string(&run.summary.alice_key),
            "bob_key": key_string(&run.summary.bob_key),
        },
        "transcript": {
            "announced_arrival": run.transcript.announced_arrival,
            "announced_pair_delay": run.transcript.announced_pair_delay,
        },
        "records": render_records(&run.records),
    });
    let human = format!(
        "steps = {}\nattack = {}\nbasis = {}\nseed = {}\n{}",
        file.steps,
        file.attack,
        file.basis,
        file.seed,
        render_summary(&run.summary)
    );
    let csv = render_records(&run.records);
    Ok(Rendered {
        doc: ReportDocument::new("run", Some(file.seed), &request, payload),
        human,
        csv,
    })
}

fn cmd_screen_basis(path: &PathBuf, strict: bool) -> Result<(Rendered, u8)> {
    let basis = load_basis_file(path)?;
    let report = screen_basis(&basis)?;
    let request = json!({ "basis": fs::read_to_string(path)?, "strict": strict });

    let classes: Vec<String> = report
        .classification
        .classes
        .iter()
        .map(|c| format!("{c:?}").to_lowercase())
        .collect();
    let pairs: Vec<Value> = report
        .mor
        .pairs
        .iter()
        .map(|p| {
            json!({
                "i": p.i, "j": p.j,
                "first_nonorthogonal": p.first_nonorthogonal,
                "first_nonidentical": p.first_nonidentical,
                "second_nonorthogonal": p.second_nonorthogonal,
                "satisfies": p.satisfies,
            })
        })
        .collect();
    let payload = json!({
        "signature": report.classification.signature.to_string(),
        "concurrences": report.classification.concurrences,
        "classes": classes,
        "boundary_flags": report.classification.boundary_flags,
        "verdict": report.verdict.to_string(),
        "pairwise_reduction": {
            "satisfying_pairs": report.mor.satisfying_pairs(),
            "pairs": pairs,
        },
    });

    let mut human = format!(
        "signature = {}\nverdict = {}\n",
        report.classification.signature, report.verdict
    );
    for (i, c) in report.classification.concurrences.iter().enumerate() {
        human.push_str(&format!(
            "letter {i}: concurrence {} ({})\n",
            f4(*c),
            classes[i]
        ));
    }
    human.push_str(&format!(
        "pairwise reduction condition: {} of {} pairs satisfied\n",
        report.mor.satisfying_pairs(),
        report.mor.pairs.len()
    ));

    let mut csv = String::from("letter,concurrence,class\n");
    for (i, c) in report.classification.concurrences.iter().enumerate() {
        csv.push_str(&format!("{i},{c},{}\n", classes[i]));
    }

    let code = if strict && report.verdict != Verdict::CandidateSecure {
        EXIT_VULNERABLE
    } else {
        0
    };
    Ok((
        Rendered {
            doc: ReportDocument::new("screen-basis", None, &request, payload),
            human,
            csv,
        },
        code,
    ))
}

fn cmd_analyzer_check(shots: usize) -> Result<Rendered> {
    const SEED: u64 = 7;
    let basis = LetterBasis::<f64>::canonical_202();
    let analyzer = analyzer_transform::<f64>();
    let mut rng = derive_rng(SEED, 0);
    let request = json!({ "shots": shots, "seed": SEED });

    let mut letters = Vec::new();
    let mut human = String::new();
    let mut csv = String::from("letter,pattern,exact,observed\n");
    for letter in 0..4usize {
        let exact = analyze_letter(&basis, letter)?;
        let out = apply_mode_transform(&encode_letter(letter, &basis)?, &analyzer);
        let mut counts: BTreeMap<ClickPattern, usize> = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(sample_click(&out, &mut rng)).or_default() += 1;
        }
        let success: f64 = exact
            .iter()
            .filter(|(c, _)| discriminate(*c) == Some(letter))
            .map(|(_, p)| p)
            .sum();
        let mut rows = Vec::new();
        human.push_str(&format!("letter {letter} (success {}):\n", f4(success)));
        for (pattern, p) in exact.iter().filter(|(_, p)| *p > 1e-12) {
            let observed = counts.get(pattern).copied().unwrap_or(0) as f64 / shots as f64;
            human.push_str(&format!(
                "  {pattern}: exact {} observed {}\n",
                f4(*p),
                f4(observed)
            ));
            csv.push_str(&format!("{letter},{pattern},{p},{observed}\n"));
            rows.push(json!({
                "pattern": pattern.to_string(),
                "exact": p,
                "observed": observed,
            }));
        }
        letters.push(json!({
            "letter": letter,
            "discrimination_success": success,
            "patterns": rows,
        }));
    }
    let payload = json!({ "shots": shots, "letters": letters });
    Ok(Rendered {
        doc: ReportDocument::new("analyzer-check", Some(SEED), &request, payload),
        human,
        csv,
    })
}

fn stats_payload(stats: &EveStats<f64>) -> Value {
    let per_letter: Vec<Value> = stats
        .per_letter
        .iter()
        .map(|l| {
            json!({
                "p_bob_correct": l.p_bob_correct,
                "guess_dist": l.guess_dist,
            })
        })
        .collect();
    json!({
        "info_gain": stats.info_gain,
        "detect_prob": stats.detect_prob,
        "per_letter": per_letter,
    })
}

fn cmd_eve_stats(path: &PathBuf, attack_spec: &str) -> Result<Rendered> {
    let basis = load_basis_file(path)?;
    let attack = parse_attack(attack_spec)?;
    let stats = exact_eve_stats(&basis, &attack)?;
    let request = json!({ "basis": fs::read_to_string(path)?, "attack": attack_spec });

    let mut human = format!(
        "attack = {}\ninfo_gain = {} bits\ndetect_prob = {}\n",
        attack.name(),
        f4(stats.info_gain),
        f4(stats.detect_prob)
    );
    let mut csv = String::from("letter,p_bob_correct,guess0,guess1,guess2,guess3\n");
    for (i, l) in stats.per_letter.iter().enumerate() {
        human.push_str(&format!(
            "letter {i}: bob correct {}, eve guesses {}\n",
            f4(l.p_bob_correct),
            l.guess_dist.map(f4).join(" ")
        ));
        csv.push_str(&format!(
            "{i},{},{}\n",
            l.p_bob_correct,
            l.guess_dist.map(|g| g.to_string()).join(",")
        ));
    }
    let payload = json!({
        "attack": attack.name(),
        "stats": stats_payload(&stats),
    });
    Ok(Rendered {
        doc: ReportDocument::new("eve-stats", None, &request, payload),
        human,
        csv,
    })
}

fn cmd_sweep(path: &PathBuf, grid_spec: &str) -> Result<Rendered> {
    let basis = load_basis_file(path)?;
    let grid = parse_grid(grid_spec)?;
    let sweep = strategy_sweep(&basis, &grid)?;
    let request = json!({ "basis": fs::read_to_string(path)?, "grid": grid_spec });

    let mut points = Vec::new();
    let mut human = String::new();
    let mut csv = String::from("theta1,theta2,info_gain,detect_prob\n");
    for (params, stats) in &sweep.points {
        human.push_str(&format!(
            "theta1={} theta2={}: info {} detect {}\n",
            angle_label(params.theta1),
            angle_label(params.theta2),
            f4(stats.info_gain),
            f4(stats.detect_prob)
        ));
        csv.push_str(&format!(
            "{},{},{},{}\n",
            angle_label(params.theta1),
            angle_label(params.theta2),
            stats.info_gain,
            stats.detect_prob
        ));
        points.push(json!({
            "theta1": params.theta1,
            "theta2": params.theta2,
            "info_gain": stats.info_gain,
            "detect_prob": stats.detect_prob,
        }));
    }
    let best = &sweep.points[sweep.best_info_gain];
    let least = &sweep.points[sweep.least_detectable];
    human.push_str(&format!(
        "best info gain: theta1={} theta2={} ({} bits)\n",
        angle_label(best.0.theta1),
        angle_label(best.0.theta2),
        f4(best.1.info_gain)
    ));
    human.push_str(&format!(
        "least detectable: theta1={} theta2={} (detect {})\n",
        angle_label(least.0.theta1),
        angle_label(least.0.theta2),
        f4(least.1.detect_prob)
    ));
    let payload = json!({
        "points": points,
        "best_info_gain": sweep.best_info_gain,
        "least_detectable": sweep.least_detectable,
    });
    Ok(Rendered {
        doc: ReportDocument::new("sweep", None, &request, payload),
        human,
        csv,
    })
}

fn cmd_detection_curve(p: f64, n_max: usize) -> Result<Rendered> {
    let curve = detection_curve(p, n_max)?;
    let request = json!({ "p": p, "n_max": n_max });
    let mut human = format!("per-test detection probability p = {}\n", f4(p));
    let mut csv = String::from("N,probability\n");
    let mut points = Vec::new();
    for (i, q) in curve.iter().enumerate() {
        human.push_str(&format!("N={}: {}\n", i + 1, f4(*q)));
        csv.push_str(&format!("{},{q}\n", i + 1));
        points.push(json!({ "n": i + 1, "probability": q }));
    }
    let payload = json!({ "p": p, "points": points });
    Ok(Rendered {
        doc: ReportDocument::new("detection-curve", None, &request, payload),
        human,
        csv,
    })
}

fn cmd_table1() -> Result<Rendered> {
    let rows = scheme_table();
    let request = json!({});
    let mut human = String::from("scheme                     b_s    q_t    b_t    efficiency\n");
    let mut csv = String::from("scheme,secret_bits,qubits,classical_bits,efficiency\n");
    let mut payload_rows = Vec::new();
    for row in &rows {
        let qualifier = match row.qualifier {
            Qualifier::Exact => "exact",
            Qualifier::UpperBound => "upper-bound",
            Qualifier::StrictBound => "strict-bound",
        };
        human.push_str(&format!(
            "{:<26} {:<6} {:<6} {:<6} {}\n",
            row.scheme,
            row.secret_bits,
            row.qubits,
            row.classical_bits,
            row.efficiency_display()
        ));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.scheme,
            row.secret_bits,
            row.qubits,
            row.classical_bits,
            row.efficiency_display()
        ));
        payload_rows.push(json!({
            "scheme": row.scheme,
            "secret_bits": row.secret_bits.to_string(),
            "qubits": row.qubits.to_string(),
            "classical_bits": row.classical_bits.to_string(),
            "efficiency_exact": row.efficiency_ratio().to_string(),
            "efficiency_display": row.efficiency_display(),
            "qualifier": qualifier,
        }));
    }
    let payload = json!({ "rows": payload_rows });
    Ok(Rendered {
        doc: ReportDocument::new("table1", None, &request, payload),
        human,
        csv,
    })
}

// ---------------------------------------------------------------------------

fn dispatch(cli: Cli) -> Result<(Rendered, Format, u8)> {
    match cli.cmd {
        Cmd::Run {
            config,
            seed,
            format,
        } => Ok((cmd_run(&config, seed, format)?, format, 0)),
        Cmd::ScreenBasis {
            basis,
            strict,
            format,
        } => {
            let (rendered, code) = cmd_screen_basis(&basis, strict)?;
            Ok((rendered, format, code))
        }
        Cmd::AnalyzerCheck { shots, format } => Ok((cmd_analyzer_check(shots)?, format, 0)),
        Cmd::EveStats {
            basis,
            attack,
            format,
        } => Ok((cmd_eve_stats(&basis, &attack)?, format, 0)),
        Cmd::Sweep {
            basis,
            grid,
            format,
        } => Ok((cmd_sweep(&basis, &grid)?, format, 0)),
        Cmd::DetectionCurve { p, n_max, format } => {
            Ok((cmd_detection_curve(p, n_max)?, format, 0))
        }
        Cmd::Table1 { format } => Ok((cmd_table1()?, format, 0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok((rendered, format, code)) => {
            rendered.print(format);
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
