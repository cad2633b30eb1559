//! Command implementations behind the `smale-sft` binary. Each command
//! returns its output and exit status instead of printing, so it can be
//! driven from tests.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::acoe::{flip_from_ppacoe, load_bundle, AcoeError, FamilyDescriptor, FlipReport, Verifier};
use crate::asymptotics::{alpha_limit, classify_recurrent, limit_data, omega_limit};
use crate::relations::{asymptotic_level, stable_level, unstable_level};
use crate::sft::{metric, Point, SmaleConstants, TransitionMatrix};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, Default)]
pub struct SessionConfig {
    pub constants: SmaleConstants,
    /// Family bounds given on the command line; they take precedence over
    /// those in a bundle, which take precedence over the defaults.
    pub radius: Option<u32>,
    pub tails: Option<u32>,
    pub periods: Option<u32>,
    pub format: OutputFormat,
}

impl SessionConfig {
    fn periods_or_default(&self) -> u32 {
        self.periods.unwrap_or(FamilyDescriptor::default().periods)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String, code: i32) -> Self {
        CommandOutput {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        CommandOutput {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            code: EXIT_INPUT,
        }
    }
}

/// Parses `p/q` (or an integer) into a rational strictly between 0 and 1.
pub fn parse_lambda(text: &str) -> Result<SmaleConstants, String> {
    let (num, den) = text.split_once('/').unwrap_or((text, "1"));
    let num: BigInt = num.trim().parse().map_err(|_| format!("bad numerator in `{text}`"))?;
    let den: BigInt = den.trim().parse().map_err(|_| format!("bad denominator in `{text}`"))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in `{text}`"));
    }
    SmaleConstants::new(BigRational::new(num, den)).map_err(|e| e.to_string())
}

fn read_matrix(path: &Path) -> Result<TransitionMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    TransitionMatrix::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_point(matrix: &TransitionMatrix, literal: &str) -> Result<Point, String> {
    let x: Point = literal.parse().map_err(|e| format!("`{literal}`: {e}"))?;
    x.check_in(matrix).map_err(|e| format!("`{literal}`: {e}"))?;
    Ok(x)
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn level_text(level: Option<u64>) -> String {
    level.map_or_else(|| "not equivalent".to_string(), |l| l.to_string())
}

pub fn cmd_matrix_info(path: &Path, config: &SessionConfig) -> CommandOutput {
    let matrix = match read_matrix(path) {
        Ok(m) => m,
        Err(e) => return CommandOutput::input_error(e),
    };
    let traces = matrix.power_traces(config.periods_or_default() as usize);
    let out = match config.format {
        OutputFormat::Structured => render_json(&json!({
            "size": matrix.size(),
            "irreducible": matrix.is_irreducible(),
            "non_permutation": matrix.is_non_permutation(),
            "traces": traces.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })),
        OutputFormat::Text => {
            let irreducible = if matrix.is_irreducible() {
                "irreducible"
            } else {
                "not irreducible"
            };
            let kind = if matrix.is_non_permutation() {
                "non-permutation"
            } else {
                "permutation"
            };
            let traces: Vec<String> = traces.iter().map(|t| t.to_string()).collect();
            format!(
                "size {}\n{irreducible} ({kind})\ntraces {}\n",
                matrix.size(),
                traces.join(",")
            )
        }
    };
    CommandOutput::ok(out, EXIT_PASS)
}

pub fn cmd_equiv(matrix_path: &Path, x: &str, z: &str, config: &SessionConfig) -> CommandOutput {
    let parsed = read_matrix(matrix_path).and_then(|m| Ok((read_point(&m, x)?, read_point(&m, z)?)));
    let (x, z) = match parsed {
        Ok(p) => p,
        Err(e) => return CommandOutput::input_error(e),
    };
    let levels = [
        ("stable", stable_level(&x, &z)),
        ("unstable", unstable_level(&x, &z)),
        ("asymptotic", asymptotic_level(&x, &z)),
    ];
    let distance = metric(&x, &z, &config.constants);
    let out = match config.format {
        OutputFormat::Structured => render_json(&json!({
            "x": x.to_string(),
            "z": z.to_string(),
            "stable": levels[0].1,
            "unstable": levels[1].1,
            "asymptotic": levels[2].1,
            "distance": distance.to_string(),
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            for (name, level) in levels {
                let _ = writeln!(s, "{name}: {}", level_text(level));
            }
            let _ = writeln!(s, "distance: {distance}");
            s
        }
    };
    CommandOutput::ok(out, EXIT_PASS)
}

pub fn cmd_limits(matrix_path: &Path, x: &str, config: &SessionConfig) -> CommandOutput {
    let x = match read_matrix(matrix_path).and_then(|m| read_point(&m, x)) {
        Ok(x) => x,
        Err(e) => return CommandOutput::input_error(e),
    };
    let data = limit_data(&x);
    let omega: Vec<String> = omega_limit(&x).iter().map(Point::to_string).collect();
    let alpha: Vec<String> = alpha_limit(&x).iter().map(Point::to_string).collect();
    let recurrence = classify_recurrent(&x);
    let out = match config.format {
        OutputFormat::Structured => render_json(&json!({
            "x": x.to_string(),
            "limits": data,
            "omega": omega,
            "alpha": alpha,
            "recurrence": recurrence,
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "eta_s: {} (period {})", data.eta_s, data.p_s);
            let _ = writeln!(s, "eta_u: {} (period {})", data.eta_u, data.p_u);
            let _ = writeln!(s, "least asymptotic period: {}", data.least_asymptotic_period);
            let _ = writeln!(s, "omega:");
            for p in &omega {
                let _ = writeln!(s, "  {p}");
            }
            let _ = writeln!(s, "alpha:");
            for p in &alpha {
                let _ = writeln!(s, "  {p}");
            }
            let verdict = if recurrence.recurrent {
                "recurrent"
            } else {
                "not recurrent"
            };
            let _ = writeln!(s, "{verdict}");
            s
        }
    };
    CommandOutput::ok(out, EXIT_PASS)
}

#[derive(Serialize)]
#[serde(untagged)]
enum FlipOutcome {
    Report(FlipReport),
    Skipped { skipped: String },
}

pub fn cmd_verify(bundle_path: &Path, config: &SessionConfig) -> CommandOutput {
    let loaded = match load_bundle(bundle_path) {
        Ok(b) => b,
        Err(e) => return CommandOutput::input_error(e),
    };
    let defaults = loaded.descriptor(FamilyDescriptor::default());
    let descriptor = FamilyDescriptor {
        radius: config.radius.unwrap_or(defaults.radius),
        tails: config.tails.unwrap_or(defaults.tails),
        periods: config.periods.unwrap_or(defaults.periods),
    };
    let verifier = Verifier::new(&loaded.bundle, descriptor);
    let report = verifier.verify();

    let mut flip_violated = false;
    let flip = if report.passed() {
        Some(match flip_from_ppacoe(&verifier, &report) {
            Ok(r) => FlipOutcome::Report(r),
            Err(e) => {
                flip_violated = matches!(e, AcoeError::ConditionViolated(_));
                FlipOutcome::Skipped { skipped: e.to_string() }
            }
        })
    } else {
        None
    };
    let passed = report.passed() && !flip_violated;
    let code = if passed { EXIT_PASS } else { EXIT_FAIL };

    let out = match config.format {
        OutputFormat::Structured => render_json(&json!({
            "verdict": if passed { "pass" } else { "fail" },
            "report": report,
            "flip": flip,
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            let f = &report.family;
            let _ = writeln!(
                s,
                "family: R={} Q={} P={} (window radius {}), {} source points, {} source pairs, {} target points, {} target pairs",
                f.radius, f.tails, f.periods, f.window_radius, f.source_points, f.source_pairs, f.target_points, f.target_pairs
            );
            let _ = writeln!(s, "maps: {}", if report.maps.passed() { "ok" } else { "FAIL" });
            if let Some(w) = &report.maps.counterexample {
                let _ = writeln!(s, "  counterexample: {w}");
            }
            for c in &report.conditions {
                let level = c.max_level.map(|l| format!(" (level {l})")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{:<7} {} {}/{}{level}",
                    c.condition,
                    if c.passed { "pass" } else { "FAIL" },
                    c.checked - c.failures,
                    c.checked
                );
                if let Some(w) = &c.counterexample {
                    let _ = writeln!(s, "  counterexample: {w}");
                }
            }
            let steps: Vec<String> = report
                .level_propagation
                .iter()
                .map(|st| format!("K{}={}", st.n, st.measured.map_or("-".into(), |m| m.to_string())))
                .collect();
            let _ = writeln!(
                s,
                "level propagation: {} [{}]",
                if report.level_propagation_holds() {
                    "within bound"
                } else {
                    "bound exceeded"
                },
                steps.join(" ")
            );
            if let Some(r) = report.sufficiency_radius {
                let _ = writeln!(s, "sufficiency radius: {r}");
            }
            if let Some(cert) = report.certificate {
                let _ = writeln!(s, "certificate: {cert:?}");
            }
            match &flip {
                Some(FlipOutcome::Report(r)) => {
                    let _ = writeln!(s, "classification: {:?}", r.classification);
                }
                Some(FlipOutcome::Skipped { skipped }) => {
                    let _ = writeln!(s, "classification: not available ({skipped})");
                }
                None => {}
            }
            let _ = writeln!(s, "verdict: {}", if passed { "pass" } else { "fail" });
            s
        }
    };
    CommandOutput::ok(out, code)
}
