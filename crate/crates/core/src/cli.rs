//! Batch front end: configuration files, command dispatch and reports.
//!
//! Reports are `key=value` lines. Rationals are always printed as `n/d` in
//! lowest terms and doubles with 17 significant digits.

use std::fmt::{self, Display, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifier::{
    self, Certificate, ConfigViolation, ProbeResult, SpectralVerdict, ZSetStatus,
};
use crate::error::{Error, Result};
use crate::exactmath::{format_rational, parse_rational, to_f64, Rational};
use crate::hadamard::{canonical_l, is_admissible};
use crate::measure::{
    mu_hat_eval, stage_sequence, truncate_with_cap, StagePair, SymbolicWord, SystemConfig,
    DEFAULT_ATOM_CAP,
};
use crate::oracle::search_compatible_l_limited;
use crate::spectra::{build_tower_spectrum, q_function, verify_spectrum_finite, SpectrumCandidate};
use crate::tiling::TileCertificate;

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// Check the coprimality hypotheses of the alphabet.
    Validate,
    /// Decide spectrality of the word measure.
    Classify,
    /// Two-stage family from the first two pairs: (b1, p1, t1), (p2, ., t2).
    TwoStage,
    /// Build the tower spectrum of a truncation.
    Spectrum,
    /// Verify a finite spectrum (tower by default, or --points) exactly.
    Verify,
    /// Maximum deviation of the Q-function from 1 on a grid in [0, 1).
    Qcheck,
    /// Integral periodic zero set criteria, with an optional probe at --xi.
    Zeros,
    /// Tiling decision for the two-stage support.
    Tile,
    /// Sample the Fourier transform to CSV (x, re, im, abs).
    SampleFt,
    /// Compare truncations with the measure described by --against.
    RewriteCheck,
    /// Exhaustive search for spectrum digit sets of one letter.
    OracleSearch,
    /// Necessary conditions along the stage sequence of the word.
    Necessity,
}

#[derive(Parser, Debug, Clone)]
#[command(
    name = "moran",
    version,
    about = "Spectrality of Moran infinite convolutions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Word as "preperiod;period", e.g. "1;2" or ";1,2". Overrides the file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// Truncation depth; the horizon for `necessity`
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Grid points for `qcheck`, subintervals for `sample-ft`
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Search window for `zeros` probes and `oracle-search`
    #[arg(long, global = true)]
    pub window: Option<u64>,
    /// Output file for CSV data.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Maximum number of atoms in a truncation.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Rational probe point for `zeros`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Left end of the `sample-ft` range
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xmin: Option<String>,
    /// Right end of the `sample-ft` range
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xmax: Option<String>,
    /// Configuration (with word) of the measure to compare against.
    #[arg(long, global = true)]
    pub against: Option<PathBuf>,
    /// Stages of the original per stage of the comparison measure.
    #[arg(long, global = true)]
    pub ratio: Option<usize>,
    /// Letter for `oracle-search` (1-based).
    #[arg(long, global = true)]
    pub letter: Option<usize>,
    /// Stop `oracle-search` after this many sets.
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Comma-separated rational points for `verify`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub points: Option<String>,
}

/// Integers may be written bare or as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntField {
    Int(i64),
    Str(String),
}

impl IntField {
    fn parse<T: std::str::FromStr>(&self, field: &str) -> Result<T> {
        let text = match self {
            IntField::Int(n) => n.to_string(),
            IntField::Str(s) => s.trim().to_string(),
        };
        text.parse().map_err(|_| {
            Error::Config(format!(
                "field {field}: {text:?} is not a valid integer here"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub b: IntField,
    pub p: IntField,
    pub t: IntField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordSpec {
    #[serde(default)]
    pub preperiod: Vec<IntField>,
    pub period: Vec<IntField>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub pairs: Vec<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<WordSpec>,
}

/// Parses the TOML configuration format into an alphabet and optional word.
pub fn parse_config(text: &str) -> Result<(SystemConfig, Option<SymbolicWord>)> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let pairs = file
        .pairs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let field = |name: &str| format!("pairs[{}].{name}", i + 1);
            let (b, p, t) = (
                s.b.parse::<i64>(&field("b"))?,
                s.p.parse::<u64>(&field("p"))?,
                s.t.parse::<i64>(&field("t"))?,
            );
            StagePair::new(b, p, t).map_err(|e| Error::Config(format!("pairs[{}]: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let config = SystemConfig::new(pairs)?;
    let word = match &file.word {
        None => None,
        Some(w) => {
            let letters = |v: &[IntField], name: &str| -> Result<Vec<usize>> {
                v.iter()
                    .enumerate()
                    .map(|(i, l)| l.parse::<usize>(&format!("word.{name}[{}]", i + 1)))
                    .collect()
            };
            let word = SymbolicWord::new(
                letters(&w.preperiod, "preperiod")?,
                letters(&w.period, "period")?,
            )
            .map_err(|e| Error::Config(format!("word: {e}")))?;
            config.check_word(&word)?;
            Some(word)
        }
    };
    Ok((config, word))
}

/// Writes the TOML configuration format, integers as decimal strings.
pub fn serialize_config(config: &SystemConfig, word: Option<&SymbolicWord>) -> String {
    let strs = |v: &[usize]| v.iter().map(|l| IntField::Str(l.to_string())).collect();
    let file = ConfigFile {
        pairs: config
            .pairs()
            .iter()
            .map(|s| PairSpec {
                b: IntField::Str(s.b().to_string()),
                p: IntField::Str(s.p().to_string()),
                t: IntField::Str(s.t().to_string()),
            })
            .collect(),
        word: word.map(|w| WordSpec {
            preperiod: strs(w.preperiod()),
            period: strs(w.period()),
        }),
    };
    toml::to_string(&file).expect("configuration serializes")
}

pub fn load_config(path: &Path) -> Result<(SystemConfig, Option<SymbolicWord>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Command options after parsing; unset values fall back to per-command
/// defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub depth: Option<usize>,
    pub grid: Option<usize>,
    pub window: Option<u64>,
    pub cap: Option<u64>,
    pub xi: Option<Rational>,
    pub xmin: Option<Rational>,
    pub xmax: Option<Rational>,
    pub ratio: Option<usize>,
    pub letter: Option<usize>,
    pub limit: Option<usize>,
    pub points: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: CommandKind,
    pub config: SystemConfig,
    pub word: Option<SymbolicWord>,
    pub against: Option<(SystemConfig, SymbolicWord)>,
    pub options: RunOptions,
}

/// Ordered `key=value` report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn lines(&self) -> &[(String, String)] {
        &self.lines
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: u8,
    pub report: Report,
    /// CSV body for `sample-ft`.
    pub csv: Option<String>,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_SCOPE: u8 = 2;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_rationals(points: &[Rational]) -> String {
    points
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(",")
}

fn join_ints(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .filter(|tok| !tok.trim().is_empty())
        .map(parse_rational)
        .collect()
}

/// Exit status for an error raised while running a command.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidStage { .. }
        | Error::LetterOutOfRange { .. }
        | Error::EmptyConfig
        | Error::EmptyPeriod
        | Error::AtomCapExceeded { .. }
        | Error::NotAdmissible { .. }
        | Error::NotDivisible { .. }
        | Error::SearchTooLarge(_)
        | Error::SignsNotNormalized => EXIT_SCOPE,
        _ => EXIT_INTERNAL,
    }
}

fn push_violations(report: &mut Report, violations: &[ConfigViolation]) {
    report.push("violations", violations.len());
    for (i, v) in violations.iter().enumerate() {
        report.push(format!("violation.{}", i + 1), v);
    }
}

fn push_certificate(report: &mut Report, cert: &Certificate) {
    report.push("clause", cert.clause());
    match cert {
        Certificate::Divisibility {
            position,
            letter,
            b,
            p,
        } => {
            report.push("position", position);
            report.push("letter", letter);
            report.push("b", b);
            report.push("p", p);
        }
        Certificate::EventuallyConstantTail { l, last, j } => {
            report.push("l", l);
            report.push("i_l", last);
            report.push("j", j);
        }
        Certificate::StepNotDividing { t1, t2, residue } => {
            report.push("t1", t1);
            report.push("t2", t2);
            report.push("residue", residue);
        }
        Certificate::AlternatingProduct { k, b, t, p1 } => {
            report.push("k", k);
            report.push("b", b);
            report.push("t", t);
            report.push("p1", p1);
        }
    }
}

fn push_verdict(report: &mut Report, verdict: &SpectralVerdict) -> u8 {
    report.push("kind", verdict.kind());
    match verdict {
        SpectralVerdict::Spectral => EXIT_OK,
        SpectralVerdict::NotSpectral(cert) => {
            push_certificate(report, cert);
            EXIT_OK
        }
        SpectralVerdict::OutOfScope(v) => {
            push_violations(report, v);
            EXIT_SCOPE
        }
    }
}

impl RunRequest {
    fn word(&self) -> Result<&SymbolicWord> {
        self.word.as_ref().ok_or_else(|| {
            Error::InvalidParameter(
                "this command needs a word (--word or [word] in the config)".into(),
            )
        })
    }

    fn cap(&self) -> u64 {
        self.options.cap.unwrap_or(DEFAULT_ATOM_CAP)
    }

    fn depth(&self, default: usize) -> usize {
        self.options.depth.unwrap_or(default)
    }

    fn two_pairs(&self) -> Result<(StagePair, StagePair)> {
        match self.config.pairs() {
            [a, b, ..] => Ok((*a, *b)),
            _ => Err(Error::InvalidParameter(
                "this command needs at least two pairs".into(),
            )),
        }
    }
}

/// Runs one command. Errors are turned into an outcome with the matching exit
/// status and an `error=` line.
pub fn run(request: &RunRequest) -> Outcome {
    let mut report = Report::default();
    report.push("command", command_name(request.command));
    let mut csv = None;
    let result = dispatch(request, &mut report, &mut csv);
    match result {
        Ok(exit_code) => Outcome {
            exit_code,
            report,
            csv,
        },
        Err(err) => {
            report.push("error", &err);
            Outcome {
                exit_code: exit_code_for(&err),
                report,
                csv: None,
            }
        }
    }
}

pub fn command_name(c: CommandKind) -> &'static str {
    match c {
        CommandKind::Validate => "validate",
        CommandKind::Classify => "classify",
        CommandKind::TwoStage => "two-stage",
        CommandKind::Spectrum => "spectrum",
        CommandKind::Verify => "verify",
        CommandKind::Qcheck => "qcheck",
        CommandKind::Zeros => "zeros",
        CommandKind::Tile => "tile",
        CommandKind::SampleFt => "sample-ft",
        CommandKind::RewriteCheck => "rewrite-check",
        CommandKind::OracleSearch => "oracle-search",
        CommandKind::Necessity => "necessity",
    }
}

fn dispatch(req: &RunRequest, report: &mut Report, csv: &mut Option<String>) -> Result<u8> {
    let config = &req.config;
    match req.command {
        CommandKind::Validate => {
            report.push("pairs", config.len());
            match classifier::validate_config(config) {
                Ok(()) => {
                    report.push("valid", true);
                    Ok(EXIT_OK)
                }
                Err(v) => {
                    report.push("valid", false);
                    push_violations(report, &v);
                    Ok(EXIT_SCOPE)
                }
            }
        }
        CommandKind::Classify => {
            let word = req.word()?;
            report.push("word", word);
            let verdict = classifier::decide_spectrality(config, word)?;
            Ok(push_verdict(report, &verdict))
        }
        CommandKind::TwoStage => {
            let (first, second) = req.two_pairs()?;
            let (p1, p2, b1, t1, t2) = (first.p(), second.p(), first.b(), first.t(), second.t());
            let d = classifier::two_stage_decide(p1, p2, b1, t1, t2)?;
            report.push("divides", d.divides);
            report.push("spectral", d.spectral);
            report.push("tiles", d.tiles);
            push_tile_certificate(report, &d.tiling.certificate);
            let verdict = classifier::two_stage_verdict(&d, t1, t2);
            Ok(push_verdict(report, &verdict))
        }
        CommandKind::Spectrum => {
            let word = req.word()?;
            let depth = req.depth(3);
            let spectrum = build_tower_spectrum(config, word, depth)?;
            let points = spectrum.points().expect("tower spectra are finite");
            report.push("depth", depth);
            report.push("count", points.len());
            report.push("points", join_rationals(points));
            Ok(EXIT_OK)
        }
        CommandKind::Verify => {
            let word = req.word()?;
            let depth = req.depth(3);
            let candidate = match &req.options.points {
                Some(points) => SpectrumCandidate::finite(points.clone())?,
                None => build_tower_spectrum(config, word, depth)?,
            };
            let measure = truncate_with_cap(config, word, depth, req.cap())?;
            let v = verify_spectrum_finite(&measure, &candidate, config, word, depth)?;
            report.push("depth", depth);
            report.push("points", v.point_count);
            report.push("atoms", v.atom_count);
            report.push("orthogonal", v.orthogonal);
            report.push("complete", v.complete);
            if let Some((a, b)) = &v.offending_pair {
                report.push(
                    "offending_pair",
                    format!("{},{}", format_rational(a), format_rational(b)),
                );
            }
            report.push("unitarity_residual", fmt_f64(v.unitarity_residual));
            report.push("spectrum", v.passed());
            Ok(EXIT_OK)
        }
        CommandKind::Qcheck => {
            let word = req.word()?;
            let depth = req.depth(3);
            let grid = req.options.grid.unwrap_or(256).max(1);
            let spectrum = build_tower_spectrum(config, word, depth)?;
            let mut max_dev = 0.0f64;
            for i in 0..grid {
                let x = i as f64 / grid as f64;
                let q = q_function(config, word, depth, &spectrum, x, 0)?;
                max_dev = max_dev.max((q - 1.0).abs());
            }
            report.push("depth", depth);
            report.push("grid", grid);
            report.push("max_deviation", fmt_f64(max_dev));
            report.push("identity_holds", max_dev < 1e-9);
            Ok(EXIT_OK)
        }
        CommandKind::Zeros => {
            let word = req.word()?;
            report.push("word", word);
            let status = classifier::z_set_criteria(config, word)?;
            let exit = match &status {
                ZSetStatus::Empty(c) => {
                    report.push("status", "empty");
                    report.push("criterion", c.name());
                    if let Some(l) = c.letter() {
                        report.push("letter", l);
                    }
                    EXIT_OK
                }
                ZSetStatus::Nonempty { j } => {
                    report.push("status", "nonempty");
                    report.push("j", j);
                    EXIT_OK
                }
                ZSetStatus::Unknown => {
                    report.push("status", "unknown");
                    EXIT_OK
                }
                ZSetStatus::OutOfScope(v) => {
                    report.push("status", "out_of_scope");
                    push_violations(report, v);
                    return Ok(EXIT_SCOPE);
                }
            };
            if let Some(xi) = &req.options.xi {
                let window = req.options.window.unwrap_or(200);
                report.push("xi", format_rational(xi));
                report.push("window", window);
                match classifier::z_membership_probe(config, word, xi, window)? {
                    ProbeResult::Witness(k) => {
                        report.push("probe", "witness");
                        report.push("k", k);
                    }
                    ProbeResult::NoWitness { .. } => report.push("probe", "no_witness"),
                }
            }
            Ok(exit)
        }
        CommandKind::Tile => {
            let (first, second) = req.two_pairs()?;
            let d = crate::tiling::tile_decide(
                first.p(),
                second.p(),
                first.b(),
                first.t(),
                second.t(),
            )?;
            report.push("tiles", d.tiles);
            push_tile_certificate(report, &d.certificate);
            Ok(EXIT_OK)
        }
        CommandKind::SampleFt => {
            let word = req.word()?;
            let depth = req.depth(20);
            let grid = req.options.grid.unwrap_or(1024).max(1);
            let xmin = req
                .options
                .xmin
                .clone()
                .unwrap_or_else(|| Rational::from_integer(0.into()));
            let xmax = req
                .options
                .xmax
                .clone()
                .unwrap_or_else(|| Rational::from_integer(4.into()));
            if xmax < xmin {
                return Err(Error::InvalidParameter(
                    "xmax must not be below xmin".into(),
                ));
            }
            let step = (&xmax - &xmin) / Rational::from_integer((grid as i64).into());
            let mut body = String::from("x,re,im,abs\n");
            let mut max_tail = 0.0f64;
            for i in 0..=grid {
                let x = to_f64(&(&xmin + &step * Rational::from_integer((i as i64).into())));
                let s = mu_hat_eval(config, word, x, depth)?;
                max_tail = max_tail.max(s.tail_bound);
                let _ = writeln!(
                    body,
                    "{},{},{},{}",
                    fmt_f64(x),
                    fmt_f64(s.value.re),
                    fmt_f64(s.value.im),
                    fmt_f64(s.value.norm())
                );
            }
            report.push("depth", depth);
            report.push("rows", grid + 1);
            report.push("xmin", format_rational(&xmin));
            report.push("xmax", format_rational(&xmax));
            report.push("max_tail_bound", fmt_f64(max_tail));
            *csv = Some(body);
            Ok(EXIT_OK)
        }
        CommandKind::RewriteCheck => {
            let word = req.word()?;
            let (other, other_word) = req
                .against
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("rewrite-check needs --against".into()))?;
            let ratio = req.options.ratio.unwrap_or(2);
            let depth = req.depth(2);
            let left = truncate_with_cap(config, word, ratio * depth, req.cap())?;
            let right = truncate_with_cap(other, other_word, depth, req.cap())?;
            report.push("depth", depth);
            report.push("ratio", ratio);
            report.push("atoms_left", left.len());
            report.push("atoms_right", right.len());
            report.push("equal", left == right);
            Ok(EXIT_OK)
        }
        CommandKind::OracleSearch => {
            let letter = req.options.letter.unwrap_or(1);
            let s = *config.pair(letter)?;
            let window = req
                .options
                .window
                .unwrap_or(s.b().unsigned_abs() * s.p() * s.t().unsigned_abs());
            let found =
                search_compatible_l_limited(s.b(), s.p(), s.t(), window, req.options.limit)?;
            let admissible = is_admissible(s.b(), s.p(), s.t());
            report.push("letter", letter);
            report.push("b", s.b());
            report.push("p", s.p());
            report.push("t", s.t());
            report.push("window", window);
            report.push("admissible", admissible);
            report.push("found", found.len());
            report.push("agrees", admissible == !found.is_empty());
            if admissible {
                let l = canonical_l(s.b(), s.p(), s.t())?;
                report.push("canonical_l", join_ints(&l));
                report.push("canonical_found", found.contains(&l));
            }
            for (i, l) in found.iter().enumerate() {
                report.push(format!("l.{}", i + 1), join_ints(l));
            }
            Ok(EXIT_OK)
        }
        CommandKind::Necessity => {
            let word = req.word()?;
            let horizon = req.depth(8);
            let stages = stage_sequence(config, word, horizon + 1)?;
            let violations = classifier::necessity_check(&stages, horizon)?;
            report.push("horizon", horizon);
            report.push("violations", violations.len());
            for v in &violations {
                report.push(
                    format!("violation.{}", v.k),
                    format!("p_next={} b_next={} t_k={}", v.p_next, v.b_next, v.t_k),
                );
            }
            Ok(EXIT_OK)
        }
    }
}

fn push_tile_certificate(report: &mut Report, cert: &TileCertificate) {
    match cert {
        TileCertificate::Tiling {
            support,
            digits,
            period,
        } => {
            report.push("support", support);
            report.push("support_length", format_rational(&support.total_length()));
            report.push("translation_digits", join_rationals(digits));
            report.push("translation_period", format_rational(period));
        }
        TileCertificate::Residue { t1, t2, residue } => {
            report.push("certificate", "residue");
            report.push("t1_mod_t2", format!("{t1} mod {t2} = {residue}"));
        }
        TileCertificate::CoverageFailure(defect) => {
            report.push("certificate", "coverage");
            report.push(
                "defect",
                format!(
                    "[{}, {}) multiplicity {}",
                    format_rational(&defect.start),
                    format_rational(&defect.end),
                    defect.multiplicity
                ),
            );
        }
    }
}

/// Builds a request from parsed flags, loading configuration files.
pub fn request_from_cli(cli: &Cli) -> Result<RunRequest> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--config is required".into()))?;
    let (config, file_word) = load_config(path)?;
    let word = match &cli.word {
        Some(w) => {
            let w = SymbolicWord::parse(w)?;
            config.check_word(&w)?;
            Some(w)
        }
        None => file_word,
    };
    let against = match &cli.against {
        None => None,
        Some(p) => {
            let (c, w) = load_config(p)?;
            let w =
                w.ok_or_else(|| Error::Config(format!("{}: [word] is required", p.display())))?;
            Some((c, w))
        }
    };
    let opt_rational = |s: &Option<String>| s.as_deref().map(parse_rational).transpose();
    Ok(RunRequest {
        command: cli.command,
        config,
        word,
        against,
        options: RunOptions {
            depth: cli.depth,
            grid: cli.grid,
            window: cli.window,
            cap: cli.cap,
            xi: opt_rational(&cli.xi)?,
            xmin: opt_rational(&cli.xmin)?,
            xmax: opt_rational(&cli.xmax)?,
            ratio: cli.ratio,
            letter: cli.letter,
            limit: cli.limit,
            points: cli.points.as_deref().map(parse_rational_list).transpose()?,
        },
    })
}

/// Entry point of the `moran` binary; returns the process exit status.
pub fn main_with_args<I, T>(
    args: I,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_SCOPE } else { EXIT_OK };
        }
    };
    let request = match request_from_cli(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stdout, "command={}", command_name(cli.command));
            let _ = writeln!(stdout, "error={e}");
            let _ = writeln!(stderr, "moran: {e}");
            return exit_code_for(&e);
        }
    };
    let outcome = run(&request);
    if let Some(e) = outcome.report.get("error") {
        let _ = writeln!(stderr, "moran: {e}");
    }
    if let Some(body) = &outcome.csv {
        match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, body) {
                    let _ = writeln!(
                        stdout,
                        "{}error=cannot write {}: {e}",
                        outcome.report,
                        path.display()
                    );
                    return EXIT_INTERNAL;
                }
                let _ = writeln!(stdout, "{}out={}", outcome.report, path.display());
                return outcome.exit_code;
            }
            None => {
                let _ = write!(stdout, "{body}");
                let _ = write!(stderr, "{}", outcome.report);
                return outcome.exit_code;
            }
        }
    }
    let _ = write!(stdout, "{}", outcome.report);
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
pairs = [{ b = "4", p = "2", t = "1" }, { b = 2, p = 2, t = "3" }]

[word]
preperiod = ["1"]
period = [2]
"#;

    fn request(command: CommandKind, text: &str) -> RunRequest {
        let (config, word) = parse_config(text).unwrap();
        RunRequest {
            command,
            config,
            word,
            against: None,
            options: RunOptions::default(),
        }
    }

    #[test]
    fn parse_sample_config() {
        let (config, word) = parse_config(SAMPLE).unwrap();
        assert_eq!(
            config,
            SystemConfig::from_triples(&[(4, 2, 1), (2, 2, 3)]).unwrap()
        );
        assert_eq!(word.unwrap(), SymbolicWord::new(vec![1], vec![2]).unwrap());
    }

    #[test]
    fn config_errors_name_the_field() {
        let err = parse_config(r#"pairs = [{ b = "4", p = "x", t = "1" }]"#).unwrap_err();
        assert!(err.to_string().contains("pairs[1].p"), "{err}");
        let err = parse_config(r#"pairs = [{ b = "1", p = "2", t = "1" }]"#).unwrap_err();
        assert!(err.to_string().contains("pairs[1]"), "{err}");
        let err = parse_config("pairs = [\n{ b = 4, p = 2 }]").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err =
            parse_config("pairs = [{ b = 4, p = 2, t = 1 }]\n[word]\nperiod = [3]\n").unwrap_err();
        assert!(matches!(err, Error::LetterOutOfRange { .. }), "{err}");
    }

    #[test]
    fn serialize_roundtrip() {
        let (config, word) = parse_config(SAMPLE).unwrap();
        let text = serialize_config(&config, word.as_ref());
        assert_eq!(parse_config(&text).unwrap(), (config, word));
    }

    #[test]
    fn classify_report() {
        let out = run(&request(CommandKind::Classify, SAMPLE));
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.get("kind"), Some("NotSpectral"));
        assert_eq!(out.report.get("clause"), Some("Pi_l"));
        assert_eq!(out.report.get("l"), Some("1"));
        assert_eq!(out.report.get("j"), Some("2"));
    }

    #[test]
    fn validate_reports_violations() {
        let out = run(&request(
            CommandKind::Validate,
            r#"pairs = [{ b = 4, p = 2, t = 3 }, { b = 2, p = 2, t = 9 }]"#,
        ));
        assert_eq!(out.exit_code, 2);
        assert_eq!(out.report.get("valid"), Some("false"));
        assert_eq!(out.report.get("violation.1"), Some("gcd(t_1, t_2) = 3"));
    }

    #[test]
    fn sample_ft_hits_exact_zero() {
        let mut req = request(
            CommandKind::SampleFt,
            "pairs = [{ b = 4, p = 2, t = 1 }]\n[word]\nperiod = [1]\n",
        );
        req.options.depth = Some(20);
        let out = run(&req);
        assert_eq!(out.exit_code, 0);
        let csv = out.csv.unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,re,im,abs"));
        let row = lines
            .find(|l| l.split(',').next().unwrap().parse::<f64>().unwrap() == 2.0)
            .unwrap();
        let abs: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(abs < 1e-12);
        assert_eq!(csv.lines().count(), 1026);
    }

    #[test]
    fn rationals_and_doubles_format() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(join_rationals(&[Rational::from_integer(2.into())]), "2/1");
    }
}
