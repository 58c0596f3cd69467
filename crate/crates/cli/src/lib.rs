//! Experiment harness for the dictatorship tests.
//!
//! An [`ExperimentConfig`] (usually read from JSON) is turned into a list of
//! [`ReportRow`]s by [`run_experiment`]. Output is deterministic given the
//! config and seed; only `wall_ms` varies between runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dictatest::family_file::FamilyFile;
use dictatest::gowers::{gowers_inner_product_mc, EstimateMethod};
use dictatest::rng::{derive_seed, seeded};
use dictatest::stats::normal_quantile;
use dictatest::testers::{
    basic_test_prob_mc, htest_randomness_bits, noise_spectrum_deviation, soundness_bound,
};
use dictatest::{
    basic_test_prob_exact, basic_test_prob_fourier, complete_hypergraph, find_influential_pair,
    gowers::gowers_norm_power, htest_prob_exact, htest_prob_mc, noisy_dictator, query_budget,
    random_folded, BitVector, BooleanFunction, FnSpec, FunctionFamily, Hypergraph, IndexedFamily,
    DEFAULT_GUARD_BITS,
};

/// Tolerance for the dual-path identities checked by the harness.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Guard(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) => 2,
            HarnessError::Guard(_) => 3,
            HarnessError::Invariant(_) => 4,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<dictatest::Error> for HarnessError {
    fn from(err: dictatest::Error) -> Self {
        match err {
            dictatest::Error::GuardExceeded { .. } => HarnessError::Guard(err.to_string()),
            dictatest::Error::Numerical(_) => HarnessError::Invariant(err.to_string()),
            other => HarnessError::Parse(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Acceptance of a dictator family; any value below 1 is an invariant
    /// violation.
    Completeness,
    /// H-Test acceptance of i.i.d. random folded families against `2^{k-|E|}`.
    Soundness,
    /// Exact vs. Fourier acceptance probability of the Basic Test.
    FormulaXcheck,
    /// Gowers norms of one function.
    GowersReport,
    /// Spectrum of the noise operator against its predicted law.
    NoiseProp,
    /// Influential-pair decoder on planted families.
    Decode,
    /// Basic Test acceptance probability of one function.
    BasicTest,
    /// H-Test acceptance probability of one family.
    HTest,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Completeness => "completeness",
            ExperimentKind::Soundness => "soundness",
            ExperimentKind::FormulaXcheck => "formula-xcheck",
            ExperimentKind::GowersReport => "gowers-report",
            ExperimentKind::NoiseProp => "noise-prop",
            ExperimentKind::Decode => "decode",
            ExperimentKind::BasicTest => "basic-test",
            ExperimentKind::HTest => "h-test",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact when the guard allows, Monte Carlo otherwise.
    #[default]
    Auto,
    Exact,
    Fourier,
    Mc,
    /// Every applicable method.
    All,
}

fn default_trials() -> u64 {
    100_000
}
fn default_count() -> usize {
    1
}
fn default_guard() -> u32 {
    DEFAULT_GUARD_BITS
}
fn default_confidence() -> f64 {
    0.99
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    /// Hypergraph vertex count; absent means the Basic Test.
    #[serde(default)]
    pub k: Option<usize>,
    /// Hypergraph edges; absent means the complete hypergraph on `k`.
    #[serde(default)]
    pub edges: Option<Vec<Vec<usize>>>,
    /// Function spec applied to every member.
    #[serde(default)]
    pub family: Option<String>,
    /// Family file; overrides `n`, `k`, `edges` and `family`.
    #[serde(default)]
    pub family_file: Option<PathBuf>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Number of random instances (functions, families or seeds).
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_guard")]
    pub guard_bits: u32,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub w: Option<usize>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub coordinate: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize) -> Self {
        Self {
            kind,
            n,
            k: None,
            edges: None,
            family: None,
            family_file: None,
            method: Method::Auto,
            trials: default_trials(),
            count: default_count(),
            seed: 0,
            guard_bits: default_guard(),
            confidence: default_confidence(),
            d: None,
            w: None,
            tau: None,
            rho: None,
            coordinate: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let needs_trials = matches!(self.kind, ExperimentKind::Soundness)
            || matches!(self.method, Method::Mc | Method::All | Method::Auto);
        if needs_trials && self.trials == 0 {
            return Err(HarnessError::Parse("trials must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(HarnessError::Parse("count must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(HarnessError::Parse(format!(
                "confidence {} outside (0, 1)",
                self.confidence
            )));
        }
        let needs_family = matches!(
            self.kind,
            ExperimentKind::Completeness | ExperimentKind::BasicTest | ExperimentKind::HTest
        );
        if needs_family && self.family.is_none() && self.family_file.is_none() {
            return Err(HarnessError::Parse(format!(
                "{} needs `family` or `family_file`",
                self.kind.name()
            )));
        }
        if matches!(self.kind, ExperimentKind::Soundness) && self.k.is_none() && self.family_file.is_none() {
            return Err(HarnessError::Parse("soundness needs `k` or `family_file`".into()));
        }
        Ok(())
    }
}

/// One line of the report. Exact and Fourier rows leave the interval empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub n: usize,
    pub k: Option<usize>,
    pub edge_count: Option<usize>,
    pub family: String,
    pub method: String,
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub total_queries: Option<u64>,
    pub wall_ms: u64,
}

impl ReportRow {
    fn new(cfg: &ExperimentConfig, experiment: &str, family: String, method: &str, value: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            n: cfg.n,
            k: None,
            edge_count: None,
            family,
            method: method.to_string(),
            value,
            ci_low: None,
            ci_high: None,
            trials: None,
            seed: None,
            total_queries: None,
            wall_ms: 0,
        }
    }

    fn with_hypergraph(mut self, h: &Hypergraph) -> Self {
        self.k = Some(h.k());
        self.edge_count = Some(h.edge_count());
        self
    }

    fn with_interval(mut self, low: f64, high: f64, trials: u64, seed: u64) -> Self {
        self.ci_low = Some(low);
        self.ci_high = Some(high);
        self.trials = Some(trials);
        self.seed = Some(seed);
        self
    }

    fn timed(mut self, start: Instant) -> Self {
        self.wall_ms = start.elapsed().as_millis() as u64;
        self
    }
}

fn check_rows(rows: &[ReportRow]) -> Result<(), HarnessError> {
    for row in rows {
        if let (Some(low), Some(high)) = (row.ci_low, row.ci_high) {
            if !(low <= row.value && row.value <= high) {
                return Err(HarnessError::Invariant(format!(
                    "row {} / {}: value {} outside [{low}, {high}]",
                    row.experiment, row.family, row.value
                )));
            }
        }
    }
    Ok(())
}

/// Runs one experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    cfg.validate()?;
    let rows = match cfg.kind {
        ExperimentKind::Completeness => completeness(cfg)?,
        ExperimentKind::BasicTest | ExperimentKind::HTest => acceptance(cfg)?,
        ExperimentKind::Soundness => soundness(cfg)?,
        ExperimentKind::FormulaXcheck => formula_xcheck(cfg)?,
        ExperimentKind::GowersReport => gowers_report(cfg)?,
        ExperimentKind::NoiseProp => noise_prop(cfg)?,
        ExperimentKind::Decode => decode(cfg)?,
    };
    check_rows(&rows)?;
    Ok(rows)
}

fn parse_spec(spec: &str) -> Result<FnSpec, HarnessError> {
    spec.parse::<FnSpec>().map_err(HarnessError::from)
}

/// What an acceptance experiment runs against.
enum Target {
    Basic { spec: String, f: BooleanFunction },
    Hyper { label: String, fam: FunctionFamily },
}

fn target(cfg: &ExperimentConfig) -> Result<Target, HarnessError> {
    if let Some(path) = &cfg.family_file {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Parse(format!("cannot read {}: {e}", path.display())))?;
        let file = FamilyFile::from_json(&text)?;
        if file.n != cfg.n {
            return Err(HarnessError::Parse(format!(
                "family file has n = {}, config has n = {}",
                file.n, cfg.n
            )));
        }
        let label = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(Target::Hyper {
            label,
            fam: file.build()?,
        });
    }
    let spec = cfg.family.clone().expect("validated");
    let f = parse_spec(&spec)?.build(cfg.n)?;
    match cfg.k {
        None => Ok(Target::Basic { spec, f }),
        Some(k) => {
            let h = hypergraph(cfg, k)?;
            Ok(Target::Hyper {
                label: format!("all={spec}"),
                fam: FunctionFamily::uniform(h, &f)?,
            })
        }
    }
}

fn hypergraph(cfg: &ExperimentConfig, k: usize) -> Result<Hypergraph, HarnessError> {
    Ok(match &cfg.edges {
        Some(edges) => Hypergraph::new(k, edges.clone())?,
        None => complete_hypergraph(k)?,
    })
}

fn wants(cfg: &ExperimentConfig, m: Method) -> bool {
    cfg.method == m || cfg.method == Method::All
}

fn basic_rows(cfg: &ExperimentConfig, experiment: &str, spec: &str, f: &BooleanFunction) -> Result<Vec<ReportRow>, HarnessError> {
    let mut rows = Vec::new();
    let fits = 4 * cfg.n <= cfg.guard_bits as usize;
    if wants(cfg, Method::Exact) || (cfg.method == Method::Auto && fits) {
        let start = Instant::now();
        let p = basic_test_prob_exact(f, cfg.guard_bits)?;
        let mut row = ReportRow::new(cfg, experiment, spec.to_string(), "exact", p.value());
        row.total_queries = Some(4);
        rows.push(row.timed(start));
    }
    if wants(cfg, Method::Fourier) {
        let start = Instant::now();
        let p = basic_test_prob_fourier(f)?;
        let mut row = ReportRow::new(cfg, experiment, spec.to_string(), "fourier", p);
        row.total_queries = Some(4);
        rows.push(row.timed(start));
    }
    if wants(cfg, Method::Mc) || (cfg.method == Method::Auto && !fits) {
        let start = Instant::now();
        f.ensure_folded()?;
        let est = basic_test_prob_mc(f, cfg.trials, cfg.seed, cfg.confidence)?;
        let mut row = ReportRow::new(cfg, experiment, spec.to_string(), "mc", est.estimate)
            .with_interval(est.ci_low, est.ci_high, cfg.trials, cfg.seed);
        row.total_queries = Some(est.total_queries);
        rows.push(row.timed(start));
    }
    Ok(rows)
}

fn hyper_rows(cfg: &ExperimentConfig, experiment: &str, label: &str, fam: &FunctionFamily, seed: u64) -> Result<Vec<ReportRow>, HarnessError> {
    let h = fam.hypergraph();
    let per_run = query_budget(h).total as u64;
    let fits = htest_randomness_bits(fam) <= cfg.guard_bits as usize;
    let mut rows = Vec::new();
    if wants(cfg, Method::Fourier) && cfg.method == Method::Fourier {
        return Err(HarnessError::Parse("the H-Test has no Fourier evaluator".into()));
    }
    if wants(cfg, Method::Exact) || (cfg.method == Method::Auto && fits) {
        let start = Instant::now();
        let p = htest_prob_exact(fam, cfg.guard_bits)?;
        let mut row = ReportRow::new(cfg, experiment, label.to_string(), "exact", p.value()).with_hypergraph(h);
        row.total_queries = Some(per_run);
        rows.push(row.timed(start));
    }
    if wants(cfg, Method::Mc) || (cfg.method == Method::Auto && !fits) {
        let start = Instant::now();
        let est = htest_prob_mc(fam, cfg.trials, seed, cfg.confidence)?;
        let mut row = ReportRow::new(cfg, experiment, label.to_string(), "mc", est.estimate)
            .with_hypergraph(h)
            .with_interval(est.ci_low, est.ci_high, cfg.trials, seed);
        row.total_queries = Some(est.total_queries);
        rows.push(row.timed(start));
    }
    Ok(rows)
}

fn acceptance(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let name = cfg.kind.name();
    match target(cfg)? {
        Target::Basic { spec, f } => basic_rows(cfg, name, &spec, &f),
        Target::Hyper { label, fam } => hyper_rows(cfg, name, &label, &fam, cfg.seed),
    }
}

fn completeness(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let rows = acceptance(cfg)?;
    for row in &rows {
        if row.value != 1.0 {
            return Err(HarnessError::Invariant(format!(
                "completeness: {} accepted with probability {} ({})",
                row.family, row.value, row.method
            )));
        }
    }
    Ok(rows)
}

fn soundness(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let name = cfg.kind.name();
    let mut rows = Vec::new();
    let h = if cfg.family_file.is_some() || cfg.family.is_some() {
        let Target::Hyper { label, fam } = target(cfg)? else {
            return Err(HarnessError::Parse("soundness needs a hypergraph".into()));
        };
        rows.extend(hyper_rows(cfg, name, &label, &fam, cfg.seed)?);
        fam.hypergraph().clone()
    } else {
        let h = hypergraph(cfg, cfg.k.expect("validated"))?;
        for index in 0..cfg.count {
            let family_seed = derive_seed(cfg.seed, index as u64);
            let members: Vec<BooleanFunction> = (0..h.function_count())
                .map(|m| random_folded(cfg.n, derive_seed(family_seed, m as u64)))
                .collect::<Result<_, _>>()?;
            let (vertices, edges) = members.split_at(h.k());
            let fam = FunctionFamily::new(h.clone(), vertices.to_vec(), edges.to_vec())?;
            let label = format!("iid-random:{family_seed}");
            rows.extend(hyper_rows(cfg, name, &label, &fam, derive_seed(family_seed, u64::MAX))?);
        }
        h
    };
    let bound = ReportRow::new(cfg, name, "soundness-bound".into(), "bound", soundness_bound(&h)).with_hypergraph(&h);
    rows.push(bound);
    Ok(rows)
}

fn formula_xcheck(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let name = cfg.kind.name();
    let functions: Vec<(String, BooleanFunction)> = match &cfg.family {
        Some(spec) => vec![(spec.clone(), parse_spec(spec)?.build(cfg.n)?)],
        None => (0..cfg.count)
            .map(|i| {
                let seed = derive_seed(cfg.seed, i as u64);
                Ok((format!("random:{seed}"), random_folded(cfg.n, seed)?))
            })
            .collect::<Result<_, HarnessError>>()?,
    };
    let mut rows = Vec::new();
    let mut max_delta = 0.0f64;
    let start_all = Instant::now();
    for (label, f) in &functions {
        let start = Instant::now();
        let exact = basic_test_prob_exact(f, cfg.guard_bits)?.value();
        rows.push(ReportRow::new(cfg, name, label.clone(), "exact", exact).timed(start));
        let start = Instant::now();
        let fourier = basic_test_prob_fourier(f)?;
        rows.push(ReportRow::new(cfg, name, label.clone(), "fourier", fourier).timed(start));
        max_delta = max_delta.max((exact - fourier).abs());
    }
    let summary = format!("{} functions", functions.len());
    rows.push(ReportRow::new(cfg, name, summary, "max-abs-diff", max_delta).timed(start_all));
    if max_delta > IDENTITY_TOLERANCE {
        return Err(HarnessError::Invariant(format!(
            "exact and Fourier acceptance differ by {max_delta:e}"
        )));
    }
    Ok(rows)
}

/// A Gowers norm value with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GowersRow {
    pub d: usize,
    pub n: usize,
    pub method: String,
    pub value: f64,
    pub stderr: f64,
}

/// `||f||_{U_d}` for `d = 1..=max_d`, exact within the guard and Monte Carlo
/// (through the Gowers inner product of the constant family) beyond it.
pub fn gowers_rows(f: &BooleanFunction, max_d: usize, guard_bits: u32, trials: u64, seed: u64) -> Result<Vec<GowersRow>, HarnessError> {
    let real = f.to_real();
    let mut rows = Vec::new();
    for d in 1..=max_d {
        let root = 1.0 / (1u64 << d) as f64;
        let row = match gowers_norm_power(&real, d, guard_bits) {
            Ok(power) => GowersRow {
                d,
                n: f.n(),
                method: EstimateMethod::Exact.as_str().into(),
                value: power.powf(root),
                stderr: 0.0,
            },
            Err(dictatest::Error::GuardExceeded { .. }) => {
                let est = gowers_inner_product_mc(&IndexedFamily::uniform(d, &real)?, trials, derive_seed(seed, d as u64))?;
                let power = est.value.max(0.0);
                let value = power.powf(root);
                // Delta method through x ↦ x^{1/2^d}.
                let stderr = if power > 0.0 {
                    est.stderr * root * power.powf(root - 1.0)
                } else {
                    est.stderr.powf(root)
                };
                GowersRow {
                    d,
                    n: f.n(),
                    method: EstimateMethod::MonteCarlo.as_str().into(),
                    value,
                    stderr,
                }
            }
            Err(other) => return Err(other.into()),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn gowers_report(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let spec = cfg.family.clone().unwrap_or_else(|| format!("random:{}", cfg.seed));
    let f = parse_spec(&spec)?.build(cfg.n)?;
    let z = normal_quantile(cfg.confidence)?;
    let start = Instant::now();
    let rows = gowers_rows(&f, cfg.d.unwrap_or(3), cfg.guard_bits, cfg.trials, cfg.seed)?;
    Ok(rows
        .into_iter()
        .map(|g| {
            let experiment = format!("gowers-U{}", g.d);
            let row = ReportRow::new(cfg, &experiment, spec.clone(), &g.method, g.value);
            let row = if g.method == "mc" {
                row.with_interval((g.value - z * g.stderr).max(0.0), g.value + z * g.stderr, cfg.trials, derive_seed(cfg.seed, g.d as u64))
            } else {
                row
            };
            row.timed(start)
        })
        .collect())
}

fn noise_prop(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    use rand::Rng;
    let name = cfg.kind.name();
    let n = cfg.n;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let start_all = Instant::now();
    for i in 0..cfg.count {
        let start = Instant::now();
        let seed = derive_seed(cfg.seed, i as u64);
        let mut rng = seeded(seed);
        let f = BooleanFunction::from_fn(n, |_| if rng.gen::<bool>() { 1 } else { -1 })?;
        let mask = (1usize << n) - 1;
        let c = BitVector::new(n, rng.gen::<u64>() as usize & mask)?;
        let c_prime = BitVector::new(n, rng.gen::<u64>() as usize & mask)?;
        let dev = noise_spectrum_deviation(&f, &c, &c_prime)?;
        worst = worst.max(dev);
        let label = format!("table:{};c={:x};c'={:x}", f.to_hex(), c.index(), c_prime.index());
        rows.push(ReportRow::new(cfg, name, label, "exact", dev).timed(start));
    }
    rows.push(ReportRow::new(cfg, name, format!("{} instances", cfg.count), "max-abs-diff", worst).timed(start_all));
    if worst > IDENTITY_TOLERANCE {
        return Err(HarnessError::Invariant(format!(
            "noise spectrum deviates from the predicted law by {worst:e}"
        )));
    }
    Ok(rows)
}

/// Parameters of the planted decoding instances.
#[derive(Clone, Copy, Debug)]
pub struct PlantedParams {
    pub n: usize,
    pub d: usize,
    pub coordinate: usize,
    pub rho: f64,
}

/// A family over `d`-subsets whose members are random folded functions,
/// except members `{1}` and `{2}`, which are independent noisy dictators at
/// `coordinate`.
pub fn planted_family(p: PlantedParams, seed: u64) -> Result<IndexedFamily, HarnessError> {
    let mut fam = IndexedFamily::new(p.d, p.n)?;
    for s in 0..1usize << p.d {
        fam.set(s, random_folded(p.n, derive_seed(seed, s as u64))?.to_real())?;
    }
    for (slot, s) in [1usize, 2].into_iter().enumerate() {
        let noisy = noisy_dictator(p.n, p.coordinate, p.rho, derive_seed(seed, 1000 + slot as u64))?;
        fam.set(s, noisy.to_real())?;
    }
    Ok(fam)
}

fn decode(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let name = cfg.kind.name();
    let params = PlantedParams {
        n: cfg.n,
        d: cfg.d.unwrap_or(2),
        coordinate: cfg.coordinate.unwrap_or(3),
        rho: cfg.rho.unwrap_or(0.05),
    };
    if params.d < 2 {
        return Err(HarnessError::Parse("decode needs d >= 2".into()));
    }
    let (w, tau) = (cfg.w.unwrap_or(2), cfg.tau.unwrap_or(0.2));
    let mut rows = Vec::new();
    let mut hits = 0usize;
    let start_all = Instant::now();
    for i in 0..cfg.count {
        let start = Instant::now();
        let seed = derive_seed(cfg.seed, i as u64);
        let fam = planted_family(params, seed)?;
        let found = find_influential_pair(&fam, w, tau);
        let coordinate = found.map_or(0, |p| p.coordinate);
        hits += usize::from(coordinate == params.coordinate);
        let label = format!("planted:{}:{}:{seed}", params.coordinate, params.rho);
        let mut row = ReportRow::new(cfg, name, label, "decoder", coordinate as f64).timed(start);
        row.seed = Some(seed);
        rows.push(row);
    }
    rows.push(
        ReportRow::new(cfg, name, format!("{} seeds", cfg.count), "success-rate", hits as f64 / cfg.count as f64)
            .timed(start_all),
    );
    Ok(rows)
}

/// Serializes rows as CSV in [`ReportRow`] field order.
pub fn rows_to_csv(rows: &[ReportRow]) -> Result<Vec<u8>, HarnessError> {
    to_csv(rows)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, HarnessError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    }
    writer
        .into_inner()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e.to_string())))
}

pub fn rows_to_json(rows: &[ReportRow]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(rows).expect("rows serialize");
    out.push(b'\n');
    out
}

/// Writes `bytes` to `path` via a temporary file in the same directory, so a
/// failed run never leaves a partial report behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.error))?;
    Ok(())
}

/// Emits to `out` when given, stdout otherwise.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), HarnessError> {
    match out {
        Some(path) => write_atomically(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// Worker cap from `DICTATEST_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, HarnessError> {
    match std::env::var("DICTATEST_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| HarnessError::Parse(format!("DICTATEST_THREADS={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}
