//! Simulation studies: sweep models, anisotropy levels, windows, summaries
//! and replication methods, and aggregate rejection rates.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointPattern, Window};
use crate::processes::ModelSpec;
use crate::replication::{FitFamily, ReplicationConfig, Replicator, SrConfig, TilingConfig};
use crate::rng::{derive_seed, RngStream};
use crate::testing::{
    decide, replicate_seed, Dss, FunctionalSpec, PValueOrientation, Recentering, StatKind, TestConfig, TestResult,
    DEFAULT_KAPPA, DEFAULT_THETA,
};

/// Replication method as named in a study; resolved per generating model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum StudyMethod {
    Tiling {
        k: usize,
    },
    /// Iterations default to 20,000 per unit window area.
    StochasticReconstruction {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iters: Option<usize>,
    },
    /// The generating model with `a = 1`.
    McOracle,
    /// The generating family fitted to each pattern.
    McCorrect,
    /// A plausible wrong family fitted to each pattern.
    McMisspecified,
}

/// A study method bound to a generating model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedMethod {
    pub label: &'static str,
    pub replication: ReplicationConfig,
    pub n_tiles: Option<usize>,
}

impl StudyMethod {
    /// Replication for patterns from `model` on `window`; `None` when the
    /// pairing is not defined (Gibbs with a correct-model fit, or a model
    /// without a fitting rule).
    pub fn resolve(&self, model: &ModelSpec, window: &Window) -> Option<ResolvedMethod> {
        let fitted = |label, family| ResolvedMethod {
            label,
            replication: ReplicationConfig::FittedMc { family },
            n_tiles: None,
        };
        let oracle = |label| ResolvedMethod {
            label,
            replication: ReplicationConfig::ParametricMc {
                model: model.with_anisotropy(1.0),
            },
            n_tiles: None,
        };
        match (*self, model) {
            (StudyMethod::Tiling { k }, _) => Some(ResolvedMethod {
                label: "tiling",
                replication: ReplicationConfig::Tiling(TilingConfig { k }),
                n_tiles: Some(k * k),
            }),
            (StudyMethod::StochasticReconstruction { iters }, _) => {
                let iters = iters.unwrap_or_else(|| ((20_000.0 * window.area()).round() as usize).max(1));
                Some(ResolvedMethod {
                    label: "stochastic-reconstruction",
                    replication: ReplicationConfig::StochasticReconstruction(SrConfig::new(iters)),
                    n_tiles: None,
                })
            }
            (StudyMethod::McOracle, _) => Some(oracle("mc-oracle")),
            (StudyMethod::McCorrect, ModelSpec::Lgcp { .. }) => Some(fitted("mc-correct-lgcp", FitFamily::Lgcp)),
            (StudyMethod::McCorrect, ModelSpec::Plcp { .. }) => Some(oracle("plcp-oracle-params")),
            (StudyMethod::McCorrect, ModelSpec::Thomas { .. }) => Some(fitted("mc-correct-thomas", FitFamily::Thomas)),
            (StudyMethod::McCorrect, ModelSpec::Strauss { .. }) => {
                Some(fitted("mc-correct-strauss", FitFamily::Strauss))
            }
            (StudyMethod::McMisspecified, ModelSpec::Lgcp { .. } | ModelSpec::Plcp { .. }) => {
                Some(fitted("mc-misspecified-thomas", FitFamily::Thomas))
            }
            (StudyMethod::McMisspecified, ModelSpec::GibbsLj { .. }) => {
                Some(fitted("mc-misspecified-strauss", FitFamily::Strauss))
            }
            _ => None,
        }
    }
}

fn default_a_levels() -> Vec<f64> {
    vec![0.4, 0.6, 0.8, 1.0]
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

fn default_windows() -> Vec<Window> {
    vec![Window::centered_square(0.5).unwrap(), Window::centered_square(1.0).unwrap()]
}

fn default_n_patterns() -> usize {
    1000
}

fn default_dss() -> Vec<Dss> {
    vec![Dss::gloc(), Dss::kcyl(), Dss::theta()]
}

fn default_stats() -> Vec<StatKind> {
    vec![StatKind::Ms, StatKind::MsRangeStd, StatKind::MsDirStd]
}

fn default_n_replicates() -> usize {
    1000
}

fn default_n_replicates_sr() -> usize {
    99
}

fn default_alpha_level() -> f64 {
    0.05
}

fn default_kappa() -> usize {
    DEFAULT_KAPPA
}

/// Study grid. The emitted scenarios are the cross product of `models`,
/// `aLevels`, `windows`, `replications`, `dssList` and `statKinds`, minus
/// undefined model/method pairings. Models without an anisotropy parameter
/// only pair with `a = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyConfig {
    pub models: Vec<ModelSpec>,
    #[serde(default = "default_a_levels")]
    pub a_levels: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_windows")]
    pub windows: Vec<Window>,
    #[serde(default = "default_n_patterns")]
    pub n_patterns: usize,
    #[serde(default = "default_dss")]
    pub dss_list: Vec<Dss>,
    #[serde(default = "default_stats")]
    pub stat_kinds: Vec<StatKind>,
    /// Pair each summary with its default statistic instead of crossing
    /// with `statKinds`.
    #[serde(default)]
    pub pair_default_stats: bool,
    pub replications: Vec<StudyMethod>,
    #[serde(default = "default_n_replicates")]
    pub n_replicates: usize,
    #[serde(default = "default_n_replicates_sr")]
    pub n_replicates_sr: usize,
    #[serde(default = "default_alpha_level")]
    pub alpha_level: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Largest range of the range functionals; a quarter of the window side
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: usize,
    #[serde(default)]
    pub recentering: Recentering,
    #[serde(default)]
    pub pvalue_orientation: PValueOrientation,
}

impl StudyConfig {
    /// Desk-scale grid: small window, 200 patterns, 199 replicates.
    pub fn desk() -> Self {
        Self {
            models: vec![
                ModelSpec::paper_lgcp(1.0),
                ModelSpec::paper_gibbs(1.0),
                ModelSpec::paper_plcp(1.0),
            ],
            a_levels: default_a_levels(),
            theta: DEFAULT_THETA,
            windows: vec![Window::centered_square(0.5).unwrap()],
            n_patterns: 200,
            dss_list: default_dss(),
            stat_kinds: default_stats(),
            pair_default_stats: true,
            replications: vec![
                StudyMethod::McOracle,
                StudyMethod::McCorrect,
                StudyMethod::McMisspecified,
                StudyMethod::Tiling { k: 2 },
                StudyMethod::Tiling { k: 3 },
                StudyMethod::Tiling { k: 4 },
                StudyMethod::Tiling { k: 5 },
                StudyMethod::StochasticReconstruction { iters: None },
            ],
            n_replicates: 199,
            n_replicates_sr: 99,
            alpha_level: 0.05,
            master_seed: 1,
            threads: None,
            r_max: None,
            kappa: DEFAULT_KAPPA,
            recentering: Recentering::Plugin,
            pvalue_orientation: PValueOrientation::Standard,
        }
    }

    /// Full grid: both windows, 1000 patterns, 1000 replicates.
    pub fn paper() -> Self {
        let mut cfg = Self::desk();
        cfg.windows = default_windows();
        cfg.n_patterns = 1000;
        cfg.n_replicates = 1000;
        cfg.replications = vec![
            StudyMethod::McOracle,
            StudyMethod::McCorrect,
            StudyMethod::McMisspecified,
            StudyMethod::Tiling { k: 2 },
            StudyMethod::Tiling { k: 3 },
            StudyMethod::Tiling { k: 4 },
            StudyMethod::Tiling { k: 5 },
            StudyMethod::Tiling { k: 6 },
            StudyMethod::Tiling { k: 8 },
            StudyMethod::StochasticReconstruction { iters: None },
        ];
        cfg
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "paper" => Ok(Self::paper()),
            _ => Err(Error::Config(format!("unknown preset '{name}' (expected desk or paper)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_patterns == 0 {
            return bad("nPatterns must be at least 1".into());
        }
        if self.n_replicates == 0 || self.n_replicates_sr == 0 {
            return bad("replicate counts must be at least 1".into());
        }
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return bad(format!("alphaLevel {} outside (0, 1)", self.alpha_level));
        }
        if let Some(a) = self.a_levels.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return bad(format!("anisotropy level {a} outside (0, 1]"));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if self.models.is_empty() || self.a_levels.is_empty() || self.windows.is_empty() {
            return bad("models, aLevels and windows must be non-empty".into());
        }
        if self.dss_list.is_empty() || self.replications.is_empty() {
            return bad("dssList and replications must be non-empty".into());
        }
        if !self.pair_default_stats && self.stat_kinds.is_empty() {
            return bad("statKinds must be non-empty".into());
        }
        for m in &self.models {
            m.validate()?;
        }
        for w in &self.windows {
            Window::new(w.xmin, w.xmax, w.ymin, w.ymax)?;
        }
        if self.scenarios()?.is_empty() {
            return bad("no valid model/replication pairing".into());
        }
        Ok(())
    }

    fn stat_pairs(&self) -> Vec<(usize, StatKind)> {
        let mut pairs = Vec::new();
        for (d, dss) in self.dss_list.iter().enumerate() {
            if self.pair_default_stats {
                pairs.push((d, dss.default_stat()));
            } else {
                pairs.extend(self.stat_kinds.iter().map(|s| (d, *s)));
            }
        }
        pairs
    }

    fn functional(&self, dss: Dss) -> FunctionalSpec {
        FunctionalSpec {
            dss,
            alpha1: self.theta,
            alpha2: self.theta + FRAC_PI_2,
            r_max: self.r_max,
            kappa: self.kappa,
        }
    }

    /// Generating groups and their scenarios, in emission order.
    fn groups(&self) -> Result<Vec<Group>> {
        let pairs = self.stat_pairs();
        let mut groups = Vec::new();
        let mut next_id = 0;
        for template in &self.models {
            for &a in &self.a_levels {
                if !template.has_anisotropy() && a != 1.0 {
                    continue;
                }
                let model = template.with_anisotropy(a).with_direction(self.theta);
                for window in &self.windows {
                    let mut methods = Vec::new();
                    for method in &self.replications {
                        let Some(resolved) = method.resolve(&model, window) else {
                            log::info!("skipping {method:?} for {}: pairing not defined", model.name());
                            continue;
                        };
                        let mut scenarios = Vec::new();
                        for &(d, stat) in &pairs {
                            scenarios.push(ScenarioKey {
                                scenario_id: next_id,
                                model: model.name().to_string(),
                                a,
                                window_side: window.width(),
                                dss: self.dss_list[d].label().to_string(),
                                statistic: stat.label().to_string(),
                                replication: resolved.label.to_string(),
                                n_tiles: resolved.n_tiles,
                            });
                            next_id += 1;
                        }
                        methods.push(GroupMethod {
                            resolved,
                            n_replicates: match resolved.replication {
                                ReplicationConfig::StochasticReconstruction(_) => self.n_replicates_sr,
                                _ => self.n_replicates,
                            },
                            stats: pairs.clone(),
                            scenarios,
                        });
                    }
                    groups.push(Group {
                        id: groups.len() as u64,
                        model,
                        window: *window,
                        methods,
                    });
                }
            }
        }
        Ok(groups)
    }

    /// Every scenario the config produces, in emission order.
    pub fn scenarios(&self) -> Result<Vec<ScenarioKey>> {
        Ok(self
            .groups()?
            .into_iter()
            .flat_map(|g| g.methods.into_iter().flat_map(|m| m.scenarios))
            .collect())
    }
}

#[derive(Clone, Debug)]
struct GroupMethod {
    resolved: ResolvedMethod,
    n_replicates: usize,
    stats: Vec<(usize, StatKind)>,
    scenarios: Vec<ScenarioKey>,
}

/// Scenarios sharing a generating model and window, hence observed patterns.
#[derive(Clone, Debug)]
struct Group {
    id: u64,
    model: ModelSpec,
    window: Window,
    methods: Vec<GroupMethod>,
}

/// Identifying columns of one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioKey {
    pub scenario_id: usize,
    pub model: String,
    pub a: f64,
    pub window_side: f64,
    pub dss: String,
    pub statistic: String,
    pub replication: String,
    pub n_tiles: Option<usize>,
}

/// One row of the results table. `rejection_rate` is over the
/// `n_patterns` successful tests; failed tests are counted in `n_failures`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario_id: usize,
    pub model: String,
    pub a: f64,
    pub window_side: f64,
    pub dss: String,
    pub statistic: String,
    pub replication: String,
    pub n_tiles: Option<usize>,
    pub n_patterns: usize,
    pub n_failures: usize,
    pub rejection_rate: Option<f64>,
    pub size_exceedance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    #[serde(flatten)]
    pub row: ScenarioRow,
    pub mean_p: Option<f64>,
}

/// Per-test record written when detail output is requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyDetail {
    pub scenario: ScenarioKey,
    pub pattern_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Outcome {
    p_value: f64,
    reject: bool,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; overrides the config value.
    pub threads: Option<usize>,
    /// Directory receiving one `StudyDetail` JSON per test.
    pub detail_dir: Option<PathBuf>,
}

/// Seed of observed pattern `pattern` in group `group`.
pub fn pattern_seed(master: u64, group: u64, pattern: usize) -> u64 {
    derive_seed(master, group, pattern as u64, 0)
}

/// Seed of the test with method `method` on that pattern.
pub fn test_seed(master: u64, group: u64, pattern: usize, method: usize) -> u64 {
    derive_seed(master, group, pattern as u64, 1 + method as u64)
}

/// Run the study. Output depends only on the config, not the thread count.
pub fn run_study(cfg: &StudyConfig, opts: &RunOptions) -> Result<Vec<ScenarioResult>> {
    cfg.validate()?;
    let groups = cfg.groups()?;
    if let Some(dir) = &opts.detail_dir {
        fs::create_dir_all(dir)?;
    }
    let threads = opts.threads.or(cfg.threads).unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let units: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| (0..cfg.n_patterns).map(move |p| (g, p)))
        .collect();
    log::info!(
        "study: {} groups, {} scenarios, {} work units on {threads} threads",
        groups.len(),
        groups.iter().map(|g| g.methods.iter().map(|m| m.scenarios.len()).sum::<usize>()).sum::<usize>(),
        units.len()
    );
    let outcomes: Vec<Vec<Option<Outcome>>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(g, p)| run_unit(cfg, &groups[g], p, opts.detail_dir.as_deref()))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut results = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let keys: Vec<&ScenarioKey> = group.methods.iter().flat_map(|m| &m.scenarios).collect();
        for (s, key) in keys.into_iter().enumerate() {
            let per_pattern = (0..cfg.n_patterns).map(|p| outcomes[g * cfg.n_patterns + p][s]);
            results.push(aggregate(key.clone(), per_pattern, cfg.alpha_level));
        }
    }
    Ok(results)
}

fn aggregate(key: ScenarioKey, outcomes: impl Iterator<Item = Option<Outcome>>, alpha_level: f64) -> ScenarioResult {
    let (mut ok, mut failed, mut rejected, mut p_sum) = (0usize, 0usize, 0usize, 0.0);
    for o in outcomes {
        match o {
            Some(o) => {
                ok += 1;
                rejected += o.reject as usize;
                p_sum += o.p_value;
            }
            None => failed += 1,
        }
    }
    let rate = (ok > 0).then(|| rejected as f64 / ok as f64);
    ScenarioResult {
        row: ScenarioRow {
            size_exceedance: if key.a == 1.0 {
                rate.map(|r| (r - alpha_level).max(0.0))
            } else {
                None
            },
            scenario_id: key.scenario_id,
            model: key.model,
            a: key.a,
            window_side: key.window_side,
            dss: key.dss,
            statistic: key.statistic,
            replication: key.replication,
            n_tiles: key.n_tiles,
            n_patterns: ok,
            n_failures: failed,
            rejection_rate: rate,
        },
        mean_p: (ok > 0).then(|| p_sum / ok as f64),
    }
}

/// All tests on one observed pattern of a group, one entry per scenario in
/// group order; `None` marks a failed test.
fn run_unit(cfg: &StudyConfig, group: &Group, p: usize, detail_dir: Option<&Path>) -> Result<Vec<Option<Outcome>>> {
    let mut rng = RngStream::from_seed(pattern_seed(cfg.master_seed, group.id, p));
    let observed = group.model.simulate(&group.window, &mut rng);
    let specs: Vec<FunctionalSpec> = cfg.dss_list.iter().map(|d| cfg.functional(*d)).collect();
    let mut out = Vec::new();
    for (mi, method) in group.methods.iter().enumerate() {
        let seed = test_seed(cfg.master_seed, group.id, p, mi);
        let tested = observed
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|pat| test_all(pat, &specs, method, seed).map_err(|e| e.to_string()));
        for (s, key) in method.scenarios.iter().enumerate() {
            let (d, stat) = method.stats[s];
            let result = tested.clone().and_then(|(v0s, reps, fit)| {
                let v0 = v0s[d].as_ref().map_err(|e| e.clone())?;
                let reps = reps[d].as_ref().map_err(|e| e.clone())?;
                let (o, p_value, reject) = decide(
                    v0,
                    reps,
                    stat,
                    cfg.alpha_level,
                    cfg.recentering,
                    cfg.pvalue_orientation,
                )
                .map_err(|e| e.to_string())?;
                Ok(TestResult {
                    dss: key.dss.clone(),
                    statistic: key.statistic.clone(),
                    replication: key.replication.clone(),
                    n_replicates: method.n_replicates,
                    t0: o.t0,
                    p_value,
                    reject,
                    alpha_level: cfg.alpha_level,
                    dropped_coordinates: o.dropped,
                    seed,
                    recentering: cfg.recentering,
                    pvalue_orientation: cfg.pvalue_orientation,
                    v0: v0.clone(),
                    t_rep: o.t_rep,
                    m_hat: o.m_hat,
                    var_hat: o.var_hat,
                    fitted_model: fit,
                })
            });
            if let Err(e) = &result {
                log::warn!("scenario {} pattern {p}: {e}", key.scenario_id);
            }
            out.push(result.as_ref().ok().map(|r| Outcome {
                p_value: r.p_value,
                reject: r.reject,
            }));
            if let Some(dir) = detail_dir {
                let (result, error) = match result {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e)),
                };
                let detail = StudyDetail {
                    scenario: key.clone(),
                    pattern_index: p,
                    result,
                    error,
                };
                let path = dir.join(format!("scenario{:05}_pattern{:06}.json", key.scenario_id, p));
                serde_json::to_writer(File::create(path)?, &detail)?;
            }
        }
    }
    Ok(out)
}

type Functionals = Vec<std::result::Result<Vec<f64>, String>>;
type ReplicateFunctionals = Vec<std::result::Result<Vec<Vec<f64>>, String>>;

/// Observed and replicate functionals for every summary, sharing replicate
/// patterns across summaries. A summary failing on the observed pattern or
/// on any replicate is an error for that summary only.
fn test_all(
    pat: &PointPattern,
    specs: &[FunctionalSpec],
    method: &GroupMethod,
    seed: u64,
) -> Result<(Functionals, ReplicateFunctionals, Option<ModelSpec>)> {
    let v0s: Functionals = specs
        .iter()
        .map(|s| s.evaluate(pat).map(|v| v.values).map_err(|e| e.to_string()))
        .collect();
    let replicator = Replicator::prepare(&method.resolved.replication, pat)?;
    let per_rep: Vec<Result<Vec<Result<Vec<f64>>>>> = (0..method.n_replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::from_seed(replicate_seed(seed, i));
            let rep = replicator.replicate(&mut rng).map_err(|e| Error::Replicate {
                index: i,
                source: Box::new(e),
            })?;
            Ok(specs.iter().map(|s| s.evaluate(&rep).map(|v| v.values)).collect())
        })
        .collect();
    let mut reps: ReplicateFunctionals = vec![Ok(Vec::with_capacity(method.n_replicates)); specs.len()];
    for (i, r) in per_rep.into_iter().enumerate() {
        let values = r?;
        for (d, v) in values.into_iter().enumerate() {
            if let Ok(acc) = &mut reps[d] {
                match v {
                    Ok(v) => acc.push(v),
                    Err(e) => {
                        reps[d] = Err(Error::Replicate {
                            index: i,
                            source: Box::new(e),
                        }
                        .to_string())
                    }
                }
            }
        }
    }
    Ok((v0s, reps, replicator.fit().map(|f| f.model)))
}

/// Output format of the results table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Write the results table as CSV rows.
pub fn write_results_csv<W: Write>(results: &[ScenarioResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in results {
        w.serialize(&r.row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: std::io::Read>(reader: R) -> Result<Vec<ScenarioRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Write results to `path` in the given format.
pub fn emit_outputs(results: &[ScenarioResult], format: OutputFormat, path: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("no results to write".into()));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let file = File::create(path)?;
    match format {
        OutputFormat::Csv => write_results_csv(results, file),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(file, results)?;
            Ok(())
        }
    }
}

/// Aggregate per-test detail documents into result rows. Accepts study
/// detail records and bare test results; bare results are grouped by
/// summary, statistic and replication.
pub fn summarize(paths: &[PathBuf]) -> Result<Vec<ScenarioResult>> {
    let mut groups: BTreeMap<(usize, String), (ScenarioKey, Vec<Option<Outcome>>, f64)> = BTreeMap::new();
    let mut bare_ids: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for path in paths {
        let value: serde_json::Value = serde_json::from_reader(File::open(path)?)?;
        let (key, result) = if value.get("scenario").is_some() {
            let d: StudyDetail = serde_json::from_value(value)?;
            (d.scenario, d.result)
        } else {
            let r: TestResult = serde_json::from_value(value)?;
            let next = bare_ids.len();
            let id = *bare_ids
                .entry((r.dss.clone(), r.statistic.clone(), r.replication.clone()))
                .or_insert(next);
            let key = ScenarioKey {
                scenario_id: id,
                model: "observed".into(),
                a: 1.0,
                window_side: f64::NAN,
                dss: r.dss.clone(),
                statistic: r.statistic.clone(),
                replication: r.replication.clone(),
                n_tiles: None,
            };
            (key, Some(r))
        };
        let alpha = result.as_ref().map(|r| r.alpha_level);
        let tag = format!("{}|{}|{}|{}", key.model, key.dss, key.statistic, key.replication);
        let entry = groups
            .entry((key.scenario_id, tag))
            .or_insert_with(|| (key, Vec::new(), f64::NAN));
        if let Some(alpha) = alpha {
            entry.2 = alpha;
        }
        entry.1.push(result.map(|r| Outcome {
            p_value: r.p_value,
            reject: r.reject,
        }));
    }
    Ok(groups
        .into_values()
        .map(|(mut key, outcomes, alpha)| {
            let bare = key.window_side.is_nan();
            if bare {
                key.window_side = 0.0;
            }
            let mut r = aggregate(key, outcomes.into_iter(), if alpha.is_nan() { 0.05 } else { alpha });
            if bare {
                r.row.size_exceedance = None;
            }
            r
        })
        .collect())
}

/// Settings of the shrub-data workflow: `alpha1 = pi/2`, `alpha2 = 0`,
/// K_cyl with `zeta = 0.15`, range up to 25 on 100 nodes, tiling with
/// `k = 4..=8`.
pub fn ambrosia_configs(n_replicates: usize, alpha_level: f64) -> Vec<TestConfig> {
    (4..=8)
        .map(|k| TestConfig {
            functional: FunctionalSpec {
                dss: Dss::kcyl(),
                alpha1: FRAC_PI_2,
                alpha2: 0.0,
                r_max: Some(25.0),
                kappa: 100,
            },
            statistic: StatKind::MsRangeStd,
            replication: ReplicationConfig::Tiling(TilingConfig { k }),
            n_replicates,
            alpha_level,
            recentering: Recentering::Plugin,
            pvalue_orientation: PValueOrientation::Standard,
        })
        .collect()
}

/// Window of the shrub data set.
pub fn ambrosia_window() -> Window {
    Window::new(0.0, 100.0, 0.0, 100.0).unwrap()
}
