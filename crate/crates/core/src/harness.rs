//! Random code generation and the Monte Carlo experiment driver.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certifier::{certify_with, CertifyOptions};
use crate::channel::{transmit, ChannelSpec};
use crate::code::{Assignment, LocalCode, TannerCode, TannerGraph, DEFAULT_ENUMERATION_CAP};
use crate::codefile::parse_code;
use crate::cover::check_cover_optimality;
use crate::decoders::{lp_decode, ml_decode};
use crate::error::{Error, Result};
use crate::omega::{scale_into_box, OmegaSchedule};
use crate::scalar::{Rational, Scalar};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "TANNER_CERT_THREADS";

const CONFIGURATION_ATTEMPTS: usize = 200;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for stream `stream` of item `index`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix(mix(seed ^ mix(stream)) ^ index)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `(d_v, d_c)`-regular with single parity checks.
    Regular { dv: usize, dc: usize, n: usize },
    /// `n` variables with the given local codes; variable degrees as equal as
    /// the edge count allows.
    Irregular { n: usize, kinds: Vec<String> },
}

impl GeneratorSpec {
    /// Parses `regular:dv=2,dc=3,n=9` or `irregular:n=14,codes=hamming7*4`
    /// (`+` separates kinds, `*k` repeats).
    pub fn parse(text: &str) -> Result<Self> {
        let (family, params) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("generator {text:?} lacks ':'")))?;
        let mut map = BTreeMap::new();
        for part in params.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got {part:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let int = |key: &str| -> Result<usize> {
            map.get(key)
                .ok_or_else(|| Error::parse(format!("generator needs {key}")))?
                .parse()
                .map_err(|_| Error::parse(format!("{key} must be a non-negative integer")))
        };
        match family {
            "regular" => Ok(GeneratorSpec::Regular {
                dv: int("dv")?,
                dc: int("dc")?,
                n: int("n")?,
            }),
            "irregular" => {
                let codes = map
                    .get("codes")
                    .ok_or_else(|| Error::parse("generator needs codes"))?;
                let mut kinds = Vec::new();
                for item in codes.split('+') {
                    let (kind, count) = match item.split_once('*') {
                        Some((k, c)) => (
                            k,
                            c.parse()
                                .map_err(|_| Error::parse(format!("bad count in {item:?}")))?,
                        ),
                        None => (item, 1usize),
                    };
                    LocalCode::from_kind(kind)?;
                    kinds.extend(std::iter::repeat_n(kind.to_string(), count));
                }
                Ok(GeneratorSpec::Irregular {
                    n: int("n")?,
                    kinds,
                })
            }
            other => Err(Error::parse(format!("unknown generator family {other:?}"))),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Regular { dv, dc, n } => write!(f, "regular:dv={dv},dc={dc},n={n}"),
            GeneratorSpec::Irregular { n, kinds } => {
                write!(f, "irregular:n={n},codes={}", kinds.join("+"))
            }
        }
    }
}

/// Bipartite configuration model: random socket matching, then random
/// swaps until no local-code node sees a variable twice.
fn configuration_model<R: Rng>(
    var_degrees: &[usize],
    check_degrees: &[usize],
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    let edges: usize = var_degrees.iter().sum();
    if edges != check_degrees.iter().sum::<usize>() {
        return Err(Error::invalid(
            "degree sequences have different edge counts",
        ));
    }
    if check_degrees.iter().any(|&d| d > var_degrees.len()) {
        return Err(Error::invalid(
            "a local-code node has more neighbors than there are variables",
        ));
    }
    let mut owner = Vec::with_capacity(edges);
    let mut block = Vec::with_capacity(check_degrees.len());
    for (c, &d) in check_degrees.iter().enumerate() {
        block.push(owner.len()..owner.len() + d);
        owner.extend(std::iter::repeat_n(c, d));
    }
    let mut sockets = Vec::with_capacity(edges);
    for (v, &d) in var_degrees.iter().enumerate() {
        sockets.extend(std::iter::repeat_n(v, d));
    }
    let clashes = |sockets: &[usize], pos: usize| {
        block[owner[pos]]
            .clone()
            .filter(|&q| q != pos && sockets[q] == sockets[pos])
            .count()
    };
    for _ in 0..CONFIGURATION_ATTEMPTS {
        sockets.shuffle(rng);
        let mut ok = true;
        for pos in 0..edges {
            let mut tries = 0;
            while clashes(&sockets, pos) > 0 {
                tries += 1;
                if tries > 10 * edges {
                    ok = false;
                    break;
                }
                let other = rng.random_range(0..edges);
                if owner[other] == owner[pos] {
                    continue;
                }
                sockets.swap(pos, other);
                if clashes(&sockets, other) > 0 {
                    sockets.swap(pos, other);
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let mut checks = vec![Vec::new(); check_degrees.len()];
            for (pos, &v) in sockets.iter().enumerate() {
                checks[owner[pos]].push(v);
            }
            return Ok(checks);
        }
    }
    Err(Error::invalid(
        "could not realize the degree sequence without repeated edges",
    ))
}

pub fn generate_code(spec: &GeneratorSpec, seed: u64) -> Result<TannerCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GeneratorSpec::Regular { dv, dc, n } => {
            if *dv == 0 || *dc < 2 || *n == 0 || (n * dv) % dc != 0 {
                return Err(Error::invalid(format!(
                    "no ({dv},{dc})-regular graph on {n} variables"
                )));
            }
            let j = n * dv / dc;
            let checks = configuration_model(&vec![*dv; *n], &vec![*dc; j], &mut rng)?;
            TannerCode::with_parity_checks(*n, checks)
        }
        GeneratorSpec::Irregular { n, kinds } => {
            let locals = kinds
                .iter()
                .map(|k| LocalCode::from_kind(k))
                .collect::<Result<Vec<_>>>()?;
            let edges: usize = locals.iter().map(LocalCode::len).sum();
            if *n == 0 || edges < *n {
                return Err(Error::invalid(format!(
                    "{edges} edges cannot cover {n} variables"
                )));
            }
            let mut var_degrees: Vec<usize> = (0..*n)
                .map(|v| edges / n + usize::from(v < edges % n))
                .collect();
            var_degrees.shuffle(&mut rng);
            let check_degrees: Vec<usize> = locals.iter().map(LocalCode::len).collect();
            let checks = configuration_model(&var_degrees, &check_degrees, &mut rng)?;
            TannerCode::new(TannerGraph::new(*n, checks)?, locals)
        }
    }
}

/// A uniformly random nonzero codeword, found by enumeration.
pub fn random_nonzero_codeword<R: Rng>(
    code: &TannerCode,
    rng: &mut R,
) -> Result<Option<Assignment>> {
    let words: Vec<Assignment> = code
        .codewords(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .filter(|w| w.weight() > 0)
        .collect();
    Ok(words.choose(rng).cloned())
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    File(PathBuf),
    Generated(GeneratorSpec),
}

impl fmt::Display for CodeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSource::File(p) => write!(f, "file:{}", p.display()),
            CodeSource::Generated(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodewordMode {
    Zero,
    /// Uniform over all codewords.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IChoice {
    Fixed(usize),
    /// Uniform in `2..=d*` per trial.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub code: CodeSource,
    /// Draw a new code for every trial (generated sources only).
    pub fresh_code: bool,
    pub codeword: CodewordMode,
    pub channel: ChannelSpec,
    pub h: usize,
    pub omega: OmegaSchedule,
    pub i: IChoice,
    pub m_sweep: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub ml: bool,
    pub lp: bool,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(code: CodeSource, channel: ChannelSpec) -> Self {
        ExperimentConfig {
            code,
            fresh_code: false,
            codeword: CodewordMode::Zero,
            channel,
            h: 1,
            omega: OmegaSchedule::Uniform(Rational::from_ratio(1, 1)),
            i: IChoice::Fixed(2),
            m_sweep: vec![1, 2, 3],
            trials: 100,
            seed: 0,
            ml: true,
            lp: true,
            csv: None,
            json: None,
        }
    }

    /// Parses a flat `key = value` file. Relative paths resolve against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            if map
                .insert(k.trim().to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(Error::parse(format!(
                    "line {}: duplicate key {}",
                    lineno + 1,
                    k.trim()
                )));
            }
        }
        let take = |map: &mut BTreeMap<String, String>, key: &str| map.remove(key);
        let code_text = take(&mut map, "code").ok_or_else(|| Error::parse("config needs code"))?;
        let code = match code_text.strip_prefix("file:") {
            Some(path) => CodeSource::File(base_dir.join(path)),
            None => CodeSource::Generated(GeneratorSpec::parse(&code_text)?),
        };
        let denom = match take(&mut map, "quant_denom") {
            Some(d) => d
                .parse()
                .map_err(|_| Error::parse("quant_denom must be a positive integer"))?,
            None => 1_000_000,
        };
        let channel_text =
            take(&mut map, "channel").ok_or_else(|| Error::parse("config needs channel"))?;
        let mut cfg = ExperimentConfig::new(code, ChannelSpec::parse(&channel_text, denom)?);
        let parse_usize = |v: String, key: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::parse(format!("{key} must be a non-negative integer")))
        };
        let parse_bool = |v: String, key: &str| -> Result<bool> {
            v.parse()
                .map_err(|_| Error::parse(format!("{key} must be true or false")))
        };
        for (key, value) in std::mem::take(&mut map) {
            match key.as_str() {
                "fresh_code" => cfg.fresh_code = parse_bool(value, &key)?,
                "codeword" => {
                    cfg.codeword = match value.as_str() {
                        "zero" => CodewordMode::Zero,
                        "random" => CodewordMode::Random,
                        _ => return Err(Error::parse("codeword must be zero or random")),
                    }
                }
                "h" => cfg.h = parse_usize(value, &key)?,
                "omega" => cfg.omega = OmegaSchedule::parse(&value)?,
                "i" => {
                    cfg.i = if value == "random" {
                        IChoice::Random
                    } else {
                        IChoice::Fixed(parse_usize(value, &key)?)
                    }
                }
                "m_sweep" => {
                    cfg.m_sweep = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| parse_usize(s.trim().to_string(), "m_sweep"))
                        .collect::<Result<_>>()?
                }
                "trials" => cfg.trials = parse_usize(value, &key)?,
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| Error::parse("seed must be a u64"))?
                }
                "ml" => cfg.ml = parse_bool(value, &key)?,
                "lp" => cfg.lp = parse_bool(value, &key)?,
                "csv" => cfg.csv = Some(base_dir.join(value)),
                "json" => cfg.json = Some(base_dir.join(value)),
                other => return Err(Error::parse(format!("unknown config key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 {
            return Err(Error::invalid("h must be at least 1"));
        }
        let omega = self.omega.weights(self.h)?;
        if omega
            .iter()
            .any(|w| w.is_negative_strict() || *w > Rational::from_ratio(1, 1))
        {
            return Err(Error::invalid("ω must lie in [0,1]^h"));
        }
        if omega.iter().all(|w| w.is_zero_approx()) {
            return Err(Error::invalid("ω must be nonzero"));
        }
        if self.m_sweep.contains(&0) {
            return Err(Error::invalid("cover degrees must be at least 1"));
        }
        if let IChoice::Fixed(i) = self.i {
            if i < 2 {
                return Err(Error::invalid("i must be at least 2"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverVerdict {
    pub m: usize,
    pub base_certified: bool,
    pub cover_certified: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpCertVerdict {
    pub m: usize,
    pub certified: bool,
    /// Certified but the LP optimum is not the unique integral point `x`.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub num_vars: usize,
    pub num_checks: usize,
    pub d_star: usize,
    pub i: usize,
    pub codeword: String,
    pub llr: Vec<String>,
    pub certified: bool,
    pub boundary: bool,
    pub min_cost: String,
    pub ml_unique: Option<bool>,
    pub ml_match: Option<bool>,
    pub ml_value: Option<String>,
    pub lp_integral: Option<bool>,
    pub lp_unique: Option<bool>,
    pub lp_match: Option<bool>,
    pub lp_value: Option<String>,
    pub covers: Vec<CoverVerdict>,
    pub lp_sweep: Vec<LpCertVerdict>,
    pub ml_violation: bool,
    pub cover_violation: bool,
    pub lp_ml_violation: bool,
    pub error: Option<String>,
    pub certifier_ns: u64,
    pub lp_ns: u64,
}

impl TrialRecord {
    fn failed(trial: usize, seed: u64, error: Error) -> Self {
        TrialRecord {
            trial,
            seed,
            num_vars: 0,
            num_checks: 0,
            d_star: 0,
            i: 0,
            codeword: String::new(),
            llr: Vec::new(),
            certified: false,
            boundary: false,
            min_cost: String::new(),
            ml_unique: None,
            ml_match: None,
            ml_value: None,
            lp_integral: None,
            lp_unique: None,
            lp_match: None,
            lp_value: None,
            covers: Vec::new(),
            lp_sweep: Vec::new(),
            ml_violation: false,
            cover_violation: false,
            lp_ml_violation: false,
            error: Some(error.to_string()),
            certifier_ns: 0,
            lp_ns: 0,
        }
    }

    pub fn any_violation(&self) -> bool {
        self.ml_violation || self.cover_violation || self.lp_ml_violation
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub errors: usize,
    pub certified: usize,
    pub ml_checked: usize,
    pub lp_checked: usize,
    pub ml_violations: usize,
    pub cover_violations: usize,
    pub cover_checked: usize,
    pub lp_ml_violations: usize,
    /// Violations of the LP implication keyed by cover degree.
    pub lp_violations: BTreeMap<usize, usize>,
}

impl ExperimentSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut s = ExperimentSummary {
            trials: records.len(),
            ..Default::default()
        };
        for r in records {
            s.errors += usize::from(r.error.is_some());
            s.certified += usize::from(r.certified);
            s.ml_checked += usize::from(r.ml_unique.is_some());
            s.lp_checked += usize::from(r.lp_integral.is_some());
            s.ml_violations += usize::from(r.ml_violation);
            s.cover_violations += usize::from(r.cover_violation);
            s.cover_checked += r.covers.iter().filter(|c| c.base_certified).count();
            s.lp_ml_violations += usize::from(r.lp_ml_violation);
            for t in &r.lp_sweep {
                *s.lp_violations.entry(t.m).or_default() += usize::from(t.violation);
            }
        }
        s
    }

    /// The ML implication, the cover implication, or the LP bound failed somewhere.
    pub fn has_violations(&self) -> bool {
        self.ml_violations + self.cover_violations + self.lp_ml_violations > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

fn load_code(source: &CodeSource, seed: u64) -> Result<TannerCode> {
    match source {
        CodeSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_code(&text)
        }
        CodeSource::Generated(spec) => generate_code(spec, seed),
    }
}

fn run_trial(
    config: &ExperimentConfig,
    shared: Option<&TannerCode>,
    trial: usize,
) -> Result<TrialRecord> {
    let seed = derive_seed(config.seed, 1, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owned;
    let code = match shared {
        Some(code) => code,
        None => {
            owned = load_code(&config.code, derive_seed(config.seed, 2, trial as u64))?;
            &owned
        }
    };
    let n = code.num_vars();
    let x = match config.codeword {
        CodewordMode::Zero => Assignment::zeros(n),
        CodewordMode::Random => {
            let words = code.codewords(DEFAULT_ENUMERATION_CAP)?;
            words
                .choose(&mut rng)
                .cloned()
                .ok_or_else(|| Error::internal("empty code"))?
        }
    };
    let d_star = code.d_star();
    let i = match config.i {
        IChoice::Fixed(i) => i,
        IChoice::Random => rng.random_range(2..=d_star.max(2)),
    };
    let llr = transmit::<Rational>(
        code,
        &x,
        &config.channel,
        derive_seed(config.seed, 3, trial as u64),
    )?;
    let omega = config.omega.weights(config.h)?;
    let options = CertifyOptions {
        witness: false,
        ..CertifyOptions::default()
    };

    let started = Instant::now();
    let report = certify_with(code, &x, &llr, config.h, &omega, i, options)?;
    let certifier_ns = started.elapsed().as_nanos() as u64;

    let mut record = TrialRecord {
        num_vars: n,
        num_checks: code.num_checks(),
        d_star,
        i,
        codeword: x.to_string(),
        llr: llr.values().iter().map(Scalar::to_exact_string).collect(),
        certified: report.certified,
        boundary: report.boundary,
        min_cost: report.min_cost.to_exact_string(),
        certifier_ns,
        error: None,
        ..TrialRecord::failed(trial, seed, Error::internal(""))
    };

    let ml = if config.ml && n <= DEFAULT_ENUMERATION_CAP {
        Some(ml_decode(code, &llr)?)
    } else {
        None
    };
    if let Some(ml) = &ml {
        let matches = ml.best.first() == Some(&x);
        record.ml_unique = Some(ml.unique);
        record.ml_match = Some(matches);
        record.ml_value = Some(ml.value.to_exact_string());
        record.ml_violation = report.certified && !(ml.unique && matches);
    }

    if config.lp {
        let started = Instant::now();
        let lp = lp_decode(code, &llr)?;
        record.lp_ns = started.elapsed().as_nanos() as u64;
        let word = lp.as_codeword();
        let matches = word.as_ref() == Some(&x);
        record.lp_integral = Some(lp.integral);
        record.lp_unique = Some(lp.unique);
        record.lp_match = Some(matches);
        record.lp_value = Some(lp.value.to_exact_string());
        let integral_ok = match &word {
            Some(w) => code.is_codeword(w)?,
            None => true,
        };
        let bound_ok = ml.as_ref().is_none_or(|ml| lp.value <= ml.value);
        record.lp_ml_violation = !(integral_ok && bound_ok);
        for &m in &config.m_sweep {
            let scaled = scale_into_box(&omega, m);
            let cert = certify_with(code, &x, &llr, config.h, &scaled, i, options)?;
            record.lp_sweep.push(LpCertVerdict {
                m,
                certified: cert.certified,
                violation: cert.certified && !(matches && lp.unique),
            });
        }
    }

    for (k, &m) in config.m_sweep.iter().enumerate() {
        let scaled = scale_into_box(&omega, m);
        let cover_seed = derive_seed(config.seed, 4 + k as u64, trial as u64);
        let rep = check_cover_optimality(code, &x, &llr, config.h, &scaled, i, m, cover_seed)?;
        record.cover_violation |= rep.violation;
        record.covers.push(CoverVerdict {
            m,
            base_certified: rep.base_certified,
            cover_certified: rep.cover_certified,
            violation: rep.violation,
        });
    }
    Ok(record)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .parse()
            .map_err(|_| Error::invalid(format!("{THREADS_ENV} must be a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::internal(e.to_string()))
}

/// Runs every trial; per-trial failures are recorded, not raised.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let shared = if config.fresh_code && matches!(config.code, CodeSource::Generated(_)) {
        None
    } else {
        Some(load_code(&config.code, derive_seed(config.seed, 2, 0))?)
    };
    let pool = thread_pool()?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| {
                run_trial(config, shared.as_ref(), t).unwrap_or_else(|e| {
                    TrialRecord::failed(t, derive_seed(config.seed, 1, t as u64), e)
                })
            })
            .collect()
    });
    let summary = ExperimentSummary::from_records(&records);
    Ok(Experiment { records, summary })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Column order of the CSV output.
pub const CSV_COLUMNS: [&str; 22] = [
    "trial",
    "seed",
    "num_vars",
    "num_checks",
    "d_star",
    "i",
    "codeword",
    "certified",
    "boundary",
    "min_cost",
    "ml_unique",
    "ml_match",
    "ml_value",
    "lp_integral",
    "lp_unique",
    "lp_match",
    "lp_value",
    "covers",
    "lp_sweep",
    "ml_violation",
    "cover_violation",
    "error",
];

/// CSV without timing columns, so equal inputs give equal bytes. `covers` is
/// `M:base/cover` and `lp_sweep` is `M:certified/violation`, `;`-separated.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::internal(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    let flag = |b: bool| u8::from(b).to_string();
    for r in records {
        let covers = r
            .covers
            .iter()
            .map(|c| {
                format!(
                    "{}:{}/{}",
                    c.m,
                    flag(c.base_certified),
                    flag(c.cover_certified)
                )
            })
            .collect::<Vec<_>>()
            .join(";");
        let lp_sweep = r
            .lp_sweep
            .iter()
            .map(|t| format!("{}:{}/{}", t.m, flag(t.certified), flag(t.violation)))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.num_vars.to_string(),
            r.num_checks.to_string(),
            r.d_star.to_string(),
            r.i.to_string(),
            r.codeword.clone(),
            flag(r.certified),
            flag(r.boundary),
            r.min_cost.clone(),
            opt(&r.ml_unique.map(flag)),
            opt(&r.ml_match.map(flag)),
            opt(&r.ml_value),
            opt(&r.lp_integral.map(flag)),
            opt(&r.lp_unique.map(flag)),
            opt(&r.lp_match.map(flag)),
            opt(&r.lp_value),
            covers,
            lp_sweep,
            flag(r.ml_violation),
            flag(r.cover_violation),
            opt(&r.error),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::internal(e.to_string()))
}

pub fn experiment_json(config: &ExperimentConfig, experiment: &Experiment) -> Value {
    json!({
        "config": {
            "code": config.code.to_string(),
            "fresh_code": config.fresh_code,
            "channel": config.channel.to_string(),
            "h": config.h,
            "omega": config.omega.to_string(),
            "i": match config.i { IChoice::Fixed(i) => i.to_string(), IChoice::Random => "random".into() },
            "m_sweep": config.m_sweep,
            "trials": config.trials,
            "seed": config.seed,
        },
        "summary": experiment.summary,
        "records": experiment.records,
    })
}

/// Writes the CSV and JSON outputs named in the config.
pub fn write_outputs(config: &ExperimentConfig, experiment: &Experiment) -> Result<()> {
    let create = |p: &Path| {
        std::fs::File::create(p)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", p.display())))
    };
    if let Some(path) = &config.csv {
        write_csv(&experiment.records, create(path)?)?;
    }
    if let Some(path) = &config.json {
        let text = serde_json::to_string_pretty(&experiment_json(config, experiment))
            .map_err(|e| Error::internal(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
