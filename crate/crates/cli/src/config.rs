use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use nowcast::analysis::{KeywordScope, DEFAULT_KEYWORD_POOL};
use nowcast::geo::RegionLevel;
use nowcast::report::Header;
use nowcast::{Normalization, TimeWindow, Transform};

use crate::args::{InputArgs, NormArg, SelectionArgs, TransformArg};

/// Any failure that maps to exit code 1.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! input_error_from {
    ($($t:ty),*) => {
        $(impl From<$t> for InputError {
            fn from(e: $t) -> Self {
                InputError(e.to_string())
            }
        })*
    };
}

input_error_from!(
    std::io::Error,
    serde_json::Error,
    nowcast::ingest::IngestError,
    nowcast::geo::GeoError,
    nowcast::analysis::AnalysisError,
    nowcast::simulate::SimError,
    String
);

pub type Result<T> = std::result::Result<T, InputError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Messages,
    Regions,
    Population,
    Damage,
    Track,
}

impl Input {
    fn flag(self) -> &'static str {
        match self {
            Input::Messages => "--messages",
            Input::Regions => "--regions",
            Input::Population => "--population",
            Input::Damage => "--damage",
            Input::Track => "--track",
        }
    }
}

/// Effective settings of one run, echoed at the top of every report.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub messages: Option<PathBuf>,
    pub regions: Option<PathBuf>,
    pub population: Option<PathBuf>,
    pub damage: Option<PathBuf>,
    pub track: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub level: Option<RegionLevel>,
    pub cell_size: f64,
    pub epoch: DateTime<Utc>,
    pub bin_width: Duration,
    pub period: TimeWindow,
    pub window: TimeWindow,
    pub span: TimeWindow,
    pub normalizations: Vec<Normalization>,
    pub transforms: Vec<Transform>,
    pub keywords: Vec<KeywordScope>,
    pub cities: Option<Vec<String>>,
    pub out: PathBuf,
    /// Command-specific settings.
    pub extra: Vec<(String, String)>,
}

pub fn parse_window(s: &str, flag: &str) -> Result<TimeWindow> {
    s.parse().map_err(|e| InputError(format!("{flag}: {e}")))
}

pub fn parse_epoch(s: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| InputError(format!("--epoch: {e}")))
}

pub fn normalizations(arg: NormArg) -> Vec<Normalization> {
    match arg {
        NormArg::PerCapita => vec![Normalization::PerCapita],
        NormArg::PerPeriodUser => vec![Normalization::PerPeriodUser],
        NormArg::Both => vec![Normalization::PerCapita, Normalization::PerPeriodUser],
    }
}

pub fn single_normalization(arg: NormArg) -> Result<Normalization> {
    match arg {
        NormArg::Both => Err(InputError("--normalization: choose per-capita or per-period-user".into())),
        other => Ok(normalizations(other)[0]),
    }
}

pub fn transforms(arg: TransformArg) -> Vec<Transform> {
    match arg {
        TransformArg::Raw => vec![Transform::Raw],
        TransformArg::Log10 => vec![Transform::Log10],
        TransformArg::Both => vec![Transform::Raw, Transform::Log10],
    }
}

/// Keyword selections in report order: the pool first, then each member
/// when `per_keyword` is set.
pub fn keyword_scopes(sel: &SelectionArgs) -> Vec<KeywordScope> {
    let pool: Vec<String> = match sel.keywords.as_deref().map(str::trim) {
        Some("all") => return vec![KeywordScope::All],
        Some(list) => list
            .split(',')
            .map(|k| k.trim().to_lowercase())
            .filter(|k| !k.is_empty())
            .collect(),
        None => DEFAULT_KEYWORD_POOL.iter().map(|k| k.to_string()).collect(),
    };
    let mut scopes = vec![KeywordScope::pooled(pool.iter().cloned())];
    if sel.per_keyword {
        let mut each = pool;
        each.sort();
        each.dedup();
        scopes.extend(each.into_iter().map(KeywordScope::Keyword));
    }
    scopes
}

fn show(p: &Option<PathBuf>) -> String {
    p.as_deref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into())
}

impl RunConfig {
    pub fn new(command: &'static str, inputs: &InputArgs, out: &Path) -> Result<Self> {
        let level = inputs
            .level
            .as_deref()
            .map(|l| l.parse::<RegionLevel>().map_err(|e| InputError(format!("--level: {e}"))))
            .transpose()?;
        if !(inputs.cell_size > 0.0) {
            return Err(InputError("--cell-size must be positive".into()));
        }
        let period = parse_window(&inputs.period, "--period")?;
        Ok(Self {
            command,
            messages: inputs.messages.clone(),
            regions: inputs.regions.clone(),
            population: inputs.population.clone(),
            damage: inputs.damage.clone(),
            track: inputs.track.clone(),
            gazetteer: inputs.gazetteer.clone(),
            level,
            cell_size: inputs.cell_size,
            epoch: nowcast::metrics::default_epoch(),
            bin_width: Duration::hours(24),
            period,
            window: period,
            span: period,
            normalizations: vec![Normalization::PerCapita],
            transforms: vec![Transform::Raw],
            keywords: vec![KeywordScope::All],
            cities: None,
            out: out.to_path_buf(),
            extra: Vec::new(),
        })
    }

    pub fn path(&self, input: Input) -> Option<&Path> {
        match input {
            Input::Messages => self.messages.as_deref(),
            Input::Regions => self.regions.as_deref(),
            Input::Population => self.population.as_deref(),
            Input::Damage => self.damage.as_deref(),
            Input::Track => self.track.as_deref(),
        }
    }

    /// Checks that the required inputs were given and that every given
    /// file exists.
    pub fn validate(&self, required: &[Input]) -> Result<()> {
        for input in required {
            if self.path(*input).is_none() {
                return Err(InputError(format!("{}: required for `{}`", input.flag(), self.command)));
            }
        }
        let given = [&self.messages, &self.regions, &self.population, &self.damage, &self.track, &self.gazetteer];
        for p in given.into_iter().flatten() {
            if !p.is_file() {
                return Err(InputError(format!("{}: no such file", p.display())));
            }
        }
        if self.bin_width <= Duration::zero() {
            return Err(InputError("bin width must be positive".into()));
        }
        Ok(())
    }

    pub fn header(&self) -> Header {
        let join = |v: Vec<String>| v.join(",");
        let mut h: Header = vec![
            ("tool".into(), format!("nowcast {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), self.command.into()),
            ("messages".into(), show(&self.messages)),
            ("regions".into(), show(&self.regions)),
            ("population".into(), show(&self.population)),
            ("damage".into(), show(&self.damage)),
            ("track".into(), show(&self.track)),
            ("gazetteer".into(), show(&self.gazetteer)),
            ("level".into(), self.level.map(|l| l.to_string()).unwrap_or_else(|| "-".into())),
            ("cell_size_deg".into(), self.cell_size.to_string()),
            ("epoch".into(), self.epoch.format("%Y-%m-%dT%H:%M:%SZ").to_string()),
            ("bin_width_hours".into(), self.bin_width.num_hours().to_string()),
            ("period".into(), self.period.to_string()),
            ("window".into(), self.window.to_string()),
            ("span".into(), self.span.to_string()),
            ("normalization".into(), join(self.normalizations.iter().map(|n| n.to_string()).collect())),
            ("transform".into(), join(self.transforms.iter().map(|t| t.to_string()).collect())),
            ("keywords".into(), self.keywords.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")),
            (
                "cities".into(),
                self.cities.as_ref().map(|c| c.join(",")).unwrap_or_else(|| "default".into()),
            ),
        ];
        h.extend(self.extra.iter().cloned());
        h
    }
}
