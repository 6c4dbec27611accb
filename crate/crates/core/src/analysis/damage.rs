use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ingest::{DamageSource, DamageTable};
use crate::metrics::{denominator, normalized_activity, ActivitySummary, TimeWindow};
use crate::{CorrelationResult, MessageRecord, Method, Normalization, Transform};

use super::AnalysisError;

/// Keywords pooled for the damage tables when none are given.
pub const DEFAULT_KEYWORD_POOL: [&str; 5] = ["sandy", "hurricane", "storm", "power", "flooding"];

/// Damage series a correlation is computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DamageBasis {
    /// FEMA assistance plus insurance claims.
    ExPost,
    FemaIa,
    Insurance,
    Hazus,
}

impl DamageBasis {
    pub const ALL: [DamageBasis; 4] = [DamageBasis::ExPost, DamageBasis::FemaIa, DamageBasis::Insurance, DamageBasis::Hazus];

    pub fn as_str(self) -> &'static str {
        match self {
            DamageBasis::ExPost => "ex_post",
            DamageBasis::FemaIa => "fema_ia",
            DamageBasis::Insurance => "insurance",
            DamageBasis::Hazus => "hazus",
        }
    }

    pub fn sources(self) -> &'static [DamageSource] {
        match self {
            DamageBasis::ExPost => &[DamageSource::FemaIa, DamageSource::Insurance],
            DamageBasis::FemaIa => &[DamageSource::FemaIa],
            DamageBasis::Insurance => &[DamageSource::Insurance],
            DamageBasis::Hazus => &[DamageSource::Hazus],
        }
    }
}

impl fmt::Display for DamageBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DamageBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DamageBasis::ALL
            .into_iter()
            .find(|b| b.as_str() == s.trim())
            .ok_or_else(|| format!("unknown damage basis `{}`", s.trim()))
    }
}

/// Damage totals in USD per basis and region.
pub type DamageByBasis = BTreeMap<DamageBasis, BTreeMap<String, f64>>;

/// Totals for every basis that has at least one record in `table`.
pub fn damage_by_basis(table: &DamageTable) -> DamageByBasis {
    let mut out = DamageByBasis::new();
    for basis in DamageBasis::ALL {
        let totals: BTreeMap<String, f64> = table
            .regions()
            .filter_map(|r| table.sum(r, basis.sources()).map(|v| (r.to_owned(), v)))
            .collect();
        if !totals.is_empty() {
            out.insert(basis, totals);
        }
    }
    out
}

/// Damage divided by population for every region with a positive
/// population. Regions without a damage record count as undamaged.
pub fn per_capita_damage(damage: &BTreeMap<String, f64>, population: &BTreeMap<String, u64>) -> BTreeMap<String, f64> {
    population
        .iter()
        .filter(|(_, p)| **p > 0)
        .map(|(r, p)| (r.clone(), damage.get(r).copied().unwrap_or(0.0) / *p as f64))
        .collect()
}

/// Which messages count towards a summary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum KeywordScope {
    All,
    Pooled(BTreeSet<String>),
    Keyword(String),
}

impl KeywordScope {
    pub fn keyword(k: impl Into<String>) -> Self {
        KeywordScope::Keyword(k.into())
    }

    pub fn pooled<I, S>(keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        KeywordScope::Pooled(keywords.into_iter().map(Into::into).collect())
    }

    pub fn default_pool() -> Self {
        Self::pooled(DEFAULT_KEYWORD_POOL)
    }

    pub fn matches(&self, m: &MessageRecord) -> bool {
        match self {
            KeywordScope::All => true,
            KeywordScope::Pooled(set) => m.matches_any(set),
            KeywordScope::Keyword(k) => m.has_keyword(k),
        }
    }

    /// Value of the `keyword` report column.
    pub fn label(&self) -> String {
        match self {
            KeywordScope::All => "all".into(),
            KeywordScope::Pooled(_) => "pooled".into(),
            KeywordScope::Keyword(k) => k.clone(),
        }
    }
}

impl fmt::Display for KeywordScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeywordScope::Pooled(set) => {
                let joined: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "pooled({})", joined.join("+"))
            }
            other => f.write_str(&other.label()),
        }
    }
}

/// Variable correlated against damage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Activity,
    Sentiment,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Activity => "activity",
            Scope::Sentiment => "sentiment",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportCell {
    pub scope: Scope,
    pub keyword: String,
    pub damage_source: DamageBasis,
    pub normalization: Normalization,
    pub result: CorrelationResult,
    /// Candidate regions that did not contribute a pair.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub window: TimeWindow,
    pub normalizations: Vec<Normalization>,
    pub transforms: Vec<Transform>,
    pub methods: Vec<Method>,
    /// Count only original messages on the activity side.
    pub original_only: bool,
    pub include_sentiment: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            window: "2012-10-31..2012-11-12".parse().expect("valid default window"),
            normalizations: vec![Normalization::PerCapita, Normalization::PerPeriodUser],
            transforms: vec![Transform::Raw, Transform::Log10],
            methods: Method::ALL.to_vec(),
            original_only: false,
            include_sentiment: true,
        }
    }
}

/// Paired values for one cell, in region order.
fn cell_pairs(
    summaries: &BTreeMap<String, ActivitySummary>,
    damage: &BTreeMap<String, f64>,
    scope: Scope,
    normalization: Normalization,
    original_only: bool,
) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (region, s) in summaries.iter().filter(|(_, s)| s.is_active()) {
        let Some(pop) = s.population.filter(|p| *p > 0) else { continue };
        let loss = damage.get(region).copied().unwrap_or(0.0);
        match scope {
            Scope::Activity => {
                if let Some(a) = normalized_activity(s, normalization, original_only) {
                    x.push(a);
                    y.push(loss / pop as f64);
                }
            }
            Scope::Sentiment => {
                // The activity side has nothing to normalize here, so the
                // toggle selects the damage denominator instead.
                if let (Some(v), Some(d)) = (s.mean_sentiment, denominator(s, normalization)) {
                    x.push(v);
                    y.push(loss / d as f64);
                }
            }
        }
    }
    (x, y)
}

/// Every correlation cell for the given keyword selections, damage bases,
/// normalizations, transforms and methods, in that nesting order.
pub fn damage_correlation_report(
    summaries: &[(KeywordScope, BTreeMap<String, ActivitySummary>)],
    damage: &DamageByBasis,
    options: &ReportOptions,
) -> Result<Vec<ReportCell>, AnalysisError> {
    let mut scopes = vec![Scope::Activity];
    if options.include_sentiment {
        scopes.push(Scope::Sentiment);
    }
    let mut jobs = Vec::new();
    for scope in &scopes {
        for (keywords, by_region) in summaries {
            for (basis, loss) in damage {
                for norm in &options.normalizations {
                    jobs.push((*scope, keywords, by_region, *basis, loss, *norm));
                }
            }
        }
    }
    let cells: Result<Vec<Vec<ReportCell>>, AnalysisError> = jobs
        .par_iter()
        .map(|&(scope, keywords, by_region, basis, loss, norm)| {
            let (x, y) = cell_pairs(by_region, loss, scope, norm, options.original_only);
            let mut out = Vec::new();
            for transform in &options.transforms {
                for method in &options.methods {
                    let result = crate::stats::correlate(&x, &y, *method, *transform)?;
                    out.push(ReportCell {
                        scope,
                        keyword: keywords.label(),
                        damage_source: basis,
                        normalization: norm,
                        excluded: by_region.len() - result.n,
                        result,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    Ok(cells?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{fixture_damage, fixture_summaries};
    use crate::ingest::sandy_counties;

    fn find(cells: &[ReportCell], basis: DamageBasis, method: Method, transform: Transform) -> &ReportCell {
        cells
            .iter()
            .find(|c| {
                c.scope == Scope::Activity
                    && c.damage_source == basis
                    && c.normalization == Normalization::PerCapita
                    && c.result.method == method
                    && c.result.transform == transform
            })
            .unwrap()
    }

    #[test]
    fn fixture_cells() {
        let rows = sandy_counties();
        let opts = ReportOptions::default();
        let summaries = vec![(KeywordScope::All, fixture_summaries(&rows, opts.window))];
        let cells = damage_correlation_report(&summaries, &fixture_damage(&rows), &opts).unwrap();
        // 2 bases x 2 normalizations x 2 transforms x 3 methods; sentiment
        // cells are all degenerate because the table has no sentiment.
        assert_eq!(cells.len(), 48);
        let k = find(&cells, DamageBasis::ExPost, Method::Kendall, Transform::Raw);
        assert!((k.result.coefficient - 0.339031).abs() < 1e-6);
        assert_eq!((k.result.n, k.excluded), (27, 0));
        let s = find(&cells, DamageBasis::Hazus, Method::Spearman, Transform::Raw);
        assert!((s.result.coefficient - 0.445055).abs() < 1e-6);
        let p = find(&cells, DamageBasis::ExPost, Method::Pearson, Transform::Log10);
        assert!((p.result.coefficient - 0.4049).abs() < 1e-3);
        assert!(cells.iter().filter(|c| c.scope == Scope::Sentiment).all(|c| c.result.is_degenerate()));
    }

    #[test]
    fn identical_activity_and_damage() {
        let rows = sandy_counties();
        let opts = ReportOptions { normalizations: vec![Normalization::PerCapita], include_sentiment: false, ..Default::default() };
        let summaries = fixture_summaries(&rows, opts.window);
        let loss: BTreeMap<String, f64> = summaries.iter().map(|(r, s)| (r.clone(), s.n_messages as f64)).collect();
        let damage: DamageByBasis = [(DamageBasis::ExPost, loss)].into();
        let cells = damage_correlation_report(&[(KeywordScope::All, summaries)], &damage, &opts).unwrap();
        for c in cells {
            assert!((c.result.coefficient - 1.0).abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn basis_totals() {
        let mut t = DamageTable::default();
        for (r, a, s) in [("a", 1.0, DamageSource::FemaIa), ("a", 2.0, DamageSource::Insurance), ("b", 5.0, DamageSource::Hazus)] {
            t.add(&crate::DamageRecord { region_id: r.into(), amount_usd: a, source: s });
        }
        let d = damage_by_basis(&t);
        assert_eq!(d[&DamageBasis::ExPost]["a"], 3.0);
        assert!(!d[&DamageBasis::ExPost].contains_key("b"));
        assert_eq!(d[&DamageBasis::Hazus]["b"], 5.0);
        let pop = [("a".to_owned(), 3), ("c".to_owned(), 4)].into();
        let pc = per_capita_damage(&d[&DamageBasis::ExPost], &pop);
        assert_eq!(pc, [("a".to_owned(), 1.0), ("c".to_owned(), 0.0)].into());
    }

    #[test]
    fn empty_cell_is_degenerate() {
        let opts = ReportOptions::default();
        let damage: DamageByBasis = [(DamageBasis::Hazus, BTreeMap::new())].into();
        let cells = damage_correlation_report(&[(KeywordScope::All, BTreeMap::new())], &damage, &opts).unwrap();
        assert!(cells.iter().all(|c| c.result.is_degenerate() && c.result.n == 0));
    }
}
