//! Groups, intervals, poset, selection and audit, in that order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use poset_screen::construct::apply_floor_region;
use poset_screen::{
    apply_floor, audit_selection, build_intervals, build_poset, cluster_groups,
    cutoff_select_intervals, multi_cutoff_select, top_k_poset_select, AuditReport, Candidate,
    GroupStats, Interval, Poset, Region, ScoreInterval, SelectionResult,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Cutoff, PipelineConfig, SelectionMode};
use crate::export::{self, ExportError};
use crate::ingest::{Pool, Schema, Supplied};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Groups,
    Intervals,
    Poset,
    Selection,
    Audit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Groups => "groups",
            Stage::Intervals => "intervals",
            Stage::Poset => "poset",
            Stage::Selection => "selection",
            Stage::Audit => "audit",
        })
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: fmt::Display> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError { stage, message: e.to_string() })
    }
}

fn fail<T>(stage: Stage, message: impl Into<String>) -> Result<T, PipelineError> {
    Err(PipelineError { stage, message: message.into() })
}

/// Per-candidate ranges: scalar intervals or multi-attribute boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranges {
    Intervals(BTreeMap<String, Interval>),
    Regions(BTreeMap<String, Region>),
}

impl Ranges {
    pub fn len(&self) -> usize {
        match self {
            Ranges::Intervals(m) => m.len(),
            Ranges::Regions(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything up to and including the partial order.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub groups: BTreeMap<String, String>,
    pub ranges: Ranges,
    pub poset: Poset,
    pub log: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub constructed: Constructed,
    pub selection: SelectionResult,
    pub report: AuditReport,
}

/// Point used to cluster a candidate when it has no feature vector.
fn cluster_point(c: &Candidate<f64>, supplied: Option<&Supplied>) -> Option<Vec<f64>> {
    if !c.features.is_empty() {
        return Some(c.features.clone());
    }
    match supplied {
        Some(Supplied::Interval(iv)) => return Some(vec![iv.midpoint()]),
        Some(Supplied::Region(r)) => return Some(r.center()),
        None => {}
    }
    if let Some(s) = c.raw_score {
        return Some(vec![s]);
    }
    (!c.evaluations.is_empty())
        .then(|| vec![c.evaluations.iter().sum::<f64>() / c.evaluations.len() as f64])
}

fn assign_groups(config: &PipelineConfig, pool: &Pool, log: &mut Vec<String>) -> Result<BTreeMap<String, String>, PipelineError> {
    let stage = Stage::Groups;
    if let Some(spec) = config.cluster {
        let mut points = Vec::with_capacity(pool.len());
        for c in &pool.candidates {
            match cluster_point(c, pool.supplied.get(&c.id)) {
                Some(p) => points.push(p),
                None => return fail(stage, format!("candidate {} has nothing to cluster on", c.id)),
            }
        }
        let result = cluster_groups(&points, spec.k, spec.seed).at(stage)?;
        let ids: Vec<String> = pool.candidates.iter().map(|c| c.id.clone()).collect();
        log.push(format!(
            "groups: k-means with k={} seed={} ({} iterations, objective {})",
            spec.k,
            spec.seed,
            result.iterations,
            result.objective()
        ));
        return result.label_map(&ids).at(stage);
    }
    let mut groups = BTreeMap::new();
    for c in &pool.candidates {
        let Some(g) = &c.group else {
            let line = pool.lines.get(&c.id).copied().unwrap_or(0);
            return fail(stage, format!("candidate {} (line {line}) has no {} label", c.id, config.group_column()));
        };
        groups.insert(c.id.clone(), g.clone());
    }
    let distinct: std::collections::BTreeSet<&String> = groups.values().collect();
    log.push(format!("groups: column {:?}, {} groups", config.group_column(), distinct.len()));
    Ok(groups)
}

fn build_ranges(
    config: &PipelineConfig,
    pool: &Pool,
    groups: &BTreeMap<String, String>,
    log: &mut Vec<String>,
) -> Result<Ranges, PipelineError> {
    let stage = Stage::Intervals;
    let policy = config.policy().at(stage)?;
    let floor = config.floor;
    let Some(policy) = policy else {
        log.push(format!("intervals: as given, floor {floor} applied"));
        return match pool.schema {
            Schema::Scores => pool
                .candidates
                .iter()
                .map(|c| {
                    let iv = ScoreInterval::point(c.score()?)?;
                    Ok((c.id.clone(), apply_floor(iv, floor)?))
                })
                .collect::<poset_screen::Result<_>>()
                .map(Ranges::Intervals)
                .at(stage),
            Schema::Intervals | Schema::Regions => {
                let mut intervals = BTreeMap::new();
                let mut regions = BTreeMap::new();
                for (id, s) in &pool.supplied {
                    match s {
                        Supplied::Interval(iv) => {
                            intervals.insert(id.clone(), apply_floor(*iv, floor).at(stage)?);
                        }
                        Supplied::Region(r) => {
                            regions.insert(id.clone(), apply_floor_region(r.clone(), floor).at(stage)?);
                        }
                    }
                }
                Ok(if pool.schema == Schema::Regions {
                    Ranges::Regions(regions)
                } else {
                    Ranges::Intervals(intervals)
                })
            }
            Schema::Evaluations => fail(stage, "as_given needs scores, intervals or regions input"),
        };
    };

    let needs = if config.method == "human_centric" { Schema::Evaluations } else { Schema::Scores };
    if pool.schema != needs {
        return fail(stage, format!("method {} needs {needs} input, got {}", config.method, pool.schema));
    }
    let candidates: Vec<Candidate<f64>> = pool
        .candidates
        .iter()
        .map(|c| Candidate { group: groups.get(&c.id).cloned(), ..c.clone() })
        .collect();
    let stats = match &config.group_stats {
        Some(given) => {
            let mut stats = GroupStats::new();
            for (label, summary) in given {
                stats.insert(label.clone(), *summary).at(stage)?;
            }
            stats
        }
        None if needs == Schema::Scores => GroupStats::from_scores(
            candidates
                .iter()
                .filter_map(|c| Some((c.group.as_deref()?, c.raw_score?))),
        )
        .at(stage)?,
        None => GroupStats::new(),
    };
    for (label, s) in stats.iter() {
        log.push(format!("intervals: group {label:?} n={} mean={} sd={}", s.n, s.mean, s.sd));
    }
    let intervals = build_intervals(&candidates, &policy, &stats).at(stage)?;
    log.push(format!(
        "intervals: {} over {} candidates, floor {floor} applied after construction",
        config.method,
        intervals.len()
    ));
    Ok(Ranges::Intervals(intervals))
}

/// Runs the groups, intervals and poset stages.
pub fn construct(config: &PipelineConfig, pool: &Pool) -> Result<Constructed, PipelineError> {
    let mut log = Vec::new();
    let groups = assign_groups(config, pool, &mut log)?;
    let ranges = build_ranges(config, pool, &groups, &mut log)?;
    let poset = match &ranges {
        Ranges::Intervals(m) => build_poset(&m.clone().into_iter().collect::<Vec<_>>()),
        Ranges::Regions(m) => build_poset(&m.clone().into_iter().collect::<Vec<_>>()),
    }
    .at(Stage::Poset)?;
    log.push(format!(
        "poset: {} candidates, {} dominance pairs, {} maximal",
        poset.len(),
        poset.edge_count(),
        poset.maximal_elements().len()
    ));
    Ok(Constructed { groups, ranges, poset, log })
}

pub fn select(config: &PipelineConfig, c: &Constructed) -> Result<SelectionResult, PipelineError> {
    let stage = Stage::Selection;
    match config.selection {
        SelectionMode::Cutoff => {
            let Some(cutoff) = &config.cutoff else {
                return fail(stage, "cutoff selection needs a cutoff");
            };
            match (&c.ranges, cutoff) {
                (Ranges::Intervals(m), Cutoff::Single(t)) => Ok(cutoff_select_intervals(m, *t)),
                (Ranges::Intervals(m), Cutoff::PerAttribute(ts)) if ts.len() == 1 => {
                    Ok(cutoff_select_intervals(m, ts[0]))
                }
                (Ranges::Intervals(_), Cutoff::PerAttribute(ts)) => {
                    fail(stage, format!("{} cutoffs given for scalar intervals", ts.len()))
                }
                (Ranges::Regions(m), cutoff) => multi_cutoff_select(m, &cutoff.values()).at(stage),
            }
        }
        SelectionMode::TopK => {
            let (Some(k), Some(seed)) = (config.k, config.seed) else {
                return fail(stage, "top_k selection needs k and seed");
            };
            top_k_poset_select(&c.poset, k, seed).at(stage)
        }
    }
}

pub fn run_pipeline(config: &PipelineConfig, pool: &Pool) -> Result<PipelineRun, PipelineError> {
    config.validate().map_err(|e| PipelineError { stage: Stage::Groups, message: e.to_string() })?;
    let mut constructed = construct(config, pool)?;
    let selection = select(config, &constructed)?;
    constructed.log.push(match config.selection {
        SelectionMode::Cutoff => format!("selection: cutoff, {} selected", selection.len()),
        SelectionMode::TopK => format!(
            "selection: top_k k={} seed={}, {} selected",
            config.k.unwrap_or(0),
            config.seed.unwrap_or(0),
            selection.len()
        ),
    });
    let mut report = audit_selection(&constructed.groups, &selection, config.echo()).at(Stage::Audit)?;
    report.notes.extend(constructed.log.iter().cloned());
    Ok(PipelineRun { constructed, selection, report })
}

pub const DOT_FILE: &str = "hasse.dot";
pub const REPORT_FILE: &str = "report.json";
pub const SELECTION_JSON: &str = "selection.json";
pub const SELECTION_CSV: &str = "selection.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const RANGES_FILE: &str = "ranges.csv";

/// `id,group,low,high` or `id,group,low_1,high_1,...`, re-readable with the
/// matching schema.
pub fn write_ranges_csv(c: &Constructed, path: &Path) -> Result<(), ExportError> {
    let wrap = |source| ExportError::Csv { path: path.display().to_string(), source };
    let mut w = csv::Writer::from_writer(Vec::new());
    let group = |id: &str| c.groups.get(id).cloned().unwrap_or_default();
    match &c.ranges {
        Ranges::Intervals(m) => {
            w.write_record(["id", "group", "low", "high"]).map_err(wrap)?;
            for (id, iv) in m {
                w.write_record([id.clone(), group(id), iv.low().to_string(), iv.high().to_string()])
                    .map_err(wrap)?;
            }
        }
        Ranges::Regions(m) => {
            let dim = m.values().next().map_or(0, Region::dim);
            let mut header = vec!["id".to_owned(), "group".to_owned()];
            for d in 1..=dim {
                header.push(format!("low_{d}"));
                header.push(format!("high_{d}"));
            }
            w.write_record(&header).map_err(wrap)?;
            for (id, r) in m {
                let mut row = vec![id.clone(), group(id)];
                for iv in r.intervals() {
                    row.push(iv.low().to_string());
                    row.push(iv.high().to_string());
                }
                w.write_record(&row).map_err(wrap)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| wrap(e.into_error().into()))?;
    std::fs::write(path, bytes).map_err(|source| ExportError::Io { path: path.display().to_string(), source })
}

pub fn write_constructed(c: &Constructed, dir: &Path) -> Result<(), ExportError> {
    std::fs::create_dir_all(dir).map_err(|source| ExportError::Io { path: dir.display().to_string(), source })?;
    export::export_hasse_dot(&c.poset, &dir.join(DOT_FILE))?;
    write_ranges_csv(c, &dir.join(RANGES_FILE))
}

pub fn write_selection(selection: &SelectionResult, dir: &Path) -> Result<(), ExportError> {
    export::write_json(selection, &dir.join(SELECTION_JSON))?;
    export::write_selection_csv(selection, &dir.join(SELECTION_CSV))
}

/// Writes every pipeline output into `dir`.
pub fn write_outputs(run: &PipelineRun, dir: &Path) -> Result<(), ExportError> {
    write_constructed(&run.constructed, dir)?;
    write_selection(&run.selection, dir)?;
    export::write_json(&run.report, &dir.join(REPORT_FILE))?;
    export::write_rates_csv(&run.report.per_group, &dir.join(RATES_FILE))
}
