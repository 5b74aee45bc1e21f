//! Success and efficiency metrics over recorded trajectories.

mod log;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use log::{LogHeader, LogReader, LogRecord, ObjectInfo, ObjectSnapshot, TrajectoryLog, LOG_VERSION};

use crate::logic::GoalOptions;
use crate::syntax::{ActivityDefinition, DomainDefinition};
use crate::taxonomy::Taxonomy;
use crate::world::{distance, logical_snapshot, FactSet, ObjectId, Vec3, WorldError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unsupported log_version {0} (expected {LOG_VERSION})")]
    UnsupportedVersion(u64),
    #[error("the log has no header")]
    EmptyLog,
    #[error("the log has no records")]
    NoRecords,
    #[error("record {record}: step does not increase")]
    StepOrder { record: u64 },
    #[error("record {record}: clock runs backwards")]
    ClockOrder { record: u64 },
    #[error("record {record}: unknown object `{object}`")]
    UnknownObject { record: u64, object: ObjectId },
    #[error("record {record}: object `{object}` is missing")]
    MissingObject { record: u64, object: ObjectId },
    #[error("record {record}: {source}")]
    Facts { record: u64, source: WorldError },
    #[error("the goal has no options")]
    NoOptions,
    #[error("no baseline reached the goal")]
    NoSuccessfulBaseline,
    #[error(transparent)]
    Scene(#[from] WorldError),
}

/// Fraction of satisfied literals in the best option.
///
/// An option with no literals counts as fully satisfied.
pub fn success_score(opts: &GoalOptions, facts: &FactSet) -> Result<f64, ScoreError> {
    opts.options
        .iter()
        .map(|option| {
            if option.is_empty() {
                return 1.0;
            }
            let hit = option
                .iter()
                .filter(|l| facts.contains(&l.formula) != l.negated)
                .count();
            hit as f64 / option.len() as f64
        })
        .reduce(f64::max)
        .ok_or(ScoreError::NoOptions)
}

/// Success and efficiency of one trajectory. Distances in m, times in s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub q_final: f64,
    pub q_series: Vec<f64>,
    pub t_sim: f64,
    /// Sum of per-step object displacements.
    pub d_k_accumulated: f64,
    /// Sum of first-to-last object displacements.
    pub d_k_differential: f64,
    /// Fact flips summed over steps.
    pub d_l_accumulated: f64,
    /// Size of the symmetric difference of the first and last fact sets.
    pub d_l_differential: f64,
    pub l_body: f64,
    pub l_left: f64,
    pub l_right: f64,
    /// Human-relative ratios (1 = parity, larger = better), when baselines were given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<BTreeMap<String, f64>>,
}

impl MetricsReport {
    /// The lower-is-better metrics by name.
    pub fn efficiency(&self) -> [(&'static str, f64); 8] {
        [
            ("t_sim", self.t_sim),
            ("d_k_accumulated", self.d_k_accumulated),
            ("d_k_differential", self.d_k_differential),
            ("d_l_accumulated", self.d_l_accumulated),
            ("d_l_differential", self.d_l_differential),
            ("l_body", self.l_body),
            ("l_left", self.l_left),
            ("l_right", self.l_right),
        ]
    }

    /// One `key=value` line per metric. Reals use the shortest round-trip form.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "q_final={}", self.q_final);
        let series: Vec<String> = self.q_series.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "q_series={}", series.join(","));
        for (k, v) in self.efficiency() {
            let _ = writeln!(out, "{k}={v}");
        }
        if let Some(norm) = &self.normalized {
            for (k, v) in norm {
                let _ = writeln!(out, "normalized.{k}={v}");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Where per-step fact sets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactMode {
    /// Cached facts when a record has them, else recompute.
    #[default]
    PreferCached,
    /// Always rebuild the scene and recompute.
    Recompute,
}

pub struct ScoringContext<'a> {
    pub def: &'a ActivityDefinition,
    pub options: &'a GoalOptions,
    pub taxonomy: &'a Taxonomy,
    pub domain: &'a DomainDefinition,
    pub mode: FactMode,
}

fn positions(record: &LogRecord) -> Vec<(&ObjectId, Vec3)> {
    record
        .objects
        .iter()
        .map(|(id, o)| (id, o.pose.position))
        .collect()
}

/// Scores a record stream in one forward pass.
pub fn score_stream(
    header: &LogHeader,
    records: impl IntoIterator<Item = Result<LogRecord, ScoreError>>,
    ctx: &ScoringContext,
) -> Result<MetricsReport, ScoreError> {
    struct Prev {
        step: u64,
        clock: f64,
        record: LogRecord,
        facts: FactSet,
    }
    let mut first: Option<(u64, Vec<Vec3>, FactSet)> = None;
    let mut prev: Option<Prev> = None;
    let mut report = MetricsReport {
        q_final: 0.0,
        q_series: Vec::new(),
        t_sim: 0.0,
        d_k_accumulated: 0.0,
        d_k_differential: 0.0,
        d_l_accumulated: 0.0,
        d_l_differential: 0.0,
        l_body: 0.0,
        l_left: 0.0,
        l_right: 0.0,
        normalized: None,
    };

    for record in records {
        let mut record = record?;
        let step = record.step;
        if let Some(id) = record.objects.keys().find(|id| !header.objects.contains_key(*id)) {
            return Err(ScoreError::UnknownObject { record: step, object: id.clone() });
        }
        if let Some(id) = header.objects.keys().find(|id| !record.objects.contains_key(*id)) {
            return Err(ScoreError::MissingObject { record: step, object: id.clone() });
        }
        let facts = match (record.facts.take(), ctx.mode) {
            (Some(f), FactMode::PreferCached) => f,
            _ => {
                let state = header.restore(&record, ctx.taxonomy)?;
                logical_snapshot(&state, ctx.def, ctx.taxonomy, ctx.domain)
                    .map_err(|source| ScoreError::Facts { record: step, source })?
            }
        };
        report.q_series.push(success_score(ctx.options, &facts)?);

        if let Some(p) = &prev {
            if step <= p.step {
                return Err(ScoreError::StepOrder { record: step });
            }
            if record.clock < p.clock {
                return Err(ScoreError::ClockOrder { record: step });
            }
            for (id, o) in &record.objects {
                report.d_k_accumulated += distance(p.record.objects[id].pose.position, o.pose.position);
            }
            report.d_l_accumulated += p.facts.symmetric_difference(&facts).count() as f64;
            let (a, b) = (&p.record.agent, &record.agent);
            report.l_body += distance(a.body.position, b.body.position);
            // a hand's path counts while it was in contact with something
            if a.left_contact.is_some() {
                report.l_left += distance(a.left_hand.position, b.left_hand.position);
            }
            if a.right_contact.is_some() {
                report.l_right += distance(a.right_hand.position, b.right_hand.position);
            }
        }
        if first.is_none() {
            let pos = positions(&record).into_iter().map(|(_, p)| p).collect();
            first = Some((step, pos, facts.clone()));
        }
        prev = Some(Prev {
            step,
            clock: record.clock,
            record,
            facts,
        });
    }

    let (Some((first_step, first_pos, first_facts)), Some(last)) = (first, prev) else {
        return Err(ScoreError::NoRecords);
    };
    report.q_final = *report.q_series.last().expect("one q per record");
    report.t_sim = (last.step - first_step) as f64 * header.step_duration;
    report.d_k_differential = positions(&last.record)
        .iter()
        .zip(&first_pos)
        .map(|((_, p), q)| distance(*p, *q))
        .sum();
    report.d_l_differential = first_facts.symmetric_difference(&last.facts).count() as f64;
    Ok(report)
}

/// Scores a fully loaded log.
pub fn score_trajectory(log: &TrajectoryLog, ctx: &ScoringContext) -> Result<MetricsReport, ScoreError> {
    score_stream(&log.header, log.records.iter().cloned().map(Ok), ctx)
}

/// Which human demonstration a metric is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// The best (lowest) successful demonstration.
    #[default]
    Best,
    /// The mean over successful demonstrations.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizeConfig {
    pub reference: Reference,
    /// Upper bound on any ratio, used in particular when the agent scores 0.
    pub max_ratio: f64,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            reference: Reference::Best,
            max_ratio: 10.0,
        }
    }
}

/// Expresses each efficiency metric as `human / agent`: 1 is parity, larger is better.
pub fn normalize_to_human(
    report: &MetricsReport,
    baselines: &[MetricsReport],
    cfg: &NormalizeConfig,
) -> Result<BTreeMap<String, f64>, ScoreError> {
    let good: Vec<&MetricsReport> = baselines.iter().filter(|b| b.q_final >= 1.0).collect();
    if good.is_empty() {
        return Err(ScoreError::NoSuccessfulBaseline);
    }
    let mut out = BTreeMap::new();
    for (i, (name, agent)) in report.efficiency().into_iter().enumerate() {
        let values = good.iter().map(|b| b.efficiency()[i].1);
        let human = match cfg.reference {
            Reference::Best => values.fold(f64::INFINITY, f64::min),
            Reference::Mean => values.sum::<f64>() / good.len() as f64,
        };
        let ratio = match (human == 0.0, agent == 0.0) {
            (true, true) => 1.0,
            (false, true) => cfg.max_ratio,
            _ => (human / agent).min(cfg.max_ratio),
        };
        out.insert(name.to_string(), ratio);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
