//! Replaying a primitive script through the world model to produce a log.
//!
//! Scripts hold one primitive per line (`grasp left apple.n.01_1`), or
//! `wait <seconds>` to let processes run. Blank lines and `#` comments are
//! skipped. Object names may be activity constants or scene ids.

use crate::sampler::{instantiate, SampleError};
use crate::scoring::{LogHeader, LogRecord, TrajectoryLog};
use crate::syntax::{ActivityDefinition, DomainDefinition};
use crate::taxonomy::Taxonomy;
use crate::world::{
    apply_primitive, logical_snapshot, step_processes, Action, ActionParseError, PrimitiveFailure,
    SceneManifest, SceneState, WorldError,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Act(Action),
    Wait(f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EpisodeError {
    #[error("script line {line}: {source}")]
    Parse { line: usize, source: ActionParseError },
    #[error("script line {line}: bad wait duration `{text}`")]
    Wait { line: usize, text: String },
    #[error("script line {line}: `{action}` failed: {source}")]
    Failed { line: usize, action: String, source: PrimitiveFailure },
    #[error("script line {line}: {source}")]
    Name { line: usize, source: WorldError },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// Parses a script into steps tagged with their 1-based line numbers.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Step)>, EpisodeError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let step = match body.strip_prefix("wait") {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                let secs: f64 = rest.trim().parse().map_err(|_| EpisodeError::Wait {
                    line,
                    text: rest.trim().to_string(),
                })?;
                if !(secs.is_finite() && secs >= 0.0) {
                    return Err(EpisodeError::Wait { line, text: rest.trim().to_string() });
                }
                Step::Wait(secs)
            }
            _ => Step::Act(body.parse().map_err(|source| EpisodeError::Parse { line, source })?),
        };
        out.push((line, step));
    }
    Ok(out)
}

/// Runs `steps` from `state`, recording a snapshot (with cached facts) before
/// the first step and after each one.
pub fn record_episode(
    mut state: SceneState,
    steps: &[(usize, Step)],
    def: &ActivityDefinition,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
    scene: &str,
    seed: Option<u64>,
) -> Result<TrajectoryLog, EpisodeError> {
    let start_clock = state.clock;
    let mut records = vec![LogRecord::capture(
        0,
        &state,
        Some(logical_snapshot(&state, def, taxonomy, domain)?),
    )];
    for (n, (line, step)) in steps.iter().enumerate() {
        state = match step {
            Step::Wait(secs) => step_processes(&state, *secs),
            Step::Act(action) => {
                let resolved = action
                    .clone()
                    .map_objects(|o| state.resolve_name(o.as_str()))
                    .map_err(|source| EpisodeError::Name { line: *line, source })?;
                apply_primitive(&state, &resolved).map_err(|source| EpisodeError::Failed {
                    line: *line,
                    action: action.to_string(),
                    source,
                })?
            }
        };
        let facts = logical_snapshot(&state, def, taxonomy, domain)?;
        records.push(LogRecord::capture(n as u64 + 1, &state, Some(facts)));
    }
    // mean simulated time per step, so that steps × duration is the elapsed time
    let step_duration = if steps.is_empty() {
        0.0
    } else {
        (state.clock - start_clock) / steps.len() as f64
    };
    let header = LogHeader::from_state(&def.problem_name, scene, seed, step_duration, &state);
    Ok(TrajectoryLog { header, records })
}

/// Instantiates `def` in the scene and replays `script` in it.
pub fn run_script(
    def: &ActivityDefinition,
    manifest: &SceneManifest,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
    seed: u64,
    script: &str,
) -> Result<TrajectoryLog, EpisodeError> {
    let steps = parse_script(script)?;
    let inst = instantiate(def, manifest, taxonomy, domain, seed)?;
    record_episode(inst.state, &steps, def, taxonomy, domain, &manifest.name, Some(seed))
}
