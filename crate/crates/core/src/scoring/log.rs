//! Trajectory logs: one JSON header line followed by one JSON record per step.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::ScoreError;
use crate::syntax::{CategoryName, ConstantName, RoomName};
use crate::taxonomy::Taxonomy;
use crate::world::{
    Aabb, AgentState, ExtendedState, FactSet, ObjectId, ObjectInstance, Placement, Pose,
    SceneState, Thresholds, WorldConfig,
};

pub const LOG_VERSION: u32 = 1;

/// Static facts about an episode, written once as the first line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub log_version: u32,
    pub activity: String,
    pub scene: String,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Simulated seconds per step.
    pub step_duration: f64,
    #[serde(default)]
    pub rooms: BTreeMap<RoomName, Aabb>,
    pub objects: BTreeMap<ObjectId, ObjectInfo>,
    /// Activity constants → scene objects.
    #[serde(default)]
    pub aliases: BTreeMap<ConstantName, ObjectId>,
    #[serde(default)]
    pub config: WorldConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectInfo {
    pub category: CategoryName,
    /// m
    pub radius: f64,
    #[serde(default)]
    pub fixed: bool,
}

/// One snapshot of the world and the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRecord {
    pub step: u64,
    /// s
    pub clock: f64,
    pub agent: AgentState,
    pub objects: BTreeMap<ObjectId, ObjectSnapshot>,
    /// True ground facts over the activity's constants, if cached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facts: Option<FactSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSnapshot {
    pub pose: Pose,
    pub ext: ExtendedState,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub records: Vec<LogRecord>,
}

impl LogHeader {
    pub fn from_state(
        activity: &str,
        scene: &str,
        seed: Option<u64>,
        step_duration: f64,
        state: &SceneState,
    ) -> Self {
        LogHeader {
            log_version: LOG_VERSION,
            activity: activity.to_string(),
            scene: scene.to_string(),
            seed,
            step_duration,
            rooms: state.rooms.clone(),
            objects: state
                .objects
                .iter()
                .map(|(id, o)| {
                    let info = ObjectInfo {
                        category: o.category.clone(),
                        radius: o.bounding_radius,
                        fixed: o.fixed,
                    };
                    (id.clone(), info)
                })
                .collect(),
            aliases: state.aliases.clone(),
            config: state.config.clone(),
        }
    }

    /// Rebuilds the scene a record describes.
    pub fn restore(&self, record: &LogRecord, taxonomy: &Taxonomy) -> Result<SceneState, ScoreError> {
        let mut state = SceneState::empty(self.config.clone());
        state.rooms = self.rooms.clone();
        state.aliases = self.aliases.clone();
        state.agent = record.agent.clone();
        state.clock = record.clock;
        for (id, snap) in &record.objects {
            let info = self.objects.get(id).ok_or_else(|| ScoreError::UnknownObject {
                record: record.step,
                object: id.clone(),
            })?;
            let properties = taxonomy
                .properties(&info.category)
                .map_err(|e| ScoreError::Scene(e.into()))?
                .clone();
            state.objects.insert(
                id.clone(),
                ObjectInstance {
                    id: id.clone(),
                    category: info.category.clone(),
                    pose: snap.pose,
                    ext: snap.ext.clone(),
                    thresholds: Thresholds::from_config(&self.config),
                    bounding_radius: info.radius,
                    fixed: info.fixed,
                    properties,
                },
            );
            match &snap.placement {
                Placement::OnTop(p) => {
                    state.support.insert(id.clone(), p.clone());
                }
                Placement::Inside(p) => {
                    state.containment.insert(id.clone(), p.clone());
                }
                Placement::Floor => {
                    state.on_floor.insert(id.clone());
                }
                Placement::Held | Placement::Free => {}
            }
        }
        Ok(state)
    }
}

impl LogRecord {
    pub fn capture(step: u64, state: &SceneState, facts: Option<FactSet>) -> Self {
        LogRecord {
            step,
            clock: state.clock,
            agent: state.agent.clone(),
            objects: state
                .objects
                .iter()
                .map(|(id, o)| {
                    let snap = ObjectSnapshot {
                        pose: o.pose,
                        ext: o.ext.clone(),
                        placement: state.placement(id),
                    };
                    (id.clone(), snap)
                })
                .collect(),
            facts,
        }
    }
}

fn parse_line<T: serde::de::DeserializeOwned>(line: &str, number: usize) -> Result<T, ScoreError> {
    serde_json::from_str(line).map_err(|e| ScoreError::Format {
        line: number,
        message: e.to_string(),
    })
}

/// Streaming reader: the header is parsed eagerly, records on demand.
pub struct LogReader<R> {
    lines: std::io::Lines<R>,
    line: usize,
    pub header: LogHeader,
}

impl<R: BufRead> LogReader<R> {
    pub fn new(reader: R) -> Result<Self, ScoreError> {
        let mut lines = reader.lines();
        let mut line = 0;
        let first = loop {
            line += 1;
            match lines.next() {
                None => return Err(ScoreError::EmptyLog),
                Some(text) => {
                    let text = text.map_err(|e| ScoreError::Io(e.to_string()))?;
                    if !text.trim().is_empty() {
                        break text;
                    }
                }
            }
        };
        let value: serde_json::Value = parse_line(&first, line)?;
        match value.get("log_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(LOG_VERSION) => {}
            Some(v) => return Err(ScoreError::UnsupportedVersion(v)),
            None => {
                return Err(ScoreError::Format {
                    line,
                    message: "header lacks `log_version`".into(),
                })
            }
        }
        let header = serde_json::from_value(value).map_err(|e| ScoreError::Format {
            line,
            message: e.to_string(),
        })?;
        Ok(LogReader { lines, line, header })
    }
}

impl<R: BufRead> Iterator for LogReader<R> {
    type Item = Result<LogRecord, ScoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line += 1;
            let text = match self.lines.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(ScoreError::Io(e.to_string()))),
            };
            if !text.trim().is_empty() {
                return Some(parse_line(&text, self.line));
            }
        }
    }
}

impl TrajectoryLog {
    pub fn read(reader: impl BufRead) -> Result<Self, ScoreError> {
        let reader = LogReader::new(reader)?;
        let header = reader.header.clone();
        let records = reader.collect::<Result<_, _>>()?;
        Ok(TrajectoryLog { header, records })
    }

    pub fn from_jsonl(text: &str) -> Result<Self, ScoreError> {
        Self::read(text.as_bytes())
    }

    pub fn write(&self, mut out: impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}
