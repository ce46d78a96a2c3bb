//! Scripted fusion scenarios: timestamped tracker snapshots with optional
//! DOA observations and ground-truth speaking labels, replayed through the
//! engine into a JSON-lines event log.

use crate::{FusionConfig, FusionEngine, FusionError, FusionEvent, PersonTrack};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioStep {
    pub t: u64,
    /// (theta, phi) degrees plus spectrum peak value.
    pub doa: Option<(f64, f64, f64)>,
    pub tracks: Vec<PersonTrack>,
    /// Ground truth for evaluation; not consumed by the engine.
    pub speaking: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LogEntry {
    pub t: u64,
    pub event: FusionEvent,
    pub active: Option<u32>,
}

pub fn run_scenario(
    steps: &[ScenarioStep],
    cfg: FusionConfig,
) -> Result<Vec<LogEntry>, FusionError> {
    let mut engine = FusionEngine::new(cfg)?;
    let mut log = Vec::with_capacity(steps.len());
    for step in steps {
        let doa = match step.doa {
            Some((theta, phi, peak)) => {
                let dir = item_audio::Direction::new(theta, phi)
                    .map_err(|_| FusionError::BadDirection(theta, phi))?;
                Some((dir, peak))
            }
            None => None,
        };
        let event = engine.observe(doa, &step.tracks)?;
        log.push(LogEntry {
            t: step.t,
            event,
            active: engine.state().active,
        });
    }
    Ok(log)
}

pub fn log_to_jsonl(log: &[LogEntry]) -> String {
    log.iter()
        .map(|e| serde_json::to_string(e).expect("log entries serialize"))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
