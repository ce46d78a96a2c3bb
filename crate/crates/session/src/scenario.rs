//! Deterministic discrete-event scenario runner: a script of timestamped
//! control messages, media-rate declarations and ticks drives the SCP
//! server; every tick snapshots per-node bandwidth for all live sessions
//! and samples one end-to-end latency.

use crate::latency::LatencyModel;
use crate::scp::{ClientId, ScpMessage, ScpReply, ScpServer};
use crate::topology::build_topology;
use crate::SessionError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScriptAction {
    Scp(ScpMessage),
    /// Declares the per-stream media rate a client sends at.
    SetRate { client: ClientId, kbps: f64 },
    /// Advances simulated time and snapshots bandwidth.
    Tick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEvent {
    pub t: u64,
    pub action: ScriptAction,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub seed: u64,
    pub latency: Option<LatencyModel>,
    pub events: Vec<ScriptEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub t: u64,
    pub session: u64,
    pub node: u64,
    pub up_kbps: f64,
    pub down_kbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LogLine {
    Reply { t: u64, reply: ScpReply },
    Membership { t: u64, session: u64, members: Vec<(u64, String)> },
    Latency { t: u64, ms: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioOutput {
    pub log: Vec<LogLine>,
    pub metrics: Vec<MetricRow>,
}

impl ScenarioOutput {
    pub fn log_jsonl(&self) -> String {
        self.log
            .iter()
            .map(|l| serde_json::to_string(l).expect("log serializes"))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("t,session,node,up_kbps,down_kbps\n");
        for r in &self.metrics {
            out.push_str(&format!(
                "{},{},{},{:.3},{:.3}\n",
                r.t, r.session, r.node, r.up_kbps, r.down_kbps
            ));
        }
        out
    }
}

pub fn run_scenario(script: &Script) -> Result<ScenarioOutput, SessionError> {
    let latency = script.latency.clone().unwrap_or_default();
    latency.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let mut server = ScpServer::new();
    let mut rates: std::collections::BTreeMap<ClientId, f64> = Default::default();
    let mut log = Vec::new();
    let mut metrics = Vec::new();

    let mut events = script.events.clone();
    events.sort_by_key(|e| e.t);

    for ev in &events {
        match &ev.action {
            ScriptAction::Scp(msg) => {
                for reply in server.handle(*msg) {
                    log.push(LogLine::Reply {
                        t: ev.t,
                        reply,
                    });
                }
                if let Some(session) = msg.session.and_then(|id| server.session(id)) {
                    log.push(LogLine::Membership {
                        t: ev.t,
                        session: session.id.0,
                        members: session
                            .participants
                            .iter()
                            .map(|(c, r)| (c.0, format!("{r:?}")))
                            .collect(),
                    });
                }
            }
            ScriptAction::SetRate { client, kbps } => {
                if !server.is_logged_in(*client) {
                    return Err(SessionError::UnknownClient(client.0));
                }
                rates.insert(*client, *kbps);
            }
            ScriptAction::Tick => {
                for session in server.sessions() {
                    if session.participants.len() < 2 {
                        continue;
                    }
                    // uniform per-stream rate: the mean declared rate of
                    // the session's active participants (500 kbps default)
                    let declared: Vec<f64> = session
                        .active_ids()
                        .map(|c| rates.get(&c).copied().unwrap_or(500.0))
                        .collect();
                    let per_stream = if declared.is_empty() {
                        500.0
                    } else {
                        declared.iter().sum::<f64>() / declared.len() as f64
                    };
                    let report = build_topology(session, per_stream)?;
                    for (node, load) in &report.nodes {
                        metrics.push(MetricRow {
                            t: ev.t,
                            session: session.id.0,
                            node: node.0,
                            up_kbps: load.uplink_kbps,
                            down_kbps: load.downlink_kbps,
                        });
                    }
                }
                log.push(LogLine::Latency {
                    t: ev.t,
                    ms: latency.sample_one(&mut rng),
                });
            }
        }
    }
    Ok(ScenarioOutput { log, metrics })
}
