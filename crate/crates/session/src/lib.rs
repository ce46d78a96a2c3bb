//! Multiparty session machinery: the session control protocol state
//! machine, a simulated UDP hole-punch handshake, topology construction
//! with per-node stream/bandwidth accounting, stage-latency sampling, and
//! a deterministic scenario runner.

pub mod holepunch;
pub mod latency;
pub mod scenario;
pub mod scp;
pub mod topology;

pub use holepunch::{hole_punch, Endpoint, HolePunchError, NatKind, P2pPath, Rendezvous};
pub use latency::{LatencyModel, LatencySummary, StageRange};
pub use scenario::{run_scenario, Script, ScriptAction, ScriptEvent};
pub use scp::{
    ClientId, MediaCaps, Role, ScpError, ScpKind, ScpMessage, ScpReply, ScpServer, SessionId,
    SessionState, StructureInfo, TopologyKind,
};
pub use topology::{build_topology, NodeLoad, TopologyReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed script: {0}")]
    MalformedScript(#[from] serde_json::Error),
    #[error("script references unknown client {0}")]
    UnknownClient(u64),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("latency model stage {0:?} has min > max")]
    BadStage(String),
    #[error("trials must be >= 1")]
    NoTrials,
}
