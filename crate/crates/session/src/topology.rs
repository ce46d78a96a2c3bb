//! Per-node stream and bandwidth accounting for the three transmission
//! structures.
//!
//! Full mesh: every active node uplinks its stream to all other nodes.
//! Translator ad-hoc: non-translator actives uplink exactly one stream to
//! the translator, which forwards to every other node the streams it
//! lacks; uplink there grows quadratically while everyone else stays at
//! one stream no matter the party size. Multicast: the creator sources a
//! balanced tree with bounded fanout.

use crate::scp::{ClientId, Role, SessionState, TopologyKind};
use crate::SessionError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeLoad {
    pub uplink_streams: u32,
    pub downlink_streams: u32,
    pub uplink_kbps: f64,
    pub downlink_kbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub nodes: BTreeMap<ClientId, NodeLoad>,
    /// Levels below the root, for multicast trees.
    pub tree_depth: Option<u32>,
}

impl TopologyReport {
    pub fn total_uplink_streams(&self) -> u32 {
        self.nodes.values().map(|n| n.uplink_streams).sum()
    }

    pub fn total_downlink_streams(&self) -> u32 {
        self.nodes.values().map(|n| n.downlink_streams).sum()
    }
}

/// Builds the per-node load report for a session at a uniform per-stream
/// bitrate.
pub fn build_topology(
    session: &SessionState,
    per_stream_kbps: f64,
) -> Result<TopologyReport, SessionError> {
    let n = session.participants.len();
    if n < 2 {
        return Err(SessionError::Topology(format!(
            "need at least 2 participants, have {n}"
        )));
    }
    let mut nodes: BTreeMap<ClientId, NodeLoad> = session
        .participants
        .keys()
        .map(|c| (*c, NodeLoad::default()))
        .collect();
    let actives: Vec<ClientId> = session.active_ids().collect();
    let a = actives.len() as u32;
    let mut tree_depth = None;

    match session.topology {
        TopologyKind::FullMesh => {
            for (&c, load) in nodes.iter_mut() {
                let active = session.participants[&c] == Role::Active;
                if active {
                    load.uplink_streams = n as u32 - 1;
                }
                load.downlink_streams = a - active as u32;
            }
        }
        TopologyKind::TranslatorAdHoc => {
            let translator = session
                .translator
                .ok_or_else(|| SessionError::Topology("no translator set".into()))?;
            if session.participants.get(&translator) != Some(&Role::Active) {
                return Err(SessionError::Topology(
                    "translator is not an active participant".into(),
                ));
            }
            for (&c, load) in nodes.iter_mut() {
                let role = session.participants[&c];
                if c == translator {
                    // forwards, to each other node, every active stream the
                    // node does not originate itself
                    let forwarded: u32 = session
                        .participants
                        .iter()
                        .filter(|(id, _)| **id != translator)
                        .map(|(_, role)| a - (*role == Role::Active) as u32)
                        .sum();
                    load.uplink_streams = forwarded;
                    // receives one stream from each other active
                    load.downlink_streams = a - 1;
                } else {
                    load.uplink_streams = (role == Role::Active) as u32;
                    load.downlink_streams = a - (role == Role::Active) as u32;
                }
            }
        }
        TopologyKind::MulticastTree { fanout } => {
            if fanout == 0 {
                return Err(SessionError::Topology("fanout must be >= 1".into()));
            }
            let source = session.creator;
            if !session.participants.contains_key(&source) {
                return Err(SessionError::Topology(
                    "multicast source left the session".into(),
                ));
            }
            // balanced tree in id order: source first, then everyone else
            let mut order: Vec<ClientId> = vec![source];
            order.extend(session.participants.keys().filter(|c| **c != source));
            let count = order.len();
            let mut depth = 0u32;
            for i in 1..count {
                let parent = (i - 1) / fanout as usize;
                nodes.get_mut(&order[parent]).unwrap().uplink_streams += 1;
                nodes.get_mut(&order[i]).unwrap().downlink_streams += 1;
                // depth of node i in a complete fanout-ary tree
                let mut d = 0u32;
                let mut idx = i;
                while idx > 0 {
                    idx = (idx - 1) / fanout as usize;
                    d += 1;
                }
                depth = depth.max(d);
            }
            tree_depth = Some(depth);
        }
    }

    for load in nodes.values_mut() {
        load.uplink_kbps = load.uplink_streams as f64 * per_stream_kbps;
        load.downlink_kbps = load.downlink_streams as f64 * per_stream_kbps;
    }
    Ok(TopologyReport { nodes, tree_depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scp::{MediaCaps, SessionId};

    fn session(topology: TopologyKind, actives: &[u64], passives: &[u64]) -> SessionState {
        let mut participants = BTreeMap::new();
        let mut caps = BTreeMap::new();
        for &c in actives {
            participants.insert(ClientId(c), Role::Active);
            caps.insert(ClientId(c), MediaCaps::default());
        }
        for &c in passives {
            participants.insert(ClientId(c), Role::Passive);
            caps.insert(ClientId(c), MediaCaps::default());
        }
        SessionState {
            id: SessionId(1),
            participants,
            caps,
            topology,
            translator: actives.first().map(|&c| ClientId(c)),
            creator: ClientId(actives[0]),
        }
    }

    #[test]
    fn six_node_adhoc_loads() {
        let s = session(TopologyKind::TranslatorAdHoc, &[1, 2, 3, 4, 5, 6], &[]);
        let r = build_topology(&s, 500.0).unwrap();
        assert_eq!(r.nodes[&ClientId(1)].uplink_streams, 25);
        for c in 2..=6 {
            assert_eq!(r.nodes[&ClientId(c)].uplink_streams, 1);
            assert_eq!(r.nodes[&ClientId(c)].uplink_kbps, 500.0);
            assert_eq!(r.nodes[&ClientId(c)].downlink_streams, 5);
        }
        assert_eq!(r.total_uplink_streams(), 30); // n(n-1)
        assert_eq!(r.total_uplink_streams(), r.total_downlink_streams());
    }

    #[test]
    fn six_node_full_mesh_loads() {
        let s = session(TopologyKind::FullMesh, &[1, 2, 3, 4, 5, 6], &[]);
        let r = build_topology(&s, 500.0).unwrap();
        for c in 1..=6 {
            assert_eq!(r.nodes[&ClientId(c)].uplink_streams, 5);
            assert_eq!(r.nodes[&ClientId(c)].downlink_streams, 5);
        }
        assert_eq!(r.total_uplink_streams(), 30);
    }

    #[test]
    fn adhoc_uplink_independent_of_party_size() {
        for n in 2..=10u64 {
            let ids: Vec<u64> = (1..=n).collect();
            let s = session(TopologyKind::TranslatorAdHoc, &ids, &[]);
            let r = build_topology(&s, 500.0).unwrap();
            for c in 2..=n {
                assert_eq!(r.nodes[&ClientId(c)].uplink_streams, 1, "n = {n}");
            }
            assert_eq!(
                r.nodes[&ClientId(1)].uplink_streams,
                ((n - 1) * (n - 1)) as u32
            );
            assert_eq!(r.total_uplink_streams(), (n * (n - 1)) as u32);
            assert_eq!(r.total_uplink_streams(), r.total_downlink_streams());
        }
    }

    #[test]
    fn passive_nodes_never_uplink_in_adhoc() {
        let s = session(TopologyKind::TranslatorAdHoc, &[1, 2], &[3, 4]);
        let r = build_topology(&s, 500.0).unwrap();
        assert_eq!(r.nodes[&ClientId(3)].uplink_streams, 0);
        assert_eq!(r.nodes[&ClientId(4)].uplink_streams, 0);
        // passives still receive both active streams
        assert_eq!(r.nodes[&ClientId(3)].downlink_streams, 2);
        // translator forwards: to 2 (lacks 1), to 3 and 4 (lack 2 each)
        assert_eq!(r.nodes[&ClientId(1)].uplink_streams, 5);
        assert_eq!(r.total_uplink_streams(), r.total_downlink_streams());
    }

    #[test]
    fn multicast_audience_of_20_fanout_4() {
        let audience: Vec<u64> = (2..=21).collect();
        let s = session(TopologyKind::MulticastTree { fanout: 4 }, &[1], &audience);
        let r = build_topology(&s, 500.0).unwrap();
        assert_eq!(r.nodes[&ClientId(1)].uplink_streams, 4);
        assert_eq!(r.tree_depth, Some(2));
        assert_eq!(r.total_uplink_streams(), 20); // one edge per receiver
        assert_eq!(r.total_uplink_streams(), r.total_downlink_streams());
        // interior nodes relay at most fanout streams
        for load in r.nodes.values() {
            assert!(load.uplink_streams <= 4);
        }
    }

    #[test]
    fn too_small_session_rejected() {
        let s = session(TopologyKind::FullMesh, &[1], &[]);
        assert!(build_topology(&s, 500.0).is_err());
    }
}
