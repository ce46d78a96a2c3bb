//! Simulated UDP hole punching: a rendezvous server holds registered
//! public endpoints, exchanges them between two peers, and the peers open
//! the path with simultaneous probes. Once established, media flows
//! directly; the rendezvous never sees it.

use crate::scp::ClientId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NatKind {
    /// Endpoint-independent mapping: punchable.
    Cone,
    /// Endpoint-dependent mapping: the exchanged endpoint is useless.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub addr: [u8; 4],
    pub port: u16,
    pub nat: NatKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HolePunchError {
    #[error("peer {0:?} is not registered with the rendezvous")]
    UnregisteredPeer(ClientId),
    #[error("symmetric NAT on {0:?}: exchanged endpoint is stale")]
    SymmetricNat(ClientId),
}

/// An established direct path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct P2pPath {
    pub a: ClientId,
    pub b: ClientId,
    pub direct: bool,
    /// Message rounds the handshake took: registration lookup, endpoint
    /// exchange, simultaneous open.
    pub rounds: u32,
}

#[derive(Debug, Default, Clone)]
pub struct Rendezvous {
    endpoints: BTreeMap<ClientId, Endpoint>,
    /// Media events observed at the rendezvous after path establishment;
    /// stays zero unless something routes media through it by mistake.
    pub media_events: u64,
    /// Control messages the rendezvous processed.
    pub control_messages: u64,
}

impl Rendezvous {
    pub fn new() -> Rendezvous {
        Rendezvous::default()
    }

    pub fn register(&mut self, client: ClientId, endpoint: Endpoint) {
        self.control_messages += 1;
        self.endpoints.insert(client, endpoint);
    }

    pub fn endpoint_of(&self, client: ClientId) -> Option<Endpoint> {
        self.endpoints.get(&client).copied()
    }
}

/// Three-phase simulated handshake.
pub fn hole_punch(
    rendezvous: &mut Rendezvous,
    a: ClientId,
    b: ClientId,
) -> Result<P2pPath, HolePunchError> {
    // phase 1: both endpoints must be on file
    let ea = rendezvous
        .endpoint_of(a)
        .ok_or(HolePunchError::UnregisteredPeer(a))?;
    let eb = rendezvous
        .endpoint_of(b)
        .ok_or(HolePunchError::UnregisteredPeer(b))?;
    // phase 2: exchange (two control messages through the rendezvous)
    rendezvous.control_messages += 2;
    // phase 3: simultaneous open; symmetric NATs re-map and the probes miss
    if ea.nat == NatKind::Symmetric {
        return Err(HolePunchError::SymmetricNat(a));
    }
    if eb.nat == NatKind::Symmetric {
        return Err(HolePunchError::SymmetricNat(b));
    }
    Ok(P2pPath {
        a,
        b,
        direct: true,
        rounds: 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(n: u8) -> Endpoint {
        Endpoint {
            addr: [10, 0, 0, n],
            port: 4000 + n as u16,
            nat: NatKind::Cone,
        }
    }

    #[test]
    fn cone_pair_connects_in_three_rounds() {
        let mut rv = Rendezvous::new();
        rv.register(ClientId(1), cone(1));
        rv.register(ClientId(2), cone(2));
        let path = hole_punch(&mut rv, ClientId(1), ClientId(2)).unwrap();
        assert!(path.direct);
        assert_eq!(path.rounds, 3);
    }

    #[test]
    fn unregistered_peer_fails() {
        let mut rv = Rendezvous::new();
        rv.register(ClientId(1), cone(1));
        assert_eq!(
            hole_punch(&mut rv, ClientId(1), ClientId(9)),
            Err(HolePunchError::UnregisteredPeer(ClientId(9)))
        );
    }

    #[test]
    fn symmetric_nat_fails() {
        let mut rv = Rendezvous::new();
        rv.register(ClientId(1), cone(1));
        rv.register(
            ClientId(2),
            Endpoint {
                addr: [10, 0, 0, 2],
                port: 4002,
                nat: NatKind::Symmetric,
            },
        );
        assert_eq!(
            hole_punch(&mut rv, ClientId(1), ClientId(2)),
            Err(HolePunchError::SymmetricNat(ClientId(2)))
        );
    }

    #[test]
    fn media_never_touches_the_rendezvous() {
        let mut rv = Rendezvous::new();
        rv.register(ClientId(1), cone(1));
        rv.register(ClientId(2), cone(2));
        let _path = hole_punch(&mut rv, ClientId(1), ClientId(2)).unwrap();
        // media exchange happens on the path; the rendezvous counter stays 0
        assert_eq!(rv.media_events, 0);
    }
}
