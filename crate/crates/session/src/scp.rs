//! Session control protocol: registration/login, session creation,
//! joining at a chosen role, leaving with deterministic translator
//! re-election, and termination.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ClientId(pub u64);

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct SessionId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// Shares media and receives.
    Active,
    /// Receive-only.
    Passive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyKind {
    FullMesh,
    TranslatorAdHoc,
    MulticastTree { fanout: u32 },
}

/// Media capabilities a client announces when joining.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediaCaps {
    pub video_kbps: f64,
    pub audio: bool,
}

impl Default for MediaCaps {
    fn default() -> Self {
        MediaCaps {
            video_kbps: 500.0,
            audio: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScpKind {
    Register,
    Login,
    Create { topology: TopologyKind },
    Join { role: Role },
    Leave,
    Terminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScpMessage {
    pub kind: ScpKind,
    pub client: ClientId,
    pub session: Option<SessionId>,
    pub caps: Option<MediaCaps>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScpError {
    #[error("client not registered")]
    NotRegistered,
    #[error("client not logged in")]
    Unauthenticated,
    #[error("unknown session")]
    UnknownSession,
    #[error("session id already exists")]
    DuplicateSession,
    #[error("client already participates in the session")]
    AlreadyJoined,
    #[error("client is not a participant")]
    NotParticipant,
    #[error("message requires a session id")]
    MissingSession,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: SessionId,
    pub participants: BTreeMap<ClientId, Role>,
    pub caps: BTreeMap<ClientId, MediaCaps>,
    pub topology: TopologyKind,
    /// Designated relay for the ad-hoc structure; also the multicast
    /// source. Always an active participant.
    pub translator: Option<ClientId>,
    /// The session creator (initial translator / multicast source).
    pub creator: ClientId,
}

impl SessionState {
    pub fn active_ids(&self) -> impl Iterator<Item = ClientId> + '_ {
        self.participants
            .iter()
            .filter(|(_, r)| **r == Role::Active)
            .map(|(c, _)| *c)
    }
}

/// A transmission-structure snapshot returned on join.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureInfo {
    pub topology: TopologyKind,
    pub translator: Option<ClientId>,
    pub participants: Vec<(ClientId, Role)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScpReply {
    Registered(ClientId),
    LoggedIn(ClientId),
    Created(SessionId),
    Joined(StructureInfo),
    Left {
        session: SessionId,
        new_translator: Option<ClientId>,
        closed: bool,
    },
    Terminated(SessionId),
    Error(ScpError),
}

/// The control server: membership plus all live sessions. No media ever
/// passes through here.
#[derive(Debug, Default, Clone)]
pub struct ScpServer {
    registered: BTreeSet<ClientId>,
    logged_in: BTreeSet<ClientId>,
    sessions: BTreeMap<SessionId, SessionState>,
}

impl ScpServer {
    pub fn new() -> ScpServer {
        ScpServer::default()
    }

    pub fn session(&self, id: SessionId) -> Option<&SessionState> {
        self.sessions.get(&id)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &SessionState> {
        self.sessions.values()
    }

    pub fn is_logged_in(&self, c: ClientId) -> bool {
        self.logged_in.contains(&c)
    }

    pub fn handle(&mut self, msg: ScpMessage) -> Vec<ScpReply> {
        match self.handle_inner(msg) {
            Ok(replies) => replies,
            Err(e) => vec![ScpReply::Error(e)],
        }
    }

    fn authed(&self, c: ClientId) -> Result<(), ScpError> {
        if !self.logged_in.contains(&c) {
            return Err(ScpError::Unauthenticated);
        }
        Ok(())
    }

    fn handle_inner(&mut self, msg: ScpMessage) -> Result<Vec<ScpReply>, ScpError> {
        match msg.kind {
            ScpKind::Register => {
                self.registered.insert(msg.client);
                Ok(vec![ScpReply::Registered(msg.client)])
            }
            ScpKind::Login => {
                if !self.registered.contains(&msg.client) {
                    return Err(ScpError::NotRegistered);
                }
                self.logged_in.insert(msg.client);
                Ok(vec![ScpReply::LoggedIn(msg.client)])
            }
            ScpKind::Create { topology } => {
                self.authed(msg.client)?;
                let id = msg.session.ok_or(ScpError::MissingSession)?;
                if self.sessions.contains_key(&id) {
                    return Err(ScpError::DuplicateSession);
                }
                let mut participants = BTreeMap::new();
                participants.insert(msg.client, Role::Active);
                let mut caps = BTreeMap::new();
                caps.insert(msg.client, msg.caps.unwrap_or_default());
                self.sessions.insert(
                    id,
                    SessionState {
                        id,
                        participants,
                        caps,
                        topology,
                        translator: Some(msg.client),
                        creator: msg.client,
                    },
                );
                Ok(vec![ScpReply::Created(id)])
            }
            ScpKind::Join { role } => {
                self.authed(msg.client)?;
                let id = msg.session.ok_or(ScpError::MissingSession)?;
                let session = self.sessions.get_mut(&id).ok_or(ScpError::UnknownSession)?;
                if session.participants.contains_key(&msg.client) {
                    return Err(ScpError::AlreadyJoined);
                }
                session.participants.insert(msg.client, role);
                session.caps.insert(msg.client, msg.caps.unwrap_or_default());
                Ok(vec![ScpReply::Joined(StructureInfo {
                    topology: session.topology,
                    translator: session.translator,
                    participants: session
                        .participants
                        .iter()
                        .map(|(c, r)| (*c, *r))
                        .collect(),
                })])
            }
            ScpKind::Leave => {
                self.authed(msg.client)?;
                let id = msg.session.ok_or(ScpError::MissingSession)?;
                let session = self.sessions.get_mut(&id).ok_or(ScpError::UnknownSession)?;
                if session.participants.remove(&msg.client).is_none() {
                    return Err(ScpError::NotParticipant);
                }
                session.caps.remove(&msg.client);
                // translator re-election: lowest remaining active id
                if session.translator == Some(msg.client) {
                    let next = session.active_ids().next();
                    session.translator = next;
                }
                let closed =
                    session.participants.is_empty() || session.translator.is_none();
                let new_translator = session.translator;
                if closed {
                    self.sessions.remove(&id);
                }
                Ok(vec![ScpReply::Left {
                    session: id,
                    new_translator,
                    closed,
                }])
            }
            ScpKind::Terminate => {
                self.authed(msg.client)?;
                let id = msg.session.ok_or(ScpError::MissingSession)?;
                let session = self.sessions.get(&id).ok_or(ScpError::UnknownSession)?;
                if !session.participants.contains_key(&msg.client) {
                    return Err(ScpError::NotParticipant);
                }
                self.sessions.remove(&id);
                Ok(vec![ScpReply::Terminated(id)])
            }
        }
    }
}
