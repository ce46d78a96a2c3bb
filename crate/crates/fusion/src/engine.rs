//! Stateful fusion engine: association, the consistency automaton, and a
//! short memory of recently lost tracks for reacquisition hints.

use crate::{associate, update, FusionError, FusionEvent, FusionState, PersonTrack};
use item_audio::Direction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Consecutive identical observations required to switch speakers.
    pub window: u32,
    /// Association gate in great-circle degrees.
    pub gate_deg: f64,
    /// How many updates a lost track stays eligible for reacquire hints.
    pub lost_ttl: u32,
    /// Optional gate on the spatial-spectrum peak: DOAs weaker than this
    /// are ignored entirely.
    pub min_peak: Option<f64>,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            window: 3,
            gate_deg: 15.0,
            lost_ttl: 30,
            min_peak: None,
        }
    }
}

pub struct FusionEngine {
    cfg: FusionConfig,
    state: FusionState,
    /// id -> (last known direction, updates since lost)
    lost: BTreeMap<u32, (Direction, u32)>,
    last_seen: BTreeMap<u32, Direction>,
}

impl FusionEngine {
    pub fn new(cfg: FusionConfig) -> Result<FusionEngine, FusionError> {
        if cfg.window == 0 {
            return Err(FusionError::BadWindow);
        }
        Ok(FusionEngine {
            cfg,
            state: FusionState::default(),
            lost: BTreeMap::new(),
            last_seen: BTreeMap::new(),
        })
    }

    pub fn state(&self) -> FusionState {
        self.state
    }

    /// Processes one observation: a DOA (with its spectrum peak) plus the
    /// current tracker snapshot.
    pub fn observe(
        &mut self,
        doa: Option<(Direction, f64)>,
        tracks: &[PersonTrack],
    ) -> Result<FusionEvent, FusionError> {
        let mut seen = std::collections::BTreeSet::new();
        for t in tracks {
            if !seen.insert(t.id) {
                return Err(FusionError::DuplicateTrack(t.id));
            }
        }

        // age the lost-track memory, register fresh losses
        let mut lost = std::mem::take(&mut self.lost);
        lost.retain(|_, (_, age)| {
            *age += 1;
            *age <= self.cfg.lost_ttl
        });
        let visible_now: std::collections::BTreeSet<u32> = tracks
            .iter()
            .filter(|t| t.visible)
            .map(|t| t.id)
            .collect();
        for (&id, dir) in &self.last_seen {
            if !visible_now.contains(&id) && !lost.contains_key(&id) {
                lost.insert(id, (*dir, 0));
            }
        }
        self.lost = lost;
        self.last_seen = tracks
            .iter()
            .filter(|t| t.visible)
            .filter_map(|t| Direction::from_position(t.position).map(|d| (t.id, d)))
            .collect();

        let doa = doa.filter(|(_, peak)| self.cfg.min_peak.is_none_or(|m| *peak >= m));
        let obs = doa.and_then(|(d, _)| associate(&d, tracks, self.cfg.gate_deg));
        let (next, event) = update(self.state, obs, self.cfg.window);
        self.state = next;

        // unassociated DOA near a recently lost track: hint instead of hold
        if event == FusionEvent::Hold && obs.is_none() {
            if let Some((d, _)) = doa {
                let near_lost = self
                    .lost
                    .values()
                    .any(|(dir, _)| d.angle_to(dir) <= self.cfg.gate_deg);
                if near_lost {
                    return Ok(FusionEvent::ReacquireHint(d));
                }
            }
        }
        Ok(event)
    }
}
