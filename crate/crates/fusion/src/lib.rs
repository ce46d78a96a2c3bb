//! Audio/visual active-speaker fusion: associates direction-of-arrival
//! estimates with tracked person positions and maintains the active-speaker
//! identity behind a consistency window, so short noise bursts cannot
//! flip the speaker view.

pub mod engine;
pub mod scenario;

pub use engine::{FusionConfig, FusionEngine};
pub use scenario::{run_scenario, LogEntry, ScenarioStep};

use item_audio::Direction;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario: {0}")]
    MalformedScenario(#[from] serde_json::Error),
    #[error("duplicate track id {0} in snapshot")]
    DuplicateTrack(u32),
    #[error("consistency window must be >= 1")]
    BadWindow,
    #[error("invalid direction ({0}, {1}) in scenario")]
    BadDirection(f64, f64),
}

/// One tracked person as reported by the (mock) depth tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonTrack {
    pub id: u32,
    /// Meters, in array coordinates.
    pub position: [f64; 3],
    pub visible: bool,
}

/// Maps a DOA to the id of the closest visible track within `gate_deg`
/// great-circle degrees. Ties break toward the smaller id; tracks at the
/// origin have no direction and never match.
pub fn associate(doa: &Direction, tracks: &[PersonTrack], gate_deg: f64) -> Option<u32> {
    let mut best: Option<(f64, u32)> = None;
    for t in tracks {
        if !t.visible {
            continue;
        }
        let Some(dir) = Direction::from_position(t.position) else {
            continue;
        };
        let dist = doa.angle_to(&dir);
        if dist > gate_deg {
            continue;
        }
        best = match best {
            None => Some((dist, t.id)),
            Some((bd, bid)) => {
                if dist < bd || (dist == bd && t.id < bid) {
                    Some((dist, t.id))
                } else {
                    Some((bd, bid))
                }
            }
        };
    }
    best.map(|(_, id)| id)
}

/// Hysteresis state: the confirmed speaker plus a pending challenger with
/// its consecutive-observation count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FusionState {
    pub active: Option<u32>,
    pub pending: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FusionEvent {
    Hold,
    Switch(u32),
    /// A DOA with no associated track, near where a track was recently
    /// lost: a hint for the tracker to reacquire there.
    ReacquireHint(Direction),
}

/// One step of the consistency automaton. A challenger id must be observed
/// `window` times in a row to take over; any gap (none) or the active id
/// itself clears the challenger.
pub fn update(state: FusionState, obs: Option<u32>, window: u32) -> (FusionState, FusionEvent) {
    debug_assert!(window >= 1);
    let mut next = state;
    match obs {
        None => {
            next.pending = None;
            (next, FusionEvent::Hold)
        }
        Some(id) if state.active == Some(id) => {
            next.pending = None;
            (next, FusionEvent::Hold)
        }
        Some(id) => {
            let count = match state.pending {
                Some((pid, c)) if pid == id => c + 1,
                _ => 1,
            };
            if count >= window {
                next.active = Some(id);
                next.pending = None;
                (next, FusionEvent::Switch(id))
            } else {
                next.pending = Some((id, count));
                (next, FusionEvent::Hold)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(theta: f64, phi: f64) -> Direction {
        Direction::new(theta, phi).unwrap()
    }

    fn track(id: u32, theta: f64, phi: f64, r: f64) -> PersonTrack {
        let u = dir(theta, phi).unit_vector();
        PersonTrack {
            id,
            position: [u[0] * r, u[1] * r, u[2] * r],
            visible: true,
        }
    }

    #[test]
    fn exact_match_associates() {
        let tracks = [track(7, 90.0, 45.0, 2.0)];
        assert_eq!(associate(&dir(90.0, 45.0), &tracks, 15.0), Some(7));
    }

    #[test]
    fn outside_gate_is_none() {
        let tracks = [track(7, 90.0, 65.0, 2.0)];
        assert_eq!(associate(&dir(90.0, 45.0), &tracks, 15.0), None);
    }

    #[test]
    fn nearest_track_wins() {
        let tracks = [track(1, 90.0, 55.0, 2.0), track(2, 90.0, 49.0, 1.5)];
        assert_eq!(associate(&dir(90.0, 45.0), &tracks, 15.0), Some(2));
    }

    #[test]
    fn association_invariant_to_distance_scaling() {
        let base = [track(1, 70.0, 120.0, 1.0), track(2, 80.0, 140.0, 1.0)];
        let scaled: Vec<PersonTrack> = base
            .iter()
            .map(|t| PersonTrack {
                position: [t.position[0] * 9.0, t.position[1] * 9.0, t.position[2] * 9.0],
                ..*t
            })
            .collect();
        let d = dir(75.0, 125.0);
        assert_eq!(associate(&d, &base, 20.0), associate(&d, &scaled, 20.0));
    }

    #[test]
    fn invisible_and_origin_tracks_ignored() {
        let mut t = track(3, 90.0, 45.0, 2.0);
        t.visible = false;
        let origin = PersonTrack {
            id: 4,
            position: [0.0; 3],
            visible: true,
        };
        assert_eq!(associate(&dir(90.0, 45.0), &[t, origin], 15.0), None);
    }

    #[test]
    fn window_not_met_means_no_switch() {
        let k = 3;
        let mut s = FusionState {
            active: Some(1),
            pending: None,
        };
        for _ in 0..k - 1 {
            let (ns, ev) = update(s, Some(2), k);
            assert_eq!(ev, FusionEvent::Hold);
            s = ns;
        }
        let (s, ev) = update(s, Some(1), k);
        assert_eq!(ev, FusionEvent::Hold);
        assert_eq!(s.active, Some(1));
        assert_eq!(s.pending, None);
    }

    #[test]
    fn window_met_switches() {
        let k = 3;
        let mut s = FusionState {
            active: Some(1),
            pending: None,
        };
        for i in 0..k {
            let (ns, ev) = update(s, Some(2), k);
            if i == k - 1 {
                assert_eq!(ev, FusionEvent::Switch(2));
            } else {
                assert_eq!(ev, FusionEvent::Hold);
            }
            s = ns;
        }
        assert_eq!(s.active, Some(2));
    }

    #[test]
    fn noise_burst_with_gap_does_not_switch() {
        let k = 3;
        let mut s = FusionState {
            active: Some(1),
            pending: None,
        };
        for obs in [Some(2), None, Some(2)] {
            let (ns, ev) = update(s, obs, k);
            assert_eq!(ev, FusionEvent::Hold);
            s = ns;
        }
        assert_eq!(s.active, Some(1));
    }

    #[test]
    fn window_one_switches_immediately() {
        let s = FusionState::default();
        let (s, ev) = update(s, Some(9), 1);
        assert_eq!(ev, FusionEvent::Switch(9));
        assert_eq!(s.active, Some(9));
    }
}
