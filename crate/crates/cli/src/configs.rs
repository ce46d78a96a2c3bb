//! Serializable experiment configurations. Defaults reproduce the bundled
//! evaluation corpus.

use item_media::SynthSpec;
use item_session::{Script, ScriptAction, ScriptEvent};
use serde::{Deserialize, Serialize};

/// The bundled synthetic chat corpus: calm, busy and flickery variants.
pub fn default_corpus(frame_count: usize) -> Vec<SynthSpec> {
    let base = SynthSpec {
        width: 128,
        height: 96,
        frame_count,
        ..SynthSpec::default()
    };
    vec![
        SynthSpec {
            seed: 31,
            actor_count: 1,
            motion_amplitude: 0.75,
            lighting_flicker: 4,
            gesture_rate: 0.4,
            ..base.clone()
        },
        SynthSpec {
            seed: 32,
            actor_count: 2,
            motion_amplitude: 1.5,
            lighting_flicker: 8,
            gesture_rate: 0.6,
            ..base.clone()
        },
        SynthSpec {
            seed: 33,
            actor_count: 1,
            motion_amplitude: 1.0,
            lighting_flicker: 12,
            gesture_rate: 0.5,
            ..base
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdConfig {
    pub sequences: Vec<SynthSpec>,
    pub qps: Vec<u8>,
    pub gop: u32,
    pub search_range: u8,
    /// Report wall-clock mode-decision time (makes output non-reproducible).
    pub timing: bool,
}

impl Default for RdConfig {
    fn default() -> Self {
        RdConfig {
            sequences: default_corpus(100),
            qps: vec![24, 28, 32, 36],
            gop: 8,
            search_range: 4,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioEvalConfig {
    pub snrs_db: Vec<f64>,
    pub rt60s_ms: Vec<f64>,
    pub directions: usize,
    pub realizations: usize,
    pub resolution_deg: u32,
    /// Inclination range the test directions are drawn from, keeping them
    /// away from the polar azimuth degeneracy.
    pub theta_range: (u32, u32),
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for AudioEvalConfig {
    fn default() -> Self {
        AudioEvalConfig {
            snrs_db: vec![10.0, 20.0, 30.0],
            rt60s_ms: vec![0.0, 100.0, 200.0, 300.0],
            directions: 6,
            realizations: 20,
            resolution_deg: 5,
            theta_range: (20, 160),
            sample_rate: 16000.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDemoConfig {
    pub script: Script,
    pub latency_trials: usize,
    pub seed: u64,
}

impl Default for SessionDemoConfig {
    fn default() -> Self {
        SessionDemoConfig {
            script: adhoc_growth_script(6, 500.0),
            latency_trials: 100_000,
            seed: 5,
        }
    }
}

/// N participants register, log in, create an ad-hoc session and join one
/// by one, with a bandwidth snapshot after every join.
pub fn adhoc_growth_script(n: u64, kbps: f64) -> Script {
    use item_session::{ClientId, MediaCaps, Role, ScpKind, ScpMessage, SessionId, TopologyKind};
    let caps = MediaCaps {
        video_kbps: kbps,
        audio: true,
    };
    let scp = |kind, client, session: Option<u64>| {
        ScriptAction::Scp(ScpMessage {
            kind,
            client: ClientId(client),
            session: session.map(SessionId),
            caps: Some(caps),
        })
    };
    let mut events = Vec::new();
    for c in 1..=n {
        events.push(ScriptEvent {
            t: 0,
            action: scp(ScpKind::Register, c, None),
        });
        events.push(ScriptEvent {
            t: 0,
            action: scp(ScpKind::Login, c, None),
        });
    }
    events.push(ScriptEvent {
        t: 0,
        action: scp(
            ScpKind::Create {
                topology: TopologyKind::TranslatorAdHoc,
            },
            1,
            Some(1),
        ),
    });
    for c in 2..=n {
        events.push(ScriptEvent {
            t: c,
            action: scp(ScpKind::Join { role: Role::Active }, c, Some(1)),
        });
        events.push(ScriptEvent {
            t: c,
            action: ScriptAction::Tick,
        });
    }
    Script {
        seed: 5,
        latency: None,
        events,
    }
}
