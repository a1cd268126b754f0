//! Channel descriptors: what each plane of a state frame means, where it
//! comes from, and how it enters the loss.

use serde::{Deserialize, Serialize};

use crate::astro::ForcingChannel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// The quantity being forecast (TEC).
    Target,
    /// Scalar driver broadcast to a constant map per timestamp.
    Driver,
    /// Static coordinate map, predicted autoregressively like drivers.
    Coordinate,
    /// Analytically computable channel, excluded from the loss and
    /// substituted from the provider during rollout.
    Forcing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelSource {
    MapFile,
    DriverFile,
    Computed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDef {
    pub name: String,
    pub kind: ChannelKind,
    pub source: ChannelSource,
    pub loss_weight: f32,
}

/// Ordered channel descriptors for a run. The order fixes the plane layout
/// of every state frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    channels: Vec<ChannelDef>,
}

impl ChannelSpec {
    pub fn new(channels: Vec<ChannelDef>) -> Result<Self> {
        let targets = channels.iter().filter(|c| c.kind == ChannelKind::Target).count();
        if targets != 1 {
            return Err(Error::Config(format!(
                "channel spec must contain exactly one target channel, found {targets}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &channels {
            if !seen.insert(c.name.clone()) {
                return Err(Error::Config(format!("duplicate channel name '{}'", c.name)));
            }
            if c.loss_weight < 0.0 {
                return Err(Error::Config(format!(
                    "channel '{}' has negative loss weight {}",
                    c.name, c.loss_weight
                )));
            }
            if c.kind == ChannelKind::Forcing {
                if c.loss_weight != 0.0 {
                    return Err(Error::Config(format!(
                        "forcing channel '{}' must have loss weight 0, got {}",
                        c.name, c.loss_weight
                    )));
                }
                // computed forcings must name a known analytic channel
                if c.source == ChannelSource::Computed {
                    ForcingChannel::from_name(&c.name)?;
                }
            }
        }
        Ok(ChannelSpec { channels })
    }

    pub fn channels(&self) -> &[ChannelDef] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.channels.iter().map(|c| c.name.clone()).collect()
    }

    pub fn target_index(&self) -> usize {
        self.channels
            .iter()
            .position(|c| c.kind == ChannelKind::Target)
            .expect("validated at construction")
    }

    /// Channel indices the model predicts autoregressively.
    pub fn nonforcing_indices(&self) -> Vec<usize> {
        self.channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind != ChannelKind::Forcing)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn forcing_indices(&self) -> Vec<usize> {
        self.channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ChannelKind::Forcing)
            .map(|(i, _)| i)
            .collect()
    }

    /// Parsed analytic channels, in spec order (computed forcings only).
    pub fn computed_forcings(&self) -> Vec<ForcingChannel> {
        self.channels
            .iter()
            .filter(|c| c.kind == ChannelKind::Forcing && c.source == ChannelSource::Computed)
            .map(|c| ForcingChannel::from_name(&c.name).expect("validated at construction"))
            .collect()
    }

    /// Per-channel loss weights in spec order.
    pub fn loss_weights(&self) -> Vec<f32> {
        self.channels.iter().map(|c| c.loss_weight).collect()
    }

    /// Loss weights restricted to non-forcing channels (the model's output
    /// head order).
    pub fn nonforcing_loss_weights(&self) -> Vec<f32> {
        self.channels
            .iter()
            .filter(|c| c.kind != ChannelKind::Forcing)
            .map(|c| c.loss_weight)
            .collect()
    }
}

/// Names of the synthetic driver set, native cadence in seconds.
pub const SYNTH_DRIVERS: [(&str, u32); 12] = [
    ("kp", 10_800),
    ("ap", 10_800),
    ("f107", 86_400),
    ("s107", 86_400),
    ("m107", 86_400),
    ("y107", 86_400),
    ("bx", 900),
    ("by", 900),
    ("bz", 900),
    ("vx", 900),
    ("vy", 900),
    ("vz", 900),
];

pub const COORD_CHANNELS: [&str; 3] = ["maglat_n", "maglon_sin", "maglon_cos"];

/// The default full profile: one TEC target (weight from the architecture),
/// the synthetic driver set, magnetic coordinate channels, and every
/// computed forcing.
pub fn default_channel_spec(tec_weight: f32) -> ChannelSpec {
    let mut chans = vec![ChannelDef {
        name: "tec".into(),
        kind: ChannelKind::Target,
        source: ChannelSource::MapFile,
        loss_weight: tec_weight,
    }];
    for (name, _) in SYNTH_DRIVERS {
        chans.push(ChannelDef {
            name: name.into(),
            kind: ChannelKind::Driver,
            source: ChannelSource::DriverFile,
            loss_weight: 1.0,
        });
    }
    for name in COORD_CHANNELS {
        chans.push(ChannelDef {
            name: name.into(),
            kind: ChannelKind::Coordinate,
            source: ChannelSource::Computed,
            loss_weight: 1.0,
        });
    }
    for f in crate::astro::ForcingChannel::ALL {
        chans.push(ChannelDef {
            name: f.name().into(),
            kind: ChannelKind::Forcing,
            source: ChannelSource::Computed,
            loss_weight: 0.0,
        });
    }
    ChannelSpec::new(chans).expect("default profile is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_shape() {
        let spec = default_channel_spec(2.0);
        assert_eq!(spec.len(), 1 + 12 + 3 + 14);
        assert_eq!(spec.target_index(), 0);
        assert_eq!(spec.forcing_indices().len(), 14);
        assert_eq!(spec.nonforcing_indices().len(), 16);
        assert_eq!(spec.computed_forcings().len(), 14);
    }

    #[test]
    fn rejects_two_targets_and_weighted_forcings() {
        let mut chans = default_channel_spec(2.0).channels().to_vec();
        chans.push(ChannelDef {
            name: "tec2".into(),
            kind: ChannelKind::Target,
            source: ChannelSource::MapFile,
            loss_weight: 1.0,
        });
        assert!(ChannelSpec::new(chans).is_err());

        let mut chans = default_channel_spec(2.0).channels().to_vec();
        chans.last_mut().unwrap().loss_weight = 1.0;
        assert!(ChannelSpec::new(chans).is_err());
    }

    #[test]
    fn rejects_unknown_computed_forcing() {
        let mut chans = default_channel_spec(2.0).channels().to_vec();
        chans.push(ChannelDef {
            name: "nonexistent_forcing".into(),
            kind: ChannelKind::Forcing,
            source: ChannelSource::Computed,
            loss_weight: 0.0,
        });
        let err = ChannelSpec::new(chans).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
