//! Wireless multiple-access channel.
//!
//! Frames broadcast in the same slot superpose at every receiver. The ideal
//! channel returns the plain sum of neighbor transmissions; the affine channel
//! weights each transmission by a fading coefficient in `(0, 1]` and adds
//! receiver noise. Only the ideal channel carries convergence guarantees.
//!
//! Each broadcast round uses two orthogonal slots: slot A carries `y·x`, slot B
//! carries `y`. The two slots are modelled as two independent scalar uses of
//! the channel; no waveform is simulated.

use std::ops::Add;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topology::{AgentId, Topology};

/// Default z′ level above which a receiver treats its authorized-neighbor set as nonempty.
pub const DEFAULT_DETECTION_THRESHOLD: f64 = 0.5;

/// One agent's transmission for a round.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastFrame<S> {
    sender: AgentId,
    slot_a: S,
    slot_b: S,
}

impl<S: Scalar> BroadcastFrame<S> {
    /// Frame of an authorized agent: `(x, 1)`.
    pub fn authorized(sender: AgentId, x: S) -> Self {
        BroadcastFrame { sender, slot_a: x, slot_b: S::one() }
    }

    /// Frame of a silenced agent: `(0, 0)`.
    pub fn silent(sender: AgentId) -> Self {
        BroadcastFrame { sender, slot_a: S::zero(), slot_b: S::zero() }
    }

    pub fn sender(&self) -> AgentId {
        self.sender
    }

    pub fn slot_a(&self) -> &S {
        &self.slot_a
    }

    pub fn slot_b(&self) -> &S {
        &self.slot_b
    }

    pub fn is_authorized(&self) -> bool {
        !self.slot_b.is_zero()
    }
}

/// Superposed signals seen by one receiver in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedAggregate<S> {
    /// Sum over slot A.
    pub z: S,
    /// Sum over slot B; in the ideal channel, the number of authorized neighbors.
    pub z_prime: S,
}

impl<S: Scalar> ReceivedAggregate<S> {
    pub fn new(z: S, z_prime: S) -> Self {
        ReceivedAggregate { z, z_prime }
    }

    pub fn empty() -> Self {
        ReceivedAggregate { z: S::zero(), z_prime: S::zero() }
    }
}

impl<S: Scalar> Add for ReceivedAggregate<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        ReceivedAggregate { z: self.z + rhs.z, z_prime: self.z_prime + rhs.z_prime }
    }
}

/// Law of the per-link, per-round fading coefficient h_ij.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientLaw {
    Constant(f64),
    /// Uniform on `(lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
    },
}

impl CoefficientLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CoefficientLaw::Constant(c) => c > 0.0 && c <= 1.0,
            CoefficientLaw::Uniform { lo, hi } => lo >= 0.0 && lo < hi && hi <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Channel(format!("coefficient law {self:?} must stay within (0, 1]")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            CoefficientLaw::Constant(c) => c,
            // random::<f64>() is in [0, 1), so this lands in (lo, hi]
            CoefficientLaw::Uniform { lo, hi } => hi - (hi - lo) * rng.random::<f64>(),
        }
    }
}

/// Law of the per-receiver, per-slot noise v_i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseLaw {
    None,
    Gaussian { sigma: f64 },
}

impl NoiseLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            NoiseLaw::Gaussian { sigma } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(Error::Channel(format!("noise sigma must be finite and nonnegative, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        match *self {
            NoiseLaw::None => None,
            NoiseLaw::Gaussian { sigma } => Some(Normal::new(0.0, sigma).expect("validated sigma").sample(rng)),
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_threshold() -> f64 {
    DEFAULT_DETECTION_THRESHOLD
}

/// Parameters of the affine channel `z = Σ h_ij τ_j + v_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineChannel {
    pub coefficient: CoefficientLaw,
    pub noise: NoiseLaw,
    /// Both slots of one frame see the same h_ij draw. Noise is always drawn per slot.
    #[serde(default = "default_true")]
    pub shared_coefficient: bool,
    /// z′ must exceed this for the receiver to divide z by z′.
    #[serde(default = "default_threshold")]
    pub detection_threshold: f64,
}

impl Default for AffineChannel {
    fn default() -> Self {
        AffineChannel {
            coefficient: CoefficientLaw::Constant(1.0),
            noise: NoiseLaw::None,
            shared_coefficient: true,
            detection_threshold: DEFAULT_DETECTION_THRESHOLD,
        }
    }
}

/// Channel descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ChannelModel {
    #[default]
    Ideal,
    Affine(AffineChannel),
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::Ideal => Ok(()),
            ChannelModel::Affine(a) => {
                a.coefficient.validate()?;
                a.noise.validate()?;
                if !(a.detection_threshold.is_finite() && a.detection_threshold >= 0.0) {
                    return Err(Error::Channel("detection threshold must be finite and nonnegative".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, ChannelModel::Ideal)
    }

    pub fn detection_threshold(&self) -> f64 {
        match self {
            ChannelModel::Ideal => DEFAULT_DETECTION_THRESHOLD,
            ChannelModel::Affine(a) => a.detection_threshold,
        }
    }
}

fn lift<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("channel samples are finite")
}

/// Superposes the frames of `receiver`'s neighbors through `model`.
///
/// The receiver's own frame must not be among `frames`; every sender has to be
/// a neighbor of `receiver`. Neighbors without a frame contribute nothing.
pub fn superpose<S: Scalar, R: Rng + ?Sized>(
    receiver: AgentId,
    frames: &[BroadcastFrame<S>],
    topology: &Topology,
    model: &ChannelModel,
    rng: &mut R,
) -> Result<ReceivedAggregate<S>> {
    for frame in frames {
        if !topology.contains(receiver, frame.sender) {
            return Err(Error::NotANeighbor { sender: frame.sender, receiver });
        }
    }
    let mut agg = ReceivedAggregate::empty();
    match model {
        ChannelModel::Ideal => {
            for frame in frames {
                agg.z = agg.z + frame.slot_a.clone();
                agg.z_prime = agg.z_prime + frame.slot_b.clone();
            }
        }
        ChannelModel::Affine(affine) => {
            for frame in frames {
                let h_a = affine.coefficient.sample(rng);
                let h_b = if affine.shared_coefficient { h_a } else { affine.coefficient.sample(rng) };
                agg.z = agg.z + lift::<S>(h_a) * frame.slot_a.clone();
                agg.z_prime = agg.z_prime + lift::<S>(h_b) * frame.slot_b.clone();
            }
            if let Some(v) = affine.noise.sample(rng) {
                agg.z = agg.z + lift(v);
            }
            if let Some(v) = affine.noise.sample(rng) {
                agg.z_prime = agg.z_prime + lift(v);
            }
        }
    }
    Ok(agg)
}

/// Computes `ψ(φ_i(x_i) + Σ_{j∈N_i} φ_j(x_j))` the way a nomographic function
/// is evaluated over an ideal channel: every agent broadcasts its pre-processed
/// value, the receiver gets the superposed sum, adds its own pre-processed value
/// and applies the post-processing function.
///
/// `values` must contain the receiver's own value and otherwise only values of
/// its neighbors.
pub fn ota_compute<Pre, Post>(
    receiver: AgentId,
    values: &[(AgentId, f64)],
    topology: &Topology,
    pre: Pre,
    post: Post,
) -> Result<f64>
where
    Pre: Fn(AgentId, f64) -> f64,
    Post: Fn(f64) -> f64,
{
    let mut own = None;
    let mut superposed = 0.0;
    for &(sender, x) in values {
        if sender == receiver {
            own = Some(pre(sender, x));
        } else if topology.contains(receiver, sender) {
            superposed += pre(sender, x);
        } else {
            return Err(Error::NotANeighbor { sender, receiver });
        }
    }
    let own = own.ok_or_else(|| Error::Channel(format!("no value for receiver {receiver}")))?;
    Ok(post(own + superposed))
}
