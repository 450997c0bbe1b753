//! Scenario descriptors and their resolution into a concrete instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;
use crate::topology::{GraphKind, Topology};

/// Default relative tolerance of the floating-point mode.
pub const DEFAULT_EPSILON: f64 = 1e-9;

// rng stream ids derived from one seed
pub(crate) const STATE_STREAM: u64 = 1;
pub(crate) const CHANNEL_STREAM: u64 = 2;

/// Graph descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TopologySpec {
    /// Explicit 1-based edge list.
    Explicit {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
    Named {
        kind: GraphKind,
        n: usize,
    },
    /// Connected G(n, p) draw. Without a seed, the run seed is used.
    Random {
        n: usize,
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl TopologySpec {
    pub fn n(&self) -> usize {
        match *self {
            TopologySpec::Explicit { n, .. } | TopologySpec::Named { n, .. } | TopologySpec::Random { n, .. } => n,
        }
    }

    pub fn resolve(&self, run_seed: u64) -> Result<Topology> {
        match self {
            TopologySpec::Explicit { n, edges } => Topology::build(*n, edges),
            TopologySpec::Named { kind, n } => Topology::named(*kind, *n),
            TopologySpec::Random { n, p, seed } => Topology::random_connected(*n, *p, seed.unwrap_or(run_seed)),
        }
    }

    fn offset_seed(&mut self, offset: u64) {
        if let TopologySpec::Random { seed: Some(s), .. } = self {
            *s = s.wrapping_add(offset);
        }
    }
}

/// Initial information states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialStates {
    Explicit(Vec<f64>),
    /// Independent draws from `U[lo, hi)`.
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl InitialStates {
    /// The `U(0, 2π)` sampler of the randomized scenarios.
    pub fn uniform_two_pi() -> Self {
        InitialStates::Uniform { lo: 0.0, hi: std::f64::consts::TAU, seed: None }
    }

    pub fn resolve(&self, n: usize, run_seed: u64) -> Result<Vec<f64>> {
        let values = match self {
            InitialStates::Explicit(v) => {
                if v.len() != n {
                    return Err(Error::StateLength { expected: n, got: v.len() });
                }
                v.clone()
            }
            InitialStates::Uniform { lo, hi, seed } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo < hi) {
                    return Err(Error::Config(format!(
                        "uniform state range [{lo}, {hi}) must be finite, nonnegative and nonempty"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(run_seed));
                rng.set_stream(STATE_STREAM);
                sample_uniform(n, *lo, *hi, &mut rng)
            }
        };
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::NegativeState(bad));
        }
        Ok(values)
    }

    fn offset_seed(&mut self, offset: u64) {
        if let InitialStates::Uniform { seed: Some(s), .. } = self {
            *s = s.wrapping_add(offset);
        }
    }
}

/// `n` draws from `U[lo, hi)`.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Arithmetic the run is carried out in.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum NumericMode {
    /// Arbitrary-precision rationals; consensus means literal equality.
    #[default]
    Exact,
    /// Doubles; consensus means `|x - target| <= epsilon·max(1, target)`.
    Float { epsilon: f64 },
}

impl NumericMode {
    pub fn float() -> Self {
        NumericMode::Float { epsilon: DEFAULT_EPSILON }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float { .. } => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    #[default]
    Summary,
    Full,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub topology: TopologySpec,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub channel: ChannelModel,
    pub initial_states: InitialStates,
    #[serde(default)]
    pub numeric: NumericMode,
    /// Defaults to `10·n·diameter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_cap: Option<u64>,
    /// Seeds the channel and any sampler without its own seed.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trace_level: TraceLevel,
}

impl SimulationConfig {
    pub fn new(topology: TopologySpec, protocol: ProtocolKind, initial_states: InitialStates) -> Self {
        SimulationConfig {
            topology,
            protocol,
            channel: ChannelModel::Ideal,
            initial_states,
            numeric: NumericMode::Exact,
            round_cap: None,
            seed: 0,
            trace_level: TraceLevel::Summary,
        }
    }

    /// Config of batch trial `offset`: every seed (run seed and explicit
    /// sampler seeds) is shifted by `offset`.
    pub fn with_seed_offset(&self, offset: u64) -> Self {
        let mut cfg = self.clone();
        cfg.seed = cfg.seed.wrapping_add(offset);
        cfg.topology.offset_seed(offset);
        cfg.initial_states.offset_seed(offset);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.round_cap == Some(0) {
            return Err(Error::Config("round_cap must be at least 1".into()));
        }
        if let NumericMode::Float { epsilon } = self.numeric {
            if !(epsilon.is_finite() && epsilon >= 0.0) {
                return Err(Error::Config(format!("epsilon must be finite and nonnegative, got {epsilon}")));
            }
        }
        Ok(())
    }

    /// Draws the graph and initial states and fixes the round cap.
    pub fn resolve(&self) -> Result<Instance> {
        self.validate()?;
        let topology = self.topology.resolve(self.seed)?;
        let initial = self.initial_states.resolve(topology.n(), self.seed)?;
        let round_cap = self.round_cap.unwrap_or_else(|| default_round_cap(&topology));
        Ok(Instance {
            topology,
            protocol: self.protocol,
            channel: self.channel,
            initial,
            numeric: self.numeric,
            round_cap,
            seed: self.seed,
        })
    }
}

/// `10·n·diameter`, at least 1. Disconnected graphs use `n - 1` in place of the diameter.
pub fn default_round_cap(topology: &Topology) -> u64 {
    let n = topology.n();
    let diameter = topology.diameter().unwrap_or(n.saturating_sub(1));
    (10 * n * diameter).max(1) as u64
}

/// A fully resolved run: concrete graph and initial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub topology: Topology,
    pub protocol: ProtocolKind,
    pub channel: ChannelModel,
    pub initial: Vec<f64>,
    pub numeric: NumericMode,
    pub round_cap: u64,
    pub seed: u64,
}

impl Instance {
    pub fn new(topology: Topology, protocol: ProtocolKind, initial: Vec<f64>) -> Self {
        let round_cap = default_round_cap(&topology);
        Instance {
            topology,
            protocol,
            channel: ChannelModel::Ideal,
            initial,
            numeric: NumericMode::Exact,
            round_cap,
            seed: 0,
        }
    }

    pub fn with_protocol(&self, protocol: ProtocolKind) -> Self {
        Instance { protocol, ..self.clone() }
    }

    pub fn with_round_cap(mut self, cap: u64) -> Self {
        self.round_cap = cap;
        self
    }

    pub fn with_numeric(mut self, numeric: NumericMode) -> Self {
        self.numeric = numeric;
        self
    }

    pub fn with_channel(mut self, channel: ChannelModel, seed: u64) -> Self {
        self.channel = channel;
        self.seed = seed;
        self
    }
}
