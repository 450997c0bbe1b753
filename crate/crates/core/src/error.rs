use thiserror::Error;

use crate::topology::AgentId;

/// Errors raised by topology construction, channel use and run configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("agent {id} is out of range for a network of {n} agents")]
    AgentOutOfRange { id: usize, n: usize },

    #[error("self-loop on agent {0} is not allowed")]
    SelfLoop(AgentId),

    #[error("a network needs at least one agent")]
    EmptyNetwork,

    #[error("{kind} graph needs at least {min} agents, got {n}")]
    TooFewAgents { kind: &'static str, min: usize, n: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("edge probability must lie in (0, 1], got {0}")]
    EdgeProbability(f64),

    #[error("no connected graph found after {attempts} draws (n={n}, p={p})")]
    RetryCapExceeded { attempts: usize, n: usize, p: f64 },

    #[error("frame from agent {sender} reached agent {receiver}, which is not its neighbor")]
    NotANeighbor { sender: AgentId, receiver: AgentId },

    #[error("initial state must be a finite nonnegative number, got {0}")]
    NegativeState(f64),

    #[error("initial state vector has length {got}, topology has {expected} agents")]
    StateLength { expected: usize, got: usize },

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
