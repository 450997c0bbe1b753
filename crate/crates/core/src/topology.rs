//! Undirected, time-invariant communication graphs.
//!
//! Agents are identified by [`AgentId`] values `1..=n` on every external
//! surface; the adjacency is stored 0-based and the `*_index` accessors work
//! on 0-based positions.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Redraw cap for [`Topology::random_connected`].
pub const MAX_REDRAWS: usize = 10_000;

/// 1-based agent identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn from_index(index: usize) -> Self {
        AgentId(index + 1)
    }

    /// 0-based position of this agent.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Canonical graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Line,
    Ring,
    Star,
    Complete,
}

impl GraphKind {
    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Line => "line",
            GraphKind::Ring => "ring",
            GraphKind::Star => "star",
            GraphKind::Complete => "complete",
        }
    }

    pub fn min_agents(self) -> usize {
        match self {
            GraphKind::Ring => 3,
            _ => 1,
        }
    }
}

/// Undirected graph over agents `1..=n` without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    // sorted 0-based neighbor lists; symmetric by construction
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a graph from 1-based unordered pairs. Repeated pairs collapse.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            for id in [a, b] {
                if id == 0 || id > n {
                    return Err(Error::AgentOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(AgentId(a)));
            }
            adjacency[a - 1].push(b - 1);
            adjacency[b - 1].push(a - 1);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Topology { n, adjacency })
    }

    fn from_index_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let pairs: Vec<_> = edges.into_iter().map(|(a, b)| (a + 1, b + 1)).collect();
        Self::build(n, &pairs).expect("generated edges are in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbor set N_i as sorted 0-based indices.
    pub fn neighbors_index(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    /// Neighbor set N_i as agent identities.
    pub fn neighbors(&self, agent: AgentId) -> Vec<AgentId> {
        self.adjacency[agent.index()].iter().map(|&j| AgentId::from_index(j)).collect()
    }

    pub fn degree(&self, agent: AgentId) -> usize {
        self.adjacency[agent.index()].len()
    }

    pub fn contains_index(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn contains(&self, a: AgentId, b: AgentId) -> bool {
        a.0 >= 1 && a.0 <= self.n && b.0 >= 1 && b.0 <= self.n && self.contains_index(a.index(), b.index())
    }

    /// Edge list as 1-based pairs `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i + 1, j + 1)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// BFS hop distances from `source`; `None` for unreachable agents.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::from([source]);
        dist[source] = Some(0);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or_default();
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// True iff every pair of agents is joined by a path. A single agent is connected.
    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Longest shortest-path length over all agent pairs.
    pub fn diameter(&self) -> Result<usize> {
        let mut diameter = 0;
        for source in 0..self.n {
            for d in self.distances_from(source) {
                diameter = diameter.max(d.ok_or(Error::Disconnected)?);
            }
        }
        Ok(diameter)
    }

    /// Canonical member of a graph family. The star is centred on agent 1.
    pub fn named(kind: GraphKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        if n < kind.min_agents() {
            return Err(Error::TooFewAgents { kind: kind.name(), min: kind.min_agents(), n });
        }
        let edges: Vec<(usize, usize)> = match kind {
            GraphKind::Line => (1..n).map(|i| (i - 1, i)).collect(),
            GraphKind::Ring => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            GraphKind::Star => (1..n).map(|i| (0, i)).collect(),
            GraphKind::Complete => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        };
        Ok(Self::from_index_edges(n, edges))
    }

    /// One G(n, p) draw: every unordered pair independently with probability `p`.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::EdgeProbability(p));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self::from_index_edges(n, edges))
    }

    /// G(n, p) conditioned on connectivity by rejection, seeded and reproducible.
    pub fn random_connected(n: usize, p: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_connected_with(n, p, &mut rng)
    }

    pub fn random_connected_with<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        for _ in 0..MAX_REDRAWS {
            let graph = Self::erdos_renyi(n, p, rng)?;
            if graph.is_connected() {
                return Ok(graph);
            }
        }
        Err(Error::RetryCapExceeded { attempts: MAX_REDRAWS, n, p })
    }

    /// Every connected labeled graph on `n` agents. Exponential in `n(n-1)/2`;
    /// intended for exhaustive sweeps with `n <= 6`.
    pub fn all_connected(n: usize) -> Vec<Self> {
        assert!((1..=6).contains(&n), "enumeration is limited to 1..=6 agents");
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let chosen = pairs.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &e)| e);
                Self::from_index_edges(n, chosen)
            })
            .filter(Topology::is_connected)
            .collect()
    }
}
