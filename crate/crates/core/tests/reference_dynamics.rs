//! The engine against a direct transcription of the update rules.
//!
//! The reference keeps the whole authorization history and evaluates the
//! switching product over the window literally, with plain rationals and
//! adjacency lists, sharing nothing with the library beyond the graph.

use airmax::engine::{simulate, Instance, Run};
use airmax::protocol::ProtocolKind;
use airmax::scalar::Exact;
use airmax::topology::{GraphKind, Topology};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Trajectory {
    x: Vec<Vec<BigRational>>,
    y: Vec<Vec<bool>>,
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// States `x(1), ..., x(rounds + 1)` and the matching `y`.
fn reference(adj: &[Vec<usize>], x1: &[f64], protocol: ProtocolKind, rounds: u64) -> Trajectory {
    let n = x1.len();
    let mut x = vec![x1.iter().map(|&v| rat(v)).collect::<Vec<_>>()];
    let mut y = vec![vec![true; n]];
    let mut window_start = 1u64;
    for k in 1..=rounds {
        let (xk, yk) = (&x[k as usize - 1], &y[k as usize - 1]);
        let mut x_next = Vec::with_capacity(n);
        let mut y_next = Vec::with_capacity(n);
        for i in 0..n {
            if protocol == ProtocolKind::Traditional {
                let best = adj[i].iter().map(|&j| &xk[j]).chain([&xk[i]]).max().unwrap();
                x_next.push(best.clone());
                y_next.push(true);
                continue;
            }
            let senders: Vec<usize> = adj[i].iter().copied().filter(|&j| yk[j]).collect();
            let u = if senders.is_empty() {
                BigRational::zero()
            } else {
                senders.iter().fold(BigRational::zero(), |acc, &j| acc + &xk[j])
                    / BigRational::from_integer(senders.len().into())
            };
            x_next.push(if xk[i] >= u { xk[i].clone() } else { u.clone() });
            let switch = protocol == ProtocolKind::Switching && k == 2 * window_start;
            if switch {
                // y(k+1) = y(T)·y(T+1)·...·y(k)
                y_next.push((window_start..=k).all(|t| y[t as usize - 1][i]));
            } else {
                y_next.push(xk[i] >= u);
            }
        }
        if protocol == ProtocolKind::Switching && k == 2 * window_start {
            window_start = k;
        }
        x.push(x_next);
        y.push(y_next);
    }
    Trajectory { x, y }
}

fn adjacency(t: &Topology) -> Vec<Vec<usize>> {
    (0..t.n()).map(|i| t.neighbors_index(i).to_vec()).collect()
}

fn assert_matches(run: &Run<Exact>, topology: &Topology, x1: &[f64]) {
    let expected = reference(&adjacency(topology), x1, run.protocol, run.rounds);
    assert_eq!(run.x_history(), expected.x, "{:?} on {:?} from {x1:?}", run.protocol, topology.edges());
    if run.protocol.is_broadcast() {
        assert_eq!(run.y_history(), expected.y, "{:?} on {:?} from {x1:?}", run.protocol, topology.edges());
    }
}

#[test]
fn line_switching_trajectory_by_hand() {
    let line = Topology::named(GraphKind::Line, 4).unwrap();
    let run: Run<Exact> =
        simulate(&Instance::new(line.clone(), ProtocolKind::Switching, vec![4.0, 3.0, 3.0, 3.0])).unwrap();
    let xs = run.x_history();
    let ys = run.y_history();
    let r = |v: &[f64]| v.iter().map(|&a| rat(a)).collect::<Vec<_>>();
    // round 1: agent 2 averages 4 and 3 and loses authorization
    assert_eq!(xs[1], r(&[4.0, 3.5, 3.0, 3.0]));
    assert_eq!(ys[1], vec![true, false, true, true]);
    // round 2 is a switch round: y(3) = y(1)·y(2) keeps agent 2 silent, nothing moves for two rounds
    assert_eq!(ys[2], vec![true, false, true, true]);
    assert_eq!(xs[2], xs[1]);
    assert_eq!(xs[3], xs[1]);
    assert_eq!(ys[3], vec![true, true, true, true]);
    assert_eq!(xs[4], r(&[4.0, 3.5, 3.25, 3.0]));
    assert!(run.converged);
    assert_eq!(run.final_x(), vec![rat(4.0); 4]);
    assert_matches(&run, &line, &[4.0, 3.0, 3.0, 3.0]);
}

#[test]
fn engine_follows_the_update_rules_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..150 {
        let n = rng.random_range(2..=9);
        let p = rng.random_range(0.25..0.9);
        let topology = Topology::random_connected_with(n, p, &mut rng).unwrap();
        let x1: Vec<f64> = if case % 2 == 0 {
            (0..n).map(|_| rng.random_range(0..6) as f64).collect()
        } else {
            (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
        };
        for protocol in [ProtocolKind::Asymptotic, ProtocolKind::Switching, ProtocolKind::Traditional] {
            let instance = Instance::new(topology.clone(), protocol, x1.clone()).with_round_cap(120);
            let run: Run<Exact> = simulate(&instance).unwrap();
            assert_matches(&run, &topology, &x1);
        }
    }
}

#[test]
fn diamond_switching_matches_reference() {
    // interior agents get silenced early, so consensus needs several switch windows
    let diamond = Topology::build(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).unwrap();
    let x1 = [4.0, 3.0, 3.0, 3.0];
    let instance = Instance::new(diamond.clone(), ProtocolKind::Switching, x1.to_vec()).with_round_cap(70);
    let run: Run<Exact> = simulate(&instance).unwrap();
    assert_eq!((run.converged, run.rounds), (true, 11));
    assert_matches(&run, &diamond, &x1);
}
