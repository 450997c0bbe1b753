//! Trace export: long-format CSV (`k,agent,x,y,u`) and a JSON array of rounds.
//!
//! The last record is the state after the final round and has no `u`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::Run;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub k: u64,
    pub x: Vec<f64>,
    /// Authorization as 0/1.
    pub y: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
}

fn records<S: Scalar>(run: &Run<S>) -> Vec<TraceRecord> {
    let mut out: Vec<TraceRecord> = run
        .trace
        .iter()
        .map(|r| TraceRecord {
            k: r.k,
            x: r.x.iter().map(Scalar::to_f64).collect(),
            y: r.y.iter().map(|&b| b as u8).collect(),
            u: Some(r.u.iter().map(Scalar::to_f64).collect()),
        })
        .collect();
    out.push(TraceRecord {
        k: run.rounds + 1,
        x: run.final_states.iter().map(|s| s.x.to_f64()).collect(),
        y: run.final_states.iter().map(|s| s.y as u8).collect(),
        u: None,
    });
    out
}

pub fn trace_json<S: Scalar>(run: &Run<S>) -> Vec<TraceRecord> {
    records(run)
}

/// One row per (round, agent); agents are 1-based.
pub fn trace_csv<S: Scalar>(run: &Run<S>) -> String {
    let mut out = String::from("k,agent,x,y,u\n");
    for rec in records(run) {
        for (i, (x, y)) in rec.x.iter().zip(&rec.y).enumerate() {
            let u = rec.u.as_ref().map(|u| u[i].to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", rec.k, i + 1, x, y, u).expect("writing to a String");
        }
    }
    out
}
