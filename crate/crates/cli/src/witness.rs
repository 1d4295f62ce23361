//! JSON witnesses and their independent re-checking.

use ddeg_core::control::ControlGraphWitness;
use ddeg_core::oracle::{verify_control_graph, HomKind};
use ddeg_core::structure::{deviation, BlowupDescription};
use ddeg_core::{BlowupPattern, Graph, VertexSet};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// An induced subgraph claimed to have `distinct_count` distinct degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctWitness {
    pub subset: Vec<usize>,
    pub distinct_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousWitness {
    pub subset: Vec<usize>,
    pub kind: HomKind,
}

/// A blowup description in file form; `pattern` uses the `01;10` syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationWitness {
    pub parts: Vec<Vec<usize>>,
    pub pattern: String,
    pub delta: usize,
    #[serde(default)]
    pub exceptional: Vec<usize>,
}

impl PerturbationWitness {
    pub fn from_description(bd: &BlowupDescription) -> Self {
        Self {
            parts: bd.parts.iter().map(VertexSet::to_vec).collect(),
            pattern: bd.pattern.to_string(),
            delta: bd.delta,
            exceptional: bd.exceptional.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum WitnessKind {
    Distinct,
    Homogeneous,
    Control,
    Perturbation,
}

fn set(g: &Graph, vertices: &[usize]) -> Result<VertexSet, Value> {
    let mut s = VertexSet::empty(g.n());
    for &v in vertices {
        if v >= g.n() {
            return Err(json!({"reason": "vertex_out_of_range", "vertex": v}));
        }
        if s.contains(v) {
            return Err(json!({"reason": "repeated_vertex", "vertex": v}));
        }
        s.insert(v);
    }
    Ok(s)
}

/// Re-checks a witness against `g`. `Ok` carries a certificate, `Err` a
/// JSON reason; malformed JSON is an `Err` too.
pub fn verify(g: &Graph, kind: WitnessKind, text: &str) -> Result<Value, Value> {
    let malformed = |e: serde_json::Error| json!({"reason": "malformed_witness", "detail": e.to_string()});
    match kind {
        WitnessKind::Distinct => {
            let w: DistinctWitness = serde_json::from_str(text).map_err(malformed)?;
            let s = set(g, &w.subset)?;
            let recomputed = g.degree_profile(&s).distinct_count;
            if recomputed != w.distinct_count {
                return Err(json!({"reason": "distinct_count_mismatch", "claimed": w.distinct_count, "recomputed": recomputed}));
            }
            Ok(json!({"kind": "distinct", "distinct_count": recomputed}))
        }
        WitnessKind::Homogeneous => {
            let w: HomogeneousWitness = serde_json::from_str(text).map_err(malformed)?;
            let s = set(g, &w.subset)?;
            let members = s.to_vec();
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    let wrong = match w.kind {
                        HomKind::Clique => !g.has_edge(u, v),
                        HomKind::Independent => g.has_edge(u, v),
                    };
                    if wrong {
                        let reason = if w.kind == HomKind::Clique { "missing_edge" } else { "extra_edge" };
                        return Err(json!({"reason": reason, "u": u, "v": v}));
                    }
                }
            }
            Ok(json!({"kind": "homogeneous", "size": members.len()}))
        }
        WitnessKind::Control => {
            let w: ControlGraphWitness = serde_json::from_str(text).map_err(malformed)?;
            verify_control_graph(g, &w).map_err(|v| serde_json::to_value(v).expect("serializable"))?;
            Ok(json!({"kind": "control", "k": w.a.len()}))
        }
        WitnessKind::Perturbation => {
            let w: PerturbationWitness = serde_json::from_str(text).map_err(malformed)?;
            let pattern: BlowupPattern =
                w.pattern.parse().map_err(|e| json!({"reason": "bad_pattern", "detail": format!("{e}")}))?;
            if pattern.parts() != w.parts.len() {
                return Err(json!({"reason": "pattern_arity", "parts": w.parts.len(), "pattern": pattern.parts()}));
            }
            let mut all: Vec<usize> = w.parts.iter().flatten().copied().collect();
            all.extend(&w.exceptional);
            set(g, &all)?;
            let parts: Vec<VertexSet> = w.parts.iter().map(|p| set(g, p)).collect::<Result<_, _>>()?;
            let dev = deviation(g, &parts, &pattern);
            if dev > w.delta {
                return Err(json!({"reason": "deviation_exceeds_delta", "deviation": dev, "delta": w.delta}));
            }
            Ok(json!({"kind": "perturbation", "deviation": dev, "delta": w.delta}))
        }
    }
}
