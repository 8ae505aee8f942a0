//! File formats: graph JSON, metric CSV, sup-norm point-set JSON, modulus
//! and bound CSV, embedding CSV with its JSON sidecar, and the trace JSON.
//!
//! All output is UTF-8 with sorted JSON keys and arrays in canonical id
//! order, so identical inputs serialize to identical bytes. Dyadic distances
//! print as exact finite decimals; floating-point values use Rust's shortest
//! round-trip formatting.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::certifier::AmplificationTrace;
use crate::dyadic::Dyadic;
use crate::embedder::{DistortionStats, Embedding, OptimizerConfig, Target};
use crate::error::{Error, Result};
use crate::spaces::gamma::SubCopy;
use crate::spaces::{FiniteMetricSpace, LevelGraph, LinfPointSet, Tree};

pub const FORMAT_VERSION: u64 = 1;

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Graph files

fn pair_value(ids: &[String], pair: (u32, u32)) -> Value {
    json!([ids[pair.0 as usize], ids[pair.1 as usize]])
}

/// Graph file object: `{format_version, level, vertices, edges,
/// primary_pairs, copy_index}`.
pub fn graph_to_json(g: &LevelGraph) -> Value {
    let ids = g.ids();
    let vertices: Vec<Value> = ids.iter().map(|s| json!(s)).collect();
    let edges: Vec<Value> = g.edges().iter().map(|&e| pair_value(ids, e)).collect();
    let primary: Vec<Value> = g
        .primary_pairs()
        .iter()
        .map(|&p| pair_value(ids, p))
        .collect();
    let mut copy_index = Map::new();
    for (addr, sc) in g.copy_index() {
        let mut members: Vec<&str> = sc
            .members
            .iter()
            .map(|&v| ids[v as usize].as_str())
            .collect();
        members.sort_unstable();
        copy_index.insert(
            addr.clone(),
            json!({
                "level": sc.level,
                "vertices": members,
                "primary_pairs": [
                    pair_value(ids, sc.primary_pairs[0]),
                    pair_value(ids, sc.primary_pairs[1]),
                ],
            }),
        );
    }
    json!({
        "format_version": FORMAT_VERSION,
        "level": g.level(),
        "vertices": vertices,
        "edges": edges,
        "primary_pairs": primary,
        "copy_index": copy_index,
    })
}

/// Same schema for trees: no primary pairs, empty copy index, level = depth.
pub fn tree_to_json(t: &Tree) -> Value {
    let labels = t.labels();
    let edges: Vec<Value> = t
        .edges()
        .iter()
        .map(|&(a, b)| json!([labels[a as usize], labels[b as usize]]))
        .collect();
    json!({
        "format_version": FORMAT_VERSION,
        "level": t.depth(),
        "vertices": labels,
        "edges": edges,
        "primary_pairs": [],
        "copy_index": {},
    })
}

pub fn write_graph(g: &LevelGraph, path: &Path) -> Result<()> {
    write_json(&graph_to_json(g), path)
}

pub fn write_tree(t: &Tree, path: &Path) -> Result<()> {
    write_json(&tree_to_json(t), path)
}

fn as_str_pair(v: &Value, path: &Path) -> Result<(String, String)> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| parse_err(path, "pair is not a two-element array"))?;
    let a = arr[0]
        .as_str()
        .ok_or_else(|| parse_err(path, "pair entry is not a string"))?;
    let b = arr[1]
        .as_str()
        .ok_or_else(|| parse_err(path, "pair entry is not a string"))?;
    Ok((a.to_string(), b.to_string()))
}

/// Reads a graph file back. Copy-index vertex arrays are stored sorted, so
/// the canonical sub-copy isomorphism is a build-time artifact only.
pub fn read_graph(path: &Path) -> Result<LevelGraph> {
    let text = std::fs::read_to_string(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err(path, "top level is not an object"))?;
    let level = obj
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err(path, "missing integer `level`"))? as u32;
    let ids: Vec<String> = obj
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(path, "missing array `vertices`"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| parse_err(path, "vertex id is not a string"))
        })
        .collect::<Result<_>>()?;
    let index: BTreeMap<&str, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();
    let lookup = |id: &str| -> Result<u32> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| parse_err(path, format!("unknown vertex id `{id}`")))
    };
    let read_pair = |v: &Value| -> Result<(u32, u32)> {
        let (a, b) = as_str_pair(v, path)?;
        Ok((lookup(&a)?, lookup(&b)?))
    };
    let edges = obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(path, "missing array `edges`"))?
        .iter()
        .map(read_pair)
        .collect::<Result<Vec<_>>>()?;
    let primary_pairs = obj
        .get("primary_pairs")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(path, "missing array `primary_pairs`"))?
        .iter()
        .map(read_pair)
        .collect::<Result<Vec<_>>>()?;
    let mut copy_index = BTreeMap::new();
    let ci = obj
        .get("copy_index")
        .and_then(Value::as_object)
        .ok_or_else(|| parse_err(path, "missing object `copy_index`"))?;
    for (addr, entry) in ci {
        let sc_level = entry
            .get("level")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err(path, "copy index entry missing `level`"))?
            as u32;
        let members = entry
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(path, "copy index entry missing `vertices`"))?
            .iter()
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| parse_err(path, "copy index vertex is not a string"))
                    .and_then(lookup)
            })
            .collect::<Result<Vec<_>>>()?;
        let pairs = entry
            .get("primary_pairs")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| parse_err(path, "copy index entry needs two primary pairs"))?;
        let primary_pairs = [read_pair(&pairs[0])?, read_pair(&pairs[1])?];
        copy_index.insert(
            addr.clone(),
            SubCopy {
                level: sc_level,
                members,
                primary_pairs,
            },
        );
    }
    LevelGraph::from_parts(level, ids, edges, primary_pairs, copy_index)
}

// ---------------------------------------------------------------------------
// Metric files

/// Metric CSV: first row and column are ids, entries exact decimals.
pub fn metric_to_csv(m: &FiniteMetricSpace) -> String {
    let n = m.len();
    let mut out = String::from("id");
    for id in m.ids() {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(m.id(i));
        for j in 0..n {
            out.push(',');
            out.push_str(&m.d(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_metric(m: &FiniteMetricSpace, path: &Path) -> Result<()> {
    std::fs::write(path, metric_to_csv(m))?;
    Ok(())
}

pub fn read_metric(path: &Path) -> Result<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, "empty metric file"))?;
    let ids: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let n = ids.len();
    let mut dist = Vec::with_capacity(n * n);
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let row_id = cells
            .next()
            .ok_or_else(|| parse_err(path, format!("row {row} is empty")))?;
        if row >= n || row_id != ids[row] {
            return Err(parse_err(
                path,
                format!("row label `{row_id}` does not match header order"),
            ));
        }
        for cell in cells {
            let d: Dyadic = cell
                .parse()
                .map_err(|e: Error| parse_err(path, e.to_string()))?;
            dist.push(d);
        }
    }
    FiniteMetricSpace::new(ids, dist, Some(format!("loaded from {}", path.display())))
}

// ---------------------------------------------------------------------------
// Point-set files

pub fn linf_to_json(s: &LinfPointSet) -> Value {
    let points: Vec<Value> = (0..s.len())
        .map(|i| {
            Value::Array(
                s.point(i)
                    .iter()
                    .map(|d| Value::String(d.to_string()))
                    .collect(),
            )
        })
        .collect();
    let quadruples: Vec<Value> = s
        .quadruples()
        .iter()
        .map(|q| {
            json!({
                "v": s.ids()[q.v as usize],
                "w": s.ids()[q.w as usize],
                "x": s.ids()[q.x as usize],
                "y": s.ids()[q.y as usize],
                "c": q.c.to_string(),
            })
        })
        .collect();
    json!({
        "format_version": FORMAT_VERSION,
        "dim": s.dim(),
        "ids": s.ids(),
        "points": points,
        "generation": s.generation(),
        "quadruples": quadruples,
    })
}

pub fn write_linf(s: &LinfPointSet, path: &Path) -> Result<()> {
    write_json(&linf_to_json(s), path)
}

// ---------------------------------------------------------------------------
// Modulus and bound tables

pub fn modulus_table_to_csv(entries: &[crate::convexity::ModulusEntry]) -> String {
    let mut out = String::from("epsilon,delta,error_bar\n");
    for e in entries {
        out.push_str(&format!("{},{},{}\n", e.epsilon, e.delta, e.error_bar));
    }
    out
}

pub fn bounds_to_csv(rows: &[crate::certifier::LowerBound]) -> String {
    let mut out = String::from("n,L_star,D_star,modulus_descriptor,residual\n");
    for b in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            b.n, b.l_star, b.d_star, b.modulus_descriptor, b.residual
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Embedding files

/// Embedding CSV: header `id,c1..cd`, one row per point, shortest
/// round-trip float formatting.
pub fn embedding_to_csv(e: &Embedding) -> String {
    let dim = e.target().dim;
    let mut out = String::from("id");
    for c in 1..=dim {
        out.push_str(&format!(",c{c}"));
    }
    out.push('\n');
    for (i, id) in e.ids().iter().enumerate() {
        out.push_str(id);
        for x in e.point(i) {
            out.push(',');
            out.push_str(&format!("{x}"));
        }
        out.push('\n');
    }
    out
}

/// Sidecar JSON with the target, seed, config and statistics.
pub fn embedding_sidecar(e: &Embedding, cfg: &OptimizerConfig, space_file: &str) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "space": space_file,
        "target": { "p": e.target().p, "dim": e.target().dim },
        "seed": e.provenance().seed,
        "config": {
            "restarts": cfg.restarts,
            "iters_per_stage": cfg.iters_per_stage,
            "init_step": cfg.init_step,
            "beta0": cfg.beta0,
            "beta_max": cfg.beta_max,
            "eta_scale": cfg.eta_scale,
            "seed": cfg.seed,
        },
        "statistics": stats_json(e.stats()),
        "iterations": e.provenance().iterations,
    })
}

pub fn stats_json(s: &DistortionStats) -> Value {
    json!({
        "expansion": s.expansion,
        "contraction": s.contraction,
        "distortion": s.distortion,
        "l_sym": s.l_sym,
        "max_pair": [s.max_pair.0, s.max_pair.1],
        "min_pair": [s.min_pair.0, s.min_pair.1],
    })
}

pub fn write_embedding(e: &Embedding, csv_path: &Path) -> Result<()> {
    std::fs::write(csv_path, embedding_to_csv(e))?;
    Ok(())
}

/// Reads coordinates back and re-derives statistics against `space`.
pub fn read_embedding(
    path: &Path,
    space: &FiniteMetricSpace,
    p: f64,
) -> Result<Embedding> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, "empty embedding file"))?;
    let dim = header.split(',').count() - 1;
    if dim == 0 {
        return Err(parse_err(path, "no coordinate columns"));
    }
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        ids.push(
            cells
                .next()
                .ok_or_else(|| parse_err(path, "missing id cell"))?
                .to_string(),
        );
        let mut count = 0;
        for cell in cells {
            let x: f64 = cell
                .parse()
                .map_err(|e| parse_err(path, format!("bad coordinate `{cell}`: {e}")))?;
            coords.push(x);
            count += 1;
        }
        if count != dim {
            return Err(parse_err(path, "ragged coordinate row"));
        }
    }
    Embedding::new(
        space,
        ids,
        coords,
        Target::new(p, dim)?,
        crate::embedder::Provenance {
            seed: 0,
            restarts: 0,
            iterations: 0,
        },
    )
}

// ---------------------------------------------------------------------------
// Trace files

/// Trace JSON: `{steps: [{address, pair, L_pair, factor}], L_glob, passed}`
/// plus the modulus and certified floor.
pub fn trace_to_json(t: &AmplificationTrace) -> Value {
    let steps: Vec<Value> = t
        .steps
        .iter()
        .map(|s| {
            json!({
                "address": s.address,
                "pair": [s.pair.0, s.pair.1],
                "L_pair": s.l_pair,
                "factor": s.factor,
            })
        })
        .collect();
    json!({
        "steps": steps,
        "L_glob": t.l_glob,
        "L_start": t.l_start,
        "floor": t.floor,
        "modulus": t.modulus_descriptor,
        "passed": t.passed,
    })
}

// ---------------------------------------------------------------------------

/// Pretty JSON with sorted keys and a trailing newline.
pub fn write_json(value: &Value, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
