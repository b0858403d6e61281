//! File formats: model JSON, samples CSV, moments CSV, trace CSV and DOT.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, MomentSet};
use crate::learn::LearnTrace;
use crate::planar::Graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    ZeroField,
    Field,
}

/// On-disk model:
///
/// ```json
/// {"n": 2, "mode": "field", "edges": [{"u": 0, "v": 1, "theta": 0.5}],
///  "fields": [0.1, -0.2], "positions": [[0.0, 0.0], [1.0, 0.0]]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub mode: ModelMode,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
}

impl ModelFile {
    pub fn from_model(model: &IsingModel, positions: Option<Vec<[f64; 2]>>) -> Self {
        let zero = model.is_zero_field();
        ModelFile {
            n: model.n(),
            mode: if zero { ModelMode::ZeroField } else { ModelMode::Field },
            edges: model
                .graph()
                .edges()
                .iter()
                .zip(model.theta_edges())
                .map(|(p, &theta)| EdgeRecord { u: p.0, v: p.1, theta })
                .collect(),
            fields: (!zero).then(|| model.theta_nodes().to_vec()),
            aux_vertex: model.aux_vertex(),
            positions,
        }
    }

    pub fn to_model(&self) -> Result<IsingModel> {
        let g = Graph::from_edges(self.n, self.edges.iter().map(|e| (e.u, e.v)))?;
        let theta = self.edges.iter().map(|e| e.theta).collect();
        let fields = match (&self.fields, self.mode) {
            (Some(f), ModelMode::Field) => f.clone(),
            (None, ModelMode::Field) => return Err(Error::Parse("mode \"field\" needs \"fields\"".into())),
            (Some(f), ModelMode::ZeroField) if f.iter().any(|&t| t != 0.0) => {
                return Err(Error::Parse("mode \"zero_field\" with non-zero fields".into()))
            }
            _ => vec![0.0; self.n],
        };
        if let Some(p) = &self.positions {
            if p.len() != self.n {
                return Err(Error::BadDims(format!("{} positions for {} vertices", p.len(), self.n)));
            }
        }
        IsingModel::with_fields(g, theta, fields)?.with_aux_vertex(self.aux_vertex)
    }
}

pub fn write_model<W: Write>(w: W, model: &IsingModel, positions: Option<Vec<[f64; 2]>>) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &ModelFile::from_model(model, positions))?;
    writeln!(w)?;
    Ok(())
}

/// Reads a model and its stored positions, if any.
pub fn read_model<R: Read>(r: R) -> Result<(IsingModel, Option<Vec<[f64; 2]>>)> {
    let f: ModelFile = serde_json::from_reader(r)?;
    let m = f.to_model()?;
    Ok((m, f.positions))
}

/// Samples CSV: a header `x0,x1,...` then one row of ±1 spins per sample.
pub fn write_samples<W: Write>(w: W, samples: &[Vec<i8>]) -> Result<()> {
    let n = samples.first().map_or(0, Vec::len);
    let mut out = csv::Writer::from_writer(w);
    out.write_record((0..n).map(|i| format!("x{i}")))?;
    for row in samples {
        out.write_record(row.iter().map(|x| x.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a samples CSV with a header row. With `zero_one`, the values 0 and
/// 1 are read as -1 and +1; otherwise only -1 and +1 are accepted.
pub fn read_samples<R: Read>(r: R, zero_one: bool) -> Result<Vec<Vec<i8>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let n = rdr.headers()?.len();
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != n {
            return Err(Error::BadDims(format!("sample {row} has {} values, expected {n}", rec.len())));
        }
        let mut x = Vec::with_capacity(n);
        for (col, field) in rec.iter().enumerate() {
            let value: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("sample {row}, variable {col}: {field:?}")))?;
            let spin = match (zero_one, value) {
                (false, v) if v == 1.0 => 1,
                (false, v) if v == -1.0 => -1,
                (true, v) if v == 1.0 => 1,
                (true, v) if v == 0.0 => -1,
                _ => return Err(Error::BadValue { row, col, value }),
            };
            x.push(spin);
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(Error::BadDims("no samples".into()));
    }
    Ok(out)
}

/// Moments CSV: rows `i,j,mu` for pairs and `i,mu` for first moments.
pub fn write_moments<W: Write>(w: W, m: &MomentSet) -> Result<()> {
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    for i in 0..m.n() {
        out.write_record([i.to_string(), format!("{:.17e}", m.mean(i))])?;
    }
    for i in 0..m.n() {
        for j in i + 1..m.n() {
            out.write_record([i.to_string(), j.to_string(), format!("{:.17e}", m.get(i, j))])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a moments CSV. The variable count is one more than the largest
/// index seen; pairs and means that are not listed are zero. A leading
/// header row is skipped.
pub fn read_moments<R: Read>(r: R) -> Result<MomentSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut firsts = Vec::new();
    let mut pairs = Vec::new();
    let mut n = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse_idx = |s: &str| s.parse::<usize>();
        let bad = || Error::Parse(format!("moments row {}: {:?}", line + 1, rec.iter().collect::<Vec<_>>()));
        match rec.len() {
            2 | 3 if line == 0 && parse_idx(&rec[0]).is_err() => continue,
            2 => {
                let i = parse_idx(&rec[0]).map_err(|_| bad())?;
                let mu: f64 = rec[1].parse().map_err(|_| bad())?;
                n = n.max(i + 1);
                firsts.push((i, mu));
            }
            3 => {
                let i = parse_idx(&rec[0]).map_err(|_| bad())?;
                let j = parse_idx(&rec[1]).map_err(|_| bad())?;
                let mu: f64 = rec[2].parse().map_err(|_| bad())?;
                if i == j {
                    return Err(bad());
                }
                n = n.max(i.max(j) + 1);
                pairs.push((i, j, mu));
            }
            _ => return Err(bad()),
        }
    }
    let mut m = MomentSet::zeros(n);
    for (i, mu) in firsts {
        m.set_mean(i, mu);
    }
    for (i, j, mu) in pairs {
        m.set(i, j, mu);
    }
    m.validate()?;
    Ok(m)
}

/// Trace CSV, one row per step; the stopping edge, if any, has `rejected = 1`.
pub fn write_trace<W: Write>(w: W, trace: &LearnTrace) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "step",
        "u",
        "v",
        "bound_gain",
        "realized_gain",
        "avg_ll",
        "num_edges",
        "newton_iters",
        "rejected",
    ])?;
    for s in &trace.steps {
        out.write_record([
            s.step.to_string(),
            s.edge.0.to_string(),
            s.edge.1.to_string(),
            format!("{:.12e}", s.bound_gain),
            format!("{:.12e}", s.realized_gain),
            format!("{:.12e}", s.avg_ll),
            s.num_edges.to_string(),
            s.newton_iters.to_string(),
            u8::from(s.rejected).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Graphviz rendering with `theta` on every edge and field, six decimals.
pub fn to_dot(model: &IsingModel, positions: Option<&[[f64; 2]]>) -> String {
    let mut s = String::from("graph ising {\n");
    for v in 0..model.n() {
        let mut attrs = vec![format!("label=\"{v}\"")];
        if !model.is_zero_field() {
            attrs.push(format!("theta=\"{:.6}\"", model.theta_nodes()[v]));
        }
        if let Some(p) = positions {
            attrs.push(format!("pos=\"{:.6},{:.6}!\"", p[v][0], p[v][1]));
        }
        let _ = writeln!(s, "  {v} [{}];", attrs.join(", "));
    }
    for (p, t) in model.graph().edges().iter().zip(model.theta_edges()) {
        let _ = writeln!(s, "  {} -- {} [theta=\"{t:.6}\", label=\"{t:.6}\"];", p.0, p.1);
    }
    s.push_str("}\n");
    s
}
