//! Time-indexed fields on a uniform grid and their space-time norms.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ensure_same, Field, FieldSnapshot, SnapshotField, SpectralGrid};

/// `t_m = m T / M`, `m = 0..=M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::precondition(format!("horizon {horizon} must be positive")));
        }
        if steps < 2 {
            return Err(Error::precondition(format!("need at least 2 time steps, got {steps}")));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, m: usize) -> f64 {
        self.horizon * m as f64 / self.steps as f64
    }

    pub fn node_count(&self) -> usize {
        self.steps + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|m| self.time(m)).collect()
    }
}

/// Sobolev indices of a space-time norm
/// `sup_t ‖·‖_{Ḣ^sup} + ‖·‖_{L²(Ḣ^l2)} + ‖∂_t ·‖_{L²(Ḣ^rate)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormIndices {
    pub sup: f64,
    pub l2: f64,
    pub rate: f64,
}

impl NormIndices {
    /// Indices `(s+α, s+2α, s)` of the solution of a heat-type equation
    /// forced in `L²(Ḣ^s)`.
    pub fn parabolic(s: f64, alpha: f64) -> Self {
        NormIndices {
            sup: s + alpha,
            l2: s + 2.0 * alpha,
            rate: s,
        }
    }

    /// All three indices equal; used to tag forcing terms.
    pub fn uniform(s: f64) -> Self {
        NormIndices {
            sup: s,
            l2: s,
            rate: s,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<F> {
    time: TimeGrid,
    nodes: Vec<F>,
    rates: Option<Vec<F>>,
    indices: NormIndices,
}

impl<F: Field> Trajectory<F> {
    pub fn new(time: TimeGrid, nodes: Vec<F>, indices: NormIndices) -> Result<Self> {
        if nodes.len() != time.node_count() {
            return Err(Error::TimeMismatch(format!(
                "{} nodes for {} time steps",
                nodes.len(),
                time.steps
            )));
        }
        for f in &nodes[1..] {
            ensure_same(nodes[0].grid(), f.grid())?;
        }
        Ok(Trajectory {
            time,
            nodes,
            rates: None,
            indices,
        })
    }

    /// Attaches `∂_t` at every node.
    pub fn with_rates(mut self, rates: Vec<F>) -> Result<Self> {
        if rates.len() != self.nodes.len() {
            return Err(Error::TimeMismatch(format!(
                "{} rates for {} nodes",
                rates.len(),
                self.nodes.len()
            )));
        }
        for r in &rates {
            ensure_same(self.grid(), r.grid())?;
        }
        self.rates = Some(rates);
        Ok(self)
    }

    /// The time-independent trajectory `t ↦ f`, with zero rate.
    pub fn constant(time: TimeGrid, f: &F, indices: NormIndices) -> Self {
        let zero = f.zeros_like();
        Trajectory {
            time,
            nodes: vec![f.clone(); time.node_count()],
            rates: Some(vec![zero; time.node_count()]),
            indices,
        }
    }

    /// Samples `f(t_m)` at every node; no rates are attached.
    pub fn from_fn(time: TimeGrid, indices: NormIndices, f: impl Fn(f64) -> F) -> Result<Self> {
        let nodes = (0..=time.steps).map(|m| f(time.time(m))).collect();
        Self::new(time, nodes, indices)
    }

    pub fn with_indices(mut self, indices: NormIndices) -> Self {
        self.indices = indices;
        self
    }

    pub fn time(&self) -> TimeGrid {
        self.time
    }

    pub fn indices(&self) -> NormIndices {
        self.indices
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.nodes[0].grid()
    }

    pub fn nodes(&self) -> &[F] {
        &self.nodes
    }

    pub fn node(&self, m: usize) -> &F {
        &self.nodes[m]
    }

    pub fn first(&self) -> &F {
        &self.nodes[0]
    }

    pub fn last(&self) -> &F {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn rates(&self) -> Option<&[F]> {
        self.rates.as_deref()
    }

    pub fn into_nodes(self) -> Vec<F> {
        self.nodes
    }

    /// `‖f(t_m)‖_{Ḣ^s}` at every node.
    pub fn node_norms(&self, s: f64) -> Vec<f64> {
        self.nodes.iter().map(|f| f.hdot_norm(s)).collect()
    }

    pub fn sup_norm(&self, s: f64) -> f64 {
        self.node_norms(s).into_iter().fold(0.0, f64::max)
    }

    /// `‖f‖_{L²(0,T;Ḣ^s)}` by the trapezoid rule.
    pub fn l2_norm(&self, s: f64) -> f64 {
        let sq: Vec<f64> = self.nodes.iter().map(|f| f.hdot_norm_sq(s)).collect();
        trapezoid(&sq, self.time.dt(), sq.len() - 1).sqrt()
    }

    /// Per-node squared norms at the trajectory's three indices.
    pub fn profile(&self) -> Result<NormProfile> {
        let rates = self.rates.as_ref().ok_or_else(|| {
            Error::precondition("trajectory carries no time derivative; attach rates first")
        })?;
        let idx = self.indices;
        Ok(NormProfile {
            dt: self.time.dt(),
            sup: self.node_norms(idx.sup),
            l2_sq: self.nodes.iter().map(|f| f.hdot_norm_sq(idx.l2)).collect(),
            rate_sq: rates.iter().map(|f| f.hdot_norm_sq(idx.rate)).collect(),
        })
    }

    /// `sup‖·‖ + ‖·‖_{L²} + ‖∂_t ·‖_{L²}` at the trajectory's indices.
    pub fn space_time_norm(&self) -> Result<f64> {
        Ok(self.profile()?.total())
    }

    /// Node-wise difference; rates are differenced when both sides carry them.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.time != other.time {
            return Err(Error::TimeMismatch(format!(
                "time grids {:?} and {:?}",
                self.time, other.time
            )));
        }
        ensure_same(self.grid(), other.grid())?;
        let nodes = self
            .nodes
            .iter()
            .zip(&other.nodes)
            .map(|(a, b)| a.difference(b))
            .collect();
        let rates = match (&self.rates, &other.rates) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x.difference(y)).collect()),
            _ => None,
        };
        Ok(Trajectory {
            time: self.time,
            nodes,
            rates,
            indices: self.indices,
        })
    }

    /// Every node (and rate) multiplied by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        Trajectory {
            time: self.time,
            nodes: self.nodes.iter().map(|f| f.scaled(a)).collect(),
            rates: self
                .rates
                .as_ref()
                .map(|r| r.iter().map(|f| f.scaled(a)).collect()),
            indices: self.indices,
        }
    }

    /// Second-order finite-difference `∂_t`: centered inside, one-sided at the ends.
    pub fn finite_difference_rates(&self) -> Vec<F> {
        let h = self.time.dt();
        let m = self.nodes.len() - 1;
        let combo = |terms: &[(f64, usize)]| {
            let mut out = self.nodes[0].zeros_like();
            for &(c, j) in terms {
                out.axpy(c / h, &self.nodes[j]);
            }
            out
        };
        let mut out = Vec::with_capacity(m + 1);
        out.push(combo(&[(-1.5, 0), (2.0, 1), (-0.5, 2)]));
        for j in 1..m {
            out.push(combo(&[(-0.5, j - 1), (0.5, j + 1)]));
        }
        out.push(combo(&[(0.5, m - 2), (-2.0, m - 1), (1.5, m)]));
        out
    }
}

/// Trapezoid rule for `∫_0^{t_last} g dt` from node samples.
pub(crate) fn trapezoid(values: &[f64], dt: f64, last: usize) -> f64 {
    if last == 0 {
        return 0.0;
    }
    let inner: f64 = values[1..last].iter().sum();
    dt * (0.5 * (values[0] + values[last]) + inner)
}

/// Per-node norms of a trajectory, from which the space-time norm on any
/// initial window `[0, t_m]` follows without touching the fields again.
#[derive(Clone, Debug, PartialEq)]
pub struct NormProfile {
    pub dt: f64,
    pub sup: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub rate_sq: Vec<f64>,
}

impl NormProfile {
    pub fn last(&self) -> usize {
        self.sup.len() - 1
    }

    pub fn sup_upto(&self, m: usize) -> f64 {
        self.sup[..=m].iter().copied().fold(0.0, f64::max)
    }

    pub fn l2_upto(&self, m: usize) -> f64 {
        trapezoid(&self.l2_sq, self.dt, m).sqrt()
    }

    pub fn rate_upto(&self, m: usize) -> f64 {
        trapezoid(&self.rate_sq, self.dt, m).sqrt()
    }

    pub fn total_upto(&self, m: usize) -> f64 {
        self.sup_upto(m) + self.l2_upto(m) + self.rate_upto(m)
    }

    pub fn total(&self) -> f64 {
        self.total_upto(self.last())
    }
}

pub const TRAJECTORY_MAGIC: &[u8; 8] = b"FBTRAJ\0\x01";
pub const TRAJECTORY_FORMAT: &str = "fracboussinesq-trajectory";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryHeader {
    pub format: String,
    pub version: u32,
    pub time: TimeGrid,
    pub times: Vec<f64>,
    pub indices: NormIndices,
    pub has_rates: bool,
}

impl<F: SnapshotField> Trajectory<F> {
    /// Writes magic, a JSON time-grid header, then one field snapshot per
    /// node followed by one per rate.
    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        let header = TrajectoryHeader {
            format: TRAJECTORY_FORMAT.into(),
            version: 1,
            time: self.time,
            times: self.time.times(),
            indices: self.indices,
            has_rates: self.rates.is_some(),
        };
        let bytes = serde_json::to_vec(&header).map_err(std::io::Error::other)?;
        w.write_all(TRAJECTORY_MAGIC)?;
        w.write_all(&(bytes.len() as u64).to_le_bytes())?;
        w.write_all(&bytes)?;
        for f in self.nodes.iter().chain(self.rates.iter().flatten()) {
            f.to_snapshot().write_to(w)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let fmt_err = |e: std::io::Error| Error::Format(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(fmt_err)?;
        if &magic != TRAJECTORY_MAGIC {
            return Err(Error::Format("bad trajectory magic".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len).map_err(fmt_err)?;
        let hlen = u64::from_le_bytes(len) as usize;
        if hlen > 1 << 26 {
            return Err(Error::Format(format!("header length {hlen} is implausible")));
        }
        let mut hbytes = vec![0u8; hlen];
        r.read_exact(&mut hbytes).map_err(fmt_err)?;
        let header: TrajectoryHeader = serde_json::from_slice(&hbytes)?;
        if header.format != TRAJECTORY_FORMAT || header.version != 1 {
            return Err(Error::Format(format!(
                "unsupported container {} v{}",
                header.format, header.version
            )));
        }
        let time = TimeGrid::new(header.time.horizon, header.time.steps)?;
        let first = FieldSnapshot::read_from(r)?;
        let grid = first.grid()?;
        let mut read_many = |count: usize, first: Option<FieldSnapshot>| -> Result<Vec<F>> {
            let mut out = Vec::with_capacity(count);
            if let Some(s) = first {
                out.push(F::from_snapshot(&s, &grid)?);
            }
            while out.len() < count {
                out.push(F::from_snapshot(&FieldSnapshot::read_from(r)?, &grid)?);
            }
            Ok(out)
        };
        let nodes = read_many(time.node_count(), Some(first))?;
        let traj = Trajectory::new(time, nodes, header.indices)?;
        if header.has_rates {
            let rates = read_many(time.node_count(), None)?;
            traj.with_rates(rates)
        } else {
            Ok(traj)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut std::io::BufReader::new(file))
    }
}
