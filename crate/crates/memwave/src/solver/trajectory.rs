//! Completed solution histories: boundary velocity traces at every step
//! plus interior snapshots.

use std::io::Write;

use super::grid::Grid;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub dt: f64,
    /// One entry per step, covering [0, T_final].
    pub times: Vec<f64>,
    /// Velocity trace per damped boundary node, aligned with `times`.
    pub traces: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    /// ½∫|∇u|² per snapshot.
    pub grad_energy: Vec<f64>,
    /// |μ| mass dropped beyond the retained history horizon.
    pub history_trunc_mass: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn last_step(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .find(|s| (s.t - t).abs() <= 0.5 * self.dt)
    }

    /// Largest squared trace sample over all damped nodes.
    pub fn max_trace_sq(&self) -> f64 {
        self.traces
            .iter()
            .flat_map(|tr| tr.iter())
            .fold(0.0f64, |m, &v| m.max(v * v))
    }

    /// Writes `trace_node<k>.csv` (columns t,v) per damped node, with `k`
    /// the grid node index.
    pub fn write_traces(&self, dir: &std::path::Path) -> std::io::Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for (ni, node) in self.grid.neumann.iter().enumerate() {
            let path = dir.join(format!("trace_node{}.csv", node.node));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            writeln!(f, "t,v")?;
            for (t, v) in self.times.iter().zip(&self.traces[ni]) {
                writeln!(f, "{t},{v}")?;
            }
            written.push(path);
        }
        Ok(written)
    }

    /// Writes `snapshots.csv` with columns t, node index, u.
    pub fn write_snapshots(&self, dir: &std::path::Path) -> std::io::Result<std::path::PathBuf> {
        let path = dir.join("snapshots.csv");
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(f, "t,node,u")?;
        for snap in &self.snapshots {
            for (idx, u) in snap.u.iter().enumerate() {
                writeln!(f, "{},{},{}", snap.t, idx, u)?;
            }
        }
        Ok(path)
    }
}
