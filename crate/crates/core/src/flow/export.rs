//! Trajectory export: CSV samples and a JSON metadata sidecar.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::{EventHit, IntegratorParams, StepStats, Termination, Trajectory};

/// Writes `s,u,v,alpha,x,y,z` plus one column per monitor.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    let mut header = String::from("s,u,v,alpha,x,y,z");
    for name in &traj.monitor_names {
        header.push(',');
        header.push_str(name);
    }
    writeln!(out, "{header}")?;
    for s in &traj.samples {
        let mut line = format!(
            "{},{},{},{},{},{},{}",
            s.s, s.state.u, s.state.v, s.state.alpha, s.position[0], s.position[1], s.position[2]
        );
        for m in &s.monitors {
            line.push(',');
            line.push_str(&m.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryMetadata<'a> {
    pub surface: &'a str,
    pub flow: &'a str,
    pub orientation: f64,
    pub params: &'a IntegratorParams,
    pub termination: &'a Termination,
    pub termination_reason: String,
    pub samples: usize,
    pub arc_length: f64,
    pub stats: &'a StepStats,
    pub monitors: &'a [String],
    pub events: &'a [EventHit],
}

impl<'a> TrajectoryMetadata<'a> {
    pub fn of(traj: &'a Trajectory) -> Self {
        Self {
            surface: &traj.surface,
            flow: &traj.flow,
            orientation: traj.orientation,
            params: &traj.params,
            termination: &traj.termination,
            termination_reason: traj.termination.to_string(),
            samples: traj.samples.len(),
            arc_length: traj.arc_length(),
            stats: &traj.stats,
            monitors: &traj.monitor_names,
            events: &traj.events,
        }
    }
}

pub fn write_metadata<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, &TrajectoryMetadata::of(traj))?;
    Ok(())
}
