//! Post-run waveform analysis: propagation delay and setup/hold checks.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::waveform::Waveform;
use crate::logic::LogicValue;
use crate::netlist::{CellKind, NetId, Netlist};
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayMeasurement {
    /// Output settled this long after the input transition.
    Settled(Time),
    NoResponse,
}

impl DelayMeasurement {
    pub fn delay(self) -> Option<Time> {
        match self {
            DelayMeasurement::Settled(t) => Some(t),
            DelayMeasurement::NoResponse => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingTransition {
    pub net: String,
    pub time: Time,
}

impl fmt::Display for MissingTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "net `{}` has no transition at {}", self.net, self.time)
    }
}

impl core::error::Error for MissingTransition {}

/// Output time minus input time, where the output time is the last
/// transition of `output` in the burst that follows the input transition.
///
/// The burst runs from `input_time` up to (not including) the next
/// transition of `input`, or to the end of the waveform.
pub fn measure_delay(
    waveform: &Waveform,
    input: NetId,
    input_time: Time,
    output: NetId,
) -> Result<DelayMeasurement, MissingTransition> {
    let input_changes = waveform.changes(input);
    let at = input_changes.iter().position(|&(t, _)| t == input_time).ok_or_else(|| MissingTransition {
        net: waveform.name(input).into(),
        time: input_time,
    })?;
    let window_end = input_changes.get(at + 1).map_or(Time::MAX, |&(t, _)| t);
    let last = waveform
        .changes(output)
        .iter()
        .filter(|&&(t, _)| t >= input_time && t < window_end)
        .map(|&(t, _)| t)
        .next_back();
    Ok(match last {
        Some(t) => DelayMeasurement::Settled(t - input_time),
        None => DelayMeasurement::NoResponse,
    })
}

/// D and CLK nets of one flip-flop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlopProbe {
    pub name: String,
    pub d: NetId,
    pub clk: NetId,
}

/// Probes for every behavioral flip-flop of a flat netlist.
pub fn flop_probes(flat: &Netlist) -> Vec<FlopProbe> {
    flat.components()
        .iter()
        .filter(|c| matches!(c.kind, CellKind::Flop(_)))
        .filter_map(|c| Some(FlopProbe { name: c.name.clone(), d: c.pins[0]?, clk: c.pins[1]? }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Setup,
    Hold,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingViolation {
    pub flop: String,
    pub kind: ViolationKind,
    pub clock_edge: Time,
    pub data_change: Time,
}

/// Report each D transition inside `[edge - setup, edge + hold]` of a rising
/// clock edge. Changes before the edge are setup violations, changes at or
/// after it are hold violations.
pub fn check_timing(waveform: &Waveform, flops: &[FlopProbe], setup: Time, hold: Time) -> Vec<TimingViolation> {
    let mut out = Vec::new();
    for ff in flops {
        let mut prev = waveform.initial(ff.clk);
        let mut edges = Vec::new();
        for &(t, v) in waveform.changes(ff.clk) {
            if prev == LogicValue::L0 && v == LogicValue::L1 {
                edges.push(t);
            }
            prev = v;
        }
        let data = waveform.changes(ff.d);
        for &edge in &edges {
            let lo = edge.saturating_sub(setup);
            let hi = edge + hold;
            for &(t, _) in data.iter().filter(|&&(t, _)| t >= lo && t <= hi) {
                out.push(TimingViolation {
                    flop: ff.name.clone(),
                    kind: if t < edge { ViolationKind::Setup } else { ViolationKind::Hold },
                    clock_edge: edge,
                    data_change: t,
                });
            }
        }
    }
    out
}
