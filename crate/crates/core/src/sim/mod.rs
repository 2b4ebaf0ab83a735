//! Event-driven simulation, waveforms and timing measurement.

mod kernel;
mod measure;
mod stimulus;
mod waveform;

pub use kernel::{simulate, simulate_with, SimError, SimOptions, Simulator, DEFAULT_EVENT_BUDGET};
pub use measure::{
    check_timing, flop_probes, measure_delay, DelayMeasurement, FlopProbe, MissingTransition, TimingViolation,
    ViolationKind,
};
pub use stimulus::{ClockSpec, Stimulus, StimulusEvent};
pub use waveform::Waveform;
