//! Four-valued event-driven gate-level simulation with a small cell catalog:
//! multiplexer, full adder, four flip-flop variants, a 4-bit universal shift
//! register, a 4-bit ALU and the two combined.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod cells;
pub mod datapath;
pub mod graph;
pub mod harness;
pub mod logic;
pub mod netlist;
pub mod sim;
pub mod time;

pub use cells::{
    ff_step, full_adder, mux4, CellDelayConfig, ClockEvent, FfModel, FlipFlopVariant, StressOutcome,
};
pub use datapath::{
    alu_eval, build_alu, build_system, build_usr, system_cycle, usr_step, AluControl, SystemState, UsrMode, UsrState,
};
pub use logic::{resolve, LogicValue, Word4};
pub use netlist::{
    eval_primitive, CellKind, Component, DelayModel, DelaySpec, Diagnostic, Net, NetId, Netlist, NetlistError,
    PrimitiveKind,
};
pub use sim::{simulate, SimError, Stimulus, Waveform};
pub use time::Time;
