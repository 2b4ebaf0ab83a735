//! File formats, waveform output and the command-line front end for
//! `shiftsim-core`.

pub mod cli;
pub mod json;
pub mod waves;

pub use json::{
    parse_config, parse_netlist, parse_stimulus, serialize_config, serialize_netlist, serialize_stimulus, FormatError,
};
pub use waves::{vcd_string, write_vcd};
