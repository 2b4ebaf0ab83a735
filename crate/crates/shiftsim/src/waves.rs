//! Value change dump output.

use std::io::{self, Write};

use shiftsim_core::{LogicValue, NetId, Time, Waveform};
use vcd::{SimulationCommand, Value};

fn vcd_value(v: LogicValue) -> Value {
    match v {
        LogicValue::L0 => Value::V0,
        LogicValue::L1 => Value::V1,
        LogicValue::X => Value::X,
        LogicValue::Z => Value::Z,
    }
}

/// Write `waveform` as VCD: 1 ps timescale, one scope named `scope`, one
/// wire per net in net order, values at time 0 under `$dumpvars` and a
/// final timestamp at the end of the run.
pub fn write_vcd<W: Write>(mut out: W, waveform: &Waveform, scope: &str) -> io::Result<()> {
    out.write_all(b"$timescale 1ps $end\n")?;
    let mut w = vcd::Writer::new(out);
    w.add_module(scope)?;
    let ids = waveform
        .names()
        .iter()
        .map(|name| w.add_wire(1, &sanitize(name)))
        .collect::<io::Result<Vec<_>>>()?;
    w.upscope()?;
    w.enddefinitions()?;

    w.timestamp(0)?;
    w.begin(SimulationCommand::Dumpvars)?;
    for (i, id) in ids.iter().enumerate() {
        w.change_scalar(*id, vcd_value(waveform.value_at(NetId(i as u32), Time::ZERO)))?;
    }
    w.end()?;

    let mut current = Time::ZERO;
    for (time, net, value) in waveform.timeline() {
        if time == Time::ZERO {
            continue;
        }
        if time != current {
            w.timestamp(time.as_ps())?;
            current = time;
        }
        w.change_scalar(ids[net.index()], vcd_value(value))?;
    }
    if waveform.end() > current {
        w.timestamp(waveform.end().as_ps())?;
    }
    w.flush()
}

pub fn vcd_string(waveform: &Waveform, scope: &str) -> String {
    let mut buf = Vec::new();
    write_vcd(&mut buf, waveform, scope).expect("writing to memory");
    String::from_utf8(buf).expect("VCD is ASCII")
}

/// VCD references may not contain whitespace.
fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}
