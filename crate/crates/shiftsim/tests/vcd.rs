use std::collections::BTreeMap;

use shiftsim::{parse_netlist, parse_stimulus, vcd_string};
use shiftsim_core::{simulate, LogicValue, Netlist, PrimitiveKind, Stimulus, Time};

/// Per wire: value history as (time in ps, value char), read back with the
/// `vcd` crate's parser.
fn replay(text: &str) -> (String, BTreeMap<String, Vec<(u64, char)>>) {
    let mut parser = vcd::Parser::new(text.as_bytes());
    let header = parser.parse_header().unwrap();
    assert_eq!(header.timescale, Some((1, vcd::TimescaleUnit::PS)));
    let mut scope_name = String::new();
    let mut names = BTreeMap::new();
    for item in &header.items {
        if let vcd::ScopeItem::Scope(scope) = item {
            scope_name = scope.identifier.clone();
            for child in &scope.items {
                if let vcd::ScopeItem::Var(var) = child {
                    names.insert(var.code, var.reference.clone());
                }
            }
        }
    }
    let mut history: BTreeMap<String, Vec<(u64, char)>> = names.values().map(|n| (n.clone(), Vec::new())).collect();
    let mut now = 0;
    for cmd in parser {
        match cmd.unwrap() {
            vcd::Command::Timestamp(t) => {
                assert!(t >= now, "timestamps go backwards");
                now = t;
            }
            vcd::Command::ChangeScalar(id, v) => {
                let c = match v {
                    vcd::Value::V0 => '0',
                    vcd::Value::V1 => '1',
                    vcd::Value::X => 'x',
                    vcd::Value::Z => 'z',
                };
                history.get_mut(&names[&id]).unwrap().push((now, c));
            }
            _ => {}
        }
    }
    (scope_name, history)
}

fn inverter() -> Netlist {
    let mut n = Netlist::new("inv");
    let a = n.add_input("a");
    let y = n.add_output("y");
    n.add_gate("g", PrimitiveKind::Not, &[a], y, Time::ns(2)).unwrap();
    n
}

#[test]
fn not_gate_transitions() {
    let mut stim = Stimulus::new();
    stim.push(Time::ZERO, "a", LogicValue::L0);
    stim.push(Time::ns(10), "a", LogicValue::L1);
    stim.push(Time::ns(20), "a", LogicValue::Z);
    let w = simulate(&inverter(), &stim, Time::ns(30)).unwrap();
    let text = vcd_string(&w, "inv");
    let (scope, h) = replay(&text);
    assert_eq!(scope, "inv");
    assert_eq!(h["a"], [(0, '0'), (10_000, '1'), (20_000, 'z')]);
    assert_eq!(h["y"], [(0, 'x'), (2_000, '1'), (12_000, '0'), (22_000, 'x')]);
    assert!(text.starts_with("$timescale 1ps $end\n"));
    assert!(text.trim_end().ends_with("#30000"));
}

#[test]
fn empty_waveform() {
    let w = simulate(&Netlist::new("empty"), &Stimulus::new(), Time::ZERO).unwrap();
    let text = vcd_string(&w, "empty");
    let (scope, h) = replay(&text);
    assert_eq!(scope, "empty");
    assert!(h.is_empty());
    assert!(text.contains("$enddefinitions"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let n = shiftsim_core::datapath::build_system_with(
        shiftsim_core::FlipFlopVariant::Tgms,
        &Default::default(),
        shiftsim_core::FfModel::Structural,
    );
    let mut stim = Stimulus::new();
    stim.set_clock(shiftsim_core::sim::ClockSpec::new("clk", Time::ns(200), Time::ZERO));
    for (i, port) in n.input_names().into_iter().filter(|p| *p != "clk").enumerate() {
        stim.push(Time::ZERO, port, LogicValue::from_bool(i % 3 == 0));
        stim.push(Time::ns(400), port, LogicValue::from_bool(i % 2 == 0));
    }
    let first = vcd_string(&simulate(&n, &stim, Time::ns(800)).unwrap(), "system");
    for _ in 0..3 {
        assert_eq!(vcd_string(&simulate(&n, &stim, Time::ns(800)).unwrap(), "system"), first);
    }
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn usr_parallel_load_matches_frozen_dump() {
    let n = parse_netlist(&fixture("usr_dff.json")).unwrap();
    let stim = parse_stimulus(&fixture("usr_load_stimulus.json")).unwrap();
    let text = vcd_string(&simulate(&n, &stim, Time::ns(100)).unwrap(), n.name());
    assert_eq!(text, fixture("usr_load.vcd"));

    // Loaded word 1011 appears one clock-to-Q delay after the rising edge at
    // 20 ns and is then held through the no-change cycle.
    let (_, h) = replay(&text);
    for (port, bit) in [("f1", '1'), ("f2", '0'), ("f3", '1'), ("f4", '1')] {
        assert_eq!(h[port], [(0, 'x'), (29_000, bit)], "{port}");
    }
    assert_eq!(h["clk"], [(0, '0'), (20_000, '1'), (40_000, '0'), (60_000, '1'), (80_000, '0'), (100_000, '1')]);
}
