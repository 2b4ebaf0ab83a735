//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use shiftsim::vcd_string;
use shiftsim_core::cells::overlap_stress;
use shiftsim_core::datapath::{build_system_with, build_usr_with};
use shiftsim_core::harness::{
    check_alu_exhaustive, check_flop_table, check_system_random, check_usr_exhaustive, check_usr_random, cut_carry,
    settle_time, swap_mux_selects, StimulusRng,
};
use shiftsim_core::sim::{ClockSpec, Simulator};
use shiftsim_core::{
    build_alu, simulate, AluControl, CellDelayConfig, CellKind, DelaySpec, FfModel, FlipFlopVariant, LogicValue,
    Netlist, PrimitiveKind, Stimulus, StressOutcome, Time, Waveform,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn cfg() -> CellDelayConfig {
    CellDelayConfig::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn delay_json() -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_shiftsim"))
        .args(["delay", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("shiftsim delay exited with {}", out.status))?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn table3() -> Outcome {
    let v = delay_json()?;
    let expected = [("dff", 9), ("dtgms", 14), ("mtspc", 22), ("tgms", 9)];
    let entries = v["entries"].as_array().ok_or("no entries")?;
    let got: Vec<(String, u64)> = entries
        .iter()
        .map(|e| (e["variant"].as_str().unwrap_or("?").to_string(), e["delay_ns"].as_u64().unwrap_or(0)))
        .collect();
    let want: Vec<(String, u64)> = expected.iter().map(|&(n, d)| (n.to_string(), d)).collect();
    ensure(got == want, || format!("measured {got:?}"))?;
    Ok(got.iter().map(|(n, d)| format!("{n} {d} ns")).collect::<Vec<_>>().join(", "))
}

fn ranking() -> Outcome {
    let v = delay_json()?;
    let min = v["minimum"].clone();
    ensure(min == serde_json::json!(["dff", "tgms"]), || format!("minimum set {min}"))?;
    Ok("minimum {dff, tgms}".into())
}

/// Bit-vector model of the ALU: Y selected from B, !B, 0000, 1111 and added
/// to A with the carry in.
fn alu_oracle(s1: bool, s0: bool, cin: bool, a: u8, b: u8) -> (u8, bool) {
    let y = match (s1, s0) {
        (false, false) => b,
        (false, true) => !b & 0xF,
        (true, false) => 0,
        (true, true) => 0xF,
    };
    let sum = a as u32 + y as u32 + cin as u32;
    ((sum & 0xF) as u8, sum > 0xF)
}

fn drive_word(sim: &mut Simulator, prefix: &str, value: u8, t: Time) -> Result<(), String> {
    for i in 0..4 {
        let bit = value >> (3 - i) & 1 == 1;
        sim.drive(&format!("{prefix}{}", i + 1), t, LogicValue::from_bool(bit)).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Simulate every requested ALU vector and return the observed
/// (D, cout) values; unknown bits are an error.
fn run_alu(cases: &[(bool, bool, bool, u8, u8)]) -> Result<Vec<(u8, bool)>, String> {
    let alu = build_alu(&cfg());
    let settle = settle_time(&alu).map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(&alu).map_err(|e| e.to_string())?;
    let out: Vec<_> = ["d1", "d2", "d3", "d4", "cout"].iter().map(|n| sim.net_id(n).unwrap()).collect();
    let mut t = Time::ZERO;
    let mut results = Vec::with_capacity(cases.len());
    for &(s1, s0, cin, a, b) in cases {
        let err = |e: shiftsim_core::SimError| e.to_string();
        sim.drive("s1", t, LogicValue::from_bool(s1)).map_err(err)?;
        sim.drive("s0", t, LogicValue::from_bool(s0)).map_err(err)?;
        sim.drive("cin", t, LogicValue::from_bool(cin)).map_err(err)?;
        drive_word(&mut sim, "a", a, t)?;
        drive_word(&mut sim, "b", b, t)?;
        t += settle;
        sim.run_until(t - Time::ps(1)).map_err(err)?;
        ensure(sim.is_quiescent(), || format!("not settled for {s1} {s0} {cin} {a} {b}"))?;
        let bits: Vec<bool> = out
            .iter()
            .map(|&n| sim.value(n).to_bool().ok_or_else(|| format!("unknown output for {a} {b}")))
            .collect::<Result<_, _>>()?;
        let d = bits[..4].iter().fold(0u8, |acc, &b| acc << 1 | b as u8);
        results.push((d, bits[4]));
    }
    Ok(results)
}

fn alu_exhaustive() -> Outcome {
    let report = check_alu_exhaustive(&build_alu(&cfg())).map_err(|e| e.to_string())?;
    ensure(report.cases == 2048 && report.passed(), || report.to_string())?;
    let mut cases = Vec::with_capacity(2048);
    for ctrl in 0..8u8 {
        for a in 0..16 {
            for b in 0..16 {
                cases.push((ctrl & 4 != 0, ctrl & 2 != 0, ctrl & 1 != 0, a, b));
            }
        }
    }
    let observed = run_alu(&cases)?;
    let mut mismatches = 0;
    for (&(s1, s0, cin, a, b), &(d, cout)) in cases.iter().zip(&observed) {
        let (y, _) = alu_oracle(s1, s0, false, 0, b);
        let identity = d as u32 + 16 * cout as u32 == a as u32 + y as u32 + cin as u32;
        if (d, cout) != alu_oracle(s1, s0, cin, a, b) || !identity {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches against the bit-vector model"))?;
    Ok(format!("{} vectors, harness and bit-vector model agree", cases.len()))
}

fn subtract() -> Outcome {
    let s = AluControl::SUBTRACT;
    let cases: Vec<_> = (0..16).flat_map(|a| (0..16).map(move |b| (s.s1, s.s0, s.cin, a, b))).collect();
    let observed = run_alu(&cases)?;
    let bad: Vec<_> = cases
        .iter()
        .zip(&observed)
        .filter(|(&(_, _, _, a, b), &(d, cout))| d != a.wrapping_sub(b) & 0xF || cout != (a >= b))
        .map(|(&(_, _, _, a, b), obs)| format!("{a}-{b} -> {obs:?}"))
        .collect();
    ensure(bad.is_empty(), || format!("{} mismatches, first {}", bad.len(), bad[0]))?;
    Ok("256 pairs: D = A - B mod 16, cout = A >= B".into())
}

fn usr_modes() -> Outcome {
    let mut runs = 0;
    for v in FlipFlopVariant::ALL {
        for model in [FfModel::Behavioral, FfModel::Structural] {
            let r = check_usr_exhaustive(&build_usr_with(v, &cfg(), model)).map_err(|e| e.to_string())?;
            ensure(r.cases == 4096 && r.passed(), || format!("{v} {model:?}: {r}"))?;
            runs += r.cases;
        }
    }
    Ok(format!("{runs} single steps over 4 variants x 2 flip-flop models"))
}

fn system() -> Outcome {
    for v in FlipFlopVariant::ALL {
        let r = check_system_random(&build_system_with(v, &cfg(), FfModel::Behavioral), 42, 1000)
            .map_err(|e| e.to_string())?;
        ensure(r.cases == 1000 && r.passed(), || format!("{v}: {r}"))?;
    }
    Ok("1000 seeded cycles per variant match the golden model".into())
}

fn flop_tables() -> Outcome {
    for v in FlipFlopVariant::ALL {
        for model in [FfModel::Behavioral, FfModel::Structural] {
            let r = check_flop_table(v, &cfg(), model).map_err(|e| e.to_string())?;
            ensure(r.cases == 16 && r.passed(), || format!("{v} {model:?}: {r}"))?;
        }
    }
    Ok("16 scenarios x 4 variants x 2 models".into())
}

fn overlap() -> Outcome {
    let stress = |v, ps| overlap_stress(v, Time::ps(ps), &cfg()).map_err(|e| e.to_string());
    use FlipFlopVariant::*;
    ensure(stress(Dtgms, 2000)? == StressOutcome::Corrupts, || "DTGMS survived 2 ns overlap".into())?;
    for v in [Tgms, Dff] {
        ensure(stress(v, 2000)? == StressOutcome::Holds, || format!("{v} corrupted by 2 ns overlap"))?;
    }
    for v in FlipFlopVariant::ALL {
        ensure(stress(v, 0)? == StressOutcome::Holds, || format!("{v} corrupted without overlap"))?;
    }
    Ok("DTGMS corrupts at 2 ns overlap, DFF/TGMS hold, all hold at 0".into())
}

fn system_stimulus(n: &Netlist, seed: u64, cycles: u64, period: Time) -> Stimulus {
    let mut rng = StimulusRng::new(seed);
    let mut stim = Stimulus::new();
    stim.set_clock(ClockSpec::new("clk", period, Time::ZERO));
    for c in 0..cycles {
        for port in n.input_names().into_iter().filter(|p| *p != "clk") {
            stim.push(period * c, port, rng.bit());
        }
    }
    stim
}

fn same_waveforms(a: &Waveform, b: &Waveform) -> Result<(), String> {
    ensure(a.names() == b.names(), || "net lists differ".into())?;
    for (i, name) in a.names().iter().enumerate() {
        let id = shiftsim_core::NetId(i as u32);
        ensure(a.initial(id) == b.initial(id) && a.changes(id) == b.changes(id), || format!("{name} differs"))?;
    }
    Ok(())
}

/// Every change of a driven net at time t has a driver with delay d one of
/// whose inputs changed at t - d (or t = d, the power-up evaluation).
fn causal(flat: &Netlist, w: &Waveform) -> Result<usize, String> {
    let mut checked = 0;
    let mut drivers: Vec<Vec<(Vec<usize>, Time)>> = vec![Vec::new(); flat.nets().len()];
    for c in flat.components() {
        let (ports, n_in) = flat.port_names(&c.kind).ok_or("unknown kind")?;
        let inputs: Vec<usize> = c.pins[..n_in].iter().flatten().map(|n| n.index()).collect();
        for out in c.pins[n_in..ports.len()].iter().flatten() {
            drivers[out.index()].push((inputs.clone(), c.delay.propagation));
        }
    }
    for (i, ds) in drivers.iter().enumerate() {
        if ds.is_empty() {
            continue;
        }
        for &(t, _) in w.changes(shiftsim_core::NetId(i as u32)) {
            checked += 1;
            let explained = ds.iter().any(|(inputs, d)| {
                t >= *d
                    && (t == *d
                        || inputs.iter().any(|&n| {
                            w.changes(shiftsim_core::NetId(n as u32)).binary_search_by_key(&(t - *d), |c| c.0).is_ok()
                        }))
            });
            ensure(explained, || format!("{} changed at {t:?} without a cause", w.names()[i]))?;
        }
    }
    Ok(checked)
}

fn pulse_through(delay: DelaySpec, width: Time) -> Result<usize, String> {
    let mut n = Netlist::new("p");
    let a = n.add_input("a");
    let y = n.add_output("y");
    let g = n.add_gate("g", PrimitiveKind::Not, &[a], y, delay.propagation).map_err(|e| e.to_string())?;
    n.set_delay(g, delay);
    let mut stim = Stimulus::new();
    stim.push(Time::ZERO, "a", LogicValue::L0);
    stim.push(Time::ns(10), "a", LogicValue::L1);
    stim.push(Time::ns(10) + width, "a", LogicValue::L0);
    let w = simulate(&n, &stim, Time::ns(30)).map_err(|e| e.to_string())?;
    Ok(w.transition_count(w.net_id("y").unwrap()))
}

/// Random combinational DAG over `inputs` primary inputs.
fn random_dag(rng: &mut StimulusRng, inputs: usize, gates: usize) -> Netlist {
    use PrimitiveKind::*;
    let kinds = [Not, Buf, And2, Nand2, Or2, Nor2, Xor2];
    let mut n = Netlist::new("dag");
    let mut nets: Vec<_> = (0..inputs).map(|i| n.add_input(&format!("i{i}"))).collect();
    for g in 0..gates {
        let kind = kinds[rng.below(kinds.len() as u32) as usize];
        let ins: Vec<_> =
            (0..kind.input_ports().len()).map(|_| nets[rng.below(nets.len() as u32) as usize]).collect();
        let out = n.add_output(&format!("g{g}"));
        n.add_gate(&format!("u{g}"), kind, &ins, out, Time::ps(100 + 100 * rng.below(20) as u64)).unwrap();
        nets.push(out);
    }
    n
}

fn bool_eval(kind: PrimitiveKind, ins: &[bool]) -> bool {
    use PrimitiveKind::*;
    match kind {
        Not => !ins[0],
        Buf => ins[0],
        And2 => ins[0] && ins[1],
        Nand2 => !(ins[0] && ins[1]),
        Or2 => ins[0] || ins[1],
        Nor2 => !(ins[0] || ins[1]),
        Xor2 => ins[0] ^ ins[1],
        _ => unreachable!(),
    }
}

fn quiescence(seed: u64) -> Result<(), String> {
    let mut rng = StimulusRng::new(seed);
    let dag = random_dag(&mut rng, 4, 30);
    let settle = settle_time(&dag).map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(&dag).map_err(|e| e.to_string())?;
    let mut t = Time::ZERO;
    for _ in 0..20 {
        let mut values = vec![false; dag.nets().len()];
        for i in 0..4 {
            let v = rng.bit();
            values[dag.find_net(&format!("i{i}")).unwrap().index()] = v == LogicValue::L1;
            sim.drive(&format!("i{i}"), t, v).map_err(|e| e.to_string())?;
        }
        t += settle;
        sim.run_until(t).map_err(|e| e.to_string())?;
        ensure(sim.is_quiescent(), || "events pending after the settle bound".into())?;
        ensure(sim.reevaluate_all() == 0, || "re-evaluation changed a settled net".into())?;
        for c in dag.components() {
            let CellKind::Primitive(kind) = c.kind else { unreachable!() };
            let n_in = kind.input_ports().len();
            let ins: Vec<bool> = c.pins[..n_in].iter().map(|p| values[p.unwrap().index()]).collect();
            let out = c.pins[n_in].unwrap();
            values[out.index()] = bool_eval(kind, &ins);
            ensure(sim.value(out) == LogicValue::from_bool(values[out.index()]), || {
                format!("{} disagrees with the levelized evaluation", c.name)
            })?;
        }
    }
    Ok(())
}

fn kernel_properties() -> Outcome {
    let sys = build_system_with(FlipFlopVariant::Tgms, &cfg(), FfModel::Structural);
    let period = Time::ns(200);
    let stim = system_stimulus(&sys, 11, 20, period);
    let until = period * 20;

    let first = vcd_string(&simulate(&sys, &stim, until).map_err(|e| e.to_string())?, "system");
    for _ in 0..2 {
        let again = vcd_string(&simulate(&sys, &stim, until).map_err(|e| e.to_string())?, "system");
        ensure(again == first, || "VCD differs between runs".into())?;
    }

    let flat = sys.flatten().map_err(|e| e.to_string())?;
    let hier = simulate(&sys, &stim, until).map_err(|e| e.to_string())?;
    let flat_w = simulate(&flat, &stim, until).map_err(|e| e.to_string())?;
    same_waveforms(&hier, &flat_w)?;
    let changes = causal(&flat, &flat_w)?;

    let inertial = DelaySpec::inertial(Time::ns(2));
    ensure(pulse_through(inertial, Time::ns(1))? == 1, || "inertial delay passed a short pulse".into())?;
    ensure(pulse_through(inertial, Time::ns(3))? == 3, || "inertial delay dropped a long pulse".into())?;
    ensure(pulse_through(DelaySpec::transport(Time::ns(2)), Time::ns(1))? == 3, || {
        "transport delay dropped a pulse".into()
    })?;

    for seed in 0..25 {
        quiescence(seed)?;
    }
    Ok(format!("VCD stable, hierarchy = flat, {changes} changes causal, pulses filtered, 25 DAGs quiescent"))
}

fn mutations() -> Outcome {
    let alu = build_alu(&cfg());
    for bit in 1..=3 {
        let r = check_alu_exhaustive(&cut_carry(&alu, bit).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(!r.passed(), || format!("cut carry into fa{bit} passed"))?;
    }
    let usr = build_usr_with(FlipFlopVariant::Dff, &cfg(), FfModel::Behavioral);
    let swapped = swap_mux_selects(&usr).map_err(|e| e.to_string())?;
    let r = check_usr_random(&swapped, 42, 1000).map_err(|e| e.to_string())?;
    ensure(!r.passed(), || "swapped selects passed the random check".into())?;
    let r = check_usr_exhaustive(&swapped).map_err(|e| e.to_string())?;
    ensure(!r.passed(), || "swapped selects passed the exhaustive check".into())?;
    Ok("cut carries and swapped selects are reported".into())
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "delay report", limit: secs(1), run: table3 },
        Criterion { id: 2, name: "minimum-delay set", limit: secs(1), run: ranking },
        Criterion { id: 3, name: "ALU exhaustive equivalence", limit: secs(5), run: alu_exhaustive },
        Criterion { id: 4, name: "subtract semantics", limit: secs(1), run: subtract },
        Criterion { id: 5, name: "USR mode semantics", limit: secs(10), run: usr_modes },
        Criterion { id: 6, name: "system composition", limit: secs(10), run: system },
        Criterion { id: 7, name: "flip-flop truth table", limit: None, run: flop_tables },
        Criterion { id: 8, name: "clock overlap", limit: None, run: overlap },
        Criterion { id: 9, name: "kernel properties", limit: None, run: kernel_properties },
        Criterion { id: 10, name: "mutation sensitivity", limit: None, run: mutations },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {}: {detail} ({:.2} s)", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
