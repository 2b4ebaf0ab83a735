//! Equivalence checks of netlists against the golden models, the delay
//! report, waveform diffing and the netlist mutations used to prove that the
//! checks can fail.
//!
//! Random stimulus comes from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, so a seed replays the same sequence on every
//! platform.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cells::{build_ff, ff_step, CellDelayConfig, ClockEvent, FfModel, FlipFlopVariant};
use crate::datapath::{
    alu_eval, build_usr_with, system_cycle, usr_step, AluControl, SystemState, UsrMode, UsrState,
};
use crate::graph::longest_path_bound;
use crate::logic::{LogicValue, Word4};
use crate::netlist::{CellKind, NetId, Netlist, NetlistError, PrimitiveKind};
use crate::sim::{measure_delay, DelayMeasurement, SimError, Simulator, Stimulus, Waveform};
use crate::time::Time;

use LogicValue::{L0, L1, X};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HarnessError {
    Interface { circuit: &'static str, missing: String },
    NoSteps,
    Netlist(NetlistError),
    Sim(SimError),
    Calibration { variant: FlipFlopVariant, intrinsic: Time, target: Time },
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Interface { circuit, missing } => {
                write!(f, "not an {circuit} interface: missing port `{missing}`")
            }
            HarnessError::NoSteps => f.write_str("at least one step is required"),
            HarnessError::Netlist(e) => write!(f, "{e}"),
            HarnessError::Sim(e) => write!(f, "{e}"),
            HarnessError::Calibration { variant, intrinsic, target } => write!(
                f,
                "{variant}: switch-level core alone takes {intrinsic}, longer than the {target} target"
            ),
        }
    }
}

impl core::error::Error for HarnessError {}

impl From<NetlistError> for HarnessError {
    fn from(e: NetlistError) -> Self {
        HarnessError::Netlist(e)
    }
}

impl From<SimError> for HarnessError {
    fn from(e: SimError) -> Self {
        HarnessError::Sim(e)
    }
}

/// One mismatch. `case` indexes the check's own stimulus sequence, so
/// rerunning the check with the same arguments reaches it again.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub case: usize,
    pub stimulus: String,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub circuit: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    fn new(circuit: impl Into<String>) -> Self {
        CheckReport { circuit: circuit.into(), cases: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, case: usize, stimulus: impl FnOnce() -> String, expected: String, observed: String) {
        if expected != observed {
            self.failures.push(Failure { case, stimulus: stimulus(), expected, observed });
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {} cases, {} failures", self.circuit, self.cases, self.failures.len())
    }
}

/// Seeded stimulus source.
pub struct StimulusRng(ChaCha8Rng);

impl StimulusRng {
    pub fn new(seed: u64) -> Self {
        StimulusRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: u32) -> u32 {
        self.0.next_u32() % n
    }

    pub fn bit(&mut self) -> LogicValue {
        LogicValue::from_bool(self.below(2) == 1)
    }

    pub fn word(&mut self) -> Word4 {
        Word4::from_u8(self.below(16) as u8)
    }

    pub fn mode(&mut self) -> UsrMode {
        UsrMode::ALL[self.below(4) as usize]
    }

    pub fn alu_control(&mut self) -> AluControl {
        AluControl::ALL[self.below(8) as usize]
    }
}

/// Twice the longest path delay, rounded up to whole nanoseconds.
///
/// Paths start at inputs and flip-flop outputs and end at outputs and
/// flip-flop inputs. A feedback loop counts once with all its delays.
pub fn settle_time(netlist: &Netlist) -> Result<Time, NetlistError> {
    let flat = netlist.flatten()?;
    let (_, readers) = flat.connectivity();
    let comps = flat.components();
    let mut succ = vec![Vec::new(); comps.len()];
    for (ci, c) in comps.iter().enumerate() {
        if let Some(Some(out)) = c.pins.last() {
            for &(r, _) in &readers[out.index()] {
                if !matches!(comps[r].kind, CellKind::Flop(_)) {
                    succ[ci].push(r);
                }
            }
        }
    }
    let weight: Vec<u64> = comps.iter().map(|c| c.delay.propagation.as_ps()).collect();
    let bound = longest_path_bound(&succ, &weight);
    Ok(Time(2 * bound).ceil_ns().max(Time::ns(1)))
}

fn require_ports(netlist: &Netlist, circuit: &'static str, inputs: &[String], outputs: &[String]) -> Result<(), HarnessError> {
    let have_in = netlist.input_names();
    let have_out = netlist.output_names();
    for p in inputs {
        if !have_in.contains(&p.as_str()) {
            return Err(HarnessError::Interface { circuit, missing: p.clone() });
        }
    }
    for p in outputs {
        if !have_out.contains(&p.as_str()) {
            return Err(HarnessError::Interface { circuit, missing: p.clone() });
        }
    }
    Ok(())
}

fn ports(fixed: &[&str], buses: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    for b in buses {
        out.extend((1..=4).map(|i| format!("{b}{i}")));
    }
    out
}

fn bit(v: bool) -> LogicValue {
    LogicValue::from_bool(v)
}

/// Clock-cycle driver. Each cycle lowers `clk` and applies the inputs at its
/// start, raises `clk` half-way and ends one picosecond before the next
/// cycle.
struct ClockedRun {
    sim: Simulator,
    half: Time,
    cycle: u64,
}

impl ClockedRun {
    fn new(netlist: &Netlist) -> Result<Self, HarnessError> {
        let half = settle_time(netlist)?;
        Ok(ClockedRun { sim: Simulator::new(netlist)?, half, cycle: 0 })
    }

    fn start(&self) -> Time {
        self.half * (2 * self.cycle)
    }

    fn bus(&self, prefix: &str) -> Word4 {
        Word4([1, 2, 3, 4].map(|i| self.value(&format!("{prefix}{i}"))))
    }

    fn value(&self, name: &str) -> LogicValue {
        self.sim.net_id(name).map_or(X, |n| self.sim.value(n))
    }

    /// Returns `(pre-edge sampler result, settled)`.
    fn cycle<T>(
        &mut self,
        inputs: &[(String, LogicValue)],
        before_edge: impl FnOnce(&Self) -> T,
    ) -> Result<(T, bool), HarnessError> {
        let t = self.start();
        self.sim.drive("clk", t, L0)?;
        for (p, v) in inputs {
            self.sim.drive(p, t, *v)?;
        }
        self.sim.drive("clk", t + self.half, L1)?;
        self.sim.run_until(t + self.half - Time::ps(1))?;
        let pre = before_edge(self);
        self.sim.run_until(t + self.half * 2 - Time::ps(1))?;
        self.cycle += 1;
        let settled = self.sim.is_quiescent();
        Ok((pre, settled))
    }
}

fn bus_inputs(out: &mut Vec<(String, LogicValue)>, prefix: &str, w: Word4) {
    for (i, v) in w.bits().into_iter().enumerate() {
        out.push((format!("{prefix}{}", i + 1), v));
    }
}

fn usr_inputs(mode: UsrMode, sr: LogicValue, sl: LogicValue, m: Word4) -> Vec<(String, LogicValue)> {
    let (s1, s0) = mode.select();
    let mut v = vec![("s1".into(), bit(s1)), ("s0".into(), bit(s0)), ("sr_in".into(), sr), ("sl_in".into(), sl)];
    bus_inputs(&mut v, "m", m);
    v
}

const UNSETTLED: &str = "(still switching at end of cycle)";

/// Map a (ctrl, A, B) triple to its case number in [`check_alu_exhaustive`].
pub fn alu_case_index(ctrl: AluControl, a: u8, b: u8) -> usize {
    ctrl.bits() as usize * 256 + a as usize * 16 + b as usize
}

pub fn alu_case(index: usize) -> (AluControl, u8, u8) {
    (AluControl::from_bits((index / 256) as u8), (index / 16 % 16) as u8, (index % 16) as u8)
}

fn alu_vector(ctrl: AluControl, a: u8, b: u8) -> Vec<(String, LogicValue)> {
    let mut v = vec![("s1".into(), bit(ctrl.s1)), ("s0".into(), bit(ctrl.s0)), ("cin".into(), bit(ctrl.cin))];
    bus_inputs(&mut v, "a", Word4::from_u8(a));
    bus_inputs(&mut v, "b", Word4::from_u8(b));
    v
}

fn alu_ports() -> (Vec<String>, Vec<String>) {
    (ports(&["s1", "s0", "cin"], &["a", "b"]), ports(&["cout"], &["d"]))
}

/// All 2048 (control, A, B) vectors, one settle time apart, against
/// [`alu_eval`].
pub fn check_alu_exhaustive(netlist: &Netlist) -> Result<CheckReport, HarnessError> {
    let (ins, outs) = alu_ports();
    require_ports(netlist, "ALU", &ins, &outs)?;
    let settle = settle_time(netlist)?;
    let mut sim = Simulator::new(netlist)?;
    let mut report = CheckReport::new(netlist.name());
    let mut t = Time::ZERO;
    for index in 0..2048 {
        let (ctrl, a, b) = alu_case(index);
        for (p, v) in alu_vector(ctrl, a, b) {
            sim.drive(&p, t, v)?;
        }
        t += settle;
        sim.run_until(t - Time::ps(1))?;
        let (d, cout) = alu_eval(ctrl, Word4::from_u8(a), Word4::from_u8(b));
        let read = |name: &str| sim.net_id(name).map_or(X, |n| sim.value(n));
        let observed_d = Word4([1, 2, 3, 4].map(|i| read(&format!("d{i}"))));
        let mut observed = format!("D={observed_d} cout={}", read("cout"));
        if !sim.is_quiescent() {
            observed.push(' ');
            observed.push_str(UNSETTLED);
        }
        report.cases += 1;
        report.expect(
            index,
            || format!("{ctrl} A={} B={}", Word4::from_u8(a), Word4::from_u8(b)),
            format!("D={d} cout={cout}"),
            observed,
        );
    }
    Ok(report)
}

/// Simulate one ALU vector from power-up.
pub fn replay_alu_case(netlist: &Netlist, index: usize) -> Result<(Word4, LogicValue), HarnessError> {
    let (ctrl, a, b) = alu_case(index);
    let settle = settle_time(netlist)?;
    let mut stim = Stimulus::new();
    for (p, v) in alu_vector(ctrl, a, b) {
        stim.push(Time::ZERO, &p, v);
    }
    let w = crate::sim::simulate(netlist, &stim, settle)?;
    let read = |name: &str| w.net_id(name).map_or(X, |n| w.final_value(n));
    Ok((Word4([1, 2, 3, 4].map(|i| read(&format!("d{i}")))), read("cout")))
}

fn usr_ports() -> (Vec<String>, Vec<String>) {
    (ports(&["clk", "s1", "s0", "sr_in", "sl_in"], &["m"]), ports(&[], &["f"]))
}

/// The system preloads with four shift-right cycles of random serial bits:
/// the ALU result depends on the still unknown register, so a parallel load
/// cannot set it.
const PRELOAD_CYCLES: usize = 4;

/// Seeded random register operations against iterated [`usr_step`], after
/// a parallel load of a random word.
pub fn check_usr_random(netlist: &Netlist, seed: u64, steps: usize) -> Result<CheckReport, HarnessError> {
    if steps == 0 {
        return Err(HarnessError::NoSteps);
    }
    let (ins, outs) = usr_ports();
    require_ports(netlist, "USR", &ins, &outs)?;
    let mut run = ClockedRun::new(netlist)?;
    let mut rng = StimulusRng::new(seed);
    let mut golden = UsrState::new(Word4::splat(X));
    let mut report = CheckReport::new(netlist.name());
    // One parallel load of a random word gives the register a known state.
    let preload = rng.word();
    run.cycle(&usr_inputs(UsrMode::ParallelLoad, L0, L0, preload), |_| ())?;
    golden = usr_step(golden, UsrMode::ParallelLoad, L0, L0, preload);
    for case in 0..steps {
        let mode = rng.mode();
        let (sr, sl, m) = (rng.bit(), rng.bit(), rng.word());
        let before = golden;
        golden = usr_step(golden, mode, sr, sl, m);
        let (_, settled) = run.cycle(&usr_inputs(mode, sr, sl, m), |_| ())?;
        report.cases += 1;
        let observed = observe_word(run.bus("f"), settled);
        report.expect(
            case,
            || format!("{mode} sr_in={sr} sl_in={sl} m={m} from f={}", before.f),
            format!("f={}", golden.f),
            observed,
        );
    }
    Ok(report)
}

fn observe_word(w: Word4, settled: bool) -> String {
    if settled {
        format!("f={w}")
    } else {
        format!("f={w} {UNSETTLED}")
    }
}

/// Every mode from every state with every serial pair and parallel word:
/// a parallel-load cycle sets the state, the next cycle applies the mode.
pub fn check_usr_exhaustive(netlist: &Netlist) -> Result<CheckReport, HarnessError> {
    let (ins, outs) = usr_ports();
    require_ports(netlist, "USR", &ins, &outs)?;
    let mut run = ClockedRun::new(netlist)?;
    let mut report = CheckReport::new(netlist.name());
    let mut case = 0;
    for mode in UsrMode::ALL {
        for state in 0..16u8 {
            for serial in 0..4u8 {
                for m in 0..16u8 {
                    let (sr, sl) = (bit(serial & 2 != 0), bit(serial & 1 != 0));
                    let from = Word4::from_u8(state);
                    let m = Word4::from_u8(m);
                    run.cycle(&usr_inputs(UsrMode::ParallelLoad, L0, L0, from), |_| ())?;
                    let (_, settled) = run.cycle(&usr_inputs(mode, sr, sl, m), |_| ())?;
                    let expected = usr_step(UsrState::new(from), mode, sr, sl, m);
                    report.cases += 1;
                    report.expect(
                        case,
                        || format!("{mode} sr_in={sr} sl_in={sl} m={m} from f={from}"),
                        format!("f={}", expected.f),
                        observe_word(run.bus("f"), settled),
                    );
                    case += 1;
                }
            }
        }
    }
    Ok(report)
}

fn system_ports() -> (Vec<String>, Vec<String>) {
    (
        ports(&["clk", "usr_s1", "usr_s0", "alu_s1", "alu_s0", "cin", "sr_in", "sl_in"], &["b"]),
        ports(&["cout"], &["f"]),
    )
}

fn system_inputs(
    ctrl: AluControl,
    mode: UsrMode,
    sr: LogicValue,
    sl: LogicValue,
    b: Word4,
) -> Vec<(String, LogicValue)> {
    let (s1, s0) = mode.select();
    let mut v = vec![
        ("usr_s1".into(), bit(s1)),
        ("usr_s0".into(), bit(s0)),
        ("alu_s1".into(), bit(ctrl.s1)),
        ("alu_s0".into(), bit(ctrl.s0)),
        ("cin".into(), bit(ctrl.cin)),
        ("sr_in".into(), sr),
        ("sl_in".into(), sl),
    ];
    bus_inputs(&mut v, "b", b);
    v
}

/// Seeded random ALU operations and register modes against iterated
/// [`system_cycle`]. Carry-out is sampled just before each clock edge.
pub fn check_system_random(netlist: &Netlist, seed: u64, steps: usize) -> Result<CheckReport, HarnessError> {
    if steps == 0 {
        return Err(HarnessError::NoSteps);
    }
    let (ins, outs) = system_ports();
    require_ports(netlist, "ALU+USR system", &ins, &outs)?;
    let mut run = ClockedRun::new(netlist)?;
    let mut rng = StimulusRng::new(seed);
    let mut golden = SystemState { register: UsrState::new(Word4::splat(X)), operand_b: Word4::splat(X), last_cout: X };
    let mut report = CheckReport::new(netlist.name());
    for step in 0..PRELOAD_CYCLES + steps {
        let mode = if step < PRELOAD_CYCLES { UsrMode::ShiftRight } else { rng.mode() };
        let ctrl = rng.alu_control();
        let (sr, sl, b) = (rng.bit(), rng.bit(), rng.word());
        let before = golden.register;
        golden.operand_b = b;
        golden = system_cycle(golden, ctrl, mode, sr, sl);
        let (cout, settled) = run.cycle(&system_inputs(ctrl, mode, sr, sl, b), |r| r.value("cout"))?;
        if step < PRELOAD_CYCLES {
            continue;
        }
        let case = step - PRELOAD_CYCLES;
        report.cases += 1;
        report.expect(
            case,
            || format!("{ctrl} {mode} sr_in={sr} sl_in={sl} B={b} from f={}", before.f),
            format!("f={} cout={}", golden.register.f, golden.last_cout),
            format!("{} cout={cout}", observe_word(run.bus("f"), settled)),
        );
    }
    Ok(report)
}

/// Clock activity in one flip-flop scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClockScenario {
    Rising,
    Falling,
    HeldLow,
    HeldHigh,
}

impl ClockScenario {
    pub const ALL: [ClockScenario; 4] =
        [ClockScenario::Rising, ClockScenario::Falling, ClockScenario::HeldLow, ClockScenario::HeldHigh];

    fn starts_high(self) -> bool {
        matches!(self, ClockScenario::Falling | ClockScenario::HeldHigh)
    }
}

/// Q after each of the 16 (d, previous Q, clock activity) scenarios against
/// [`ff_step`]. When Q should hold it must not move at all.
pub fn check_flop_table(
    variant: FlipFlopVariant,
    cfg: &CellDelayConfig,
    model: FfModel,
) -> Result<CheckReport, HarnessError> {
    let ff = build_ff(variant, cfg, model);
    let two_phase = ff.input_names().contains(&"clkb");
    let mut report = CheckReport::new(format!("{} ({model:?})", ff.name()));
    let mut case = 0;
    for d in [L0, L1] {
        for q_prev in [L0, L1] {
            for scenario in ClockScenario::ALL {
                let ns = Time::ns;
                let mut stim = Stimulus::new();
                let mut clock = |t: Time, v: LogicValue| {
                    stim.push(t, "clk", v);
                    if two_phase {
                        stim.push(t, "clkb", v.not());
                    }
                };
                clock(Time::ZERO, L0);
                clock(ns(20), L1);
                let event = ns(100);
                if !scenario.starts_high() {
                    clock(ns(50), L0);
                }
                match scenario {
                    ClockScenario::Rising => clock(event, L1),
                    ClockScenario::Falling => clock(event, L0),
                    _ => {}
                }
                stim.push(Time::ZERO, "d", q_prev);
                stim.push(ns(75), "d", d);
                let end = event + ns(60);
                let w = crate::sim::simulate(&ff, &stim, end)?;
                let q = w.net_id("q").expect("q port");
                let clock_event = if scenario == ClockScenario::Rising { ClockEvent::Rising } else { ClockEvent::None };
                let expected = ff_step(variant, clock_event, d, q_prev);
                let held_before = w.value_at(q, event - Time::ps(1));
                let moved = w.changes(q).iter().any(|&(t, _)| t >= ns(75));
                let mut observed = format!("{held_before}->{}", w.value_at(q, end));
                if expected == q_prev && moved {
                    observed.push_str(" (glitched)");
                }
                report.cases += 1;
                report.expect(
                    case,
                    || format!("d={d} q_prev={q_prev} clock={scenario:?}"),
                    format!("{q_prev}->{expected}"),
                    observed,
                );
                case += 1;
            }
        }
    }
    Ok(report)
}

/// Clock-to-Q delays listed for the shift register's parallel load.
pub const REFERENCE_DELAYS_NS: [(FlipFlopVariant, u64); 4] = [
    (FlipFlopVariant::Dff, 9),
    (FlipFlopVariant::Dtgms, 14),
    (FlipFlopVariant::Mtspc, 22),
    (FlipFlopVariant::Tgms, 9),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayEntry {
    pub variant: FlipFlopVariant,
    /// Clock edge to the last output change, or why there was none.
    pub measured: Result<Time, String>,
    pub reference_ns: u64,
}

impl DelayEntry {
    /// Measured delay at 1 ns resolution.
    pub fn ns(&self) -> Option<u64> {
        self.measured.as_ref().ok().map(|t| t.ceil_ns().as_ps() / 1000)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayReport {
    pub entries: Vec<DelayEntry>,
}

impl DelayReport {
    pub fn get(&self, variant: FlipFlopVariant) -> Option<&DelayEntry> {
        self.entries.iter().find(|e| e.variant == variant)
    }

    /// Variants sharing the smallest measured delay.
    pub fn min_set(&self) -> Vec<FlipFlopVariant> {
        let best = self.entries.iter().filter_map(|e| e.ns()).min();
        self.entries.iter().filter(|e| e.ns().is_some() && e.ns() == best).map(|e| e.variant).collect()
    }

    pub fn matches_reference(&self) -> bool {
        self.entries.iter().all(|e| e.ns() == Some(e.reference_ns))
    }
}

/// Parallel-load delay of a shift register netlist: load 0101, then load
/// 1010 and take the slowest output from that clock edge.
pub fn measure_usr_delay(usr: &Netlist) -> Result<Time, HarnessError> {
    let mut run = ClockedRun::new(usr)?;
    run.cycle(&usr_inputs(UsrMode::ParallelLoad, L0, L0, Word4::from_u8(0b0101)), |_| ())?;
    let edge = run.start() + run.half;
    run.cycle(&usr_inputs(UsrMode::ParallelLoad, L0, L0, Word4::from_u8(0b1010)), |_| ())?;
    let w: &Waveform = run.sim.waveform();
    let clk = w.net_id("clk").expect("clk port");
    let mut worst = Time::ZERO;
    for i in 1..=4 {
        let name = format!("f{i}");
        let f = w.net_id(&name).expect("f port");
        match measure_delay(w, clk, edge, f) {
            Ok(DelayMeasurement::Settled(t)) => worst = worst.max(t),
            _ => return Err(HarnessError::Interface { circuit: "responding USR", missing: name }),
        }
    }
    Ok(worst)
}

fn delay_entry(variant: FlipFlopVariant, usr: Result<Netlist, HarnessError>) -> DelayEntry {
    let reference_ns = REFERENCE_DELAYS_NS.iter().find(|(v, _)| *v == variant).map_or(0, |r| r.1);
    let measured = usr.and_then(|n| measure_usr_delay(&n)).map_err(|e| match e {
        HarnessError::Sim(SimError::Oscillation { .. }) => format!("oscillatory: {e}"),
        other => other.to_string(),
    });
    DelayEntry { variant, measured, reference_ns }
}

/// Parallel-load delay of the shift register built from each variant's
/// behavioral flip-flop.
pub fn delay_report(cfg: &CellDelayConfig) -> DelayReport {
    delay_report_with(cfg, FfModel::Behavioral)
}

/// As [`delay_report`] for switch-level flip-flops. `Calibrated` trims
/// each variant's output buffer to reach its configured clock-to-Q delay;
/// the time carried by the variant is ignored.
pub fn delay_report_with(cfg: &CellDelayConfig, model: FfModel) -> DelayReport {
    let entries = FlipFlopVariant::ALL
        .into_iter()
        .map(|v| {
            let usr = match model {
                FfModel::Calibrated(_) => calibrate_q_buffer(v, cfg).map(|t| build_usr_with(v, cfg, FfModel::Calibrated(t))),
                m => Ok(build_usr_with(v, cfg, m)),
            };
            delay_entry(v, usr)
        })
        .collect();
    DelayReport { entries }
}

/// Output-buffer delay that makes the switch-level flip-flop's parallel-load
/// delay equal its configured clock-to-Q delay.
pub fn calibrate_q_buffer(variant: FlipFlopVariant, cfg: &CellDelayConfig) -> Result<Time, HarnessError> {
    let intrinsic = measure_usr_delay(&build_usr_with(variant, cfg, FfModel::Structural))?;
    let core = intrinsic - cfg.gate(PrimitiveKind::Buf);
    let target = cfg.clk_to_q(variant);
    if core >= target {
        return Err(HarnessError::Calibration { variant, intrinsic, target });
    }
    Ok(target - core)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    Identical,
    At { time: Time, expected: LogicValue, observed: LogicValue },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetDiff {
    pub net: String,
    pub divergence: Divergence,
}

/// First time each named net differs between `expected` and `observed`.
pub fn diff_waveforms(expected: &Waveform, observed: &Waveform, nets: &[&str]) -> Result<Vec<NetDiff>, NetlistError> {
    let mut out = Vec::new();
    for &name in nets {
        let a = expected.net_id(name).ok_or_else(|| NetlistError::UnknownNet(name.into()))?;
        let b = observed.net_id(name).ok_or_else(|| NetlistError::UnknownNet(name.into()))?;
        let mut times: Vec<Time> = core::iter::once(Time::ZERO)
            .chain(expected.changes(a).iter().map(|c| c.0))
            .chain(observed.changes(b).iter().map(|c| c.0))
            .collect();
        times.sort_unstable();
        times.dedup();
        let divergence = times
            .into_iter()
            .find_map(|t| {
                let (e, o) = (expected.value_at(a, t), observed.value_at(b, t));
                (e != o).then_some(Divergence::At { time: t, expected: e, observed: o })
            })
            .unwrap_or(Divergence::Identical);
        out.push(NetDiff { net: name.into(), divergence });
    }
    Ok(out)
}

/// Replace the carry into full adder `fa{bit}` of a built ALU by a constant 0.
pub fn cut_carry(alu: &Netlist, bit: usize) -> Result<Netlist, NetlistError> {
    let mut n = alu.clone();
    let stuck = n.add_net("carry_cut")?;
    n.add_gate("carry_cut_tie", PrimitiveKind::Const0, &[], stuck, Time::ns(1))?;
    n.rebind(&format!("fa{bit}"), "cin", stuck)?;
    Ok(n)
}

/// Swap the two select wires on every multiplexer `mux1..mux4` of a built
/// shift register.
pub fn swap_mux_selects(usr: &Netlist) -> Result<Netlist, NetlistError> {
    let mut n = usr.clone();
    for i in 1..=4 {
        let name = format!("mux{i}");
        let idx = n.find_component(&name).ok_or_else(|| NetlistError::UnknownComponent(name.clone()))?;
        let (ports, _) = n.port_names(&n.components()[idx].kind).ok_or_else(|| NetlistError::UnknownComponent(name.clone()))?;
        let pin = |p: &str| -> Result<NetId, NetlistError> {
            let pos = ports.iter().position(|q| q == p).ok_or_else(|| NetlistError::UnknownPort {
                component: name.clone(),
                port: p.into(),
            })?;
            n.components()[idx].pins[pos].ok_or_else(|| NetlistError::UnboundPort { component: name.clone(), port: p.into() })
        };
        let (s1, s0) = (pin("s1")?, pin("s0")?);
        n.rebind(&name, "s1", s0)?;
        n.rebind(&name, "s0", s1)?;
    }
    Ok(n)
}
