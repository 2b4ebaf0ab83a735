//! Cell catalog: 4:1 multiplexer, full adder and four flip-flop variants,
//! each as a behavioral step function and as a gate/switch-level netlist.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::logic::LogicValue;
use crate::netlist::{NetId, Netlist, PrimitiveKind};
use crate::sim::{simulate, SimError, Stimulus};
use crate::time::Time;

use LogicValue::{L0, L1, X};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlipFlopVariant {
    /// Static transmission-gate master-slave D flip-flop.
    Dff,
    /// Dynamic TGMS: no feedback, two-phase external clock.
    Dtgms,
    /// Modified true-single-phase-clock flip-flop.
    Mtspc,
    /// Static TGMS with clocked-inverter feedback.
    Tgms,
}

impl FlipFlopVariant {
    pub const ALL: [FlipFlopVariant; 4] =
        [FlipFlopVariant::Dff, FlipFlopVariant::Dtgms, FlipFlopVariant::Mtspc, FlipFlopVariant::Tgms];

    pub const fn name(self) -> &'static str {
        match self {
            FlipFlopVariant::Dff => "dff",
            FlipFlopVariant::Dtgms => "dtgms",
            FlipFlopVariant::Mtspc => "mtspc",
            FlipFlopVariant::Tgms => "tgms",
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            FlipFlopVariant::Dff => "D flip flop",
            FlipFlopVariant::Dtgms => "Dynamic TGMS",
            FlipFlopVariant::Mtspc => "MTSPC double triggered",
            FlipFlopVariant::Tgms => "TGMS",
        }
    }

    const fn index(self) -> usize {
        self as usize
    }

    /// The structural model takes an explicit inverted clock input.
    pub const fn two_phase(self) -> bool {
        matches!(self, FlipFlopVariant::Dtgms)
    }
}

impl fmt::Display for FlipFlopVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownVariant(pub String);

impl fmt::Display for UnknownVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown flip-flop variant `{}` (expected dff, dtgms, mtspc or tgms)", self.0)
    }
}

impl core::error::Error for UnknownVariant {}

impl FromStr for FlipFlopVariant {
    type Err = UnknownVariant;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownVariant(s.into()))
    }
}

/// Clock-to-Q delay per flip-flop variant plus per-primitive gate delays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDelayConfig {
    clk_to_q: [Time; 4],
    gates: BTreeMap<PrimitiveKind, Time>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::error::Error for ConfigError {}

impl Default for CellDelayConfig {
    /// Clock-to-Q: DFF 9 ns, dynamic TGMS 14 ns, MTSPC 22 ns, TGMS 9 ns.
    /// Every gate 1 ns.
    fn default() -> Self {
        CellDelayConfig {
            clk_to_q: [Time::ns(9), Time::ns(14), Time::ns(22), Time::ns(9)],
            gates: PrimitiveKind::ALL.into_iter().map(|k| (k, Time::ns(1))).collect(),
        }
    }
}

impl CellDelayConfig {
    pub fn clk_to_q(&self, variant: FlipFlopVariant) -> Time {
        self.clk_to_q[variant.index()]
    }

    pub fn set_clk_to_q(&mut self, variant: FlipFlopVariant, delay: Time) {
        self.clk_to_q[variant.index()] = delay;
    }

    pub fn gate(&self, kind: PrimitiveKind) -> Time {
        self.gates.get(&kind).copied().unwrap_or(Time::ns(1))
    }

    pub fn set_gate(&mut self, kind: PrimitiveKind, delay: Time) {
        self.gates.insert(kind, delay);
    }

    pub fn gates(&self) -> &BTreeMap<PrimitiveKind, Time> {
        &self.gates
    }

    /// Every delay must be strictly positive.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for v in FlipFlopVariant::ALL {
            if self.clk_to_q(v) == Time::ZERO {
                return Err(ConfigError(format!("clock-to-Q delay of {v} must be positive")));
            }
        }
        for (k, t) in &self.gates {
            if *t == Time::ZERO {
                return Err(ConfigError(format!("{k} delay must be positive")));
            }
        }
        Ok(())
    }
}

/// Which flip-flop model a register builder instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FfModel {
    /// One behavioral cell with the configured clock-to-Q delay.
    #[default]
    Behavioral,
    /// Switch-level netlist with the configured gate delays.
    Structural,
    /// Switch-level netlist whose output buffer has the given delay.
    Calibrated(Time),
}

/// 4:1 multiplexer: `(s1, s0)` = 00 selects `path_d`, 01 `path_c`, 10 `path_b`,
/// 11 `path_a`. An unknown select gives `X` unless all four data inputs are the
/// same strong value.
pub fn mux4(
    s1: LogicValue,
    s0: LogicValue,
    path_d: LogicValue,
    path_c: LogicValue,
    path_b: LogicValue,
    path_a: LogicValue,
) -> LogicValue {
    match (s1.to_bool(), s0.to_bool()) {
        (Some(false), Some(false)) => path_d,
        (Some(false), Some(true)) => path_c,
        (Some(true), Some(false)) => path_b,
        (Some(true), Some(true)) => path_a,
        _ => {
            let data = [path_d, path_c, path_b, path_a];
            if path_d.is_strong() && data.iter().all(|&v| v == path_d) {
                path_d
            } else {
                X
            }
        }
    }
}

/// `(sum, carry)` of `a + b + cin`; unknowns propagate only where they can
/// change the result.
pub fn full_adder(a: LogicValue, b: LogicValue, cin: LogicValue) -> (LogicValue, LogicValue) {
    let sum = a.xor(b).xor(cin);
    let carry = a.and(b).or(a.and(cin)).or(b.and(cin));
    (sum, carry)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClockEvent {
    Rising,
    /// No active edge: the stored value is kept.
    None,
}

/// Next stored value of a flip-flop. On a rising edge a strong `d` is
/// captured and an unknown or floating `d` stores `X`.
pub fn ff_step(_variant: FlipFlopVariant, clock: ClockEvent, d: LogicValue, q_prev: LogicValue) -> LogicValue {
    match clock {
        ClockEvent::None => q_prev,
        ClockEvent::Rising if d.is_strong() => d,
        ClockEvent::Rising => X,
    }
}

fn gate(n: &mut Netlist, cfg: &CellDelayConfig, name: &str, kind: PrimitiveKind, ins: &[NetId], out: NetId) {
    n.add_gate(name, kind, ins, out, cfg.gate(kind)).expect("cell builder wiring");
}

/// Gate-level 4:1 multiplexer: ports `s1 s0 d c b a -> y`.
pub fn build_mux4(cfg: &CellDelayConfig) -> Netlist {
    use PrimitiveKind::*;
    let mut n = Netlist::new("mux4");
    let [s1, s0, d, c, b, a] = ["s1", "s0", "d", "c", "b", "a"].map(|p| n.add_input(p));
    let y = n.add_output("y");
    let [ns1, ns0, t0, t1, t2, t3, lo, hi, u0, u1] =
        ["ns1", "ns0", "t0", "t1", "t2", "t3", "lo", "hi", "u0", "u1"].map(|p| n.net_or_insert(p));
    gate(&mut n, cfg, "inv_s1", Not, &[s1], ns1);
    gate(&mut n, cfg, "inv_s0", Not, &[s0], ns0);
    gate(&mut n, cfg, "and_d", And2, &[d, ns0], t0);
    gate(&mut n, cfg, "and_c", And2, &[c, s0], t1);
    gate(&mut n, cfg, "and_b", And2, &[b, ns0], t2);
    gate(&mut n, cfg, "and_a", And2, &[a, s0], t3);
    gate(&mut n, cfg, "or_lo", Or2, &[t0, t1], lo);
    gate(&mut n, cfg, "or_hi", Or2, &[t2, t3], hi);
    gate(&mut n, cfg, "and_lo", And2, &[lo, ns1], u0);
    gate(&mut n, cfg, "and_hi", And2, &[hi, s1], u1);
    gate(&mut n, cfg, "or_y", Or2, &[u0, u1], y);
    n
}

/// Gate-level full adder: ports `a b cin -> sum cout`.
pub fn build_full_adder(cfg: &CellDelayConfig) -> Netlist {
    use PrimitiveKind::*;
    let mut n = Netlist::new("fulladder");
    let [a, b, cin] = ["a", "b", "cin"].map(|p| n.add_input(p));
    let sum = n.add_output("sum");
    let cout = n.add_output("cout");
    let [x1, g, p] = ["x1", "g", "p"].map(|p| n.net_or_insert(p));
    gate(&mut n, cfg, "xor_ab", Xor2, &[a, b], x1);
    gate(&mut n, cfg, "xor_sum", Xor2, &[x1, cin], sum);
    gate(&mut n, cfg, "and_g", And2, &[a, b], g);
    gate(&mut n, cfg, "and_p", And2, &[x1, cin], p);
    gate(&mut n, cfg, "or_cout", Or2, &[g, p], cout);
    n
}

/// Behavioral flip-flop wrapped as a cell: ports `d clk -> q`.
pub fn build_ff_behavioral(variant: FlipFlopVariant, cfg: &CellDelayConfig) -> Netlist {
    let mut n = Netlist::new(format!("ffb_{variant}"));
    let d = n.add_input("d");
    let clk = n.add_input("clk");
    let q = n.add_output("q");
    n.add_flop("ff", variant, d, clk, q, cfg.clk_to_q(variant)).expect("flop wiring");
    n
}

/// Names of the storage node inside the master latch of each structural model.
pub const fn master_node(variant: FlipFlopVariant) -> &'static str {
    match variant {
        FlipFlopVariant::Mtspc => "b",
        _ => "m",
    }
}

/// Switch-level flip-flop netlist.
///
/// Ports are `d clk -> q`, plus `clkb` for the dynamic TGMS, which relies on
/// an externally supplied complementary clock. The other master-slave
/// variants derive `clkb` locally with one inverter.
///
/// * DFF: transmission-gate master and slave latches, each closed by a
///   two-inverter loop through a feedback transmission gate.
/// * TGMS: the same latches closed by a clocked inverter, one device fewer in
///   each loop.
/// * DTGMS: transmission-gate latches with no feedback; state lives on the
///   storage nodes.
/// * MTSPC: three clocked stages on a single clock; the precharge of the
///   middle node is blocked while its pull-down input is high.
pub fn build_ff_structural(variant: FlipFlopVariant, cfg: &CellDelayConfig) -> Netlist {
    build_ff_structural_with(variant, cfg, cfg.gate(PrimitiveKind::Buf))
}

/// As [`build_ff_structural`], with an explicit output-buffer delay.
pub fn build_ff_structural_with(variant: FlipFlopVariant, cfg: &CellDelayConfig, q_buffer: Time) -> Netlist {
    use PrimitiveKind::*;
    let mut n = Netlist::new(format!("ff_{variant}"));
    let d = n.add_input("d");
    let clk = n.add_input("clk");
    let clkb = variant.two_phase().then(|| n.add_input("clkb"));
    let q = n.add_output("q");
    let qi = n.net_or_insert("qi");

    match variant {
        FlipFlopVariant::Dff | FlipFlopVariant::Tgms | FlipFlopVariant::Dtgms => {
            let clkb = clkb.unwrap_or_else(|| {
                let local = n.net_or_insert("clkb");
                gate(&mut n, cfg, "clk_inv", Not, &[clk], local);
                local
            });
            let dn = n.net_or_insert("dn");
            let m = n.net_or_insert("m");
            let mb = n.net_or_insert("mb");
            let s = n.net_or_insert("s");
            n.set_storage(m);
            n.set_storage(s);
            gate(&mut n, cfg, "d_buf", Buf, &[d], dn);
            gate(&mut n, cfg, "t_master", Tgate, &[dn, clkb, clk], m);
            gate(&mut n, cfg, "inv_master", Not, &[m], mb);
            gate(&mut n, cfg, "t_slave", Tgate, &[mb, clk, clkb], s);
            gate(&mut n, cfg, "inv_slave", Not, &[s], qi);
            match variant {
                FlipFlopVariant::Dff => {
                    let mf = n.net_or_insert("mf");
                    let sf = n.net_or_insert("sf");
                    gate(&mut n, cfg, "inv_master_fb", Not, &[mb], mf);
                    gate(&mut n, cfg, "t_master_fb", Tgate, &[mf, clk, clkb], m);
                    gate(&mut n, cfg, "inv_slave_fb", Not, &[qi], sf);
                    gate(&mut n, cfg, "t_slave_fb", Tgate, &[sf, clkb, clk], s);
                }
                FlipFlopVariant::Tgms => {
                    gate(&mut n, cfg, "keep_master", Cinv, &[mb, clk, clkb], m);
                    gate(&mut n, cfg, "keep_slave", Cinv, &[qi, clkb, clk], s);
                }
                _ => {}
            }
        }
        FlipFlopVariant::Mtspc => {
            let one = n.net_or_insert("one");
            let zero = n.net_or_insert("zero");
            let a = n.net_or_insert("a");
            let b = n.net_or_insert("b");
            let qb = n.net_or_insert("qb");
            for s in [a, b, qb] {
                n.set_storage(s);
            }
            gate(&mut n, cfg, "tie1", Const1, &[], one);
            gate(&mut n, cfg, "tie0", Const0, &[], zero);
            // Stage 1: pulls up only while clk is low, pulls down on d.
            gate(&mut n, cfg, "stage1", Cinv, &[d, one, clk], a);
            // Stage 2: evaluates on clk high; precharge gated by a low.
            gate(&mut n, cfg, "stage2", Cinv, &[a, clk, clk], b);
            // Stage 3: pulls down on clk high, pulls up whenever b is low.
            gate(&mut n, cfg, "stage3", Cinv, &[b, clk, zero], qb);
            gate(&mut n, cfg, "out_inv", Not, &[qb], qi);
        }
    }
    n.add_gate("q_buf", Buf, &[qi], q, q_buffer).expect("flop wiring");
    n
}

/// Flip-flop cell for a register builder.
pub fn build_ff(variant: FlipFlopVariant, cfg: &CellDelayConfig, model: FfModel) -> Netlist {
    match model {
        FfModel::Behavioral => build_ff_behavioral(variant, cfg),
        FfModel::Structural => build_ff_structural(variant, cfg),
        FfModel::Calibrated(q_buffer) => build_ff_structural_with(variant, cfg, q_buffer),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StressOutcome {
    Holds,
    Corrupts,
}

/// Timeline of the clock-overlap experiment (all times in ns).
const STRESS_EDGE: u64 = 20;
const STRESS_DATA_FLIP: u64 = 25;
const STRESS_OVERLAP_START: u64 = 30;
const STRESS_SETTLE: u64 = 10;

/// Drive both clock phases high for `overlap` in the middle of the high
/// phase and see whether Q still matches [`ff_step`].
///
/// The flip-flop captures `d0` on a rising edge; D then switches to `!d0`
/// (well clear of hold time) and, for variants that take an external `clkb`,
/// `clkb` is raised while `clk` is still high. Q must stay `d0` until the
/// next rising edge and then become `!d0`. Variants that generate their
/// complementary clock internally see an ordinary cycle.
pub fn overlap_stress(
    variant: FlipFlopVariant,
    overlap: Time,
    cfg: &CellDelayConfig,
) -> Result<StressOutcome, SimError> {
    let ff = build_ff_structural(variant, cfg);
    let edge = Time::ns(STRESS_EDGE);
    let overlap_start = Time::ns(STRESS_OVERLAP_START);
    let fall = (overlap_start + overlap + Time::ns(STRESS_SETTLE)).ceil_ns();
    let next_edge = fall + Time::ns(STRESS_EDGE);
    let until = next_edge + Time::ns(2 * STRESS_SETTLE);

    for d0 in [L0, L1] {
        let d1 = d0.not();
        let mut stim = Stimulus::new();
        stim.push(Time::ZERO, "clk", L0);
        stim.push(Time::ZERO, "d", d0);
        stim.push(edge, "clk", L1);
        stim.push(Time::ns(STRESS_DATA_FLIP), "d", d1);
        stim.push(fall, "clk", L0);
        stim.push(next_edge, "clk", L1);
        if variant.two_phase() {
            stim.push(Time::ZERO, "clkb", L1);
            stim.push(edge, "clkb", L0);
            if overlap > Time::ZERO {
                stim.push(overlap_start, "clkb", L1);
                stim.push(overlap_start + overlap, "clkb", L0);
            }
            stim.push(fall, "clkb", L1);
            stim.push(next_edge, "clkb", L0);
        }
        let wave = simulate(&ff, &stim, until)?;
        let q = wave.net_id("q").expect("q port");
        let hold_from = edge + Time::ns(STRESS_SETTLE);
        let held = wave.value_at(q, hold_from) == ff_step(variant, ClockEvent::Rising, d0, X)
            && wave.changes(q).iter().all(|&(t, _)| t <= hold_from || t > next_edge);
        let captured = wave.value_at(q, until) == ff_step(variant, ClockEvent::Rising, d1, d0);
        if !(held && captured) {
            return Ok(StressOutcome::Corrupts);
        }
    }
    Ok(StressOutcome::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::LogicValue::Z;
    use alloc::vec::Vec;

    const STRONG: [LogicValue; 2] = [L0, L1];

    #[test]
    fn mux4_examples() {
        assert_eq!(mux4(L0, L0, L1, L0, L0, L0), L1);
        assert_eq!(mux4(L1, L1, L1, L1, L1, L0), L0);
        assert_eq!(mux4(X, L0, L1, L1, L1, L1), L1);
        assert_eq!(mux4(X, L0, L1, L1, L1, L0), X);
        assert_eq!(mux4(Z, L1, X, X, X, X), X);
    }

    #[test]
    fn mux4_selects_table_path() {
        for bits in 0..64u32 {
            let v = |i: u32| LogicValue::from_bool(bits >> i & 1 == 1);
            let (s1, s0, d, c, b, a) = (v(5), v(4), v(3), v(2), v(1), v(0));
            let expected = match (bits >> 5 & 1, bits >> 4 & 1) {
                (0, 0) => d,
                (0, 1) => c,
                (1, 0) => b,
                _ => a,
            };
            assert_eq!(mux4(s1, s0, d, c, b, a), expected);
        }
    }

    #[test]
    fn full_adder_examples() {
        assert_eq!(full_adder(L1, L1, L1), (L1, L1));
        assert_eq!(full_adder(L0, L0, L0), (L0, L0));
        assert_eq!(full_adder(L1, L1, X), (X, L1));
        assert_eq!(full_adder(L0, L0, Z), (X, L0));
    }

    #[test]
    fn full_adder_matches_integer_addition() {
        for a in STRONG {
            for b in STRONG {
                for c in STRONG {
                    let total = [a, b, c].iter().filter(|&&v| v == L1).count();
                    let (s, co) = full_adder(a, b, c);
                    assert_eq!(s, LogicValue::from_bool(total & 1 == 1));
                    assert_eq!(co, LogicValue::from_bool(total >= 2));
                }
            }
        }
    }

    /// Every assignment obtained by replacing inputs of `base` with X.
    fn x_weakenings(base: &[LogicValue]) -> Vec<Vec<LogicValue>> {
        (0..(1u32 << base.len()))
            .map(|mask| base.iter().enumerate().map(|(i, &v)| if mask >> i & 1 == 1 { X } else { v }).collect())
            .collect()
    }

    #[test]
    fn x_never_flips_a_determined_output() {
        for bits in 0..64u32 {
            let base: Vec<LogicValue> = (0..6).map(|i| LogicValue::from_bool(bits >> i & 1 == 1)).collect();
            let strong = mux4(base[0], base[1], base[2], base[3], base[4], base[5]);
            for w in x_weakenings(&base) {
                let y = mux4(w[0], w[1], w[2], w[3], w[4], w[5]);
                assert!(y == strong || y == X, "{base:?} -> {w:?}");
            }
        }
        for bits in 0..8u32 {
            let base: Vec<LogicValue> = (0..3).map(|i| LogicValue::from_bool(bits >> i & 1 == 1)).collect();
            let (s, c) = full_adder(base[0], base[1], base[2]);
            for w in x_weakenings(&base) {
                let (s2, c2) = full_adder(w[0], w[1], w[2]);
                assert!(s2 == s || s2 == X);
                assert!(c2 == c || c2 == X);
            }
        }
        for kind in PrimitiveKind::ALL {
            let n = kind.input_ports().len();
            for bits in 0..(1u32 << n) {
                let base: Vec<LogicValue> = (0..n).map(|i| LogicValue::from_bool(bits >> i & 1 == 1)).collect();
                let strong = crate::eval_primitive(kind, &base).unwrap();
                for w in x_weakenings(&base) {
                    let y = crate::eval_primitive(kind, &w).unwrap();
                    assert!(y == strong || y == X, "{kind} {base:?} -> {w:?}: {strong} vs {y}");
                }
            }
        }
    }

    #[test]
    fn ff_step_table() {
        assert_eq!(ff_step(FlipFlopVariant::Dff, ClockEvent::Rising, L1, L0), L1);
        assert_eq!(ff_step(FlipFlopVariant::Tgms, ClockEvent::Rising, L0, L1), L0);
        assert_eq!(ff_step(FlipFlopVariant::Dtgms, ClockEvent::Rising, Z, L1), X);
        for v in FlipFlopVariant::ALL {
            for d in LogicValue::ALL {
                assert_eq!(ff_step(v, ClockEvent::None, d, L1), L1);
            }
        }
    }

    #[test]
    fn default_config_holds_reference_delays() {
        let cfg = CellDelayConfig::default();
        assert_eq!(cfg.clk_to_q(FlipFlopVariant::Dff), Time::ns(9));
        assert_eq!(cfg.clk_to_q(FlipFlopVariant::Dtgms), Time::ns(14));
        assert_eq!(cfg.clk_to_q(FlipFlopVariant::Mtspc), Time::ns(22));
        assert_eq!(cfg.clk_to_q(FlipFlopVariant::Tgms), Time::ns(9));
        assert!(cfg.validate().is_ok());
        let mut bad = cfg.clone();
        bad.set_gate(PrimitiveKind::Not, Time::ZERO);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn variant_names_parse() {
        for v in FlipFlopVariant::ALL {
            assert_eq!(v.name().parse::<FlipFlopVariant>().unwrap(), v);
        }
        assert!("jk".parse::<FlipFlopVariant>().is_err());
    }

    #[test]
    fn structural_cells_validate() {
        let cfg = CellDelayConfig::default();
        for v in FlipFlopVariant::ALL {
            let ff = build_ff_structural(v, &cfg);
            assert_eq!(ff.validate(), Ok(()), "{v}");
            assert_eq!(ff.input_names().contains(&"clkb"), v.two_phase());
        }
        assert_eq!(build_mux4(&cfg).validate(), Ok(()));
        assert_eq!(build_full_adder(&cfg).validate(), Ok(()));
    }

    #[test]
    fn tgms_loops_have_two_inversions() {
        let ff = build_ff_structural(FlipFlopVariant::Tgms, &CellDelayConfig::default());
        let m = ff.find_net(master_node(FlipFlopVariant::Tgms)).unwrap();
        let loops = ff.feedback_loops(m);
        assert!(!loops.is_empty());
        for l in loops {
            let inversions = l
                .iter()
                .filter(|&&c| match ff.components()[c].kind {
                    crate::CellKind::Primitive(p) => p.is_inverting(),
                    _ => false,
                })
                .count();
            assert_eq!(inversions, 2);
        }
    }

    #[test]
    fn dtgms_has_no_feedback() {
        let ff = build_ff_structural(FlipFlopVariant::Dtgms, &CellDelayConfig::default());
        let m = ff.find_net(master_node(FlipFlopVariant::Dtgms)).unwrap();
        let q = ff.find_net("q").unwrap();
        assert!(ff.feedback_loops(m).is_empty());
        assert!(!ff.reaches(q, m));
    }

    #[test]
    fn overlap_outcomes() {
        let cfg = CellDelayConfig::default();
        let long = Time::ns(2);
        assert_eq!(overlap_stress(FlipFlopVariant::Dtgms, long, &cfg), Ok(StressOutcome::Corrupts));
        assert_eq!(overlap_stress(FlipFlopVariant::Tgms, long, &cfg), Ok(StressOutcome::Holds));
        assert_eq!(overlap_stress(FlipFlopVariant::Dff, long, &cfg), Ok(StressOutcome::Holds));
        for v in FlipFlopVariant::ALL {
            assert_eq!(overlap_stress(v, Time::ZERO, &cfg), Ok(StressOutcome::Holds), "{v}");
        }
        // A glitch shorter than one gate delay is filtered by the pass gate.
        assert_eq!(overlap_stress(FlipFlopVariant::Dtgms, Time::ps(500), &cfg), Ok(StressOutcome::Holds));
    }
}
