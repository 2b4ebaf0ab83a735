//! 4-bit universal shift register, 4-bit ALU and the accumulator system that
//! joins them: netlist builders and behavioral golden models.
//!
//! Words are written F1..F4 with F1 the most significant bit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cells::{build_ff, build_full_adder, build_mux4, CellDelayConfig, FfModel, FlipFlopVariant};
use crate::logic::{LogicValue, Word4};
use crate::netlist::{NetId, Netlist, PrimitiveKind};

use LogicValue::{L0, L1, X};

/// Register operation selected by `(s1, s0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UsrMode {
    NoChange,
    ShiftRight,
    ShiftLeft,
    ParallelLoad,
}

impl UsrMode {
    pub const ALL: [UsrMode; 4] = [UsrMode::NoChange, UsrMode::ShiftRight, UsrMode::ShiftLeft, UsrMode::ParallelLoad];

    pub const fn from_select(s1: bool, s0: bool) -> Self {
        match (s1, s0) {
            (false, false) => UsrMode::NoChange,
            (false, true) => UsrMode::ShiftRight,
            (true, false) => UsrMode::ShiftLeft,
            (true, true) => UsrMode::ParallelLoad,
        }
    }

    /// `(s1, s0)`
    pub const fn select(self) -> (bool, bool) {
        match self {
            UsrMode::NoChange => (false, false),
            UsrMode::ShiftRight => (false, true),
            UsrMode::ShiftLeft => (true, false),
            UsrMode::ParallelLoad => (true, true),
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            UsrMode::NoChange => "no-change",
            UsrMode::ShiftRight => "shift-right",
            UsrMode::ShiftLeft => "shift-left",
            UsrMode::ParallelLoad => "parallel-load",
        }
    }
}

impl fmt::Display for UsrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct UsrState {
    pub f: Word4,
}

impl UsrState {
    pub const fn new(f: Word4) -> Self {
        UsrState { f }
    }
}

/// One clock of the shift register.
///
/// Shift right moves F1 toward F4 with `serial_right_in` entering at F1;
/// shift left moves F4 toward F1 with `serial_left_in` entering at F4.
pub fn usr_step(
    state: UsrState,
    mode: UsrMode,
    serial_right_in: LogicValue,
    serial_left_in: LogicValue,
    parallel_in: Word4,
) -> UsrState {
    let [f1, f2, f3, f4] = state.f.0;
    let next = match mode {
        UsrMode::NoChange => [f1, f2, f3, f4],
        UsrMode::ShiftRight => [serial_right_in, f1, f2, f3],
        UsrMode::ShiftLeft => [f2, f3, f4, serial_left_in],
        UsrMode::ParallelLoad => parallel_in.0,
    };
    UsrState { f: Word4(next) }
}

/// ALU control lines. `(s1, s0)` picks the B-side operand Y; `cin` is the
/// carry into the least significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AluControl {
    pub s1: bool,
    pub s0: bool,
    pub cin: bool,
}

impl AluControl {
    pub const ADD: AluControl = AluControl::from_bits(0b000);
    pub const ADD_WITH_CARRY: AluControl = AluControl::from_bits(0b001);
    pub const SUBTRACT_WITH_BORROW: AluControl = AluControl::from_bits(0b010);
    pub const SUBTRACT: AluControl = AluControl::from_bits(0b011);
    pub const TRANSFER_A: AluControl = AluControl::from_bits(0b100);
    pub const INCREMENT: AluControl = AluControl::from_bits(0b101);
    pub const DECREMENT: AluControl = AluControl::from_bits(0b110);

    pub const ALL: [AluControl; 8] = [
        AluControl::from_bits(0),
        AluControl::from_bits(1),
        AluControl::from_bits(2),
        AluControl::from_bits(3),
        AluControl::from_bits(4),
        AluControl::from_bits(5),
        AluControl::from_bits(6),
        AluControl::from_bits(7),
    ];

    /// Bits `s1 s0 cin`, most significant first.
    pub const fn from_bits(bits: u8) -> Self {
        AluControl { s1: bits & 4 != 0, s0: bits & 2 != 0, cin: bits & 1 != 0 }
    }

    pub const fn bits(self) -> u8 {
        (self.s1 as u8) << 2 | (self.s0 as u8) << 1 | self.cin as u8
    }

    pub const fn name(self) -> &'static str {
        match self.bits() {
            0 => "add",
            1 => "add with carry",
            2 => "subtract with borrow",
            3 => "subtract",
            4 => "transfer A",
            5 => "increment A",
            6 => "decrement A",
            _ => "transfer A",
        }
    }
}

impl fmt::Display for AluControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{} ({})", self.s1 as u8, self.s0 as u8, self.cin as u8, self.name())
    }
}

/// `D = A + Y + cin` with Y = B, !B, 0000 or 1111.
///
/// Strong operands go through integer arithmetic. Any unknown bit switches to
/// a bitwise ripple in which X spreads only where it can matter.
pub fn alu_eval(ctrl: AluControl, a: Word4, b: Word4) -> (Word4, LogicValue) {
    if let (Some(a), Some(b)) = (a.to_u8(), b.to_u8()) {
        let y = match (ctrl.s1, ctrl.s0) {
            (false, false) => b,
            (false, true) => !b & 0xF,
            (true, false) => 0,
            (true, true) => 0xF,
        };
        let total = a + y + ctrl.cin as u8;
        return (Word4::from_u8(total & 0xF), LogicValue::from_bool(total > 0xF));
    }
    let mut carry = LogicValue::from_bool(ctrl.cin);
    let mut d = [X; 4];
    for i in (0..4).rev() {
        let bi = b.0[i].as_input();
        let y = match (ctrl.s1, ctrl.s0) {
            (false, false) => bi,
            (false, true) => bi.not(),
            (true, false) => L0,
            (true, true) => L1,
        };
        let ai = a.0[i].as_input();
        d[i] = ai.xor(y).xor(carry);
        carry = ai.and(y).or(carry.and(ai.xor(y)));
    }
    (Word4(d), carry)
}

/// Register contents, the externally held B operand and the carry-out of
/// the last cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SystemState {
    pub register: UsrState,
    pub operand_b: Word4,
    pub last_cout: LogicValue,
}

/// One clock of the accumulator: the ALU combines the register (operand A)
/// with B, and the register then applies `mode` with the ALU result as its
/// parallel input.
pub fn system_cycle(
    state: SystemState,
    ctrl: AluControl,
    mode: UsrMode,
    serial_right_in: LogicValue,
    serial_left_in: LogicValue,
) -> SystemState {
    let (d, cout) = alu_eval(ctrl, state.register.f, state.operand_b);
    SystemState {
        register: usr_step(state.register, mode, serial_right_in, serial_left_in, d),
        operand_b: state.operand_b,
        last_cout: cout,
    }
}

fn bus(n: &mut Netlist, prefix: &str, input: bool) -> [NetId; 4] {
    [1, 2, 3, 4].map(|i| {
        let name = format!("{prefix}{i}");
        if input {
            n.add_input(&name)
        } else {
            n.add_output(&name)
        }
    })
}

fn wire(n: &mut Netlist, prefix: &str) -> [NetId; 4] {
    [1, 2, 3, 4].map(|i| n.net_or_insert(&format!("{prefix}{i}")))
}

/// Shift register with behavioral flip-flops.
pub fn build_usr(variant: FlipFlopVariant, cfg: &CellDelayConfig) -> Netlist {
    build_usr_with(variant, cfg, FfModel::Behavioral)
}

/// Four 4:1 multiplexers steering four flip-flops.
///
/// Ports: `clk s1 s0 sr_in sl_in m1..m4 -> f1..f4`. Multiplexer `i` feeds
/// Fi back on path D, the right-shift neighbour on C, the left-shift
/// neighbour on B and Mi on A. A flip-flop that needs a complementary clock
/// gets it from one shared inverter.
pub fn build_usr_with(variant: FlipFlopVariant, cfg: &CellDelayConfig, model: FfModel) -> Netlist {
    let mux = build_mux4(cfg);
    let ff = build_ff(variant, cfg, model);
    let mut n = Netlist::new("usr");
    let clk = n.add_input("clk");
    let s1 = n.add_input("s1");
    let s0 = n.add_input("s0");
    let sr_in = n.add_input("sr_in");
    let sl_in = n.add_input("sl_in");
    let m = bus(&mut n, "m", true);
    let f = bus(&mut n, "f", false);
    let x = wire(&mut n, "x");
    let clkb = ff.find_net("clkb").filter(|c| ff.inputs().contains(c)).map(|_| {
        let clkb = n.net_or_insert("clkb");
        n.add_gate("clk_inv", PrimitiveKind::Not, &[clk], clkb, cfg.gate(PrimitiveKind::Not)).expect("usr wiring");
        clkb
    });
    for i in 0..4 {
        let right = if i == 0 { sr_in } else { f[i - 1] };
        let left = if i == 3 { sl_in } else { f[i + 1] };
        n.add_instance(
            &format!("mux{}", i + 1),
            &mux,
            &[("s1", s1), ("s0", s0), ("d", f[i]), ("c", right), ("b", left), ("a", m[i]), ("y", x[i])],
        )
        .expect("usr wiring");
        let mut pins = Vec::from([("d", x[i]), ("clk", clk), ("q", f[i])]);
        if let Some(clkb) = clkb {
            pins.push(("clkb", clkb));
        }
        n.add_instance(&format!("ff{}", i + 1), &ff, &pins).expect("usr wiring");
    }
    n
}

/// Ripple-carry ALU: ports `s1 s0 cin a1..a4 b1..b4 -> d1..d4 cout`.
///
/// Each bit inverts B, lets a 4:1 multiplexer pick Y from (B, !B, 0, 1) and
/// adds it to A in a full adder. The carry enters at bit 4 and leaves at
/// bit 1. The carry out of full adder `i` is net `c{i}`, except bit 1 which
/// drives `cout` directly.
pub fn build_alu(cfg: &CellDelayConfig) -> Netlist {
    let mux = build_mux4(cfg);
    let fa = build_full_adder(cfg);
    let mut n = Netlist::new("alu");
    let s1 = n.add_input("s1");
    let s0 = n.add_input("s0");
    let cin = n.add_input("cin");
    let a = bus(&mut n, "a", true);
    let b = bus(&mut n, "b", true);
    let d = bus(&mut n, "d", false);
    let cout = n.add_output("cout");
    let nb = wire(&mut n, "nb");
    let y = wire(&mut n, "y");
    let zero = n.net_or_insert("zero");
    let one = n.net_or_insert("one");
    n.add_gate("tie0", PrimitiveKind::Const0, &[], zero, cfg.gate(PrimitiveKind::Const0)).expect("alu wiring");
    n.add_gate("tie1", PrimitiveKind::Const1, &[], one, cfg.gate(PrimitiveKind::Const1)).expect("alu wiring");
    let mut carry = cin;
    for i in (0..4).rev() {
        let bit = i + 1;
        n.add_gate(&format!("inv_b{bit}"), PrimitiveKind::Not, &[b[i]], nb[i], cfg.gate(PrimitiveKind::Not))
            .expect("alu wiring");
        n.add_instance(
            &format!("mux{bit}"),
            &mux,
            &[("s1", s1), ("s0", s0), ("d", b[i]), ("c", nb[i]), ("b", zero), ("a", one), ("y", y[i])],
        )
        .expect("alu wiring");
        let out = if i == 0 { cout } else { n.net_or_insert(&format!("c{bit}")) };
        n.add_instance(
            &format!("fa{bit}"),
            &fa,
            &[("a", a[i]), ("b", y[i]), ("cin", carry), ("sum", d[i]), ("cout", out)],
        )
        .expect("alu wiring");
        carry = out;
    }
    n
}

/// Accumulator system with behavioral flip-flops.
pub fn build_system(variant: FlipFlopVariant, cfg: &CellDelayConfig) -> Netlist {
    build_system_with(variant, cfg, FfModel::Behavioral)
}

/// ALU result into the register's parallel inputs, register outputs back
/// into ALU operand A.
///
/// Ports: `clk usr_s1 usr_s0 alu_s1 alu_s0 cin sr_in sl_in b1..b4 ->
/// f1..f4 cout`.
pub fn build_system_with(variant: FlipFlopVariant, cfg: &CellDelayConfig, model: FfModel) -> Netlist {
    let usr = build_usr_with(variant, cfg, model);
    let alu = build_alu(cfg);
    let mut n = Netlist::new("system");
    let clk = n.add_input("clk");
    let usr_s1 = n.add_input("usr_s1");
    let usr_s0 = n.add_input("usr_s0");
    let alu_s1 = n.add_input("alu_s1");
    let alu_s0 = n.add_input("alu_s0");
    let cin = n.add_input("cin");
    let sr_in = n.add_input("sr_in");
    let sl_in = n.add_input("sl_in");
    let b = bus(&mut n, "b", true);
    let f = bus(&mut n, "f", false);
    let cout = n.add_output("cout");
    let d = wire(&mut n, "d");

    let mut alu_pins: Vec<(String, NetId)> =
        Vec::from([("s1".into(), alu_s1), ("s0".into(), alu_s0), ("cin".into(), cin), ("cout".into(), cout)]);
    let mut usr_pins: Vec<(String, NetId)> = Vec::from([
        ("clk".into(), clk),
        ("s1".into(), usr_s1),
        ("s0".into(), usr_s0),
        ("sr_in".into(), sr_in),
        ("sl_in".into(), sl_in),
    ]);
    for i in 0..4 {
        let bit = i + 1;
        alu_pins.push((format!("a{bit}"), f[i]));
        alu_pins.push((format!("b{bit}"), b[i]));
        alu_pins.push((format!("d{bit}"), d[i]));
        usr_pins.push((format!("m{bit}"), d[i]));
        usr_pins.push((format!("f{bit}"), f[i]));
    }
    n.add_instance("alu", &alu, &as_refs(&alu_pins)).expect("system wiring");
    n.add_instance("usr", &usr, &as_refs(&usr_pins)).expect("system wiring");
    n
}

fn as_refs(pins: &[(String, NetId)]) -> Vec<(&str, NetId)> {
    pins.iter().map(|(s, n)| (s.as_str(), *n)).collect()
}
