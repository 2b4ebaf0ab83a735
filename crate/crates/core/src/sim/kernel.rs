//! Discrete-event engine.
//!
//! Events live in a binary heap ordered by `(time, seq)`. Each time step runs
//! in delta rounds: every event due at `now` is applied, the touched nets are
//! re-resolved, and the readers of nets that changed are evaluated in
//! component order. Zero-delay outputs land in the next delta of the same
//! time step.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use super::stimulus::Stimulus;
use super::waveform::Waveform;
use crate::cells::{ff_step, ClockEvent, FlipFlopVariant};
use crate::logic::{resolve, LogicValue};
use crate::netlist::{CellKind, DelayModel, DelaySpec, NetId, Netlist, NetlistError, PrimitiveKind};
use crate::time::Time;

pub const DEFAULT_EVENT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    /// Abort once this many events have been applied in one run.
    pub event_budget: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { event_budget: DEFAULT_EVENT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimError {
    Netlist(NetlistError),
    UnknownPort(String),
    /// Event budget exhausted; lists the busiest nets with their transition counts.
    Oscillation { time: Time, events: u64, nets: Vec<(String, usize)> },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Netlist(e) => write!(f, "{e}"),
            SimError::UnknownPort(p) => write!(f, "stimulus drives `{p}`, which is not an input port"),
            SimError::Oscillation { time, events, nets } => {
                write!(f, "event budget of {events} exhausted at {time}; busiest nets:")?;
                for (n, c) in nets {
                    write!(f, " {n}({c})")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for SimError {}

impl From<NetlistError> for SimError {
    fn from(e: NetlistError) -> Self {
        SimError::Netlist(e)
    }
}

#[derive(Clone, Copy, Debug)]
enum Leaf {
    Gate(PrimitiveKind),
    Flop(FlipFlopVariant),
}

#[derive(Clone, Debug)]
struct Cell {
    leaf: Leaf,
    inputs: Vec<u32>,
    driver: u32,
    delay: DelaySpec,
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    value: LogicValue,
    seq: u64,
}

#[derive(Clone, Debug)]
struct Driver {
    net: u32,
    value: LogicValue,
    /// Inertial drivers keep at most one projected transition.
    pending: Option<Pending>,
    /// Last value handed to the queue (transport drivers).
    projected: LogicValue,
    inertial: bool,
}

/// Netlist elaborated into flat arrays.
#[derive(Clone, Debug, Default)]
struct Design {
    net_names: Vec<String>,
    storage: Vec<bool>,
    cells: Vec<Cell>,
    cell_names: Vec<String>,
    net_drivers: Vec<Vec<u32>>,
    net_readers: Vec<Vec<u32>>,
    inputs: BTreeMap<String, u32>,
}

impl Design {
    fn elaborate(netlist: &Netlist) -> Result<Self, NetlistError> {
        let mut d = Design::default();
        let map: Vec<u32> = netlist.nets().iter().map(|n| d.new_net(n.name.clone(), n.storage)).collect();
        d.walk(netlist, netlist, "", &map)?;
        for &input in netlist.inputs() {
            let net = map[input.index()];
            d.inputs.insert(netlist.net_name(input).to_string(), net);
        }
        for (ci, cell) in d.cells.iter().enumerate() {
            for &i in &cell.inputs {
                let readers = &mut d.net_readers[i as usize];
                if readers.last() != Some(&(ci as u32)) {
                    readers.push(ci as u32);
                }
            }
        }
        Ok(d)
    }

    fn new_net(&mut self, name: String, storage: bool) -> u32 {
        self.net_names.push(name);
        self.storage.push(storage);
        self.net_drivers.push(Vec::new());
        self.net_readers.push(Vec::new());
        (self.net_names.len() - 1) as u32
    }

    fn walk(&mut self, root: &Netlist, scope: &Netlist, prefix: &str, map: &[u32]) -> Result<(), NetlistError> {
        let qualify = |name: &str| if prefix.is_empty() { name.to_string() } else { format!("{prefix}.{name}") };
        for c in scope.components() {
            let name = qualify(&c.name);
            let pin = |i: usize, port: &str| -> Result<u32, NetlistError> {
                c.pins
                    .get(i)
                    .copied()
                    .flatten()
                    .map(|n| map[n.index()])
                    .ok_or_else(|| NetlistError::UnboundPort { component: name.clone(), port: port.to_string() })
            };
            let (leaf, n_in) = match &c.kind {
                CellKind::Primitive(p) => (Leaf::Gate(*p), p.input_ports().len()),
                CellKind::Flop(v) => (Leaf::Flop(*v), 2),
                CellKind::Instance(def_name) => {
                    let def = scope
                        .definitions()
                        .get(def_name)
                        .or_else(|| root.definitions().get(def_name))
                        .ok_or_else(|| NetlistError::UnknownSubcircuit {
                            component: name.clone(),
                            name: def_name.clone(),
                        })?;
                    let ports: Vec<NetId> = def.inputs().iter().chain(def.outputs()).copied().collect();
                    let mut inner: Vec<Option<u32>> = vec![None; def.nets().len()];
                    for (i, port) in ports.iter().enumerate() {
                        inner[port.index()] = Some(pin(i, def.net_name(*port))?);
                    }
                    let inner: Vec<u32> = inner
                        .into_iter()
                        .enumerate()
                        .map(|(i, m)| {
                            m.unwrap_or_else(|| {
                                let net = &def.nets()[i];
                                self.new_net(format!("{name}.{}", net.name), net.storage)
                            })
                        })
                        .collect();
                    self.walk(root, def, &name, &inner)?;
                    continue;
                }
            };
            let inputs = (0..n_in).map(|i| pin(i, "input")).collect::<Result<Vec<_>, _>>()?;
            let out = pin(n_in, "output")?;
            let id = self.cells.len() as u32;
            self.net_drivers[out as usize].push(id);
            self.cells.push(Cell { leaf, inputs, driver: id, delay: c.delay });
            self.cell_names.push(name);
        }
        Ok(())
    }
}

/// A single simulation run over an elaborated netlist.
///
/// Hierarchical netlists are elaborated directly; net ids and names match
/// those of [`Netlist::flatten`].
#[derive(Clone, Debug)]
pub struct Simulator {
    design: Design,
    drivers: Vec<Driver>,
    /// External driver per input net, indexed like `drivers` after the cell drivers.
    input_driver: BTreeMap<u32, u32>,
    nets: Vec<LogicValue>,
    last_clk: Vec<LogicValue>,
    queue: BinaryHeap<Reverse<(Time, u64, u32, LogicValue)>>,
    seq: u64,
    now: Time,
    events: u64,
    options: SimOptions,
    waveform: Waveform,
    started: bool,
    dirty: Vec<u32>,
    dirty_flag: Vec<bool>,
    eval_flag: Vec<bool>,
}

impl Simulator {
    pub fn new(netlist: &Netlist) -> Result<Self, SimError> {
        Self::with_options(netlist, SimOptions::default())
    }

    pub fn with_options(netlist: &Netlist, options: SimOptions) -> Result<Self, SimError> {
        let design = Design::elaborate(netlist)?;
        let mut drivers: Vec<Driver> = design
            .cells
            .iter()
            .map(|c| Driver {
                net: 0,
                value: LogicValue::X,
                pending: None,
                projected: LogicValue::X,
                inertial: c.delay.model == DelayModel::Inertial,
            })
            .collect();
        for (ni, ds) in design.net_drivers.iter().enumerate() {
            for &d in ds {
                drivers[d as usize].net = ni as u32;
            }
        }
        let mut design = design;
        let mut input_driver = BTreeMap::new();
        for &net in design.inputs.values() {
            let id = drivers.len() as u32;
            drivers.push(Driver {
                net,
                value: LogicValue::X,
                pending: None,
                projected: LogicValue::X,
                inertial: false,
            });
            design.net_drivers[net as usize].push(id);
            input_driver.insert(net, id);
        }
        let nets: Vec<LogicValue> = design
            .net_drivers
            .iter()
            .map(|ds| resolve(ds.iter().map(|&d| drivers[d as usize].value)))
            .collect();
        let waveform = Waveform::new(design.net_names.clone(), nets.clone());
        let n_nets = nets.len();
        let n_cells = design.cells.len();
        Ok(Simulator {
            design,
            drivers,
            input_driver,
            last_clk: vec![LogicValue::X; n_cells],
            nets,
            queue: BinaryHeap::new(),
            seq: 0,
            now: Time::ZERO,
            events: 0,
            options,
            waveform,
            started: false,
            dirty: Vec::new(),
            dirty_flag: vec![false; n_nets],
            eval_flag: vec![false; n_cells],
        })
    }

    pub fn now(&self) -> Time {
        self.now
    }

    pub fn events_applied(&self) -> u64 {
        self.events
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.waveform.net_id(name)
    }

    pub fn value(&self, net: NetId) -> LogicValue {
        self.nets[net.index()]
    }

    pub fn waveform(&self) -> &Waveform {
        &self.waveform
    }

    pub fn into_waveform(self) -> Waveform {
        self.waveform
    }

    /// Drive input `port` to `value` at `time` (not before the current time).
    pub fn drive(&mut self, port: &str, time: Time, value: LogicValue) -> Result<(), SimError> {
        let net = *self.design.inputs.get(port).ok_or_else(|| SimError::UnknownPort(port.to_string()))?;
        let driver = self.input_driver[&net];
        let time = time.max(self.now);
        self.push(time, driver, value);
        Ok(())
    }

    pub fn apply(&mut self, stimulus: &Stimulus, until: Time) -> Result<(), SimError> {
        for e in stimulus.expand(until) {
            self.drive(&e.port, e.time, e.value)?;
        }
        Ok(())
    }

    fn push(&mut self, time: Time, driver: u32, value: LogicValue) -> u64 {
        self.seq += 1;
        self.queue.push(Reverse((time, self.seq, driver, value)));
        self.seq
    }

    fn is_live(&self, seq: u64, driver: u32) -> bool {
        let d = &self.drivers[driver as usize];
        !d.inertial || d.pending.is_some_and(|p| p.seq == seq)
    }

    fn next_time(&mut self) -> Option<Time> {
        while let Some(&Reverse((t, seq, driver, _))) = self.queue.peek() {
            if self.is_live(seq, driver) {
                return Some(t);
            }
            self.queue.pop();
        }
        None
    }

    /// No live events remain.
    pub fn is_quiescent(&mut self) -> bool {
        self.next_time().is_none()
    }

    /// Run every time step up to and including `until`.
    pub fn run_until(&mut self, until: Time) -> Result<(), SimError> {
        if !self.started {
            self.started = true;
            for c in 0..self.design.cells.len() {
                self.evaluate(c);
            }
        }
        while let Some(t) = self.next_time() {
            if t > until {
                break;
            }
            self.now = t;
            self.step_delta()?;
        }
        self.now = self.now.max(until);
        self.waveform.set_end(until);
        Ok(())
    }

    fn step_delta(&mut self) -> Result<(), SimError> {
        let now = self.now;
        while let Some(&Reverse((t, seq, driver, value))) = self.queue.peek() {
            if t != now {
                break;
            }
            self.queue.pop();
            if !self.is_live(seq, driver) {
                continue;
            }
            self.events += 1;
            if self.events > self.options.event_budget {
                return Err(self.oscillation());
            }
            let d = &mut self.drivers[driver as usize];
            if d.inertial {
                d.pending = None;
            }
            d.value = value;
            let net = d.net;
            if !self.dirty_flag[net as usize] {
                self.dirty_flag[net as usize] = true;
                self.dirty.push(net);
            }
        }

        let mut to_eval = Vec::new();
        let dirty = core::mem::take(&mut self.dirty);
        for net in dirty {
            let ni = net as usize;
            self.dirty_flag[ni] = false;
            let ds = &self.design.net_drivers[ni];
            let all_float = ds.iter().all(|&d| self.drivers[d as usize].value == LogicValue::Z);
            let new = if self.design.storage[ni] && all_float {
                self.nets[ni]
            } else {
                resolve(ds.iter().map(|&d| self.drivers[d as usize].value))
            };
            if new != self.nets[ni] {
                self.nets[ni] = new;
                self.waveform.record(NetId(net), now, new);
                for &r in &self.design.net_readers[ni] {
                    if !self.eval_flag[r as usize] {
                        self.eval_flag[r as usize] = true;
                        to_eval.push(r);
                    }
                }
            }
        }
        to_eval.sort_unstable();
        for c in to_eval {
            self.eval_flag[c as usize] = false;
            self.evaluate(c as usize);
        }
        Ok(())
    }

    fn evaluate(&mut self, ci: usize) {
        let cell = &self.design.cells[ci];
        let value = match cell.leaf {
            Leaf::Gate(kind) => {
                let mut buf = [LogicValue::X; 3];
                for (slot, &n) in buf.iter_mut().zip(&cell.inputs) {
                    *slot = self.nets[n as usize];
                }
                kind.eval_unchecked(&buf[..cell.inputs.len()])
            }
            Leaf::Flop(variant) => {
                let d = self.nets[cell.inputs[0] as usize];
                let clk = self.nets[cell.inputs[1] as usize];
                let prev = core::mem::replace(&mut self.last_clk[ci], clk);
                let driver = &self.drivers[cell.driver as usize];
                let q = driver.pending.map_or(driver.value, |p| p.value);
                match (prev, clk) {
                    (LogicValue::L0, LogicValue::L1) => ff_step(variant, ClockEvent::Rising, d, q),
                    (LogicValue::L0, LogicValue::X | LogicValue::Z)
                    | (LogicValue::X | LogicValue::Z, LogicValue::L1) => {
                        if d == q {
                            q
                        } else {
                            LogicValue::X
                        }
                    }
                    _ => return,
                }
            }
        };
        let (driver, delay) = (cell.driver, cell.delay);
        self.schedule(driver, value, delay.propagation);
    }

    fn schedule(&mut self, driver: u32, value: LogicValue, delay: Time) {
        let at = self.now + delay;
        let d = &self.drivers[driver as usize];
        if d.inertial {
            match d.pending {
                Some(p) if p.value == value => return,
                _ => {}
            }
            let current = d.value;
            self.drivers[driver as usize].pending = None;
            if value != current {
                let seq = self.push(at, driver, value);
                self.drivers[driver as usize].pending = Some(Pending { value, seq });
            }
        } else if value != d.projected {
            self.drivers[driver as usize].projected = value;
            self.push(at, driver, value);
        }
    }

    /// Evaluate every cell once more and report how many new events that
    /// produced. Zero right after quiescence means the settled state is a
    /// fixed point.
    pub fn reevaluate_all(&mut self) -> usize {
        let before = self.seq;
        for c in 0..self.design.cells.len() {
            self.evaluate(c);
        }
        (self.seq - before) as usize
    }

    fn oscillation(&self) -> SimError {
        let mut busiest: Vec<(String, usize)> = (0..self.nets.len())
            .map(|i| (self.design.net_names[i].clone(), self.waveform.transition_count(NetId(i as u32))))
            .filter(|(_, c)| *c > 0)
            .collect();
        busiest.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        busiest.truncate(8);
        SimError::Oscillation { time: self.now, events: self.options.event_budget, nets: busiest }
    }
}

/// Simulate `netlist` under `stimulus` until `until` (or quiescence).
pub fn simulate(netlist: &Netlist, stimulus: &Stimulus, until: Time) -> Result<Waveform, SimError> {
    simulate_with(netlist, stimulus, until, SimOptions::default())
}

pub fn simulate_with(
    netlist: &Netlist,
    stimulus: &Stimulus,
    until: Time,
    options: SimOptions,
) -> Result<Waveform, SimError> {
    let mut sim = Simulator::with_options(netlist, options)?;
    sim.apply(stimulus, until)?;
    sim.run_until(until)?;
    Ok(sim.into_waveform())
}
