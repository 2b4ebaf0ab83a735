//! Hierarchical netlists over primitive gates, switch-level cells and
//! behavioral flip-flops.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cells::FlipFlopVariant;
use crate::graph;
use crate::logic::LogicValue;
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    /// More than one driver is allowed; values are combined with [`crate::resolve`].
    pub resolved: bool,
    /// Capacitive storage node: keeps its last value while every driver floats.
    pub storage: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimitiveKind {
    Not,
    Buf,
    And2,
    Nand2,
    Or2,
    Nor2,
    Xor2,
    /// Transmission gate: `in`, `en`, `en_b` -> `out`.
    Tgate,
    /// Clocked (tri-state) inverter: `in`, `en`, `en_b` -> `out`.
    Cinv,
    Const0,
    Const1,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 11] = [
        PrimitiveKind::Not,
        PrimitiveKind::Buf,
        PrimitiveKind::And2,
        PrimitiveKind::Nand2,
        PrimitiveKind::Or2,
        PrimitiveKind::Nor2,
        PrimitiveKind::Xor2,
        PrimitiveKind::Tgate,
        PrimitiveKind::Cinv,
        PrimitiveKind::Const0,
        PrimitiveKind::Const1,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Not => "NOT",
            PrimitiveKind::Buf => "BUF",
            PrimitiveKind::And2 => "AND2",
            PrimitiveKind::Nand2 => "NAND2",
            PrimitiveKind::Or2 => "OR2",
            PrimitiveKind::Nor2 => "NOR2",
            PrimitiveKind::Xor2 => "XOR2",
            PrimitiveKind::Tgate => "TGATE",
            PrimitiveKind::Cinv => "CINV",
            PrimitiveKind::Const0 => "CONST0",
            PrimitiveKind::Const1 => "CONST1",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub const fn input_ports(self) -> &'static [&'static str] {
        match self {
            PrimitiveKind::Not | PrimitiveKind::Buf => &["a"],
            PrimitiveKind::And2
            | PrimitiveKind::Nand2
            | PrimitiveKind::Or2
            | PrimitiveKind::Nor2
            | PrimitiveKind::Xor2 => &["a", "b"],
            PrimitiveKind::Tgate | PrimitiveKind::Cinv => &["in", "en", "en_b"],
            PrimitiveKind::Const0 | PrimitiveKind::Const1 => &[],
        }
    }

    pub const fn output_port(self) -> &'static str {
        match self {
            PrimitiveKind::Tgate | PrimitiveKind::Cinv => "out",
            _ => "y",
        }
    }

    /// Whether the cell inverts its data input (used for loop-polarity checks).
    pub const fn is_inverting(self) -> bool {
        matches!(
            self,
            PrimitiveKind::Not | PrimitiveKind::Nand2 | PrimitiveKind::Nor2 | PrimitiveKind::Cinv
        )
    }

    /// Evaluate with inputs already checked for arity.
    pub(crate) fn eval_unchecked(self, inputs: &[LogicValue]) -> LogicValue {
        use LogicValue::*;
        match self {
            PrimitiveKind::Not => inputs[0].not(),
            PrimitiveKind::Buf => match inputs[0] {
                Z => X,
                v => v,
            },
            PrimitiveKind::And2 => inputs[0].and(inputs[1]),
            PrimitiveKind::Nand2 => inputs[0].and(inputs[1]).not(),
            PrimitiveKind::Or2 => inputs[0].or(inputs[1]),
            PrimitiveKind::Nor2 => inputs[0].or(inputs[1]).not(),
            PrimitiveKind::Xor2 => inputs[0].xor(inputs[1]),
            PrimitiveKind::Tgate => {
                let (data, en, en_b) = (inputs[0], inputs[1].as_input(), inputs[2].as_input());
                // Either device conducting is enough to pass the value.
                if en == L1 || en_b == L0 {
                    data
                } else if en == L0 && en_b == L1 {
                    Z
                } else {
                    X
                }
            }
            PrimitiveKind::Cinv => {
                let (data, en, en_b) = (inputs[0].as_input(), inputs[1], inputs[2]);
                // nMOS stack pulls down when en & in, pMOS stack pulls up when !en_b & !in.
                let pull_down = en.and(data);
                let pull_up = en_b.not().and(data.not());
                match (pull_down, pull_up) {
                    (L1, L0) => L0,
                    (L0, L1) => L1,
                    (L0, L0) => Z,
                    _ => X,
                }
            }
            PrimitiveKind::Const0 => L0,
            PrimitiveKind::Const1 => L1,
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluate one primitive on four-valued inputs.
///
/// Controlling values dominate unknowns (`NAND2(0, X) = 1`). A transmission
/// gate passes its input when either device conducts, floats when both are
/// off and is unknown otherwise.
pub fn eval_primitive(kind: PrimitiveKind, inputs: &[LogicValue]) -> Result<LogicValue, NetlistError> {
    let expected = kind.input_ports().len();
    if inputs.len() != expected {
        return Err(NetlistError::Arity {
            kind: kind.name().to_string(),
            expected,
            found: inputs.len(),
        });
    }
    Ok(kind.eval_unchecked(inputs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DelayModel {
    #[default]
    Inertial,
    Transport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DelaySpec {
    pub propagation: Time,
    pub model: DelayModel,
}

impl DelaySpec {
    pub const fn inertial(propagation: Time) -> Self {
        DelaySpec { propagation, model: DelayModel::Inertial }
    }

    pub const fn transport(propagation: Time) -> Self {
        DelaySpec { propagation, model: DelayModel::Transport }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellKind {
    Primitive(PrimitiveKind),
    /// Behavioral rising-edge flip-flop: `d`, `clk` -> `q`; the delay is clock-to-Q.
    Flop(FlipFlopVariant),
    /// Instance of a subcircuit definition, by name.
    Instance(String),
}

pub const FLOP_PORTS: [&str; 3] = ["d", "clk", "q"];

impl CellKind {
    pub fn is_leaf(&self) -> bool {
        !matches!(self, CellKind::Instance(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub kind: CellKind,
    /// One entry per port, inputs first then outputs.
    pub pins: Vec<Option<NetId>>,
    pub delay: DelaySpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetlistError {
    DuplicateNet(String),
    DuplicateComponent(String),
    UnknownNet(String),
    UnknownComponent(String),
    UnknownSubcircuit { component: String, name: String },
    UnknownPort { component: String, port: String },
    UnboundPort { component: String, port: String },
    Arity { kind: String, expected: usize, found: usize },
    ConflictingDefinition(String),
    NotFlat(String),
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetlistError::DuplicateNet(n) => write!(f, "duplicate net `{n}`"),
            NetlistError::DuplicateComponent(n) => write!(f, "duplicate component `{n}`"),
            NetlistError::UnknownNet(n) => write!(f, "unknown net `{n}`"),
            NetlistError::UnknownComponent(n) => write!(f, "unknown component `{n}`"),
            NetlistError::UnknownSubcircuit { component, name } => {
                write!(f, "component `{component}` references unknown subcircuit `{name}`")
            }
            NetlistError::UnknownPort { component, port } => {
                write!(f, "component `{component}` has no port `{port}`")
            }
            NetlistError::UnboundPort { component, port } => {
                write!(f, "port `{port}` of `{component}` is not bound")
            }
            NetlistError::Arity { kind, expected, found } => {
                write!(f, "{kind} takes {expected} inputs, got {found}")
            }
            NetlistError::ConflictingDefinition(n) => {
                write!(f, "subcircuit `{n}` defined twice with different contents")
            }
            NetlistError::NotFlat(n) => write!(f, "component `{n}` is a subcircuit instance; flatten first"),
        }
    }
}

impl core::error::Error for NetlistError {}

/// One structural problem found by [`Netlist::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    UnboundPort { component: String, port: String },
    MultipleDrivers { net: String, drivers: Vec<String> },
    DrivenInput { net: String, driver: String },
    Undriven { net: String },
    Dangling { net: String },
    ZeroDelayCycle { components: Vec<String> },
    UnknownSubcircuit { component: String, name: String },
    PortCount { component: String, expected: usize, found: usize },
    InDefinition { definition: String, diagnostic: Box<Diagnostic> },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UnboundPort { component, port } => {
                write!(f, "unbound port: `{component}`.{port}")
            }
            Diagnostic::MultipleDrivers { net, drivers } => {
                write!(f, "multiple drivers on unresolved net `{net}`: {}", drivers.join(", "))
            }
            Diagnostic::DrivenInput { net, driver } => {
                write!(f, "input port `{net}` is also driven by `{driver}`")
            }
            Diagnostic::Undriven { net } => write!(f, "net `{net}` is read but never driven"),
            Diagnostic::Dangling { net } => write!(f, "dangling net `{net}`"),
            Diagnostic::ZeroDelayCycle { components } => {
                write!(f, "zero-delay cycle through {}", components.join(" -> "))
            }
            Diagnostic::UnknownSubcircuit { component, name } => {
                write!(f, "`{component}` references unknown subcircuit `{name}`")
            }
            Diagnostic::PortCount { component, expected, found } => {
                write!(f, "`{component}` binds {found} ports, expected {expected}")
            }
            Diagnostic::InDefinition { definition, diagnostic } => {
                write!(f, "in `{definition}`: {diagnostic}")
            }
        }
    }
}

/// `(component index, pin index)`.
pub type PinRef = (usize, usize);

#[derive(Clone, Debug, Default)]
pub struct Netlist {
    name: String,
    nets: Vec<Net>,
    net_index: BTreeMap<String, NetId>,
    components: Vec<Component>,
    component_index: BTreeMap<String, usize>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    defs: BTreeMap<String, Netlist>,
}

impl PartialEq for Netlist {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.nets == other.nets
            && self.components == other.components
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.defs == other.defs
    }
}

impl Eq for Netlist {}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Netlist { name: name.into(), ..Default::default() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.index()]
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.nets[id.index()].name
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.net_index.get(name).copied()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn find_component(&self, name: &str) -> Option<usize> {
        self.component_index.get(name).copied()
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn definitions(&self) -> &BTreeMap<String, Netlist> {
        &self.defs
    }

    pub fn is_flat(&self) -> bool {
        self.components.iter().all(|c| c.kind.is_leaf())
    }

    pub fn add_net(&mut self, name: impl Into<String>) -> Result<NetId, NetlistError> {
        let name = name.into();
        if self.net_index.contains_key(&name) {
            return Err(NetlistError::DuplicateNet(name));
        }
        Ok(self.push_net(Net { name, resolved: false, storage: false }))
    }

    /// Look up a net by name, creating a plain one if it does not exist yet.
    pub fn net_or_insert(&mut self, name: &str) -> NetId {
        match self.net_index.get(name) {
            Some(&id) => id,
            None => self.push_net(Net { name: name.to_string(), resolved: false, storage: false }),
        }
    }

    pub fn push_net(&mut self, net: Net) -> NetId {
        let id = NetId(self.nets.len() as u32);
        self.net_index.insert(net.name.clone(), id);
        self.nets.push(net);
        id
    }

    pub fn add_input(&mut self, name: &str) -> NetId {
        let id = self.net_or_insert(name);
        if !self.inputs.contains(&id) {
            self.inputs.push(id);
        }
        id
    }

    pub fn add_output(&mut self, name: &str) -> NetId {
        let id = self.net_or_insert(name);
        if !self.outputs.contains(&id) {
            self.outputs.push(id);
        }
        id
    }

    pub fn set_resolved(&mut self, net: NetId) {
        self.nets[net.index()].resolved = true;
    }

    /// Mark a net as a charge-storage node; storage nodes accept several drivers.
    pub fn set_storage(&mut self, net: NetId) {
        let n = &mut self.nets[net.index()];
        n.storage = true;
        n.resolved = true;
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(|&n| self.net_name(n)).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|&n| self.net_name(n)).collect()
    }

    /// Port names of `kind` and how many of them are inputs.
    pub fn port_names(&self, kind: &CellKind) -> Option<(Vec<String>, usize)> {
        match kind {
            CellKind::Primitive(p) => {
                let mut ports: Vec<String> = p.input_ports().iter().map(|s| s.to_string()).collect();
                let n = ports.len();
                ports.push(p.output_port().to_string());
                Some((ports, n))
            }
            CellKind::Flop(_) => Some((FLOP_PORTS.iter().map(|s| s.to_string()).collect(), 2)),
            CellKind::Instance(name) => {
                let def = self.defs.get(name)?;
                let mut ports: Vec<String> = def.input_names().into_iter().map(String::from).collect();
                let n = ports.len();
                ports.extend(def.output_names().into_iter().map(String::from));
                Some((ports, n))
            }
        }
    }

    pub fn add_component(&mut self, component: Component) -> Result<usize, NetlistError> {
        if self.component_index.contains_key(&component.name) {
            return Err(NetlistError::DuplicateComponent(component.name));
        }
        if let CellKind::Primitive(p) = component.kind {
            let expected = p.input_ports().len() + 1;
            if component.pins.len() != expected {
                return Err(NetlistError::Arity {
                    kind: p.name().to_string(),
                    expected: expected - 1,
                    found: component.pins.len().saturating_sub(1),
                });
            }
        }
        let idx = self.components.len();
        self.component_index.insert(component.name.clone(), idx);
        self.components.push(component);
        Ok(idx)
    }

    /// Add a primitive gate with inertial delay.
    pub fn add_gate(
        &mut self,
        name: &str,
        kind: PrimitiveKind,
        inputs: &[NetId],
        output: NetId,
        delay: Time,
    ) -> Result<usize, NetlistError> {
        if inputs.len() != kind.input_ports().len() {
            return Err(NetlistError::Arity {
                kind: kind.name().to_string(),
                expected: kind.input_ports().len(),
                found: inputs.len(),
            });
        }
        let mut pins: Vec<Option<NetId>> = inputs.iter().copied().map(Some).collect();
        pins.push(Some(output));
        self.add_component(Component {
            name: name.to_string(),
            kind: CellKind::Primitive(kind),
            pins,
            delay: DelaySpec::inertial(delay),
        })
    }

    pub fn add_flop(
        &mut self,
        name: &str,
        variant: FlipFlopVariant,
        d: NetId,
        clk: NetId,
        q: NetId,
        clk_to_q: Time,
    ) -> Result<usize, NetlistError> {
        self.add_component(Component {
            name: name.to_string(),
            kind: CellKind::Flop(variant),
            pins: vec![Some(d), Some(clk), Some(q)],
            delay: DelaySpec::inertial(clk_to_q),
        })
    }

    /// Register a subcircuit definition (and any definitions it carries).
    pub fn add_definition(&mut self, def: &Netlist) -> Result<(), NetlistError> {
        for nested in def.defs.values() {
            self.add_definition(nested)?;
        }
        let mut bare = def.clone();
        bare.defs.clear();
        match self.defs.get(&def.name) {
            Some(existing) if *existing != bare => Err(NetlistError::ConflictingDefinition(def.name.clone())),
            Some(_) => Ok(()),
            None => {
                self.defs.insert(def.name.clone(), bare);
                Ok(())
            }
        }
    }

    /// Instantiate `def` as `name`, binding each of its ports by name.
    pub fn add_instance(
        &mut self,
        name: &str,
        def: &Netlist,
        bindings: &[(&str, NetId)],
    ) -> Result<usize, NetlistError> {
        self.add_definition(def)?;
        for (port, _) in bindings {
            if def.find_net(port).is_none_or(|n| !def.inputs.contains(&n) && !def.outputs.contains(&n)) {
                return Err(NetlistError::UnknownPort { component: name.to_string(), port: port.to_string() });
            }
        }
        let mut pins = Vec::with_capacity(def.inputs.len() + def.outputs.len());
        for &port in def.inputs.iter().chain(def.outputs.iter()) {
            let port_name = def.net_name(port);
            let bound = bindings.iter().find(|(p, _)| *p == port_name).map(|(_, n)| *n);
            match bound {
                Some(n) => pins.push(Some(n)),
                None => {
                    return Err(NetlistError::UnboundPort {
                        component: name.to_string(),
                        port: port_name.to_string(),
                    })
                }
            }
        }
        self.add_component(Component {
            name: name.to_string(),
            kind: CellKind::Instance(def.name.clone()),
            pins,
            delay: DelaySpec::inertial(Time::ZERO),
        })
    }

    /// Rebind one pin of a component; used to build mutants in tests.
    pub fn rebind(&mut self, component: &str, port: &str, net: NetId) -> Result<(), NetlistError> {
        let idx = self
            .find_component(component)
            .ok_or_else(|| NetlistError::UnknownComponent(component.to_string()))?;
        let (ports, _) = self
            .port_names(&self.components[idx].kind)
            .ok_or_else(|| NetlistError::UnknownSubcircuit {
                component: component.to_string(),
                name: format!("{:?}", self.components[idx].kind),
            })?;
        let pos = ports.iter().position(|p| p == port).ok_or_else(|| NetlistError::UnknownPort {
            component: component.to_string(),
            port: port.to_string(),
        })?;
        self.components[idx].pins[pos] = Some(net);
        Ok(())
    }

    pub fn set_delay(&mut self, component: usize, delay: DelaySpec) {
        self.components[component].delay = delay;
    }

    /// Per-net driver and reader lists.
    pub fn connectivity(&self) -> (Vec<Vec<PinRef>>, Vec<Vec<PinRef>>) {
        let mut drivers = vec![Vec::new(); self.nets.len()];
        let mut readers = vec![Vec::new(); self.nets.len()];
        for (ci, c) in self.components.iter().enumerate() {
            let n_inputs = match self.port_names(&c.kind) {
                Some((_, n)) => n,
                None => continue,
            };
            for (pi, pin) in c.pins.iter().enumerate() {
                if let Some(net) = pin {
                    if pi < n_inputs {
                        readers[net.index()].push((ci, pi));
                    } else {
                        drivers[net.index()].push((ci, pi));
                    }
                }
            }
        }
        (drivers, readers)
    }

    /// Check structural rules at this level and inside every definition.
    pub fn validate(&self) -> Result<(), Vec<Diagnostic>> {
        let mut diags = self.validate_level();
        for (name, def) in &self.defs {
            // Definitions may themselves reference sibling definitions.
            let mut scoped = def.clone();
            for (other, d) in &self.defs {
                if other != name {
                    scoped.defs.entry(other.clone()).or_insert_with(|| d.clone());
                }
            }
            if let Err(inner) = scoped.validate_level_result() {
                diags.extend(inner.into_iter().map(|d| Diagnostic::InDefinition {
                    definition: name.clone(),
                    diagnostic: Box::new(d),
                }));
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    fn validate_level_result(&self) -> Result<(), Vec<Diagnostic>> {
        let d = self.validate_level();
        if d.is_empty() {
            Ok(())
        } else {
            Err(d)
        }
    }

    fn validate_level(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for c in &self.components {
            match self.port_names(&c.kind) {
                None => {
                    if let CellKind::Instance(name) = &c.kind {
                        diags.push(Diagnostic::UnknownSubcircuit { component: c.name.clone(), name: name.clone() });
                    }
                }
                Some((ports, _)) => {
                    if ports.len() != c.pins.len() {
                        diags.push(Diagnostic::PortCount {
                            component: c.name.clone(),
                            expected: ports.len(),
                            found: c.pins.len(),
                        });
                        continue;
                    }
                    for (port, pin) in ports.iter().zip(&c.pins) {
                        if pin.is_none() {
                            diags.push(Diagnostic::UnboundPort { component: c.name.clone(), port: port.clone() });
                        }
                    }
                }
            }
        }

        let (drivers, readers) = self.connectivity();
        for (i, net) in self.nets.iter().enumerate() {
            let id = NetId(i as u32);
            let is_input = self.inputs.contains(&id);
            let is_output = self.outputs.contains(&id);
            let driver_names: Vec<String> = drivers[i].iter().map(|&(c, _)| self.components[c].name.clone()).collect();
            if is_input {
                if let Some(d) = driver_names.first() {
                    diags.push(Diagnostic::DrivenInput { net: net.name.clone(), driver: d.clone() });
                }
            } else if driver_names.len() > 1 && !net.resolved {
                diags.push(Diagnostic::MultipleDrivers { net: net.name.clone(), drivers: driver_names.clone() });
            }
            if !is_input && driver_names.is_empty() && (is_output || !readers[i].is_empty()) {
                diags.push(Diagnostic::Undriven { net: net.name.clone() });
            } else if !is_input && !is_output && (driver_names.is_empty() || readers[i].is_empty()) {
                diags.push(Diagnostic::Dangling { net: net.name.clone() });
            }
        }

        for cycle in self.zero_delay_cycles(&readers) {
            diags.push(Diagnostic::ZeroDelayCycle {
                components: cycle.into_iter().map(|c| self.components[c].name.clone()).collect(),
            });
        }
        diags
    }

    fn zero_delay_cycles(&self, readers: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
        let zero = |c: &Component| {
            matches!(c.kind, CellKind::Primitive(_)) && c.delay.propagation == Time::ZERO
        };
        let n = self.components.len();
        let mut succ = vec![Vec::new(); n];
        for (ci, c) in self.components.iter().enumerate() {
            if !zero(c) {
                continue;
            }
            if let Some(Some(out)) = c.pins.last() {
                for &(r, _) in &readers[out.index()] {
                    if zero(&self.components[r]) {
                        succ[ci].push(r);
                    }
                }
            }
        }
        graph::strongly_connected(&succ)
            .into_iter()
            .filter(|scc| scc.len() > 1 || succ[scc[0]].contains(&scc[0]))
            .collect()
    }

    /// Expand every subcircuit instance into leaf components.
    ///
    /// Internal nets and components of an instance `u` are renamed `u.<name>`;
    /// port nets are merged with the nets bound at the instance site.
    pub fn flatten(&self) -> Result<Netlist, NetlistError> {
        let mut out = Netlist::new(self.name.clone());
        let map: Vec<NetId> = self.nets.iter().map(|n| out.push_net(n.clone())).collect();
        out.inputs = self.inputs.iter().map(|n| map[n.index()]).collect();
        out.outputs = self.outputs.iter().map(|n| map[n.index()]).collect();
        self.expand_components(&mut out, "", &map, &self.defs)?;
        Ok(out)
    }

    fn expand_components(
        &self,
        out: &mut Netlist,
        prefix: &str,
        map: &[NetId],
        defs: &BTreeMap<String, Netlist>,
    ) -> Result<(), NetlistError> {
        for c in &self.components {
            let name = join(prefix, &c.name);
            match &c.kind {
                CellKind::Instance(def_name) => {
                    let def = self
                        .defs
                        .get(def_name)
                        .or_else(|| defs.get(def_name))
                        .ok_or_else(|| NetlistError::UnknownSubcircuit {
                            component: name.clone(),
                            name: def_name.clone(),
                        })?;
                    let ports: Vec<NetId> = def.inputs.iter().chain(def.outputs.iter()).copied().collect();
                    if ports.len() != c.pins.len() {
                        return Err(NetlistError::Arity {
                            kind: def_name.clone(),
                            expected: ports.len(),
                            found: c.pins.len(),
                        });
                    }
                    let mut inner: Vec<Option<NetId>> = vec![None; def.nets.len()];
                    for (port, pin) in ports.iter().zip(&c.pins) {
                        let bound = pin.ok_or_else(|| NetlistError::UnboundPort {
                            component: name.clone(),
                            port: def.net_name(*port).to_string(),
                        })?;
                        inner[port.index()] = Some(map[bound.index()]);
                    }
                    let inner: Vec<NetId> = inner
                        .into_iter()
                        .enumerate()
                        .map(|(i, m)| {
                            m.unwrap_or_else(|| {
                                let net = &def.nets[i];
                                out.push_net(Net { name: join(&name, &net.name), ..net.clone() })
                            })
                        })
                        .collect();
                    def.expand_components(out, &name, &inner, defs)?;
                }
                _ => {
                    out.add_component(Component {
                        name,
                        kind: c.kind.clone(),
                        pins: c.pins.iter().map(|p| p.map(|n| map[n.index()])).collect(),
                        delay: c.delay,
                    })?;
                }
            }
        }
        Ok(())
    }

    /// Every simple feedback loop through `net`, as component index sequences
    /// starting at a reader of `net` and ending at one of its drivers.
    pub fn feedback_loops(&self, net: NetId) -> Vec<Vec<usize>> {
        let (_, readers) = self.connectivity();
        let mut loops = Vec::new();
        let mut path = Vec::new();
        let mut seen = BTreeSet::new();
        seen.insert(net);
        self.loops_from(net, net, &readers, &mut path, &mut seen, &mut loops);
        loops
    }

    fn loops_from(
        &self,
        target: NetId,
        at: NetId,
        readers: &[Vec<(usize, usize)>],
        path: &mut Vec<usize>,
        seen: &mut BTreeSet<NetId>,
        loops: &mut Vec<Vec<usize>>,
    ) {
        for &(ci, _) in &readers[at.index()] {
            if path.contains(&ci) {
                continue;
            }
            let Some(Some(out)) = self.components[ci].pins.last().copied() else { continue };
            path.push(ci);
            if out == target {
                loops.push(path.clone());
            } else if seen.insert(out) {
                self.loops_from(target, out, readers, path, seen, loops);
                seen.remove(&out);
            }
            path.pop();
        }
    }

    /// Whether `to` is reachable from `from` by following component data flow.
    pub fn reaches(&self, from: NetId, to: NetId) -> bool {
        let (_, readers) = self.connectivity();
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            for &(ci, _) in &readers[n.index()] {
                if let Some(Some(out)) = self.components[ci].pins.last().copied() {
                    if out == to {
                        return true;
                    }
                    if seen.insert(out) {
                        stack.push(out);
                    }
                }
            }
        }
        false
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[cfg(test)]
mod tests {
    use super::LogicValue::*;
    use super::*;

    fn all_gates_exhaustive(kind: PrimitiveKind, f: impl Fn(&[bool]) -> bool) {
        let n = kind.input_ports().len();
        for bits in 0..(1u32 << n) {
            let ins: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let vals: Vec<LogicValue> = ins.iter().map(|&b| LogicValue::from_bool(b)).collect();
            assert_eq!(
                eval_primitive(kind, &vals).unwrap(),
                LogicValue::from_bool(f(&ins)),
                "{kind} {ins:?}"
            );
        }
    }

    #[test]
    fn boolean_truth_tables() {
        all_gates_exhaustive(PrimitiveKind::Not, |i| !i[0]);
        all_gates_exhaustive(PrimitiveKind::Buf, |i| i[0]);
        all_gates_exhaustive(PrimitiveKind::And2, |i| i[0] & i[1]);
        all_gates_exhaustive(PrimitiveKind::Nand2, |i| !(i[0] & i[1]));
        all_gates_exhaustive(PrimitiveKind::Or2, |i| i[0] | i[1]);
        all_gates_exhaustive(PrimitiveKind::Nor2, |i| !(i[0] | i[1]));
        all_gates_exhaustive(PrimitiveKind::Xor2, |i| i[0] ^ i[1]);
        all_gates_exhaustive(PrimitiveKind::Const0, |_| false);
        all_gates_exhaustive(PrimitiveKind::Const1, |_| true);
    }

    #[test]
    fn controlling_values() {
        assert_eq!(eval_primitive(PrimitiveKind::Nand2, &[L1, L1]).unwrap(), L0);
        assert_eq!(eval_primitive(PrimitiveKind::Nand2, &[L0, X]).unwrap(), L1);
        assert_eq!(eval_primitive(PrimitiveKind::Nand2, &[L1, X]).unwrap(), X);
        assert_eq!(eval_primitive(PrimitiveKind::Or2, &[Z, L1]).unwrap(), L1);
        assert_eq!(eval_primitive(PrimitiveKind::Xor2, &[Z, L1]).unwrap(), X);
    }

    #[test]
    fn transmission_gate() {
        let tg = |i, e, eb| eval_primitive(PrimitiveKind::Tgate, &[i, e, eb]).unwrap();
        assert_eq!(tg(L1, L0, L1), Z);
        assert_eq!(tg(L1, L1, L0), L1);
        assert_eq!(tg(L0, L1, L0), L0);
        assert_eq!(tg(L1, X, L1), X);
        assert_eq!(tg(Z, L1, L0), Z);
        // one device on still conducts
        assert_eq!(tg(L0, L1, L1), L0);
        assert_eq!(tg(L1, L0, L0), L1);
    }

    #[test]
    fn clocked_inverter() {
        let ci = |i, e, eb| eval_primitive(PrimitiveKind::Cinv, &[i, e, eb]).unwrap();
        assert_eq!(ci(L1, L1, L0), L0);
        assert_eq!(ci(L0, L1, L0), L1);
        assert_eq!(ci(L0, L0, L1), Z);
        // only the nMOS stack enabled: can pull down, cannot pull up
        assert_eq!(ci(L1, L1, L1), L0);
        assert_eq!(ci(L0, L1, L1), Z);
        // only the pMOS stack enabled
        assert_eq!(ci(L0, L0, L0), L1);
        assert_eq!(ci(L1, L0, L0), Z);
        assert_eq!(ci(X, L1, L0), X);
    }

    #[test]
    fn arity_mismatch_is_error() {
        assert!(matches!(eval_primitive(PrimitiveKind::Nand2, &[L1]), Err(NetlistError::Arity { .. })));
        let mut n = Netlist::new("t");
        let a = n.add_input("a");
        let y = n.add_output("y");
        assert!(n.add_gate("g", PrimitiveKind::Nand2, &[a], y, Time::ns(1)).is_err());
    }

    #[test]
    fn multiple_drivers_diagnostic() {
        let mut n = Netlist::new("t");
        let a = n.add_input("a");
        let b = n.add_input("b");
        let y = n.add_output("y");
        n.add_gate("g1", PrimitiveKind::Nand2, &[a, b], y, Time::ns(1)).unwrap();
        n.add_gate("g2", PrimitiveKind::Nand2, &[a, b], y, Time::ns(1)).unwrap();
        let diags = n.validate().unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::MultipleDrivers { .. })), "{diags:?}");
        let text = alloc::format!("{}", diags[0]);
        assert!(text.contains("multiple drivers"));

        n.set_resolved(y);
        assert!(n.validate().is_ok());
    }

    #[test]
    fn zero_delay_cycle_diagnostic() {
        let mut n = Netlist::new("t");
        let y = n.add_output("y");
        n.add_gate("inv", PrimitiveKind::Not, &[y], y, Time::ZERO).unwrap();
        let diags = n.validate().unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::ZeroDelayCycle { .. })), "{diags:?}");

        let mut n = Netlist::new("t");
        let y = n.add_output("y");
        n.add_gate("inv", PrimitiveKind::Not, &[y], y, Time::ns(1)).unwrap();
        assert!(n.validate().is_ok());
    }

    #[test]
    fn unbound_and_dangling() {
        let mut n = Netlist::new("t");
        let a = n.add_input("a");
        let y = n.add_output("y");
        let _spare = n.add_net("spare").unwrap();
        n.add_component(Component {
            name: "g".into(),
            kind: CellKind::Primitive(PrimitiveKind::And2),
            pins: vec![Some(a), None, Some(y)],
            delay: DelaySpec::inertial(Time::ns(1)),
        })
        .unwrap();
        let diags = n.validate().unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::UnboundPort { port, .. } if port == "b")));
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::Dangling { net } if net == "spare")));
    }

    fn inverter_pair() -> Netlist {
        let mut inv = Netlist::new("inv");
        let a = inv.add_input("a");
        let y = inv.add_output("y");
        inv.add_gate("g", PrimitiveKind::Not, &[a], y, Time::ns(1)).unwrap();

        let mut buf = Netlist::new("buf2");
        let a = buf.add_input("a");
        let y = buf.add_output("y");
        let mid = buf.add_net("mid").unwrap();
        buf.add_instance("i0", &inv, &[("a", a), ("y", mid)]).unwrap();
        buf.add_instance("i1", &inv, &[("a", mid), ("y", y)]).unwrap();

        let mut top = Netlist::new("top");
        let a = top.add_input("a");
        let y = top.add_output("y");
        top.add_instance("u", &buf, &[("a", a), ("y", y)]).unwrap();
        top
    }

    #[test]
    fn flatten_names_and_idempotence() {
        let top = inverter_pair();
        assert!(top.validate().is_ok());
        let flat = top.flatten().unwrap();
        assert!(flat.is_flat());
        let names: Vec<&str> = flat.components().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["u.i0.g", "u.i1.g"]);
        assert!(flat.find_net("u.mid").is_some());
        assert_eq!(flat.flatten().unwrap(), flat);
        assert!(flat.validate().is_ok());
    }

    #[test]
    fn flatten_unknown_subcircuit() {
        let mut n = Netlist::new("t");
        let a = n.add_input("a");
        n.add_component(Component {
            name: "u".into(),
            kind: CellKind::Instance("missing".into()),
            pins: vec![Some(a)],
            delay: DelaySpec::inertial(Time::ZERO),
        })
        .unwrap();
        assert!(matches!(n.flatten(), Err(NetlistError::UnknownSubcircuit { .. })));
        assert!(n.validate().is_err());
    }

    #[test]
    fn loops_and_reachability() {
        let mut n = Netlist::new("latch");
        let a = n.add_input("a");
        let m = n.add_net("m").unwrap();
        let mb = n.add_output("mb");
        n.add_gate("pass", PrimitiveKind::Buf, &[a], m, Time::ns(1)).unwrap();
        n.add_gate("i1", PrimitiveKind::Not, &[m], mb, Time::ns(1)).unwrap();
        n.add_gate("i2", PrimitiveKind::Not, &[mb], m, Time::ns(1)).unwrap();
        let loops = n.feedback_loops(m);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 2);
        assert!(n.reaches(mb, m));
        assert!(!n.reaches(mb, a));
    }
}
