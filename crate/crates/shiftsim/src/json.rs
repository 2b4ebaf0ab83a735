//! JSON netlist, stimulus and delay-configuration files.
//!
//! Every document carries `"format": 1`. Times are written in nanoseconds
//! (fractions allowed) except component delays, which are integral
//! picoseconds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use shiftsim_core::netlist::FLOP_PORTS;
use shiftsim_core::sim::{ClockSpec, StimulusEvent};
use shiftsim_core::{
    CellDelayConfig, CellKind, Component, DelayModel, DelaySpec, Diagnostic, FlipFlopVariant, LogicValue, Net,
    Netlist, PrimitiveKind, Stimulus, Time,
};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported format version {0} (expected 1)")]
    Version(u64),
    #[error("invalid netlist:{}", .0.iter().map(|d| format!("\n  {d}")).collect::<String>())]
    Invalid(Vec<Diagnostic>),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Schema { path: path.into(), message: message.into() }
}

fn check_version(format: Option<u64>) -> Result<(), FormatError> {
    match format {
        None | Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(FormatError::Version(v)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortsDoc {
    #[serde(rename = "in", default)]
    inputs: Vec<String>,
    #[serde(rename = "out", default)]
    outputs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NetDoc {
    Plain(String),
    Flagged {
        name: String,
        #[serde(default, skip_serializing_if = "is_false")]
        resolved: bool,
        #[serde(default, skip_serializing_if = "is_false")]
        storage: bool,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    id: String,
    kind: String,
    conn: BTreeMap<String, String>,
    #[serde(default)]
    delay_ps: u64,
    #[serde(default, skip_serializing_if = "is_false")]
    transport: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    name: String,
    ports: PortsDoc,
    nets: Vec<NetDoc>,
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetlistDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<u64>,
    #[serde(flatten)]
    top: CircuitDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    subcircuits: BTreeMap<String, CircuitDoc>,
}

fn flop_kind_name(v: FlipFlopVariant) -> String {
    format!("FLOP_{}", v.name().to_ascii_uppercase())
}

fn kind_name(kind: &CellKind) -> String {
    match kind {
        CellKind::Primitive(p) => p.name().to_string(),
        CellKind::Flop(v) => flop_kind_name(*v),
        CellKind::Instance(name) => name.clone(),
    }
}

/// `scope` holds the definitions that instance kinds in `n` refer to.
fn circuit_doc(n: &Netlist, scope: &Netlist) -> CircuitDoc {
    let nets = n
        .nets()
        .iter()
        .map(|net| {
            if net.resolved || net.storage {
                NetDoc::Flagged { name: net.name.clone(), resolved: net.resolved, storage: net.storage }
            } else {
                NetDoc::Plain(net.name.clone())
            }
        })
        .collect();
    let components = n
        .components()
        .iter()
        .map(|c| {
            let ports = scope.port_names(&c.kind).map(|p| p.0).unwrap_or_default();
            let conn = ports
                .into_iter()
                .zip(&c.pins)
                .filter_map(|(port, pin)| pin.map(|net| (port, n.net_name(net).to_string())))
                .collect();
            ComponentDoc {
                id: c.name.clone(),
                kind: kind_name(&c.kind),
                conn,
                delay_ps: c.delay.propagation.as_ps(),
                transport: c.delay.model == DelayModel::Transport,
            }
        })
        .collect();
    CircuitDoc {
        name: n.name().to_string(),
        ports: PortsDoc {
            inputs: n.input_names().into_iter().map(String::from).collect(),
            outputs: n.output_names().into_iter().map(String::from).collect(),
        },
        nets,
        components,
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn serialize_netlist(n: &Netlist) -> String {
    let doc = NetlistDoc {
        format: Some(FORMAT_VERSION),
        top: circuit_doc(n, n),
        subcircuits: n.definitions().iter().map(|(k, d)| (k.clone(), circuit_doc(d, n))).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("netlist serializes");
    s.push('\n');
    s
}

/// Parse and validate a netlist document.
pub fn parse_netlist(text: &str) -> Result<Netlist, FormatError> {
    let doc: NetlistDoc = serde_json::from_str(text)?;
    check_version(doc.format)?;
    let mut built: BTreeMap<String, Netlist> = BTreeMap::new();
    let mut visiting = BTreeSet::new();
    for name in doc.subcircuits.keys() {
        build_subcircuit(name, &doc.subcircuits, &mut built, &mut visiting)?;
    }
    let mut top = build_circuit(&doc.top, "", &built)?;
    for def in built.values() {
        top.add_definition(def).map_err(|e| schema("subcircuits", e.to_string()))?;
    }
    top.validate().map_err(FormatError::Invalid)?;
    Ok(top)
}

fn build_subcircuit(
    name: &str,
    docs: &BTreeMap<String, CircuitDoc>,
    built: &mut BTreeMap<String, Netlist>,
    visiting: &mut BTreeSet<String>,
) -> Result<(), FormatError> {
    if built.contains_key(name) {
        return Ok(());
    }
    let path = format!("subcircuits.{name}");
    if !visiting.insert(name.to_string()) {
        return Err(schema(path, "subcircuit instantiates itself"));
    }
    let doc = &docs[name];
    if doc.name != name {
        return Err(schema(format!("{path}.name"), format!("expected `{name}`, found `{}`", doc.name)));
    }
    for c in &doc.components {
        if docs.contains_key(&c.kind) && !is_builtin(&c.kind) {
            build_subcircuit(&c.kind, docs, built, visiting)?;
        }
    }
    let n = build_circuit(doc, &format!("{path}."), built)?;
    visiting.remove(name);
    built.insert(name.to_string(), n);
    Ok(())
}

fn is_builtin(kind: &str) -> bool {
    PrimitiveKind::from_name(kind).is_some() || flop_variant(kind).is_some()
}

fn flop_variant(kind: &str) -> Option<FlipFlopVariant> {
    kind.strip_prefix("FLOP_").and_then(|v| v.parse().ok())
}

fn build_circuit(doc: &CircuitDoc, path: &str, defs: &BTreeMap<String, Netlist>) -> Result<Netlist, FormatError> {
    let mut n = Netlist::new(doc.name.clone());
    for (i, net) in doc.nets.iter().enumerate() {
        let net = match net {
            NetDoc::Plain(name) => Net { name: name.clone(), resolved: false, storage: false },
            NetDoc::Flagged { name, resolved, storage } => {
                Net { name: name.clone(), resolved: *resolved || *storage, storage: *storage }
            }
        };
        if n.find_net(&net.name).is_some() {
            return Err(schema(format!("{path}nets[{i}]"), format!("duplicate net `{}`", net.name)));
        }
        n.push_net(net);
    }
    for (dir, names) in [("in", &doc.ports.inputs), ("out", &doc.ports.outputs)] {
        for (i, p) in names.iter().enumerate() {
            if n.find_net(p).is_none() {
                return Err(schema(format!("{path}ports.{dir}[{i}]"), format!("port `{p}` is not a listed net")));
            }
            if dir == "in" {
                n.add_input(p);
            } else {
                n.add_output(p);
            }
        }
    }
    for (i, c) in doc.components.iter().enumerate() {
        let cpath = format!("{path}components[{i}]");
        let (kind, ports): (CellKind, Vec<String>) = if let Some(p) = PrimitiveKind::from_name(&c.kind) {
            let mut ports: Vec<String> = p.input_ports().iter().map(|s| s.to_string()).collect();
            ports.push(p.output_port().to_string());
            (CellKind::Primitive(p), ports)
        } else if let Some(v) = flop_variant(&c.kind) {
            (CellKind::Flop(v), FLOP_PORTS.iter().map(|s| s.to_string()).collect())
        } else if let Some(def) = defs.get(&c.kind) {
            let ports = def.input_names().into_iter().chain(def.output_names()).map(String::from).collect();
            (CellKind::Instance(c.kind.clone()), ports)
        } else {
            return Err(schema(format!("{cpath}.kind"), format!("unknown kind `{}`", c.kind)));
        };
        for port in c.conn.keys() {
            if !ports.contains(port) {
                return Err(schema(format!("{cpath}.conn"), format!("`{}` has no port `{port}`", c.kind)));
            }
        }
        let mut pins = Vec::with_capacity(ports.len());
        for port in &ports {
            pins.push(match c.conn.get(port) {
                None => None,
                Some(net) => Some(n.find_net(net).ok_or_else(|| {
                    schema(format!("{cpath}.conn.{port}"), format!("unknown net `{net}`"))
                })?),
            });
        }
        let delay = Time::ps(c.delay_ps);
        let delay = if c.transport { DelaySpec::transport(delay) } else { DelaySpec::inertial(delay) };
        n.add_component(Component { name: c.id.clone(), kind, pins, delay })
            .map_err(|e| schema(cpath, e.to_string()))?;
    }
    Ok(n)
}

fn ns_to_time(ns: f64, path: &str) -> Result<Time, FormatError> {
    if !ns.is_finite() || ns < 0.0 {
        return Err(schema(path, format!("time must be a non-negative number of ns, got {ns}")));
    }
    Ok(Time::ps((ns * 1000.0).round() as u64))
}

fn time_to_ns(t: Time) -> Value {
    if t.as_ps().is_multiple_of(1000) {
        Value::from(t.as_ps() / 1000)
    } else {
        Value::from(t.as_ns_f64())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDoc {
    t_ns: f64,
    port: String,
    v: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClockDoc {
    port: String,
    period_ns: f64,
    #[serde(default)]
    start_ns: f64,
    /// Fraction of the period spent high.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duty: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StimulusItem {
    Event(EventDoc),
    Clock { clock: ClockDoc },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StimulusDoc {
    List(Vec<StimulusItem>),
    Object {
        format: Option<u64>,
        #[serde(default)]
        events: Vec<EventDoc>,
        clock: Option<ClockDoc>,
    },
}

fn parse_value(v: &str, path: &str) -> Result<LogicValue, FormatError> {
    let mut chars = v.chars();
    match (chars.next().and_then(LogicValue::from_char), chars.next()) {
        (Some(value), None) => Ok(value),
        _ => Err(schema(path, format!("value must be one of 0, 1, x, z; got `{v}`"))),
    }
}

fn clock_spec(doc: &ClockDoc, path: &str) -> Result<ClockSpec, FormatError> {
    let period = ns_to_time(doc.period_ns, &format!("{path}.period_ns"))?;
    if period == Time::ZERO {
        return Err(schema(format!("{path}.period_ns"), "clock period must be positive"));
    }
    let start = ns_to_time(doc.start_ns, &format!("{path}.start_ns"))?;
    let mut spec = ClockSpec::new(doc.port.clone(), period, start);
    if let Some(duty) = doc.duty {
        if !(0.0..=1.0).contains(&duty) {
            return Err(schema(format!("{path}.duty"), "duty must lie in [0, 1]"));
        }
        spec.high = Time::ps((period.as_ps() as f64 * duty).round() as u64);
    }
    Ok(spec)
}

/// Parse a stimulus: either a bare list of events (optionally with one
/// `{"clock": {...}}` item) or `{"format": 1, "events": [...], "clock": {...}}`.
/// Events are sorted by time; ports are checked when simulated.
pub fn parse_stimulus(text: &str) -> Result<Stimulus, FormatError> {
    let doc: StimulusDoc = serde_json::from_str(text)?;
    type Events = Vec<(usize, EventDoc)>;
    type Clocks = Vec<(String, ClockDoc)>;
    let (events, clocks): (Events, Clocks) = match doc {
        StimulusDoc::List(items) => {
            let mut events = Vec::new();
            let mut clocks = Vec::new();
            for (i, item) in items.into_iter().enumerate() {
                match item {
                    StimulusItem::Event(e) => events.push((i, e)),
                    StimulusItem::Clock { clock } => clocks.push((format!("[{i}].clock"), clock)),
                }
            }
            (events, clocks)
        }
        StimulusDoc::Object { format, events, clock } => {
            check_version(format)?;
            (events.into_iter().enumerate().collect(), clock.into_iter().map(|c| ("clock".to_string(), c)).collect())
        }
    };
    if clocks.len() > 1 {
        return Err(schema(&clocks[1].0, "only one clock may be given"));
    }
    let mut out = Vec::with_capacity(events.len());
    for (i, e) in events {
        let path = format!("events[{i}]");
        out.push(StimulusEvent {
            time: ns_to_time(e.t_ns, &format!("{path}.t_ns"))?,
            port: e.port,
            value: parse_value(&e.v, &format!("{path}.v"))?,
        });
    }
    let clock = match clocks.first() {
        Some((path, c)) => Some(clock_spec(c, path)?),
        None => None,
    };
    Ok(Stimulus::from_events(out, clock))
}

pub fn serialize_stimulus(s: &Stimulus) -> String {
    let events: Vec<Value> = s
        .events()
        .iter()
        .map(|e| {
            serde_json::json!({
                "t_ns": time_to_ns(e.time),
                "port": e.port,
                "v": e.value.to_char().to_ascii_lowercase().to_string(),
            })
        })
        .collect();
    let mut doc = serde_json::json!({ "format": FORMAT_VERSION, "events": events });
    if let Some(c) = s.clock() {
        let mut clock = serde_json::json!({
            "port": c.port,
            "period_ns": time_to_ns(c.period),
            "start_ns": time_to_ns(c.start),
        });
        if c.high.as_ps() * 2 != c.period.as_ps() {
            clock["duty"] = Value::from(c.high.as_ps() as f64 / c.period.as_ps() as f64);
        }
        doc["clock"] = clock;
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("stimulus serializes");
    text.push('\n');
    text
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<u64>,
    #[serde(default)]
    clk_to_q_ns: BTreeMap<String, f64>,
    #[serde(default)]
    gate_ns: BTreeMap<String, f64>,
}

/// Delay configuration. Entries left out keep their default.
pub fn parse_config(text: &str) -> Result<CellDelayConfig, FormatError> {
    let doc: ConfigDoc = serde_json::from_str(text)?;
    check_version(doc.format)?;
    let mut cfg = CellDelayConfig::default();
    for (name, ns) in &doc.clk_to_q_ns {
        let path = format!("clk_to_q_ns.{name}");
        let v: FlipFlopVariant = name.parse().map_err(|e: shiftsim_core::cells::UnknownVariant| schema(&path, e.to_string()))?;
        cfg.set_clk_to_q(v, ns_to_time(*ns, &path)?);
    }
    for (name, ns) in &doc.gate_ns {
        let path = format!("gate_ns.{name}");
        let kind = PrimitiveKind::from_name(&name.to_ascii_uppercase())
            .ok_or_else(|| schema(&path, format!("unknown gate `{name}`")))?;
        cfg.set_gate(kind, ns_to_time(*ns, &path)?);
    }
    cfg.validate().map_err(|e| schema("config", e.to_string()))?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &CellDelayConfig) -> String {
    let mut doc = serde_json::json!({ "format": FORMAT_VERSION });
    doc["clk_to_q_ns"] = FlipFlopVariant::ALL
        .into_iter()
        .map(|v| (v.name().to_string(), time_to_ns(cfg.clk_to_q(v))))
        .collect::<serde_json::Map<_, _>>()
        .into();
    doc["gate_ns"] = cfg
        .gates()
        .iter()
        .map(|(k, t)| (k.name().to_ascii_lowercase(), time_to_ns(*t)))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let mut text = serde_json::to_string_pretty(&doc).expect("config serializes");
    text.push('\n');
    text
}
