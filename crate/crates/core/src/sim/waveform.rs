use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::logic::LogicValue;
use crate::netlist::NetId;
use crate::time::Time;

/// Value-change history of every net in one simulation run.
///
/// Per net the change times are strictly increasing and consecutive values
/// differ; several changes of one net inside the same time step collapse into
/// the last one.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Waveform {
    names: Vec<String>,
    index: BTreeMap<String, NetId>,
    initial: Vec<LogicValue>,
    changes: Vec<Vec<(Time, LogicValue)>>,
    end: Time,
}

impl Waveform {
    pub(crate) fn new(names: Vec<String>, initial: Vec<LogicValue>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), NetId(i as u32))).collect();
        let changes = alloc::vec![Vec::new(); names.len()];
        Waveform { names, index, initial, changes, end: Time::ZERO }
    }

    pub(crate) fn record(&mut self, net: NetId, time: Time, value: LogicValue) {
        let initial = self.initial[net.index()];
        let list = &mut self.changes[net.index()];
        if let Some(&(t, _)) = list.last() {
            if t == time {
                list.pop();
            }
        }
        let previous = list.last().map_or(initial, |&(_, v)| v);
        if previous != value {
            list.push((time, value));
        }
    }

    pub(crate) fn set_end(&mut self, end: Time) {
        self.end = self.end.max(end);
    }

    pub fn end(&self) -> Time {
        self.end
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, net: NetId) -> &str {
        &self.names[net.index()]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    pub fn initial(&self, net: NetId) -> LogicValue {
        self.initial[net.index()]
    }

    pub fn changes(&self, net: NetId) -> &[(Time, LogicValue)] {
        &self.changes[net.index()]
    }

    /// Value after every change at or before `time`.
    pub fn value_at(&self, net: NetId, time: Time) -> LogicValue {
        let list = &self.changes[net.index()];
        let n = list.partition_point(|&(t, _)| t <= time);
        if n == 0 {
            self.initial[net.index()]
        } else {
            list[n - 1].1
        }
    }

    pub fn final_value(&self, net: NetId) -> LogicValue {
        self.changes[net.index()].last().map_or(self.initial[net.index()], |&(_, v)| v)
    }

    pub fn transition_count(&self, net: NetId) -> usize {
        self.changes[net.index()].len()
    }

    /// All changes of all nets, ordered by time then net id.
    pub fn timeline(&self) -> Vec<(Time, NetId, LogicValue)> {
        let mut all: Vec<(Time, NetId, LogicValue)> = self
            .changes
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&(t, v)| (t, NetId(i as u32), v)))
            .collect();
        all.sort_by_key(|&(t, n, _)| (t, n));
        all
    }
}
