use alloc::string::String;
use alloc::vec::Vec;

use crate::logic::LogicValue;
use crate::time::Time;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StimulusEvent {
    pub time: Time,
    pub port: String,
    pub value: LogicValue,
}

/// Free-running clock: low at `start`, high after `period - high`, repeating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockSpec {
    pub port: String,
    pub period: Time,
    pub start: Time,
    pub high: Time,
}

impl ClockSpec {
    /// 50% duty cycle.
    pub fn new(port: impl Into<String>, period: Time, start: Time) -> Self {
        ClockSpec { port: port.into(), period, start, high: Time(period.0 / 2) }
    }

    /// Transitions up to and including `until`.
    pub fn expand(&self, until: Time) -> Vec<StimulusEvent> {
        let mut out = Vec::new();
        if self.period == Time::ZERO {
            return out;
        }
        let low = self.period - self.high;
        let mut t = self.start;
        while t <= until {
            out.push(StimulusEvent { time: t, port: self.port.clone(), value: LogicValue::L0 });
            let rise = t + low;
            if rise <= until && self.high > Time::ZERO {
                out.push(StimulusEvent { time: rise, port: self.port.clone(), value: LogicValue::L1 });
            }
            t += self.period;
        }
        out
    }
}

/// Input waveforms applied to a netlist's input ports.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Stimulus {
    events: Vec<StimulusEvent>,
    clock: Option<ClockSpec>,
}

impl Stimulus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from unsorted events; equal times keep their given order.
    pub fn from_events(mut events: Vec<StimulusEvent>, clock: Option<ClockSpec>) -> Self {
        events.sort_by_key(|e| e.time);
        Stimulus { events, clock }
    }

    pub fn push(&mut self, time: Time, port: &str, value: LogicValue) {
        let at = self.events.partition_point(|e| e.time <= time);
        self.events.insert(at, StimulusEvent { time, port: port.into(), value });
    }

    /// Append an event that is known not to precede the last one.
    pub fn push_back(&mut self, time: Time, port: &str, value: LogicValue) {
        debug_assert!(self.events.last().is_none_or(|e| e.time <= time));
        self.events.push(StimulusEvent { time, port: port.into(), value });
    }

    pub fn set_clock(&mut self, clock: ClockSpec) {
        self.clock = Some(clock);
    }

    pub fn clock(&self) -> Option<&ClockSpec> {
        self.clock.as_ref()
    }

    pub fn events(&self) -> &[StimulusEvent] {
        &self.events
    }

    /// Explicit events merged with the expanded clock, stable by time.
    pub fn expand(&self, until: Time) -> Vec<StimulusEvent> {
        let mut all: Vec<StimulusEvent> = self.events.iter().filter(|e| e.time <= until).cloned().collect();
        if let Some(clock) = &self.clock {
            all.extend(clock.expand(until));
            all.sort_by_key(|e| e.time);
        }
        all
    }

    pub fn last_time(&self) -> Time {
        self.events.last().map_or(Time::ZERO, |e| e.time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LogicValue::*;

    #[test]
    fn clock_expansion() {
        let c = ClockSpec::new("clk", Time::ns(10), Time::ZERO);
        let times: Vec<(u64, LogicValue)> = c.expand(Time::ns(35)).iter().map(|e| (e.time.0 / 1000, e.value)).collect();
        assert_eq!(times, [(0, L0), (5, L1), (10, L0), (15, L1), (20, L0), (25, L1), (30, L0), (35, L1)]);
    }

    #[test]
    fn events_sorted() {
        let mut s = Stimulus::new();
        s.push(Time::ns(5), "a", L1);
        s.push(Time::ns(1), "a", L0);
        s.push(Time::ns(5), "b", L0);
        let order: Vec<&str> = s.events().iter().map(|e| e.port.as_str()).collect();
        assert_eq!(order, ["a", "a", "b"]);
        assert_eq!(s.events()[0].time, Time::ns(1));
    }
}
