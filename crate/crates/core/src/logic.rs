//! Four-valued signal values, driver resolution and 4-bit words.

use core::fmt;

/// A single signal value.
///
/// `L0`/`L1` are the strong logic levels, `X` is unknown and `Z` is a
/// floating (undriven) net.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum LogicValue {
    L0,
    L1,
    #[default]
    X,
    Z,
}

impl LogicValue {
    pub const ALL: [LogicValue; 4] = [LogicValue::L0, LogicValue::L1, LogicValue::X, LogicValue::Z];

    #[inline]
    pub const fn from_bool(b: bool) -> Self {
        if b {
            LogicValue::L1
        } else {
            LogicValue::L0
        }
    }

    #[inline]
    pub const fn is_strong(self) -> bool {
        matches!(self, LogicValue::L0 | LogicValue::L1)
    }

    #[inline]
    pub const fn to_bool(self) -> Option<bool> {
        match self {
            LogicValue::L0 => Some(false),
            LogicValue::L1 => Some(true),
            _ => None,
        }
    }

    /// Value as seen by a gate input: a floating input reads as unknown.
    #[inline]
    pub const fn as_input(self) -> Self {
        match self {
            LogicValue::Z => LogicValue::X,
            v => v,
        }
    }

    pub const fn to_char(self) -> char {
        match self {
            LogicValue::L0 => '0',
            LogicValue::L1 => '1',
            LogicValue::X => 'x',
            LogicValue::Z => 'z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(LogicValue::L0),
            '1' => Some(LogicValue::L1),
            'x' | 'X' => Some(LogicValue::X),
            'z' | 'Z' => Some(LogicValue::Z),
            _ => None,
        }
    }

    /// Three-valued NOT (Z reads as X).
    #[inline]
    pub const fn not(self) -> Self {
        match self {
            LogicValue::L0 => LogicValue::L1,
            LogicValue::L1 => LogicValue::L0,
            _ => LogicValue::X,
        }
    }

    #[inline]
    pub const fn and(self, other: Self) -> Self {
        match (self.as_input(), other.as_input()) {
            (LogicValue::L0, _) | (_, LogicValue::L0) => LogicValue::L0,
            (LogicValue::L1, LogicValue::L1) => LogicValue::L1,
            _ => LogicValue::X,
        }
    }

    #[inline]
    pub const fn or(self, other: Self) -> Self {
        match (self.as_input(), other.as_input()) {
            (LogicValue::L1, _) | (_, LogicValue::L1) => LogicValue::L1,
            (LogicValue::L0, LogicValue::L0) => LogicValue::L0,
            _ => LogicValue::X,
        }
    }

    #[inline]
    pub const fn xor(self, other: Self) -> Self {
        match (self.to_bool(), other.to_bool()) {
            (Some(a), Some(b)) => LogicValue::from_bool(a ^ b),
            _ => LogicValue::X,
        }
    }
}

impl fmt::Display for LogicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Resolve the values of every driver attached to one net.
///
/// No drivers or only `Z` drivers float; a single non-`Z` driver wins; any
/// disagreement or unknown among the active drivers gives `X`.
pub fn resolve<I>(drivers: I) -> LogicValue
where
    I: IntoIterator<Item = LogicValue>,
{
    let mut acc = LogicValue::Z;
    for v in drivers {
        acc = match (acc, v) {
            (a, LogicValue::Z) => a,
            (LogicValue::Z, b) => b,
            (LogicValue::X, _) | (_, LogicValue::X) => LogicValue::X,
            (a, b) if a == b => a,
            _ => LogicValue::X,
        };
    }
    acc
}

/// Four bits `F1..F4`. `F1` is the most significant bit whenever the word is
/// read as an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word4(pub [LogicValue; 4]);

impl Word4 {
    pub const fn splat(v: LogicValue) -> Self {
        Word4([v; 4])
    }

    /// Low nibble of `value`, MSB into `F1`.
    pub const fn from_u8(value: u8) -> Self {
        Word4([
            LogicValue::from_bool(value & 0b1000 != 0),
            LogicValue::from_bool(value & 0b0100 != 0),
            LogicValue::from_bool(value & 0b0010 != 0),
            LogicValue::from_bool(value & 0b0001 != 0),
        ])
    }

    /// Integer value, or `None` if any bit is `X`/`Z`.
    pub fn to_u8(self) -> Option<u8> {
        self.0.iter().try_fold(0u8, |acc, b| Some((acc << 1) | b.to_bool()? as u8))
    }

    pub fn is_strong(self) -> bool {
        self.0.iter().all(|b| b.is_strong())
    }

    /// Bit `F{index}` with `index` in `1..=4`.
    pub fn bit(self, index: usize) -> LogicValue {
        self.0[index - 1]
    }

    pub fn bits(self) -> [LogicValue; 4] {
        self.0
    }
}

impl fmt::Display for Word4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::LogicValue::*;
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn resolve_examples() {
        assert_eq!(resolve([Z, L1]), L1);
        assert_eq!(resolve([L0, L1]), X);
        assert_eq!(resolve([]), Z);
        assert_eq!(resolve([Z, Z]), Z);
        assert_eq!(resolve([L1, L1, Z]), L1);
        assert_eq!(resolve([X, Z]), X);
        assert_eq!(resolve([L0, X]), X);
    }

    #[test]
    fn values_are_distinct() {
        for (i, a) in LogicValue::ALL.iter().enumerate() {
            for (j, b) in LogicValue::ALL.iter().enumerate() {
                assert_eq!(i == j, a == b);
            }
        }
    }

    #[test]
    fn word_msb_first() {
        let w = Word4::from_u8(0b1011);
        assert_eq!(w.bits(), [L1, L0, L1, L1]);
        assert_eq!(w.to_u8(), Some(11));
        assert_eq!(alloc::format!("{w}"), "1011");
        assert_eq!(Word4([L1, X, L0, L0]).to_u8(), None);
        for v in 0..16 {
            assert_eq!(Word4::from_u8(v).to_u8(), Some(v));
        }
    }

    fn any_value() -> impl Strategy<Value = LogicValue> {
        prop::sample::select(LogicValue::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn resolve_is_order_independent(mut vs in prop::collection::vec(any_value(), 0..6), seed in any::<u64>()) {
            let expected = resolve(vs.iter().copied());
            // deterministic shuffle
            let mut s = seed;
            for i in (1..vs.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                vs.swap(i, j);
            }
            prop_assert_eq!(resolve(vs.iter().copied()), expected);
        }

        #[test]
        fn resolve_is_associative(a in prop::collection::vec(any_value(), 0..4), b in prop::collection::vec(any_value(), 0..4)) {
            let whole: Vec<_> = a.iter().chain(b.iter()).copied().collect();
            let split = resolve([resolve(a.iter().copied()), resolve(b.iter().copied())]);
            prop_assert_eq!(resolve(whole), split);
        }
    }
}
