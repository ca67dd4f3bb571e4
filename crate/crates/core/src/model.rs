//! Domain types and the letter/gesture alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One accelerometer reading. `t` is in milliseconds, accelerations in m/s².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelSample {
    pub t: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl AccelSample {
    pub fn new(t: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { t, ax, ay, az }
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.ax.is_finite() && self.ay.is_finite() && self.az.is_finite()
    }
}

/// A single recording with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<AccelSample>,
    sample_period: f64,
}

impl Trace {
    /// Validates the samples and derives the sample period as the median gap.
    pub fn new(samples: Vec<AccelSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooShort {
                what: "trace samples",
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Format(format!("non-finite value in sample {i}")));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::Format(format!(
                "time not strictly increasing at sample {} ({} after {})",
                i + 1,
                samples[i + 1].t,
                samples[i].t
            )));
        }
        let sample_period = median(samples.windows(2).map(|w| w[1].t - w[0].t).collect());
        Ok(Self {
            samples,
            sample_period,
        })
    }

    pub fn samples(&self) -> &[AccelSample] {
        &self.samples
    }

    /// Median inter-sample gap in milliseconds.
    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<AccelSample> {
        self.samples
    }
}

/// Lower median: for an even count the smaller of the two middle values, so
/// the result is always one of the observed gaps.
pub(crate) fn median(mut values: Vec<f64>) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// A rectilinear tilt of the phone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GesturePrimitive {
    L,
    U,
    R,
    D,
}

impl GesturePrimitive {
    pub const ALL: [GesturePrimitive; 4] = [Self::L, Self::U, Self::R, Self::D];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'L' => Some(Self::L),
            'U' => Some(Self::U),
            'R' => Some(Self::R),
            'D' => Some(Self::D),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::L => 'L',
            Self::U => 'U',
            Self::R => 'R',
            Self::D => 'D',
        }
    }

    /// True for L and R.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Self::L | Self::R)
    }
}

/// Which axis family a gesture curve is compared within.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisClass {
    XAxis,
    YAxis,
    BothAxes,
}

impl AxisClass {
    pub const ALL: [AxisClass; 3] = [Self::XAxis, Self::YAxis, Self::BothAxes];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::XAxis => "x_axis",
            Self::YAxis => "y_axis",
            Self::BothAxes => "both_axes",
        }
    }

    pub fn is_single_axis(self) -> bool {
        !matches!(self, Self::BothAxes)
    }
}

impl fmt::Display for AxisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An upper-case English letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Letter(u8);

impl Letter {
    pub fn new(c: char) -> Result<Self> {
        if c.is_ascii_uppercase() {
            Ok(Letter(c as u8))
        } else {
            Err(Error::UnknownLetter(c))
        }
    }

    /// Letters `A..=Z` in order.
    pub fn all() -> impl Iterator<Item = Letter> {
        (b'A'..=b'Z').map(Letter)
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }

    /// Zero-based alphabet position.
    pub fn index(self) -> usize {
        (self.0 - b'A') as usize
    }

    pub fn entry(self) -> &'static AlphabetEntry {
        &ALPHABET[self.index()]
    }

    /// Parses a string of letters such as `"CAB"`; whitespace is ignored.
    pub fn parse_sequence(s: &str) -> Result<Vec<Letter>> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::new)
            .collect()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl TryFrom<char> for Letter {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        Letter::new(c)
    }
}

impl TryFrom<String> for Letter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::new(c),
            _ => Err(Error::Format(format!("expected a single letter, got {s:?}"))),
        }
    }
}

impl From<Letter> for String {
    fn from(l: Letter) -> String {
        l.as_char().to_string()
    }
}

/// A row of the letter table: the gesture string and the letter's relative
/// frequency in English text (as a fraction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphabetEntry {
    pub letter: char,
    pub gesture: &'static str,
    pub rel_freq: f64,
}

impl AlphabetEntry {
    pub fn primitives(&self) -> impl Iterator<Item = GesturePrimitive> + '_ {
        self.gesture
            .chars()
            .map(|c| GesturePrimitive::from_char(c).expect("alphabet table holds only L/U/R/D"))
    }

    pub fn gesture_len(&self) -> usize {
        self.gesture.len()
    }

    /// The family implied by the gesture string alone: single-axis iff every
    /// primitive moves along the same axis.
    pub fn nominal_axis_class(&self) -> AxisClass {
        let horizontal = self.primitives().filter(|p| p.is_horizontal()).count();
        if horizontal == self.gesture_len() {
            AxisClass::XAxis
        } else if horizontal == 0 {
            AxisClass::YAxis
        } else {
            AxisClass::BothAxes
        }
    }
}

const fn entry(letter: char, gesture: &'static str, rel_freq: f64) -> AlphabetEntry {
    AlphabetEntry {
        letter,
        gesture,
        rel_freq,
    }
}

static ALPHABET: [AlphabetEntry; 26] = [
    entry('A', "U", 0.08167),
    entry('B', "RR", 0.01492),
    entry('C', "L", 0.02782),
    entry('D', "R", 0.04253),
    entry('E', "LL", 0.12702),
    entry('F', "LU", 0.02228),
    entry('G', "UL", 0.02015),
    entry('H', "RL", 0.06094),
    entry('I', "UD", 0.06966),
    entry('J', "RD", 0.00153),
    entry('K', "LUD", 0.00772),
    entry('L', "LD", 0.04025),
    entry('M', "UU", 0.02406),
    entry('N', "RUL", 0.06749),
    entry('O', "ULDR", 0.07507),
    entry('P', "DR", 0.01929),
    entry('Q', "DRULD", 0.00095),
    entry('R', "LRR", 0.05987),
    entry('S', "ULD", 0.06327),
    entry('T', "DLR", 0.09056),
    entry('U', "LDR", 0.02758),
    entry('V', "D", 0.00978),
    entry('W', "DD", 0.02360),
    entry('X', "UDLR", 0.00150),
    entry('Y', "LRD", 0.01974),
    entry('Z', "URLD", 0.00074),
];

/// All 26 letters with their gestures and relative frequencies.
pub fn alphabet_table() -> &'static [AlphabetEntry] {
    &ALPHABET
}

pub fn lookup(letter: char) -> Result<&'static AlphabetEntry> {
    Letter::new(letter).map(Letter::entry)
}

pub fn gesture_length(letter: char) -> Result<usize> {
    lookup(letter).map(AlphabetEntry::gesture_len)
}

/// Frequency-weighted mean number of primitives per letter.
pub fn mean_gesture_length() -> f64 {
    ALPHABET
        .iter()
        .map(|e| e.gesture_len() as f64 * e.rel_freq)
        .sum()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn table_lookups() {
        let a = lookup('A').unwrap();
        assert_eq!(a.gesture, "U");
        assert_eq!(a.rel_freq, 0.08167);
        let q = lookup('Q').unwrap();
        assert_eq!(q.gesture, "DRULD");
        assert_eq!(q.rel_freq, 0.00095);
    }

    #[test]
    fn frequencies_sum_to_one() {
        let total: f64 = alphabet_table().iter().map(|e| e.rel_freq).sum();
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }

    #[test]
    fn gesture_lengths() {
        assert_eq!(gesture_length('V').unwrap(), 1);
        assert_eq!(gesture_length('O').unwrap(), 4);
        assert_eq!(gesture_length('Q').unwrap(), 5);
        assert!(matches!(gesture_length('?'), Err(Error::UnknownLetter('?'))));
        assert!(matches!(gesture_length('a'), Err(Error::UnknownLetter('a'))));
    }

    #[test]
    fn mean_length_per_letter() {
        assert!((mean_gesture_length() - 2.332).abs() < 0.005);
    }

    #[test]
    fn gestures_are_distinct() {
        let set: HashSet<_> = alphabet_table().iter().map(|e| e.gesture).collect();
        assert_eq!(set.len(), 26);
        for (i, e) in alphabet_table().iter().enumerate() {
            assert_eq!(e.letter, (b'A' + i as u8) as char);
            assert!(!e.gesture.is_empty());
            assert_eq!(e.primitives().count(), e.gesture_len());
        }
    }

    #[test]
    fn nominal_families() {
        let fam = |c| lookup(c).unwrap().nominal_axis_class();
        assert_eq!(fam('B'), AxisClass::XAxis);
        assert_eq!(fam('R'), AxisClass::XAxis);
        assert_eq!(fam('W'), AxisClass::YAxis);
        assert_eq!(fam('L'), AxisClass::BothAxes);
        let x: String = Letter::all()
            .filter(|l| l.entry().nominal_axis_class() == AxisClass::XAxis)
            .map(|l| l.as_char())
            .collect();
        let y: String = Letter::all()
            .filter(|l| l.entry().nominal_axis_class() == AxisClass::YAxis)
            .map(|l| l.as_char())
            .collect();
        assert_eq!(x, "BCDEHR");
        assert_eq!(y, "AIMVW");
    }

    #[test]
    fn trace_validation() {
        let s = |t| AccelSample::new(t, 0.0, 0.0, 9.8);
        let tr = Trace::new(vec![s(0.0), s(10.0), s(20.0)]).unwrap();
        assert_eq!(tr.sample_period(), 10.0);
        assert!(matches!(
            Trace::new(vec![s(0.0), s(10.0), s(5.0)]),
            Err(Error::Format(_))
        ));
        assert!(matches!(Trace::new(vec![s(0.0)]), Err(Error::TooShort { .. })));
        let bad = AccelSample::new(20.0, f64::NAN, 0.0, 0.0);
        assert!(Trace::new(vec![s(0.0), s(10.0), bad]).is_err());
    }

    #[test]
    fn letter_serde() {
        let l = Letter::new('Q').unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, "\"Q\"");
        let back: Letter = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<Letter>("\"QQ\"").is_err());
    }
}
