//! Seeded synthetic recordings with known ground truth.
//!
//! Each primitive is one half-sine lobe on its axis (R → +x, L → −x,
//! D → +y, U → −y). Letters chain their primitives with short quiet gaps,
//! and a stream brackets every letter with isotropic white-noise jerks.
//! Gravity sits on the z axis as a constant.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{alphabet_table, AccelSample, GesturePrimitive, Letter, Trace};

pub const GRAVITY: f64 = 9.81;

/// Quiet samples between consecutive primitives of one letter.
pub const PRIMITIVE_GAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub sample_period_ms: f64,
    /// Samples per primitive lobe before jitter.
    pub pulse_duration: usize,
    pub pulse_amplitude: f64,
    pub noise_sd: f64,
    /// Samples per jerk burst.
    pub jerk_duration: usize,
    /// Quiet samples on each side of a letter, between it and the jerks.
    pub rest_samples: usize,
    pub jerk_amplitude_sd: f64,
    /// Fractional uniform jitter of each lobe's amplitude.
    pub amplitude_jitter: f64,
    /// Fractional uniform jitter of each lobe's duration.
    pub duration_jitter: f64,
    /// Fractional uniform jitter of each timestamp, in sample periods.
    pub time_jitter: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sample_period_ms: 10.0,
            pulse_duration: 40,
            pulse_amplitude: 3.0,
            noise_sd: 0.15,
            jerk_duration: 20,
            rest_samples: 8,
            jerk_amplitude_sd: 6.0,
            amplitude_jitter: 0.15,
            duration_jitter: 0.15,
            time_jitter: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn noiseless(mut self) -> Self {
        self.noise_sd = 0.0;
        self
    }

    pub fn validate(&self, window: usize) -> Result<()> {
        if self.jerk_duration < window {
            return Err(Error::Config(format!(
                "jerk_duration {} shorter than the segmentation window {window}",
                self.jerk_duration
            )));
        }
        if !(self.sample_period_ms > 0.0) || self.pulse_duration < 2 {
            return Err(Error::Config("sample period and pulse duration must be positive".into()));
        }
        for (name, v) in [
            ("amplitude_jitter", self.amplitude_jitter),
            ("duration_jitter", self.duration_jitter),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Config(format!("{name} {v} outside [0, 1)")));
            }
        }
        if !(0.0..0.5).contains(&self.time_jitter) {
            return Err(Error::Config(format!("time_jitter {} outside [0, 0.5)", self.time_jitter)));
        }
        if self.noise_sd < 0.0 || self.jerk_amplitude_sd < 0.0 {
            return Err(Error::Config("standard deviations must be non-negative".into()));
        }
        Ok(())
    }
}

/// Per-sample `[ax, ay, az]`.
pub type Motion = Vec<[f64; 3]>;

/// A generated stream and the sample span of each letter in it. Spans
/// include the rest samples around the letter.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub letters: Vec<Letter>,
    /// Inclusive sample spans of the letters.
    pub spans: Vec<(usize, usize)>,
}

/// Stateful generator; the same config (including seed) yields bit-identical output.
pub struct Generator {
    config: SynthConfig,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(config: SynthConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self { config, rng }
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    fn gauss(&mut self, sd: f64) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        sd * z
    }

    fn jitter(&mut self, frac: f64) -> f64 {
        1.0 + frac * (2.0 * self.rng.random::<f64>() - 1.0)
    }

    fn quiet(&mut self, len: usize) -> Motion {
        let sd = self.config.noise_sd;
        (0..len)
            .map(|_| [self.gauss(sd), self.gauss(sd), GRAVITY + self.gauss(sd)])
            .collect()
    }

    /// One half-sine lobe `A·sin(π s / T)`, `s = 0..T`, on the primitive's axis.
    pub fn primitive(&mut self, p: GesturePrimitive) -> Motion {
        let c = &self.config;
        let (dj, aj) = (c.duration_jitter, c.amplitude_jitter);
        let (base_t, base_a) = (c.pulse_duration as f64, c.pulse_amplitude);
        let duration = (base_t * self.jitter(dj)).round().max(2.0) as usize;
        let amplitude = base_a * self.jitter(aj);
        let (axis, sign) = match p {
            GesturePrimitive::R => (0, 1.0),
            GesturePrimitive::L => (0, -1.0),
            GesturePrimitive::D => (1, 1.0),
            GesturePrimitive::U => (1, -1.0),
        };
        let mut out = self.quiet(duration);
        for (s, sample) in out.iter_mut().enumerate() {
            let lobe = amplitude * (std::f64::consts::PI * s as f64 / duration as f64).sin();
            sample[axis] += sign * lobe;
        }
        out
    }

    pub fn letter(&mut self, letter: Letter) -> Motion {
        let mut out = Vec::new();
        for (i, p) in letter.entry().primitives().enumerate() {
            if i > 0 {
                out.extend(self.quiet(PRIMITIVE_GAP));
            }
            out.extend(self.primitive(p));
        }
        out
    }

    /// Isotropic white noise: every sample points in a uniformly random
    /// direction with magnitude `√3·sd`, so each axis has standard deviation
    /// `sd` while the burst's energy stays steady from sample to sample.
    pub fn jerk(&mut self) -> Motion {
        let radius = 3f64.sqrt() * self.config.jerk_amplitude_sd;
        (0..self.config.jerk_duration)
            .map(|_| {
                let [x, y, z]: [f64; 3] = UnitSphere.sample(&mut self.rng);
                [radius * x, radius * y, GRAVITY + radius * z]
            })
            .collect()
    }

    /// Jerk, letter, jerk, …, letter, jerk, with a short rest either side
    /// of every letter.
    pub fn stream(&mut self, letters: &[Letter]) -> Result<(Trace, GroundTruth)> {
        if letters.is_empty() {
            return Err(Error::Config("cannot generate an empty stream".into()));
        }
        let mut motion = self.jerk();
        let mut spans = Vec::with_capacity(letters.len());
        for &l in letters {
            let start = motion.len();
            let rest = self.config.rest_samples;
            motion.extend(self.quiet(rest));
            motion.extend(self.letter(l));
            motion.extend(self.quiet(rest));
            spans.push((start, motion.len() - 1));
            motion.extend(self.jerk());
        }
        let trace = self.timestamp(motion)?;
        Ok((
            trace,
            GroundTruth {
                letters: letters.to_vec(),
                spans,
            },
        ))
    }

    fn timestamp(&mut self, motion: Motion) -> Result<Trace> {
        let period = self.config.sample_period_ms;
        let tj = self.config.time_jitter;
        let samples = motion
            .into_iter()
            .enumerate()
            .map(|(i, [ax, ay, az])| {
                let offset = if tj > 0.0 {
                    tj * (2.0 * self.rng.random::<f64>() - 1.0)
                } else {
                    0.0
                };
                AccelSample::new((i as f64 + offset) * period, ax, ay, az)
            })
            .collect();
        Trace::new(samples)
    }

    /// Draws `k` letters i.i.d. from the English letter frequencies.
    pub fn random_letters(&mut self, k: usize) -> Vec<Letter> {
        let weights = alphabet_table().iter().map(|e| e.rel_freq);
        let dist = WeightedIndex::new(weights).expect("positive frequencies");
        let all: Vec<Letter> = Letter::all().collect();
        (0..k).map(|_| all[dist.sample(&mut self.rng)]).collect()
    }
}

pub fn gen_primitive(p: GesturePrimitive, config: &SynthConfig) -> Motion {
    Generator::new(config.clone()).primitive(p)
}

pub fn gen_letter(letter: Letter, config: &SynthConfig) -> Motion {
    Generator::new(config.clone()).letter(letter)
}

pub fn gen_stream(letters: &[Letter], config: &SynthConfig) -> Result<(Trace, GroundTruth)> {
    Generator::new(config.clone()).stream(letters)
}
