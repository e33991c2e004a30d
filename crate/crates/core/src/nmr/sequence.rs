//! Pulse sequences: ordered events, their text form, and replay.
//!
//! Text form, one event per line, read top to bottom:
//!
//! ```text
//! # sequence: soft_z(A)
//! DELAY t=0.000326797386
//! PULSE targets=B axis=x angle=3.14159265
//! GRAD mode=physical
//! ```
//!
//! `DELAY` takes an optional `evolve=coupling` for coupling-only evolution.
//! Numbers are written with 9 significant digits.

use std::fmt;

use super::density::{apply_hard_pulse, evolution_energies, free_evolve_with, gradient_crush};
use super::operators::{rotation, Matrix4C};
use super::{Axis, DeviationDensityMatrix, NmrError, NmrResult, Spin, SpinSystemParams, Targets};
use crate::fmt::sig;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientMode {
    /// Dephase every element of nonzero coherence order.
    Physical,
    /// Dephase every off-diagonal element.
    CrushAll,
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMode::Physical => "physical",
            GradientMode::CrushAll => "crush_all",
        })
    }
}

impl std::str::FromStr for GradientMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "physical" => Ok(GradientMode::Physical),
            "crush_all" => Ok(GradientMode::CrushAll),
            _ => Err(format!("unknown gradient mode {s:?}")),
        }
    }
}

/// Hamiltonian used during a delay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evolution {
    Full,
    /// Only the `2πJ I_z^A I_z^B` term; offsets treated as refocused.
    CouplingOnly,
}

impl fmt::Display for Evolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evolution::Full => "full",
            Evolution::CouplingOnly => "coupling",
        })
    }
}

impl std::str::FromStr for Evolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Evolution::Full),
            "coupling" => Ok(Evolution::CouplingOnly),
            _ => Err(format!("unknown evolution {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardPulse {
    pub targets: Targets,
    pub axis: Axis,
    /// Radians.
    pub angle: f64,
}

impl HardPulse {
    pub fn new(targets: Targets, axis: Axis, angle: f64) -> Self {
        Self {
            targets,
            axis,
            angle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseEvent {
    Pulse(HardPulse),
    Delay { duration: f64, evolution: Evolution },
    Gradient(GradientMode),
}

impl PulseEvent {
    pub fn pulse(targets: Targets, axis: Axis, angle: f64) -> Self {
        PulseEvent::Pulse(HardPulse::new(targets, axis, angle))
    }

    pub fn delay(duration: f64) -> Self {
        PulseEvent::Delay {
            duration,
            evolution: Evolution::Full,
        }
    }

    fn validate(&self) -> NmrResult<()> {
        match *self {
            PulseEvent::Pulse(p) if !p.angle.is_finite() => Err(NmrError::Event(format!(
                "pulse angle {} is not finite",
                p.angle
            ))),
            PulseEvent::Delay { duration, .. } if !(duration >= 0.0 && duration.is_finite()) => {
                Err(NmrError::Event(format!(
                    "delay {duration} must be finite and non-negative"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PulseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Pulse(p) => write!(
                f,
                "PULSE targets={} axis={} angle={}",
                p.targets,
                p.axis,
                sig(p.angle)
            ),
            PulseEvent::Delay {
                duration,
                evolution: Evolution::Full,
            } => {
                write!(f, "DELAY t={}", sig(*duration))
            }
            PulseEvent::Delay {
                duration,
                evolution,
            } => {
                write!(f, "DELAY t={} evolve={}", sig(*duration), evolution)
            }
            PulseEvent::Gradient(mode) => write!(f, "GRAD mode={mode}"),
        }
    }
}

/// Ordered, validated list of events.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    label: String,
    events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            events: Vec::new(),
        }
    }

    pub fn from_events(label: impl Into<String>, events: Vec<PulseEvent>) -> NmrResult<Self> {
        let mut seq = Self::new(label);
        for e in events {
            seq.push(e)?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, event: PulseEvent) -> NmrResult<()> {
        event.validate()?;
        self.events.push(event);
        Ok(())
    }

    pub fn append(&mut self, other: &PulseSequence) {
        self.events.extend_from_slice(&other.events);
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn has_gradient(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, PulseEvent::Gradient(_)))
    }

    pub fn total_delay(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Delay { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# sequence: {}\n", self.label));
        }
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> NmrResult<Self> {
        let mut seq = PulseSequence::new("");
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(label) = comment.trim().strip_prefix("sequence:") {
                    seq.label = label.trim().to_string();
                }
                continue;
            }
            let event = parse_event(line).map_err(|msg| NmrError::Parse { line: line_no, msg })?;
            seq.push(event).map_err(|e| NmrError::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
        }
        Ok(seq)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_event(line: &str) -> Result<PulseEvent, String> {
    let mut tokens = line.split_whitespace();
    let keyword = tokens.next().ok_or("empty line")?;
    let mut fields = Vec::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {tok:?}"))?;
        if fields.iter().any(|(seen, _)| *seen == k) {
            return Err(format!("duplicate key {k:?}"));
        }
        fields.push((k, v));
    }
    let allowed: &[&str] = match keyword {
        "PULSE" => &["targets", "axis", "angle"],
        "DELAY" => &["t", "evolve"],
        "GRAD" => &["mode"],
        _ => return Err(format!("unknown event {keyword:?}")),
    };
    if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(format!("unknown key {k:?} for {keyword}"));
    }
    let get = |key: &str| {
        fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| format!("{keyword} is missing {key}="))
    };
    let number = |key: &str| -> Result<f64, String> {
        let v = get(key)?;
        v.parse::<f64>()
            .map_err(|_| format!("invalid number {v:?} for {key}"))
    };
    Ok(match keyword {
        "PULSE" => PulseEvent::pulse(
            get("targets")?.parse()?,
            get("axis")?.parse()?,
            number("angle")?,
        ),
        "DELAY" => PulseEvent::Delay {
            duration: number("t")?,
            evolution: match get("evolve") {
                Ok(v) => v.parse()?,
                Err(_) => Evolution::Full,
            },
        },
        _ => PulseEvent::Gradient(get("mode")?.parse()?),
    })
}

/// Replays `seq` on `rho`.
pub fn execute(
    seq: &PulseSequence,
    rho: &DeviationDensityMatrix,
    p: &SpinSystemParams,
) -> NmrResult<DeviationDensityMatrix> {
    seq.events.iter().try_fold(*rho, |rho, e| {
        Ok(match e {
            PulseEvent::Pulse(pulse) => apply_hard_pulse(&rho, pulse),
            PulseEvent::Delay {
                duration,
                evolution,
            } => free_evolve_with(&rho, *duration, p, *evolution)?,
            PulseEvent::Gradient(mode) => gradient_crush(&rho, *mode),
        })
    })
}

/// Propagator of a gradient-free sequence, later events on the left.
pub fn sequence_unitary(seq: &PulseSequence, p: &SpinSystemParams) -> NmrResult<Matrix4C> {
    seq.events.iter().try_fold(Matrix4C::identity(), |u, e| {
        let step = match e {
            PulseEvent::Pulse(pulse) => rotation(pulse.targets, pulse.axis, pulse.angle),
            PulseEvent::Delay {
                duration,
                evolution,
            } => {
                let e = evolution_energies(p, *evolution);
                Matrix4C::from_diagonal(&e.map(|ek| C64::from_polar(1.0, -ek * duration)).into())
            }
            PulseEvent::Gradient(_) => return Err(NmrError::Gradient),
        };
        Ok(step * u)
    })
}

/// Net `J`-coupling phase `2πJ Σ s_A s_B t` accumulated over the delays, in
/// the toggling frame where each π pulse on a spin flips the sign `s` of its
/// `I_z`. `None` when a pulse other than a multiple of π occurs.
pub fn coupling_phase(seq: &PulseSequence, p: &SpinSystemParams) -> Option<f64> {
    let mut sign = [1.0f64, 1.0];
    let mut weighted = 0.0;
    for e in &seq.events {
        match e {
            PulseEvent::Pulse(pulse) => {
                let c = pulse.angle.cos();
                if (c.abs() - 1.0).abs() > 1e-12 {
                    return None;
                }
                for spin in [Spin::A, Spin::B] {
                    if pulse.targets.contains(spin) {
                        sign[spin.qubit()] *= c.signum();
                    }
                }
            }
            PulseEvent::Delay { duration, .. } => weighted += sign[0] * sign[1] * duration,
            PulseEvent::Gradient(_) => {}
        }
    }
    Some(std::f64::consts::TAU * p.j * weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_examples() {
        let seq = PulseSequence::from_events(
            "demo",
            vec![
                PulseEvent::pulse(Targets::AB, Axis::MinusY, std::f64::consts::FRAC_PI_2),
                PulseEvent::Delay {
                    duration: 0.069735,
                    evolution: Evolution::CouplingOnly,
                },
                PulseEvent::delay(0.001),
                PulseEvent::Gradient(GradientMode::Physical),
            ],
        )
        .unwrap();
        let text = seq.to_text();
        assert_eq!(
            text,
            "# sequence: demo\n\
             PULSE targets=AB axis=-y angle=1.57079633\n\
             DELAY t=0.069735 evolve=coupling\n\
             DELAY t=0.001\n\
             GRAD mode=physical\n"
        );
        let back = PulseSequence::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.label(), "demo");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = PulseSequence::from_text("GRAD mode=physical\nPULSE targets=C axis=x angle=1")
            .unwrap_err();
        assert!(matches!(err, NmrError::Parse { line: 2, .. }));
        assert!(PulseSequence::from_text("DELAY t=-1").is_err());
        assert!(PulseSequence::from_text("DELAY").is_err());
        assert!(PulseSequence::from_text("NOP").is_err());
        assert!(PulseSequence::from_text("DELAY t=1 t=2").is_err());
        assert!(PulseSequence::from_text("GRAD mode=physical extra=1").is_err());
    }

    #[test]
    fn empty_sequence_is_identity() {
        let u =
            sequence_unitary(&PulseSequence::new("empty"), &SpinSystemParams::default()).unwrap();
        assert_eq!(u, Matrix4C::identity());
    }

    #[test]
    fn gradient_has_no_unitary() {
        let mut seq = PulseSequence::new("g");
        seq.push(PulseEvent::Gradient(GradientMode::Physical))
            .unwrap();
        assert_eq!(
            sequence_unitary(&seq, &SpinSystemParams::default()),
            Err(NmrError::Gradient)
        );
    }

    fn arb_event() -> impl Strategy<Value = PulseEvent> {
        let targets = prop_oneof![Just(Targets::A), Just(Targets::B), Just(Targets::AB)];
        let axis = prop_oneof![
            Just(Axis::X),
            Just(Axis::MinusX),
            Just(Axis::Y),
            Just(Axis::MinusY)
        ];
        prop_oneof![
            (targets, axis, -10.0f64..10.0).prop_map(|(t, a, th)| PulseEvent::pulse(t, a, th)),
            (0.0f64..1.0, any::<bool>()).prop_map(|(d, c)| PulseEvent::Delay {
                duration: d,
                evolution: if c {
                    Evolution::CouplingOnly
                } else {
                    Evolution::Full
                },
            }),
            any::<bool>().prop_map(|c| PulseEvent::Gradient(if c {
                GradientMode::CrushAll
            } else {
                GradientMode::Physical
            })),
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip(events in prop::collection::vec(arb_event(), 0..20)) {
            let seq = PulseSequence::from_events("prop", events).unwrap();
            let text = seq.to_text();
            let back = PulseSequence::from_text(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back.len(), seq.len());
            for (a, b) in seq.events().iter().zip(back.events()) {
                match (a, b) {
                    (PulseEvent::Pulse(x), PulseEvent::Pulse(y)) => {
                        prop_assert_eq!((x.targets, x.axis), (y.targets, y.axis));
                        prop_assert!((x.angle - y.angle).abs() <= 5.1e-9 * x.angle.abs());
                    }
                    (PulseEvent::Delay { duration: d1, evolution: e1 },
                     PulseEvent::Delay { duration: d2, evolution: e2 }) => {
                        prop_assert_eq!(e1, e2);
                        prop_assert!((d1 - d2).abs() <= 5.1e-9 * d1.abs());
                    }
                    (x, y) => prop_assert_eq!(x, y),
                }
            }
        }
    }
}
