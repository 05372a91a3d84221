//! Dual-rail preparation and measurement settings.
//!
//! Non-computational preparations and measurements are realised with ideal
//! virtual beamsplitters and phase shifts on a qubit's two rails.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Element;
use crate::error::{Error, Result};
use crate::fock::{BeamSplitter, Label, ModeId, TwoPhotonState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitPrep {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl QubitPrep {
    pub const ALL: [QubitPrep; 6] = [
        QubitPrep::Zero,
        QubitPrep::One,
        QubitPrep::Plus,
        QubitPrep::Minus,
        QubitPrep::PlusI,
        QubitPrep::MinusI,
    ];

    /// Amplitudes on rails 0 and 1.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        match self {
            QubitPrep::Zero => [one, zero],
            QubitPrep::One => [zero, one],
            QubitPrep::Plus => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            QubitPrep::Minus => [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            QubitPrep::PlusI => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            QubitPrep::MinusI => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }

    /// Rail the photon starts in, plus the virtual elements that rotate it into this state.
    fn virtual_preparation(self, rails: [ModeId; 2]) -> (ModeId, Vec<Element>) {
        let hadamard = Element::BeamSplitter(BeamSplitter::new(rails[0], rails[1], 0.5));
        let phase = |angle| Element::PhaseShift {
            mode: rails[1],
            angle,
        };
        match self {
            QubitPrep::Zero => (rails[0], vec![]),
            QubitPrep::One => (rails[1], vec![]),
            QubitPrep::Plus => (rails[0], vec![hadamard]),
            QubitPrep::Minus => (rails[1], vec![hadamard]),
            QubitPrep::PlusI => (rails[0], vec![hadamard, phase(FRAC_PI_2)]),
            QubitPrep::MinusI => (rails[0], vec![hadamard, phase(-FRAC_PI_2)]),
        }
    }

    fn token(self) -> &'static str {
        match self {
            QubitPrep::Zero => "0",
            QubitPrep::One => "1",
            QubitPrep::Plus => "+",
            QubitPrep::Minus => "-",
            QubitPrep::PlusI => "+i",
            QubitPrep::MinusI => "-i",
        }
    }
}

/// Splits a label such as `"+i0"` or `"−−"` into per-qubit tokens.
fn tokens(s: &str) -> Option<Vec<String>> {
    let chars: Vec<char> = s
        .trim()
        .chars()
        .map(|c| if c == '−' { '-' } else { c })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '0' | '1' => {
                out.push(chars[i].to_string());
                i += 1;
            }
            '+' | '-' => {
                if chars.get(i + 1) == Some(&'i') {
                    out.push(format!("{}i", chars[i]));
                    i += 2;
                } else {
                    out.push(chars[i].to_string());
                    i += 1;
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

fn prep_from_token(t: &str) -> Option<QubitPrep> {
    QubitPrep::ALL.into_iter().find(|p| p.token() == t)
}

/// Two-qubit input preparation, control first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputLabel {
    pub control: QubitPrep,
    pub target: QubitPrep,
}

impl InputLabel {
    pub const fn new(control: QubitPrep, target: QubitPrep) -> Self {
        Self { control, target }
    }

    /// Row order of the 8×8 measurement matrix: |00⟩,|01⟩,|10⟩,|11⟩,|++⟩,|+−⟩,|−+⟩,|−−⟩.
    pub const MATRIX_ROWS: [InputLabel; 8] = {
        use QubitPrep::*;
        [
            InputLabel::new(Zero, Zero),
            InputLabel::new(Zero, One),
            InputLabel::new(One, Zero),
            InputLabel::new(One, One),
            InputLabel::new(Plus, Plus),
            InputLabel::new(Plus, Minus),
            InputLabel::new(Minus, Plus),
            InputLabel::new(Minus, Minus),
        ]
    };

    /// Two-qubit amplitudes in the order |00⟩,|01⟩,|10⟩,|11⟩.
    pub fn amplitudes(&self) -> [Complex64; 4] {
        let (c, t) = (self.control.amplitudes(), self.target.amplitudes());
        [c[0] * t[0], c[0] * t[1], c[1] * t[0], c[1] * t[1]]
    }
}

impl FromStr for InputLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(s.to_string());
        let toks = tokens(s).ok_or_else(bad)?;
        match toks.as_slice() {
            [a, b] => Ok(Self::new(
                prep_from_token(a).ok_or_else(bad)?,
                prep_from_token(b).ok_or_else(bad)?,
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for InputLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.control.token(), self.target.token())
    }
}

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "z" | "Z" => Ok(Basis::Z),
            "x" | "X" => Ok(Basis::X),
            _ => Err(Error::InvalidLabel(s.to_string())),
        }
    }
}

/// Single-qubit measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Zero,
    One,
    Plus,
    Minus,
}

impl Outcome {
    pub fn basis(self) -> Basis {
        match self {
            Outcome::Zero | Outcome::One => Basis::Z,
            Outcome::Plus | Outcome::Minus => Basis::X,
        }
    }

    /// Rail index on which this outcome is detected.
    pub fn rail(self) -> usize {
        match self {
            Outcome::Zero | Outcome::Plus => 0,
            Outcome::One | Outcome::Minus => 1,
        }
    }

    pub fn of(basis: Basis, rail: usize) -> Self {
        match (basis, rail) {
            (Basis::Z, 0) => Outcome::Zero,
            (Basis::Z, _) => Outcome::One,
            (Basis::X, 0) => Outcome::Plus,
            (Basis::X, _) => Outcome::Minus,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Outcome::Zero => "0",
            Outcome::One => "1",
            Outcome::Plus => "+",
            Outcome::Minus => "-",
        }
    }
}

/// Two-qubit measurement outcome, control first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub control: Outcome,
    pub target: Outcome,
}

impl MeasurementSetting {
    pub const fn new(control: Outcome, target: Outcome) -> Self {
        Self { control, target }
    }

    /// Column order of the 8×8 measurement matrix: Z⊗Z outcomes then X⊗X outcomes.
    pub const MATRIX_COLUMNS: [MeasurementSetting; 8] = {
        use Outcome::*;
        [
            MeasurementSetting::new(Zero, Zero),
            MeasurementSetting::new(Zero, One),
            MeasurementSetting::new(One, Zero),
            MeasurementSetting::new(One, One),
            MeasurementSetting::new(Plus, Plus),
            MeasurementSetting::new(Plus, Minus),
            MeasurementSetting::new(Minus, Plus),
            MeasurementSetting::new(Minus, Minus),
        ]
    };

    /// The four outcomes of a product basis, in row-major rail order.
    pub fn block(control: Basis, target: Basis) -> [MeasurementSetting; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)]
            .map(|(c, t)| Self::new(Outcome::of(control, c), Outcome::of(target, t)))
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(s.to_string());
        let toks = tokens(s).ok_or_else(bad)?;
        let outcome = |t: &str| match t {
            "0" => Some(Outcome::Zero),
            "1" => Some(Outcome::One),
            "+" => Some(Outcome::Plus),
            "-" => Some(Outcome::Minus),
            _ => None,
        };
        match toks.as_slice() {
            [a, b] => Ok(Self::new(
                outcome(a).ok_or_else(bad)?,
                outcome(b).ok_or_else(bad)?,
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.control.token(), self.target.token())
    }
}

/// Rail assignment of a two-qubit dual-rail circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualRail {
    pub control: [ModeId; 2],
    pub target: [ModeId; 2],
}

impl DualRail {
    /// Prepares `label` from a computational photon pair and virtual elements.
    pub fn prepare_input<L: Label>(&self, modes: usize, label: InputLabel) -> Result<TwoPhotonState<L>> {
        let one = Complex64::new(1.0, 0.0);
        let (cm, c_elems) = label.control.virtual_preparation(self.control);
        let (tm, t_elems) = label.target.virtual_preparation(self.target);
        let state = TwoPhotonState::product(modes, &[(cm, one)], &[(tm, one)])?;
        c_elems
            .iter()
            .chain(&t_elems)
            .try_fold(state, |s, e| e.apply(&s, &|_| L::default()))
    }

    /// Prepares an arbitrary two-qubit pure state given by its four amplitudes.
    pub fn prepare_amplitudes<L: Label>(
        &self,
        modes: usize,
        amplitudes: &[Complex64; 4],
    ) -> Result<TwoPhotonState<L>> {
        use crate::fock::{PathTerm, Photon};
        let mut terms = Vec::with_capacity(4);
        for (i, &amp) in amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            terms.push(PathTerm::new(
                amp,
                Photon::new(self.control[i >> 1], L::default()),
                Photon::new(self.target[i & 1], L::default()),
            ));
        }
        TwoPhotonState::from_terms(modes, terms)
    }

    /// Virtual elements to append after the circuit for a per-qubit basis choice.
    pub fn measurement_elements(&self, control: Basis, target: Basis) -> Vec<Element> {
        let mut out = Vec::new();
        for (basis, rails) in [(control, self.control), (target, self.target)] {
            if basis == Basis::X {
                out.push(Element::BeamSplitter(BeamSplitter::new(rails[0], rails[1], 0.5)));
            }
        }
        out
    }

    /// Virtual elements and detector pair for one measurement outcome.
    pub fn measurement_settings(&self, setting: MeasurementSetting) -> (Vec<Element>, (ModeId, ModeId)) {
        let elems = self.measurement_elements(setting.control.basis(), setting.target.basis());
        (
            elems,
            (
                self.control[setting.control.rail()],
                self.target[setting.target.rail()],
            ),
        )
    }
}
