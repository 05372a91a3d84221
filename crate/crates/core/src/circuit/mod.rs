//! Optical circuits as ordered element lists over a named mode table.

mod cnot;
mod dsl;
mod labels;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BeamSplitter, Label, ModeId, TwoPhotonState};
use crate::wavepacket::Displacement;

pub use cnot::{build_cnot, CNOT_SUCCESS_PROBABILITY};
pub use dsl::parse_circuit;
pub use labels::{Basis, DualRail, InputLabel, MeasurementSetting, Outcome, QubitPrep};

/// Number of mismatch displacements in the gate model.
pub const TAU_COUNT: usize = 5;

/// The five mismatch displacements τ1…τ5, in units of inverse photon bandwidth.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TauParams([f64; TAU_COUNT]);

impl TauParams {
    pub fn new(values: [f64; TAU_COUNT]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tau parameters"));
        }
        Ok(Self(values))
    }

    pub fn zero() -> Self {
        Self([0.0; TAU_COUNT])
    }

    /// Fitted mismatch of the experimental gate; the process fidelity anchor.
    pub fn reference() -> Self {
        Self([-0.30, 0.50, -0.55, 0.10, -0.45])
    }

    /// Value of τ_index, for index in 1..=5.
    pub fn get(&self, index: usize) -> f64 {
        self.0[index - 1]
    }

    pub fn values(&self) -> &[f64; TAU_COUNT] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|v| v * s))
    }
}

impl TryFrom<Vec<f64>> for TauParams {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        let arr: [f64; TAU_COUNT] = v.as_slice().try_into().map_err(|_| Error::Arity {
            expected: TAU_COUNT,
            got: v.len(),
        })?;
        Self::new(arr)
    }
}

impl From<TauParams> for Vec<f64> {
    fn from(t: TauParams) -> Self {
        t.0.to_vec()
    }
}

impl FromStr for TauParams {
    type Err = Error;

    /// Comma-separated list of five numbers.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidLabel(p.trim().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::try_from(values)
    }
}

impl fmt::Display for TauParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Linear combination of τ-box displacements accumulated along a path.
///
/// Used as a symbolic label: evolving with these instead of numbers yields
/// path amplitudes that are independent of τ, so the gate can be compiled once
/// and evaluated for many parameter values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TauForm(pub [i8; TAU_COUNT]);

impl TauForm {
    pub fn unit(index: usize) -> Self {
        let mut f = [0; TAU_COUNT];
        f[index - 1] = 1;
        Self(f)
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - other.0[i]))
    }

    pub fn evaluate(&self, tau: &TauParams) -> f64 {
        self.0
            .iter()
            .zip(tau.values())
            .map(|(&c, v)| f64::from(c) * v)
            .sum()
    }
}

impl Label for TauForm {
    fn label_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn shifted(&self, by: &Self) -> Result<Self> {
        Ok(Self(std::array::from_fn(|i| self.0[i] + by.0[i])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    BeamSplitter(BeamSplitter),
    TauBox { mode: ModeId, index: usize },
    PhaseShift { mode: ModeId, angle: f64 },
}

impl Element {
    fn modes(&self) -> Vec<ModeId> {
        match *self {
            Element::BeamSplitter(bs) => vec![bs.first, bs.second, bs.gray],
            Element::TauBox { mode, .. } | Element::PhaseShift { mode, .. } => vec![mode],
        }
    }

    /// Applies the element, resolving τ-boxes through `tau`.
    pub fn apply<L: Label>(
        &self,
        state: &TwoPhotonState<L>,
        tau: &impl Fn(usize) -> L,
    ) -> Result<TwoPhotonState<L>> {
        match *self {
            Element::BeamSplitter(bs) => state.apply_beamsplitter(&bs),
            Element::TauBox { mode, index } => state.apply_taubox(mode, &tau(index)),
            Element::PhaseShift { mode, angle } => state.apply_phase(mode, angle),
        }
    }
}

/// Ordered optical network with control and target detector groups.
///
/// The mode table is kept sorted by name so that circuits have a single
/// canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    modes: Vec<String>,
    elements: Vec<Element>,
    control: Vec<ModeId>,
    target: Vec<ModeId>,
}

impl Circuit {
    pub fn builder() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, name: &str) -> Result<ModeId> {
        self.modes
            .binary_search_by(|m| m.as_str().cmp(name))
            .map(ModeId)
            .map_err(|_| Error::UnknownMode(name.to_string()))
    }

    pub fn mode_name(&self, id: ModeId) -> &str {
        &self.modes[id.0]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn control(&self) -> &[ModeId] {
        &self.control
    }

    pub fn target(&self) -> &[ModeId] {
        &self.target
    }

    /// Indices of the τ-boxes present in the circuit.
    pub fn tau_indices(&self) -> Vec<usize> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                Element::TauBox { index, .. } => Some(*index),
                _ => None,
            })
            .collect()
    }

    /// Runs a state through every element.
    pub fn evolve<L: Label>(
        &self,
        state: &TwoPhotonState<L>,
        tau: impl Fn(usize) -> L,
    ) -> Result<TwoPhotonState<L>> {
        if state.modes() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                left: state.modes(),
                right: self.modes.len(),
            });
        }
        self.elements
            .iter()
            .try_fold(state.clone(), |s, e| e.apply(&s, &tau))
    }

    /// Evolution with scalar τ values.
    pub fn run(&self, state: &TwoPhotonState, tau: &TauParams) -> Result<TwoPhotonState> {
        let t = *tau;
        self.evolve(state, move |i| Displacement::scalar(t.get(i)))
    }

    /// Evolution with vector-valued displacements per τ-box.
    pub fn run_with_displacements(
        &self,
        state: &TwoPhotonState,
        taus: &[Displacement; TAU_COUNT],
    ) -> Result<TwoPhotonState> {
        self.evolve(state, |i| taus[i - 1].clone())
    }

    /// Coincidence post-selection on the control and target groups.
    pub fn post_select<L: Label>(&self, state: &TwoPhotonState<L>) -> Result<TwoPhotonState<L>> {
        state.post_select(&self.control, &self.target)
    }

    /// Coincidence probabilities of one input measured in a product basis,
    /// evaluated directly in the extended space.
    pub fn predict(
        &self,
        tau: &TauParams,
        input: InputLabel,
        control: Basis,
        target: Basis,
    ) -> Result<Prediction> {
        let rails = self.dual_rail()?;
        let state: TwoPhotonState = rails.prepare_input(self.mode_count(), input)?;
        let mut out = self.run(&state, tau)?;
        for e in rails.measurement_elements(control, target) {
            out = e.apply(&out, &|_| Displacement::default())?;
        }
        let outcomes = MeasurementSetting::block(control, target);
        let mut joint = [0.0; 4];
        for (p, setting) in joint.iter_mut().zip(outcomes) {
            *p = out.outcome_probability(
                rails.control[setting.control.rail()],
                rails.target[setting.target.rail()],
            )?;
        }
        Ok(Prediction { outcomes, joint })
    }

    /// Control and target rails, when each group has exactly two modes.
    pub fn dual_rail(&self) -> Result<DualRail> {
        match (self.control.as_slice(), self.target.as_slice()) {
            (&[c0, c1], &[t0, t1]) => Ok(DualRail {
                control: [c0, c1],
                target: [t0, t1],
            }),
            _ => Err(Error::NotDualRail(format!(
                "control group has {} modes, target group has {}",
                self.control.len(),
                self.target.len()
            ))),
        }
    }
}

/// Outcome probabilities of one input in one measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub outcomes: [MeasurementSetting; 4],
    /// Probabilities before conditioning on coincidence success.
    pub joint: [f64; 4],
}

impl Prediction {
    pub fn success(&self) -> f64 {
        self.joint.iter().sum()
    }

    pub fn conditional(&self) -> Result<[f64; 4]> {
        let total = self.success();
        if total < 1e-12 {
            return Err(Error::DegenerateNormalization(total));
        }
        Ok(self.joint.map(|p| (p / total).min(1.0)))
    }
}

#[derive(Clone, Debug)]
enum PendingElement {
    BeamSplitter {
        first: String,
        second: String,
        eta: f64,
        gray: String,
    },
    TauBox {
        mode: String,
        index: usize,
    },
    PhaseShift {
        mode: String,
        angle: f64,
    },
}

/// Collects named modes and elements; names are resolved on [`CircuitBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    modes: BTreeSet<String>,
    elements: Vec<PendingElement>,
    control: Vec<String>,
    target: Vec<String>,
}

impl CircuitBuilder {
    pub fn mode(mut self, name: &str) -> Self {
        self.modes.insert(name.to_string());
        self
    }

    pub fn modes(self, names: &[&str]) -> Self {
        names.iter().fold(self, |b, n| b.mode(n))
    }

    pub fn beamsplitter(mut self, first: &str, second: &str, eta: f64, gray: &str) -> Self {
        self.elements.push(PendingElement::BeamSplitter {
            first: first.into(),
            second: second.into(),
            eta,
            gray: gray.into(),
        });
        self
    }

    pub fn tau(mut self, mode: &str, index: usize) -> Self {
        self.elements.push(PendingElement::TauBox {
            mode: mode.into(),
            index,
        });
        self
    }

    pub fn phase(mut self, mode: &str, angle: f64) -> Self {
        self.elements.push(PendingElement::PhaseShift {
            mode: mode.into(),
            angle,
        });
        self
    }

    pub fn control(mut self, modes: &[&str]) -> Self {
        self.control.extend(modes.iter().map(|m| m.to_string()));
        self
    }

    pub fn target(mut self, modes: &[&str]) -> Self {
        self.target.extend(modes.iter().map(|m| m.to_string()));
        self
    }

    pub fn build(self) -> Result<Circuit> {
        let modes: Vec<String> = self.modes.into_iter().collect();
        let resolve = |name: &str| -> Result<ModeId> {
            modes
                .binary_search_by(|m| m.as_str().cmp(name))
                .map(ModeId)
                .map_err(|_| Error::UnknownMode(name.to_string()))
        };

        let mut seen_tau = BTreeSet::new();
        let mut elements = Vec::with_capacity(self.elements.len());
        for pending in &self.elements {
            let element = match pending {
                PendingElement::BeamSplitter {
                    first,
                    second,
                    eta,
                    gray,
                } => {
                    let (a, b) = (resolve(first)?, resolve(second)?);
                    if a == b {
                        return Err(Error::SameMode(first.clone()));
                    }
                    let g = resolve(gray)?;
                    if g != a && g != b {
                        return Err(Error::GraySide(gray.clone()));
                    }
                    if !(0.0..=1.0).contains(eta) {
                        return Err(Error::Reflectivity(*eta));
                    }
                    Element::BeamSplitter(BeamSplitter {
                        first: a,
                        second: b,
                        eta: *eta,
                        gray: g,
                    })
                }
                PendingElement::TauBox { mode, index } => {
                    if !(1..=TAU_COUNT).contains(index) {
                        return Err(Error::TauIndex(*index));
                    }
                    if !seen_tau.insert(*index) {
                        return Err(Error::DuplicateTau(*index));
                    }
                    Element::TauBox {
                        mode: resolve(mode)?,
                        index: *index,
                    }
                }
                PendingElement::PhaseShift { mode, angle } => {
                    if !angle.is_finite() {
                        return Err(Error::NonFinite("phase angle"));
                    }
                    Element::PhaseShift {
                        mode: resolve(mode)?,
                        angle: *angle,
                    }
                }
            };
            debug_assert!(element.modes().iter().all(|m| m.0 < modes.len()));
            elements.push(element);
        }

        let group = |names: &[String]| -> Result<Vec<ModeId>> {
            let mut ids = names.iter().map(|n| resolve(n)).collect::<Result<Vec<_>>>()?;
            ids.sort();
            ids.dedup();
            Ok(ids)
        };
        let control = group(&self.control)?;
        let target = group(&self.target)?;
        if let Some(m) = control.iter().find(|m| target.contains(m)) {
            return Err(Error::OverlappingGroups(modes[m.0].clone()));
        }

        Ok(Circuit {
            modes,
            elements,
            control,
            target,
        })
    }
}
