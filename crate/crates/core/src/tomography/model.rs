//! Path sums of a dual-rail gate, compiled once and evaluated for any τ.
//!
//! Running the circuit with [`TauForm`] labels gives every post-selected path
//! term as a τ-independent amplitude plus, per photon, the set of τ-boxes it
//! passed. A coincidence probability is then a constant plus a sum of
//! `w · exp(-((Δc·τ)² + (Δt·τ)²)/4)` cross terms, where `Δc`, `Δt` are the
//! differences of the control and target photons' τ-box sets between two paths.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::circuit::{build_cnot, Basis, Circuit, InputLabel, TauForm, TauParams, TAU_COUNT};
use crate::error::{Error, Result};
use crate::fock::TwoPhotonState;
use crate::wavepacket::overlap_from_distance_sq;

/// Control and target displacement differences shared by a group of cross terms.
type Shift = (TauForm, TauForm);

#[derive(Clone, Debug, Default)]
struct OutcomeSum {
    constant: f64,
    /// (weight, index into the gate's shift table)
    coherences: Vec<(f64, usize)>,
}

impl OutcomeSum {
    fn evaluate(&self, overlaps: &[f64]) -> f64 {
        self.constant + self.coherences.iter().map(|&(w, k)| w * overlaps[k]).sum::<f64>()
    }
}

/// Sign-canonical form: first nonzero coefficient positive.
fn canonical(f: TauForm) -> TauForm {
    match f.0.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => TauForm(f.0.map(|x| -x)),
        _ => f,
    }
}

fn project(f: &TauForm, tau: &[f64; TAU_COUNT]) -> f64 {
    f.0.iter().zip(tau).map(|(&c, t)| f64::from(c) * t).sum()
}

/// Compiled coincidence probabilities for the eight matrix inputs in the Z⊗Z
/// and X⊗X measurement bases.
#[derive(Clone, Debug)]
pub struct CompiledGate {
    // [row][basis][outcome]
    sums: Vec<[[OutcomeSum; 4]; 2]>,
    shifts: Vec<Shift>,
}

impl CompiledGate {
    pub fn compile(circuit: &Circuit) -> Result<Self> {
        let rails = circuit.dual_rail()?;
        let modes = circuit.mode_count();
        let mut sums = Vec::with_capacity(InputLabel::MATRIX_ROWS.len());
        let mut shifts = BTreeMap::new();
        for label in InputLabel::MATRIX_ROWS {
            let input: TwoPhotonState<TauForm> = rails.prepare_input(modes, label)?;
            let output = circuit.evolve(&input, TauForm::unit)?;
            let mut per_basis: [[OutcomeSum; 4]; 2] = Default::default();
            for (b, basis) in [Basis::Z, Basis::X].into_iter().enumerate() {
                let measured = rails
                    .measurement_elements(basis, basis)
                    .iter()
                    .try_fold(output.clone(), |s, e| e.apply(&s, &TauForm::unit))?;
                for (k, (cr, tr)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    let sub = measured.sub_state(rails.control[cr], rails.target[tr]);
                    // (amplitude, control form, target form)
                    let paths: Vec<_> = sub
                        .terms()
                        .iter()
                        .map(|t| {
                            let [p, q] = t.photons();
                            if p.mode == rails.control[cr] {
                                (t.amplitude, p.label, q.label)
                            } else {
                                (t.amplitude, q.label, p.label)
                            }
                        })
                        .collect();
                    per_basis[b][k] = Self::outcome_sum(&paths, &mut shifts);
                }
            }
            sums.push(per_basis);
        }
        let mut table = vec![Shift::default(); shifts.len()];
        for (shift, k) in shifts {
            table[k] = shift;
        }
        Ok(Self { sums, shifts: table })
    }

    fn outcome_sum(
        paths: &[(num_complex::Complex64, TauForm, TauForm)],
        shifts: &mut BTreeMap<Shift, usize>,
    ) -> OutcomeSum {
        let mut constant = 0.0;
        let mut grouped: BTreeMap<Shift, f64> = BTreeMap::new();
        for (i, (a, ci, ti)) in paths.iter().enumerate() {
            constant += a.norm_sqr();
            for (b, cj, tj) in &paths[i + 1..] {
                let w = 2.0 * (a * b.conj()).re;
                let key = (canonical(ci.difference(cj)), canonical(ti.difference(tj)));
                if key == (TauForm::default(), TauForm::default()) {
                    constant += w;
                } else {
                    *grouped.entry(key).or_insert(0.0) += w;
                }
            }
        }
        let coherences = grouped
            .into_iter()
            .filter(|(_, w)| w.abs() > 1e-15)
            .map(|(shift, weight)| {
                let next = shifts.len();
                (weight, *shifts.entry(shift).or_insert(next))
            })
            .collect();
        OutcomeSum {
            constant,
            coherences,
        }
    }

    /// The compiled CNOT of [`build_cnot`], built on first use.
    pub fn cnot() -> &'static CompiledGate {
        static GATE: OnceLock<CompiledGate> = OnceLock::new();
        GATE.get_or_init(|| CompiledGate::compile(&build_cnot()).expect("CNOT compiles"))
    }

    /// Overlap factor of every distinct shift at `tau`.
    pub(crate) fn overlaps(&self, tau: &TauParams) -> Vec<f64> {
        let t = tau.values();
        self.shifts
            .iter()
            .map(|(c, g)| {
                let (dc, dt) = (project(c, t), project(g, t));
                overlap_from_distance_sq(dc * dc + dt * dt)
            })
            .collect()
    }

    fn joint_with(&self, row: usize, basis: Basis, overlaps: &[f64]) -> [f64; 4] {
        let b = match basis {
            Basis::Z => 0,
            Basis::X => 1,
        };
        let s = &self.sums[row][b];
        std::array::from_fn(|k| s[k].evaluate(overlaps).max(0.0))
    }

    /// Joint (unconditioned) probabilities of the four outcomes of a row and basis.
    pub fn joint(&self, row: usize, basis: Basis, tau: &TauParams) -> [f64; 4] {
        self.joint_with(row, basis, &self.overlaps(tau))
    }

    /// Conditional probabilities for one matrix row: Z⊗Z block then X⊗X block.
    pub fn row(&self, row: usize, tau: &TauParams) -> Result<[f64; 8]> {
        self.row_with(row, &self.overlaps(tau))
    }

    pub(crate) fn row_with(&self, row: usize, overlaps: &[f64]) -> Result<[f64; 8]> {
        let mut out = [0.0; 8];
        for (b, basis) in [Basis::Z, Basis::X].into_iter().enumerate() {
            let joint = self.joint_with(row, basis, overlaps);
            let total: f64 = joint.iter().sum();
            if !total.is_finite() {
                return Err(Error::NonFinite("model probability"));
            }
            if total < 1e-12 {
                return Err(Error::DegenerateNormalization(total));
            }
            for k in 0..4 {
                out[4 * b + k] = (joint[k] / total).min(1.0);
            }
        }
        Ok(out)
    }

    /// Number of distinct cross terms, summed over all rows, bases and outcomes.
    pub fn coherence_count(&self) -> usize {
        self.sums
            .iter()
            .flatten()
            .flatten()
            .map(|s| s.coherences.len())
            .sum()
    }

    /// Number of distinct overlap factors evaluated per τ.
    pub fn shift_count(&self) -> usize {
        self.shifts.len()
    }
}
