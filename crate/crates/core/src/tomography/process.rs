//! Output density matrices, χ-matrix reconstruction and process fidelity.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use super::{MeasMatrix, MATRIX_DIM};
use crate::circuit::{build_cnot, Circuit, InputLabel, QubitPrep, TauParams};
use crate::error::{Error, Result};
use crate::fock::TwoPhotonState;
use crate::wavepacket::overlap;

pub type C64 = num_complex::Complex64;
type Chi = SMatrix<C64, 16, 16>;

const PSD_TOLERANCE: f64 = -1e-9;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli(i: usize) -> Matrix2<C64> {
    let (o, l, n) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match i {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -n, n, o),
        _ => Matrix2::new(l, o, o, -l),
    }
}

/// Two-qubit Pauli products σᵢ⊗σⱼ, index `4i + j`, control first.
fn pauli_basis() -> &'static [Matrix4<C64>; 16] {
    static BASIS: OnceLock<[Matrix4<C64>; 16]> = OnceLock::new();
    BASIS.get_or_init(|| {
        std::array::from_fn(|m| {
            let k = pauli(m / 4).kronecker(&pauli(m % 4));
            Matrix4::from_fn(|r, col| k[(r, col)])
        })
    })
}

/// Name of basis element `m`, e.g. `"ZX"`.
pub fn pauli_label(m: usize) -> String {
    const NAMES: [char; 4] = ['I', 'X', 'Y', 'Z'];
    format!("{}{}", NAMES[m / 4], NAMES[m % 4])
}

fn hermiticity_error<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..N {
        for col in 0..N {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    worst
}

fn eigenvalues<const N: usize>(m: &SMatrix<C64, N, N>) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let dm = DMatrix::from_fn(N, N, |r, col| h[(r, col)]);
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenvalues below this fraction of the largest are treated as zero, so that
/// rounding noise in rank-deficient matrices does not leak in through √.
const RANK_CUTOFF: f64 = 1e-12;

fn clamp_spectrum(v: f64, largest: f64) -> f64 {
    if v < RANK_CUTOFF * largest {
        0.0
    } else {
        v
    }
}

fn sqrt_psd(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let largest = eig.eigenvalues.max();
    let roots = eig.eigenvalues.map(|v| c(clamp_spectrum(v, largest).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Two-qubit density matrix in the order |00⟩,|01⟩,|10⟩,|11⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    pub fn pure(amplitudes: &[C64; 4]) -> Self {
        let v = nalgebra::Vector4::from_column_slice(amplitudes);
        Self(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(&self.0)
    }
}

/// Process matrix in the two-qubit Pauli basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix(Chi);

impl ChiMatrix {
    pub fn from_matrix(m: SMatrix<C64, 16, 16>) -> Self {
        Self(m)
    }

    /// Rank-one χ of the unitary channel ρ ↦ UρU†.
    pub fn from_unitary(u: &Matrix4<C64>) -> Self {
        let basis = pauli_basis();
        let coeffs: [C64; 16] = std::array::from_fn(|m| (basis[m].adjoint() * u).trace() / 4.0);
        Self(Chi::from_fn(|r, col| coeffs[r] * coeffs[col].conj()))
    }

    pub fn matrix(&self) -> &SMatrix<C64, 16, 16> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t.abs() < 1e-14 {
            return Err(Error::DegenerateNormalization(t));
        }
        Ok(Self(self.0 / c(t, 0.0)))
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("16 eigenvalues")
    }

    /// Σ χₘₙ Pₘ ρ Pₙ†.
    pub fn apply(&self, rho: &Matrix4<C64>) -> Matrix4<C64> {
        let basis = pauli_basis();
        let left: Vec<Matrix4<C64>> = basis.iter().map(|p| p * rho).collect();
        let mut out = Matrix4::zeros();
        for (m, lm) in left.iter().enumerate() {
            for (n, pn) in basis.iter().enumerate() {
                let w = self.0[(m, n)];
                if w != c(0.0, 0.0) {
                    out += lm * pn.adjoint() * w;
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-8 {
            return Err(Error::NotHermitian(herm));
        }
        let floor = self.min_eigenvalue() / self.trace().abs().max(1e-300);
        if floor < PSD_TOLERANCE {
            return Err(Error::NotPsd(floor));
        }
        Ok(())
    }

    pub fn to_json(&self) -> ChiJson {
        ChiJson {
            basis: (0..16).map(pauli_label).collect(),
            real: (0..16).map(|r| (0..16).map(|col| self.0[(r, col)].re).collect()).collect(),
            imag: (0..16).map(|r| (0..16).map(|col| self.0[(r, col)].im).collect()).collect(),
        }
    }

    pub fn from_json(j: &ChiJson) -> Result<Self> {
        let expected: Vec<String> = (0..16).map(pauli_label).collect();
        if j.basis != expected {
            return Err(Error::Malformed("χ basis order must be II, IX, …, ZZ".into()));
        }
        let ok = |m: &Vec<Vec<f64>>| m.len() == 16 && m.iter().all(|r| r.len() == 16);
        if !ok(&j.real) || !ok(&j.imag) {
            return Err(Error::Malformed("χ arrays must be 16×16".into()));
        }
        Ok(Self(Chi::from_fn(|r, col| c(j.real[r][col], j.imag[r][col]))))
    }
}

/// JSON layout of a χ matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiJson {
    pub basis: Vec<String>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

fn cnot_circuit() -> &'static Circuit {
    static CNOT: OnceLock<Circuit> = OnceLock::new();
    CNOT.get_or_init(build_cnot)
}

/// Post-selected output of `circuit` for a two-qubit pure input, with the
/// wavepacket labels traced out.
///
/// Returns the trace-normalised state and the coincidence success probability.
pub fn output_density_for(
    circuit: &Circuit,
    input: &[C64; 4],
    tau: &TauParams,
) -> Result<(DensityMatrix, f64)> {
    let norm: f64 = input.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("input state has norm {norm}")));
    }
    let rails = circuit.dual_rail()?;
    let state: TwoPhotonState = rails.prepare_amplitudes(circuit.mode_count(), input)?;
    let out = circuit.post_select(&circuit.run(&state, tau)?)?;

    // (basis index, amplitude, control label, target label)
    let mut paths = Vec::with_capacity(out.terms().len());
    for t in out.terms() {
        let [p, q] = t.photons();
        let (ctl, tgt) = if rails.control.contains(&p.mode) { (p, q) } else { (q, p) };
        let a = usize::from(ctl.mode == rails.control[1]);
        let b = usize::from(tgt.mode == rails.target[1]);
        paths.push((2 * a + b, t.amplitude, &ctl.label, &tgt.label));
    }
    let mut rho = Matrix4::<C64>::zeros();
    for &(i, ai, ci, ti) in &paths {
        for &(j, aj, cj, tj) in &paths {
            let s = overlap(ci, cj)? * overlap(ti, tj)?;
            rho[(i, j)] += ai * aj.conj() * s;
        }
    }
    let success = rho.trace().re;
    if success < 1e-12 {
        return Err(Error::DegenerateNormalization(success));
    }
    Ok((DensityMatrix(rho / c(success, 0.0)), success))
}

/// [`output_density_for`] on the CNOT gate.
pub fn output_density(input: &[C64; 4], tau: &TauParams) -> Result<(DensityMatrix, f64)> {
    output_density_for(cnot_circuit(), input, tau)
}

/// Linear-inversion process tomography over a fixed set of pure inputs.
#[derive(Clone, Debug)]
pub struct ProcessTomography {
    inputs: Vec<[C64; 4]>,
    inverse: DMatrix<C64>,
}

impl ProcessTomography {
    /// Builds the inversion for `inputs`; fails unless they span all 4×4 operators.
    pub fn new(inputs: Vec<[C64; 4]>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("tomography inputs"));
        }
        // row j holds ρⱼ in the |k⟩⟨l| basis, column 4k + l
        let system = DMatrix::from_fn(inputs.len(), 16, |j, kl| inputs[j][kl / 4] * inputs[j][kl % 4].conj());
        let svd = system.svd(true, true);
        let sv = &svd.singular_values;
        let largest = sv.max();
        if sv.len() < 16 || sv.min() < 1e-10 * largest {
            return Err(Error::Singular);
        }
        let inverse = svd.pseudo_inverse(1e-12 * largest).map_err(|_| Error::Singular)?;
        Ok(Self { inputs, inverse })
    }

    /// Inputs {|0⟩,|1⟩,|+⟩,|+i⟩}⊗2.
    pub fn standard() -> &'static ProcessTomography {
        static STANDARD: OnceLock<ProcessTomography> = OnceLock::new();
        STANDARD.get_or_init(|| {
            use QubitPrep::*;
            let preps = [Zero, One, Plus, PlusI];
            let inputs = preps
                .iter()
                .flat_map(|&a| preps.iter().map(move |&b| InputLabel::new(a, b).amplitudes()))
                .collect();
            ProcessTomography::new(inputs).expect("standard input set is informationally complete")
        })
    }

    pub fn inputs(&self) -> &[[C64; 4]] {
        &self.inputs
    }

    /// χ (not trace-normalised) from the unnormalised outputs E(ρⱼ) of each input.
    pub fn reconstruct_unnormalized(&self, outputs: &[Matrix4<C64>]) -> Result<ChiMatrix> {
        if outputs.len() != self.inputs.len() {
            return Err(Error::Arity {
                expected: self.inputs.len(),
                got: outputs.len(),
            });
        }
        // E(|k⟩⟨l|) for the 16 matrix units, by least squares over the inputs
        let rhs = DMatrix::from_fn(outputs.len(), 16, |j, ij| outputs[j][(ij / 4, ij % 4)]);
        let units = &self.inverse * rhs;
        // Choi matrix J[(k,i),(l,j)] = E(|k⟩⟨l|)[i,j]; with vₘ[(k,i)] = Pₘ[i,k]
        // it reads J = Σ χₘₙ vₘ vₙ†, and the vₘ are orthogonal with norm² 4.
        let choi = DMatrix::from_fn(16, 16, |ki, lj| units[(4 * (ki / 4) + lj / 4, 4 * (ki % 4) + lj % 4)]);
        let basis = pauli_basis();
        let v = DMatrix::from_fn(16, 16, |ki, m| basis[m][(ki % 4, ki / 4)]);
        let chi = v.adjoint() * choi * v / c(16.0, 0.0);
        Ok(ChiMatrix(Chi::from_fn(|m, n| chi[(m, n)])))
    }

    /// Unnormalised χ of the gate model at `tau`.
    pub fn model_process(&self, circuit: &Circuit, tau: &TauParams) -> Result<ChiMatrix> {
        let outputs = self
            .inputs
            .iter()
            .map(|input| {
                let (rho, success) = output_density_for(circuit, input, tau)?;
                Ok(rho.0 * c(success, 0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        self.reconstruct_unnormalized(&outputs)
    }
}

/// Trace-normalised χ of the CNOT model at `tau`, from the standard input set.
pub fn reconstruct_chi(tau: &TauParams) -> Result<ChiMatrix> {
    ProcessTomography::standard()
        .model_process(cnot_circuit(), tau)?
        .normalized()
}

pub fn ideal_cnot_chi() -> ChiMatrix {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    #[rustfmt::skip]
    let u = Matrix4::new(
        l, o, o, o,
        o, l, o, o,
        o, o, o, l,
        o, o, l, o,
    );
    ChiMatrix::from_unitary(&u)
}

/// `tr(√(√A B √A))²` on trace-normalised copies of the inputs.
///
/// Evaluated as the squared sum of singular values of √A·√B, which avoids
/// taking square roots of rounding noise in the spectrum of √A B √A.
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let (a, b) = (a.normalized()?, b.normalized()?);
    let to_dyn = |m: &Chi| DMatrix::from_fn(16, 16, |r, col| m[(r, col)]);
    let product = sqrt_psd(&to_dyn(&a.0)) * sqrt_psd(&to_dyn(&b.0));
    let root_trace: f64 = product.singular_values().sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Measurement matrix implied by a process matrix.
pub fn predict_matrix(chi: &ChiMatrix) -> Result<MeasMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = Matrix2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0));
    let hh = had.kronecker(&had);
    let hh = Matrix4::from_fn(|r, col| hh[(r, col)]);
    let mut entries = [[0.0; MATRIX_DIM]; MATRIX_DIM];
    for (r, label) in InputLabel::MATRIX_ROWS.iter().enumerate() {
        let out = chi.apply(&DensityMatrix::pure(&label.amplitudes()).0);
        for (b, rho) in [out, hh * out * hh].iter().enumerate() {
            let total = rho.trace().re;
            if total < 1e-12 {
                return Err(Error::DegenerateNormalization(total));
            }
            for k in 0..4 {
                entries[r][4 * b + k] = (rho[(k, k)].re / total).clamp(0.0, 1.0);
            }
        }
    }
    MeasMatrix::new(entries)
}
