//! Two-photon states in the extended (mode ⊗ wavepacket) Hilbert space.
//!
//! A state is a sum of path terms `amp · a†(m₁, l₁) a†(m₂, l₂) |0⟩`, where each
//! creation operator carries a spatial mode and a wavepacket label. Amplitudes
//! are coefficients of the operator product, so a term with both photons in
//! the same mode with equal labels has squared length 2 (the bosonic √2 lives
//! in the inner product rather than in the stored amplitude).
//!
//! States are generic over the label type so the same evolution code drives
//! numeric displacements and the symbolic tau forms used to compile the gate.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavepacket::Displacement;

/// Index of a spatial mode within a circuit's mode table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(pub usize);

/// Wavepacket label carried by each photon.
pub trait Label: Clone + Debug + PartialEq + Default {
    fn label_cmp(&self, other: &Self) -> Ordering;

    /// Label after passing through a displacement `by`.
    fn shifted(&self, by: &Self) -> Result<Self>;
}

impl Label for Displacement {
    fn label_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn shifted(&self, by: &Self) -> Result<Self> {
        self.checked_add(by)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Photon<L> {
    pub mode: ModeId,
    pub label: L,
}

impl<L: Label> Photon<L> {
    pub fn new(mode: ModeId, label: L) -> Self {
        Self { mode, label }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.mode
            .cmp(&other.mode)
            .then_with(|| self.label.label_cmp(&other.label))
    }
}

/// One path of the two-photon superposition. Photons are kept in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm<L> {
    pub amplitude: Complex64,
    photons: [Photon<L>; 2],
}

impl<L: Label> PathTerm<L> {
    pub fn new(amplitude: Complex64, a: Photon<L>, b: Photon<L>) -> Self {
        let photons = if b.key_cmp(&a) == Ordering::Less {
            [b, a]
        } else {
            [a, b]
        };
        Self { amplitude, photons }
    }

    pub fn photons(&self) -> &[Photon<L>; 2] {
        &self.photons
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.photons[0]
            .key_cmp(&other.photons[0])
            .then_with(|| self.photons[1].key_cmp(&other.photons[1]))
    }

    fn occupation(&self, mode: ModeId) -> usize {
        self.photons.iter().filter(|p| p.mode == mode).count()
    }
}

/// Coupling of two modes with reflectivity `eta`.
///
/// The non-gray mode maps to `√η·self + √(1-η)·other`; the gray mode maps to
/// `√(1-η)·other − √η·self`, i.e. reflection off the gray surface flips sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    pub first: ModeId,
    pub second: ModeId,
    pub eta: f64,
    pub gray: ModeId,
}

impl BeamSplitter {
    /// Splitter with the gray surface on `second`.
    pub fn new(first: ModeId, second: ModeId, eta: f64) -> Self {
        Self {
            first,
            second,
            eta,
            gray: second,
        }
    }

    fn validate(&self, modes: usize) -> Result<()> {
        for m in [self.first, self.second, self.gray] {
            check_mode(m, modes)?;
        }
        if self.first == self.second {
            return Err(Error::SameMode(format!("#{}", self.first.0)));
        }
        if self.gray != self.first && self.gray != self.second {
            return Err(Error::GraySide(format!("#{}", self.gray.0)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Reflectivity(self.eta));
        }
        Ok(())
    }

    /// Output modes and amplitudes for a single photon entering `mode`.
    fn map(&self, mode: ModeId) -> ([(ModeId, f64); 2], usize) {
        let (gray, clear) = if self.gray == self.first {
            (self.first, self.second)
        } else {
            (self.second, self.first)
        };
        let (r, t) = (self.eta.sqrt(), (1.0 - self.eta).sqrt());
        if mode == clear {
            ([(clear, r), (gray, t)], 2)
        } else if mode == gray {
            ([(clear, t), (gray, -r)], 2)
        } else {
            ([(mode, 1.0), (mode, 0.0)], 1)
        }
    }
}

fn check_mode(m: ModeId, modes: usize) -> Result<()> {
    if m.0 >= modes {
        return Err(Error::UnknownMode(format!("#{}", m.0)));
    }
    Ok(())
}

/// Superposition of two-photon path terms over a fixed number of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState<L = Displacement> {
    modes: usize,
    terms: Vec<PathTerm<L>>,
}

impl<L: Label> TwoPhotonState<L> {
    pub fn vacuum_pair(modes: usize) -> Self {
        Self {
            modes,
            terms: Vec::new(),
        }
    }

    /// Builds a state from raw terms, merging any that coincide.
    pub fn from_terms(modes: usize, terms: impl IntoIterator<Item = PathTerm<L>>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        for t in &terms {
            for p in &t.photons {
                check_mode(p.mode, modes)?;
            }
        }
        Ok(Self {
            modes,
            terms: merge(terms),
        })
    }

    /// `(Σ αᵢ a†ᵢ)(Σ βⱼ a†ⱼ)|0⟩` with default labels.
    pub fn product(
        modes: usize,
        first: &[(ModeId, Complex64)],
        second: &[(ModeId, Complex64)],
    ) -> Result<Self> {
        let mut terms = Vec::with_capacity(first.len() * second.len());
        for &(ma, a) in first {
            for &(mb, b) in second {
                terms.push(PathTerm::new(
                    a * b,
                    Photon::new(ma, L::default()),
                    Photon::new(mb, L::default()),
                ));
            }
        }
        Self::from_terms(modes, terms)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[PathTerm<L>] {
        &self.terms
    }

    pub fn apply_beamsplitter(&self, bs: &BeamSplitter) -> Result<Self> {
        bs.validate(self.modes)?;
        let mut out = Vec::with_capacity(self.terms.len() * 4);
        for term in &self.terms {
            let [p, q] = &term.photons;
            let (pm, pn) = bs.map(p.mode);
            let (qm, qn) = bs.map(q.mode);
            for &(mp, cp) in &pm[..pn] {
                for &(mq, cq) in &qm[..qn] {
                    out.push(PathTerm::new(
                        term.amplitude * (cp * cq),
                        Photon::new(mp, p.label.clone()),
                        Photon::new(mq, q.label.clone()),
                    ));
                }
            }
        }
        Ok(Self {
            modes: self.modes,
            terms: merge(out),
        })
    }

    /// Displaces every photon currently in `mode` by `tau`.
    pub fn apply_taubox(&self, mode: ModeId, tau: &L) -> Result<Self> {
        check_mode(mode, self.modes)?;
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let shift = |p: &Photon<L>| -> Result<Photon<L>> {
                Ok(if p.mode == mode {
                    Photon::new(p.mode, p.label.shifted(tau)?)
                } else {
                    p.clone()
                })
            };
            out.push(PathTerm::new(
                term.amplitude,
                shift(&term.photons[0])?,
                shift(&term.photons[1])?,
            ));
        }
        Ok(Self {
            modes: self.modes,
            terms: merge(out),
        })
    }

    pub fn apply_phase(&self, mode: ModeId, angle: f64) -> Result<Self> {
        check_mode(mode, self.modes)?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("phase angle"));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let n = t.occupation(mode) as f64;
                PathTerm {
                    amplitude: t.amplitude * Complex64::from_polar(1.0, n * angle),
                    photons: t.photons.clone(),
                }
            })
            .collect();
        Ok(Self {
            modes: self.modes,
            terms,
        })
    }

    /// Keeps terms with exactly one photon in each group. No renormalisation.
    pub fn post_select(&self, group_a: &[ModeId], group_b: &[ModeId]) -> Result<Self> {
        if let Some(m) = group_a.iter().find(|m| group_b.contains(m)) {
            return Err(Error::OverlappingGroups(format!("#{}", m.0)));
        }
        let count = |t: &PathTerm<L>, g: &[ModeId]| t.photons.iter().filter(|p| g.contains(&p.mode)).count();
        Ok(self.filtered(|t| count(t, group_a) == 1 && count(t, group_b) == 1))
    }

    /// Terms with one photon in `a` and one in `b`.
    pub fn sub_state(&self, a: ModeId, b: ModeId) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.filtered(|t| t.photons[0].mode == lo && t.photons[1].mode == hi)
    }

    fn filtered(&self, keep: impl Fn(&PathTerm<L>) -> bool) -> Self {
        Self {
            modes: self.modes,
            terms: self.terms.iter().filter(|t| keep(t)).cloned().collect(),
        }
    }
}

impl TwoPhotonState<Displacement> {
    /// Physical squared norm, tracing over wavepacket labels.
    ///
    /// Labels are indexed into an overlap table so each distinct pair is
    /// evaluated once.
    pub fn norm(&self) -> Result<f64> {
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        let mut labels: Vec<Displacement> = Vec::new();
        let mut keyed: Vec<[(ModeId, usize); 2]> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut key = [(ModeId(0), 0); 2];
            for (slot, p) in key.iter_mut().zip(&t.photons) {
                let i = match labels.iter().position(|k| *k == p.label) {
                    Some(i) => i,
                    None => {
                        labels.push(p.label.clone());
                        labels.len() - 1
                    }
                };
                *slot = (p.mode, i);
            }
            keyed.push(key);
        }
        let gram = crate::wavepacket::gram(&labels)?;

        let pair = |x: (ModeId, usize), y: (ModeId, usize)| -> f64 {
            if x.0 == y.0 {
                gram.get(x.1, y.1)
            } else {
                0.0
            }
        };
        let inner = |p: &[(ModeId, usize); 2], q: &[(ModeId, usize); 2]| -> f64 {
            pair(p[0], q[0]) * pair(p[1], q[1]) + pair(p[0], q[1]) * pair(p[1], q[0])
        };

        let mut total = 0.0;
        for (i, (ti, ki)) in self.terms.iter().zip(&keyed).enumerate() {
            total += ti.amplitude.norm_sqr() * inner(ki, ki);
            for (tj, kj) in self.terms.iter().zip(&keyed).skip(i + 1) {
                let s = inner(ki, kj);
                if s != 0.0 {
                    total += 2.0 * (ti.amplitude * tj.amplitude.conj()).re * s;
                }
            }
        }
        clamp_norm(total)
    }

    /// Probability of detecting one photon in `a` and one in `b`, with
    /// frequency-insensitive detectors.
    pub fn outcome_probability(&self, a: ModeId, b: ModeId) -> Result<f64> {
        check_mode(a, self.modes)?;
        check_mode(b, self.modes)?;
        Ok(self.sub_state(a, b).norm()?.min(1.0))
    }
}

pub(crate) fn clamp_norm(total: f64) -> Result<f64> {
    if total < -1e-12 {
        return Err(Error::NegativeNorm(total));
    }
    Ok(total.max(0.0))
}

fn merge<L: Label>(mut terms: Vec<PathTerm<L>>) -> Vec<PathTerm<L>> {
    terms.sort_by(|a, b| a.key_cmp(b));
    let mut out: Vec<PathTerm<L>> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.key_cmp(&t) == Ordering::Equal => last.amplitude += t.amplitude,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.amplitude.norm_sqr() > 1e-30);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::overlap;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const A: ModeId = ModeId(0);
    const B: ModeId = ModeId(1);
    const C: ModeId = ModeId(2);

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn d(x: f64) -> Displacement {
        Displacement::scalar(x)
    }

    fn term(amp: Complex64, (ma, la): (ModeId, f64), (mb, lb): (ModeId, f64)) -> PathTerm<Displacement> {
        PathTerm::new(amp, Photon::new(ma, d(la)), Photon::new(mb, d(lb)))
    }

    /// Direct double sum over terms and both photon pairings, no label table.
    fn brute_norm(s: &TwoPhotonState) -> f64 {
        let ov = |x: &Photon<Displacement>, y: &Photon<Displacement>| {
            if x.mode == y.mode {
                overlap(&x.label, &y.label).unwrap()
            } else {
                0.0
            }
        };
        let mut total = Complex64::new(0.0, 0.0);
        for p in s.terms() {
            for q in s.terms() {
                let [p0, p1] = p.photons();
                let [q0, q1] = q.photons();
                let s = ov(q0, p0) * ov(q1, p1) + ov(q0, p1) * ov(q1, p0);
                total += q.amplitude.conj() * p.amplitude * s;
            }
        }
        total.re
    }

    #[test]
    fn mirror_keeps_photon() {
        let s = TwoPhotonState::from_terms(3, [term(c(1.0), (A, 0.0), (C, 0.0))]).unwrap();
        let out = s.apply_beamsplitter(&BeamSplitter::new(A, B, 1.0)).unwrap();
        assert_eq!(out.terms().len(), 1);
        assert_eq!(out.terms()[0].photons()[0].mode, A);
        assert_eq!(out.terms()[0].amplitude, c(1.0));
    }

    #[test]
    fn hom_cancels_coincidence() {
        let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.0), (B, 0.0))]).unwrap();
        let out = s.apply_beamsplitter(&BeamSplitter::new(A, B, 0.5)).unwrap();
        assert!(out.sub_state(A, B).terms().iter().all(|t| t.amplitude.norm() < 1e-15));
        assert!(out.outcome_probability(A, B).unwrap() < 1e-15);
        // bunched outputs carry everything
        let bunched = out.outcome_probability(A, A).unwrap() + out.outcome_probability(B, B).unwrap();
        assert!((bunched - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinguishable_photons_split_classically() {
        let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.0), (B, 10.0))]).unwrap();
        let out = s.apply_beamsplitter(&BeamSplitter::new(A, B, 0.5)).unwrap();
        assert!((out.outcome_probability(A, B).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn hom_dip_closed_form() {
        for delta in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.0), (B, delta))]).unwrap();
            let out = s.apply_beamsplitter(&BeamSplitter::new(A, B, 0.5)).unwrap();
            let p = out.outcome_probability(A, B).unwrap();
            let expected = (1.0 - (-delta * delta / 2.0f64).exp()) / 2.0;
            assert!((p - expected).abs() < 1e-12, "delta {delta}: {p} vs {expected}");
        }
    }

    #[test]
    fn taubox_shifts_labels() {
        let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.2), (B, 0.0))]).unwrap();
        let out = s.apply_taubox(A, &d(0.3)).unwrap();
        let p = &out.terms()[0].photons()[0];
        assert_eq!(p.mode, A);
        assert!((p.label.components()[0] - 0.5).abs() < 1e-15);

        assert_eq!(s.apply_taubox(A, &d(0.0)).unwrap(), s);
        let back = s.apply_taubox(A, &d(0.7)).unwrap().apply_taubox(A, &d(-0.7)).unwrap();
        let diff = back.terms()[0].photons()[0].label.components()[0] - 0.2;
        assert!(diff.abs() < 1e-15);

        assert!(s.apply_taubox(ModeId(5), &d(0.1)).is_err());
        let wide = Displacement::new([0.1, 0.2]).unwrap();
        assert!(matches!(s.apply_taubox(A, &wide), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn post_selection_filters() {
        let s = TwoPhotonState::from_terms(
            4,
            [
                term(c(0.5), (A, 0.0), (A, 0.0)),
                term(c(0.5), (A, 0.0), (C, 0.0)),
                term(c(0.5), (A, 0.0), (ModeId(3), 0.0)),
                term(c(0.5), (B, 0.0), (C, 0.0)),
            ],
        )
        .unwrap();
        let kept = s.post_select(&[A, B], &[C]).unwrap();
        assert_eq!(kept.terms().len(), 2);
        assert!(s.post_select(&[A, B], &[B]).is_err());
    }

    #[test]
    fn norm_examples() {
        let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.0), (B, 0.0))]).unwrap();
        assert_eq!(s.norm().unwrap(), 1.0);

        let cancel = TwoPhotonState::from_terms(
            2,
            [
                term(c(FRAC_1_SQRT_2), (A, 0.0), (B, 0.0)),
                term(c(-FRAC_1_SQRT_2), (A, 0.0), (B, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(cancel.norm().unwrap(), 0.0);

        let apart = TwoPhotonState::from_terms(
            2,
            [
                term(c(FRAC_1_SQRT_2), (A, 0.0), (B, 0.0)),
                term(c(-FRAC_1_SQRT_2), (A, 10.0), (B, 0.0)),
            ],
        )
        .unwrap();
        assert!((apart.norm().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bosonic_double_occupancy() {
        // a†a†|0⟩ has squared norm 2
        let s = TwoPhotonState::from_terms(1, [term(c(1.0), (A, 0.0), (A, 0.0))]).unwrap();
        assert!((s.norm().unwrap() - 2.0).abs() < 1e-15);
        // distinguishable labels in one mode: 1 + overlap²
        let s = TwoPhotonState::from_terms(1, [term(c(1.0), (A, 0.0), (A, 1.0))]).unwrap();
        assert!((s.norm().unwrap() - (1.0 + (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn invalid_beamsplitters() {
        let s = TwoPhotonState::from_terms(2, [term(c(1.0), (A, 0.0), (B, 0.0))]).unwrap();
        assert!(matches!(
            s.apply_beamsplitter(&BeamSplitter::new(A, B, 1.5)),
            Err(Error::Reflectivity(_))
        ));
        assert!(s.apply_beamsplitter(&BeamSplitter::new(A, A, 0.5)).is_err());
        assert!(s.apply_beamsplitter(&BeamSplitter::new(A, ModeId(7), 0.5)).is_err());
        let mut bad = BeamSplitter::new(A, B, 0.5);
        bad.gray = C;
        assert!(s.apply_beamsplitter(&bad).is_err());
    }

    #[derive(Clone, Debug)]
    enum Op {
        Bs(usize, usize, f64, bool),
        Tau(usize, f64),
        Phase(usize, f64),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0..4usize, 0..4usize, 0.0..=1.0f64, any::<bool>())
                .prop_filter("distinct", |(a, b, _, _)| a != b)
                .prop_map(|(a, b, e, g)| Op::Bs(a, b, e, g)),
            (0..4usize, -2.0..2.0f64).prop_map(|(m, t)| Op::Tau(m, t)),
            (0..4usize, -3.0..3.0f64).prop_map(|(m, t)| Op::Phase(m, t)),
        ]
    }

    fn apply(s: &TwoPhotonState, o: &Op) -> TwoPhotonState {
        match *o {
            Op::Bs(a, b, eta, g) => {
                let mut bs = BeamSplitter::new(ModeId(a), ModeId(b), eta);
                if g {
                    bs.gray = ModeId(a);
                }
                s.apply_beamsplitter(&bs).unwrap()
            }
            Op::Tau(m, t) => s.apply_taubox(ModeId(m), &d(t)).unwrap(),
            Op::Phase(m, t) => s.apply_phase(ModeId(m), t).unwrap(),
        }
    }

    fn input(ma: usize, mb: usize, la: f64, lb: f64) -> TwoPhotonState {
        TwoPhotonState::from_terms(4, [term(c(1.0), (ModeId(ma), la), (ModeId(mb), lb))]).unwrap()
    }

    proptest! {
        #[test]
        fn probability_is_conserved(ops in proptest::collection::vec(op(), 0..10),
                                    la in -1.0..1.0f64, lb in -1.0..1.0f64) {
            let mut s = input(0, 1, la, lb);
            let n0 = s.norm().unwrap();
            for o in &ops {
                s = apply(&s, o);
            }
            prop_assert!((s.norm().unwrap() - n0).abs() < 1e-10);
        }

        #[test]
        fn gram_norm_matches_brute_force(ops in proptest::collection::vec(op(), 0..8),
                                         la in -1.0..1.0f64, lb in -1.0..1.0f64) {
            let mut s = input(0, 2, la, lb);
            for o in &ops {
                s = apply(&s, o);
            }
            prop_assert!((s.norm().unwrap() - brute_norm(&s)).abs() < 1e-12);
            for a in 0..4 {
                for b in a..4 {
                    let p = s.outcome_probability(ModeId(a), ModeId(b)).unwrap();
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }

        #[test]
        fn taubox_commutes_with_disjoint_beamsplitter(eta in 0.0..=1.0f64, t in -2.0..2.0f64) {
            let s = input(0, 2, 0.1, -0.3)
                .apply_beamsplitter(&BeamSplitter::new(ModeId(2), ModeId(3), 0.5))
                .unwrap();
            let bs = BeamSplitter::new(ModeId(0), ModeId(1), eta);
            let one = s.apply_beamsplitter(&bs).unwrap().apply_taubox(ModeId(3), &d(t)).unwrap();
            let two = s.apply_taubox(ModeId(3), &d(t)).unwrap().apply_beamsplitter(&bs).unwrap();
            prop_assert_eq!(one.terms().len(), two.terms().len());
            for (x, y) in one.terms().iter().zip(two.terms()) {
                prop_assert!((x.amplitude - y.amplitude).norm() < 1e-12);
                prop_assert_eq!(x.photons(), y.photons());
            }
        }
    }
}
