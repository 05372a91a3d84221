//! Independent reference model of the gate.
//!
//! Works in the time domain, where a spectral displacement τ becomes the phase
//! e^{iτt}. The network is a 6×6 single-photon transfer matrix U(t), and
//! two-photon amplitudes are symmetrised products of its entries integrated
//! over both photons' times with a trapezoid rule. Nothing here goes through
//! the crate's path-term engine.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub const C0: usize = 0;
pub const C1: usize = 1;
pub const T0: usize = 2;
pub const T1: usize = 3;
pub const V1: usize = 4;
pub const V2: usize = 5;
const MODES: usize = 6;

type U = [[C; MODES]; MODES];

enum Op {
    Bs { plain: usize, gray: usize, eta: f64 },
    Tau { mode: usize, index: usize },
}

fn network() -> Vec<Op> {
    use Op::*;
    vec![
        Tau { mode: C0, index: 1 },
        Tau { mode: T0, index: 3 },
        Bs { plain: T0, gray: T1, eta: 0.5 },
        Tau { mode: C1, index: 2 },
        Tau { mode: T1, index: 4 },
        Bs { plain: T0, gray: C1, eta: 1.0 / 3.0 },
        Bs { plain: C0, gray: V1, eta: 1.0 / 3.0 },
        Bs { plain: T1, gray: V2, eta: 1.0 / 3.0 },
        Bs { plain: T0, gray: T1, eta: 0.5 },
        Tau { mode: T0, index: 5 },
    ]
}

fn identity() -> U {
    let mut u = [[C::new(0.0, 0.0); MODES]; MODES];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    u
}

fn left_multiply(b: &U, u: &U) -> U {
    let mut out = [[C::new(0.0, 0.0); MODES]; MODES];
    for i in 0..MODES {
        for j in 0..MODES {
            out[i][j] = (0..MODES).map(|k| b[i][k] * u[k][j]).sum();
        }
    }
    out
}

/// Transfer matrix at time `t`, followed by Hadamards on the qubits measured in X.
pub fn transfer(t: f64, tau: &[f64; 5], x_control: bool, x_target: bool) -> U {
    let mut u = identity();
    for op in network() {
        let mut b = identity();
        match op {
            Op::Bs { plain, gray, eta } => {
                let (r, s) = (eta.sqrt(), (1.0 - eta).sqrt());
                b[plain][plain] = C::new(r, 0.0);
                b[gray][plain] = C::new(s, 0.0);
                b[plain][gray] = C::new(s, 0.0);
                b[gray][gray] = C::new(-r, 0.0);
            }
            Op::Tau { mode, index } => b[mode][mode] = C::from_polar(1.0, tau[index - 1] * t),
        }
        u = left_multiply(&b, &u);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (on, (r0, r1)) in [(x_control, (C0, C1)), (x_target, (T0, T1))] {
        if on {
            let mut b = identity();
            b[r0][r0] = C::new(h, 0.0);
            b[r0][r1] = C::new(h, 0.0);
            b[r1][r0] = C::new(h, 0.0);
            b[r1][r1] = C::new(-h, 0.0);
            u = left_multiply(&b, &u);
        }
    }
    u
}

struct Grid {
    points: Vec<f64>,
    weight: f64,
}

fn grid() -> Grid {
    let (half, n) = (8.0, 161);
    let h = 2.0 * half / (n - 1) as f64;
    Grid {
        points: (0..n).map(|i| -half + i as f64 * h).collect(),
        weight: h,
    }
}

/// π^{-1/4} e^{-t²/2}, the time-domain partner of the unit-bandwidth Gaussian.
fn amplitude(t: f64) -> f64 {
    std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp()
}

/// Unnormalised output density matrix (trace = success probability) for a
/// two-qubit input with amplitudes over |00⟩,|01⟩,|10⟩,|11⟩, rails of the
/// output basis chosen per qubit.
pub fn output_block(input: &[C; 4], tau: &[f64; 5], x_control: bool, x_target: bool) -> [[C; 4]; 4] {
    let g = grid();
    let us: Vec<U> = g.points.iter().map(|&t| transfer(t, tau, x_control, x_target)).collect();
    let ctl = [C0, C1];
    let tgt = [T0, T1];
    let mut rho = [[C::new(0.0, 0.0); 4]; 4];
    for (p, up) in us.iter().enumerate() {
        for (q, uq) in us.iter().enumerate() {
            let w = amplitude(g.points[p]) * amplitude(g.points[q]) * g.weight;
            // F for detection of one photon in control output rail a at time
            // t_p and one in target output rail b at time t_q
            let mut f = [C::new(0.0, 0.0); 4];
            for (out, fv) in f.iter_mut().enumerate() {
                let (i, j) = (ctl[out >> 1], tgt[out & 1]);
                for (inp, &c) in input.iter().enumerate() {
                    let (a, b) = (ctl[inp >> 1], tgt[inp & 1]);
                    *fv += c * (up[i][a] * uq[j][b] + up[i][b] * uq[j][a]);
                }
                *fv *= w;
            }
            for x in 0..4 {
                for y in 0..4 {
                    rho[x][y] += f[x] * f[y].conj();
                }
            }
        }
    }
    rho
}

/// Joint outcome probabilities, outcome index 2·(control rail) + target rail.
pub fn joint(input: &[C; 4], tau: &[f64; 5], x_control: bool, x_target: bool) -> [f64; 4] {
    let rho = output_block(input, tau, x_control, x_target);
    std::array::from_fn(|k| rho[k][k].re)
}

/// ∫ ψ(k) ψ(k + Δ) dk for ψ(k) = π^{-1/4} e^{-k²/2}, by trapezoid rule.
pub fn gaussian_overlap(delta: f64) -> f64 {
    let (lo, hi, n) = (-20.0, 20.0, 8001);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let k = lo + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            w * amplitude(k) * amplitude(k + delta)
        })
        .sum::<f64>()
        * h
}
