//! Box-constrained Nelder–Mead on a fixed dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::TAU_COUNT;

type Point = [f64; TAU_COUNT];

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOptions {
    pub bound: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Edge length of the initial simplex.
    pub step: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Minimum {
    pub x: Point,
    pub value: f64,
    pub evaluations: usize,
}

fn clamp(x: Point, bound: f64) -> Point {
    x.map(|v| v.clamp(-bound, bound))
}

fn combine(a: &Point, b: &Point, t: f64) -> Point {
    // a + t (b − a)
    std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))
}

fn diameter(vertices: &[(Point, f64)]) -> f64 {
    let best = &vertices[0].0;
    vertices[1..]
        .iter()
        .map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

struct Run<'a, F> {
    f: &'a mut F,
    opts: SimplexOptions,
    evaluations: usize,
}

impl<F: FnMut(&Point) -> f64> Run<'_, F> {
    fn eval(&mut self, x: Point) -> (Point, f64) {
        let x = clamp(x, self.opts.bound);
        self.evaluations += 1;
        let v = (self.f)(&x);
        (x, if v.is_nan() { f64::INFINITY } else { v })
    }

    /// Simplex with edges `step · directions[i]` from `start`, each edge
    /// flipped if it would leave the box.
    fn initial(&mut self, start: Point, directions: &[Point; TAU_COUNT]) -> Vec<(Point, f64)> {
        let mut vertices = vec![self.eval(start)];
        for d in directions {
            let mut x = vertices[0].0;
            let out = x.iter().zip(d).any(|(v, e)| (v + self.opts.step * e).abs() > self.opts.bound);
            let step = if out { -self.opts.step } else { self.opts.step };
            for (v, e) in x.iter_mut().zip(d) {
                *v += step * e;
            }
            let v = self.eval(x);
            vertices.push(v);
        }
        vertices
    }

    fn descend(&mut self, mut s: Vec<(Point, f64)>, budget: usize) -> (Vec<(Point, f64)>, usize) {
        let mut iterations = 0;
        loop {
            s.sort_by(|a, b| a.1.total_cmp(&b.1));
            if iterations >= budget || diameter(&s) < self.opts.tolerance {
                return (s, iterations);
            }
            iterations += 1;
            let n = TAU_COUNT as f64;
            let worst = s[TAU_COUNT];
            let mut centroid = [0.0; TAU_COUNT];
            for (x, _) in &s[..TAU_COUNT] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n;
                }
            }

            let reflected = self.eval(combine(&centroid, &worst.0, -1.0));
            if reflected.1 < s[0].1 {
                let expanded = self.eval(combine(&centroid, &worst.0, -2.0));
                s[TAU_COUNT] = if expanded.1 < reflected.1 { expanded } else { reflected };
                continue;
            }
            if reflected.1 < s[TAU_COUNT - 1].1 {
                s[TAU_COUNT] = reflected;
                continue;
            }
            let contracted = if reflected.1 < worst.1 {
                self.eval(combine(&centroid, &reflected.0, 0.5))
            } else {
                self.eval(combine(&centroid, &worst.0, 0.5))
            };
            if contracted.1 < worst.1.min(reflected.1) {
                s[TAU_COUNT] = contracted;
                continue;
            }
            let best = s[0].0;
            for vertex in s.iter_mut().skip(1) {
                *vertex = self.eval(combine(&best, &vertex.0, 0.5));
            }
        }
    }
}

fn axes() -> [Point; TAU_COUNT] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

/// Orthonormal frame from Gram–Schmidt on Gaussian vectors.
fn random_frame(rng: &mut ChaCha8Rng) -> [Point; TAU_COUNT] {
    let mut frame = [[0.0; TAU_COUNT]; TAU_COUNT];
    for i in 0..TAU_COUNT {
        let mut v: Point = std::array::from_fn(|_| rng.sample(StandardNormal));
        for u in &frame[..i] {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(u) {
                *a -= dot * b;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        frame[i] = v.map(|a| a / norm);
    }
    frame
}

/// Minimises `f` from `start`.
///
/// A collapsed simplex is rebuilt around the best vertex in a freshly rotated
/// frame and the search resumes, until several rebuilds in a row bring no
/// improvement or the iteration budget runs out. Max-type objectives have
/// their minima on kinks, where an axis-aligned simplex tends to stall.
/// The rotations come from a fixed-seed generator, so results are reproducible.
pub(crate) fn minimize<F: FnMut(&Point) -> f64>(f: &mut F, start: Point, opts: SimplexOptions) -> Minimum {
    const PATIENCE: usize = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut run = Run {
        f,
        opts,
        evaluations: 0,
    };
    let mut simplex = run.initial(start, &axes());
    let mut used = 0;
    let mut best = (start, f64::INFINITY);
    let mut idle = 0;
    loop {
        let (s, iterations) = run.descend(simplex, opts.max_iterations - used);
        used += iterations;
        if s[0].1 < best.1 - 1e-15 * best.1.abs() {
            idle = 0;
        } else {
            idle += 1;
        }
        if s[0].1 < best.1 {
            best = s[0];
        }
        if idle >= PATIENCE || used >= opts.max_iterations || best.1 == 0.0 {
            break;
        }
        simplex = run.initial(best.0, &random_frame(&mut rng));
    }
    Minimum {
        x: best.0,
        value: best.1,
        evaluations: run.evaluations,
    }
}
