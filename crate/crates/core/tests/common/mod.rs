#![allow(dead_code)]

use bidiag_traces::BidiagonalMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_ORDERS: [usize; 6] = [1, 2, 3, 5, 10, 20];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> BidiagonalMatrix {
    let q = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let e = (1..n).map(|_| rng.gen_range(lo..=hi)).collect();
    BidiagonalMatrix::new(q, e).unwrap()
}

fn log_draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

/// `q_i` log-uniform in `[lo, hi]`, `e_i = u_i q_i` with `u_i` log-uniform in `[1e-3, 2]`.
///
/// Tying `e_i` to `q_i` keeps `F_i <= 2`, so the inverse stays in binary64 range
/// however wide `[lo, hi]` is.
pub fn loguniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> BidiagonalMatrix {
    let q: Vec<f64> = (0..n).map(|_| log_draw(rng, lo, hi)).collect();
    let e = (1..n)
        .map(|i| q[i - 1] * log_draw(rng, 1e-3, 2.0))
        .collect();
    BidiagonalMatrix::new(q, e).unwrap()
}

fn graded_q(rng: &mut ChaCha8Rng, n: usize, decades: f64) -> Vec<f64> {
    let step = if n > 1 { decades / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|i| 10f64.powf(-step * i as f64) * rng.gen_range(0.5..=2.0))
        .collect()
}

/// `q` decays geometrically over `decades` orders of magnitude; `e_i = u_i q_i`, `u_i` in [0.5, 2].
pub fn graded(rng: &mut ChaCha8Rng, n: usize, decades: f64) -> BidiagonalMatrix {
    let q = graded_q(rng, n, decades);
    let e = (1..n)
        .map(|i| q[i - 1] * rng.gen_range(0.5..=2.0))
        .collect();
    BidiagonalMatrix::new(q, e).unwrap()
}

/// `q` as in [`graded`], `e` uniform in [0.5, 2]; only small `N` stay in range.
pub fn graded_unit_e(rng: &mut ChaCha8Rng, n: usize, decades: f64) -> BidiagonalMatrix {
    let q = graded_q(rng, n, decades);
    let e = (1..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
    BidiagonalMatrix::new(q, e).unwrap()
}

/// The 200-matrix suite: `N` cycles through [`SUITE_ORDERS`], entries uniform in [0.5, 2].
pub fn agreement_suite() -> Vec<BidiagonalMatrix> {
    let mut r = rng(0x5eed_0001);
    (0..200)
        .map(|k| uniform(&mut r, SUITE_ORDERS[k % SUITE_ORDERS.len()], 0.5, 2.0))
        .collect()
}

pub fn unit2() -> BidiagonalMatrix {
    BidiagonalMatrix::new(vec![1.0, 1.0], vec![1.0]).unwrap()
}
