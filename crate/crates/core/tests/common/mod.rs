//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use flipbound::Matrix;
use rand::Rng;
use rand_distr::StandardNormal;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature with interval bisection.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        // a few forced levels so a narrow peak is not missed by both rules;
        // the roundoff floor keeps the halving of `tol` finite
        if depth <= 24 && (err <= tol || err <= 1e-15 * v.abs() || depth == 0) {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, tol, 30)
}

/// `ln Γ(m/2)` for a positive integer `m`, by the recurrence from `Γ(1) = 1`
/// and `Γ(1/2) = √π`.
fn ln_gamma_half(m: usize) -> f64 {
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    let mut acc = if m % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    while 2.0 * x < m as f64 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// `f_k(θ)` from the F-distribution form
/// `Γ(k)/Γ(k/2)² ∫₀^{(1−cos θ)/(1+cos θ)} z^{(k−2)/2} (1+z)^{−k} dz`,
/// integrated directly with the integrand evaluated in log space.
pub fn flip_by_quadrature(k: usize, cosine: f64) -> f64 {
    if cosine >= 1.0 {
        return 0.0;
    }
    let kf = k as f64;
    let log_c = ln_gamma_half(2 * k) - 2.0 * ln_gamma_half(k);
    let integrand = move |z: f64| {
        if z <= 0.0 {
            return if k == 2 { log_c.exp() } else { 0.0 };
        }
        (log_c + (kf - 2.0) / 2.0 * z.ln() - kf * z.ln_1p()).exp()
    };
    let upper = (1.0 - cosine) / (1.0 + cosine);
    // split at the integrand's mode so the peak sits on a panel edge
    let mode = ((kf - 2.0) / (kf + 2.0)).max(0.0);
    if mode > 0.0 && mode < upper {
        integrate(&integrand, 0.0, mode, 1e-13) + integrate(&integrand, mode, upper, 1e-13)
    } else {
        integrate(&integrand, 0.0, upper, 1e-13)
    }
}

/// Random `n × dim` Gaussian points with labels from a noisy random hyperplane.
pub fn random_instance(rng: &mut impl Rng, n: usize, dim: usize) -> (Matrix, Vec<i8>) {
    let w: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut data = Vec::with_capacity(n * dim);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let noise: f64 = rng.sample(StandardNormal);
        let s: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.8 * noise;
        y.push(if s > 0.0 { 1 } else { -1 });
        data.extend(x);
    }
    (Matrix::from_vec(n, dim, data).unwrap(), y)
}

/// Smallest zero-one error over `directions` random unit directions, each
/// with its best intercept.
pub fn sweep_oracle(x: &Matrix, y: &[i8], directions: usize, seed: u64) -> usize {
    use flipbound::optimizer::best_threshold;
    let mut rng = flipbound::rng::stream(seed, 99);
    let mut best = usize::MAX;
    for _ in 0..directions {
        let w: Vec<f64> = (0..x.cols()).map(|_| rng.sample(StandardNormal)).collect();
        let scores: Vec<f64> = x.iter_rows().map(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
        best = best.min(best_threshold(&scores, y).1);
    }
    best
}
