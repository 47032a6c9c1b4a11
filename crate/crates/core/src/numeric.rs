//! Small scalar numerics shared by the geometric modules.

/// Polynomial extrapolation of `(h_i, y_i)` samples to `h = 0` (Neville's
/// scheme). With geometrically shrinking `h` this is Richardson extrapolation.
pub fn extrapolate_to_zero(h: &[f64], y: &[f64]) -> f64 {
    assert_eq!(h.len(), y.len());
    assert!(!h.is_empty());
    let mut p = y.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m]);
        }
    }
    p[0]
}

/// Geometric step sequence `h0, h0/2, ..., h0/2^(levels-1)`.
pub fn halving_steps(h0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|j| h0 / f64::powi(2.0, j as i32)).collect()
}

/// One-sided slopes of `f` at 0, extrapolated from secants.
pub fn one_sided_slopes<F: Fn(f64) -> f64>(f: F, steps: &[f64]) -> (f64, f64) {
    let f0 = f(0.0);
    let right: Vec<f64> = steps.iter().map(|&h| (f(h) - f0) / h).collect();
    let left: Vec<f64> = steps.iter().map(|&h| (f0 - f(-h)) / h).collect();
    (
        extrapolate_to_zero(steps, &left),
        extrapolate_to_zero(steps, &right),
    )
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Composite Simpson rule over `[a, b]` with an even number of panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, steps: usize) -> f64 {
    let n = if steps.is_multiple_of(2) {
        steps
    } else {
        steps + 1
    };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Composite Simpson rule on equally spaced samples (odd count) over `[a, b]`.
pub fn simpson_samples(values: &[f64], a: f64, b: f64) -> f64 {
    let n = values.len() - 1;
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "Simpson needs an even number of panels"
    );
    let h = (b - a) / n as f64;
    let inner: f64 = values[1..n]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    (values[0] + values[n] + inner) * h / 3.0
}

/// `n` uniformly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
