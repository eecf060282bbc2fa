//! Gauss–Legendre quadrature, Richardson tables and a bracketing root finder.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Composite rule over consecutive panels given by `breaks`.
    pub fn composite(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Richardson table for a sequence computed at step ratios of two.
///
/// `values[k]` is the estimate at step `h0 / 2^k` and the error expands in
/// powers `h^(p0), h^(p0 + dp), ...`. Returns the extrapolated value and the
/// magnitude of the last correction as an error estimate.
pub fn richardson(values: &[f64], p0: u32, dp: u32) -> (f64, f64) {
    assert!(!values.is_empty());
    let mut table: Vec<f64> = values.to_vec();
    let mut err = f64::INFINITY;
    let mut p = p0;
    for _ in 1..values.len() {
        let factor = 2f64.powi(p as i32) - 1.0;
        let next: Vec<f64> = table
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / factor)
            .collect();
        err = (next[next.len() - 1] - table[table.len() - 1]).abs();
        table = next;
        p += dp;
    }
    (table[0], err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub f_root: f64,
    /// Width of the final bracket.
    pub width: f64,
    pub evaluations: usize,
}

/// Brent's method on a bracket with a sign change.
///
/// `f` may fail; failures are returned unchanged. If `f(a)` and `f(b)` have
/// the same sign, `Err(Ok(z))` is not used; callers check signs beforehand.
pub fn brent<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<RootResult, E> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut evaluations = 0;
    if fa == 0.0 {
        return Ok(RootResult { root: a, f_root: 0.0, width: 0.0, evaluations });
    }
    if fb == 0.0 || a == b {
        return Ok(RootResult { root: b, f_root: fb, width: 0.0, evaluations });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb.abs() <= ftol && (b - a).abs() <= xtol.max(4.0 * f64::EPSILON * b.abs()) {
            break;
        }
        if (b - a).abs() <= 0.5 * xtol {
            break;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { s > lo && s < b } else { s > b && s < lo };
        let tol = xtol.max(4.0 * f64::EPSILON * b.abs());
        if !between
            || (mflag && (s - b).abs() >= 0.5 * (b - c).abs())
            || (!mflag && (s - b).abs() >= 0.5 * (c - d).abs())
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        evaluations += 1;
        d = c;
        c = b;
        fc = fb;
        if (fa < 0.0) != (fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if fb == 0.0 {
            break;
        }
    }
    Ok(RootResult { root: b, f_root: fb, width: (b - a).abs(), evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let gl = GaussLegendre::new(7);
        assert!(gl.nodes[3].abs() < 1e-15);
        let v = gl.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn richardson_removes_even_powers() {
        // trapezoid on exp over [0,1]
        let trap = |n: usize| {
            let h = 1.0 / n as f64;
            let inner: f64 = (1..n).map(|i| (i as f64 * h).exp()).sum();
            h * (0.5 * (1.0 + 1f64.exp()) + inner)
        };
        let vals: Vec<f64> = (0..5).map(|k| trap(2 << k)).collect();
        let (v, _) = richardson(&vals, 2, 2);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn brent_linear_root() {
        let r = brent(|z| Ok::<_, ()>(z - 1.0), 0.5, 2.0, -0.5, 1.0, 1e-14, 1e-14, 100).unwrap();
        assert!((r.root - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brent_zero_width_returns_endpoint() {
        let r = brent(|z| Ok::<_, ()>(z - 1.0), 1.5, 1.5, 0.5, 0.5, 1e-14, 1e-14, 100).unwrap();
        assert_eq!(r.root, 1.5);
    }
}
