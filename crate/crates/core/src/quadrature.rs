//! Gauss–Legendre rules used for moment integrals and reference solutions.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (T::one(), T::zero()) } else { (p1, p0) };
    let d = T::from_usize_lossy(n) * (x * p - pm1) / (x * x - T::one());
    (p, d)
}

/// Composite rule: `panels` equal panels on `[a, b]`, each with the `order`-point
/// Gauss–Legendre rule.
pub fn composite<T: Real>(a: T, b: T, panels: usize, order: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(order);
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * T::from_usize_lossy(p);
        let mid = lo + h / T::lit(2.0);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + *xi * h / T::lit(2.0));
            weights.push(*wi * h / T::lit(2.0));
        }
    }
    (nodes, weights)
}

/// Adaptive bisection with a fixed `order`-point Gauss–Legendre rule: a panel
/// is accepted when the rule on the panel and on its two halves agree to
/// `tol` (absolute). Intended for smooth integrands with at most integrable
/// endpoint singularities.
pub fn adaptive<T: Real, V>(mut f: impl FnMut(T) -> V, a: T, b: T, tol: T, max_depth: usize) -> V
where
    V: Copy + num_traits::Zero + std::ops::Mul<T, Output = V> + std::ops::Sub<Output = V> + Magnitude<T>,
{
    let (x, w) = gauss_legendre::<T>(12);
    let mut rule = |lo: T, hi: T| -> V {
        let mid = (lo + hi) / T::lit(2.0);
        let half = (hi - lo) / T::lit(2.0);
        x.iter()
            .zip(&w)
            .fold(V::zero(), |acc, (xi, wi)| acc + f(mid + *xi * half) * (*wi * half))
    };
    let whole = rule(a, b);
    let mut total = V::zero();
    // (lo, hi, estimate, tolerance, depth)
    let mut stack = vec![(a, b, whole, tol, 0usize)];
    while let Some((lo, hi, est, t, depth)) = stack.pop() {
        let mid = (lo + hi) / T::lit(2.0);
        let left = rule(lo, mid);
        let right = rule(mid, hi);
        let refined = left + right;
        if (refined - est).magnitude() <= t || depth >= max_depth {
            total = total + refined;
        } else {
            let t2 = t / T::lit(2.0);
            stack.push((lo, mid, left, t2, depth + 1));
            stack.push((mid, hi, right, t2, depth + 1));
        }
    }
    total
}

/// Absolute value for real and complex integrands.
pub trait Magnitude<T> {
    fn magnitude(self) -> T;
}

impl<T: Real> Magnitude<T> for T {
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Magnitude<T> for num_complex::Complex<T> {
    fn magnitude(self) -> T {
        self.norm()
    }
}
