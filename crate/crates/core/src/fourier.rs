//! Discrete Fourier transform along the angular index of a `rows × M_θ`
//! field stored radial-fastest (the canonical node layout).

use crate::scalar::Real;
use num_complex::Complex;
use num_traits::Zero;

/// DFT over the `M_θ` nodes `θ_i = 2π(i+1)/M_θ` with symmetric mode range
/// `m ∈ [−K, K]`, `K = (M_θ−1)/2`. Mode slot `q` holds `m = q − K`.
#[derive(Debug, Clone)]
pub struct AngularDft<T> {
    m_theta: usize,
    /// `e^{−2πi k / M_θ}`
    twiddle: Vec<Complex<T>>,
}

impl<T: Real> AngularDft<T> {
    pub fn new(m_theta: usize) -> Self {
        assert!(m_theta % 2 == 1, "odd angular count required");
        let mf = T::from_usize_lossy(m_theta);
        let twiddle = (0..m_theta)
            .map(|k| {
                let a = -T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / mf;
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        Self { m_theta, twiddle }
    }

    pub fn len(&self) -> usize {
        self.m_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self) -> i64 {
        ((self.m_theta - 1) / 2) as i64
    }

    /// Mode number stored in slot `q`.
    pub fn mode(&self, q: usize) -> i64 {
        q as i64 - self.half_width()
    }

    #[inline]
    fn phase(&self, mode: i64, i: usize) -> usize {
        (mode * (i as i64 + 1)).rem_euclid(self.m_theta as i64) as usize
    }

    /// `v̂[j, q] = (1/M_θ) Σ_i v[j, i] e^{−i m θ_i}`.
    pub fn forward(&self, v: &[Complex<T>], rows: usize) -> Vec<Complex<T>> {
        let m = self.m_theta;
        debug_assert_eq!(v.len(), rows * m);
        let scale = T::one() / T::from_usize_lossy(m);
        let mut out = vec![Complex::zero(); rows * m];
        for q in 0..m {
            let mode = self.mode(q);
            let dst = &mut out[q * rows..(q + 1) * rows];
            for i in 0..m {
                let w = self.twiddle[self.phase(mode, i)] * scale;
                for (d, s) in dst.iter_mut().zip(&v[i * rows..(i + 1) * rows]) {
                    *d += s * w;
                }
            }
        }
        out
    }

    /// `v[j, i] = Σ_q v̂[j, q] e^{i m θ_i}`.
    pub fn inverse(&self, vhat: &[Complex<T>], rows: usize) -> Vec<Complex<T>> {
        let m = self.m_theta;
        debug_assert_eq!(vhat.len(), rows * m);
        let mut out = vec![Complex::zero(); rows * m];
        for i in 0..m {
            let dst = &mut out[i * rows..(i + 1) * rows];
            for q in 0..m {
                let w = self.twiddle[self.phase(self.mode(q), i)].conj();
                for (d, s) in dst.iter_mut().zip(&vhat[q * rows..(q + 1) * rows]) {
                    *d += s * w;
                }
            }
        }
        out
    }
}
