//! Catalog of refraction indices, sources and scattering set-ups.

use crate::grid::DiskGrid;
use crate::scalar::Real;
use num_complex::Complex;
use thiserror::Error;

pub type Point<T> = [T; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}` (see `list-problems`)")]
    UnknownProblem(String),
    #[error("wavenumber must be positive, got {0}")]
    Wavenumber(f64),
    #[error("disk radius must be positive, got {0}")]
    Radius(f64),
}

/// Closed axis-aligned square `Q_r(p)` of side `2r` centred at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square<T> {
    pub center: Point<T>,
    pub half_side: T,
}

impl<T: Real> Square<T> {
    pub fn contains(&self, x: Point<T>) -> bool {
        (x[0] - self.center[0]).abs() <= self.half_side
            && (x[1] - self.center[1]).abs() <= self.half_side
    }
}

fn dist<T: Real>(a: Point<T>, b: Point<T>) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Index of refraction `n(x)`, described through `n(x)²`.
#[derive(Debug, Clone, PartialEq)]
pub enum RefractionKind<T> {
    /// `n ≡ value`.
    Constant(T),
    /// `n₀² = 2 + x₁/|x|` (defined as 2 at the origin).
    AngularBackground,
    /// `n² = n₀² + e^{−|(x₁−1, x₂)|²}`.
    AngularPlusBump,
    /// `n² = 1 + jump·χ_{B_radius(center)}`.
    PiecewiseDisk { center: Point<T>, radius: T, jump: T },
    /// `n² = 1 + jump·χ_{Q_half_side(center)}`.
    PiecewiseSquare { center: Point<T>, half_side: T, jump: T },
    /// `n² = 1 + χ_E/(1 + |x − shift|)`, `E = {|x₁ − sin x₂| ≤ 1/4}`.
    SinStrip { shift: Point<T> },
}

impl<T: Real> RefractionKind<T> {
    pub fn n_squared(&self, x: Point<T>) -> T {
        let one = T::one();
        match self {
            Self::Constant(c) => *c * *c,
            Self::AngularBackground => angular_background(x),
            Self::AngularPlusBump => {
                let d2 = (x[0] - one).powi(2) + x[1] * x[1];
                angular_background(x) + (-d2).exp()
            }
            Self::PiecewiseDisk {
                center,
                radius,
                jump,
            } => {
                if dist(x, *center) <= *radius {
                    one + *jump
                } else {
                    one
                }
            }
            Self::PiecewiseSquare {
                center,
                half_side,
                jump,
            } => {
                let q = Square {
                    center: *center,
                    half_side: *half_side,
                };
                if q.contains(x) {
                    one + *jump
                } else {
                    one
                }
            }
            Self::SinStrip { shift } => {
                if in_sin_strip(x) {
                    one + one / (one + dist(x, *shift))
                } else {
                    one
                }
            }
        }
    }

    pub fn index(&self, x: Point<T>) -> T {
        match self {
            Self::Constant(c) => *c,
            _ => self.n_squared(x).sqrt(),
        }
    }

    /// `Some(n)` when the index is constant everywhere.
    pub fn constant_value(&self) -> Option<T> {
        match self {
            Self::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

fn angular_background<T: Real>(x: Point<T>) -> T {
    let r = x[0].hypot(x[1]);
    if r == T::zero() {
        T::lit(2.0)
    } else {
        T::lit(2.0) + x[0] / r
    }
}

/// Membership in `E = {|x₁ − sin x₂| ≤ 0.25}` (closed).
pub fn in_sin_strip<T: Real>(x: Point<T>) -> bool {
    (x[0] - x[1].sin()).abs() <= T::lit(0.25)
}

/// Incident plane wave `e^{ik x₁}`.
pub fn incident_plane_wave<T: Real>(k: T, x: Point<T>) -> Complex<T> {
    Complex::from_polar(T::one(), k * x[0])
}

/// Right-hand side of the scattered-field problem,
/// `k²(n₀² − n²)(x)·e^{ik x₁}`.
pub fn scattering_rhs<T: Real>(
    background: &RefractionKind<T>,
    medium: &RefractionKind<T>,
    k: T,
    x: Point<T>,
) -> Complex<T> {
    let contrast = background.n_squared(x) - medium.n_squared(x);
    if contrast == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    incident_plane_wave(k, x) * (k * k * contrast)
}

/// Source term `f` of `Δu + k²n²u = f`.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind<T> {
    /// `Σ sign·e^{−σ|x − c|²}`; an empty list is the zero source.
    GaussianSum { sigma: T, terms: Vec<(Point<T>, T)> },
    /// `Σ sign·χ_Q(x)`.
    CharacteristicCombo { squares: Vec<(Square<T>, T)> },
    /// Scattered-field source for the incident wave `e^{ik x₁}`.
    ScatteringInduced {
        background: RefractionKind<T>,
        medium: RefractionKind<T>,
    },
}

impl<T: Real> SourceKind<T> {
    pub fn zero() -> Self {
        Self::GaussianSum {
            sigma: T::lit(30.0),
            terms: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::GaussianSum { terms, .. } => terms.is_empty(),
            Self::CharacteristicCombo { squares } => squares.is_empty(),
            Self::ScatteringInduced { background, medium } => background == medium,
        }
    }

    /// Radius outside which the source is below `e^{−41}` (Gaussians) or
    /// exactly zero (squares). `None` for sources without compact support.
    pub fn support_radius(&self) -> Option<T> {
        match self {
            Self::GaussianSum { sigma, terms } => {
                let reach = (T::lit(41.0) / *sigma).sqrt();
                Some(
                    terms
                        .iter()
                        .map(|(c, _)| c[0].hypot(c[1]) + reach)
                        .fold(T::zero(), T::max),
                )
            }
            Self::CharacteristicCombo { squares } => Some(
                squares
                    .iter()
                    .map(|(q, _)| q.center[0].hypot(q.center[1]) + q.half_side * T::SQRT_2())
                    .fold(T::zero(), T::max),
            ),
            Self::ScatteringInduced { .. } => None,
        }
    }
}

/// Pointwise value of a source; `k` only matters for scattering sources.
pub fn evaluate_source<T: Real>(s: &SourceKind<T>, x: Point<T>, k: T) -> Complex<T> {
    match s {
        SourceKind::GaussianSum { sigma, terms } => {
            let v = terms.iter().fold(T::zero(), |acc, (c, sign)| {
                let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                acc + *sign * (-*sigma * d2).exp()
            });
            Complex::new(v, T::zero())
        }
        SourceKind::CharacteristicCombo { squares } => {
            let v = squares
                .iter()
                .filter(|(q, _)| q.contains(x))
                .fold(T::zero(), |a, (_, s)| a + *s);
            Complex::new(v, T::zero())
        }
        SourceKind::ScatteringInduced { background, medium } => {
            scattering_rhs(background, medium, k, x)
        }
    }
}

/// Nodal sum of the incident plane wave and a scattered field.
pub fn total_field<T: Real>(scattered: &[Complex<T>], k: T, grid: &DiskGrid<T>) -> Vec<Complex<T>> {
    scattered
        .iter()
        .enumerate()
        .map(|(g, us)| us + incident_plane_wave(k, grid.cartesian(g)))
        .collect()
}

/// Full statement of one problem `Δu + k²n²u = f` on `B_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub k: T,
    pub refraction: RefractionKind<T>,
    pub source: SourceKind<T>,
    pub radius: T,
    pub m_theta: usize,
    pub m_rho: usize,
}

/// Catalog entries: name, description, and the default `(R, M_θ, M_ρ)`.
pub const CATALOG: &[(&str, &str, (f64, usize, usize))] = &[
    ("f0", "n = 1, f = -exp(-30|x|^2)", (4.0, 21, 100)),
    ("f1", "n = 1, f = exp(-30|x|^2)", (4.0, 21, 100)),
    ("f2", "n = 1, dipole e(p+) - e(p-)", (4.0, 21, 100)),
    ("f3", "n = 1, tripole e(p+) - e(p-) + e(q+)", (4.0, 21, 100)),
    ("f4", "n = 1, quadrupole e(p+) - e(p-) + e(q+) - e(q-)", (4.0, 21, 100)),
    ("PVR1", "n^2 = 2 + x1/|x| + bump, f = chi(Q_0.5(0,0))", (8.0, 41, 600)),
    ("PVR2", "n^2 = 2 + x1/|x| + bump, f = chi(Q_0.5(0.5,0)) - chi(Q_0.5(-0.5,0))", (8.0, 41, 600)),
    ("PCR1", "scattering, n^2 = 1 + chi(B_0.5(0,0))", (8.0, 41, 600)),
    ("PCR2", "scattering, n^2 = 1 + chi(B_0.5(0.5,0.5))", (8.0, 41, 600)),
    ("PCR3", "scattering, n^2 = 1 + chi(Q_0.5(0,0))", (8.0, 41, 600)),
    ("PCR4", "scattering, n^2 = 1 + chi(Q_0.5(0.5,0.5))", (8.0, 41, 600)),
    ("PW1", "scattering, n^2 = 1 + chi_E/(1+|x|), E = {|x1 - sin x2| <= 0.25}", (8.0, 41, 600)),
    ("PW2", "scattering, n^2 = 1 + chi_E/(1+|(x1, x2-2)|)", (8.0, 41, 600)),
    ("zero", "n = 1, f = 0", (4.0, 21, 100)),
];

fn gaussian_source<T: Real>(terms: &[((f64, f64), f64)]) -> SourceKind<T> {
    SourceKind::GaussianSum {
        sigma: T::lit(30.0),
        terms: terms
            .iter()
            .map(|((a, b), s)| ([T::lit(*a), T::lit(*b)], T::lit(*s)))
            .collect(),
    }
}

fn unit_square<T: Real>(cx: f64, cy: f64) -> Square<T> {
    Square {
        center: [T::lit(cx), T::lit(cy)],
        half_side: T::lit(0.5),
    }
}

/// Refraction index and source of a catalog entry (case-insensitive).
pub fn catalog_entry<T: Real>(
    name: &str,
) -> Result<(RefractionKind<T>, SourceKind<T>), ProblemError> {
    const P: f64 = 0.25;
    let one = RefractionKind::Constant(T::one());
    let scatter = |medium: RefractionKind<T>| {
        (
            medium.clone(),
            SourceKind::ScatteringInduced {
                background: RefractionKind::Constant(T::one()),
                medium,
            },
        )
    };
    let half = T::lit(0.5);
    let entry = match name.to_ascii_lowercase().as_str() {
        "f0" => (one, gaussian_source(&[((0.0, 0.0), -1.0)])),
        "f1" => (one, gaussian_source(&[((0.0, 0.0), 1.0)])),
        "f2" => (one, gaussian_source(&[((P, 0.0), 1.0), ((-P, 0.0), -1.0)])),
        "f3" => (
            one,
            gaussian_source(&[((P, 0.0), 1.0), ((-P, 0.0), -1.0), ((0.0, P), 1.0)]),
        ),
        "f4" => (
            one,
            gaussian_source(&[
                ((P, 0.0), 1.0),
                ((-P, 0.0), -1.0),
                ((0.0, P), 1.0),
                ((0.0, -P), -1.0),
            ]),
        ),
        "pvr1" => (
            RefractionKind::AngularPlusBump,
            SourceKind::CharacteristicCombo {
                squares: vec![(unit_square(0.0, 0.0), T::one())],
            },
        ),
        "pvr2" => (
            RefractionKind::AngularPlusBump,
            SourceKind::CharacteristicCombo {
                squares: vec![
                    (unit_square(0.5, 0.0), T::one()),
                    (unit_square(-0.5, 0.0), -T::one()),
                ],
            },
        ),
        "pcr1" => scatter(RefractionKind::PiecewiseDisk {
            center: [T::zero(), T::zero()],
            radius: half,
            jump: T::one(),
        }),
        "pcr2" => scatter(RefractionKind::PiecewiseDisk {
            center: [half, half],
            radius: half,
            jump: T::one(),
        }),
        "pcr3" => scatter(RefractionKind::PiecewiseSquare {
            center: [T::zero(), T::zero()],
            half_side: half,
            jump: T::one(),
        }),
        "pcr4" => scatter(RefractionKind::PiecewiseSquare {
            center: [half, half],
            half_side: half,
            jump: T::one(),
        }),
        "pw1" => scatter(RefractionKind::SinStrip {
            shift: [T::zero(), T::zero()],
        }),
        "pw2" => scatter(RefractionKind::SinStrip {
            shift: [T::zero(), T::lit(2.0)],
        }),
        "zero" => (one, SourceKind::zero()),
        _ => return Err(ProblemError::UnknownProblem(name.to_string())),
    };
    Ok(entry)
}

impl<T: Real> ProblemSpec<T> {
    /// Builds a catalog problem at the given wavenumber and resolution.
    pub fn from_catalog(
        name: &str,
        k: T,
        radius: T,
        m_theta: usize,
        m_rho: usize,
    ) -> Result<Self, ProblemError> {
        if !(k > T::zero()) {
            return Err(ProblemError::Wavenumber(k.to_f64().unwrap_or(f64::NAN)));
        }
        if !(radius > T::zero()) {
            return Err(ProblemError::Radius(radius.to_f64().unwrap_or(f64::NAN)));
        }
        let (refraction, source) = catalog_entry(name)?;
        let canonical = CATALOG
            .iter()
            .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
            .map(|(n, _, _)| n.to_string())
            .unwrap_or_else(|| name.to_string());
        Ok(Self {
            name: canonical,
            k,
            refraction,
            source,
            radius,
            m_theta,
            m_rho,
        })
    }

    /// `f(x)` for this problem.
    pub fn source_at(&self, x: Point<T>) -> Complex<T> {
        evaluate_source(&self.source, x, self.k)
    }

    pub fn is_scattering(&self) -> bool {
        matches!(self.source, SourceKind::ScatteringInduced { .. })
    }

    /// True when the constant-index Hankel convolution gives the exact solution.
    pub fn has_analytic_reference(&self) -> bool {
        self.refraction.constant_value().is_some()
            && matches!(self.source, SourceKind::GaussianSum { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        let (_, f2) = catalog_entry::<f64>("f2").unwrap();
        assert_eq!(evaluate_source(&f2, [0.0, 0.0], 1.0).re, 0.0);
        let (_, f1) = catalog_entry::<f64>("f1").unwrap();
        let v = evaluate_source(&f1, [0.25, 0.0], 1.0).re;
        assert!((v - (-1.875f64).exp()).abs() < 1e-15);
        let (_, f4) = catalog_entry::<f64>("f4").unwrap();
        let v = evaluate_source(&f4, [0.25, 0.0], 1.0).re;
        // |p₊ − p₋|² = 1/4
        assert!((v - (1.0 - (-7.5f64).exp())).abs() < 1e-15);
        let (_, f0) = catalog_entry::<f64>("f0").unwrap();
        let v = evaluate_source(&f0, [1.0, 0.0], 1.0).re;
        assert!((v + (-30.0f64).exp()).abs() < 1e-25);
    }

    #[test]
    fn characteristic_examples() {
        let (_, s) = catalog_entry::<f64>("PVR1").unwrap();
        assert_eq!(evaluate_source(&s, [0.3, 0.0], 1.0).re, 1.0);
        assert_eq!(evaluate_source(&s, [2.0, 0.0], 1.0).re, 0.0);
        // closed boundary
        assert_eq!(evaluate_source(&s, [0.5, 0.5], 1.0).re, 1.0);
        let (_, s2) = catalog_entry::<f64>("pvr2").unwrap();
        assert_eq!(evaluate_source(&s2, [0.7, 0.1], 1.0).re, 1.0);
        assert_eq!(evaluate_source(&s2, [-0.7, 0.1], 1.0).re, -1.0);
        // shared edge x1 = 0 belongs to both squares
        assert_eq!(evaluate_source(&s2, [0.0, 0.1], 1.0).re, 0.0);
    }

    #[test]
    fn scattering_examples() {
        let (n, s) = catalog_entry::<f64>("PCR1").unwrap();
        assert_eq!(evaluate_source(&s, [2.0, 0.0], 1.0), Complex::new(0.0, 0.0));
        assert_eq!(evaluate_source(&s, [0.0, 0.0], 1.0), Complex::new(-1.0, 0.0));
        assert_eq!(n.n_squared([0.1, 0.1]), 2.0);
        let (_, pw1) = catalog_entry::<f64>("PW1").unwrap();
        assert_eq!(evaluate_source(&pw1, [0.0, 0.0], 2.0), Complex::new(-4.0, 0.0));
        let (pw2, _) = catalog_entry::<f64>("PW2").unwrap();
        assert!((pw2.n_squared([0.0, 0.0]) - (1.0 + 1.0 / 3.0)).abs() < 1e-15);
        let on_strip = 1.0 + 1.0 / (1.0 + 2f64.sin());
        assert!((pw2.n_squared([2f64.sin(), 2.0]) - on_strip).abs() < 1e-15);
        assert_eq!(pw2.n_squared([1.0, 0.0]), 1.0);
    }

    #[test]
    fn angular_background_bounds() {
        let n0 = RefractionKind::<f64>::AngularBackground;
        for k in 0..360 {
            let t = (k as f64).to_radians();
            for r in [1e-6, 0.3, 5.0, 1e4] {
                let v = n0.n_squared([r * t.cos(), r * t.sin()]);
                assert!((1.0..=3.0).contains(&v));
            }
        }
        assert_eq!(n0.n_squared([0.0, 0.0]), 2.0);
    }

    #[test]
    fn gaussian_support() {
        for name in ["f0", "f1"] {
            let (_, s) = catalog_entry::<f64>(name).unwrap();
            for k in 0..64 {
                let t = k as f64 * 0.1;
                let x = [1.2001 * t.cos(), 1.2001 * t.sin()];
                assert!(evaluate_source(&s, x, 1.0).norm() < 1e-12);
            }
        }
        for name in ["f2", "f3", "f4"] {
            let (_, s) = catalog_entry::<f64>(name).unwrap();
            let r = s.support_radius().unwrap();
            for k in 0..64 {
                let t = k as f64 * 0.1;
                let x = [r * t.cos(), r * t.sin()];
                assert!(evaluate_source(&s, x, 1.0).norm() < 1e-17);
            }
        }
    }

    #[test]
    fn catalog_lookup() {
        for (name, _, _) in CATALOG {
            let p = ProblemSpec::<f64>::from_catalog(name, 1.0, 4.0, 5, 8).unwrap();
            assert_eq!(&p.name, name);
        }
        assert!(matches!(
            ProblemSpec::<f64>::from_catalog("nope", 1.0, 4.0, 5, 8),
            Err(ProblemError::UnknownProblem(_))
        ));
        assert!(ProblemSpec::<f64>::from_catalog("f1", 0.0, 4.0, 5, 8).is_err());
        assert!(ProblemSpec::<f64>::from_catalog("pcr1", 1.0, 4.0, 5, 8)
            .unwrap()
            .is_scattering());
    }
}
