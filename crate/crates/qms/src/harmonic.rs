//! Radial harmonic analysis of FG(2).
//!
//! The radial functions (those depending only on word length) form a
//! commutative convolution algebra K generated by A = left convolution by
//! μ_1 = (δ_0+δ_1+δ_2+δ_3)/4. Under the spectral transform A becomes
//! multiplication by λ on sp(A) = [−√3/2, √3/2]; the spheres μ_n map to the
//! orthogonal polynomials p_n of the weight
//! w(λ) = (1/π)·√(3−4λ²)/(1−λ²), and radial spectral projectors 1_B(A) have
//! convolution kernels with coefficients G_n(B) = ∫_B p_n w dλ.

use crate::freegroup::{sphere, sphere_size, sphere_with_budget, Word};
use crate::hilbert::{Complex64, StateVector};
use crate::{QmsError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Right endpoint of sp(A).
pub const SPECTRUM_EDGE: f64 = 0.866_025_403_784_438_6; // √3/2

/// μ_n: the uniform probability vector on the sphere of radius n, with value
/// 1/#FG(2)_n on each word.
pub fn radial_basis(n: usize) -> Result<StateVector> {
    let value = Complex64::new(1.0 / sphere_size(n) as f64, 0.0);
    Ok(StateVector::from_terms(
        sphere(n)?.into_iter().map(|x| (x, value)),
    ))
}

/// A radial function as its value sequence: value c_n on every word of
/// length n. As a vector this is Σ_n c_n·#FG(2)_n·μ_n.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    coeffs: Vec<Complex64>,
}

impl RadialFunction {
    pub fn from_values<I: IntoIterator<Item = Complex64>>(values: I) -> RadialFunction {
        let mut coeffs: Vec<Complex64> = values.into_iter().collect();
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        RadialFunction { coeffs }
    }

    pub fn from_real_values<I: IntoIterator<Item = f64>>(values: I) -> RadialFunction {
        RadialFunction::from_values(values.into_iter().map(|v| Complex64::new(v, 0.0)))
    }

    /// δ_Λ, the identity of K.
    pub fn delta() -> RadialFunction {
        RadialFunction::from_real_values([1.0])
    }

    /// μ_n as a radial function.
    pub fn mu(n: usize) -> RadialFunction {
        let mut values = vec![Complex64::zero(); n + 1];
        values[n] = Complex64::new(1.0 / sphere_size(n) as f64, 0.0);
        RadialFunction { coeffs: values }
    }

    /// Value on any word of length n (zero beyond the stored length).
    pub fn value(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ℓ² norm²: Σ_n |c_n|²·#FG(2)_n.
    pub fn norm_l2_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm_sqr() * sphere_size(n) as f64)
            .sum()
    }

    /// Materializes the radial function on the ball it lives on.
    pub fn to_state_vector(&self) -> Result<StateVector> {
        self.to_state_vector_with_budget(crate::freegroup::ENUMERATION_BUDGET)
    }

    pub fn to_state_vector_with_budget(&self, budget: usize) -> Result<StateVector> {
        let mut terms = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            for x in sphere_with_budget(n, budget)? {
                terms.push((x, *c));
            }
        }
        Ok(StateVector::from_terms(terms))
    }

    /// Reads the radial value sequence off a (radial) vector.
    pub fn from_state_vector(f: &StateVector) -> Result<RadialFunction> {
        let len = if f.is_zero() { 0 } else { f.max_word_len() + 1 };
        let mut values = vec![Complex64::zero(); len];
        for (x, c) in f.iter() {
            let slot = &mut values[x.len()];
            if slot.norm() == 0.0 {
                *slot = *c;
            } else if (*slot - c).norm() > 1e-12 {
                return Err(QmsError::Precondition(format!(
                    "vector is not radial: conflicting values at length {}",
                    x.len()
                )));
            }
        }
        // every sphere word must carry the value, not just some
        for (n, v) in values.iter().enumerate() {
            if v.norm() > 0.0 {
                let expected = sphere_size(n);
                let found = f.iter().filter(|(x, _)| x.len() == n).count();
                if found != expected {
                    return Err(QmsError::Precondition(format!(
                        "vector is not radial: sphere {n} covered {found}/{expected}"
                    )));
                }
            }
        }
        Ok(RadialFunction { coeffs: values })
    }
}

/// Coefficients in the μ-basis: f = Σ_n m_n μ_n with m_n = c_n·#FG(2)_n.
fn to_mu_basis(f: &RadialFunction) -> Vec<Complex64> {
    f.coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * sphere_size(n) as f64)
        .collect()
}

fn from_mu_basis(m: Vec<Complex64>) -> RadialFunction {
    RadialFunction::from_values(
        m.into_iter()
            .enumerate()
            .map(|(n, c)| c / sphere_size(n) as f64),
    )
}

/// μ_1 ⋆ (Σ h_n μ_n) in the μ-basis, from μ_1⋆μ_n = (1/4)μ_{n−1} + (3/4)μ_{n+1}.
fn mu_one_star(h: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); h.len() + 1];
    for (n, &c) in h.iter().enumerate() {
        if n == 0 {
            out[1] += c;
        } else {
            out[n - 1] += c * 0.25;
            out[n + 1] += c * 0.75;
        }
    }
    out
}

/// The product in K, computed through the μ-basis recurrence
/// μ_{m+1}⋆g = (4/3)μ_1⋆(μ_m⋆g) − (1/3)μ_{m−1}⋆g.
pub fn radial_convolve(f: &RadialFunction, g: &RadialFunction) -> RadialFunction {
    let fm = to_mu_basis(f);
    let gm = to_mu_basis(g);
    if fm.is_empty() || gm.is_empty() {
        return RadialFunction::from_values([]);
    }
    let out_len = fm.len() + gm.len() - 1;
    let mut acc = vec![Complex64::zero(); out_len];
    let mut prev = gm.clone(); // μ_0 ⋆ g
    let mut cur = mu_one_star(&gm); // μ_1 ⋆ g
    for (m, &fc) in fm.iter().enumerate() {
        let term = if m == 0 { &prev } else { &cur };
        for (i, &c) in term.iter().enumerate() {
            acc[i] += fc * c;
        }
        if m >= 1 && m + 1 < fm.len() {
            let stepped = mu_one_star(&cur);
            let mut next = vec![Complex64::zero(); stepped.len()];
            for (i, &c) in stepped.iter().enumerate() {
                next[i] = c * (4.0 / 3.0);
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i] -= c / 3.0;
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    from_mu_basis(acc)
}

/// g ⋆ f by generic convolution (radial kernels acting on the prepend side).
pub fn radial_apply(g: &RadialFunction, f: &StateVector) -> Result<StateVector> {
    Ok(g.to_state_vector()?.convolve(f))
}

/// The observable A: the average (V_0+V_1+V_2+V_3)/4 of the four append
/// operators, i.e. convolution by μ_1 on the append side (f ⋆ μ_1). This is
/// the side the Fourier kernel diagonalizes; on radial f both sides agree.
pub fn a_apply(f: &StateVector) -> StateVector {
    f.convolve(
        &RadialFunction::mu(1)
            .to_state_vector()
            .expect("μ_1 is within every budget"),
    )
}

/// p_n with exact rational coefficients (ascending powers of λ), satisfying
/// p_0 = 1, p_1 = λ, p_{n+1} = (4/3)λp_n − (1/3)p_{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalPolynomial {
    pub degree: usize,
    coeffs: Vec<BigRational>,
}

impl OrthogonalPolynomial {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().expect("small rationals fit in f64"))
            .collect()
    }

    /// Horner evaluation of the exact coefficients in floating point.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs_f64()
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * lambda + c)
    }
}

/// The polynomials p_0..p_{n_max} from the three-term recursion.
pub fn orthogonal_polys(n_max: usize) -> Result<Vec<OrthogonalPolynomial>> {
    if n_max > 64 {
        return Err(QmsError::Budget(format!(
            "polynomial degree {n_max} exceeds the supported maximum 64"
        )));
    }
    let four_thirds = BigRational::new(BigInt::from(4), BigInt::from(3));
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    let mut polys = vec![OrthogonalPolynomial {
        degree: 0,
        coeffs: vec![BigRational::one()],
    }];
    if n_max >= 1 {
        polys.push(OrthogonalPolynomial {
            degree: 1,
            coeffs: vec![BigRational::zero(), BigRational::one()],
        });
    }
    for n in 1..n_max {
        let mut next = vec![BigRational::zero(); n + 2];
        for (k, c) in polys[n].coeffs.iter().enumerate() {
            next[k + 1] += &four_thirds * c;
        }
        for (k, c) in polys[n - 1].coeffs.iter().enumerate() {
            next[k] -= &third * c;
        }
        polys.push(OrthogonalPolynomial {
            degree: n + 1,
            coeffs: next,
        });
    }
    Ok(polys)
}

/// Closed form p_n(λ) = (1/2)·3^{−n/2}·(T_n(2λ/√3) + U_n(2λ/√3)), valid for
/// every n ≥ 0 (it gives 1 at n = 0).
pub fn poly_closed_form(n: usize, lambda: f64) -> f64 {
    let x = 2.0 * lambda / 3f64.sqrt();
    let (mut t_prev, mut t_cur) = (1.0f64, x);
    let (mut u_prev, mut u_cur) = (1.0f64, 2.0 * x);
    for _ in 1..n {
        t_cur = 2.0 * x * t_cur - std::mem::replace(&mut t_prev, t_cur);
        u_cur = 2.0 * x * u_cur - std::mem::replace(&mut u_prev, u_cur);
    }
    let (t, u) = if n == 0 { (t_prev, u_prev) } else { (t_cur, u_cur) };
    0.5 * 3f64.powf(-(n as f64) / 2.0) * (t + u)
}

/// The spectral weight w(λ) = (1/π)·√(3−4λ²)/(1−λ²) on sp(A).
pub fn spectral_weight(lambda: f64) -> f64 {
    (3.0 - 4.0 * lambda * lambda).max(0.0).sqrt() / (std::f64::consts::PI * (1.0 - lambda * lambda))
}

/// Quadrature nodes and weights for ∫ f(λ) w(λ) dλ over sp(A).
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&l, &v)| v * f(l))
            .sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&l, &v)| f(l) * v)
            .sum()
    }
}

/// Builds the default rule by substituting λ = (√3/2)cosθ; the transformed
/// integrand (3/2π)·sin²θ/(1−(3/4)cos²θ)·f(λ(θ)) is smooth and even-periodic
/// in θ, so the midpoint rule on [0,π] converges spectrally.
pub fn quadrature_rule(node_count: usize) -> Result<SpectralGrid> {
    if node_count < 2 {
        return Err(QmsError::Precondition(format!(
            "quadrature needs at least 2 nodes, got {node_count}"
        )));
    }
    let n = node_count as f64;
    let mut nodes = Vec::with_capacity(node_count);
    let mut weights = Vec::with_capacity(node_count);
    for i in 0..node_count {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / n;
        let (s, c) = theta.sin_cos();
        nodes.push(SPECTRUM_EDGE * c);
        weights.push((3.0 / (2.0 * n)) * s * s / (1.0 - 0.75 * c * c));
    }
    Ok(SpectralGrid { nodes, weights })
}

/// Gauss–Legendre nodes/weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let (mut p_prev, mut p_cur) = (1.0f64, x);
            for k in 1..n {
                let k = k as f64;
                p_cur = ((2.0 * k + 1.0) * x * p_cur - k * std::mem::replace(&mut p_prev, p_cur))
                    / (k + 1.0);
            }
            let p = if n == 0 { p_prev } else { p_cur };
            let dp = n as f64 * (x * p_cur - p_prev) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (mut p_prev, mut p_cur) = (1.0f64, x);
        for k in 1..n {
            let k = k as f64;
            p_cur = ((2.0 * k + 1.0) * x * p_cur - k * std::mem::replace(&mut p_prev, p_cur))
                / (k + 1.0);
        }
        let dp = n as f64 * (x * p_cur - p_prev) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// ∫_a^b f(λ) w(λ) dλ for [a,b] ⊆ sp(A), via Gauss–Legendre in the θ
/// variable (where the integrand is analytic).
pub fn integrate_interval<F: Fn(f64) -> f64>(a: f64, b: f64, order: usize, f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let clamp = |l: f64| (2.0 * l / 3f64.sqrt()).clamp(-1.0, 1.0);
    // λ = (√3/2)cosθ is decreasing, so [a,b] maps to [θ(b), θ(a)]
    let theta_lo = clamp(b).acos();
    let theta_hi = clamp(a).acos();
    let mid = 0.5 * (theta_hi + theta_lo);
    let half = 0.5 * (theta_hi - theta_lo);
    gauss_legendre(order)
        .into_iter()
        .map(|(x, w)| {
            let theta = mid + half * x;
            let (s, c) = theta.sin_cos();
            let lambda = SPECTRUM_EDGE * c;
            w * half * (3.0 / (2.0 * std::f64::consts::PI)) * s * s / (1.0 - 0.75 * c * c)
                * f(lambda)
        })
        .sum()
}

/// The radial kernel of the spectral projector 1_B(A): value G_n(B) on each
/// word of length n, with G_n(B) = ∫_B p_n(λ) w(λ) dλ.
pub fn projector_coeffs(
    intervals: &[(f64, f64)],
    n_max: usize,
    grid: &SpectralGrid,
) -> Result<RadialFunction> {
    for &(a, b) in intervals {
        if a < -SPECTRUM_EDGE - 1e-12 || b > SPECTRUM_EDGE + 1e-12 || b < a {
            return Err(QmsError::Precondition(format!(
                "interval [{a}, {b}] is not inside sp(A)"
            )));
        }
    }
    let order = grid.len().clamp(32, 512);
    let polys = orthogonal_polys(n_max)?;
    let values: Vec<f64> = polys
        .iter()
        .map(|p| {
            intervals
                .iter()
                .map(|&(a, b)| integrate_interval(a, b, order, |l| p.eval(l)))
                .sum()
        })
        .collect();
    Ok(RadialFunction::from_real_values(values))
}

/// ĥ(n) = sin(nφ)/(nπ) for n ≠ 0 and φ/π at n = 0: the Fourier coefficients
/// of the arc indicator 1_{[−φ,φ]} on the circle.
pub fn hat_h(n: i64, phi: f64) -> f64 {
    if n == 0 {
        phi / std::f64::consts::PI
    } else {
        (n as f64 * phi).sin() / (n as f64 * std::f64::consts::PI)
    }
}

/// The truncated band kernel g = Σ_{|n|≤n_max} ĥ(n)·δ_{aⁿ} of the arc-band
/// spectral projector of L_a, together with the orbit relabeling that
/// diagonalizes L_a as a sum of bilateral shifts.
pub struct SingleTranslate {
    pub a: Word,
    pub kernel: StateVector,
    pub phi: f64,
}

pub fn single_translate_analysis(a: &Word, phi: f64, n_max: usize) -> Result<SingleTranslate> {
    if a.is_empty() {
        return Err(QmsError::Precondition(
            "single-translate analysis needs a ≠ Λ".into(),
        ));
    }
    if !(0.0 < phi && phi <= std::f64::consts::PI) {
        return Err(QmsError::Precondition(format!(
            "band half-width must lie in (0, π], got {phi}"
        )));
    }
    let kernel = StateVector::from_terms((-(n_max as i64)..=n_max as i64).map(|n| {
        (a.pow(n), Complex64::new(hat_h(n, phi), 0.0))
    }));
    Ok(SingleTranslate {
        a: a.clone(),
        kernel,
        phi,
    })
}

impl SingleTranslate {
    /// The orbit coordinates (n, z) of x under x = aⁿ·z; inverse of
    /// (n, z) ↦ aⁿ·z.
    pub fn relabel(&self, x: &Word) -> Result<(i64, Word)> {
        crate::freegroup::orbit_decompose(&self.a, x)
    }
}
