//! Fourier analysis on `Z_p` with the averaged normalisation
//! `f̂(r) = E_x f(x) e^{2πi r x / p}` (positive exponent).
//!
//! The progression functional `Λ(f) = E_{x,d} f(x) f(x+d) f(x+2d)` is
//! available exactly ([`lambda_direct`]) and through the spectral identity
//! `Λ(f) = Σ_r f̂(r)² f̂(−2r)` ([`lambda_spectral`]). Both include the
//! `d = 0` terms.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::field::{CyclicFunction, PrimeContext};
use crate::{rational_to_f64, Error, Rational, Result};

/// Largest imaginary part tolerated in [`lambda_spectral`] for a real input.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Fourier coefficients `coeffs[r] = f̂(r)` for `r ∈ Z_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    ctx: PrimeContext,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, r: usize) -> Complex64 {
        self.coeffs[r % self.ctx.p()]
    }

    pub fn magnitude(&self, r: usize) -> f64 {
        self.coeff(r).norm()
    }

    /// `Σ_r |f̂(r)|²`, which Parseval equates with `E_x |f(x)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest magnitude over the nontrivial frequencies `r ≠ 0`, with its
    /// smallest index. `None` only when `p = 1`, which cannot happen.
    pub fn max_nontrivial(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (r, c) in self.coeffs.iter().enumerate().skip(1) {
            let m = c.norm();
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((r, m));
            }
        }
        best
    }
}

/// Fast transform (rustfft; Rader/Bluestein for the prime length).
pub fn dft(f: &CyclicFunction) -> Spectrum {
    let p = f.ctx().p();
    let mut buf: Vec<Complex64> = f.counts().iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    // rustfft's inverse direction is the unnormalised positive-exponent sum.
    FftPlanner::new().plan_fft_inverse(p).process(&mut buf);
    let factor = rational_to_f64(&f.scale()) / p as f64;
    for c in &mut buf {
        *c *= factor;
    }
    Spectrum { ctx: *f.ctx(), coeffs: buf }
}

/// Reference `O(p²)` evaluation. Phases are reduced exactly as `x·r mod p`
/// before the table lookup, and each coefficient is summed in ascending `x`,
/// so the result does not depend on the thread schedule.
pub fn dft_direct(f: &CyclicFunction) -> Spectrum {
    let p = f.ctx().p();
    let twiddles: Vec<Complex64> = (0..p)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / p as f64))
        .collect();
    let support: Vec<(usize, f64)> =
        f.support().into_iter().map(|x| (x, f.counts()[x] as f64)).collect();
    let factor = rational_to_f64(&f.scale()) / p as f64;
    let coeffs = (0..p)
        .into_par_iter()
        .map(|r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x, c) in &support {
                acc += twiddles[(x * r) % p] * c;
            }
            acc * factor
        })
        .collect();
    Spectrum { ctx: *f.ctx(), coeffs }
}

/// `|Σ_r |f̂(r)|² − E_x |f(x)|²|`.
pub fn parseval_defect(f: &CyclicFunction, spec: &Spectrum) -> f64 {
    (spec.energy() - rational_to_f64(&f.mean_square())).abs()
}

/// Exact `Λ(f) = p⁻² Σ_{x,d} f(x) f(x+d) f(x+2d)`, including `d = 0`.
///
/// The sum runs over pairs `(x, y = x + d)` in the support, so it costs
/// `O(|supp f|²)`.
pub fn lambda_direct(f: &CyclicFunction) -> Rational {
    let p = f.ctx().p();
    let c = f.counts();
    let support = f.support();
    let mut total: i128 = 0;
    for &x in &support {
        let cx = c[x] as i128;
        for &y in &support {
            let z = (2 * y + p - x) % p;
            total += cx * c[y] as i128 * c[z] as i128;
        }
    }
    let s = f.scale();
    s * s * s * Rational::new(total, (p * p) as i128)
}

/// `Σ_r f̂(r)² f̂(−2r)`. For a real function the imaginary part cancels; a
/// residue above [`IMAGINARY_TOLERANCE`] means the transform is wrong.
pub fn lambda_spectral(spec: &Spectrum) -> Result<f64> {
    let p = spec.ctx().p();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..p {
        let minus_two_r = (p - (2 * r) % p) % p;
        let a = spec.coeffs[r];
        acc += a * a * spec.coeffs[minus_two_r];
    }
    if acc.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue(acc.im));
    }
    Ok(acc.re)
}

/// Residues whose coefficient has magnitude at least the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeSpectrum {
    pub threshold: f64,
    pub members: Vec<usize>,
}

impl LargeSpectrum {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `{r : |f̂(r)| ≥ θ}`, decided by a plain `>=` on the computed magnitude
/// (no epsilon slack at the boundary).
pub fn large_spectrum(spec: &Spectrum, theta: f64) -> Result<LargeSpectrum> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {theta}")));
    }
    let members = (0..spec.ctx().p()).filter(|&r| spec.magnitude(r) >= theta).collect();
    Ok(LargeSpectrum { threshold: theta, members })
}

/// `(2 ln ln p / ln p)^{1/2}`, natural logarithms. Defined whenever
/// `ln ln p > 0`, i.e. `p ≥ 3`.
pub fn paper_threshold(p: usize) -> Result<f64> {
    let lp = (p as f64).ln();
    let llp = lp.ln();
    if !(llp.is_finite() && llp > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold needs ln ln p > 0, got p = {p}"
        )));
    }
    Ok((2.0 * llp / lp).sqrt())
}
