//! Exact and numerical machinery for three-term arithmetic progressions.
//!
//! The crate is organised around one density-increment argument and the
//! objects it touches:
//!
//! * [`field`]: the prime modulus `p` with `2N < p < 4N`, exact cyclic
//!   functions on `Z_p`, subsets of `[N]` and the torus distance.
//! * [`spectral`]: Fourier coefficients under the averaged normalisation,
//!   the progression functional `Λ` computed directly and through the
//!   spectrum, and large-spectrum extraction.
//! * [`extremal`]: progression-free tests, progression counting, exact
//!   `r₃(N)` by branch and bound, constructions and a persistent cache.
//! * [`increment`]: dilation, convolution with `{0, x, 2x}`, the support
//!   `T` and its restriction `T′`, with every inequality of the chain
//!   checked using explicit constants.
//! * [`varnavides`]: the block system of length-`M` progressions and the
//!   lower bound on the number of progressions in a dense set.
//!
//! Everything that can be exact is exact: sets are packed bitsets, cyclic
//! functions carry integer counts with a rational scale, and all the
//! combinatorial inequalities are compared as rationals. Floating point is
//! confined to Fourier coefficients.
//!
//! ```
//! use ap3::extremal::{count_3aps, greedy_3ap_free};
//! use ap3::field::find_bertrand_prime;
//! use ap3::spectral::lambda_direct;
//! use ap3::field::embed;
//!
//! let s = greedy_3ap_free(10);
//! assert_eq!(s.to_vec(), vec![1, 2, 4, 5, 10]);
//! assert_eq!(count_3aps(&s), 0);
//!
//! let ctx = find_bertrand_prime(10).unwrap();
//! assert_eq!(ctx.p(), 23);
//! let f = embed(&s, &ctx).unwrap();
//! // only the trivial progressions (d = 0) survive
//! assert_eq!(lambda_direct(&f), ap3::Rational::new(5, 23 * 23));
//! ```

pub mod error;
pub mod extremal;
pub mod field;
pub mod increment;
pub mod json;
pub mod spectral;
pub mod varnavides;

pub use error::{Error, Result, VerificationError};

/// Exact rational used for every counting inequality in the crate.
pub type Rational = num_rational::Ratio<i128>;

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
