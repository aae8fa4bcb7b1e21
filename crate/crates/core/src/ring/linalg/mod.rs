//! Dense normal forms for row spans: Smith over ℤ, Howell over `ℤ/n`, reduced
//! echelon over fields. All three answer membership with a witness and produce
//! left kernels.

pub mod echelon;
pub mod howell;
pub mod smith;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::scalar::{to_bigint, RingSpec, Scalar};
pub use echelon::EchelonForm;
pub use howell::HowellForm;
pub use smith::SmithForm;

#[derive(Debug, Clone)]
pub enum DenseSpan {
    Smith(SmithForm),
    Howell(HowellForm),
    Echelon(EchelonForm),
}

fn residue(x: &Scalar, n: u64) -> u64 {
    to_bigint(x).to_u64().expect("canonical residue") % n
}

impl DenseSpan {
    /// Normal form of the row span of `rows` (each of length `cols`).
    pub fn new(ring: &RingSpec, rows: &[Vec<Scalar>], cols: usize) -> Self {
        match ring {
            RingSpec::Integers => {
                let a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(to_bigint).collect()).collect();
                DenseSpan::Smith(SmithForm::new(&a, cols))
            }
            RingSpec::IntegersMod(n) => {
                let a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| residue(x, *n)).collect()).collect();
                DenseSpan::Howell(HowellForm::new(&a, cols, *n))
            }
            RingSpec::Rationals | RingSpec::PrimeField(_) => DenseSpan::Echelon(EchelonForm::new(ring, rows, cols)),
        }
    }

    /// Coefficients `x` with `Σ x_i · row_i = v`, if `v` lies in the span.
    pub fn solve(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        match self {
            DenseSpan::Smith(s) => {
                let v: Vec<BigInt> = v.iter().map(to_bigint).collect();
                s.solve(&v).map(|x| x.into_iter().map(Scalar::from_integer).collect())
            }
            DenseSpan::Howell(h) => {
                let v: Vec<u64> = v.iter().map(|x| residue(x, h.modulus)).collect();
                h.solve(&v).map(|x| x.into_iter().map(|c| Scalar::from_integer(c.into())).collect())
            }
            DenseSpan::Echelon(e) => e.solve(v),
        }
    }

    /// Generators of `{x : Σ x_i · row_i = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<Scalar>> {
        let kernel: Vec<Vec<Scalar>> = match self {
            DenseSpan::Smith(s) => {
                s.left_kernel().into_iter().map(|r| r.into_iter().map(Scalar::from_integer).collect()).collect()
            }
            DenseSpan::Howell(h) => h
                .kernel
                .iter()
                .map(|r| r.iter().map(|&c| Scalar::from_integer(c.into())).collect())
                .collect(),
            DenseSpan::Echelon(e) => e.kernel.clone(),
        };
        kernel.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
    }
}
