use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type that ranking measures and game matrices are evaluated in.
///
/// Floating types represent every discount; [`Ratio<i64>`] only the ones that
/// are rational, i.e. `1/log2(1+j)` with `1+j` a power of two.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `1 / log2(1 + rank)` for a 1-based rank, if exactly representable.
    fn log_discount(rank: usize) -> Option<Self>;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar")
    }

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn log_discount(rank: usize) -> Option<Self> {
        Some(1.0 / ((1 + rank) as f64).log2())
    }
}

impl Scalar for f32 {
    fn log_discount(rank: usize) -> Option<Self> {
        Some(1.0 / ((1 + rank) as f32).log2())
    }
}

impl Scalar for Ratio<i64> {
    fn log_discount(rank: usize) -> Option<Self> {
        let n = rank + 1;
        n.is_power_of_two()
            .then(|| Ratio::new(1, i64::from(n.trailing_zeros())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_discount_only_at_powers_of_two() {
        assert_eq!(Ratio::<i64>::log_discount(1), Some(Ratio::from_integer(1)));
        assert_eq!(Ratio::<i64>::log_discount(2), None);
        assert_eq!(Ratio::<i64>::log_discount(3), Some(Ratio::new(1, 2)));
        assert_eq!(Ratio::<i64>::log_discount(7), Some(Ratio::new(1, 3)));
    }

    #[test]
    fn float_discounts_agree() {
        for rank in 1..20 {
            let a = f64::log_discount(rank).unwrap();
            let b = f32::log_discount(rank).unwrap() as f64;
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(f64::log_discount(3), Some(0.5));
    }
}
