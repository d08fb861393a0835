use crate::error::{ensure, Result};
use crate::scalar::{Extended, Scalar};

/// `2(N−k)/(N−k−2)`, or `+∞` when `N − k ≤ 2`.
///
/// Generic so that the threshold is exact in rational arithmetic.
pub fn critical_exponent<T: Scalar>(n: i64, k: i64) -> Result<Extended<T>> {
    ensure!(n >= 3, Argument, "ambient dimension must be at least 3, got {n}");
    ensure!((0..=n).contains(&k), Argument, "k must lie in 0..={n}, got {k}");
    let d = n - k;
    if d <= 2 {
        return Ok(Extended::PosInfinity);
    }
    Ok(Extended::Finite(T::from_int(2 * d) / T::from_int(d - 2)))
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(critical_exponent::<f64>(6, 0).unwrap(), Extended::Finite(3.0));
        assert_eq!(critical_exponent::<f64>(5, 1).unwrap(), Extended::Finite(4.0));
        assert_eq!(critical_exponent::<f64>(5, 3).unwrap(), Extended::PosInfinity);
        assert_eq!(critical_exponent::<f64>(4, 1).unwrap(), Extended::Finite(6.0));
        assert_eq!(
            critical_exponent::<Ratio<i64>>(7, 1).unwrap(),
            Extended::Finite(Ratio::new(3, 1))
        );
        assert_eq!(
            critical_exponent::<Ratio<i64>>(9, 2).unwrap(),
            Extended::Finite(Ratio::new(14, 5))
        );
    }

    #[test]
    fn argument_errors() {
        assert!(critical_exponent::<f64>(2, 0).is_err());
        assert!(critical_exponent::<f64>(5, 6).is_err());
        assert!(critical_exponent::<f64>(5, -1).is_err());
    }
}
