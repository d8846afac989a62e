/// Complex amplitude used for every channel coefficient and signal sample.
pub type Complex = num_complex::Complex64;

/// Builds `magnitude · e^{j·phase}`.
#[inline]
pub fn from_polar(magnitude: f64, phase: f64) -> Complex {
    Complex::from_polar(magnitude, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn polar_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let z = Complex::new(re, im);
            prop_assume!(z.norm() > 1e-9);
            let (r, theta) = z.to_polar();
            let back = from_polar(r, theta);
            prop_assert!((back - z).norm() <= 1e-12 * z.norm());
            prop_assert!((z.norm_sqr() - (re * re + im * im)).abs() <= 1e-12 * z.norm_sqr());
        }
    }
}
