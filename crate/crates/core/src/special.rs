//! Scaled complementary error function.

/// erfcx(z) = exp(z²)·erfc(z).
///
/// The plain product overflows/underflows long before the scaled value
/// does; the thermal kernels here need arguments up to ~10⁴. For z ≤ 12
/// the direct product is exact enough (both factors representable), above
/// that the asymptotic expansion converges to machine precision.
///
/// Arguments below about -26 overflow (the reflected exp(z²) term) and
/// return infinity; callers fold the reflection into their own exponent
/// when they need that range.
pub fn erfcx(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 * (z * z).exp() - erfcx(-z);
    }
    if z <= 12.0 {
        return (z * z).exp() * libm::erfc(z);
    }
    // erfcx(z) ~ 1/(z√π) Σ (-1)^k (2k-1)!!/(2z²)^k, truncated when a term
    // stops mattering; at z = 12 that happens near k = 12.
    let inv_2z2 = 1.0 / (2.0 * z * z);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=20 {
        term *= -((2 * k - 1) as f64) * inv_2z2;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (z * std::f64::consts::PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_plain_erfc_at_moderate_arguments() {
        for &z in &[0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0, 11.0] {
            let expected = libm::erfc(z);
            let got = erfcx(z) * (-z * z).exp();
            assert!(
                (got - expected).abs() <= 1e-15 * expected.abs().max(1e-300),
                "z={z}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn series_branch_agrees_with_direct_product() {
        // Above the branch point the series must still match the plain
        // exp(z²)·erfc(z) wherever that product is representable.
        for &z in &[12.5f64, 15.0, 20.0, 25.0] {
            let direct = (z * z).exp() * libm::erfc(z);
            let scaled = erfcx(z);
            assert!(
                ((scaled - direct) / direct).abs() < 1e-12,
                "z={z}: series {scaled} vs direct {direct}"
            );
        }
    }

    #[test]
    fn asymptotic_tail_decays_like_inverse() {
        // erfcx(z) ≈ 1/(z√π) to leading order.
        for &z in &[20.0, 100.0, 1e4, 1e8] {
            let leading = 1.0 / (z * std::f64::consts::PI.sqrt());
            let ratio = erfcx(z) / leading;
            assert!((ratio - 1.0).abs() < 1.0 / (z * z), "z={z}: ratio {ratio}");
        }
    }

    #[test]
    fn negative_reflection() {
        let z = 1.5_f64;
        let expected = (z * z).exp() * libm::erfc(-z);
        assert!((erfcx(-z) - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn special_points() {
        assert_eq!(erfcx(0.0), 1.0);
        assert!(erfcx(1e8) > 0.0);
    }
}
