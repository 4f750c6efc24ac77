//! Exact verification of the quasi-tight filter-bank identity.
//!
//! A bank passes when the coset-domain residual vanishes identically, every
//! high-pass filter has at least the claimed number of vanishing moments, and
//! the achieved minimum does not exceed the structural ceiling imposed by the
//! low-pass filter. All checks are carried out in rational arithmetic; the
//! frequency-domain spot check is a separate floating-point cross-validation.

use serde_json::{json, Value};

use crate::analysis::{sum_rule_order, vm_ceiling};
use crate::error::Result;
use crate::filterbank::{build_na, coset_row, QtfBank};
use crate::laurent::{LaurentMatrix, Vmo};
use crate::ratio::Rat;

/// Outcome of `verify_bank`.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// True when the identity holds exactly and the moment claims are honest.
    pub passes: bool,
    /// `N_a` minus the signed sum of high-pass coset squares; zero on success.
    pub residual: LaurentMatrix,
    /// Vanishing-moment order of each high-pass filter, in bank order.
    pub per_filter_vmo: Vec<Vmo>,
    /// Minimum of `per_filter_vmo`; `None` for a bank without high-pass filters.
    pub min_vmo: Option<Vmo>,
    /// Sum-rule order of the low-pass filter.
    pub sr: usize,
    /// Structural upper bound for the achievable vanishing moments.
    pub vm_ceiling: usize,
    /// Whether the achieved minimum respects the structural ceiling.
    pub ceiling_respected: bool,
}

impl VerificationReport {
    pub fn to_value(&self) -> Value {
        let vmo_value = |v: Vmo| match v {
            Vmo::Finite(n) => json!(n),
            Vmo::Infinite => Value::Null,
        };
        json!({
            "passes": self.passes,
            "residual_zero": self.residual.is_zero(),
            "per_filter_vmo": self.per_filter_vmo.iter().map(|v| vmo_value(*v)).collect::<Vec<_>>(),
            "min_vmo": self.min_vmo.map(vmo_value).unwrap_or(Value::Null),
            "sr": self.sr,
            "vm_ceiling": self.vm_ceiling,
            "ceiling_respected": self.ceiling_respected,
        })
    }
}

/// Check the bank identity with zero tolerance.
pub fn verify_bank(bank: &QtfBank) -> Result<VerificationReport> {
    let ctx = bank.ctx();
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    let mut residual = build_na(ctx, bank.lowpass())?;
    for (f, sign) in bank.highpass() {
        let row = coset_row(ctx, f.base());
        let gram = row.adjoint().mul(&row)?;
        let weight = sign.rat() * &dm_rat * f.scale_sq();
        residual = residual.sub(&gram.scale(&weight))?;
    }

    let per_filter_vmo: Vec<Vmo> = bank.highpass().iter().map(|(f, _)| f.vmo()).collect();
    let min_vmo = per_filter_vmo.iter().copied().min();
    let sr = sum_rule_order(ctx, bank.lowpass());
    let (ceiling, _) = vm_ceiling(ctx, bank.lowpass());
    let ceiling_respected = match min_vmo {
        Some(Vmo::Finite(n)) => n <= ceiling,
        _ => true,
    };
    let claims_honored = min_vmo
        .map(|v| v.at_least(bank.claimed_vmo()))
        .unwrap_or(true);
    let passes = residual.is_zero() && claims_honored && ceiling_respected;
    Ok(VerificationReport {
        passes,
        residual,
        per_filter_vmo,
        min_vmo,
        sr,
        vm_ceiling: ceiling,
        ceiling_respected,
    })
}

/// Minimal deterministic PRNG (splitmix64) so the spot check does not pull a
/// random-number dependency into the library.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Evaluate the frequency-domain reconstruction identity at random points and
/// return the largest absolute deviation. Independent floating-point
/// cross-check of `verify_bank`; exact banks stay near machine precision.
pub fn spot_check_frequency(bank: &QtfBank, n_samples: usize) -> f64 {
    use std::f64::consts::PI;
    let ctx = bank.ctx();
    let d = ctx.dim();
    let mut rng = SplitMix64::new(0x71F3_9A2E_5C04_B61D);
    let omegas: Vec<Vec<f64>> = ctx
        .omega()
        .iter()
        .map(|w| {
            w.iter()
                .map(|r| 2.0 * PI * crate::ratio::rat_to_f64(r))
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let xi: Vec<f64> = (0..d).map(|_| (rng.next_unit() * 2.0 - 1.0) * PI).collect();
        for (widx, w) in omegas.iter().enumerate() {
            let shifted: Vec<f64> = xi.iter().zip(w).map(|(x, o)| x + o).collect();
            let mut acc = bank.lowpass().eval_complex(&xi)
                * bank.lowpass().eval_complex(&shifted).conj();
            for (f, sign) in bank.highpass() {
                let s = crate::ratio::rat_to_f64(f.scale_sq()) * sign.value() as f64;
                acc += f.base().eval_complex(&xi)
                    * f.base().eval_complex(&shifted).conj()
                    * s;
            }
            let expected = if widx == 0 { 1.0 } else { 0.0 };
            worst = worst.max((acc - expected).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{QtfBank, ScaledFilter, Sign};
    use crate::lattice::make_context;
    use crate::laurent::RationalLaurent;

    fn rat(s: &str) -> Rat {
        crate::ratio::parse_rational(s, "test").unwrap()
    }

    fn haar_bank(sign: Sign, claimed: usize) -> QtfBank {
        let ctx = make_context(&[vec![2]]).unwrap();
        let a = RationalLaurent::from_table_1d(0, &[rat("1/2"), rat("1/2")]);
        let b = ScaledFilter::new(
            rat("1/4"),
            RationalLaurent::from_table_1d(0, &[rat("1"), rat("-1")]),
        )
        .unwrap();
        QtfBank::new(ctx, a, vec![(b, sign)], claimed).unwrap()
    }

    #[test]
    fn haar_bank_verifies_exactly() {
        let report = verify_bank(&haar_bank(Sign::Plus, 1)).unwrap();
        assert!(report.passes);
        assert!(report.residual.is_zero());
        assert_eq!(report.sr, 1);
        assert_eq!(report.vm_ceiling, 1);
        assert_eq!(report.min_vmo, Some(crate::laurent::Vmo::Finite(1)));
    }

    #[test]
    fn sign_flip_breaks_identity() {
        let report = verify_bank(&haar_bank(Sign::Minus, 1)).unwrap();
        assert!(!report.passes);
        assert!(!report.residual.is_zero());
    }

    #[test]
    fn inflated_claim_fails() {
        let report = verify_bank(&haar_bank(Sign::Plus, 2)).unwrap();
        assert!(report.residual.is_zero());
        assert!(!report.passes);
    }

    #[test]
    fn spot_check_is_tiny_for_exact_bank() {
        let dev = spot_check_frequency(&haar_bank(Sign::Plus, 1), 25);
        assert!(dev < 1e-12, "deviation {}", dev);
    }

    #[test]
    fn spot_check_detects_broken_bank() {
        let dev = spot_check_frequency(&haar_bank(Sign::Minus, 1), 25);
        assert!(dev > 1e-3, "deviation {}", dev);
    }

    #[test]
    fn report_json_shape() {
        let report = verify_bank(&haar_bank(Sign::Plus, 1)).unwrap();
        let v = report.to_value();
        assert_eq!(v["passes"], serde_json::json!(true));
        assert_eq!(v["min_vmo"], serde_json::json!(1));
    }
}
