//! Two-tier zero testing: exact normal form, then seeded sampling.

use std::collections::{BTreeMap, HashMap};
use std::hash::{DefaultHasher, Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{eval_poly, Env};
use super::expr::Expr;

/// Sampling policy of the numeric tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTestPolicy {
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
    /// Coordinates are drawn from `±[lo, hi]`.
    pub coord_range: (f64, f64),
    pub param_range: (f64, f64),
    /// Draw budget per requested point before giving up.
    pub max_attempts_factor: usize,
}

impl Default for ZeroTestPolicy {
    fn default() -> Self {
        ZeroTestPolicy {
            points: 50,
            tol: 1e-9,
            seed: 0x5eed_2024,
            coord_range: (0.1, 2.0),
            param_range: (0.3, 1.7),
            max_attempts_factor: 20,
        }
    }
}

impl ZeroTestPolicy {
    /// Same policy with the seed mixed with a label, so independent checks
    /// draw independent but reproducible points.
    pub fn for_label(&self, label: &str) -> ZeroTestPolicy {
        let mut h = DefaultHasher::new();
        self.seed.hash(&mut h);
        label.hash(&mut h);
        ZeroTestPolicy {
            seed: h.finish(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ZeroStatus {
    ProvedZero,
    NumericZero {
        points_tested: usize,
        max_residual: f64,
    },
    NonZero {
        point: [f64; 3],
        params: BTreeMap<String, f64>,
        value: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl ZeroStatus {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroStatus::ProvedZero | ZeroStatus::NumericZero { .. })
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ZeroStatus::ProvedZero)
    }

    /// Largest observed residual, zero for exact proofs.
    pub fn residual(&self) -> Option<f64> {
        match self {
            ZeroStatus::ProvedZero => Some(0.0),
            ZeroStatus::NumericZero { max_residual, .. } => Some(*max_residual),
            ZeroStatus::NonZero { value, .. } => Some(value.abs()),
            ZeroStatus::Inconclusive { .. } => None,
        }
    }
}

/// Decides whether `e` vanishes identically.
pub fn is_zero(e: &Expr, policy: &ZeroTestPolicy) -> ZeroStatus {
    match e.normal() {
        Ok(nf) if nf.is_zero() => ZeroStatus::ProvedZero,
        Ok(nf) => sample(policy, &e.params(), |env| {
            let mut atoms = HashMap::new();
            let (den, dscale) = eval_poly(nf.den(), env, &mut atoms).ok()?;
            if den.norm() <= 1e-8 * (1.0 + dscale) {
                return None;
            }
            let (num, scale) = eval_poly(nf.num(), env, &mut atoms).ok()?;
            Some((num.norm(), scale, (num / den).norm()))
        }),
        Err(_) => sample(policy, &e.params(), |env| {
            let v = e.eval_complex(env).ok()?;
            Some((v.norm(), v.norm(), v.norm()))
        }),
    }
}

/// Runs the sampler; `probe` returns `(|residual|, scale, |value|)` or `None`
/// for an unusable point.
fn sample(
    policy: &ZeroTestPolicy,
    params: &std::collections::BTreeSet<String>,
    probe: impl Fn(&Env) -> Option<(f64, f64, f64)>,
) -> ZeroStatus {
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut tested = 0;
    let mut worst: f64 = 0.0;
    let budget = policy.points.max(1) * policy.max_attempts_factor;
    let (clo, chi) = policy.coord_range;
    let klo = (clo * 1000.0).round() as i64;
    let khi = (chi * 1000.0).round() as i64;
    for _ in 0..budget {
        if tested >= policy.points {
            break;
        }
        let mut point = [0.0; 3];
        for p in point.iter_mut() {
            let k = rng.random_range(klo..=khi) as f64 / 1000.0;
            *p = if rng.random_bool(0.5) { k } else { -k };
        }
        let mut env = Env::at(point);
        for name in params {
            let v = rng.random_range(policy.param_range.0..=policy.param_range.1);
            env.params.insert(name.clone(), v);
        }
        env.abstract_seed = Some(rng.random());
        let Some((res, scale, value)) = probe(&env) else {
            continue;
        };
        if !res.is_finite() || !scale.is_finite() {
            continue;
        }
        let rel = res / (1.0 + scale);
        if res > policy.tol * (1.0 + scale) {
            return ZeroStatus::NonZero {
                point,
                params: env.params,
                value,
            };
        }
        worst = worst.max(rel);
        tested += 1;
    }
    if tested < policy.points {
        return ZeroStatus::Inconclusive {
            reason: format!(
                "only {tested} of {} sample points were evaluable",
                policy.points
            ),
        };
    }
    ZeroStatus::NumericZero {
        points_tested: tested,
        max_residual: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_zero_is_proved() {
        assert_eq!(is_zero(&Expr::zero(), &ZeroTestPolicy::default()), ZeroStatus::ProvedZero);
    }

    #[test]
    fn pythagorean_identity_is_numeric() {
        let c = Expr::param("c");
        let e = c.sin().powi(2) + c.cos().powi(2) - Expr::one();
        match is_zero(&e, &ZeroTestPolicy::default()) {
            ZeroStatus::NumericZero {
                points_tested,
                max_residual,
            } => {
                assert_eq!(points_tested, 50);
                assert!(max_residual < 1e-9);
            }
            s => panic!("unexpected {s:?}"),
        }
    }

    #[test]
    fn nonzero_has_witness() {
        let s = is_zero(&Expr::x(1), &ZeroTestPolicy::default());
        assert!(matches!(s, ZeroStatus::NonZero { .. }));
    }

    #[test]
    fn everywhere_singular_is_inconclusive() {
        let e = (Expr::x(1) - Expr::x(1)).ln();
        let s = is_zero(&e, &ZeroTestPolicy::default());
        assert!(matches!(s, ZeroStatus::Inconclusive { .. }));
    }

    #[test]
    fn seeded_runs_repeat() {
        let e = Expr::x(1).arctan() - Expr::x(2);
        let p = ZeroTestPolicy::default().for_label("repeat");
        assert_eq!(is_zero(&e, &p), is_zero(&e, &p));
    }

    #[test]
    fn abstract_symbols_are_independent_unknowns() {
        let u = Expr::x(1) * Expr::x(2);
        let f = Expr::call("F", vec![u.clone()]);
        let g = Expr::call_deriv("F", vec![1], vec![u]);
        let s = is_zero(&(f.sin() - g.sin()), &ZeroTestPolicy::default());
        assert!(matches!(s, ZeroStatus::NonZero { .. }));
    }
}
