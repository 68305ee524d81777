//! Worked families along the chain `M03 ⊂ <M03, M32 − M02> ⊂
//! <M03, M32 − M02, M31 − M01>`, plus the `M21` extension.
//!
//! The first-order equations are encoded in their displayed form
//! `2x_k(x₁g₁ + x₂g₂ + (x₃ − s)g₃) − (r² + c)g_k = 4x_k f` (mass) and the same
//! operator on `V` equal to `3f_k` (potential), and are cross-checked against
//! the reduced residuals of the integral they come from.

use std::fmt;
use std::str::FromStr;

use super::{full_commutator, Integral};
use crate::diffop::{proportionality_factor, reduced_determining_op, PdmHamiltonian};
use crate::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use crate::symkernel::{is_zero, Axis, Expr, FunctionDef, ZeroTestPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkedFamily {
    /// `f = r̃²F(x₂/x₁, (r²−1)/r̃)`, `V = 3r̃D₂F + F̃` with integral `M03`.
    M03,
    /// The previous family restricted by `M21`.
    M03M21,
    /// `f = x₁²F((r²−1)/x₁)`, `V = 3x₁F′ + F̃` with `M03`, `M32 − M02`.
    M03Pair,
    /// `f = μ(r²−1)²`, `V = 6μr² + ν` with the three-dimensional algebra.
    M03Triple,
}

impl WorkedFamily {
    pub const ALL: [WorkedFamily; 4] = [
        WorkedFamily::M03,
        WorkedFamily::M03M21,
        WorkedFamily::M03Pair,
        WorkedFamily::M03Triple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorkedFamily::M03 => "m03",
            WorkedFamily::M03M21 => "m03-m21",
            WorkedFamily::M03Pair => "m03-pair",
            WorkedFamily::M03Triple => "m03-triple",
        }
    }
}

impl fmt::Display for WorkedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkedFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WorkedFamily::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`; expected one of m03, m03-m21, m03-pair, m03-triple"))
    }
}

/// One displayed first-order equation pair.
#[derive(Debug, Clone, Copy)]
enum Chain {
    /// `k = 3`, `s = 0`, `c = 1`.
    M03,
    /// `k = 2`, `s = 1`, `c = 1 − 2x₃`; displayed with `c = −1 − 2x₃`.
    M32M02,
    /// `k = 1`, `s = 1`, `c = 1 − 2x₃`; displayed with `c = −1 − 2x₃`.
    M31M01,
}

impl Chain {
    fn integral(self) -> &'static str {
        match self {
            Chain::M03 => "M03",
            Chain::M32M02 => "M32 - M02",
            Chain::M31M01 => "M31 - M01",
        }
    }

    /// The combination the displayed form belongs to, when it differs.
    fn displayed_integral(self) -> Option<&'static str> {
        match self {
            Chain::M03 => None,
            Chain::M32M02 => Some("M32 - M42"),
            Chain::M31M01 => Some("M31 - M41"),
        }
    }

    fn k(self) -> Axis {
        match self {
            Chain::M03 => Axis::X3,
            Chain::M32M02 => Axis::X2,
            Chain::M31M01 => Axis::X1,
        }
    }

    /// `(mass, potential)` residuals, left side minus right side, in the
    /// displayed form (`displayed = true`) or the form derived from the
    /// integral itself.
    fn equations(self, h: &PdmHamiltonian, displayed: bool) -> (Expr, Expr) {
        let (s, c) = match (self, displayed) {
            (Chain::M03, _) => (Expr::zero(), Expr::one()),
            (_, true) => (Expr::one(), Expr::int(-1) - Expr::int(2) * Expr::x(3)),
            (_, false) => (Expr::one(), Expr::one() - Expr::int(2) * Expr::x(3)),
        };
        let k = self.k();
        let xk = Expr::var(k);
        let flow = |g: &Expr| {
            Expr::int(2)
                * &xk
                * (Expr::x(1) * g.diff(Axis::X1) + Expr::x(2) * g.diff(Axis::X2) + (Expr::x(3) - &s) * g.diff(Axis::X3))
                - (Expr::r2() + &c) * g.diff(k)
        };
        let fk = h.f.diff(k);
        (
            flow(&h.f) - Expr::int(4) * &xk * &h.f,
            flow(&h.v) - Expr::int(3) * fk,
        )
    }
}

fn zero_check(entry: &str, check: &str, e: &Expr, policy: &ZeroTestPolicy) -> CheckRecord {
    let s = is_zero(e, &policy.for_label(&format!("{entry}/{check}")));
    CheckRecord::from_zero_statuses(entry, check, [&s])
}

/// Common factor between an equation pair and the reduced residuals of
/// `integral`, for fully abstract `f`, `V`.
fn factor_against(eqs: &(Expr, Expr), integral: &str) -> Option<String> {
    let h = PdmHamiltonian::abstract_symbols();
    let q = Integral::parse(integral).expect("static combination");
    let (r1, r2) = reduced_determining_op(&h, &q.op());
    match (proportionality_factor(&eqs.0, &r1), proportionality_factor(&eqs.1, &r2)) {
        (Some(a), Some(b)) if a == b => Some(a.to_string()),
        _ => None,
    }
}

/// Confirms that the equations used are a constant multiple of the reduced
/// residuals of their integral, and reports what the displayed form is.
fn cross_check(chain: Chain, r: &mut VerificationReport) {
    let h = PdmHamiltonian::abstract_symbols();
    let entry = format!("{} equations", chain.integral());
    let check = "equations are a multiple of the reduced residuals";
    let rec = match factor_against(&chain.equations(&h, false), chain.integral()) {
        Some(k) => CheckRecord::new(&entry, check, Tier::Symbolic, Status::Pass).with_detail(format!("factor {k}")),
        None => CheckRecord::new(&entry, check, Tier::Symbolic, Status::Fail).with_detail("no constant factor"),
    };
    r.push(rec.with_integral(chain.integral()));
    if let Some(other) = chain.displayed_integral() {
        let shown = chain.equations(&h, true);
        let text = match (factor_against(&shown, chain.integral()), factor_against(&shown, other)) {
            (Some(k), _) => format!("displayed form with r²−1−2x₃ is ({k}) times the residuals of {}", chain.integral()),
            (None, Some(k)) => format!(
                "displayed form with r²−1−2x₃ is not a multiple of the residuals of {}; it is ({k}) times those of {other}. \
                 The equations of {} carry r²+1−2x₃",
                chain.integral(),
                chain.integral()
            ),
            (None, None) => format!("displayed form matches neither {} nor {other}", chain.integral()),
        };
        r.annotate(Annotation::new(&entry, "displayed equations", text));
    }
}

fn chain_checks(entry: &str, h: &PdmHamiltonian, chains: &[Chain], policy: &ZeroTestPolicy) -> Vec<CheckRecord> {
    chains
        .iter()
        .flat_map(|c| {
            let (m, p) = c.equations(h, false);
            [
                zero_check(entry, &format!("{} mass equation", c.integral()), &m, policy).with_integral(c.integral()),
                zero_check(entry, &format!("{} potential equation", c.integral()), &p, policy)
                    .with_integral(c.integral()),
            ]
        })
        .collect()
}

/// Evaluates the displayed forms on a family and records the outcome.
fn displayed_note(r: &mut VerificationReport, entry: &str, h: &PdmHamiltonian, chains: &[Chain], policy: &ZeroTestPolicy) {
    for c in chains.iter().filter(|c| c.displayed_integral().is_some()) {
        let (m, p) = c.equations(h, true);
        let ok = [m, p]
            .iter()
            .all(|e| is_zero(e, &policy.for_label(&format!("{entry}/displayed {}", c.integral()))).is_zero());
        r.annotate(Annotation::new(
            entry,
            "displayed equations",
            format!(
                "the family {} the displayed {} equations with r²−1−2x₃",
                if ok { "satisfies" } else { "does not satisfy" },
                c.integral()
            ),
        ));
    }
}

/// Runs `chains` on an alternate orientation and records the outcome as
/// an annotation.
fn orientation_note(
    r: &mut VerificationReport,
    entry: &str,
    what: &str,
    h: &PdmHamiltonian,
    chains: &[Chain],
    policy: &ZeroTestPolicy,
) {
    let checks = chain_checks(entry, h, chains, policy);
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.check.clone()).collect();
    let text = if failed.is_empty() {
        format!("{what}: also satisfies every equation checked")
    } else {
        format!("{what}: fails {}", failed.join(", "))
    };
    r.annotate(Annotation::new(entry, "argument orientation", text));
}

fn f_call(args: Vec<Expr>) -> Expr {
    Expr::call("F", args)
}

fn ft_call(args: Vec<Expr>) -> Expr {
    Expr::call("Ft", args)
}

fn m03_family(u: &Expr) -> PdmHamiltonian {
    let ratio = Expr::x(2) / Expr::x(1);
    let args = vec![ratio, u.clone()];
    PdmHamiltonian::new(
        Expr::rt2() * f_call(args.clone()),
        Expr::int(3) * Expr::rt() * Expr::call_deriv("F", vec![0, 1], args.clone()) + ft_call(args),
    )
}

fn one_arg_family(weight: &Expr, u: &Expr) -> PdmHamiltonian {
    let args = vec![u.clone()];
    PdmHamiltonian::new(
        weight.powi(2) * f_call(args.clone()),
        Expr::int(3) * weight * Expr::call_deriv("F", vec![1], args.clone()) + ft_call(args),
    )
}

fn u_minus(den: &Expr) -> Expr {
    (Expr::r2() - Expr::one()) / den
}

fn u_plus(den: &Expr) -> Expr {
    (Expr::r2() + Expr::one()) / den
}

pub fn verify_worked_family(family: WorkedFamily, policy: &ZeroTestPolicy) -> VerificationReport {
    let mut r = VerificationReport::new(format!("worked family {family}"));
    let entry = family.name();
    match family {
        WorkedFamily::M03 => {
            cross_check(Chain::M03, &mut r);
            let h = m03_family(&u_minus(&Expr::rt()));
            r.checks.extend(chain_checks(entry, &h, &[Chain::M03], policy));
            let alt = m03_family(&u_plus(&Expr::rt()));
            orientation_note(&mut r, entry, "second argument (r²+1)/r̃", &alt, &[Chain::M03], policy);
        }
        WorkedFamily::M03M21 => {
            let h = one_arg_family(&Expr::rt(), &u_minus(&Expr::rt()));
            r.checks.extend(chain_checks(entry, &h, &[Chain::M03], policy));
            let rot = |g: &Expr| Expr::x(2) * g.diff(Axis::X1) - Expr::x(1) * g.diff(Axis::X2);
            r.push(zero_check(entry, "x2 f1 - x1 f2", &rot(&h.f), policy).with_integral("M21"));
            r.push(zero_check(entry, "x2 V1 - x1 V2", &rot(&h.v), policy).with_integral("M21"));
            let alt = one_arg_family(&Expr::rt(), &u_plus(&Expr::rt()));
            orientation_note(&mut r, entry, "argument (r²+1)/r̃", &alt, &[Chain::M03], policy);
            // F ≡ 1 and F̃(u) = u² give a rational Hamiltonian.
            let inst = PdmHamiltonian::new(
                h.f.instantiate("F", &FunctionDef::new(1, Expr::one()))
                    .instantiate("Ft", &FunctionDef::new(1, Expr::x(1).powi(2))),
                h.v.instantiate("F", &FunctionDef::new(1, Expr::one()))
                    .instantiate("Ft", &FunctionDef::new(1, Expr::x(1).powi(2))),
            );
            for q in ["M03", "M21"] {
                let q = Integral::parse(q).expect("static combination");
                r.push(full_commutator(&format!("{entry} (F = 1)"), &inst, &q, policy));
            }
        }
        WorkedFamily::M03Pair => {
            cross_check(Chain::M32M02, &mut r);
            let h = one_arg_family(&Expr::x(1), &u_minus(&Expr::x(1)));
            r.checks.extend(chain_checks(entry, &h, &[Chain::M03, Chain::M32M02], policy));
            displayed_note(&mut r, entry, &h, &[Chain::M32M02], policy);
            let alt = one_arg_family(&Expr::x(3), &u_minus(&Expr::x(3)));
            orientation_note(
                &mut r,
                entry,
                "x₃²F((r²−1)/x₃) with 3x₃F′",
                &alt,
                &[Chain::M03, Chain::M32M02],
                policy,
            );
        }
        WorkedFamily::M03Triple => {
            cross_check(Chain::M31M01, &mut r);
            let mu = Expr::param("mu");
            let h = PdmHamiltonian::new(
                &mu * (Expr::r2() - Expr::one()).powi(2),
                Expr::int(6) * &mu * Expr::r2() + Expr::param("nu"),
            );
            r.checks.extend(chain_checks(
                entry,
                &h,
                &[Chain::M03, Chain::M32M02, Chain::M31M01],
                policy,
            ));
            displayed_note(&mut r, entry, &h, &[Chain::M32M02, Chain::M31M01], policy);
            for q in ["M03", "M32 - M02", "M31 - M01"] {
                let q = Integral::parse(q).expect("static combination");
                r.push(full_commutator(entry, &h, &q, policy));
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for w in WorkedFamily::ALL {
            assert_eq!(w.name().parse::<WorkedFamily>().unwrap(), w);
        }
        assert!("de7".parse::<WorkedFamily>().is_err());
    }

    #[test]
    fn every_family_passes() {
        for w in WorkedFamily::ALL {
            let r = verify_worked_family(w, &ZeroTestPolicy::default());
            assert!(r.passed(), "{w}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn displayed_equations_match_residuals() {
        let r = verify_worked_family(WorkedFamily::M03, &ZeroTestPolicy::default());
        assert_eq!(r.checks[0].detail.as_deref(), Some("factor -2"));
        let r = verify_worked_family(WorkedFamily::M03Pair, &ZeroTestPolicy::default());
        assert_eq!(r.checks[0].detail.as_deref(), Some("factor 2"));
        // the displayed r²−1−2x₃ belongs to M32 − M42
        let a = r.annotations.iter().find(|a| a.entry == "M32 - M02 equations").unwrap();
        assert!(a.text.contains("(2) times those of M32 - M42"), "{}", a.text);
    }

    #[test]
    fn plus_orientation_is_reported() {
        let r = verify_worked_family(WorkedFamily::M03, &ZeroTestPolicy::default());
        let note = r.annotations.iter().find(|a| a.topic == "argument orientation").unwrap();
        assert!(note.text.contains("fails"), "{}", note.text);
    }
}
