//! Compatibility equations for lifts `τ_{B,M}: B⊗M → M⊗B` and `τ_{N,A}: N⊗A → A⊗N`.
//!
//! Modules are described by a basis (any ordered key type), the action on basis keys, and
//! the lift on basis keys. The checks expand both sides of each equation on every supplied
//! basis tuple.

use std::fmt::Debug;

use super::TwistMap;
use crate::algebra::Monomial;
use crate::lin::Lin;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `τ_{B,M}` for an `A`-bimodule `M`.
    LeftOfBimodule,
    /// `τ_{N,A}` for a `B`-bimodule `N`.
    RightOfBimodule,
    /// `τ_{B,M}` for a left `A`-module `M`.
    OneSided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatViolation {
    pub equation: &'static str,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatReport {
    pub side: Side,
    pub checked: usize,
    pub violations: Vec<CompatViolation>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
    fn new(side: Side) -> Self {
        CompatReport { side, checked: 0, violations: Vec::new() }
    }
    fn record<K: Ord + Debug>(&mut self, equation: &'static str, input: String, lhs: &Lin<K>, rhs: &Lin<K>) {
        self.checked += 1;
        if lhs != rhs && self.violations.len() < 20 {
            self.violations.push(CompatViolation { equation, input, lhs: format!("{lhs:?}"), rhs: format!("{rhs:?}") });
        }
    }
}

/// Checks both equations for a left lift `lift(b, m) = Σ m'⊗b'` on an `A`-bimodule with
/// action `act(a, m, a')`.
pub fn check_left_compat<K, L, R>(
    t: &TwistMap,
    module_basis: &[K],
    b_basis: &[Monomial],
    a_basis: &[Monomial],
    lift: L,
    act: R,
) -> CompatReport
where
    K: Ord + Clone + Debug,
    L: Fn(&Monomial, &K) -> Lin<(K, Monomial)>,
    R: Fn(&Monomial, &K, &Monomial) -> Lin<K>,
{
    let mut report = CompatReport::new(Side::LeftOfBimodule);
    multiplication_side(t, module_basis, b_basis, &lift, &mut report);
    let field = t.left().field();
    for b in b_basis {
        for a in a_basis {
            for m in module_basis {
                for a2 in a_basis {
                    if a.is_one() && a2.is_one() {
                        continue;
                    }
                    let lhs = act(a, m, a2).map_linear(|k| lift(b, k));
                    let mut rhs = Lin::zero(field);
                    for ((a1, b1), c1) in t.apply_mono(b, a).iter() {
                        for ((m1, b2), c2) in lift(b1, m).iter() {
                            for ((a3, b3), c3) in t.apply_mono(b2, a2).iter() {
                                let c = &(c1 * c2) * c3;
                                for (m2, c4) in act(a1, m1, a3).iter() {
                                    rhs.add_term((m2.clone(), b3.clone()), &(&c * c4));
                                }
                            }
                        }
                    }
                    report.record("module", format!("{b:?} (x) {a:?} (x) {m:?} (x) {a2:?}"), &lhs, &rhs);
                }
            }
        }
    }
    report
}

/// Same as [`check_left_compat`] for a left module (action `act(a, m)`).
pub fn check_one_sided_compat<K, L, R>(
    t: &TwistMap,
    module_basis: &[K],
    b_basis: &[Monomial],
    a_basis: &[Monomial],
    lift: L,
    act: R,
) -> CompatReport
where
    K: Ord + Clone + Debug,
    L: Fn(&Monomial, &K) -> Lin<(K, Monomial)>,
    R: Fn(&Monomial, &K) -> Lin<K>,
{
    let mut report = CompatReport::new(Side::OneSided);
    multiplication_side(t, module_basis, b_basis, &lift, &mut report);
    let field = t.left().field();
    for b in b_basis {
        for a in a_basis {
            if a.is_one() {
                continue;
            }
            for m in module_basis {
                let lhs = act(a, m).map_linear(|k| lift(b, k));
                let mut rhs = Lin::zero(field);
                for ((a1, b1), c1) in t.apply_mono(b, a).iter() {
                    for ((m1, b2), c2) in lift(b1, m).iter() {
                        for (m2, c3) in act(a1, m1).iter() {
                            rhs.add_term((m2.clone(), b2.clone()), &(&(c1 * c2) * c3));
                        }
                    }
                }
                report.record("module", format!("{b:?} (x) {a:?} (x) {m:?}"), &lhs, &rhs);
            }
        }
    }
    report
}

/// `τ_M(b b' ⊗ m) = (1⊗m_B)(τ_M⊗1)(1⊗τ_M)(b⊗b'⊗m)`.
fn multiplication_side<K, L>(t: &TwistMap, module_basis: &[K], b_basis: &[Monomial], lift: &L, report: &mut CompatReport)
where
    K: Ord + Clone + Debug,
    L: Fn(&Monomial, &K) -> Lin<(K, Monomial)>,
{
    let field = t.left().field();
    let bb = t.right();
    for b1 in b_basis {
        for b2 in b_basis {
            if b1.is_one() || b2.is_one() {
                continue;
            }
            for m in module_basis {
                let lhs = bb.mul_mono(b1, b2).map_linear(|p| lift(p, m));
                let mut rhs = Lin::zero(field);
                for ((m1, b3), c1) in lift(b2, m).iter() {
                    for ((m2, b4), c2) in lift(b1, m1).iter() {
                        for (p, c3) in bb.mul_mono(b4, b3).iter() {
                            rhs.add_term((m2.clone(), p.clone()), &(&(c1 * c2) * c3));
                        }
                    }
                }
                report.record("multiplication", format!("{b1:?} (x) {b2:?} (x) {m:?}"), &lhs, &rhs);
            }
        }
    }
}

/// Checks both equations for a right lift `lift(n, a) = Σ a'⊗n'` on a `B`-bimodule with
/// action `act(b, n, b')`.
pub fn check_right_compat<K, L, R>(
    t: &TwistMap,
    module_basis: &[K],
    b_basis: &[Monomial],
    a_basis: &[Monomial],
    lift: L,
    act: R,
) -> CompatReport
where
    K: Ord + Clone + Debug,
    L: Fn(&K, &Monomial) -> Lin<(Monomial, K)>,
    R: Fn(&Monomial, &K, &Monomial) -> Lin<K>,
{
    let mut report = CompatReport::new(Side::RightOfBimodule);
    let field = t.left().field();
    let aa = t.left();
    // τ_N(n ⊗ a a') = (m_A⊗1)(1⊗τ_N)(τ_N⊗1)
    for n in module_basis {
        for a1 in a_basis {
            for a2 in a_basis {
                if a1.is_one() || a2.is_one() {
                    continue;
                }
                let lhs = aa.mul_mono(a1, a2).map_linear(|p| lift(n, p));
                let mut rhs = Lin::zero(field);
                for ((x1, n1), c1) in lift(n, a1).iter() {
                    for ((x2, n2), c2) in lift(n1, a2).iter() {
                        for (p, c3) in aa.mul_mono(x1, x2).iter() {
                            rhs.add_term((p.clone(), n2.clone()), &(&(c1 * c2) * c3));
                        }
                    }
                }
                report.record("multiplication", format!("{n:?} (x) {a1:?} (x) {a2:?}"), &lhs, &rhs);
            }
        }
    }
    // τ_N(b n b' ⊗ a) = (1⊗ρ)(τ⊗1⊗1)(1⊗τ_N⊗1)(1⊗1⊗τ)
    for b in b_basis {
        for n in module_basis {
            for b2 in b_basis {
                if b.is_one() && b2.is_one() {
                    continue;
                }
                for a in a_basis {
                    let lhs = act(b, n, b2).map_linear(|k| lift(k, a));
                    let mut rhs = Lin::zero(field);
                    for ((a1, b3), c1) in t.apply_mono(b2, a).iter() {
                        for ((a2, n2), c2) in lift(n, a1).iter() {
                            for ((a3, b4), c3) in t.apply_mono(b, a2).iter() {
                                let c = &(c1 * c2) * c3;
                                for (n3, c4) in act(b4, n2, b3).iter() {
                                    rhs.add_term((a3.clone(), n3.clone()), &(&c * c4));
                                }
                            }
                        }
                    }
                    report.record("module", format!("{b:?} (x) {n:?} (x) {b2:?} (x) {a:?}"), &lhs, &rhs);
                }
            }
        }
    }
    report
}
