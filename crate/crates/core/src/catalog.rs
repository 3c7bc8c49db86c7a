//! Ready-made algebras and twisting maps used by the presets and tests.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, Element, Monomial};
use crate::kernel::Field;
use crate::lin::Lin;
use crate::twist::{Tensor, TwistMap};
use crate::Error;

/// `k[x_1..x_t; δ]` from a table of `(j, i, value)` written over generator names.
pub fn ore_algebra(field: Field, names: &[&str], deltas: &[(usize, usize, &str)]) -> Result<Arc<Algebra>, Error> {
    let poly = Algebra::polynomial(field, names);
    let mut table = Vec::new();
    for (j, i, s) in deltas {
        table.push((*j, *i, crate::algebra::parse_element(&poly, s)?));
    }
    Algebra::iterated_ore(field, names, table)
}

/// The first Weyl algebra `k⟨x, y⟩/(xy − yx − 1)`, with `x_1 = x`, `x_2 = y`.
pub fn weyl_algebra(field: Field) -> Arc<Algebra> {
    ore_algebra(field, &["x", "y"], &[(1, 0, "-1")]).unwrap()
}

/// The n-th Weyl algebra with generators `x1, y1, x2, y2, …` (`[x_i, y_i] = 1`).
pub fn weyl_n_algebra(field: Field, n: usize) -> Result<Arc<Algebra>, Error> {
    if n == 0 || n > 2 {
        return Err(Error::OutOfScope(format!("weyl-n is provided for n = 1, 2 (got {n})")));
    }
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let deltas: Vec<(usize, usize, &str)> = (0..n).map(|i| (2 * i + 1, 2 * i, "-1")).collect();
    ore_algebra(field, &refs, &deltas)
}

/// `τ(y⊗x) = x⊗y − 1⊗1` on `k[x] ⊗ k[y]`.
pub fn weyl_twist(field: Field) -> Arc<TwistMap> {
    let a = Algebra::polynomial(field, &["x"]);
    let b = Algebra::polynomial(field, &["y"]);
    let delta = vec![a.scalar(field.int(-1))];
    TwistMap::ore(a, b, delta).unwrap()
}

/// A table that agrees with the Weyl twist on every pair of degree `<= 6` except
/// `τ(y⊗x)`, whose constant term has the wrong sign.
pub fn corrupted_weyl_twist(field: Field) -> Arc<TwistMap> {
    let good = weyl_twist(field);
    let mut table: BTreeMap<(Monomial, Monomial), Tensor> = BTreeMap::new();
    for b in good.right().basis_up_to(6) {
        for a in good.left().basis_up_to(6) {
            table.insert((b.clone(), a.clone()), good.apply_mono(&b, &a));
        }
    }
    let (y, x) = (Monomial(vec![1]), Monomial(vec![1]));
    let mut bad = Lin::basis(field, (x.clone(), y.clone()));
    bad.add_term((Monomial(vec![0]), Monomial(vec![0])), &field.one());
    table.insert((y, x), bad);
    TwistMap::custom(good.left().clone(), good.right().clone(), table).unwrap()
}

/// `A = k[y]`, `B = k[x]`, `τ(x⊗y) = y⊗x + y⊗1`: the enveloping algebra of `[x, y] = y`.
pub fn solvable_twist(field: Field) -> Arc<TwistMap> {
    let a = Algebra::polynomial(field, &["y"]);
    let b = Algebra::polynomial(field, &["x"]);
    let delta = vec![a.generator(0)];
    TwistMap::ore(a, b, delta).unwrap()
}

pub fn flip_twist(field: Field) -> Arc<TwistMap> {
    TwistMap::flip(Algebra::polynomial(field, &["x"]), Algebra::polynomial(field, &["y"])).unwrap()
}

/// `kZ/p` acting on `k[x, y]` by `g·x = x`, `g·y = x + y`, over `GF(p)`.
pub fn skew_group_twist(p: u64) -> Result<Arc<TwistMap>, Error> {
    let field = Field::new(p)?;
    let g = Algebra::cyclic_group(field, p as u32)?;
    let s = Algebra::polynomial(field, &["x", "y"]);
    let action = vec![s.generator(0), {
        let mut e: Element = s.generator(0);
        e.add(&s.generator(1));
        e
    }];
    TwistMap::skew_group(g, s, action)
}

/// `kZ/2` acting on `k[s]` by `s ↦ −s`.
pub fn sign_twist(field: Field) -> Arc<TwistMap> {
    let g = Algebra::cyclic_group(field, 2).unwrap();
    let s = Algebra::polynomial(field, &["s"]);
    let action = vec![s.generator(0).scaled(&field.int(-1))];
    TwistMap::skew_group(g, s, action).unwrap()
}

/// The enveloping algebra of `[x, y] = y` as an iterated Ore extension (`x_1 = y`, `x_2 = x`).
pub fn solvable_algebra(field: Field) -> Arc<Algebra> {
    ore_algebra(field, &["y", "x"], &[(1, 0, "y")]).unwrap()
}

/// The Heisenberg enveloping algebra: `x_1 = z`, `x_2 = y`, `x_3 = x`, `[x, y] = z` central.
pub fn heisenberg_algebra(field: Field) -> Arc<Algebra> {
    ore_algebra(field, &["z", "y", "x"], &[(2, 1, "z")]).unwrap()
}
