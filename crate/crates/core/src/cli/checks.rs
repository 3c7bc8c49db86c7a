//! Check runners shared by configured tasks and presets; each appends to a task record.

use crate::complex::{compose_check, ChainComplexSpec};
use crate::homology::{ext_over_augmented, hochschild_cohomology, tor_over_augmented, HochschildReport, Stability};
use crate::resolutions::{check_lift, cross_check_symmetrization, ResolutionBundle};
use crate::twist::{check_bijective, check_hexagon, TwistMap};
use crate::twistprod::{action_commutes_check, anticommutation_check, kunneth_degree0_check, TotalComplex, TwistedBicomplex};
use crate::Error;

use super::report::{DimRow, TaskRecord};

pub const HEXAGON_BOUND: u32 = 3;
pub const HEXAGON_SAMPLES: usize = 200;
/// Key degree bound for the lift checks.
pub const LIFT_BOUND: u32 = 3;
/// Degree bound and sample count for the action check on bicomplexes.
pub const ACTION_BOUND: u32 = 2;
pub const ACTION_SAMPLES: usize = 20;

fn dims(v: &[usize]) -> String {
    format!("{v:?}")
}

pub fn hexagon(rec: &mut TaskRecord, name: &str, t: &TwistMap, seed: u64) -> Result<bool, Error> {
    let r = check_hexagon(t, HEXAGON_BOUND, HEXAGON_SAMPLES, seed)?;
    rec.violations(
        &format!("hexagon {name}"),
        r.violations.iter().map(|v| format!("(b, b', a, a') = ({}): {} ≠ {}", v.tuple.join(", "), v.lhs, v.rhs)),
    );
    Ok(rec.check(
        format!("hexagon {name}"),
        r.passed(),
        format!("{} tuples (degree <= {HEXAGON_BOUND} plus {HEXAGON_SAMPLES} random), {} violations", r.tuples_checked, r.violations.len()),
    ))
}

pub fn bijective(rec: &mut TaskRecord, name: &str, t: &TwistMap) -> bool {
    let r = check_bijective(t, HEXAGON_BOUND);
    let detail = match &r {
        Ok(()) => format!("invertible on every truncation of degree <= {HEXAGON_BOUND}"),
        Err(e) => e.to_string(),
    };
    rec.check(format!("bijective {name}"), r.is_ok(), detail)
}

pub fn compose(rec: &mut TaskRecord, name: &str, c: &ChainComplexSpec) -> bool {
    let r = compose_check(c);
    rec.violations(
        &format!("d² = 0 on {name}"),
        r.failures.iter().map(|f| format!("degree {} label {}: {}", f.degree, f.label, f.residue)),
    );
    rec.check(format!("d² = 0 {name}"), r.passed(), format!("{} labels checked, {} failures", r.checked, r.failures.len()))
}

/// Windowed exactness plus the homology table of the truncation.
pub fn exactness(rec: &mut TaskRecord, name: &str, b: &ResolutionBundle, n_cut: u32) -> Result<bool, Error> {
    let r = b.exactness(n_cut)?;
    let stability = format!("window<={}", r.window);
    let rows = r.spots.iter().map(|s| DimRow { n: s.degree, degree: None, dim: s.dim, stability: stability.clone() }).collect();
    rec.table(format!("homology of the augmented truncation of {name} at N = {n_cut}"), rows);
    let bad: Vec<usize> = r.spots.iter().filter(|s| s.dim != 0).map(|s| s.degree).collect();
    let detail = format!(
        "N = {n_cut}, window <= {}: nonzero homology in degrees {bad:?}; H_0 {} vs target {}; augmentation cokernel {}",
        r.window, r.h0, r.target_dim, r.augmentation_cokernel
    );
    Ok(rec.check(format!("windowed exactness {name}"), r.passed(), detail))
}

pub fn lift(rec: &mut TaskRecord, name: &str, b: &ResolutionBundle) -> Result<bool, Error> {
    let r = check_lift(b, LIFT_BOUND, true)?;
    rec.violations(&format!("lift chain map on {name}"), r.chain_failures.iter().cloned());
    let mut ok = rec.check(
        format!("lift is a chain map {name}"),
        r.chain_failures.is_empty(),
        format!("{} keys of degree <= {LIFT_BOUND}, {} failures", r.chain_checked, r.chain_failures.len()),
    );
    let checked: usize = r.compat.iter().map(|c| c.checked).sum();
    let violations: Vec<String> = r
        .compat
        .iter()
        .flat_map(|c| c.violations.iter().map(|v| format!("{}: input {}: {} ≠ {}", v.equation, v.input, v.lhs, v.rhs)))
        .collect();
    rec.violations(&format!("lift compatibility on {name}"), violations.iter().cloned());
    ok &= rec.check(
        format!("lift compatibility {name}"),
        violations.is_empty(),
        format!("{checked} equations over {} degrees, {} violations", r.compat.len(), violations.len()),
    );
    Ok(ok)
}

/// The closed-form Ore–Koszul left lift against symmetrize, twist and project.
pub fn symmetrization(rec: &mut TaskRecord, name: &str, b: &ResolutionBundle) -> Result<bool, Error> {
    let r = cross_check_symmetrization(b, 2, 2);
    let (ok, detail) = match r {
        Ok(n) => (true, format!("{n} inputs of degree <= 2 agree")),
        Err(e @ (Error::RestrictionFailure(_) | Error::ChainMapFailure(_))) => (false, e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(rec.check(format!("lift equals symmetrized twist {name}"), ok, detail))
}

pub fn bicomplex(rec: &mut TaskRecord, name: &str, bc: &TwistedBicomplex, seed: u64) -> Result<bool, Error> {
    let a = anticommutation_check(bc);
    rec.violations(&format!("anticommutation on {name}"), a.failures.iter().cloned());
    let mut ok = rec.check(
        format!("d_h d_v = -d_v d_h {name}"),
        a.passed(),
        format!("{} cell generators, {} failures", a.checked, a.failures.len()),
    );
    let b = action_commutes_check(bc, ACTION_BOUND, ACTION_SAMPLES, seed)?;
    rec.violations(&format!("action on {name}"), b.failures.iter().cloned());
    ok &= rec.check(
        format!("d is a module map {name}"),
        b.passed(),
        format!("{} products checked, {} failures", b.checked, b.failures.len()),
    );
    Ok(ok)
}

pub fn kunneth(rec: &mut TaskRecord, name: &str, tc: &TotalComplex, n_cut: u32) -> Result<bool, Error> {
    let rows = kunneth_degree0_check(tc, n_cut)?;
    let bad: Vec<u32> = rows.iter().filter(|r| r.h0 != r.expected).map(|r| r.cutoff).collect();
    let h0: Vec<usize> = rows.iter().map(|r| r.h0).collect();
    let expect: Vec<usize> = rows.iter().map(|r| r.expected).collect();
    Ok(rec.check(
        format!("H_0 = M⊗N {name}"),
        bad.is_empty(),
        format!("truncations 0..={n_cut}: dim H_0 {} vs dim M⊗N {}", dims(&h0), dims(&expect)),
    ))
}

pub fn hochschild(
    rec: &mut TaskRecord,
    name: &str,
    c: &ChainComplexSpec,
    n_max: usize,
    n_cut: u32,
    expect: Option<&[usize]>,
) -> Result<HochschildReport, Error> {
    let r = hochschild_cohomology(c, n_max, n_cut)?;
    let rows = if r.graded {
        r.table.iter().map(|w| DimRow { n: w.n, degree: Some(w.weight), dim: w.dim, stability: "exact".into() }).collect()
    } else {
        r.dims
            .iter()
            .zip(&r.flags)
            .enumerate()
            .map(|(n, (d, f))| DimRow {
                n,
                degree: None,
                dim: *d,
                stability: match f {
                    Stability::Exact => "exact",
                    Stability::Stable => "stable",
                    Stability::Unstable => "unstable",
                }
                .into(),
            })
            .collect()
    };
    let title = if r.graded {
        format!("HH^n({name}) by weight, coefficients of degree <= {n_cut}")
    } else {
        format!("HH^n({name}), classes of weight <= {}", n_cut.saturating_sub(2))
    };
    rec.table(title, rows);
    if let Some(check) = &r.check_dims {
        rec.note(format!("HH^n({name}) at cutoff {}: {}", n_cut + 2, dims(check)));
    }
    if let Some(e) = expect {
        rec.check(format!("HH^n({name})"), r.dims == e, format!("computed {} expected {}", dims(&r.dims), dims(e)));
    }
    Ok(r)
}

/// `Tor` and `Ext` of the trivial module; they must agree degree-wise.
pub fn tor_ext(
    rec: &mut TaskRecord,
    name: &str,
    c: &ChainComplexSpec,
    n_max: usize,
    expect: Option<&[usize]>,
) -> Result<Vec<usize>, Error> {
    let tor = tor_over_augmented(c, n_max)?;
    let ext = ext_over_augmented(c, n_max)?;
    let row = |v: &[usize]| v.iter().enumerate().map(|(n, d)| DimRow { n, degree: None, dim: *d, stability: "exact".into() }).collect();
    rec.table(format!("Tor_n(k, k) over {name}"), row(&tor));
    rec.table(format!("Ext^n(k, k) over {name}"), row(&ext));
    rec.check(format!("Tor and Ext agree {name}"), tor == ext, format!("Tor {} Ext {}", dims(&tor), dims(&ext)));
    if let Some(e) = expect {
        rec.check(format!("Tor_n(k, k) over {name}"), tor == e, format!("computed {} expected {}", dims(&tor), dims(e)));
    }
    Ok(tor)
}
