//! Execution of configured tasks. Resolutions and products are built on first use and cached;
//! a failed task marks its target so that tasks depending on it are skipped.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::AlgebraKind;
use crate::resolutions::{
    bar, cyclic_periodic, lift_twist, one_sided_koszul, ore_koszul, poly_koszul, Family, LiftSide, ResolutionBundle, Resolved,
};
use crate::twistprod::{flatten, ore_module_resolution, SignRule, TotalComplex, TwistedBicomplex};
use crate::Error;

use super::checks;
use super::config::{ProblemConfig, ProductDef, ResolutionDef, ResolutionFamily, Task};
use super::report::TaskRecord;

pub struct Built {
    pub bundle: ResolutionBundle,
    /// Products only.
    pub bicomplex: Option<TwistedBicomplex>,
    pub total: Option<TotalComplex>,
}

pub struct Session<'a> {
    cfg: &'a ProblemConfig,
    cache: HashMap<String, Result<Arc<Built>, Error>>,
    /// Object name → the task whose failure marked it.
    failed: BTreeMap<String, String>,
}

impl<'a> Session<'a> {
    pub fn new(cfg: &'a ProblemConfig) -> Self {
        Session { cfg, cache: HashMap::new(), failed: BTreeMap::new() }
    }

    fn build_resolution(&mut self, def: &ResolutionDef) -> Result<ResolutionBundle, Error> {
        let alg = &self.cfg.algebras[&def.algebra].algebra;
        let b = match def.family {
            ResolutionFamily::Bar => bar(alg, def.n_max, false, def.label_cutoff)?,
            ResolutionFamily::ReducedBar => bar(alg, def.n_max, true, def.label_cutoff)?,
            ResolutionFamily::Koszul => poly_koszul(alg, true)?,
            ResolutionFamily::OreKoszul => ore_koszul(alg)?,
            ResolutionFamily::OneSidedKoszul => one_sided_koszul(alg)?,
            ResolutionFamily::Periodic => {
                let AlgebraKind::CyclicGroup { order, .. } = alg.kind() else { unreachable!("checked when parsing") };
                cyclic_periodic(alg.field(), *order, def.n_max)?
            }
        };
        match &def.lift {
            None => Ok(b),
            Some((t, side)) => lift_twist(&b, &self.cfg.twists[t].twist, *side),
        }
    }

    fn build_product(&mut self, def: &ProductDef) -> Result<Built, Error> {
        match def {
            ProductDef::Twisted { bimodule, left, right, twist, flatten: target } => {
                let pm = self.get(left)?;
                let pn = self.get(right)?;
                let t = &self.cfg.twists[twist].twist;
                let bc = TwistedBicomplex::new(&pm.bundle, &pn.bundle, t, SignRule::Alternating)?;
                if bc.side == crate::complex::ModuleSide::Bimodule && !bimodule {
                    return Err(Error::SpecMismatch("a one-sided product of bimodule resolutions".into()));
                }
                if bc.side != crate::complex::ModuleSide::Bimodule && *bimodule {
                    return Err(Error::SpecMismatch("a bimodule product of one-sided resolutions".into()));
                }
                let total = bc.total()?;
                let resolved = if *bimodule { Resolved::Algebra } else { Resolved::Trivial };
                let bundle = match target {
                    Some(a) => ResolutionBundle {
                        complex: flatten(&total, &self.cfg.algebras[a].algebra)?,
                        family: Family::TwistedProduct,
                        resolved,
                        lift: None,
                        label_cutoff: None,
                    },
                    None => total.clone().into_bundle(resolved),
                };
                Ok(Built { bundle, bicomplex: Some(bc), total: Some(total) })
            }
            ProductDef::OreModule { base, delta, var } => {
                let b = self.get(base)?;
                let r = ore_module_resolution(&b.bundle, delta.clone(), var)?;
                Ok(Built { bundle: r.bundle, bicomplex: Some(r.bicomplex), total: Some(r.total) })
            }
        }
    }

    /// The resolution or product called `name`.
    pub fn get(&mut self, name: &str) -> Result<Arc<Built>, Error> {
        if let Some(r) = self.cache.get(name) {
            return r.clone();
        }
        let cfg = self.cfg;
        let r = if let Some(def) = cfg.resolutions.get(name) {
            self.build_resolution(def).map(|bundle| Arc::new(Built { bundle, bicomplex: None, total: None }))
        } else if let Some(def) = cfg.products.get(name) {
            self.build_product(def).map(Arc::new)
        } else {
            Err(Error::Validation(format!("unknown resolution or product '{name}'")))
        };
        self.cache.insert(name.to_string(), r.clone());
        r
    }

    /// Every object a task on `name` relies on, `name` included.
    fn closure(&self, name: &str, out: &mut Vec<String>) {
        out.push(name.to_string());
        if let Some(r) = self.cfg.resolutions.get(name) {
            if let Some((t, _)) = &r.lift {
                out.push(t.clone());
            }
        }
        match self.cfg.products.get(name) {
            Some(ProductDef::Twisted { left, right, twist, .. }) => {
                out.push(twist.clone());
                self.closure(left, out);
                self.closure(right, out);
            }
            Some(ProductDef::OreModule { base, .. }) => self.closure(base, out),
            None => {}
        }
    }

    /// Runs a non-preset task, recording its checks in `rec`.
    pub fn run_task(&mut self, task: &Task, rec: &mut TaskRecord) -> Result<(), Error> {
        let Some(target) = task.target() else { unreachable!("presets run elsewhere") };
        let n_cut = self.cfg.cutoff;
        let seed = self.cfg.seed;
        match task {
            Task::CheckTwist(name) => {
                let t = self.cfg.twists[name].twist.clone();
                checks::hexagon(rec, name, &t, seed)?;
                checks::bijective(rec, name, &t);
                rec.check(format!("unit conditions {name}"), t.check_units(checks::HEXAGON_BOUND), "τ(1⊗a) = a⊗1 and τ(b⊗1) = 1⊗b");
            }
            Task::VerifyResolution(_) => {
                let b = self.get(target)?;
                checks::compose(rec, target, &b.bundle.complex);
                checks::exactness(rec, target, &b.bundle, n_cut)?;
                if let Some(l) = &b.bundle.lift {
                    checks::lift(rec, target, &b.bundle)?;
                    let wedge = matches!(b.bundle.family, Family::PolyKoszul | Family::OreKoszul | Family::OneSidedKoszul);
                    if wedge && l.side() == LiftSide::Left {
                        checks::symmetrization(rec, target, &b.bundle)?;
                    }
                }
            }
            Task::TwistedProduct(_) => {
                let b = self.get(target)?;
                if let Some(bc) = &b.bicomplex {
                    checks::bicomplex(rec, target, bc, seed)?;
                }
                if let Some(tc) = &b.total {
                    checks::compose(rec, &format!("{target} (total complex)"), &tc.complex);
                    checks::kunneth(rec, target, tc, n_cut)?;
                }
                checks::compose(rec, target, &b.bundle.complex);
                checks::exactness(rec, target, &b.bundle, n_cut)?;
                rec.note(format!("ranks {:?} over {}", b.bundle.complex.ranks(), b.bundle.complex.algebra.name()));
            }
            Task::Hochschild(_) => {
                let b = self.get(target)?;
                let c = &b.bundle.complex;
                checks::hochschild(rec, target, c, c.n_max(), n_cut, None)?;
            }
            Task::TorExt(_) => {
                let b = self.get(target)?;
                let c = &b.bundle.complex;
                checks::tor_ext(rec, target, c, c.n_max(), None)?;
            }
            Task::Preset(_) => unreachable!(),
        }
        Ok(())
    }

    /// `Some(reason)` when a prerequisite failed earlier.
    pub fn blocked(&self, task: &Task) -> Option<String> {
        let target = task.target()?;
        let mut deps = Vec::new();
        if matches!(task, Task::CheckTwist(_)) {
            deps.push(target.to_string());
        } else {
            self.closure(target, &mut deps);
        }
        deps.iter().find_map(|d| self.failed.get(d).map(|t| format!("skipped: {t} failed")))
    }

    /// Marks the target of a failed construction or verification task.
    pub fn mark_failed(&mut self, task: &Task) {
        if let Task::CheckTwist(n) | Task::VerifyResolution(n) | Task::TwistedProduct(n) = task {
            self.failed.entry(n.clone()).or_insert_with(|| task.to_string());
        }
    }
}
