use std::sync::Arc;

use num_traits::Zero;

use super::constraints::{build_constraints, ConstraintSystem, Instance};
use super::family::{HomData, Params, TruncatedModeFamily};
use crate::error::{Error, Result};
use crate::exactla::{binomial, int, sign, to_dense, Rational};
use crate::virasoro::{apply_virasoro, state_mode, ModuleElement, ModuleId, Pbw};
use crate::zhumod::verma_poly;

/// Null space of a constraint system, as mode families.
#[derive(Clone, Debug)]
pub struct Solution {
    pub dimension: usize,
    pub basis: Vec<TruncatedModeFamily>,
}

/// Basis of all families satisfying the system. Each basis family is scaled
/// so that the first nonzero entry among its degree-zero blocks is one.
pub fn solve_mode_families(system: &ConstraintSystem) -> Solution {
    let layout = Arc::clone(system.layout());
    let n = layout.unknowns();
    let zero_cols: Vec<usize> = layout
        .w1
        .all()
        .map(|u| layout.column(u, &Pbw::empty(), &Pbw::empty()).expect("degree-zero block"))
        .collect();
    let basis: Vec<TruncatedModeFamily> = system
        .echelon()
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut values = to_dense(&v, n);
            if let Some(lead) = zero_cols.iter().map(|&c| values[c].clone()).find(|x| !x.is_zero()) {
                let inv = lead.recip();
                values.iter_mut().for_each(|x| *x *= &inv);
            }
            TruncatedModeFamily::from_values(Arc::clone(&layout), values).expect("layout-sized vector")
        })
        .collect();
    Solution { dimension: basis.len(), basis }
}

/// `Phi(v_h1; -1)` restricted to the lowest degrees.
pub fn extract_hom(phi: &TruncatedModeFamily) -> HomData {
    let matrix = phi.block(&Pbw::empty(), -1, 0).expect("degree-zero block is always in the window");
    HomData { matrix }
}

/// `Phi(u; deg u - 1)` on `W2(0)`, a scalar since both lowest spaces are lines.
pub fn zero_mode_scalar(phi: &TruncatedModeFamily, u: &Pbw) -> Rational {
    let m = phi.block(u, u.degree() as i64 - 1, 0).expect("degree-zero block is in the window");
    m.get(0, 0).clone()
}

/// Evaluates both sides of the instance directly from the family's blocks.
/// Returns whether they agree; rejects instances that leave the window.
pub fn check_borcherds_residual(phi: &TruncatedModeFamily, inst: &Instance) -> Result<bool> {
    let p = phi.layout().params().clone();
    let d = phi.layout().depth() as i64;
    let t = inst.target_degree();
    if !(0..=d).contains(&t) || inst.u.degree() as i64 > d || inst.v.degree() as i64 > d {
        return Err(Error::NotInterior(format!("target degree {t} for window {d}")));
    }
    let a = ModuleElement::monomial(&p.vacuum(), inst.a.clone());
    let u = ModuleElement::monomial(&p.first(), inst.u.clone());
    let v = ModuleElement::monomial(&p.second(), inst.v.clone());
    let (wa, du, dv) = (inst.a.degree() as i64, inst.u.degree() as i64, inst.v.degree() as i64);
    let (l, m, n) = (inst.l, inst.m, inst.n);
    let target = p.target();

    let mut lhs = ModuleElement::zero(&target);
    for i in 0..=(wa + du - l - 1).max(-1) {
        let b = binomial(m, i as u64);
        if b.is_zero() {
            continue;
        }
        let w = state_mode(&a, l + i, &u)?;
        if w.is_zero() {
            continue;
        }
        lhs.add_scaled(&phi.apply(&w, m + n - i, &v)?, &b)?;
    }
    let mut rhs = ModuleElement::zero(&target);
    for i in 0..=(du + dv - n - 1).max(-1) {
        let b = binomial(l, i as u64) * int(sign(i));
        if b.is_zero() {
            continue;
        }
        let inner = phi.apply(&u, n + i, &v)?;
        rhs.add_scaled(&state_mode(&a, l + m - i, &inner)?, &b)?;
    }
    for i in 0..=(wa + dv - m - 1).max(-1) {
        let b = binomial(l, i as u64) * int(-sign(i) * sign(l));
        if b.is_zero() {
            continue;
        }
        let w = state_mode(&a, m + i, &v)?;
        if w.is_zero() {
            continue;
        }
        rhs.add_scaled(&phi.apply(&u, l + n - i, &w)?, &b)?;
    }
    Ok(lhs == rhs)
}

/// Checks `Phi(L(-1)u; i+1)v = L(0)Phi(u;i)v - Phi(L(0)u;i)v - Phi(u;i)L(0)v`
/// for every basis `u`, `v` and index `i` keeping all terms in the window.
/// Returns the number of instances checked.
pub fn check_derivative_relation(phi: &TruncatedModeFamily) -> Result<usize> {
    let layout = phi.layout();
    let d = layout.depth() as i64;
    let p = layout.params();
    let mut checked = 0;
    for um in layout.w1.all().filter(|u| (u.degree() as i64) < d) {
        let u = ModuleElement::monomial(&p.first(), um.clone());
        let lu = apply_virasoro(-1, &u);
        let zu = apply_virasoro(0, &u);
        for vm in layout.w2.all() {
            let v = ModuleElement::monomial(&p.second(), vm.clone());
            let zv = apply_virasoro(0, &v);
            let base = um.degree() as i64 + vm.degree() as i64 - 1;
            for i in (base - d)..=base {
                let lhs = phi.apply(&lu, i + 1, &v)?;
                let mut rhs = apply_virasoro(0, &phi.apply(&u, i, &v)?);
                rhs.add_scaled(&phi.apply(&zu, i, &v)?, &int(-1))?;
                rhs.add_scaled(&phi.apply(&u, i, &zv)?, &int(-1))?;
                if lhs != rhs {
                    return Err(Error::SpotCheck(format!("derivative relation fails at u={um:?} v={vm:?} i={i}")));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Checks that the degree-zero blocks factor through the quotient of the
/// first module: `o(u) = p_u(h3, h2) o(v_h1)` with `p_u` the normal form of `u`.
pub fn check_zero_mode_factorization(phi: &TruncatedModeFamily) -> Result<usize> {
    let layout = phi.layout();
    let p = layout.params();
    let base = zero_mode_scalar(phi, &Pbw::empty());
    let mut checked = 0;
    for um in layout.w1.all() {
        let poly = verma_poly(&ModuleElement::monomial(&p.first(), um.clone()))?;
        let value = poly.coeffs().iter().fold(Rational::zero(), |acc, ((a, b), c)| {
            acc + c * num_traits::pow(p.h3.clone(), *a as usize) * num_traits::pow(p.h2.clone(), *b as usize)
        });
        if zero_mode_scalar(phi, um) != value * &base {
            return Err(Error::SpotCheck(format!("zero-mode block of {um:?} does not factor")));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Solution dimensions at each depth.
pub fn dimension_profile(params: &Params, depths: &[u32], weight_cap: u32, pin: bool) -> Vec<(u32, usize)> {
    depths
        .iter()
        .map(|&d| {
            let mut sys = build_constraints(params, d, weight_cap);
            if pin {
                sys.pin_degree_zero_blocks();
            }
            (d, solve_mode_families(&sys).dimension)
        })
        .collect()
}

/// A Verma module truncated to a depth, checked to be generated freely by a
/// lowest vector annihilated by all positive-degree modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedModule {
    pub module: ModuleId,
    pub depth: u32,
    pub graded_dimensions: Vec<usize>,
}

pub fn generalized_verma(h: &Rational, c: &Rational, depth: u32) -> Result<TruncatedModule> {
    const STATE_WEIGHT: u32 = 4;
    let module = ModuleId::verma(c.clone(), h.clone());
    let vac = ModuleId::vacuum(c.clone());
    let lowest = ModuleElement::lowest(&module);
    for w in 0..=STATE_WEIGHT {
        for a in vac.basis_at_degree(w) {
            let a = ModuleElement::monomial(&vac, a);
            for i in (w as i64)..=(w as i64 + 2) {
                if !state_mode(&a, i, &lowest)?.is_zero() {
                    return Err(Error::SpotCheck(format!("mode {i} of {a:?} does not kill the lowest vector")));
                }
            }
            if w > 0 && state_mode(&a, w as i64 - 1, &lowest)?.component(0) != lowest.scale(&weight_action(&a, h)?) {
                return Err(Error::SpotCheck(format!("zero mode of {a:?} disagrees with the quotient action")));
            }
        }
    }
    let graded_dimensions = (0..=depth).map(|d| module.basis_at_degree(d).len()).collect();
    Ok(TruncatedModule { module, depth, graded_dimensions })
}

// the zero mode of a acts on the lowest vector through its class at t = h
fn weight_action(a: &ModuleElement, h: &Rational) -> Result<Rational> {
    let poly = crate::zhumod::vacuum_poly(a)?;
    Ok(poly.eval(h))
}
