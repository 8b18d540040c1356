use rayon::prelude::*;

use crate::error::Result;
use crate::exactla::{binomial, int};
use crate::virasoro::{apply_virasoro, check_vacuum_state, ModuleElement, ModuleId, VirasoroModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `sum_i binom(power, i) a_{k+i} u`, i.e. the residue of
/// `x^k (1+x)^power Y(a, x) u`. Terminates by lower truncation.
fn weighted_modes(a: &ModuleElement, u: &ModuleElement, power: i64, k: i64) -> Result<ModuleElement> {
    let wt = check_vacuum_state(a, u.module())? as i64;
    let engine = VirasoroModule::shared(u.module());
    let top = wt + u.max_degree() as i64 - k;
    let mut out = ModuleElement::zero(u.module());
    for i in 0..=top.max(-1) {
        let b = binomial(power, i as u64);
        if num_traits::Zero::is_zero(&b) {
            continue;
        }
        out.add_scaled(&engine.state_mode(a, k + i, u)?, &b)?;
    }
    Ok(out)
}

/// `a o u`.
pub fn circle(a: &ModuleElement, u: &ModuleElement) -> Result<ModuleElement> {
    let wt = a.homogeneous_degree()? as i64;
    weighted_modes(a, u, wt, -2)
}

/// `a * u` (left) or `u * a` (right).
pub fn star(a: &ModuleElement, u: &ModuleElement, side: Side) -> Result<ModuleElement> {
    let wt = a.homogeneous_degree()? as i64;
    match side {
        Side::Left => weighted_modes(a, u, wt, -1),
        Side::Right => weighted_modes(a, u, wt - 1, -1),
    }
}

/// Residue of `x^k (1+x)^{wt a} Y(a, x) u`; lies in `O(M)` for `k <= -2`.
pub fn residue_element(a: &ModuleElement, u: &ModuleElement, k: i64) -> Result<ModuleElement> {
    let wt = a.homogeneous_degree()? as i64;
    weighted_modes(a, u, wt, k)
}

/// `L(k-1)u + 2L(k)u + L(k+1)u`, the conformal-vector case of [`residue_element`].
pub fn conformal_relation(u: &ModuleElement, k: i64) -> ModuleElement {
    let mut out = apply_virasoro(k - 1, u);
    out.add_scaled(&apply_virasoro(k, u), &int(2)).expect("same module");
    out.add_scaled(&apply_virasoro(k + 1, u), &int(1)).expect("same module");
    out
}

fn basis_up_to(m: &ModuleId, cap: u32) -> Vec<ModuleElement> {
    (0..=cap).flat_map(|d| m.basis_at_degree(d)).map(|p| ModuleElement::monomial(m, p)).collect()
}

/// Residue generators of `O(M)`: `a` a vacuum basis vector of weight
/// `1..=cap`, `u` a basis vector of degree `<= cap`, `-cap <= k <= -2`.
/// Generators reaching beyond degree `2 cap + 1` are dropped, as are zeros.
pub fn o_span_generators(m: &ModuleId, cap: u32) -> Vec<ModuleElement> {
    let vac = ModuleId::vacuum(m.c().clone());
    let states: Vec<ModuleElement> = basis_up_to(&vac, cap).into_iter().filter(|a| a.max_degree() >= 1).collect();
    let vectors = basis_up_to(m, cap);
    let limit = 2 * cap + 1;
    let jobs: Vec<(usize, usize, i64)> = (0..states.len())
        .flat_map(|i| (0..vectors.len()).flat_map(move |j| (-(cap as i64)..=-2).map(move |k| (i, j, k))))
        .collect();
    jobs.par_iter()
        .filter_map(|&(i, j, k)| {
            let (a, u) = (&states[i], &vectors[j]);
            let top = a.max_degree() as i64 + u.max_degree() as i64 - k - 1;
            if top > limit as i64 {
                return None;
            }
            let g = residue_element(a, u, k).expect("basis states are homogeneous");
            (!g.is_zero()).then_some(g)
        })
        .collect()
}

/// Conformal-vector relations for every basis vector whose relation stays
/// within degree `window`.
pub fn conformal_relations(m: &ModuleId, window: u32) -> Vec<ModuleElement> {
    let jobs: Vec<(ModuleElement, i64)> = basis_up_to(m, window)
        .into_iter()
        .flat_map(|u| {
            let e = u.max_degree() as i64;
            (e + 1 - window as i64..=-2).map(move |k| (u.clone(), k))
        })
        .collect();
    jobs.par_iter().map(|(u, k)| conformal_relation(u, *k)).filter(|g| !g.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{frac, Rational};
    use crate::virasoro::{omega, vacuum_vector, word};

    fn el(m: &ModuleId, t: &[(&[u32], i64)]) -> ModuleElement {
        let v: Vec<(&[u32], Rational)> = t.iter().map(|(p, x)| (*p, int(*x))).collect();
        ModuleElement::from_parts(m, &v).unwrap()
    }

    #[test]
    fn circle_examples() {
        let c = frac(1, 2);
        let vac = ModuleId::vacuum(c.clone());
        let w = omega(&c);
        assert_eq!(circle(&w, &vacuum_vector(&c)).unwrap(), el(&vac, &[(&[3], 1), (&[2], 2)]));
        let v = ModuleId::verma(c.clone(), frac(1, 16));
        let vh = ModuleElement::lowest(&v);
        assert_eq!(circle(&w, &vh).unwrap(), el(&v, &[(&[3], 1), (&[2], 2), (&[1], 1)]));
        for u in [vh.clone(), word(&v, &[-2, -1])] {
            assert!(circle(&vacuum_vector(&c), &u).unwrap().is_zero());
        }
    }

    #[test]
    fn star_examples() {
        let c = int(1);
        let h = frac(1, 3);
        let v = ModuleId::verma(c.clone(), h.clone());
        let vh = ModuleElement::lowest(&v);
        let w = omega(&c);
        let u = word(&v, &[-3, -1]);
        assert_eq!(star(&vacuum_vector(&c), &u, Side::Left).unwrap(), u);
        assert_eq!(star(&vacuum_vector(&c), &u, Side::Right).unwrap(), u);
        let mut expected = el(&v, &[(&[2], 1), (&[1], 2)]);
        expected.add_scaled(&vh, &h).unwrap();
        assert_eq!(star(&w, &vh, Side::Left).unwrap(), expected);
        assert_eq!(star(&w, &vh, Side::Right).unwrap(), el(&v, &[(&[2], 1), (&[1], 1)]));
    }

    #[test]
    fn generators() {
        let c = frac(1, 2);
        let vac = ModuleId::vacuum(c.clone());
        assert!(o_span_generators(&vac, 0).is_empty());
        let g = o_span_generators(&vac, 2);
        assert!(g.contains(&el(&vac, &[(&[3], 1), (&[2], 2)])));
        let v = ModuleId::verma(c, frac(1, 16));
        let g = o_span_generators(&v, 2);
        assert!(g.contains(&el(&v, &[(&[3], 1), (&[2], 2), (&[1], 1)])));
        assert!(g.iter().all(|x| x.max_degree() <= 5));
    }

    #[test]
    fn conformal_case_of_residue() {
        let c = frac(26, 27);
        let v = ModuleId::verma(c.clone(), frac(5, 7));
        let u = word(&v, &[-2, -1]);
        for k in -5..=-2 {
            assert_eq!(residue_element(&omega(&c), &u, k).unwrap(), conformal_relation(&u, k));
        }
    }
}
