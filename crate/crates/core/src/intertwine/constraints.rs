use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::family::{Layout, Params};
use crate::exactla::{binomial, collect_sparse, int, sign, Echelon, Rational, SparseVec};
use crate::virasoro::{Pbw, VirasoroModule};

/// One instance of the Jacobi identity in mode form: state `a`, basis vectors
/// `u`, `v` of the first and second module, and mode indices `(l, m, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub a: Pbw,
    pub u: Pbw,
    pub v: Pbw,
    pub l: i64,
    pub m: i64,
    pub n: i64,
}

impl Instance {
    /// Degree of the target component every term lands in.
    pub fn target_degree(&self) -> i64 {
        (self.a.degree() + self.u.degree() + self.v.degree()) as i64 - self.l - self.m - self.n - 2
    }

    pub fn to_json(&self) -> Value {
        json!({"a": self.a.parts(), "u": self.u.parts(), "v": self.v.parts(), "l": self.l, "m": self.m, "n": self.n})
    }
}

/// Where a constraint row came from: the instance and the target basis
/// vector whose coefficient it equates. Pins carry no instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Identity { instance: Instance, component: Pbw },
    Pin { u: Pbw },
}

#[derive(Clone, Debug)]
pub struct ConstraintRow {
    pub provenance: Provenance,
    pub entries: SparseVec,
}

/// Linear conditions on the entries of a truncated mode family.
///
/// Rows are streamed into an echelon form as they are generated; only rows
/// that raised the rank are retained (with provenance), alongside counts of
/// everything emitted.
pub struct ConstraintSystem {
    layout: Arc<Layout>,
    weight_cap: u32,
    instances: usize,
    emitted: usize,
    emitted_by_state: BTreeMap<Pbw, usize>,
    basis_rows: Vec<ConstraintRow>,
    echelon: Echelon,
}

impl ConstraintSystem {
    pub fn new(layout: Arc<Layout>, weight_cap: u32) -> Self {
        let echelon = Echelon::new(layout.unknowns());
        ConstraintSystem {
            layout,
            weight_cap,
            instances: 0,
            emitted: 0,
            emitted_by_state: BTreeMap::new(),
            basis_rows: Vec::new(),
            echelon,
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn params(&self) -> &Params {
        self.layout.params()
    }

    pub fn depth(&self) -> u32 {
        self.layout.depth()
    }

    pub fn weight_cap(&self) -> u32 {
        self.weight_cap
    }

    pub fn unknowns(&self) -> usize {
        self.layout.unknowns()
    }

    /// Number of nonzero rows emitted, pins included.
    pub fn rows(&self) -> usize {
        self.emitted
    }

    /// Number of interior instances that were expanded.
    pub fn instances(&self) -> usize {
        self.instances
    }

    /// Nonzero rows emitted per state `a`.
    pub fn rows_for_state(&self, a: &Pbw) -> usize {
        self.emitted_by_state.get(a).copied().unwrap_or(0)
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// A maximal independent subset of the emitted rows.
    pub fn basis_rows(&self) -> &[ConstraintRow] {
        &self.basis_rows
    }

    pub(crate) fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn push(&mut self, row: ConstraintRow) {
        if row.entries.is_empty() {
            return;
        }
        self.emitted += 1;
        if let Provenance::Identity { instance, .. } = &row.provenance {
            *self.emitted_by_state.entry(instance.a.clone()).or_default() += 1;
        }
        if self.echelon.insert(row.entries.clone()).is_some() {
            self.basis_rows.push(row);
        }
    }

    /// Forces every degree-zero block `Phi(u; deg u - 1)` on `W2(0)` to vanish.
    pub fn pin_degree_zero_blocks(&mut self) {
        let empty = Pbw::empty();
        let us: Vec<Pbw> = self.layout.w1.all().cloned().collect();
        for u in us {
            let col = self.layout.column(&u, &empty, &empty).expect("degree-zero block is in the window");
            self.push(ConstraintRow { provenance: Provenance::Pin { u }, entries: vec![(col, Rational::one())] });
        }
    }
}

/// Every `(a, u, v, l, m, n)` in the degree box around the window. Instances
/// outside this box reference an out-of-window block through a term that is
/// nonzero for generic parameters.
pub fn candidate_instances(layout: &Layout, weight_cap: u32) -> Vec<Instance> {
    let vac = layout.params().vacuum();
    let d = layout.depth() as i64;
    let states: Vec<Pbw> = (0..=weight_cap).flat_map(|w| vac.basis_at_degree(w)).collect();
    let mut out = Vec::new();
    for a in &states {
        let wa = a.degree() as i64;
        for u in layout.w1.all() {
            let du = u.degree() as i64;
            for v in layout.w2.all() {
                let dv = v.degree() as i64;
                let (l_lo, m_lo, n_lo) = (wa + du - 1 - d, wa + dv - 1 - d, du + dv - 1 - d);
                let s_max = wa + du + dv - 2;
                for l in l_lo..=(s_max - m_lo - n_lo) {
                    for m in m_lo..=(s_max - l - n_lo) {
                        for t in 0..=d {
                            let n = s_max - t - l - m;
                            if n >= n_lo {
                                out.push(Instance { a: a.clone(), u: u.clone(), v: v.clone(), l, m, n });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

struct Engines {
    first: Arc<VirasoroModule>,
    second: Arc<VirasoroModule>,
    target: Arc<VirasoroModule>,
}

impl Engines {
    fn new(p: &Params) -> Self {
        Engines {
            first: VirasoroModule::shared(&p.first()),
            second: VirasoroModule::shared(&p.second()),
            target: VirasoroModule::shared(&p.target()),
        }
    }
}

/// Rows for one instance, one per target basis vector, or `None` when a
/// nonzero term touches a block outside the window.
pub fn instance_rows(layout: &Layout, inst: &Instance) -> Option<Vec<(Pbw, SparseVec)>> {
    instance_rows_with(layout, &Engines::new(layout.params()), inst)
}

fn instance_rows_with(layout: &Layout, eng: &Engines, inst: &Instance) -> Option<Vec<(Pbw, SparseVec)>> {
    let Instance { a, u, v, l, m, n } = inst;
    let (l, m, n) = (*l, *m, *n);
    let t = inst.target_degree();
    if !layout.in_window(t) {
        return None;
    }
    let (wa, du, dv) = (a.degree() as i64, u.degree() as i64, v.degree() as i64);
    let targets = layout.w3.at(t as u32);
    let mut acc: BTreeMap<Pbw, Vec<(usize, Rational)>> = BTreeMap::new();

    // sum_i binom(m, i) Phi(a_{l+i} u; m+n-i) v
    for i in 0.. {
        let e = wa + du - l - i - 1;
        if e < 0 {
            break;
        }
        let b = binomial(m, i as u64);
        if b.is_zero() {
            continue;
        }
        let w = eng.first.mode_monomial(a, l + i, u);
        if w.is_empty() {
            continue;
        }
        if e > layout.depth() as i64 {
            return None;
        }
        for (wm, wx) in w.iter() {
            let coeff = &b * wx;
            for tau in targets {
                let col = layout.column(wm, v, tau)?;
                acc.entry(tau.clone()).or_default().push((col, coeff.clone()));
            }
        }
    }
    // - sum_i (-1)^i binom(l, i) a_{l+m-i} Phi(u; n+i) v
    for i in 0.. {
        let s = du + dv - n - i - 1;
        if s < 0 {
            break;
        }
        let b = binomial(l, i as u64) * int(sign(i));
        if b.is_zero() {
            if l >= 0 && i > l {
                break;
            }
            continue;
        }
        if s > layout.depth() as i64 {
            return None;
        }
        for sigma in layout.w3.at(s as u32) {
            let col = layout.column(u, v, sigma)?;
            for (tau, x) in eng.target.mode_monomial(a, l + m - i, sigma).iter() {
                acc.entry(tau.clone()).or_default().push((col, -(&b * x)));
            }
        }
    }
    // + (-1)^l sum_i (-1)^i binom(l, i) Phi(u; l+n-i) a_{m+i} v
    for i in 0.. {
        let r = wa + dv - m - i - 1;
        if r < 0 {
            break;
        }
        let b = binomial(l, i as u64) * int(sign(i) * sign(l));
        if b.is_zero() {
            if l >= 0 && i > l {
                break;
            }
            continue;
        }
        let w = eng.second.mode_monomial(a, m + i, v);
        if w.is_empty() {
            continue;
        }
        if r > layout.depth() as i64 {
            return None;
        }
        for (vm, vx) in w.iter() {
            let coeff = &b * vx;
            for tau in targets {
                let col = layout.column(u, vm, tau)?;
                acc.entry(tau.clone()).or_default().push((col, coeff.clone()));
            }
        }
    }
    Some(
        acc.into_iter()
            .map(|(tau, entries)| (tau, collect_sparse(entries)))
            .filter(|(_, row)| !row.is_empty())
            .collect(),
    )
}

/// Emits every interior instance for states of weight at most `weight_cap`.
pub fn build_constraints(params: &Params, depth: u32, weight_cap: u32) -> ConstraintSystem {
    let layout = Arc::new(Layout::new(params, depth));
    let mut system = ConstraintSystem::new(Arc::clone(&layout), weight_cap);
    let engines = Engines::new(params);
    let candidates = candidate_instances(&layout, weight_cap);
    for chunk in candidates.chunks(4096) {
        let produced: Vec<(Instance, Vec<(Pbw, SparseVec)>)> = chunk
            .par_iter()
            .filter_map(|inst| instance_rows_with(&layout, &engines, inst).map(|rows| (inst.clone(), rows)))
            .collect();
        for (instance, rows) in produced {
            system.instances += 1;
            for (component, entries) in rows {
                system.push(ConstraintRow {
                    provenance: Provenance::Identity { instance: instance.clone(), component },
                    entries,
                });
            }
        }
    }
    system
}
