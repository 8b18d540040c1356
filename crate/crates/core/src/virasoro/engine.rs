use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use super::element::{add_scaled, add_term, DualElement, ModuleElement, ModuleId, ModuleKind, Terms};
use super::pbw::Pbw;
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::exactla::{binomial, int, sign, Rational};

/// Virasoro action and vertex-operator modes on one module, with memoized
/// monomial-level results. Safe to share across threads.
pub struct VirasoroModule {
    id: ModuleId,
    action: Cache<(i64, Pbw), Terms>,
    dual_columns: Cache<(i64, u32), HashMap<Pbw, Terms>>,
    modes: Cache<(Pbw, i64, Pbw), Terms>,
}

static REGISTRY: OnceLock<RwLock<HashMap<ModuleId, Arc<VirasoroModule>>>> = OnceLock::new();

impl VirasoroModule {
    pub fn new(id: ModuleId) -> Self {
        VirasoroModule { id, action: Cache::new(), dual_columns: Cache::new(), modes: Cache::new() }
    }

    /// Process-wide instance for `id`, so caches are reused between callers.
    pub fn shared(id: &ModuleId) -> Arc<VirasoroModule> {
        let reg = REGISTRY.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(m) = reg.read().expect("registry lock").get(id) {
            return Arc::clone(m);
        }
        let mut w = reg.write().expect("registry lock");
        Arc::clone(w.entry(id.clone()).or_insert_with(|| Arc::new(VirasoroModule::new(id.clone()))))
    }

    pub fn id(&self) -> &ModuleId {
        &self.id
    }

    pub fn cached_entries(&self) -> usize {
        self.action.len() + self.dual_columns.len() + self.modes.len()
    }

    /// `L(n)` applied to a single PBW monomial of this module.
    pub fn act_monomial(&self, n: i64, m: &Pbw) -> Arc<Terms> {
        match self.id.kind() {
            ModuleKind::DualVerma => self.dual_act(n, m),
            _ => self.action.get_or((n, m.clone()), || self.straighten(n, m)),
        }
    }

    fn straighten(&self, n: i64, m: &Pbw) -> Terms {
        let mut out = Terms::new();
        let vacuum = self.id.kind() == ModuleKind::Vacuum;
        let Some(&first) = m.parts().first() else {
            match n {
                0 => add_term(&mut out, Pbw::empty(), self.id.h().clone()),
                n if n < 0 && !(vacuum && n == -1) => {
                    add_term(&mut out, Pbw::from_sorted(vec![(-n) as u32]), Rational::one())
                }
                _ => {}
            }
            return out;
        };
        if -n >= first as i64 {
            out.insert(m.prepend((-n) as u32), Rational::one());
            return out;
        }
        // L(n) L(p) w = L(p) L(n) w + (n - p) L(n + p) w + central term, with p = -first.
        let p = -(first as i64);
        let rest = m.tail();
        for (q, x) in self.act_monomial(n, &rest).iter() {
            add_scaled(&mut out, &self.act_monomial(p, q), x);
        }
        add_scaled(&mut out, &self.act_monomial(n + p, &rest), &int(n - p));
        if n + p == 0 {
            let central = Rational::new((n * n * n - n).into(), 12.into()) * self.id.c();
            add_term(&mut out, rest, central);
        }
        out
    }

    fn dual_act(&self, n: i64, m: &Pbw) -> Arc<Terms> {
        let d = m.degree() as i64;
        if d - n < 0 {
            return Arc::new(Terms::new());
        }
        let cols = self.dual_columns.get_or((n, m.degree()), || {
            let verma = VirasoroModule::shared(&self.id.underlying_verma());
            let mut cols: HashMap<Pbw, Terms> = HashMap::new();
            for b in self.id.basis_at_degree((d - n) as u32) {
                for (target, x) in verma.act_monomial(-n, &b).iter() {
                    add_term(cols.entry(target.clone()).or_default(), b.clone(), x.clone());
                }
            }
            cols
        });
        Arc::new(cols.get(m).cloned().unwrap_or_default())
    }

    pub fn act_terms(&self, n: i64, terms: &Terms) -> Terms {
        let mut out = Terms::new();
        for (m, x) in terms {
            add_scaled(&mut out, &self.act_monomial(n, m), x);
        }
        out
    }

    /// `L(n) u`.
    pub fn apply(&self, n: i64, u: &ModuleElement) -> Result<ModuleElement> {
        self.check_module(u.module())?;
        Ok(ModuleElement::from_raw(&self.id, self.act_terms(n, u.terms())))
    }

    fn check_module(&self, other: &ModuleId) -> Result<()> {
        if *other != self.id {
            return Err(Error::ModuleMismatch(format!("{other:?} used with engine for {:?}", self.id)));
        }
        Ok(())
    }

    /// `a_k q` for a vacuum PBW monomial `a` and a monomial `q` of this module.
    pub fn mode_monomial(&self, a: &Pbw, k: i64, q: &Pbw) -> Arc<Terms> {
        let wt = a.degree() as i64;
        if k >= wt + q.degree() as i64 {
            return Arc::new(Terms::new());
        }
        if a.is_empty() {
            let mut out = Terms::new();
            if k == -1 {
                out.insert(q.clone(), Rational::one());
            }
            return Arc::new(out);
        }
        if a.parts() == [2] {
            return self.act_monomial(k - 1, q);
        }
        self.modes.get_or((a.clone(), k, q.clone()), || self.mode_recursion(a, k, q))
    }

    // a = ω_l b with l = 1 - (leading part); expand (ω_l b)_k q by the
    // associator form of the Jacobi identity.
    fn mode_recursion(&self, a: &Pbw, k: i64, q: &Pbw) -> Terms {
        let l = 1 - a.parts()[0] as i64;
        let b = a.tail();
        let wt_b = b.degree() as i64;
        let deg_q = q.degree() as i64;
        let mut out = Terms::new();
        let first_top = wt_b - k - 1 + deg_q;
        for i in 0..=first_top.max(-1) {
            let coeff = binomial(l, i as u64) * int(sign(i));
            let inner = self.mode_monomial(&b, k + i, q);
            if inner.is_empty() {
                continue;
            }
            add_scaled(&mut out, &self.act_terms(l - i - 1, &inner), &coeff);
        }
        for i in 0..=(1 + deg_q) {
            let coeff = binomial(l, i as u64) * int(-sign(l) * sign(i));
            let inner = self.act_monomial(i - 1, q);
            for (r, x) in inner.iter() {
                add_scaled(&mut out, &self.mode_monomial(&b, l + k - i, r), &(&coeff * x));
            }
        }
        out
    }

    /// `a_k u` for a homogeneous vacuum element `a`.
    pub fn state_mode(&self, a: &ModuleElement, k: i64, u: &ModuleElement) -> Result<ModuleElement> {
        check_vacuum_state(a, &self.id)?;
        self.check_module(u.module())?;
        let mut out = Terms::new();
        for (am, ax) in a.terms() {
            for (q, qx) in u.terms() {
                add_scaled(&mut out, &self.mode_monomial(am, k, q), &(ax * qx));
            }
        }
        Ok(ModuleElement::from_raw(&self.id, out))
    }
}

pub(crate) fn check_vacuum_state(a: &ModuleElement, target: &ModuleId) -> Result<u32> {
    if a.module().kind() != ModuleKind::Vacuum {
        return Err(Error::ModuleMismatch("state must live in the vacuum module".into()));
    }
    if a.module().c() != target.c() {
        return Err(Error::ModuleMismatch("central charges differ".into()));
    }
    a.homogeneous_degree()
}

pub fn basis_at_degree(m: &ModuleId, d: u32) -> Vec<Pbw> {
    m.basis_at_degree(d)
}

pub fn apply_virasoro(n: i64, u: &ModuleElement) -> ModuleElement {
    let engine = VirasoroModule::shared(u.module());
    ModuleElement::from_raw(u.module(), engine.act_terms(n, u.terms()))
}

pub fn state_mode(a: &ModuleElement, k: i64, u: &ModuleElement) -> Result<ModuleElement> {
    VirasoroModule::shared(u.module()).state_mode(a, k, u)
}

/// Evaluates a functional on a Verma-module element.
pub fn pairing(f: &DualElement, u: &ModuleElement) -> Result<Rational> {
    pair_elements(&f.to_element()?, u)
}

/// As [`pairing`], with the functional given as a dual-module element.
pub fn pair_elements(f: &ModuleElement, u: &ModuleElement) -> Result<Rational> {
    let (fm, um) = (f.module(), u.module());
    if fm.kind() != ModuleKind::DualVerma || um.kind() != ModuleKind::Verma {
        return Err(Error::ModuleMismatch("pairing needs a dual Verma and a Verma element".into()));
    }
    if fm.c() != um.c() || fm.h() != um.h() {
        return Err(Error::ModuleMismatch(format!("{fm:?} paired with {um:?}")));
    }
    Ok(f.terms()
        .iter()
        .filter_map(|(m, x)| u.terms().get(m).map(|y| x * y))
        .fold(Rational::zero(), |acc, t| acc + t))
}
