use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use super::poly::{AVModule, NormalForm, Poly, Poly2};
use super::products::{conformal_relations, o_span_generators};
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::exactla::{int, span_membership, to_dense, Echelon, Matrix, PivotRule, Rational, SparseVec};
use crate::virasoro::{apply_virasoro, ModuleElement, ModuleId, ModuleKind, Pbw};

/// Tuning for the linear-algebra quotient path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceConfig {
    /// Degree window of the truncated quotient; `None` picks the smallest
    /// window that contains the spanning family needed for the input.
    pub window: Option<u32>,
    /// Cap passed to [`o_span_generators`] for the extra residue relations.
    pub general_cap: u32,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig { window: None, general_cap: 3 }
    }
}

/// The span of known `O(M)` relations inside `M(0) + ... + M(window)`, in
/// reduced echelon form.
pub struct QuotientOracle {
    module: ModuleId,
    window: u32,
    columns: Vec<Pbw>,
    index: HashMap<Pbw, usize>,
    echelon: Echelon,
    generators: usize,
}

impl QuotientOracle {
    pub fn new(module: &ModuleId, window: u32, general_cap: u32) -> Self {
        // within a degree, larger leading parts come last so they are pivoted first
        let columns: Vec<Pbw> =
            (0..=window).flat_map(|d| module.basis_at_degree(d).into_iter().rev()).collect();
        let index: HashMap<Pbw, usize> = columns.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut gens = conformal_relations(module, window);
        gens.extend(o_span_generators(module, general_cap).into_iter().filter(|g| g.max_degree() <= window));
        let echelon = Echelon::new(columns.len()).with_rule(PivotRule::LastColumn);
        let generators = gens.len();
        let mut oracle = QuotientOracle { module: module.clone(), window, columns, index, echelon, generators };
        for g in &gens {
            let v = oracle.vector(g).expect("generators lie in the window");
            oracle.echelon.insert(v);
        }
        oracle
    }

    /// Process-wide instance keyed by module, window and cap.
    pub fn shared(module: &ModuleId, window: u32, general_cap: u32) -> Arc<QuotientOracle> {
        static ORACLES: OnceLock<Cache<(ModuleId, u32, u32), QuotientOracle>> = OnceLock::new();
        ORACLES
            .get_or_init(Cache::new)
            .get_or((module.clone(), window, general_cap), || QuotientOracle::new(module, window, general_cap))
    }

    pub fn module(&self) -> &ModuleId {
        &self.module
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Dimension of the truncated quotient.
    pub fn quotient_dimension(&self) -> usize {
        self.columns.len() - self.echelon.rank()
    }

    fn vector(&self, u: &ModuleElement) -> Result<SparseVec> {
        if *u.module() != self.module {
            return Err(Error::ModuleMismatch(format!("{:?} vs oracle for {:?}", u.module(), self.module)));
        }
        let mut v: SparseVec = Vec::with_capacity(u.terms().len());
        for (m, x) in u.terms() {
            let &c = self.index.get(m).ok_or_else(|| {
                Error::Truncation(format!("degree {} exceeds quotient window {}", m.degree(), self.window))
            })?;
            v.push((c, x.clone()));
        }
        v.sort_by_key(|(c, _)| *c);
        Ok(v)
    }

    /// Remainder of `u` modulo the relation span.
    pub fn reduce(&self, u: &ModuleElement) -> Result<SparseVec> {
        Ok(self.echelon.reduce(&self.vector(u)?))
    }

    pub fn contains(&self, u: &ModuleElement) -> Result<bool> {
        Ok(self.reduce(u)?.is_empty())
    }

    /// Coefficients expressing `u` modulo the relations in terms of `family`.
    /// The family must stay independent in the quotient.
    pub fn express(&self, u: &ModuleElement, family: &[ModuleElement]) -> Result<Vec<Rational>> {
        let n = self.columns.len();
        let reduced: Vec<SparseVec> = family.iter().map(|f| self.reduce(f)).collect::<Result<_>>()?;
        let mut independent = Echelon::new(n);
        for r in &reduced {
            if independent.insert(r.clone()).is_none() {
                return Err(Error::Inconsistent(
                    "spanning family became dependent modulo the relations".into(),
                ));
            }
        }
        let target = to_dense(&self.reduce(u)?, n);
        let gens: Vec<Vec<Rational>> = reduced.iter().map(|r| to_dense(r, n)).collect();
        span_membership(&target, &gens)?.ok_or_else(|| {
            Error::Singular(format!("element is not expressible in the quotient at window {}", self.window))
        })
    }
}

fn vacuum_family(c: &Rational, top: u32) -> Arc<Vec<ModuleElement>> {
    static FAMILIES: OnceLock<Cache<(Rational, u32), Vec<ModuleElement>>> = OnceLock::new();
    FAMILIES.get_or_init(Cache::new).get_or((c.clone(), top), || {
        let vac = ModuleId::vacuum(c.clone());
        let mut out = vec![ModuleElement::lowest(&vac)];
        for _ in 0..top {
            out.push(shift(out.last().expect("nonempty"), &[(-2, int(1)), (-1, int(1))]));
        }
        out
    })
}

fn shift(u: &ModuleElement, ops: &[(i64, Rational)]) -> ModuleElement {
    let mut out = ModuleElement::zero(u.module());
    for (n, x) in ops {
        out.add_scaled(&apply_virasoro(*n, u), x).expect("same module");
    }
    out
}

/// `(L(-2)+2L(-1)+L(0))^m (L(-2)+L(-1))^n v_h` for `m + n <= top`, keyed by `(m, n)`.
pub fn verma_family(module: &ModuleId, top: u32) -> Vec<((u32, u32), ModuleElement)> {
    static FAMILIES: OnceLock<Cache<(ModuleId, u32), Vec<((u32, u32), ModuleElement)>>> = OnceLock::new();
    let cached = FAMILIES.get_or_init(Cache::new).get_or((module.clone(), top), || {
        let second = [(-2, int(1)), (-1, int(1))];
        let first = [(-2, int(1)), (-1, int(2)), (0, int(1))];
        let mut out = Vec::new();
        let mut y = ModuleElement::lowest(module);
        for n in 0..=top {
            let mut x = y.clone();
            for m in 0..=(top - n) {
                out.push(((m, n), x.clone()));
                x = shift(&x, &first);
            }
            y = shift(&y, &second);
        }
        out
    });
    cached.as_ref().clone()
}

fn require(u: &ModuleElement, kind: ModuleKind) -> Result<()> {
    if u.module().kind() != kind {
        return Err(Error::ModuleMismatch(format!("expected a {} element, got {:?}", kind.as_str(), u.module())));
    }
    Ok(())
}

type L2Powers = BTreeMap<u32, Rational>;

fn add_powers(acc: &mut L2Powers, other: &L2Powers, s: &Rational) {
    for (j, x) in other {
        let e = acc.entry(*j).or_insert_with(Rational::zero);
        *e += x * s;
    }
    acc.retain(|_, x| !x.is_zero());
}

// L(-n)w = -2 L(-n+1)w - L(-n+2)w modulo O(M_c) for n >= 3; repeated until
// only powers of L(-2) remain.
fn rewrite_monomial(vac: &ModuleId, m: &Pbw) -> Arc<L2Powers> {
    static REWRITES: OnceLock<Cache<(Rational, Pbw), L2Powers>> = OnceLock::new();
    if m.parts().iter().all(|&p| p == 2) {
        return Arc::new(BTreeMap::from([(m.len() as u32, Rational::one())]));
    }
    REWRITES.get_or_init(Cache::new).get_or((vac.c().clone(), m.clone()), || {
        let lead = m.parts()[0] as i64;
        let w = ModuleElement::monomial(vac, m.tail());
        let mut out = L2Powers::new();
        add_powers(&mut out, &rewrite_terms(&apply_virasoro(1 - lead, &w)), &int(-2));
        add_powers(&mut out, &rewrite_terms(&apply_virasoro(2 - lead, &w)), &int(-1));
        out
    })
}

fn rewrite_terms(u: &ModuleElement) -> L2Powers {
    let mut out = L2Powers::new();
    for (m, x) in u.terms() {
        add_powers(&mut out, &rewrite_monomial(u.module(), m), x);
    }
    out
}

/// Class in the vacuum quotient by relation rewriting alone.
pub fn reduce_vacuum_rewriting(u: &ModuleElement) -> Result<Poly> {
    require(u, ModuleKind::Vacuum)?;
    let mut rest = rewrite_terms(u);
    let top = rest.keys().next_back().copied().unwrap_or(0);
    let family = vacuum_family(u.module().c(), top);
    let mut poly = Poly::zero();
    // the family image rewrites to L(-2)^n plus lower powers, so peel from the top
    while let Some((&j, x)) = rest.iter().next_back() {
        let x = x.clone();
        let image = rewrite_terms(&family[j as usize]);
        debug_assert_eq!(image.get(&j), Some(&Rational::one()));
        add_powers(&mut rest, &image, &-x.clone());
        poly.add_term(j, x);
    }
    Ok(poly)
}

/// Class in the vacuum quotient by the truncated linear-algebra oracle.
pub fn reduce_vacuum_oracle(u: &ModuleElement, config: &ReduceConfig) -> Result<Poly> {
    require(u, ModuleKind::Vacuum)?;
    let window = config.window.unwrap_or_else(|| u.max_degree().max(2));
    let oracle = QuotientOracle::shared(u.module(), window, config.general_cap);
    let family = vacuum_family(u.module().c(), window / 2);
    let coeffs = oracle.express(u, &family)?;
    Ok(Poly::from_coeffs(coeffs.into_iter().enumerate().map(|(n, x)| (n as u32, x))))
}

/// Class of `u` in the vacuum quotient as a polynomial in `t`; both paths
/// must agree.
pub fn reduce_vacuum(u: &ModuleElement) -> Result<NormalForm> {
    reduce_vacuum_with(u, &ReduceConfig::default())
}

pub fn reduce_vacuum_with(u: &ModuleElement, config: &ReduceConfig) -> Result<NormalForm> {
    let rewritten = reduce_vacuum_rewriting(u)?;
    let oracle = reduce_vacuum_oracle(u, config)?;
    if rewritten != oracle {
        return Err(Error::Inconsistent(format!("rewriting gives {rewritten:?}, oracle gives {oracle:?}")));
    }
    Ok(NormalForm::VacuumPoly(rewritten))
}

/// [`reduce_vacuum`] unwrapped to its polynomial.
pub fn vacuum_poly(u: &ModuleElement) -> Result<Poly> {
    match reduce_vacuum(u)? {
        NormalForm::VacuumPoly(p) => Ok(p),
        NormalForm::VermaPoly(_) => unreachable!("vacuum reduction yields a univariate polynomial"),
    }
}

/// Class of `u` in the Verma quotient as a polynomial in `t1, t2`.
pub fn reduce_verma(u: &ModuleElement) -> Result<NormalForm> {
    reduce_verma_with(u, &ReduceConfig::default())
}

pub fn reduce_verma_with(u: &ModuleElement, config: &ReduceConfig) -> Result<NormalForm> {
    Ok(NormalForm::VermaPoly(verma_poly_with(u, config)?))
}

pub fn verma_poly(u: &ModuleElement) -> Result<Poly2> {
    verma_poly_with(u, &ReduceConfig::default())
}

pub fn verma_poly_with(u: &ModuleElement, config: &ReduceConfig) -> Result<Poly2> {
    require(u, ModuleKind::Verma)?;
    let window = config.window.unwrap_or_else(|| (2 * u.max_degree()).max(2));
    let oracle = QuotientOracle::shared(u.module(), window, config.general_cap);
    let family = verma_family(u.module(), window / 2);
    let elements: Vec<ModuleElement> = family.iter().map(|(_, e)| e.clone()).collect();
    let coeffs = oracle.express(u, &elements)?;
    Ok(Poly2::from_coeffs(family.iter().map(|(k, _)| *k).zip(coeffs)))
}

/// Action of `a` on a module over the polynomial ring.
pub fn o_matrix(a: &ModuleElement, module: &AVModule) -> Result<Matrix> {
    vacuum_poly(a)?.eval_matrix(module.t_action())
}
