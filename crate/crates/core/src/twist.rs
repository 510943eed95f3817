//! Convolution dg Lie algebras, Maurer–Cartan elements, outer actions and
//! twisted semi-direct products.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap as HashMap;

use crate::ce::CeComplex;
use crate::dgla::{
    remap, sum_space, Cover, Defect, DefectKind, DgLie, DgLieBuilder, DgLieMorphism, LcsClass, ValidationReport,
};
use crate::error::{Error, Result};
use crate::exactla::{self, LinComb, Vector};
use crate::freelie::{Classifier, ClassifierPart};
use crate::graded::{BasisElement, GradedMap, GradedSpace, Window};
use crate::scalar::{koszul, Scalar};

type Entry<S> = ((usize, usize), Vector<S>);
type Column<S> = (Vec<Entry<S>>, Vector<S>);

/// A dg coalgebra with a chosen basis: enough structure to build `Hom(C, Π)`.
pub trait Coalgebra<S>: Sync {
    fn space(&self) -> &Arc<GradedSpace>;
    fn differential(&self) -> &GradedMap<S>;
    /// `Δ(e_i)` as `(left, right, coefficient)` triples.
    fn coproduct(&self, i: usize) -> &[(usize, usize, S)];
}

impl<S: Scalar> Coalgebra<S> for CeComplex<S> {
    fn space(&self) -> &Arc<GradedSpace> {
        CeComplex::space(self)
    }

    fn differential(&self) -> &GradedMap<S> {
        CeComplex::differential(self)
    }

    fn coproduct(&self, i: usize) -> &[(usize, usize, S)] {
        CeComplex::coproduct(self, i)
    }
}

/// A graded space with zero differential and every element primitive.
#[derive(Debug, Clone)]
pub struct TrivialCoalgebra<S> {
    space: Arc<GradedSpace>,
    differential: GradedMap<S>,
}

impl<S: Scalar> TrivialCoalgebra<S> {
    pub fn new(space: Arc<GradedSpace>) -> Self {
        let differential = GradedMap::zero(space.clone(), space.clone(), -1);
        TrivialCoalgebra { space, differential }
    }
}

impl<S: Scalar> Coalgebra<S> for TrivialCoalgebra<S> {
    fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    fn differential(&self) -> &GradedMap<S> {
        &self.differential
    }

    fn coproduct(&self, _: usize) -> &[(usize, usize, S)] {
        &[]
    }
}

/// A bounded, connected, nilpotent dg Lie algebra `Π`.
#[derive(Debug, Clone)]
pub struct StructureAlgebra<S> {
    algebra: Arc<DgLie<S>>,
    nilpotency: usize,
}

impl<S: Scalar> StructureAlgebra<S> {
    pub fn new(algebra: DgLie<S>) -> Result<Self> {
        let space = algebra.space();
        if !space.is_bounded() {
            return Err(Error::UnboundedStructureAlgebra);
        }
        if (0..space.total_dim()).any(|i| space.degree(i) < 1) {
            return Err(Error::NotConnected);
        }
        let report = algebra.validate();
        if let Some(d) = report.defects.first() {
            return Err(Error::InvalidDgLie(d.to_string()));
        }
        let top = space.occupied_degrees().max().unwrap_or(0);
        let k_max = top.max(0) as usize + 1;
        let mut nilpotency = 1;
        for n in space.occupied_degrees().collect::<Vec<_>>() {
            match algebra.lcs_class(n, k_max) {
                LcsClass::Class(k) => nilpotency = nilpotency.max(k),
                LcsClass::NotNilpotentWithin(k) => return Err(Error::NotNilpotent(k)),
            }
        }
        Ok(StructureAlgebra { algebra: Arc::new(algebra), nilpotency })
    }

    /// The abelian algebra on the given `(name, degree)` basis.
    pub fn abelian(elements: &[(String, i32)]) -> Result<Self> {
        let top = elements.iter().map(|e| e.1).max().unwrap_or(1).max(1);
        let space = GradedSpace::finite(
            Window::new(1, top)?,
            elements.iter().map(|(n, d)| BasisElement { name: n.clone(), degree: *d }),
        )?;
        StructureAlgebra::new(DgLie::abelian(Arc::new(space)))
    }

    pub fn algebra(&self) -> &Arc<DgLie<S>> {
        &self.algebra
    }

    /// Smallest `k` with `Γ^k Π = 0` in every degree.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    /// Highest degree with a nonzero element.
    pub fn top(&self) -> i32 {
        self.algebra.space().occupied_degrees().max().unwrap_or(0)
    }

    pub fn is_abelian(&self) -> bool {
        self.algebra.is_abelian() && (0..self.algebra.total_dim()).all(|i| self.algebra.differential_of(i).is_empty())
    }
}

/// `Hom(C, Π)` with basis the elementary maps `e_w^* ⊗ p` of degree `|p| - |w|`.
#[derive(Debug, Clone)]
pub struct Convolution<S> {
    source: Arc<GradedSpace>,
    structure: Arc<DgLie<S>>,
    entries: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    algebra: Arc<DgLie<S>>,
}

impl<S: Scalar> Convolution<S> {
    /// Degrees from `lo` up to the top of `Π`.
    pub fn new(c: &dyn Coalgebra<S>, pi: &StructureAlgebra<S>, lo: i32) -> Result<Self> {
        let cs = c.space().clone();
        let ps = pi.algebra().space().clone();
        let top = pi.top();
        let hi = top.max(lo);
        // Hom_n sees C up to degree top - n
        if !cs.knows(top - lo) {
            return Err(Error::WindowTooSmall(format!(
                "Hom in degree {lo} needs chains up to degree {}, window is {}",
                top - lo,
                cs.window()
            )));
        }
        let window = Window::new(lo, hi)?;
        let mut entries = Vec::new();
        let mut elements = Vec::new();
        for n in window.degrees() {
            for w in 0..cs.total_dim() {
                for p in ps.range(cs.degree(w) + n) {
                    entries.push((w, p));
                    elements.push(BasisElement { name: format!("hom({},{})", cs.name(w), ps.name(p)), degree: n });
                }
            }
        }
        let lo_exact = cs.hi_exact() && {
            let c_top = cs.occupied_degrees().max().unwrap_or(0);
            lo <= ps.window().lo - c_top
        };
        let space = Arc::new(GradedSpace::new(window, lo_exact, true, elements)?);
        let index: HashMap<(usize, usize), usize> = entries.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let pialg = pi.algebra();
        let mut b = DgLieBuilder::new(space.clone());

        // ∂f = d_Π f - (-1)^|f| f d_C
        let mut transpose: Vec<Vec<(usize, S)>> = vec![Vec::new(); cs.total_dim()];
        for w in 0..cs.total_dim() {
            for (u, c) in c.differential().column(w) {
                transpose[*u].push((w, c.clone()));
            }
        }
        for (k, &(u, p)) in entries.iter().enumerate() {
            let n = space.degree(k);
            if !window.contains(n - 1) {
                continue;
            }
            let mut acc = LinComb::new();
            for (q, c) in pialg.differential_of(p) {
                if let Some(&t) = index.get(&(u, *q)) {
                    acc.add(t, c.clone());
                }
            }
            let sign = -S::sign(n as i64);
            for (w, c) in &transpose[u] {
                if let Some(&t) = index.get(&(*w, p)) {
                    acc.add(t, c.mul_ref(&sign));
                }
            }
            b.set_differential(k, acc.into_vector())?;
        }

        // [f, g](w) = Σ (-1)^{|g||w'|} [f(w'), g(w'')]
        if !pialg.is_abelian() {
            let per_word: Vec<Vec<(usize, usize, usize, S)>> = (0..cs.total_dim())
                .into_par_iter()
                .map(|w| {
                    let mut out = Vec::new();
                    for (u, v, c) in c.coproduct(w) {
                        for p in 0..ps.total_dim() {
                            let Some(&f) = index.get(&(*u, p)) else {
                                continue;
                            };
                            for q in 0..ps.total_dim() {
                                let Some(&g) = index.get(&(*v, q)) else {
                                    continue;
                                };
                                if f > g {
                                    continue;
                                }
                                let sign = S::sign(space.degree(g) as i64 * cs.degree(*u) as i64);
                                for (r, x) in pialg.bracket_basis(p, q) {
                                    if let Some(&t) = index.get(&(w, r)) {
                                        out.push((f, g, t, c.mul_ref(&sign).mul_ref(&x)));
                                    }
                                }
                            }
                        }
                    }
                    out
                })
                .collect();
            let mut table: HashMap<(usize, usize), LinComb<S>> = HashMap::default();
            for (f, g, t, x) in per_word.into_iter().flatten() {
                table.entry((f, g)).or_default().add(t, x);
            }
            let mut keys: Vec<_> = table.keys().copied().collect();
            keys.sort_unstable();
            for key in keys {
                let v = table.remove(&key).expect("key").into_vector();
                if !v.is_empty() {
                    b.set_bracket(key.0, key.1, v)?;
                }
            }
        }
        Ok(Convolution { source: cs, structure: pialg.clone(), entries, index, algebra: Arc::new(b.build()) })
    }

    pub fn algebra(&self) -> &Arc<DgLie<S>> {
        &self.algebra
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.algebra.space()
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn structure(&self) -> &Arc<DgLie<S>> {
        &self.structure
    }

    /// `(source basis element, structure basis element)` of basis map `k`.
    pub fn entry(&self, k: usize) -> (usize, usize) {
        self.entries[k]
    }

    pub fn index_of(&self, source: usize, target: usize) -> Option<usize> {
        self.index.get(&(source, target)).copied()
    }

    /// The map with the given values on source basis elements.
    pub fn element(&self, values: &[(usize, Vector<S>)]) -> Result<Vector<S>> {
        let mut acc = LinComb::new();
        for (w, v) in values {
            for (p, c) in v {
                let k = self.index_of(*w, *p).ok_or_else(|| {
                    Error::WindowTooSmall(format!(
                        "hom({},{}) lies outside the convolution window",
                        self.source.name(*w),
                        self.structure.name(*p)
                    ))
                })?;
                acc.add(k, c.clone());
            }
        }
        Ok(acc.into_vector())
    }

    /// `f ∘ m` for an endomorphism `m` of the source; terms leaving the window are dropped.
    pub fn precompose(&self, f: &[(usize, S)], m: &GradedMap<S>) -> Vector<S> {
        let rows = transpose_rows(m);
        self.precompose_rows(f, &rows)
    }

    fn precompose_rows(&self, f: &[(usize, S)], rows: &[Vec<(usize, S)>]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (k, c) in f {
            let (u, p) = self.entries[*k];
            for (w, x) in &rows[u] {
                if let Some(&t) = self.index.get(&(*w, p)) {
                    acc.add(t, c.mul_ref(x));
                }
            }
        }
        acc.into_vector()
    }

    /// `∂τ + ½[τ, τ]`.
    pub fn mc_defect(&self, tau: &[(usize, S)]) -> Vector<S> {
        self.algebra.mc_defect(tau)
    }

    pub fn is_mc(&self, tau: &[(usize, S)]) -> bool {
        self.mc_defect(tau).is_empty()
    }

    /// `Hom^τ`: the same bracket with differential `∂ + [τ, -]`.
    pub fn twist_by(&self, tau: &[(usize, S)]) -> Result<DgLie<S>> {
        self.algebra.twist(tau)
    }
}

/// `rows[u]` lists `(w, m_{u,w})`, i.e. the row of `m` at `u`.
fn transpose_rows<S: Scalar>(m: &GradedMap<S>) -> Vec<Vec<(usize, S)>> {
    let mut rows = vec![Vec::new(); m.target().total_dim()];
    for (w, col) in m.columns().iter().enumerate() {
        for (u, c) in col {
            rows[*u].push((w, c.clone()));
        }
    }
    rows
}

/// An outer action of `acting` on `target`, stored as left action constants
/// `x·a` and the twist `ξ`. The right action is `a·x = -(-1)^{|a||x|} x·a`.
#[derive(Debug, Clone)]
pub struct OuterAction<S> {
    acting: Arc<DgLie<S>>,
    target: Arc<DgLie<S>>,
    action: HashMap<(usize, usize), Vector<S>>,
    xi: Vec<Vector<S>>,
}

impl<S: Scalar> OuterAction<S> {
    pub fn new(
        acting: Arc<DgLie<S>>,
        target: Arc<DgLie<S>>,
        action: HashMap<(usize, usize), Vector<S>>,
        xi: Vec<Vector<S>>,
    ) -> Result<Self> {
        if xi.len() != acting.total_dim() {
            return Err(Error::LengthMismatch { what: "twist values", left: xi.len(), right: acting.total_dim() });
        }
        let ts = target.space();
        let check = |v: &[(usize, S)], d: i32, what: &str| -> Result<()> {
            if v.iter().any(|(k, _)| *k >= ts.total_dim() || ts.degree(*k) != d) {
                return Err(Error::DegreeMismatch(format!("{what} has a component of the wrong degree")));
            }
            Ok(())
        };
        for (&(x, a), v) in &action {
            check(v, acting.degree(x) + ts.degree(a), "action")?;
        }
        for (x, v) in xi.iter().enumerate() {
            check(v, acting.degree(x) - 1, "twist")?;
        }
        let action = action.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        Ok(OuterAction { acting, target, action, xi })
    }

    /// The honest action with `ξ = 0`.
    pub fn untwisted(
        acting: Arc<DgLie<S>>,
        target: Arc<DgLie<S>>,
        action: HashMap<(usize, usize), Vector<S>>,
    ) -> Result<Self> {
        let xi = vec![Vec::new(); acting.total_dim()];
        OuterAction::new(acting, target, action, xi)
    }

    pub fn acting(&self) -> &Arc<DgLie<S>> {
        &self.acting
    }

    pub fn target(&self) -> &Arc<DgLie<S>> {
        &self.target
    }

    pub fn act_basis(&self, x: usize, a: usize) -> &[(usize, S)] {
        self.action.get(&(x, a)).map_or(&[], Vec::as_slice)
    }

    /// `x·a`.
    pub fn act(&self, x: &[(usize, S)], a: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (i, c) in x {
            for (j, e) in a {
                if let Some(v) = self.action.get(&(*i, *j)) {
                    acc.add_scaled(v, &c.mul_ref(e));
                }
            }
        }
        acc.into_vector()
    }

    /// `a·x` for homogeneous `a` and `x`.
    pub fn act_right(&self, a: &[(usize, S)], x: &[(usize, S)]) -> Vector<S> {
        let (Some(da), Some(dx)) = (self.target.element_degree(a), self.acting.element_degree(x)) else {
            return Vec::new();
        };
        exactla::scale(&self.act(x, a), &S::from_int(-koszul(da, dx)))
    }

    pub fn xi_basis(&self, x: usize) -> &[(usize, S)] {
        &self.xi[x]
    }

    pub fn xi(&self, x: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (i, c) in x {
            acc.add_scaled(&self.xi[*i], c);
        }
        acc.into_vector()
    }

    /// Checks the five outer action axioms on basis elements whose degrees are known.
    pub fn validate(&self) -> ValidationReport {
        let g = &self.acting;
        let l = &self.target;
        let gk = |d: i32| g.space().knows(d);
        let lk = |d: i32| l.space().knows(d);
        let e = |i: usize| vec![(i, S::one())];
        let (ng, nl) = (g.total_dim(), l.total_dim());

        let per_x: Vec<ValidationReport> = (0..ng)
            .into_par_iter()
            .map(|x| {
                let mut r = ValidationReport::default();
                let dx = g.degree(x);
                let mut defect = |kind, degree, location: String| r.defects.push(Defect { kind, degree, location });
                let mut checks = 0;
                let mut unchecked = Vec::new();

                // [x,y]·a = x·(y·a) - (-1)^{|x||y|} y·(x·a)
                for y in x..ng {
                    let dy = g.degree(y);
                    let xy = g.bracket_basis(x, y);
                    for a in 0..nl {
                        let da = l.degree(a);
                        let top = dx + dy + da;
                        if !l.window().contains(top) && !lk(top) {
                            continue;
                        }
                        if !(gk(dx + dy) && lk(top) && lk(dx + da) && lk(dy + da)) {
                            unchecked.push(top);
                            continue;
                        }
                        checks += 1;
                        let lhs = self.act(&xy, &e(a));
                        let rhs = exactla::axpy(
                            &self.act(&e(x), self.act_basis(y, a)),
                            &S::from_int(-koszul(dx, dy)),
                            &self.act(&e(y), self.act_basis(x, a)),
                        );
                        if lhs != rhs {
                            defect(
                                DefectKind::ActionBracket,
                                top,
                                format!("({}, {}) on {}", g.name(x), g.name(y), l.name(a)),
                            );
                        }
                    }
                }

                // x·[a,b] = [x·a, b] + (-1)^{|x||a|} [a, x·b]
                for a in 0..nl {
                    let da = l.degree(a);
                    for b in a..nl {
                        let db = l.degree(b);
                        let top = dx + da + db;
                        if !l.window().contains(top) && !lk(top) {
                            continue;
                        }
                        if !(lk(da + db) && lk(top) && lk(dx + da) && lk(dx + db)) {
                            unchecked.push(top);
                            continue;
                        }
                        checks += 1;
                        let lhs = self.act(&e(x), &l.bracket_basis(a, b));
                        let rhs = exactla::axpy(
                            &l.bracket(self.act_basis(x, a), &e(b)),
                            &S::from_int(koszul(dx, da)),
                            &l.bracket(&e(a), self.act_basis(x, b)),
                        );
                        if lhs != rhs {
                            defect(
                                DefectKind::ActionDerivation,
                                top,
                                format!("{} on ({}, {})", g.name(x), l.name(a), l.name(b)),
                            );
                        }
                    }
                }

                // d ξ(x) = -ξ(dx)
                if gk(dx - 1) && lk(dx - 1) && lk(dx - 2) {
                    checks += 1;
                    let lhs = l.d(&self.xi[x]);
                    let rhs = exactla::scale(&self.xi(g.differential_of(x)), &-S::one());
                    if lhs != rhs {
                        defect(DefectKind::TwistChainMap, dx, g.name(x).to_string());
                    }
                } else {
                    unchecked.push(dx);
                }

                // ξ[x,y] = ξ(x)·y + (-1)^|x| x·ξ(y)
                for y in x..ng {
                    let dy = g.degree(y);
                    if !g.window().contains(dx + dy) && !gk(dx + dy) {
                        continue;
                    }
                    if !(gk(dx + dy) && lk(dx + dy - 1) && lk(dx - 1) && lk(dy - 1)) {
                        unchecked.push(dx + dy);
                        continue;
                    }
                    checks += 1;
                    let lhs = self.xi(&g.bracket_basis(x, y));
                    let rhs = exactla::axpy(
                        &self.act_right(&self.xi[x], &e(y)),
                        &S::sign(dx as i64),
                        &self.act(&e(x), &self.xi[y]),
                    );
                    if lhs != rhs {
                        defect(DefectKind::TwistDerivation, dx + dy, format!("({}, {})", g.name(x), g.name(y)));
                    }
                }

                // d(x·a) = dx·a + (-1)^|x| x·da + [ξ(x), a]
                for a in 0..nl {
                    let da = l.degree(a);
                    let top = dx + da;
                    if !l.window().contains(top) && !l.window().contains(top - 1) {
                        continue;
                    }
                    if !(lk(top) && lk(top - 1) && lk(da - 1) && lk(dx - 1) && gk(dx - 1)) {
                        unchecked.push(top);
                        continue;
                    }
                    checks += 1;
                    let lhs = l.d(self.act_basis(x, a));
                    let mut acc = LinComb::new();
                    acc.add_vector(&self.act(g.differential_of(x), &e(a)));
                    acc.add_scaled(&self.act(&e(x), l.differential_of(a)), &S::sign(dx as i64));
                    acc.add_vector(&l.bracket(&self.xi[x], &e(a)));
                    if lhs != acc.into_vector() {
                        defect(DefectKind::MixedDifferential, top, format!("{} on {}", g.name(x), l.name(a)));
                    }
                }
                r.checks = checks;
                r.unchecked_degrees.extend(unchecked);
                r
            })
            .collect();
        let mut report = ValidationReport::default();
        for r in per_x {
            report.merge(r);
        }
        report.defects.sort();
        report
    }

    /// The twisted semi-direct product `L ⋊_ξ g`, after validating the axioms.
    pub fn semidirect(&self) -> Result<Extension<S>> {
        let report = self.validate();
        if let Some(d) = report.defects.first() {
            return Err(Error::InvalidOuterAction(d.to_string()));
        }
        self.semidirect_unchecked()
    }

    /// The twisted semi-direct product without validating the axioms first.
    pub fn semidirect_unchecked(&self) -> Result<Extension<S>> {
        let l = &self.target;
        let g = &self.acting;
        let (space, lmap, gmap) = sum_space(l.space(), g.space())?;
        let space = Arc::new(space);
        let mut b = DgLieBuilder::new(space.clone());
        for (alg, map) in [(l, &lmap), (g, &gmap)] {
            for (i, j, v) in alg.stored_brackets() {
                if let (Some(ni), Some(nj)) = (map[i], map[j]) {
                    b.set_bracket(ni, nj, remap(v, map))?;
                }
            }
        }
        for (&(x, a), v) in &self.action {
            if let (Some(nx), Some(na)) = (gmap[x], lmap[a]) {
                b.set_bracket(nx, na, remap(v, &lmap))?;
            }
        }
        for (a, na) in lmap.iter().enumerate() {
            if let Some(na) = na {
                b.set_differential(*na, remap(l.differential_of(a), &lmap))?;
            }
        }
        for (x, nx) in gmap.iter().enumerate() {
            if let Some(nx) = nx {
                let dv = exactla::add(&remap(g.differential_of(x), &gmap), &remap(&self.xi[x], &lmap));
                b.set_differential(*nx, dv)?;
            }
        }
        let algebra = Arc::new(b.build());
        let inclusion = DgLieMorphism::new(l.clone(), algebra.clone(), crate::dgla::injection_columns(&lmap))?;
        let projection =
            DgLieMorphism::new(algebra.clone(), g.clone(), crate::dgla::projection_columns(space.total_dim(), &gmap))?;
        Ok(Extension { algebra, inclusion, projection, target_map: lmap, acting_map: gmap })
    }

    /// Pulls the action back along connected covers of either side.
    pub fn restrict(&self, acting: Option<&Cover<S>>, target: Option<&Cover<S>>) -> Result<OuterAction<S>> {
        let (new_g, g_cols): (Arc<DgLie<S>>, Vec<Vector<S>>) = match acting {
            Some(c) => (Arc::new(c.algebra.clone()), c.inclusion.columns().to_vec()),
            None => (self.acting.clone(), (0..self.acting.total_dim()).map(|i| vec![(i, S::one())]).collect()),
        };
        let (new_l, l_cols): (Arc<DgLie<S>>, Vec<Vector<S>>) = match target {
            Some(c) => (Arc::new(c.algebra.clone()), c.inclusion.columns().to_vec()),
            None => (self.target.clone(), (0..self.target.total_dim()).map(|i| vec![(i, S::one())]).collect()),
        };
        let lift = |v: Vector<S>| -> Result<Vector<S>> {
            match target {
                Some(c) => c.map.lift(&v),
                None => Ok(v),
            }
        };
        let window = new_l.window();
        let mut action = HashMap::default();
        for (x, gx) in g_cols.iter().enumerate() {
            for (a, la) in l_cols.iter().enumerate() {
                if !window.contains(new_g.degree(x) + new_l.degree(a)) {
                    continue;
                }
                let v = self.act(gx, la);
                if !v.is_empty() {
                    action.insert((x, a), lift(v)?);
                }
            }
        }
        let xi: Result<Vec<Vector<S>>> = g_cols
            .iter()
            .enumerate()
            .map(|(x, gx)| if window.contains(new_g.degree(x) - 1) { lift(self.xi(gx)) } else { Ok(Vec::new()) })
            .collect();
        OuterAction::new(new_g, new_l, action, xi?)
    }

    pub fn perturb_xi(&self, x: usize, k: usize, delta: S) -> OuterAction<S> {
        let mut out = self.clone();
        out.xi[x] = exactla::add(&out.xi[x], &[(k, delta)]);
        out
    }

    pub fn perturb_action(&self, x: usize, a: usize, k: usize, delta: S) -> OuterAction<S> {
        let mut out = self.clone();
        let v = exactla::add(self.act_basis(x, a), &[(k, delta)]);
        if v.is_empty() {
            out.action.remove(&(x, a));
        } else {
            out.action.insert((x, a), v);
        }
        out
    }

    /// The morphism `x ↦ (θ_x, -s ξ(x))` into `Der L ⋉ sL`, where `θ_x(a) = x·a`.
    pub fn to_classifier_morphism(&self, classifier: &Classifier<S>, generators: &[usize]) -> Result<DgLieMorphism<S>> {
        let der = &classifier.derivations;
        let target = classifier.algebra();
        let mut columns = Vec::with_capacity(self.acting.total_dim());
        for x in 0..self.acting.total_dim() {
            let values: Vec<Vector<S>> = generators.iter().map(|&g| self.act_basis(x, g).to_vec()).collect();
            let theta = if values.iter().all(Vec::is_empty) { Vec::new() } else { der.from_values(&values)? };
            let mut acc = LinComb::new();
            for (k, c) in theta {
                let i = classifier
                    .derivation_index(k)
                    .ok_or_else(|| Error::WindowTooSmall("derivation outside classifier window".into()))?;
                acc.add(i, c);
            }
            for (a, c) in &self.xi[x] {
                let i = classifier
                    .suspension_index(*a)
                    .ok_or_else(|| Error::WindowTooSmall("suspension outside classifier window".into()))?;
                acc.add(i, -c.clone());
            }
            columns.push(acc.into_vector());
        }
        DgLieMorphism::new(self.acting.clone(), target.clone(), columns)
    }
}

/// `0 -> L -> L ⋊_ξ g -> g -> 0` with the index maps of both summands.
#[derive(Debug, Clone)]
pub struct Extension<S> {
    pub algebra: Arc<DgLie<S>>,
    pub inclusion: DgLieMorphism<S>,
    pub projection: DgLieMorphism<S>,
    pub target_map: Vec<Option<usize>>,
    pub acting_map: Vec<Option<usize>>,
}

/// The outer action on `L` read off from a morphism `φ: g -> Der L ⋉ sL`.
pub fn outer_action_from_morphism<S: Scalar>(
    phi: &DgLieMorphism<S>,
    classifier: &Classifier<S>,
    l: Arc<DgLie<S>>,
) -> Result<OuterAction<S>> {
    let report = phi.check();
    if let Some(d) = report.defects.first() {
        return Err(Error::InvalidMorphism(d.to_string()));
    }
    let g = phi.source.clone();
    let window = l.window();
    let mut action = HashMap::default();
    let mut xi = Vec::with_capacity(g.total_dim());
    for x in 0..g.total_dim() {
        let image = phi.map.column(x);
        for a in 0..l.total_dim() {
            if !window.contains(g.degree(x) + l.degree(a)) {
                continue;
            }
            let v = classifier.act(image, &[(a, S::one())]);
            if !v.is_empty() {
                action.insert((x, a), v);
            }
        }
        xi.push(exactla::scale(&classifier.suspension_part(image), &-S::one()));
    }
    OuterAction::new(g, l, action, xi)
}

/// The tautological outer action of `Der L ⋉ sL` on `L`.
pub fn tautological_outer_action<S: Scalar>(classifier: &Classifier<S>, l: Arc<DgLie<S>>) -> Result<OuterAction<S>> {
    let g = classifier.algebra().clone();
    let identity = DgLieMorphism::new(g.clone(), g.clone(), (0..g.total_dim()).map(|i| vec![(i, S::one())]).collect())?;
    outer_action_from_morphism(&identity, classifier, l)
}

/// The outer action `f·x = f ∘ χ(x)`, `ξ(x) = τ ∘ χ(x)` of `acting` on a
/// (possibly twisted) convolution algebra `target`, where `chi(x)` is the
/// coderivation of the source coalgebra attached to basis element `x`.
pub fn hom_outer_action<S, F>(
    conv: &Convolution<S>,
    target: Arc<DgLie<S>>,
    tau: &[(usize, S)],
    acting: Arc<DgLie<S>>,
    chi: F,
) -> Result<OuterAction<S>>
where
    S: Scalar,
    F: Fn(usize) -> Result<GradedMap<S>> + Sync,
{
    if target.space() != conv.space() {
        return Err(Error::SpaceMismatch("target must be the convolution algebra or a twist of it".into()));
    }
    let window = target.window();
    let per_x: Result<Vec<Column<S>>> = (0..acting.total_dim())
        .into_par_iter()
        .map(|x| {
            let r = acting.degree(x);
            let m = chi(x)?;
            if m.degree() != r {
                return Err(Error::DegreeMismatch(format!("χ({}) has degree {}", acting.name(x), m.degree())));
            }
            let rows = transpose_rows(&m);
            let mut out = Vec::new();
            for f in 0..target.total_dim() {
                let df = target.degree(f);
                if !window.contains(df + r) {
                    continue;
                }
                let right = conv.precompose_rows(&[(f, S::one())], &rows);
                if !right.is_empty() {
                    out.push(((x, f), exactla::scale(&right, &S::from_int(-koszul(df, r)))));
                }
            }
            let xi = if window.contains(r - 1) { conv.precompose_rows(tau, &rows) } else { Vec::new() };
            Ok((out, xi))
        })
        .collect();
    let mut action = HashMap::default();
    let mut xi = Vec::new();
    for (pairs, v) in per_x? {
        action.extend(pairs);
        xi.push(v);
    }
    OuterAction::new(acting, target, action, xi)
}

/// Outcome of comparing `(Hom ⋊ g)^{(τ,0)}` with `Hom^τ ⋊_{τ∘χ} g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistIdentityReport {
    pub brackets_equal: bool,
    pub differentials_equal: bool,
    pub mismatches: Vec<String>,
}

impl TwistIdentityReport {
    pub fn holds(&self) -> bool {
        self.brackets_equal && self.differentials_equal
    }
}

/// Builds both sides of the twisting identity and compares structure constants.
pub fn twist_identity_check<S, F>(
    conv: &Convolution<S>,
    tau: &[(usize, S)],
    acting: Arc<DgLie<S>>,
    chi: F,
) -> Result<TwistIdentityReport>
where
    S: Scalar,
    F: Fn(usize) -> Result<GradedMap<S>> + Sync,
{
    let chis: Result<Vec<GradedMap<S>>> = (0..acting.total_dim()).into_par_iter().map(&chi).collect();
    let chis = chis?;
    let lookup = |x: usize| Ok(chis[x].clone());

    let plain = hom_outer_action(conv, conv.algebra().clone(), &[], acting.clone(), lookup)?;
    let left = plain.semidirect_unchecked()?;
    let embedded = remap(tau, &left.target_map);
    let left = left.algebra.twist(&embedded)?;

    let twisted = Arc::new(conv.twist_by(tau)?);
    let right = hom_outer_action(conv, twisted, tau, acting, lookup)?.semidirect_unchecked()?;
    let right = &right.algebra;

    let mut mismatches = Vec::new();
    let n = left.total_dim();
    let mut brackets_equal = true;
    for i in 0..n {
        for j in i..n {
            if left.bracket_basis(i, j) != right.bracket_basis(i, j) {
                brackets_equal = false;
                mismatches.push(format!("bracket ({}, {})", left.name(i), left.name(j)));
            }
        }
    }
    let mut differentials_equal = true;
    for i in 0..n {
        if left.differential_of(i) != right.differential_of(i) {
            differentials_equal = false;
            mismatches.push(format!("differential at {}", left.name(i)));
        }
    }
    Ok(TwistIdentityReport { brackets_equal, differentials_equal, mismatches })
}

/// `χ` restricted along a map into `Der L ⋉ sL` (for example a cover inclusion).
pub fn chi_along<S: Scalar>(
    chains: &CeComplex<S>,
    classifier: &Classifier<S>,
    columns: &[Vector<S>],
    x: usize,
) -> Result<GradedMap<S>> {
    let degree = classifier.algebra().element_degree(&columns[x]).unwrap_or(0);
    let mut out = GradedMap::zero(chains.space().clone(), chains.space().clone(), degree);
    for (k, c) in &columns[x] {
        let m = match classifier.part(*k) {
            ClassifierPart::Derivation(d) => chains.chi_derivation(&classifier.derivations, d)?,
            ClassifierPart::Suspension(z) => chains.chi_suspension(z)?,
        };
        out = out.add(&m.scaled(c))?;
    }
    Ok(out)
}
