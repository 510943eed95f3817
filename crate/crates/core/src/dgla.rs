//! Differential graded Lie algebras given by structure constants.
//!
//! A [`DgLie`] is a graded space in a window together with the bracket of
//! every pair of basis elements and the differential of every basis
//! element. Brackets are stored once per unordered pair `(i, j)` with
//! `i <= j`; the other order follows from graded antisymmetry. Diagonal
//! squares `[x, x]` are stored explicitly and must vanish in even degrees.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{self, homology_dim_at, LinComb, Matrix, SpanSolver, Vector};
use crate::graded::{BasisElement, GradedMap, GradedSpace, Window};
use crate::scalar::{koszul, parity, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgLie<S> {
    space: Arc<GradedSpace>,
    bracket: HashMap<(usize, usize), Vector<S>>,
    differential: Vec<Vector<S>>,
    conflicts: Vec<String>,
}

/// Incremental constructor for [`DgLie`].
#[derive(Debug, Clone)]
pub struct DgLieBuilder<S> {
    space: Arc<GradedSpace>,
    bracket: HashMap<(usize, usize), Vector<S>>,
    differential: Vec<Vector<S>>,
    conflicts: Vec<String>,
}

impl<S: Scalar> DgLieBuilder<S> {
    pub fn new(space: Arc<GradedSpace>) -> Self {
        let n = space.total_dim();
        DgLieBuilder { space, bracket: HashMap::default(), differential: vec![Vec::new(); n], conflicts: Vec::new() }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    fn check_degree(&self, v: &[(usize, S)], degree: i32, what: &str) -> Result<()> {
        for (k, _) in v {
            if *k >= self.space.total_dim() || self.space.degree(*k) != degree {
                return Err(Error::DegreeMismatch(format!("{what}: component of wrong degree")));
            }
        }
        Ok(())
    }

    /// Records `[e_i, e_j] = value`. Setting both orders of a pair with
    /// values that disagree under antisymmetry is recorded as a defect.
    pub fn set_bracket(&mut self, i: usize, j: usize, value: Vector<S>) -> Result<()> {
        let (a, b) = (self.space.degree(i), self.space.degree(j));
        if !self.space.window().contains(a + b) {
            return Ok(());
        }
        self.check_degree(&value, a + b, "bracket")?;
        let (key, value) =
            if i <= j { ((i, j), value) } else { ((j, i), exactla::scale(&value, &S::from_int(-koszul(a, b)))) };
        match self.bracket.get(&key) {
            Some(old) if *old != value => self.conflicts.push(format!(
                "[{}, {}] given inconsistently",
                self.space.name(key.0),
                self.space.name(key.1)
            )),
            _ => {
                if !value.is_empty() {
                    self.bracket.insert(key, value);
                }
            }
        }
        Ok(())
    }

    pub fn set_differential(&mut self, i: usize, value: Vector<S>) -> Result<()> {
        let d = self.space.degree(i) - 1;
        if !self.space.window().contains(d) {
            return Ok(());
        }
        self.check_degree(&value, d, "differential")?;
        self.differential[i] = value;
        Ok(())
    }

    pub fn build(self) -> DgLie<S> {
        DgLie { space: self.space, bracket: self.bracket, differential: self.differential, conflicts: self.conflicts }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefectKind {
    DifferentialSquare,
    Antisymmetry,
    Jacobi,
    Leibniz,
    Closure,
    ActionBracket,
    ActionDerivation,
    TwistChainMap,
    TwistDerivation,
    MixedDifferential,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Defect {
    pub kind: DefectKind,
    pub degree: i32,
    pub location: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in degree {} at {}", self.kind, self.degree, self.location)
    }
}

/// Outcome of an axiom check. Valid iff `defects` is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub defects: Vec<Defect>,
    /// Degrees where some check was skipped because it needed data beyond a
    /// truncated window edge.
    pub unchecked_degrees: BTreeSet<i32>,
    pub checks: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.defects.extend(other.defects);
        self.unchecked_degrees.extend(other.unchecked_degrees);
        self.checks += other.checks;
    }

    pub fn has(&self, kind: DefectKind) -> bool {
        self.defects.iter().any(|d| d.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomologyEntry {
    pub degree: i32,
    pub dim: usize,
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyReport {
    pub entries: Vec<HomologyEntry>,
}

impl HomologyReport {
    pub fn dim(&self, n: i32) -> Option<usize> {
        self.entries.iter().find(|e| e.degree == n).map(|e| e.dim)
    }

    /// Smallest and largest trusted degree, if any.
    pub fn trusted_range(&self) -> Option<(i32, i32)> {
        let t: Vec<i32> = self.entries.iter().filter(|e| e.trusted).map(|e| e.degree).collect();
        Some((*t.first()?, *t.last()?))
    }

    pub fn trusted(&self) -> impl Iterator<Item = &HomologyEntry> {
        self.entries.iter().filter(|e| e.trusted)
    }
}

/// Result of a lower central series computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcsClass {
    /// Smallest `k` with `(Γ^k g)_n = 0`.
    Class(usize),
    NotNilpotentWithin(usize),
}

impl<S: Scalar> DgLie<S> {
    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn window(&self) -> Window {
        self.space.window()
    }

    pub fn dim(&self, n: i32) -> usize {
        self.space.dim(n)
    }

    pub fn total_dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.space.degree(i)
    }

    pub fn name(&self, i: usize) -> &str {
        self.space.name(i)
    }

    /// The abelian dg Lie algebra with zero differential on `space`.
    pub fn abelian(space: Arc<GradedSpace>) -> Self {
        DgLieBuilder::new(space).build()
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.values().all(Vec::is_empty)
    }

    /// Stored brackets `(i, j, [e_i, e_j])` with `i <= j`.
    pub fn stored_brackets(&self) -> impl Iterator<Item = (usize, usize, &Vector<S>)> {
        self.bracket.iter().map(|((i, j), v)| (*i, *j, v))
    }

    pub fn differential_of(&self, i: usize) -> &[(usize, S)] {
        &self.differential[i]
    }

    /// `[e_i, e_j]` added into `acc` with coefficient `c`.
    pub fn add_bracket_basis(&self, i: usize, j: usize, c: &S, acc: &mut LinComb<S>) {
        if i <= j {
            if let Some(v) = self.bracket.get(&(i, j)) {
                acc.add_scaled(v, c);
            }
        } else if let Some(v) = self.bracket.get(&(j, i)) {
            let s = S::from_int(-koszul(self.degree(i), self.degree(j)));
            acc.add_scaled(v, &s.mul_ref(c));
        }
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector<S> {
        let mut acc = LinComb::new();
        self.add_bracket_basis(i, j, &S::one(), &mut acc);
        acc.into_vector()
    }

    pub fn bracket(&self, x: &[(usize, S)], y: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (i, a) in x {
            for (j, b) in y {
                self.add_bracket_basis(*i, *j, &a.mul_ref(b), &mut acc);
            }
        }
        acc.into_vector()
    }

    pub fn d(&self, x: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (i, a) in x {
            acc.add_scaled(&self.differential[*i], a);
        }
        acc.into_vector()
    }

    pub fn differential_map(&self) -> GradedMap<S> {
        GradedMap::new(self.space.clone(), self.space.clone(), -1, self.differential.clone()).expect("differential")
    }

    /// The matrix of `d: g_n -> g_{n-1}` in local coordinates.
    pub fn d_block(&self, n: i32) -> Matrix<S> {
        let src = self.space.range(n);
        let tgt = self.space.range(n - 1);
        let cols =
            src.map(|j| self.differential[j].iter().map(|(i, x)| (i - tgt.start, x.clone())).collect()).collect();
        Matrix::from_columns(tgt.len(), cols)
    }

    /// Degree of a homogeneous element, or `None` for zero.
    pub fn element_degree(&self, x: &[(usize, S)]) -> Option<i32> {
        x.first().map(|(i, _)| self.degree(*i))
    }

    pub fn format_element(&self, x: &[(usize, S)]) -> String {
        format_combination(x, |i| self.name(i).to_string())
    }

    /// Checks `d² = 0`, graded antisymmetry, graded Jacobi and the Leibniz
    /// rule on all basis elements, pairs and (sorted) triples whose degrees
    /// are known.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.total_dim();
        let knows = |d: i32| self.space.knows(d);

        for c in &self.conflicts {
            report.defects.push(Defect { kind: DefectKind::Antisymmetry, degree: 0, location: c.clone() });
        }

        for i in 0..n {
            let a = self.degree(i);
            if !knows(a - 2) || !knows(a - 1) {
                report.unchecked_degrees.insert(a);
                continue;
            }
            report.checks += 1;
            if !self.d(&self.differential[i]).is_empty() {
                report.defects.push(Defect {
                    kind: DefectKind::DifferentialSquare,
                    degree: a,
                    location: self.name(i).to_string(),
                });
            }
            if parity(a) == 0 {
                if let Some(v) = self.bracket.get(&(i, i)) {
                    if !v.is_empty() {
                        report.defects.push(Defect {
                            kind: DefectKind::Antisymmetry,
                            degree: 2 * a,
                            location: format!("[{0}, {0}] nonzero in even degree", self.name(i)),
                        });
                    }
                }
            }
        }

        let per_i: Vec<ValidationReport> = (0..n).into_par_iter().map(|i| self.validate_from(i)).collect();
        for r in per_i {
            report.merge(r);
        }
        report.defects.sort();
        report
    }

    /// Leibniz for pairs `(i, j >= i)` and Jacobi for triples `(i, j >= i, k >= j)`
    /// whose total degree can be nonzero.
    fn validate_from(&self, i: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let w = self.window();
        let sp = &self.space;
        let knows = |d: i32| sp.knows(d);
        let a = self.degree(i);
        let ei = vec![(i, S::one())];
        let di = &self.differential[i];
        let pair_end = sp.first_at_least(w.hi + 2 - a).max(i);
        for j in sp.first_at_least(w.lo - a).max(i)..pair_end {
            let b = self.degree(j);
            let ej = vec![(j, S::one())];
            let xy = self.bracket_basis(i, j);
            if knows(a + b) && knows(a + b - 1) && knows(a - 1) && knows(b - 1) {
                report.checks += 1;
                let lhs = self.d(&xy);
                let r1 = self.bracket(di, &ej);
                let r2 = self.bracket(&ei, &self.differential[j]);
                let rhs = exactla::axpy(&r1, &S::sign(parity(a)), &r2);
                if lhs != rhs {
                    report.defects.push(Defect {
                        kind: DefectKind::Leibniz,
                        degree: a + b,
                        location: format!("({}, {})", self.name(i), self.name(j)),
                    });
                }
            } else {
                report.unchecked_degrees.insert(a + b);
            }
        }
        for j in i..self.total_dim() {
            let b = self.degree(j);
            let k_end = sp.first_at_least(w.hi + 1 - a - b);
            if k_end <= j {
                break;
            }
            let ej = vec![(j, S::one())];
            let xy = self.bracket_basis(i, j);
            for k in sp.first_at_least(w.lo - a - b).max(j)..k_end {
                let c = self.degree(k);
                if !(knows(a + b) && knows(b + c) && knows(a + c)) {
                    report.unchecked_degrees.insert(a + b + c);
                    continue;
                }
                report.checks += 1;
                let ek = [(k, S::one())];
                let yz = self.bracket_basis(j, k);
                let xz = self.bracket_basis(i, k);
                let t1 = self.bracket(&ei, &yz);
                let t2 = self.bracket(&xy, &ek);
                let t3 = self.bracket(&ej, &xz);
                let mut acc = LinComb::new();
                acc.add_vector(&t1);
                acc.add_scaled(&t2, &-S::one());
                acc.add_scaled(&t3, &-S::from_int(koszul(a, b)));
                if !acc.is_zero() {
                    report.defects.push(Defect {
                        kind: DefectKind::Jacobi,
                        degree: a + b + c,
                        location: format!("({}, {}, {})", self.name(i), self.name(j), self.name(k)),
                    });
                }
            }
        }
        report
    }

    /// `d(τ) + ½[τ, τ]` for a degree `-1` element.
    pub fn mc_defect(&self, tau: &[(usize, S)]) -> Vector<S> {
        let dt = self.d(tau);
        let tt = self.bracket(tau, tau);
        exactla::axpy(&dt, &S::half(), &tt)
    }

    /// The same graded Lie algebra with differential `d + [τ, -]`.
    pub fn twist(&self, tau: &[(usize, S)]) -> Result<DgLie<S>> {
        if let Some(d) = self.element_degree(tau) {
            if d != -1 {
                return Err(Error::DegreeMismatch(format!("twisting element has degree {d}, expected -1")));
            }
        }
        let defect = self.mc_defect(tau);
        if !defect.is_empty() {
            return Err(Error::NotMaurerCartan(self.format_element(&defect)));
        }
        let differential = (0..self.total_dim())
            .map(|i| {
                let t = self.bracket(tau, &[(i, S::one())]);
                exactla::add(&self.differential[i], &t)
            })
            .collect();
        Ok(DgLie { differential, ..self.clone() })
    }

    /// Copies with a single structure constant changed, for mutation tests.
    pub fn perturb_bracket(&self, i: usize, j: usize, k: usize, delta: S) -> DgLie<S> {
        let mut out = self.clone();
        let (key, delta) = if i <= j {
            ((i, j), delta)
        } else {
            ((j, i), delta * S::from_int(-koszul(self.degree(i), self.degree(j))))
        };
        let old = out.bracket.remove(&key).unwrap_or_default();
        let v = exactla::add(&old, &[(k, delta)]);
        if !v.is_empty() {
            out.bracket.insert(key, v);
        }
        out
    }

    pub fn perturb_differential(&self, i: usize, k: usize, delta: S) -> DgLie<S> {
        let mut out = self.clone();
        out.differential[i] = exactla::add(&out.differential[i], &[(k, delta)]);
        out
    }

    /// Degrees where homology is fully determined by known chains.
    fn homology_trusted(&self, n: i32) -> bool {
        self.space.knows(n - 1) && self.space.knows(n + 1)
    }

    /// Homology dimension in every window degree, with trust flags.
    pub fn homology(&self) -> Result<HomologyReport> {
        let w = self.window();
        self.homology_over(w.lo, w.hi)
    }

    /// Homology in degrees `lo..=hi`; degrees past an exact edge are zero
    /// and trusted, degrees past a truncated edge are zero and untrusted.
    pub fn homology_over(&self, lo: i32, hi: i32) -> Result<HomologyReport> {
        let w = self.window();
        let entries: Result<Vec<HomologyEntry>> = (lo..=hi)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|n| {
                if !w.contains(n) {
                    return Ok(HomologyEntry { degree: n, dim: 0, trusted: self.homology_trusted(n) });
                }
                let dim = homology_dim_at(&self.d_block(n), &self.d_block(n + 1), n)?;
                Ok(HomologyEntry { degree: n, dim, trusted: self.homology_trusted(n) })
            })
            .collect();
        Ok(HomologyReport { entries: entries? })
    }

    /// The `n`-connected cover: degrees above `n`, plus the cycles in degree `n`.
    pub fn connected_cover(&self, n: i32) -> Result<Cover<S>> {
        if n < 0 {
            return Err(Error::WindowTooSmall(format!("connected cover index {n} must be nonnegative")));
        }
        let w = self.window();
        if !w.contains(n) && !(n < w.lo && self.space.lo_exact()) && !(n > w.hi && self.space.hi_exact()) {
            return Err(Error::WindowTooSmall(format!("cover degree {n} outside {w}")));
        }
        if w.contains(n) && !self.space.knows(n - 1) {
            return Err(Error::WindowTooSmall(format!(
                "cycles in degree {n} need degree {} which lies beyond a truncated edge",
                n - 1
            )));
        }
        let new_lo = n.max(w.lo.min(n));
        let new_window = Window::new(new_lo, w.hi.max(new_lo))?;

        // kernel of d in degree n, in global coordinates
        let kernel: Vec<Vector<S>> = if w.contains(n) {
            let off = self.space.offset(n);
            exactla::kernel_basis(&self.d_block(n))
                .into_iter()
                .map(|v| v.into_iter().map(|(i, x)| (i + off, x)).collect())
                .collect()
        } else {
            Vec::new()
        };

        let mut elements = Vec::new();
        let mut inclusion_cols: Vec<Vector<S>> = Vec::new();
        for v in &kernel {
            elements.push(BasisElement { name: cycle_name(self, v), degree: n });
            inclusion_cols.push(v.clone());
        }
        let mut old_to_new: HashMap<usize, usize> = HashMap::default();
        for i in 0..self.total_dim() {
            if self.degree(i) > n {
                old_to_new.insert(i, elements.len());
                elements.push(BasisElement { name: self.name(i).to_string(), degree: self.degree(i) });
                inclusion_cols.push(vec![(i, S::one())]);
            }
        }
        let space = Arc::new(GradedSpace::new(new_window, true, self.space.hi_exact(), elements)?);
        let solver = SpanSolver::from_vectors(self.total_dim(), &kernel);
        let cover = CoverMap { n, old_to_new, solver };

        let mut b = DgLieBuilder::new(space.clone());
        for i in 0..space.total_dim() {
            for j in i..space.total_dim() {
                let v = self.bracket(&inclusion_cols[i], &inclusion_cols[j]);
                if v.is_empty() {
                    continue;
                }
                let deg = space.degree(i) + space.degree(j);
                if !new_window.contains(deg) {
                    continue;
                }
                b.set_bracket(i, j, cover.lift(&v)?)?;
            }
            let dv = self.d(&inclusion_cols[i]);
            if space.degree(i) > n && !dv.is_empty() {
                b.set_differential(i, cover.lift(&dv)?)?;
            }
        }
        let algebra = b.build();
        let inclusion = GradedMap::new(space, self.space.clone(), 0, inclusion_cols)?;
        Ok(Cover { algebra, inclusion, map: cover })
    }

    /// Lower central series class in degree `n`.
    pub fn lcs_class(&self, n: i32, k_max: usize) -> LcsClass {
        let w = self.window();
        let total = self.total_dim();
        // Γ^1 = g
        let mut gamma: BTreeMap<i32, Vec<Vector<S>>> =
            w.degrees().map(|d| (d, self.space.range(d).map(|i| vec![(i, S::one())]).collect())).collect();
        for k in 1..=k_max {
            if gamma.get(&n).is_none_or(Vec::is_empty) {
                return LcsClass::Class(k);
            }
            let mut next: BTreeMap<i32, crate::exactla::Echelon<S>> = BTreeMap::new();
            for (p, gens) in &gamma {
                for q in w.degrees() {
                    let d = p + q;
                    if !w.contains(d) {
                        continue;
                    }
                    for a in gens {
                        for j in self.space.range(q) {
                            let v = self.bracket(a, &[(j, S::one())]);
                            if !v.is_empty() {
                                next.entry(d).or_insert_with(|| crate::exactla::Echelon::new(total)).insert(&v);
                            }
                        }
                    }
                }
            }
            gamma = next
                .into_iter()
                .map(|(d, e)| (d, e.pivot_columns().map(|c| e.pivot_row(c).unwrap().clone()).collect()))
                .collect();
        }
        if gamma.get(&n).is_none_or(Vec::is_empty) {
            LcsClass::Class(k_max + 1)
        } else {
            LcsClass::NotNilpotentWithin(k_max)
        }
    }

    /// Restricts to a sub-window; brackets and differentials leaving it are dropped.
    pub fn restrict(&self, window: Window) -> Result<DgLie<S>> {
        let (space, map) = self.space.restrict(window)?;
        let space = Arc::new(space);
        let remap =
            |v: &Vector<S>| -> Option<Vector<S>> { v.iter().map(|(i, x)| map[*i].map(|k| (k, x.clone()))).collect() };
        let mut b = DgLieBuilder::new(space.clone());
        for (&(i, j), v) in &self.bracket {
            if let (Some(ni), Some(nj)) = (map[i], map[j]) {
                if let Some(v) = remap(v) {
                    b.set_bracket(ni, nj, v)?;
                }
            }
        }
        for (i, dv) in self.differential.iter().enumerate() {
            if let (Some(ni), Some(v)) = (map[i], remap(dv)) {
                b.set_differential(ni, v)?;
            }
        }
        let mut out = b.build();
        out.conflicts = self.conflicts.clone();
        Ok(out)
    }

    /// The direct sum `a ⊕ b`; basis of `a` first.
    pub fn direct_sum(a: &DgLie<S>, b: &DgLie<S>) -> Result<DirectSum<S>> {
        let (space, left, right) = sum_space(a.space(), b.space())?;
        let space = Arc::new(space);
        let mut builder = DgLieBuilder::new(space.clone());
        for (map, g) in [(&left, a), (&right, b)] {
            for (&(i, j), v) in &g.bracket {
                if let (Some(ni), Some(nj)) = (map[i], map[j]) {
                    builder.set_bracket(ni, nj, remap(v, map))?;
                }
            }
            for (i, v) in g.differential.iter().enumerate() {
                if let Some(ni) = map[i] {
                    builder.set_differential(ni, remap(v, map))?;
                }
            }
        }
        let sum = Arc::new(builder.build());
        let inclusion = DgLieMorphism::new(Arc::new(a.clone()), sum.clone(), injection_columns(&left))?;
        let projection =
            DgLieMorphism::new(sum.clone(), Arc::new(b.clone()), projection_columns(space.total_dim(), &right))?;
        Ok(DirectSum { algebra: sum, inclusion, projection })
    }
}

/// Reindexes `v`, dropping components that map to `None`.
pub(crate) fn remap<S: Scalar>(v: &[(usize, S)], map: &[Option<usize>]) -> Vector<S> {
    exactla::vector_from(v.iter().filter_map(|(i, x)| map[*i].map(|k| (k, x.clone()))))
}

pub(crate) fn injection_columns<S: Scalar>(map: &[Option<usize>]) -> Vec<Vector<S>> {
    map.iter().map(|k| k.map(|k| vec![(k, S::one())]).unwrap_or_default()).collect()
}

pub(crate) fn projection_columns<S: Scalar>(total: usize, map: &[Option<usize>]) -> Vec<Vector<S>> {
    let mut cols = vec![Vec::new(); total];
    for (i, k) in map.iter().enumerate() {
        if let Some(k) = k {
            cols[*k] = vec![(i, S::one())];
        }
    }
    cols
}

/// The underlying space of `a ⊕ b` on their common window, with index maps
/// from each summand (`None` for elements outside the common window).
///
/// Names that collide within a degree get a prime.
type IndexMap = Vec<Option<usize>>;

pub fn sum_space(a: &GradedSpace, b: &GradedSpace) -> Result<(GradedSpace, IndexMap, IndexMap)> {
    let window = crate::graded::common_window(&[a, b])?;
    let (ra, ma) = a.restrict(window)?;
    let (rb, mb) = b.restrict(window)?;
    let mut elems: Vec<BasisElement> = Vec::new();
    let mut left = vec![0; ra.total_dim()];
    let mut right = vec![0; rb.total_dim()];
    for d in window.degrees() {
        for i in ra.range(d) {
            left[i] = elems.len();
            elems.push(ra.elements()[i].clone());
        }
        for i in rb.range(d) {
            let mut e = rb.elements()[i].clone();
            while ra.index_of(&e.name, d).is_some() {
                e.name.push('\'');
            }
            right[i] = elems.len();
            elems.push(e);
        }
    }
    let space = GradedSpace::new(window, ra.lo_exact() && rb.lo_exact(), ra.hi_exact() && rb.hi_exact(), elems)?;
    let compose = |m: Vec<Option<usize>>, inner: &[usize]| m.into_iter().map(|k| k.map(|k| inner[k])).collect();
    Ok((space, compose(ma, &left), compose(mb, &right)))
}

fn cycle_name<S: Scalar>(g: &DgLie<S>, v: &[(usize, S)]) -> String {
    if v.len() == 1 && v[0].1.is_one() {
        g.name(v[0].0).to_string()
    } else {
        format!("({})", g.format_element(v))
    }
}

/// Formats a linear combination like `2*a - b + 1/2*c`.
pub fn format_combination<S: Scalar>(v: &[(usize, S)], name: impl Fn(usize) -> String) -> String {
    if v.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (i, x)) in v.iter().enumerate() {
        let neg = x.is_negative();
        let abs = x.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&format!("{abs}*"));
        }
        out.push_str(&name(*i));
    }
    out
}

/// Coordinates translator from an algebra to its connected cover.
#[derive(Debug, Clone)]
pub struct CoverMap<S> {
    n: i32,
    old_to_new: HashMap<usize, usize>,
    solver: SpanSolver<S>,
}

impl<S: Scalar> CoverMap<S> {
    /// Rewrites an element of the original algebra (degree above `n`, or a
    /// cycle in degree `n`) in cover coordinates.
    pub fn lift(&self, v: &[(usize, S)]) -> Result<Vector<S>> {
        let mut low = Vec::new();
        let mut acc = LinComb::new();
        for (i, x) in v {
            match self.old_to_new.get(i) {
                Some(k) => acc.add(*k, x.clone()),
                None => low.push((*i, x.clone())),
            }
        }
        if !low.is_empty() {
            let c = self
                .solver
                .coordinates(&low)
                .ok_or_else(|| Error::NotInSpan(format!("element is not a cycle in degree {} of the cover", self.n)))?;
            acc.add_vector(&c);
        }
        Ok(acc.into_vector())
    }
}

#[derive(Debug, Clone)]
pub struct Cover<S> {
    pub algebra: DgLie<S>,
    /// Cover -> original.
    pub inclusion: GradedMap<S>,
    pub map: CoverMap<S>,
}

#[derive(Debug, Clone)]
pub struct DirectSum<S> {
    pub algebra: Arc<DgLie<S>>,
    pub inclusion: DgLieMorphism<S>,
    pub projection: DgLieMorphism<S>,
}

/// A degree-zero map between dg Lie algebras, claimed to be a morphism.
#[derive(Debug, Clone)]
pub struct DgLieMorphism<S> {
    pub source: Arc<DgLie<S>>,
    pub target: Arc<DgLie<S>>,
    pub map: GradedMap<S>,
}

impl<S: Scalar> DgLieMorphism<S> {
    pub fn new(source: Arc<DgLie<S>>, target: Arc<DgLie<S>>, columns: Vec<Vector<S>>) -> Result<Self> {
        let map = GradedMap::new(source.space().clone(), target.space().clone(), 0, columns)?;
        Ok(DgLieMorphism { source, target, map })
    }

    pub fn apply(&self, v: &[(usize, S)]) -> Vector<S> {
        self.map.apply(v)
    }

    /// Checks `f d = d f` and `f[x, y] = [f x, f y]` on basis elements and pairs.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let src = &self.source;
        let tgt = &self.target;
        let knows = |d: i32| src.space().knows(d) && tgt.space().knows(d);
        let n = src.total_dim();
        for i in 0..n {
            let a = src.degree(i);
            if !knows(a - 1) {
                report.unchecked_degrees.insert(a);
                continue;
            }
            report.checks += 1;
            let lhs = self.apply(src.differential_of(i));
            let rhs = tgt.d(self.map.column(i));
            if lhs != rhs {
                report.defects.push(Defect {
                    kind: DefectKind::Leibniz,
                    degree: a,
                    location: format!("differential at {}", src.name(i)),
                });
            }
        }
        let per: Vec<ValidationReport> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut r = ValidationReport::default();
                for j in i..n {
                    let d = src.degree(i) + src.degree(j);
                    if !knows(d) {
                        r.unchecked_degrees.insert(d);
                        continue;
                    }
                    r.checks += 1;
                    let lhs = self.apply(&src.bracket_basis(i, j));
                    let rhs = tgt.bracket(self.map.column(i), self.map.column(j));
                    if lhs != rhs {
                        r.defects.push(Defect {
                            kind: DefectKind::Closure,
                            degree: d,
                            location: format!("bracket of ({}, {})", src.name(i), src.name(j)),
                        });
                    }
                }
                r
            })
            .collect();
        for r in per {
            report.merge(r);
        }
        report.defects.sort();
        report
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessEntry {
    pub degree: i32,
    pub sub: usize,
    pub middle: usize,
    pub quotient: usize,
    pub injective: bool,
    pub surjective: bool,
    pub image_is_kernel: bool,
}

impl ExactnessEntry {
    pub fn is_exact(&self) -> bool {
        self.injective && self.surjective && self.image_is_kernel && self.middle == self.sub + self.quotient
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub entries: Vec<ExactnessEntry>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(ExactnessEntry::is_exact)
    }
}

/// Degreewise check that `0 -> A -i-> B -p-> C -> 0` is exact.
pub fn short_exact_check<S: Scalar>(i: &DgLieMorphism<S>, p: &DgLieMorphism<S>) -> Result<ExactnessReport> {
    if i.map.target() != p.map.source() {
        return Err(Error::SpaceMismatch("target of the inclusion differs from source of the projection".into()));
    }
    let w = p.map.source().window();
    let mut entries = Vec::new();
    for n in w.degrees() {
        let ib = i.map.block(n);
        let pb = p.map.block(n);
        let sub = i.map.source().dim(n);
        let middle = p.map.source().dim(n);
        let quotient = p.map.target().dim(n);
        let ri = exactla::rank(&ib);
        let rp = exactla::rank(&pb);
        let composite_zero = pb.mul(&ib)?.is_zero();
        let kernel_p = middle - rp;
        entries.push(ExactnessEntry {
            degree: n,
            sub,
            middle,
            quotient,
            injective: ri == sub,
            surjective: rp == quotient,
            image_is_kernel: composite_zero && ri == kernel_p,
        });
    }
    Ok(ExactnessReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn space(elems: &[(&str, i32)], lo: i32, hi: i32) -> Arc<GradedSpace> {
        Arc::new(
            GradedSpace::finite(
                Window::new(lo, hi).unwrap(),
                elems.iter().map(|(n, d)| BasisElement { name: n.to_string(), degree: *d }),
            )
            .unwrap(),
        )
    }

    /// Free Lie algebra on one odd generator x: basis x, [x,x].
    fn odd_free() -> DgLie<Q> {
        let s = space(&[("x", 1), ("[x,x]", 2)], 1, 2);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 0, vec![(1, q(1))]).unwrap();
        b.build()
    }

    /// g_0 = <e>, g_1 = <a, b>, [e, a] = b.
    fn three_step() -> DgLie<Q> {
        let s = space(&[("e", 0), ("a", 1), ("b", 1)], 0, 1);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 1, vec![(2, q(1))]).unwrap();
        b.build()
    }

    #[test]
    fn abelian_is_valid() {
        let g = DgLie::<Q>::abelian(space(&[("a", 0), ("b", 1), ("c", 2)], 0, 2));
        assert!(g.validate().is_valid());
        assert_eq!(g.lcs_class(1, 5), LcsClass::Class(2));
        let h = g.homology().unwrap();
        assert_eq!(h.dim(1), Some(1));
        assert!(h.entries.iter().all(|e| e.trusted));
    }

    #[test]
    fn odd_free_is_valid_and_jacobi_catches_perturbation() {
        let g = odd_free();
        assert!(g.validate().is_valid());
        // [x,[x,x]] must vanish; make it nonzero by adding a degree-3 element
        let s = space(&[("x", 1), ("[x,x]", 2), ("w", 3)], 1, 3);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 0, vec![(1, q(1))]).unwrap();
        let good = b.build();
        assert!(good.validate().is_valid());
        let bad = good.perturb_bracket(0, 1, 2, q(1));
        let r = bad.validate();
        assert!(r.has(DefectKind::Jacobi), "{:?}", r.defects);
        assert!(r.defects.iter().any(|d| d.location == "(x, x, x)"));
    }

    #[test]
    fn even_square_is_an_antisymmetry_defect() {
        let s = space(&[("y", 2), ("z", 4)], 2, 4);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 0, vec![(1, q(1))]).unwrap();
        assert!(b.build().validate().has(DefectKind::Antisymmetry));
    }

    #[test]
    fn inconsistent_orders_are_recorded() {
        let s = space(&[("a", 1), ("b", 2), ("c", 3)], 1, 3);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 1, vec![(2, q(1))]).unwrap();
        b.set_bracket(1, 0, vec![(2, q(1))]).unwrap(); // should be -1
        assert!(b.build().validate().has(DefectKind::Antisymmetry));
    }

    #[test]
    fn lcs_three_step() {
        let g = three_step();
        assert!(g.validate().is_valid());
        assert_eq!(g.lcs_class(1, 10), LcsClass::Class(3));
        assert_eq!(g.lcs_class(0, 10), LcsClass::Class(2));
    }

    #[test]
    fn lcs_sentinel() {
        // [e, a] = a never terminates
        let s = space(&[("e", 0), ("a", 1)], 0, 1);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(0, 1, vec![(1, q(1))]).unwrap();
        assert_eq!(b.build().lcs_class(1, 6), LcsClass::NotNilpotentWithin(6));
    }

    #[test]
    fn simply_connected_terminates_quickly() {
        let g = odd_free();
        for n in 1..=2 {
            match g.lcs_class(n, 10) {
                LcsClass::Class(k) => assert!(k <= (n as usize) + 1),
                other => panic!("{other:?}"),
            }
        }
    }

    fn two_term() -> DgLie<Q> {
        let s = space(&[("b", 0), ("a", 1)], 0, 1);
        let mut b = DgLieBuilder::new(s);
        b.set_differential(1, vec![(0, q(1))]).unwrap();
        b.build()
    }

    #[test]
    fn covers() {
        let g = DgLie::<Q>::abelian(space(&[("a", 0), ("b", 1), ("c", 2)], 0, 2));
        let c = g.connected_cover(1).unwrap().algebra;
        assert_eq!((c.dim(0), c.dim(1), c.dim(2)), (0, 1, 1));
        let t = two_term().connected_cover(1).unwrap().algebra;
        assert_eq!(t.dim(1), 0);
        // idempotent
        let cc = c.connected_cover(1).unwrap().algebra;
        assert_eq!(cc, c);
        assert!(matches!(g.connected_cover(-1), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn cover_above_exact_window_is_zero() {
        let g = odd_free();
        let c = g.connected_cover(5).unwrap().algebra;
        assert_eq!(c.total_dim(), 0);
    }

    #[test]
    fn homology_two_term() {
        let h = two_term().homology().unwrap();
        assert_eq!(h.dim(0), Some(0));
        assert_eq!(h.dim(1), Some(0));
    }

    #[test]
    fn truncated_edges_are_untrusted() {
        let s = Arc::new(
            GradedSpace::new(
                Window::new(1, 3).unwrap(),
                true,
                false,
                [("a", 1), ("b", 2), ("c", 3)].map(|(n, d)| BasisElement { name: n.into(), degree: d }),
            )
            .unwrap(),
        );
        let h = DgLie::<Q>::abelian(s).homology().unwrap();
        assert_eq!(h.trusted_range(), Some((1, 2)));
    }

    #[test]
    fn broken_differential_is_reported() {
        let s = space(&[("c", 0), ("b", 1), ("a", 2)], 0, 2);
        let mut b = DgLieBuilder::new(s);
        b.set_differential(2, vec![(1, q(1))]).unwrap();
        b.set_differential(1, vec![(0, q(1))]).unwrap();
        let g = b.build();
        assert!(g.validate().has(DefectKind::DifferentialSquare));
        assert!(matches!(g.homology(), Err(Error::CompositionNotZero { degree: 1 })));
    }

    #[test]
    fn mc_and_twist() {
        // g_{-1} = <t>, g_{-2} = <u>, [t, t] = u, d = 0: t is not MC, 0 is
        let s = space(&[("u", -2), ("t", -1)], -2, -1);
        let mut b = DgLieBuilder::new(s);
        b.set_bracket(1, 1, vec![(0, q(2))]).unwrap();
        let g = b.build();
        assert!(g.validate().is_valid());
        assert!(g.mc_defect(&[]).is_empty());
        assert_eq!(g.mc_defect(&[(1, q(1))]), vec![(0, q(1))]);
        assert!(matches!(g.twist(&[(1, q(1))]), Err(Error::NotMaurerCartan(_))));
        assert_eq!(g.twist(&[]).unwrap(), g);
    }

    #[test]
    fn direct_sum_is_exact() {
        let a = odd_free();
        let b = two_term();
        let sum = DgLie::direct_sum(&a, &b).unwrap();
        assert!(sum.algebra.validate().is_valid());
        assert!(sum.inclusion.check().is_valid());
        assert!(sum.projection.check().is_valid());
        let report = short_exact_check(&sum.inclusion, &sum.projection).unwrap();
        assert!(report.is_exact());

        // drop one basis vector from the inclusion
        let mut cols = sum.inclusion.map.columns().to_vec();
        cols[1] = Vec::new();
        let broken = DgLieMorphism::new(sum.inclusion.source.clone(), sum.algebra.clone(), cols).unwrap();
        let report = short_exact_check(&broken, &sum.projection).unwrap();
        assert!(!report.is_exact());
        assert!(report.entries.iter().any(|e| !e.image_is_kernel));
    }

    #[test]
    fn cover_agrees_with_homology_above() {
        let s = space(&[("c", 0), ("b", 1), ("b2", 1), ("a", 2)], 0, 2);
        let mut b = DgLieBuilder::new(s);
        b.set_differential(3, vec![(2, q(1))]).unwrap();
        b.set_differential(1, vec![(0, q(1))]).unwrap();
        let g = b.build();
        assert!(g.validate().is_valid());
        let h = g.homology().unwrap();
        assert_eq!((h.dim(0), h.dim(1), h.dim(2)), (Some(0), Some(0), Some(0)));
        let c = g.connected_cover(1).unwrap().algebra;
        assert_eq!(c.dim(1), 1);
        let hc = c.homology().unwrap();
        assert_eq!(hc.dim(1), Some(0));
        assert_eq!(hc.dim(2), Some(0));
    }
}
