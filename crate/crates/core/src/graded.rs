//! Graded vector spaces over a degree window, graded linear maps, and Koszul
//! signs.
//!
//! Gradings are homological throughout: differentials have degree `-1` and
//! the suspension `s` has degree `+1`, so `(sV)_n = V_{n-1}`.
//!
//! A space only stores the degrees inside its [`Window`]. Each edge of the
//! window is either *exact* (the space is known to vanish beyond it) or
//! *truncated* (there may be more, uncomputed, elements beyond it). All
//! consumers use [`GradedSpace::knows`] to decide whether an out-of-window
//! degree is a true zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactla::{LinComb, Matrix, Vector};
use crate::scalar::{koszul, Scalar};

/// Inclusive range of degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::WindowTooSmall(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, n: i32) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
}

/// A graded vector space with named basis elements in a window.
///
/// Basis elements are numbered globally, degree by degree; within a degree
/// they keep the order they were supplied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    window: Window,
    lo_exact: bool,
    hi_exact: bool,
    elements: Vec<BasisElement>,
    ranges: BTreeMap<i32, Range<usize>>,
    lookup: HashMap<(i32, String), usize>,
}

impl GradedSpace {
    /// Builds a space; elements are stably sorted by degree.
    pub fn new(
        window: Window,
        lo_exact: bool,
        hi_exact: bool,
        elements: impl IntoIterator<Item = BasisElement>,
    ) -> Result<Self> {
        let mut elements: Vec<BasisElement> = elements.into_iter().collect();
        elements.sort_by_key(|e| e.degree);
        let mut ranges = BTreeMap::new();
        let mut lookup = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if !window.contains(e.degree) {
                return Err(Error::WindowTooSmall(format!(
                    "basis element `{}` of degree {} lies outside {window}",
                    e.name, e.degree
                )));
            }
            if lookup.insert((e.degree, e.name.clone()), i).is_some() {
                return Err(Error::SpaceMismatch(format!("duplicate basis name `{}` in degree {}", e.name, e.degree)));
            }
            ranges.entry(e.degree).or_insert(i..i).end = i + 1;
        }
        Ok(GradedSpace { window, lo_exact, hi_exact, elements, ranges, lookup })
    }

    /// A space that is known to be exactly the given elements.
    pub fn finite(window: Window, elements: impl IntoIterator<Item = BasisElement>) -> Result<Self> {
        Self::new(window, true, true, elements)
    }

    pub fn zero(window: Window) -> Self {
        Self::new(window, true, true, []).expect("empty space")
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn lo_exact(&self) -> bool {
        self.lo_exact
    }

    pub fn hi_exact(&self) -> bool {
        self.hi_exact
    }

    pub fn is_bounded(&self) -> bool {
        self.lo_exact && self.hi_exact
    }

    /// Whether degree `n` is fully known: inside the window, or beyond an
    /// exact edge (where the space is zero).
    pub fn knows(&self, n: i32) -> bool {
        self.window.contains(n) || (n < self.window.lo && self.lo_exact) || (n > self.window.hi && self.hi_exact)
    }

    pub fn dim(&self, n: i32) -> usize {
        self.ranges.get(&n).map_or(0, |r| r.len())
    }

    pub fn total_dim(&self) -> usize {
        self.elements.len()
    }

    pub fn range(&self, n: i32) -> Range<usize> {
        self.ranges.get(&n).cloned().unwrap_or(0..0)
    }

    pub fn offset(&self, n: i32) -> usize {
        self.range(n).start
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.elements[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].name
    }

    /// Index of the first basis element of degree at least `n`.
    pub fn first_at_least(&self, n: i32) -> usize {
        self.elements.partition_point(|e| e.degree < n)
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn index_of(&self, name: &str, degree: i32) -> Option<usize> {
        self.lookup.get(&(degree, name.to_string())).copied()
    }

    /// Looks a name up in any degree; names may repeat across degrees, in
    /// which case the lowest degree wins.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    /// Degrees with at least one basis element.
    pub fn occupied_degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.ranges.keys().copied()
    }

    /// The suspension `sV`, with names prefixed by `s`.
    pub fn suspend(&self) -> Result<Self> {
        GradedSpace::new(
            Window::new(self.window.lo + 1, self.window.hi + 1)?,
            self.lo_exact,
            self.hi_exact,
            self.elements.iter().map(|e| BasisElement { name: format!("s{}", e.name), degree: e.degree + 1 }),
        )
    }

    /// Restricts to a sub-window; edges become truncated where elements were dropped.
    pub fn restrict(&self, window: Window) -> Result<(Self, Vec<Option<usize>>)> {
        let mut map = Vec::with_capacity(self.elements.len());
        let mut kept = Vec::new();
        let mut dropped_below = false;
        let mut dropped_above = false;
        for e in &self.elements {
            if window.contains(e.degree) {
                map.push(Some(kept.len()));
                kept.push(e.clone());
            } else {
                map.push(None);
                if e.degree < window.lo {
                    dropped_below = true;
                } else {
                    dropped_above = true;
                }
            }
        }
        if (window.lo < self.window.lo && !self.lo_exact) || (window.hi > self.window.hi && !self.hi_exact) {
            return Err(Error::WindowTooSmall(format!(
                "cannot widen {} to {window} across a truncated edge",
                self.window
            )));
        }
        let lo_exact = !dropped_below && self.lo_exact;
        let hi_exact = !dropped_above && self.hi_exact;
        Ok((GradedSpace::new(window, lo_exact, hi_exact, kept)?, map))
    }
}

/// The widest window on which every space is known: the union of their
/// windows, clipped at each truncated edge.
pub fn common_window(spaces: &[&GradedSpace]) -> Result<Window> {
    let lo_all = spaces.iter().map(|s| s.window.lo).min().unwrap_or(0);
    let hi_all = spaces.iter().map(|s| s.window.hi).max().unwrap_or(0);
    let lo = spaces.iter().filter(|s| !s.lo_exact).map(|s| s.window.lo).fold(lo_all, i32::max);
    let hi = spaces.iter().filter(|s| !s.hi_exact).map(|s| s.window.hi).fold(hi_all, i32::min);
    if lo > hi {
        return Err(Error::WindowTooSmall(format!("truncated windows have no common degree ({lo} > {hi})")));
    }
    Window::new(lo, hi)
}

/// `+1`/`-1` sign of reordering graded elements.
///
/// The permuted sequence is `(x[perm[0]], x[perm[1]], ...)`; each pair of
/// elements that changes relative order contributes `(-1)^(|a||b|)`.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<i64> {
    if perm.len() != degrees.len() {
        return Err(Error::LengthMismatch { what: "permutation vs degrees", left: perm.len(), right: degrees.len() });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::LengthMismatch { what: "permutation is not a bijection", left: p, right: perm.len() });
        }
    }
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign *= koszul(degrees[perm[i]], degrees[perm[j]]);
            }
        }
    }
    Ok(sign)
}

/// A homogeneous linear map of fixed degree between graded spaces.
///
/// Stored as one sparse column per source basis element, with target global
/// indices. `truncated` records that some image left the target window and
/// was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap<S> {
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    degree: i32,
    columns: Vec<Vector<S>>,
    truncated: bool,
}

impl<S: Scalar> GradedMap<S> {
    /// Builds a map from per-element images. Images whose degree is not in
    /// the target window are dropped; the map is flagged truncated if such a
    /// degree is not known to be zero.
    pub fn new(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        columns: Vec<Vector<S>>,
    ) -> Result<Self> {
        if columns.len() != source.total_dim() {
            return Err(Error::LengthMismatch {
                what: "graded map columns",
                left: columns.len(),
                right: source.total_dim(),
            });
        }
        let mut truncated = false;
        let mut cols = Vec::with_capacity(columns.len());
        for (j, c) in columns.into_iter().enumerate() {
            let td = source.degree(j) + degree;
            if !target.window().contains(td) {
                if !target.knows(td) {
                    truncated = true;
                }
                cols.push(Vec::new());
                continue;
            }
            for (i, _) in &c {
                if *i >= target.total_dim() || target.degree(*i) != td {
                    return Err(Error::DegreeMismatch(format!(
                        "image of `{}` has a component of the wrong degree",
                        source.name(j)
                    )));
                }
            }
            cols.push(c);
        }
        Ok(GradedMap { source, target, degree, columns: cols, truncated })
    }

    pub fn zero(source: Arc<GradedSpace>, target: Arc<GradedSpace>, degree: i32) -> Self {
        let n = source.total_dim();
        GradedMap::new(source, target, degree, vec![Vec::new(); n]).expect("zero map")
    }

    pub fn identity(space: Arc<GradedSpace>) -> Self {
        let cols = (0..space.total_dim()).map(|i| vec![(i, S::one())]).collect();
        GradedMap { source: space.clone(), target: space, degree: 0, columns: cols, truncated: false }
    }

    /// The suspension `s: V -> sV` and desuspension `s^{-1}: sV -> V`.
    pub fn suspension(space: Arc<GradedSpace>) -> Result<(Arc<GradedSpace>, Self, Self)> {
        let sv = Arc::new(space.suspend()?);
        let cols: Vec<Vector<S>> = (0..space.total_dim()).map(|i| vec![(i, S::one())]).collect();
        let s =
            GradedMap { source: space.clone(), target: sv.clone(), degree: 1, columns: cols.clone(), truncated: false };
        let desusp = GradedMap { source: sv.clone(), target: space, degree: -1, columns: cols, truncated: false };
        Ok((sv, s, desusp))
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector<S>] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn apply(&self, v: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (j, x) in v {
            acc.add_scaled(&self.columns[*j], x);
        }
        acc.into_vector()
    }

    /// The block from `source_n` to `target_{n+degree}` in local indices.
    pub fn block(&self, n: i32) -> Matrix<S> {
        let src = self.source.range(n);
        let tgt = self.target.range(n + self.degree);
        let cols = src.map(|j| self.columns[j].iter().map(|(i, x)| (i - tgt.start, x.clone())).collect()).collect();
        Matrix::from_columns(tgt.len(), cols)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap<S>) -> Result<GradedMap<S>> {
        if other.target != self.source {
            return Err(Error::SpaceMismatch("target of the inner map differs from source of the outer map".into()));
        }
        let mut truncated = self.truncated || other.truncated;
        for n in other.source.occupied_degrees() {
            let mid = n + other.degree;
            if !other.target.window().contains(mid) && !other.target.knows(mid) {
                truncated = true;
            }
            let end = mid + self.degree;
            if other.target.window().contains(mid) && !self.target.window().contains(end) && !self.target.knows(end) {
                truncated = true;
            }
        }
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        Ok(GradedMap {
            source: other.source.clone(),
            target: self.target.clone(),
            degree: self.degree + other.degree,
            columns,
            truncated,
        })
    }

    pub fn scaled(&self, c: &S) -> Self {
        let columns = self.columns.iter().map(|col| crate::exactla::scale(col, c)).collect();
        GradedMap { columns, ..self.clone() }
    }

    pub fn add(&self, other: &GradedMap<S>) -> Result<Self> {
        if self.source != other.source || self.target != other.target || self.degree != other.degree {
            return Err(Error::SpaceMismatch("cannot add maps between different spaces".into()));
        }
        let columns = self.columns.iter().zip(&other.columns).map(|(a, b)| crate::exactla::add(a, b)).collect();
        Ok(GradedMap { columns, truncated: self.truncated || other.truncated, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn el(name: &str, degree: i32) -> BasisElement {
        BasisElement { name: name.into(), degree }
    }

    fn two_term() -> Arc<GradedSpace> {
        Arc::new(GradedSpace::finite(Window::new(0, 1).unwrap(), [el("b", 0), el("a", 1)]).unwrap())
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 3, 2]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 3]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]).unwrap(), 1);
        assert!(matches!(koszul_sign(&[0, 1], &[1]), Err(Error::LengthMismatch { .. })));
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
    }

    #[test]
    fn identity_is_neutral() {
        let v = two_term();
        let d = GradedMap::<Q>::new(v.clone(), v.clone(), -1, vec![vec![], vec![(0, Q::from_int(3))]]).unwrap();
        let id = GradedMap::identity(v);
        assert_eq!(id.compose(&d).unwrap(), d);
        assert_eq!(d.compose(&id).unwrap(), d);
        assert!(d.compose(&d).unwrap().is_zero());
    }

    #[test]
    fn suspension_round_trip() {
        let v = two_term();
        let (sv, s, desusp) = GradedMap::<Q>::suspension(v.clone()).unwrap();
        assert_eq!(sv.degree(sv.find("sa").unwrap()), 2);
        assert_eq!(s.compose(&desusp).unwrap(), GradedMap::identity(sv));
        assert_eq!(desusp.compose(&s).unwrap(), GradedMap::identity(v));
    }

    #[test]
    fn truncated_images_are_flagged() {
        let src = Arc::new(GradedSpace::finite(Window::new(0, 0).unwrap(), [el("x", 0)]).unwrap());
        let tgt = Arc::new(GradedSpace::new(Window::new(0, 0).unwrap(), true, false, [el("y", 0)]).unwrap());
        let up = GradedMap::<Q>::new(src, tgt, 1, vec![vec![]]).unwrap();
        assert!(up.is_truncated());
    }

    #[test]
    fn blocks_use_local_indices() {
        let v = two_term();
        let d = GradedMap::<Q>::new(v.clone(), v, -1, vec![vec![], vec![(0, Q::from_int(1))]]).unwrap();
        let b = d.block(1);
        assert_eq!((b.rows(), b.cols()), (1, 1));
        assert_eq!(b.get(0, 0), Q::from_int(1));
    }

    fn perm_and_degrees() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<i32>)> {
        (1usize..7).prop_flat_map(|k| {
            (
                Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(-3i32..5, k),
            )
        })
    }

    proptest! {
        #[test]
        fn koszul_is_multiplicative((p, q, deg) in perm_and_degrees()) {
            let permuted: Vec<i32> = p.iter().map(|&i| deg[i]).collect();
            let composite: Vec<usize> = q.iter().map(|&i| p[i]).collect();
            let lhs = koszul_sign(&composite, &deg).unwrap();
            let rhs = koszul_sign(&p, &deg).unwrap() * koszul_sign(&q, &permuted).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_is_associative(a in proptest::collection::vec(-3i64..4, 4)) {
            let v = Arc::new(GradedSpace::finite(Window::new(0, 0).unwrap(), [el("p", 0), el("q", 0)]).unwrap());
            let m = |x: i64, y: i64| GradedMap::<Q>::new(
                v.clone(), v.clone(), 0,
                vec![vec![(0, Q::from_int(x)), (1, Q::from_int(y))].into_iter().filter(|(_, c)| *c != Q::from_int(0)).collect(),
                     vec![(1, Q::from_int(1))]],
            ).unwrap();
            let (f, g, h) = (m(a[0], a[1]), m(a[2], a[3]), m(a[1], a[2]));
            prop_assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        }
    }
}
