//! Chevalley–Eilenberg chains `C(L)` of a Quillen model.
//!
//! Basis words are sorted multisets `sx_1 ∧ … ∧ sx_k` of suspended basis
//! elements of `L`, with no repeated factor of odd suspended degree. Every
//! coderivation is determined by its corestriction `φ: C(L) -> sL` through
//!
//! ```text
//! D(w) = Σ_S ε(S) φ(w_S) ∧ w_{S^c}
//! ```
//!
//! where `S` runs over subsets of factor positions and `ε(S)` is the Koszul
//! sign of the unshuffle. The differential has `φ(sx) = -s dx` and
//! `φ(sx ∧ sy) = (-1)^|x| s[x, y]`.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap as HashMap;

use crate::dgla::{DgLie, HomologyEntry, HomologyReport};
use crate::error::{Error, Result};
use crate::exactla::{homology_dim_at, LinComb, Matrix, Vector};
use crate::freelie::{Classifier, ClassifierPart, Derivations, QuillenModel, Shape};
use crate::graded::{BasisElement, GradedMap, GradedSpace, Window};
use crate::scalar::{parity, Scalar};

/// A basis word: indices into the basis of `L`, non-decreasing.
pub type CeWord = Vec<usize>;

#[derive(Debug, Clone)]
pub struct CeComplex<S> {
    lie: Arc<DgLie<S>>,
    reduced: bool,
    space: Arc<GradedSpace>,
    words: Vec<CeWord>,
    index: HashMap<CeWord, usize>,
    coproducts: Vec<Vec<(usize, usize, S)>>,
    differential: GradedMap<S>,
}

impl<S: Scalar> CeComplex<S> {
    /// Chains in degrees `0..=hi`; `reduced` drops the empty word.
    pub fn new(lie: Arc<DgLie<S>>, hi: i32, reduced: bool) -> Result<Self> {
        let l = lie.space().clone();
        if l.window().lo < 1 {
            return Err(Error::NotConnected);
        }
        if !l.knows(hi - 1) {
            return Err(Error::WindowTooSmall(format!(
                "chains up to degree {hi} need L up to degree {}, window is {}",
                hi - 1,
                l.window()
            )));
        }
        let sdeg = |x: usize| l.degree(x) + 1;
        let top = l.first_at_least(hi);
        let mut words: Vec<CeWord> = Vec::new();
        let mut stack: Vec<(CeWord, i32)> = vec![(Vec::new(), 0)];
        while let Some((w, d)) = stack.pop() {
            let start = match w.last() {
                Some(&x) if parity(sdeg(x)) == 1 => x + 1,
                Some(&x) => x,
                None => 0,
            };
            for x in start..top {
                if d + sdeg(x) > hi {
                    break;
                }
                let mut next = w.clone();
                next.push(x);
                stack.push((next, d + sdeg(x)));
            }
            if !(reduced && w.is_empty()) {
                words.push(w);
            }
        }
        let degree_of = |w: &CeWord| w.iter().map(|&x| sdeg(x)).sum::<i32>();
        words.sort_by(|a, b| degree_of(a).cmp(&degree_of(b)).then_with(|| a.cmp(b)));

        // finite exactly when every factor is odd and all of them fit
        let finite = l.hi_exact() && (0..l.total_dim()).all(|x| parity(sdeg(x)) == 1) && {
            let total: i32 = (0..l.total_dim()).map(sdeg).sum();
            total <= hi
        };
        let elements: Vec<BasisElement> =
            words.iter().map(|w| BasisElement { name: word_name(&lie, w), degree: degree_of(w) }).collect();
        let space = Arc::new(GradedSpace::new(Window::new(0, hi.max(0))?, true, finite, elements)?);
        let index: HashMap<CeWord, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut ce = CeComplex {
            lie,
            reduced,
            space: space.clone(),
            words,
            index,
            coproducts: Vec::new(),
            differential: GradedMap::zero(space.clone(), space, -1),
        };
        ce.coproducts = (0..ce.words.len()).into_par_iter().map(|i| ce.compute_coproduct(i)).collect();
        let lie = ce.lie.clone();
        ce.differential = ce.coderivation(-1, &[1, 2], |part| match part {
            [x] => crate::exactla::scale(lie.differential_of(*x), &-S::one()),
            [x, y] => crate::exactla::scale(&lie.bracket_basis(*x, *y), &S::sign(lie.degree(*x) as i64)),
            _ => Vec::new(),
        })?;
        Ok(ce)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn lie(&self) -> &Arc<DgLie<S>> {
        &self.lie
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn index_of(&self, w: &[usize]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn differential(&self) -> &GradedMap<S> {
        &self.differential
    }

    fn sdeg(&self, x: usize) -> i32 {
        self.lie.degree(x) + 1
    }

    /// `sx ∧ w` as a signed basis word, or `None` when it vanishes.
    fn wedge_front(&self, x: usize, w: &[usize]) -> Option<(CeWord, i64)> {
        let p = w.partition_point(|&y| y < x);
        let odd = parity(self.sdeg(x)) == 1;
        if odd && w.get(p) == Some(&x) {
            return None;
        }
        let passed: i32 = w[..p].iter().map(|&y| self.sdeg(y)).sum();
        let sign = if odd && parity(passed) == 1 { -1 } else { 1 };
        let mut out = Vec::with_capacity(w.len() + 1);
        out.extend_from_slice(&w[..p]);
        out.push(x);
        out.extend_from_slice(&w[p..]);
        Some((out, sign))
    }

    /// Splits `w` by the subset `mask`; returns `(w_S, w_{S^c}, ε(S))`.
    fn split(&self, w: &[usize], mask: u64) -> (CeWord, CeWord, i64) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut right_degree = 0i32;
        let mut sign = 1i64;
        for (i, &x) in w.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if parity(self.sdeg(x)) * parity(right_degree) == 1 {
                    sign = -sign;
                }
                left.push(x);
            } else {
                right_degree += self.sdeg(x);
                right.push(x);
            }
        }
        (left, right, sign)
    }

    fn compute_coproduct(&self, i: usize) -> Vec<(usize, usize, S)> {
        let w = &self.words[i];
        let k = w.len();
        let full = (1u64 << k) - 1;
        let mut acc: HashMap<(usize, usize), i64> = HashMap::default();
        for mask in 0..=full {
            if self.reduced && (mask == 0 || mask == full) {
                continue;
            }
            let (l, r, s) = self.split(w, mask);
            *acc.entry((self.index[&l], self.index[&r])).or_insert(0) += s;
        }
        let mut out: Vec<(usize, usize, S)> =
            acc.into_iter().filter(|(_, c)| *c != 0).map(|((a, b), c)| (a, b, S::from_int(c))).collect();
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    /// `Δ(w)` as `(left, right, coefficient)` triples; reduced complexes use
    /// the reduced coproduct.
    pub fn coproduct(&self, i: usize) -> &[(usize, usize, S)] {
        &self.coproducts[i]
    }

    /// The coderivation of degree `degree` with corestriction `phi`, which is
    /// evaluated only on sub-words whose length is listed in `lengths` and
    /// returns `y` for the value `s y`.
    pub fn coderivation<F>(&self, degree: i32, lengths: &[usize], phi: F) -> Result<GradedMap<S>>
    where
        F: Fn(&[usize]) -> Vector<S> + Sync,
    {
        if self.reduced && lengths.contains(&0) {
            return Err(Error::SpaceMismatch("reduced chains have no empty word to append to".into()));
        }
        let window = self.space.window();
        let columns: Vec<Vector<S>> = (0..self.words.len())
            .into_par_iter()
            .map(|i| {
                let w = &self.words[i];
                if !window.contains(self.space.degree(i) + degree) {
                    return Vec::new();
                }
                let mut acc = LinComb::new();
                for_each_subset(w.len(), lengths, |mask| {
                    let (part, rest, sign) = self.split(w, mask);
                    let value = phi(&part);
                    for (y, c) in &value {
                        if let Some((word, s)) = self.wedge_front(*y, &rest) {
                            if let Some(&k) = self.index.get(&word) {
                                acc.add(k, c.mul_ref(&S::from_int(s * sign)));
                            }
                        }
                    }
                });
                acc.into_vector()
            })
            .collect();
        GradedMap::new(self.space.clone(), self.space.clone(), degree, columns)
    }

    /// Rechecks `d² = 0` on every word whose image is known.
    pub fn d_squared_defects(&self) -> Vec<usize> {
        (0..self.words.len())
            .filter(|&i| {
                let d = self.space.degree(i);
                self.space.knows(d - 2) && !self.differential.apply(self.differential.column(i)).is_empty()
            })
            .collect()
    }

    /// Degrees `n` where `(ε ⊗ 1)Δ`, `(1 ⊗ ε)Δ` or coassociativity fails.
    ///
    /// The counit check only applies to unreduced chains.
    pub fn coalgebra_defects(&self) -> Vec<usize> {
        let empty = self.index.get(&Vec::new()).copied();
        (0..self.words.len())
            .into_par_iter()
            .filter(|&i| {
                let delta = &self.coproducts[i];
                if let Some(e) = empty {
                    let left: Vector<S> =
                        crate::exactla::vector_from(delta.iter().filter(|t| t.0 == e).map(|t| (t.1, t.2.clone())));
                    let right: Vector<S> =
                        crate::exactla::vector_from(delta.iter().filter(|t| t.1 == e).map(|t| (t.0, t.2.clone())));
                    let unit = vec![(i, S::one())];
                    if left != unit || right != unit {
                        return true;
                    }
                }
                let mut lhs: HashMap<(usize, usize, usize), S> = HashMap::default();
                let mut rhs: HashMap<(usize, usize, usize), S> = HashMap::default();
                for (a, b, c) in delta {
                    for (a1, a2, c1) in &self.coproducts[*a] {
                        *lhs.entry((*a1, *a2, *b)).or_insert_with(S::zero) += c.mul_ref(c1);
                    }
                    for (b1, b2, c2) in &self.coproducts[*b] {
                        *rhs.entry((*a, *b1, *b2)).or_insert_with(S::zero) += c.mul_ref(c2);
                    }
                }
                lhs.retain(|_, v| !v.is_zero());
                rhs.retain(|_, v| !v.is_zero());
                lhs != rhs
            })
            .collect()
    }

    /// Homology in each degree, with trust flags.
    pub fn homology(&self) -> Result<HomologyReport> {
        let entries: Result<Vec<HomologyEntry>> = self
            .space
            .window()
            .degrees()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|n| {
                let dim = homology_dim_at(&self.differential.block(n), &self.differential.block(n + 1), n)?;
                Ok(HomologyEntry { degree: n, dim, trusted: self.space.knows(n + 1) && self.space.knows(n - 1) })
            })
            .collect();
        Ok(HomologyReport { entries: entries? })
    }

    /// The universal twisting function `τ_L(sx) = x`, as its values on words.
    pub fn universal_twisting(&self) -> Vec<Vector<S>> {
        self.words.iter().map(|w| if w.len() == 1 { vec![(w[0], S::one())] } else { Vec::new() }).collect()
    }

    /// `∂τ + ½[τ, τ]` for a degree `-1` map `τ: C -> L`, evaluated on every
    /// word where all terms are known.
    pub fn twisting_defect(&self, tau: &[Vector<S>]) -> Vec<(usize, Vector<S>)> {
        let l = &self.lie;
        let half = S::half();
        (0..self.words.len())
            .into_par_iter()
            .filter_map(|i| {
                let n = self.space.degree(i);
                if !self.space.knows(n - 1) || !l.space().knows(n - 2) {
                    return None;
                }
                let mut acc = LinComb::new();
                acc.add_vector(&l.d(&tau[i]));
                for (j, c) in self.differential.column(i) {
                    acc.add_scaled(&tau[*j], c);
                }
                for (a, b, c) in &self.coproducts[i] {
                    if tau[*a].is_empty() || tau[*b].is_empty() {
                        continue;
                    }
                    let sign = S::sign(self.space.degree(*a) as i64);
                    acc.add_scaled(&l.bracket(&tau[*a], &tau[*b]), &(half.mul_ref(c).mul_ref(&sign)));
                }
                let v = acc.into_vector();
                (!v.is_empty()).then_some((i, v))
            })
            .collect()
    }

    /// `χ(θ)` for a basis derivation: `φ(sx) = (-1)^|θ| s θ(x)`.
    pub fn chi_derivation(&self, der: &Derivations<S>, k: usize) -> Result<GradedMap<S>> {
        let r = der.space().degree(k);
        let action = der.action(k);
        let sign = S::sign(r as i64);
        self.coderivation(r, &[1], |part| crate::exactla::scale(action.column(part[0]), &sign))
    }

    /// `χ(0, sz)`: appends `sz`.
    pub fn chi_suspension(&self, z: usize) -> Result<GradedMap<S>> {
        self.coderivation(self.lie.degree(z) + 1, &[0], |_| vec![(z, S::one())])
    }

    /// `χ` on a basis element of `Der L ⋉ sL`.
    pub fn chi(&self, classifier: &Classifier<S>, i: usize) -> Result<GradedMap<S>> {
        match classifier.part(i) {
            ClassifierPart::Derivation(k) => self.chi_derivation(&classifier.derivations, k),
            ClassifierPart::Suspension(z) => self.chi_suspension(z),
        }
    }

    /// Checks `Δ D = (D ⊗ 1 + 1 ⊗ D) Δ` for a map of the given degree.
    pub fn is_coderivation(&self, map: &GradedMap<S>) -> bool {
        let r = map.degree();
        (0..self.words.len()).into_par_iter().all(|i| {
            let n = self.space.degree(i);
            if !self.space.knows(n + r) {
                return true;
            }
            let mut lhs: HashMap<(usize, usize), S> = HashMap::default();
            for (j, c) in map.column(i) {
                for (a, b, c2) in &self.coproducts[*j] {
                    *lhs.entry((*a, *b)).or_insert_with(S::zero) += c.mul_ref(c2);
                }
            }
            let mut rhs: HashMap<(usize, usize), S> = HashMap::default();
            for (a, b, c) in &self.coproducts[i] {
                for (a2, c2) in map.column(*a) {
                    *rhs.entry((*a2, *b)).or_insert_with(S::zero) += c.mul_ref(c2);
                }
                let s = S::sign(r as i64 * self.space.degree(*a) as i64);
                for (b2, c2) in map.column(*b) {
                    *rhs.entry((*a, *b2)).or_insert_with(S::zero) += c.mul_ref(c2).mul_ref(&s);
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            lhs == rhs
        })
    }

    /// The graded commutator `[D, E] = DE - (-1)^{|D||E|} ED` of two maps.
    pub fn commutator(&self, a: &GradedMap<S>, b: &GradedMap<S>) -> Result<GradedMap<S>> {
        let ab = a.compose(b)?;
        let ba = b.compose(a)?;
        ab.add(&ba.scaled(&S::from_int(-crate::scalar::koszul(a.degree(), b.degree()))))
    }

    /// The indecomposables projection `g_L: C̄(L) -> sV`.
    pub fn indecomposables_projection(&self, model: &QuillenModel<S>) -> Result<IndecomposablesProjection<S>> {
        if !self.reduced {
            return Err(Error::SpaceMismatch("g_L is defined on reduced chains".into()));
        }
        if let Some(w) = model.warnings().first() {
            return Err(Error::NotMinimal(w.clone()));
        }
        let gens = model.generators();
        let target = Arc::new(GradedSpace::new(
            self.space.window(),
            true,
            true,
            gens.iter().map(|g| BasisElement { name: format!("s{}", g.name), degree: g.degree + 1 }),
        )?);
        let mut columns = Vec::with_capacity(self.words.len());
        for w in &self.words {
            let col = match w.as_slice() {
                [x] => match model.free().shape(*x) {
                    Shape::Generator(g) => {
                        let name = format!("s{}", gens[g].name);
                        vec![(target.index_of(&name, gens[g].degree + 1).expect("generator"), S::one())]
                    }
                    Shape::Bracket(..) => Vec::new(),
                },
                _ => Vec::new(),
            };
            columns.push(col);
        }
        let map = GradedMap::new(self.space.clone(), target, 0, columns)?;
        let chain_map = (0..self.words.len()).all(|i| map.apply(self.differential.column(i)).is_empty());
        Ok(IndecomposablesProjection { map, chain_map })
    }

    /// Matrix of `d` from degree `n` to `n - 1`.
    pub fn d_block(&self, n: i32) -> Matrix<S> {
        self.differential.block(n)
    }
}

/// `g_L` with its chain map certificate.
#[derive(Debug, Clone)]
pub struct IndecomposablesProjection<S> {
    pub map: GradedMap<S>,
    pub chain_map: bool,
}

fn word_name<S: Scalar>(lie: &DgLie<S>, w: &[usize]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|&x| format!("s{}", lie.name(x))).collect::<Vec<_>>().join("^")
}

/// Calls `f` on every bitmask over `k` positions whose popcount is in `lengths`.
fn for_each_subset(k: usize, lengths: &[usize], mut f: impl FnMut(u64)) {
    for &len in lengths {
        if len > k {
            continue;
        }
        if len == 0 {
            f(0);
            continue;
        }
        // Gosper's hack over fixed popcount
        let mut mask: u64 = (1u64 << len) - 1;
        while mask < (1u64 << k) {
            f(mask);
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::{Generator, Monomial};
    use crate::Q;

    fn model(gens: &[(&str, i32)], diff: &[(&str, &str)], hi: i32) -> QuillenModel<Q> {
        let g = gens.iter().map(|(n, d)| Generator::new(*n, *d)).collect();
        let d: Vec<(String, Vec<(Q, Monomial)>)> =
            diff.iter().map(|(n, e)| (n.to_string(), crate::freelie::parse_combination(e).unwrap())).collect();
        QuillenModel::new(g, &d, hi, false).unwrap()
    }

    fn chains(m: &QuillenModel<Q>, hi: i32, reduced: bool) -> CeComplex<Q> {
        CeComplex::new(Arc::new(m.algebra().clone()), hi, reduced).unwrap()
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(4, &[0, 2], |m| seen.push(m));
        assert_eq!(seen.len(), 7);
        assert!(seen.iter().all(|m| m.count_ones() == 0 || m.count_ones() == 2));
    }

    #[test]
    fn two_sphere() {
        let m = model(&[("x", 1)], &[], 6);
        let c = chains(&m, 6, false);
        let sx = c.index_of(&[0]).unwrap();
        let sxsx = c.index_of(&[0, 0]).unwrap();
        assert!(c.differential().column(sx).is_empty());
        assert!(!c.differential().column(sxsx).is_empty());
        assert!(c.d_squared_defects().is_empty());
        assert!(c.coalgebra_defects().is_empty());
        let empty = c.index_of(&[]).unwrap();
        assert_eq!(c.coproduct(empty), &[(empty, empty, Q::from_int(1))]);
        assert_eq!(c.coproduct(sx).len(), 2);

        let r = chains(&m, 6, true);
        assert!(r.coproduct(r.index_of(&[0]).unwrap()).is_empty());
        let h = r.homology().unwrap();
        let dims: Vec<_> = h.trusted().map(|e| (e.degree, e.dim)).collect();
        assert_eq!(dims, vec![(0, 0), (1, 0), (2, 1), (3, 0), (4, 0), (5, 0)]);
        assert!(r.twisting_defect(&r.universal_twisting()).is_empty());
    }

    #[test]
    fn abelian_has_zero_differential() {
        let lie = DgLie::<Q>::abelian(Arc::new(
            GradedSpace::finite(
                Window::new(1, 3).unwrap(),
                [("a", 1), ("b", 2), ("c", 3)].map(|(n, d)| BasisElement { name: n.into(), degree: d }),
            )
            .unwrap(),
        ));
        let c = CeComplex::new(Arc::new(lie), 8, false).unwrap();
        assert!(c.differential().is_zero());
        assert!(c.coalgebra_defects().is_empty());
        let r = CeComplex::new(c.lie().clone(), 8, true).unwrap();
        assert!(r.twisting_defect(&r.universal_twisting()).is_empty());
    }

    #[test]
    fn projective_plane() {
        let m = model(&[("x", 1), ("y", 3)], &[("y", "-1/2*[x,x]")], 10);
        let c = chains(&m, 10, true);
        assert!(c.d_squared_defects().is_empty());
        assert!(c.coalgebra_defects().is_empty());
        assert!(c.twisting_defect(&c.universal_twisting()).is_empty());
        let h = c.homology().unwrap();
        let nonzero: Vec<_> = h.trusted().filter(|e| e.dim > 0).map(|e| (e.degree, e.dim)).collect();
        assert_eq!(nonzero, vec![(2, 1), (4, 1)]);
        let g = c.indecomposables_projection(&m).unwrap();
        assert!(g.chain_map);
        let doubled: Vec<Vector<Q>> =
            c.universal_twisting().iter().map(|v| crate::exactla::scale(v, &Q::from_int(2))).collect();
        assert!(!c.twisting_defect(&doubled).is_empty());
    }

    #[test]
    fn chi_is_a_coderivation_and_chain_map() {
        let m = model(&[("x", 1), ("y", 3)], &[("y", "-1/2*[x,x]")], 7);
        let der = Arc::new(Derivations::new(&m).unwrap());
        let cl = Classifier::new(&m, der).unwrap();
        let c = chains(&m, 7, false);
        let g = cl.algebra();
        let d = c.differential();
        let chis: Vec<GradedMap<Q>> = (0..g.total_dim()).map(|i| c.chi(&cl, i).unwrap()).collect();
        for (i, chi) in chis.iter().enumerate() {
            assert!(c.is_coderivation(chi), "{}", g.name(i));
            // χ(∂x) = [d, χ(x)]
            let lhs = combine(&c, &chis, g.differential_of(i), chi.degree() - 1);
            let rhs = c.commutator(d, chi).unwrap();
            assert_eq!(known_columns(&c, &lhs), known_columns(&c, &rhs), "chain map at {}", g.name(i));
        }
        for i in 0..g.total_dim() {
            for j in i..g.total_dim() {
                let deg = g.degree(i) + g.degree(j);
                if !g.window().contains(deg) {
                    continue;
                }
                let lhs = combine(&c, &chis, &g.bracket_basis(i, j), deg);
                let rhs = c.commutator(&chis[i], &chis[j]).unwrap();
                assert_eq!(known_columns(&c, &lhs), known_columns(&c, &rhs), "bracket ({}, {})", g.name(i), g.name(j));
            }
        }
    }

    fn combine(c: &CeComplex<Q>, chis: &[GradedMap<Q>], v: &[(usize, Q)], degree: i32) -> GradedMap<Q> {
        let mut out = GradedMap::zero(c.space().clone(), c.space().clone(), degree);
        for (k, x) in v {
            out = out.add(&chis[*k].scaled(x)).unwrap();
        }
        out
    }

    /// Columns whose source degree leaves room for every intermediate term.
    fn known_columns(c: &CeComplex<Q>, m: &GradedMap<Q>) -> Vec<Vector<Q>> {
        let hi = c.space().window().hi;
        (0..c.space().total_dim())
            .map(|i| {
                let d = c.space().degree(i);
                if d + 4 <= hi {
                    m.column(i).to_vec()
                } else {
                    Vec::new()
                }
            })
            .collect()
    }

    #[test]
    fn tau_is_a_module_map() {
        // τ ∘ χ(θ) = (-1)^|θ| θ ∘ τ on length-one words
        let m = model(&[("x", 1), ("y", 2)], &[], 6);
        let der = Derivations::new(&m).unwrap();
        let c = chains(&m, 6, true);
        let tau = c.universal_twisting();
        for k in 0..der.space().total_dim() {
            let chi = c.chi_derivation(&der, k).unwrap();
            let r = der.space().degree(k);
            for i in 0..c.space().total_dim() {
                if c.space().degree(i) + r > 6 {
                    continue;
                }
                let mut lhs = LinComb::new();
                for (j, x) in chi.column(i) {
                    lhs.add_scaled(&tau[*j], x);
                }
                let rhs = crate::exactla::scale(&der.action(k).apply(&tau[i]), &Q::sign(r as i64));
                assert_eq!(lhs.into_vector(), rhs);
            }
        }
    }
}
