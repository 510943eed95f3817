//! The full and simplified models of `Baut∘(p)`, the comparison morphism
//! between them, and the rational homotopy report.
//!
//! The full model is `Hom^τ(C L, Π)⟨0⟩ ⋊ (Der L ⋉ sL)⟨1⟩` on unreduced chains,
//! or `Hom^τ(C̄ L, Π)⟨0⟩ ⋊ Der L⟨1⟩` on reduced chains (the based variant).
//! The simplified model replaces the chains by `H̃_*(X) = sV` with the trivial
//! coalgebra structure and `τ` by `ρ`.

use std::sync::Arc;

use crate::ce::CeComplex;
use crate::dgla::{short_exact_check, Cover, DgLie, DgLieMorphism, ExactnessReport, HomologyReport, ValidationReport};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, rank, LinComb, Matrix, Vector};
use crate::freelie::{Classifier, ClassifierPart, Derivations, QuillenModel, Shape};
use crate::graded::{koszul_sign, BasisElement, GradedMap, GradedSpace, Window};
use crate::scalar::Scalar;
use crate::twist::{
    hom_outer_action, twist_identity_check, Convolution, Extension, OuterAction, StructureAlgebra, TrivialCoalgebra,
    TwistIdentityReport,
};

/// Words with the sign applied when sorting their factors.
pub type AppliedSigns = Vec<(String, i64)>;

/// A rational cohomology class paired against `H̃_*(X)` and the element of
/// `Π` it is dual to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicClass<S> {
    pub name: String,
    pub degree: i32,
    /// Values on homology basis elements, named `sx` (or just `x`) for generator `x`.
    pub pairing: Vec<(String, S)>,
    pub pi_generator: String,
}

/// One term `coefficient · (word ↦ target)` of an explicit twisting function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTerm<S> {
    /// Basis elements of `L`, in any order.
    pub word: Vec<String>,
    pub target: String,
    pub coefficient: S,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Twisting<S> {
    Zero,
    Classes(Vec<CharacteristicClass<S>>),
    Explicit(Vec<ExplicitTerm<S>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Full,
    Simplified,
}

/// Everything needed to assemble a model.
#[derive(Debug, Clone)]
pub struct ModelSpec<S> {
    pub model: Arc<QuillenModel<S>>,
    pub structure: StructureAlgebra<S>,
    pub twisting: Twisting<S>,
    pub reduced: bool,
}

/// `ρ: H̃_*(X) -> Π` of degree `-1`.
#[derive(Debug, Clone)]
pub struct Rho<S> {
    pub homology: Arc<GradedSpace>,
    /// `ρ(e)` for each homology basis element.
    pub values: Vec<Vector<S>>,
}

/// `H̃_*(X) = sV`, one basis element `sx` per generator `x`.
pub fn reduced_homology<S: Scalar>(model: &QuillenModel<S>) -> Result<Arc<GradedSpace>> {
    let gens = model.generators();
    let lo = gens.iter().map(|g| g.degree + 1).min().unwrap_or(1);
    let hi = gens.iter().map(|g| g.degree + 1).max().unwrap_or(1);
    Ok(Arc::new(GradedSpace::finite(
        Window::new(lo, hi)?,
        gens.iter().map(|g| BasisElement { name: format!("s{}", g.name), degree: g.degree + 1 }),
    )?))
}

fn homology_index<S: Scalar>(model: &QuillenModel<S>, h: &GradedSpace, name: &str) -> Result<usize> {
    let gens = model.generators();
    let g = gens
        .iter()
        .find(|g| g.name == name || format!("s{}", g.name) == name)
        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
    Ok(h.index_of(&format!("s{}", g.name), g.degree + 1).expect("homology basis"))
}

/// `ρ(e) = Σ_i ⟨p_i, e⟩ π_i`.
pub fn char_class_rho<S: Scalar>(
    classes: &[CharacteristicClass<S>],
    model: &QuillenModel<S>,
    pi: &StructureAlgebra<S>,
) -> Result<Rho<S>> {
    let homology = reduced_homology(model)?;
    let ps = pi.algebra().space();
    let mut values: Vec<LinComb<S>> = (0..homology.total_dim()).map(|_| LinComb::new()).collect();
    for class in classes {
        let p = ps.find(&class.pi_generator).ok_or_else(|| Error::UnknownGenerator(class.pi_generator.clone()))?;
        if ps.degree(p) != class.degree - 1 {
            return Err(Error::DegreeMismatch(format!(
                "class `{}` of degree {} is paired with `{}` of degree {}, expected {}",
                class.name,
                class.degree,
                class.pi_generator,
                ps.degree(p),
                class.degree - 1
            )));
        }
        for (e, c) in &class.pairing {
            let i = homology_index(model, &homology, e)?;
            if homology.degree(i) != class.degree {
                return Err(Error::DegreeMismatch(format!(
                    "class `{}` of degree {} evaluated on `{}` of degree {}",
                    class.name,
                    class.degree,
                    e,
                    homology.degree(i)
                )));
            }
            values[i].add(p, c.clone());
        }
    }
    Ok(Rho { homology, values: values.into_iter().map(LinComb::into_vector).collect() })
}

/// Sorts a word of `L` basis elements into canonical order; returns the
/// sorted indices and the Koszul sign of the reordering, or `None` if the
/// word vanishes (a repeated factor of odd suspended degree).
pub fn normalize_word<S: Scalar>(lie: &DgLie<S>, word: &[String]) -> Result<Option<(Vec<usize>, i64)>> {
    let idx: Vec<usize> = word
        .iter()
        .map(|n| lie.space().find(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
        .collect::<Result<_>>()?;
    let mut perm: Vec<usize> = (0..idx.len()).collect();
    perm.sort_by_key(|&k| idx[k]);
    let degrees: Vec<i32> = idx.iter().map(|&x| lie.degree(x) + 1).collect();
    let sorted: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
    if sorted.windows(2).any(|w| w[0] == w[1] && (lie.degree(w[0]) + 1) % 2 != 0) {
        return Ok(None);
    }
    let sign = koszul_sign(&perm, &degrees)?;
    Ok(Some((sorted, sign)))
}

/// Which source basis element stands for each generator: the word `sx` in
/// chains, or `sx` in `H̃`; `None` past the top of the chain window.
fn generator_words<S: Scalar>(
    model: &QuillenModel<S>,
    source: &GradedSpace,
    chains: Option<&CeComplex<S>>,
) -> Vec<Option<usize>> {
    model
        .generators()
        .iter()
        .enumerate()
        .map(|(g, gen)| match chains {
            Some(c) => c.index_of(&[model.free().generator_basis(g)]),
            None => source.index_of(&format!("s{}", gen.name), gen.degree + 1),
        })
        .collect()
}

/// An assembled model together with the pieces used to build it.
#[derive(Debug, Clone)]
pub struct AssembledModel<S> {
    pub variant: Variant,
    pub reduced: bool,
    pub extension: Extension<S>,
    pub action: OuterAction<S>,
    pub action_report: ValidationReport,
    pub twist_identity: TwistIdentityReport,
    pub convolution: Convolution<S>,
    pub hom_cover: Cover<S>,
    pub tau: Vector<S>,
    /// Source basis element of the convolution algebra for each generator.
    pub generator_words: Vec<Option<usize>>,
    /// Twisting terms whose word was reordered, with the sign applied.
    pub applied_signs: AppliedSigns,
}

impl<S: Scalar> AssembledModel<S> {
    pub fn algebra(&self) -> &Arc<DgLie<S>> {
        &self.extension.algebra
    }

    /// `Hom^τ⟨0⟩`, the model of the fiber.
    pub fn fiber(&self) -> &Arc<DgLie<S>> {
        &self.extension.inclusion.source
    }

    /// The acting algebra, the model of the base.
    pub fn base(&self) -> &Arc<DgLie<S>> {
        &self.extension.projection.target
    }

    /// `τ` as `(source word, target, coefficient)` triples.
    pub fn twisting_terms(&self) -> Vec<(String, String, S)> {
        terms_of(&self.convolution, &self.tau)
    }
}

fn terms_of<S: Scalar>(conv: &Convolution<S>, v: &[(usize, S)]) -> Vec<(String, String, S)> {
    let pi = conv.structure().space();
    v.iter()
        .map(|(k, c)| {
            let (w, p) = conv.entry(*k);
            (conv.source().name(w).to_string(), pi.name(p).to_string(), c.clone())
        })
        .collect()
}

/// The twisting cochain on chains and its Maurer-Cartan defect
/// `∂τ + ½[τ, τ]`, both as `(word, target, coefficient)` triples.
#[derive(Debug, Clone)]
pub struct TwistingCheck<S> {
    pub tau: Vec<(String, String, S)>,
    pub defect: Vec<(String, String, S)>,
    pub applied_signs: AppliedSigns,
}

impl<S> TwistingCheck<S> {
    pub fn is_mc(&self) -> bool {
        self.defect.is_empty()
    }
}

pub fn twisting_check<S: Scalar>(spec: &ModelSpec<S>) -> Result<TwistingCheck<S>> {
    let chains = chains_for(spec)?;
    let conv = Convolution::new(&chains, &spec.structure, -2)?;
    let (tau, applied_signs) = twisting_on_chains(spec, &chains, &conv)?;
    let defect = conv.mc_defect(&tau);
    Ok(TwistingCheck { tau: terms_of(&conv, &tau), defect: terms_of(&conv, &defect), applied_signs })
}

/// Chains and a convolution algebra deep enough for the structure algebra.
fn chains_for<S: Scalar>(spec: &ModelSpec<S>) -> Result<CeComplex<S>> {
    let top = spec.structure.top().max(0);
    let lie = Arc::new(spec.model.algebra().clone());
    CeComplex::new(lie, top + 2, spec.reduced)
}

fn twisting_on_chains<S: Scalar>(
    spec: &ModelSpec<S>,
    chains: &CeComplex<S>,
    conv: &Convolution<S>,
) -> Result<(Vector<S>, AppliedSigns)> {
    match &spec.twisting {
        Twisting::Zero => Ok((Vec::new(), Vec::new())),
        Twisting::Classes(classes) => {
            let rho = char_class_rho(classes, &spec.model, &spec.structure)?;
            let words = generator_words(&spec.model, chains.space(), Some(chains));
            let h = &rho.homology;
            let mut values = Vec::new();
            for (g, gen) in spec.model.generators().iter().enumerate() {
                let e = h.index_of(&format!("s{}", gen.name), gen.degree + 1).expect("homology basis");
                if rho.values[e].is_empty() {
                    continue;
                }
                let w = words[g]
                    .ok_or_else(|| Error::WindowTooSmall(format!("s{} lies outside the chain window", gen.name)))?;
                values.push((w, rho.values[e].clone()));
            }
            Ok((conv.element(&values)?, Vec::new()))
        }
        Twisting::Explicit(terms) => {
            let lie = spec.model.algebra();
            let ps = spec.structure.algebra().space();
            let mut values = Vec::new();
            let mut signs = Vec::new();
            for t in terms {
                let p = ps.find(&t.target).ok_or_else(|| Error::UnknownGenerator(t.target.clone()))?;
                let Some((word, sign)) = normalize_word(lie, &t.word)? else {
                    signs.push((t.word.join("^"), 0));
                    continue;
                };
                if sign != 1 {
                    signs.push((t.word.join("^"), sign));
                }
                let w = chains.index_of(&word).ok_or_else(|| {
                    Error::WindowTooSmall(format!("word {} lies outside the chain window", t.word.join("^")))
                })?;
                values.push((w, vec![(p, t.coefficient.mul_ref(&S::from_int(sign)))]));
            }
            Ok((conv.element(&values)?, signs))
        }
    }
}

fn combine_maps<S: Scalar>(
    space: &Arc<GradedSpace>,
    degree: i32,
    column: &[(usize, S)],
    basis: impl Fn(usize) -> Result<GradedMap<S>>,
) -> Result<GradedMap<S>> {
    let mut out = GradedMap::zero(space.clone(), space.clone(), degree);
    for (k, c) in column {
        out = out.add(&basis(*k)?.scaled(c))?;
    }
    Ok(out)
}

struct Pieces<S> {
    conv: Convolution<S>,
    tau: Vector<S>,
    words: Vec<Option<usize>>,
    signs: AppliedSigns,
}

fn assemble<S, F>(
    variant: Variant,
    reduced: bool,
    pieces: Pieces<S>,
    acting_full: &DgLie<S>,
    chi: F,
) -> Result<AssembledModel<S>>
where
    S: Scalar,
    F: Fn(usize) -> Result<GradedMap<S>> + Sync,
{
    let Pieces { conv, tau, words, signs } = pieces;
    let defect = conv.mc_defect(&tau);
    if !defect.is_empty() {
        return Err(Error::NotMaurerCartan(conv.algebra().format_element(&defect)));
    }
    let acting_cover = acting_full.connected_cover(1)?;
    let acting = Arc::new(acting_cover.algebra.clone());
    let cols = acting_cover.inclusion.columns().to_vec();
    let source = conv.source().clone();
    let chi_cover = |x: usize| combine_maps(&source, acting.degree(x), &cols[x], &chi);
    let chis: Vec<GradedMap<S>> = (0..acting.total_dim()).map(chi_cover).collect::<Result<_>>()?;
    let lookup = |x: usize| Ok(chis[x].clone());

    let twisted = Arc::new(conv.twist_by(&tau)?);
    let hom_cover = twisted.connected_cover(0)?;
    let action = hom_outer_action(&conv, twisted, &tau, acting.clone(), lookup)?.restrict(None, Some(&hom_cover))?;
    let action_report = action.validate();
    let extension = action.semidirect_unchecked()?;
    let twist_identity = twist_identity_check(&conv, &tau, acting, lookup)?;
    Ok(AssembledModel {
        variant,
        reduced,
        extension,
        action,
        action_report,
        twist_identity,
        convolution: conv,
        hom_cover,
        tau,
        generator_words: words,
        applied_signs: signs,
    })
}

/// The full model: unreduced chains with `(Der L ⋉ sL)⟨1⟩`, or reduced
/// chains with `Der L⟨1⟩`.
pub fn full_model<S: Scalar>(spec: &ModelSpec<S>) -> Result<AssembledModel<S>> {
    let model = &spec.model;
    let chains = chains_for(spec)?;
    let conv = Convolution::new(&chains, &spec.structure, -2)?;
    let (tau, signs) = twisting_on_chains(spec, &chains, &conv)?;
    let words = generator_words(model, chains.space(), Some(&chains));
    let pieces = Pieces { conv, tau, words, signs };
    let der = Arc::new(Derivations::new(model)?);
    if spec.reduced {
        let chi = |k: usize| chains.chi_derivation(&der, k);
        assemble(Variant::Full, true, pieces, der.algebra(), chi)
    } else {
        let classifier = Classifier::new(model, der)?;
        let chi = |i: usize| match classifier.part(i) {
            ClassifierPart::Derivation(k) => chains.chi_derivation(&classifier.derivations, k),
            ClassifierPart::Suspension(z) => chains.chi_suspension(z),
        };
        assemble(Variant::Full, false, pieces, classifier.algebra(), chi)
    }
}

/// `θ̄(sx) = (-1)^|θ| s(linear part of θ(x))` on `H̃ = sV`.
fn induced_on_indecomposables<S: Scalar>(
    model: &QuillenModel<S>,
    der: &Derivations<S>,
    h: &Arc<GradedSpace>,
    k: usize,
) -> Result<GradedMap<S>> {
    let (g, e) = der.entry(k);
    let r = der.space().degree(k);
    let gens = model.generators();
    let mut columns = vec![Vec::new(); h.total_dim()];
    if let Shape::Generator(target) = model.free().shape(e) {
        let src = h.index_of(&format!("s{}", gens[g].name), gens[g].degree + 1).expect("homology basis");
        let dst = h.index_of(&format!("s{}", gens[target].name), gens[target].degree + 1).expect("homology basis");
        columns[src] = vec![(dst, S::sign(r as i64))];
    }
    GradedMap::new(h.clone(), h.clone(), r, columns)
}

/// `Hom(H̃, Π)⟨0⟩ ⋊_ρ Der L⟨1⟩`.
pub fn simplified_model<S: Scalar>(spec: &ModelSpec<S>) -> Result<AssembledModel<S>> {
    if !spec.structure.is_abelian() {
        return Err(Error::NonAbelianStructure);
    }
    let model = &spec.model;
    let rho = match &spec.twisting {
        Twisting::Zero => char_class_rho(&[], model, &spec.structure)?,
        Twisting::Classes(classes) => char_class_rho(classes, model, &spec.structure)?,
        Twisting::Explicit(_) => {
            return Err(Error::SpecMismatch("the simplified model needs characteristic classes".into()))
        }
    };
    let h = rho.homology.clone();
    let coalgebra = TrivialCoalgebra::new(h.clone());
    let conv = Convolution::new(&coalgebra, &spec.structure, -2)?;
    let values: Vec<(usize, Vector<S>)> = rho.values.iter().cloned().enumerate().collect();
    let tau = conv.element(&values)?;
    let words = generator_words(model, &h, None);
    let der = Derivations::new(model)?;
    let chi = |k: usize| induced_on_indecomposables(model, &der, &h, k);
    let pieces = Pieces { conv, tau, words, signs: Vec::new() };
    assemble(Variant::Simplified, true, pieces, der.algebra(), chi)
}

/// How the comparison morphism treats the Hom part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomPart {
    /// Precompose with the projection onto indecomposables.
    Indecomposables,
    /// The zero map, which is not a chain map once `ρ ≠ 0`.
    Zero,
}

#[derive(Debug, Clone)]
pub struct Comparison<S> {
    pub morphism: DgLieMorphism<S>,
    pub report: ValidationReport,
    pub simplified: HomologyReport,
    pub full: HomologyReport,
    /// Degrees trusted on both sides where the induced map is an isomorphism.
    pub isomorphic_in: Vec<i32>,
    /// Degrees trusted on both sides where it is not.
    pub failing_in: Vec<i32>,
}

impl<S> Comparison<S> {
    pub fn is_morphism(&self) -> bool {
        self.report.is_valid()
    }

    pub fn is_quasi_isomorphism(&self) -> bool {
        self.is_morphism() && self.failing_in.is_empty()
    }
}

/// `g* ⋊ 1` from the simplified model to the reduced full model.
pub fn comparison_morphism<S: Scalar>(
    simplified: &AssembledModel<S>,
    full: &AssembledModel<S>,
    hom: HomPart,
    max_degree: i32,
) -> Result<Comparison<S>> {
    if simplified.variant != Variant::Simplified || full.variant != Variant::Full || !full.reduced {
        return Err(Error::SpecMismatch("comparison runs from the simplified model to the reduced full model".into()));
    }
    let (gs, gf) = (simplified.base(), full.base());
    if gs.space() != gf.space() || simplified.generator_words.len() != full.generator_words.len() {
        return Err(Error::SpecMismatch("the two models act by different derivation algebras".into()));
    }
    if simplified.convolution.structure().space() != full.convolution.structure().space() {
        return Err(Error::SpecMismatch("the two models use different structure algebras".into()));
    }
    let src = simplified.algebra();
    let tgt = full.algebra();
    let mut columns = vec![Vec::new(); src.total_dim()];
    let sconv = &simplified.convolution;
    let fconv = &full.convolution;
    for (a, na) in simplified.extension.target_map.iter().enumerate() {
        let Some(na) = *na else { continue };
        if hom == HomPart::Zero {
            continue;
        }
        let f = simplified.hom_cover.inclusion.column(a);
        let mut acc = LinComb::new();
        for (k, c) in f {
            let (w, p) = sconv.entry(*k);
            let g = simplified.generator_words.iter().position(|&x| x == Some(w)).expect("generator");
            let t = full.generator_words[g]
                .and_then(|fw| fconv.index_of(fw, p))
                .ok_or_else(|| Error::SpecMismatch("convolution windows of the two models differ".into()))?;
            acc.add(t, c.clone());
        }
        let lifted = full.hom_cover.map.lift(&acc.into_vector())?;
        columns[na] = crate::dgla::remap(&lifted, &full.extension.target_map);
    }
    for (x, nx) in simplified.extension.acting_map.iter().enumerate() {
        let (Some(nx), Some(fx)) = (*nx, full.extension.acting_map[x]) else {
            continue;
        };
        columns[nx] = vec![(fx, S::one())];
    }
    if src.window() != tgt.window() {
        return Err(Error::SpecMismatch(format!("windows {} and {} differ", src.window(), tgt.window())));
    }
    let morphism = DgLieMorphism::new(src.clone(), tgt.clone(), columns)?;
    let report = morphism.check();
    let hs = src.homology_over(0, max_degree)?;
    let hf = tgt.homology_over(0, max_degree)?;
    let mut isomorphic_in = Vec::new();
    let mut failing_in = Vec::new();
    for e in &hs.entries {
        let Some(f) = hf.entries.iter().find(|f| f.degree == e.degree) else {
            continue;
        };
        if !(e.trusted && f.trusted) {
            continue;
        }
        let r = induced_rank(&morphism, e.degree)?;
        if e.dim == f.dim && r == e.dim {
            isomorphic_in.push(e.degree);
        } else {
            failing_in.push(e.degree);
        }
    }
    Ok(Comparison { morphism, report, simplified: hs, full: hf, isomorphic_in, failing_in })
}

/// Rank of the map induced on homology in degree `n`.
pub fn induced_rank<S: Scalar>(f: &DgLieMorphism<S>, n: i32) -> Result<usize> {
    let src = &f.source;
    let tgt = &f.target;
    let (soff, toff) = (src.space().offset(n), tgt.space().offset(n));
    let rows = tgt.dim(n);
    let boundaries: Vec<Vector<S>> = tgt.d_block(n + 1).columns().to_vec();
    let cycles = kernel_basis(&src.d_block(n));
    let images: Vec<Vector<S>> = cycles
        .iter()
        .map(|z| {
            let global: Vector<S> = z.iter().map(|(i, c)| (i + soff, c.clone())).collect();
            f.apply(&global).into_iter().map(|(i, c)| (i - toff, c)).collect()
        })
        .collect();
    let b = rank(&Matrix::from_columns(rows, boundaries.clone()));
    let mut all = boundaries;
    all.extend(images);
    Ok(rank(&Matrix::from_columns(rows, all)) - b)
}

/// One row of the homotopy table: `π_{n+1} ⊗ Q ≅ H_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomotopyRow {
    pub degree: i32,
    pub total: usize,
    pub fiber: usize,
    pub base: usize,
    pub trusted: bool,
}

impl HomotopyRow {
    pub fn homotopy_degree(&self) -> i32 {
        self.degree + 1
    }
}

#[derive(Debug, Clone)]
pub struct HomotopyReport {
    pub rows: Vec<HomotopyRow>,
    pub exactness: ExactnessReport,
    /// Alternating sums agree over the trusted range; `None` when the range
    /// does not start and end with vanishing homology.
    pub euler_consistent: Option<bool>,
    pub validation: ValidationReport,
}

impl HomotopyReport {
    pub fn trusted(&self) -> impl Iterator<Item = &HomotopyRow> {
        self.rows.iter().filter(|r| r.trusted)
    }

    /// Largest degree `n` with trusted homology.
    pub fn trusted_up_to(&self) -> Option<i32> {
        self.trusted().map(|r| r.degree).max()
    }
}

/// Homology of total space, fiber and base in degrees `0..=max_degree`.
pub fn rational_homotopy_report<S: Scalar>(model: &AssembledModel<S>, max_degree: i32) -> Result<HomotopyReport> {
    let total = model.algebra().homology_over(0, max_degree)?;
    let fiber = model.fiber().homology_over(0, max_degree)?;
    let base = model.base().homology_over(0, max_degree)?;
    let lookup = |r: &HomologyReport, n: i32| r.entries.iter().find(|e| e.degree == n).map(|e| (e.dim, e.trusted));
    let fiber_space = model.fiber().space();
    let base_space = model.base().space();
    let rows: Vec<HomotopyRow> = total
        .entries
        .iter()
        .map(|e| {
            let (f, ft) = lookup(&fiber, e.degree)
                .unwrap_or((0, fiber_space.knows(e.degree + 1) && fiber_space.knows(e.degree - 1)));
            let (b, bt) = lookup(&base, e.degree)
                .unwrap_or((0, base_space.knows(e.degree + 1) && base_space.knows(e.degree - 1)));
            HomotopyRow { degree: e.degree, total: e.dim, fiber: f, base: b, trusted: e.trusted && ft && bt }
        })
        .collect();
    let exactness = short_exact_check(&model.extension.inclusion, &model.extension.projection)?;
    let trusted: Vec<&HomotopyRow> = rows.iter().filter(|r| r.trusted).collect();
    let euler_consistent = match (trusted.first(), trusted.last()) {
        (Some(a), Some(b)) if [a, b].iter().all(|r| r.total == 0 && r.fiber == 0 && r.base == 0) => {
            let sum: i64 = trusted
                .iter()
                .map(|r| {
                    let s = if r.degree % 2 == 0 { 1 } else { -1 };
                    s * (r.total as i64 - r.fiber as i64 - r.base as i64)
                })
                .sum();
            Some(sum == 0)
        }
        _ => None,
    };
    let mut validation = model.algebra().validate();
    validation.merge(model.action_report.clone());
    Ok(HomotopyReport { rows, exactness, euler_consistent, validation })
}

/// `H_n(C̄ L)` against `H̃_n(X)` in trusted degrees: `(degree, chains, expected)`.
pub fn indecomposables_check<S: Scalar>(model: &QuillenModel<S>, hi: i32) -> Result<Vec<(i32, usize, usize)>> {
    let chains = CeComplex::new(Arc::new(model.algebra().clone()), hi, true)?;
    let h = reduced_homology(model)?;
    Ok(chains.homology()?.trusted().map(|e| (e.degree, e.dim, h.dim(e.degree))).collect())
}
