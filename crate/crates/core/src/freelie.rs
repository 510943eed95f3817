//! Free graded Lie algebras, Quillen models and their derivation algebras.
//!
//! A free graded Lie algebra on named generators is realized inside the
//! tensor algebra. Its basis consists of the standard bracketings of Lyndon
//! words together with the squares `[P(u), P(u)]` of odd-degree Lyndon words
//! `u`. Each basis element has a distinct leading (lexicographically least)
//! word in its tensor expansion, which makes normal forms a triangular solve.
//! The bracket table is filled from generator rows computed in the tensor
//! algebra and the Jacobi identity for the remaining rows.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::dgla::{sum_space, DgLie, DgLieBuilder};
use crate::error::{Error, Result};
use crate::exactla::{self, LinComb, Vector};
use crate::graded::{BasisElement, GradedMap, GradedSpace, Window};
use crate::scalar::{koszul, parity, Scalar};

const LETTER_BITS: usize = 4;
const MAX_GENERATORS: usize = 1 << LETTER_BITS;
const MAX_WORD_LEN: usize = (128 - 8) / LETTER_BITS;

/// A word in the generators, packed so that integer order is lexicographic order.
///
/// Letters are stored left-aligned in the high bits, the length in the low byte.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Word(u128);

impl Word {
    fn letter(l: usize) -> Word {
        Word(((l as u128) << (128 - LETTER_BITS)) | 1)
    }

    fn len(self) -> usize {
        (self.0 & 0xff) as usize
    }

    fn bits(self) -> u128 {
        self.0 & !0xff
    }

    fn concat(self, other: Word) -> Word {
        let len = self.len() + other.len();
        debug_assert!(len <= MAX_WORD_LEN);
        Word(self.bits() | (other.bits() >> (LETTER_BITS * self.len())) | len as u128)
    }

    fn prefix(self, len: usize) -> Word {
        let keep = if len == 0 { 0 } else { !0u128 << (128 - LETTER_BITS * len) };
        Word((self.0 & keep) | len as u128)
    }

    fn suffix(self, start: usize) -> Word {
        Word((self.bits() << (LETTER_BITS * start)) | (self.len() - start) as u128)
    }

    fn letters(self) -> impl Iterator<Item = usize> {
        (0..self.len()).map(move |i| ((self.0 >> (128 - LETTER_BITS * (i + 1))) & 0xf) as usize)
    }
}

/// A homogeneous tensor with integer coefficients, sorted by word.
type Tensor = Vec<(Word, i64)>;
type Entry<S> = ((usize, usize), Vector<S>);

fn overflow() -> Error {
    Error::CapacityExceeded("tensor coefficient overflow".into())
}

fn tensor_mul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (u, x) in a {
        for (v, y) in b {
            out.push((u.concat(*v), x.checked_mul(*y).ok_or_else(overflow)?));
        }
    }
    out.sort_unstable_by_key(|e| e.0);
    Ok(out)
}

/// `a + sign * b`.
fn tensor_combine(a: &Tensor, sign: i64, b: &Tensor) -> Result<Tensor> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, sign * b[j].1));
            j += 1;
        } else {
            let c = a[i].1.checked_add(sign * b[j].1).ok_or_else(overflow)?;
            if c != 0 {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Generator { name: name.into(), degree }
    }
}

/// How a basis element is built from earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Generator(usize),
    Bracket(usize, usize),
}

/// A fully parenthesized bracket of generator names, such as `[x,[x,y]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Monomial {
    Generator(String),
    Bracket(Box<Monomial>, Box<Monomial>),
}

impl Monomial {
    pub fn bracket(a: Monomial, b: Monomial) -> Monomial {
        Monomial::Bracket(Box::new(a), Box::new(b))
    }

    pub fn generator(name: impl Into<String>) -> Monomial {
        Monomial::Generator(name.into())
    }

    /// Number of generator occurrences.
    pub fn length(&self) -> usize {
        match self {
            Monomial::Generator(_) => 1,
            Monomial::Bracket(a, b) => a.length() + b.length(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monomial::Generator(n) => f.write_str(n),
            Monomial::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '[' | ']' | ',' | '+' | '*')
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let m = parse_monomial(&chars, &mut pos).ok_or_else(|| Error::BadBracket(s.to_string()))?;
        if pos != chars.len() {
            return Err(Error::BadBracket(s.to_string()));
        }
        Ok(m)
    }
}

fn parse_monomial(c: &[char], pos: &mut usize) -> Option<Monomial> {
    if c.get(*pos) == Some(&'[') {
        *pos += 1;
        let a = parse_monomial(c, pos)?;
        if c.get(*pos) != Some(&',') {
            return None;
        }
        *pos += 1;
        let b = parse_monomial(c, pos)?;
        if c.get(*pos) != Some(&']') {
            return None;
        }
        *pos += 1;
        Some(Monomial::bracket(a, b))
    } else {
        let start = *pos;
        // a leading '-' belongs to the coefficient, never to a name
        while *pos < c.len() && is_name_char(c[*pos]) && !(c[*pos] == '-' && *pos == start) {
            *pos += 1;
        }
        (*pos > start).then(|| Monomial::Generator(c[start..*pos].iter().collect()))
    }
}

/// Parses a rational combination such as `2*[x,[x,y]] - 1/2*[y,y] + x`.
pub fn parse_combination<S: Scalar>(s: &str) -> Result<Vec<(S, Monomial)>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes: Vec<char> = s.chars().collect();
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' | '-' if depth == 0 && i > start && bytes[i - 1] != '/' && bytes[i - 1] != '*' => {
                terms.push(bytes[start..i].iter().collect::<String>());
                start = i;
            }
            _ => {}
        }
    }
    terms.push(bytes[start..].iter().collect());
    terms
        .into_iter()
        .map(|t| {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, t.strip_prefix('+').unwrap_or(&t).to_string()),
            };
            let (coef, mono) = match body.split_once('*') {
                Some((c, m)) => (S::parse_rational(c).ok_or_else(|| Error::BadBracket(t.clone()))?, m.to_string()),
                None => (S::one(), body),
            };
            let coef = if neg { -coef } else { coef };
            Ok((coef, mono.parse()?))
        })
        .collect()
}

/// The free graded Lie algebra on finitely many generators, up to a degree.
#[derive(Debug, Clone)]
pub struct FreeLie<S> {
    generators: Vec<Generator>,
    algebra: DgLie<S>,
    shapes: Vec<Shape>,
    generator_index: Vec<usize>,
    tensors: Vec<Tensor>,
    leading: HashMap<Word, usize>,
}

impl<S: Scalar> FreeLie<S> {
    /// Builds the basis and bracket table in degrees `1..=hi`.
    pub fn new(generators: Vec<Generator>, hi: i32) -> Result<Self> {
        check_generators(&generators, hi)?;
        let deg = |w: Word| -> i32 { w.letters().map(|l| generators[l].degree).sum() };

        // Lyndon words by degree: letters, and u·v for Lyndon u < v
        let mut lyndon: BTreeMap<i32, Vec<Word>> = BTreeMap::new();
        for n in 1..=hi {
            let mut set = BTreeSet::new();
            for (g, gen) in generators.iter().enumerate() {
                if gen.degree == n {
                    set.insert(Word::letter(g));
                }
            }
            for a in 1..n {
                for u in &lyndon[&a] {
                    for v in &lyndon[&(n - a)] {
                        if u < v {
                            set.insert(u.concat(*v));
                        }
                    }
                }
            }
            lyndon.insert(n, set.into_iter().collect());
        }
        let lyndon_set: BTreeSet<Word> = lyndon.values().flatten().copied().collect();

        let mut index_of_word: HashMap<Word, usize> = HashMap::default();
        let mut shapes = Vec::new();
        let mut elements = Vec::new();
        let mut leading_words = Vec::new();
        for n in 1..=hi {
            let mut entries: Vec<(Word, Shape)> = Vec::new();
            for &w in &lyndon[&n] {
                let shape = if w.len() == 1 {
                    Shape::Generator(w.letters().next().unwrap())
                } else {
                    let cut = (1..w.len()).find(|&k| lyndon_set.contains(&w.suffix(k))).unwrap();
                    Shape::Bracket(index_of_word[&w.prefix(cut)], index_of_word[&w.suffix(cut)])
                };
                entries.push((w, shape));
            }
            if n % 2 == 0 && parity(n / 2) == 1 {
                for &u in &lyndon[&(n / 2)] {
                    let i = index_of_word[&u];
                    entries.push((u.concat(u), Shape::Bracket(i, i)));
                }
            }
            entries.sort_by_key(|e| e.0);
            for (w, shape) in entries {
                let name = match shape {
                    Shape::Generator(g) => generators[g].name.clone(),
                    Shape::Bracket(p, q) => {
                        format!("[{},{}]", elements_name(&elements, p), elements_name(&elements, q))
                    }
                };
                debug_assert_eq!(deg(w), n);
                index_of_word.insert(w, elements.len());
                elements.push(BasisElement { name, degree: n });
                shapes.push(shape);
                leading_words.push(w);
            }
        }

        let mut tensors: Vec<Tensor> = Vec::with_capacity(shapes.len());
        for (b, shape) in shapes.iter().enumerate() {
            let t = match *shape {
                Shape::Generator(g) => vec![(Word::letter(g), 1)],
                Shape::Bracket(p, q) => {
                    let s = -koszul(elements[p].degree, elements[q].degree);
                    tensor_combine(&tensor_mul(&tensors[p], &tensors[q])?, s, &tensor_mul(&tensors[q], &tensors[p])?)?
                }
            };
            let expected = if matches!(*shape, Shape::Bracket(p, q) if p == q) { 2 } else { 1 };
            if t.first() != Some(&(leading_words[b], expected)) {
                return Err(Error::InvalidDgLie(format!(
                    "free Lie basis element {} is not triangular",
                    elements[b].name
                )));
            }
            tensors.push(t);
        }
        let leading: HashMap<Word, usize> = leading_words.iter().enumerate().map(|(i, w)| (*w, i)).collect();

        let maxgen = generators.iter().map(|g| g.degree).max().unwrap_or(1);
        let bounded = ((hi - maxgen + 1)..=hi).all(|n| elements.iter().all(|e| e.degree != n));
        let space = Arc::new(GradedSpace::new(Window::new(1, hi)?, true, bounded, elements)?);
        let generator_index =
            (0..generators.len()).map(|g| shapes.iter().position(|s| *s == Shape::Generator(g)).unwrap()).collect();

        let mut free =
            FreeLie { generators, algebra: DgLie::abelian(space.clone()), shapes, generator_index, tensors, leading };
        free.algebra = free.bracket_table()?;
        Ok(free)
    }

    fn bracket_table(&self) -> Result<DgLie<S>> {
        let space = self.algebra.space().clone();
        let hi = space.window().hi;
        let mut table: HashMap<(usize, usize), Vector<S>> = HashMap::default();
        let lookup = |table: &HashMap<(usize, usize), Vector<S>>, i: usize, j: usize, c: &S, acc: &mut LinComb<S>| {
            if i <= j {
                if let Some(v) = table.get(&(i, j)) {
                    acc.add_scaled(v, c);
                }
            } else if let Some(v) = table.get(&(j, i)) {
                let s = S::from_int(-koszul(space.degree(i), space.degree(j)));
                acc.add_scaled(v, &s.mul_ref(c));
            }
        };
        let bracket_with = |table: &HashMap<(usize, usize), Vector<S>>, i: usize, z: &[(usize, S)]| {
            let mut acc = LinComb::new();
            for (m, c) in z {
                lookup(table, i, *m, c, &mut acc);
            }
            acc.into_vector()
        };
        for n in 2..=hi {
            for d in 1..=n / 2 {
                let rows: Result<Vec<Vec<Entry<S>>>> = space
                    .range(d)
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|a| {
                        let ys = if 2 * d == n { a..space.range(d).end } else { space.range(n - d) };
                        let mut out = Vec::new();
                        for y in ys {
                            let v = match self.shapes[a] {
                                Shape::Generator(_) => {
                                    let s = -koszul(d, n - d);
                                    let t = tensor_combine(
                                        &tensor_mul(&self.tensors[a], &self.tensors[y])?,
                                        s,
                                        &tensor_mul(&self.tensors[y], &self.tensors[a])?,
                                    )?;
                                    self.reduce(t)?
                                }
                                Shape::Bracket(p, q) => {
                                    let mut acc = LinComb::new();
                                    let mut qy = LinComb::new();
                                    lookup(&table, q, y, &S::one(), &mut qy);
                                    acc.add_vector(&bracket_with(&table, p, &qy.into_vector()));
                                    let mut py = LinComb::new();
                                    lookup(&table, p, y, &S::one(), &mut py);
                                    let s = S::from_int(-koszul(space.degree(p), space.degree(q)));
                                    acc.add_scaled(&bracket_with(&table, q, &py.into_vector()), &s);
                                    acc.into_vector()
                                }
                            };
                            if !v.is_empty() {
                                out.push(((a, y), v));
                            }
                        }
                        Ok(out)
                    })
                    .collect();
                for row in rows? {
                    table.extend(row);
                }
            }
        }
        let mut b = DgLieBuilder::new(space);
        for ((i, j), v) in table {
            b.set_bracket(i, j, v)?;
        }
        Ok(b.build())
    }

    /// Triangular solve of a tensor against the basis tensors.
    fn reduce(&self, t: Tensor) -> Result<Vector<S>> {
        let mut residual: BTreeMap<Word, i128> = t.into_iter().map(|(w, c)| (w, c as i128)).collect();
        let mut denominator: i64 = 1;
        let mut out = LinComb::new();
        while let Some((&w, &c)) = residual.iter().next() {
            let b = *self.leading.get(&w).ok_or_else(|| Error::NotInSpan("tensor is not a Lie element".into()))?;
            let lead = self.tensors[b][0].1 as i128;
            if c % lead != 0 {
                for v in residual.values_mut() {
                    *v = v.checked_mul(lead).ok_or_else(overflow)?;
                }
                denominator = denominator.checked_mul(lead as i64).ok_or_else(overflow)?;
                continue;
            }
            let coef = c / lead;
            for (w2, x) in &self.tensors[b] {
                let e = residual.entry(*w2).or_insert(0);
                *e = e.checked_sub(coef.checked_mul(*x as i128).ok_or_else(overflow)?).ok_or_else(overflow)?;
                if *e == 0 {
                    residual.remove(w2);
                }
            }
            let coef = i64::try_from(coef).map_err(|_| overflow())?;
            out.add(b, S::from_int(coef) / S::from_int(denominator));
        }
        Ok(out.into_vector())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// The graded Lie algebra with zero differential.
    pub fn algebra(&self) -> &DgLie<S> {
        &self.algebra
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.algebra.space()
    }

    pub fn shape(&self, i: usize) -> Shape {
        self.shapes[i]
    }

    /// Basis index of generator `g`.
    pub fn generator_basis(&self, g: usize) -> usize {
        self.generator_index[g]
    }

    /// Basis index of the generator named `name`, or `UnknownGenerator`.
    pub fn generator_by_name(&self, name: &str) -> Result<usize> {
        self.generators.iter().position(|g| g.name == name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// True when the algebra is known to vanish above its window.
    pub fn is_bounded(&self) -> bool {
        self.space().hi_exact()
    }

    /// Basis dimension in each degree of the window.
    pub fn dims(&self) -> Vec<usize> {
        self.space().window().degrees().map(|n| self.space().dim(n)).collect()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Result<i32> {
        match m {
            Monomial::Generator(n) => Ok(self.generators[self.generator_by_name(n)?].degree),
            Monomial::Bracket(a, b) => Ok(self.monomial_degree(a)? + self.monomial_degree(b)?),
        }
    }

    /// Coordinates of a bracket monomial in the basis, using the bracket table.
    pub fn normal_form(&self, m: &Monomial) -> Result<Vector<S>> {
        let d = self.monomial_degree(m)?;
        if !self.space().knows(d) {
            return Err(Error::WindowTooSmall(format!(
                "monomial {m} has degree {d}, beyond {}",
                self.space().window()
            )));
        }
        Ok(self.eval(m))
    }

    fn eval(&self, m: &Monomial) -> Vector<S> {
        match m {
            Monomial::Generator(n) => {
                vec![(self.generator_index[self.generator_by_name(n).expect("checked")], S::one())]
            }
            Monomial::Bracket(a, b) => self.algebra.bracket(&self.eval(a), &self.eval(b)),
        }
    }

    /// Coordinates of a bracket monomial computed independently through its
    /// expansion in the tensor algebra.
    pub fn tensor_normal_form(&self, m: &Monomial) -> Result<Vector<S>> {
        let d = self.monomial_degree(m)?;
        if !self.space().window().contains(d) {
            return if self.space().knows(d) {
                Ok(Vec::new())
            } else {
                Err(Error::WindowTooSmall(format!("monomial {m} has degree {d}")))
            };
        }
        self.reduce(self.tensor_of(m)?)
    }

    fn tensor_of(&self, m: &Monomial) -> Result<Tensor> {
        match m {
            Monomial::Generator(n) => Ok(vec![(Word::letter(self.generator_by_name(n)?), 1)]),
            Monomial::Bracket(a, b) => {
                let (ta, tb) = (self.tensor_of(a)?, self.tensor_of(b)?);
                let s = -koszul(self.monomial_degree(a)?, self.monomial_degree(b)?);
                tensor_combine(&tensor_mul(&ta, &tb)?, s, &tensor_mul(&tb, &ta)?)
            }
        }
    }

    /// Evaluates a rational combination of monomials.
    pub fn combination(&self, terms: &[(S, Monomial)]) -> Result<Vector<S>> {
        let mut acc = LinComb::new();
        for (c, m) in terms {
            acc.add_scaled(&self.normal_form(m)?, c);
        }
        Ok(acc.into_vector())
    }

    /// The unique degree-`r` derivation with the given values on generators.
    pub fn extend_derivation(&self, values: &[Vector<S>], r: i32) -> Result<GradedMap<S>> {
        if values.len() != self.generators.len() {
            return Err(Error::LengthMismatch {
                what: "derivation values",
                left: values.len(),
                right: self.generators.len(),
            });
        }
        let space = self.space();
        for (g, v) in values.iter().enumerate() {
            let target = self.generators[g].degree + r;
            if !space.knows(target) {
                return Err(Error::WindowTooSmall(format!(
                    "value on {} has degree {target}, beyond {}",
                    self.generators[g].name,
                    space.window()
                )));
            }
            if v.iter().any(|(i, _)| space.degree(*i) != target) {
                return Err(Error::DegreeMismatch(format!(
                    "value on {} is not of degree {target}",
                    self.generators[g].name
                )));
            }
        }
        let window = space.window();
        let mut image: Vec<Vector<S>> = Vec::with_capacity(space.total_dim());
        for b in 0..space.total_dim() {
            if !window.contains(space.degree(b) + r) {
                image.push(Vec::new());
                continue;
            }
            let v = match self.shapes[b] {
                Shape::Generator(g) => values[g].clone(),
                Shape::Bracket(p, q) => {
                    let t1 = self.algebra.bracket(&image[p], &[(q, S::one())]);
                    let t2 = self.algebra.bracket(&[(p, S::one())], &image[q]);
                    exactla::axpy(&t1, &S::sign(r as i64 * space.degree(p) as i64), &t2)
                }
            };
            image.push(v);
        }
        GradedMap::new(space.clone(), space.clone(), r, image)
    }
}

fn elements_name(elements: &[BasisElement], i: usize) -> &str {
    &elements[i].name
}

fn check_generators(generators: &[Generator], hi: i32) -> Result<()> {
    for g in generators {
        if g.degree < 1 {
            return Err(Error::DegreeZeroGenerator(g.name.clone(), g.degree));
        }
        if g.name.is_empty() || !g.name.chars().all(is_name_char) || g.name.starts_with('-') {
            return Err(Error::BadBracket(format!("invalid generator name `{}`", g.name)));
        }
    }
    let names: BTreeSet<&str> = generators.iter().map(|g| g.name.as_str()).collect();
    if names.len() != generators.len() {
        return Err(Error::SpecMismatch("duplicate generator names".into()));
    }
    if generators.len() > MAX_GENERATORS {
        return Err(Error::CapacityExceeded(format!("at most {MAX_GENERATORS} generators are supported")));
    }
    let mindeg = generators.iter().map(|g| g.degree).min().unwrap_or(1);
    let maxdeg = generators.iter().map(|g| g.degree).max().unwrap_or(1);
    if hi < maxdeg {
        return Err(Error::WindowTooSmall(format!("window top {hi} is below generator degree {maxdeg}")));
    }
    if (hi / mindeg) as usize > MAX_WORD_LEN {
        return Err(Error::CapacityExceeded(format!("words longer than {MAX_WORD_LEN} letters")));
    }
    Ok(())
}

/// A minimal (or merely free) Quillen model `(L(V), δ)`.
#[derive(Debug, Clone)]
pub struct QuillenModel<S> {
    free: FreeLie<S>,
    algebra: DgLie<S>,
    delta: Vec<Vector<S>>,
    warnings: Vec<String>,
}

impl<S: Scalar> QuillenModel<S> {
    /// Builds the model from generators and `δ` on generators.
    ///
    /// A linear part in `δ` is an error unless `allow_nonminimal` is set, in
    /// which case it is recorded as a warning.
    pub fn new(
        generators: Vec<Generator>,
        differential: &[(String, Vec<(S, Monomial)>)],
        hi: i32,
        allow_nonminimal: bool,
    ) -> Result<Self> {
        let free = FreeLie::new(generators, hi)?;
        let mut values = vec![Vec::new(); free.generators.len()];
        let mut warnings = Vec::new();
        for (name, terms) in differential {
            let g = free.generator_by_name(name)?;
            let target = free.generators[g].degree - 1;
            for (_, m) in terms {
                let d = free.monomial_degree(m)?;
                if d != target {
                    return Err(Error::DegreeMismatch(format!(
                        "term {m} in d({name}) has degree {d}, expected {target}"
                    )));
                }
            }
            let v = if free.space().window().contains(target) { free.combination(terms)? } else { Vec::new() };
            if let Some((i, _)) = v.iter().find(|(i, _)| matches!(free.shapes[*i], Shape::Generator(_))) {
                let msg = format!("d({name}) has a linear term in {}", free.space().name(*i));
                if allow_nonminimal {
                    warnings.push(msg);
                } else {
                    return Err(Error::NotMinimal(msg));
                }
            }
            values[g] = v;
        }
        let delta_map = free.extend_derivation(&values, -1)?;
        let mut b = DgLieBuilder::new(free.space().clone());
        for (i, j, v) in free.algebra.stored_brackets() {
            b.set_bracket(i, j, v.clone())?;
        }
        for i in 0..free.space().total_dim() {
            b.set_differential(i, delta_map.column(i).to_vec())?;
        }
        let algebra = b.build();
        for i in 0..algebra.total_dim() {
            if !algebra.d(algebra.differential_of(i)).is_empty() {
                return Err(Error::DifferentialNotSquareZero(format!("d(d({})) != 0", algebra.name(i))));
            }
        }
        Ok(QuillenModel { free, algebra, delta: values, warnings })
    }

    pub fn free(&self) -> &FreeLie<S> {
        &self.free
    }

    /// `L` with its differential.
    pub fn algebra(&self) -> &DgLie<S> {
        &self.algebra
    }

    pub fn generators(&self) -> &[Generator] {
        self.free.generators()
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.algebra.space()
    }

    /// `δ` on each generator.
    pub fn delta(&self) -> &[Vector<S>] {
        &self.delta
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_bounded(&self) -> bool {
        self.free.is_bounded()
    }

    pub fn min_generator_degree(&self) -> i32 {
        self.generators().iter().map(|g| g.degree).min().unwrap_or(1)
    }

    pub fn max_generator_degree(&self) -> i32 {
        self.generators().iter().map(|g| g.degree).max().unwrap_or(1)
    }
}

/// The derivation dg Lie algebra `Der L`.
///
/// Basis elements are the derivations sending one generator to one basis
/// element of `L` and every other generator to zero.
#[derive(Debug, Clone)]
pub struct Derivations<S> {
    space: Arc<GradedSpace>,
    entries: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    actions: Vec<GradedMap<S>>,
    algebra: DgLie<S>,
}

impl<S: Scalar> Derivations<S> {
    pub fn new(model: &QuillenModel<S>) -> Result<Self> {
        let l = model.space();
        let gens = model.generators();
        let (mingen, maxgen) = (model.min_generator_degree(), model.max_generator_degree());
        let (window, hi_exact) = if model.is_bounded() {
            let top = l.occupied_degrees().max().unwrap_or(mingen);
            (Window::new(mingen - maxgen, (top - mingen).max(mingen - maxgen))?, true)
        } else {
            (Window::new(mingen - maxgen, l.window().hi - maxgen)?, false)
        };
        let mut entries = Vec::new();
        let mut elements = Vec::new();
        for r in window.degrees() {
            for (g, gen) in gens.iter().enumerate() {
                for e in l.range(gen.degree + r) {
                    entries.push((g, e));
                    elements.push(BasisElement { name: format!("{}->{}", gen.name, l.name(e)), degree: r });
                }
            }
        }
        let space = Arc::new(GradedSpace::new(window, true, hi_exact, elements)?);
        let index: HashMap<(usize, usize), usize> = entries.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let actions: Result<Vec<GradedMap<S>>> = entries
            .par_iter()
            .enumerate()
            .map(|(k, &(g, e))| {
                let mut values = vec![Vec::new(); gens.len()];
                values[g] = vec![(e, S::one())];
                model.free().extend_derivation(&values, space.degree(k))
            })
            .collect();
        let actions = actions?;

        let mut der =
            Derivations { space: space.clone(), entries, index, actions, algebra: DgLie::abelian(space.clone()) };
        let lalg = model.algebra();
        let mut b = DgLieBuilder::new(space.clone());
        let n = der.entries.len();
        let brackets: Vec<Vec<(usize, usize, Vector<S>)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ri = space.degree(i);
                let end = space.first_at_least(window.hi - ri + 1).max(i);
                (space.first_at_least(window.lo - ri).max(i)..end)
                    .map(|j| (i, j, der.commutator(i, j)))
                    .filter(|(_, _, v)| !v.is_empty())
                    .collect()
            })
            .collect();
        for (i, j, v) in brackets.into_iter().flatten() {
            b.set_bracket(i, j, v)?;
        }
        for k in 0..n {
            let r = space.degree(k);
            if !window.contains(r - 1) {
                continue;
            }
            let (g, e) = der.entries[k];
            let mut values: Vec<LinComb<S>> = (0..gens.len()).map(|_| LinComb::new()).collect();
            values[g].add_vector(&lalg.d(&[(e, S::one())]));
            let sign = -S::sign(r as i64);
            for (w, dw) in model.delta().iter().enumerate() {
                values[w].add_scaled(&der.actions[k].apply(dw), &sign);
            }
            let values: Vec<Vector<S>> = values.into_iter().map(LinComb::into_vector).collect();
            b.set_differential(k, der.from_values(&values)?)?;
        }
        der.algebra = b.build();
        Ok(der)
    }

    /// `[θ_i, θ_j]` in Der coordinates.
    fn commutator(&self, i: usize, j: usize) -> Vector<S> {
        let (gi, ei) = self.entries[i];
        let (gj, ej) = self.entries[j];
        let (ri, rj) = (self.space.degree(i), self.space.degree(j));
        let mut acc = LinComb::new();
        for (m, c) in self.actions[i].column(ej) {
            acc.add(self.index[&(gj, *m)], c.clone());
        }
        let s = S::from_int(-koszul(ri, rj));
        for (m, c) in self.actions[j].column(ei) {
            acc.add(self.index[&(gi, *m)], c.mul_ref(&s));
        }
        acc.into_vector()
    }

    /// Coordinates of the derivation with the given values on generators.
    pub fn from_values(&self, values: &[Vector<S>]) -> Result<Vector<S>> {
        let mut acc = LinComb::new();
        for (g, v) in values.iter().enumerate() {
            for (e, c) in v {
                let k = self
                    .index
                    .get(&(g, *e))
                    .ok_or_else(|| Error::WindowTooSmall("derivation lies outside the derivation window".into()))?;
                acc.add(*k, c.clone());
            }
        }
        Ok(acc.into_vector())
    }

    pub fn algebra(&self) -> &DgLie<S> {
        &self.algebra
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    /// The extension to `L` of the basis derivation `k`.
    pub fn action(&self, k: usize) -> &GradedMap<S> {
        &self.actions[k]
    }

    /// `(generator, L basis element)` of basis derivation `k`.
    pub fn entry(&self, k: usize) -> (usize, usize) {
        self.entries[k]
    }

    pub fn index_of(&self, generator: usize, element: usize) -> Option<usize> {
        self.index.get(&(generator, element)).copied()
    }

    /// Applies a derivation (in Der coordinates) to an element of `L`.
    pub fn apply(&self, theta: &[(usize, S)], x: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (k, c) in theta {
            acc.add_scaled(&self.actions[*k].apply(x), c);
        }
        acc.into_vector()
    }
}

/// Which summand a basis element of `Der L ⋉ sL` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierPart {
    Derivation(usize),
    Suspension(usize),
}

/// `Der L ⋉_ad sL` with its tautological outer action on `L`.
#[derive(Debug, Clone)]
pub struct Classifier<S> {
    pub derivations: Arc<Derivations<S>>,
    algebra: Arc<DgLie<S>>,
    parts: Vec<ClassifierPart>,
    der_map: Vec<Option<usize>>,
    susp_map: Vec<Option<usize>>,
}

impl<S: Scalar> Classifier<S> {
    pub fn new(model: &QuillenModel<S>, derivations: Arc<Derivations<S>>) -> Result<Self> {
        let l = model.algebra();
        let suspended = l.space().suspend()?;
        let (space, der_map, susp_map) = sum_space(derivations.space(), &suspended)?;
        let space = Arc::new(space);
        let mut parts = vec![ClassifierPart::Derivation(0); space.total_dim()];
        for (k, m) in der_map.iter().enumerate() {
            if let Some(m) = m {
                parts[*m] = ClassifierPart::Derivation(k);
            }
        }
        for (x, m) in susp_map.iter().enumerate() {
            if let Some(m) = m {
                parts[*m] = ClassifierPart::Suspension(x);
            }
        }
        let remap_der = |v: &[(usize, S)]| crate::dgla::remap(v, &der_map);
        let remap_susp = |v: &[(usize, S)], c: &S| exactla::scale(&crate::dgla::remap(v, &susp_map), c);

        let mut b = DgLieBuilder::new(space.clone());
        for (i, j, v) in derivations.algebra().stored_brackets() {
            if let (Some(ni), Some(nj)) = (der_map[i], der_map[j]) {
                b.set_bracket(ni, nj, remap_der(v))?;
            }
        }
        for (k, nk) in der_map.iter().enumerate() {
            let Some(nk) = *nk else { continue };
            let r = space.degree(nk);
            let sign = S::sign(r as i64);
            for (x, nx) in susp_map.iter().enumerate() {
                let Some(nx) = *nx else { continue };
                if !space.window().contains(r + space.degree(nx)) {
                    continue;
                }
                let v = remap_susp(derivations.action(k).column(x), &sign);
                if !v.is_empty() {
                    b.set_bracket(nk, nx, v)?;
                }
            }
            b.set_differential(nk, remap_der(derivations.algebra().differential_of(k)))?;
        }
        let gens = model.generators();
        for (x, nx) in susp_map.iter().enumerate() {
            let Some(nx) = *nx else { continue };
            let mut values = vec![Vec::new(); gens.len()];
            for (w, value) in values.iter_mut().enumerate() {
                *value = l.bracket_basis(x, model.free().generator_basis(w));
            }
            let ad = if derivations.space().window().contains(l.degree(x)) {
                derivations.from_values(&values)?
            } else {
                Vec::new()
            };
            let mut dv = remap_der(&ad);
            dv = exactla::add(&dv, &remap_susp(l.differential_of(x), &-S::one()));
            b.set_differential(nx, dv)?;
        }
        Ok(Classifier { derivations, algebra: Arc::new(b.build()), parts, der_map, susp_map })
    }

    pub fn algebra(&self) -> &Arc<DgLie<S>> {
        &self.algebra
    }

    pub fn part(&self, i: usize) -> ClassifierPart {
        self.parts[i]
    }

    /// Index of basis derivation `k`, if it lies in the window.
    pub fn derivation_index(&self, k: usize) -> Option<usize> {
        self.der_map[k]
    }

    /// Index of `sx` for basis element `x` of `L`, if it lies in the window.
    pub fn suspension_index(&self, x: usize) -> Option<usize> {
        self.susp_map[x]
    }

    /// The tautological action on `L`: derivations act, `sL` acts trivially.
    pub fn act(&self, g: &[(usize, S)], a: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (i, c) in g {
            if let ClassifierPart::Derivation(k) = self.parts[*i] {
                acc.add_scaled(&self.derivations.action(k).apply(a), c);
            }
        }
        acc.into_vector()
    }

    /// The `sL` component of `g`, desuspended.
    pub fn suspension_part(&self, g: &[(usize, S)]) -> Vector<S> {
        exactla::vector_from(g.iter().filter_map(|(i, c)| match self.parts[*i] {
            ClassifierPart::Suspension(x) => Some((x, c.clone())),
            ClassifierPart::Derivation(_) => None,
        }))
    }
}
