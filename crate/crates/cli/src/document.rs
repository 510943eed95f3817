//! The input schema and its translation into a [`ModelSpec`].

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use bautlab_core::dgla::DgLieBuilder;
use bautlab_core::freelie::{Generator, Monomial, QuillenModel};
use bautlab_core::models::{CharacteristicClass, ExplicitTerm, ModelSpec, Twisting};
use bautlab_core::twist::StructureAlgebra;
use bautlab_core::{BasisElement, GradedSpace, Window, Q};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `[coefficient, element]`, the coefficient written `"p/q"`.
pub type Term = (String, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub space: SpaceSpec,
    #[serde(default)]
    pub structure: StructureSpec,
    #[serde(default)]
    pub twisting: Option<TwistingSpec>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub name: String,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<Term>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    /// `[left, right, value]`.
    #[serde(default)]
    pub brackets: Vec<(String, String, Vec<Term>)>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<Term>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub name: String,
    pub degree: i32,
    pub pairing: BTreeMap<String, String>,
    pub pi_generator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistingSpec {
    CharacteristicClasses(Vec<ClassSpec>),
    /// `[word, target, coefficient]`.
    Explicit(Vec<(Vec<String>, String, String)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VariantSpec {
    Full,
    Simplified,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub max_degree: Option<i32>,
    pub variant: Option<VariantSpec>,
    pub reduced: Option<bool>,
}

pub const DEFAULT_MAX_DEGREE: i32 = 8;

/// Reads JSON, or TOML when the extension is `.toml`; a missing file
/// falls back to the built-in model of that name.
pub fn load(path: &Path) -> Result<InputDocument, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse(&text, path.extension().is_some_and(|e| e == "toml")),
        Err(e) => match crate::library::get(&path.to_string_lossy()) {
            Some(text) => parse(text, false),
            None => Err(CliError::Io { path: path.display().to_string(), source: e }),
        },
    }
}

pub fn parse(text: &str, toml: bool) -> Result<InputDocument, CliError> {
    let doc: InputDocument = if toml {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    } else {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    };
    doc.check()?;
    Ok(doc)
}

pub fn rational(s: &str) -> Result<Q, CliError> {
    s.trim().parse().map_err(|_| CliError::Schema(format!("`{s}` is not a rational number")))
}

impl InputDocument {
    fn check(&self) -> Result<(), CliError> {
        if self.space.generators.is_empty() {
            return Err(CliError::Schema("space has no generators".into()));
        }
        for g in &self.space.generators {
            if g.degree < 1 {
                return Err(CliError::Schema(format!(
                    "generator `{}` has degree {}; simply connected requires degree >= 1",
                    g.name, g.degree
                )));
            }
        }
        for g in &self.structure.generators {
            if g.degree < 1 {
                return Err(CliError::Schema(format!(
                    "structure generator `{}` has degree {}; degree >= 1 is required",
                    g.name, g.degree
                )));
            }
        }
        if let Some(n) = self.options.max_degree {
            if n < 0 {
                return Err(CliError::Schema(format!("max_degree {n} is negative")));
            }
        }
        let terms = self.space.differential.values().chain(self.structure.differential.values());
        let brackets = self.structure.brackets.iter().map(|b| &b.2);
        for (c, _) in terms.chain(brackets).flatten() {
            rational(c)?;
        }
        match &self.twisting {
            Some(TwistingSpec::CharacteristicClasses(cs)) => {
                for c in cs.iter().flat_map(|c| c.pairing.values()) {
                    rational(c)?;
                }
            }
            Some(TwistingSpec::Explicit(ts)) => {
                for (_, _, c) in ts {
                    rational(c)?;
                }
            }
            None => {}
        }
        Ok(())
    }

    pub fn model(&self, hi: i32) -> Result<QuillenModel<Q>, CliError> {
        let gens = self.space.generators.iter().map(|g| Generator::new(&g.name, g.degree)).collect();
        let diff: Vec<(String, Vec<(Q, Monomial)>)> = self
            .space
            .differential
            .iter()
            .map(|(g, terms)| {
                let t = terms
                    .iter()
                    .map(|(c, m)| Ok((rational(c)?, m.parse::<Monomial>()?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok((g.clone(), t))
            })
            .collect::<Result<_, CliError>>()?;
        Ok(QuillenModel::new(gens, &diff, hi, false)?)
    }

    pub fn structure(&self) -> Result<StructureAlgebra<Q>, CliError> {
        let s = &self.structure;
        if s.brackets.is_empty() && s.differential.is_empty() {
            let gens: Vec<(String, i32)> = s.generators.iter().map(|g| (g.name.clone(), g.degree)).collect();
            return Ok(StructureAlgebra::abelian(&gens)?);
        }
        let lo = s.generators.iter().map(|g| g.degree).min().unwrap_or(1);
        let hi = s.generators.iter().map(|g| g.degree).max().unwrap_or(1);
        let space = Arc::new(GradedSpace::finite(
            Window::new(lo, hi)?,
            s.generators.iter().map(|g| BasisElement { name: g.name.clone(), degree: g.degree }),
        )?);
        let find = |n: &str| space.find(n).ok_or_else(|| CliError::Schema(format!("unknown structure element `{n}`")));
        let vector = |terms: &[Term]| -> Result<Vec<(usize, Q)>, CliError> {
            let mut v: Vec<(usize, Q)> = Vec::new();
            for (c, e) in terms {
                v.push((find(e)?, rational(c)?));
            }
            v.sort_by_key(|(i, _)| *i);
            Ok(v)
        };
        let mut b = DgLieBuilder::new(space.clone());
        for (l, r, value) in &s.brackets {
            b.set_bracket(find(l)?, find(r)?, vector(value)?)?;
        }
        for (e, value) in &s.differential {
            b.set_differential(find(e)?, vector(value)?)?;
        }
        Ok(StructureAlgebra::new(b.build())?)
    }

    pub fn twisting(&self) -> Result<Twisting<Q>, CliError> {
        Ok(match &self.twisting {
            None => Twisting::Zero,
            Some(TwistingSpec::CharacteristicClasses(cs)) => Twisting::Classes(
                cs.iter()
                    .map(|c| {
                        Ok(CharacteristicClass {
                            name: c.name.clone(),
                            degree: c.degree,
                            pairing: c
                                .pairing
                                .iter()
                                .map(|(k, v)| Ok((k.clone(), rational(v)?)))
                                .collect::<Result<_, CliError>>()?,
                            pi_generator: c.pi_generator.clone(),
                        })
                    })
                    .collect::<Result<_, CliError>>()?,
            ),
            Some(TwistingSpec::Explicit(ts)) => Twisting::Explicit(
                ts.iter()
                    .map(|(w, t, c)| Ok(ExplicitTerm { word: w.clone(), target: t.clone(), coefficient: rational(c)? }))
                    .collect::<Result<_, CliError>>()?,
            ),
        })
    }

    pub fn spec(&self, hi: i32, reduced: bool) -> Result<ModelSpec<Q>, CliError> {
        Ok(ModelSpec {
            model: Arc::new(self.model(hi)?),
            structure: self.structure()?,
            twisting: self.twisting()?,
            reduced,
        })
    }

    pub fn max_generator_degree(&self) -> i32 {
        self.space.generators.iter().map(|g| g.degree).max().unwrap_or(1)
    }
}
