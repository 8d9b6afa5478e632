//! The textual shift-spec document: one TOML format for every family, with a
//! `family` discriminator. Parse -> serialize -> parse is the identity on
//! the underlying spec.

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::mistake::{MistakeFunction, MistakeRule};
use crate::shift::{BlockMap, Expansion, GapSet, ShiftSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CODED_HORIZON_FACTOR: u32 = 4;
pub const DEFAULT_FACTOR_BUDGET: usize = 14;

/// Serde mirror of [`ShiftSpec`]. Words appear as plain strings when every
/// symbol is a single character, as symbol arrays otherwise.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShiftSpecDocument {
    Full {
        alphabet: AlphabetDoc,
    },
    Sft {
        alphabet: AlphabetDoc,
        forbidden: Vec<WordDoc>,
    },
    Beta {
        #[serde(default)]
        preperiod: Vec<u8>,
        period: Vec<u8>,
    },
    SGap {
        gaps: GapSet,
    },
    BoundedDensity {
        g: MistakeDoc,
    },
    AtMostOneOne {},
    Coded {
        alphabet: AlphabetDoc,
        generators: Vec<WordDoc>,
        #[serde(default = "default_horizon_factor")]
        horizon_factor: u32,
        #[serde(default = "default_true")]
        complete: bool,
    },
    Product {
        left: Box<ShiftSpecDocument>,
        right: Box<ShiftSpecDocument>,
    },
    Factor {
        base: Box<ShiftSpecDocument>,
        radius: usize,
        map: Vec<BlockMapEntry>,
        #[serde(default = "default_factor_budget")]
        budget: usize,
    },
}

fn default_horizon_factor() -> u32 {
    DEFAULT_CODED_HORIZON_FACTOR
}

fn default_true() -> bool {
    true
}

fn default_factor_budget() -> usize {
    DEFAULT_FACTOR_BUDGET
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlphabetDoc {
    pub symbols: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<i64>>,
}

/// A word in document form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum WordDoc {
    Joined(String),
    Symbols(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BlockMapEntry {
    pub window: WordDoc,
    pub to: String,
}

/// Mistake functions in document form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MistakeDoc {
    Constant { m: u32 },
    Table { values: Vec<u32> },
    CeilSqrt {},
    OnePlusTwoLoglog {},
    CLog { c: u32 },
}

impl From<&MistakeFunction> for MistakeDoc {
    fn from(g: &MistakeFunction) -> MistakeDoc {
        match g.rule() {
            MistakeRule::Constant { m } => MistakeDoc::Constant { m: *m },
            MistakeRule::Table { values } => MistakeDoc::Table {
                values: values.clone(),
            },
            MistakeRule::CeilSqrt => MistakeDoc::CeilSqrt {},
            MistakeRule::OnePlusTwoLogLog => MistakeDoc::OnePlusTwoLoglog {},
            MistakeRule::CLog { c } => MistakeDoc::CLog { c: *c },
        }
    }
}

impl TryFrom<&MistakeDoc> for MistakeFunction {
    type Error = Error;
    fn try_from(d: &MistakeDoc) -> Result<MistakeFunction> {
        match d {
            MistakeDoc::Constant { m } => Ok(MistakeFunction::constant(*m)),
            MistakeDoc::Table { values } => MistakeFunction::new(MistakeRule::Table {
                values: values.clone(),
            }),
            MistakeDoc::CeilSqrt {} => Ok(MistakeFunction::ceil_sqrt()),
            MistakeDoc::OnePlusTwoLoglog {} => Ok(MistakeFunction::one_plus_two_loglog()),
            MistakeDoc::CLog { c } => MistakeFunction::new(MistakeRule::CLog { c: *c }),
        }
    }
}

fn word_from_doc(alphabet: &Alphabet, doc: &WordDoc) -> Result<Word> {
    match doc {
        WordDoc::Joined(s) => alphabet.word_from_str(s),
        WordDoc::Symbols(symbols) => alphabet.word_from_symbols(symbols),
    }
}

fn word_to_doc(alphabet: &Alphabet, w: &Word) -> WordDoc {
    if alphabet.single_char() {
        WordDoc::Joined(alphabet.render(w))
    } else {
        WordDoc::Symbols(
            w.indices()
                .iter()
                .map(|&i| alphabet.symbol(i).to_string())
                .collect(),
        )
    }
}

impl ShiftSpecDocument {
    /// Parse a TOML document.
    pub fn parse(text: &str) -> Result<ShiftSpecDocument> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Validate into a [`ShiftSpec`].
    pub fn to_spec(&self) -> Result<ShiftSpec> {
        match self {
            ShiftSpecDocument::Full { alphabet } => Ok(ShiftSpec::Full {
                alphabet: Alphabet::with_labels(alphabet.symbols.clone(), alphabet.labels.clone())?,
            }),
            ShiftSpecDocument::Sft { alphabet, forbidden } => {
                let a = Alphabet::with_labels(alphabet.symbols.clone(), alphabet.labels.clone())?;
                let forbidden = forbidden
                    .iter()
                    .map(|w| word_from_doc(&a, w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ShiftSpec::Sft {
                    alphabet: a,
                    forbidden,
                })
            }
            ShiftSpecDocument::Beta { preperiod, period } => Ok(ShiftSpec::Beta {
                expansion: Expansion::new(preperiod.clone(), period.clone())?,
            }),
            ShiftSpecDocument::SGap { gaps } => Ok(ShiftSpec::SGap { gaps: gaps.clone() }),
            ShiftSpecDocument::BoundedDensity { g } => Ok(ShiftSpec::BoundedDensity {
                g: MistakeFunction::try_from(g)?,
            }),
            ShiftSpecDocument::AtMostOneOne {} => Ok(ShiftSpec::AtMostOneOne),
            ShiftSpecDocument::Coded {
                alphabet,
                generators,
                horizon_factor,
                complete,
            } => {
                let a = Alphabet::with_labels(alphabet.symbols.clone(), alphabet.labels.clone())?;
                let generators = generators
                    .iter()
                    .map(|w| word_from_doc(&a, w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ShiftSpec::Coded {
                    alphabet: a,
                    generators,
                    horizon_factor: *horizon_factor,
                    complete: *complete,
                })
            }
            ShiftSpecDocument::Product { left, right } => Ok(ShiftSpec::Product {
                left: Box::new(left.to_spec()?),
                right: Box::new(right.to_spec()?),
            }),
            ShiftSpecDocument::Factor {
                base,
                radius,
                map,
                budget,
            } => {
                let base_spec = base.to_spec()?;
                let base_alphabet = alphabet_of(&base_spec)?;
                let entries = map
                    .iter()
                    .map(|e| {
                        let w = word_from_doc(&base_alphabet, &e.window)?;
                        if w.len() != 2 * radius + 1 {
                            return Err(Error::Parse(format!(
                                "window {:?} does not match radius {radius}",
                                e.window
                            )));
                        }
                        Ok((w, e.to.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ShiftSpec::Factor {
                    base: Box::new(base_spec),
                    map: BlockMap::new(*radius, entries)?,
                    budget: *budget,
                })
            }
        }
    }

    /// Document form of a spec (the inverse of [`Self::to_spec`]).
    pub fn from_spec(spec: &ShiftSpec) -> Result<ShiftSpecDocument> {
        Ok(match spec {
            ShiftSpec::Full { alphabet } => ShiftSpecDocument::Full {
                alphabet: AlphabetDoc {
                    symbols: alphabet.symbols().to_vec(),
                    labels: alphabet.labels().map(|l| l.to_vec()),
                },
            },
            ShiftSpec::Sft { alphabet, forbidden } => ShiftSpecDocument::Sft {
                alphabet: AlphabetDoc {
                    symbols: alphabet.symbols().to_vec(),
                    labels: alphabet.labels().map(|l| l.to_vec()),
                },
                forbidden: forbidden.iter().map(|w| word_to_doc(alphabet, w)).collect(),
            },
            ShiftSpec::Beta { expansion } => ShiftSpecDocument::Beta {
                preperiod: expansion.preperiod().to_vec(),
                period: expansion.period().to_vec(),
            },
            ShiftSpec::SGap { gaps } => ShiftSpecDocument::SGap { gaps: gaps.clone() },
            ShiftSpec::BoundedDensity { g } => ShiftSpecDocument::BoundedDensity { g: g.into() },
            ShiftSpec::AtMostOneOne => ShiftSpecDocument::AtMostOneOne {},
            ShiftSpec::Coded {
                alphabet,
                generators,
                horizon_factor,
                complete,
            } => ShiftSpecDocument::Coded {
                alphabet: AlphabetDoc {
                    symbols: alphabet.symbols().to_vec(),
                    labels: alphabet.labels().map(|l| l.to_vec()),
                },
                generators: generators.iter().map(|w| word_to_doc(alphabet, w)).collect(),
                horizon_factor: *horizon_factor,
                complete: *complete,
            },
            ShiftSpec::Product { left, right } => ShiftSpecDocument::Product {
                left: Box::new(ShiftSpecDocument::from_spec(left)?),
                right: Box::new(ShiftSpecDocument::from_spec(right)?),
            },
            ShiftSpec::Factor { base, map, budget } => {
                let base_doc = ShiftSpecDocument::from_spec(base)?;
                let base_alphabet = alphabet_of(base)?;
                ShiftSpecDocument::Factor {
                    base: Box::new(base_doc),
                    radius: map.radius(),
                    map: map
                        .table()
                        .iter()
                        .map(|(w, &t)| BlockMapEntry {
                            window: word_to_doc(&base_alphabet, w),
                            to: map.target().symbol(t).to_string(),
                        })
                        .collect(),
                    budget: *budget,
                }
            }
        })
    }
}

/// The alphabet a spec will validate to, without building the full oracle.
pub fn alphabet_of(spec: &ShiftSpec) -> Result<Alphabet> {
    Ok(match spec {
        ShiftSpec::Full { alphabet } | ShiftSpec::Sft { alphabet, .. } => alphabet.clone(),
        ShiftSpec::Beta { expansion } => Alphabet::digits(expansion.digit(1) as usize + 1),
        ShiftSpec::SGap { .. } | ShiftSpec::BoundedDensity { .. } | ShiftSpec::AtMostOneOne => {
            Alphabet::binary()
        }
        ShiftSpec::Coded { alphabet, .. } => alphabet.clone(),
        ShiftSpec::Product { left, right } => {
            let l = alphabet_of(left)?;
            let r = alphabet_of(right)?;
            let mut symbols = Vec::with_capacity(l.len() * r.len());
            for a in l.symbols() {
                for b in r.symbols() {
                    symbols.push(format!("({a},{b})"));
                }
            }
            Alphabet::new(symbols)?
        }
        ShiftSpec::Factor { map, .. } => map.target().clone(),
    })
}
