//! Named schemes and the parameters that select them.

use std::sync::Arc;

use num_traits::Zero;

use crate::audit::Strawman;
use crate::bounds::memory_share;
use crate::cia::{Cia1, Cia2};
use crate::compose::repeated;
use crate::distinct::{Corner, DistinctDemands};
use crate::error::{Error, Result};
use crate::product::{Naive, ProductDesign};
use crate::rational::Rational;
use crate::sjpir::SjPir;
use crate::system::Scheme;

pub const SCHEME_NAMES: &[&str] = &["cia1", "cia2", "sj", "pd", "naive", "dd1", "dd2", "strawman", "share"];

/// Raw parameters as given on a command line. Unset values take per-scheme
/// defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemeArgs {
    pub k: Option<usize>,
    pub ku: Option<usize>,
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub m: Option<Rational>,
    pub lambda: Option<Rational>,
    pub share_a: Option<String>,
    pub share_b: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeSpec {
    Cia1 {
        n: usize,
    },
    Cia2 {
        n: usize,
    },
    Sj {
        k: usize,
        n: usize,
    },
    Pd {
        k: usize,
        ku: usize,
        n: usize,
        t: usize,
    },
    Naive {
        k: usize,
        ku: usize,
        n: usize,
        m: Rational,
    },
    Dd1,
    Dd2,
    Strawman {
        k: usize,
        ku: usize,
        n: usize,
    },
    Share {
        a: Box<SchemeSpec>,
        b: Box<SchemeSpec>,
        lambda: Rational,
    },
}

fn fixed(name: &str, given: Option<usize>, value: usize, what: &str) -> Result<()> {
    match given {
        Some(x) if x != value => Err(Error::InvalidParameter(format!(
            "`{name}` requires {what}={value}, got {x}"
        ))),
        _ => Ok(()),
    }
}

impl SchemeSpec {
    pub fn parse(name: &str, args: &SchemeArgs) -> Result<Self> {
        let k = args.k.unwrap_or(2);
        let ku = args.ku.unwrap_or(2);
        let n = args.n.unwrap_or(2);
        let two_by_two = || -> Result<()> {
            fixed(name, args.k, 2, "K")?;
            fixed(name, args.ku, 2, "Ku")
        };
        Ok(match name {
            "cia1" => {
                two_by_two()?;
                SchemeSpec::Cia1 { n }
            }
            "cia2" => {
                two_by_two()?;
                SchemeSpec::Cia2 { n }
            }
            "dd1" | "dd2" => {
                two_by_two()?;
                fixed(name, args.n, 2, "N")?;
                if name == "dd1" {
                    SchemeSpec::Dd1
                } else {
                    SchemeSpec::Dd2
                }
            }
            "sj" => {
                fixed(name, args.ku, 1, "Ku")?;
                SchemeSpec::Sj { k, n }
            }
            "pd" => SchemeSpec::Pd {
                k,
                ku,
                n,
                t: args.t.unwrap_or(1),
            },
            "naive" => SchemeSpec::Naive {
                k,
                ku,
                n,
                m: args.m.unwrap_or_else(Rational::zero),
            },
            "strawman" => SchemeSpec::Strawman { k, ku, n },
            "share" => {
                let part = |x: &Option<String>, which: &str| -> Result<Box<SchemeSpec>> {
                    let name = x
                        .as_deref()
                        .ok_or_else(|| Error::InvalidParameter(format!("`share` needs --share-{which}")))?;
                    if name == "share" {
                        return Err(Error::InvalidParameter("nested sharing is not supported".into()));
                    }
                    Ok(Box::new(SchemeSpec::parse(name, args)?))
                };
                SchemeSpec::Share {
                    a: part(&args.share_a, "a")?,
                    b: part(&args.share_b, "b")?,
                    lambda: args
                        .lambda
                        .ok_or_else(|| Error::InvalidParameter("`share` needs --lambda".into()))?,
                }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown scheme `{other}` (one of {})",
                    SCHEME_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn build(&self) -> Result<Arc<dyn Scheme>> {
        Ok(match self {
            SchemeSpec::Cia1 { n } => Arc::new(Cia1::new(*n)?),
            SchemeSpec::Cia2 { n } => Arc::new(Cia2::new(*n)?),
            SchemeSpec::Sj { k, n } => Arc::new(SjPir::new(*k, *n)?),
            SchemeSpec::Pd { k, ku, n, t } => Arc::new(ProductDesign::new(*k, *ku, *n, *t)?),
            SchemeSpec::Naive { k, ku, n, m } => Arc::new(Naive::new(*k, *ku, *n, *m)?),
            SchemeSpec::Dd1 => Arc::new(DistinctDemands::new(Corner::First)),
            SchemeSpec::Dd2 => Arc::new(DistinctDemands::new(Corner::Second)),
            SchemeSpec::Strawman { k, ku, n } => Arc::new(Strawman::new(*k, *ku, *n)?),
            SchemeSpec::Share { a, b, lambda } => memory_share(a.build()?, b.build()?, *lambda)?,
        })
    }

    /// The scheme repeated over `blocks` independent blocks.
    pub fn build_blocks(&self, blocks: usize) -> Result<Arc<dyn Scheme>> {
        repeated(self.build()?, blocks)
    }
}
