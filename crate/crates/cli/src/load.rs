use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use hyperscheme::hypergroup::FiniteHypergroup;
use hyperscheme::io::{HypergroupFile, LoadedHypergroup, LoadedScheme, Num, SchemeFile};
use hyperscheme::scheme::{verify_generalized, verify_scheme, FiniteGroup};
use hyperscheme::{Error, Rational};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn scheme_file(path: &Path) -> Result<SchemeFile> {
    Ok(SchemeFile::from_json(&read(path)?)?)
}

/// What a data file holds.
pub enum Data {
    Scheme(LoadedScheme),
    Hypergroup(LoadedHypergroup),
}

/// Reads a scheme file or a hypergroup file, telling them apart by their keys.
pub fn data(path: &Path) -> Result<Data> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("conv").is_some() {
        Ok(Data::Hypergroup(HypergroupFile::from_json(&text)?.load()?))
    } else if value.get("relations").is_some() {
        Ok(Data::Scheme(SchemeFile::from_json(&text)?.load()?))
    } else {
        bail!("{}: neither a scheme file (\"relations\") nor a hypergroup file (\"conv\")", path.display())
    }
}

/// The hypergroup of a file: read directly, or built from a verified scheme.
/// Scheme-level axiom failures surface as `hyperscheme::Error`.
pub fn hypergroup(path: &Path) -> Result<LoadedHypergroup> {
    Ok(match data(path)? {
        Data::Hypergroup(h) => h,
        Data::Scheme(LoadedScheme::Partition(p)) => {
            let s = verify_scheme(&p).map_err(Error::from)?;
            LoadedHypergroup::Exact(FiniteHypergroup::from_scheme(&s))
        }
        Data::Scheme(LoadedScheme::Exact(gs)) => {
            let v = verify_generalized(&gs)?;
            LoadedHypergroup::Exact(FiniteHypergroup::from_generalized(&gs, &v))
        }
        Data::Scheme(LoadedScheme::Float(gs)) => {
            let v = verify_generalized(&gs)?;
            LoadedHypergroup::Float(FiniteHypergroup::from_generalized(&gs, &v))
        }
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum GroupFile {
    Table(Vec<Vec<usize>>),
    Cyclic(usize),
    Symmetric(usize),
}

pub fn group(path: &Path) -> Result<FiniteGroup> {
    let file: GroupFile =
        serde_json::from_str(&read(path)?).with_context(|| format!("parsing group file {}", path.display()))?;
    Ok(match file {
        GroupFile::Table(t) => FiniteGroup::from_table(t)?,
        GroupFile::Cyclic(n) if n >= 1 => FiniteGroup::cyclic(n),
        GroupFile::Symmetric(n) if (1..=7).contains(&n) => FiniteGroup::symmetric(n).0,
        _ => bail!("group size out of range"),
    })
}

pub fn index_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().with_context(|| format!("not an index: {t:?}")))
        .collect()
}

/// Comma separated numbers, each an integer, a decimal or `p/q`.
pub fn number_list(s: &str) -> Result<Vec<Num>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if let Ok(i) = t.parse::<i64>() {
                Ok(Num::Int(i))
            } else if t.contains('/') {
                Ok(Num::Text(t.to_owned()))
            } else {
                t.parse::<f64>().map(Num::Float).with_context(|| format!("not a number: {t:?}"))
            }
        })
        .collect()
}

pub fn rationals(nums: &[Num]) -> Option<Vec<Rational>> {
    nums.iter().map(|n| n.to_rational().ok()).collect()
}

pub fn floats(nums: &[Num]) -> Result<Vec<f64>> {
    Ok(nums.iter().map(Num::to_f64).collect::<Result<_, _>>()?)
}
