//! Orthogonal arrays as multisets of runs, with strength and conjugacy
//! verification and the plain-text / JSON file formats.
//!
//! Text format:
//!
//! ```text
//! k N
//! tag_1 ... tag_k
//! row 1: N symbol labels
//! ...
//! row k: N symbol labels
//! ```
//!
//! Tags are `Z<n>`, `S3`, `S3b` (S3 listed `e a b c x y`), `D4` and `D5`.
//! Anything after `#` on a line is a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{self, FiniteGroup, GroupOrdering};
use crate::numtheory::{compute_l, FactorSpec};

/// Default ceiling on the number of columns materialised by
/// [`complete_factorial`] and friends.
pub const DEFAULT_CAPACITY: u128 = 1 << 24;

/// The symbol set of one factor, which is also a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorTag {
    Cyclic(usize),
    /// `S3` in the order `e x y a b c`.
    S3,
    /// `S3` in the order `e a b c x y`.
    S3Second,
    Dih4,
    Dih5,
}

impl FactorTag {
    pub fn order(self) -> usize {
        match self {
            FactorTag::Cyclic(n) => n,
            FactorTag::S3 | FactorTag::S3Second => 6,
            FactorTag::Dih4 => 8,
            FactorTag::Dih5 => 10,
        }
    }

    pub fn group(self) -> FiniteGroup {
        let built = match self {
            FactorTag::Cyclic(n) => groups::make_cyclic(n),
            FactorTag::S3 => groups::make_dihedral(3),
            FactorTag::S3Second => groups::make_dihedral(3).and_then(|s3| GroupOrdering::s3_second().apply(&s3)),
            FactorTag::Dih4 => groups::make_dihedral(4),
            FactorTag::Dih5 => groups::make_dihedral(5),
        };
        built.expect("tagged groups are valid by construction")
    }

    pub fn labels(self) -> Vec<String> {
        match self {
            FactorTag::Cyclic(n) => (0..n).map(|i| i.to_string()).collect(),
            _ => self.group().labels().to_vec(),
        }
    }
}

impl fmt::Display for FactorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorTag::Cyclic(n) => write!(f, "Z{n}"),
            FactorTag::S3 => f.write_str("S3"),
            FactorTag::S3Second => f.write_str("S3b"),
            FactorTag::Dih4 => f.write_str("D4"),
            FactorTag::Dih5 => f.write_str("D5"),
        }
    }
}

impl FromStr for FactorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S3" => Ok(FactorTag::S3),
            "S3b" => Ok(FactorTag::S3Second),
            "D4" => Ok(FactorTag::Dih4),
            "D5" => Ok(FactorTag::Dih5),
            _ => s
                .strip_prefix('Z')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 2)
                .map(FactorTag::Cyclic)
                .ok_or_else(|| Error::Usage(format!("unknown factor tag `{s}`"))),
        }
    }
}

/// A `k x N` array of symbol indices; column `j` is one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    spec: FactorSpec,
    tags: Vec<FactorTag>,
    // column-major: entry (i, j) at j*k + i
    data: Vec<u32>,
    size: usize,
}

impl OrthogonalArray {
    pub fn from_columns(tags: Vec<FactorTag>, columns: &[Vec<usize>]) -> Result<Self> {
        let spec = FactorSpec::new(tags.iter().map(|t| t.order() as u64).collect())?;
        let k = tags.len();
        if columns.is_empty() {
            return Err(Error::Usage("an array needs at least one run".into()));
        }
        let mut data = Vec::with_capacity(columns.len() * k);
        for (j, column) in columns.iter().enumerate() {
            if column.len() != k {
                return Err(Error::Usage(format!("run {} has {} entries, expected {k}", j + 1, column.len())));
            }
            for (i, &v) in column.iter().enumerate() {
                if v >= tags[i].order() {
                    return Err(Error::Usage(format!(
                        "run {}: symbol index {v} out of range for factor {} ({})",
                        j + 1,
                        i + 1,
                        tags[i]
                    )));
                }
                data.push(v as u32);
            }
        }
        Ok(OrthogonalArray { spec, tags, data, size: columns.len() })
    }

    pub fn from_rows(tags: Vec<FactorTag>, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.len() != tags.len() {
            return Err(Error::Usage(format!("{} rows for {} factors", rows.len(), tags.len())));
        }
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Usage(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        let columns = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect::<Vec<_>>();
        Self::from_columns(tags, &columns)
    }

    /// Rows given as symbol labels, e.g. `["e", "x", ...]`.
    pub fn from_label_rows<S: AsRef<str>>(tags: Vec<FactorTag>, rows: &[Vec<S>]) -> Result<Self> {
        let indexed = rows
            .iter()
            .zip(&tags)
            .map(|(row, tag)| {
                let labels = tag.labels();
                row.iter()
                    .map(|l| {
                        labels
                            .iter()
                            .position(|x| x == l.as_ref())
                            .ok_or_else(|| Error::Usage(format!("unknown symbol `{}` for {tag}", l.as_ref())))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(tags, &indexed)
    }

    pub fn spec(&self) -> &FactorSpec {
        &self.spec
    }

    pub fn tags(&self) -> &[FactorTag] {
        &self.tags
    }

    pub fn k(&self) -> usize {
        self.tags.len()
    }

    /// Number of runs `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> usize {
        self.data[j * self.k() + i] as usize
    }

    pub fn column(&self, j: usize) -> &[u32] {
        let k = self.k();
        &self.data[j * k..(j + 1) * k]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.k())
    }

    pub fn row(&self, i: usize) -> Vec<usize> {
        (0..self.size).map(|j| self.entry(i, j)).collect()
    }

    pub fn row_labels(&self, i: usize) -> Vec<String> {
        let labels = self.tags[i].labels();
        self.row(i).into_iter().map(|v| labels[v].clone()).collect()
    }

    /// Symbol labels per factor.
    pub fn symbol_sets(&self) -> Vec<Vec<String>> {
        self.tags.iter().map(|t| t.labels()).collect()
    }

    /// Multiplicity of every distinct run.
    pub fn multiplicities(&self) -> BTreeMap<Vec<u32>, u64> {
        let mut counts = BTreeMap::new();
        for column in self.columns() {
            *counts.entry(column.to_vec()).or_insert(0) += 1;
        }
        counts
    }

    /// Checks that every `t`-factor projection is a constant number of
    /// copies of the full product of those factors' symbol sets.
    pub fn verify_strength(&self, t: usize) -> Result<StrengthReport> {
        let k = self.k();
        if t == 0 || t > k {
            return Err(Error::Usage(format!("strength {t} is out of range 1..={k}")));
        }
        let mut lambda = Vec::new();
        for subset in (0..k).combinations(t) {
            let radices = subset.iter().map(|&i| self.tags[i].order()).collect::<Vec<_>>();
            let cells: usize = radices.iter().product();
            let mut counts = vec![0u64; cells];
            for column in self.columns() {
                let cell = subset.iter().zip(&radices).fold(0, |acc, (&i, &r)| acc * r + column[i] as usize);
                counts[cell] += 1;
            }
            let first = counts[0];
            if let Some(bad) = counts.iter().position(|&c| c != first) {
                let decode = |mut cell: usize| {
                    let mut digits = vec![0; radices.len()];
                    for (slot, &r) in digits.iter_mut().zip(&radices).rev() {
                        *slot = cell % r;
                        cell /= r;
                    }
                    digits
                };
                return Ok(StrengthReport {
                    claimed_t: t,
                    holds: false,
                    lambda: Vec::new(),
                    witness: Some(StrengthWitness {
                        subset,
                        first_cell: decode(0),
                        first_count: first,
                        cell: decode(bad),
                        count: counts[bad],
                    }),
                });
            }
            lambda.push((subset, first));
        }
        Ok(StrengthReport { claimed_t: t, holds: true, lambda, witness: None })
    }

    /// Largest `t` for which [`verify_strength`](Self::verify_strength) holds, 0 if none.
    pub fn max_strength(&self) -> usize {
        (1..=self.k()).take_while(|&t| self.verify_strength(t).map(|r| r.holds).unwrap_or(false)).last().unwrap_or(0)
    }

    /// Conjugacy check against this array's own tag groups.
    pub fn verify_conjugacy_tags(&self) -> Result<ConjugacyReport> {
        let groups = self.tags.iter().map(|t| t.group()).collect::<Vec<_>>();
        self.verify_conjugacy(&groups)
    }

    /// Whether the counting function of the array is constant on every
    /// conjugacy class of the product of `groups`. Classes are visited in
    /// the product's class order; the witness is the first element of the
    /// first offending class and the first member whose count differs.
    pub fn verify_conjugacy(&self, groups: &[FiniteGroup]) -> Result<ConjugacyReport> {
        if groups.len() != self.k() {
            return Err(Error::Mismatch(format!("{} groups for {} factors", groups.len(), self.k())));
        }
        for (i, (group, tag)) in groups.iter().zip(&self.tags).enumerate() {
            if group.labels() != tag.labels().as_slice() {
                return Err(Error::Mismatch(format!(
                    "factor {}: symbols of {tag} do not match the elements of {}",
                    i + 1,
                    group
                )));
            }
        }
        if groups.iter().all(FiniteGroup::is_abelian) {
            return Ok(ConjugacyReport { holds: true, witness: None });
        }
        let counts = self.multiplicities();
        let count_of = |tuple: &[usize]| {
            let key = tuple.iter().map(|&g| g as u32).collect::<Vec<_>>();
            counts.get(&key).copied().unwrap_or(0)
        };
        for class in groups::product_conjugacy_classes(groups) {
            let first = count_of(&class[0]);
            if let Some(other) = class.iter().find(|tuple| count_of(tuple) != first) {
                return Ok(ConjugacyReport {
                    holds: false,
                    witness: Some(ConjugacyWitness {
                        first: class[0].clone(),
                        first_count: first,
                        other: other.clone(),
                        other_count: count_of(other),
                    }),
                });
            }
        }
        Ok(ConjugacyReport { holds: true, witness: None })
    }

    pub fn has_repeats(&self) -> bool {
        !self.columns().all_unique()
    }

    /// No repeated run and fewer runs than the complete factorial.
    pub fn is_proper_fraction(&self) -> bool {
        let complete = self.spec.complete_size().unwrap_or(u128::MAX);
        !self.has_repeats() && (self.size as u128) < complete
    }

    /// `N mod L_t == 0` for an array of strength `t`. Calling this on an
    /// array without strength `t` is a usage error; a nonzero remainder is
    /// an internal error.
    pub fn divisibility_check(&self, t: usize) -> Result<bool> {
        if !self.verify_strength(t)?.holds {
            return Err(Error::Usage(format!("array does not have strength {t}")));
        }
        let lt = compute_l(&self.spec, t)?;
        if !(self.size as u128).is_multiple_of(lt) {
            return Err(Error::Internal(format!(
                "strength-{t} array of size {} is not a multiple of L_{t} = {lt}",
                self.size
            )));
        }
        Ok(true)
    }

    /// `N / L_k` reduced, as (numerator, denominator).
    pub fn fraction(&self) -> Result<(u128, u128)> {
        let complete = self.spec.complete_size()?;
        let g = crate::numtheory::gcd(self.size as u128, complete);
        Ok((self.size as u128 / g, complete / g))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.k(), self.size);
        out.push_str(&self.tags.iter().join(" "));
        out.push('\n');
        for i in 0..self.k() {
            out.push_str(&self.row_labels(i).join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, raw)| (n + 1, raw.split('#').next().unwrap_or("")))
            .filter(|(_, content)| !content.trim().is_empty());
        let tokens = |content: &str| -> Vec<(usize, String)> {
            let mut out = Vec::new();
            let mut start = None;
            for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        out.push((content[..s].chars().count() + 1, content[s..pos].to_string()));
                        start = None;
                    }
                    _ => {}
                }
            }
            out
        };
        let eof =
            |what: &str| Error::Parse { line: text.lines().count() + 1, column: 1, message: format!("missing {what}") };

        let (line_no, header) = lines.next().ok_or_else(|| eof("header line `k N`"))?;
        let header = tokens(header);
        if header.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                column: header.get(2).map_or(1, |t| t.0),
                message: format!("header must be `k N`, found {} fields", header.len()),
            });
        }
        let parse_count = |(col, tok): &(usize, String), what: &str| {
            tok.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(|| Error::Parse {
                line: line_no,
                column: *col,
                message: format!("invalid {what} `{tok}`"),
            })
        };
        let k = parse_count(&header[0], "factor count")?;
        let n = parse_count(&header[1], "run count")?;

        let (tag_line, tag_content) = lines.next().ok_or_else(|| eof("tag line"))?;
        let tag_tokens = tokens(tag_content);
        if tag_tokens.len() != k {
            return Err(Error::Parse {
                line: tag_line,
                column: tag_tokens.get(k).map_or(1, |t| t.0),
                message: format!("expected {k} factor tags, found {}", tag_tokens.len()),
            });
        }
        let tags = tag_tokens
            .iter()
            .map(|(col, tok)| {
                tok.parse::<FactorTag>().map_err(|_| Error::Parse {
                    line: tag_line,
                    column: *col,
                    message: format!("unknown factor tag `{tok}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut rows = Vec::with_capacity(k);
        for (i, tag) in tags.iter().enumerate() {
            let (row_line, content) = lines.next().ok_or_else(|| eof(&format!("row {}", i + 1)))?;
            let row_tokens = tokens(content);
            if row_tokens.len() != n {
                return Err(Error::Parse {
                    line: row_line,
                    column: row_tokens.get(n).map_or(content.chars().count() + 1, |t| t.0),
                    message: format!("row {} has {} symbols, expected {n}", i + 1, row_tokens.len()),
                });
            }
            let labels = tag.labels();
            let row = row_tokens
                .iter()
                .map(|(col, tok)| {
                    labels.iter().position(|l| l == tok).ok_or_else(|| Error::Parse {
                        line: row_line,
                        column: *col,
                        message: format!("unknown symbol `{tok}` for factor {} ({tag})", i + 1),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if let Some((extra, content)) = lines.next() {
            return Err(Error::Parse {
                line: extra,
                column: tokens(content).first().map_or(1, |t| t.0),
                message: format!("unexpected content after {k} rows"),
            });
        }
        Self::from_rows(tags, &rows)
    }

    pub fn to_document(&self, provenance: Provenance) -> ArrayDocument {
        ArrayDocument {
            spec: self.spec.clone(),
            tags: self.tags.iter().map(ToString::to_string).collect(),
            rows: (0..self.k()).map(|i| self.row_labels(i)).collect(),
            provenance,
        }
    }

    pub fn from_document(doc: &ArrayDocument) -> Result<Self> {
        let tags = doc.tags.iter().map(|t| t.parse()).collect::<Result<Vec<FactorTag>>>()?;
        let array = Self::from_label_rows(tags, &doc.rows)?;
        if array.spec != doc.spec {
            return Err(Error::Mismatch(format!("spec {} does not match tags {}", doc.spec, array.spec)));
        }
        Ok(array)
    }
}

/// Where an emitted array came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Provenance {
    pub fn new(method: impl Into<String>) -> Self {
        Provenance { tool: crate::TOOL_VERSION.to_string(), method: method.into(), note: None }
    }
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayDocument {
    pub spec: FactorSpec,
    pub tags: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrengthWitness {
    /// 0-based factor positions.
    pub subset: Vec<usize>,
    pub first_cell: Vec<usize>,
    pub first_count: u64,
    pub cell: Vec<usize>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrengthReport {
    pub claimed_t: usize,
    pub holds: bool,
    /// `(I, lambda_I)` for every `t`-subset, in lexicographic order, when the
    /// strength holds.
    pub lambda: Vec<(Vec<usize>, u64)>,
    pub witness: Option<StrengthWitness>,
}

impl StrengthReport {
    pub fn lambda_of(&self, subset: &[usize]) -> Option<u64> {
        self.lambda.iter().find(|(s, _)| s == subset).map(|&(_, l)| l)
    }

    pub fn describe(&self, array: &OrthogonalArray) -> String {
        let one_based = |s: &[usize]| s.iter().map(|i| i + 1).join(",");
        let cell_labels = |subset: &[usize], cell: &[usize]| {
            subset.iter().zip(cell).map(|(&i, &v)| array.tags()[i].labels()[v].clone()).join(",")
        };
        if self.holds {
            let lambdas = self.lambda.iter().map(|(s, l)| format!("{{{}}}={l}", one_based(s))).join(" ");
            format!("strength {}: holds; lambda {lambdas}", self.claimed_t)
        } else {
            let w = self.witness.as_ref().expect("failed report carries a witness");
            format!(
                "strength {}: fails on factors {{{}}}: ({}) occurs {} times but ({}) occurs {} times",
                self.claimed_t,
                one_based(&w.subset),
                cell_labels(&w.subset, &w.first_cell),
                w.first_count,
                cell_labels(&w.subset, &w.cell),
                w.count
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyWitness {
    pub first: Vec<usize>,
    pub first_count: u64,
    pub other: Vec<usize>,
    pub other_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyReport {
    pub holds: bool,
    pub witness: Option<ConjugacyWitness>,
}

impl ConjugacyReport {
    pub fn describe(&self, array: &OrthogonalArray) -> String {
        match &self.witness {
            None => "conjugacy: holds".to_string(),
            Some(w) => {
                let label = |t: &[usize]| t.iter().zip(array.tags()).map(|(&g, tag)| tag.labels()[g].clone()).join(",");
                format!(
                    "conjugacy: fails; ({}) occurs {} times but its conjugate ({}) occurs {} times",
                    label(&w.first),
                    w.first_count,
                    label(&w.other),
                    w.other_count
                )
            }
        }
    }
}

fn default_tags(spec: &FactorSpec) -> Vec<FactorTag> {
    spec.orders().iter().map(|&s| FactorTag::Cyclic(s as usize)).collect()
}

fn check_capacity(spec: &FactorSpec, capacity: u128) -> Result<usize> {
    let needed = spec.complete_size()?;
    if needed > capacity {
        return Err(Error::Capacity { what: "complete factorial", needed, limit: capacity });
    }
    Ok(needed as usize)
}

/// Every treatment combination once, columns in lexicographic order.
pub fn complete_factorial(spec: &FactorSpec) -> Result<OrthogonalArray> {
    complete_factorial_with_capacity(spec, DEFAULT_CAPACITY)
}

pub fn complete_factorial_with_capacity(spec: &FactorSpec, capacity: u128) -> Result<OrthogonalArray> {
    check_capacity(spec, capacity)?;
    let columns = spec.orders().iter().map(|&s| 0..s as usize).multi_cartesian_product().collect::<Vec<_>>();
    OrthogonalArray::from_columns(default_tags(spec), &columns)
}

/// A strength-1 array of size `L_k` that is not the complete factorial:
/// row `i` holds `L_k / s_i` copies of each symbol in a seed-determined
/// order, reshuffled until some treatment combination is missing.
pub fn strength1_noncomplete(spec: &FactorSpec, seed: u64) -> Result<OrthogonalArray> {
    let total = check_capacity(spec, DEFAULT_CAPACITY)?;
    if spec.k() < 2 {
        return Err(Error::Usage("a single factor only admits the complete design at size L_k".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_ATTEMPTS: usize = 10_000;
    for _ in 0..MAX_ATTEMPTS {
        let rows = spec
            .orders()
            .iter()
            .map(|&s| {
                let s = s as usize;
                let mut row = (0..total).map(|j| j % s).collect::<Vec<_>>();
                row.shuffle(&mut rng);
                row
            })
            .collect::<Vec<_>>();
        let array = OrthogonalArray::from_rows(default_tags(spec), &rows)?;
        // size L_k with no repeats would be the complete design
        if array.has_repeats() {
            return Ok(array);
        }
    }
    Err(Error::Internal(format!("no non-complete fill found in {MAX_ATTEMPTS} attempts")))
}
