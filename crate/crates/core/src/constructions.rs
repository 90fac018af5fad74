//! Proper fractions of strength `k - 1` whose counting function is constant
//! on conjugacy classes.
//!
//! The first factor carries a nonabelian group (`S3`, `Dih4` or `Dih5` for
//! orders 6, 8, 10) and every other factor `i` is `Z_{s_i}`. Three cases are
//! distinguished by `g = gcd(s_1, ..., s_k)`:
//!
//! | case  | shapes            | size `N`       | fraction |
//! |-------|-------------------|----------------|----------|
//! | Gcd24 | `g` is 2 or 4     | `L_{k-1}`      | 1/2, 1/4 |
//! | Gcd6  | `6^k`             | `3 L_{k-1}`    | 1/2      |
//! | Gcd3  | `6 x 3^{k-1}`     | `2 L_{k-1}`    | 2/3      |
//!
//! Rows are filled from repetition counts `v_1..v_k`:
//!
//! * row 1: the elements of `G_1` in their fixed order, `v_1` times over
//!   (Gcd3: forward and reversed alternately, using `S3` as `e a b c x y`);
//! * rows 2..k-1: each element of `Z_{s_j}` repeated `v_j` times, the block
//!   tiled to length `N`;
//! * row k: blocks of `v_k` equal symbols, the element order running forward
//!   then reversed alternately (Gcd3: rotated cyclically by one on each pass).

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{compute_l, FactorSpec};
use crate::oarray::{ConjugacyReport, FactorTag, OrthogonalArray, StrengthReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    Gcd24,
    Gcd6,
    Gcd3,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Gcd24 => "gcd 2/4",
            Case::Gcd6 => "gcd 6",
            Case::Gcd3 => "gcd 3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionRecipe {
    pub spec: FactorSpec,
    pub case: Case,
    /// `v[j]` is `v_{j+1}`.
    pub v: Vec<u64>,
    pub size: usize,
    /// Group and element order of the first factor.
    pub first_tag: FactorTag,
    pub last_row: LastRowRule,
    /// Whether this spec is one of the tabulated, previously checked shapes.
    pub tabulated: bool,
}

impl ConstructionRecipe {
    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn tags(&self) -> Vec<FactorTag> {
        std::iter::once(self.first_tag)
            .chain(self.spec.orders()[1..].iter().map(|&s| FactorTag::Cyclic(s as usize)))
            .collect()
    }
}

/// One row of the reference table: the shape, its complete size, the
/// constructed size and the fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub orders: &'static [u64],
    pub complete: u128,
    pub size: usize,
    pub fraction: (u128, u128),
    /// Block of the table, 1..=4 (gcd 2, gcd 4, gcd 6, gcd 3).
    pub block: usize,
    pub note: &'static str,
}

const fn row(orders: &'static [u64], complete: u128, size: usize, fraction: (u128, u128), block: usize) -> TableRow {
    TableRow { orders, complete, size, fraction, block, note: "" }
}

/// The 31 shapes with their expected sizes, in table order.
pub const REFERENCE_TABLE: [TableRow; 31] = [
    row(&[6, 2, 2], 24, 12, (1, 2), 1),
    row(&[6, 2, 2, 2], 48, 24, (1, 2), 1),
    row(&[6, 4, 4], 96, 48, (1, 2), 1),
    row(&[6, 4, 4, 4], 384, 192, (1, 2), 1),
    row(&[6, 4, 2], 48, 24, (1, 2), 1),
    row(&[6, 6, 2], 72, 36, (1, 2), 1),
    row(&[6, 6, 4], 144, 72, (1, 2), 1),
    row(&[8, 2, 2], 32, 16, (1, 2), 1),
    row(&[8, 2, 2, 2], 64, 32, (1, 2), 1),
    row(&[8, 2, 2, 2, 2], 128, 64, (1, 2), 1),
    row(&[8, 2, 2, 2, 2, 2], 256, 128, (1, 2), 1),
    row(&[8, 6, 6], 288, 144, (1, 2), 1),
    row(&[8, 6, 6, 6], 1728, 864, (1, 2), 1),
    row(&[8, 4, 2], 64, 32, (1, 2), 1),
    row(&[8, 6, 2], 96, 48, (1, 2), 1),
    row(&[8, 6, 4], 192, 96, (1, 2), 1),
    row(&[10, 2, 2], 40, 20, (1, 2), 1),
    row(&[10, 2, 2, 2], 80, 40, (1, 2), 1),
    row(&[10, 4, 4], 160, 80, (1, 2), 1),
    row(&[10, 4, 4, 4], 640, 320, (1, 2), 1),
    row(&[10, 6, 6], 360, 180, (1, 2), 1),
    row(&[10, 6, 6, 6], 2160, 1080, (1, 2), 1),
    row(&[10, 4, 2], 80, 40, (1, 2), 1),
    row(&[10, 6, 2], 120, 60, (1, 2), 1),
    row(&[10, 6, 4], 240, 120, (1, 2), 1),
    row(&[8, 4, 4], 128, 32, (1, 4), 2),
    row(&[8, 4, 4, 4], 512, 128, (1, 4), 2),
    TableRow { note: "=3L(k-1)", ..row(&[6, 6, 6], 216, 108, (1, 2), 3) },
    TableRow { note: "=3L(k-1)", ..row(&[6, 6, 6, 6], 1296, 648, (1, 2), 3) },
    TableRow { note: "=2L(k-1)", ..row(&[6, 3, 3], 54, 36, (2, 3), 4) },
    TableRow { note: "=2L(k-1)", ..row(&[6, 3, 3, 3], 162, 108, (2, 3), 4) },
];

pub fn is_tabulated(spec: &FactorSpec) -> bool {
    REFERENCE_TABLE.iter().any(|r| r.orders == spec.orders())
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::UnsupportedCase(msg.into())
}

fn to_u64(v: u128, what: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Knobs for [`select_recipe_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecipeOptions {
    /// Force the element order of `S3` (`FactorTag::S3` or
    /// `FactorTag::S3Second`) when `s_1 = 6`.
    pub s3_order: Option<FactorTag>,
    pub last_row: LastRowRule,
}

impl Default for RecipeOptions {
    fn default() -> Self {
        RecipeOptions { s3_order: None, last_row: LastRowRule::DigitSum }
    }
}

/// Picks the construction case for `spec` and computes `v_1..v_k` and `N`.
pub fn select_recipe(spec: &FactorSpec) -> Result<ConstructionRecipe> {
    select_recipe_with(spec, RecipeOptions::default())
}

pub fn select_recipe_with(spec: &FactorSpec, options: RecipeOptions) -> Result<ConstructionRecipe> {
    let s3_override = options.s3_order;
    let k = spec.k();
    let orders = spec.orders();
    let s1 = orders[0];
    let first_group = match s1 {
        6 => FactorTag::S3,
        8 => FactorTag::Dih4,
        10 => FactorTag::Dih5,
        _ => {
            let hint = match orders.iter().position(|s| [6, 8, 10].contains(s)) {
                Some(pos) => format!("; hint: list the factor of order {} first", orders[pos]),
                None => String::new(),
            };
            return Err(unsupported(format!(
                "the first factor must have order 6, 8 or 10 (S3, Dih4, Dih5), got {s1}{hint}"
            )));
        }
    };
    if k < 3 {
        return Err(unsupported(format!("constructions need at least 3 factors, got {k}")));
    }
    if let Some(tag) = s3_override {
        if s1 != 6 || !matches!(tag, FactorTag::S3 | FactorTag::S3Second) {
            return Err(Error::Usage(format!("ordering override {tag} only applies to S3 in the first slot")));
        }
    }
    let l_prev = compute_l(spec, k - 1)?;
    let g = spec.gcd_all();
    let (case, n, default_first) = match g {
        2 | 4 => (Case::Gcd24, l_prev, first_group),
        6 => {
            if !orders.iter().all(|&s| s == 6) {
                return Err(unsupported(format!("gcd 6 is only handled for symmetric 6^k designs, got {spec}")));
            }
            (Case::Gcd6, 3 * l_prev, FactorTag::S3)
        }
        3 => {
            if s1 != 6 || !orders[1..].iter().all(|&s| s == 3) {
                return Err(unsupported(format!("gcd 3 is only handled for 6x3x...x3 designs, got {spec}")));
            }
            (Case::Gcd3, 2 * l_prev, FactorTag::S3Second)
        }
        1 => {
            return Err(unsupported(format!(
                "the orders of {spec} share no common factor, so L_(k-1) = L_k and no proper fraction of strength k-1 exists"
            )))
        }
        other => return Err(unsupported(format!("gcd {other} is not one of 2, 3, 4, 6"))),
    };
    let size = usize::try_from(n).map_err(|_| Error::Overflow("array size"))?;
    // v_1 = N / s_1, v_j = N / (s_2 ... s_j)
    let mut v = Vec::with_capacity(k);
    let exact = |num: u128, den: u128, j: usize| -> Result<u64> {
        if !num.is_multiple_of(den) {
            return Err(unsupported(format!("v_{j} = {num}/{den} is not an integer for {spec}")));
        }
        to_u64(num / den, "v_j")
    };
    v.push(exact(n, s1 as u128, 1)?);
    let mut partial = 1u128;
    for (j, &s) in orders.iter().enumerate().skip(1) {
        partial *= s as u128;
        v.push(exact(n, partial, j + 1)?);
    }
    Ok(ConstructionRecipe {
        spec: spec.clone(),
        case,
        v,
        size,
        first_tag: s3_override.unwrap_or(default_first),
        last_row: options.last_row,
        tabulated: is_tabulated(spec),
    })
}

// Repeats `pass(p)` for p = 0, 1, ... until `len` entries are written.
fn fill_passes(len: usize, pass_len: usize, pass: impl Fn(usize) -> Vec<usize>) -> Result<Vec<usize>> {
    if pass_len == 0 || !len.is_multiple_of(pass_len) {
        return Err(Error::Internal(format!("row of {len} entries is not a whole number of {pass_len}-entry passes")));
    }
    Ok((0..len / pass_len).flat_map(pass).collect())
}

fn blocks(order: &[usize], repeat: usize) -> Vec<usize> {
    order.iter().flat_map(|&g| std::iter::repeat_n(g, repeat)).collect()
}

/// Row 1 as symbol indices into `recipe.first_tag`'s element order.
pub fn fill_row1(recipe: &ConstructionRecipe) -> Result<Vec<usize>> {
    let s1 = recipe.spec.order(0) as usize;
    let forward = (0..s1).collect::<Vec<_>>();
    match recipe.case {
        Case::Gcd24 | Case::Gcd6 => fill_passes(recipe.size, s1, |_| forward.clone()),
        Case::Gcd3 => fill_passes(recipe.size, s1, |p| {
            if p % 2 == 0 {
                forward.clone()
            } else {
                forward.iter().rev().copied().collect()
            }
        }),
    }
}

/// Row `j` for `2 <= j <= k-1` (1-based): each element of `Z_{s_j}`
/// repeated `v_j` times, tiled.
pub fn fill_middle_row(recipe: &ConstructionRecipe, j: usize) -> Result<Vec<usize>> {
    if j < 2 || j >= recipe.k() {
        return Err(Error::Usage(format!("middle rows are 2..={}, got {j}", recipe.k() - 1)));
    }
    let s = recipe.spec.order(j - 1) as usize;
    let vj = recipe.v[j - 1] as usize;
    let block = blocks(&(0..s).collect::<Vec<_>>(), vj);
    fill_passes(recipe.size, block.len(), |_| block.clone())
}

/// How the last row varies from one pass to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LastRowRule {
    /// Forward and reversed element order alternating with the pass index
    /// (Gcd3: rotated by the pass index).
    Alternating,
    /// Element order rotated by the digit sum of the pass, i.e. by
    /// `z_2 + ... + z_{k-1}` for the middle-row symbols the pass spans.
    DigitSum,
}

impl fmt::Display for LastRowRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LastRowRule::Alternating => "alternating",
            LastRowRule::DigitSum => "digit-sum",
        })
    }
}

/// Row `k`.
pub fn fill_last_row(recipe: &ConstructionRecipe) -> Result<Vec<usize>> {
    let k = recipe.k();
    let s = recipe.spec.order(k - 1) as usize;
    let vk = recipe.v[k - 1] as usize;
    let forward = (0..s).collect::<Vec<_>>();
    // pass p lists (0 - r, 1 - r, ..., s - 1 - r) mod s: 012 | 201 | 120
    let rotated = |r: usize| blocks(&(0..s).map(|b| (b + s - r % s) % s).collect::<Vec<_>>(), vk);
    let middle = recipe.spec.orders()[1..k - 1].iter().map(|&o| o as usize).collect::<Vec<_>>();
    let digit_sum = |mut p: usize| {
        let mut sum = 0;
        for &radix in middle.iter().rev() {
            sum += p % radix;
            p /= radix;
        }
        sum
    };
    match (recipe.last_row, recipe.case) {
        (LastRowRule::Alternating, Case::Gcd24 | Case::Gcd6) => fill_passes(recipe.size, s * vk, |p| {
            if p % 2 == 0 {
                blocks(&forward, vk)
            } else {
                blocks(&forward.iter().rev().copied().collect::<Vec<_>>(), vk)
            }
        }),
        (LastRowRule::Alternating, Case::Gcd3) => fill_passes(recipe.size, s * vk, rotated),
        (LastRowRule::DigitSum, _) => fill_passes(recipe.size, s * vk, |p| rotated(digit_sum(p))),
    }
}

pub fn construct_recipe(recipe: &ConstructionRecipe) -> Result<OrthogonalArray> {
    let k = recipe.k();
    let mut rows = Vec::with_capacity(k);
    rows.push(fill_row1(recipe)?);
    for j in 2..k {
        rows.push(fill_middle_row(recipe, j)?);
    }
    rows.push(fill_last_row(recipe)?);
    OrthogonalArray::from_rows(recipe.tags(), &rows)
}

pub fn construct(spec: &FactorSpec) -> Result<OrthogonalArray> {
    construct_recipe(&select_recipe(spec)?)
}

/// A constructed array with its verification results.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub row: usize,
    pub block: usize,
    pub recipe: ConstructionRecipe,
    pub array: OrthogonalArray,
    pub complete: u128,
    pub fraction: (u128, u128),
    pub strength: StrengthReport,
    pub max_strength: usize,
    pub conjugacy: ConjugacyReport,
    pub proper: bool,
    pub note: &'static str,
}

impl CatalogEntry {
    pub fn design(&self) -> String {
        self.recipe.spec.orders().iter().join(" x ")
    }

    /// File stem such as `oa_08x04x04`.
    pub fn file_stem(&self) -> String {
        format!("oa_{}", self.recipe.spec.orders().iter().map(|s| format!("{s:02}")).join("x"))
    }

    pub fn summary(&self) -> CatalogSummary {
        CatalogSummary {
            design: self.recipe.spec.to_string(),
            case: self.recipe.case,
            complete: self.complete,
            size: self.array.size(),
            fraction: format!("{}/{}", self.fraction.0, self.fraction.1),
            strength: self.max_strength,
            conjugacy: self.conjugacy.holds,
            repeats: self.array.has_repeats(),
            note: self.note.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogSummary {
    pub design: String,
    pub case: Case,
    pub complete: u128,
    pub size: usize,
    pub fraction: String,
    pub strength: usize,
    pub conjugacy: bool,
    pub repeats: bool,
    pub note: String,
}

fn build_entry(index: usize, expected: &TableRow) -> Result<CatalogEntry> {
    let spec = FactorSpec::new(expected.orders.to_vec())?;
    let design = spec.to_string();
    let fail = |message: String| Error::Catalog { row: index + 1, design: design.clone(), message };
    let recipe = select_recipe(&spec).map_err(|e| fail(e.to_string()))?;
    let array = construct_recipe(&recipe).map_err(|e| fail(e.to_string()))?;
    let k = spec.k();
    let complete = spec.complete_size()?;
    let fraction = array.fraction()?;
    let strength = array.verify_strength(k - 1)?;
    let max_strength = array.max_strength();
    let conjugacy = array.verify_conjugacy_tags()?;
    let proper = array.is_proper_fraction();

    if complete != expected.complete {
        return Err(fail(format!("complete size {complete}, table says {}", expected.complete)));
    }
    if array.size() != expected.size {
        return Err(fail(format!("array size {}, table says {}", array.size(), expected.size)));
    }
    if fraction != expected.fraction {
        return Err(fail(format!(
            "fraction {}/{}, table says {}/{}",
            fraction.0, fraction.1, expected.fraction.0, expected.fraction.1
        )));
    }
    if max_strength != k - 1 {
        return Err(fail(format!("strength {max_strength}, expected exactly {}", k - 1)));
    }
    if !conjugacy.holds {
        return Err(fail(conjugacy.describe(&array)));
    }
    array.divisibility_check(k - 1).map_err(|e| fail(e.to_string()))?;
    Ok(CatalogEntry {
        row: index + 1,
        block: expected.block,
        recipe,
        array,
        complete,
        fraction,
        strength,
        max_strength,
        conjugacy,
        proper,
        note: expected.note,
    })
}

/// Constructs and verifies all 31 tabulated arrays, in table order. Any
/// disagreement with the table is an [`Error::Catalog`] naming the row.
pub fn build_reference_catalog() -> Result<Vec<CatalogEntry>> {
    REFERENCE_TABLE.par_iter().enumerate().map(|(i, row)| build_entry(i, row)).collect()
}

/// Fixed-column text rendering of the catalog, one block per gcd group.
pub fn render_catalog(entries: &[CatalogEntry]) -> String {
    let header = format!(
        "{:<24} {:>15} {:>10} {:>9} {:>9} {:>8} {:>10} {:>8}",
        "Complete design", "Size complete", "Size array", "Note", "Fraction", "Strength", "Conjugacy", "Repeats"
    );
    let rule = "-".repeat(header.len());
    let mut out = format!("{rule}\n{header}\n{rule}\n");
    for (i, e) in entries.iter().enumerate() {
        if i > 0 && entries[i - 1].block != e.block {
            out.push_str(&rule);
            out.push('\n');
        }
        out.push_str(&format!(
            "{:<24} {:>15} {:>10} {:>9} {:>9} {:>8} {:>10} {:>8}\n",
            e.design(),
            e.complete,
            e.array.size(),
            e.note,
            format!("{}/{}", e.fraction.0, e.fraction.1),
            e.max_strength,
            if e.conjugacy.holds { "yes" } else { "no" },
            if e.proper { "no" } else { "yes" }
        ));
    }
    out.push_str(&rule);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(orders: &[u64]) -> FactorSpec {
        FactorSpec::new(orders.to_vec()).unwrap()
    }

    fn rle(row: &[usize]) -> Vec<(usize, usize)> {
        row.iter().chunk_by(|&&v| v).into_iter().map(|(v, g)| (v, g.count())).collect()
    }

    #[test]
    fn recipes() {
        let r = select_recipe(&spec(&[8, 4, 4])).unwrap();
        assert_eq!((r.case, r.size, r.v.clone()), (Case::Gcd24, 32, vec![4, 8, 2]));
        assert_eq!(r.first_tag, FactorTag::Dih4);

        let r = select_recipe(&spec(&[6, 6, 6])).unwrap();
        assert_eq!((r.case, r.size, r.v.clone()), (Case::Gcd6, 108, vec![18, 18, 3]));

        let r = select_recipe(&spec(&[6, 3, 3])).unwrap();
        assert_eq!((r.case, r.size, r.v.clone()), (Case::Gcd3, 36, vec![6, 12, 4]));
        assert_eq!(r.first_tag, FactorTag::S3Second);

        let r = select_recipe(&spec(&[6, 3, 3, 3])).unwrap();
        assert_eq!((r.size, r.v.clone()), (108, vec![18, 36, 12, 4]));

        let r = select_recipe(&spec(&[6, 6, 6, 6])).unwrap();
        assert_eq!((r.size, r.v.clone()), (648, vec![108, 108, 18, 3]));
    }

    #[test]
    fn unsupported_shapes() {
        for bad in [&[6, 5, 5][..], &[10, 5, 5], &[6, 6, 3], &[12, 2, 2], &[6, 2], &[6, 6, 6, 3]] {
            let err = select_recipe(&spec(bad)).unwrap_err();
            assert!(matches!(err, Error::UnsupportedCase(_)), "{bad:?}: {err:?}");
        }
        let err = select_recipe(&spec(&[2, 2, 8])).unwrap_err().to_string();
        assert!(err.contains("hint: list the factor of order 8 first"), "{err}");
        let err = select_recipe(&spec(&[6, 5, 5])).unwrap_err().to_string();
        assert!(err.contains("no common factor"), "{err}");
        let s3 = RecipeOptions { s3_order: Some(FactorTag::S3), ..Default::default() };
        assert!(select_recipe_with(&spec(&[8, 2, 2]), s3).is_err());
    }

    #[test]
    fn row_fills() {
        let r = select_recipe(&spec(&[6, 2, 2, 2])).unwrap();
        assert_eq!(fill_row1(&r).unwrap(), (0..24).map(|j| j % 6).collect::<Vec<_>>());
        assert_eq!(rle(&fill_middle_row(&r, 3).unwrap()), vec![(0, 6), (1, 6), (0, 6), (1, 6)]);

        let r = select_recipe(&spec(&[8, 4, 4, 4])).unwrap();
        assert_eq!(r.size, 128);
        assert_eq!(rle(&fill_middle_row(&r, 2).unwrap()), vec![(0, 32), (1, 32), (2, 32), (3, 32)]);
        assert!(fill_middle_row(&r, 1).is_err());
        assert!(fill_middle_row(&r, 4).is_err());

        let r = select_recipe(&spec(&[10, 2, 2])).unwrap();
        assert_eq!(rle(&fill_last_row(&r).unwrap()), vec![(0, 5), (1, 10), (0, 5)]);

        let r = select_recipe(&spec(&[6, 3, 3])).unwrap();
        assert_eq!(rle(&fill_middle_row(&r, 2).unwrap()), vec![(0, 12), (1, 12), (2, 12)]);
        assert_eq!(rle(&fill_last_row(&r).unwrap()), vec![(0, 4), (1, 4), (2, 8), (0, 4), (1, 8), (2, 4), (0, 4)]);
    }

    #[test]
    fn gcd6_leading_block_is_union_of_classes() {
        let r = select_recipe(&spec(&[6, 6, 6])).unwrap();
        let vk = r.v[2] as usize;
        let s3 = r.first_tag.group();
        let first = &s3.labels()[..vk];
        assert_eq!(first, &["e", "x", "y"]);
        let classes = crate::groups::conjugacy_classes(&s3);
        let chosen = (0..vk).collect::<Vec<_>>();
        assert!(classes
            .classes()
            .iter()
            .all(|c| c.iter().all(|g| chosen.contains(g)) || c.iter().all(|g| !chosen.contains(g))));
    }

    #[test]
    fn table_rows_consistent() {
        assert_eq!(REFERENCE_TABLE.len(), 31);
        for r in &REFERENCE_TABLE {
            let s = spec(r.orders);
            assert_eq!(s.complete_size().unwrap(), r.complete);
            let g = crate::numtheory::gcd(r.size as u128, r.complete);
            assert_eq!((r.size as u128 / g, r.complete / g), r.fraction);
        }
    }
}
