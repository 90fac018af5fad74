//! Exhaustive backtracking search for arrays of a given size and strength.
//!
//! Arrays are multisets of runs, so the search only visits column sequences
//! that are nondecreasing in lexicographic order. Two prunings keep it exact:
//!
//! * no cell of any `t`-projection may exceed its `lambda_I = N / prod s_i`;
//! * since runs arrive sorted, the leading `m` symbols (`m <= t`) advance one
//!   prefix at a time and a prefix may only be left once it holds its full
//!   `N / (s_1 ... s_m)` runs.
//!
//! Work is bounded by a node budget; running out is reported, never turned
//! into a negative answer.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{compute_d, compute_l, FactorSpec};
use crate::oarray::{FactorTag, OrthogonalArray};

/// Default node ceiling.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Largest complete factorial the search will index.
pub const MAX_SEARCH_COLUMNS: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of column placements.
    pub budget: u64,
    /// Stop after this many arrays.
    pub limit: usize,
    /// Skip arrays that are `lambda` copies of the complete factorial.
    pub exclude_complete: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: DEFAULT_BUDGET, limit: usize::MAX, exclude_complete: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchStatus {
    /// The whole tree was explored.
    Exhausted,
    /// `limit` arrays were found before the tree was exhausted.
    LimitReached,
    /// The node budget ran out; the result list is partial.
    BudgetExceeded,
    /// `N` is not a multiple of `L_t`, so nothing was explored.
    BoundViolation,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Exhausted => "exhausted",
            SearchStatus::LimitReached => "limit-reached",
            SearchStatus::BudgetExceeded => "budget-exceeded",
            SearchStatus::BoundViolation => "bound-violation",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub arrays: Vec<OrthogonalArray>,
    pub explored_nodes: u64,
    pub status: SearchStatus,
    pub note: Option<String>,
}

struct Searcher<'a> {
    config: &'a SearchConfig,
    spec: &'a FactorSpec,
    size: usize,
    total: usize,
    // per t-subset: cell index of every column, and lambda
    cell_of: Vec<Vec<u32>>,
    lambda: Vec<u32>,
    counts: Vec<Vec<u32>>,
    // per prefix length m = 1..=t
    prefix_of: Vec<Vec<u32>>,
    prefix_lambda: Vec<u32>,
    prefix_counts: Vec<Vec<u32>>,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
    nodes: u64,
    out_of_budget: bool,
}

impl Searcher<'_> {
    fn is_complete_multiple(&self) -> bool {
        if !self.size.is_multiple_of(self.total) {
            return false;
        }
        let copies = self.size / self.total;
        self.chosen.iter().enumerate().all(|(j, &c)| c == j / copies)
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.found.len() >= self.config.limit
    }

    fn prefix_ok(&self, c: usize) -> PrefixCheck {
        for (m, prefix) in self.prefix_of.iter().enumerate() {
            let p = prefix[c] as usize;
            match self.chosen.last() {
                None if p != 0 => return PrefixCheck::Stop,
                None => {}
                Some(&prev) => {
                    let q = prefix[prev] as usize;
                    if p == q {
                        continue;
                    }
                    if p > q + 1 || self.prefix_counts[m][q] < self.prefix_lambda[m] {
                        return PrefixCheck::Stop;
                    }
                }
            }
        }
        PrefixCheck::Ok
    }

    fn fits(&self, c: usize) -> bool {
        self.cell_of
            .iter()
            .zip(&self.counts)
            .zip(&self.lambda)
            .all(|((cells, counts), &l)| counts[cells[c] as usize] < l)
            && self
                .prefix_of
                .iter()
                .zip(&self.prefix_counts)
                .zip(&self.prefix_lambda)
                .all(|((cells, counts), &l)| counts[cells[c] as usize] < l)
    }

    fn place(&mut self, c: usize, delta: i32) {
        for (cells, counts) in self.cell_of.iter().zip(self.counts.iter_mut()) {
            let slot = &mut counts[cells[c] as usize];
            *slot = slot.wrapping_add_signed(delta);
        }
        for (cells, counts) in self.prefix_of.iter().zip(self.prefix_counts.iter_mut()) {
            let slot = &mut counts[cells[c] as usize];
            *slot = slot.wrapping_add_signed(delta);
        }
    }

    fn dfs(&mut self) {
        if self.chosen.len() == self.size {
            // every cell is at most lambda and the counts sum to N, so all
            // projections are balanced
            if !(self.config.exclude_complete && self.is_complete_multiple()) {
                self.found.push(self.chosen.clone());
            }
            return;
        }
        let start = self.chosen.last().copied().unwrap_or(0);
        for c in start..self.total {
            if self.done() {
                return;
            }
            if self.prefix_ok(c) == PrefixCheck::Stop {
                return;
            }
            if !self.fits(c) {
                continue;
            }
            if self.nodes >= self.config.budget {
                self.out_of_budget = true;
                return;
            }
            self.nodes += 1;
            self.place(c, 1);
            self.chosen.push(c);
            self.dfs();
            self.chosen.pop();
            self.place(c, -1);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PrefixCheck {
    Ok,
    Stop,
}

fn digits_of(mut c: usize, orders: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; orders.len()];
    for (slot, &s) in digits.iter_mut().zip(orders).rev() {
        *slot = c % s;
        c /= s;
    }
    digits
}

/// Enumerates arrays of `size` runs and strength `t` on `spec`, in canonical
/// (sorted-column) form and deterministic order.
pub fn search_arrays(spec: &FactorSpec, size: usize, t: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    let lt = compute_l(spec, t)?;
    if size == 0 || !(size as u128).is_multiple_of(lt) {
        return Ok(SearchOutcome {
            arrays: Vec::new(),
            explored_nodes: 0,
            status: SearchStatus::BoundViolation,
            note: Some(format!("size {size} is not a positive multiple of L_{t} = {lt}")),
        });
    }
    let total = spec.complete_size()?;
    if total > MAX_SEARCH_COLUMNS {
        return Err(Error::Capacity { what: "search column index", needed: total, limit: MAX_SEARCH_COLUMNS });
    }
    let total = total as usize;
    let orders = spec.orders().iter().map(|&s| s as usize).collect::<Vec<_>>();
    let k = orders.len();
    let digits = (0..total).map(|c| digits_of(c, &orders)).collect::<Vec<_>>();

    let mut cell_of = Vec::new();
    let mut lambda = Vec::new();
    let mut counts = Vec::new();
    for subset in (0..k).combinations(t) {
        let cells: usize = subset.iter().map(|&i| orders[i]).product();
        cell_of.push(digits.iter().map(|d| subset.iter().fold(0, |acc, &i| acc * orders[i] + d[i]) as u32).collect());
        lambda.push((size / cells) as u32);
        counts.push(vec![0u32; cells]);
    }
    let mut prefix_of = Vec::new();
    let mut prefix_lambda = Vec::new();
    let mut prefix_counts = Vec::new();
    for m in 1..=t {
        let cells: usize = orders[..m].iter().product();
        let tail: usize = orders[m..].iter().product();
        prefix_of.push((0..total).map(|c| (c / tail) as u32).collect());
        prefix_lambda.push((size / cells) as u32);
        prefix_counts.push(vec![0u32; cells]);
    }

    let mut searcher = Searcher {
        config,
        spec,
        size,
        total,
        cell_of,
        lambda,
        counts,
        prefix_of,
        prefix_lambda,
        prefix_counts,
        chosen: Vec::with_capacity(size),
        found: Vec::new(),
        nodes: 0,
        out_of_budget: false,
    };
    if config.limit > 0 {
        searcher.dfs();
    }
    let status = if searcher.out_of_budget {
        SearchStatus::BudgetExceeded
    } else if searcher.found.len() >= config.limit {
        SearchStatus::LimitReached
    } else {
        SearchStatus::Exhausted
    };
    let tags = searcher.spec.orders().iter().map(|&s| FactorTag::Cyclic(s as usize)).collect::<Vec<_>>();
    let arrays = searcher
        .found
        .iter()
        .map(|chosen| {
            let columns = chosen.iter().map(|&c| digits[c].clone()).collect::<Vec<_>>();
            OrthogonalArray::from_columns(tags.clone(), &columns)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchOutcome { arrays, explored_nodes: searcher.nodes, status, note: None })
}

#[derive(Debug, Clone)]
pub enum Uniqueness {
    /// The search was exhausted without finding a non-complete array.
    Unique {
        explored_nodes: u64,
    },
    NotUnique {
        witness: OrthogonalArray,
        explored_nodes: u64,
    },
    Inconclusive {
        explored_nodes: u64,
    },
}

impl Uniqueness {
    pub fn explored_nodes(&self) -> u64 {
        match self {
            Uniqueness::Unique { explored_nodes }
            | Uniqueness::NotUnique { explored_nodes, .. }
            | Uniqueness::Inconclusive { explored_nodes } => *explored_nodes,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            Uniqueness::Unique { .. } => "unique",
            Uniqueness::NotUnique { .. } => "not unique",
            Uniqueness::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Whether the complete factorial is the only strength-`t` array of size
/// `L_k`. Only meaningful when `L_t = L_k`, i.e. `t >= d`.
pub fn uniqueness_probe(spec: &FactorSpec, t: usize, budget: u64) -> Result<Uniqueness> {
    let d = compute_d(spec);
    compute_l(spec, t)?;
    if t < d {
        return Err(Error::Usage(format!(
            "strength {t} is below d = {d}, so L_{t} < L_k and smaller arrays of strength {t} are not excluded by the bound"
        )));
    }
    let total = usize::try_from(spec.complete_size()?).map_err(|_| Error::Overflow("complete size"))?;
    let config = SearchConfig { budget, limit: 1, exclude_complete: true };
    let outcome = search_arrays(spec, total, t, &config)?;
    let explored_nodes = outcome.explored_nodes;
    Ok(match (outcome.arrays.into_iter().next(), outcome.status) {
        (Some(witness), _) => Uniqueness::NotUnique { witness, explored_nodes },
        (None, SearchStatus::Exhausted) => Uniqueness::Unique { explored_nodes },
        (None, _) => Uniqueness::Inconclusive { explored_nodes },
    })
}
