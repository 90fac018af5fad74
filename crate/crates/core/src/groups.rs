//! Finite groups given by an ordered element list and a multiplication table.
//!
//! Only what the constructions need: cyclic groups, dihedral groups with the
//! conventional labels for `S3`, `Dih4` and `Dih5`, reorderings, direct
//! products and conjugacy classes.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Groups up to this order get an exhaustive associativity check on
/// construction.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    // row-major n*n, entry [a*n + b] = a*b
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table and validates it: the
    /// table must be a Latin square with a two-sided identity, and for small
    /// orders it must be associative.
    pub fn new(name: impl Into<String>, labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let name = name.into();
        if n == 0 {
            return Err(Error::InvalidGroup(format!("{name}: empty element list")));
        }
        if !labels.iter().all_unique() {
            return Err(Error::InvalidGroup(format!("{name}: duplicate element labels")));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!("{name}: table is not {n}x{n}")));
        }
        let flat = table
            .iter()
            .flatten()
            .map(|&v| {
                if v < n {
                    Ok(v as u32)
                } else {
                    Err(Error::InvalidGroup(format!("{name}: table entry {v} out of range")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let group = Self::from_table(name, labels, flat)?;
        if n <= ASSOCIATIVITY_CHECK_LIMIT && !group.is_associative() {
            return Err(Error::InvalidGroup(format!("{}: table is not associative", group.name)));
        }
        Ok(group)
    }

    // Latin-square and identity checks, no associativity.
    fn from_table(name: String, labels: Vec<String>, table: Vec<u32>) -> Result<Self> {
        let n = labels.len();
        let mut seen = vec![0u32; n];
        let mut stamp = 0u32;
        for line in 0..n {
            for by_row in [true, false] {
                stamp += 1;
                for other in 0..n {
                    let v = if by_row { table[line * n + other] } else { table[other * n + line] };
                    if seen[v as usize] == stamp {
                        let what = if by_row { "row" } else { "column" };
                        return Err(Error::InvalidGroup(format!("{name}: {what} {line} repeats an element")));
                    }
                    seen[v as usize] = stamp;
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e * n + g] as usize == g && table[g * n + e] as usize == g))
            .ok_or_else(|| Error::InvalidGroup(format!("{name}: no identity element")))?;
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g * n + h] as usize == identity).expect("Latin row contains identity"))
            .collect();
        Ok(FiniteGroup { name, labels, table, identity, inverses })
    }

    fn is_associative(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    /// `h g h^-1`
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(h, g), self.inverse(h))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The same group with its elements listed in a different order:
    /// new element `p` is old element `sequence[p]`.
    pub fn reordered(&self, name: impl Into<String>, sequence: &[usize]) -> Result<Self> {
        let n = self.order();
        if sequence.len() != n || !sequence.iter().all_unique() || sequence.iter().any(|&g| g >= n) {
            return Err(Error::Usage(format!("ordering is not a permutation of 0..{n}")));
        }
        let mut position = vec![0usize; n];
        for (p, &g) in sequence.iter().enumerate() {
            position[g] = p;
        }
        let labels = sequence.iter().map(|&g| self.labels[g].clone()).collect();
        let table = (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .map(|(p, q)| position[self.mul(sequence[p], sequence[q])] as u32)
            .collect();
        Self::from_table(name.into(), labels, table)
    }

    /// Same table, new names for the elements.
    pub fn relabeled(&self, name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order() || !labels.iter().all_unique() {
            return Err(Error::Usage("relabeling must give unique names to every element".into()));
        }
        Ok(FiniteGroup { name: name.into(), labels, ..self.clone() })
    }

    /// Whether `other` has the same table as `self` after mapping element
    /// `g` of `self` to `map[g]` of `other`.
    pub fn is_isomorphic_via(&self, other: &FiniteGroup, map: &[usize]) -> bool {
        let n = self.order();
        n == other.order()
            && map.len() == n
            && (0..n).all(|a| (0..n).all(|b| map[self.mul(a, b)] == other.mul(map[a], map[b])))
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.labels.join(" "))
    }
}

/// Conjugacy classes in the group's declared order: classes are ordered by
/// their first element, and elements within a class ascend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyPartition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl ConjugacyPartition {
    fn from_classes(classes: Vec<Vec<usize>>, order: usize) -> Self {
        let mut class_of = vec![usize::MAX; order];
        for (c, class) in classes.iter().enumerate() {
            for &g in class {
                class_of[g] = c;
            }
        }
        ConjugacyPartition { classes, class_of }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// `e | x y | a b c` style rendering.
    pub fn render(&self, group: &FiniteGroup) -> String {
        self.classes.iter().map(|class| class.iter().map(|&g| group.label(g)).join(" ")).join(" | ")
    }
}

/// A named ordering of a group's elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOrdering {
    pub label: String,
    pub sequence: Vec<usize>,
}

impl GroupOrdering {
    /// `e x y a b c`, the order in which [`make_dihedral`] lists `S3`.
    pub fn s3_first() -> Self {
        GroupOrdering { label: "S3-first".into(), sequence: vec![0, 1, 2, 3, 4, 5] }
    }

    /// `e a b c x y`
    pub fn s3_second() -> Self {
        GroupOrdering { label: "S3-second".into(), sequence: vec![0, 3, 4, 5, 1, 2] }
    }

    pub fn natural(n: usize) -> Self {
        GroupOrdering { label: "natural".into(), sequence: (0..n).collect() }
    }

    pub fn apply(&self, group: &FiniteGroup) -> Result<FiniteGroup> {
        group.reordered(group.name().to_string(), &self.sequence)
    }
}

/// `Z_n` with elements `0, 1, ..., n-1`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n < 2 {
        return Err(Error::Usage(format!("cyclic group order must be at least 2, got {n}")));
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let table = (0..n).flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32)).collect();
    FiniteGroup::from_table(format!("Z{n}"), labels, table)
}

/// `Dih_n` from `r^n = f^2 = e, f r f = r^-1`. Element `i + n*j` is
/// `r^i f^j`; rotations are labelled `e, r1, ..., r{n-1}` and reflections
/// `f0, ..., f{n-1}` where `fi = r^i f`.
pub fn dihedral_generic(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::Usage(format!("dihedral group needs n >= 3, got {n}")));
    }
    let size = 2 * n;
    let decode = |g: usize| (g % n, g / n);
    let mut table = Vec::with_capacity(size * size);
    for a in 0..size {
        let (i, fa) = decode(a);
        for b in 0..size {
            let (k, fb) = decode(b);
            // r^i f^fa r^k f^fb = r^(i +- k) f^(fa + fb)
            let rot = if fa == 0 { (i + k) % n } else { (i + n - k) % n };
            table.push((rot + n * ((fa + fb) % 2)) as u32);
        }
    }
    let labels = (0..n)
        .map(|i| if i == 0 { "e".to_string() } else { format!("r{i}") })
        .chain((0..n).map(|i| format!("f{i}")))
        .collect();
    FiniteGroup::from_table(format!("Dih{n}"), labels, table)
}

// Positions in `dihedral_generic(n)` for each named element, in the fixed
// order: rotations r^i at i, reflections r^i f at n + i.
fn named_dihedral(n: usize) -> Option<(&'static str, Vec<(&'static str, usize)>)> {
    match n {
        // x, y: 3-cycles; a, b, c: transpositions
        3 => Some(("S3", vec![("e", 0), ("x", 1), ("y", 2), ("a", 3), ("b", 4), ("c", 5)])),
        // q: half-turn; r, s: quarter-turns; f0 and r^2 f fix the diagonals
        // through opposite vertices, r f and r^3 f the edge-midpoint axes.
        4 => Some(("Dih4", vec![("e", 0), ("q", 2), ("r", 1), ("s", 3), ("a", 4), ("b", 6), ("x", 5), ("y", 7)])),
        // a, d: rotations by +-72; b, c: by +-144; v..z: the five reflections
        5 => Some((
            "Dih5",
            vec![("e", 0), ("a", 1), ("b", 2), ("c", 3), ("d", 4), ("v", 5), ("w", 6), ("x", 7), ("y", 8), ("z", 9)],
        )),
        _ => None,
    }
}

/// Dihedral group of order `2n`. For `n = 3, 4, 5` the elements carry the
/// conventional names (`S3`: `e x y a b c`; `Dih4`: `e q r s a b x y`;
/// `Dih5`: `e a b c d v w x y z`), listed in that order.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    let generic = dihedral_generic(n)?;
    match named_dihedral(n) {
        Some((name, named)) => {
            let sequence = named.iter().map(|&(_, g)| g).collect::<Vec<_>>();
            let labels = named.iter().map(|&(l, _)| l.to_string()).collect();
            generic.reordered(name, &sequence)?.relabeled(name, labels)
        }
        None => Ok(generic),
    }
}

/// Classes as orbits of `g -> h g h^-1`.
pub fn conjugacy_classes(group: &FiniteGroup) -> ConjugacyPartition {
    let n = group.order();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for g in 0..n {
        if assigned[g] {
            continue;
        }
        let mut class = (0..n).map(|h| group.conjugate(g, h)).collect::<Vec<_>>();
        class.sort_unstable();
        class.dedup();
        for &c in &class {
            assigned[c] = true;
        }
        classes.push(class);
    }
    ConjugacyPartition::from_classes(classes, n)
}

fn mixed_radix_index(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

fn mixed_radix_digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    digits
}

/// Componentwise product. Elements are ordered lexicographically with the
/// first factor most significant and are labelled `(g1,g2,...)`.
pub fn direct_product(groups: &[FiniteGroup]) -> Result<FiniteGroup> {
    if groups.is_empty() {
        return Err(Error::Usage("direct product of an empty list".into()));
    }
    let radices = groups.iter().map(FiniteGroup::order).collect::<Vec<_>>();
    let size = radices
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .filter(|&s| s.checked_mul(s).is_some_and(|sq| sq <= u32::MAX as usize))
        .ok_or(Error::Capacity {
            what: "direct product table",
            needed: radices.iter().map(|&r| r as u128).product(),
            limit: 65535,
        })?;
    let digits = (0..size).map(|g| mixed_radix_digits(g, &radices)).collect::<Vec<_>>();
    let mut table = Vec::with_capacity(size * size);
    let mut scratch = vec![0usize; groups.len()];
    for a in &digits {
        for b in &digits {
            for (i, group) in groups.iter().enumerate() {
                scratch[i] = group.mul(a[i], b[i]);
            }
            table.push(mixed_radix_index(&scratch, &radices) as u32);
        }
    }
    let labels = digits
        .iter()
        .map(|d| format!("({})", d.iter().zip(groups).map(|(&g, group)| group.label(g)).join(",")))
        .collect();
    let name = groups.iter().map(FiniteGroup::name).join("x");
    FiniteGroup::from_table(name, labels, table)
}

/// Conjugacy classes of the direct product, formed as Cartesian products of
/// the factors' classes without materialising the product table. Class and
/// element order agree with `conjugacy_classes(&direct_product(groups))`.
pub fn product_conjugacy_classes(groups: &[FiniteGroup]) -> Vec<Vec<Vec<usize>>> {
    let per_factor = groups.iter().map(conjugacy_classes).collect::<Vec<_>>();
    per_factor
        .iter()
        .map(|p| p.classes().to_vec())
        .multi_cartesian_product()
        .map(|factor_classes| factor_classes.into_iter().multi_cartesian_product().collect())
        .collect()
}

/// Flattens tuples from [`product_conjugacy_classes`] into product-group
/// element indices.
pub fn product_class_indices(groups: &[FiniteGroup]) -> Vec<Vec<usize>> {
    let radices = groups.iter().map(FiniteGroup::order).collect::<Vec<_>>();
    product_conjugacy_classes(groups)
        .into_iter()
        .map(|class| class.iter().map(|tuple| mixed_radix_index(tuple, &radices)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(group: &FiniteGroup) {
        let n = group.order();
        let e = group.identity();
        for g in 0..n {
            assert_eq!(group.mul(e, g), g);
            assert_eq!(group.mul(g, group.inverse(g)), e);
        }
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            assert!(group.is_associative());
        }
    }

    #[test]
    fn cyclic_examples() {
        let z2 = make_cyclic(2).unwrap();
        assert_eq!(z2.table, vec![0, 1, 1, 0]);
        let z3 = make_cyclic(3).unwrap();
        assert_eq!(conjugacy_classes(&z3).classes(), &[vec![0], vec![1], vec![2]]);
        let z4 = make_cyclic(4).unwrap();
        assert_eq!(z4.identity(), 0);
        assert_eq!(z4.inverse(2), 2);
        assert_eq!(z4.labels(), &["0", "1", "2", "3"]);
        assert!(matches!(make_cyclic(1), Err(Error::Usage(_))));
    }

    #[test]
    fn named_dihedral_classes() {
        let s3 = make_dihedral(3).unwrap();
        assert_eq!(s3.name(), "S3");
        assert_eq!(conjugacy_classes(&s3).render(&s3), "e | x y | a b c");
        let d4 = make_dihedral(4).unwrap();
        assert_eq!(conjugacy_classes(&d4).render(&d4), "e | q | r s | a b | x y");
        let d5 = make_dihedral(5).unwrap();
        assert_eq!(conjugacy_classes(&d5).render(&d5), "e | a d | b c | v w x y z");
        assert_eq!(conjugacy_classes(&d5).sizes(), vec![1, 2, 2, 5]);
        assert!(matches!(make_dihedral(2), Err(Error::Usage(_))));
    }

    #[test]
    fn named_labels_match_geometry() {
        let s3 = make_dihedral(3).unwrap();
        let x = s3.index_of("x").unwrap();
        // 3-cycles have order 3
        assert_eq!(s3.mul(x, s3.mul(x, x)), s3.identity());
        assert_ne!(s3.mul(x, x), s3.identity());

        let d4 = make_dihedral(4).unwrap();
        let q = d4.index_of("q").unwrap();
        let r = d4.index_of("r").unwrap();
        assert_eq!(d4.mul(r, r), q);
        // q is central
        assert!((0..8).all(|g| d4.mul(q, g) == d4.mul(g, q)));
        // the diagonal reflections commute with each other, and so do the
        // edge reflections; a and x do not
        let (a, b, x) = (d4.index_of("a").unwrap(), d4.index_of("b").unwrap(), d4.index_of("x").unwrap());
        assert_eq!(d4.mul(a, b), q);
        assert_ne!(d4.mul(a, x), d4.mul(x, a));

        let d5 = make_dihedral(5).unwrap();
        let (a, d) = (d5.index_of("a").unwrap(), d5.index_of("d").unwrap());
        assert_eq!(d5.mul(a, d), d5.identity());
        let b = d5.index_of("b").unwrap();
        assert_eq!(d5.mul(a, a), b);
    }

    #[test]
    fn named_variants_are_relabelings_of_generic() {
        for n in 3..=5 {
            let generic = dihedral_generic(n).unwrap();
            let named = make_dihedral(n).unwrap();
            let (_, pairs) = named_dihedral(n).unwrap();
            let mut map = vec![0; 2 * n];
            for (pos, &(_, g)) in pairs.iter().enumerate() {
                map[g] = pos;
            }
            assert!(generic.is_isomorphic_via(&named, &map));
        }
    }

    #[test]
    fn groups_are_valid() {
        for n in 2..=12 {
            assert_valid(&make_cyclic(n).unwrap());
        }
        for n in 3..=10 {
            let g = make_dihedral(n).unwrap();
            assert_valid(&g);
            assert!(!g.is_abelian());
        }
    }

    #[test]
    fn new_rejects_bad_tables() {
        let labels = vec!["e".to_string(), "g".to_string()];
        assert!(FiniteGroup::new("ok", labels.clone(), vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroup::new("latin", labels.clone(), vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(FiniteGroup::new("range", labels.clone(), vec![vec![0, 2], vec![1, 0]]).is_err());
        // Latin square with identity 0 that is not associative (order 5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let labels5 = (0..5).map(|i| i.to_string()).collect();
        assert!(
            matches!(FiniteGroup::new("loop", labels5, loop5), Err(Error::InvalidGroup(m)) if m.contains("associative"))
        );
    }

    #[test]
    fn s3_orderings() {
        let s3 = make_dihedral(3).unwrap();
        let second = GroupOrdering::s3_second().apply(&s3).unwrap();
        assert_eq!(second.labels(), &["e", "a", "b", "c", "x", "y"]);
        assert_eq!(conjugacy_classes(&second).render(&second), "e | a b c | x y");
        let first = GroupOrdering::s3_first().apply(&s3).unwrap();
        assert_eq!(first, s3);
    }

    #[test]
    fn direct_product_examples() {
        let z2 = make_cyclic(2).unwrap();
        let klein = direct_product(&[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(klein.order(), 4);
        assert!(klein.is_abelian());
        assert!((0..4).all(|g| klein.mul(g, g) == klein.identity()));
        assert_eq!(conjugacy_classes(&klein).len(), 4);

        let s3 = make_dihedral(3).unwrap();
        let s3z2 = direct_product(&[s3.clone(), z2.clone()]).unwrap();
        assert_valid(&s3z2);
        let classes = conjugacy_classes(&s3z2);
        let mut sizes = classes.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(classes.classes(), product_class_indices(&[s3, z2.clone()]).as_slice());

        let d4 = make_dihedral(4).unwrap();
        let big = direct_product(&[d4.clone(), z2.clone(), z2.clone()]).unwrap();
        assert_eq!(conjugacy_classes(&big).len(), 20);
        assert_eq!(conjugacy_classes(&big).classes(), product_class_indices(&[d4, z2.clone(), z2]).as_slice());
    }

    #[test]
    fn class_equation() {
        for group in [make_dihedral(3), make_dihedral(4), make_dihedral(5), make_dihedral(7)] {
            let group = group.unwrap();
            let part = conjugacy_classes(&group);
            assert_eq!(part.sizes().iter().sum::<usize>(), group.order());
            assert!(part.sizes().iter().all(|s| group.order() % s == 0));
            assert_eq!(part.classes()[0], vec![group.identity()]);
        }
    }
}
