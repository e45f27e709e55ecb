//! The poset-graded chain complex data model.
//!
//! A [`GradedComplex`] is an ordered list of generators, each carrying a
//! homological dimension and a poset grade, together with a sparse boundary
//! matrix stored column-major. The global order is canonical: grade blocks
//! follow the linear extension of the poset, dimensions ascend within a
//! grade, and declaration order breaks ties. Everything downstream (pivots,
//! reductions, output bytes) is deterministic because this order is.
//!
//! Validation reports violations as data rather than failing fast, so a
//! caller can list every offending entry of a broken input at once.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::field::PrimeField;
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("duplicate generator id `{0}`")]
    DuplicateId(String),
    #[error("unknown generator id `{0}`")]
    UnknownId(String),
    #[error("generator `{0}` has grade index {1} outside the poset")]
    GradeOutOfRange(String, usize),
    #[error("boundary of `{0}` declared more than once")]
    DuplicateBoundary(String),
}

/// A labelled basis element with homological dimension and poset grade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub dim: i32,
    /// Element index into the poset (not its extension position).
    pub grade: usize,
}

impl Generator {
    pub fn new(id: impl Into<String>, dim: i32, grade: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            grade,
        }
    }
}

/// A sparse vector over the generator basis: strictly increasing row
/// positions, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct SparseColumn {
    entries: Vec<(u32, u64)>,
}

impl SparseColumn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(pos: u32) -> Self {
        Self {
            entries: vec![(pos, 1)],
        }
    }

    /// Accumulates arbitrary `(position, coefficient)` pairs: duplicates are
    /// summed, coefficients reduced, zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, i64)>, field: &PrimeField) -> Self {
        let mut acc: Vec<(u32, u64)> = Vec::new();
        for (pos, c) in pairs {
            acc.push((pos, field.reduce(c)));
        }
        acc.sort_by_key(|&(pos, _)| pos);
        let mut entries: Vec<(u32, u64)> = Vec::with_capacity(acc.len());
        for (pos, c) in acc {
            match entries.last_mut() {
                Some((last, v)) if *last == pos => *v = field.add(*v, c),
                _ => entries.push((pos, c)),
            }
        }
        entries.retain(|&(_, v)| v != 0);
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The largest row position carrying a nonzero coefficient.
    pub fn pivot(&self) -> Option<u32> {
        self.entries.last().map(|&(pos, _)| pos)
    }

    pub fn pivot_entry(&self) -> Option<(u32, u64)> {
        self.entries.last().copied()
    }

    /// Coefficient at `pos` (zero if absent).
    pub fn coeff(&self, pos: u32) -> u64 {
        match self.entries.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// The largest position in `[lo, hi)` carrying a nonzero coefficient.
    pub fn pivot_in_range(&self, lo: u32, hi: u32) -> Option<(u32, u64)> {
        let end = self.entries.partition_point(|&(p, _)| p < hi);
        if end == 0 {
            return None;
        }
        let (pos, c) = self.entries[end - 1];
        (pos >= lo).then_some((pos, c))
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SparseColumn, c: u64, field: &PrimeField) {
        if c == 0 || other.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (pa, va) = self.entries[i];
            let (pb, vb) = other.entries[j];
            match pa.cmp(&pb) {
                std::cmp::Ordering::Less => {
                    out.push((pa, va));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((pb, field.mul(c, vb)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = field.add(va, field.mul(c, vb));
                    if v != 0 {
                        out.push((pa, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.entries[i..]);
        for &(pb, vb) in &other.entries[j..] {
            out.push((pb, field.mul(c, vb)));
        }
        self.entries = out;
    }

    pub fn scale(&mut self, c: u64, field: &PrimeField) {
        if c == 0 {
            self.entries.clear();
            return;
        }
        for (_, v) in self.entries.iter_mut() {
            *v = field.mul(*v, c);
        }
    }

    /// Entries with positions in `[lo, hi)`.
    pub fn restrict(&self, lo: u32, hi: u32) -> SparseColumn {
        let a = self.entries.partition_point(|&(p, _)| p < lo);
        let b = self.entries.partition_point(|&(p, _)| p < hi);
        Self {
            entries: self.entries[a..b].to_vec(),
        }
    }

    pub fn retain_rows(&mut self, mut keep: impl FnMut(u32) -> bool) {
        self.entries.retain(|&(p, _)| keep(p));
    }

    /// Remaps positions through a strictly monotone map.
    pub fn map_positions(&self, mut f: impl FnMut(u32) -> u32) -> SparseColumn {
        let entries: Vec<(u32, u64)> = self.entries.iter().map(|&(p, v)| (f(p), v)).collect();
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, (u32, u64)>> {
        self.entries.iter().copied()
    }
}

/// One invariant violation, with `(row, column)` witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Global order is not grade-block / dimension / declaration sorted.
    Order { col: u32, id: String },
    /// A boundary entry does not drop the dimension by exactly one.
    Degree {
        row: u32,
        col: u32,
        row_id: String,
        col_id: String,
    },
    /// A boundary entry maps into a grade that is not below the column's.
    Filtration {
        row: u32,
        col: u32,
        row_id: String,
        col_id: String,
    },
    /// An entry of the squared differential is nonzero.
    Square {
        row: u32,
        col: u32,
        row_id: String,
        col_id: String,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Order { id, .. } => {
                write!(f, "generator `{id}` breaks the canonical global order")
            }
            Violation::Degree { row_id, col_id, .. } => write!(
                f,
                "boundary of `{col_id}` hits `{row_id}`, which is not one dimension lower"
            ),
            Violation::Filtration { row_id, col_id, .. } => write!(
                f,
                "boundary of `{col_id}` hits `{row_id}`, whose grade is not below"
            ),
            Violation::Square { row_id, col_id, .. } => {
                write!(f, "d\u{b2} is nonzero at row `{row_id}`, column `{col_id}`")
            }
        }
    }
}

/// Result of [`GradedComplex::validate`]; empty iff the complex is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A P-graded chain complex over a prime field, in canonical global order.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    poset: Arc<Poset>,
    field: PrimeField,
    generators: Vec<Generator>,
    /// `boundary[j]` is the boundary of generator `j`.
    boundary: Vec<SparseColumn>,
    id_index: HashMap<String, u32>,
    /// Per-(grade, dim) contiguous position ranges, in global order.
    cells: Vec<((usize, i32), Range<u32>)>,
    cell_lookup: HashMap<(usize, i32), usize>,
}

impl GradedComplex {
    /// Builds a complex from generators in declaration order and boundary
    /// specifications by id. Generators are sorted into the canonical order;
    /// boundaries may reference ids in any order.
    pub fn new(
        poset: impl Into<Arc<Poset>>,
        field: PrimeField,
        generators: Vec<Generator>,
        boundaries: Vec<(String, Vec<(String, i64)>)>,
    ) -> Result<Self, ComplexError> {
        let poset = poset.into();
        for g in &generators {
            if g.grade >= poset.len() {
                return Err(ComplexError::GradeOutOfRange(g.id.clone(), g.grade));
            }
        }
        let mut order: Vec<usize> = (0..generators.len()).collect();
        order.sort_by_key(|&i| {
            let g = &generators[i];
            (poset.position(g.grade), g.dim, i)
        });
        let sorted: Vec<Generator> = order.into_iter().map(|i| generators[i].clone()).collect();

        let mut id_index = HashMap::with_capacity(sorted.len());
        for (j, g) in sorted.iter().enumerate() {
            if id_index.insert(g.id.clone(), j as u32).is_some() {
                return Err(ComplexError::DuplicateId(g.id.clone()));
            }
        }

        let mut boundary = vec![SparseColumn::zero(); sorted.len()];
        let mut seen = vec![false; sorted.len()];
        for (col_id, terms) in boundaries {
            let j = *id_index
                .get(&col_id)
                .ok_or(ComplexError::UnknownId(col_id.clone()))? as usize;
            if seen[j] {
                return Err(ComplexError::DuplicateBoundary(col_id));
            }
            seen[j] = true;
            let mut pairs = Vec::with_capacity(terms.len());
            for (row_id, coeff) in terms {
                let r = *id_index
                    .get(&row_id)
                    .ok_or(ComplexError::UnknownId(row_id.clone()))?;
                pairs.push((r, coeff));
            }
            boundary[j] = SparseColumn::from_pairs(pairs, &field);
        }

        Ok(Self::assemble(poset, field, sorted, boundary, id_index))
    }

    /// Assembles a complex whose generators are already in canonical order.
    /// No invariant is checked; used internally and by mutation tests.
    pub(crate) fn from_parts_unchecked(
        poset: Arc<Poset>,
        field: PrimeField,
        generators: Vec<Generator>,
        boundary: Vec<SparseColumn>,
    ) -> Self {
        let mut id_index = HashMap::with_capacity(generators.len());
        for (j, g) in generators.iter().enumerate() {
            id_index.insert(g.id.clone(), j as u32);
        }
        Self::assemble(poset, field, generators, boundary, id_index)
    }

    fn assemble(
        poset: Arc<Poset>,
        field: PrimeField,
        generators: Vec<Generator>,
        boundary: Vec<SparseColumn>,
        id_index: HashMap<String, u32>,
    ) -> Self {
        let mut cells: Vec<((usize, i32), Range<u32>)> = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            let key = (g.grade, g.dim);
            match cells.last_mut() {
                Some((k, range)) if *k == key => range.end = j as u32 + 1,
                _ => cells.push((key, j as u32..j as u32 + 1)),
            }
        }
        let cell_lookup = cells
            .iter()
            .enumerate()
            .map(|(i, (k, _))| (*k, i))
            .collect();
        Self {
            poset,
            field,
            generators,
            boundary,
            id_index,
            cells,
            cell_lookup,
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> Arc<Poset> {
        Arc::clone(&self.poset)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, pos: u32) -> &Generator {
        &self.generators[pos as usize]
    }

    pub fn boundary(&self) -> &[SparseColumn] {
        &self.boundary
    }

    pub fn boundary_of(&self, pos: u32) -> &SparseColumn {
        &self.boundary[pos as usize]
    }

    pub fn position_of(&self, id: &str) -> Option<u32> {
        self.id_index.get(id).copied()
    }

    /// Position range of the `(grade, dim)` cell; empty when absent.
    pub fn cell_range(&self, grade: usize, dim: i32) -> Range<u32> {
        match self.cell_lookup.get(&(grade, dim)) {
            Some(&i) => self.cells[i].1.clone(),
            None => 0..0,
        }
    }

    pub fn cell_size(&self, grade: usize, dim: i32) -> usize {
        self.cell_range(grade, dim).len()
    }

    /// `(grade, dim)` cells with their position ranges, in global order.
    pub fn cells(&self) -> impl Iterator<Item = ((usize, i32), Range<u32>)> + '_ {
        self.cells.iter().cloned()
    }

    /// Dimensions present in a grade, ascending.
    pub fn dims_in_grade(&self, grade: usize) -> Vec<i32> {
        self.cells
            .iter()
            .filter(|((g, _), _)| *g == grade)
            .map(|((_, n), _)| *n)
            .collect()
    }

    /// Applies the boundary operator to a chain over the generator basis.
    pub fn apply_boundary(&self, chain: &SparseColumn) -> SparseColumn {
        let mut acc = SparseColumn::zero();
        for (pos, c) in chain.iter() {
            acc.add_scaled(&self.boundary[pos as usize], c, &self.field);
        }
        acc
    }

    /// Checks all structural invariants, listing every violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for w in self.generators.windows(2) {
            let ka = (self.poset.position(w[0].grade), w[0].dim);
            let kb = (self.poset.position(w[1].grade), w[1].dim);
            if ka > kb {
                let col = self.position_of(&w[1].id).unwrap();
                violations.push(Violation::Order {
                    col,
                    id: w[1].id.clone(),
                });
            }
        }
        for (j, col) in self.boundary.iter().enumerate() {
            let gj = &self.generators[j];
            for (r, _) in col.iter() {
                let gr = &self.generators[r as usize];
                if gr.dim != gj.dim - 1 {
                    violations.push(Violation::Degree {
                        row: r,
                        col: j as u32,
                        row_id: gr.id.clone(),
                        col_id: gj.id.clone(),
                    });
                }
                if !self.poset.leq(gr.grade, gj.grade) {
                    violations.push(Violation::Filtration {
                        row: r,
                        col: j as u32,
                        row_id: gr.id.clone(),
                        col_id: gj.id.clone(),
                    });
                }
            }
            let square = self.apply_boundary(col);
            for (r, _) in square.iter() {
                violations.push(Violation::Square {
                    row: r,
                    col: j as u32,
                    row_id: self.generators[r as usize].id.clone(),
                    col_id: gj.id.clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// The twisted-differential block `t^{pq}_n`: columns are the grade-`q`
    /// dimension-`n` generators, rows the grade-`p` dimension-`n-1` ones.
    pub fn block(&self, p: usize, q: usize, n: i32) -> DenseMatrix {
        let rows = self.cell_range(p, n - 1);
        let cols = self.cell_range(q, n);
        let mut m = DenseMatrix::zeros(rows.len(), cols.len(), self.field);
        for (jj, j) in cols.clone().enumerate() {
            for (r, v) in self.boundary[j as usize]
                .restrict(rows.start, rows.end)
                .iter()
            {
                m.set((r - rows.start) as usize, jj, v);
            }
        }
        m
    }

    /// Brute-force relative homology dimensions `(p, n) -> dim H_n(C^p, t^p)`,
    /// by plain Gaussian elimination on the diagonal blocks. Deliberately
    /// independent of the clearing reduction, so it can serve as an oracle
    /// against it. Keys cover every nonempty cell; values may be zero.
    pub fn relative_homology_dims(&self) -> std::collections::BTreeMap<(usize, i32), usize> {
        let mut out = std::collections::BTreeMap::new();
        for grade in 0..self.poset.len() {
            let dims = self.dims_in_grade(grade);
            let mut ranks: HashMap<i32, usize> = HashMap::new();
            for &n in &dims {
                ranks.insert(n, self.block(grade, grade, n).rank());
            }
            for &n in &dims {
                let cell = self.cell_size(grade, n);
                let r_n = ranks.get(&n).copied().unwrap_or(0);
                let r_up = ranks.get(&(n + 1)).copied().unwrap_or(0);
                out.insert((grade, n), cell - r_n - r_up);
            }
        }
        out
    }

    /// Homology dimensions of the total complex, per dimension.
    pub fn global_homology_dims(&self) -> std::collections::BTreeMap<i32, usize> {
        let mut dims: Vec<i32> = self.generators.iter().map(|g| g.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        let mut counts: HashMap<i32, usize> = HashMap::new();
        let mut pos_in_dim: HashMap<i32, HashMap<u32, usize>> = HashMap::new();
        for (j, g) in self.generators.iter().enumerate() {
            let c = counts.entry(g.dim).or_insert(0);
            pos_in_dim.entry(g.dim).or_default().insert(j as u32, *c);
            *c += 1;
        }
        let mut ranks: HashMap<i32, usize> = HashMap::new();
        for &n in &dims {
            let rows = counts.get(&(n - 1)).copied().unwrap_or(0);
            let cols = counts[&n];
            let mut m = DenseMatrix::zeros(rows, cols, self.field);
            for (j, g) in self.generators.iter().enumerate() {
                if g.dim != n {
                    continue;
                }
                let jj = pos_in_dim[&n][&(j as u32)];
                for (r, v) in self.boundary[j].iter() {
                    m.set(pos_in_dim[&(n - 1)][&r], jj, v);
                }
            }
            ranks.insert(n, m.rank());
        }
        dims.iter()
            .map(|&n| {
                let r_n = ranks.get(&n).copied().unwrap_or(0);
                let r_up = ranks.get(&(n + 1)).copied().unwrap_or(0);
                (n, counts[&n] - r_n - r_up)
            })
            .collect()
    }

    /// The subcomplex on generators of grade `<= p` (well defined because the
    /// differential is filtered).
    pub fn restrict_downset(&self, p: usize) -> GradedComplex {
        let keep: Vec<u32> = (0..self.len() as u32)
            .filter(|&j| self.poset.leq(self.generators[j as usize].grade, p))
            .collect();
        let mut remap: HashMap<u32, u32> = HashMap::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            remap.insert(old, new as u32);
        }
        let generators: Vec<Generator> = keep
            .iter()
            .map(|&j| self.generators[j as usize].clone())
            .collect();
        let boundary: Vec<SparseColumn> = keep
            .iter()
            .map(|&j| {
                // Filtered-ness keeps every entry inside the down-set.
                self.boundary[j as usize].map_positions(|r| remap[&r])
            })
            .collect();
        Self::from_parts_unchecked(Arc::clone(&self.poset), self.field, generators, boundary)
    }
}
