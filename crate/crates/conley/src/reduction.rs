//! Per-grade clearing-optimised Gaussian column reduction.
//!
//! This is the first step of the connection-matrix algorithm: for each poset
//! grade independently, and for dimensions from the top down, the diagonal
//! block of the boundary matrix is brought to reduced column-echelon form by
//! left-to-right column additions. Every addition is applied to the *full*
//! global column (entries in lower grades ride along) and to the chain label
//! of the column, so the transformed matrix always equals `D * T` for an
//! invertible upper-triangular `T` whose columns are the labels.
//!
//! Clearing skips known-zero reductions: each nonzero column of the reduced
//! block one dimension up is a relative boundary chain `b`; the column at its
//! pivot position is replaced by `b` outright (it would reduce to zero
//! anyway) and classified as a boundary. Surviving columns split into
//! homology representatives (grade-diagonal part of the boundary vanishes)
//! and preboundaries (it does not), giving the separating basis
//! `(H, B, Pre)` per grade and dimension. The bijection sending each
//! preboundary to its partner boundary one dimension down is the Morse
//! matching consumed by the later steps.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{GradedComplex, SparseColumn, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid complex: {0}")]
    Invalid(ValidationReport),
}

/// The largest row position of a column with a nonzero coefficient, if any.
pub fn pivot(column: &SparseColumn) -> Option<u32> {
    column.pivot()
}

/// How a column of the reduced matrix was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnClass {
    /// Grade-diagonal part of the boundary is zero; a Conley-index chain.
    Homology,
    /// A relative boundary installed by clearing.
    Boundary,
    /// Nonzero grade-diagonal boundary with the given partner pivot row.
    Preboundary { partner: u32 },
}

/// One recorded transformation of the global matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOp {
    /// `column[target] += coeff * column[source]`, labels in lockstep.
    AddColumn {
        source: u32,
        target: u32,
        coeff: u64,
    },
    /// Clearing: the column at `target` is relabelled with the boundary
    /// chain `chain`, and its matrix column becomes `d(chain)`.
    SetColumn { target: u32, chain: SparseColumn },
}

/// A basis chain together with its pivot position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisChain {
    pub pivot: u32,
    pub chain: SparseColumn,
}

/// A preboundary chain: its boundary's grade-diagonal pivot is `partner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreboundaryChain {
    pub pivot: u32,
    pub chain: SparseColumn,
    pub partner: u32,
}

/// The `(H, B, Pre)` classification of one `(grade, dim)` cell, each list
/// ascending by pivot position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeparatingCell {
    pub homology: Vec<BasisChain>,
    pub boundaries: Vec<BasisChain>,
    pub preboundaries: Vec<PreboundaryChain>,
}

impl SeparatingCell {
    pub fn size(&self) -> usize {
        self.homology.len() + self.boundaries.len() + self.preboundaries.len()
    }
}

/// The per-(grade, dim) separating bases produced by the reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeparatingBasis {
    cells: BTreeMap<(usize, i32), SeparatingCell>,
}

static EMPTY_CELL: SeparatingCell = SeparatingCell {
    homology: Vec::new(),
    boundaries: Vec::new(),
    preboundaries: Vec::new(),
};

impl SeparatingBasis {
    pub fn cell(&self, grade: usize, dim: i32) -> &SeparatingCell {
        self.cells.get(&(grade, dim)).unwrap_or(&EMPTY_CELL)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(usize, i32), &SeparatingCell)> {
        self.cells.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Install relative boundaries by clearing instead of re-reducing them.
    pub clearing: bool,
    /// Reduce grades on worker threads; the result is identical either way.
    pub parallel: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            clearing: true,
            parallel: false,
        }
    }
}

/// The transformed global matrix with its bookkeeping.
#[derive(Debug, Clone)]
pub struct ReducedState {
    pub(crate) complex: GradedComplex,
    pub(crate) matrix: Vec<SparseColumn>,
    pub(crate) labels: Vec<SparseColumn>,
    pub(crate) class: Vec<ColumnClass>,
    pub(crate) sep: SeparatingBasis,
    pub(crate) ops: Vec<ReductionOp>,
    pub(crate) step3_ops: Vec<ReductionOp>,
    pub(crate) clearing_used: bool,
    pub(crate) globally_reduced: bool,
    pub(crate) removed_rows: BTreeSet<u32>,
    pub(crate) removed_cols: BTreeSet<u32>,
}

impl ReducedState {
    pub fn complex(&self) -> &GradedComplex {
        &self.complex
    }

    pub fn matrix(&self) -> &[SparseColumn] {
        &self.matrix
    }

    pub fn column(&self, pos: u32) -> &SparseColumn {
        &self.matrix[pos as usize]
    }

    pub fn labels(&self) -> &[SparseColumn] {
        &self.labels
    }

    pub fn label(&self, pos: u32) -> &SparseColumn {
        &self.labels[pos as usize]
    }

    pub fn class(&self, pos: u32) -> ColumnClass {
        self.class[pos as usize]
    }

    pub fn classes(&self) -> &[ColumnClass] {
        &self.class
    }

    pub fn separating_basis(&self) -> &SeparatingBasis {
        &self.sep
    }

    /// Step-1 operation log, grade-major in extension order.
    pub fn ops(&self) -> &[ReductionOp] {
        &self.ops
    }

    /// Step-3 operation log (empty until the global reduction runs).
    pub fn step3_ops(&self) -> &[ReductionOp] {
        &self.step3_ops
    }

    pub fn clearing_used(&self) -> bool {
        self.clearing_used
    }

    pub fn is_pruned(&self) -> bool {
        !self.removed_rows.is_empty() || !self.removed_cols.is_empty()
    }

    pub fn is_globally_reduced(&self) -> bool {
        self.globally_reduced
    }

    pub fn removed_rows(&self) -> &BTreeSet<u32> {
        &self.removed_rows
    }

    pub fn removed_cols(&self) -> &BTreeSet<u32> {
        &self.removed_cols
    }

    /// Homology positions in ascending global order.
    pub fn morse_positions(&self) -> Vec<u32> {
        (0..self.complex.len() as u32)
            .filter(|&j| matches!(self.class[j as usize], ColumnClass::Homology))
            .collect()
    }

    /// Conley index dimensions `(grade, dim) -> |H|`, nonzero cells only.
    pub fn conley_index_dims(&self) -> BTreeMap<(usize, i32), usize> {
        self.sep
            .cells()
            .filter(|(_, c)| !c.homology.is_empty())
            .map(|(&k, c)| (k, c.homology.len()))
            .collect()
    }

    /// Checks every structural invariant of the state:
    /// the label replay of the operation log, `column = d(label)` at every
    /// position, reducedness of the diagonal blocks, the three separating
    /// conditions, and (under clearing) the preboundary-boundary bijection.
    pub fn verify_invariants(&self) -> Result<(), String> {
        let cx = &self.complex;
        let field = cx.field();
        let n = cx.len() as u32;

        // Replay the operation log: T starts as the identity and must end as
        // the label matrix, upper triangular with nonzero diagonal.
        let mut t: Vec<SparseColumn> = (0..n).map(SparseColumn::unit).collect();
        for op in self.ops.iter().chain(self.step3_ops.iter()) {
            match op {
                ReductionOp::AddColumn {
                    source,
                    target,
                    coeff,
                } => {
                    if source >= target {
                        return Err(format!(
                            "operation log not upper triangular: {source} -> {target}"
                        ));
                    }
                    let src = t[*source as usize].clone();
                    t[*target as usize].add_scaled(&src, *coeff, &field);
                }
                ReductionOp::SetColumn { target, chain } => {
                    t[*target as usize] = chain.clone();
                }
            }
        }
        for j in 0..n {
            if t[j as usize] != self.labels[j as usize] {
                return Err(format!("label at {j} does not replay from the log"));
            }
            match t[j as usize].pivot_entry() {
                Some((p, c)) if p == j && c != 0 => {}
                _ => return Err(format!("label at {j} breaks triangularity")),
            }
        }

        // column = d(label), modulo pruned rows.
        for j in 0..n {
            if self.removed_cols.contains(&j) {
                continue;
            }
            let mut expect = cx.apply_boundary(&self.labels[j as usize]);
            expect.retain_rows(|r| !self.removed_rows.contains(&r));
            if expect != self.matrix[j as usize] {
                return Err(format!("column {j} is not the boundary of its label"));
            }
        }

        for ((grade, dim), range) in cx.cells() {
            let rows = cx.cell_range(grade, dim - 1);
            // Distinct pivots in the diagonal block.
            let mut seen = BTreeSet::new();
            for j in range.clone() {
                if self.removed_cols.contains(&j) {
                    continue;
                }
                if let Some((r, _)) = self.matrix[j as usize].pivot_in_range(rows.start, rows.end) {
                    if !seen.insert(r) {
                        return Err(format!(
                            "diagonal block ({grade},{dim}) has a repeated pivot at row {r}"
                        ));
                    }
                }
            }

            let cell = self.sep.cell(grade, dim);
            if cell.size() != range.len() {
                return Err(format!(
                    "cell ({grade},{dim}) does not span: {} chains for {} positions",
                    cell.size(),
                    range.len()
                ));
            }
            let mut pivots = BTreeSet::new();
            for piv in cell
                .homology
                .iter()
                .map(|c| c.pivot)
                .chain(cell.boundaries.iter().map(|c| c.pivot))
                .chain(cell.preboundaries.iter().map(|c| c.pivot))
            {
                if !range.contains(&piv) || !pivots.insert(piv) {
                    return Err(format!("cell ({grade},{dim}) has bad pivot {piv}"));
                }
            }
            // Condition (1): H and Pre chains vanish on boundary pivots.
            // Condition (2): no other chain touches an H pivot.
            // Condition (3): H chains have unit pivot coefficient.
            let b_pivots: Vec<u32> = cell.boundaries.iter().map(|c| c.pivot).collect();
            for z in &cell.homology {
                if z.chain.coeff(z.pivot) != 1 {
                    return Err(format!("homology chain at {} not unit-pivoted", z.pivot));
                }
            }
            let h_or_pre: Vec<(&SparseColumn, u32)> = cell
                .homology
                .iter()
                .map(|c| (&c.chain, c.pivot))
                .chain(cell.preboundaries.iter().map(|c| (&c.chain, c.pivot)))
                .collect();
            for (chain, piv) in &h_or_pre {
                for &bp in &b_pivots {
                    if chain.coeff(bp) != 0 {
                        return Err(format!("chain at {piv} has support on cleared pivot {bp}"));
                    }
                }
                for z in &cell.homology {
                    if z.pivot != *piv && chain.coeff(z.pivot) != 0 {
                        return Err(format!(
                            "chain at {piv} has support on homology pivot {}",
                            z.pivot
                        ));
                    }
                }
            }
            // Preboundaries map bijectively onto the boundaries below.
            let below = self.sep.cell(grade, dim - 1);
            let mut partners = BTreeSet::new();
            for w in &cell.preboundaries {
                if !partners.insert(w.partner) {
                    return Err(format!("partner {} matched twice", w.partner));
                }
                let image = cx.apply_boundary(&w.chain).restrict(rows.start, rows.end);
                if image.pivot() != Some(w.partner) {
                    return Err(format!(
                        "preboundary at {} does not pivot at its partner",
                        w.pivot
                    ));
                }
                if self.clearing_used {
                    let Some(b) = below.boundaries.iter().find(|b| b.pivot == w.partner) else {
                        return Err(format!("partner {} is not a boundary pivot", w.partner));
                    };
                    if b.chain != image {
                        return Err(format!(
                            "boundary of preboundary at {} is not its partner chain",
                            w.pivot
                        ));
                    }
                }
            }
            if partners.len() != below.boundaries.len() {
                return Err(format!(
                    "preboundaries of ({grade},{dim}) do not biject onto boundaries below"
                ));
            }
        }
        Ok(())
    }
}

/// Step 1: per-grade clearing-optimised reduction of a valid complex.
pub fn clearing_reduce(
    cx: &GradedComplex,
    options: ReduceOptions,
) -> Result<ReducedState, ReductionError> {
    let report = cx.validate();
    if !report.is_valid() {
        return Err(ReductionError::Invalid(report));
    }
    let grades: Vec<usize> = cx.poset().extension().to_vec();
    let outcomes: Vec<GradeOutcome> = if options.parallel {
        grades
            .par_iter()
            .map(|&g| reduce_grade(cx, g, options.clearing))
            .collect()
    } else {
        grades
            .iter()
            .map(|&g| reduce_grade(cx, g, options.clearing))
            .collect()
    };

    let n = cx.len();
    let mut matrix = cx.boundary().to_vec();
    let mut labels: Vec<SparseColumn> = (0..n as u32).map(SparseColumn::unit).collect();
    let mut class = vec![ColumnClass::Homology; n];
    let mut cells = BTreeMap::new();
    let mut ops = Vec::new();
    for outcome in outcomes {
        let start = outcome.start as usize;
        for (k, (col, label, cls)) in outcome.columns.into_iter().enumerate() {
            matrix[start + k] = col;
            labels[start + k] = label;
            class[start + k] = cls;
        }
        for (key, cell) in outcome.cells {
            cells.insert(key, cell);
        }
        ops.extend(outcome.ops);
    }

    Ok(ReducedState {
        complex: cx.clone(),
        matrix,
        labels,
        class,
        sep: SeparatingBasis { cells },
        ops,
        step3_ops: Vec::new(),
        clearing_used: options.clearing,
        globally_reduced: false,
        removed_rows: BTreeSet::new(),
        removed_cols: BTreeSet::new(),
    })
}

struct GradeOutcome {
    start: u32,
    /// `(matrix column, label, class)` per position of this grade's block.
    columns: Vec<(SparseColumn, SparseColumn, ColumnClass)>,
    cells: Vec<((usize, i32), SeparatingCell)>,
    ops: Vec<ReductionOp>,
}

/// Reduces the diagonal blocks of a single grade, top dimension first. Only
/// this grade's columns are touched, so grades can run concurrently.
fn reduce_grade(cx: &GradedComplex, grade: usize, clearing: bool) -> GradeOutcome {
    let field = cx.field();
    let dims = cx.dims_in_grade(grade);
    let grade_cells: Vec<(i32, std::ops::Range<u32>)> =
        dims.iter().map(|&d| (d, cx.cell_range(grade, d))).collect();
    let start = grade_cells.first().map_or(0, |(_, r)| r.start);
    let end = grade_cells.last().map_or(0, |(_, r)| r.end);
    let width = (end - start) as usize;

    let mut cols: Vec<SparseColumn> = (start..end).map(|j| cx.boundary_of(j).clone()).collect();
    let mut labels: Vec<SparseColumn> = (start..end).map(SparseColumn::unit).collect();
    let mut class = vec![ColumnClass::Homology; width];
    let mut ops = Vec::new();
    let mut cells = Vec::new();

    // Relative boundary chains produced one dimension up, keyed by pivot.
    let mut carried: Vec<(u32, SparseColumn)> = Vec::new();
    let mut carried_dim = i32::MIN;

    for &(n, ref cell_range) in grade_cells.iter().rev() {
        let rows = cx.cell_range(grade, n - 1);
        let mut cell = SeparatingCell::default();

        // Clearing: install each carried boundary chain at its pivot column.
        let mut would_be_boundary: BTreeSet<u32> = BTreeSet::new();
        if carried_dim == n {
            for (piv, chain) in carried.drain(..) {
                if clearing {
                    ops.push(ReductionOp::SetColumn {
                        target: piv,
                        chain: chain.clone(),
                    });
                    cols[(piv - start) as usize] = cx.apply_boundary(&chain);
                    labels[(piv - start) as usize] = chain;
                    class[(piv - start) as usize] = ColumnClass::Boundary;
                } else {
                    would_be_boundary.insert(piv);
                }
            }
        } else {
            carried.clear();
        }

        // Left-to-right reduction of the diagonal block.
        let mut owner: Vec<Option<(u32, u64)>> = vec![None; rows.len()];
        for j in cell_range.clone() {
            let jj = (j - start) as usize;
            if matches!(class[jj], ColumnClass::Boundary) {
                continue;
            }
            loop {
                let Some((r, c)) = cols[jj].pivot_in_range(rows.start, rows.end) else {
                    class[jj] = if would_be_boundary.contains(&j) {
                        ColumnClass::Boundary
                    } else {
                        ColumnClass::Homology
                    };
                    break;
                };
                match owner[(r - rows.start) as usize] {
                    None => {
                        owner[(r - rows.start) as usize] = Some((j, c));
                        class[jj] = ColumnClass::Preboundary { partner: r };
                        break;
                    }
                    Some((i, ci)) => {
                        let coeff = field.neg_div(c, ci).expect("pivot coefficient nonzero");
                        let ii = (i - start) as usize;
                        let (left, right) = cols.split_at_mut(jj);
                        right[0].add_scaled(&left[ii], coeff, &field);
                        let (left, right) = labels.split_at_mut(jj);
                        right[0].add_scaled(&left[ii], coeff, &field);
                        ops.push(ReductionOp::AddColumn {
                            source: i,
                            target: j,
                            coeff,
                        });
                    }
                }
            }
        }
        debug_assert!(
            would_be_boundary
                .iter()
                .all(|&j| matches!(class[(j - start) as usize], ColumnClass::Boundary)),
            "cleared positions always reduce to zero"
        );

        // Record the cell and carry the reduced preboundary images down.
        for j in cell_range.clone() {
            let jj = (j - start) as usize;
            match class[jj] {
                ColumnClass::Homology => cell.homology.push(BasisChain {
                    pivot: j,
                    chain: labels[jj].clone(),
                }),
                ColumnClass::Boundary => cell.boundaries.push(BasisChain {
                    pivot: j,
                    chain: labels[jj].clone(),
                }),
                ColumnClass::Preboundary { partner } => {
                    cell.preboundaries.push(PreboundaryChain {
                        pivot: j,
                        chain: labels[jj].clone(),
                        partner,
                    });
                    let image = cols[jj].restrict(rows.start, rows.end);
                    debug_assert_eq!(image.pivot(), Some(partner));
                    carried.push((partner, image));
                }
            }
        }
        carried_dim = n - 1;
        cells.push(((grade, n), cell));
    }

    GradeOutcome {
        start,
        columns: cols
            .into_iter()
            .zip(labels)
            .zip(class)
            .map(|((c, l), k)| (c, l, k))
            .collect(),
        cells,
        ops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Generator, GradedComplex};
    use crate::field::PrimeField;
    use crate::fixtures::{pentagon_complex, triangle_complex, triangle_complex_over};
    use crate::poset::Poset;

    fn ids(cx: &GradedComplex, chains: &[BasisChain]) -> Vec<String> {
        chains.iter().map(|c| chain_id(cx, &c.chain)).collect()
    }

    fn chain_id(cx: &GradedComplex, chain: &SparseColumn) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (pos, c) in chain.iter() {
            let id = &cx.generator(pos).id;
            if c == 1 {
                parts.push(id.clone());
            } else {
                parts.push(format!("{c}*{id}"));
            }
        }
        parts.join("+")
    }

    #[test]
    fn pivot_examples() {
        let cx = triangle_complex();
        let uvw = cx.position_of("uvw").unwrap();
        let col = cx.boundary_of(uvw);
        assert_eq!(pivot(col), cx.position_of("vw"));
        assert_eq!(pivot(&SparseColumn::zero()), None);
        assert_eq!(pivot(&SparseColumn::unit(3)), Some(3));
    }

    #[test]
    fn triangle_walkthrough() {
        let cx = triangle_complex();
        let state = clearing_reduce(&cx, ReduceOptions::default()).unwrap();

        // Exactly one column addition: vu into vw.
        let adds: Vec<_> = state
            .ops()
            .iter()
            .filter(|op| matches!(op, ReductionOp::AddColumn { .. }))
            .collect();
        assert_eq!(adds.len(), 1);
        let ReductionOp::AddColumn {
            source,
            target,
            coeff,
        } = adds[0]
        else {
            unreachable!()
        };
        assert_eq!(*source, cx.position_of("vu").unwrap());
        assert_eq!(*target, cx.position_of("vw").unwrap());
        assert_eq!(*coeff, 1);

        let sep = state.separating_basis();
        assert_eq!(ids(&cx, &sep.cell(0, 0).homology), ["u"]);
        assert_eq!(ids(&cx, &sep.cell(1, 0).boundaries), ["w"]);
        assert_eq!(
            sep.cell(1, 1)
                .preboundaries
                .iter()
                .map(|w| chain_id(&cx, &w.chain))
                .collect::<Vec<_>>(),
            ["uw"]
        );
        assert_eq!(ids(&cx, &sep.cell(2, 0).boundaries), ["v"]);
        assert_eq!(ids(&cx, &sep.cell(2, 1).homology), ["vu+vw"]);
        assert_eq!(
            sep.cell(2, 1)
                .preboundaries
                .iter()
                .map(|w| chain_id(&cx, &w.chain))
                .collect::<Vec<_>>(),
            ["vu"]
        );
        assert_eq!(ids(&cx, &sep.cell(3, 2).homology), ["uvw"]);
        // No other cells carry anything.
        let total: usize = sep.cells().map(|(_, c)| c.size()).sum();
        assert_eq!(total, cx.len());

        state.verify_invariants().unwrap();

        let dims = state.conley_index_dims();
        let expect: BTreeMap<(usize, i32), usize> = [((0, 0), 1), ((2, 1), 1), ((3, 2), 1)]
            .into_iter()
            .collect();
        assert_eq!(dims, expect);
    }

    #[test]
    fn zero_differential_is_all_homology() {
        let poset = Poset::chain(2);
        let cx = GradedComplex::new(
            poset,
            PrimeField::f2(),
            vec![
                Generator::new("a", 0, 0),
                Generator::new("b", 0, 1),
                Generator::new("c", 3, 1),
            ],
            vec![],
        )
        .unwrap();
        let state = clearing_reduce(&cx, ReduceOptions::default()).unwrap();
        assert!(state.ops().is_empty());
        assert!(state
            .classes()
            .iter()
            .all(|c| matches!(c, ColumnClass::Homology)));
        state.verify_invariants().unwrap();
    }

    #[test]
    fn invalid_complex_is_rejected_up_front() {
        let poset = Poset::chain(1);
        let cx = GradedComplex::new(
            poset,
            PrimeField::f2(),
            vec![
                Generator::new("x", 0, 0),
                Generator::new("e", 1, 0),
                Generator::new("t", 2, 0),
            ],
            vec![
                ("e".into(), vec![("x".into(), 1)]),
                ("t".into(), vec![("e".into(), 1)]),
            ],
        )
        .unwrap();
        assert!(matches!(
            clearing_reduce(&cx, ReduceOptions::default()),
            Err(ReductionError::Invalid(_))
        ));
    }

    #[test]
    fn homology_counts_match_brute_force_on_fixtures() {
        for cx in [
            triangle_complex(),
            pentagon_complex(),
            triangle_complex_over(PrimeField::new(5).unwrap()),
        ] {
            let state = clearing_reduce(&cx, ReduceOptions::default()).unwrap();
            state.verify_invariants().unwrap();
            let oracle = cx.relative_homology_dims();
            for (&(g, d), &dim) in oracle.iter() {
                assert_eq!(state.sep.cell(g, d).homology.len(), dim, "cell ({g},{d})");
            }
        }
    }

    #[test]
    fn clearing_toggle_preserves_cardinalities() {
        for cx in [triangle_complex(), pentagon_complex()] {
            let with = clearing_reduce(&cx, ReduceOptions::default()).unwrap();
            let without = clearing_reduce(
                &cx,
                ReduceOptions {
                    clearing: false,
                    ..Default::default()
                },
            )
            .unwrap();
            without.verify_invariants().unwrap();
            for (key, cell) in with.sep.cells() {
                let other = without.sep.cell(key.0, key.1);
                assert_eq!(cell.homology.len(), other.homology.len());
                assert_eq!(cell.boundaries.len(), other.boundaries.len());
                assert_eq!(cell.preboundaries.len(), other.preboundaries.len());
            }
        }
    }

    #[test]
    fn parallel_reduction_is_byte_identical() {
        for cx in [triangle_complex(), pentagon_complex()] {
            let seq = clearing_reduce(&cx, ReduceOptions::default()).unwrap();
            let par = clearing_reduce(
                &cx,
                ReduceOptions {
                    parallel: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(seq.matrix(), par.matrix());
            assert_eq!(seq.labels(), par.labels());
            assert_eq!(seq.ops(), par.ops());
            assert_eq!(seq.classes(), par.classes());
        }
    }
}
