//! Independent verification of the connection matrix.
//!
//! The reduction's separating basis splits every `(grade, dim)` cell into
//! Morse chains, boundaries and preboundaries. Expressed in that basis, the
//! boundary operator decomposes into per-part blocks whose diagonal piece is
//! exactly the preboundary-to-boundary bijection. From those blocks this
//! module rebuilds the connection matrix along two routes that share nothing
//! with the column algorithm:
//!
//! * the perturbation route iterates `S = sum delta (h~ delta)^m`, a finite
//!   sum because each `h~ delta` strictly descends the poset, and reads the
//!   differential off as `f~ S g~` together with full contraction maps
//!   `(f, g, h)`;
//! * the zigzag route sums, over every strictly increasing interior chain of
//!   the poset, the alternating composition of off-diagonal blocks and
//!   negated inverses of the diagonal ones.
//!
//! Both must agree with each other and with the reduction's output exactly,
//! and the contraction identities must hold as exact matrix equations.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::SparseColumn;
use crate::dense::DenseMatrix;
use crate::field::PrimeField;
use crate::poset::Poset;
use crate::reduction::{ColumnClass, ReducedState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle requires a clearing-produced separating basis")]
    RequiresClearing,
    #[error("corrupted splitting: {0}")]
    CorruptSplitting(String),
    #[error("perturbation series did not vanish after {0} terms")]
    NonNilpotent(usize),
}

/// The three summands of the splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    M,
    B,
    K,
}

impl Part {
    const ALL: [Part; 3] = [Part::M, Part::B, Part::K];

    fn idx(self) -> usize {
        match self {
            Part::M => 0,
            Part::B => 1,
            Part::K => 2,
        }
    }
}

/// Part membership of one cell, as pivot positions in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellSplit {
    pub m: Vec<u32>,
    pub b: Vec<u32>,
    pub k: Vec<u32>,
}

impl CellSplit {
    fn part(&self, p: Part) -> &[u32] {
        match p {
            Part::M => &self.m,
            Part::B => &self.b,
            Part::K => &self.k,
        }
    }

    fn size(&self) -> usize {
        self.m.len() + self.b.len() + self.k.len()
    }

    /// Positions in part-major order (M, then B, then K).
    fn positions(&self) -> impl Iterator<Item = u32> + '_ {
        self.m
            .iter()
            .chain(self.b.iter())
            .chain(self.k.iter())
            .copied()
    }
}

struct NineBlock {
    /// Indexed by `target_part * 3 + source_part`.
    mats: Vec<DenseMatrix>,
}

/// The twisted differential in splitting coordinates: one block
/// `t^{pq}_{AD}` per grade pair `p <= q`, source dimension `n` and part pair.
pub struct SplitBlocks {
    poset: Arc<Poset>,
    field: PrimeField,
    positions: usize,
    /// `(part, grade, dim)` per global position.
    meta: Vec<(Part, usize, i32)>,
    cells: BTreeMap<(usize, i32), CellSplit>,
    blocks: BTreeMap<(usize, usize, i32), NineBlock>,
    /// Inverse of the diagonal `BK` block per `(grade, source dim)`.
    bk_inv: BTreeMap<(usize, i32), DenseMatrix>,
    morse_order: Vec<u32>,
}

impl SplitBlocks {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn cell(&self, grade: usize, dim: i32) -> CellSplit {
        self.cells.get(&(grade, dim)).cloned().unwrap_or_default()
    }

    /// Morse pivot positions in global order; the row/column order of every
    /// matrix this module emits.
    pub fn morse_positions(&self) -> &[u32] {
        &self.morse_order
    }

    fn part_len(&self, grade: usize, dim: i32, part: Part) -> usize {
        self.cells
            .get(&(grade, dim))
            .map_or(0, |c| c.part(part).len())
    }

    /// The block `t^{pq}_{AD}` at source dimension `n`: rows are the `A`
    /// part of cell `(p, n-1)`, columns the `D` part of cell `(q, n)`.
    pub fn part_block(&self, p: usize, q: usize, n: i32, a: Part, d: Part) -> DenseMatrix {
        match self.blocks.get(&(p, q, n)) {
            Some(nine) => nine.mats[a.idx() * 3 + d.idx()].clone(),
            None => DenseMatrix::zeros(
                self.part_len(p, n - 1, a),
                self.part_len(q, n, d),
                self.field,
            ),
        }
    }

    /// The full cell-to-cell block in part-major coordinates.
    pub fn assembled(&self, p: usize, q: usize, n: i32) -> DenseMatrix {
        let rows: usize = self.cells.get(&(p, n - 1)).map_or(0, CellSplit::size);
        let cols: usize = self.cells.get(&(q, n)).map_or(0, CellSplit::size);
        let mut out = DenseMatrix::zeros(rows, cols, self.field);
        let mut roff = 0;
        for a in Part::ALL {
            let mut coff = 0;
            for d in Part::ALL {
                let blk = self.part_block(p, q, n, a, d);
                for i in 0..blk.rows() {
                    for j in 0..blk.cols() {
                        let v = blk.get(i, j);
                        if v != 0 {
                            out.set(roff + i, coff + j, v);
                        }
                    }
                }
                coff += self.part_len(q, n, d);
            }
            roff += self.part_len(p, n - 1, a);
        }
        out
    }

    /// Checks the multicomplex identity: for every `p <= q` and dimension,
    /// the assembled blocks anticommute to zero.
    pub fn verify_anticommutation(&self) -> Vec<IdentityFailure> {
        let mut failures = Vec::new();
        let dims: std::collections::BTreeSet<i32> = self.cells.keys().map(|&(_, d)| d).collect();
        for p in 0..self.poset.len() {
            for q in 0..self.poset.len() {
                if !self.poset.leq(p, q) {
                    continue;
                }
                for &n in &dims {
                    let mut acc = DenseMatrix::zeros(
                        self.cells.get(&(p, n - 2)).map_or(0, CellSplit::size),
                        self.cells.get(&(q, n)).map_or(0, CellSplit::size),
                        self.field,
                    );
                    for r in 0..self.poset.len() {
                        if self.poset.leq(p, r) && self.poset.leq(r, q) {
                            acc =
                                acc.add(&self.assembled(p, r, n - 1).mul(&self.assembled(r, q, n)));
                        }
                    }
                    if !acc.is_zero() {
                        failures.push(IdentityFailure {
                            identity: "anticommutation",
                            detail: format!(
                                "sum over {} <= r <= {} at dimension {n} is nonzero",
                                self.poset.label(p),
                                self.poset.label(q)
                            ),
                        });
                    }
                }
            }
        }
        failures
    }
}

/// Expresses the boundary operator of a reduced state in its separating
/// basis, per grade pair, dimension and part pair.
pub fn split_blocks(state: &ReducedState) -> Result<SplitBlocks, OracleError> {
    if !state.clearing_used() {
        return Err(OracleError::RequiresClearing);
    }
    let cx = state.complex();
    let poset = cx.poset_arc();
    let field = cx.field();
    let n_pos = cx.len();

    let mut meta = Vec::with_capacity(n_pos);
    for j in 0..n_pos as u32 {
        let g = cx.generator(j);
        let part = match state.class(j) {
            ColumnClass::Homology => Part::M,
            ColumnClass::Boundary => Part::B,
            ColumnClass::Preboundary { .. } => Part::K,
        };
        meta.push((part, g.grade, g.dim));
    }

    // Cell splits, their basis matrices, and the inverses.
    let mut cells: BTreeMap<(usize, i32), CellSplit> = BTreeMap::new();
    let mut basis_inv: BTreeMap<(usize, i32), DenseMatrix> = BTreeMap::new();
    let mut morse_order = Vec::new();
    for ((grade, dim), range) in cx.cells() {
        let sep = state.separating_basis().cell(grade, dim);
        let split = CellSplit {
            m: sep.homology.iter().map(|c| c.pivot).collect(),
            b: sep.boundaries.iter().map(|c| c.pivot).collect(),
            k: sep.preboundaries.iter().map(|c| c.pivot).collect(),
        };
        morse_order.extend(split.m.iter().copied());
        let size = range.len();
        if split.size() != size {
            return Err(OracleError::CorruptSplitting(format!(
                "cell ({grade},{dim}) has {} chains for {} positions",
                split.size(),
                size
            )));
        }
        let mut basis = DenseMatrix::zeros(size, size, field);
        let chains = sep
            .homology
            .iter()
            .map(|c| &c.chain)
            .chain(sep.boundaries.iter().map(|c| &c.chain))
            .chain(sep.preboundaries.iter().map(|c| &c.chain));
        for (j, chain) in chains.enumerate() {
            for (pos, v) in chain.iter() {
                basis.set((pos - range.start) as usize, j, v);
            }
        }
        let inv = basis.inverse().map_err(|_| {
            OracleError::CorruptSplitting(format!("cell ({grade},{dim}) basis is singular"))
        })?;
        cells.insert((grade, dim), split);
        basis_inv.insert((grade, dim), inv);
    }

    // Twisted blocks: push each basis chain through the boundary and express
    // every graded component in the target cell's basis.
    let mut blocks: BTreeMap<(usize, usize, i32), NineBlock> = BTreeMap::new();
    for ((q, n), _) in cx.cells() {
        let source = cells[&(q, n)].clone();
        let sep = state.separating_basis().cell(q, n);
        let chains = sep
            .homology
            .iter()
            .map(|c| (Part::M, &c.chain))
            .chain(sep.boundaries.iter().map(|c| (Part::B, &c.chain)))
            .chain(sep.preboundaries.iter().map(|c| (Part::K, &c.chain)));
        let mut col_in_part = [0usize; 3];
        for (d_part, chain) in chains {
            let j = col_in_part[d_part.idx()];
            col_in_part[d_part.idx()] += 1;
            let y = cx.apply_boundary(chain);
            if y.is_zero() {
                continue;
            }
            for p in 0..poset.len() {
                if !poset.leq(p, q) {
                    continue;
                }
                let Some(target) = cells.get(&(p, n - 1)) else {
                    continue;
                };
                let trange = cx.cell_range(p, n - 1);
                let y_p = y.restrict(trange.start, trange.end);
                if y_p.is_zero() {
                    continue;
                }
                let mut vec = DenseMatrix::zeros(target.size(), 1, field);
                for (pos, v) in y_p.iter() {
                    vec.set((pos - trange.start) as usize, 0, v);
                }
                let coords = basis_inv[&(p, n - 1)].mul(&vec);
                let nine = blocks.entry((p, q, n)).or_insert_with(|| {
                    let mats = Part::ALL
                        .iter()
                        .flat_map(|a| {
                            Part::ALL.iter().map(|d| {
                                DenseMatrix::zeros(
                                    target.part(*a).len(),
                                    source.part(*d).len(),
                                    field,
                                )
                            })
                        })
                        .collect();
                    NineBlock { mats }
                });
                let (ml, bl) = (target.m.len(), target.b.len());
                for i in 0..target.size() {
                    let v = coords.get(i, 0);
                    if v == 0 {
                        continue;
                    }
                    let (a_part, ii) = if i < ml {
                        (Part::M, i)
                    } else if i < ml + bl {
                        (Part::B, i - ml)
                    } else {
                        (Part::K, i - ml - bl)
                    };
                    nine.mats[a_part.idx() * 3 + d_part.idx()].set(ii, j, v);
                }
            }
        }
    }

    let mut split = SplitBlocks {
        poset,
        field,
        positions: n_pos,
        meta,
        cells,
        blocks,
        bk_inv: BTreeMap::new(),
        morse_order,
    };

    // Consistency: on the diagonal only the BK part may be nonzero, and it
    // must be invertible (it realises the Morse matching).
    let keys: Vec<(usize, i32)> = split.cells.keys().copied().collect();
    for (grade, n) in keys {
        let k_len = split.part_len(grade, n, Part::K);
        let b_below = split.part_len(grade, n - 1, Part::B);
        if k_len != b_below {
            return Err(OracleError::CorruptSplitting(format!(
                "|K({grade},{n})| = {k_len} but |B({grade},{})| = {b_below}",
                n - 1
            )));
        }
        for a in Part::ALL {
            for d in Part::ALL {
                if (a, d) == (Part::B, Part::K) {
                    continue;
                }
                if !split.part_block(grade, grade, n, a, d).is_zero() {
                    return Err(OracleError::CorruptSplitting(format!(
                        "diagonal block at ({grade},{n}) has a nonzero {a:?}{d:?} part"
                    )));
                }
            }
        }
        if k_len > 0 {
            let bk = split.part_block(grade, grade, n, Part::B, Part::K);
            let inv = bk.inverse().map_err(|_| {
                OracleError::CorruptSplitting(format!(
                    "diagonal BK block at ({grade},{n}) is singular"
                ))
            })?;
            split.bk_inv.insert((grade, n), inv);
        }
    }
    Ok(split)
}

/// The zigzag-path formula: for every `p < q` the connection-matrix block is
/// the MM block plus, for every strictly increasing interior chain
/// `p < x_1 < ... < x_l < q`, the alternating composition of off-diagonal
/// blocks and negated diagonal inverses. Returns columns over the Morse
/// generators in global order.
pub fn zigzag_dm(blocks: &SplitBlocks) -> Vec<SparseColumn> {
    let field = blocks.field;
    let poset = &blocks.poset;
    let morse_index: BTreeMap<u32, u32> = blocks
        .morse_order
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let mut delta: Vec<Vec<(u32, u64)>> = vec![Vec::new(); blocks.morse_order.len()];

    let keys: Vec<(usize, i32)> = blocks.cells.keys().copied().collect();
    for &(q, n) in &keys {
        let src = &blocks.cells[&(q, n)];
        if src.m.is_empty() {
            continue;
        }
        for p in 0..poset.len() {
            if !poset.lt(p, q) {
                continue;
            }
            let Some(tgt) = blocks.cells.get(&(p, n - 1)) else {
                continue;
            };
            if tgt.m.is_empty() {
                continue;
            }
            let mut total = blocks.part_block(p, q, n, Part::M, Part::M);
            for chain in poset.chains_between(p, q, poset.len()) {
                if chain.is_empty() {
                    continue;
                }
                if chain.iter().any(|&x| blocks.part_len(x, n, Part::K) == 0) {
                    continue;
                }
                let l = chain.len();
                let mut acc = blocks.part_block(chain[l - 1], q, n, Part::B, Part::M);
                for step in (0..l).rev() {
                    let x = chain[step];
                    acc = blocks.bk_inv[&(x, n)].mul(&acc).neg();
                    acc = if step > 0 {
                        blocks
                            .part_block(chain[step - 1], x, n, Part::B, Part::K)
                            .mul(&acc)
                    } else {
                        blocks.part_block(p, x, n, Part::M, Part::K).mul(&acc)
                    };
                }
                total = total.add(&acc);
            }
            for j in 0..total.cols() {
                let col = morse_index[&src.m[j]] as usize;
                for i in 0..total.rows() {
                    let v = total.get(i, j);
                    if v != 0 {
                        delta[col].push((morse_index[&tgt.m[i]], v));
                    }
                }
            }
        }
    }
    delta
        .into_iter()
        .map(|col| SparseColumn::from_pairs(col.into_iter().map(|(p, v)| (p, v as i64)), &field))
        .collect()
}

/// The full contraction data in splitting coordinates: every map is a square
/// matrix over the global positions (each position carries the basis chain
/// pivoted there).
pub struct ContractionMaps {
    poset: Arc<Poset>,
    field: PrimeField,
    meta: Vec<(Part, usize, i32)>,
    morse_order: Vec<u32>,
    /// The boundary in splitting coordinates.
    pub dsplit: DenseMatrix,
    /// The matched part of the differential (diagonal BK blocks).
    pub dtilde: DenseMatrix,
    /// The perturbation `dsplit - dtilde`.
    pub delta: DenseMatrix,
    /// The splitting homotopy (negated BK inverses).
    pub htilde: DenseMatrix,
    /// The perturbation series `sum delta (htilde delta)^m`.
    pub series: DenseMatrix,
    pub f: DenseMatrix,
    pub g: DenseMatrix,
    pub h: DenseMatrix,
    /// The induced differential `ftilde series gtilde`.
    pub dm: DenseMatrix,
    /// Number of nonzero series terms.
    pub series_terms: usize,
}

impl ContractionMaps {
    /// The induced differential restricted to Morse rows and columns, in the
    /// same shape as the reduction's connection matrix.
    pub fn dm_columns(&self) -> Vec<SparseColumn> {
        let index: BTreeMap<u32, u32> = self
            .morse_order
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        self.morse_order
            .iter()
            .map(|&col| {
                let pairs: Vec<(u32, i64)> = self
                    .morse_order
                    .iter()
                    .filter_map(|&row| {
                        let v = self.dm.get(row as usize, col as usize);
                        (v != 0).then(|| (index[&row], v as i64))
                    })
                    .collect();
                SparseColumn::from_pairs(pairs, &self.field)
            })
            .collect()
    }
}

/// Assembles the contraction of the perturbation lemma from the split
/// blocks, iterating the series until it vanishes.
pub fn build_contraction(blocks: &SplitBlocks) -> Result<ContractionMaps, OracleError> {
    let n = blocks.positions;
    let field = blocks.field;
    let mut dsplit = DenseMatrix::zeros(n, n, field);
    for &(p, q, dim) in blocks.blocks.keys() {
        let assembled = blocks.assembled(p, q, dim);
        let rows: Vec<u32> = blocks.cells[&(p, dim - 1)].positions().collect();
        let cols: Vec<u32> = blocks.cells[&(q, dim)].positions().collect();
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let v = assembled.get(i, j);
                if v != 0 {
                    dsplit.set(r as usize, c as usize, v);
                }
            }
        }
    }

    let mut dtilde = DenseMatrix::zeros(n, n, field);
    let mut htilde = DenseMatrix::zeros(n, n, field);
    for (&(grade, dim), cell) in blocks.cells.iter() {
        if cell.k.is_empty() {
            continue;
        }
        let below = blocks.cell(grade, dim - 1);
        let bk = blocks.part_block(grade, grade, dim, Part::B, Part::K);
        for (i, &b_pos) in below.b.iter().enumerate() {
            for (j, &k_pos) in cell.k.iter().enumerate() {
                let v = bk.get(i, j);
                if v != 0 {
                    dtilde.set(b_pos as usize, k_pos as usize, v);
                }
            }
        }
        let inv = blocks.bk_inv[&(grade, dim)].neg();
        for (i, &k_pos) in cell.k.iter().enumerate() {
            for (j, &b_pos) in below.b.iter().enumerate() {
                let v = inv.get(i, j);
                if v != 0 {
                    htilde.set(k_pos as usize, b_pos as usize, v);
                }
            }
        }
    }

    let delta = dsplit.sub(&dtilde);
    let mut proj_m = DenseMatrix::zeros(n, n, field);
    for (pos, &(part, _, _)) in blocks.meta.iter().enumerate() {
        if part == Part::M {
            proj_m.set(pos, pos, 1);
        }
    }

    // S = sum_{m >= 0} delta (htilde delta)^m; poset descent bounds m.
    let x = htilde.mul(&delta);
    let mut series = DenseMatrix::zeros(n, n, field);
    let mut term = delta.clone();
    let mut terms = 0;
    for _ in 0..=blocks.poset.len() {
        if term.is_zero() {
            break;
        }
        series = series.add(&term);
        term = term.mul(&x);
        terms += 1;
    }
    if !term.is_zero() {
        return Err(OracleError::NonNilpotent(terms));
    }

    let f = proj_m.add(&proj_m.mul(&series).mul(&htilde));
    let g = proj_m.add(&htilde.mul(&series).mul(&proj_m));
    let h = htilde.add(&htilde.mul(&series).mul(&htilde));
    let dm = proj_m.mul(&series).mul(&proj_m);

    Ok(ContractionMaps {
        poset: Arc::clone(&blocks.poset),
        field,
        meta: blocks.meta.clone(),
        morse_order: blocks.morse_order.clone(),
        dsplit,
        dtilde,
        delta,
        htilde,
        series,
        f,
        g,
        h,
        dm,
        series_terms: terms,
    })
}

/// One failed exact identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityFailure {
    pub identity: &'static str,
    pub detail: String,
}

impl std::fmt::Display for IdentityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.identity, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionReport {
    pub failures: Vec<IdentityFailure>,
}

impl ContractionReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn first_diff(a: &DenseMatrix, b: &DenseMatrix) -> Option<String> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a.get(i, j) != b.get(i, j) {
                return Some(format!(
                    "entry ({i},{j}): {} vs {}",
                    a.get(i, j),
                    b.get(i, j)
                ));
            }
        }
    }
    None
}

/// Checks every contraction identity as an exact matrix equation, plus the
/// filtered block pattern and degrees of all maps, and that the splitting
/// really conjugates the input boundary matrix.
pub fn verify_contraction(maps: &ContractionMaps, state: &ReducedState) -> ContractionReport {
    let mut failures = Vec::new();
    let n = maps.meta.len();
    let field = maps.field;
    let cx = state.complex();

    // Change of basis: Z dsplit = D Z, with Z the separating-basis matrix.
    let mut z = DenseMatrix::zeros(n, n, field);
    for (_, cell) in state.separating_basis().cells() {
        for chain in cell
            .homology
            .iter()
            .map(|c| (c.pivot, &c.chain))
            .chain(cell.boundaries.iter().map(|c| (c.pivot, &c.chain)))
            .chain(cell.preboundaries.iter().map(|c| (c.pivot, &c.chain)))
        {
            for (pos, v) in chain.1.iter() {
                z.set(pos as usize, chain.0 as usize, v);
            }
        }
    }
    let mut d_dense = DenseMatrix::zeros(n, n, field);
    for (j, col) in cx.boundary().iter().enumerate() {
        for (r, v) in col.iter() {
            d_dense.set(r as usize, j, v);
        }
    }
    if let Some(detail) = first_diff(&z.mul(&maps.dsplit), &d_dense.mul(&z)) {
        failures.push(IdentityFailure {
            identity: "conjugation",
            detail,
        });
    }

    let mut check = |name: &'static str, lhs: &DenseMatrix, rhs: &DenseMatrix| {
        if let Some(detail) = first_diff(lhs, rhs) {
            failures.push(IdentityFailure {
                identity: name,
                detail,
            });
        }
    };

    let d = &maps.dsplit;
    let mut one_m = DenseMatrix::zeros(n, n, field);
    for (pos, &(part, _, _)) in maps.meta.iter().enumerate() {
        if part == Part::M {
            one_m.set(pos, pos, 1);
        }
    }
    let identity = DenseMatrix::identity(n, field);
    check("fg = 1", &maps.f.mul(&maps.g), &one_m);
    check(
        "gf = 1 + dh + hd",
        &maps.g.mul(&maps.f),
        &identity.add(&d.mul(&maps.h)).add(&maps.h.mul(d)),
    );
    let zero = DenseMatrix::zeros(n, n, field);
    check("fh = 0", &maps.f.mul(&maps.h), &zero);
    check("hg = 0", &maps.h.mul(&maps.g), &zero);
    check("h^2 = 0", &maps.h.mul(&maps.h), &zero);
    check("f chain map", &maps.f.mul(d), &maps.dm.mul(&maps.f));
    check("g chain map", &d.mul(&maps.g), &maps.g.mul(&maps.dm));
    check("dm^2 = 0", &maps.dm.mul(&maps.dm), &zero);

    // Filteredness and degrees of every map, and strictness of dm.
    let graded_checks: [(&'static str, &DenseMatrix, i32, bool); 4] = [
        ("f filtered", &maps.f, 0, false),
        ("g filtered", &maps.g, 0, false),
        ("h filtered", &maps.h, 1, false),
        ("dm strict and filtered", &maps.dm, -1, true),
    ];
    for (name, mat, degree, strict) in graded_checks {
        'outer: for i in 0..n {
            for j in 0..n {
                if mat.get(i, j) == 0 {
                    continue;
                }
                let (_, gi, di) = maps.meta[i];
                let (_, gj, dj) = maps.meta[j];
                let bad_grade = if strict {
                    !maps.poset.lt(gi, gj)
                } else {
                    !maps.poset.leq(gi, gj)
                };
                if bad_grade || di != dj + degree {
                    failures.push(IdentityFailure {
                        identity: name,
                        detail: format!("entry ({i},{j})"),
                    });
                    break 'outer;
                }
            }
        }
    }

    ContractionReport { failures }
}

/// Everything the `--verify` flag runs: split consistency, anticommutation,
/// both oracle routes, the contraction identities, and agreement with the
/// reduction's connection matrix when one is supplied.
pub fn verify_state(
    state: &ReducedState,
    delta: Option<&[SparseColumn]>,
) -> Result<ContractionReport, OracleError> {
    let blocks = split_blocks(state)?;
    let mut failures = blocks.verify_anticommutation();
    let maps = build_contraction(&blocks)?;
    failures.extend(verify_contraction(&maps, state).failures);
    let zig = zigzag_dm(&blocks);
    let pert = maps.dm_columns();
    if zig != pert {
        failures.push(IdentityFailure {
            identity: "zigzag = perturbation",
            detail: "the two oracle routes disagree".into(),
        });
    }
    if let Some(delta) = delta {
        if delta != zig.as_slice() {
            failures.push(IdentityFailure {
                identity: "zigzag = connection matrix",
                detail: "oracle disagrees with the reduction".into(),
            });
        }
        if delta != pert.as_slice() {
            failures.push(IdentityFailure {
                identity: "perturbation = connection matrix",
                detail: "oracle disagrees with the reduction".into(),
            });
        }
    }
    Ok(ContractionReport { failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Generator, GradedComplex};
    use crate::connect::{compute_with_state, PipelineOptions};
    use crate::fixtures::{pentagon_complex, triangle_complex, triangle_complex_over};
    use crate::poset::Poset;
    use crate::reduction::{clearing_reduce, ReduceOptions};

    fn reduced(cx: &GradedComplex) -> ReducedState {
        clearing_reduce(cx, ReduceOptions::default()).unwrap()
    }

    /// Three grades stacked over F5: a vertex below, a matched pair in the
    /// middle, a Morse edge on top. Exercises every zigzag sign.
    fn three_level_f5() -> GradedComplex {
        let field = PrimeField::new(5).unwrap();
        GradedComplex::new(
            Poset::chain(3),
            field,
            vec![
                Generator::new("a", 0, 0),
                Generator::new("b", 0, 1),
                Generator::new("e", 1, 1),
                Generator::new("z", 1, 2),
            ],
            vec![
                ("e".into(), vec![("b".into(), 1), ("a".into(), -1)]),
                ("z".into(), vec![("b".into(), 2), ("a".into(), -1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn triangle_bk_block_is_identity() {
        let cx = triangle_complex();
        let state = reduced(&cx);
        let blocks = split_blocks(&state).unwrap();
        let bk = blocks.part_block(1, 1, 1, Part::B, Part::K);
        assert_eq!((bk.rows(), bk.cols()), (1, 1));
        assert_eq!(bk.get(0, 0), 1);
    }

    #[test]
    fn strict_complex_has_only_mm_blocks() {
        let poset = Poset::chain(2);
        let cx = GradedComplex::new(
            poset,
            PrimeField::f2(),
            vec![Generator::new("a", 0, 0), Generator::new("b", 1, 1)],
            vec![("b".into(), vec![("a".into(), 1)])],
        )
        .unwrap();
        let state = reduced(&cx);
        let blocks = split_blocks(&state).unwrap();
        for (&(g, d), cell) in blocks.cells.iter() {
            assert!(cell.b.is_empty() && cell.k.is_empty(), "cell ({g},{d})");
        }
        let mm = blocks.part_block(0, 1, 1, Part::M, Part::M);
        assert_eq!(mm.get(0, 0), 1);
        // Perturbation is immediate: S = delta, h = 0, dm = delta.
        let maps = build_contraction(&blocks).unwrap();
        assert_eq!(maps.series, maps.delta);
        assert!(maps.h.is_zero());
        assert_eq!(maps.series_terms, 1);
        assert!(verify_contraction(&maps, &state).is_ok());
    }

    #[test]
    fn antichain_has_zero_dm() {
        let poset = Poset::new(&["a", "b"], &[]).unwrap();
        let cx = GradedComplex::new(
            poset,
            PrimeField::f2(),
            vec![
                Generator::new("x", 0, 0),
                Generator::new("y", 0, 1),
                Generator::new("e", 1, 1),
                Generator::new("f", 1, 1),
            ],
            vec![
                ("e".into(), vec![("y".into(), 1)]),
                ("f".into(), vec![("y".into(), 1)]),
            ],
        )
        .unwrap();
        let state = reduced(&cx);
        let blocks = split_blocks(&state).unwrap();
        let zig = zigzag_dm(&blocks);
        assert!(zig.iter().all(SparseColumn::is_zero));
        let maps = build_contraction(&blocks).unwrap();
        assert!(maps.dm.is_zero());
    }

    #[test]
    fn anticommutation_holds_on_fixtures() {
        for cx in [
            triangle_complex(),
            pentagon_complex(),
            three_level_f5(),
            triangle_complex_over(PrimeField::new(3).unwrap()),
        ] {
            let state = reduced(&cx);
            let blocks = split_blocks(&state).unwrap();
            assert!(blocks.verify_anticommutation().is_empty());
        }
    }

    /// The three-grade block formula, written out by hand, against both
    /// oracle routes and the matrix algorithm.
    #[test]
    fn zigzag_matches_hand_formula_over_f5() {
        let cx = three_level_f5();
        let (conley, state) = compute_with_state(&cx, PipelineOptions::default()).unwrap();
        let blocks = split_blocks(&state).unwrap();

        let mm = blocks.part_block(0, 2, 1, Part::M, Part::M);
        let mk = blocks.part_block(0, 1, 1, Part::M, Part::K);
        let bm = blocks.part_block(1, 2, 1, Part::B, Part::M);
        let bk_inv = blocks
            .part_block(1, 1, 1, Part::B, Part::K)
            .inverse()
            .unwrap();
        let by_hand = mm.add(&mk.mul(&bk_inv).mul(&bm).neg());
        // d(z) = 2b - a with d(e) = b - a: the correction cancels to +1.
        assert_eq!(by_hand.get(0, 0), 1);

        let zig = zigzag_dm(&blocks);
        let maps = build_contraction(&blocks).unwrap();
        assert_eq!(zig, maps.dm_columns());
        assert_eq!(zig, conley.delta());
        assert_eq!(zig[1].coeff(0), 1);
        assert!(verify_contraction(&maps, &state).is_ok());
    }

    /// At three poset levels the series is exactly delta + delta htilde delta.
    #[test]
    fn series_matches_hand_expansion() {
        let cx = three_level_f5();
        let state = reduced(&cx);
        let blocks = split_blocks(&state).unwrap();
        let maps = build_contraction(&blocks).unwrap();
        let second = maps.delta.mul(&maps.htilde).mul(&maps.delta);
        assert_eq!(maps.series, maps.delta.add(&second));
        assert!(!second.is_zero());
        assert!(maps.series_terms <= cx.poset().len());
    }

    #[test]
    fn corrupted_homotopy_fails_with_witness() {
        let cx = triangle_complex();
        let state = reduced(&cx);
        let blocks = split_blocks(&state).unwrap();
        let mut maps = build_contraction(&blocks).unwrap();
        assert!(verify_contraction(&maps, &state).is_ok());
        // Flip one entry of h.
        let uw = cx.position_of("uw").unwrap() as usize;
        let w = cx.position_of("w").unwrap() as usize;
        let cur = maps.h.get(uw, w);
        maps.h.set(uw, w, maps.field.add(cur, 1));
        let report = verify_contraction(&maps, &state);
        assert!(report
            .failures
            .iter()
            .any(|f| f.identity == "gf = 1 + dh + hd"));
    }

    #[test]
    fn oracle_requires_clearing() {
        let cx = triangle_complex();
        let state = clearing_reduce(
            &cx,
            ReduceOptions {
                clearing: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            split_blocks(&state),
            Err(OracleError::RequiresClearing)
        ));
    }

    #[test]
    fn empty_complex_is_trivially_verified() {
        let cx = GradedComplex::new(Poset::chain(2), PrimeField::f2(), vec![], vec![]).unwrap();
        let state = reduced(&cx);
        let report = verify_state(&state, Some(&[])).unwrap();
        assert!(report.is_ok());
    }

    /// The oracle reads only the separating basis and the input complex, so
    /// pruning and the global reduction cannot change its answer.
    #[test]
    fn oracle_is_independent_of_pruning() {
        let cx = pentagon_complex();
        let state = reduced(&cx);
        let fresh = zigzag_dm(&split_blocks(&state).unwrap());
        let (_, final_state) = compute_with_state(&cx, PipelineOptions::default()).unwrap();
        assert!(final_state.is_pruned());
        let after = zigzag_dm(&split_blocks(&final_state).unwrap());
        assert_eq!(fresh, after);
    }

    #[test]
    fn full_verification_passes_on_fixtures() {
        for cx in [
            triangle_complex(),
            pentagon_complex(),
            three_level_f5(),
            triangle_complex_over(PrimeField::new(7).unwrap()),
        ] {
            let (conley, state) = compute_with_state(&cx, PipelineOptions::default()).unwrap();
            let report = verify_state(&state, Some(conley.delta())).unwrap();
            assert!(report.is_ok(), "{:?}", report.failures);
        }
    }
}
