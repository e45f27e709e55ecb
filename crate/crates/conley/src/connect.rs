//! Global cross-grade reduction and extraction of the connection matrix.
//!
//! After the per-grade reduction, every preboundary column pivots (globally)
//! at its partner boundary row. The global reduction clears those rows out of
//! every surviving homology column by adding preboundary columns from the
//! left; preboundary columns themselves are never targets, so each target
//! column's result is independent of scheduling. What remains on the
//! homology rows and columns is the connection matrix.
//!
//! Pruning the preboundary rows and boundary columns first is optional and
//! provably result-neutral; it only trims the columns the reduction scans.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::complex::{Generator, GradedComplex, SparseColumn};
use crate::poset::Poset;
use crate::reduction::{
    clearing_reduce, ColumnClass, ReduceOptions, ReducedState, ReductionError, ReductionOp,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("connection matrix violates `{0}`: {1}")]
    BrokenInvariant(&'static str, String),
}

/// Scheduling of the global reduction targets; any order yields the same
/// matrix, and the acceptance suite holds us to that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Step3Order {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub clearing: bool,
    pub parallel: bool,
    pub prune: bool,
    pub step3_order: Step3Order,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            clearing: true,
            parallel: false,
            prune: true,
            step3_order: Step3Order::Ascending,
        }
    }
}

/// One Conley-index generator: a homology chain of the reduction, carried in
/// the original basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGenerator {
    pub id: String,
    pub grade: usize,
    pub dim: i32,
    /// Position of the pivot generator in the input complex.
    pub pivot: u32,
    /// Representative chain over the input basis, including the preboundary
    /// corrections accumulated by the global reduction.
    pub chain: SparseColumn,
}

/// The Conley complex: index generators plus the connection matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConleyComplex {
    poset: std::sync::Arc<Poset>,
    field: crate::field::PrimeField,
    index_gens: Vec<IndexGenerator>,
    /// `delta[j]` is the boundary of index generator `j`, rows indexed by
    /// index-generator order.
    delta: Vec<SparseColumn>,
}

impl ConleyComplex {
    /// Assembles a Conley complex from externally computed parts, e.g. the
    /// oracle's view of the same reduction. Invariants are the caller's to
    /// check via [`ConleyComplex::verify`].
    pub fn from_oracle(
        poset: std::sync::Arc<Poset>,
        field: crate::field::PrimeField,
        index_gens: Vec<IndexGenerator>,
        delta: Vec<SparseColumn>,
    ) -> Self {
        Self {
            poset,
            field,
            index_gens,
            delta,
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn field(&self) -> crate::field::PrimeField {
        self.field
    }

    pub fn index_generators(&self) -> &[IndexGenerator] {
        &self.index_gens
    }

    pub fn delta(&self) -> &[SparseColumn] {
        &self.delta
    }

    pub fn len(&self) -> usize {
        self.index_gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_gens.is_empty()
    }

    /// Index dimensions `(grade, dim) -> count`, nonzero cells only.
    pub fn index_dims(&self) -> BTreeMap<(usize, i32), usize> {
        let mut out = BTreeMap::new();
        for g in &self.index_gens {
            *out.entry((g.grade, g.dim)).or_insert(0) += 1;
        }
        out
    }

    /// Delta as `(row, col, coeff)` triplets in column-major order.
    pub fn triplets(&self) -> Vec<(u32, u32, u64)> {
        let mut out = Vec::new();
        for (j, col) in self.delta.iter().enumerate() {
            for (r, c) in col.iter() {
                out.push((r, j as u32, c));
            }
        }
        out
    }

    /// The Conley complex as a graded complex in its own right (it is one:
    /// strict, filtered, with the index generators as basis).
    pub fn to_graded_complex(&self) -> GradedComplex {
        let gens: Vec<Generator> = self
            .index_gens
            .iter()
            .map(|g| Generator::new(g.id.clone(), g.dim, g.grade))
            .collect();
        let boundaries = self
            .index_gens
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let terms: Vec<(String, i64)> = self.delta[j]
                    .iter()
                    .map(|(r, c)| (self.index_gens[r as usize].id.clone(), c as i64))
                    .collect();
                (g.id.clone(), terms)
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();
        GradedComplex::new(
            std::sync::Arc::clone(&self.poset),
            self.field,
            gens,
            boundaries,
        )
        .expect("index generators have unique ids")
    }

    /// Checks the four structural invariants of a connection matrix:
    /// degree, filtered block pattern, strict diagonal blocks, and
    /// `delta * delta = 0`.
    pub fn verify(&self) -> Result<(), ConnectError> {
        for (j, col) in self.delta.iter().enumerate() {
            let gj = &self.index_gens[j];
            for (r, _) in col.iter() {
                let gr = &self.index_gens[r as usize];
                if gr.dim != gj.dim - 1 {
                    return Err(ConnectError::BrokenInvariant(
                        "degree",
                        format!("entry ({}, {})", gr.id, gj.id),
                    ));
                }
                if gr.grade == gj.grade {
                    return Err(ConnectError::BrokenInvariant(
                        "strictness",
                        format!("entry ({}, {})", gr.id, gj.id),
                    ));
                }
                if !self.poset.leq(gr.grade, gj.grade) {
                    return Err(ConnectError::BrokenInvariant(
                        "filtration",
                        format!("entry ({}, {})", gr.id, gj.id),
                    ));
                }
            }
            // delta^2 = 0, column by column.
            let mut square = SparseColumn::zero();
            for (r, c) in col.iter() {
                square.add_scaled(&self.delta[r as usize], c, &self.field);
            }
            if !square.is_zero() {
                return Err(ConnectError::BrokenInvariant(
                    "square",
                    format!("column {}", gj.id),
                ));
            }
        }
        Ok(())
    }
}

/// Step 2 (optional): drop the preboundary rows and boundary columns. The
/// final matrix is unchanged with or without this step.
pub fn prune(mut state: ReducedState) -> ReducedState {
    let n = state.complex().len() as u32;
    for j in 0..n {
        match state.class[j as usize] {
            ColumnClass::Preboundary { .. } => {
                state.removed_rows.insert(j);
            }
            ColumnClass::Boundary => {
                state.removed_cols.insert(j);
            }
            ColumnClass::Homology => {}
        }
    }
    for j in 0..n as usize {
        if state.removed_cols.contains(&(j as u32)) {
            state.matrix[j] = SparseColumn::zero();
        } else {
            let removed = &state.removed_rows;
            state.matrix[j].retain_rows(|r| !removed.contains(&r));
        }
    }
    state
}

/// Step 3: for every preboundary `w`, clear the partner row `rho(d(w))` out
/// of every homology column by adding the column at `rho(w)` with the
/// cancelling coefficient. Preboundary and boundary columns are never
/// targets, so afterwards the homology columns vanish on every partner row,
/// which is exactly what the extraction step needs.
///
/// Rows inside one target column are cleared top-down: an addition only
/// perturbs rows below the pivot it kills, so one descending pass per column
/// suffices and the outcome is independent of target order.
pub fn global_reduce(mut state: ReducedState, order: Step3Order) -> ReducedState {
    let field = state.complex().field();
    let n = state.complex().len() as u32;
    // partner row -> preboundary column position
    let mut source_for_row: BTreeMap<u32, u32> = BTreeMap::new();
    for j in 0..n {
        if let ColumnClass::Preboundary { partner } = state.class[j as usize] {
            source_for_row.insert(partner, j);
        }
    }
    let mut targets: Vec<u32> = (0..n)
        .filter(|&j| matches!(state.class[j as usize], ColumnClass::Homology))
        .collect();
    if order == Step3Order::Descending {
        targets.reverse();
    }
    for t in targets {
        loop {
            // The largest remaining partner-row entry of the target column.
            let hit = state.matrix[t as usize]
                .iter()
                .rev()
                .find_map(|(r, c)| source_for_row.get(&r).map(|&s| (r, c, s)));
            let Some((r, c, s)) = hit else { break };
            let pivot_coeff = state.matrix[s as usize].coeff(r);
            let coeff = field
                .neg_div(c, pivot_coeff)
                .expect("preboundary pivot coefficient is nonzero");
            // Filtered-ness puts the source strictly left of the target.
            debug_assert!(s < t);
            let (left, right) = state.matrix.split_at_mut(t as usize);
            right[0].add_scaled(&left[s as usize], coeff, &field);
            let (left, right) = state.labels.split_at_mut(t as usize);
            right[0].add_scaled(&left[s as usize], coeff, &field);
            state.step3_ops.push(ReductionOp::AddColumn {
                source: s,
                target: t,
                coeff,
            });
        }
    }
    state.globally_reduced = true;
    state
}

/// Step 4: restrict rows and columns to the homology positions.
pub fn extract(state: &ReducedState) -> ConleyComplex {
    debug_assert!(state.is_globally_reduced());
    let cx = state.complex();
    let morse = state.morse_positions();
    let remap: BTreeMap<u32, u32> = morse
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let index_gens: Vec<IndexGenerator> = morse
        .iter()
        .map(|&p| {
            let g = cx.generator(p);
            IndexGenerator {
                id: g.id.clone(),
                grade: g.grade,
                dim: g.dim,
                pivot: p,
                chain: state.label(p).clone(),
            }
        })
        .collect();
    let delta: Vec<SparseColumn> = morse
        .iter()
        .map(|&p| {
            let mut col = state.column(p).clone();
            col.retain_rows(|r| remap.contains_key(&r));
            col.map_positions(|r| remap[&r])
        })
        .collect();
    ConleyComplex {
        poset: cx.poset_arc(),
        field: cx.field(),
        index_gens,
        delta,
    }
}

/// The full pipeline: reduce, optionally prune, globally reduce, extract,
/// and verify the output invariants.
pub fn compute_connection_matrix(
    cx: &GradedComplex,
    options: PipelineOptions,
) -> Result<ConleyComplex, ConnectError> {
    Ok(compute_with_state(cx, options)?.0)
}

/// As [`compute_connection_matrix`], also returning the final reduced state
/// (whose separating basis the verification oracle consumes).
pub fn compute_with_state(
    cx: &GradedComplex,
    options: PipelineOptions,
) -> Result<(ConleyComplex, ReducedState), ConnectError> {
    let state = clearing_reduce(
        cx,
        ReduceOptions {
            clearing: options.clearing,
            parallel: options.parallel,
        },
    )?;
    let state = if options.prune { prune(state) } else { state };
    let state = global_reduce(state, options.step3_order);
    let conley = extract(&state);
    conley.verify()?;
    Ok((conley, state))
}
