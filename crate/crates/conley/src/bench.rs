//! Random-instance generation and the complexity smoke harness.
//!
//! Instances start from a random filtered simplicial complex, which gives
//! `d^2 = 0` and a monotone grading by construction, and are then pushed
//! through a random invertible filtered change of basis so the boundary
//! matrix stops looking simplicial. No rejection sampling is involved:
//! simplices are grown grade-first (pick a grade, then vertices below it),
//! so a valid filter value always exists.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{ComplexError, Generator, GradedComplex, SparseColumn};
use crate::connect::{compute_connection_matrix, ConnectError, PipelineOptions};
use crate::field::{FieldError, PrimeField};
use crate::poset::{Poset, PosetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("infeasible generator config: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Connect(#[from] ConnectError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PosetShape {
    Chain,
    Antichain,
    /// Random DAG: each forward pair is a relation with this probability.
    RandomDag {
        edge_prob: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub poset_size: usize,
    pub shape: PosetShape,
    /// Total generator count to aim for (exact by construction).
    pub target_generators: usize,
    /// Largest simplex dimension sampled.
    pub max_dim: usize,
    /// Drives both how many non-vertex simplices appear and how many
    /// change-of-basis operations are applied. Zero means a discrete set of
    /// points: the differential vanishes.
    pub density: f64,
    pub characteristic: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            poset_size: 4,
            shape: PosetShape::Chain,
            target_generators: 30,
            max_dim: 2,
            density: 0.3,
            characteristic: 2,
        }
    }
}

fn build_poset(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Poset, PosetError> {
    let labels: Vec<String> = (0..cfg.poset_size).map(|i| format!("p{i}")).collect();
    let mut relations: Vec<(String, String)> = Vec::new();
    match cfg.shape {
        PosetShape::Chain => {
            for i in 1..cfg.poset_size {
                relations.push((labels[i - 1].clone(), labels[i].clone()));
            }
        }
        PosetShape::Antichain => {}
        PosetShape::RandomDag { edge_prob } => {
            for i in 0..cfg.poset_size {
                for j in (i + 1)..cfg.poset_size {
                    if rng.random_bool(edge_prob.clamp(0.0, 1.0)) {
                        relations.push((labels[i].clone(), labels[j].clone()));
                    }
                }
            }
        }
    }
    Poset::new(&labels, &relations)
}

/// Generates a valid graded complex according to the config. The same seed
/// always produces the same complex.
pub fn random_complex(cfg: &GeneratorConfig) -> Result<GradedComplex, BenchError> {
    if cfg.poset_size == 0 {
        return Err(BenchError::Infeasible("empty poset".into()));
    }
    if cfg.target_generators == 0 {
        return Err(BenchError::Infeasible("zero generators requested".into()));
    }
    let target = cfg.target_generators;
    let mut n_vertices = if cfg.density == 0.0 || cfg.max_dim == 0 {
        target
    } else {
        (target / 4).max(cfg.max_dim + 1).min(target)
    };
    // The grading can starve small vertex sets (a k-simplex needs k vertices
    // under a common grade), so grow the vertex pool until sampling works.
    loop {
        match random_complex_with_vertices(cfg, n_vertices) {
            Err(BenchError::Infeasible(reason)) if n_vertices < target => {
                let _ = reason;
                n_vertices = (n_vertices * 2).min(target);
            }
            other => return other,
        }
    }
}

fn random_complex_with_vertices(
    cfg: &GeneratorConfig,
    n_vertices: usize,
) -> Result<GradedComplex, BenchError> {
    let field = PrimeField::new(cfg.characteristic)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let poset = build_poset(cfg, &mut rng)?;
    let n_grades = poset.len();
    let target = cfg.target_generators;
    let width = n_vertices.to_string().len();
    let mut gens: Vec<Generator> = Vec::new();
    let mut vertex_grades: Vec<usize> = Vec::new();
    for i in 0..n_vertices {
        let grade = poset.extension()[i % n_grades];
        gens.push(Generator::new(format!("v{i:0width$}"), 0, grade));
        vertex_grades.push(grade);
    }

    // Grow simplices grade-first; keyed by sorted vertex index tuples.
    let mut by_key: std::collections::HashMap<Vec<usize>, (String, usize)> =
        std::collections::HashMap::new();
    let mut boundaries: Vec<(String, Vec<(String, i64)>)> = Vec::new();
    let mut count = gens.len();
    let mut attempts = 0usize;
    let max_attempts = 500 * target.max(8);
    while count < target && attempts < max_attempts {
        attempts += 1;
        let k = rng.random_range(2..=(cfg.max_dim + 1).max(2));
        let grade = poset.extension()[rng.random_range(0..n_grades)];
        let below: Vec<usize> = (0..n_vertices)
            .filter(|&v| poset.leq(vertex_grades[v], grade))
            .collect();
        if below.len() < k {
            continue;
        }
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        while picked.len() < k {
            let v = below[rng.random_range(0..below.len())];
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        picked.sort_unstable();
        insert_simplex(
            &picked,
            &poset,
            &vertex_grades,
            &mut by_key,
            &mut gens,
            &mut boundaries,
            &mut count,
            target,
            &mut rng,
        );
    }
    if count < target {
        return Err(BenchError::Infeasible(format!(
            "could not reach {target} generators (got {count})"
        )));
    }

    let cx = GradedComplex::new(poset, field, gens, boundaries)?;
    debug_assert!(cx.is_valid());

    // Random invertible filtered change of basis: dim-preserving elementary
    // operations with sources weakly below their targets.
    let ops_count = (cfg.density * target as f64).round() as usize;
    if ops_count == 0 {
        return Ok(cx);
    }
    let p = field.characteristic();
    let mut ops: Vec<(u32, u32, u64)> = Vec::new();
    let mut by_dim: std::collections::HashMap<i32, Vec<u32>> = std::collections::HashMap::new();
    for (j, g) in cx.generators().iter().enumerate() {
        by_dim.entry(g.dim).or_default().push(j as u32);
    }
    let dims: Vec<i32> = {
        let mut d: Vec<i32> = by_dim.keys().copied().collect();
        d.sort_unstable();
        d
    };
    let mut op_attempts = 0usize;
    while ops.len() < ops_count && op_attempts < 50 * ops_count + 100 {
        op_attempts += 1;
        let dim = dims[rng.random_range(0..dims.len())];
        let cand = &by_dim[&dim];
        if cand.len() < 2 {
            continue;
        }
        let i = cand[rng.random_range(0..cand.len())];
        let j = cand[rng.random_range(0..cand.len())];
        if i != j && cx.poset().leq(cx.generator(i).grade, cx.generator(j).grade) {
            let c = 1 + rng.random_range(0..p - 1);
            ops.push((i, j, c));
        }
    }

    Ok(apply_basis_change(&cx, &ops))
}

#[allow(clippy::too_many_arguments)]
fn insert_simplex(
    vertices: &[usize],
    poset: &Poset,
    vertex_grades: &[usize],
    by_key: &mut std::collections::HashMap<Vec<usize>, (String, usize)>,
    gens: &mut Vec<Generator>,
    boundaries: &mut Vec<(String, Vec<(String, i64)>)>,
    count: &mut usize,
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(String, usize)> {
    if vertices.len() == 1 {
        let v = vertices[0];
        return Some((gens[v].id.clone(), vertex_grades[v]));
    }
    if let Some(found) = by_key.get(vertices) {
        return Some(found.clone());
    }
    if *count >= target {
        return None;
    }
    // Faces first; each occupies a grade at or below the cap.
    let mut face_info: Vec<(String, usize)> = Vec::with_capacity(vertices.len());
    for omit in 0..vertices.len() {
        let mut face: Vec<usize> = vertices.to_vec();
        face.remove(omit);
        let info = insert_simplex(
            &face,
            poset,
            vertex_grades,
            by_key,
            gens,
            boundaries,
            count,
            target,
            rng,
        )?;
        face_info.push(info);
    }
    // Any grade above every face works. Freshly sampled vertices share an
    // upper bound, but a reused face may not, leaving no candidate.
    let candidates: Vec<usize> = poset
        .extension()
        .iter()
        .copied()
        .filter(|&q| face_info.iter().all(|&(_, fg)| poset.leq(fg, q)))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    // Faces may have consumed the remaining budget.
    if *count >= target {
        return None;
    }
    let grade = candidates[rng.random_range(0..candidates.len())];
    let id = format!(
        "s{}",
        vertices
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("-")
    );
    gens.push(Generator::new(id.clone(), vertices.len() as i32 - 1, grade));
    let terms: Vec<(String, i64)> = face_info
        .iter()
        .enumerate()
        .map(|(omit, (fid, _))| (fid.clone(), if omit % 2 == 0 { 1 } else { -1 }))
        .collect();
    boundaries.push((id.clone(), terms));
    *count += 1;
    by_key.insert(vertices.to_vec(), (id.clone(), grade));
    Some((id, grade))
}

/// Conjugates the boundary matrix by the product of elementary column
/// operations `(source, target, coeff)`: the new basis vector at `target`
/// gains `coeff` times the one at `source`.
fn apply_basis_change(cx: &GradedComplex, ops: &[(u32, u32, u64)]) -> GradedComplex {
    let field = cx.field();
    let n = cx.len();
    // D Z: elementary column ops applied in order.
    let mut cols: Vec<SparseColumn> = cx.boundary().to_vec();
    for &(i, j, c) in ops {
        let (a, b) = (i as usize, j as usize);
        let src = cols[a].clone();
        cols[b].add_scaled(&src, c, &field);
    }
    // Z^{-1} (D Z): with Z = E_1 ... E_k, the inverse applies E_1^{-1}
    // first, so the ops run forward on each column vector.
    let mut dense = vec![0u64; n];
    let new_cols: Vec<SparseColumn> = cols
        .into_iter()
        .map(|col| {
            for (pos, v) in col.iter() {
                dense[pos as usize] = v;
            }
            for &(i, j, c) in ops {
                let xj = dense[j as usize];
                if xj != 0 {
                    let sub = field.mul(c, xj);
                    let cur = dense[i as usize];
                    dense[i as usize] = field.sub(cur, sub);
                }
            }
            let out = SparseColumn::from_pairs(
                dense
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(p, &v)| (p as u32, v as i64)),
                &field,
            );
            for v in dense.iter_mut() {
                *v = 0;
            }
            out
        })
        .collect();
    let out = GradedComplex::from_parts_unchecked(
        cx.poset_arc(),
        field,
        cx.generators().to_vec(),
        new_cols,
    );
    debug_assert!(out.is_valid(), "{}", out.validate());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub size: usize,
    pub generators: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,generators,seconds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.6}\n", r.size, r.generators, r.seconds));
        }
        out
    }

    /// Least-squares slope of `log t` against `log n`; `None` below two rows.
    pub fn loglog_slope(&self) -> Option<f64> {
        if self.rows.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|r| ((r.size as f64).ln(), r.seconds.max(1e-9).ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    }
}

/// Times the full pipeline on one random instance per size.
pub fn scaling_run(sizes: &[usize], cfg: &GeneratorConfig) -> Result<ScalingTable, BenchError> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut instance_cfg = *cfg;
        instance_cfg.target_generators = size;
        instance_cfg.seed = cfg.seed.wrapping_add(size as u64);
        let cx = random_complex(&instance_cfg)?;
        let t0 = std::time::Instant::now();
        let conley = compute_connection_matrix(&cx, PipelineOptions::default())?;
        let seconds = t0.elapsed().as_secs_f64();
        std::hint::black_box(&conley);
        rows.push(ScalingRow {
            size,
            generators: cx.len(),
            seconds,
        });
    }
    Ok(ScalingTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_is_identical() {
        let cfg = GeneratorConfig {
            seed: 1,
            poset_size: 3,
            target_generators: 10,
            ..Default::default()
        };
        let a = random_complex(&cfg).unwrap();
        let b = random_complex(&cfg).unwrap();
        assert_eq!(a.generators(), b.generators());
        assert_eq!(a.boundary(), b.boundary());
        assert!(a.is_valid());
        assert!(a.len() == 10);
    }

    #[test]
    fn sixty_generator_instances_pass_full_verification() {
        for (seed, p) in [(3u64, 2u64), (4, 3), (5, 5)] {
            let cfg = GeneratorConfig {
                seed,
                poset_size: 5,
                target_generators: 60,
                density: 0.4,
                characteristic: p,
                ..Default::default()
            };
            let cx = random_complex(&cfg).unwrap();
            let (conley, state) =
                crate::connect::compute_with_state(&cx, PipelineOptions::default()).unwrap();
            let report = crate::oracle::verify_state(&state, Some(conley.delta())).unwrap();
            assert!(report.is_ok(), "seed {seed}: {:?}", report.failures);
        }
    }

    #[test]
    fn density_zero_gives_zero_differential() {
        let cfg = GeneratorConfig {
            density: 0.0,
            target_generators: 12,
            ..Default::default()
        };
        let cx = random_complex(&cfg).unwrap();
        assert_eq!(cx.len(), 12);
        assert!(cx.boundary().iter().all(SparseColumn::is_zero));
    }

    #[test]
    fn shapes_and_characteristics_all_validate() {
        for (i, shape) in [
            PosetShape::Chain,
            PosetShape::Antichain,
            PosetShape::RandomDag { edge_prob: 0.4 },
        ]
        .into_iter()
        .enumerate()
        {
            for (j, p) in [2u64, 3, 5].into_iter().enumerate() {
                let cfg = GeneratorConfig {
                    seed: (i * 10 + j) as u64,
                    poset_size: 4,
                    shape,
                    target_generators: 25,
                    characteristic: p,
                    ..Default::default()
                };
                let cx = random_complex(&cfg).unwrap();
                assert!(cx.is_valid(), "shape {shape:?} char {p}");
                assert_eq!(cx.len(), 25);
            }
        }
    }

    #[test]
    fn infeasible_configs_error() {
        assert!(matches!(
            random_complex(&GeneratorConfig {
                poset_size: 0,
                ..Default::default()
            }),
            Err(BenchError::Infeasible(_))
        ));
        assert!(matches!(
            random_complex(&GeneratorConfig {
                characteristic: 6,
                ..Default::default()
            }),
            Err(BenchError::Field(_))
        ));
    }

    #[test]
    fn scaling_yields_monotone_sizes_and_csv() {
        let cfg = GeneratorConfig::default();
        let table = scaling_run(&[40, 80], &cfg).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].generators, 40);
        assert_eq!(table.rows[1].generators, 80);
        let csv = table.to_csv();
        assert!(csv.starts_with("size,generators,seconds\n"));
        assert_eq!(csv.lines().count(), 3);
        let single = scaling_run(&[30], &cfg).unwrap();
        assert_eq!(single.rows.len(), 1);
        assert!(single.loglog_slope().is_none());
    }
}
