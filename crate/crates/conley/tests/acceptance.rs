//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Criteria 2-7 share a deterministic corpus of 500 random instances
//! (up to 40 generators, up to 6 poset elements, characteristics 2, 3, 5)
//! built once per test process.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use conley::bench::{random_complex, scaling_run, GeneratorConfig, PosetShape};
use conley::connect::{compute_connection_matrix, compute_with_state, PipelineOptions, Step3Order};
use conley::io::{parse_complex, parse_filtration, serialize_result};
use conley::oracle;
use conley::reduction::{clearing_reduce, ReduceOptions, ReductionOp};
use conley::{ConleyComplex, GradedComplex};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture exists")
}

fn corpus() -> &'static [GradedComplex] {
    static CORPUS: OnceLock<Vec<GradedComplex>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let shapes = [
            PosetShape::Chain,
            PosetShape::Antichain,
            PosetShape::RandomDag { edge_prob: 0.35 },
        ];
        let sizes = [8usize, 14, 22, 30, 40];
        let poset_sizes = [1usize, 2, 3, 4, 5, 6];
        let densities = [0.0, 0.15, 0.3, 0.5];
        let characteristics = [2u64, 3, 5];
        let mut out = Vec::with_capacity(500);
        let mut seed = 0u64;
        while out.len() < 500 {
            let s = seed as usize;
            let cfg = GeneratorConfig {
                seed,
                poset_size: poset_sizes[s % poset_sizes.len()],
                shape: shapes[s % shapes.len()],
                target_generators: sizes[s % sizes.len()],
                max_dim: 2 + s % 2,
                density: densities[s % densities.len()],
                characteristic: characteristics[s % characteristics.len()],
            };
            seed += 1;
            if let Ok(cx) = random_complex(&cfg) {
                assert!(cx.is_valid());
                out.push(cx);
            }
        }
        out
    })
}

fn nonzero<K: Ord + Copy>(
    map: &std::collections::BTreeMap<K, usize>,
) -> std::collections::BTreeMap<K, usize> {
    map.iter()
        .filter(|(_, &v)| v != 0)
        .map(|(&k, &v)| (k, v))
        .collect()
}

type ResultSignature = (Vec<(String, i32, String)>, Vec<(u32, u32, u64)>);

fn result_signature(conley: &ConleyComplex) -> ResultSignature {
    let gens = conley
        .index_generators()
        .iter()
        .map(|g| {
            (
                g.id.clone(),
                g.dim,
                conley.poset().label(g.grade).to_owned(),
            )
        })
        .collect();
    (gens, conley.triplets())
}

/// Criterion 1: the worked filtered-triangle example is reproduced exactly,
/// in under a millisecond.
#[test]
fn criterion_1_worked_example_reproduction() {
    let cx = parse_filtration(&fixture("triangle.flt")).unwrap();
    let pos = |id: &str| cx.position_of(id).unwrap();

    // Warm run, then timed run.
    compute_with_state(&cx, PipelineOptions::default()).unwrap();
    let t0 = Instant::now();
    let (conley, state) = compute_with_state(&cx, PipelineOptions::default()).unwrap();
    let elapsed = t0.elapsed();

    // Step 1 performs exactly one column addition: vu into vw.
    let adds: Vec<&ReductionOp> = state
        .ops()
        .iter()
        .filter(|op| matches!(op, ReductionOp::AddColumn { .. }))
        .collect();
    assert_eq!(adds.len(), 1);
    assert_eq!(
        adds[0],
        &ReductionOp::AddColumn {
            source: pos("vu"),
            target: pos("vw"),
            coeff: 1
        }
    );

    // Separating basis: B = {w, v}, Pre = {uw, vu} with their partners.
    let sep = state.separating_basis();
    let b10: Vec<u32> = sep.cell(1, 0).boundaries.iter().map(|c| c.pivot).collect();
    assert_eq!(b10, vec![pos("w")]);
    let b20: Vec<u32> = sep.cell(2, 0).boundaries.iter().map(|c| c.pivot).collect();
    assert_eq!(b20, vec![pos("v")]);
    let p11 = &sep.cell(1, 1).preboundaries;
    assert_eq!(p11.len(), 1);
    assert_eq!((p11[0].pivot, p11[0].partner), (pos("uw"), pos("w")));
    let p21 = &sep.cell(2, 1).preboundaries;
    assert_eq!(p21.len(), 1);
    assert_eq!((p21[0].pivot, p21[0].partner), (pos("vu"), pos("v")));
    assert!(sep.cell(1, 1).homology.is_empty());
    assert!(sep.cell(2, 0).homology.is_empty());

    // Step 3 performs exactly one addition: uw into the Morse column.
    assert_eq!(
        state.step3_ops(),
        &[ReductionOp::AddColumn {
            source: pos("uw"),
            target: pos("vw"),
            coeff: 1
        }]
    );

    // Final connection matrix: 3x3 with a single 1 in (degree-1 index
    // generator, uvw).
    assert_eq!(conley.len(), 3);
    let ids: Vec<&str> = conley
        .index_generators()
        .iter()
        .map(|g| g.id.as_str())
        .collect();
    assert_eq!(ids, ["u", "vw", "uvw"]);
    assert_eq!(conley.index_generators()[1].dim, 1);
    assert_eq!(conley.triplets(), vec![(1, 2, 1)]);

    // Index dimension table.
    let dims = conley.index_dims();
    let expect: std::collections::BTreeMap<(usize, i32), usize> =
        [((0, 0), 1), ((2, 1), 1), ((3, 2), 1)]
            .into_iter()
            .collect();
    assert_eq!(dims, expect);

    assert!(
        elapsed < Duration::from_millis(1),
        "pipeline took {elapsed:?}"
    );
    println!("acceptance 1 (worked example reproduction): PASS ({elapsed:?})");
}

/// Criterion 2: on 500 random instances, the zigzag formula, the
/// perturbation series and the reduction agree entry-for-entry.
#[test]
fn criterion_2_oracle_equivalence() {
    let t0 = Instant::now();
    for (i, cx) in corpus().iter().enumerate() {
        let (conley, state) = compute_with_state(cx, PipelineOptions::default()).unwrap();
        let blocks = oracle::split_blocks(&state).unwrap();
        let zigzag = oracle::zigzag_dm(&blocks);
        let maps = oracle::build_contraction(&blocks).unwrap();
        let perturbation = maps.dm_columns();
        assert_eq!(zigzag, perturbation, "instance {i}: oracle routes differ");
        assert_eq!(
            zigzag,
            conley.delta(),
            "instance {i}: oracle differs from the reduction"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "corpus took {elapsed:?}");
    println!(
        "acceptance 2 (oracle equivalence, {} instances): PASS ({elapsed:?})",
        corpus().len()
    );
}

/// Criterion 3: every contraction identity holds exactly on the corpus.
#[test]
fn criterion_3_contraction_identities() {
    for (i, cx) in corpus().iter().enumerate() {
        let state = clearing_reduce(cx, ReduceOptions::default()).unwrap();
        let blocks = oracle::split_blocks(&state).unwrap();
        let maps = oracle::build_contraction(&blocks).unwrap();
        let report = oracle::verify_contraction(&maps, &state);
        assert!(report.is_ok(), "instance {i}: {:?}", report.failures);
    }
    println!(
        "acceptance 3 (contraction identities, {} instances): PASS",
        corpus().len()
    );
}

/// Criterion 4: Conley index dimensions match brute-force relative
/// homology, and the Conley complex has the homology of the input, globally
/// and on every down-set.
#[test]
fn criterion_4_conley_index_correctness() {
    for (i, cx) in corpus().iter().enumerate() {
        let (conley, state) = compute_with_state(cx, PipelineOptions::default()).unwrap();
        assert_eq!(
            state.conley_index_dims(),
            nonzero(&cx.relative_homology_dims()),
            "instance {i}: index dimensions"
        );
        let reduced = conley.to_graded_complex();
        assert_eq!(
            nonzero(&reduced.global_homology_dims()),
            nonzero(&cx.global_homology_dims()),
            "instance {i}: global homology"
        );
        for p in 0..cx.poset().len() {
            assert_eq!(
                nonzero(&reduced.restrict_downset(p).global_homology_dims()),
                nonzero(&cx.restrict_downset(p).global_homology_dims()),
                "instance {i}: down-set at {p}"
            );
        }
    }
    println!(
        "acceptance 4 (conley index correctness, {} instances): PASS",
        corpus().len()
    );
}

/// Criterion 5: every output satisfies the four structural invariants.
#[test]
fn criterion_5_structural_invariants() {
    for (i, cx) in corpus().iter().enumerate() {
        let conley = compute_connection_matrix(cx, PipelineOptions::default()).unwrap();
        conley
            .verify()
            .unwrap_or_else(|e| panic!("instance {i}: {e}"));
    }
    println!(
        "acceptance 5 (structural invariants, {} instances): PASS",
        corpus().len()
    );
}

/// Criterion 6: pruning on/off, reversed step-3 order, and parallel
/// reduction all serialise to identical bytes.
#[test]
fn criterion_6_pipeline_stability() {
    for (i, cx) in corpus().iter().enumerate() {
        let base = compute_connection_matrix(cx, PipelineOptions::default()).unwrap();
        let base_bytes = serialize_result(&base, Some(cx));
        let variants = [
            PipelineOptions {
                prune: false,
                ..Default::default()
            },
            PipelineOptions {
                step3_order: Step3Order::Descending,
                ..Default::default()
            },
            PipelineOptions {
                parallel: true,
                ..Default::default()
            },
        ];
        for (v, options) in variants.into_iter().enumerate() {
            let other = compute_connection_matrix(cx, options).unwrap();
            assert_eq!(
                base_bytes,
                serialize_result(&other, Some(cx)),
                "instance {i}, variant {v}: output bytes differ"
            );
        }
    }
    println!(
        "acceptance 6 (pipeline stability, {} instances): PASS",
        corpus().len()
    );
}

/// Criterion 7: computing the serialised result is idempotent.
#[test]
fn criterion_7_idempotence() {
    for (i, cx) in corpus().iter().enumerate() {
        let first = compute_connection_matrix(cx, PipelineOptions::default()).unwrap();
        let text = serialize_result(&first, Some(cx));
        let reparsed = parse_complex(&text).unwrap_or_else(|e| panic!("instance {i}: {e}"));
        let second = compute_connection_matrix(&reparsed, PipelineOptions::default()).unwrap();
        assert_eq!(
            result_signature(&first),
            result_signature(&second),
            "instance {i}: recomputation changed the result"
        );
    }
    println!(
        "acceptance 7 (idempotence, {} instances): PASS",
        corpus().len()
    );
}

/// Criterion 8: random F2 instances at 500/1000/2000 generators complete,
/// the fitted log-log exponent stays at most 3.5, and the largest instance
/// finishes within two minutes.
#[test]
fn criterion_8_complexity_smoke() {
    let cfg = GeneratorConfig {
        seed: 42,
        poset_size: 4,
        shape: PosetShape::Chain,
        density: 0.25,
        max_dim: 2,
        characteristic: 2,
        ..Default::default()
    };
    let table = scaling_run(&[500, 1000, 2000], &cfg).unwrap();
    assert_eq!(table.rows.len(), 3);
    for row in &table.rows {
        assert_eq!(row.generators, row.size);
    }
    let largest = table.rows.last().unwrap();
    assert!(
        largest.seconds < 120.0,
        "2000 generators took {:.2}s",
        largest.seconds
    );
    let slope = table.loglog_slope().unwrap();
    assert!(slope <= 3.5, "fitted exponent {slope:.2} exceeds the bound");
    println!(
        "acceptance 8 (complexity smoke): PASS (slope {slope:.2}, largest {:.3}s)",
        largest.seconds
    );
    println!("{}", table.to_csv());
}

/// Criterion 9: the pentagon fixture matches the brute-force oracle and
/// passes full verification.
#[test]
fn criterion_9_pentagon_fixture() {
    let cx = parse_filtration(&fixture("pentagon.flt")).unwrap();
    assert_eq!(cx.len(), 14);
    let (conley, state) = compute_with_state(&cx, PipelineOptions::default()).unwrap();
    assert_eq!(
        state.conley_index_dims(),
        nonzero(&cx.relative_homology_dims())
    );
    // The cycle contributes an index in dimensions 0 and 1; each diagonal
    // and each ear contributes one more.
    let labels: Vec<(&str, i32)> = conley
        .index_generators()
        .iter()
        .map(|g| (cx.poset().label(g.grade), g.dim))
        .collect();
    assert_eq!(
        labels,
        [
            ("pent", 0),
            ("pent", 1),
            ("ac", 1),
            ("ad", 1),
            ("abc", 2),
            ("ade", 2)
        ]
    );
    let report = oracle::verify_state(&state, Some(conley.delta())).unwrap();
    assert!(report.is_ok(), "{:?}", report.failures);
    println!("acceptance 9 (pentagon fixture): PASS");
}
