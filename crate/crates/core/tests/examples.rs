use edmc_core::chordal::{
    chordal_complete, chordal_edm_check, is_chordal, maximal_cliques_chordal, Chordality,
    CliqueCheck, Completion, FillIn,
};
use edmc_core::compress::{
    compress_cliquecover, compress_ktt, compress_maxdeg, detect_block_pattern,
    edge_clique_cover_search, find_irrelevant_in_clique, CliqueCover, CompressOutcome, Irrelevant,
    Schedule, Verdict,
};
use edmc_core::embed::{extend_basis, realize, realize_on};
use edmc_core::poly::{
    build_augmented_cm, build_basis_guess_formula, build_fillin_formula, decide_exists,
    solve_exact, solve_fillin, BackendOptions, Decision, Formula, Indeterminates, SolveOptions,
    SolveOutcome,
};
use edmc_core::{PartialMatrix, Tolerances, UnderlyingGraph};

const BUDGET: u64 = 10_000_000;

/// Builds a matrix from 1-based specified entries.
fn sparse(n: usize, entries: &[(usize, usize, f64)]) -> PartialMatrix {
    let mut m = PartialMatrix::unspecified(n);
    for &(i, j, v) in entries {
        m.set(i - 1, j - 1, v);
    }
    m
}

fn nine_by_nine() -> PartialMatrix {
    sparse(
        9,
        &[
            (1, 6, 2.0),
            (2, 3, 1.0),
            (3, 8, 2.0),
            (4, 5, 1.0),
            (4, 9, 2.0),
            (5, 6, 1.0),
            (6, 7, 1.0),
        ],
    )
}

fn nine_vertex_chain() -> PartialMatrix {
    let adj: [&[usize]; 9] = [
        &[2, 3, 4],
        &[3, 4],
        &[4, 5, 6, 7],
        &[5, 6, 7],
        &[6, 7, 8],
        &[7, 9],
        &[8],
        &[9],
        &[],
    ];
    let mut e = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for &j in row.iter() {
            e.push((i + 1, j, 1.0));
        }
    }
    sparse(9, &e)
}

fn unit_simplex(k: usize) -> PartialMatrix {
    let mut m = PartialMatrix::unspecified(k);
    for i in 0..k {
        for j in (i + 1)..k {
            m.set(i, j, 1.0);
        }
    }
    m
}

fn planar(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut s = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 11) as f64) / ((1u64 << 53) as f64)
    };
    (0..n).map(|_| vec![next() * 4.0, next() * 4.0]).collect()
}

#[test]
fn block_patterns_of_nine_by_nine() {
    let m = nine_by_nine();
    let w = detect_block_pattern(&m, 3, BUDGET)
        .unwrap()
        .expect("3-block exists");
    assert!(w.is_valid_for(&m));
    assert_eq!(w.rows.len(), 3);
    let listed = edmc_core::compress::BlockPatternWitness {
        rows: vec![2, 7, 8],
        cols: vec![0, 4, 6],
    };
    assert!(listed.is_valid_for(&m));
    // a 4-block exists as well: rows {1,2,3,8} against columns {4,5,7,9}
    let rows_1238 = edmc_core::compress::BlockPatternWitness {
        rows: vec![0, 1, 2, 7],
        cols: vec![3, 4, 6, 8],
    };
    assert!(rows_1238.is_valid_for(&m));
    let four = detect_block_pattern(&m, 4, BUDGET)
        .unwrap()
        .expect("4-block exists");
    assert!(four.is_valid_for(&m));
    assert_eq!(detect_block_pattern(&m, 5, BUDGET).unwrap(), None);
}

#[test]
fn full_matrices_exclude_one_blocks() {
    let m = PartialMatrix::from_points(&planar(6, 3));
    assert_eq!(detect_block_pattern(&m, 1, BUDGET).unwrap(), None);
}

#[test]
fn nine_vertex_chain_graph() {
    let m = nine_vertex_chain();
    let g = m.graph();
    let mut cliques = g.maximal_cliques();
    cliques.sort();
    let want: Vec<Vec<usize>> = vec![
        vec![0, 1, 2, 3],
        vec![2, 3, 4, 5, 6],
        vec![4, 6, 7],
        vec![5, 8],
        vec![7, 8],
    ];
    assert_eq!(cliques, want);
    // 5-8-9-6 is a hole
    let Chordality::NotChordal(cycle) = is_chordal(&g) else {
        panic!("expected a hole")
    };
    let mut c = cycle.clone();
    c.sort_unstable();
    assert_eq!(c, vec![4, 5, 7, 8]);

    let first7: Vec<usize> = (0..7).collect();
    let sub = m.principal(&first7);
    let tol = Tolerances::default();
    let Chordality::Chordal(peo) = is_chordal(&sub.graph()) else {
        panic!()
    };
    assert_eq!(
        maximal_cliques_chordal(&sub.graph(), &peo).unwrap(),
        vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5, 6]]
    );
    assert_eq!(chordal_edm_check(&sub, 4, &tol).unwrap(), CliqueCheck::Yes);
    assert_eq!(
        chordal_edm_check(&sub, 3, &tol).unwrap(),
        CliqueCheck::No {
            clique: vec![2, 3, 4, 5, 6]
        }
    );
    let Completion::Complete { matrix, .. } = chordal_complete(&sub, 4, &tol).unwrap() else {
        panic!()
    };
    assert!(realize(&matrix, 4, &tol).is_ok());
}

#[test]
fn single_clique_completion_is_identity() {
    let m = PartialMatrix::from_points(&planar(5, 9));
    let Completion::Complete { matrix, .. } =
        chordal_complete(&m, 2, &Tolerances::default()).unwrap()
    else {
        panic!()
    };
    assert_eq!(matrix, m);
}

#[test]
fn extend_basis_keeps_seed_first() {
    let tol = Tolerances::default();
    let m = unit_simplex(4);
    let b = extend_basis(&m, &[2], &[0, 1, 2, 3], &tol).unwrap();
    assert_eq!(b.indices, vec![2, 0, 1, 3]);
    let tri = PartialMatrix::from_points(&[
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 1.0],
    ]);
    let b = extend_basis(&tri, &[1], &[0, 1, 2, 3], &tol).unwrap();
    assert_eq!(b.indices, vec![1, 0, 2]);
}

#[test]
fn ktt_examples() {
    let tol = Tolerances::default();
    let out = compress_ktt(&unit_simplex(3), 2, 2, &tol).unwrap();
    assert!(matches!(
        out,
        CompressOutcome::Solved {
            verdict: Verdict::Yes(_),
            ..
        }
    ));

    let mut m = PartialMatrix::from_points(&planar(40, 1));
    for i in 0..20 {
        m.unset(2 * i, 2 * i + 1);
    }
    let out = compress_ktt(&m, 2, 2, &tol).unwrap();
    match out {
        CompressOutcome::Reduced {
            instance, removed, ..
        } => {
            assert_eq!(instance, m);
            assert!(removed.is_empty());
        }
        other => panic!("{:?}", other),
    }

    // a non-embeddable clique is reported with a genuine certificate
    let mut big = PartialMatrix::from_points(&planar(8, 5));
    for i in 0..5 {
        for j in (i + 1)..5 {
            big.set(i, j, 1.0);
        }
    }
    let x: Vec<usize> = (0..8).collect();
    match find_irrelevant_in_clique(&big, &x, 2, &Schedule::Ktt { t: 2 }, &tol).unwrap() {
        Irrelevant::Infeasible(c) => assert!(realize(&big.principal(&c), 2, &tol).is_err()),
        other => panic!("{:?}", other),
    }
    match compress_ktt(&big, 2, 1, &tol).unwrap() {
        CompressOutcome::Solved {
            verdict: Verdict::No { clique },
            ..
        } => assert!(realize(&big.principal(&clique), 2, &tol).is_err()),
        other => panic!("{:?}", other),
    }
}

#[test]
fn maxdeg_examples() {
    let tol = Tolerances::default();
    let full = PartialMatrix::from_points(&planar(15, 2));
    assert!(matches!(
        compress_maxdeg(&full, 2, 1, &tol).unwrap(),
        CompressOutcome::Solved {
            verdict: Verdict::Yes(_),
            ..
        }
    ));
    let mut small = PartialMatrix::from_points(&planar(12, 2));
    small.unset(0, 1);
    match compress_maxdeg(&small, 2, 1, &tol).unwrap() {
        CompressOutcome::Reduced { instance, .. } => assert_eq!(instance, small),
        other => panic!("{:?}", other),
    }
    let mut m = PartialMatrix::from_points(&planar(40, 4));
    for i in 0..20 {
        m.unset(i, 39 - i);
    }
    match compress_maxdeg(&m, 2, 1, &tol).unwrap() {
        CompressOutcome::Reduced {
            instance,
            kept,
            removed,
        } => {
            assert!(instance.order() <= 12);
            assert_eq!(kept.len() + removed.len(), 40);
            assert_eq!(instance, m.principal(&kept));
        }
        other => panic!("{:?}", other),
    }
    m.unset(0, 5);
    assert!(compress_maxdeg(&m, 2, 1, &tol).is_err());
}

#[test]
fn cover_examples() {
    let tol = Tolerances::default();
    let pts = planar(30, 8);
    let mut m = PartialMatrix::unspecified(30);
    let full = PartialMatrix::from_points(&pts);
    let halves: [Vec<usize>; 2] = [(0..15).collect(), (15..30).collect()];
    for h in &halves {
        for &i in h {
            for &j in h {
                if i < j {
                    m.set(i, j, full.get(i, j).unwrap());
                }
            }
        }
    }
    let cover = CliqueCover::new(halves.to_vec());
    match compress_cliquecover(&m, 2, &cover, &tol).unwrap() {
        CompressOutcome::Reduced { instance, .. } => assert!(instance.order() <= 12),
        other => panic!("{:?}", other),
    }

    let mut bad = m.clone();
    for i in 0..4 {
        for j in (i + 1)..4 {
            bad.set(i, j, 1.0);
        }
    }
    let cover = CliqueCover::new(vec![
        (0..4).collect(),
        (0..15).collect(),
        (15..30).collect(),
    ]);
    match compress_cliquecover(&bad, 2, &cover, &tol) {
        Ok(CompressOutcome::Solved {
            verdict: Verdict::No { clique },
            ..
        }) => assert!(realize(&bad.principal(&clique), 2, &tol).is_err()),
        other => panic!("{:?}", other),
    }

    let small = unit_simplex(3);
    let mut s = small.clone();
    s.unset(0, 1);
    let cover = CliqueCover::new(vec![vec![0, 2], vec![1, 2]]);
    match compress_cliquecover(&s, 2, &cover, &tol).unwrap() {
        CompressOutcome::Reduced { instance, .. } => assert_eq!(instance, s),
        other => panic!("{:?}", other),
    }
    let invalid = CliqueCover::new(vec![vec![0, 2]]);
    assert!(compress_cliquecover(&s, 2, &invalid, &tol).is_err());
}

#[test]
fn clique_cover_search_examples() {
    let tri = UnderlyingGraph::complete(3);
    assert_eq!(
        edge_clique_cover_search(&tri, 3, BUDGET)
            .unwrap()
            .unwrap()
            .cliques,
        vec![vec![0, 1, 2]]
    );
    let two = UnderlyingGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
    assert_eq!(
        edge_clique_cover_search(&two, 3, BUDGET)
            .unwrap()
            .unwrap()
            .len(),
        2
    );
    let c5 = UnderlyingGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    assert_eq!(
        edge_clique_cover_search(&c5, 5, BUDGET)
            .unwrap()
            .unwrap()
            .len(),
        5
    );
    assert_eq!(edge_clique_cover_search(&c5, 4, BUDGET).unwrap(), None);
}

#[test]
fn augmented_cm_examples() {
    let mut m = PartialMatrix::unspecified(4);
    let vars = Indeterminates::new(&[(0, 1)], false);
    let p = build_augmented_cm(&m, &[0, 1], &vars).unwrap();
    let mut two_z = edmc_core::poly::Polynomial::variable(vars.id(0, 1).unwrap());
    two_z = two_z.scale(2.0);
    assert_eq!(p, two_z);

    let full = PartialMatrix::from_points(&planar(4, 6));
    let none = Indeterminates::new(&[], false);
    let c = build_augmented_cm(&full, &[0, 1, 2], &none).unwrap();
    let direct = edmc_core::embed::cm_determinant(&full, &[0, 1, 2]).unwrap();
    let got = c.as_constant().unwrap();
    assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0));

    m = full.clone();
    m.unset(0, 3);
    let one = Indeterminates::new(&[(0, 3)], false);
    let p = build_augmented_cm(&m, &[0, 1, 2, 3], &one).unwrap();
    assert!(p.degree() <= 2);
    assert!(build_augmented_cm(&m, &[0, 3], &none).is_err());
}

#[test]
fn basis_guess_examples() {
    let tol = Tolerances::default();
    let pts = planar(5, 11);
    let full = PartialMatrix::from_points(&pts);
    let p = build_basis_guess_formula(&full, &[0, 1, 2], 2, false).unwrap();
    assert!(p.vars.is_empty());
    assert!(p.formula.eval(&[], p.scale, tol.atom));

    let mut line_pts = pts.clone();
    line_pts[2] = vec![(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
    let dep = PartialMatrix::from_points(&line_pts);
    let p = build_basis_guess_formula(&dep, &[0, 1, 2], 2, false).unwrap();
    assert!(!p.formula.eval(&[], p.scale, tol.atom));

    let path = sparse(4, &[(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
    let p = build_basis_guess_formula(&path, &[0, 1], 1, false).unwrap();
    assert_eq!(p.vars.len(), 3);
    assert_eq!(p.formula.atom_count(), 1 + 2 + 1 + 3);
}

#[test]
fn fillin_formula_examples() {
    let tol = Tolerances::default();
    let mut c4 = PartialMatrix::unspecified(4);
    for i in 0..4 {
        c4.set(i, (i + 1) % 4, 1.0);
    }
    let fill = FillIn {
        edges: vec![(0, 2)],
    };
    let p = build_fillin_formula(&c4, &fill, 1, false, &tol).unwrap();
    assert_eq!(p.formula.variables().len(), 1);
    let Formula::And(psis) = &p.formula else {
        panic!()
    };
    assert_eq!(psis.len(), 2);
    assert!(psis.iter().all(|f| matches!(f, Formula::Or(_))));

    let path = sparse(3, &[(1, 2, 1.0), (2, 3, 1.0)]);
    let empty = FillIn { edges: vec![] };
    let p = build_fillin_formula(&path, &empty, 1, false, &tol).unwrap();
    assert!(p.formula.variables().is_empty());
    assert!(p.formula.eval(&[], p.scale, tol.atom));

    // a clique whose fixed part already has a basis of size 3 cannot live on a line
    let tri = unit_simplex(3);
    let p = build_fillin_formula(&tri, &empty, 1, false, &tol).unwrap();
    assert_eq!(p.formula, Formula::Const(false));
}

#[test]
fn backend_examples() {
    let opts = BackendOptions::default();
    let t = edmc_core::poly::Problem {
        formula: Formula::Const(true),
        vars: Indeterminates::new(&[], false),
        scale: 1.0,
    };
    assert_eq!(decide_exists(&t, &opts), Decision::Sat(vec![]));
    let f = edmc_core::poly::Problem {
        formula: Formula::Const(false),
        ..t
    };
    assert_eq!(decide_exists(&f, &opts), Decision::Unsat);
}

#[test]
fn solver_examples() {
    let opts = SolveOptions::default();
    let tri = unit_simplex(3);
    assert!(matches!(
        solve_exact(&tri, 1, &opts).unwrap(),
        SolveOutcome::No(_)
    ));
    let path = sparse(
        4,
        &[
            (1, 2, 1.0),
            (2, 3, 1.25),
            (3, 4, 1.0),
            (1, 3, 1.25),
            (2, 4, 1.25),
        ],
    );
    let tol = Tolerances::default();
    let Completion::Complete { matrix, .. } = chordal_complete(&path, 2, &tol).unwrap() else {
        panic!()
    };
    match solve_fillin(&path, 2, 2, &opts).unwrap() {
        SolveOutcome::Yes { completion, .. } => assert_eq!(completion, matrix),
        other => panic!("{:?}", other),
    }
    let simplex = unit_simplex(5);
    assert!(realize_on(&simplex, &[0, 1, 2, 3, 4], 3, &tol).is_err());
}
