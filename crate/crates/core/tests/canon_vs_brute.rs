use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use recon_core::genx::generate_all;
use recon_core::{brute_canonical, canonical, ClassSpec, LabelledGraph};

fn relabel(g: &LabelledGraph, rng: &mut StdRng) -> LabelledGraph {
    let mut p: Vec<u8> = (0..g.order() as u8).collect();
    p.shuffle(rng);
    g.permute(&p)
}

fn random_graph(n: usize, directed: bool, density: f64, rng: &mut StdRng) -> LabelledGraph {
    let mut g = LabelledGraph::empty(n, directed).unwrap();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) && rng.random_bool(density) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

/// Fast and brute canonical forms agree on isomorphism and group order for
/// every class representative, under random relabellings.
fn check_class(n: usize, spec: ClassSpec, rng: &mut StdRng) {
    let reps = generate_all(n, spec).unwrap();
    for g in &reps {
        let h = relabel(g, rng);
        let (cg, ch) = (canonical(g), canonical(&h));
        let (bg, bh) = (brute_canonical(g).unwrap(), brute_canonical(&h).unwrap());
        assert_eq!(cg.canon_code, ch.canon_code, "{g:?}");
        assert_eq!(bg.canon_code, bh.canon_code, "{g:?}");
        assert_eq!(cg.group_order(), bg.group_order(), "{g:?}");
        let mut fo = cg.vertex_orbits.clone();
        let mut bo = bg.vertex_orbits.clone();
        fo.sort();
        bo.sort();
        assert_eq!(fo, bo, "{g:?}");
    }
    let mut fast: Vec<_> = reps.iter().map(|g| canonical(g).canon_code).collect();
    let mut slow: Vec<_> = reps.iter().map(|g| brute_canonical(g).unwrap().canon_code).collect();
    fast.sort_unstable();
    fast.dedup();
    slow.sort_unstable();
    slow.dedup();
    assert_eq!(fast.len(), reps.len());
    assert_eq!(slow.len(), reps.len());
}

#[test]
fn graphs_up_to_six() {
    let mut rng = StdRng::seed_from_u64(1);
    for n in 1..=6 {
        check_class(n, ClassSpec::All, &mut rng);
    }
}

#[test]
fn digraphs_up_to_four() {
    let mut rng = StdRng::seed_from_u64(2);
    for n in 1..=4 {
        check_class(n, ClassSpec::Digraph, &mut rng);
    }
}

#[test]
fn tournaments_up_to_seven() {
    let mut rng = StdRng::seed_from_u64(3);
    for n in 1..=7 {
        check_class(n, ClassSpec::Tournament, &mut rng);
    }
}

/// Random pairs on 8 vertices: equal fast codes exactly when brute codes
/// are equal. Pairs are built as relabellings or single-edge edits so both
/// outcomes occur.
#[test]
fn random_pairs_order_eight() {
    let mut rng = StdRng::seed_from_u64(4);
    for round in 0..400 {
        let directed = round % 2 == 1;
        let g = random_graph(8, directed, 0.4, &mut rng);
        let h = if round % 3 == 0 {
            let (i, j) = (rng.random_range(0..8), rng.random_range(0..8));
            let mut rows: Vec<u16> = (0..8).map(|v| g.row(v)).collect();
            if i != j {
                rows[i] ^= 1 << j;
                if !directed {
                    rows[j] ^= 1 << i;
                }
            }
            relabel(&LabelledGraph::from_rows(8, directed, &rows).unwrap(), &mut rng)
        } else {
            relabel(&g, &mut rng)
        };
        let fast = canonical(&g).canon_code == canonical(&h).canon_code;
        let slow = brute_canonical(&g).unwrap().canon_code == brute_canonical(&h).unwrap().canon_code;
        assert_eq!(fast, slow, "{g:?} {h:?}");
    }
}

/// Highly symmetric graphs stress automorphism pruning.
#[test]
fn symmetric_families() {
    let mut rng = StdRng::seed_from_u64(5);
    let cycle = |n: usize| LabelledGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap();
    let complete = |n: usize| {
        let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        LabelledGraph::from_edges(n, &e).unwrap()
    };
    let petersen = LabelledGraph::from_edges(
        10,
        &[
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
        ],
    )
    .unwrap();
    let cube = LabelledGraph::from_edges(
        8,
        &(0..8usize)
            .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
            .filter(|(a, b)| a < b)
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let cases = [
        (cycle(8), 16),
        (cycle(12), 24),
        (complete(7), 5040),
        (LabelledGraph::empty(9, false).unwrap(), 362880),
        (petersen, 120),
        (cube, 48),
    ];
    for (g, order) in cases {
        let c = canonical(&g);
        assert_eq!(c.group_order(), order, "{g:?}");
        for _ in 0..5 {
            assert_eq!(canonical(&relabel(&g, &mut rng)).canon_code, c.canon_code);
        }
        if g.order() <= 8 {
            assert_eq!(brute_canonical(&g).unwrap().group_order(), order);
        }
    }
}
