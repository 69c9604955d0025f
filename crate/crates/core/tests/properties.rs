use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treegraded::pieces::Letter;
use treegraded::sample::Sampler;
use treegraded::stretch::StretchContext;
use treegraded::structure::PieceRef;
use treegraded::verifier::{verify, GraphSpec, MetricGraph, PieceCover};
use treegraded::*;

fn mixed() -> Family {
    Family::new([Piece::tree(0), Piece::line(1), Piece::l1(2, 3)]).unwrap()
}

fn halves() -> impl Strategy<Value = Scalar> {
    (1i64..=6).prop_map(|n| Scalar::ratio(n, 2))
}

fn coord() -> impl Strategy<Value = Scalar> {
    (-8i64..=8).prop_map(|n| Scalar::ratio(n, 4))
}

fn letters() -> impl Strategy<Value = Vec<(i64, Scalar)>> {
    prop::collection::vec(
        ((1i64..=3), any::<bool>(), halves()).prop_map(|(b, neg, l)| (if neg { -b } else { b }, l)),
        0..8,
    )
}

fn l1_point() -> impl Strategy<Value = PiecePoint> {
    prop::collection::vec(coord(), 3).prop_map(PiecePoint::coords)
}

fn word_point() -> impl Strategy<Value = PiecePoint> {
    letters().prop_map(|ls| PiecePoint::word(ls).unwrap())
}

/// Reference reduction: split every letter into half-unit atoms, cancel a
/// randomly chosen adjacent inverse pair until none is left, then merge runs.
fn reduce_by_atoms(letters: &[(i64, Scalar)], rng: &mut ChaCha8Rng) -> Vec<(i64, Scalar)> {
    let mut atoms: Vec<i64> = Vec::new();
    for (b, len) in letters {
        let halves = (len * Scalar::from_int(2)).to_string();
        let k: usize = halves.trim_end_matches("/1").parse().unwrap();
        atoms.extend(std::iter::repeat_n(*b, k));
    }
    loop {
        let spots: Vec<usize> = (0..atoms.len().saturating_sub(1))
            .filter(|&i| atoms[i] == -atoms[i + 1])
            .collect();
        if spots.is_empty() {
            break;
        }
        let i = spots[rng.gen_range(0..spots.len())];
        atoms.drain(i..i + 2);
    }
    let mut out: Vec<(i64, Scalar)> = Vec::new();
    for b in atoms {
        match out.last_mut() {
            Some((last, len)) if *last == b => *len += Scalar::ratio(1, 2),
            _ => out.push((b, Scalar::ratio(1, 2))),
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn word_reduction_is_order_independent(ls in letters(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let expected = reduce_by_atoms(&ls, &mut rng);
        let word = TreeWord::reduce(ls.iter().map(|(b, l)| Letter::new(*b, l.clone()))).unwrap();
        let got: Vec<(i64, Scalar)> = word.letters().iter().map(|l| (l.branch, l.len.clone())).collect();
        prop_assert_eq!(got, expected);
        prop_assert!(word.is_reduced());
    }

    #[test]
    fn tree_word_group_laws(a in letters(), b in letters()) {
        let x = TreeWord::reduce(a.into_iter().map(|(b, l)| Letter::new(b, l))).unwrap();
        let y = TreeWord::reduce(b.into_iter().map(|(b, l)| Letter::new(b, l))).unwrap();
        prop_assert!(x.mul(&x.inverse()).is_root());
        prop_assert_eq!(x.mul(&y).inverse(), y.inverse().mul(&x.inverse()));
        prop_assert!(x.mul(&y).length() <= x.length() + y.length());
    }

    #[test]
    fn tree_piece_geodesics_and_recentering(a in word_point(), b in word_point(), c in word_point(), k in 0i64..=12) {
        let t = Piece::tree(0);
        let d = t.distance(&a, &b).unwrap();
        let s = &d * Scalar::ratio(k, 12);
        let m = t.chosen_geodesic(&a, &b, &s).unwrap();
        prop_assert_eq!(t.distance(&a, &m).unwrap(), s.clone());
        prop_assert_eq!(t.distance(&m, &b).unwrap(), &d - &s);
        prop_assert_eq!(t.distance(&t.recenter(&c, &a).unwrap(), &t.recenter(&c, &b).unwrap()).unwrap(), d);
        prop_assert!(t.is_basepoint(&t.recenter(&a, &a).unwrap()));
        prop_assert!(t.distance(&a, &c).unwrap() <= t.distance(&a, &b).unwrap() + t.distance(&b, &c).unwrap());
    }

    #[test]
    fn l1_piece_geodesics_and_recentering(a in l1_point(), b in l1_point(), c in l1_point(), k in 0i64..=12) {
        let p = Piece::l1(0, 3);
        let d = p.distance(&a, &b).unwrap();
        let s = &d * Scalar::ratio(k, 12);
        let m = p.chosen_geodesic(&a, &b, &s).unwrap();
        prop_assert_eq!(p.distance(&a, &m).unwrap(), s.clone());
        prop_assert_eq!(p.distance(&m, &b).unwrap(), &d - &s);
        prop_assert_eq!(p.distance(&p.recenter(&c, &a).unwrap(), &p.recenter(&c, &b).unwrap()).unwrap(), d);
        prop_assert!(p.is_basepoint(&p.recenter(&b, &b).unwrap()));
    }

    #[test]
    fn metric_axioms_on_sampled_points(seed in any::<u64>()) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let f = s.point();
        let g = s.near(&f);
        let h = s.point();
        let dfg = dist(&fam, &f, &g).unwrap();
        prop_assert_eq!(&dfg, &dist(&fam, &g, &f).unwrap());
        prop_assert_eq!(dfg.is_zero(), f == g);
        prop_assert!(dist(&fam, &f, &h).unwrap() <= &dfg + &dist(&fam, &g, &h).unwrap());
        if separation(&f, &g).is_same_piece() {
            prop_assert_eq!(dist_rewritten(&fam, &f, &g).unwrap(), dfg);
        }
    }

    #[test]
    fn explicit_geodesic_is_isometric(seed in any::<u64>(), i in 0i64..=8, j in 0i64..=8) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let f = s.point();
        let g = s.near(&f);
        let geo = ExplicitGeodesic::new(&fam, &f, &g).unwrap();
        let l = geo.length().clone();
        let (a, b) = (&l * Scalar::ratio(i.min(j), 8), &l * Scalar::ratio(i.max(j), 8));
        let d = dist(&fam, &geo.eval(&a).unwrap(), &geo.eval(&b).unwrap()).unwrap();
        prop_assert_eq!(d, &b - &a);
    }

    #[test]
    fn reverse_is_an_involution(seed in any::<u64>()) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let g = s.pgeodesic(5);
        let r = g.reverse(&fam).unwrap();
        prop_assert_eq!(r.length(), g.length());
        prop_assert_eq!(r.reverse(&fam).unwrap(), g);
    }

    #[test]
    fn initial_pattern_is_an_equivalence(seed in any::<u64>()) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let a = s.pgeodesic(3);
        // Same first piece, fresh first value, same tail.
        let variant = |g: &PGeodesic, s: &mut Sampler| {
            let mut out = vec![s.segment_in(g.steps()[0].piece, 0).step()];
            out.extend(g.steps()[1..].iter().cloned());
            PGeodesic::new(&fam, out).unwrap()
        };
        let b = variant(&a, &mut s);
        let c = variant(&b, &mut s);
        prop_assert!(a.same_initial_pattern(&a));
        prop_assert_eq!(a.same_initial_pattern(&b), b.same_initial_pattern(&a));
        if a.same_initial_pattern(&b) && b.same_initial_pattern(&c) {
            prop_assert!(a.same_initial_pattern(&c));
        }
        let d = s.pgeodesic(3);
        prop_assert_eq!(a.same_initial_pattern(&d), d.same_initial_pattern(&a));
    }

    #[test]
    fn stretch_preserves_patterns_and_bounds(seed in any::<u64>(), ln in prop::collection::vec(1i64..=4, 3)) {
        let fam = mixed();
        let maps = fam.ids().zip(&ln).map(|(id, &n)| BilipschitzMap::scale(id, id, Scalar::ratio(n, 2))).collect();
        let ctx = StretchContext::new(fam.clone(), fam.clone(), maps).unwrap();
        let k = ctx.k().clone();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let g = s.pgeodesic(4);
        let h = s.pgeodesic(4);
        if g.same_initial_pattern(&h) {
            prop_assert!(ctx.psi(&g).unwrap().same_initial_pattern(&ctx.psi(&h).unwrap()));
        }
        let f = s.point();
        let e = s.near(&f);
        let d = dist(&fam, &f, &e).unwrap();
        let dp = dist(&fam, &ctx.psi_point(&f).unwrap(), &ctx.psi_point(&e).unwrap()).unwrap();
        prop_assert!(&d / &k <= dp && dp <= &k * &d);
    }

    #[test]
    fn json_round_trips(seed in any::<u64>()) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Finite(5), seed);
        let f = s.point();
        let text = to_canonical_json(&f);
        let back: UPoint = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(to_canonical_json(&back), text);
        let g = s.pgeodesic(4);
        let back: PGeodesic = serde_json::from_str(&to_canonical_json(&g)).unwrap();
        prop_assert_eq!(back, g);
        let p = s.piece_ref_near(&f);
        let back: PieceRef = serde_json::from_str(&to_canonical_json(&p)).unwrap();
        prop_assert_eq!(back, p);
        let fam_back: Family = serde_json::from_str(&to_canonical_json(&fam)).unwrap();
        prop_assert_eq!(to_canonical_json(&fam_back), to_canonical_json(&fam));
    }

    #[test]
    fn chart_round_trip(seed in any::<u64>()) {
        let fam = mixed();
        let mut s = Sampler::new(&fam, Capacity::Infinite, seed);
        let r = s.point();
        let p = s.piece_ref_near(&r);
        let x = s.piece_point(p.piece);
        let m = p.embed(&fam, &x).unwrap();
        prop_assert!(p.member(&m));
        prop_assert_eq!(p.coords(&fam, &m).unwrap(), x.clone());
        prop_assert_eq!(p.embed(&fam, &p.coords(&fam, &m).unwrap()).unwrap(), m.clone());
        prop_assert_eq!(dist(&fam, &p.base, &m).unwrap(), fam.piece(p.piece).unwrap().norm(&x).unwrap());
    }
}

/// A random connected graph on `n` vertices: a spanning tree plus a few
/// extra edges, with weights in {1, 2}.
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, Scalar)> {
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, Scalar::from_int(rng.gen_range(1..=2))));
    }
    for _ in 0..rng.gen_range(0..=n / 2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if a != b && seen.insert((a, b)) {
            edges.push((a, b, Scalar::from_int(rng.gen_range(1..=2))));
        }
    }
    edges
}

/// Pieces: every edge, or the blocks of a random partition into chunks.
fn random_cover(
    rng: &mut ChaCha8Rng,
    n: usize,
    edges: &[(usize, usize, Scalar)],
) -> Vec<Vec<usize>> {
    if rng.gen_bool(0.5) {
        let mut pieces: Vec<Vec<usize>> = edges.iter().map(|(a, b, _)| vec![*a, *b]).collect();
        pieces.extend((0..n).map(|v| vec![v]));
        pieces
    } else {
        let mut pieces = Vec::new();
        let mut v = 0;
        while v < n {
            let k = rng.gen_range(1..=3).min(n - v);
            let mut p: Vec<usize> = (v..v + k).collect();
            if v > 0 {
                p.push(v - 1);
            }
            pieces.push(p);
            v += k;
        }
        pieces
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accepted_covers_are_convex(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_graph(&mut rng, n);
        let pieces = random_cover(&mut rng, n, &edges);
        let graph = MetricGraph::new(n, &edges).unwrap();
        let cover = PieceCover::new(n, &pieces).unwrap();
        let verdict = verify(&graph, &cover, 10_000).unwrap();
        prop_assert_eq!(verdict.accepted, verdict.violations.is_empty());
        if verdict.accepted {
            for p in cover.pieces() {
                for &a in p {
                    for &b in p {
                        for path in graph.all_geodesics(a, b, 10_000).unwrap() {
                            prop_assert!(path.iter().all(|v| p.contains(v)));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for p in graph.all_geodesics(a, b, 10_000).unwrap() {
                    prop_assert_eq!(graph.path_weight(&p).unwrap(), graph.d(a, b).clone());
                }
            }
        }
    }

    #[test]
    fn removing_a_witness_removes_it(seed in any::<u64>(), n in 3usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_graph(&mut rng, n);
        let mut pieces = random_cover(&mut rng, n, &edges);
        let extra: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !extra.is_empty() {
            pieces.push(extra);
        }
        let spec = GraphSpec { n, edges, pieces };
        let (graph, cover) = spec.build().unwrap();
        let verdict = verify(&graph, &cover, 10_000).unwrap();
        for w in verdict.violations.iter().filter(|v| v.axiom == "T1") {
            let mut pieces = spec.pieces.clone();
            let (j, v) = (w.pieces[1], w.vertices[0]);
            pieces[j].retain(|&x| x != v);
            pieces.push(vec![v]);
            let (g2, c2) = GraphSpec { pieces, ..spec.clone() }.build().unwrap();
            let again = verify(&g2, &c2, 10_000).unwrap();
            prop_assert!(!again.violations.contains(w));
        }
        for w in verdict.violations.iter().filter(|v| v.axiom == "convexity") {
            let mut pieces = spec.pieces.clone();
            pieces[w.pieces[0]].push(w.vertices[2]);
            let (g2, c2) = GraphSpec { pieces, ..spec.clone() }.build().unwrap();
            let again = verify(&g2, &c2, 10_000).unwrap();
            prop_assert!(!again.violations.contains(w));
        }
    }
}
