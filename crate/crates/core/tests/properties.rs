use ndhermite::harness::multilinear_baseline;
use ndhermite::scalar::q;
use ndhermite::{
    build_basis, build_lambda, continuity_report, interpolate, leq_partial, shared_nodes, Axis, GridSpec, HermiteData,
    HermiteInterpolant, MultiIndex, Rational, SplineInterpolant, WindowAnchor, WindowBoundary,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-30..=30), rng.gen_range(1..=7))
}

fn axis(rng: &mut ChaCha8Rng, max_len: usize, max_nu: u32) -> Axis<Rational> {
    let len = rng.gen_range(1..=max_len);
    let mut c = q(rng.gen_range(-3..=3), 1);
    let coords = (0..len)
        .map(|_| {
            c = c.clone() + q(rng.gen_range(1..=4), rng.gen_range(1..=3));
            c.clone()
        })
        .collect();
    Axis::new(coords, (0..len).map(|_| rng.gen_range(1..=max_nu)).collect()).unwrap()
}

fn grid(seed: u64, max_len: usize, max_nu: u32) -> (ChaCha8Rng, GridSpec<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let g = GridSpec::new((0..n).map(|_| axis(&mut rng, max_len, max_nu)).collect()).unwrap();
    (rng, g)
}

fn data(rng: &mut ChaCha8Rng, g: &GridSpec<Rational>) -> HermiteData<Rational> {
    HermiteData::from_fn(g.clone(), |_, _| rational(rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interpolation_is_linear(seed in any::<u64>()) {
        let (mut rng, g) = grid(seed, 3, 2);
        let (t1, t2) = (data(&mut rng, &g), data(&mut rng, &g));
        let (a, b) = (rational(&mut rng), rational(&mut rng));
        let combo = HermiteData::from_fn(g.clone(), |idx, k| {
            a.clone() * t1.get(idx, k).unwrap() + b.clone() * t2.get(idx, k).unwrap()
        });
        let lhs = interpolate(&combo).expanded().clone();
        let rhs = interpolate(&t1).expanded().scale(&a).add(&interpolate(&t2).expanded().scale(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_and_series_agree(seed in any::<u64>()) {
        let (mut rng, g) = grid(seed, 3, 3);
        let basis = build_basis(&g);
        for idx in g.points() {
            let lam = build_lambda(&basis, &idx);
            prop_assert!(lam.is_lower_unitriangular());
            let t: Vec<Rational> = (0..lam.size()).map(|_| rational(&mut rng)).collect();
            prop_assert_eq!(lam.solve(&t), lam.neumann_solve(&t));
        }
    }

    #[test]
    fn basis_derivative_table(seed in any::<u64>()) {
        let (_, g) = grid(seed, 2, 3);
        let basis = build_basis(&g);
        let zero = q(0, 1);
        let one = q(1, 1);
        for b in g.points() {
            for m in g.derivative_box(&b).enumerate() {
                let h = basis.term(&b, &m).expand();
                for a in g.points() {
                    let at = g.coordinate(&a);
                    for k in g.derivative_box(&a).enumerate() {
                        let v = h.differentiate(&k).unwrap().eval(&at).unwrap();
                        if a != b || (k != m && !leq_partial(&m, &k).unwrap()) {
                            prop_assert_eq!(&v, &zero, "a={:?} b={:?} k={} m={}", a, b, k, m);
                        } else if k == m {
                            prop_assert_eq!(&v, &one);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn per_axis_degree_bound(seed in any::<u64>()) {
        let (mut rng, g) = grid(seed, 3, 3);
        let f = interpolate(&data(&mut rng, &g));
        for i in 0..g.n() {
            if let Some(d) = f.expanded().deg(i) {
                prop_assert!((d as usize) < g.axis(i).total_mult());
            }
        }
    }

    #[test]
    fn factored_json_roundtrip(seed in any::<u64>()) {
        let (mut rng, g) = grid(seed, 3, 2);
        let f = interpolate(&data(&mut rng, &g));
        let back = HermiteInterpolant::<Rational>::from_factored_json(&f.to_factored_json()).unwrap();
        prop_assert!(back == f);
        let text = data(&mut rng, &g).to_hgrid_json().to_string();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert!(HermiteData::<Rational>::from_hgrid_json(&parsed).is_ok());
    }

    #[test]
    fn exact_patches_agree_on_shared_hyperplanes(seed in any::<u64>(), w in 2usize..4, truncate in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=3);
        let g = GridSpec::new((0..n).map(|_| {
            let len = rng.gen_range(4..=5);
            let mut c = q(0, 1);
            let coords = (0..len).map(|_| { c = c.clone() + q(rng.gen_range(1..=3), 2); c.clone() }).collect();
            Axis::new(coords, (0..len).map(|_| rng.gen_range(1..=2)).collect()).unwrap()
        }).collect()).unwrap();
        let d = data(&mut rng, &g);
        let boundary = if truncate { WindowBoundary::Truncate } else { WindowBoundary::Clamp };
        let s = SplineInterpolant::new(d, vec![w; n]).unwrap().with_boundary(boundary);
        for axis in 0..n {
            for a in shared_nodes(&s, axis) {
                let r = continuity_report(&s, axis, a, 2, None, seed).unwrap();
                prop_assert!(r.max_mismatch.iter().all(|&m| m == 0.0), "{:?}", r);
            }
        }
    }

    #[test]
    fn linear_spline_is_multilinear(seed in any::<u64>(), u in prop::collection::vec(0.0f64..=1.0, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GridSpec::new((0..3).map(|_| {
            let len = rng.gen_range(2..=5);
            let mut c = rng.gen_range(-2.0..2.0);
            Axis::uniform((0..len).map(|_| { c += rng.gen_range(0.2..2.0); c }).collect(), 1).unwrap()
        }).collect()).unwrap();
        let d = HermiteData::from_fn(g.clone(), |_, _| rng.gen_range(-10.0..10.0));
        let x: Vec<f64> = u.iter().zip(g.hull()).map(|(t, (lo, hi))| lo + t * (hi - lo)).collect();
        let s = SplineInterpolant::new(d.clone(), vec![2, 2, 2]).unwrap();
        let diff = (s.value(&x).unwrap() - multilinear_baseline(&d, &x).unwrap()).abs();
        prop_assert!(diff < 1e-12, "{}", diff);
    }
}

#[test]
fn spline_results_do_not_depend_on_cache_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = GridSpec::new((0..3).map(|_| Axis::unit(7, 2).unwrap()).collect()).unwrap();
    let d = HermiteData::from_fn(g, |_, _| rng.gen_range(-1.0..1.0));
    let pts: Vec<Vec<f64>> = (0..300).map(|_| (0..3).map(|_| rng.gen_range(0.0..6.0)).collect()).collect();
    let k = MultiIndex::new(vec![1, 0, 1]);
    let cold = SplineInterpolant::new(d.clone(), vec![4, 3, 4]).unwrap().with_anchor(WindowAnchor::Floor);
    let a = cold.eval_batch(&pts, &k).unwrap();
    let warm = SplineInterpolant::new(d, vec![4, 3, 4]).unwrap().with_anchor(WindowAnchor::Floor);
    let mut rev = pts.clone();
    rev.reverse();
    warm.eval_batch_sequential(&rev, &k).unwrap();
    let b = warm.eval_batch_sequential(&pts, &k).unwrap();
    assert_eq!(a, b);
    assert_eq!(cold.cached_patches(), warm.cached_patches());
}

#[test]
fn batch_evaluation_matches_sequential_bitwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = GridSpec::new(vec![Axis::unit(5, 3).unwrap(), Axis::uniform(vec![-1.0, 0.5, 1.0, 3.0], 2).unwrap()]).unwrap();
    let f = interpolate(&HermiteData::from_fn(g, |_, _| rng.gen_range(-3.0..3.0)));
    let pts: Vec<Vec<f64>> = (0..500).map(|_| vec![rng.gen_range(0.0..4.0), rng.gen_range(-1.0..3.0)]).collect();
    for k in [MultiIndex::new(vec![0, 0]), MultiIndex::new(vec![2, 1])] {
        assert_eq!(f.eval_batch(&pts, &k).unwrap(), f.eval_batch_sequential(&pts, &k).unwrap());
    }
}
