use dyadic_walsh::dyadic::{contract, contract_eq, DyadicCube, DyadicElement, DyadicPoint, Tail};
use dyadic_walsh::harness::linalg::{normalize, rref};
use dyadic_walsh::harness::{lemma1_sides, lemma4_check, lemma4_instance, uset_falsify, Constraints};
use dyadic_walsh::partition::Partition;
use dyadic_walsh::quasimeasure::Quasimeasure;
use dyadic_walsh::rational::{abs, int, pow2};
use dyadic_walsh::sets::{coset, membership, sample_member, IndexRule, Membership, SetSpec};
use dyadic_walsh::walsh::{walsh_eval_multi, MultiIndex};
use dyadic_walsh::{Error, SeriesSpec};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element(rng: &mut ChaCha8Rng, rank: u32) -> DyadicElement {
    let tail = if rng.gen_bool(0.5) { Tail::Ones } else { Tail::Zeros };
    DyadicElement::random(rng, rank, tail)
}

fn point(rng: &mut ChaCha8Rng, d: usize, rank: u32) -> DyadicPoint {
    DyadicPoint::new((0..d).map(|_| element(rng, rank)).collect()).unwrap()
}

fn planar_set(which: u8, rng: &mut ChaCha8Rng) -> SetSpec {
    let full = Partition::full(2);
    let base = match which % 8 {
        0 => SetSpec::diagonal(full),
        1 => SetSpec::anti_diagonal(),
        2 => SetSpec::shifted_diagonal(full, vec![rng.gen_range(0..3), 0]).unwrap(),
        3 => SetSpec::coordinate_plane(Partition::new(2, &[rng.gen_range(0..2)]).unwrap()),
        4 => SetSpec::dirichlet(2, IndexRule::ShiftedPowers { q: rng.gen_range(0..3) }, 4).unwrap(),
        5 => SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 5).unwrap(),
        6 => SetSpec::cross(&element(rng, 3), &element(rng, 3)),
        _ => SetSpec::PowerDirichletProduct {
            partition: full,
            ks: vec![0, 2],
        },
    };
    if rng.gen_bool(0.3) {
        coset(&base, &point(rng, 2, 4)).unwrap()
    } else {
        base
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws(seed in any::<u64>(), rank in 0u32..140) {
        let mut r = rng(seed);
        let (g, h, u) = (element(&mut r, rank), element(&mut r, rank), element(&mut r, rank));
        prop_assert_eq!(g.add(&h), h.add(&g));
        prop_assert_eq!(g.add(&h).add(&u), g.add(&h.add(&u)));
        prop_assert_eq!(g.add(&g), DyadicElement::zero(rank));
    }

    #[test]
    fn unit_interval_map_respects_intervals(seed in any::<u64>(), k in 0u32..=6, extra in 0u32..10) {
        let mut r = rng(seed);
        let g = element(&mut r, k + extra);
        let m = g.interval_index(k) as i64;
        let x = g.to_unit_interval();
        prop_assert!(x >= int(m) * pow2(-(k as i64)));
        prop_assert!(x <= int(m + 1) * pow2(-(k as i64)));
    }

    #[test]
    fn contraction_shift_law(seed in any::<u64>(), q in 0u32..8, gap in 0u32..8) {
        let mut r = rng(seed);
        let p = q + gap;
        let h = element(&mut r, 32);
        let g = if r.gen_bool(0.5) {
            let low: Vec<u8> = (0..gap).map(|_| r.gen_range(0..2)).collect();
            contract(&h, gap, &low)
        } else {
            element(&mut r, 32)
        };
        prop_assert_eq!(contract_eq(&g, q, &h, p), contract_eq(&g, 0, &h, p - q));
        prop_assert_eq!(contract_eq(&g, q, &h, p), contract_eq(&h, p, &g, q));
    }

    #[test]
    fn contracted_elements_match(seed in any::<u64>(), gap in 0u32..8) {
        let mut r = rng(seed);
        let h = element(&mut r, 20);
        let low: Vec<u8> = (0..gap).map(|_| r.gen_range(0..2)).collect();
        prop_assert!(contract_eq(&contract(&h, gap, &low), 0, &h, gap));
    }

    #[test]
    fn cubes_nest(seed in any::<u64>(), d in 1usize..4, k in 0u32..10) {
        let mut r = rng(seed);
        let g = point(&mut r, d, 12);
        let (fine, coarse) = (g.cube_of(k + 1), g.cube_of(k));
        prop_assert!(coarse.contains(&fine));
        prop_assert!(fine.contains_point(&g));
        prop_assert_eq!(fine.parent(), Some(coarse));
    }

    #[test]
    fn walsh_characters(seed in any::<u64>(), d in 1usize..4) {
        let mut r = rng(seed);
        let n: Vec<u64> = (0..d).map(|_| r.gen()).collect();
        let n = MultiIndex::from_u64s(&n);
        let (g, h) = (point(&mut r, d, 70), point(&mut r, d, 70));
        let lhs = walsh_eval_multi(&n, &g).unwrap() * walsh_eval_multi(&n, &h).unwrap();
        prop_assert_eq!(lhs, walsh_eval_multi(&n, &g.add(&h).unwrap()).unwrap());
    }

    #[test]
    fn fast_quasimeasure_matches_naive(seed in any::<u64>(), d in 1usize..3, k in 0u32..=4) {
        let mut r = rng(seed);
        let s = SeriesSpec::random_sparse(&mut r, d, k, 12);
        let fast = Quasimeasure::from_series(&s, k).unwrap();
        prop_assert_eq!(&fast, &Quasimeasure::from_series_naive(&s, k).unwrap());
        prop_assert!(fast.check_additivity().is_ok());
    }

    #[test]
    fn localized_mass_meets_its_bound(seed in any::<u64>(), k0 in 0u32..2, extra in 0u32..3, free in 0usize..2) {
        let mut r = rng(seed);
        let rank = 4;
        let s = SeriesSpec::random_sparse(&mut r, 2, rank, 10);
        let tau = Quasimeasure::from_series(&s, rank).unwrap();
        let cube = DyadicCube::new(k0, vec![r.gen_range(0..1 << k0), r.gen_range(0..1 << k0)]).unwrap();
        let part = Partition::new(2, &[free]).unwrap();
        match tau.localize_mass(&cube, &part, k0 + extra) {
            Ok(loc) => prop_assert!(abs(&loc.value) >= loc.bound),
            Err(e) => prop_assert_eq!(e, Error::ZeroMass),
        }
    }

    #[test]
    fn membership_only_resolves(seed in any::<u64>(), which in any::<u8>(), rank in 0u32..8) {
        let mut r = rng(seed);
        let set = planar_set(which, &mut r);
        let g = point(&mut r, 2, 12);
        let coarse = membership(&set, &g, rank).unwrap();
        for finer in rank + 1..=12 {
            let m = membership(&set, &g, finer).unwrap();
            if coarse != Membership::Undetermined {
                prop_assert_eq!(m, coarse);
            }
        }
    }

    #[test]
    fn coset_law(seed in any::<u64>(), which in any::<u8>()) {
        let mut r = rng(seed);
        let set = planar_set(which, &mut r);
        let (g, x) = (point(&mut r, 2, 10), point(&mut r, 2, 10));
        let shifted = coset(&set, &x).unwrap();
        prop_assert_eq!(
            membership(&shifted, &g, 64).unwrap(),
            membership(&set, &g.add(&x).unwrap(), 64).unwrap()
        );
    }

    #[test]
    fn dirichlet_sets_are_subgroups(seed in any::<u64>(), q in 0u32..3, depth in 1usize..6) {
        let mut r = rng(seed);
        let set = SetSpec::dirichlet(2, IndexRule::ShiftedPowers { q }, depth).unwrap();
        let g = sample_member(&set, &mut r, 12).unwrap();
        let h = sample_member(&set, &mut r, 12).unwrap();
        prop_assert_eq!(membership(&set, &g.add(&h).unwrap(), 64).unwrap(), Membership::In);
        prop_assert_eq!(membership(&set, &DyadicPoint::zero(2, 1), 64).unwrap(), Membership::In);
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), which in any::<u8>(), d in 1usize..4) {
        let mut r = rng(seed);
        let set = planar_set(which, &mut r);
        prop_assert_eq!(SetSpec::from_json_str(&set.to_json_string()).unwrap(), set);
        let s = SeriesSpec::random_sparse(&mut r, d, 3, 7);
        prop_assert_eq!(SeriesSpec::from_json_str(&s.to_json_string()).unwrap(), s);
    }

    #[test]
    fn elimination_null_spaces(seed in any::<u64>(), rows in 0usize..8, cols in 1usize..8) {
        let mut r = rng(seed);
        let m: Vec<_> = (0..rows)
            .map(|_| normalize((0..cols).map(|c| (c, int(r.gen_range(-2..=2)))).collect()))
            .collect();
        let red = rref(m.clone(), cols);
        prop_assert_eq!(red.rank() + red.nullity(), cols);
        prop_assert!(red.rank() <= rows.min(cols));
        for v in red.null_basis(cols) {
            for row in &m {
                let dot: dyadic_walsh::Rational = row.iter().map(|(c, x)| x * &v[*c]).sum();
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn shifted_sum_identity(seed in any::<u64>(), d in 2usize..4, m1 in 1u64..24, r_off in 0u64..4) {
        let mut r = rng(seed);
        let r_off = r_off % (1 << m1.trailing_zeros());
        let m2 = m1 + r_off;
        let bound = 64 - (m2 + 1).leading_zeros();
        let s = SeriesSpec::random_sparse(&mut r, d, bound, 20);
        let g = DyadicPoint::random(&mut r, d, 7);
        let (lhs, rhs) = lemma1_sides(&s, &g, m1, m2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn walsh_integrals_on_dirichlet_supports(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let inst = lemma4_instance(&mut r, d, if d == 2 { 4 } else { 3 }).unwrap();
        let (integral, value, brute) = lemma4_check(&inst).unwrap();
        prop_assert_eq!(&integral, &value);
        prop_assert_eq!(integral, brute);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constraints_never_add_solutions(seed in any::<u64>(), which in any::<u8>(), rank in 1u32..4) {
        let mut r = rng(seed);
        let set = planar_set(which, &mut r);
        let mut chain = vec![Constraints { support: false, ..Constraints::default() }, Constraints::default()];
        for top in 0..rank {
            chain.push(Constraints { rademacher_up_to: Some(top), ..Constraints::default() });
        }
        let last = chain.last().unwrap().clone();
        chain.push(Constraints { walsh: vec![1], walsh_cube_rank: 1, ..last });
        let mut prev = usize::MAX;
        for c in &chain {
            let p = uset_falsify(&set, rank, c).unwrap();
            prop_assert!(p.dimension <= prev);
            prop_assert!(p.verify_basis().unwrap().is_empty());
            prev = p.dimension;
        }
    }
}
