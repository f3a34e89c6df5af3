use fixrank::grassmann::{echelon_of_module, lambda_of, to_echelon, FieldMatrix};
use fixrank::harness::RunConfig;
use fixrank::hecke::{
    containment_probability, gaussian_binomial, hecke_neighbor, rank_drop_check, window_check, FiniteSubspace,
    SubspaceSampler,
};
use fixrank::lattice::lll::{default_delta, lll_reduce};
use fixrank::lattice::{hermite_normal_form, hnf_basis, short_vectors, smith_normal_form, ZLattice};
use fixrank::matrix::{int_det, Matrix};
use fixrank::numfield::{builtin_field, PrimeIdealData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = Matrix<BigInt>> {
    prop::collection::vec(-range..=range, rows * cols).prop_map(move |v| {
        Matrix::from_rows(
            v.chunks(cols).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    })
}

fn full_rank(dim: usize) -> impl Strategy<Value = Matrix<BigInt>> {
    int_matrix(dim, dim, 5).prop_filter("singular", |m| !int_det(m).is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_is_unimodular_transform(m in int_matrix(3, 4, 9)) {
        let (h, u) = hermite_normal_form(&m);
        prop_assert_eq!(u.mul(&m), h.clone());
        prop_assert!(int_det(&u).abs().is_one());
        prop_assert_eq!(hnf_basis(&h), hnf_basis(&m));
        let mut last: Option<usize> = None;
        for i in 0..h.nrows() {
            let Some(p) = h.row(i).iter().position(|x| !x.is_zero()) else { continue };
            prop_assert!(last.is_none_or(|l| p > l));
            prop_assert!(h.row(i)[p].is_positive());
            for j in 0..i {
                prop_assert!(!h.row(j)[p].is_negative() && h.row(j)[p] < h.row(i)[p]);
            }
            last = Some(p);
        }
    }

    #[test]
    fn snf_divisor_chain(m in int_matrix(3, 3, 9)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.p.mul(&m).mul(&s.q), s.d.clone());
        for w in s.divisors.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        let prod = s.divisors.iter().fold(BigInt::one(), |a, x| a * x);
        let det = int_det(&m).abs();
        if !det.is_zero() {
            prop_assert_eq!(prod, det);
        }
    }

    #[test]
    fn lll_keeps_lattice_and_finds_short_first_vector(b in full_rank(3)) {
        let l = ZLattice::standard(3).span(&b).unwrap();
        let r = lll_reduce(&l, &default_delta());
        prop_assert_eq!(hnf_basis(r.basis()), hnf_basis(l.basis()));
        prop_assert_eq!(r.det_gram(), l.det_gram());
        let first = r.norm_sq(&[1, 0, 0]).sqrt();
        let shortest = short_vectors(&r, first)
            .unwrap()
            .iter()
            .filter(|x| x.iter().any(|&c| c != 0))
            .map(|x| r.norm_sq(x).sqrt())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(first <= 2.0 * shortest + 1e-9);
    }

    #[test]
    fn short_vectors_are_symmetric_and_bounded(b in full_rank(3), radius in 0.5f64..6.0) {
        let l = ZLattice::standard(3).span(&b).unwrap();
        let vs = short_vectors(&l, radius).unwrap();
        prop_assert!(vs.iter().any(|x| x.iter().all(|&c| c == 0)));
        for x in &vs {
            prop_assert!(l.norm_sq(x).sqrt() <= radius * (1.0 + 1e-12));
            let neg: Vec<i64> = x.iter().map(|c| -c).collect();
            prop_assert!(vs.contains(&neg));
        }
    }

    #[test]
    fn gaussian_binomial_symmetry_and_pascal(t in 1usize..7, u in 0usize..7, qi in 0usize..4) {
        let q = [2u64, 3, 5, 7][qi];
        prop_assume!(u <= t);
        prop_assert_eq!(gaussian_binomial(u, t, q), gaussian_binomial(t - u, t, q));
        if u >= 1 && u < t {
            let pascal = gaussian_binomial(u - 1, t - 1, q)
                + BigInt::from(q).pow(u as u32) * gaussian_binomial(u, t - 1, q);
            prop_assert_eq!(gaussian_binomial(u, t, q), pascal);
        }
    }

    #[test]
    fn containment_counts_are_integral(n in 1usize..6, s in 0usize..6, k in 0usize..6, qi in 0usize..4) {
        let q = [2u64, 3, 5, 7][qi];
        prop_assume!(k <= s && s <= n);
        let p = containment_probability(k, s, n, q);
        let count = p.clone() * num_rational::BigRational::from_integer(gaussian_binomial(s, n, q));
        prop_assert!(count.is_integer());
        prop_assert!(p > num_rational::BigRational::zero() && p <= num_rational::BigRational::one());
        if s < n {
            prop_assert!(containment_probability(k, s + 1, n, q) >= p);
        }
    }

    #[test]
    fn sampled_subspaces_are_well_formed(n in 1usize..5, s in 0usize..5, qi in 0usize..3, seed: u64) {
        let q = [2u64, 3, 5][qi];
        prop_assume!(s <= n);
        let sampler = SubspaceSampler::new(s, n, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = sampler.sample(&mut rng);
        prop_assert_eq!(sub.dim(), s);
        for v in sub.basis() {
            prop_assert!(sub.contains(v));
        }
        prop_assert_eq!(FiniteSubspace::new(q, n, sub.basis()).unwrap(), sub);
    }

    #[test]
    fn hecke_neighbors_have_unit_covolume(n in 1usize..4, s in 0usize..4, pi in 0usize..3, fi in 0usize..2, seed: u64) {
        let (name, p) = [("Q", [2u64, 3, 5][pi]), ("Qi", [2u64, 5, 13][pi])][fi];
        prop_assume!(s <= n);
        let k = builtin_field(name).unwrap();
        let prime = PrimeIdealData::first_above(&k, p).unwrap();
        let sub = SubspaceSampler::new(s, n, p).unwrap().sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = hecke_neighbor(&k, &prime, &sub).unwrap();
        prop_assert!((h.lattice.height() - 1.0).abs() < 1e-10);
        let ambient = ZLattice::ok_power(&k, n);
        let index_sq = h.lattice.det_gram() / ambient.det_gram();
        prop_assert_eq!(index_sq, BigInt::from(p).pow(2 * (n - s) as u32));
    }

    #[test]
    fn rank_drop_bound_holds(x in prop::collection::vec(-12i64..=12, 6), pi in 0usize..4) {
        let k = builtin_field("Q").unwrap();
        let prime = PrimeIdealData::first_above(&k, [2u64, 3, 5, 7][pi]).unwrap();
        let a = FieldMatrix::from_integral(&k, 3, 2, &x);
        prop_assert!(rank_drop_check(&a, &prime).unwrap().satisfied);
    }

    #[test]
    fn trijection_round_trip(x in prop::collection::vec(-6i64..=6, 6)) {
        let k = builtin_field("Q").unwrap();
        let a = FieldMatrix::from_integral(&k, 2, 3, &x);
        prop_assume!(a.rank() == 2);
        let d = to_echelon(&a).unwrap();
        let l = lambda_of(&d).unwrap();
        prop_assert_eq!(echelon_of_module(&k, &l.lattice).unwrap(), d);
        prop_assert!(l.denominator.is_positive());
    }

    #[test]
    fn window_matches_its_definition(n in 2usize..8, m in 1usize..8, s in 1usize..8) {
        prop_assume!(m < n && s <= n);
        let ok = (n - s) * m < n || s + 1 == n;
        prop_assert_eq!(window_check(n, m, s).is_ok(), ok);
    }

    #[test]
    fn config_override_is_deterministic(n in 1usize..9, seed in 0u64..=i64::MAX as u64, r in 0.1f64..10.0) {
        let base = RunConfig::default();
        let text = format!("n = {n}\nseed = {seed}\nradius = {r:?}\n");
        let a = base.overridden_by(&text).unwrap();
        let b = base.overridden_by(&text).unwrap();
        prop_assert_eq!(a.echo().to_string(), b.echo().to_string());
        prop_assert_eq!(a.n, Some(n));
        prop_assert_eq!(a.seed, seed);
        prop_assert_eq!(a.overridden_by(&text).unwrap(), a);
    }
}
