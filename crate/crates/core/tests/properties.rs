mod common;

use k3_attractor::attractor::{hyperkahler_rotate, solve_attractor, threefold_central_charge, verify_attractor, z_k3, Charge};
use k3_attractor::exact::{qs_sign, rat, QuadComplex, QuadScalar};
use k3_attractor::forms::{gauss_reduce, sl2_equivalent, BinaryEvenForm, Sl2Witness};
use k3_attractor::lattice::{
    minus_two_vectors, mukai, orth_complement, ComplexVector, LatticeVector, Sublattice, E8_A,
    E8_B, K3_RANK, RANK, U1, U2, U3,
};
use k3_attractor::mirror::{mirror_class, mirror_involution_check, mirror_period, project_gamma_prime, SplitData};
use k3_attractor::scenario::Scenario;
use k3_attractor::stability::{
    central_charge, exp_point, mukai_pair, p0_falsifier, pairwise_walls, MukaiVector,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{combine, int_vec, naive_falsifier, naive_grid, random_valid_triple, small_gram};

fn pair(x: &LatticeVector, y: &LatticeVector) -> QuadScalar {
    mukai().pair(x, y).unwrap()
}

fn pair_c(x: &ComplexVector, y: &ComplexVector) -> QuadComplex {
    mukai().pair_complex(x, y).unwrap()
}

fn scalar(m: u64) -> impl Strategy<Value = QuadScalar> {
    (-40i64..=40, 1i64..=9, -40i64..=40, 1i64..=9)
        .prop_map(move |(a, da, b, db)| QuadScalar::new(rat(a, da), rat(b, db), m).unwrap())
}

fn field_triple() -> impl Strategy<Value = (QuadScalar, QuadScalar, QuadScalar)> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
        .prop_flat_map(|m| (scalar(m), scalar(m), scalar(m)))
}

/// An integral K3-lattice vector in Mukai coordinates.
fn k3_vector() -> impl Strategy<Value = LatticeVector> {
    prop::collection::vec(-3i64..=3, K3_RANK).prop_map(|xs| LatticeVector::padded(&xs, RANK))
}

fn positive_form() -> impl Strategy<Value = BinaryEvenForm> {
    (1i64..=6, -6i64..=6, 1i64..=6)
        .prop_filter_map("positive definite", |(a, b, c)| BinaryEvenForm::new(2 * a, b, 2 * c).ok())
}

fn sl2() -> impl Strategy<Value = Sl2Witness> {
    prop::collection::vec((any::<bool>(), -3i64..=3), 0..6).prop_map(|steps| {
        steps.into_iter().fold(Sl2Witness::identity(), |g, (swap, k)| {
            let m = if swap { [[0, -1], [1, 0]] } else { [[1, k], [0, 1]] };
            g.mul(&Sl2Witness::new(m).unwrap())
        })
    })
}

fn omega0(split: &SplitData) -> LatticeVector {
    &split.f.scale(&QuadScalar::int(2)) + &split.sigma0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((x, y, z) in field_triple()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.recip().unwrap(), QuadScalar::one());
        }
    }

    #[test]
    fn sign_matches_float((x, _, _) in field_triple()) {
        let f = x.to_f64();
        prop_assume!(f.abs() > 1e-9);
        prop_assert_eq!(qs_sign(&x), if f > 0.0 { 1 } else { -1 });
    }

    #[test]
    fn conjugation_is_an_automorphism((x, y, _) in field_triple()) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        let norm_sign = x.norm().cmp(&rat(0, 1)) as i8;
        prop_assert_eq!(norm_sign, qs_sign(&x) * qs_sign(&x.conj()));
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(x in k3_vector(), y in k3_vector(), z in k3_vector(), k in -5i64..=5) {
        prop_assert_eq!(pair(&x, &y), pair(&y, &x));
        let kx = x.scale(&QuadScalar::int(k));
        prop_assert_eq!(pair(&(&kx + &y), &z), &(&QuadScalar::int(k) * &pair(&x, &z)) + &pair(&y, &z));
    }

    #[test]
    fn projection_is_idempotent(x in k3_vector()) {
        let split = SplitData::standard();
        let px = project_gamma_prime(&split, &x).unwrap();
        prop_assert_eq!(project_gamma_prime(&split, &px).unwrap(), px.clone());
        prop_assert!(pair(&px, &split.v).is_zero());
        prop_assert!(pair(&px, &split.vstar).is_zero());
    }

    #[test]
    fn mirror_class_preserves_pairing(x in k3_vector(), y in k3_vector()) {
        let split = SplitData::standard();
        let (mx, my) = (mirror_class(&split, &x).unwrap(), mirror_class(&split, &y).unwrap());
        prop_assert_eq!(QuadScalar::from(mukai_pair(&mx, &my)), pair(&x, &y));
    }

    #[test]
    fn reduction_is_idempotent_and_witnessed(q in positive_form(), g in sl2()) {
        let moved = q.transform(&g);
        let (red, r) = gauss_reduce(&moved);
        prop_assert!(red.is_reduced());
        prop_assert_eq!(red.transform(&r), moved);
        prop_assert_eq!(gauss_reduce(&red), (red, Sl2Witness::identity()));
        let w = sl2_equivalent(&moved, &q).unwrap();
        prop_assert_eq!(q.transform(&w), moved);
        prop_assert_eq!(moved.discriminant(), q.discriminant());
    }

    #[test]
    fn attractor_periods(q in positive_form()) {
        let ch = Charge::standard(&q);
        let (tau, omega) = solve_attractor(&ch).unwrap();
        prop_assert!(pair_c(&omega, &omega).is_zero());
        let d = QuadScalar::from(ch.discriminant());
        let expected = (&d * &QuadScalar::int(2)).try_div(&ch.p_sq()).unwrap();
        prop_assert_eq!(pair_c(&omega, &omega.conj()), QuadComplex::real(expected));
        prop_assert!(verify_attractor(&ch, &tau, &omega).is_ok());
    }

    #[test]
    fn perturbed_tau_is_rejected(q in positive_form(), a in -30i64..=30, b in -30i64..=30, d in 1i64..=7) {
        prop_assume!(a != 0 || b != 0);
        let ch = Charge::standard(&q);
        let (tau, _) = solve_attractor(&ch).unwrap();
        let t = &tau + &QuadComplex::new(QuadScalar::frac(a, d), QuadScalar::frac(b, d));
        let omega = ComplexVector::new(&ch.q - &ch.p.scale(&t.re), ch.p.scale(&t.im));
        prop_assert!(verify_attractor(&ch, &t, &omega).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn threefold_charges_are_real(q in positive_form()) {
        let s = Scenario::standard(&q).unwrap();
        let zero = LatticeVector::zero(RANK);
        let mut charges = Vec::new();
        for l in &s.pic_basis {
            let z = threefold_central_charge(&s.attractor, &zero, l);
            prop_assert_eq!(&z, &QuadComplex::real(z_k3(&s.attractor.omega_j, l)));
            charges.push(z);
        }
        for z1 in &charges {
            for z2 in &charges {
                // real charges: the cross term vanishes, so arg Z1 = +-arg Z2
                prop_assert!((&z1.re * &z2.im - &z1.im * &z2.re).is_zero());
            }
        }
    }

    #[test]
    fn complements_are_orthogonal(gens in prop::collection::vec(k3_vector(), 1..4)) {
        let k3 = k3_attractor::lattice::k3_lattice();
        let short: Vec<LatticeVector> = gens.iter().map(|g| g.resized(K3_RANK)).collect();
        let comp = orth_complement(&k3, &short).unwrap();
        for b in comp.vectors() {
            for g in &short {
                prop_assert!(k3.pair(&b, g).unwrap().is_zero());
            }
        }
        let rows: Vec<Vec<_>> = short.iter().map(|g| g.coords.clone()).collect();
        let gens_rank = k3_attractor::lattice::field_rank(&rows);
        let sub = Sublattice::new(k3.clone(), short.iter().map(|g| g.to_integers().unwrap()).collect());
        if let Ok(sub) = sub {
            if sub.signature().zero == 0 {
                prop_assert_eq!(gens_rank + comp.rank(), K3_RANK);
            }
        }
    }

    #[test]
    fn mirror_of_valid_triples(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let split = SplitData::standard();
        let (period, omega, b) = random_valid_triple(&mut rng);
        let m = mirror_period(&split, &period, &omega, &b).unwrap();
        prop_assert!(pair_c(&m.period, &m.period).is_zero());
        prop_assert!(pair_c(&m.period, &m.period.conj()).re.is_positive());
        let rep = mirror_involution_check(&split, &period, &omega, &b).unwrap();
        prop_assert!(rep.subspace_equal);
    }

    #[test]
    fn central_charge_is_linear(
        b in k3_vector(), d1 in k3_vector(), d2 in k3_vector(),
        r1 in -3i64..=3, s1 in -3i64..=3, r2 in -3i64..=3, s2 in -3i64..=3,
    ) {
        // omega positive in U2, B arbitrary; central_charge checks its own expansion
        let omega = int_vec(&[(U2, 2), (U2 + 1, 3), (E8_A, 1)]);
        let psi = exp_point(&b, &omega).unwrap();
        let v1 = MukaiVector::from_class(r1, &d1, s1).unwrap();
        let v2 = MukaiVector::from_class(r2, &d2, s2).unwrap();
        let z1 = central_charge(&psi, &v1).unwrap();
        let z2 = central_charge(&psi, &v2).unwrap();
        prop_assert_eq!(central_charge(&psi, &v1.add(&v2)).unwrap(), &z1 + &z2);
        // independent expansion
        let (bb, ww, bw) = (pair(&b, &b), pair(&omega, &omega), pair(&b, &omega));
        let r = QuadScalar::int(r1);
        let re = &(&pair(&d1, &b) - &QuadScalar::int(s1)) - &(&r * &(&bb - &ww)).scale(&rat(1, 2));
        let im = &pair(&d1, &omega) - &(&r * &bw);
        prop_assert_eq!(z1, QuadComplex::new(re, im));
    }

    #[test]
    fn reality_survives_rescaling(t_num in 1i64..=9, t_den in 1i64..=9, k in 1usize..18) {
        let base = Scenario::standard(&BinaryEvenForm::new(2, 0, 8).unwrap()).unwrap();
        // a rational perturbation so that some charges are nonzero
        let omega = &omega0(&base.split) + &base.pic_basis[k + 2].scale(&QuadScalar::frac(1, 50));
        let t = QuadScalar::frac(t_num, t_den);
        let s1 = base.with_omega_j(&omega).unwrap();
        let s2 = base.with_omega_j(&omega.scale(&t)).unwrap();
        let classes: Vec<MukaiVector> = s1
            .pic_basis
            .iter()
            .map(|l| mirror_class(&s1.split, l).unwrap())
            .collect();
        let z1: Vec<QuadComplex> = classes.iter().map(|v| central_charge(&s1.psi, v).unwrap()).collect();
        let z2: Vec<QuadComplex> = classes.iter().map(|v| central_charge(&s2.psi, v).unwrap()).collect();
        prop_assert!(z1.iter().chain(&z2).all(QuadComplex::is_real));
        // B_check is scale invariant, so every charge except that of sigma0
        // (which sees omega_check^2) is unchanged, and so are the walls among them
        for (i, (a, b)) in z1.iter().zip(&z2).enumerate() {
            if i != 1 {
                prop_assert_eq!(a, b);
            }
        }
        let w1 = pairwise_walls(&s1.psi, &classes).unwrap();
        let w2 = pairwise_walls(&s2.psi, &classes).unwrap();
        for (a, b) in w1.iter().zip(&w2) {
            if a.pair.0 != 1 && a.pair.1 != 1 {
                prop_assert_eq!(a.member, b.member);
            }
        }
    }

    #[test]
    fn type4_obstruction_is_omega_independent(coeffs in prop::collection::vec(-2i64..=2, 18), a in 1i64..=6, b in 1i64..=6) {
        let base = Scenario::standard(&BinaryEvenForm::new(2, 0, 2).unwrap()).unwrap();
        let split = &base.split;
        // a e1 + b e2 in U1 plus a small Picard perturbation
        let mut omega = &split.f.scale(&QuadScalar::int(a)) + &(&split.f + &split.sigma0).scale(&QuadScalar::int(b));
        for (c, l) in coeffs.iter().zip(&base.pic_basis[2..]) {
            omega = omega.axpy(&QuadScalar::frac(*c, 40), l);
        }
        prop_assume!(pair(&omega, &omega).is_positive());
        let s = base.with_omega_j(&omega).unwrap();
        let delta = MukaiVector::from_class(0, &split.sigma0, 0).unwrap();
        prop_assert!(central_charge(&s.psi, &delta).unwrap().is_zero());
    }
}

fn small_sublattice() -> impl Strategy<Value = Sublattice> {
    let pool: Vec<LatticeVector> = vec![
        mukai().unit(U1),
        mukai().unit(U1 + 1),
        &mukai().unit(U1 + 1) - &mukai().unit(U1),
        mukai().unit(U2),
        int_vec(&[(U3, 1), (U3 + 1, -1)]),
        mukai().unit(E8_A),
        mukai().unit(E8_A + 2),
        mukai().unit(E8_A + 3),
        mukai().unit(E8_B + 1),
        int_vec(&[(E8_A + 4, 1), (U2 + 1, 1)]),
    ];
    prop::sample::subsequence(pool, 1..=2).prop_filter_map("independent", |vs| {
        let basis = vs.iter().map(|v| v.to_integers().unwrap()).collect();
        Sublattice::new(mukai().clone(), basis).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn falsifier_matches_naive_loop(ns in small_sublattice(), bound in 0u32..=2, seed in 0usize..4) {
        let points = [
            Scenario::standard(&BinaryEvenForm::new(2, 0, 2).unwrap()).unwrap().psi,
            Scenario::standard(&BinaryEvenForm::new(2, 0, 8).unwrap()).unwrap().psi,
            exp_point(&int_vec(&[(E8_A, 1)]), &int_vec(&[(U2, 1), (U2 + 1, 1)])).unwrap(),
            exp_point(&LatticeVector::zero(RANK), &int_vec(&[(U1, 1), (U1 + 1, 1)])).unwrap(),
        ];
        let psi = &points[seed];
        let fast = p0_falsifier(psi, &ns, bound).unwrap();
        prop_assert_eq!(fast.box_hits, naive_falsifier(psi, &ns, bound as i64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn minus_two_matches_naive_grid(
        picks in prop::sample::subsequence((0usize..16).collect::<Vec<_>>(), 1..=6),
        bound in 1u32..=3,
    ) {
        // simple roots of both E8 blocks plus U1
        let vs: Vec<LatticeVector> = picks
            .iter()
            .map(|&i| match i {
                0 => mukai().unit(U1),
                1 => mukai().unit(U1 + 1),
                i if i < 9 => mukai().unit(E8_A + i - 2),
                i => mukai().unit(E8_B + i - 9),
            })
            .collect();
        let basis: Vec<Vec<BigInt>> = vs.iter().map(|v| v.to_integers().unwrap()).collect();
        let sub = Sublattice::new(mukai().clone(), basis).unwrap();
        let fast = minus_two_vectors(&sub, bound);
        let slow: Vec<LatticeVector> = naive_grid(&small_gram(&sub), -2, bound as i64, |_| true)
            .iter()
            .map(|c| combine(&sub, c))
            .collect();
        prop_assert_eq!(fast, slow);
    }
}

#[test]
fn hyperkahler_rotation_rejects_non_orthogonal_kahler_class() {
    let ch = Charge::standard(&BinaryEvenForm::new(2, 0, 8).unwrap());
    let (tau, _) = solve_attractor(&ch).unwrap();
    let bad = &omega0(&SplitData::standard()) + &ch.p;
    assert!(hyperkahler_rotate(&ch, &tau, &bad).is_err());
}

#[test]
fn sigma0_charge_is_not_scale_invariant() {
    // omega_check = q / t, so Z(mu(sigma0)) = -1 + q^2 / (2 t^2) changes sign
    let base = Scenario::standard(&BinaryEvenForm::new(2, 0, 8).unwrap()).unwrap();
    let sigma = mirror_class(&base.split, &base.split.sigma0).unwrap();
    let f = mirror_class(&base.split, &base.split.f).unwrap();
    let tripled = base.with_omega_j(&base.attractor.omega_j.scale(&QuadScalar::int(3))).unwrap();
    assert_eq!(central_charge(&base.psi, &sigma).unwrap(), QuadComplex::real(QuadScalar::int(3)));
    assert_eq!(central_charge(&tripled.psi, &sigma).unwrap(), QuadComplex::real(QuadScalar::frac(-5, 9)));
    let before = pairwise_walls(&base.psi, &[f.clone(), sigma.clone()]).unwrap();
    let after = pairwise_walls(&tripled.psi, &[f, sigma]).unwrap();
    assert!(before[0].member && !after[0].member);
}
