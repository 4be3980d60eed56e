use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use rp2_core::blowup::{
    epsilon_supremum, forward_periods, period_inverse, volume_identity, PeriodVector3,
    PeriodVector4,
};
use rp2_core::cone::{
    area, ball_form_conditions, decompose_curve_class, e_prime, fiber_class, positivity_certificate,
    tilde_cone_membership, KahlerClass, PositivityVerdict,
};
use rp2_core::lattice::{
    c1_degree, enumerate_classes, is_primitive, pairing, pontrjagin_square, square, BlowupLattice,
    ClassQuery, LatticeClass, Mod2Class,
};
use rp2_core::matrix::{determinant, smith_invariant_factors};
use rp2_core::rational::ratio;
use rp2_core::sublattice::{inclusion_index, quotient_structure, Sublattice};
use rp2_core::verify::{box_scan, valid_grid};

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

fn class_in(lat: BlowupLattice) -> impl Strategy<Value = LatticeClass> {
    prop::collection::vec(-20i64..=20, lat.rank()).prop_map(move |v| lat.class(v).unwrap())
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-400i64..=400, 1i64..=200).prop_map(|(n, d)| q(n, d))
}

/// Gcd of all k x k minors, by brute force over row and column subsets.
fn determinantal_divisor(m: &[Vec<BigInt>], k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }
    let mut g = BigInt::zero();
    for rows in subsets(m.len(), k) {
        for cols in subsets(m[0].len(), k) {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
                .collect();
            g = g.gcd(&determinant(&minor));
        }
    }
    g
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k-1}`.
fn smith_oracle(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len().min(m[0].len());
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=n {
        let dk = determinantal_divisor(m, k);
        if dk.is_zero() {
            break;
        }
        out.push(&dk / &prev);
        prev = dk;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pairing_is_symmetric_and_bilinear(
        a in class_in(BlowupLattice::tilde()),
        b in class_in(BlowupLattice::tilde()),
        c in class_in(BlowupLattice::tilde()),
        k in -7i64..=7,
    ) {
        prop_assert_eq!(pairing(&a, &b).unwrap(), pairing(&b, &a).unwrap());
        let lhs = pairing(&a.add(&b.scale(&k.into())).unwrap(), &c).unwrap();
        let rhs = pairing(&a, &c).unwrap() + BigInt::from(k) * pairing(&b, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pontrjagin_square_ignores_even_changes_of_lift(
        lift in class_in(BlowupLattice::standard(3)),
        shift in class_in(BlowupLattice::standard(3)),
    ) {
        let moved = lift.add(&shift.scale(&BigInt::from(2))).unwrap();
        let a = Mod2Class::from_lift(lift);
        let b = Mod2Class::from_lift(moved);
        prop_assert_eq!(a.reduction(), b.reduction());
        prop_assert_eq!(pontrjagin_square(&a), pontrjagin_square(&b));
    }

    #[test]
    fn enumeration_matches_box_scan(
        h in -2i64..=2,
        sq in -6i64..=2,
        c1 in -6i64..=6,
        orth in class_in(BlowupLattice::tilde()),
        use_orth in any::<bool>(),
        primitive in any::<bool>(),
    ) {
        let l4 = BlowupLattice::tilde();
        let mut query = ClassQuery::new(l4, sq, c1).h_degree(h).primitive(primitive);
        if use_orth {
            query = query.orthogonal_to(orth.clone());
        }
        let got = enumerate_classes(&query).unwrap();
        let budget = h * h - sq;
        let oracle = if budget < 0 {
            Vec::new()
        } else {
            let bound = (1..).take_while(|b: &i64| b * b <= budget).last().unwrap_or(0);
            box_scan(l4, h, bound, |v| {
                square(v) == BigInt::from(sq)
                    && c1_degree(v) == BigInt::from(c1)
                    && (!use_orth || pairing(v, &orth).unwrap().is_zero())
                    && (!primitive || is_primitive(v).unwrap_or(false))
            })
        };
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn smith_matches_determinantal_divisors(
        entries in prop::collection::vec(-9i64..=9, 9),
    ) {
        let m: Vec<Vec<BigInt>> = entries.chunks(3).map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        prop_assert_eq!(smith_invariant_factors(&m), smith_oracle(&m));
    }

    #[test]
    fn nested_sublattice_index_laws(
        entries in prop::collection::vec(-4i64..=4, 16),
    ) {
        // sub = M · Λ_3 for a random integer matrix M.
        let l3 = BlowupLattice::standard(3);
        let rows: Vec<Vec<BigInt>> = entries.chunks(4).map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        prop_assume!(!determinant(&rows).is_zero());
        let sub = Sublattice::new(l3, rows.iter().map(|r| l3.class(r.clone()).unwrap()).collect()).unwrap();
        let full = Sublattice::full(l3);
        let idx = inclusion_index(&sub, &full).unwrap();
        prop_assert_eq!(&idx * &idx * full.discriminant().unwrap(), sub.discriminant().unwrap());
        let factors = quotient_structure(&sub, &full).unwrap();
        prop_assert_eq!(factors.iter().product::<BigInt>(), idx.clone());
        prop_assert_eq!(idx, determinant(&rows).abs());
    }

    #[test]
    fn orthogonal_sum_multiplies_discriminants(
        a in prop::collection::vec(-5i64..=5, 2),
        b in prop::collection::vec(-5i64..=5, 2),
    ) {
        // Z<aH + a'E1> ⊕ Z<bE2 + b'E3> are orthogonal by support.
        let l3 = BlowupLattice::standard(3);
        let u = l3.class([a[0], a[1], 0, 0]).unwrap();
        let v = l3.class([0, 0, b[0], b[1]]).unwrap();
        prop_assume!(!square(&u).is_zero() && !square(&v).is_zero());
        let su = Sublattice::cyclic(u).unwrap();
        let sv = Sublattice::cyclic(v).unwrap();
        let sum = su.orthogonal_sum(&sv).unwrap();
        prop_assert_eq!(
            sum.discriminant().unwrap(),
            su.discriminant().unwrap() * sv.discriminant().unwrap()
        );
    }

    #[test]
    fn forward_inverse_round_trip(
        m1 in small_rational(), m2 in small_rational(), m3 in small_rational(),
        eps in small_rational(),
    ) {
        let mu = [m1, m2, m3];
        let fwd = forward_periods(&mu, &eps);
        let inv = period_inverse(&fwd).unwrap();
        prop_assert_eq!(&inv.mu, &mu);
        prop_assert_eq!(&inv.epsilon, &eps);
        prop_assert_eq!(fwd.gap(), &eps * BigInt::from(4));
        prop_assert!(volume_identity(&mu, &eps));
    }

    #[test]
    fn inverse_forward_round_trip(
        a in small_rational(), b in small_rational(), c in small_rational(), d in small_rational(),
    ) {
        let q = PeriodVector4::new(BigRational::one(), [a, b, c, d]);
        let inv = period_inverse(&q).unwrap();
        prop_assert_eq!(forward_periods(&inv.mu, &inv.epsilon).mu_tilde, q.mu_tilde);
    }

    #[test]
    fn volume_identity_by_symbolic_expansion(
        m1 in small_rational(), m2 in small_rational(), m3 in small_rational(),
        eps in small_rational(),
    ) {
        // Expand Σ μ̃_i^2 with s = Σμ/2 and t_i = s - μ_i:
        // (s + ε)^2 + Σ (t_i - ε)^2 = s^2 + Σ t_i^2 + 2ε(s - Σ t_i) + 4ε^2,
        // and s - Σ t_i = s - (3s - 2s) = 0, s^2 + Σ t_i^2 = Σ μ_i^2.
        let mu = [m1, m2, m3];
        let s: BigRational = mu.iter().sum::<BigRational>() / BigRational::from_integer(2.into());
        let t: Vec<BigRational> = mu.iter().map(|m| &s - m).collect();
        let cross = &s - t.iter().sum::<BigRational>();
        prop_assert!(cross.is_zero());
        let sq_sum = &s * &s + t.iter().map(|x| x * x).sum::<BigRational>();
        prop_assert_eq!(sq_sum, mu.iter().map(|x| x * x).sum::<BigRational>());
        let fwd = forward_periods(&mu, &eps);
        let lhs: BigRational = fwd.mu_tilde.iter().map(|x| x * x).sum();
        let rhs = mu.iter().map(|x| x * x).sum::<BigRational>() + BigRational::from_integer(4.into()) * &eps * &eps;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn decomposition_reconstructs(c in class_in(BlowupLattice::tilde())) {
        let dec = decompose_curve_class(&c).unwrap();
        prop_assert_eq!(dec.reconstruct(), c.clone());
        let sigma = BlowupLattice::tilde().class([0, 1, -1, -1, -1]).unwrap();
        prop_assert_eq!(dec.m.clone(), pairing(&c, &sigma).unwrap() + BigInt::from(4) * &dec.d);
    }

    #[test]
    fn case_c_summands_add_up(
        d in 1i64..=8, a in 0i64..=8, b1 in 0i64..=4, b2 in 0i64..=4, b3 in 0i64..=4,
        eps_num in 1i64..=14,
    ) {
        let mu = [q(3, 10), q(3, 10), q(3, 10)];
        let w = KahlerClass::from(&forward_periods(&mu, &q(eps_num, 100)));
        prop_assume!(tilde_cone_membership(&w).is_member());
        let c = BlowupLattice::tilde().class([d, -a, -b1, -b2, -b3]).unwrap();
        if let PositivityVerdict::Decomposed { summands, area: total, .. } = positivity_certificate(&c, &w).unwrap() {
            let sum: BigRational = summands.iter().map(|s| s.area.clone()).sum();
            prop_assert_eq!(&sum, &total);
            prop_assert_eq!(total, area(&w, &c).unwrap());
            prop_assert!(summands.iter().all(|s| !s.area.is_negative()));
            prop_assert!(summands[0].area.is_positive());
        }
    }

    #[test]
    fn cone_members_are_positive_on_basic_curves(
        a in 1i64..=60, b in 1i64..=60, c in 1i64..=60, z in 1i64..=60,
    ) {
        let w = KahlerClass::new(q(1, 1), [q(z, 60) , q(a, 600), q(b, 600), q(c, 600)]);
        prop_assume!(tilde_cone_membership(&w).is_member());
        let l4 = BlowupLattice::tilde();
        let sigma = l4.class([0, 1, -1, -1, -1]).unwrap();
        let mut curves = vec![sigma, fiber_class()];
        for i in 0..4 {
            curves.push(l4.e(i));
        }
        for i in 1..=3 {
            curves.push(e_prime(i));
            curves.push(fiber_class().sub(&e_prime(i)).unwrap());
        }
        for v in &curves {
            prop_assert!(area(&w, v).unwrap().is_positive(), "{v}");
        }
    }
}

#[test]
fn supremum_positive_iff_triangles_on_grid() {
    for mu in valid_grid(20) {
        let p = PeriodVector3::new(mu.clone()).unwrap();
        let sup = epsilon_supremum(&p).unwrap();
        let triangles = ball_form_conditions(&mu).all_hold();
        assert_eq!(sup.value.is_positive(), triangles, "{mu:?}");
        assert!(!sup.attained);
    }
}

#[test]
fn validity_is_monotone_in_epsilon() {
    for mu in valid_grid(10) {
        let p = PeriodVector3::new(mu.clone()).unwrap();
        let sup = epsilon_supremum(&p).unwrap();
        if !sup.value.is_positive() {
            continue;
        }
        for k in 1..8 {
            let eps = &sup.value * q(k, 8);
            assert!(forward_periods(&mu, &eps).is_valid(), "{mu:?} at {eps}");
        }
        assert!(!forward_periods(&mu, &sup.value).is_valid(), "{mu:?} at sup");
        let beyond = &sup.value * q(9, 8);
        assert!(!forward_periods(&mu, &beyond).is_valid());
    }
}

#[test]
fn volume_bound_never_binds_on_domain() {
    // Fine grid: the linear bound always wins strictly.
    for mu in valid_grid(30) {
        let p = PeriodVector3::new(mu).unwrap();
        let sup = epsilon_supremum(&p).unwrap();
        assert!(!sup
            .binding
            .contains(&rp2_core::blowup::Binding::Volume));
    }
}

#[test]
fn fiber_basis_is_unimodular() {
    let rows: Vec<Vec<BigInt>> = rp2_core::cone::fiber_basis()
        .iter()
        .map(|v| v.coefficients().to_vec())
        .collect();
    assert!(determinant(&rows).abs().is_one());
}
