//! Kähler cone of the four-point blow-up, the fiber-basis decomposition of
//! curve classes, and the ball-form conditions on `(μ_1, μ_2, μ_3)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::blowup::{other_two, sigma, subscript, sum_of_squares, PeriodVector3, PeriodVector4};
use crate::error::{Error, Result};
use crate::lattice::{pairing, pontrjagin_square, BlowupLattice, LatticeClass, Mod2Class};

/// `[ω] = λH - Σ μ̃_i Ẽ_i` on the four-point blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KahlerClass {
    pub lambda: BigRational,
    pub mu_tilde: [BigRational; 4],
}

impl KahlerClass {
    pub fn new(lambda: BigRational, mu_tilde: [BigRational; 4]) -> Self {
        KahlerClass { lambda, mu_tilde }
    }
}

impl From<&PeriodVector4> for KahlerClass {
    fn from(q: &PeriodVector4) -> Self {
        KahlerClass::new(q.lambda.clone(), q.mu_tilde.clone())
    }
}

/// A cohomology class `λH - Σ μ_i E_i` that can be integrated over lattice classes.
pub trait Periods {
    fn lattice(&self) -> BlowupLattice;
    fn h_period(&self) -> BigRational;
    fn exceptional_periods(&self) -> Vec<BigRational>;
}

impl Periods for KahlerClass {
    fn lattice(&self) -> BlowupLattice {
        BlowupLattice::tilde()
    }
    fn h_period(&self) -> BigRational {
        self.lambda.clone()
    }
    fn exceptional_periods(&self) -> Vec<BigRational> {
        self.mu_tilde.to_vec()
    }
}

impl Periods for PeriodVector4 {
    fn lattice(&self) -> BlowupLattice {
        BlowupLattice::tilde()
    }
    fn h_period(&self) -> BigRational {
        self.lambda.clone()
    }
    fn exceptional_periods(&self) -> Vec<BigRational> {
        self.mu_tilde.to_vec()
    }
}

impl Periods for PeriodVector3 {
    fn lattice(&self) -> BlowupLattice {
        BlowupLattice::standard(3)
    }
    fn h_period(&self) -> BigRational {
        BigRational::one()
    }
    fn exceptional_periods(&self) -> Vec<BigRational> {
        self.mu().to_vec()
    }
}

/// `∫_C ω = ω · C = λ c_H + Σ μ_i c_i`, since `E_i · E_i = -1`; in
/// particular `∫_{E_i} ω = μ_i`.
pub fn area<P: Periods + ?Sized>(w: &P, c: &LatticeClass) -> Result<BigRational> {
    if c.lattice() != w.lattice() {
        return Err(Error::LatticeMismatch {
            left: w.lattice(),
            right: c.lattice(),
        });
    }
    let coeffs = c.coefficients();
    let mut total = w.h_period() * &coeffs[0];
    for (mu, k) in w.exceptional_periods().iter().zip(&coeffs[1..]) {
        total += mu * k;
    }
    Ok(total)
}

/// The three conditions describing the Kähler cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConeFailure {
    /// `λ^2 - Σ μ̃_i^2 > 0`.
    Volume,
    /// `μ̃_i > 0`.
    Positive(usize),
    /// `μ̃_0 + μ̃_i < λ`.
    FiberComponent(usize),
    /// `μ̃_0 - (μ̃_1 + μ̃_2 + μ̃_3) > 0`.
    SigmaArea,
}

impl ConeFailure {
    /// Which of the three numbered conditions this belongs to.
    pub fn condition(&self) -> u8 {
        match self {
            ConeFailure::Volume => 1,
            ConeFailure::Positive(_) | ConeFailure::FiberComponent(_) => 2,
            ConeFailure::SigmaArea => 3,
        }
    }
}

impl fmt::Display for ConeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConeFailure::Volume => write!(f, "(1̃) λ² − Σμ̃ᵢ² > 0 fails"),
            ConeFailure::Positive(i) => write!(f, "(2̃) μ̃{} > 0 fails", subscript(i)),
            ConeFailure::FiberComponent(i) => {
                write!(f, "(2̃) μ̃₀ + μ̃{} < λ fails", subscript(i))
            }
            ConeFailure::SigmaArea => write!(f, "(3̃) μ̃₀ − (μ̃₁ + μ̃₂ + μ̃₃) > 0 fails"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeMembership {
    pub failures: Vec<ConeFailure>,
}

impl ConeMembership {
    pub fn is_member(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn tilde_cone_membership(w: &KahlerClass) -> ConeMembership {
    let m = &w.mu_tilde;
    let mut failures = Vec::new();
    if !(&w.lambda * &w.lambda - sum_of_squares(m)).is_positive() {
        failures.push(ConeFailure::Volume);
    }
    for (i, x) in m.iter().enumerate() {
        if !x.is_positive() {
            failures.push(ConeFailure::Positive(i));
        }
    }
    for i in 1..=3 {
        if &m[0] + &m[i] >= w.lambda {
            failures.push(ConeFailure::FiberComponent(i));
        }
    }
    if !(&m[0] - &m[1] - &m[2] - &m[3]).is_positive() {
        failures.push(ConeFailure::SigmaArea);
    }
    ConeMembership { failures }
}

/// Conditions on the sizes of a triply blown-up ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallCondition {
    /// `1 - Σ μ_i^2 > 0`.
    Volume,
    /// `μ_i > 0`.
    Positive(usize),
    /// `μ_i + μ_j < 1`.
    Effectivity(usize, usize),
    /// `μ_i + μ_j > μ_k`.
    Triangle { i: usize, j: usize, k: usize },
}

impl BallCondition {
    pub fn triangle(k: usize) -> Self {
        let (i, j) = other_two(k);
        BallCondition::Triangle { i, j, k }
    }

    /// Re-evaluates the condition; `true` when it holds.
    pub fn holds(&self, mu: &[BigRational; 3]) -> bool {
        match *self {
            BallCondition::Volume => (BigRational::one() - sum_of_squares(mu)).is_positive(),
            BallCondition::Positive(i) => mu[i - 1].is_positive(),
            BallCondition::Effectivity(i, j) => &mu[i - 1] + &mu[j - 1] < BigRational::one(),
            BallCondition::Triangle { i, j, k } => &mu[i - 1] + &mu[j - 1] > mu[k - 1],
        }
    }

    /// Inverse of the `Display` rendering of a triangle failure.
    pub fn parse_triangle_violation(s: &str) -> Option<Self> {
        let digits: Vec<usize> = s
            .chars()
            .filter_map(|c| match c {
                '₁' => Some(1),
                '₂' => Some(2),
                '₃' => Some(3),
                _ => None,
            })
            .collect();
        let [i, j, k] = digits[..] else { return None };
        let cond = BallCondition::Triangle { i, j, k };
        (cond.to_string() == s && BallCondition::triangle(k) == cond).then_some(cond)
    }
}

impl fmt::Display for BallCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BallCondition::Volume => write!(f, "positive volume: 1 − Σμᵢ² > 0 fails"),
            BallCondition::Positive(i) => write!(f, "effectivity: μ{} > 0 fails", subscript(i)),
            BallCondition::Effectivity(i, j) => {
                write!(f, "effectivity: μ{} + μ{} < 1 fails", subscript(i), subscript(j))
            }
            BallCondition::Triangle { i, j, k } => write!(
                f,
                "μ{} + μ{} < μ{} fails",
                subscript(i),
                subscript(j),
                subscript(k)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallFormCheck {
    pub failures: Vec<BallCondition>,
}

impl BallFormCheck {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }

    /// Conditions (1) and (2): the manifold itself is well defined.
    pub fn domain_failures(&self) -> impl Iterator<Item = &BallCondition> {
        self.failures
            .iter()
            .filter(|c| !matches!(c, BallCondition::Triangle { .. }))
    }
}

pub fn ball_form_conditions(mu: &[BigRational; 3]) -> BallFormCheck {
    let mut all = vec![BallCondition::Volume];
    all.extend((1..=3).map(BallCondition::Positive));
    all.extend([(1, 2), (1, 3), (2, 3)].map(|(i, j)| BallCondition::Effectivity(i, j)));
    all.extend((1..=3).rev().map(BallCondition::triangle));
    BallFormCheck {
        failures: all.into_iter().filter(|c| !c.holds(mu)).collect(),
    }
}

/// `[F] = H - Ẽ_0`, the fiber of the ruling.
pub fn fiber_class() -> LatticeClass {
    BlowupLattice::tilde().class([1, -1, 0, 0, 0]).expect("rank 5")
}

/// `[Ẽ'_i] = H - Ẽ_0 - Ẽ_i`, the other component of the `i`-th singular fiber.
pub fn e_prime(i: usize) -> LatticeClass {
    assert!((1..=3).contains(&i), "Ẽ'_i is defined for i = 1, 2, 3");
    let mut c = [1i64, -1, 0, 0, 0];
    c[i + 1] = -1;
    BlowupLattice::tilde().class(c).expect("rank 5")
}

/// The basis `Σ, F, Ẽ'_1, Ẽ'_2, Ẽ'_3` of `Z<H, Ẽ_0, .., Ẽ_3>`.
pub fn fiber_basis() -> Vec<LatticeClass> {
    vec![sigma(), fiber_class(), e_prime(1), e_prime(2), e_prime(3)]
}

/// `[C] = d[Σ] + m[F] - Σ n'_i [Ẽ'_i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionCoefficients {
    #[serde(with = "crate::rational::serde_int")]
    pub d: BigInt,
    #[serde(with = "crate::rational::serde_int")]
    pub m: BigInt,
    #[serde(with = "crate::rational::serde_int::array3")]
    pub n_prime: [BigInt; 3],
}

impl DecompositionCoefficients {
    pub fn reconstruct(&self) -> LatticeClass {
        let l4 = BlowupLattice::tilde();
        let mut terms = vec![(self.d.clone(), sigma()), (self.m.clone(), fiber_class())];
        for i in 1..=3 {
            terms.push((-&self.n_prime[i - 1], e_prime(i)));
        }
        LatticeClass::combination(l4, terms.iter().map(|(k, v)| (k.clone(), v)))
            .expect("all terms in the tilde lattice")
    }
}

/// Coordinates in the fiber basis, read off from pairings:
/// `Σ·F = 1`, `F·F = 0`, `Ẽ'_i·F = 0`, `Ẽ'_i·Ẽ'_j = -δ_ij`, `Ẽ'_i·Σ = 0`,
/// so `d = C·F`, `n'_i = C·Ẽ'_i` and `m = C·Σ + 4d`.
pub fn decompose_curve_class(c: &LatticeClass) -> Result<DecompositionCoefficients> {
    let d = pairing(c, &fiber_class())?;
    let n_prime = [
        pairing(c, &e_prime(1))?,
        pairing(c, &e_prime(2))?,
        pairing(c, &e_prime(3))?,
    ];
    let m = pairing(c, &sigma())? + BigInt::from(4) * &d;
    Ok(DecompositionCoefficients { d, m, n_prime })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub label: String,
    #[serde(with = "crate::rational::serde_int")]
    pub multiplicity: BigInt,
    pub class: LatticeClass,
    #[serde(with = "crate::rational::serde_rational")]
    pub area: BigRational,
}

/// Outcome of running the curve-positivity case analysis on one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositivityVerdict {
    /// `C = Σ`; area is the gap `μ̃_0 - Σμ̃_i`.
    Sigma { area: BigRational },
    /// `C · F = 0` and `C` is a fiber component.
    Fiber { component: String, area: BigRational },
    /// `C · F = d > 0`: `C = dΣ + (m-3d)F + Σ(d-n'_i)F + Σ n'_i (F - Ẽ'_i)`.
    Decomposed {
        coefficients: DecompositionCoefficients,
        summands: Vec<Summand>,
        area: BigRational,
    },
    NotCovered { reason: String },
}

impl PositivityVerdict {
    pub fn area(&self) -> Option<&BigRational> {
        match self {
            PositivityVerdict::Sigma { area }
            | PositivityVerdict::Fiber { area, .. }
            | PositivityVerdict::Decomposed { area, .. } => Some(area),
            PositivityVerdict::NotCovered { .. } => None,
        }
    }
}

fn fiber_components() -> Vec<(String, LatticeClass)> {
    let l4 = BlowupLattice::tilde();
    let mut out = vec![("F".to_string(), fiber_class())];
    for i in 1..=3 {
        out.push((format!("Ẽ{i}"), l4.e(i)));
        out.push((format!("Ẽ'{i}"), e_prime(i)));
    }
    out
}

pub fn positivity_certificate(c: &LatticeClass, w: &KahlerClass) -> Result<PositivityVerdict> {
    let membership = tilde_cone_membership(w);
    if !membership.is_member() {
        let reasons: Vec<String> = membership.failures.iter().map(ToString::to_string).collect();
        return Err(Error::Domain(format!(
            "class is not in the Kähler cone: {}",
            reasons.join("; ")
        )));
    }
    let total = area(w, c)?;
    if *c == sigma() {
        return Ok(PositivityVerdict::Sigma { area: total });
    }
    let dec = decompose_curve_class(c)?;
    if dec.d.is_zero() {
        return Ok(match fiber_components().into_iter().find(|(_, v)| v == c) {
            Some((component, _)) => PositivityVerdict::Fiber {
                component,
                area: total,
            },
            None => PositivityVerdict::NotCovered {
                reason: format!("C·F = 0 but {c} is not a fiber component"),
            },
        });
    }
    if dec.d.is_negative() {
        return Ok(PositivityVerdict::NotCovered {
            reason: format!("C·F = {} < 0", dec.d),
        });
    }
    if let Some(i) = (0..3).find(|&i| dec.n_prime[i].is_negative() || dec.n_prime[i] > dec.d) {
        return Ok(PositivityVerdict::NotCovered {
            reason: format!(
                "n'{} = {} lies outside [0, d] with d = {}",
                i + 1,
                dec.n_prime[i],
                dec.d
            ),
        });
    }
    let c_sigma = pairing(c, &sigma())?;
    if !c_sigma.is_positive() {
        return Ok(PositivityVerdict::NotCovered {
            reason: format!("C·Σ = {c_sigma} is not positive"),
        });
    }

    let l4 = BlowupLattice::tilde();
    let d = &dec.d;
    let mut summands = vec![
        ("d[Σ]".to_string(), d.clone(), sigma()),
        ("(m−3d)[F]".to_string(), &dec.m - BigInt::from(3) * d, fiber_class()),
    ];
    for i in 1..=3 {
        summands.push((format!("(d−n'{i})[F]"), d - &dec.n_prime[i - 1], fiber_class()));
    }
    for i in 1..=3 {
        // F - Ẽ'_i = Ẽ_i
        summands.push((format!("n'{i}([F]−[Ẽ'{i}])"), dec.n_prime[i - 1].clone(), l4.e(i)));
    }
    let summands = summands
        .into_iter()
        .map(|(label, multiplicity, class)| {
            let a = area(w, &class)? * &multiplicity;
            Ok(Summand {
                label,
                multiplicity,
                class,
                area: a,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PositivityVerdict::Decomposed {
        coefficients: dec,
        summands,
        area: total,
    })
}

/// Mod-2 classes in `span{E_1, .., E_n}` with Pontrjagin square `1 mod 4`.
pub fn audin_scan(n: usize) -> Result<Vec<Mod2Class>> {
    if !(1..=3).contains(&n) {
        return Err(Error::Domain(format!("audin scan covers n = 1, 2, 3, got {n}")));
    }
    let lat = BlowupLattice::standard(n);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut bits = vec![false];
        bits.extend((0..n).map(|i| mask & (1 << i) != 0));
        let m = Mod2Class::from_bits(lat, &bits)?;
        if pontrjagin_square(&m) == 1 {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn witness() -> KahlerClass {
        KahlerClass::new(
            BigRational::one(),
            [ratio(1, 2), ratio(1, 10), ratio(1, 10), ratio(1, 10)],
        )
    }

    fn tilde(xs: [i64; 5]) -> LatticeClass {
        BlowupLattice::tilde().class(xs).unwrap()
    }

    #[test]
    fn area_examples() {
        assert_eq!(area(&witness(), &sigma()).unwrap(), ratio(1, 5));
        assert_eq!(area(&witness(), &fiber_class()).unwrap(), ratio(1, 2));
        assert_eq!(area(&witness(), &BlowupLattice::tilde().h()).unwrap(), ratio(1, 1));
        let l3 = BlowupLattice::standard(3).h();
        assert!(area(&witness(), &l3).is_err());
    }

    #[test]
    fn cone_examples() {
        assert!(tilde_cone_membership(&witness()).is_member());
        let boundary = KahlerClass::new(
            BigRational::one(),
            [ratio(3, 10), ratio(1, 10), ratio(1, 10), ratio(1, 10)],
        );
        let m = tilde_cone_membership(&boundary);
        assert_eq!(m.failures, vec![ConeFailure::SigmaArea]);
        assert_eq!(m.failures[0].condition(), 3);
        let negative = KahlerClass::new(
            BigRational::one(),
            [ratio(1, 2), ratio(-1, 10), ratio(1, 10), ratio(1, 10)],
        );
        let m = tilde_cone_membership(&negative);
        assert!(m.failures.iter().all(|f| f.condition() != 1));
        assert!(m.failures.contains(&ConeFailure::Positive(1)));
    }

    #[test]
    fn ball_examples() {
        let ok = [ratio(3, 10), ratio(3, 10), ratio(3, 10)];
        assert!(ball_form_conditions(&ok).all_hold());
        let tri = ball_form_conditions(&[ratio(1, 5), ratio(1, 5), ratio(1, 2)]);
        assert_eq!(tri.failures, vec![BallCondition::triangle(3)]);
        assert_eq!(tri.failures[0].to_string(), "μ₁ + μ₂ < μ₃ fails");
        let eff = ball_form_conditions(&[ratio(3, 5), ratio(3, 5), ratio(1, 10)]);
        assert_eq!(eff.failures[0], BallCondition::Effectivity(1, 2));
        assert_eq!(eff.failures[0].to_string(), "effectivity: μ₁ + μ₂ < 1 fails");
    }

    #[test]
    fn triangle_violation_round_trip() {
        for k in 1..=3 {
            let c = BallCondition::triangle(k);
            assert_eq!(BallCondition::parse_triangle_violation(&c.to_string()), Some(c));
        }
        assert_eq!(BallCondition::parse_triangle_violation("μ₁ + μ₁ < μ₃ fails"), None);
        assert_eq!(BallCondition::parse_triangle_violation("nonsense"), None);
    }

    #[test]
    fn decomposition_examples() {
        let l4 = BlowupLattice::tilde();
        let h = decompose_curve_class(&l4.h()).unwrap();
        assert_eq!((h.d.clone(), h.m.clone()), (1.into(), 4.into()));
        assert_eq!(h.n_prime, [1.into(), 1.into(), 1.into()]);
        assert_eq!(h.reconstruct(), l4.h());

        let s = decompose_curve_class(&sigma()).unwrap();
        assert_eq!((s.d, s.m), (1.into(), 0.into()));
        assert_eq!(s.n_prime, [0.into(), 0.into(), 0.into()]);

        let e1 = decompose_curve_class(&l4.e(1)).unwrap();
        assert_eq!((e1.d.clone(), e1.m.clone()), (0.into(), 1.into()));
        assert_eq!(e1.n_prime, [1.into(), 0.into(), 0.into()]);
        assert_eq!(e1.reconstruct(), l4.e(1));
    }

    #[test]
    fn positivity_cases() {
        let w = witness();
        assert_eq!(
            positivity_certificate(&sigma(), &w).unwrap(),
            PositivityVerdict::Sigma { area: ratio(1, 5) }
        );
        match positivity_certificate(&e_prime(1), &w).unwrap() {
            PositivityVerdict::Fiber { component, area } => {
                assert_eq!(component, "Ẽ'1");
                assert_eq!(area, ratio(2, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
        let c = tilde([5, -1, 0, 0, 0]);
        match positivity_certificate(&c, &w).unwrap() {
            PositivityVerdict::Decomposed {
                coefficients,
                summands,
                area,
            } => {
                assert_eq!(coefficients.d, BigInt::from(4));
                assert_eq!(coefficients.m, BigInt::from(17));
                assert_eq!(area, ratio(9, 2));
                let sum: BigRational = summands.iter().map(|s| s.area.clone()).sum();
                assert_eq!(sum, area);
                assert!(summands.iter().all(|s| !s.area.is_negative()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn positivity_refuses_unknown_shapes() {
        let w = witness();
        // Ẽ_0 = Σ + Ẽ_1 + Ẽ_2 + Ẽ_3 has C·Σ = -1.
        let e0 = BlowupLattice::tilde().e(0);
        assert!(matches!(
            positivity_certificate(&e0, &w).unwrap(),
            PositivityVerdict::NotCovered { .. }
        ));
        let out = KahlerClass::new(BigRational::one(), [ratio(3, 10), ratio(1, 10), ratio(1, 10), ratio(1, 10)]);
        assert!(positivity_certificate(&sigma(), &out).is_err());
    }

    #[test]
    fn audin_examples() {
        assert!(audin_scan(1).unwrap().is_empty());
        assert!(audin_scan(2).unwrap().is_empty());
        let three = audin_scan(3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].reduction(), &[false, true, true, true]);
        assert!(audin_scan(4).is_err());
        assert!(audin_scan(0).is_err());
    }
}
