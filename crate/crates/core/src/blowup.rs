//! The rational blow-up along a Lagrangian RP²: the (-4)-sphere class, the
//! lattice correspondence between the two blown-up planes, and the period
//! arithmetic linking `(μ_1, μ_2, μ_3)` to `(μ̃_0, .., μ̃_3)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{ball_form_conditions, BallCondition};
use crate::error::{Error, Result};
use crate::lattice::{
    c1_degree, enumerate_classes, pairing, square, Basis, BlowupLattice, ClassQuery, LatticeClass,
    Mod2Class,
};
use crate::sublattice::{kernel_of_mod2_pairing, Sublattice};

pub(crate) fn subscript(i: usize) -> char {
    char::from_u32(0x2080 + i as u32).expect("single digit subscript")
}

/// `[Σ] = Ẽ_0 - Ẽ_1 - Ẽ_2 - Ẽ_3`.
pub fn sigma_class(lattice: BlowupLattice) -> Result<LatticeClass> {
    if lattice.basis() != Basis::Tilde {
        return Err(Error::Domain(format!("{lattice} is not the Ẽ-lattice")));
    }
    lattice.class([0, 1, -1, -1, -1])
}

pub(crate) fn sigma() -> LatticeClass {
    sigma_class(BlowupLattice::tilde()).expect("tilde lattice")
}

/// `Λ'_3`: classes of `Z<H, E_1, E_2, E_3>` pairing evenly with `E_1 + E_2 + E_3`.
pub fn lambda3_prime() -> Sublattice {
    let l3 = BlowupLattice::standard(3);
    let w = Mod2Class::from_bits(l3, &[false, true, true, true]).expect("rank 4");
    kernel_of_mod2_pairing(l3, &w)
        .expect("same lattice")
        .sublattice
}

/// `Λ̃'_4 = Σ^⊥` inside `Z<H, Ẽ_0, .., Ẽ_3>`.
pub fn lambda4_prime() -> Sublattice {
    Sublattice::orthogonal_complement(BlowupLattice::tilde(), &[sigma()]).expect("tilde lattice")
}

/// A homomorphism `Λ'_3 → Λ̃_4`, recorded by the images of
/// `H, 2E_1, 2E_2, 2E_3`. These generate `Λ'_3` only up to index 2; the
/// rest of `Λ'_3` maps by halving, which is where integrality of the
/// half-differences comes in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    images: Vec<LatticeClass>,
}

impl Correspondence {
    pub fn new(images: Vec<LatticeClass>) -> Result<Self> {
        if images.len() != 4 {
            return Err(Error::Domain(format!("expected 4 images, got {}", images.len())));
        }
        let l4 = BlowupLattice::tilde();
        if let Some(bad) = images.iter().find(|v| v.lattice() != l4) {
            return Err(Error::LatticeMismatch {
                left: l4,
                right: bad.lattice(),
            });
        }
        Ok(Correspondence { images })
    }

    pub fn source_generators() -> Vec<LatticeClass> {
        let l3 = BlowupLattice::standard(3);
        let two = BigInt::from(2);
        vec![l3.h(), l3.e(1).scale(&two), l3.e(2).scale(&two), l3.e(3).scale(&two)]
    }

    pub fn images(&self) -> &[LatticeClass] {
        &self.images
    }

    /// Image of `2E_i` (`i` in 1..=3).
    pub fn image_of_double(&self, i: usize) -> &LatticeClass {
        &self.images[i]
    }

    /// 4 x 5 integer matrix; row `r` is the image of the `r`-th source generator.
    pub fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.images.iter().map(|v| v.coefficients().to_vec()).collect()
    }

    /// Extends linearly to `x = aH + Σ b_i E_i`, defined when the result is integral.
    pub fn apply(&self, x: &LatticeClass) -> Result<LatticeClass> {
        let l3 = BlowupLattice::standard(3);
        if x.lattice() != l3 {
            return Err(Error::LatticeMismatch {
                left: l3,
                right: x.lattice(),
            });
        }
        let c = x.coefficients();
        let two = BigInt::from(2);
        let doubled = LatticeClass::combination(
            BlowupLattice::tilde(),
            [
                (&c[0] * &two, &self.images[0]),
                (c[1].clone(), &self.images[1]),
                (c[2].clone(), &self.images[2]),
                (c[3].clone(), &self.images[3]),
            ],
        )?;
        doubled
            .divide_exact(&two)
            .ok_or_else(|| Error::NotContained(format!("{x} has no integral image")))
    }

    pub fn is_isometry(&self) -> bool {
        let src = Self::source_generators();
        (0..4).all(|i| {
            (0..4).all(|j| {
                pairing(&src[i], &src[j]).expect("Λ3") == pairing(&self.images[i], &self.images[j]).expect("Λ4")
            })
        })
    }

    pub fn preserves_c1(&self) -> bool {
        Self::source_generators()
            .iter()
            .zip(&self.images)
            .all(|(s, t)| c1_degree(s) == c1_degree(t))
    }

    /// `½(image(2E_i) - image(2E_j))` for `i < j`, or `None` if not integral.
    pub fn half_differences(&self) -> Vec<((usize, usize), Option<LatticeClass>)> {
        let two = BigInt::from(2);
        let mut out = Vec::new();
        for i in 1..=3 {
            for j in i + 1..=3 {
                let diff = self.images[i].sub(&self.images[j]).expect("Λ4");
                out.push(((i, j), diff.divide_exact(&two)));
            }
        }
        out
    }

    pub fn half_differences_are_roots(&self) -> bool {
        self.half_differences().iter().all(|(_, h)| {
            h.as_ref()
                .is_some_and(|v| square(v) == BigInt::from(-2))
        })
    }

    /// The image of all of `Λ'_3` lands in and spans `Λ̃'_4`.
    pub fn is_onto_sigma_complement(&self) -> Result<bool> {
        let source = lambda3_prime();
        let images = source
            .generators()
            .iter()
            .map(|g| self.apply(g))
            .collect::<Result<Vec<_>>>()?;
        let image = match Sublattice::new(BlowupLattice::tilde(), images) {
            Ok(s) => s,
            Err(Error::DependentGenerators) => return Ok(false),
            Err(e) => return Err(e),
        };
        image.same_span(&lambda4_prime())
    }

    pub fn invariants_hold(&self) -> bool {
        self.images[0] == BlowupLattice::tilde().h()
            && self.is_isometry()
            && self.preserves_c1()
            && self.half_differences_are_roots()
            && self.is_onto_sigma_complement().unwrap_or(false)
    }
}

impl fmt::Display for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["H", "2E1", "2E2", "2E3"];
        let parts: Vec<String> = names
            .iter()
            .zip(&self.images)
            .map(|(n, v)| format!("{n} ↦ {v}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// The map `2E_1 ↦ Ẽ0 - Ẽ1 + Ẽ2 + Ẽ3`, `2E_2 ↦ Ẽ0 + Ẽ1 - Ẽ2 + Ẽ3`,
/// `2E_3 ↦ Ẽ0 + Ẽ1 + Ẽ2 - Ẽ3`, `H ↦ H`.
pub fn standard_correspondence() -> Correspondence {
    let l4 = BlowupLattice::tilde();
    let c = |xs: [i64; 5]| l4.class(xs).expect("rank 5");
    Correspondence::new(vec![
        l4.h(),
        c([0, 1, -1, 1, 1]),
        c([0, 1, 1, -1, 1]),
        c([0, 1, 1, 1, -1]),
    ])
    .expect("four tilde classes")
}

/// Every `c_1`-preserving isometric correspondence, found by exhaustive search.
///
/// Image of `H`: square 1, `c_1`-degree 3, orthogonal to `Σ`. Writing it as
/// `aH + Σ k_i Ẽ_i` gives `Σ k_i = 3 - 3a` and `Σ k_i^2 = a^2 - 1`, and
/// Cauchy-Schwarz over four coordinates forces `(a - 1)(5a - 13) <= 0`,
/// i.e. `a ∈ {1, 2}`. Searching `|a| <= 3` is therefore exhaustive.
///
/// Images of `2E_i`: square -4, orthogonal to the image `h` of `H`. With
/// `h = (a, m)`, `a^2 - |m|^2 = 1`, a class `(v_0, k)` orthogonal to `h` with
/// square -4 has `|k|^2 = v_0^2 + 4` and `|a v_0| <= |k||m|`, which gives
/// `v_0^2 <= 4(a^2 - 1)`.
pub fn enumerate_correspondences() -> Result<Vec<Correspondence>> {
    let l4 = BlowupLattice::tilde();
    let sig = sigma();
    let mut h_images = Vec::new();
    for a in -3..=3 {
        let q = ClassQuery::new(l4, 1, 3).h_degree(a).orthogonal_to(sig.clone());
        h_images.extend(enumerate_classes(&q)?);
    }

    let mut out = Vec::new();
    for h in &h_images {
        let a = h.h_degree();
        let bound = (BigInt::from(4) * (a * a - BigInt::one())).sqrt();
        let bound: i64 = bound.try_into().map_err(|_| Error::SearchTooLarge(format!("{h}")))?;
        let mut doubles = Vec::new();
        for v0 in -bound..=bound {
            let q = ClassQuery::new(l4, -4, 2)
                .h_degree(v0)
                .orthogonal_to(h.clone())
                .orthogonal_to(sig.clone());
            doubles.extend(enumerate_classes(&q)?);
        }
        for x in &doubles {
            for y in &doubles {
                for z in &doubles {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let cand = Correspondence::new(vec![h.clone(), x.clone(), y.clone(), z.clone()])?;
                    if cand.is_isometry()
                        && cand.preserves_c1()
                        && cand.half_differences_are_roots()
                        && cand.is_onto_sigma_complement()?
                    {
                        out.push(cand);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Blow-up sizes `(μ_1, μ_2, μ_3)` of a well-defined `B_3`: each `μ_i > 0`
/// and `μ_i + μ_j < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodVector3 {
    mu: [BigRational; 3],
}

impl PeriodVector3 {
    pub fn new(mu: [BigRational; 3]) -> Result<Self> {
        let check = ball_form_conditions(&mu);
        if let Some(bad) = check
            .failures
            .iter()
            .find(|c| !matches!(c, BallCondition::Triangle { .. }))
        {
            return Err(Error::Domain(bad.to_string()));
        }
        Ok(PeriodVector3 { mu })
    }

    pub fn mu(&self) -> &[BigRational; 3] {
        &self.mu
    }

    pub fn sum_of_squares(&self) -> BigRational {
        sum_of_squares(&self.mu)
    }
}

pub(crate) fn sum_of_squares(xs: &[BigRational]) -> BigRational {
    xs.iter().map(|x| x * x).sum()
}

/// Size parameter `ε > 0` of a rational blow-up; the (-4)-sphere has area `4ε`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EpsilonValue(BigRational);

impl EpsilonValue {
    pub fn new(eps: BigRational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::Domain(format!("ε must be positive, got {eps}")));
        }
        Ok(EpsilonValue(eps))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn blowup_size(&self) -> BigRational {
        &self.0 * BigInt::from(4)
    }
}

/// One of the strict inequalities a valid `(μ̃_0, .., μ̃_3)` must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TildeCondition {
    /// `μ̃_i > 0`.
    Positive(usize),
    /// `1 - Σ μ̃_i^2 > 0`.
    Volume,
    /// `μ̃_0 - (μ̃_1 + μ̃_2 + μ̃_3) > 0`.
    Gap,
    /// `1 - μ̃_0 - μ̃_i > 0`, `i` in 1..=3.
    Effectivity(usize),
}

impl fmt::Display for TildeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TildeCondition::Positive(i) => write!(f, "μ̃{} > 0 fails", subscript(i)),
            TildeCondition::Volume => write!(f, "1 − Σμ̃ᵢ² > 0 fails"),
            TildeCondition::Gap => write!(f, "μ̃₀ − (μ̃₁ + μ̃₂ + μ̃₃) > 0 fails"),
            TildeCondition::Effectivity(i) => write!(f, "1 − μ̃₀ − μ̃{} > 0 fails", subscript(i)),
        }
    }
}

/// Periods `λ = ∫_H`, `μ̃_i = ∫_{Ẽ_i}` on the rational blow-up, with the
/// list of violated inequalities (empty when valid).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodVector4 {
    pub lambda: BigRational,
    pub mu_tilde: [BigRational; 4],
    pub failures: Vec<TildeCondition>,
}

impl PeriodVector4 {
    pub fn new(lambda: BigRational, mu_tilde: [BigRational; 4]) -> Self {
        let failures = tilde_failures(&lambda, &mu_tilde);
        PeriodVector4 {
            lambda,
            mu_tilde,
            failures,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    /// `μ̃_0 - (μ̃_1 + μ̃_2 + μ̃_3)`.
    pub fn gap(&self) -> BigRational {
        let m = &self.mu_tilde;
        &m[0] - &m[1] - &m[2] - &m[3]
    }
}

fn tilde_failures(lambda: &BigRational, m: &[BigRational; 4]) -> Vec<TildeCondition> {
    let mut out = Vec::new();
    for (i, x) in m.iter().enumerate() {
        if !x.is_positive() {
            out.push(TildeCondition::Positive(i));
        }
    }
    if !(lambda * lambda - sum_of_squares(m)).is_positive() {
        out.push(TildeCondition::Volume);
    }
    if !(&m[0] - &m[1] - &m[2] - &m[3]).is_positive() {
        out.push(TildeCondition::Gap);
    }
    for i in 1..=3 {
        if !(lambda - &m[0] - &m[i]).is_positive() {
            out.push(TildeCondition::Effectivity(i));
        }
    }
    out
}

/// `μ̃_0 = (μ_1 + μ_2 + μ_3)/2 + ε`, `μ̃_i = (μ_j + μ_k - μ_i)/2 - ε`, `λ = 1`.
/// Accepts any rationals; validity is reported on the result.
pub fn forward_periods(mu: &[BigRational; 3], eps: &BigRational) -> PeriodVector4 {
    let two = BigRational::from_integer(BigInt::from(2));
    let total: BigRational = mu.iter().sum();
    let m0 = &total / &two + eps;
    let mi = |i: usize| (&total - &mu[i] - &mu[i]) / &two - eps;
    PeriodVector4::new(BigRational::one(), [m0, mi(0), mi(1), mi(2)])
}

pub fn period_forward(p: &PeriodVector3, e: &EpsilonValue) -> PeriodVector4 {
    forward_periods(&p.mu, e.value())
}

/// Output of [`period_inverse`]. `mu` need not be a valid ball; `epsilon`
/// may be non-positive, which [`InversePeriods::epsilon_is_positive`] flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversePeriods {
    pub mu: [BigRational; 3],
    pub epsilon: BigRational,
}

impl InversePeriods {
    pub fn epsilon_is_positive(&self) -> bool {
        self.epsilon.is_positive()
    }
}

/// `μ_i = (μ̃_0 - μ̃_i + μ̃_j + μ̃_k)/2`, `ε = (μ̃_0 - μ̃_1 - μ̃_2 - μ̃_3)/4`.
pub fn period_inverse(q: &PeriodVector4) -> Result<InversePeriods> {
    if !q.lambda.is_one() {
        return Err(Error::Domain(format!(
            "period inverse needs λ = 1, got {}",
            q.lambda
        )));
    }
    let m = &q.mu_tilde;
    let two = BigRational::from_integer(BigInt::from(2));
    let tail: BigRational = m[1..].iter().sum();
    let mu_i = |i: usize| (&m[0] + &tail - &m[i] - &m[i]) / &two;
    Ok(InversePeriods {
        mu: [mu_i(1), mu_i(2), mu_i(3)],
        epsilon: q.gap() / BigRational::from_integer(BigInt::from(4)),
    })
}

/// A constraint that pins the supremum of admissible `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Binding {
    /// `(μ_j + μ_k - μ_i)/2 <= 0`: no blow-up at all.
    Triangle(usize),
    /// `μ̃_i > 0`, `i` in 1..=3.
    Positive(usize),
    /// `ε^2 < (1 - Σμ_i^2)/4`.
    Volume,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Binding::Triangle(k) => {
                let (i, j) = other_two(k);
                write!(f, "μ{} + μ{} > μ{}", subscript(i), subscript(j), subscript(k))
            }
            Binding::Positive(i) => write!(f, "μ̃{} > 0", subscript(i)),
            Binding::Volume => write!(f, "1 − Σμ̃ᵢ² > 0"),
        }
    }
}

pub(crate) fn other_two(k: usize) -> (usize, usize) {
    let mut rest = (1..=3).filter(|&x| x != k);
    (rest.next().expect("3 indices"), rest.next().expect("3 indices"))
}

/// `sup { ε > 0 : forward_periods(p, ε) valid }`. Every constraint is
/// strict, so the supremum is never attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonSupremum {
    pub value: BigRational,
    pub attained: bool,
    pub binding: Vec<Binding>,
}

impl EpsilonSupremum {
    pub fn is_empty(&self) -> bool {
        self.value.is_zero()
    }
}

/// Exact supremum of the admissible blow-up sizes.
///
/// In terms of `ε` the constraints are: `μ̃_i > 0` gives `ε < t_i` with
/// `t_i = (μ_j + μ_k - μ_i)/2`; `1 - μ̃_0 - μ̃_i = 1 - μ_j - μ_k` does not
/// involve `ε`; the gap is `4ε > 0`; and `Σ μ̃^2 = Σ μ^2 + 4ε^2` turns the
/// volume into `4ε^2 < 1 - Σμ^2`, compared here by squaring.
pub fn epsilon_supremum(p: &PeriodVector3) -> Result<EpsilonSupremum> {
    let mu = &p.mu;
    let two = BigRational::from_integer(BigInt::from(2));
    let total: BigRational = mu.iter().sum();
    let t: Vec<BigRational> = (0..3).map(|i| (&total - &mu[i] - &mu[i]) / &two).collect();

    let violated: Vec<Binding> = (0..3)
        .filter(|&i| !t[i].is_positive())
        .map(|i| Binding::Triangle(i + 1))
        .collect();
    if !violated.is_empty() {
        return Ok(EpsilonSupremum {
            value: BigRational::zero(),
            attained: false,
            binding: violated,
        });
    }

    let linear = t.iter().min().expect("three bounds").clone();
    let mut binding: Vec<Binding> = (0..3)
        .filter(|&i| t[i] == linear)
        .map(|i| Binding::Positive(i + 1))
        .collect();
    let volume = BigRational::one() - p.sum_of_squares();
    let four = BigRational::from_integer(BigInt::from(4));
    let lhs = &four * &linear * &linear;
    let value = match lhs.cmp(&volume) {
        std::cmp::Ordering::Less => linear,
        std::cmp::Ordering::Equal => {
            binding.push(Binding::Volume);
            linear
        }
        std::cmp::Ordering::Greater => {
            // Only reachable outside the domain; requires an exact root.
            let root = rational_sqrt(&(volume / four)).ok_or_else(|| {
                Error::Domain("volume-bound supremum is irrational".into())
            })?;
            binding = vec![Binding::Volume];
            root
        }
    };
    Ok(EpsilonSupremum {
        value,
        attained: false,
        binding,
    })
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// `Σ μ̃_i^2 = Σ μ_i^2 + 4ε^2`, i.e. the volume drops by exactly `4ε^2`.
pub fn volume_identity(mu: &[BigRational; 3], eps: &BigRational) -> bool {
    let q = forward_periods(mu, eps);
    let four = BigRational::from_integer(BigInt::from(4));
    sum_of_squares(&q.mu_tilde) == sum_of_squares(mu) + four * eps * eps
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTriple {
    pub b1: u64,
    pub b2_plus: u64,
    pub b2_minus: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Blowdown,
    Blowup,
}

/// `b_2^-` drops by one under rational blow-down and rises under blow-up;
/// `b_1` and `b_2^+` are unchanged.
pub fn betti_transport(x: BettiTriple, direction: Direction) -> Result<BettiTriple> {
    let b2_minus = match direction {
        Direction::Blowdown => x
            .b2_minus
            .checked_sub(1)
            .ok_or_else(|| Error::Domain("b2- underflow on blow-down".into()))?,
        Direction::Blowup => x.b2_minus + 1,
    };
    Ok(BettiTriple { b2_minus, ..x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn mu(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> [BigRational; 3] {
        [ratio(a.0, a.1), ratio(b.0, b.1), ratio(c.0, c.1)]
    }

    fn tenths() -> PeriodVector3 {
        PeriodVector3::new(mu((3, 10), (3, 10), (3, 10))).unwrap()
    }

    #[test]
    fn sigma_invariants() {
        let s = sigma();
        assert_eq!(s.coefficients(), BlowupLattice::tilde().class([0, 1, -1, -1, -1]).unwrap().coefficients());
        assert_eq!(square(&s), BigInt::from(-4));
        assert_eq!(c1_degree(&s), BigInt::from(-2));
        assert!(sigma_class(BlowupLattice::standard(4)).is_err());
    }

    #[test]
    fn standard_correspondence_examples() {
        let c = standard_correspondence();
        let l4 = BlowupLattice::tilde();
        assert_eq!(c.image_of_double(3), &l4.class([0, 1, 1, 1, -1]).unwrap());
        assert_eq!(c.images()[0], l4.h());
        assert_eq!(c1_degree(&c.images()[0]), BigInt::from(3));
        let halves = c.half_differences();
        let (_, h12) = &halves[0];
        assert_eq!(h12.as_ref().unwrap(), &l4.class([0, 0, -1, 1, 0]).unwrap());
        assert!(c.invariants_hold());
    }

    #[test]
    fn correspondence_maps_differences() {
        let c = standard_correspondence();
        let l3 = BlowupLattice::standard(3);
        let e1_minus_e2 = l3.class([0, 1, -1, 0]).unwrap();
        let img = c.apply(&e1_minus_e2).unwrap();
        assert_eq!(img, BlowupLattice::tilde().class([0, 0, -1, 1, 0]).unwrap());
        assert!(c.apply(&l3.e(1)).is_err());
    }

    #[test]
    fn six_correspondences() {
        let all = enumerate_correspondences().unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.contains(&standard_correspondence()));
        assert!(all.iter().all(Correspondence::invariants_hold));
    }

    #[test]
    fn forward_examples() {
        let q = period_forward(&tenths(), &EpsilonValue::new(ratio(1, 20)).unwrap());
        assert_eq!(
            q.mu_tilde,
            [ratio(1, 2), ratio(1, 10), ratio(1, 10), ratio(1, 10)]
        );
        assert!(q.is_valid());
        assert_eq!(q.gap(), ratio(4, 20));

        let q = period_forward(&tenths(), &EpsilonValue::new(ratio(3, 20)).unwrap());
        assert_eq!(q.mu_tilde[1..], [ratio(0, 1), ratio(0, 1), ratio(0, 1)]);
        assert!(!q.is_valid());
        assert_eq!(q.failures[0], TildeCondition::Positive(1));
        assert_eq!(q.failures[0].to_string(), "μ̃₁ > 0 fails");
    }

    #[test]
    fn inverse_examples() {
        let q = PeriodVector4::new(
            BigRational::one(),
            [ratio(1, 2), ratio(1, 10), ratio(1, 10), ratio(1, 10)],
        );
        let inv = period_inverse(&q).unwrap();
        assert_eq!(inv.mu, mu((3, 10), (3, 10), (3, 10)));
        assert_eq!(inv.epsilon, ratio(1, 20));
        assert!(inv.epsilon_is_positive());

        let q = PeriodVector4::new(
            BigRational::one(),
            [ratio(1, 2), ratio(1, 6), ratio(1, 6), ratio(1, 6)],
        );
        let inv = period_inverse(&q).unwrap();
        assert!(inv.epsilon.is_zero());
        assert!(!inv.epsilon_is_positive());

        let q = PeriodVector4::new(ratio(2, 1), [ratio(1, 2), ratio(1, 6), ratio(1, 6), ratio(1, 6)]);
        assert!(period_inverse(&q).is_err());
    }

    #[test]
    fn supremum_examples() {
        let s = epsilon_supremum(&tenths()).unwrap();
        assert_eq!(s.value, ratio(3, 20));
        assert!(!s.attained);
        assert_eq!(s.binding, vec![Binding::Positive(1), Binding::Positive(2), Binding::Positive(3)]);

        let p = PeriodVector3::new(mu((1, 5), (1, 5), (1, 2))).unwrap();
        let s = epsilon_supremum(&p).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.binding, vec![Binding::Triangle(3)]);

        let p = PeriodVector3::new(mu((1, 5), (3, 10), (1, 2))).unwrap();
        assert!(epsilon_supremum(&p).unwrap().is_empty());
    }

    #[test]
    fn supremum_other_constraints_slack() {
        // At ε = 3/20 only positivity of μ̃_1..3 is tight.
        let q = forward_periods(tenths().mu(), &ratio(3, 20));
        assert_eq!(q.failures, vec![
            TildeCondition::Positive(1),
            TildeCondition::Positive(2),
            TildeCondition::Positive(3),
        ]);
    }

    #[test]
    fn invalid_ball_rejected() {
        assert!(PeriodVector3::new(mu((3, 5), (3, 5), (1, 10))).is_err());
        assert!(PeriodVector3::new(mu((0, 1), (1, 5), (1, 5))).is_err());
    }

    #[test]
    fn volume_examples() {
        let m = mu((3, 10), (3, 10), (3, 10));
        assert!(volume_identity(&m, &ratio(1, 20)));
        let q = forward_periods(&m, &ratio(1, 20));
        assert_eq!(sum_of_squares(&q.mu_tilde), ratio(28, 100));
        let q0 = forward_periods(&m, &BigRational::zero());
        assert_eq!(sum_of_squares(&q0.mu_tilde), sum_of_squares(&m));
    }

    #[test]
    fn betti_examples() {
        let x4 = BettiTriple { b1: 0, b2_plus: 1, b2_minus: 4 };
        let x3 = betti_transport(x4, Direction::Blowdown).unwrap();
        assert_eq!(x3, BettiTriple { b1: 0, b2_plus: 1, b2_minus: 3 });
        assert_eq!(betti_transport(x3, Direction::Blowup).unwrap(), x4);
        let cp2 = BettiTriple { b1: 0, b2_plus: 1, b2_minus: 0 };
        assert!(betti_transport(cp2, Direction::Blowdown).is_err());
    }

    #[test]
    fn epsilon_must_be_positive() {
        assert!(EpsilonValue::new(BigRational::zero()).is_err());
        assert_eq!(EpsilonValue::new(ratio(1, 20)).unwrap().blowup_size(), ratio(1, 5));
    }
}
