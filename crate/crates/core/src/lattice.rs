//! Integral homology lattices of blown-up projective planes.
//!
//! A [`BlowupLattice`] is `Z<H, E_1, .., E_n>` (or `Z<H, Ẽ_0, .., Ẽ_3>`)
//! with the diagonal form `(+1, -1, .., -1)`. Classes carry their lattice
//! so that arithmetic between different lattices is rejected.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Naming convention for the exceptional generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// `H, E_1, .., E_n`.
    Standard,
    /// `H, Ẽ_0, Ẽ_1, Ẽ_2, Ẽ_3`, the lattice of the rational blow-up.
    Tilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlowupLattice {
    n_exceptional: usize,
    basis: Basis,
}

impl BlowupLattice {
    pub fn standard(n_exceptional: usize) -> Self {
        BlowupLattice {
            n_exceptional,
            basis: Basis::Standard,
        }
    }

    /// The rank-5 lattice `Z<H, Ẽ_0, .., Ẽ_3>`.
    pub fn tilde() -> Self {
        BlowupLattice {
            n_exceptional: 4,
            basis: Basis::Tilde,
        }
    }

    pub fn n_exceptional(&self) -> usize {
        self.n_exceptional
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn rank(&self) -> usize {
        self.n_exceptional + 1
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let mut labels = vec!["H".to_string()];
        for slot in 1..=self.n_exceptional {
            labels.push(self.exceptional_label(slot));
        }
        labels
    }

    fn exceptional_label(&self, slot: usize) -> String {
        match self.basis {
            Basis::Standard => format!("E{slot}"),
            Basis::Tilde => format!("Ẽ{}", slot - 1),
        }
    }

    /// Diagonal entry of the intersection form at coordinate `slot`.
    pub fn form_sign(&self, slot: usize) -> i64 {
        if slot == 0 {
            1
        } else {
            -1
        }
    }

    pub fn class<I, T>(&self, coefficients: I) -> Result<LatticeClass>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coefficients: Vec<BigInt> = coefficients.into_iter().map(Into::into).collect();
        if coefficients.len() != self.rank() {
            return Err(Error::RankMismatch {
                lattice: *self,
                expected: self.rank(),
                got: coefficients.len(),
            });
        }
        Ok(LatticeClass {
            lattice: *self,
            coefficients,
        })
    }

    pub fn zero(&self) -> LatticeClass {
        LatticeClass {
            lattice: *self,
            coefficients: vec![BigInt::zero(); self.rank()],
        }
    }

    /// Basis vector at coordinate `slot` (0 is `H`).
    pub fn basis_vector(&self, slot: usize) -> LatticeClass {
        assert!(slot < self.rank(), "slot {slot} out of range for {self}");
        let mut v = self.zero();
        v.coefficients[slot] = BigInt::one();
        v
    }

    pub fn h(&self) -> LatticeClass {
        self.basis_vector(0)
    }

    /// Exceptional generator by its label index: `E_i` (1-based) in the
    /// standard basis, `Ẽ_i` (0-based) in the tilde basis.
    pub fn e(&self, index: usize) -> LatticeClass {
        let slot = match self.basis {
            Basis::Standard => {
                assert!(index >= 1, "standard exceptional classes are E1..En");
                index
            }
            Basis::Tilde => index + 1,
        };
        self.basis_vector(slot)
    }

    pub fn all_basis_vectors(&self) -> Vec<LatticeClass> {
        (0..self.rank()).map(|s| self.basis_vector(s)).collect()
    }

    /// `3H - ΣE_i`.
    pub fn c1(&self) -> LatticeClass {
        let mut v = self.zero();
        v.coefficients[0] = BigInt::from(3);
        for c in v.coefficients.iter_mut().skip(1) {
            *c = BigInt::from(-1);
        }
        v
    }
}

impl fmt::Display for BlowupLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z<{}>", self.basis_labels().join(", "))
    }
}

/// An integral class in a [`BlowupLattice`]. Serializes as
/// `{"basis": ["H", "E1", ..], "coefficients": [..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ClassJson", try_from = "ClassJson")]
pub struct LatticeClass {
    lattice: BlowupLattice,
    coefficients: Vec<BigInt>,
}

impl LatticeClass {
    pub fn lattice(&self) -> BlowupLattice {
        self.lattice
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn h_degree(&self) -> &BigInt {
        &self.coefficients[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    fn same_lattice(&self, other: &LatticeClass) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                left: self.lattice,
                right: other.lattice,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &LatticeClass) -> Result<LatticeClass> {
        self.same_lattice(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &LatticeClass) -> Result<LatticeClass> {
        self.same_lattice(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &LatticeClass, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> LatticeClass {
        LatticeClass {
            lattice: self.lattice,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> LatticeClass {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> LatticeClass {
        LatticeClass {
            lattice: self.lattice,
            coefficients: self.coefficients.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division by `k`, if every coefficient is divisible.
    pub fn divide_exact(&self, k: &BigInt) -> Option<LatticeClass> {
        if k.is_zero() || self.coefficients.iter().any(|c| !c.is_multiple_of(k)) {
            return None;
        }
        Some(LatticeClass {
            lattice: self.lattice,
            coefficients: self.coefficients.iter().map(|c| c / k).collect(),
        })
    }

    /// Sum of `k_i * v_i`; all terms must share one lattice.
    pub fn combination<'a>(
        lattice: BlowupLattice,
        terms: impl IntoIterator<Item = (BigInt, &'a LatticeClass)>,
    ) -> Result<LatticeClass> {
        let mut acc = lattice.zero();
        for (k, v) in terms {
            acc = acc.add(&v.scale(&k))?;
        }
        Ok(acc)
    }

    /// Mod-2 reduction of the coefficient vector.
    pub fn reduce_mod2(&self) -> Vec<bool> {
        self.coefficients.iter().map(|c| c.is_odd()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    basis: Vec<String>,
    #[serde(with = "crate::rational::serde_int::vec")]
    coefficients: Vec<BigInt>,
}

impl From<LatticeClass> for ClassJson {
    fn from(v: LatticeClass) -> Self {
        ClassJson {
            basis: v.lattice.basis_labels(),
            coefficients: v.coefficients,
        }
    }
}

impl TryFrom<ClassJson> for LatticeClass {
    type Error = Error;

    fn try_from(raw: ClassJson) -> Result<Self> {
        let n = raw.basis.len().saturating_sub(1);
        let lattice = if raw.basis.get(1).map(String::as_str) == Some("Ẽ0") {
            BlowupLattice::tilde()
        } else {
            BlowupLattice::standard(n)
        };
        if lattice.basis_labels() != raw.basis {
            return Err(Error::Domain(format!("unknown basis {:?}", raw.basis)));
        }
        lattice.class(raw.coefficients)
    }
}

impl Ord for LatticeClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coefficients
            .cmp(&other.coefficients)
            .then_with(|| self.lattice.cmp(&other.lattice))
    }
}

impl PartialOrd for LatticeClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.lattice.basis_labels();
        let mut wrote = false;
        for (c, label) in self.coefficients.iter().zip(&labels) {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (wrote, c.is_negative()) {
                (false, false) => {}
                (false, true) => write!(f, "-")?,
                (true, _) => write!(f, " {sign} ")?,
            }
            if magnitude.is_one() {
                write!(f, "{label}")?;
            } else {
                write!(f, "{magnitude}{label}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Intersection pairing `a_0 b_0 - Σ a_i b_i`.
pub fn pairing(a: &LatticeClass, b: &LatticeClass) -> Result<BigInt> {
    a.same_lattice(b)?;
    Ok(a.coefficients
        .iter()
        .zip(&b.coefficients)
        .enumerate()
        .map(|(slot, (x, y))| x * y * a.lattice.form_sign(slot))
        .sum())
}

pub fn square(a: &LatticeClass) -> BigInt {
    pairing(a, a).expect("a class always shares its own lattice")
}

/// `c_1 · a = 3 a_0 + Σ a_i`.
pub fn c1_degree(a: &LatticeClass) -> BigInt {
    pairing(&a.lattice.c1(), a).expect("c1 lives in the class's lattice")
}

pub fn is_primitive(a: &LatticeClass) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroClass);
    }
    let g = a
        .coefficients
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c));
    Ok(g.is_one())
}

/// A mod-2 homology class together with a chosen integral lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mod2Class {
    lift: LatticeClass,
    reduction: Vec<bool>,
}

impl Mod2Class {
    pub fn from_lift(lift: LatticeClass) -> Self {
        let reduction = lift.reduce_mod2();
        Mod2Class { lift, reduction }
    }

    /// The 0/1 lift of a bit vector.
    pub fn from_bits(lattice: BlowupLattice, bits: &[bool]) -> Result<Self> {
        let lift = lattice.class(bits.iter().map(|&b| i64::from(b)))?;
        Ok(Self::from_lift(lift))
    }

    pub fn lift(&self) -> &LatticeClass {
        &self.lift
    }

    pub fn reduction(&self) -> &[bool] {
        &self.reduction
    }

    pub fn is_zero(&self) -> bool {
        self.reduction.iter().all(|b| !b)
    }

    /// Mod-2 value of the pairing with an integral class.
    pub fn evaluate(&self, v: &LatticeClass) -> Result<bool> {
        Ok(pairing(&self.lift, v)?.is_odd())
    }
}

impl fmt::Display for Mod2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] mod 2", self.lift)
    }
}

/// `(lift · lift) mod 4`, well defined on mod-2 classes.
pub fn pontrjagin_square(m: &Mod2Class) -> u8 {
    let r = square(&m.lift).mod_floor(&BigInt::from(4));
    r.to_u8().expect("residue mod 4")
}

/// Constraint on the `H` coefficient that makes an enumeration finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HConstraint {
    Degree(BigInt),
    OrthogonalToH,
}

impl HConstraint {
    fn degree(&self) -> BigInt {
        match self {
            HConstraint::Degree(a) => a.clone(),
            HConstraint::OrthogonalToH => BigInt::zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassQuery {
    pub lattice: BlowupLattice,
    pub square: BigInt,
    pub c1_degree: BigInt,
    pub orthogonal_to: Vec<LatticeClass>,
    pub h_constraint: Option<HConstraint>,
    pub primitive_only: bool,
}

impl ClassQuery {
    pub fn new(lattice: BlowupLattice, square: i64, c1_degree: i64) -> Self {
        ClassQuery {
            lattice,
            square: square.into(),
            c1_degree: c1_degree.into(),
            orthogonal_to: Vec::new(),
            h_constraint: None,
            primitive_only: false,
        }
    }

    pub fn orthogonal_to(mut self, v: LatticeClass) -> Self {
        self.orthogonal_to.push(v);
        self
    }

    pub fn h_degree(mut self, a: i64) -> Self {
        self.h_constraint = Some(HConstraint::Degree(a.into()));
        self
    }

    pub fn orthogonal_to_h(mut self) -> Self {
        self.h_constraint = Some(HConstraint::OrthogonalToH);
        self
    }

    pub fn primitive(mut self, yes: bool) -> Self {
        self.primitive_only = yes;
        self
    }

    /// The explicit constraint, or orthogonality to `H` when `H` itself is
    /// listed among the orthogonality classes.
    pub fn effective_h_constraint(&self) -> Option<HConstraint> {
        if let Some(h) = &self.h_constraint {
            return Some(h.clone());
        }
        let h = self.lattice.h();
        self.orthogonal_to
            .contains(&h)
            .then_some(HConstraint::OrthogonalToH)
    }

    /// The coefficient box half-width `isqrt(a^2 - square)`, or `None` when
    /// the level set is empty.
    pub fn coefficient_bound(&self) -> Result<Option<BigInt>> {
        let a = self.h_degree_value()?;
        let budget = &a * &a - &self.square;
        if budget.is_negative() {
            return Ok(None);
        }
        Ok(Some(budget.sqrt()))
    }

    fn h_degree_value(&self) -> Result<BigInt> {
        let h = self.effective_h_constraint().ok_or_else(|| {
            Error::UnboundedQuery(
                "the form is indefinite, so fix the H-degree or require orthogonality to H".into(),
            )
        })?;
        Ok(h.degree())
    }
}


/// All classes matching the query, sorted lexicographically.
///
/// With `H`-coefficient `a` fixed, `Σ k_i^2 = a^2 - square`, so the search is
/// a finite walk over integer points of a sphere; coordinates are assigned
/// left to right and pruned by the remaining norm budget and by
/// Cauchy-Schwarz on the remaining `c_1` sum.
pub fn enumerate_classes(query: &ClassQuery) -> Result<Vec<LatticeClass>> {
    let lattice = query.lattice;
    for v in &query.orthogonal_to {
        if v.lattice() != lattice {
            return Err(Error::LatticeMismatch {
                left: lattice,
                right: v.lattice(),
            });
        }
    }
    let Some(_) = query.coefficient_bound()? else {
        return Ok(Vec::new());
    };
    let a = query.h_degree_value()?;
    let too_large = || Error::SearchTooLarge(format!("H-degree {a}, square {}", query.square));
    let budget = (&a * &a - &query.square).to_i64().ok_or_else(too_large)?;
    // c1 · v = 3a + Σ k_i
    let sum_target = (&query.c1_degree - BigInt::from(3) * &a)
        .to_i64()
        .ok_or_else(too_large)?;

    let n = lattice.n_exceptional();
    let mut found = Vec::new();
    let mut partial = Vec::with_capacity(n);
    search(n, budget, sum_target, &mut partial, &mut |ks| {
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(a.clone());
        coeffs.extend(ks.iter().map(|&k| BigInt::from(k)));
        found.push(LatticeClass {
            lattice,
            coefficients: coeffs,
        });
    });

    let mut out = Vec::new();
    for v in found {
        let mut keep = true;
        for w in &query.orthogonal_to {
            if !pairing(&v, w)?.is_zero() {
                keep = false;
                break;
            }
        }
        if keep && query.primitive_only && !(!v.is_zero() && is_primitive(&v)?) {
            keep = false;
        }
        if keep {
            out.push(v);
        }
    }
    out.sort();
    Ok(out)
}

fn search(
    remaining_slots: usize,
    budget: i64,
    sum_target: i64,
    partial: &mut Vec<i64>,
    emit: &mut impl FnMut(&[i64]),
) {
    if remaining_slots == 0 {
        if budget == 0 && sum_target == 0 {
            emit(partial);
        }
        return;
    }
    // (Σ k)^2 <= slots * Σ k^2
    if (sum_target as i128).pow(2) > remaining_slots as i128 * budget as i128 {
        return;
    }
    let bound = budget.sqrt();
    for k in -bound..=bound {
        partial.push(k);
        search(remaining_slots - 1, budget - k * k, sum_target - k, partial, emit);
        partial.pop();
    }
}
