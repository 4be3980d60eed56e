//! Sublattices given by explicit generator lists: Gram matrices,
//! discriminants, inclusion indices and quotient groups.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{pairing, BlowupLattice, LatticeClass, Mod2Class};
use crate::matrix::{self, IntMatrix};

/// Symmetric matrix of pairings between generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GramMatrix(#[serde(with = "crate::rational::serde_int::matrix")] pub IntMatrix);

impl GramMatrix {
    pub fn entries(&self) -> &IntMatrix {
        &self.0
    }

    pub fn is_symmetric(&self) -> bool {
        let m = &self.0;
        (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == m[j][i]))
    }

    pub fn determinant(&self) -> BigInt {
        matrix::determinant(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: BlowupLattice,
    generators: Vec<LatticeClass>,
}

impl Sublattice {
    /// Checks that generators live in `ambient` and are independent over `Q`.
    pub fn new(ambient: BlowupLattice, generators: Vec<LatticeClass>) -> Result<Self> {
        for g in &generators {
            if g.lattice() != ambient {
                return Err(Error::LatticeMismatch {
                    left: ambient,
                    right: g.lattice(),
                });
            }
        }
        let s = Sublattice { ambient, generators };
        if matrix::rank(&s.coefficient_rows()) != s.generators.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(s)
    }

    /// The whole lattice with its standard basis.
    pub fn full(ambient: BlowupLattice) -> Self {
        Sublattice {
            ambient,
            generators: ambient.all_basis_vectors(),
        }
    }

    /// `Z<v>` for a single nonzero class.
    pub fn cyclic(v: LatticeClass) -> Result<Self> {
        Self::new(v.lattice(), vec![v])
    }

    /// `{x : x · v = 0 for all v in classes}`, computed as an integer kernel.
    pub fn orthogonal_complement(ambient: BlowupLattice, classes: &[LatticeClass]) -> Result<Self> {
        let functionals = classes
            .iter()
            .map(|v| {
                if v.lattice() != ambient {
                    return Err(Error::LatticeMismatch {
                        left: ambient,
                        right: v.lattice(),
                    });
                }
                Ok(v.coefficients()
                    .iter()
                    .enumerate()
                    .map(|(slot, c)| c * ambient.form_sign(slot))
                    .collect())
            })
            .collect::<Result<Vec<Vec<BigInt>>>>()?;
        let kernel = matrix::integer_kernel(&functionals, ambient.rank());
        let generators = kernel
            .into_iter()
            .map(|row| ambient.class(row))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient, generators)
    }

    /// Concatenation of two mutually orthogonal sublattices.
    pub fn orthogonal_sum(&self, other: &Sublattice) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::LatticeMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        for a in &self.generators {
            for b in &other.generators {
                if !pairing(a, b)?.is_zero() {
                    return Err(Error::Domain(format!("{a} and {b} are not orthogonal")));
                }
            }
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Self::new(self.ambient, gens)
    }

    pub fn ambient(&self) -> BlowupLattice {
        self.ambient
    }

    pub fn generators(&self) -> &[LatticeClass] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    fn coefficient_rows(&self) -> IntMatrix {
        self.generators
            .iter()
            .map(|g| g.coefficients().to_vec())
            .collect()
    }

    pub fn gram(&self) -> GramMatrix {
        let g = &self.generators;
        GramMatrix(
            g.iter()
                .map(|a| {
                    g.iter()
                        .map(|b| pairing(a, b).expect("generators share the ambient lattice"))
                        .collect()
                })
                .collect(),
        )
    }

    /// `|det Gram|`.
    pub fn discriminant(&self) -> Result<BigInt> {
        let d = self.gram().determinant().abs();
        if d.is_zero() {
            return Err(Error::DependentGenerators);
        }
        Ok(d)
    }

    /// Integer coordinates of `v` in the generators, if `v` lies in the span.
    pub fn coordinates(&self, v: &LatticeClass) -> Result<Option<Vec<BigInt>>> {
        if v.lattice() != self.ambient {
            return Err(Error::LatticeMismatch {
                left: self.ambient,
                right: v.lattice(),
            });
        }
        Ok(matrix::solve_integral(&self.coefficient_rows(), v.coefficients()))
    }

    pub fn contains(&self, v: &LatticeClass) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    /// Whether `k * v` lies in this sublattice.
    pub fn multiple_membership(&self, v: &LatticeClass, k: u64) -> Result<bool> {
        if k == 0 {
            return Err(Error::Domain("multiplier must be positive".into()));
        }
        self.contains(&v.scale(&BigInt::from(k)))
    }

    /// Mutual containment of generators.
    pub fn same_span(&self, other: &Sublattice) -> Result<bool> {
        for g in &other.generators {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rows: coordinates of `sub`'s generators in `full`'s generators.
pub fn inclusion_matrix(sub: &Sublattice, full: &Sublattice) -> Result<IntMatrix> {
    if sub.ambient != full.ambient {
        return Err(Error::LatticeMismatch {
            left: sub.ambient,
            right: full.ambient,
        });
    }
    if sub.rank() != full.rank() {
        return Err(Error::NotContained(format!(
            "rank {} sublattice vs rank {} lattice",
            sub.rank(),
            full.rank()
        )));
    }
    sub.generators
        .iter()
        .map(|g| {
            full.coordinates(g)?
                .ok_or_else(|| Error::NotContained(format!("{g} is not an integral combination")))
        })
        .collect()
}

/// `[full : sub]`: product of the Smith invariant factors of the inclusion
/// matrix, cross-checked against its determinant.
pub fn inclusion_index(sub: &Sublattice, full: &Sublattice) -> Result<BigInt> {
    let m = inclusion_matrix(sub, full)?;
    let factors = matrix::smith_invariant_factors(&m);
    if factors.len() != m.len() {
        return Err(Error::DependentGenerators);
    }
    let index: BigInt = factors.iter().product();
    let det = matrix::determinant(&m).abs();
    if index != det {
        return Err(Error::Domain(format!(
            "Smith normal form gives index {index} but |det| = {det}"
        )));
    }
    Ok(index)
}

/// Invariant factors greater than one of `full / sub`.
pub fn quotient_structure(sub: &Sublattice, full: &Sublattice) -> Result<Vec<BigInt>> {
    let m = inclusion_matrix(sub, full)?;
    Ok(matrix::smith_invariant_factors(&m)
        .into_iter()
        .filter(|d| !d.is_one())
        .collect())
}

/// Kernel of `λ ↦ λ · w mod 2`.
#[derive(Clone, Debug)]
pub struct Mod2Kernel {
    pub sublattice: Sublattice,
    /// 2 for a nonzero functional, 1 when `w ≡ 0` (kernel is everything).
    pub index: u8,
}

pub fn kernel_of_mod2_pairing(lattice: BlowupLattice, w: &Mod2Class) -> Result<Mod2Kernel> {
    if w.lift().lattice() != lattice {
        return Err(Error::LatticeMismatch {
            left: lattice,
            right: w.lift().lattice(),
        });
    }
    // The form is diagonal with ±1 entries, so λ · w ≡ Σ λ_i w_i mod 2.
    let bits = w.reduction();
    let Some(pivot) = bits.iter().position(|&b| b) else {
        return Ok(Mod2Kernel {
            sublattice: Sublattice::full(lattice),
            index: 1,
        });
    };
    let basis = lattice.all_basis_vectors();
    let mut gens = Vec::with_capacity(lattice.rank());
    for (slot, e) in basis.iter().enumerate() {
        if slot == pivot {
            gens.push(e.scale(&BigInt::from(2)));
        } else if bits[slot] {
            gens.push(e.sub(&basis[pivot])?);
        } else {
            gens.push(e.clone());
        }
    }
    Ok(Mod2Kernel {
        sublattice: Sublattice::new(lattice, gens)?,
        index: 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l3() -> BlowupLattice {
        BlowupLattice::standard(3)
    }

    fn c(lat: BlowupLattice, xs: &[i64]) -> LatticeClass {
        lat.class(xs.iter().copied()).unwrap()
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn lagrangian_class() -> Mod2Class {
        Mod2Class::from_bits(l3(), &[false, true, true, true]).unwrap()
    }

    #[test]
    fn mod2_kernel_of_e1_e2_e3() {
        let k = kernel_of_mod2_pairing(l3(), &lagrangian_class()).unwrap();
        assert_eq!(k.index, 2);
        let expected = Sublattice::new(
            l3(),
            vec![
                c(l3(), &[1, 0, 0, 0]),
                c(l3(), &[0, 1, -1, 0]),
                c(l3(), &[0, 0, 1, -1]),
                c(l3(), &[0, 0, 0, 2]),
            ],
        )
        .unwrap();
        assert!(k.sublattice.same_span(&expected).unwrap());
        assert_eq!(k.sublattice.discriminant().unwrap(), BigInt::from(4));
    }

    #[test]
    fn mod2_kernel_rank_one() {
        let l1 = BlowupLattice::standard(1);
        let w = Mod2Class::from_lift(l1.e(1));
        let k = kernel_of_mod2_pairing(l1, &w).unwrap();
        let expected =
            Sublattice::new(l1, vec![c(l1, &[1, 0]), c(l1, &[0, 2])]).unwrap();
        assert!(k.sublattice.same_span(&expected).unwrap());
    }

    #[test]
    fn mod2_kernel_of_zero_is_full() {
        let k = kernel_of_mod2_pairing(l3(), &Mod2Class::from_lift(l3().zero())).unwrap();
        assert_eq!(k.index, 1);
        assert_eq!(k.sublattice, Sublattice::full(l3()));
    }

    #[test]
    fn gram_examples() {
        let l4 = BlowupLattice::tilde();
        let sigma = Sublattice::cyclic(c(l4, &[0, 1, -1, -1, -1])).unwrap();
        assert_eq!(sigma.gram().0, vec![big(&[-4])]);
        let l1 = BlowupLattice::standard(1);
        let s = Sublattice::new(l1, vec![c(l1, &[1, 0]), c(l1, &[0, 2])]).unwrap();
        assert_eq!(s.gram().0, vec![big(&[1, 0]), big(&[0, -4])]);
        let a2 = Sublattice::new(l3(), vec![c(l3(), &[0, 1, -1, 0]), c(l3(), &[0, 0, 1, -1])]).unwrap();
        assert_eq!(a2.gram().0, vec![big(&[-2, 1]), big(&[1, -2])]);
        assert!(a2.gram().is_symmetric());
    }

    #[test]
    fn dependent_generators_rejected() {
        let r = Sublattice::new(l3(), vec![c(l3(), &[0, 1, 0, 0]), c(l3(), &[0, 2, 0, 0])]);
        assert_eq!(r, Err(Error::DependentGenerators));
    }

    #[test]
    fn index_and_quotient_of_mod2_kernel() {
        let k = kernel_of_mod2_pairing(l3(), &lagrangian_class()).unwrap().sublattice;
        let full = Sublattice::full(l3());
        assert_eq!(inclusion_index(&k, &full).unwrap(), BigInt::from(2));
        assert_eq!(quotient_structure(&k, &full).unwrap(), big(&[2]));
        assert_eq!(inclusion_index(&full, &full).unwrap(), BigInt::one());
        assert!(quotient_structure(&full, &full).unwrap().is_empty());
    }

    #[test]
    fn inclusion_errors() {
        let full = Sublattice::full(l3());
        let line = Sublattice::cyclic(l3().h()).unwrap();
        assert!(matches!(inclusion_index(&line, &full), Err(Error::NotContained(_))));
        let k = kernel_of_mod2_pairing(l3(), &lagrangian_class()).unwrap().sublattice;
        // full is not inside the index-2 kernel
        assert!(matches!(inclusion_index(&full, &k), Err(Error::NotContained(_))));
    }

    #[test]
    fn orthogonal_sum_requires_orthogonality() {
        let a = Sublattice::cyclic(l3().e(1)).unwrap();
        let b = Sublattice::cyclic(c(l3(), &[0, 1, 1, 0])).unwrap();
        assert!(a.orthogonal_sum(&b).is_err());
        let d = Sublattice::cyclic(l3().e(2)).unwrap();
        let s = a.orthogonal_sum(&d).unwrap();
        assert_eq!(s.discriminant().unwrap(), BigInt::one());
    }

    #[test]
    fn membership_with_multiplier() {
        let k = kernel_of_mod2_pairing(l3(), &lagrangian_class()).unwrap().sublattice;
        assert!(!k.multiple_membership(&l3().e(1), 1).unwrap());
        assert!(k.multiple_membership(&l3().e(1), 2).unwrap());
        assert!(k.multiple_membership(&l3().h(), 1).unwrap());
        assert!(k.multiple_membership(&l3().h(), 0).is_err());
    }
}
