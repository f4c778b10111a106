use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::AlgebraError;

/// The integers with a finite set of positive integers inverted.
///
/// An empty set is plain `Z`. Rings are compared by their inverted sets; two
/// rings can be combined only when one set contains the other, and the result
/// is the larger ring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoeffRing {
    inverted: BTreeSet<u64>,
}

impl CoeffRing {
    pub fn integers() -> Self {
        Self::default()
    }

    /// `Z[1/n]`. Inverting 1 is the same as inverting nothing.
    pub fn localized_at(n: u64) -> Result<Self, AlgebraError> {
        Self::with_inverted([n])
    }

    pub fn with_inverted(inverted: impl IntoIterator<Item = u64>) -> Result<Self, AlgebraError> {
        let mut set = BTreeSet::new();
        for n in inverted {
            match n {
                0 => return Err(AlgebraError::InvalidRing("cannot invert 0".into())),
                1 => {}
                n => {
                    set.insert(n);
                }
            }
        }
        Ok(Self { inverted: set })
    }

    pub fn inverted(&self) -> &BTreeSet<u64> {
        &self.inverted
    }

    pub fn is_integers(&self) -> bool {
        self.inverted.is_empty()
    }

    pub fn contains_ring(&self, other: &CoeffRing) -> bool {
        self.inverted.is_superset(&other.inverted)
    }

    /// The smaller of two nested rings' common extension.
    pub fn join(&self, other: &CoeffRing) -> Result<CoeffRing, AlgebraError> {
        if self.contains_ring(other) {
            Ok(self.clone())
        } else if other.contains_ring(self) {
            Ok(other.clone())
        } else {
            Err(AlgebraError::IncompatibleRings {
                left: self.clone(),
                right: other.clone(),
            })
        }
    }

    /// Whether every prime dividing the denominator of `value` divides some
    /// inverted integer.
    pub fn contains(&self, value: &BigRational) -> bool {
        let mut den = value.denom().abs();
        if den.is_one() {
            return true;
        }
        for &n in &self.inverted {
            let n = BigInt::from(n);
            loop {
                let g = den.gcd(&n);
                if g.is_one() {
                    break;
                }
                den /= g;
            }
            if den.is_one() {
                return true;
            }
        }
        false
    }

    pub(crate) fn check(&self, value: &BigRational) -> Result<(), AlgebraError> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(AlgebraError::NotInRing {
                coeff: value.to_string(),
                ring: self.clone(),
            })
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted.is_empty() {
            return f.write_str("Z");
        }
        f.write_str("Z[")?;
        for (i, n) in self.inverted.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "1/{n}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn membership_follows_prime_support() {
        let z6 = CoeffRing::localized_at(6).unwrap();
        assert!(z6.contains(&q(1, 4)));
        assert!(z6.contains(&q(5, 27)));
        assert!(z6.contains(&q(7, 12)));
        assert!(!z6.contains(&q(1, 5)));
        assert!(CoeffRing::integers().contains(&q(-3, 1)));
        assert!(!CoeffRing::integers().contains(&q(1, 2)));
    }

    #[test]
    fn join_requires_containment() {
        let z = CoeffRing::integers();
        let z2 = CoeffRing::localized_at(2).unwrap();
        let z3 = CoeffRing::localized_at(3).unwrap();
        let z23 = CoeffRing::with_inverted([2, 3]).unwrap();
        assert_eq!(z.join(&z2).unwrap(), z2);
        assert_eq!(z23.join(&z3).unwrap(), z23);
        assert!(matches!(
            z2.join(&z3),
            Err(AlgebraError::IncompatibleRings { .. })
        ));
    }

    #[test]
    fn inverting_one_is_trivial() {
        assert_eq!(CoeffRing::localized_at(1).unwrap(), CoeffRing::integers());
        assert!(CoeffRing::localized_at(0).is_err());
        assert_eq!(CoeffRing::with_inverted([2, 3]).unwrap().to_string(), "Z[1/2,1/3]");
    }
}
