//! Exact rational divisors supported on the marked curves.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::model::{CurveId, ModelError, SurfaceModel};
use crate::rational::Rat;

/// A formal rational combination of marked curves. Zero coefficients are
/// never stored, so equality is equality of supports and coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QDivisor {
    coeffs: BTreeMap<CurveId, Rat>,
}

impl QDivisor {
    pub fn zero() -> Self {
        QDivisor::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (CurveId, Rat)>) -> Self {
        let mut d = QDivisor::zero();
        for (id, a) in pairs {
            d.add_term(id, a);
        }
        d
    }

    pub fn single(id: CurveId, a: Rat) -> Self {
        QDivisor::from_pairs([(id, a)])
    }

    pub fn add_term(&mut self, id: CurveId, a: Rat) {
        if a.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(id.clone()).or_insert_with(Rat::zero);
        *entry += a;
        if entry.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn coeff(&self, id: &CurveId) -> Rat {
        self.coeffs.get(id).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|a| a.is_positive())
    }

    pub fn support(&self) -> Vec<CurveId> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CurveId, &Rat)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, a: &Rat) -> QDivisor {
        if a.is_zero() {
            return QDivisor::zero();
        }
        QDivisor {
            coeffs: self
                .coeffs
                .iter()
                .map(|(id, c)| (id.clone(), c * a))
                .collect(),
        }
    }

    /// Intersection number with one marked curve.
    pub fn dot_curve(&self, m: &SurfaceModel, c: &CurveId) -> Result<Rat, ModelError> {
        let mut total = Rat::zero();
        for (id, a) in &self.coeffs {
            total += a * &m.pair_ids(id, c)?;
        }
        Ok(total)
    }

    /// Intersection number with another divisor.
    pub fn dot(&self, m: &SurfaceModel, other: &QDivisor) -> Result<Rat, ModelError> {
        let mut total = Rat::zero();
        for (id, a) in &other.coeffs {
            total += a * &self.dot_curve(m, id)?;
        }
        Ok(total)
    }

    /// True when every coefficient of `self` is >= the matching coefficient
    /// of `other` (comparison includes curves present in only one of them).
    pub fn dominates(&self, other: &QDivisor) -> bool {
        let mut ids: Vec<&CurveId> = self.coeffs.keys().collect();
        ids.extend(other.coeffs.keys());
        ids.sort();
        ids.dedup();
        ids.into_iter().all(|id| self.coeff(id) >= other.coeff(id))
    }
}

impl FromIterator<(CurveId, Rat)> for QDivisor {
    fn from_iter<T: IntoIterator<Item = (CurveId, Rat)>>(iter: T) -> Self {
        QDivisor::from_pairs(iter)
    }
}

impl Add for &QDivisor {
    type Output = QDivisor;
    fn add(self, rhs: &QDivisor) -> QDivisor {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QDivisor {
    type Output = QDivisor;
    fn add(mut self, rhs: QDivisor) -> QDivisor {
        self += &rhs;
        self
    }
}

impl AddAssign<&QDivisor> for QDivisor {
    fn add_assign(&mut self, rhs: &QDivisor) {
        for (id, a) in &rhs.coeffs {
            self.add_term(id.clone(), a.clone());
        }
    }
}

impl Sub for &QDivisor {
    type Output = QDivisor;
    fn sub(self, rhs: &QDivisor) -> QDivisor {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for QDivisor {
    type Output = QDivisor;
    fn sub(mut self, rhs: QDivisor) -> QDivisor {
        self -= &rhs;
        self
    }
}

impl SubAssign<&QDivisor> for QDivisor {
    fn sub_assign(&mut self, rhs: &QDivisor) {
        for (id, a) in &rhs.coeffs {
            self.add_term(id.clone(), -a);
        }
    }
}

impl Neg for &QDivisor {
    type Output = QDivisor;
    fn neg(self) -> QDivisor {
        QDivisor {
            coeffs: self.coeffs.iter().map(|(id, a)| (id.clone(), -a)).collect(),
        }
    }
}

impl Mul<&Rat> for &QDivisor {
    type Output = QDivisor;
    fn mul(self, a: &Rat) -> QDivisor {
        self.scale(a)
    }
}
