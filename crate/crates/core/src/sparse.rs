use crate::basis::BasisElement;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Finite linear combination of basis elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    terms: BTreeMap<BasisElement, Complex64>,
    prune: f64,
}

impl SparseVector {
    pub fn new() -> Self {
        SparseVector::default()
    }

    /// Amplitudes with magnitude at or below `prune` are dropped on insertion.
    pub fn with_prune(prune: f64) -> Self {
        SparseVector {
            terms: BTreeMap::new(),
            prune,
        }
    }

    pub fn basis(e: BasisElement) -> Self {
        let mut v = SparseVector::new();
        v.add_term(e, Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisElement, Complex64)>>(it: I) -> Self {
        let mut v = SparseVector::new();
        for (e, c) in it {
            v.add_term(e, c);
        }
        v
    }

    pub fn add_term(&mut self, e: BasisElement, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v.norm() <= self.prune {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(slot) => {
                if c.norm() > self.prune {
                    slot.insert(c);
                }
            }
        }
    }

    pub fn get(&self, e: &BasisElement) -> Complex64 {
        self.terms.get(e).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisElement, &Complex64)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<BasisElement, Complex64> {
        self.terms
    }

    pub fn scale(&self, c: Complex64) -> SparseVector {
        SparseVector::from_terms(self.terms.iter().map(|(e, a)| (e.clone(), a * c)))
    }

    pub fn axpy(&mut self, c: Complex64, other: &SparseVector) {
        for (e, a) in other.iter() {
            self.add_term(e.clone(), c * a);
        }
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// ⟨self, other⟩, antilinear in the first argument.
    pub fn inner(&self, other: &SparseVector) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, a) in small.iter() {
            if let Some(b) = large.terms.get(e) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop amplitudes with magnitude ≤ tol.
    pub fn pruned(&self, tol: f64) -> SparseVector {
        SparseVector::from_terms(
            self.terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(e, c)| (e.clone(), *c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::FormWord;

    fn e(b: &[u32]) -> BasisElement {
        BasisElement::new(b.to_vec(), FormWord::EMPTY)
    }

    #[test]
    fn cancellation_removes_term() {
        let mut v = SparseVector::basis(e(&[1]));
        v.add_term(e(&[1]), Complex64::new(-1.0, 0.0));
        assert!(v.is_empty());
    }

    #[test]
    fn inner_is_antilinear_left() {
        let i = Complex64::new(0.0, 1.0);
        let u = SparseVector::basis(e(&[0])).scale(i);
        let v = SparseVector::basis(e(&[0]));
        assert_eq!(u.inner(&v), -i);
        assert_eq!(v.inner(&u), i);
    }
}
