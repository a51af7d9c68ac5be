//! Basis states ψ_β ⊗ (exterior word) and the exterior-algebra sign rules.
//!
//! Generators are ordered holomorphic first, then anti-holomorphic, then
//! central. A word is stored as three bitmasks so the canonical order is
//! implicit and the sign of inserting or removing a generator is a popcount.

use crate::error::{Error, Result};
use std::fmt;

/// Multi-index for blocks (entries may be −1).
pub type MultiIndex = Vec<i32>;

/// Dimensions of the ladder model: `modes` ladder pairs, each contributing one
/// holomorphic and one anti-holomorphic generator, plus `central` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    pub modes: usize,
    pub central: usize,
}

impl Space {
    pub fn new(modes: usize, central: usize) -> Result<Self> {
        if modes == 0 || modes > 31 || central > 31 {
            return Err(Error::Input(format!(
                "space needs 1..=31 modes and at most 31 central generators, got {modes}/{central}"
            )));
        }
        Ok(Space { modes, central })
    }

    /// Total number of exterior generators.
    pub fn generators(&self) -> usize {
        2 * self.modes + self.central
    }

    pub fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.modes {
            return Err(Error::IndexOutOfRange {
                what: "mode",
                index: j,
                size: self.modes,
            });
        }
        Ok(())
    }

    pub fn check_generator(&self, g: Generator) -> Result<()> {
        match g {
            Generator::Holo(j) | Generator::Anti(j) => self.check_mode(j),
            Generator::Central(q) if q >= self.central => Err(Error::IndexOutOfRange {
                what: "central generator",
                index: q,
                size: self.central,
            }),
            Generator::Central(_) => Ok(()),
        }
    }

    /// All generators in canonical order.
    pub fn all_generators(&self) -> Vec<Generator> {
        let mut out = Vec::with_capacity(self.generators());
        out.extend((0..self.modes).map(Generator::Holo));
        out.extend((0..self.modes).map(Generator::Anti));
        out.extend((0..self.central).map(Generator::Central));
        out
    }
}

/// One exterior generator τ^j, τ^{j̄} or a central τ^{w_q}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Holo(usize),
    Anti(usize),
    Central(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Holo(j) => write!(f, "t{}", j + 1),
            Generator::Anti(j) => write!(f, "tb{}", j + 1),
            Generator::Central(q) => write!(f, "w{}", q + 1),
        }
    }
}

#[inline]
fn below(bit: usize) -> u32 {
    (1u32 << bit) - 1
}

/// Exterior word in canonical order; the sign lives in the coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormWord {
    pub holo: u32,
    pub anti: u32,
    pub central: u32,
}

impl FormWord {
    pub const EMPTY: FormWord = FormWord {
        holo: 0,
        anti: 0,
        central: 0,
    };

    pub fn degree(&self) -> u32 {
        self.holo.count_ones() + self.anti.count_ones() + self.central.count_ones()
    }

    pub fn contains(&self, g: Generator) -> bool {
        match g {
            Generator::Holo(j) => self.holo >> j & 1 == 1,
            Generator::Anti(j) => self.anti >> j & 1 == 1,
            Generator::Central(q) => self.central >> q & 1 == 1,
        }
    }

    /// Number of generators strictly before `g` in canonical order.
    fn preceding(&self, g: Generator) -> u32 {
        match g {
            Generator::Holo(j) => (self.holo & below(j)).count_ones(),
            Generator::Anti(j) => self.holo.count_ones() + (self.anti & below(j)).count_ones(),
            Generator::Central(q) => {
                self.holo.count_ones()
                    + self.anti.count_ones()
                    + (self.central & below(q)).count_ones()
            }
        }
    }

    fn toggled(&self, g: Generator) -> FormWord {
        let mut w = *self;
        match g {
            Generator::Holo(j) => w.holo ^= 1 << j,
            Generator::Anti(j) => w.anti ^= 1 << j,
            Generator::Central(q) => w.central ^= 1 << q,
        }
        w
    }

    /// g ∧ self, or None if g already occurs.
    pub fn wedge(&self, g: Generator) -> Option<(FormWord, f64)> {
        if self.contains(g) {
            return None;
        }
        let sign = if self.preceding(g).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((self.toggled(g), sign))
    }

    /// Interior product removing g, or None if absent.
    pub fn contract(&self, g: Generator) -> Option<(FormWord, f64)> {
        if !self.contains(g) {
            return None;
        }
        let sign = if self.preceding(g).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((self.toggled(g), sign))
    }

    /// g₁ ∧ g₂ ∧ … ∧ g_r, or None if a generator repeats.
    pub fn from_generators(gens: &[Generator]) -> Option<(FormWord, f64)> {
        let mut word = FormWord::EMPTY;
        let mut sign = 1.0;
        for &g in gens.iter().rev() {
            let (w, s) = word.wedge(g)?;
            word = w;
            sign *= s;
        }
        Some((word, sign))
    }

    /// Generators present, in canonical order.
    pub fn generators(&self, space: &Space) -> Vec<Generator> {
        space
            .all_generators()
            .into_iter()
            .filter(|g| self.contains(*g))
            .collect()
    }
}

/// ψ_β ⊗ (canonical exterior word).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub beta: Vec<u32>,
    pub form: FormWord,
}

impl BasisElement {
    pub fn new(beta: Vec<u32>, form: FormWord) -> Self {
        BasisElement { beta, form }
    }

    pub fn vacuum(modes: usize) -> Self {
        BasisElement {
            beta: vec![0; modes],
            form: FormWord::EMPTY,
        }
    }

    pub fn total(&self) -> u32 {
        self.beta.iter().sum()
    }

    /// U_jj-eigenvalues γ = β − I + J.
    pub fn gamma(&self) -> MultiIndex {
        self.beta
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                b as i32 - (self.form.holo >> j & 1) as i32 + (self.form.anti >> j & 1) as i32
            })
            .collect()
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "psi(")?;
        for (i, b) in self.beta.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")?;
        let mut parts = Vec::new();
        for j in 0..32 {
            if self.form.holo >> j & 1 == 1 {
                parts.push(Generator::Holo(j).to_string());
            }
        }
        for j in 0..32 {
            if self.form.anti >> j & 1 == 1 {
                parts.push(Generator::Anti(j).to_string());
            }
        }
        for q in 0..32 {
            if self.form.central >> q & 1 == 1 {
                parts.push(Generator::Central(q).to_string());
            }
        }
        if parts.is_empty() {
            write!(f, " 1")
        } else {
            write!(f, " {}", parts.join("^"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_orders_and_signs() {
        let t2 = FormWord::from_generators(&[Generator::Holo(1)]).unwrap().0;
        let (w, s) = t2.wedge(Generator::Holo(0)).unwrap();
        assert_eq!(w.holo, 0b11);
        assert_eq!(s, 1.0);
        let (_, s) = FormWord::from_generators(&[Generator::Holo(0)])
            .unwrap()
            .0
            .wedge(Generator::Holo(1))
            .unwrap();
        assert_eq!(s, -1.0);
        assert!(w.wedge(Generator::Holo(1)).is_none());
    }

    #[test]
    fn anti_before_central() {
        let tw = FormWord::from_generators(&[Generator::Central(0)]).unwrap().0;
        let (w, s) = tw.wedge(Generator::Anti(0)).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!((w.anti, w.central), (1, 1));
    }

    #[test]
    fn from_generators_sign() {
        let (_, s) = FormWord::from_generators(&[Generator::Central(0), Generator::Holo(0)]).unwrap();
        assert_eq!(s, -1.0);
        assert!(FormWord::from_generators(&[Generator::Holo(0), Generator::Holo(0)]).is_none());
    }

    #[test]
    fn gamma_of_element() {
        let (form, _) = FormWord::from_generators(&[Generator::Holo(0), Generator::Anti(1)]).unwrap();
        let e = BasisElement::new(vec![2, 0], form);
        assert_eq!(e.gamma(), vec![1, 1]);
    }
}
