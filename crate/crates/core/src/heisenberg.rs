//! The Heisenberg group E of order q⁵ on GF(q²) × GF(q) × GF(q²) with
//!
//! ```text
//! (a, γ, b) ∘ (a′, γ′, b′) = (a + a′, γ + γ′ + trace(b^q a′), b + b′).
//! ```
//!
//! Elements have a canonical index in [0, q⁵): γ-major, then b, then a, so
//! that `index = (pos(γ)·q² + b)·q² + a` with `pos(γ)` the position of γ in
//! the subfield enumeration. Geometry works on these indices.

use std::fmt;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement {
    pub a: FieldElem,
    pub gamma: FieldElem,
    pub b: FieldElem,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: FieldElem::ZERO, gamma: FieldElem::ZERO, b: FieldElem::ZERO };

    pub fn new(a: FieldElem, gamma: FieldElem, b: FieldElem) -> Self {
        GroupElement { a, gamma, b }
    }
}

/// The group E over a fixed field, with its canonical indexing.
#[derive(Clone, Debug)]
pub struct GroupCtx {
    field: FieldCtx,
}

impl GroupCtx {
    pub fn new(field: FieldCtx) -> Self {
        GroupCtx { field }
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// |E| = q⁵.
    pub fn order(&self) -> usize {
        let q = self.field.q() as usize;
        q.pow(5)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }

    pub fn is_valid(&self, g: &GroupElement) -> bool {
        let n = self.field.order() as usize;
        g.a.index() < n && g.b.index() < n && g.gamma.index() < n && self.field.is_in_subfield(g.gamma)
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let f = &self.field;
        let twist = f.trace(f.mul(f.frobenius(g.b), h.a));
        GroupElement { a: f.add(g.a, h.a), gamma: f.add(f.add(g.gamma, h.gamma), twist), b: f.add(g.b, h.b) }
    }

    /// (−a, −γ + trace(b^q a), −b).
    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let f = &self.field;
        GroupElement {
            a: f.neg(g.a),
            gamma: f.add(f.neg(g.gamma), f.trace(f.mul(f.frobenius(g.b), g.a))),
            b: f.neg(g.b),
        }
    }

    /// g⁻¹ h⁻¹ g h.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let gi = self.inverse(g);
        let hi = self.inverse(h);
        self.compose(&self.compose(&self.compose(&gi, &hi), g), h)
    }

    pub fn power(&self, g: &GroupElement, n: u64) -> GroupElement {
        let mut acc = GroupElement::IDENTITY;
        let mut base = *g;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.compose(&acc, &base);
            }
            base = self.compose(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn commutes(&self, g: &GroupElement, h: &GroupElement) -> bool {
        self.compose(g, h) == self.compose(h, g)
    }

    #[inline]
    pub fn index(&self, g: &GroupElement) -> u32 {
        let n = self.field.order();
        let pos = self.field.subfield_position(g.gamma).expect("gamma lies in GF(q)") as u32;
        (pos * n + g.b.index() as u32) * n + g.a.index() as u32
    }

    #[inline]
    pub fn element(&self, index: u32) -> GroupElement {
        let n = self.field.order();
        assert!((index as usize) < self.order(), "group index {index} out of range");
        let a = self.field.elem(index % n);
        let rest = index / n;
        let b = self.field.elem(rest % n);
        let gamma = self.field.subfield()[(rest / n) as usize];
        GroupElement { a, gamma, b }
    }

    /// Composition on canonical indices.
    #[inline]
    pub fn compose_idx(&self, g: u32, h: u32) -> u32 {
        self.index(&self.compose(&self.element(g), &self.element(h)))
    }

    /// Every element of E in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as u32).map(move |i| self.element(i))
    }

    /// Generators (β,0,0) and (0,0,β) for β running over the power basis of
    /// GF(q²) over GF(p). Together with their commutators they span E.
    pub fn generators(&self) -> Vec<GroupElement> {
        let f = &self.field;
        let basis: Vec<FieldElem> = (0..f.degree())
            .map(|i| {
                let mut c = vec![0; f.degree()];
                c[i] = 1;
                f.from_coeffs(&c).expect("unit vector is a valid element")
            })
            .collect();
        let zero = FieldElem::ZERO;
        basis
            .iter()
            .map(|&x| GroupElement::new(x, zero, zero))
            .chain(basis.iter().map(|&x| GroupElement::new(zero, zero, x)))
            .collect()
    }

    /// The centre Z(E), computed by commutation: against all of E when
    /// |E| ≤ 243, otherwise against [`GroupCtx::generators`].
    pub fn centre(&self) -> Vec<GroupElement> {
        if self.order() <= 243 {
            self.centre_exhaustive()
        } else {
            self.centre_by_generators()
        }
    }

    pub fn centre_exhaustive(&self) -> Vec<GroupElement> {
        let all: Vec<GroupElement> = self.elements().collect();
        all.iter().filter(|z| all.iter().all(|g| self.commutes(z, g))).copied().collect()
    }

    pub fn centre_by_generators(&self) -> Vec<GroupElement> {
        let gens = self.generators();
        self.elements().filter(|z| gens.iter().all(|g| self.commutes(z, g))).collect()
    }

    /// "a|gamma|b" in the field element format.
    pub fn format_elem(&self, g: &GroupElement) -> String {
        let f = &self.field;
        format!("{}|{}|{}", f.format_elem(g.a), f.format_elem(g.gamma), f.format_elem(g.b))
    }

    pub fn parse_elem(&self, s: &str) -> Result<GroupElement> {
        let parts: Vec<&str> = s.split('|').collect();
        let [a, gamma, b] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected a|gamma|b, got {s:?}")));
        };
        let g = GroupElement::new(self.field.parse_elem(a)?, self.field.parse_elem(gamma)?, self.field.parse_elem(b)?);
        if !self.field.is_in_subfield(g.gamma) {
            return Err(Error::Parse(format!("gamma {gamma:?} is not in GF(q)")));
        }
        Ok(g)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a.index(), self.gamma.index(), self.b.index())
    }
}
