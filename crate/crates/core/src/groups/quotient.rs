use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use super::{parse_params, Element, GroupKind};
use crate::defaults;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuotientKind {
    /// `Z_m^d`.
    Lattice { d: usize, m: usize },
    /// `(Z/2) wr Z_m^d`.
    Lamplighter { d: usize, m: usize },
}

impl QuotientKind {
    pub fn parent(self) -> GroupKind {
        match self {
            QuotientKind::Lattice { d, .. } => GroupKind::Lattice { d },
            QuotientKind::Lamplighter { d, .. } => GroupKind::Lamplighter { d },
        }
    }

    /// `m^d`, or `2^(m^d) m^d` for lamplighters; `None` on overflow.
    pub fn size(self) -> Option<usize> {
        match self {
            QuotientKind::Lattice { d, m } => m.checked_pow(d as u32),
            QuotientKind::Lamplighter { d, m } => {
                let p = m.checked_pow(d as u32)?;
                1usize.checked_shl(p as u32).filter(|_| p < 63)?.checked_mul(p)
            }
        }
    }
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientKind::Lattice { d, m } => write!(f, "quotient:lattice:d={d}:m={m}"),
            QuotientKind::Lamplighter { d, m } => write!(f, "quotient:lamplighter:d={d}:m={m}"),
        }
    }
}

impl FromStr for QuotientKind {
    type Err = Error;

    /// Parses `quotient:<kind>:d=<d>:m=<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        if parts.next() != Some("quotient") {
            return Err(Error::parse(s, "expected 'quotient:' prefix"));
        }
        let head = parts.next().unwrap_or_default();
        let params = parse_params(s, parts)?;
        let get = |key: &str, default: Option<usize>| -> Result<usize> {
            match params.get(key) {
                Some(v) => v.parse().map_err(|_| Error::parse(s, format!("bad integer for {key}"))),
                None => default.ok_or_else(|| Error::parse(s, format!("missing {key}="))),
            }
        };
        let (d, m) = (get("d", Some(1))?, get("m", None)?);
        match head {
            "lattice" => Ok(QuotientKind::Lattice { d, m }),
            "lamplighter" => Ok(QuotientKind::Lamplighter { d, m }),
            other => Err(Error::usage(format!("no finite quotient for kind '{other}'"))),
        }
    }
}

/// A finite quotient with elements indexed `0..size`, index 0 the identity.
#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    kind: QuotientKind,
    /// `m^d`: number of torus positions.
    cells: usize,
    size: usize,
    lengths: Vec<u32>,
}

impl FiniteQuotient {
    pub fn new(kind: QuotientKind) -> Result<Self> {
        Self::with_cap(kind, defaults::QUOTIENT_SIZE_CAP)
    }

    pub fn with_cap(kind: QuotientKind, cap: usize) -> Result<Self> {
        let (QuotientKind::Lattice { d, m } | QuotientKind::Lamplighter { d, m }) = kind;
        if m < 3 {
            return Err(Error::domain(format!("modulus {m} below 3")));
        }
        if d == 0 {
            return Err(Error::domain("dimension 0"));
        }
        let size = kind
            .size()
            .filter(|&s| s <= cap)
            .ok_or_else(|| Error::resource(format!("{kind} has more than {cap} elements")))?;
        let mut q = FiniteQuotient {
            kind,
            cells: m.pow(d as u32),
            size,
            lengths: Vec::new(),
        };
        q.lengths = q.search_lengths();
        Ok(q)
    }

    pub fn kind(&self) -> QuotientKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        0
    }

    fn dm(&self) -> (usize, usize) {
        let (QuotientKind::Lattice { d, m } | QuotientKind::Lamplighter { d, m }) = self.kind;
        (d, m)
    }

    fn is_lamplighter(&self) -> bool {
        matches!(self.kind, QuotientKind::Lamplighter { .. })
    }

    /// Index of a torus position given coordinates already reduced mod m.
    fn cell(&self, coords: impl Iterator<Item = usize>) -> usize {
        let (_, m) = self.dm();
        coords.fold(0, |acc, c| acc * m + c)
    }

    fn coords(&self, mut cell: usize) -> Vec<usize> {
        let (d, m) = self.dm();
        let mut out = vec![0; d];
        for i in (0..d).rev() {
            out[i] = cell % m;
            cell /= m;
        }
        out
    }

    fn add_cells(&self, a: usize, b: usize) -> usize {
        let (_, m) = self.dm();
        let (ca, cb) = (self.coords(a), self.coords(b));
        self.cell(ca.iter().zip(&cb).map(|(x, y)| (x + y) % m))
    }

    fn neg_cell(&self, a: usize) -> usize {
        let (_, m) = self.dm();
        self.cell(self.coords(a).into_iter().map(|x| (m - x) % m))
    }

    fn split(&self, i: usize) -> (u64, usize) {
        ((i / self.cells) as u64, i % self.cells)
    }

    /// Translates a lamp mask by the torus offset `shift`.
    fn shift_mask(&self, mask: u64, shift: usize) -> u64 {
        if shift == 0 {
            return mask;
        }
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.add_cells(bit, shift);
        }
        out
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        if !self.is_lamplighter() {
            return self.add_cells(a, b);
        }
        let (ma, ka) = self.split(a);
        let (mb, kb) = self.split(b);
        let mask = ma ^ self.shift_mask(mb, ka);
        mask as usize * self.cells + self.add_cells(ka, kb)
    }

    pub fn invert(&self, a: usize) -> usize {
        if !self.is_lamplighter() {
            return self.neg_cell(a);
        }
        let (mask, k) = self.split(a);
        let nk = self.neg_cell(k);
        self.shift_mask(mask, nk) as usize * self.cells + nk
    }

    /// Image of an element of the parent group.
    pub fn project(&self, g: &Element) -> Result<usize> {
        let (d, m) = self.dm();
        let reduce = |x: i64| x.rem_euclid(m as i64) as usize;
        match (self.kind, g) {
            (QuotientKind::Lattice { .. }, Element::Lattice(c)) if c.len() == d => {
                Ok(self.cell(c.iter().map(|&x| reduce(x))))
            }
            (QuotientKind::Lamplighter { .. }, Element::Lamplighter { lamps, marker }) if marker.len() == d => {
                let mut mask = 0u64;
                for lamp in lamps.chunks(d) {
                    mask ^= 1 << self.cell(lamp.iter().map(|&x| reduce(x)));
                }
                Ok(mask as usize * self.cells + self.cell(marker.iter().map(|&x| reduce(x))))
            }
            _ => Err(Error::usage(format!("{g} does not project to {}", self.kind))),
        }
    }

    /// Canonical parent-group representative with coordinates in `[0, m)`.
    pub fn element(&self, i: usize) -> Element {
        let to_i64 = |v: Vec<usize>| v.into_iter().map(|x| x as i64).collect::<Vec<_>>();
        if !self.is_lamplighter() {
            return Element::Lattice(to_i64(self.coords(i)));
        }
        let (mask, k) = self.split(i);
        let lamps: Vec<Vec<i64>> = (0..self.cells)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| to_i64(self.coords(b)))
            .collect();
        Element::lamplighter(&lamps, &to_i64(self.coords(k)))
    }

    /// Word length in the quotient Cayley graph of the projected generators.
    pub fn word_length(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    /// Images of the parent generators, excluding the identity.
    pub fn generators(&self) -> Vec<usize> {
        let parent = super::generators(self.kind.parent());
        parent[1..].iter().map(|g| self.project(g).expect("generators project")).collect()
    }

    fn search_lengths(&self) -> Vec<u32> {
        let gens = self.generators();
        let mut lengths = vec![u32::MAX; self.size];
        lengths[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = self.multiply(x, s);
                if lengths[y] == u32::MAX {
                    lengths[y] = lengths[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        lengths
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Group;
    use proptest::prelude::*;

    #[test]
    fn sizes() {
        let q = |s: &str| FiniteQuotient::new(s.parse().unwrap());
        assert_eq!(q("quotient:lattice:d=1:m=8").unwrap().size(), 8);
        assert_eq!(q("quotient:lamplighter:d=1:m=3").unwrap().size(), 24);
        assert_eq!(q("quotient:lattice:d=2:m=5").unwrap().size(), 25);
        assert_eq!(q("quotient:lamplighter:d=2:m=3").unwrap().size(), 512 * 9);
        assert!(matches!(q("quotient:lamplighter:d=1:m=10"), Err(Error::Resource(_))));
        assert!(matches!(q("quotient:lattice:d=1:m=2"), Err(Error::Domain(_))));
        assert!(matches!("quotient:free:k=2:m=3".parse::<QuotientKind>(), Err(Error::Usage(_))));
    }

    #[test]
    fn projection_reduces_coordinates() {
        let q = FiniteQuotient::new("quotient:lattice:d=2:m=5".parse().unwrap()).unwrap();
        let i = q.project(&Element::lattice(&[7, -1])).unwrap();
        assert_eq!(q.element(i), Element::lattice(&[2, 4]));
    }

    #[test]
    fn quotient_metric_is_connected_and_symmetric() {
        let q = FiniteQuotient::new("quotient:lamplighter:d=1:m=4".parse().unwrap()).unwrap();
        for i in 0..q.size() {
            assert_ne!(q.word_length(i), u32::MAX);
            assert_eq!(q.word_length(q.invert(i)), q.word_length(i));
            assert_eq!(q.multiply(i, q.invert(i)), 0);
        }
        let l = FiniteQuotient::new("quotient:lattice:d=1:m=9".parse().unwrap()).unwrap();
        assert_eq!(l.word_length(l.project(&Element::lattice(&[5])).unwrap()), 4);
    }

    fn parent_element(d: usize) -> impl Strategy<Value = Element> {
        (prop::collection::vec(prop::collection::vec(-12i64..12, d), 0..6), prop::collection::vec(-12i64..12, d))
            .prop_map(|(lamps, marker)| Element::lamplighter(&lamps, &marker))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn projection_is_a_homomorphism(g in parent_element(1), h in parent_element(1), m in 3usize..8) {
            let q = FiniteQuotient::new(QuotientKind::Lamplighter { d: 1, m }).unwrap();
            let parent = Group::new(GroupKind::Lamplighter { d: 1 }).unwrap();
            let gh = parent.multiply(&g, &h).unwrap();
            prop_assert_eq!(q.project(&gh).unwrap(), q.multiply(q.project(&g).unwrap(), q.project(&h).unwrap()));
        }

        #[test]
        fn projection_is_a_homomorphism_2d(g in parent_element(2), h in parent_element(2)) {
            let q = FiniteQuotient::new(QuotientKind::Lamplighter { d: 2, m: 3 }).unwrap();
            let gh = super::super::multiply_unchecked(&g, &h).unwrap();
            prop_assert_eq!(q.project(&gh).unwrap(), q.multiply(q.project(&g).unwrap(), q.project(&h).unwrap()));
        }

        #[test]
        fn lattice_projection_is_a_homomorphism(a in prop::collection::vec(-50i64..50, 2), b in prop::collection::vec(-50i64..50, 2)) {
            let q = FiniteQuotient::new(QuotientKind::Lattice { d: 2, m: 7 }).unwrap();
            let ab = super::super::multiply_unchecked(&Element::Lattice(a.clone()), &Element::Lattice(b.clone())).unwrap();
            prop_assert_eq!(q.project(&ab).unwrap(), q.multiply(q.project(&Element::Lattice(a)).unwrap(), q.project(&Element::Lattice(b)).unwrap()));
        }
    }
}
