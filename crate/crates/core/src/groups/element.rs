use std::fmt;

use crate::error::{Error, Result};

/// A group element in canonical form.
///
/// Equal elements are structurally equal: free words are reduced and
/// lamp configurations are sorted without duplicates. The derived `Ord`
/// is the total order used for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// A point of `Z^d`.
    Lattice(Vec<i64>),
    /// `(x, y, z)` with `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
    Heisenberg([i64; 3]),
    /// Lit lamps (flattened, `d` coordinates each, lexicographically sorted)
    /// and the marker position.
    Lamplighter { lamps: Vec<i64>, marker: Vec<i64> },
    /// Reduced word; letter `+i` is generator `i`, `-i` its inverse.
    Free(Vec<i8>),
    /// `(n, a, b)` in `Z^2 x| Z`, `Z` acting by `[[2,1],[1,1]]`.
    Sol([i64; 3]),
}

impl Element {
    pub fn lattice(coords: &[i64]) -> Self {
        Element::Lattice(coords.to_vec())
    }

    /// Builds a lamplighter element from arbitrary lamp positions; positions
    /// listed an even number of times cancel.
    pub fn lamplighter(lamps: &[Vec<i64>], marker: &[i64]) -> Self {
        let d = marker.len();
        let mut flat = Vec::new();
        for lamp in lamps {
            assert_eq!(lamp.len(), d, "lamp dimension must match marker");
            toggle_lamp(&mut flat, lamp);
        }
        Element::Lamplighter {
            lamps: flat,
            marker: marker.to_vec(),
        }
    }

    /// Builds a reduced free word from letters in `±1..=±k`.
    pub fn free_word(letters: &[i8]) -> Self {
        let mut out: Vec<i8> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(l != 0, "free letters are nonzero");
            push_reduced(&mut out, l);
        }
        Element::Free(out)
    }

    /// Iterates over the lit lamps of a lamplighter element.
    pub fn lamp_positions(&self) -> Option<impl Iterator<Item = &[i64]>> {
        match self {
            Element::Lamplighter { lamps, marker } => {
                let d = marker.len().max(1);
                Some(lamps.chunks(d))
            }
            _ => None,
        }
    }

    /// Canonical byte encoding: a tag byte followed by zigzag varints.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Element::Lattice(c) => {
                out.push(0);
                put_varint(&mut out, c.len() as u64);
                c.iter().for_each(|&x| put_signed(&mut out, x));
            }
            Element::Heisenberg(c) => {
                out.push(1);
                c.iter().for_each(|&x| put_signed(&mut out, x));
            }
            Element::Lamplighter { lamps, marker } => {
                out.push(2);
                put_varint(&mut out, marker.len() as u64);
                marker.iter().for_each(|&x| put_signed(&mut out, x));
                put_varint(&mut out, lamps.len() as u64);
                lamps.iter().for_each(|&x| put_signed(&mut out, x));
            }
            Element::Free(w) => {
                out.push(3);
                put_varint(&mut out, w.len() as u64);
                w.iter().for_each(|&x| put_signed(&mut out, x as i64));
            }
            Element::Sol(c) => {
                out.push(4);
                c.iter().for_each(|&x| put_signed(&mut out, x));
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let tag = r.byte()?;
        let el = match tag {
            0 => {
                let d = r.varint()? as usize;
                Element::Lattice((0..d).map(|_| r.signed()).collect::<Result<_>>()?)
            }
            1 => Element::Heisenberg([r.signed()?, r.signed()?, r.signed()?]),
            2 => {
                let d = r.varint()? as usize;
                let marker = (0..d).map(|_| r.signed()).collect::<Result<Vec<_>>>()?;
                let n = r.varint()? as usize;
                let lamps = (0..n).map(|_| r.signed()).collect::<Result<Vec<_>>>()?;
                if d == 0 || lamps.len() % d != 0 {
                    return Err(Error::parse("element bytes", "bad lamp block"));
                }
                let positions: Vec<Vec<i64>> = lamps.chunks(d).map(<[i64]>::to_vec).collect();
                Element::lamplighter(&positions, &marker)
            }
            3 => {
                let n = r.varint()? as usize;
                let letters = (0..n)
                    .map(|_| r.signed().map(|x| x as i8))
                    .collect::<Result<Vec<_>>>()?;
                if letters.contains(&0) {
                    return Err(Error::parse("element bytes", "zero free letter"));
                }
                Element::free_word(&letters)
            }
            4 => Element::Sol([r.signed()?, r.signed()?, r.signed()?]),
            t => return Err(Error::parse("element bytes", format!("unknown tag {t}"))),
        };
        if r.pos != bytes.len() {
            return Err(Error::parse("element bytes", "trailing bytes"));
        }
        Ok(el)
    }

    pub fn to_hex(&self) -> String {
        self.encode().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 {
            return Err(Error::parse(s, "odd hex length"));
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|e| Error::parse(s, e.to_string())))
            .collect::<Result<Vec<u8>>>()?;
        Element::decode(&bytes)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Lattice(c) => write!(f, "{c:?}"),
            Element::Heisenberg(c) | Element::Sol(c) => write!(f, "({}, {}, {})", c[0], c[1], c[2]),
            Element::Lamplighter { lamps, marker } => {
                let d = marker.len().max(1);
                let lit: Vec<&[i64]> = lamps.chunks(d).collect();
                write!(f, "({lit:?}, {marker:?})")
            }
            Element::Free(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                for &l in w {
                    let c = (b'a' + (l.unsigned_abs() - 1)) as char;
                    if l > 0 {
                        write!(f, "{c}")?;
                    } else {
                        write!(f, "{c}'")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// XORs one lamp into a sorted flat lamp list.
pub(crate) fn toggle_lamp(flat: &mut Vec<i64>, pos: &[i64]) {
    let d = pos.len();
    let n = flat.len() / d;
    // binary search over chunks
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * d..mid * d + d].cmp(pos) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => {
                flat.drain(mid * d..mid * d + d);
                return;
            }
        }
    }
    let at = lo * d;
    flat.splice(at..at, pos.iter().copied());
}

pub(crate) fn push_reduced(word: &mut Vec<i8>, letter: i8) {
    if word.last() == Some(&-letter) {
        word.pop();
    } else {
        word.push(letter);
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_signed(out: &mut Vec<u8>, v: i64) {
    put_varint(out, ((v << 1) ^ (v >> 63)) as u64);
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::parse("element bytes", "truncated"))?;
        self.pos += 1;
        Ok(b)
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::parse("element bytes", "varint overflow"))
    }

    fn signed(&mut self) -> Result<i64> {
        let v = self.varint()?;
        Ok(((v >> 1) as i64) ^ -((v & 1) as i64))
    }
}
