//! Finitely generated groups: law, word metric, balls, finite quotients.
//!
//! Each kind carries one fixed symmetric generating set containing the
//! identity. Constants in every downstream bound depend on this choice:
//!
//! | kind | generators |
//! |---|---|
//! | `lattice(d)` | `0`, `±e_i` |
//! | `heisenberg3` | identity, `(±1,0,0)`, `(0,±1,0)` |
//! | `lamplighter(d)` | identity, marker shifts `±e_i`, toggle at the marker |
//! | `free(k)` | identity, the `k` letters and their inverses |
//! | `sol` | identity, `±(1,0,0)`, `±(0,1,0)`, `±(0,0,1)` |
//!
//! Word length is closed-form for lattices, free groups and the
//! one-dimensional lamplighter. Heisenberg, higher lamplighters and sol
//! use a breadth-first cache filled once at construction.

mod element;
mod quotient;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use element::Element;
pub(crate) use element::push_reduced;
pub use quotient::{FiniteQuotient, QuotientKind};

use crate::defaults;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "group")]
pub enum GroupKind {
    Lattice { d: usize },
    Heisenberg,
    Lamplighter { d: usize },
    Free { k: usize },
    Sol,
}

impl GroupKind {
    pub fn has_polynomial_growth(self) -> bool {
        matches!(self, GroupKind::Lattice { .. } | GroupKind::Heisenberg)
            || matches!(self, GroupKind::Free { k: 1 })
    }

    pub fn identity(self) -> Element {
        match self {
            GroupKind::Lattice { d } => Element::Lattice(vec![0; d]),
            GroupKind::Heisenberg => Element::Heisenberg([0; 3]),
            GroupKind::Lamplighter { d } => Element::Lamplighter {
                lamps: Vec::new(),
                marker: vec![0; d],
            },
            GroupKind::Free { .. } => Element::Free(Vec::new()),
            GroupKind::Sol => Element::Sol([0; 3]),
        }
    }

    /// Whether `g` has the shape of an element of this kind.
    pub fn contains(self, g: &Element) -> bool {
        match (self, g) {
            (GroupKind::Lattice { d }, Element::Lattice(c)) => c.len() == d,
            (GroupKind::Heisenberg, Element::Heisenberg(_)) => true,
            (GroupKind::Lamplighter { d }, Element::Lamplighter { lamps, marker }) => {
                marker.len() == d && lamps.len() % d == 0
            }
            (GroupKind::Free { k }, Element::Free(w)) => w.iter().all(|l| l.unsigned_abs() as usize <= k),
            (GroupKind::Sol, Element::Sol(_)) => true,
            _ => false,
        }
    }

    /// Whether word length is computed by formula rather than by search.
    pub fn has_closed_form_metric(self) -> bool {
        matches!(
            self,
            GroupKind::Lattice { .. } | GroupKind::Free { .. } | GroupKind::Lamplighter { d: 1 }
        )
    }

    pub(crate) fn validate(self) -> Result<Self> {
        match self {
            GroupKind::Lattice { d } | GroupKind::Lamplighter { d } if d == 0 || d > 8 => {
                Err(Error::domain(format!("dimension {d} outside 1..=8")))
            }
            GroupKind::Free { k } if k == 0 || k > 100 => {
                Err(Error::domain(format!("free rank {k} outside 1..=100")))
            }
            kind => Ok(kind),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Lattice { d } => write!(f, "lattice:d={d}"),
            GroupKind::Heisenberg => write!(f, "heisenberg3"),
            GroupKind::Lamplighter { d } => write!(f, "lamplighter:d={d}"),
            GroupKind::Free { k } => write!(f, "free:k={k}"),
            GroupKind::Sol => write!(f, "sol"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let params = parse_params(s, parts)?;
        let int = |key: &str, default: Option<usize>| -> Result<usize> {
            match params.get(key) {
                Some(v) => v.parse().map_err(|_| Error::parse(s, format!("bad integer for {key}"))),
                None => default.ok_or_else(|| Error::parse(s, format!("missing {key}="))),
            }
        };
        let kind = match head {
            "lattice" | "z" => GroupKind::Lattice { d: int("d", Some(1))? },
            "heisenberg" | "heisenberg3" => GroupKind::Heisenberg,
            "lamplighter" => GroupKind::Lamplighter { d: int("d", Some(1))? },
            "free" => GroupKind::Free { k: int("k", Some(2))? },
            "sol" => GroupKind::Sol,
            other => return Err(Error::parse(s, format!("unknown group kind '{other}'"))),
        };
        kind.validate()
    }
}

pub(crate) fn parse_params<'a>(
    whole: &str,
    parts: impl Iterator<Item = &'a str>,
) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::parse(whole, format!("expected key=value, got '{p}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// A finitely generated group with its fixed generating set.
#[derive(Debug, Clone)]
pub struct Group {
    kind: GroupKind,
    generators: Vec<Element>,
    radius: u32,
    lengths: HashMap<Element, u32>,
    spheres: Vec<u64>,
}

impl Group {
    /// Builds the group with the default search radius for its growth type.
    pub fn new(kind: GroupKind) -> Result<Self> {
        let r = if kind.has_polynomial_growth() {
            defaults::RADIUS_POLYNOMIAL
        } else {
            defaults::RADIUS_EXPONENTIAL
        };
        Self::with_radius(kind, r)
    }

    /// Builds the group, filling the word-length cache out to `r_max` or
    /// until [`defaults::BFS_ELEMENT_CAP`] elements, whichever is smaller.
    pub fn with_radius(kind: GroupKind, r_max: u32) -> Result<Self> {
        let kind = kind.validate()?;
        let generators = generators(kind);
        let mut g = Group {
            kind,
            generators,
            radius: r_max,
            lengths: HashMap::new(),
            spheres: Vec::new(),
        };
        if !kind.has_closed_form_metric() {
            g.fill_cache(r_max);
        }
        Ok(g)
    }

    fn fill_cache(&mut self, r_max: u32) {
        let (lengths, spheres, reached) = self.search(r_max, defaults::BFS_ELEMENT_CAP);
        if reached < r_max {
            log::warn!("{}: word-length cache truncated at radius {}", self.kind, reached);
        }
        self.radius = reached;
        self.lengths = lengths;
        self.spheres = spheres;
    }

    /// Breadth-first search over complete spheres, stopping before the
    /// element count would pass `cap`.
    fn search(&self, r_max: u32, cap: usize) -> (HashMap<Element, u32>, Vec<u64>, u32) {
        let id = self.identity();
        let mut lengths = HashMap::new();
        lengths.insert(id.clone(), 0u32);
        let mut frontier = vec![id];
        let mut spheres = vec![1u64];
        let mut reached = 0;
        for r in 1..=r_max {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &self.generators[1..] {
                    let h = self.multiply(g, s).expect("generator product stays in range");
                    if !lengths.contains_key(&h) {
                        lengths.insert(h.clone(), r);
                        next.push(h);
                    }
                }
            }
            if lengths.len() > cap {
                for h in &next {
                    lengths.remove(h);
                }
                break;
            }
            spheres.push(next.len() as u64);
            reached = r;
            frontier = next;
        }
        (lengths, spheres, reached)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// The generating set; index 0 is the identity.
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Largest radius with exact word lengths, or `None` if unbounded.
    pub fn radius_limit(&self) -> Option<u32> {
        (!self.kind.has_closed_form_metric()).then_some(self.radius)
    }

    pub fn identity(&self) -> Element {
        self.kind.identity()
    }

    /// Whether `g` has the shape of an element of this group.
    pub fn contains(&self, g: &Element) -> bool {
        self.kind.contains(g)
    }

    fn check(&self, g: &Element) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::usage(format!("element {g} does not belong to {}", self.kind)))
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        multiply_unchecked(g, h)
    }

    pub fn invert(&self, g: &Element) -> Element {
        invert(g)
    }

    /// Whether `g` lies in the `Z^d` subgroup of marker translations.
    pub fn is_translation(&self, g: &Element) -> bool {
        match g {
            Element::Lattice(_) => true,
            Element::Lamplighter { lamps, .. } => lamps.is_empty(),
            _ => false,
        }
    }

    /// Exact word length.
    ///
    /// For searched kinds, elements beyond the cached radius yield
    /// [`Error::OutOfRange`] carrying the certified lower bound.
    pub fn word_length(&self, g: &Element) -> Result<u32> {
        self.check(g)?;
        let len = match g {
            Element::Lattice(c) => c.iter().map(|x| x.unsigned_abs()).sum::<u64>(),
            Element::Free(w) => w.len() as u64,
            Element::Lamplighter { lamps, marker } if marker.len() == 1 => {
                lamplighter_line_length(lamps, marker[0])
            }
            _ => {
                return self.lengths.get(g).copied().ok_or(Error::OutOfRange {
                    lower_bound: self.radius + 1,
                })
            }
        };
        u32::try_from(len).map_err(|_| Error::numeric("word length exceeds u32"))
    }

    /// Number of elements of word length at most `r`.
    pub fn volume(&self, r: u32) -> Result<u64> {
        match self.kind {
            GroupKind::Lattice { d } => Ok(lattice_volume(d, r)),
            GroupKind::Free { k } => Ok(free_volume(k, r)),
            _ if self.kind.has_closed_form_metric() => Ok(self.ball(r)?.len() as u64),
            _ => {
                if r > self.radius {
                    return Err(Error::OutOfRange {
                        lower_bound: self.radius + 1,
                    });
                }
                Ok(self.spheres[..=r as usize].iter().sum())
            }
        }
    }

    /// All elements of word length at most `r`, in canonical order.
    pub fn ball(&self, r: u32) -> Result<Vec<Element>> {
        let mut out = match self.kind {
            GroupKind::Lattice { d } => {
                guard(lattice_volume(d, r))?;
                lattice_ball(d, r)
            }
            GroupKind::Free { k } => {
                guard(free_volume(k, r))?;
                free_ball(k, r)
            }
            GroupKind::Lamplighter { d: 1 } => {
                let (lengths, _, reached) = self.search(r, defaults::BFS_ELEMENT_CAP);
                if reached < r {
                    return Err(Error::resource(format!(
                        "ball of radius {r} exceeds the cap of {} elements",
                        defaults::BFS_ELEMENT_CAP
                    )));
                }
                lengths.into_keys().collect()
            }
            _ => {
                if r > self.radius {
                    return Err(Error::OutOfRange {
                        lower_bound: self.radius + 1,
                    });
                }
                self.lengths
                    .iter()
                    .filter(|(_, &l)| l <= r)
                    .map(|(g, _)| g.clone())
                    .collect()
            }
        };
        out.sort_unstable();
        Ok(out)
    }
}

fn guard(predicted: u64) -> Result<()> {
    if predicted > defaults::BALL_ELEMENT_CAP as u64 {
        Err(Error::resource(format!(
            "ball of {predicted} elements exceeds the cap of {}",
            defaults::BALL_ELEMENT_CAP
        )))
    } else {
        Ok(())
    }
}

fn generators(kind: GroupKind) -> Vec<Element> {
    let mut out = Vec::new();
    match kind {
        GroupKind::Lattice { d } => {
            out.push(Element::Lattice(vec![0; d]));
            for i in 0..d {
                for s in [1, -1] {
                    let mut c = vec![0; d];
                    c[i] = s;
                    out.push(Element::Lattice(c));
                }
            }
        }
        GroupKind::Heisenberg => {
            out.push(Element::Heisenberg([0; 3]));
            for c in [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]] {
                out.push(Element::Heisenberg(c));
            }
        }
        GroupKind::Lamplighter { d } => {
            out.push(Element::lamplighter(&[], &vec![0; d]));
            for i in 0..d {
                for s in [1, -1] {
                    let mut m = vec![0; d];
                    m[i] = s;
                    out.push(Element::lamplighter(&[], &m));
                }
            }
            out.push(Element::lamplighter(&[vec![0; d]], &vec![0; d]));
        }
        GroupKind::Free { k } => {
            out.push(Element::Free(Vec::new()));
            for i in 1..=k as i8 {
                out.push(Element::Free(vec![i]));
                out.push(Element::Free(vec![-i]));
            }
        }
        GroupKind::Sol => {
            out.push(Element::Sol([0; 3]));
            for c in [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]] {
                out.push(Element::Sol(c));
            }
        }
    }
    out
}

/// Group law on canonical elements of matching shape.
pub(crate) fn multiply_unchecked(g: &Element, h: &Element) -> Result<Element> {
    let overflow = || Error::numeric("coordinate overflow in group law");
    Ok(match (g, h) {
        (Element::Lattice(a), Element::Lattice(b)) if a.len() == b.len() => Element::Lattice(
            a.iter()
                .zip(b)
                .map(|(x, y)| x.checked_add(*y).ok_or_else(overflow))
                .collect::<Result<_>>()?,
        ),
        (Element::Heisenberg([x, y, z]), Element::Heisenberg([x2, y2, z2])) => {
            let cross = x.checked_mul(*y2).ok_or_else(overflow)?;
            Element::Heisenberg([
                x.checked_add(*x2).ok_or_else(overflow)?,
                y.checked_add(*y2).ok_or_else(overflow)?,
                z.checked_add(*z2)
                    .and_then(|v| v.checked_add(cross))
                    .ok_or_else(overflow)?,
            ])
        }
        (
            Element::Lamplighter { lamps: l1, marker: k1 },
            Element::Lamplighter { lamps: l2, marker: k2 },
        ) if k1.len() == k2.len() => {
            let marker = k1
                .iter()
                .zip(k2)
                .map(|(a, b)| a.checked_add(*b).ok_or_else(overflow))
                .collect::<Result<Vec<_>>>()?;
            Element::Lamplighter {
                lamps: xor_shifted(l1, l2, k1)?,
                marker,
            }
        }
        (Element::Free(a), Element::Free(b)) => {
            let mut w = a.clone();
            for &l in b {
                push_reduced(&mut w, l);
            }
            Element::Free(w)
        }
        (Element::Sol([n, a, b]), Element::Sol([n2, a2, b2])) => {
            let (ta, tb) = sol_act(*n, *a2, *b2).ok_or_else(overflow)?;
            Element::Sol([
                n.checked_add(*n2).ok_or_else(overflow)?,
                a.checked_add(ta).ok_or_else(overflow)?,
                b.checked_add(tb).ok_or_else(overflow)?,
            ])
        }
        _ => return Err(Error::usage(format!("cannot multiply {g} by {h}: kind mismatch"))),
    })
}

pub(crate) fn invert(g: &Element) -> Element {
    match g {
        Element::Lattice(c) => Element::Lattice(c.iter().map(|x| -x).collect()),
        Element::Heisenberg([x, y, z]) => Element::Heisenberg([-x, -y, -z + x * y]),
        Element::Lamplighter { lamps, marker } => {
            let d = marker.len();
            let mut shifted = lamps.clone();
            for chunk in shifted.chunks_mut(d) {
                for (c, k) in chunk.iter_mut().zip(marker) {
                    *c -= k;
                }
            }
            Element::Lamplighter {
                lamps: shifted,
                marker: marker.iter().map(|k| -k).collect(),
            }
        }
        Element::Free(w) => Element::Free(w.iter().rev().map(|l| -l).collect()),
        Element::Sol([n, a, b]) => {
            let (ta, tb) = sol_act(-n, *a, *b).expect("inverse of a representable element");
            Element::Sol([-n, -ta, -tb])
        }
    }
}

/// Symmetric difference of `l1` with `l2` translated by `shift`; both sorted.
fn xor_shifted(l1: &[i64], l2: &[i64], shift: &[i64]) -> Result<Vec<i64>> {
    let d = shift.len();
    let mut moved = Vec::with_capacity(l2.len());
    for chunk in l2.chunks(d) {
        for (c, k) in chunk.iter().zip(shift) {
            moved.push(c.checked_add(*k).ok_or_else(|| Error::numeric("lamp position overflow"))?);
        }
    }
    let mut out = Vec::with_capacity(l1.len() + moved.len());
    let (mut i, mut j) = (0, 0);
    while i < l1.len() && j < moved.len() {
        match l1[i..i + d].cmp(&moved[j..j + d]) {
            std::cmp::Ordering::Less => {
                out.extend_from_slice(&l1[i..i + d]);
                i += d;
            }
            std::cmp::Ordering::Greater => {
                out.extend_from_slice(&moved[j..j + d]);
                j += d;
            }
            std::cmp::Ordering::Equal => {
                i += d;
                j += d;
            }
        }
    }
    out.extend_from_slice(&l1[i..]);
    out.extend_from_slice(&moved[j..]);
    Ok(out)
}

/// `A^n (a, b)` with `A = [[2,1],[1,1]]`.
fn sol_act(n: i64, a: i64, b: i64) -> Option<(i64, i64)> {
    let (mut a, mut b) = (a, b);
    for _ in 0..n.unsigned_abs() {
        (a, b) = if n > 0 {
            (a.checked_mul(2)?.checked_add(b)?, a.checked_add(b)?)
        } else {
            (a.checked_sub(b)?, b.checked_mul(2)?.checked_sub(a)?)
        };
    }
    Some((a, b))
}

/// Exact word length in `(Z/2) wr Z`: the marker walks from 0 over every lit
/// lamp and stops at `k`, toggling each lamp once.
fn lamplighter_line_length(lamps: &[i64], k: i64) -> u64 {
    let lo = lamps.iter().copied().chain([0, k]).min().unwrap_or(0);
    let hi = lamps.iter().copied().chain([0, k]).max().unwrap_or(0);
    let span = (hi - lo) as u64;
    let detour = ((hi - k) - lo).min(hi + (k - lo)) as u64;
    lamps.len() as u64 + span + detour
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn lattice_volume(d: usize, r: u32) -> u64 {
    (0..=d.min(r as usize) as u64)
        .map(|k| (1u64 << k).saturating_mul(binom(d as u64, k)).saturating_mul(binom(r as u64, k)))
        .fold(0u64, u64::saturating_add)
}

fn lattice_ball(d: usize, r: u32) -> Vec<Element> {
    fn rec(prefix: &mut Vec<i64>, left: i64, d: usize, out: &mut Vec<Element>) {
        if prefix.len() == d {
            out.push(Element::Lattice(prefix.clone()));
            return;
        }
        for x in -left..=left {
            prefix.push(x);
            rec(prefix, left - x.abs(), d, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(d), r as i64, d, &mut out);
    out
}

fn free_volume(k: usize, r: u32) -> u64 {
    let k = k as u64;
    let mut total = 1u64;
    let mut sphere = 2 * k;
    for _ in 0..r {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * k - 1);
    }
    total
}

fn free_ball(k: usize, r: u32) -> Vec<Element> {
    let mut out = vec![Element::Free(Vec::new())];
    let mut frontier: Vec<Vec<i8>> = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 1..=k as i8 {
                for l in [i, -i] {
                    if w.last() != Some(&-l) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
        }
        out.extend(next.iter().cloned().map(Element::Free));
        frontier = next;
    }
    out
}
