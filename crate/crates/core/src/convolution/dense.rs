use std::sync::Arc;

use realfft::RealFftPlanner;

use crate::error::{Error, Result};
use crate::groups::{Element, GroupKind};
use crate::measures::{compensated_sum, FiniteMeasure};
use crate::defaults;

/// Weights on a box `lo + [0, shape)` of `Z^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrid {
    lo: Vec<i64>,
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for j in (0..shape.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * shape[j + 1];
    }
    s
}

fn volume(shape: &[usize]) -> Result<usize> {
    shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&v| v <= defaults::SUPPORT_CAP)
        .ok_or_else(|| Error::resource(format!("dense box {shape:?} exceeds the support cap; raise epsilon")))
}

/// Smallest `2^a 3^b 5^c ≥ n`.
fn smooth_size(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

impl DenseGrid {
    pub fn zeros(lo: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        let n = volume(&shape)?;
        Ok(DenseGrid { lo, shape, data: vec![0.0; n] })
    }

    /// The bounding box of a lattice measure, or `None` for other kinds.
    pub fn from_measure(mu: &FiniteMeasure) -> Result<Option<Self>> {
        let GroupKind::Lattice { d } = mu.kind() else {
            return Ok(None);
        };
        let coords = |g: &Element| match g {
            Element::Lattice(c) => c.clone(),
            _ => unreachable!("lattice measure holds lattice atoms"),
        };
        if mu.is_empty() {
            return Ok(Some(DenseGrid { lo: vec![0; d], shape: vec![0; d], data: Vec::new() }));
        }
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for (g, _) in mu.atoms() {
            for (j, x) in coords(g).into_iter().enumerate() {
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut grid = Self::zeros(lo, shape)?;
        for (g, w) in mu.atoms() {
            let i = grid.index(&coords(g)).expect("atom inside its bounding box");
            grid.data[i] = *w;
        }
        Ok(Some(grid))
    }

    /// Fraction of the bounding box a lattice measure occupies.
    pub fn fill_ratio(mu: &FiniteMeasure) -> Option<f64> {
        let GroupKind::Lattice { d } = mu.kind() else {
            return None;
        };
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for (g, _) in mu.atoms() {
            if let Element::Lattice(c) = g {
                for j in 0..d {
                    lo[j] = lo[j].min(c[j]);
                    hi[j] = hi[j].max(c[j]);
                }
            }
        }
        let vol: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as f64).product();
        Some(mu.len() as f64 / vol.max(1.0))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn index(&self, x: &[i64]) -> Option<usize> {
        let st = strides(&self.shape);
        let mut i = 0;
        for j in 0..self.dim() {
            let off = x[j] - self.lo[j];
            if off < 0 || off as usize >= self.shape[j] {
                return None;
            }
            i += off as usize * st[j];
        }
        Some(i)
    }

    fn point(&self, mut i: usize) -> Vec<i64> {
        let mut x = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            x[j] = self.lo[j] + (i % self.shape[j]) as i64;
            i /= self.shape[j];
        }
        x
    }

    pub fn get(&self, x: &[i64]) -> f64 {
        self.index(x).map_or(0.0, |i| self.data[i])
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.data.iter().copied())
    }

    pub fn sum_sq(&self) -> f64 {
        compensated_sum(self.data.iter().map(|v| v * v))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Positive cells as a measure with the given deficit.
    pub fn to_measure(&self, kind: GroupKind, deficit: f64) -> FiniteMeasure {
        let atoms = self
            .data
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (Element::Lattice(self.point(i)), w))
            .collect();
        FiniteMeasure::from_parts(kind, atoms, deficit)
    }

    /// Zeroes cells below `eps` and returns the mass removed.
    pub fn drop_below(&mut self, eps: f64) -> f64 {
        let mut dropped = Vec::new();
        for v in &mut self.data {
            if *v < eps {
                if *v > 0.0 {
                    dropped.push(*v);
                }
                *v = 0.0;
            }
        }
        compensated_sum(dropped)
    }

    /// Shrinks the box to the smallest one holding every nonzero cell.
    pub fn crop(&mut self) {
        let d = self.dim();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        let mut any = false;
        let st = strides(&self.shape);
        for (i, &v) in self.data.iter().enumerate() {
            if v != 0.0 {
                any = true;
                for j in 0..d {
                    let c = (i / st[j]) % self.shape[j];
                    lo[j] = lo[j].min(c);
                    hi[j] = hi[j].max(c);
                }
            }
        }
        if !any {
            *self = DenseGrid { lo: self.lo.clone(), shape: vec![0; d], data: Vec::new() };
            return;
        }
        if lo.iter().all(|&l| l == 0) && hi.iter().zip(&self.shape).all(|(h, s)| h + 1 == *s) {
            return;
        }
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).collect();
        let new_lo: Vec<i64> = self.lo.iter().zip(&lo).map(|(a, &l)| a + l as i64).collect();
        let mut out = DenseGrid { lo: new_lo, shape, data: Vec::new() };
        out.data = vec![0.0; out.shape.iter().product()];
        let ost = strides(&out.shape);
        for (i, v) in out.data.iter_mut().enumerate() {
            let mut src = 0;
            for j in 0..d {
                let c = (i / ost[j]) % out.shape[j];
                src += (c + lo[j]) * st[j];
            }
            *v = self.data[src];
        }
        *self = out;
    }

    /// `self += c · other`, growing the box as needed.
    pub fn add_scaled(&mut self, other: &DenseGrid, c: f64) -> Result<()> {
        if other.is_empty() {
            return Ok(());
        }
        if self.is_empty() {
            *self = other.clone();
            self.data.iter_mut().for_each(|v| *v *= c);
            return Ok(());
        }
        let d = self.dim();
        let covers = (0..d).all(|j| {
            self.lo[j] <= other.lo[j] && other.lo[j] + other.shape[j] as i64 <= self.lo[j] + self.shape[j] as i64
        });
        if !covers {
            let lo: Vec<i64> = (0..d).map(|j| self.lo[j].min(other.lo[j])).collect();
            let shape: Vec<usize> = (0..d)
                .map(|j| {
                    let hi = (self.lo[j] + self.shape[j] as i64).max(other.lo[j] + other.shape[j] as i64);
                    (hi - lo[j]) as usize
                })
                .collect();
            let mut grown = Self::zeros(lo, shape)?;
            grown.blit(self, 1.0, false);
            *self = grown;
        }
        self.blit(other, c, true);
        Ok(())
    }

    /// Writes or adds `c · src` into `self`, whose box must contain `src`'s.
    fn blit(&mut self, src: &DenseGrid, c: f64, add: bool) {
        let d = self.dim();
        let (sst, dst) = (strides(&src.shape), strides(&self.shape));
        let base: usize = (0..d).map(|j| (src.lo[j] - self.lo[j]) as usize * dst[j]).sum();
        let row = src.shape[d - 1];
        for r in 0..src.data.len() / row.max(1) {
            let mut off = base;
            let i0 = r * row;
            for j in 0..d - 1 {
                off += ((i0 / sst[j]) % src.shape[j]) * dst[j];
            }
            let (s, t) = (&src.data[i0..i0 + row], &mut self.data[off..off + row]);
            for (a, b) in t.iter_mut().zip(s) {
                *a = if add { *a + c * b } else { c * b };
            }
        }
    }

    /// Linear convolution. Returns the product grid and the mass of FFT
    /// noise cleared from it (an upper bound on what was lost).
    pub fn convolve(&self, other: &DenseGrid) -> Result<(DenseGrid, f64)> {
        let d = self.dim();
        if self.is_empty() || other.is_empty() {
            return Ok((DenseGrid { lo: vec![0; d], shape: vec![0; d], data: Vec::new() }, 0.0));
        }
        let lo: Vec<i64> = (0..d).map(|j| self.lo[j] + other.lo[j]).collect();
        let shape: Vec<usize> = (0..d).map(|j| self.shape[j] + other.shape[j] - 1).collect();
        let mut out = Self::zeros(lo, shape)?;
        let n = out.len();
        let work = self.len() as f64 * other.len() as f64;
        let fft_size = smooth_size(n);
        if work <= 16.0 * fft_size as f64 * (fft_size as f64).log2().max(1.0) {
            self.direct_into(other, &mut out);
            Ok((out, 0.0))
        } else {
            let noise = self.fft_into(other, &mut out, fft_size);
            Ok((out, noise))
        }
    }

    fn flat_offsets(&self, out: &DenseGrid) -> Vec<usize> {
        let (st, ost) = (strides(&self.shape), strides(&out.shape));
        (0..self.len())
            .map(|i| (0..self.dim()).map(|j| ((i / st[j]) % self.shape[j]) * ost[j]).sum())
            .collect()
    }

    fn direct_into(&self, other: &DenseGrid, out: &mut DenseGrid) {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let big_off = big.flat_offsets(out);
        let small_off = small.flat_offsets(out);
        for (k, &wb) in small.data.iter().enumerate() {
            if wb == 0.0 {
                continue;
            }
            let base = small_off[k];
            for (i, &wa) in big.data.iter().enumerate() {
                out.data[base + big_off[i]] += wa * wb;
            }
        }
    }

    fn fft_into(&self, other: &DenseGrid, out: &mut DenseGrid, size: usize) -> f64 {
        let mut planner = RealFftPlanner::<f64>::new();
        let fwd: Arc<dyn realfft::RealToComplex<f64>> = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let embed = |g: &DenseGrid| {
            let mut buf = vec![0.0; size];
            for (i, off) in g.flat_offsets(out).into_iter().enumerate() {
                buf[off] = g.data[i];
            }
            let mut spec = fwd.make_output_vec();
            fwd.process(&mut buf, &mut spec).expect("buffer sizes match the plan");
            spec
        };
        let (fa, fb) = (embed(self), embed(other));
        let mut prod: Vec<_> = fa.iter().zip(&fb).map(|(a, b)| a * b).collect();
        let mut res = inv.make_output_vec();
        inv.process(&mut prod, &mut res).expect("buffer sizes match the plan");
        let scale = 1.0 / size as f64;
        let norm = (self.sum_sq() * other.sum_sq()).sqrt();
        let floor = 8.0 * f64::EPSILON * (size as f64).log2() * norm;
        let mut cleared = Vec::new();
        for (o, r) in out.data.iter_mut().zip(&res) {
            let v = r * scale;
            if v <= floor {
                cleared.push(v.max(0.0) + floor);
                *o = 0.0;
            } else {
                *o = v;
            }
        }
        compensated_sum(cleared)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Group;
    use crate::measures::uniform_ball;

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(11), 12);
        assert_eq!(smooth_size(1001), 1024);
        assert_eq!(smooth_size(1025), 1080);
    }

    fn brute(a: &DenseGrid, b: &DenseGrid) -> Vec<(Vec<i64>, f64)> {
        let mut m = std::collections::BTreeMap::new();
        for i in 0..a.len() {
            for k in 0..b.len() {
                let x: Vec<i64> = a.point(i).iter().zip(b.point(k)).map(|(p, q)| p + q).collect();
                *m.entry(x).or_insert(0.0) += a.data[i] * b.data[k];
            }
        }
        m.into_iter().collect()
    }

    #[test]
    fn direct_and_fft_agree_with_brute_force() {
        let z2 = Group::new(GroupKind::Lattice { d: 2 }).unwrap();
        let a = DenseGrid::from_measure(&uniform_ball(&z2, 6).unwrap()).unwrap().unwrap();
        let b = DenseGrid::from_measure(&uniform_ball(&z2, 5).unwrap()).unwrap().unwrap();
        let (direct, _) = a.convolve(&DenseGrid::from_measure(&uniform_ball(&z2, 1).unwrap()).unwrap().unwrap()).unwrap();
        let expect = brute(&a, &DenseGrid::from_measure(&uniform_ball(&z2, 1).unwrap()).unwrap().unwrap());
        for (x, v) in expect {
            assert!((direct.get(&x) - v).abs() < 1e-15);
        }
        let mut fft = DenseGrid::zeros(vec![-11, -11], vec![23, 23]).unwrap();
        let size = smooth_size(fft.len());
        let noise = a.fft_into(&b, &mut fft, size);
        assert!(noise < 1e-12);
        for (x, v) in brute(&a, &b) {
            assert!((fft.get(&x) - v).abs() < 1e-14, "{x:?}");
        }
    }

    #[test]
    fn crop_and_grow() {
        let mut g = DenseGrid::zeros(vec![-5], vec![11]).unwrap();
        g.data[3] = 0.5;
        g.data[7] = 0.25;
        g.crop();
        assert_eq!((g.lo(), g.shape()), (&[-2i64][..], &[5usize][..]));
        assert_eq!(g.get(&[2]), 0.25);
        let mut h = DenseGrid::zeros(vec![4], vec![2]).unwrap();
        h.data[1] = 1.0;
        g.add_scaled(&h, 2.0).unwrap();
        assert_eq!(g.get(&[5]), 2.0);
        assert_eq!(g.get(&[-2]), 0.5);
        assert_eq!(g.drop_below(1.0), 0.75);
        assert_eq!(g.sum(), 2.0);
    }

    #[test]
    fn roundtrip_through_measures() {
        let z3 = Group::new(GroupKind::Lattice { d: 3 }).unwrap();
        let mu = uniform_ball(&z3, 2).unwrap();
        let g = DenseGrid::from_measure(&mu).unwrap().unwrap();
        assert_eq!(g.to_measure(mu.kind(), 0.0), mu);
    }
}
