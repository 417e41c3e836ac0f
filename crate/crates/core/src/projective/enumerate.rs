//! Streaming enumeration of `{x ∈ P^n(Q) : H(x) <= B}` in `(S, coords)`
//! order, where `S = Σ x_i^2` and `H = S^{(n+1)/2}`.
//!
//! Points are produced shell-block by shell-block: every block
//! `s0 <= S < s1` is generated, sorted and drained before the next one, so
//! memory stays proportional to one block.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;

use super::ProjectivePoint;
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Target number of lattice vectors per block.
const BLOCK_TARGET: u64 = 1 << 15;

/// Largest `S` with `S^{n+1} <= B^2`, i.e. `H <= B`.
pub fn max_norm_sq(n: usize, b: &Rational) -> Result<u64> {
    if b < &Rational::from_integer(1.into()) {
        return Err(Error::Domain("height bound must be at least 1".into()));
    }
    let num = b.numer() * b.numer();
    let den = b.denom() * b.denom();
    let fits = |s: &BigInt| num_traits::pow(s.clone(), n + 1) * &den <= num;
    // floor of the (n+1)-th root of num/den
    let mut s = (&num / &den).nth_root(n as u32 + 1);
    while !fits(&s) {
        s -= 1;
    }
    while fits(&(&s + 1)) {
        s += 1;
    }
    s.to_u64().ok_or_else(|| Error::Domain("height bound too large to enumerate".into()))
}

pub struct PointStream {
    n: usize,
    smax: u64,
    next_s: u64,
    width: u64,
    part: usize,
    nparts: usize,
    buf: VecDeque<(u64, Vec<i64>)>,
}

/// All canonical points with `H(x) <= B`, each once, sorted by `(S, coords)`.
pub fn enumerate_points(n: usize, b: &Rational) -> Result<PointStream> {
    enumerate_points_partition(n, b, 0, 1)
}

/// The subsequence of [`enumerate_points`] whose leading coordinate is
/// congruent to `part` modulo `nparts`. Partitions are disjoint and cover
/// the whole set.
pub fn enumerate_points_partition(n: usize, b: &Rational, part: usize, nparts: usize) -> Result<PointStream> {
    points_up_to_norm(n, max_norm_sq(n, b)?, part, nparts)
}

/// Canonical points with `S <= smax`, partitioned as in
/// [`enumerate_points_partition`].
pub fn points_up_to_norm(n: usize, smax: u64, part: usize, nparts: usize) -> Result<PointStream> {
    if n == 0 {
        return Err(Error::Domain("projective dimension must be at least 1".into()));
    }
    if nparts == 0 || part >= nparts {
        return Err(Error::Domain("invalid partition".into()));
    }
    Ok(PointStream { n, smax, next_s: 1, width: 16, part, nparts, buf: VecDeque::new() })
}

impl PointStream {
    pub fn smax(&self) -> u64 {
        self.smax
    }

    fn refill(&mut self) {
        while self.buf.is_empty() && self.next_s <= self.smax {
            let s0 = self.next_s;
            let s1 = (s0 + self.width).min(self.smax + 1);
            let mut block = Vec::new();
            let mut x = vec![0i64; self.n + 1];
            self.fill(0, 0, true, s0, s1, &mut x, &mut block);
            block.sort_unstable();
            let found = block.len() as u64;
            self.buf.extend(block);
            self.next_s = s1;
            // steer the block width towards the target population
            if found < BLOCK_TARGET / 4 {
                self.width = self.width.saturating_mul(2);
            } else if found > BLOCK_TARGET * 4 && self.width > 1 {
                self.width /= 2;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(&self, i: usize, partial: u64, zero_so_far: bool, s0: u64, s1: u64, x: &mut Vec<i64>, out: &mut Vec<(u64, Vec<i64>)>) {
        let last = i == self.n;
        let room = s1 - 1 - partial;
        let r = room.sqrt() as i64;
        if last {
            // x_i^2 in [s0 - partial, s1 - 1 - partial]
            let need = s0.saturating_sub(partial);
            let lo = ceil_sqrt(need) as i64;
            for m in lo..=r {
                let signs: &[i64] = if m == 0 {
                    if zero_so_far {
                        &[]
                    } else {
                        &[1]
                    }
                } else if zero_so_far {
                    &[1]
                } else {
                    &[-1, 1]
                };
                for &sg in signs {
                    x[i] = sg * m;
                    if gcd_all(x) == 1 {
                        out.push((partial + (m * m) as u64, x.clone()));
                    }
                }
            }
            x[i] = 0;
            return;
        }
        let lo = if zero_so_far { 0 } else { -r };
        for v in lo..=r {
            if i == 0 && (v as usize) % self.nparts != self.part {
                continue;
            }
            x[i] = v;
            self.fill(i + 1, partial + (v * v) as u64, zero_so_far && v == 0, s0, s1, x, out);
        }
        x[i] = 0;
    }
}

fn ceil_sqrt(v: u64) -> u64 {
    let r = v.sqrt();
    if r * r == v {
        r
    } else {
        r + 1
    }
}

fn gcd_all(x: &[i64]) -> i64 {
    x.iter().fold(0i64, |g, v| g.gcd(v)).abs()
}

impl Iterator for PointStream {
    type Item = ProjectivePoint;

    fn next(&mut self) -> Option<ProjectivePoint> {
        self.refill();
        self.buf.pop_front().map(|(_, x)| ProjectivePoint::from_canonical_i64(&x))
    }
}

impl PointStream {
    /// Raw `(S, coords)` pairs, avoiding big-integer conversion.
    pub fn next_raw(&mut self) -> Option<(u64, Vec<i64>)> {
        self.refill();
        self.buf.pop_front()
    }
}
