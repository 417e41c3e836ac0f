//! Variety descriptors, multihomogeneous equations and points.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::projective::ProjectivePoint;

/// Variable letters by factor index.
const LETTERS: &[char] = &['x', 'y', 'z', 'u', 'v', 'w'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigInt,
    /// `exps[k][i]` is the exponent of coordinate `i` of factor `k`.
    pub exps: Vec<Vec<u32>>,
}

/// A multihomogeneous polynomial on a product of projective spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    pub dims: Vec<usize>,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    /// Parses e.g. `"x0^3*y0 + x1^3*y1 - 2*x2*y3"`. Factor `k` uses the
    /// `k`-th letter of `x, y, z, u, v, w`.
    pub fn parse(dims: &[usize], s: &str) -> Result<Self> {
        let err = |m: String| Error::Parse(format!("equation: {m}"));
        let mut acc: BTreeMap<Vec<Vec<u32>>, BigInt> = BTreeMap::new();
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty".into()));
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, c) in cleaned.chars().enumerate() {
            if (c == '+' || c == '-') && !(cur.is_empty() && i == 0) {
                if cur.is_empty() {
                    return Err(err(format!("dangling sign near position {i}")));
                }
                terms.push((neg, std::mem::take(&mut cur)));
                neg = c == '-';
            } else if (c == '+' || c == '-') && i == 0 {
                neg = c == '-';
            } else {
                cur.push(c);
            }
        }
        if cur.is_empty() {
            return Err(err("trailing sign".into()));
        }
        terms.push((neg, cur));
        for (neg, t) in terms {
            let mut coeff = BigInt::one();
            let mut exps: Vec<Vec<u32>> = dims.iter().map(|&n| vec![0; n + 1]).collect();
            for f in t.split('*') {
                if f.is_empty() {
                    return Err(err(format!("empty factor in term {t:?}")));
                }
                if f.chars().next().unwrap().is_ascii_digit() {
                    coeff *= f.parse::<BigInt>().map_err(|_| err(format!("bad coefficient {f:?}")))?;
                    continue;
                }
                let letter = f.chars().next().unwrap();
                let k = LETTERS.iter().position(|&c| c == letter).ok_or_else(|| err(format!("unknown variable {f:?}")))?;
                if k >= dims.len() {
                    return Err(err(format!("variable {f:?} refers to a missing factor")));
                }
                let rest = &f[1..];
                let (idx, e) = match rest.split_once('^') {
                    Some((a, b)) => (a, b.parse::<u32>().map_err(|_| err(format!("bad exponent in {f:?}")))?),
                    None => (rest, 1),
                };
                let i: usize = idx.parse().map_err(|_| err(format!("bad index in {f:?}")))?;
                if i > dims[k] {
                    return Err(err(format!("index out of range in {f:?}")));
                }
                exps[k][i] += e;
            }
            if neg {
                coeff = -coeff;
            }
            *acc.entry(exps).or_insert_with(BigInt::zero) += coeff;
        }
        let terms: Vec<Monomial> = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(exps, coeff)| Monomial { coeff, exps }).collect();
        if terms.is_empty() {
            return Err(err("all coefficients vanish".into()));
        }
        Ok(Self { dims: dims.to_vec(), terms })
    }

    /// Per-factor degrees; errors unless every monomial agrees.
    pub fn multidegree(&self) -> Result<Vec<u32>> {
        let deg = |m: &Monomial| m.exps.iter().map(|e| e.iter().sum::<u32>()).collect::<Vec<_>>();
        let d = deg(&self.terms[0]);
        if self.terms.iter().any(|m| deg(m) != d) {
            return Err(Error::Parse("equation is not multihomogeneous".into()));
        }
        Ok(d)
    }

    pub fn eval(&self, pts: &[ProjectivePoint]) -> BigInt {
        self.terms.iter().map(|m| term_value(m, pts, None)).sum()
    }

    /// `∂F/∂x_{k,i}` at the point.
    pub fn partial(&self, pts: &[ProjectivePoint], k: usize, i: usize) -> BigInt {
        self.terms.iter().map(|m| term_value(m, pts, Some((k, i)))).sum()
    }

    pub fn gradient(&self, pts: &[ProjectivePoint]) -> Vec<Vec<BigInt>> {
        self.dims.iter().enumerate().map(|(k, &n)| (0..=n).map(|i| self.partial(pts, k, i)).collect()).collect()
    }
}

fn term_value(m: &Monomial, pts: &[ProjectivePoint], diff: Option<(usize, usize)>) -> BigInt {
    let mut v = m.coeff.clone();
    for (k, e) in m.exps.iter().enumerate() {
        for (i, &p) in e.iter().enumerate() {
            let mut p = p;
            if diff == Some((k, i)) {
                if p == 0 {
                    return BigInt::zero();
                }
                v *= p;
                p -= 1;
            }
            if p > 0 {
                v *= num_traits::pow(pts[k].coords()[i].clone(), p as usize);
            }
        }
    }
    v
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, m) in self.terms.iter().enumerate() {
            let mut vars = Vec::new();
            for (k, e) in m.exps.iter().enumerate() {
                for (i, &p) in e.iter().enumerate() {
                    match p {
                        0 => {}
                        1 => vars.push(format!("{}{i}", LETTERS[k])),
                        _ => vars.push(format!("{}{i}^{p}", LETTERS[k])),
                    }
                }
            }
            let mag = m.coeff.abs();
            let sign = if m.coeff.is_negative() { "-" } else { "+" };
            if t == 0 {
                if m.coeff.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if !mag.is_one() || vars.is_empty() {
                write!(f, "{mag}")?;
                if !vars.is_empty() {
                    f.write_str("*")?;
                }
            }
            f.write_str(&vars.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarietyDescriptor {
    Projective { n: usize },
    /// Product of projective spaces of the given dimensions (at least two).
    Product { dims: Vec<usize> },
    /// One multihomogeneous equation in a product of projective spaces.
    Hypersurface { dims: Vec<usize>, multidegree: Vec<u32>, equation: Polynomial },
}

impl VarietyDescriptor {
    pub fn projective(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("projective dimension must be at least 1".into()));
        }
        Ok(Self::Projective { n })
    }

    pub fn product(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Parse("a product needs at least two factors".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Parse("factor dimensions must be at least 1".into()));
        }
        Ok(Self::Product { dims })
    }

    pub fn hypersurface(dims: Vec<usize>, equation: &str) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Parse("ambient factor dimensions must be at least 1".into()));
        }
        let equation = Polynomial::parse(&dims, equation)?;
        let multidegree = equation.multidegree()?;
        Ok(Self::Hypersurface { dims, multidegree, equation })
    }

    /// `Σ y_i x_i^3 = 0` in `P^3 × P^3`.
    pub fn batyrev_tschinkel() -> Self {
        Self::hypersurface(vec![3, 3], "x0^3*y0 + x1^3*y1 + x2^3*y2 + x3^3*y3").expect("valid preset")
    }

    /// Named presets: `P<n>`, `P<a>xP<b>[x...]`, `(P1)^<k>`, `P1^<k>`, `bt`, `quadric`.
    pub fn preset(name: &str) -> Option<Self> {
        let s = name.trim();
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "bt" | "batyrev-tschinkel" => return Some(Self::batyrev_tschinkel()),
            "quadric" => return Self::hypersurface(vec![4], "x0^2 + x1^2 + x2^2 - x3^2 - x4^2").ok(),
            _ => {}
        }
        let pn = |t: &str| -> Option<usize> { t.strip_prefix('p').and_then(|d| d.parse().ok()).filter(|&d| d >= 1) };
        for pat in ["(p", "p"] {
            if let Some(rest) = lower.strip_prefix(pat) {
                let close = if pat == "(p" { ")^" } else { "^" };
                if let Some((d, k)) = rest.split_once(close) {
                    let (d, k): (usize, usize) = (d.parse().ok()?, k.parse().ok()?);
                    return if k == 1 { Self::projective(d).ok() } else { Self::product(vec![d; k]).ok() };
                }
            }
        }
        let parts: Vec<&str> = lower.split('x').collect();
        let dims: Option<Vec<usize>> = parts.iter().map(|t| pn(t)).collect();
        match dims?.as_slice() {
            [n] => Self::projective(*n).ok(),
            d => Self::product(d.to_vec()).ok(),
        }
    }

    /// Parses the `key = value` configuration format (`#` starts a comment).
    ///
    /// ```text
    /// kind = hypersurface
    /// dims = 3,3
    /// equation = x0^3*y0 + x1^3*y1 + x2^3*y2 + x3^3*y3
    /// ```
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing key {k:?}")));
        let list = |v: &str| -> Result<Vec<usize>> {
            v.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension list {v:?}")))).collect()
        };
        let kind = get("kind")?;
        let desc = match kind {
            "projective" => Self::projective(get("dim").or_else(|_| get("dims"))?.parse().map_err(|_| Error::Parse("bad dim".into()))?)?,
            "product" => Self::product(list(get("dims")?)?)?,
            "hypersurface" => {
                let d = Self::hypersurface(list(get("dims")?)?, get("equation")?)?;
                if let (Ok(md), Self::Hypersurface { multidegree, .. }) = (get("multidegree"), &d) {
                    let want: Vec<u32> = list(md)?.into_iter().map(|v| v as u32).collect();
                    if &want != multidegree {
                        return Err(Error::Parse(format!("declared multidegree {want:?} does not match the equation's {multidegree:?}")));
                    }
                }
                d
            }
            "preset" => Self::preset(get("name")?).ok_or_else(|| Error::Parse("unknown preset".into()))?,
            other => return Err(Error::Parse(format!("unknown kind {other:?}"))),
        };
        Ok(desc)
    }

    /// Preset name or a path to a configuration file.
    pub fn resolve(spec: &str) -> Result<Self> {
        if let Some(d) = Self::preset(spec) {
            return Ok(d);
        }
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("variety {spec:?}: not a preset and unreadable ({e})")))?;
        Self::parse_config(&text)
    }

    /// Dimensions of the projective factors of the ambient space.
    pub fn factor_dims(&self) -> Vec<usize> {
        match self {
            Self::Projective { n } => vec![*n],
            Self::Product { dims } | Self::Hypersurface { dims, .. } => dims.clone(),
        }
    }

    /// Dimension of the variety.
    pub fn dim(&self) -> usize {
        let ambient: usize = self.factor_dims().iter().sum();
        match self {
            Self::Hypersurface { .. } => ambient - 1,
            _ => ambient,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Projective { n } => format!("P{n}"),
            Self::Product { dims } => dims.iter().map(|d| format!("P{d}")).collect::<Vec<_>>().join("x"),
            Self::Hypersurface { dims, equation, .. } => {
                if *self == Self::batyrev_tschinkel() {
                    "bt".to_string()
                } else {
                    format!("{{{} = 0}} in {}", equation, dims.iter().map(|d| format!("P{d}")).collect::<Vec<_>>().join("x"))
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Projective { n } => json!({"kind": "projective", "dim": n}),
            Self::Product { dims } => json!({"kind": "product", "dims": dims}),
            Self::Hypersurface { dims, multidegree, equation } => {
                json!({"kind": "hypersurface", "dims": dims, "multidegree": multidegree, "equation": equation.to_string()})
            }
        }
    }
}

/// A rational point of a variety: one projective point per ambient factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarietyPoint {
    pub factors: Vec<ProjectivePoint>,
}

impl VarietyPoint {
    pub fn new(factors: Vec<ProjectivePoint>) -> Self {
        Self { factors }
    }

    /// Parses factors separated by `;`, e.g. `"1:2 ; 1:1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let factors = s.split(';').map(ProjectivePoint::parse).collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    /// Checks factor dimensions and, for hypersurfaces, the equation.
    pub fn validate(&self, v: &VarietyDescriptor) -> Result<()> {
        let dims = v.factor_dims();
        let got: Vec<usize> = self.factors.iter().map(ProjectivePoint::dim).collect();
        if got != dims {
            return Err(Error::InvalidPoint(format!("point has factor dimensions {got:?}, variety needs {dims:?}")));
        }
        if let VarietyDescriptor::Hypersurface { equation, .. } = v {
            if !equation.eval(&self.factors).is_zero() {
                return Err(Error::NotOnVariety);
            }
        }
        Ok(())
    }
}

impl fmt::Display for VarietyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(" ; "))
    }
}
