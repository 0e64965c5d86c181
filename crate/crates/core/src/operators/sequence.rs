use serde::{Deserialize, Serialize};

use crate::holocalc::Polynomial;
use crate::{Error, Result, C64};

/// Scan limit when searching a sequence for points near `z`.
const SCAN_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `1 / sqrt(n + 1)`
    InvSqrt,
    /// `(-1)^n / (n + 1)`
    AltReciprocal,
}

/// How the sequence continues after its explicit prefix. Indices `n` are
/// global (the prefix occupies `0..prefix.len()`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TailRule {
    Constant(C64),
    /// `start * ratio^(n - prefix_len)`; needs `|ratio| < 1` or `ratio == 1`.
    Geometric { start: C64, ratio: C64 },
    /// `scale / (n + offset)`
    Reciprocal { scale: C64, offset: f64 },
    /// Cycles through the values.
    Periodic(Vec<C64>),
    ClosedForm(ClosedForm),
}

/// Pointwise map applied after the base rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    Poly(Polynomial),
    Conj,
}

/// Bounded complex sequence `(lambda_n)`: an explicit prefix, a tail rule and
/// a stack of pointwise transforms (from the functional calculus and adjoints).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRule {
    prefix: Vec<C64>,
    tail: TailRule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    transforms: Vec<Transform>,
}

/// A sequence term or limit point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequencePoint {
    Index(usize),
    /// Index into [`SequenceRule::accumulation_points`].
    Accumulation(usize),
}

/// Outcome of [`SequenceRule::find_within`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Search {
    Found { point: SequencePoint, distance: f64 },
    /// No point within the radius. `exhaustive` is false when the scan cap
    /// was hit before the tail bound excluded the remaining terms.
    NotFound { exhaustive: bool },
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl SequenceRule {
    pub fn new(prefix: Vec<C64>, tail: TailRule) -> Result<Self> {
        if !prefix.iter().copied().all(finite) {
            return Err(Error::UnboundedSequence("non-finite prefix value".into()));
        }
        let p = prefix.len();
        match &tail {
            TailRule::Constant(c) if !finite(*c) => {
                return Err(Error::UnboundedSequence("non-finite constant".into()))
            }
            TailRule::Geometric { start, ratio } => {
                if !finite(*start) || !finite(*ratio) {
                    return Err(Error::UnboundedSequence("non-finite geometric parameter".into()));
                }
                let r = ratio.norm();
                if r > 1.0 {
                    return Err(Error::UnboundedSequence(format!(
                        "geometric ratio modulus {r} > 1"
                    )));
                }
                if r == 1.0 && *ratio != C64::new(1.0, 0.0) {
                    return Err(Error::UnsupportedOperator(
                        "unimodular geometric ratio other than 1 has no finite accumulation set".into(),
                    ));
                }
            }
            TailRule::Reciprocal { scale, offset } => {
                if !finite(*scale) || !offset.is_finite() {
                    return Err(Error::UnboundedSequence("non-finite reciprocal parameter".into()));
                }
                if p as f64 + offset <= 0.0 {
                    return Err(Error::UnboundedSequence(format!(
                        "reciprocal offset {offset} makes n + offset <= 0 at n = {p}"
                    )));
                }
            }
            TailRule::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::UnboundedSequence("empty periodic tail".into()));
                }
                if !values.iter().copied().all(finite) {
                    return Err(Error::UnboundedSequence("non-finite periodic value".into()));
                }
            }
            _ => {}
        }
        Ok(Self {
            prefix,
            tail,
            transforms: Vec::new(),
        })
    }

    pub fn constant(c: C64) -> Result<Self> {
        Self::new(Vec::new(), TailRule::Constant(c))
    }

    /// `scale / (n + offset)`.
    pub fn reciprocal(scale: C64, offset: f64) -> Result<Self> {
        Self::new(Vec::new(), TailRule::Reciprocal { scale, offset })
    }

    pub fn prefix(&self) -> &[C64] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    fn base_value(&self, n: usize) -> C64 {
        if let Some(v) = self.prefix.get(n) {
            return *v;
        }
        let m = n - self.prefix.len();
        match &self.tail {
            TailRule::Constant(c) => *c,
            TailRule::Geometric { start, ratio } => {
                if *ratio == C64::new(1.0, 0.0) {
                    *start
                } else {
                    start * ratio.powu(m.min(u32::MAX as usize) as u32)
                }
            }
            TailRule::Reciprocal { scale, offset } => scale / (n as f64 + offset),
            TailRule::Periodic(values) => values[m % values.len()],
            TailRule::ClosedForm(ClosedForm::InvSqrt) => C64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0),
            TailRule::ClosedForm(ClosedForm::AltReciprocal) => {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                C64::new(sign / (n + 1) as f64, 0.0)
            }
        }
    }

    fn transform(&self, mut z: C64) -> C64 {
        for t in &self.transforms {
            z = match t {
                Transform::Poly(p) => p.eval(z),
                Transform::Conj => z.conj(),
            };
        }
        z
    }

    /// `lambda_n`.
    pub fn value(&self, n: usize) -> C64 {
        self.transform(self.base_value(n))
    }

    fn base_bound(&self) -> f64 {
        let p = self.prefix.len();
        let tail = match &self.tail {
            TailRule::Constant(c) => c.norm(),
            TailRule::Geometric { start, .. } => start.norm(),
            TailRule::Reciprocal { scale, offset } => scale.norm() / (p as f64 + offset),
            TailRule::Periodic(values) => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            TailRule::ClosedForm(ClosedForm::InvSqrt) => 1.0 / ((p + 1) as f64).sqrt(),
            TailRule::ClosedForm(ClosedForm::AltReciprocal) => 1.0 / (p + 1) as f64,
        };
        self.prefix.iter().map(|v| v.norm()).fold(tail, f64::max)
    }

    /// Upper bound for `sup_n |lambda_n|`.
    pub fn bound(&self) -> f64 {
        self.transforms.iter().fold(self.base_bound(), |b, t| match t {
            Transform::Poly(p) => p.bound_on_disk(b),
            Transform::Conj => b,
        })
    }

    fn base_accumulation(&self) -> Vec<C64> {
        match &self.tail {
            TailRule::Constant(c) => vec![*c],
            TailRule::Geometric { start, ratio } if *ratio == C64::new(1.0, 0.0) => vec![*start],
            TailRule::Periodic(values) => values.clone(),
            _ => vec![C64::new(0.0, 0.0)],
        }
    }

    /// Limit points of the sequence, in a fixed order (duplicates possible).
    pub fn accumulation_points(&self) -> Vec<C64> {
        self.base_accumulation()
            .into_iter()
            .map(|z| self.transform(z))
            .collect()
    }

    /// True when the only limit point is 0.
    pub fn tends_to_zero(&self) -> bool {
        self.accumulation_points()
            .iter()
            .all(|z| *z == C64::new(0.0, 0.0))
    }

    /// True when every term from the prefix on is a limit point,
    /// i.e. the closure is the finite set of prefix and limit values.
    pub fn eventually_periodic(&self) -> bool {
        match &self.tail {
            TailRule::Constant(_) | TailRule::Periodic(_) => true,
            TailRule::Geometric { ratio, .. } => *ratio == C64::new(1.0, 0.0),
            _ => false,
        }
    }

    /// Prefix values followed by the limit points (the whole closure when
    /// [`Self::eventually_periodic`]).
    pub fn listed_values(&self) -> Vec<C64> {
        let mut out: Vec<C64> = (0..self.prefix.len()).map(|n| self.value(n)).collect();
        out.extend(self.accumulation_points());
        out
    }

    /// Upper bound for `sup_{m >= n} dist(lambda_m, limit set)`, valid for
    /// `n >= prefix.len()`.
    pub fn tail_radius(&self, n: usize) -> f64 {
        let p = self.prefix.len();
        let n = n.max(p);
        let base = match &self.tail {
            TailRule::Constant(_) | TailRule::Periodic(_) => 0.0,
            TailRule::Geometric { start, ratio } => {
                if *ratio == C64::new(1.0, 0.0) {
                    0.0
                } else {
                    start.norm() * ratio.norm().powf((n - p) as f64)
                }
            }
            TailRule::Reciprocal { scale, offset } => scale.norm() / (n as f64 + offset),
            TailRule::ClosedForm(ClosedForm::InvSqrt) => 1.0 / ((n + 1) as f64).sqrt(),
            TailRule::ClosedForm(ClosedForm::AltReciprocal) => 1.0 / (n + 1) as f64,
        };
        let mut bound = self.base_bound();
        let mut radius = base;
        for t in &self.transforms {
            if let Transform::Poly(poly) = t {
                radius *= poly.lipschitz_on_disk(bound);
                bound = poly.bound_on_disk(bound);
            }
        }
        radius
    }

    pub fn mapped(&self, p: &Polynomial) -> Self {
        let mut out = self.clone();
        if !p.is_identity() {
            out.transforms.push(Transform::Poly(p.clone()));
        }
        out
    }

    pub fn conjugated(&self) -> Self {
        let mut out = self.clone();
        if out.transforms.last() == Some(&Transform::Conj) {
            out.transforms.pop();
        } else {
            out.transforms.push(Transform::Conj);
        }
        out
    }

    /// A point of the closure within `radius` of `z`. Limit points are tried
    /// first (closest one wins), then terms in index order.
    pub fn find_within(&self, z: C64, radius: f64) -> Search {
        let accum = self.accumulation_points();
        let mut d_accum = f64::INFINITY;
        let mut best_accum = 0;
        for (k, a) in accum.iter().enumerate() {
            let d = (a - z).norm();
            if d < d_accum {
                d_accum = d;
                best_accum = k;
            }
        }
        if d_accum <= radius {
            return Search::Found {
                point: SequencePoint::Accumulation(best_accum),
                distance: d_accum,
            };
        }
        let p = self.prefix.len();
        for n in 0..SCAN_CAP {
            if n >= p && d_accum - self.tail_radius(n) > radius {
                return Search::NotFound { exhaustive: true };
            }
            let d = (self.value(n) - z).norm();
            if d <= radius {
                return Search::Found {
                    point: SequencePoint::Index(n),
                    distance: d,
                };
            }
        }
        Search::NotFound { exhaustive: false }
    }

    /// The base value behind a point (before any transform).
    pub fn base_point(&self, point: SequencePoint) -> C64 {
        match point {
            SequencePoint::Index(n) => self.base_value(n),
            SequencePoint::Accumulation(k) => self.base_accumulation()[k],
        }
    }

    /// Value of a point after the transforms.
    pub fn point_value(&self, point: SequencePoint) -> C64 {
        self.transform(self.base_point(point))
    }
}
