//! North–south dynamics on the circle, `f(θ) = θ - sin(2πθ)/(4π)`, with
//! attracting `S = 0` and repelling `N = 1/2`.
//!
//! Points are stored as an offset from the nearer pole so that orbits
//! converging to a pole keep relative precision.

use std::f64::consts::{PI, TAU};

use super::circle;
use crate::bracket::{check_domain, Bracket, Hyperbolicity};
use crate::error::{Error, Result};
use crate::system::{Coordinates, MetricSystem, Sampling};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsPoint {
    north: bool,
    off: f64,
}

impl NsPoint {
    pub const SOUTH: NsPoint = NsPoint { north: false, off: 0.0 };
    pub const NORTH: NsPoint = NsPoint { north: true, off: 0.0 };

    fn charted(north: bool, off: f64) -> NsPoint {
        if off.abs() <= 0.25 {
            NsPoint { north, off }
        } else {
            let base = if north { 0.5 } else { 0.0 };
            let theta = circle::wrap01(base + off);
            let other = if north { 0.0 } else { 0.5 };
            NsPoint { north: !north, off: circle::arc(other, theta) }
        }
    }

    /// The point `S + off`.
    pub fn south(off: f64) -> NsPoint {
        Self::charted(false, off)
    }

    /// The point `N + off`.
    pub fn north(off: f64) -> NsPoint {
        Self::charted(true, off)
    }

    pub fn from_theta(t: f64) -> NsPoint {
        let t = circle::wrap01(t);
        if circle::dist(t, 0.0) <= 0.25 {
            NsPoint { north: false, off: circle::arc(0.0, t) }
        } else {
            NsPoint { north: true, off: circle::arc(0.5, t) }
        }
    }

    pub fn theta(&self) -> f64 {
        circle::wrap01(if self.north { 0.5 + self.off } else { self.off })
    }

    pub fn dist_south(&self) -> f64 {
        if self.north {
            0.5 - self.off.abs()
        } else {
            self.off.abs()
        }
    }

    pub fn dist_north(&self) -> f64 {
        if self.north {
            self.off.abs()
        } else {
            0.5 - self.off.abs()
        }
    }

    /// Signed shortest displacement to `q`.
    pub fn arc_to(&self, q: &NsPoint) -> f64 {
        if self.north == q.north {
            q.off - self.off
        } else {
            circle::arc(self.theta(), q.theta())
        }
    }

    /// The point displaced by `a` along the circle.
    pub fn moved(&self, a: f64) -> NsPoint {
        Self::charted(self.north, self.off + a)
    }
}

fn lifted_f(north: bool, z: f64) -> f64 {
    let s = (TAU * z).sin() / (4.0 * PI);
    if north {
        z + s
    } else {
        z - s
    }
}

fn lifted_df(north: bool, z: f64) -> f64 {
    let c = 0.5 * (TAU * z).cos();
    if north {
        1.0 + c
    } else {
        1.0 - c
    }
}

/// Solves `lifted_f(north, z) = target` for `z ∈ (-1/2, 1/2)`.
fn lifted_inverse(north: bool, target: f64) -> f64 {
    let (mut a, mut b) = (-0.5, 0.5);
    let mut z = if north { target / 1.5 } else { 2.0 * target };
    z = z.clamp(-0.49, 0.49);
    for _ in 0..100 {
        let h = lifted_f(north, z) - target;
        if h == 0.0 {
            return z;
        }
        if h < 0.0 {
            a = z;
        } else {
            b = z;
        }
        let mut next = z - h / lifted_df(north, z);
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        let step = (next - z).abs();
        z = next;
        if step <= 2.0 * f64::EPSILON * z.abs() || step < 1e-300 {
            break;
        }
    }
    z
}

/// Derivative of `f` at angle `θ`.
pub fn ns_derivative(theta: f64) -> f64 {
    1.0 - 0.5 * (TAU * theta).cos()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NorthSouth {
    r: f64,
    delta: f64,
    mu: f64,
    lip: f64,
    u: u32,
}

impl NorthSouth {
    /// Builds the system for plateau radius `r`; the bracket radius is `r/4`.
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 0.2) {
            return Err(Error::InvalidParameter(format!("north-south radius r = {r} must lie in (0, 0.2)")));
        }
        let delta = r / 4.0;
        let grid = 4096;
        let mut mu_s: f64 = 0.0;
        let mut mu_n: f64 = 0.0;
        let mut lip_f: f64 = 0.0;
        let mut lip_i: f64 = 0.0;
        for k in 0..=grid {
            let t = k as f64 / grid as f64;
            let d = ns_derivative(t);
            lip_f = lip_f.max(d);
            lip_i = lip_i.max(1.0 / d);
            let s = (2.0 * t - 1.0) * r;
            mu_s = mu_s.max(ns_derivative(s));
            mu_n = mu_n.max(1.0 / ns_derivative(0.5 + s));
        }
        let mut sys = NorthSouth { r, delta, mu: mu_s.max(mu_n), lip: lip_f.max(lip_i), u: 0 };
        sys.u = sys.transition_time()?;
        Ok(sys)
    }

    /// Smallest `u` with the covering property and with every point outside
    /// the `(r - δ)`-balls entering the `r/2`-balls after `u` steps either way.
    fn transition_time(&self) -> Result<u32> {
        let r = self.r;
        let reach_s = |u: u32| self.iterate(&NsPoint::south(0.5 - (r - self.delta)), u as i64).dist_south();
        let reach_n = |u: u32| self.iterate(&NsPoint::south(r - self.delta), -(u as i64)).dist_north();
        for u in 1..200 {
            let near_s = self.iterate(&NsPoint::south(0.5 - r), u as i64).theta();
            let far_n = self.iterate(&NsPoint::south(r), -(u as i64)).theta();
            let covered = far_n >= near_s;
            if covered && reach_s(u) < r / 2.0 && reach_n(u) < r / 2.0 {
                return Ok(u);
            }
        }
        Err(Error::Construction("no transition time below 200".into()))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Bracket radius `δ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Common Lipschitz constant of `f` and `f^{-1}`.
    pub fn lip_constant(&self) -> f64 {
        self.lip
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// `c = L^u / μ^u`.
    pub fn c(&self) -> f64 {
        (self.lip / self.mu).powi(self.u as i32)
    }

    /// The bump: 1 on `B_r(N)`, 0 on `B_r(S)`, linear in distance to `N` between.
    pub fn phi(&self, p: &NsPoint) -> f64 {
        let dn = p.dist_north();
        ((0.5 - self.r - dn) / (0.5 - 2.0 * self.r)).clamp(0.0, 1.0)
    }

    /// `[p, q] = p + φ(p)·arc(p → q)`.
    pub fn bracket_point(&self, p: &NsPoint, q: &NsPoint) -> Result<NsPoint> {
        let a = p.arc_to(q);
        if a.abs() >= 0.5 {
            return Err(Error::Antipodal);
        }
        let w = self.phi(p);
        Ok(if w == 0.0 {
            *p
        } else if w == 1.0 {
            *q
        } else {
            p.moved(w * a)
        })
    }
}

impl MetricSystem for NorthSouth {
    type Point = NsPoint;

    fn id(&self) -> String {
        "ns-circle".into()
    }
    fn dist(&self, p: &NsPoint, q: &NsPoint) -> f64 {
        p.arc_to(q).abs()
    }
    fn fwd(&self, p: &NsPoint) -> NsPoint {
        NsPoint::charted(p.north, lifted_f(p.north, p.off))
    }
    fn inv(&self, p: &NsPoint) -> NsPoint {
        NsPoint::charted(p.north, lifted_inverse(p.north, p.off))
    }
    fn lip_fwd(&self) -> f64 {
        1.5
    }
    fn lip_inv(&self) -> f64 {
        2.0
    }
    fn diam(&self) -> f64 {
        0.5
    }
    fn lip(&self) -> f64 {
        self.lip
    }
}

impl Sampling for NorthSouth {
    fn sample_dim(&self) -> usize {
        1
    }
    fn sample(&self, u: &[f64]) -> NsPoint {
        NsPoint::from_theta(u[0])
    }
    fn nearby(&self, p: &NsPoint, radius: f64, u: &[f64]) -> NsPoint {
        p.moved((2.0 * u[0] - 1.0) * radius.min(0.49))
    }
}

impl Coordinates for NorthSouth {
    fn to_coords(&self, p: &NsPoint) -> Vec<f64> {
        vec![p.theta()]
    }
    fn from_coords(&self, c: &[f64]) -> Result<NsPoint> {
        match c {
            [t] if t.is_finite() => Ok(NsPoint::from_theta(*t)),
            _ => Err(Error::InvalidParameter(format!("circle point needs one coordinate, got {c:?}"))),
        }
    }
}

/// The geodesic-interpolation bracket.
#[derive(Debug, Clone, Copy)]
pub struct NsBracket {
    radius: f64,
    hyp: Hyperbolicity,
}

impl NsBracket {
    pub fn new(sys: &NorthSouth) -> Self {
        NsBracket { radius: sys.delta(), hyp: Hyperbolicity { c: sys.c(), mu: sys.mu() } }
    }
}

impl Bracket<NorthSouth> for NsBracket {
    fn name(&self) -> String {
        "ns-geodesic".into()
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn eval(&self, sys: &NorthSouth, p: &NsPoint, q: &NsPoint) -> Result<NsPoint> {
        check_domain(sys, p, q, self.radius)?;
        sys.bracket_point(p, q)
    }
    fn declared(&self) -> Option<Hyperbolicity> {
        Some(self.hyp)
    }
}

pub fn ns_bracket(sys: &NorthSouth, p: &NsPoint, q: &NsPoint) -> Result<NsPoint> {
    NsBracket::new(sys).eval(sys, p, q)
}
