use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result, Vec3};

/// Distance from the boundary, in level-set units, accepted as "on" it.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Level-set domain `{φ < 0}` with exterior normal `∇φ/|∇φ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `φ(x) = |x|² − 1`.
    UnitBall,
    /// `φ(x) = Σ (x_i/a_i)² − 1`.
    Ellipsoid { semi_axes: Vec3 },
}

impl Domain {
    pub fn ellipsoid(semi_axes: Vec3) -> Result<Self> {
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter("ellipsoid semi-axes must be positive"));
        }
        Ok(Domain::Ellipsoid { semi_axes })
    }

    fn axes(&self) -> Vec3 {
        match self {
            Domain::UnitBall => Vec3::repeat(1.0),
            Domain::Ellipsoid { semi_axes } => *semi_axes,
        }
    }

    pub fn level(&self, x: &Vec3) -> f64 {
        match self {
            Domain::UnitBall => x.norm_squared() - 1.0,
            Domain::Ellipsoid { semi_axes } => x.component_div(semi_axes).norm_squared() - 1.0,
        }
    }

    pub fn level_gradient(&self, x: &Vec3) -> Vec3 {
        let a = self.axes();
        Vec3::from_fn(|i, _| 2.0 * x[i] / (a[i] * a[i]))
    }

    /// Exterior unit normal (meaningful near the boundary).
    pub fn normal(&self, x: &Vec3) -> Vec3 {
        self.level_gradient(x).normalize()
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.level(x) <= BOUNDARY_TOL
    }

    pub fn require_closed(&self, x: &Vec3) -> Result<()> {
        let level = self.level(x);
        if level > BOUNDARY_TOL || !level.is_finite() {
            Err(Error::OutOfDomain { level })
        } else {
            Ok(())
        }
    }

    pub fn require_boundary(&self, x: &Vec3) -> Result<Vec3> {
        let level = self.level(x);
        if level.abs() > BOUNDARY_TOL || !level.is_finite() {
            Err(Error::NotOnBoundary { level })
        } else {
            Ok(self.normal(x))
        }
    }

    /// Boundary point hit by the ray from the origin along `dir`.
    pub fn boundary_point(&self, dir: &Vec3) -> Vec3 {
        let u = dir.normalize();
        u / u.component_div(&self.axes()).norm()
    }

    /// Half-extents of the bounding box.
    pub fn half_extents(&self) -> Vec3 {
        self.axes()
    }

    /// Closed-domain sample set: the interior points of an `n³` grid over the
    /// bounding box plus `n²` boundary points on a Fibonacci lattice.
    pub fn sample_grid(&self, n: usize) -> Vec<Vec3> {
        let n = n.max(2);
        let ext = self.half_extents();
        let mut pts = Vec::with_capacity(n * n * n + n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let u = |idx: usize, a: f64| -a + 2.0 * a * idx as f64 / (n - 1) as f64;
                    let x = Vec3::new(u(i, ext.x), u(j, ext.y), u(k, ext.z));
                    if self.level(&x) <= 0.0 {
                        pts.push(x);
                    }
                }
            }
        }
        pts.extend(fibonacci_sphere(n * n).iter().map(|d| self.boundary_point(d)));
        pts
    }
}

/// Quasi-uniform unit vectors.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec3> {
    let golden = core::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}
