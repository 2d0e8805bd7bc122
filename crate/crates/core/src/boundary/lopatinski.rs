//! Sampled lower bound of the normalized Lopatinski quantity over `Γ_δ`.

use alloc::vec::Vec;

use super::roots::{char_roots_at, classify_at, ModeQuadratic, Region, GLANCING_TOL};
use super::BoundaryCovector;
use crate::medium::{check_class_membership, ClassParams, Medium, CLASS_GRID};
use crate::sampling::{gamma_delta_covector, seeded};
use crate::{Mode, Result};

/// Samples whose normalized discriminant is below this in either mode are
/// skipped as near-glancing.
pub const DISCRIMINANT_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LopatinskiSample {
    pub covector: BoundaryCovector,
    pub region: Region,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LopatinskiReport {
    pub sample_count: usize,
    pub skipped: usize,
    pub samples: Vec<LopatinskiSample>,
    pub min_margin: f64,
    pub argmin: Option<LopatinskiSample>,
    /// Whether the medium passed the class check; only then is positivity
    /// asserted.
    pub in_class: bool,
}

impl LopatinskiReport {
    pub fn asserted(&self) -> bool {
        self.in_class
    }

    pub fn passed(&self) -> bool {
        !self.in_class || (self.argmin.is_some() && self.min_margin > 0.0)
    }

    /// Minimum margin over samples with the given region label.
    pub fn region_min(&self, region: Region) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.region == region)
            .map(|s| s.margin)
            .reduce(f64::min)
    }
}

pub fn lopatinski_margin(m: &Medium, params: &ClassParams, sample_count: usize, seed: u64) -> Result<LopatinskiReport> {
    let in_class = check_class_membership(m, params, CLASS_GRID)?.passed();
    let mut rng = seeded(seed);
    let mut samples = Vec::with_capacity(sample_count);
    let mut skipped = 0;
    for _ in 0..sample_count {
        let gamma = gamma_delta_covector(&m.domain, params.delta, &mut rng);
        let coef = m.coefficients(&gamma.x());
        let near = Mode::BOTH
            .iter()
            .any(|&mode| ModeQuadratic::new(&coef, mode, &gamma).normalized_disc().abs() < DISCRIMINANT_MARGIN);
        if near {
            skipped += 1;
            continue;
        }
        let roots = char_roots_at(&coef, &gamma, GLANCING_TOL)?;
        let label = classify_at(&coef, &gamma, params.delta, GLANCING_TOL);
        samples.push(LopatinskiSample {
            covector: gamma,
            region: label.region,
            margin: roots.normalized_lopatinski(),
        });
    }
    let argmin = samples
        .iter()
        .copied()
        .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap_or(core::cmp::Ordering::Equal));
    Ok(LopatinskiReport {
        sample_count,
        skipped,
        min_margin: argmin.map_or(f64::NAN, |s| s.margin),
        argmin,
        samples,
        in_class,
    })
}
