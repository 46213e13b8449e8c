//! Seeded random instances.
//!
//! Every random draw comes from a ChaCha20 stream keyed by
//! `sha256(seed, trial, tag)`, so a trial's data does not depend on which
//! thread runs it or on which other trials exist.

use amalgam_core::balg::Element;
use amalgam_core::freedist::{BDist, JointBDist};
use amalgam_core::nccomb::{CumulantFamily, MultilinearTensor};
use amalgam_core::sampling::{random_element, random_invertible_in_b};
use amalgam_core::transforms::{g_certificate, ConcreteModel};
use amalgam_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// The RNG stream for `(seed, trial, tag)`.
pub fn trial_rng(seed: u64, trial: usize, tag: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    h.update(tag.as_bytes());
    let key: [u8; 32] = h.finalize().into();
    ChaCha20Rng::from_seed(key)
}

/// Hex SHA-256 over the entries of `elements`.
pub fn digest_elements(elements: &[&Element]) -> String {
    let mut h = Sha256::new();
    for e in elements {
        h.update((e.dim() as u64).to_le_bytes());
        for z in e.entries() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Digest of a joint distribution and a sample point.
pub fn joint_digest(j: &JointBDist, w: &Element) -> String {
    let mut h = Sha256::new();
    h.update(j.to_json().as_bytes());
    h.update(digest_elements(&[w]).as_bytes());
    hex::encode(h.finalize())
}

/// Digest of a cumulant family and a sample point.
pub fn family_digest(fam: &CumulantFamily, b: &Element) -> String {
    let mut h = Sha256::new();
    for t in fam.tensors() {
        for z in t.data() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    h.update(digest_elements(&[b]).as_bytes());
    hex::encode(h.finalize())
}

/// A matrix `a` and an invertible point of `B` on the sphere of radius
/// `ball_fraction · 1/(11‖a‖)`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub a: Element,
    pub point: Element,
    pub radius: f64,
    pub digest: String,
}

impl Instance {
    pub fn model(&self, cfg: &RunConfig) -> Result<ConcreteModel> {
        ConcreteModel::new(cfg.context.context(), self.a.clone())
    }

    /// `point` rescaled to norm `norm`.
    pub fn point_at(&self, norm: f64) -> Element {
        self.point.scale_real(norm / self.point.op_norm())
    }
}

pub fn gen_instance(cfg: &RunConfig, trial: usize) -> Instance {
    let ctx = cfg.context.context();
    let mut rng = trial_rng(cfg.seed, trial, "matrix-instance");
    let a = random_element(&mut rng, ctx.ambient_dim(), 1.0);
    let model = ConcreteModel::new(ctx, a.clone()).expect("dimensions agree by construction");
    let radius = g_certificate(&model).radius_onto;
    let point = random_invertible_in_b(&mut rng, &ctx, cfg.ball_fraction * radius);
    let digest = digest_elements(&[&a, &point]);
    Instance { a, point, radius, digest }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Cumulants with `κ₁ = mean` and `κ_n` entries uniform in the square of
/// half-width `0.5^{n−1}`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, d: usize, order: usize, mean: Vec<Complex64>) -> CumulantFamily {
    let mut tensors = vec![MultilinearTensor::new(d, 1, mean).expect("mean has d entries")];
    for n in 2..=order {
        let s = 0.5f64.powi(n as i32 - 1);
        tensors.push(MultilinearTensor::from_fn(d, n, |_, _| {
            c(s * rng.random_range(-1.0..1.0), s * rng.random_range(-1.0..1.0))
        }));
    }
    CumulantFamily::new(d, tensors).expect("tensors have orders 1..=order")
}

/// A pair of distributions for the additivity and multiplicativity suites.
/// For multiplicativity the means have moduli in `[0.5, 1.5]`.
pub fn gen_pair(cfg: &RunConfig, trial: usize, tag: &str, invertible_mean: bool) -> Result<(BDist, BDist)> {
    let d = cfg.context.diagonal_dim();
    let mut rng = trial_rng(cfg.seed, trial, tag);
    let one = |rng: &mut ChaCha20Rng| {
        let mean: Vec<Complex64> = (0..d)
            .map(|_| {
                if invertible_mean {
                    Complex64::from_polar(rng.random_range(0.5..=1.5), rng.random_range(0.0..std::f64::consts::TAU))
                } else {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }
            })
            .collect();
        BDist::from_cumulants(&random_family(rng, d, cfg.order, mean), None)
    };
    let x = one(&mut rng)?;
    let y = one(&mut rng)?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ContextSpec, Suite};

    #[test]
    fn instances_are_reproducible() {
        let cfg = RunConfig::new(Suite::Domains);
        let a = gen_instance(&cfg, 3);
        let b = gen_instance(&cfg, 3);
        assert_eq!(a.digest, b.digest);
        assert_ne!(a.digest, gen_instance(&cfg, 4).digest);
        let other_seed = RunConfig { seed: 1, ..cfg.clone() };
        assert_ne!(a.digest, gen_instance(&other_seed, 3).digest);
    }

    #[test]
    fn instance_norms() {
        for context in [ContextSpec::BlockTensor { k: 2, d: 2 }, ContextSpec::Diagonal { m: 5 }] {
            let cfg = RunConfig { context, ball_fraction: 0.7, ..RunConfig::new(Suite::Domains) };
            for t in 0..10 {
                let inst = gen_instance(&cfg, t);
                let na = inst.a.op_norm();
                assert!((0.9..=1.1).contains(&na), "{na}");
                assert!((inst.point.op_norm() - 0.7 * inst.radius).abs() <= 1e-12);
                assert!(cfg.context.context().is_invertible_in_b(&inst.point).unwrap());
            }
        }
    }

    #[test]
    fn rng_streams_differ_by_tag() {
        let mut a = trial_rng(1, 0, "x");
        let mut b = trial_rng(1, 0, "y");
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn pair_means_are_invertible_when_asked() {
        let cfg = RunConfig::new(Suite::Multiplicativity);
        let (x, y) = gen_pair(&cfg, 0, "pair", true).unwrap();
        for m in x.mean().iter().chain(&y.mean()) {
            assert!((0.5..=1.5 + 1e-12).contains(&m.norm()));
        }
        assert_eq!(x.order(), cfg.order);
    }
}
