//! One function per suite, each producing the record of a single trial.

use amalgam_core::balg::Element;
use amalgam_core::freedist::{
    additivity_radius, additivity_scaling, correlated_join, free_join, multiplicativity_radius,
    multiplicativity_scaling, JointBDist, ScalingOptions, ScalingReport,
};
use amalgam_core::nccomb::{lemma31_sides, CumulantFamily};
use amalgam_core::sampling::{random_invertible_in_b, random_phases};
use amalgam_core::transforms::{
    check_dilation, check_rs_relation, g_certificate, invert_g, invert_psi, psi_certificate, ConcreteModel,
};
use amalgam_core::{AlgebraContext, Complex64, Result};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ContextSpec, RunConfig, Suite};
use crate::instance::{digest_elements, family_digest, gen_instance, gen_pair, joint_digest, random_family, trial_rng};
use crate::report::{FixedPointSummary, Report, TrialRecord};

/// Largest order `r` exercised by the `lemma31` suite.
pub const LEMMA31_MAX_R: usize = 6;

/// Slack on the contraction bounds.
const CONTRACTION_SLACK: f64 = 1e-9;

/// Runs every trial of `cfg.suite` (or of each suite, for `all`).
pub fn run_suite(cfg: &RunConfig) -> Report {
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let start = std::time::Instant::now();
    let mut trials = Vec::with_capacity(suites.len() * cfg.trials);
    for s in suites {
        let recs: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, s, t)).collect();
        trials.extend(recs);
    }
    let mut report = Report::new(cfg.clone(), trials);
    if cfg.timing {
        report.aggregate.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    report
}

/// A single trial of a single suite. `suite` must not be `All`.
pub fn run_trial(cfg: &RunConfig, suite: Suite, trial: usize) -> TrialRecord {
    match suite {
        Suite::Domains => domains(cfg, trial),
        Suite::Rs => rs(cfg, trial),
        Suite::Dilation => dilation(cfg, trial),
        Suite::Additivity => additivity(cfg, trial),
        Suite::Multiplicativity => multiplicativity(cfg, trial),
        Suite::Lemma31 => lemma31(cfg, trial),
        Suite::All => unreachable!("`all` is expanded by run_suite"),
    }
}

/// Runs `body` on a fresh record and turns an error into a failed trial.
fn record(
    suite: Suite,
    trial: usize,
    digest: String,
    body: impl FnOnce(&mut TrialRecord) -> Result<()>,
) -> TrialRecord {
    let mut rec = TrialRecord::new(suite.name(), trial, digest);
    if let Err(e) = body(&mut rec) {
        rec.fail(e);
    }
    rec
}

fn domains(cfg: &RunConfig, trial: usize) -> TrialRecord {
    let inst = gen_instance(cfg, trial);
    record(Suite::Domains, trial, inst.digest.clone(), |rec| {
        let model = inst.model(cfg)?;
        rec.set_point(&inst.point);
        let (_, g) = invert_g(&model, &inst.point, cfg.tol)?;
        let g_ok = g.converged
            && g.max_contraction() <= 0.5 + CONTRACTION_SLACK
            && g.final_residual <= cfg.tol
            && g.preimage_norm <= g.certificate.radius_preimage;

        let cert = psi_certificate(&model)?;
        let w_psi = inst.point_at(cfg.ball_fraction * cert.radius_onto);
        let (_, p) = invert_psi(&model, &w_psi, cfg.tol)?;
        let p_ok = p.converged
            && p.max_contraction() <= cert.contraction_bound() + CONTRACTION_SLACK
            && p.final_residual <= cfg.tol
            && p.preimage_norm <= cert.radius_preimage;

        rec.put("g_residual", g.final_residual);
        rec.put("psi_residual", p.final_residual);
        rec.residual = g.final_residual.max(p.final_residual);
        rec.fixed_point = vec![FixedPointSummary::new("g", &g), FixedPointSummary::new("psi", &p)];
        rec.passed = g_ok && p_ok;
        Ok(())
    })
}

fn rs(cfg: &RunConfig, trial: usize) -> TrialRecord {
    let inst = gen_instance(cfg, trial);
    record(Suite::Rs, trial, inst.digest.clone(), |rec| {
        let model = inst.model(cfg)?;
        let radius = g_certificate(&model).radius_onto.min(psi_certificate(&model)?.radius_onto);
        let b = inst.point_at(cfg.ball_fraction * 0.5 * radius);
        rec.set_point(&b);
        let r = check_rs_relation(&model, &b, cfg.check_tol())?;
        rec.put("r_residual", r.r_residual);
        rec.put("s_residual", r.s_residual);
        rec.residual = r.r_residual.max(r.s_residual);
        rec.passed = r.passed;
        Ok(())
    })
}

/// A diagonal element of `B` with real entries in `[0.5, 2]`.
fn random_dilation(cfg: &RunConfig, trial: usize) -> Element {
    let mut rng = trial_rng(cfg.seed, trial, "dilation-z");
    let ctx = cfg.context.context();
    let n = match cfg.context {
        ContextSpec::BlockTensor { k, .. } => k,
        ContextSpec::Diagonal { m } => m,
    };
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=2.0)).collect();
    ctx.expand(&Element::from_real_diag(&diag))
}

fn dilation(cfg: &RunConfig, trial: usize) -> TrialRecord {
    let inst = gen_instance(cfg, trial);
    let z = random_dilation(cfg, trial);
    let digest = digest_elements(&[&inst.a, &inst.point, &z]);
    record(Suite::Dilation, trial, digest, |rec| {
        let ctx = cfg.context.context();
        let model = inst.model(cfg)?;
        let za = ConcreteModel::new(ctx, z.mat_mul(&inst.a)?)?;
        let zm = ConcreteModel::new(ctx, z.clone())?;
        let mut radius = f64::INFINITY;
        for m in [&model, &za, &zm] {
            radius = radius.min(psi_certificate(m)?.radius_onto);
        }
        let b = inst.point_at(cfg.ball_fraction * radius);
        rec.set_point(&b);
        let r = check_dilation(&model, &z, &b, cfg.check_tol())?;
        rec.put("psi_residual", r.psi_residual);
        rec.put("s_residual", r.s_residual);
        rec.put("s_z_residual", r.s_z_residual);
        rec.residual = r.s_residual.max(r.psi_residual).max(r.s_z_residual);
        rec.passed = r.passed;
        Ok(())
    })
}

fn put_scaling(rec: &mut TrialRecord, s: &ScalingReport) {
    rec.put("residual_half", s.residual_half);
    rec.put("ratio", s.ratio);
    rec.put("required_ratio", s.required_ratio);
    rec.put("c_estimate", s.c_estimate);
    rec.put("n_eff", s.n_eff as f64);
    rec.residual = s.residual;
    rec.passed = s.passed;
}

/// Shared driver of the two scaling suites.
fn scaling_trial(
    cfg: &RunConfig,
    trial: usize,
    suite: Suite,
    invertible_mean: bool,
    radius: fn(&JointBDist) -> Result<f64>,
    test: fn(&JointBDist, &Element, ScalingOptions) -> Result<ScalingReport>,
) -> TrialRecord {
    let built = (|| -> Result<(JointBDist, Element)> {
        let (x, y) = gen_pair(cfg, trial, &format!("{}-pair", suite.name()), invertible_mean)?;
        let joint = if cfg.negative_control { correlated_join(&x, &y)? } else { free_join(&x, &y)? };
        let mut rng = trial_rng(cfg.seed, trial, &format!("{}-point", suite.name()));
        let ctx = AlgebraContext::diagonal(joint.d());
        let w = random_invertible_in_b(&mut rng, &ctx, cfg.ball_fraction * radius(&joint)?);
        Ok((joint, w))
    })();
    let (joint, w) = match built {
        Ok(v) => v,
        Err(e) => {
            let mut rec = TrialRecord::new(suite.name(), trial, String::new());
            rec.control = cfg.negative_control;
            rec.fail(e);
            return rec;
        }
    };
    let mut rec = record(suite, trial, joint_digest(&joint, &w), |rec| {
        rec.set_point(&w);
        let s = test(&joint, &w, ScalingOptions::default())?;
        put_scaling(rec, &s);
        Ok(())
    });
    rec.control = cfg.negative_control;
    rec
}

fn additivity(cfg: &RunConfig, trial: usize) -> TrialRecord {
    scaling_trial(cfg, trial, Suite::Additivity, false, additivity_radius, additivity_scaling)
}

fn multiplicativity(cfg: &RunConfig, trial: usize) -> TrialRecord {
    scaling_trial(cfg, trial, Suite::Multiplicativity, true, multiplicativity_radius, multiplicativity_scaling)
}

fn lemma31(cfg: &RunConfig, trial: usize) -> TrialRecord {
    let d = cfg.context.diagonal_dim();
    let mut rng = trial_rng(cfg.seed, trial, "lemma31");
    let max_r = LEMMA31_MAX_R.min(cfg.order);
    let mean: Vec<Complex64> =
        (0..d).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let fam: CumulantFamily = random_family(&mut rng, d, max_r, mean);
    let scale = rng.random_range(0.2..=1.0);
    let b: Vec<Complex64> = random_phases(&mut rng, d).into_iter().map(|z| z * scale).collect();
    let bel = Element::from_diag(&b);
    let digest = family_digest(&fam, &bel);
    record(Suite::Lemma31, trial, digest, |rec| {
        rec.set_point(&bel);
        let mut worst = 0.0f64;
        let mut ok = true;
        for r in 1..=max_r {
            let sides = lemma31_sides(&fam, r, &b)?;
            let size = sides.alternating_sum.iter().chain(&sides.irreducible_sum).map(|z| z.norm()).fold(1.0, f64::max);
            let res = sides.residual();
            rec.put(&format!("r{r}"), res);
            ok &= res <= 1e-10 * size;
            worst = worst.max(res / size);
        }
        rec.residual = worst;
        rec.passed = ok;
        Ok(())
    })
}
