//! Joint distributions of two variables from cumulant data, and the
//! distributions of their sum and product.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::dist::{BDist, JointBDist, Word};
use crate::error::{Error, Result};
use crate::nccomb::cumulants::{eval_nested, tensor_from_partitions};
use crate::nccomb::tensor::{basis, sup_norm, unflatten, MultilinearTensor};
use crate::nccomb::{enumerate_nc, moments_to_cumulants, CumulantFamily};

fn check_pair(x: &BDist, y: &BDist) -> Result<()> {
    if x.d() != y.d() || x.order() != y.order() {
        return Err(Error::ShapeMismatch(format!(
            "marginals have shapes (d={}, N={}) and (d={}, N={})",
            x.d(),
            x.order(),
            y.d(),
            y.order()
        )));
    }
    Ok(())
}

/// Joint moments from joint cumulants: `M_w = Σ_{π∈NC(n)} κ_π` where each
/// block takes its cumulant from `mixed(colors of its legs)`. Constant words
/// copy the marginal moments verbatim.
fn join_with<'k>(
    x: &BDist,
    y: &BDist,
    block_cumulant: &dyn Fn(&[u8]) -> Option<&'k MultilinearTensor>,
) -> Result<JointBDist> {
    let (d, order) = (x.d(), x.order());
    let mut moments = BTreeMap::new();
    for n in 1..=order {
        let parts = enumerate_nc(n)?;
        for word in Word::all(n) {
            let tensor = if word.is_constant() {
                let src = if word.letters()[0] == 1 { x } else { y };
                src.moment(n).clone()
            } else {
                let letters = word.letters();
                tensor_from_partitions(d, n, |inserts| {
                    let mut acc = vec![Complex64::new(0.0, 0.0); d];
                    for p in &parts {
                        let v = eval_nested(p, inserts, d, &|legs| {
                            let colors: Vec<u8> = legs.iter().map(|&l| letters[l]).collect();
                            block_cumulant(&colors)
                        });
                        for (a, z) in acc.iter_mut().zip(v) {
                            *a += z;
                        }
                    }
                    acc
                })
            };
            moments.insert(word, tensor);
        }
    }
    JointBDist::new(d, order, [x.norm_bound(), y.norm_bound()], moments)
}

/// The `B`-free joint distribution: mixed cumulants vanish.
pub fn free_join(x: &BDist, y: &BDist) -> Result<JointBDist> {
    check_pair(x, y)?;
    let (kx, ky) = (moments_to_cumulants(x)?, moments_to_cumulants(y)?);
    join_with(x, y, &|colors| {
        if colors.iter().all(|&c| c == 1) {
            Some(kx.kappa(colors.len()))
        } else if colors.iter().all(|&c| c == 2) {
            Some(ky.kappa(colors.len()))
        } else {
            None
        }
    })
}

/// A non-free pair with the same marginals: every mixed cumulant of order
/// `n` is `½(κₙ(x) + κₙ(y))`. For `x = y` this is two identical copies.
pub fn correlated_join(x: &BDist, y: &BDist) -> Result<JointBDist> {
    check_pair(x, y)?;
    let (kx, ky) = (moments_to_cumulants(x)?, moments_to_cumulants(y)?);
    let mixed: Vec<MultilinearTensor> = kx
        .tensors()
        .iter()
        .zip(ky.tensors())
        .map(|(a, b)| {
            let mut m = a.clone();
            m.axpy(Complex64::new(1.0, 0.0), b);
            for z in m.data_mut() {
                *z *= 0.5;
            }
            m
        })
        .collect();
    join_with(x, y, &|colors| {
        let n = colors.len();
        if colors.iter().all(|&c| c == 1) {
            Some(kx.kappa(n))
        } else if colors.iter().all(|&c| c == 2) {
            Some(ky.kappa(n))
        } else {
            Some(&mixed[n - 1])
        }
    })
}

/// Largest `|E(x₁ b₁ x₂ ⋯ b_{n−1} xₙ)|` over the two alternating words of
/// length `n` with centered letters `xₖ = a_{iₖ} − E(a_{iₖ})`. Multilinearity
/// in the insertions means it suffices to range over basis insertions.
pub fn freeness_oracle(j: &JointBDist, n: usize) -> Result<f64> {
    if n == 0 || n > j.order() {
        return Err(Error::OrderExceeded { requested: n, available: j.order() });
    }
    let d = j.d();
    let means = [j.marginal(1).mean(), j.marginal(2).mean()];
    let basis_vecs: Vec<Vec<Complex64>> = (0..d).map(|i| basis(d, i)).collect();
    let mut worst: f64 = 0.0;
    for first in [1u8, 2] {
        let word = Word::alternating(n, first);
        for col in 0..d.pow(n as u32 - 1) {
            let idx = unflatten(col, d, n - 1);
            let inserts: Vec<&[Complex64]> = idx.iter().map(|&k| basis_vecs[k].as_slice()).collect();
            let mut total = vec![Complex64::new(0.0, 0.0); d];
            for mask in 0..1usize << n {
                let kept: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
                let term = j.eval_with_replacements(&word, &kept, &means, &inserts);
                for (t, z) in total.iter_mut().zip(term) {
                    *t += z;
                }
            }
            worst = worst.max(sup_norm(&total));
        }
    }
    Ok(worst)
}

/// Distribution of `a₁ + a₂`: `M_n = Σ_{|w|=n} M_w`.
pub fn sum_dist(j: &JointBDist) -> Result<BDist> {
    let moments = (1..=j.order())
        .map(|n| {
            let mut acc = MultilinearTensor::zeros(j.d(), n);
            for w in Word::all(n) {
                acc.axpy(Complex64::new(1.0, 0.0), j.moment(&w));
            }
            acc
        })
        .collect();
    let [n1, n2] = j.norm_bounds();
    BDist::new(j.d(), moments, n1 + n2)
}

/// Largest product order available from a joint of order `N`.
pub fn max_product_order(joint_order: usize) -> usize {
    joint_order / 2
}

/// Distribution of `a₁ a₂` up to order `order`:
/// `M_n(b₁…b_{n−1}) = E(a₁ 1 a₂ b₁ a₁ 1 a₂ ⋯ b_{n−1} a₁ 1 a₂)`.
pub fn prod_dist(j: &JointBDist, order: usize) -> Result<BDist> {
    if 2 * order > j.order() {
        return Err(Error::OrderExceeded { requested: 2 * order, available: j.order() });
    }
    let d = j.d();
    let moments = (1..=order)
        .map(|n| {
            let src = j.moment(&Word::alternating(2 * n, 1));
            // identity insertions sit at even slots, b's at odd slots
            MultilinearTensor::from_fn(d, n, |i, ks| {
                let mut s = Complex64::new(0.0, 0.0);
                for free in 0..d.pow(n as u32) {
                    let js = unflatten(free, d, n);
                    let mut col = 0;
                    for slot in 0..2 * n - 1 {
                        let idx = if slot % 2 == 0 { js[slot / 2] } else { ks[slot / 2] };
                        col = col * d + idx;
                    }
                    s += src.get(i, col);
                }
                s
            })
        })
        .collect();
    let [n1, n2] = j.norm_bounds();
    BDist::new(d, moments, n1 * n2)
}

/// Cumulants of the joint on constant words, used by tests and reports.
pub fn marginal_cumulants(j: &JointBDist) -> Result<(CumulantFamily, CumulantFamily)> {
    Ok((moments_to_cumulants(&j.marginal(1))?, moments_to_cumulants(&j.marginal(2))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nccomb::cumulants_to_moments;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_family(rng: &mut ChaCha8Rng, d: usize, order: usize, centered: bool) -> CumulantFamily {
        let tensors = (1..=order)
            .map(|n| {
                MultilinearTensor::from_fn(d, n, |_, _| {
                    if centered && n == 1 {
                        c(0.0)
                    } else {
                        Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
                    }
                })
            })
            .collect();
        CumulantFamily::new(d, tensors).unwrap()
    }

    fn dist(fam: &CumulantFamily) -> BDist {
        BDist::from_cumulants(fam, None).unwrap()
    }

    #[test]
    fn marginals_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = dist(&random_family(&mut rng, 2, 5, false));
        let y = dist(&random_family(&mut rng, 2, 5, false));
        let j = free_join(&x, &y).unwrap();
        assert_eq!(j.marginal(1), x);
        assert_eq!(j.marginal(2), y);
    }

    #[test]
    fn zero_variable_kills_words_containing_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = dist(&random_family(&mut rng, 2, 4, false));
        let zero = cumulants_to_moments(&CumulantFamily::zeros(2, 4)).unwrap();
        let j = free_join(&x, &zero).unwrap();
        for (w, t) in j.words() {
            if w.letters().contains(&2) {
                assert_eq!(t.max_abs(), 0.0, "{w}");
            }
        }
    }

    #[test]
    fn scalar_two_letter_moment_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = dist(&random_family(&mut rng, 1, 4, false));
        let y = dist(&random_family(&mut rng, 1, 4, false));
        let j = free_join(&x, &y).unwrap();
        let m12 = j.moment(&"12".parse().unwrap()).data()[0];
        assert!((m12 - x.mean()[0] * y.mean()[0]).norm() < 1e-15);
        // E(a1 a2 a1) = E(a1²) E(a2) in the scalar case
        let m121 = j.moment(&"121".parse().unwrap()).data()[0];
        assert!((m121 - x.moment(2).data()[0] * y.mean()[0]).norm() < 1e-14);
    }

    #[test]
    fn centered_alternating_words_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = dist(&random_family(&mut rng, 2, 6, true));
        let y = dist(&random_family(&mut rng, 2, 6, true));
        let j = free_join(&x, &y).unwrap();
        for n in 2..=6 {
            let t = j.moment(&Word::alternating(n, 1));
            assert!(t.max_abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn oracle_accepts_free_and_rejects_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = dist(&random_family(&mut rng, 2, 5, false));
        let y = dist(&random_family(&mut rng, 2, 5, false));
        let j = free_join(&x, &y).unwrap();
        for n in 1..=5 {
            assert!(freeness_oracle(&j, n).unwrap() <= 1e-10, "n={n}");
        }
        let bad = correlated_join(&x, &x).unwrap();
        assert_eq!(freeness_oracle(&bad, 1).unwrap(), 0.0);
        let k2 = moments_to_cumulants(&x).unwrap().kappa(2).max_abs();
        assert!(freeness_oracle(&bad, 2).unwrap() >= 0.5 * k2);
    }

    #[test]
    fn sum_of_free_semicirculars() {
        let s = cumulants_to_moments(&CumulantFamily::semicircular(1, 6, 1.0)).unwrap();
        let sum = sum_dist(&free_join(&s, &s).unwrap()).unwrap();
        let fam = moments_to_cumulants(&sum).unwrap();
        for n in 1..=6 {
            let want = if n == 2 { 2.0 } else { 0.0 };
            assert!((fam.kappa(n).data()[0] - c(want)).norm() < 1e-12);
        }
        assert_eq!(sum.norm_bound(), 2.0 * s.norm_bound());
    }

    #[test]
    fn sum_with_zero_and_means_add() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = dist(&random_family(&mut rng, 2, 4, false));
        let zero = cumulants_to_moments(&CumulantFamily::zeros(2, 4)).unwrap();
        let s = sum_dist(&free_join(&x, &zero).unwrap()).unwrap();
        assert!(s.max_abs_diff(&x) < 1e-15);

        let p = BDist::delta(&[c(0.3)], 4).unwrap();
        let q = BDist::delta(&[c(-1.1)], 4).unwrap();
        let s = sum_dist(&free_join(&p, &q).unwrap()).unwrap();
        assert!((s.mean()[0] - c(-0.8)).norm() < 1e-15);
    }

    #[test]
    fn cumulants_add_under_free_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=2 {
            let (fx, fy) = (random_family(&mut rng, d, 5, false), random_family(&mut rng, d, 5, false));
            let sum = sum_dist(&free_join(&dist(&fx), &dist(&fy)).unwrap()).unwrap();
            let fam = moments_to_cumulants(&sum).unwrap();
            for n in 1..=5 {
                let mut want = fx.kappa(n).clone();
                want.axpy(c(1.0), fy.kappa(n));
                assert!(fam.kappa(n).max_abs_diff(&want) < 1e-11, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn product_with_unit_and_delta_masses() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = dist(&random_family(&mut rng, 2, 6, false));
        let one = BDist::delta(&[c(1.0), c(1.0)], 6).unwrap();
        let p = prod_dist(&free_join(&x, &one).unwrap(), 3).unwrap();
        assert!(p.max_abs_diff(&x.truncated(3)) < 1e-13);

        let (cv, ev) = (0.6, -1.5);
        let p =
            prod_dist(&free_join(&BDist::delta(&[c(cv)], 6).unwrap(), &BDist::delta(&[c(ev)], 6).unwrap()).unwrap(), 3)
                .unwrap();
        for n in 1..=3 {
            assert!((p.moment(n).data()[0] - c((cv * ev).powi(n as i32))).norm() < 1e-14);
        }
    }

    #[test]
    fn product_order_guard() {
        let x = BDist::delta(&[c(1.0)], 6).unwrap();
        let j = free_join(&x, &x).unwrap();
        assert_eq!(max_product_order(6), 3);
        assert!(prod_dist(&j, 3).is_ok());
        assert!(matches!(prod_dist(&j, 4), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let x = BDist::delta(&[c(1.0)], 4).unwrap();
        let y = BDist::delta(&[c(1.0), c(2.0)], 4).unwrap();
        assert!(matches!(free_join(&x, &y), Err(Error::ShapeMismatch(_))));
    }
}
