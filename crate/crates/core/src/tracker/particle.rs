//! Weighted box particles: initialization, state estimation, effective
//! sample size and systematic resampling.

use super::TrackerError;
use crate::motdata::BoundingBox;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub bbox: BoundingBox,
    pub weight: f64,
}

/// Spawn `n` equally weighted particles whose centers are uniform in the
/// `spread * w` by `spread * h` neighborhood of the seed box center; width
/// and height are copied from the seed box.
pub fn init_particles(
    bbox: &BoundingBox,
    n: usize,
    spread: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Particle>, TrackerError> {
    if bbox.area() <= 0.0 || !bbox.is_valid() {
        return Err(TrackerError::ZeroAreaBox);
    }
    if n == 0 {
        return Err(TrackerError::Config("particle count must be >= 1".into()));
    }
    let (cx, cy) = bbox.center();
    let (rx, ry) = (spread * bbox.w, spread * bbox.h);
    let weight = 1.0 / n as f64;
    Ok((0..n)
        .map(|_| {
            let px = cx + rng.gen_range(-rx..=rx);
            let py = cy + rng.gen_range(-ry..=ry);
            Particle {
                bbox: BoundingBox::from_center(px, py, bbox.w, bbox.h),
                weight,
            }
        })
        .collect())
}

/// Weighted mean of center / width / height, normalized by the total weight.
pub fn estimate_state(particles: &[Particle]) -> Result<BoundingBox, TrackerError> {
    if particles.is_empty() {
        return Err(TrackerError::NoParticles);
    }
    let total: f64 = particles.iter().map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(TrackerError::ZeroWeights);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut w = 0.0;
    let mut h = 0.0;
    for p in particles {
        let (px, py) = p.bbox.center();
        cx += p.weight * px;
        cy += p.weight * py;
        w += p.weight * p.bbox.w;
        h += p.weight * p.bbox.h;
    }
    Ok(BoundingBox::from_center(
        cx / total,
        cy / total,
        w / total,
        h / total,
    ))
}

/// N_eff = 1 / sum(w_i^2) for weights normalized to sum 1; always in [1, M].
pub fn effective_sample_size(particles: &[Particle]) -> Result<f64, TrackerError> {
    if particles.is_empty() {
        return Err(TrackerError::NoParticles);
    }
    let total: f64 = particles.iter().map(|p| p.weight).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(TrackerError::UnnormalizedWeights(total));
    }
    let sq: f64 = particles.iter().map(|p| p.weight * p.weight).sum();
    Ok(1.0 / sq)
}

/// Systematic resampling: M draws on a jittered uniform grid through the
/// cumulative weights. Count is preserved and weights reset to uniform.
pub fn systematic_resample(
    particles: &mut Vec<Particle>,
    rng: &mut impl Rng,
) -> Result<(), TrackerError> {
    let m = particles.len();
    if m == 0 {
        return Err(TrackerError::NoParticles);
    }
    let total: f64 = particles.iter().map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(TrackerError::ZeroWeights);
    }

    let offset = rng.gen::<f64>();
    let step = total / m as f64;
    let mut resampled = Vec::with_capacity(m);
    let mut idx = 0usize;
    let mut cumulative = particles[0].weight;
    for k in 0..m {
        let position = (k as f64 + offset) * step;
        while cumulative < position && idx + 1 < m {
            idx += 1;
            cumulative += particles[idx].weight;
        }
        resampled.push(Particle {
            bbox: particles[idx].bbox,
            weight: 1.0 / m as f64,
        });
    }
    *particles = resampled;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_spreads_centers_within_bounds() {
        let seed_box = BoundingBox::new(100.0, 100.0, 10.0, 10.0);
        let particles = init_particles(&seed_box, 100, 1.5, &mut rng(7)).unwrap();
        assert_eq!(particles.len(), 100);
        for p in &particles {
            let (cx, cy) = p.bbox.center();
            assert!((cx - 105.0).abs() <= 15.0 + 1e-9);
            assert!((cy - 105.0).abs() <= 15.0 + 1e-9);
            assert_eq!(p.bbox.w, 10.0);
            assert_eq!(p.bbox.h, 10.0);
            assert_abs_diff_eq!(p.weight, 0.01);
        }
        let sum: f64 = particles.iter().map(|p| p.weight).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_particle_has_unit_weight() {
        let seed_box = BoundingBox::new(0.0, 0.0, 4.0, 4.0);
        let particles = init_particles(&seed_box, 1, 1.5, &mut rng(3)).unwrap();
        assert_eq!(particles.len(), 1);
        assert_eq!(particles[0].weight, 1.0);
        let (cx, cy) = particles[0].bbox.center();
        assert!((cx - 2.0).abs() <= 6.0 && (cy - 2.0).abs() <= 6.0);
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let seed_box = BoundingBox::new(5.0, 5.0, 8.0, 8.0);
        let a = init_particles(&seed_box, 50, 1.5, &mut rng(11)).unwrap();
        let b = init_particles(&seed_box, 50, 1.5, &mut rng(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_area_seed_box_is_rejected() {
        let seed_box = BoundingBox::new(0.0, 0.0, 0.0, 10.0);
        assert!(matches!(
            init_particles(&seed_box, 10, 1.5, &mut rng(1)),
            Err(TrackerError::ZeroAreaBox)
        ));
    }

    #[test]
    fn estimate_of_identical_particles_is_that_box() {
        let b = BoundingBox::new(3.0, 4.0, 10.0, 12.0);
        let particles = vec![Particle { bbox: b, weight: 0.25 }; 4];
        assert_eq!(estimate_state(&particles).unwrap(), b);
    }

    #[test]
    fn estimate_respects_symmetric_weights() {
        let particles = vec![
            Particle {
                bbox: BoundingBox::from_center(0.0, 0.0, 4.0, 4.0),
                weight: 0.5,
            },
            Particle {
                bbox: BoundingBox::from_center(10.0, 0.0, 4.0, 4.0),
                weight: 0.5,
            },
        ];
        let est = estimate_state(&particles).unwrap();
        assert_abs_diff_eq!(est.center().0, 5.0);
        assert_abs_diff_eq!(est.center().1, 0.0);
    }

    #[test]
    fn estimate_hand_computed_weighted_mean() {
        let particles = vec![
            Particle {
                bbox: BoundingBox::from_center(0.0, 0.0, 4.0, 4.0),
                weight: 0.9,
            },
            Particle {
                bbox: BoundingBox::from_center(10.0, 0.0, 4.0, 4.0),
                weight: 0.1,
            },
        ];
        let est = estimate_state(&particles).unwrap();
        assert_abs_diff_eq!(est.center().0, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn estimate_rejects_zero_weights() {
        let particles = vec![Particle {
            bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
            weight: 0.0,
        }];
        assert!(matches!(
            estimate_state(&particles),
            Err(TrackerError::ZeroWeights)
        ));
    }

    #[test]
    fn neff_uniform_equals_count() {
        let particles = vec![
            Particle {
                bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
                weight: 0.01,
            };
            100
        ];
        assert_abs_diff_eq!(
            effective_sample_size(&particles).unwrap(),
            100.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn neff_degenerate_is_one() {
        let mut particles = vec![
            Particle {
                bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
                weight: 0.0,
            };
            10
        ];
        particles[0].weight = 1.0;
        assert_abs_diff_eq!(effective_sample_size(&particles).unwrap(), 1.0);
    }

    #[test]
    fn neff_hand_case() {
        let mk = |w: f64| Particle {
            bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
            weight: w,
        };
        let particles = vec![mk(0.5), mk(0.25), mk(0.25)];
        assert_abs_diff_eq!(
            effective_sample_size(&particles).unwrap(),
            1.0 / 0.375,
            epsilon = 1e-12
        );
    }

    #[test]
    fn neff_rejects_unnormalized() {
        let particles = vec![Particle {
            bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
            weight: 0.7,
        }];
        assert!(matches!(
            effective_sample_size(&particles),
            Err(TrackerError::UnnormalizedWeights(_))
        ));
    }

    #[test]
    fn resample_uniform_weights_is_identity_multiset() {
        let mut particles: Vec<Particle> = (0..100)
            .map(|i| Particle {
                bbox: BoundingBox::new(i as f64, 0.0, 2.0, 2.0),
                weight: 0.01,
            })
            .collect();
        let before = particles.clone();
        systematic_resample(&mut particles, &mut rng(5)).unwrap();
        let mut got: Vec<i64> = particles.iter().map(|p| p.bbox.x as i64).collect();
        let mut want: Vec<i64> = before.iter().map(|p| p.bbox.x as i64).collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want);
        for p in &particles {
            assert_abs_diff_eq!(p.weight, 0.01);
        }
    }

    #[test]
    fn resample_degenerate_copies_the_winner() {
        let mut particles: Vec<Particle> = (0..10)
            .map(|i| Particle {
                bbox: BoundingBox::new(i as f64, 0.0, 2.0, 2.0),
                weight: if i == 0 { 1.0 } else { 0.0 },
            })
            .collect();
        systematic_resample(&mut particles, &mut rng(2)).unwrap();
        assert!(particles.iter().all(|p| p.bbox.x == 0.0));
    }

    #[test]
    fn resample_seventy_thirty_gives_exact_counts() {
        // Systematic resampling pins counts to floor/ceil of M * w: with
        // weights 0.7/0.3 and M = 10 the split is exactly 7 and 3 for any
        // grid offset. Walk the cumulative grid by hand to see it: positions
        // (k + u)/10 for k = 0..9 cross the 0.7 boundary exactly at k = 7.
        let mut particles = vec![
            Particle {
                bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
                weight: 0.7,
            },
            Particle {
                bbox: BoundingBox::new(100.0, 0.0, 2.0, 2.0),
                weight: 0.3,
            },
        ];
        // Pad to M = 10 by splitting the two originals into equal shares.
        let mut tenfold = Vec::new();
        for _ in 0..5 {
            tenfold.push(Particle {
                bbox: particles[0].bbox,
                weight: 0.7 / 5.0,
            });
        }
        for _ in 0..5 {
            tenfold.push(Particle {
                bbox: particles[1].bbox,
                weight: 0.3 / 5.0,
            });
        }
        particles = tenfold;
        for seed in 0..20 {
            let mut copy = particles.clone();
            systematic_resample(&mut copy, &mut rng(seed)).unwrap();
            let first = copy.iter().filter(|p| p.bbox.x == 0.0).count();
            assert_eq!(first, 7, "seed {seed}");
        }
    }

    #[test]
    fn resample_rejects_all_zero_weights() {
        let mut particles = vec![
            Particle {
                bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
                weight: 0.0,
            };
            5
        ];
        assert!(matches!(
            systematic_resample(&mut particles, &mut rng(1)),
            Err(TrackerError::ZeroWeights)
        ));
    }
}
