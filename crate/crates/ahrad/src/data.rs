//! Data sets named by a run configuration.

use ahrad_core::{Bump, DataSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DataConfig, RandomData};
use crate::error::{Error, Result};

/// Draws one bump with center and half-width uniform in the given ranges and amplitude in the unit square.
pub fn random_bump(rng: &mut impl Rng, center: [f64; 2], half_width: [f64; 2]) -> Bump {
    let draw = |rng: &mut dyn rand::RngCore, r: [f64; 2]| if r[0] < r[1] { rng.gen_range(r[0]..r[1]) } else { r[0] };
    Bump {
        center: draw(rng, center),
        half_width: draw(rng, half_width),
        amplitude: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    }
}

/// Random data sets with one f₁ and one f₂ bump on every listed mode.
pub fn random_sets(r: &RandomData, seed: u64) -> Vec<DataSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..r.sets)
        .map(|_| DataSpec {
            modes: r
                .modes
                .iter()
                .map(|k| {
                    let f1 = random_bump(&mut rng, r.center, r.half_width);
                    let f2 = random_bump(&mut rng, r.center, r.half_width);
                    (k.mode(), vec![f1], vec![f2])
                })
                .collect(),
        })
        .collect()
}

/// Explicit bumps first, then the seeded random sets.
pub fn data_sets(d: &DataConfig, seed: u64) -> Result<Vec<DataSpec>> {
    let mut out: Vec<DataSpec> = d.explicit().into_iter().collect();
    if let Some(r) = &d.random {
        out.extend(random_sets(r, seed));
    }
    if out.is_empty() {
        return Err(Error::config("data", "no explicit modes and no random sets"));
    }
    Ok(out)
}

/// Every mode with f₂ bumps of every set, as its own odd data set (0, f₂).
pub fn odd_probes(d: &DataConfig, seed: u64) -> Result<Vec<DataSpec>> {
    let probes: Vec<DataSpec> = data_sets(d, seed)?
        .into_iter()
        .flat_map(|s| s.modes)
        .filter(|(_, _, f2)| !f2.is_empty())
        .map(|(k, _, f2)| DataSpec { modes: vec![(k, Vec::new(), f2)] })
        .collect();
    if probes.is_empty() {
        return Err(Error::config("data", "no mode carries f2 bumps"));
    }
    Ok(probes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModeKey;

    fn random(sets: usize) -> RandomData {
        RandomData { sets, modes: vec![ModeKey::One(0), ModeKey::One(2)], center: [0.3, 0.5], half_width: [0.1, 0.2] }
    }

    #[test]
    fn seeded_sets_are_reproducible() {
        let a = random_sets(&random(4), 11);
        assert_eq!(a, random_sets(&random(4), 11));
        assert_ne!(a, random_sets(&random(4), 12));
        assert_eq!(a.len(), 4);
        for s in &a {
            for (_, f1, f2) in &s.modes {
                for b in f1.iter().chain(f2) {
                    assert!((0.3..0.5).contains(&b.center) && (0.1..0.2).contains(&b.half_width));
                }
            }
        }
    }

    #[test]
    fn empty_data_is_rejected() {
        let err = data_sets(&DataConfig::default(), 0).unwrap_err();
        assert_eq!(err.config_path(), Some("data"));
    }
}
