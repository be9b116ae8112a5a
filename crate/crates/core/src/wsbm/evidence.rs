use super::family::NormalStats;
use super::{Observations, WsbmConfig};
use crate::error::{Error, Result};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;

/// Largest number of labelings [`exhaustive_log_evidence`] will enumerate.
pub const MAX_LABELINGS: u128 = 1 << 22;

/// `ln p(A)` of the tempered model, summing over all `K^n` labelings with the
/// block parameters integrated out in closed form. Only for tiny networks;
/// it is the reference the free energy must not exceed.
pub fn exhaustive_log_evidence<T: Scalar>(net: &WeightedNetwork<T>, config: &WsbmConfig<T>) -> Result<T> {
    config.validate()?;
    let (n, k) = (net.n(), config.k);
    let labelings = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if labelings > MAX_LABELINGS {
        return Err(Error::Resource {
            what: "labelings to enumerate",
            required: labelings,
            limit: MAX_LABELINGS,
        });
    }
    let obs = Observations::new(net, config.floor);
    let alpha = config.alpha;
    let beta = T::one() - alpha;
    let ln_prior_z = -T::of_usize(n) * T::of_usize(k).ln();

    let mut labels = vec![0usize; n];
    let mut terms: Vec<T> = Vec::with_capacity(labelings as usize);
    loop {
        let mut ones = vec![T::zero(); k * k];
        let mut zeros = vec![T::zero(); k * k];
        let mut stats = vec![NormalStats::default(); k * k];
        for i in 0..n {
            for j in i + 1..n {
                let (r, s) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                let b = r * k + s;
                if obs.present[i * n + j] {
                    ones[b] += T::one();
                    stats[b].add(T::one(), obs.weight[i * n + j]);
                } else {
                    zeros[b] += T::one();
                }
            }
        }
        let mut term = ln_prior_z;
        for r in 0..k {
            for s in r..k {
                let b = r * k + s;
                term += config.edge_prior.ln_marginal(alpha * ones[b], alpha * zeros[b]);
                term += config.weight_prior.ln_marginal(&stats[b].scaled(beta));
            }
        }
        terms.push(term);

        // next labeling, odometer style
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(log_sum_exp(&terms));
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

fn log_sum_exp<T: Scalar>(xs: &[T]) -> T {
    let top = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if !top.is_finite() {
        return top;
    }
    top + xs.iter().map(|&x| (x - top).exp()).sum::<T>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wsbm::{fit, Beta};

    #[test]
    fn empty_network_has_zero_evidence() {
        let g = WeightedNetwork::<f64>::empty(3).unwrap();
        let mut config = WsbmConfig::with_k(2, 0);
        config.alpha = 1.0;
        // all pairs absent: the Beta factors still integrate to a probability
        let v = exhaustive_log_evidence(&g, &config).unwrap();
        assert!(v < 0.0);
        // with alpha = 0 nothing is observed at all
        config.alpha = 0.0;
        assert!(exhaustive_log_evidence(&g, &config).unwrap().abs() < 1e-12);
    }

    #[test]
    fn single_pair_by_hand() {
        // K = 1, one present edge, alpha = 1: evidence is E[θ] = a/(a+b)
        let mut g = WeightedNetwork::<f64>::empty(2).unwrap();
        g.set_weight(0, 1, 5.0).unwrap();
        let mut config = WsbmConfig::with_k(1, 0);
        config.alpha = 1.0;
        config.edge_prior = Beta::new(2.0, 3.0);
        let v = exhaustive_log_evidence(&g, &config).unwrap();
        assert!((v - 0.4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn too_many_labelings() {
        let g = WeightedNetwork::<f64>::empty(40).unwrap();
        assert!(matches!(
            exhaustive_log_evidence(&g, &WsbmConfig::with_k(4, 0)),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn free_energy_is_a_lower_bound() {
        let mut g = WeightedNetwork::<f64>::empty(5).unwrap();
        for (i, j, w) in [(0, 1, 6.0), (0, 2, 5.5), (1, 2, 7.0), (2, 3, 0.3), (3, 4, 8.0), (1, 4, 0.05)] {
            g.set_weight(i, j, w).unwrap();
        }
        let config = WsbmConfig::with_k(2, 3);
        let bound = fit(&g, &config).unwrap().free_energy;
        let evidence = exhaustive_log_evidence(&g, &config).unwrap();
        assert!(bound <= evidence + 1e-9, "{bound} > {evidence}");
    }
}
