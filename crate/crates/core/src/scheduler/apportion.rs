/// Splits `total` into integers proportional to `weights` by largest
/// remainder. Equal remainders go to the lower index.
///
/// Weights must be non-negative with a positive sum unless `total` is zero.
pub fn largest_remainder(total: u64, weights: &[f64]) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if total == 0 || weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut shares: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    // remainders quantized so near-equal fractions compare as ties
    let rem: Vec<i64> = quotas
        .iter()
        .zip(&shares)
        .map(|(q, s)| ((q - *s as f64) * 1e9).round() as i64)
        .collect();

    let assigned: u64 = shares.iter().sum();
    if assigned > total {
        // float overshoot: take back from the smallest remainders
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by_key(|&i| (rem[i], std::cmp::Reverse(i)));
        let mut extra = assigned - total;
        for i in order.into_iter().cycle() {
            if extra == 0 {
                break;
            }
            if shares[i] > 0 {
                shares[i] -= 1;
                extra -= 1;
            }
        }
        return shares;
    }

    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(rem[i]), i));
    let mut left = total - assigned;
    for i in order.into_iter().cycle() {
        if left == 0 {
            break;
        }
        if weights[i] > 0.0 {
            shares[i] += 1;
            left -= 1;
        }
    }
    shares
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        assert_eq!(largest_remainder(7, &[0.5, 0.25, 0.25]), vec![3, 2, 2]);
        assert_eq!(largest_remainder(7, &[0.5, 0.5]), vec![4, 3]);
        assert_eq!(largest_remainder(10, &[1.0, 1.0, 1.0]), vec![4, 3, 3]);
        assert_eq!(largest_remainder(0, &[1.0, 2.0]), vec![0, 0]);
        assert_eq!(largest_remainder(5, &[0.0, 1.0]), vec![0, 5]);
    }

    proptest! {
        #[test]
        fn shares_sum_and_stay_within_one_of_quota(
            total in 0u64..10_000,
            weights in proptest::collection::vec(0.01f64..100.0, 1..12),
        ) {
            let shares = largest_remainder(total, &weights);
            prop_assert_eq!(shares.iter().sum::<u64>(), total);
            let sum: f64 = weights.iter().sum();
            for (s, w) in shares.iter().zip(&weights) {
                let q = total as f64 * w / sum;
                prop_assert!((*s as f64 - q).abs() < 1.0 + 1e-6);
            }
        }
    }
}
