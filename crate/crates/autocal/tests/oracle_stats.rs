//! Exhaustive cross-check of every statistic against the brute-force
//! reference over all small samples on a three-level model.

mod support;

use autocal::data::{NullModel, Observation, Sample};
use autocal::stats::{curve_stats, increments};
use autocal::testing::statistics_all;
use support::{
    brute_abc, brute_counts, brute_increments, brute_statistics, brute_u, rel_close,
};

const LEVELS: [f64; 3] = [1.0, 2.0, 3.0];
const RESPONSES: [f64; 2] = [0.5, 2.5];
const PROBS: [f64; 3] = [0.25, 0.5, 0.25];
const VARIANCES: [f64; 3] = [1.0, 0.5, 2.0];

fn model() -> NullModel {
    NullModel::from_parts(LEVELS.to_vec(), PROBS.to_vec(), VARIANCES.to_vec()).unwrap()
}

/// Every assignment of (level, response) pairs to n observations, for every
/// n up to 6: 6^1 + ... + 6^6 samples, each checked against the brute
/// reference at 1e-12 relative tolerance.
#[test]
fn all_small_samples_match_brute_force() {
    let model = model();
    let combos: Vec<(f64, f64)> = LEVELS
        .iter()
        .flat_map(|&l| RESPONSES.iter().map(move |&r| (l, r)))
        .collect();

    let mut checked = 0u64;
    for n in 1..=6usize {
        let total = combos.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut ys = Vec::with_capacity(n);
            let mut pis = Vec::with_capacity(n);
            for _ in 0..n {
                let (pi, y) = combos[c % combos.len()];
                c /= combos.len();
                ys.push(y);
                pis.push(pi);
            }

            let sample = Sample::new(
                ys.iter()
                    .zip(&pis)
                    .map(|(&response, &prediction)| Observation { response, prediction })
                    .collect(),
            )
            .unwrap();

            let inc = increments(&sample, model.partition()).unwrap();
            let want_s = brute_increments(&ys, &pis, &LEVELS);
            let want_counts = brute_counts(&pis, &LEVELS);
            assert_eq!(inc.counts(), &want_counts[..]);
            for (k, &want) in want_s.iter().enumerate() {
                assert!(
                    rel_close(inc.values()[k], want, 1e-12),
                    "n={n} code={code} S_{k}: {} vs {}",
                    inc.values()[k],
                    want
                );
            }

            let got = statistics_all(&inc, &model).unwrap();
            let want = brute_statistics(&ys, &pis, &LEVELS, &PROBS, &VARIANCES);
            for t in 0..7 {
                assert!(
                    rel_close(got[t], want[t], 1e-12),
                    "n={n} code={code} statistic {t}: {} vs {}",
                    got[t],
                    want[t]
                );
            }

            let cs = curve_stats(&inc, &sample, &model).unwrap();
            let want_u = brute_u(&ys, &pis, &LEVELS).expect("positive responses");
            let got_u = cs.u.expect("positive responses");
            for k in 0..3 {
                assert!(
                    rel_close(got_u[k], want_u[k], 1e-12),
                    "n={n} code={code} U_{k}: {} vs {}",
                    got_u[k],
                    want_u[k]
                );
            }
            let want_abc = brute_abc(&want_s, &PROBS);
            let got_abc = cs.abc.expect("positive responses");
            assert!(
                rel_close(got_abc, want_abc, 1e-12),
                "n={n} code={code} abc: {got_abc} vs {want_abc}"
            );

            checked += 1;
        }
    }
    assert_eq!(checked, 6 + 36 + 216 + 1296 + 7776 + 46656);
}
