//! Definition-level reference implementations shared by integration tests.
//! Nothing here calls into the library's statistics code.
#![allow(dead_code)]

/// Kendall τ-b by enumerating all pairs. Returns (tau, S).
pub fn brute_tau_b(x: &[f64], y: &[f64]) -> (f64, i64) {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut n0) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            n0 += 1;
            let dx = (x[i] - x[j]).signum() as i64 * i64::from(x[i] != x[j]);
            let dy = (y[i] - y[j]).signum() as i64 * i64::from(y[i] != y[j]);
            s += dx * dy;
            if dx == 0 {
                tx += 1;
            }
            if dy == 0 {
                ty += 1;
            }
        }
    }
    let denom = (((n0 - tx) * (n0 - ty)) as f64).sqrt();
    (s as f64 / denom, s)
}

/// Average ranks: 1 + (#smaller) + (#equal - 1) / 2.
pub fn brute_midranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let less = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn brute_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    brute_pearson(&brute_midranks(x), &brute_midranks(y))
}

/// Tie-free Spearman: 1 - 6 sum(d^2) / (n (n^2 - 1)).
pub fn rank_formula_spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (brute_midranks(x), brute_midranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Visits every permutation of `items` (lexicographic successor order).
pub fn for_each_permutation(items: &[f64], mut visit: impl FnMut(&[f64])) {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut buf: Vec<f64> = items.to_vec();
    loop {
        for (slot, &i) in buf.iter_mut().zip(&idx) {
            *slot = items[i];
        }
        visit(&buf);
        let Some(k) = (0..idx.len().saturating_sub(1)).rev().find(|&k| idx[k] < idx[k + 1]) else {
            return;
        };
        let l = (k + 1..idx.len()).rev().find(|&l| idx[k] < idx[l]).unwrap();
        idx.swap(k, l);
        idx[k + 1..].reverse();
    }
}

/// Exact two-sided Kendall p-value over all n! pairings of y with x.
pub fn brute_kendall_exact_p(x: &[f64], y: &[f64]) -> f64 {
    let observed = brute_tau_b(x, y).1.abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for_each_permutation(y, |perm| {
        total += 1;
        if brute_tau_b(x, perm).1.abs() >= observed {
            extreme += 1;
        }
    });
    extreme as f64 / total as f64
}

/// Small deterministic generator so oracle tests do not depend on the
/// library's RNG choices.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random vector pair of length `n`; with `ties`, values come from a small
/// integer alphabet so repeats are common.
pub fn random_pair(rng: &mut SplitMix, n: usize, ties: bool) -> (Vec<f64>, Vec<f64>) {
    let draw = |rng: &mut SplitMix| {
        if ties {
            rng.below(4) as f64
        } else {
            rng.unit() * 100.0 - 50.0
        }
    };
    let x = (0..n).map(|_| draw(rng)).collect();
    let y = (0..n).map(|_| draw(rng)).collect();
    (x, y)
}

pub fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// County rows: (population, tweets, users, ex-post $M, Hazus $M),
/// transcribed independently of the embedded fixture.
pub const COUNTY_TABLE: [(f64, f64, f64, f64, f64); 27] = [
    (275422.0, 1580.0, 574.0, 954.0, 1630.0),
    (918888.0, 9516.0, 2727.0, 729.0, 1070.0),
    (451336.0, 1684.0, 670.0, 54.6, 164.0),
    (513539.0, 1004.0, 588.0, 147.0, 103.0),
    (96304.0, 997.0, 331.0, 29.3, 740.0),
    (157785.0, 521.0, 265.0, 12.7, 128.0),
    (787744.0, 8260.0, 1908.0, 844.0, 375.0),
    (289586.0, 1106.0, 470.0, 6.29, 151.0),
    (652302.0, 9322.0, 2140.0, 314.0, 3600.0),
    (823041.0, 8070.0, 2102.0, 406.0, 776.0),
    (629384.0, 8246.0, 1865.0, 919.0, 1930.0),
    (580470.0, 4404.0, 1052.0, 587.0, 3240.0),
    (502885.0, 3840.0, 1237.0, 41.8, 34.2),
    (65774.0, 122.0, 92.0, 18.6, 167.0),
    (543976.0, 5946.0, 1360.0, 87.2, 395.0),
    (1408473.0, 2459.0, 944.0, 50.6, 635.0),
    (2565635.0, 10040.0, 3111.0, 660.0, 5470.0),
    (1349233.0, 9085.0, 2363.0, 1590.0, 6860.0),
    (1619090.0, 50767.0, 15558.0, 252.0, 4820.0),
    (374512.0, 1310.0, 608.0, 39.2, 22.7),
    (99607.0, 568.0, 218.0, 0.2, 0.405),
    (2272771.0, 9453.0, 2662.0, 832.0, 3650.0),
    (470728.0, 3538.0, 699.0, 353.0, 1880.0),
    (317757.0, 2046.0, 509.0, 83.3, 86.8),
    (1499273.0, 11851.0, 3119.0, 569.0, 2720.0),
    (181791.0, 400.0, 233.0, 0.524, 8.03),
    (961670.0, 6347.0, 2234.0, 237.0, 1320.0),
];
