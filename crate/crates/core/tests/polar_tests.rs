use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankmod::permlib::BinaryWord;
use rankmod::polarwom::*;
use rankmod::scalar::floor_mul;
use rankmod::womlib::{ConcentratedWom, ConstantWeightAdapter, WeakWom};
use rankmod::Fraction;

/// `x = u G_n` straight from the Kronecker power: entry `(i, j)` is 1 when
/// the bits of `j` are a subset of the bits of `i`.
fn kronecker_transform(u: &[bool]) -> Vec<bool> {
    let n = u.len();
    (0..n)
        .map(|j| (0..n).filter(|&i| u[i] && i & j == j).count() % 2 == 1)
        .collect()
}

fn bits_of(v: u32, n: usize) -> Vec<bool> {
    (0..n).map(|j| v >> j & 1 == 1).collect()
}

#[test]
fn transform_matches_kronecker_power() {
    for n in [1, 2, 4, 8] {
        for v in 0..1u32 << n {
            let u = bits_of(v, n);
            let x = polar_transform(&BinaryWord::from_bits(u.clone())).unwrap();
            assert_eq!(x.bits(), kronecker_transform(&u).as_slice());
        }
    }
}

#[test]
fn transform_is_an_involution_up_to_16() {
    for n in [1usize, 2, 4, 8, 16] {
        for v in 0..1u32 << n {
            let u = BinaryWord::from_bits(bits_of(v, n));
            assert_eq!(polar_transform(&polar_transform(&u).unwrap()).unwrap(), u);
        }
    }
    assert!(matches!(
        polar_transform(&BinaryWord::zeros(6)),
        Err(PolarError::NotPowerOfTwo(6))
    ));
}

#[test]
fn transform_golden_vectors() {
    let t = |s: &str| polar_transform(&BinaryWord::parse(s).unwrap()).unwrap().to_string();
    assert_eq!(t("10000000"), "10000000");
    assert_eq!(t("01000000"), "11000000");
    assert_eq!(t("00010000"), "11110000");
    assert_eq!(t("00000001"), "11111111");
    assert_eq!(t("10110010"), "01111010");
}

/// Joint law of (state bit, codeword bit) under the test channel.
fn joint(s: bool, x: bool, ws: f64, wx: f64) -> f64 {
    match (s, x) {
        (true, true) => wx,
        (true, false) => ws - wx,
        (false, false) => 1.0 - ws,
        (false, true) => 0.0,
    }
}

/// Exact Bhattacharyya parameters of both synthetic channels at n = 2.
/// The output of channel `i` is `(s, g, u_0..u_{i-1})`.
fn exact_z2(ws: f64, wx: f64) -> [f64; 2] {
    let mut z = [0.0; 2];
    let prob = |u: [bool; 2], s: [bool; 2], g: [bool; 2]| {
        let v = [u[0] ^ u[1], u[1]];
        (0..2).map(|j| joint(s[j], g[j] ^ v[j], ws, wx)).product::<f64>()
    };
    let all = [false, true];
    for s0 in all {
        for s1 in all {
            for g0 in all {
                for g1 in all {
                    let (s, g) = ([s0, s1], [g0, g1]);
                    // channel 0: u_1 uniform and unseen
                    let w0 = |u0| 0.5 * all.iter().map(|&u1| prob([u0, u1], s, g)).sum::<f64>();
                    z[0] += (w0(false) * w0(true)).sqrt();
                    // channel 1: u_0 is part of the output
                    for u0 in all {
                        let w1 = |u1| 0.5 * prob([u0, u1], s, g);
                        z[1] += (w1(false) * w1(true)).sqrt();
                    }
                }
            }
        }
    }
    z
}

#[test]
fn two_cell_unreliability_matches_exact_values() {
    let params = PolarParams::new(2, Fraction::new(3, 4), Fraction::new(1, 4), 0.1, Fraction::new(1, 4)).unwrap();
    assert_eq!(params.message_bits(), 1);
    let exact = exact_z2(0.75, 0.25);
    let est = estimate_unreliability(&params, 200_000, 3);
    for i in 0..2 {
        assert!((est[i] - exact[i]).abs() < 0.02, "index {i}: {} vs {}", est[i], exact[i]);
    }
    assert!(exact[0] > exact[1]);
    assert_eq!(build_frozen_set(&params, 200_000, 3).unwrap(), vec![0]);
}

#[test]
fn frozen_set_is_stable_across_seeds() {
    let params = PolarParams::new(256, Fraction::new(1, 2), Fraction::new(1, 4), 0.15, Fraction::new(1, 16)).unwrap();
    let a = build_frozen_set(&params, 100_000, 1).unwrap();
    let b = build_frozen_set(&params, 100_000, 2).unwrap();
    assert_eq!(a.len(), params.message_bits());
    let common = a.iter().filter(|i| b.binary_search(i).is_ok()).count();
    assert!(common * 10 >= a.len() * 9, "{common} of {} shared", a.len());
}

/// Posterior LLR of `u_i` given the past and the channel output, with the
/// future marginalized, by brute force over all inputs.
fn brute_llr(i: usize, past: &[bool], s: &BinaryWord, g: &BinaryWord, ws: f64, wx: f64) -> f64 {
    let n = s.len();
    let mut p = [0.0; 2];
    for v in 0..1u32 << n {
        let u = bits_of(v, n);
        if u[..i] != *past {
            continue;
        }
        let x = kronecker_transform(&u);
        p[usize::from(u[i])] += (0..n).map(|j| joint(s.get(j), g.get(j) ^ x[j], ws, wx)).product::<f64>();
    }
    (p[0] / p[1]).ln()
}

/// Every decision path of SC at n = 4 sees the exact posterior LLRs, and
/// the randomized path probabilities sum to one.
#[test]
fn sc_paths_at_four_cells() {
    let (ws, wx) = (0.5, 0.25);
    let params = PolarParams::new(4, Fraction::new(1, 2), Fraction::new(1, 4), 0.0, Fraction::new(1, 4)).unwrap();
    let code = PolarCode::new(params, vec![0, 2]).unwrap();
    let free = [1usize, 3];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in ["1100", "1010", "0110", "0011"] {
        let s = BinaryWord::parse(s).unwrap();
        for _ in 0..4 {
            let g = BinaryWord::from_bits((0..4).map(|_| rng.gen()).collect());
            for mv in 0..4u32 {
                let m = bits_of(mv, 2);
                let mut total = 0.0;
                for path in 0..4u32 {
                    let picks = bits_of(path, 2);
                    let full = [m[0], picks[0], m[1], picks[1]];
                    let mut prob = 1.0;
                    let x = code
                        .encode_with(&m, &s, &g, |i, l| {
                            let k = free.iter().position(|&f| f == i).unwrap();
                            let exact = brute_llr(i, &full[..i], &s, &g, ws, wx);
                            // NaN: the past itself has probability zero
                            if exact.is_finite() {
                                assert!((l - exact).abs() < 1e-6, "index {i}: {l} vs {exact}");
                            } else if exact.is_infinite() {
                                assert!(l.signum() == exact.signum() && l.abs() >= 20.0, "index {i}: {l}");
                            }
                            let p0 = 1.0 / (1.0 + (-l).exp());
                            prob *= if picks[k] { 1.0 - p0 } else { p0 };
                            picks[k]
                        })
                        .unwrap();
                    assert_eq!(x, BinaryWord::from_bits(kronecker_transform(&full)).xor(&g));
                    assert_eq!(code.decode(&x, &g).unwrap(), m);
                    total += prob;
                }
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng, n: usize, weight: usize) -> BinaryWord {
    let mut cells: Vec<usize> = (0..n).collect();
    cells.shuffle(rng);
    let mut s = BinaryWord::zeros(n);
    for &j in &cells[..weight] {
        s.set(j, true);
    }
    s
}

#[test]
fn full_state_gives_balanced_words() {
    let delta = Fraction::new(1, 16);
    let mut params = PolarParams::new(1024, Fraction::new(1, 1), Fraction::new(1, 2), 0.0, delta).unwrap();
    params.eps_c = 0.2;
    let frozen = build_frozen_set(&params, 4000, 5).unwrap();
    let code = PolarCode::new(params.clone(), frozen).unwrap();
    let s = BinaryWord::from_bits(vec![true; 1024]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut ok, mut weight_sum) = (0, 0);
    for t in 0..200 {
        let m: Vec<bool> = (0..code.frozen().len()).map(|_| rng.gen()).collect();
        let g = dither(1024, t);
        if let Ok(x) = code.encode(&m, &s, &g, t) {
            ok += 1;
            weight_sum += x.weight();
            assert_eq!(code.decode(&x, &g).unwrap(), m);
        }
    }
    assert!(ok >= 190, "{ok} of 200");
    let mean = weight_sum as f64 / ok as f64 / 1024.0;
    assert!((mean - 0.5).abs() <= 1.0 / 16.0);
}

#[test]
fn concentrated_code_roundtrip() {
    let params = PolarParams::new(256, Fraction::new(1, 2), Fraction::new(1, 4), 0.3, Fraction::new(1, 16)).unwrap();
    let frozen = build_frozen_set(&params, 4000, 2).unwrap();
    let inner = PolarConcentratedWom::new(PolarCode::new(params, frozen).unwrap(), 7, 9);
    let k_c = inner.params().k_c;
    let adapter = ConstantWeightAdapter::new(inner);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    for _ in 0..40 {
        let s = random_state(&mut rng, 256, 128);
        let m = BigUint::from(rng.gen::<u64>()) % &k_c + 1u32;
        if let Ok((x, m_a)) = adapter.encode(&m, &s) {
            ok += 1;
            assert!(x.is_below(&s));
            assert_eq!(x.weight(), floor_mul(&Fraction::new(1, 4), 256));
            assert_eq!(adapter.decode(&x, &m_a).unwrap(), m);
        }
    }
    assert!(ok >= 30, "{ok} of 40");
}

#[test]
fn encode_is_reproducible() {
    let params = PolarParams::new(64, Fraction::new(1, 2), Fraction::new(1, 4), 0.2, Fraction::new(1, 8)).unwrap();
    let frozen = build_frozen_set(&params, 2000, 1).unwrap();
    let code = PolarCode::new(params, frozen).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let s = random_state(&mut rng, 64, 32);
    let g = dither(64, 3);
    let m: Vec<bool> = (0..code.frozen().len()).map(|_| rng.gen()).collect();
    assert_eq!(code.encode(&m, &s, &g, 4), code.encode(&m, &s, &g, 4));
    assert!(matches!(
        code.encode(&m, &BinaryWord::zeros(64), &g, 4),
        Err(PolarError::ParamError(_))
    ));
    assert!(matches!(
        code.encode(&m[1..], &s, &g, 4),
        Err(PolarError::DimensionMismatch { .. })
    ));
}

#[test]
fn frozen_cache_roundtrip() {
    let dir = std::env::temp_dir().join(format!("rankmod-frozen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("frozen.json");
    let params = PolarParams::new(32, Fraction::new(1, 2), Fraction::new(1, 4), 0.2, Fraction::new(1, 8)).unwrap();
    let a = build_frozen_set_cached(&params, 1000, 1, &path).unwrap();
    assert!(path.exists());
    let b = build_frozen_set_cached(&params, 1000, 1, &path).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, build_frozen_set(&params, 1000, 1).unwrap());
    std::fs::remove_dir_all(dir).unwrap();
}
