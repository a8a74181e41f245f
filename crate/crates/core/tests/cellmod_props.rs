use num_rational::Ratio;
use proptest::prelude::*;
use rankmod::cellmod::*;
use rankmod::permlib::{all_perms, MultisetSpec};
use rankmod::{CellState, MsPermutation};

type Exact = Ratio<i64>;

fn int_state(levels: &[i64]) -> CellState<Exact> {
    CellState::new(levels.iter().map(|&v| Exact::from_integer(v)).collect()).unwrap()
}

/// Every integer vector in `[0, max]^n`.
fn grid(n: usize, max: i64) -> impl Iterator<Item = Vec<i64>> {
    let base = max + 1;
    (0..base.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % base;
                code /= base;
                d
            })
            .collect()
    })
}

/// Independent demodulator: rank of a cell is one plus the number of
/// complete rank groups strictly below it in (level, index) order.
fn demod_oracle(levels: &[i64], z: usize) -> Option<Vec<usize>> {
    let n = levels.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (levels[j], j));
    let mut inv = vec![0; n];
    for (pos, &cell) in order.iter().enumerate() {
        inv[cell] = pos / z + 1;
    }
    for b in (z..n).step_by(z) {
        if levels[order[b - 1]] == levels[order[b]] {
            return None;
        }
    }
    Some(inv)
}

#[test]
fn demod_matches_oracle_exhaustively() {
    for (q, z) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        for levels in grid(q * z, 3) {
            let got = demodulate(&int_state(&levels), q, z).unwrap().valid();
            assert_eq!(got.map(|p| p.into_inv()), demod_oracle(&levels, z), "{levels:?}");
        }
    }
}

#[test]
fn demod_of_modulate_is_identity_exhaustively() {
    for (q, z) in [(2, 2), (3, 1), (3, 2)] {
        let spec = MultisetSpec::uniform(q, z).unwrap();
        let perms: Vec<MsPermutation> = all_perms(&spec).collect();
        for levels in grid(q * z, 4).step_by(7) {
            let s = int_state(&levels);
            for pi in &perms {
                let x = modulate(pi, &s).unwrap();
                assert_eq!(demodulate(&x, q, z).unwrap().valid().as_ref(), Some(pi));
                assert!(x.levels().iter().zip(s.levels()).all(|(a, b)| a >= b));
                for i in 1..q {
                    let gap = gamma(&x, pi, i + 1).unwrap() - gamma(&x, pi, i).unwrap();
                    assert!(gap >= Exact::from_integer(1));
                }
            }
        }
    }
}

/// Brute force: no integer state above `s` that demodulates to `pi` with
/// unit gaps has a lower top level than `modulate(pi, s)`.
#[test]
fn modulation_is_minimal() {
    let (q, z) = (3, 1);
    let spec = MultisetSpec::uniform(q, z).unwrap();
    for levels in grid(3, 3) {
        let s = int_state(&levels);
        for pi in all_perms(&spec) {
            let x = modulate(&pi, &s).unwrap();
            let top = gamma(&x, &pi, q).unwrap();
            for cand in grid(3, 7) {
                if cand.iter().zip(&levels).any(|(c, l)| c < l) {
                    continue;
                }
                let xc = int_state(&cand);
                if demodulate(&xc, q, z).unwrap().valid().as_ref() != Some(&pi) {
                    continue;
                }
                let unit = (1..q).all(|i| {
                    gamma(&xc, &pi, i + 1).unwrap() - gamma(&xc, &pi, i).unwrap() >= Exact::from_integer(1)
                });
                if unit {
                    assert!(gamma(&xc, &pi, q).unwrap() >= top, "{cand:?} beats modulate for {pi}");
                }
            }
        }
    }
}

#[test]
fn perm_cost_table() {
    let spec = MultisetSpec::uniform(3, 2).unwrap();
    let perms: Vec<MsPermutation> = all_perms(&spec).collect();
    let mut max = 0;
    for a in &perms {
        for b in &perms {
            let c = cost_perms(a, b).unwrap();
            let brute = a.inv().iter().zip(b.inv()).map(|(&x, &y)| x as i64 - y as i64).max().unwrap();
            assert_eq!(c, brute);
            assert!(c >= 0);
            assert_eq!(c == 0, a == b);
            max = max.max(c);
        }
    }
    assert_eq!(max, 2);
    let rev = MsPermutation::uniform(3, 2, vec![3, 3, 2, 2, 1, 1]).unwrap();
    let id = MsPermutation::uniform(3, 2, vec![1, 1, 2, 2, 3, 3]).unwrap();
    assert_eq!(cost_perms(&rev, &id).unwrap(), 2);
}

#[test]
fn state_cost_example() {
    let s = CellState::new(vec![2.7, 4.0, 1.5, 2.5, 3.8, 0.5]).unwrap();
    let pi = MsPermutation::uniform(3, 2, vec![1, 1, 2, 2, 3, 3]).unwrap();
    assert_eq!(cost_states(&s, &pi).unwrap(), 2.0);
    let same = demodulate(&int_state(&[0, 0, 1, 1, 2, 2]), 3, 2).unwrap().valid().unwrap();
    assert_eq!(cost_states(&int_state(&[0, 0, 1, 1, 2, 2]), &same).unwrap(), Exact::from_integer(0));
}

#[test]
fn prop1_on_spread_state() {
    let s = int_state(&[0, 0, 2, 2, 4, 4]);
    let spec = MultisetSpec::uniform(3, 2).unwrap();
    let mut strict = 0;
    for pi in all_perms(&spec) {
        let rep = prop1_check(&s, &pi).unwrap();
        assert!(rep.holds());
        assert!(!rep.tight);
        if rep.lhs < Exact::from_integer(rep.rhs) {
            strict += 1;
        }
    }
    assert!(strict > 0);
    assert!(matches!(
        prop1_check(&int_state(&[0, 0, 1, 1, 1, 2]), &spec_first()),
        Err(CellError::IllegalState) | Err(CellError::PreconditionViolated { .. })
    ));
}

fn spec_first() -> MsPermutation {
    MsPermutation::uniform(3, 2, vec![1, 1, 2, 2, 3, 3]).unwrap()
}

/// Every state in S_{3,2} x S_{3,2} with rank maxima 1 or 2 apart.
#[test]
fn prop1_exhaustive() {
    let spec = MultisetSpec::uniform(3, 2).unwrap();
    let perms: Vec<MsPermutation> = all_perms(&spec).collect();
    let mut tight = 0;
    for sigma in &perms {
        for (d1, d2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let g = [0, d1, d1 + d2];
            // one cell per rank sits below its maximum when room allows
            let mut lowered = [false; 3];
            let levels: Vec<i64> = sigma
                .inv()
                .iter()
                .map(|&r| {
                    let low = r > 1 && !std::mem::replace(&mut lowered[r - 1], true) && g[r - 1] - g[r - 2] == 2;
                    g[r - 1] - i64::from(low)
                })
                .collect();
            let s = int_state(&levels);
            assert_eq!(demodulate(&s, 3, 2).unwrap().valid().as_ref(), Some(sigma));
            for pi in &perms {
                let rep = prop1_check(&s, pi).unwrap();
                assert!(rep.holds(), "{levels:?} -> {pi}");
                if rep.tight {
                    tight += 1;
                    assert_eq!(rep.lhs, Exact::from_integer(rep.rhs));
                }
            }
        }
    }
    assert_eq!(tight, perms.len() * perms.len());
}

#[test]
fn level_types_agree() {
    let levels = [1.0, 1.5, 0.25, 0.5, 2.0, 0.25];
    let f64s = CellState::new(levels.to_vec()).unwrap();
    let f32s = CellState::new(levels.iter().map(|&v| v as f32).collect()).unwrap();
    let exact = CellState::new(levels.iter().map(|&v| Exact::new((v * 4.0) as i64, 4)).collect()).unwrap();
    let a = demodulate(&f64s, 3, 2).unwrap();
    assert_eq!(a, demodulate(&f32s, 3, 2).unwrap());
    assert_eq!(a, demodulate(&exact, 3, 2).unwrap());
    assert_eq!(a.valid().unwrap().inv(), &[2, 3, 1, 2, 3, 1]);
}

#[test]
fn state_file_parsing() {
    let rows = parse_state_file("# header\n1,2,3\n\n 0.5 , 4 ,1\n").unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].levels(), &[0.5, 4.0, 1.0]);
    assert!(parse_state_file("1,x").is_err());
    assert!(parse_state_file("1,-2").is_err());
}

proptest! {
    #[test]
    fn modulate_same_permutation_is_noop(
        gaps in prop::collection::vec(1i64..4, 2),
        base in 0i64..5,
        perm in Just(vec![1usize, 1, 2, 2, 3, 3]).prop_shuffle(),
    ) {
        let g = [base, base + gaps[0], base + gaps[0] + gaps[1]];
        let s = int_state(&perm.iter().map(|&r| g[r - 1]).collect::<Vec<_>>());
        let sigma = MsPermutation::uniform(3, 2, perm).unwrap();
        prop_assert_eq!(modulate(&sigma, &s).unwrap(), s);
    }

    #[test]
    fn modulated_states_have_unit_gaps(
        levels in prop::collection::vec((0u32..80).prop_map(|v| f64::from(v) / 8.0), 6),
        perm in Just(vec![1usize, 1, 2, 2, 3, 3]).prop_shuffle(),
    ) {
        let s = CellState::new(levels).unwrap();
        let pi = MsPermutation::uniform(3, 2, perm).unwrap();
        let x = modulate(&pi, &s).unwrap();
        prop_assert_eq!(demodulate(&x, 3, 2).unwrap().valid(), Some(pi.clone()));
        for i in 1..3 {
            prop_assert!(gamma(&x, &pi, i + 1).unwrap() - gamma(&x, &pi, i).unwrap() >= 1.0);
        }
    }
}
