#![allow(dead_code)]

use flipsig::flip::validate_flip_pair;
use flipsig::{FlipPair, ZeroOneMatrix};

pub fn zo(rows: &[&[u8]]) -> ZeroOneMatrix {
    let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
    ZeroOneMatrix::from_rows(&rows).unwrap()
}

pub fn pair(a: ZeroOneMatrix, tau: &[usize]) -> FlipPair {
    validate_flip_pair(a, ZeroOneMatrix::permutation(tau)).unwrap()
}

pub fn ashley() -> FlipPair {
    pair(
        zo(&[
            &[1, 1, 0, 0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0, 1, 0],
            &[0, 0, 0, 1, 0, 1, 0, 0],
            &[0, 1, 0, 0, 0, 0, 0, 1],
            &[1, 0, 0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 0, 1, 0, 0, 1],
            &[0, 0, 1, 0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 0, 0, 1, 0],
        ]),
        &[4, 5, 6, 7, 0, 1, 2, 3],
    )
}

pub fn full_two() -> ZeroOneMatrix {
    zo(&[&[1, 1], &[1, 1]])
}

pub fn bi() -> FlipPair {
    pair(full_two(), &[0, 1])
}

pub fn bk() -> FlipPair {
    pair(full_two(), &[1, 0])
}

const EX74_TAU: [usize; 7] = [0, 4, 5, 6, 1, 2, 3];

pub fn ex74_a() -> FlipPair {
    pair(
        zo(&[
            &[1, 1, 1, 0, 0, 0, 0],
            &[0, 1, 0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0, 1, 0],
            &[0, 0, 0, 1, 0, 0, 1],
            &[1, 1, 1, 0, 1, 0, 0],
            &[1, 1, 1, 0, 0, 1, 0],
            &[0, 0, 0, 1, 1, 0, 1],
        ]),
        &EX74_TAU,
    )
}

pub fn ex74_b() -> FlipPair {
    pair(
        zo(&[
            &[1, 1, 0, 0, 0, 0, 0],
            &[0, 1, 0, 1, 1, 1, 0],
            &[0, 0, 1, 1, 1, 1, 0],
            &[0, 0, 0, 1, 0, 0, 1],
            &[1, 0, 0, 0, 1, 0, 0],
            &[0, 0, 1, 0, 0, 1, 0],
            &[0, 0, 0, 1, 1, 1, 1],
        ]),
        &EX74_TAU,
    )
}

pub fn examples() -> Vec<(&'static str, FlipPair)> {
    vec![
        ("ashley", ashley()),
        ("fulltwo_I", bi()),
        ("fulltwo_K", bk()),
        ("ex74_A", ex74_a()),
        ("ex74_B", ex74_b()),
    ]
}

/// Every flip pair on at most `max` symbols.
pub fn all_small_pairs(max: usize) -> Vec<FlipPair> {
    let mut out = Vec::new();
    for n in 1..=max {
        for bits in 0u32..(1 << (n * n)) {
            let rows: Vec<Vec<u8>> = (0..n)
                .map(|r| (0..n).map(|c| ((bits >> (r * n + c)) & 1) as u8).collect())
                .collect();
            let a = ZeroOneMatrix::from_rows(&rows).unwrap();
            for j in flipsig::flip::enumerate_flips(&a, 10).unwrap() {
                out.push(validate_flip_pair(a.clone(), j).unwrap());
            }
        }
    }
    out
}

pub fn rationals(xs: &[&str]) -> Vec<flipsig::Rational> {
    xs.iter().map(|s| s.parse().unwrap()).collect()
}
