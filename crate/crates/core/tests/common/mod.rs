#![allow(dead_code)]

use molr::{Isotopism, Permutation, Tuple};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Permutation {
    let mut v: Vec<u8> = (0..n as u8).collect();
    v.shuffle(rng);
    Permutation::new(v).unwrap()
}

pub fn random_isotopism(rng: &mut impl Rng, t: usize, k: usize, n: usize) -> Isotopism {
    Isotopism {
        rect_perm: random_perm(rng, t),
        row_perm: random_perm(rng, k),
        col_perm: random_perm(rng, n),
        symbol_perms: (0..t).map(|_| random_perm(rng, n)).collect(),
    }
}

/// All permutations of 0..n in lexicographic order, by plain recursion.
pub fn all_perms(n: usize) -> Vec<Vec<u8>> {
    fn go(n: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..n as u8 {
            if !cur.contains(&x) {
                cur.push(x);
                go(n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// Number of normalized 2×n triples, counted directly: identity first rows
/// and second rows a > b > c that keep every column and every ordered
/// symbol pair distinct.
pub fn brute_normalized_two_rows(n: usize) -> u64 {
    let ders: Vec<Vec<u8>> = all_perms(n)
        .into_iter()
        .filter(|p| p.iter().enumerate().all(|(c, &x)| x as usize != c))
        .collect();
    let discordant = |a: &[u8], b: &[u8]| a.iter().zip(b).all(|(x, y)| x != y);
    let mut count = 0;
    for (i, a) in ders.iter().enumerate() {
        for (j, b) in ders.iter().enumerate().skip(i + 1) {
            if !discordant(a, b) {
                continue;
            }
            for c in ders.iter().skip(j + 1) {
                if discordant(a, c) && discordant(b, c) {
                    count += 1;
                }
            }
        }
    }
    // `ders` is ascending, so every unordered triple appears once.
    count
}

/// Plain-loop validity check: Latin members, pairwise orthogonal.
pub fn brute_valid(t: &Tuple) -> bool {
    let (tt, k, n) = t.shape();
    for s in 0..tt {
        for r in 0..k {
            let mut seen = vec![false; n];
            for c in 0..n {
                let x = t.get(s, r, c) as usize;
                if x >= n || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        for c in 0..n {
            for r1 in 0..k {
                for r2 in r1 + 1..k {
                    if t.get(s, r1, c) == t.get(s, r2, c) {
                        return false;
                    }
                }
            }
        }
    }
    for a in 0..tt {
        for b in a + 1..tt {
            let mut seen = vec![false; n * n];
            for r in 0..k {
                for c in 0..n {
                    let p = t.get(a, r, c) as usize * n + t.get(b, r, c) as usize;
                    if seen[p] {
                        return false;
                    }
                    seen[p] = true;
                }
            }
        }
    }
    true
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
