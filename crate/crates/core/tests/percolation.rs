use proptest::prelude::*;

use thinlpp::percolation::{
    passage, sample_passage_value, selection_extremes, theorem_objective, PassageKind, WeightMatrix,
};
use thinlpp::{RngStream, WeightDistribution};

// Independent oracles: walk every up/right path cell by cell, and recurse over
// the end column of each theorem-form segment. Both accumulate level by level,
// columns ascending, so float results compare exactly.

fn path_extremes(w: &WeightMatrix) -> (f64, f64) {
    fn walk(w: &WeightMatrix, i: usize, j: usize, acc: f64, out: &mut (f64, f64)) {
        let acc = acc + w.get(i, j);
        if i + 1 == w.n_cols() && j + 1 == w.n_rows() {
            out.0 = out.0.min(acc);
            out.1 = out.1.max(acc);
            return;
        }
        if i + 1 < w.n_cols() {
            walk(w, i + 1, j, acc, out);
        }
        if j + 1 < w.n_rows() {
            walk(w, i, j + 1, acc, out);
        }
    }
    let mut out = (f64::INFINITY, f64::NEG_INFINITY);
    walk(w, 0, 0, 0.0, &mut out);
    out
}

fn theorem_extremes(w: &WeightMatrix) -> (f64, f64) {
    fn level(w: &WeightMatrix, j: usize, start: usize, acc: f64, out: &mut (f64, f64)) {
        let last = j + 1 == w.n_rows();
        let ends: Vec<usize> = if last { vec![w.n_cols()] } else { (start..=w.n_cols()).collect() };
        for end in ends {
            let mut a = acc;
            for i in start..end {
                a += w.get(i, j);
            }
            if last {
                out.0 = out.0.min(a);
                out.1 = out.1.max(a);
            } else {
                level(w, j + 1, end, a, out);
            }
        }
    }
    let mut out = (f64::INFINITY, f64::NEG_INFINITY);
    level(w, 0, 0, 0.0, &mut out);
    out
}

fn all_values(w: &WeightMatrix) -> [f64; 4] {
    PassageKind::ALL.map(|kind| passage(w, kind, false).value)
}

fn lattice(max_cols: usize, max_rows: usize, integer: bool) -> impl Strategy<Value = WeightMatrix> {
    (1..=max_cols, 1..=max_rows).prop_flat_map(move |(n, k)| {
        let cell = if integer { (-5i32..=5).prop_map(f64::from).boxed() } else { (-3.0f64..3.0).boxed() };
        prop::collection::vec(cell, n * k).prop_map(move |v| WeightMatrix::new(n, k, v).unwrap())
    })
}

#[test]
fn dp_matches_enumeration_on_random_instances() {
    let dists = [
        WeightDistribution::exponential(1.0).unwrap(),
        WeightDistribution::gaussian(0.0, 1.0).unwrap(),
        WeightDistribution::rademacher(),
        WeightDistribution::geometric(0.5).unwrap(),
    ];
    let root = RngStream::new(101, 0);
    for t in 0..500u64 {
        let mut s = root.fork(t);
        let n = 1 + (t as usize % 8);
        let k = 1 + (t as usize / 8 % 4);
        let w = WeightMatrix::sample(&dists[t as usize % 4], &mut s, n, k).unwrap();
        let (tmin, tmax) = theorem_extremes(&w);
        let (pmin, pmax) = path_extremes(&w);
        assert_eq!(all_values(&w), [tmax, tmin, pmax, pmin], "instance {t}: {n}x{k}");
    }
}

#[test]
fn recovered_partitions_attain_the_value() {
    let d = WeightDistribution::gaussian(0.0, 1.0).unwrap();
    let mut s = RngStream::new(7, 7);
    for _ in 0..100 {
        let w = WeightMatrix::sample(&d, &mut s, 9, 4).unwrap();
        for kind in [PassageKind::L, PassageKind::R] {
            let r = passage(&w, kind, true);
            let part = r.partition.unwrap();
            assert_eq!(part.len(), 5);
            assert!(part.windows(2).all(|p| p[0] <= p[1]));
            assert_eq!((part[0], part[4]), (0, 9));
            assert_eq!(theorem_objective(&w, &part), r.value);
        }
    }
}

#[test]
fn sandwich_counterexample_needs_a_nonempty_first_segment() {
    // With the first level skipped the theorem form drops a weight the path
    // form must collect, so only the upper half of the sandwich survives.
    let w = WeightMatrix::from_levels(&[vec![-1.0], vec![5.0]]).unwrap();
    let l = passage(&w, PassageKind::L, true);
    assert_eq!(l.partition, Some(vec![0, 0, 1]));
    let ll = passage(&w, PassageKind::LLast, false).value;
    let (lo, _) = selection_extremes(&w);
    assert!(ll - l.value < lo);
}

#[test]
fn streamed_values_match_materialized_lattices() {
    let d = WeightDistribution::uniform(-1.0, 2.0).unwrap();
    for seed in 0..20 {
        let w = WeightMatrix::sample(&d, &mut RngStream::new(seed, 5), 23, 4).unwrap();
        for kind in PassageKind::ALL {
            let v = sample_passage_value(&d, &mut RngStream::new(seed, 5), 23, 4, kind).unwrap();
            assert_eq!(v, passage(&w, kind, false).value);
        }
    }
}

proptest! {
    #[test]
    fn dp_equals_enumeration(w in lattice(7, 4, false)) {
        let (tmin, tmax) = theorem_extremes(&w);
        let (pmin, pmax) = path_extremes(&w);
        prop_assert_eq!(all_values(&w), [tmax, tmin, pmax, pmin]);
    }

    #[test]
    fn orderings_and_negation(w in lattice(12, 5, false)) {
        let [l, r, ll, lf] = all_values(&w);
        prop_assert!(r <= l && lf <= ll);
        let [nl, nr, nll, nlf] = all_values(&w.negated());
        prop_assert_eq!((r, lf), (-nl, -nll));
        prop_assert_eq!((l, ll), (-nr, -nlf));
    }

    #[test]
    fn monotone_in_every_weight(w in lattice(10, 4, true), cell in any::<prop::sample::Index>(), bump in 1u8..4) {
        let mut values = w.values().to_vec();
        let c = cell.index(values.len());
        values[c] += f64::from(bump);
        let up = WeightMatrix::new(w.n_cols(), w.n_rows(), values).unwrap();
        for (a, b) in all_values(&w).into_iter().zip(all_values(&up)) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn path_form_is_transpose_invariant(w in lattice(10, 6, true)) {
        let t = w.transpose();
        let [_, _, ll, lf] = all_values(&w);
        let [_, _, tll, tlf] = all_values(&t);
        prop_assert_eq!((ll, lf), (tll, tlf));
    }

    #[test]
    fn single_level_is_the_row_sum(row in prop::collection::vec(-5i32..=5, 1..20)) {
        let row: Vec<f64> = row.into_iter().map(f64::from).collect();
        let w = WeightMatrix::from_levels(std::slice::from_ref(&row)).unwrap();
        let sum: f64 = row.iter().sum();
        prop_assert_eq!(all_values(&w), [sum; 4]);
    }

    #[test]
    fn sandwich_bounds(w in lattice(8, 5, true)) {
        let l = passage(&w, PassageKind::L, true);
        let ll = passage(&w, PassageKind::LLast, false).value;
        let (lo, hi) = selection_extremes(&w);
        prop_assert!(ll - l.value <= hi);
        let part = l.partition.unwrap();
        if part[1] >= 1 {
            prop_assert!(ll - l.value >= lo);
        }
    }
}
