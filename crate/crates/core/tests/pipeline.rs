//! Counting pipeline against brute-force integer oracles.

use freedom::counting::{count_grid, count_grid_enumerated, CountReport, Filter, BINS};
use freedom::exact::{int, rat};
use freedom::lattice::NewtonOptions;
use freedom::varieties::VarietyDescriptor;
use num_integer::Integer;

/// Norms `S = a^2 + b^2` of the canonical points of `P^1` with `S <= k`.
fn p1_norms(k: i64) -> Vec<i64> {
    let m = (k as f64).sqrt() as i64 + 1;
    let mut out = vec![1]; // (0:1)
    for a in 1..=m {
        for b in -m..=m {
            let s = a * a + b * b;
            if s <= k && a.gcd(&b) == 1 {
                out.push(s);
            }
        }
    }
    out
}

#[test]
fn p1_squared_against_norm_pairs() {
    let bounds = [10i64, 250, 3000];
    let grid: Vec<_> = bounds.iter().map(|&b| int(b)).collect();
    let v = VarietyDescriptor::preset("P1xP1").unwrap();
    // l >= 1/2 iff 2 ln m / ln(s1 s2) >= 1/2 iff m^4 >= s1 s2, all in integers
    let filter = Filter::Fixed(rat(1, 2));
    let grouped = count_grid(&v, &grid, &filter, &NewtonOptions::default()).unwrap();
    let enumerated = count_grid_enumerated(&v, &grid, &filter, &NewtonOptions::default()).unwrap();
    let norms = p1_norms(*bounds.last().unwrap());
    for (i, &b) in bounds.iter().enumerate() {
        let (mut total, mut free) = (0u64, 0u64);
        for &s1 in &norms {
            for &s2 in &norms {
                if s1 * s2 > b {
                    continue;
                }
                total += 1;
                let m = s1.min(s2) as i128;
                if m > 1 && m.pow(4) >= (s1 * s2) as i128 {
                    free += 1;
                }
            }
        }
        for rows in [&grouped, &enumerated] {
            assert_eq!((rows[i].total, rows[i].free), (total, free), "B = {b}");
            assert_eq!(rows[i].histogram.iter().sum::<u64>(), total);
        }
        assert_eq!(grouped[i].histogram, enumerated[i].histogram);
    }
}

#[test]
fn p2_totals_against_primitive_triples() {
    // H = S^(3/2) <= B iff S^3 <= B^2
    let bounds = [8i64, 125, 1000];
    let grid: Vec<_> = bounds.iter().map(|&b| int(b)).collect();
    let v = VarietyDescriptor::projective(2).unwrap();
    let rows = count_grid(&v, &grid, &Filter::Fixed(rat(0, 1)), &NewtonOptions::default()).unwrap();
    for (i, &b) in bounds.iter().enumerate() {
        let m = 11;
        let mut n = 0u64;
        for x in -m..=m {
            for y in -m..=m {
                for z in -m..=m {
                    let s = x * x + y * y + z * z;
                    let first = [x, y, z].into_iter().find(|&c| c != 0);
                    if first.is_some_and(|c| c > 0) && x.gcd(&y).gcd(&z) == 1 && s * s * s <= b * b {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(rows[i].total, n, "B = {b}");
    }
}

#[test]
fn report_outputs_agree_with_rows() {
    let v = VarietyDescriptor::projective(1).unwrap();
    let grid: Vec<_> = [10i64, 100, 1000, 10_000, 100_000].iter().map(|&b| int(b)).collect();
    let f = Filter::epsilon(rat(1, 2), freedom::varieties::EpsRounding::In).unwrap();
    let rep = CountReport::build(&v, &grid, &f, &NewtonOptions::default()).unwrap();
    let csv = rep.csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), grid.len() + 1);
    assert_eq!(lines[0].split(',').count(), 5 + BINS);
    let j = rep.to_json();
    for (k, r) in rep.rows.iter().enumerate() {
        assert_eq!(j["rows"][k]["total"], r.total);
        let cells: Vec<&str> = lines[k + 1].split(',').collect();
        assert_eq!(cells[2].parse::<u64>().unwrap(), r.total);
        assert_eq!(cells[3].parse::<u64>().unwrap(), r.free);
    }
    // on P^1 every point of positive height has l = 1, so free = total - 2
    assert!(rep.rows.iter().all(|r| r.free + 2 == r.total));
    assert!(rep.fit_total.is_ok() && rep.fit_free.is_ok());
}
