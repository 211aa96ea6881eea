use super::{GridSet, SetError};

const FAR: f64 = 1e30;

/// Distance from every cell center to the nearest occupied center of `g`.
///
/// Planar grids use an exact Euclidean distance transform (separable lower
/// envelopes of parabolas); the ring uses two cyclic sweeps.
pub fn distance_field(g: &GridSet) -> Result<Vec<f64>, SetError> {
    if g.is_empty() {
        return Err(SetError::EmptySet);
    }
    let geom = g.geometry();
    let (nx, ny) = geom.dims();
    if geom.is_circle() {
        let n = nx;
        let mut d = vec![usize::MAX; n];
        let start = g.bits().first_one().unwrap();
        let mut last = start;
        for k in 0..n {
            let i = (start + k) % n;
            if g.contains(i) {
                last = i;
            }
            d[i] = (i + n - last) % n;
        }
        let start = g.bits().last_one().unwrap();
        let mut last = start;
        for k in 0..n {
            let i = (start + n - k) % n;
            if g.contains(i) {
                last = i;
            }
            d[i] = d[i].min((last + n - i) % n);
        }
        return Ok(d.into_iter().map(|c| c as f64 / n as f64).collect());
    }

    let mut sq = vec![FAR; nx * ny];
    for i in g.cells() {
        sq[i] = 0.0;
    }
    let mut buf = Vec::new();
    for y in 0..ny {
        edt_1d(&mut sq[y * nx..(y + 1) * nx], &mut buf);
    }
    let mut col = vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            col[y] = sq[y * nx + x];
        }
        edt_1d(&mut col, &mut buf);
        for y in 0..ny {
            sq[y * nx + x] = col[y];
        }
    }
    let h = geom.h();
    Ok(sq.into_iter().map(|s| s.sqrt() * h).collect())
}

fn edt_1d(f: &mut [f64], out: &mut Vec<f64>) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let cross = |q: usize, p: usize, f: &[f64]| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in 1..n {
        let mut s = cross(q, v[k], f);
        while s <= z[k] {
            k -= 1;
            s = cross(q, v[k], f);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    out.clear();
    out.resize(n, 0.0);
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
    f.copy_from_slice(out);
}

/// Largest distance from an occupied center of `a` to the occupied centers of `b`.
pub fn directed_hausdorff(a: &GridSet, b: &GridSet) -> Result<f64, SetError> {
    a.union(b)?;
    if a.is_empty() {
        return Err(SetError::EmptySet);
    }
    let field = distance_field(b)?;
    Ok(a.cells().map(|i| field[i]).fold(0.0, f64::max))
}

/// Hausdorff distance between the occupied cell centers of `a` and `b`.
pub fn hausdorff_distance(a: &GridSet, b: &GridSet) -> Result<f64, SetError> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Point, Space};

    fn brute(a: &GridSet, b: &GridSet) -> f64 {
        let g = a.geometry();
        let one = |x: &GridSet, y: &GridSet| {
            x.cells()
                .map(|i| y.cells().map(|j| g.center_distance(i, j)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        one(a, b).max(one(b, a))
    }

    #[test]
    fn three_four_five() {
        let space = Space::planar_box([0.0, 0.0], [10.0, 10.0]).unwrap();
        let mut a = GridSet::empty(space.clone(), 1.0).unwrap();
        let mut b = GridSet::empty(space, 1.0).unwrap();
        a.insert_point(&Point::plane(0.5, 0.5)).unwrap();
        b.insert_point(&Point::plane(3.5, 4.5)).unwrap();
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 5.0);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn circle_one_sided_gap() {
        let h = 1e-3;
        let mut a = GridSet::empty(Space::Circle, h).unwrap();
        a.insert_point(&Point::Circle(0.0)).unwrap();
        let mut b = a.clone();
        b.insert_point(&Point::Circle(0.4)).unwrap();
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 0.4).abs() <= h, "{d}");
        assert_eq!(directed_hausdorff(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn empty_and_mismatch() {
        let a = GridSet::empty(Space::Circle, 0.1).unwrap();
        let mut b = a.clone();
        b.insert(3);
        assert_eq!(hausdorff_distance(&a, &b), Err(SetError::EmptySet));
        let c = GridSet::full(Space::Circle, 0.2).unwrap();
        assert!(matches!(hausdorff_distance(&b, &c), Err(SetError::Comparability(_))));
    }

    #[test]
    fn transform_matches_brute_force() {
        let space = Space::planar_box([0.0, 0.0], [1.0, 0.6]).unwrap();
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..20 {
            let mut a = GridSet::empty(space.clone(), 0.05).unwrap();
            let mut b = a.clone();
            let n = a.geometry().cell_count();
            for _ in 0..1 + next() % 12 {
                a.insert(next() % n);
                b.insert(next() % n);
            }
            assert!((hausdorff_distance(&a, &b).unwrap() - brute(&a, &b)).abs() < 1e-12);
        }
        for _ in 0..20 {
            let mut a = GridSet::empty(Space::Circle, 0.01).unwrap();
            let mut b = a.clone();
            for _ in 0..1 + next() % 6 {
                a.insert(next() % 100);
                b.insert(next() % 100);
            }
            assert!((hausdorff_distance(&a, &b).unwrap() - brute(&a, &b)).abs() < 1e-12);
        }
    }
}
