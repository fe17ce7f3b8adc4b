//! Exact characteristic polynomials (Berkowitz), square-free splitting over
//! the rationals, and a complex root finder with Newton polish against the
//! exact coefficients.

use num::complex::Complex64;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Rat;

/// Characteristic polynomial of a square rational matrix, division-free.
/// Returns coefficients ascending in x, monic of degree n.
pub fn char_poly(matrix: &[Vec<Rat>]) -> Vec<Rat> {
    let n = matrix.len();
    if n == 0 {
        return vec![Rat::one()];
    }
    // Berkowitz: iterate over leading principal minors.
    // p holds the char poly coefficients of the current block, descending.
    let mut p: Vec<Rat> = vec![Rat::one(), -matrix[0][0].clone()];
    for i in 1..n {
        // row R = A[i][0..i], column C = A[0..i][i], block M = A[0..i][0..i]
        let mut toeplitz_col: Vec<Rat> = Vec::with_capacity(i + 2);
        toeplitz_col.push(Rat::one());
        toeplitz_col.push(-matrix[i][i].clone());
        let mut v: Vec<Rat> = (0..i).map(|r| matrix[r][i].clone()).collect();
        for _ in 0..i {
            let rv: Rat = (0..i).map(|c| matrix[i][c].clone() * v[c].clone()).sum();
            toeplitz_col.push(-rv);
            let mut next = vec![Rat::zero(); i];
            for (r, slot) in next.iter_mut().enumerate() {
                *slot = (0..i).map(|c| matrix[r][c].clone() * v[c].clone()).sum();
            }
            v = next;
        }
        // multiply the (i+2)x(i+1) lower-triangular Toeplitz by p
        let mut next_p = vec![Rat::zero(); i + 2];
        for (row, slot) in next_p.iter_mut().enumerate() {
            for (col, pc) in p.iter().enumerate() {
                if row >= col && row - col < toeplitz_col.len() {
                    *slot += toeplitz_col[row - col].clone() * pc.clone();
                }
            }
        }
        p = next_p;
    }
    p.reverse();
    p
}

pub fn poly_degree(p: &[Rat]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn poly_derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c.clone() * Rat::from_integer(k.into())).collect()
}

fn poly_trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_monic(p: &[Rat]) -> Vec<Rat> {
    let mut out = p.to_vec();
    poly_trim(&mut out);
    let lead = out.last().cloned().unwrap_or_else(Rat::one);
    if !lead.is_zero() && !lead.is_one() {
        for c in out.iter_mut() {
            *c /= lead.clone();
        }
    }
    out
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = poly_degree(b);
    let lb = b[db].clone();
    while poly_degree(&r) >= db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = poly_degree(&r);
        let factor = r[dr].clone() / lb.clone();
        for k in 0..=db {
            let idx = dr - db + k;
            let sub = factor.clone() * b[k].clone();
            r[idx] -= sub;
        }
        poly_trim(&mut r);
        if dr == 0 {
            break;
        }
    }
    r
}

fn poly_div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = poly_degree(b);
    let lb = b[db].clone();
    let da = poly_degree(&r);
    if da < db {
        return vec![Rat::zero()];
    }
    let mut q = vec![Rat::zero(); da - db + 1];
    while poly_degree(&r) >= db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = poly_degree(&r);
        let factor = r[dr].clone() / lb.clone();
        q[dr - db] = factor.clone();
        for k in 0..=db {
            let sub = factor.clone() * b[k].clone();
            r[dr - db + k] -= sub;
        }
        poly_trim(&mut r);
        if dr == 0 {
            break;
        }
    }
    q
}

pub fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = poly_monic(a);
    let mut y = poly_monic(b);
    if x.len() == 1 && x[0].is_zero() {
        return y;
    }
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = poly_rem(&x, &y);
        x = y;
        y = poly_monic(&r);
    }
    poly_monic(&x)
}

/// Yun square-free decomposition: returns (g_k, k) with p = Π g_k^k and
/// each g_k square-free, k >= 1.
pub fn square_free_decomposition(p: &[Rat]) -> Vec<(Vec<Rat>, usize)> {
    let p = poly_monic(p);
    if poly_degree(&p) == 0 {
        return Vec::new();
    }
    let dp = poly_derivative(&p);
    let a0 = poly_gcd(&p, &dp);
    if poly_degree(&a0) == 0 {
        return vec![(p, 1)];
    }
    let mut out = Vec::new();
    let mut b = poly_div_exact(&p, &a0);
    let mut c = poly_div_exact(&dp, &a0);
    let mut k = 1usize;
    loop {
        // d = c - b'
        let db = poly_derivative(&b);
        let mut d = c.clone();
        if d.len() < db.len() {
            d.resize(db.len(), Rat::zero());
        }
        for (i, coeff) in db.iter().enumerate() {
            d[i] -= coeff.clone();
        }
        poly_trim(&mut d);
        let g = poly_gcd(&b, &d);
        if poly_degree(&g) > 0 {
            out.push((g.clone(), k));
        }
        b = poly_div_exact(&b, &g);
        c = poly_div_exact(&d, &g);
        if poly_degree(&b) == 0 {
            break;
        }
        k += 1;
    }
    out
}

pub fn rat_to_f64(c: &Rat) -> f64 {
    // split into integer and fractional parts to survive huge numerators
    let trunc = c.trunc();
    let frac = c.clone() - trunc.clone();
    let t = trunc.numer().to_f64().unwrap_or(f64::MAX);
    let f = frac.numer().to_f64().unwrap_or(0.0) / frac.denom().to_f64().unwrap_or(1.0);
    t + f
}

fn eval_f64(p: &[Rat], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * z + Complex64::new(rat_to_f64(c), 0.0);
    }
    acc
}

/// Roots of a square-free rational polynomial: Durand-Kerner iteration on the
/// monic normalization, then Newton polish against the exact coefficients.
fn roots_square_free(p: &[Rat]) -> Result<Vec<Complex64>> {
    let p = poly_monic(p);
    let deg = poly_degree(&p);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let coeffs: Vec<Complex64> =
        p.iter().map(|c| Complex64::new(rat_to_f64(c), 0.0)).collect();
    // Cauchy-style radius bound
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> =
        (0..deg).map(|k| seed.powu(k as u32 + 1) * radius * 0.7).collect();
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for _ in 0..400 {
        let mut delta_max = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-30, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    // Newton polish on the exact polynomial
    let dp = poly_derivative(&p);
    for zi in z.iter_mut() {
        for _ in 0..40 {
            let f = eval_f64(&p, *zi);
            let df = eval_f64(&dp, *zi);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *zi -= step;
            if step.norm() < 1e-15 * (1.0 + zi.norm()) {
                break;
            }
        }
        let res = eval_f64(&p, *zi).norm();
        if !res.is_finite() || res > 1e-6 * radius.max(1.0) {
            return Err(Error::Internal(format!("root polish failed, residual {res}")));
        }
    }
    Ok(z)
}

/// All complex roots of a rational polynomial, with multiplicities resolved
/// exactly through square-free decomposition (repeated eigenvalues keep
/// full double precision this way).
pub fn poly_roots(p: &[Rat]) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (factor, mult) in square_free_decomposition(p) {
        let roots = roots_square_free(&factor)?;
        for r in roots {
            for _ in 0..mult {
                out.push(r);
            }
        }
    }
    out.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Greedy globally-minimal pairing between two equal-length multisets of
/// complex values. Returns pairs of indices plus the largest matched
/// relative distance.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Result<(Vec<(usize, usize)>, f64)> {
    if a.len() != b.len() {
        return Err(Error::Structural(format!(
            "cannot match multisets of sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut pairs = Vec::with_capacity(n);
    let mut max_rel = 0.0f64;
    for _ in 0..n {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if used_a[i] {
                continue;
            }
            for j in 0..n {
                if used_b[j] {
                    continue;
                }
                let d = (a[i] - b[j]).norm();
                if best.map(|(_, _, bd)| d < bd).unwrap_or(true) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, d) = best.expect("sizes match");
        used_a[i] = true;
        used_b[j] = true;
        let rel = d / (1.0 + a[i].norm().max(b[j].norm()));
        max_rel = max_rel.max(rel);
        pairs.push((i, j));
    }
    Ok((pairs, max_rel))
}

/// Solve a dense complex linear system by Gaussian elimination with partial
/// pivoting. Overwrites nothing; returns the solution vector.
pub fn solve_complex(matrix: &[Vec<Complex64>], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    let mut b: Vec<Complex64> = rhs.to_vec();
    for col in 0..n {
        let (pivot, pnorm) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if pnorm < 1e-300 {
            return Err(Error::Internal("singular Jacobian".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                let sub = factor * a[col][c];
                a[r][c] -= sub;
            }
            let sub = factor * b[col];
            b[r] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

pub fn rat_abs_f64(c: &Rat) -> f64 {
    rat_to_f64(&c.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    #[test]
    fn char_poly_2x2() {
        // [[0, Q-1], [1, 2]] at Q = 1/4: char = x^2 - 2x + 3/4, roots 1/2 and 3/2
        let m = vec![vec![rat_int(0), rat(-3, 4)], vec![rat_int(1), rat_int(2)]];
        let p = char_poly(&m);
        assert_eq!(p, vec![rat(3, 4), rat_int(-2), rat_int(1)]);
        let roots = poly_roots(&p).unwrap();
        assert!((roots[0] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((roots[1] - Complex64::new(1.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn char_poly_matches_trace_and_det_3x3() {
        let m = vec![
            vec![rat_int(2), rat_int(1), rat_int(0)],
            vec![rat(1, 2), rat_int(-1), rat_int(3)],
            vec![rat_int(0), rat(2, 3), rat_int(1)],
        ];
        let p = char_poly(&m);
        assert_eq!(poly_degree(&p), 3);
        // coefficient of x^2 is -trace
        assert_eq!(p[2], -rat_int(2));
        // constant term is (-1)^3 det
        let det = rat_int(2) * (rat_int(-1) - rat_int(2)) // 2*((-1)(1) - 3*(2/3))
            - rat_int(1) * (rat(1, 2) - rat_int(0));
        assert_eq!(p[0], -det);
    }

    #[test]
    fn repeated_roots_resolved_exactly() {
        // (x-1)^3 (x+2)
        let p = vec![rat_int(-2), rat_int(5), rat_int(-3), rat_int(-1), rat_int(1)];
        let decomposition = square_free_decomposition(&p);
        assert_eq!(decomposition.len(), 2);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        assert!((roots[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-13);
        for r in &roots[1..] {
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn multiset_matching_reports_distance() {
        let a = vec![Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)];
        let b = vec![Complex64::new(1.5, 1e-12), Complex64::new(0.5, 0.0)];
        let (pairs, dist) = match_multisets(&a, &b).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(dist < 1e-11);
        assert!(match_multisets(&a, &b[..1]).is_err());
    }

    #[test]
    fn complex_solver_roundtrip() {
        let m = vec![
            vec![Complex64::new(2.0, 1.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.5)],
        ];
        let x_true = [Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)];
        let rhs: Vec<Complex64> = (0..2)
            .map(|r| m[r][0] * x_true[0] + m[r][1] * x_true[1])
            .collect();
        let x = solve_complex(&m, &rhs).unwrap();
        assert!((x[0] - x_true[0]).norm() < 1e-13);
        assert!((x[1] - x_true[1]).norm() < 1e-13);
    }
}
