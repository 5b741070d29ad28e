//! Linear algebra over the PID F_q[x] and over its fraction field.

use super::upoly::Poly;
use crate::field_tower::Fq;

pub type PMat = Vec<Vec<Poly>>;

pub fn identity(field: &Fq, n: usize) -> PMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Poly::one(field) } else { Poly::zero(field) }).collect())
        .collect()
}

pub fn mat_mul(a: &PMat, b: &PMat, field: &Fq) -> PMat {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Poly::zero(field), |acc, l| acc.add(&a[i][l].mul(&b[l][j]))))
                .collect()
        })
        .collect()
}

/// Column operations on (M | U): replaces columns c1, c2 by
/// (a·c1 + b·c2, c·c1 + d·c2).
fn col_combine(m: &mut PMat, c1: usize, c2: usize, a: &Poly, b: &Poly, c: &Poly, d: &Poly) {
    for row in m.iter_mut() {
        let x = row[c1].clone();
        let y = row[c2].clone();
        row[c1] = a.mul(&x).add(&b.mul(&y));
        row[c2] = c.mul(&x).add(&d.mul(&y));
    }
}

/// Column echelon form: returns (H, U) with M·U = H, U unimodular, and the
/// nonzero columns of H in echelon form (pivot rows strictly increasing).
pub fn column_echelon(mat: &PMat, field: &Fq, ncols: usize) -> (PMat, PMat, usize) {
    let mut h = mat.clone();
    let mut u = identity(field, ncols);
    let rows = h.len();
    let mut piv = 0usize;
    for r in 0..rows {
        if piv >= ncols {
            break;
        }
        // gather the gcd of row r over columns piv.. into column piv
        for c in piv + 1..ncols {
            if h[r][c].is_zero() {
                continue;
            }
            if h[r][piv].is_zero() {
                for row in h.iter_mut() {
                    row.swap(piv, c);
                }
                for row in u.iter_mut() {
                    row.swap(piv, c);
                }
                continue;
            }
            let (g, s, t) = h[r][piv].xgcd(&h[r][c]);
            let a_g = h[r][piv].divrem(&g).unwrap().0;
            let b_g = h[r][c].divrem(&g).unwrap().0;
            // [s  −b/g; t  a/g] has determinant 1
            let nb = b_g.neg();
            col_combine(&mut h, piv, c, &s, &t, &nb, &a_g);
            col_combine(&mut u, piv, c, &s, &t, &nb, &a_g);
        }
        if !h[r][piv].is_zero() {
            piv += 1;
        }
    }
    (h, u, piv)
}

/// Basis of the (saturated) kernel {v : M·v = 0} over F_q[x].
pub fn kernel(mat: &PMat, field: &Fq, ncols: usize) -> Vec<Vec<Poly>> {
    let (_h, u, rank) = column_echelon(mat, field, ncols);
    (rank..ncols).map(|c| u.iter().map(|row| row[c].clone()).collect()).collect()
}

/// Rank over F_q(x).
pub fn rank(mat: &PMat, field: &Fq, ncols: usize) -> usize {
    column_echelon(mat, field, ncols).2
}

/// Solves M·a = b over F_q[x]; None when no polynomial solution exists.
pub fn solve(mat: &PMat, b: &[Poly], field: &Fq, ncols: usize) -> Option<Vec<Poly>> {
    let (h, u, rank) = column_echelon(mat, field, ncols);
    let rows = h.len();
    let mut y = vec![Poly::zero(field); ncols];
    let mut c = 0;
    for r in 0..rows {
        if c >= rank {
            break;
        }
        if h[r][c].is_zero() {
            continue;
        }
        let mut rhs = b[r].clone();
        for (k, yk) in y.iter().enumerate().take(c) {
            rhs = rhs.sub(&h[r][k].mul(yk));
        }
        let (qq, rem) = rhs.divrem(&h[r][c]).ok()?;
        if !rem.is_zero() {
            return None;
        }
        y[c] = qq;
        c += 1;
    }
    // residual check covers the non-pivot rows
    for r in 0..rows {
        let mut acc = Poly::zero(field);
        for k in 0..rank {
            acc = acc.add(&h[r][k].mul(&y[k]));
        }
        if acc != b[r] {
            return None;
        }
    }
    let a = (0..ncols)
        .map(|i| (0..ncols).fold(Poly::zero(field), |acc, k| acc.add(&u[i][k].mul(&y[k]))))
        .collect();
    Some(a)
}

/// Rational function num/den over F_q, den monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        let g = num.gcd(&den);
        let mut n = num.divrem(&g).unwrap().0;
        let mut d = den.divrem(&g).unwrap().0;
        let lc = d.lc();
        let il = d.field().inv(lc).unwrap();
        n = n.scale(il);
        d = d.scale(il);
        RatFunc { num: n, den: d }
    }
    pub fn from_poly(p: Poly) -> Self {
        let f = p.field().clone();
        RatFunc { num: p, den: Poly::one(&f) }
    }
    pub fn zero(field: &Fq) -> Self {
        Self::from_poly(Poly::zero(field))
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }
    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    pub fn is_poly(&self) -> bool {
        self.den.deg() == Some(0)
    }
}

/// Reduced row echelon form over F_q(x); returns pivot columns.
pub fn rref_rat(m: &mut [Vec<RatFunc>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let v = m[r][k].mul(&f);
                    m[i][k] = m[i][k].sub(&v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Kernel basis over F_q(x).
pub fn kernel_rat(m: &[Vec<RatFunc>], field: &Fq, ncols: usize) -> Vec<Vec<RatFunc>> {
    let mut a = m.to_vec();
    let piv = rref_rat(&mut a);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !piv.contains(c)) {
        let mut v = vec![RatFunc::zero(field); ncols];
        v[free] = RatFunc::from_poly(Poly::one(field));
        for (i, &pc) in piv.iter().enumerate() {
            v[pc] = a[i][free].neg();
        }
        out.push(v);
    }
    out
}

/// Clears denominators of a vector, returning a primitive polynomial vector.
pub fn primitive(v: &[RatFunc], field: &Fq) -> Vec<Poly> {
    let mut l = Poly::one(field);
    for x in v {
        let g = l.gcd(&x.den);
        l = l.mul(&x.den).divrem(&g).unwrap().0;
    }
    let w: Vec<Poly> = v.iter().map(|x| x.num.mul(&l.divrem(&x.den).unwrap().0)).collect();
    let mut g = Poly::zero(field);
    for x in &w {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return w;
    }
    w.iter().map(|x| x.divrem(&g).unwrap().0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_saturated() {
        let f = Fq::new(3, 1).unwrap();
        let x = Poly::x(&f);
        let one = Poly::one(&f);
        // [x, x^2] has kernel spanned by (x, −1)·... saturated: (x, −1)
        let m = vec![vec![x.clone(), x.mul(&x)]];
        let k = kernel(&m, &f, 2);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(x.mul(&v[0]).add(&x.mul(&x).mul(&v[1])).is_zero());
        let g = v[0].gcd(&v[1]);
        assert_eq!(g, one);
    }

    #[test]
    fn rational_kernel() {
        let f = Fq::new(5, 1).unwrap();
        let x = RatFunc::from_poly(Poly::x(&f));
        let one = RatFunc::from_poly(Poly::one(&f));
        let m = vec![vec![x.clone(), one.clone()], vec![x.mul(&x), x.clone()]];
        let k = kernel_rat(&m, &f, 2);
        assert_eq!(k.len(), 1);
        let p = primitive(&k[0], &f);
        assert!(Poly::x(&f).mul(&p[0]).add(&p[1]).is_zero());
    }

    #[test]
    fn pid_solve() {
        let f = Fq::new(3, 1).unwrap();
        let x = Poly::x(&f);
        let one = Poly::one(&f);
        let m = vec![vec![x.clone(), one.clone()], vec![x.mul(&x), x.clone()]];
        let b = vec![x.add(&one), x.mul(&x).add(&x)];
        let a = solve(&m, &b, &f, 2).unwrap();
        assert_eq!(m[0][0].mul(&a[0]).add(&m[0][1].mul(&a[1])), b[0]);
        let m1 = vec![vec![x.clone()]];
        assert!(solve(&m1, &[one], &f, 1).is_none());
    }
}
