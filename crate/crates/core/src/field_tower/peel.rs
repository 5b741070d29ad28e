//! Additive peeling solver for a·π^{va}·x + b·π^{vb}·x^q = r.
//!
//! The map x ↦ αx + βx^q is F_q-linear. A monomial c·π^k of x has two
//! images, at k + va and q·k + vb; they coincide at k* = (va − vb)/(q − 1).
//! Peeling the residual from its lowest term either finds the monomial of x
//! whose leading image matches, or records the term as *stuck*. The stuck
//! terms form a canonical complement of the image, so the residual's stuck
//! part is a linear normal form of r modulo the image.

use super::laurent::Laurent;

/// Outcome of one peeling run.
#[derive(Clone, Debug)]
pub struct Peeled {
    /// Partial solution: αx + βx^q = r − Σ stuck.
    pub x: Laurent,
    /// Terms (exponent, coefficient) that no monomial of x can reach.
    pub stuck: Vec<(i64, u8)>,
    /// False when the precision of r does not reach past the crossover
    /// exponent, so stuckness above the precision cannot be decided.
    pub determined: bool,
}

impl Peeled {
    pub fn is_solved(&self) -> bool {
        self.stuck.is_empty() && self.determined
    }
}

/// Solves a0·π^{va}·x + b0·π^{vb}·x^q = r as far as possible.
pub fn peel(a0: u8, va: i64, b0: u8, vb: i64, r: &Laurent) -> Peeled {
    let f = r.field().clone();
    let q = f.q() as i64;
    let cap = r.cap();
    let pr = r.prec();
    // (q−1)·u* = q·va − vb
    let cross = q * va - vb;
    let tie_sum = f.add(a0, b0);
    let mut residual = r.clone();
    let mut xterms: Vec<(i64, u8)> = Vec::new();
    let mut stuck = Vec::new();
    while let Some((u, c)) = residual.leading() {
        let side = (q - 1) * u - cross;
        let choice = if side > 0 {
            Some((u - va, f.div(c, a0).unwrap()))
        } else if side < 0 {
            if (u - vb).rem_euclid(q) == 0 {
                Some(((u - vb) / q, f.div(c, b0).unwrap()))
            } else {
                None
            }
        } else if tie_sum != 0 {
            Some((u - va, f.div(c, tie_sum).unwrap()))
        } else {
            None
        };
        match choice {
            Some((k, coef)) => {
                xterms.push((k, coef));
                let image = Laurent::from_terms(
                    &f,
                    &[(k + va, f.mul(a0, coef)), (q * k + vb, f.mul(b0, coef))],
                    cap,
                );
                residual = residual.sub(&image);
            }
            None => {
                stuck.push((u, c));
                residual = residual.sub(&Laurent::monomial(&f, c, u, cap));
            }
        }
    }
    let determined = (q - 1) * pr > cross;
    let xprec = (pr - va).max((pr - vb + q - 1).div_euclid(q));
    let x = Laurent::from_terms_prec(&f, &xterms, xprec, cap - va.min(0));
    Peeled { x, stuck, determined }
}

/// Artin–Schreier special case x − x^q = r.
pub fn peel_artin_schreier(r: &Laurent) -> Peeled {
    let f = r.field();
    peel(1, 0, f.neg(1), 0, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::fq::Fq;

    #[test]
    fn artin_schreier_geometric() {
        let f = Fq::new(2, 1).unwrap();
        // x − x² = π²  →  x = Σ_{k≥1} π^{2^k}
        let r = Laurent::monomial(&f, 1, 2, 64);
        let p = peel_artin_schreier(&r);
        assert!(p.is_solved());
        for k in 1..64i64 {
            let want = if k.count_ones() == 1 && k >= 2 { 1 } else { 0 };
            assert_eq!(p.x.coeff(k), want, "coefficient {k}");
        }
        let back = p.x.sub(&p.x.frob());
        assert_eq!(back, r);
    }

    #[test]
    fn artin_schreier_obstruction_at_theta() {
        let f = Fq::new(2, 1).unwrap();
        let r = Laurent::monomial(&f, 1, -1, 64);
        let p = peel_artin_schreier(&r);
        assert_eq!(p.stuck, vec![(-1, 1)]);
        let r2 = Laurent::monomial(&f, 1, -2, 64); // θ² = θ + (θ² − θ): stuck at θ
        let p2 = peel_artin_schreier(&r2);
        assert_eq!(p2.stuck, vec![(-1, 1)]);
    }

    #[test]
    fn constants_are_stuck() {
        let f = Fq::new(3, 1).unwrap();
        let p = peel_artin_schreier(&Laurent::one(&f, 32));
        assert_eq!(p.stuck, vec![(0, 1)]);
    }

    #[test]
    fn general_residual_identity() {
        let f = Fq::new(3, 1).unwrap();
        // θ²·x − x³ = r
        let r = Laurent::from_terms(&f, &[(-7, 1), (-5, 2), (-3, 1), (0, 1), (4, 2)], 80);
        let p = peel(1, -2, 2, 0, &r);
        let alpha = Laurent::monomial(&f, 1, -2, 80);
        let lhs = alpha.mul(&p.x).sub(&p.x.frob());
        let stuck = Laurent::from_terms(&f, &p.stuck, 80);
        assert_eq!(lhs.add(&stuck), r);
        assert!(p.determined);
    }
}
