//! Sparse multivariate polynomials over `Rat`.
//!
//! Variables are bare `u32` ids; what an id means (a coordinate, a jet
//! variable, an algebraic auxiliary) is decided by the surrounding context.
//! Terms are kept sorted by monomial so equality, hashing and merging are
//! cheap and canonical.

use super::rat::Rat;
use smallvec::SmallVec;
use std::fmt;

pub type Var = u32;

/// Monomial: sorted list of (variable, exponent), exponents >= 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub SmallVec<[(Var, u16); 4]>);

/// Lexicographic order with earlier variables dominating: at the smallest
/// variable where two monomials differ, the larger exponent wins. This is a
/// genuine monomial order (multiplicative, a well-order), which the exact
/// division routine relies on for termination.
impl Ord for Mono {
    fn cmp(&self, other: &Mono) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Equal,
                (Some(_), None) => return Greater,
                (None, Some(_)) => return Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        return Greater;
                    }
                    if va > vb {
                        return Less;
                    }
                    match ea.cmp(&eb) {
                        Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    }
                }
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Mono) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn one() -> Mono {
        Mono(SmallVec::new())
    }

    pub fn var(v: Var) -> Mono {
        Mono(smallvec::smallvec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: u16) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(smallvec::smallvec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exp_of(&self, v: Var) -> u16 {
        self.0
            .iter()
            .find_map(|&(w, e)| (w == v).then_some(e))
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// Divide by `other`, returning None unless divisible.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        let mut out = SmallVec::new();
        let mut i = 0;
        for &(v, e) in &other.0 {
            loop {
                if i >= self.0.len() {
                    return None;
                }
                let (w, d) = self.0[i];
                if w < v {
                    out.push((w, d));
                    i += 1;
                } else if w == v {
                    if d < e {
                        return None;
                    }
                    if d > e {
                        out.push((w, d - e));
                    }
                    i += 1;
                    break;
                } else {
                    return None;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        Some(Mono(out))
    }

    /// Weighted degree under a weight function.
    pub fn wdeg(&self, weight: &dyn Fn(Var) -> i64) -> i64 {
        self.0.iter().map(|&(v, e)| weight(v) * e as i64).sum()
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(fm, "1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(fm, "*")?;
            }
            write!(fm, "x{}", v)?;
            if e > 1 {
                write!(fm, "^{}", e)?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial: strictly increasing monomials, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub terms: Vec<(Mono, Rat)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Rat) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::ONE)
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(Rat::int(n))
    }

    pub fn var(v: Var) -> Poly {
        Poly {
            terms: vec![(Mono::var(v), Rat::ONE)],
        }
    }

    pub fn monomial(m: Mono, c: Rat) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_term(&self) -> Rat {
        self.terms
            .iter()
            .find_map(|(m, c)| m.is_one().then(|| c.clone()))
            .unwrap_or(Rat::ZERO)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, m: &Mono) -> Rat {
        match self.terms.binary_search_by(|(t, _)| t.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rat::ZERO,
        }
    }

    /// Build from unsorted (possibly duplicated) terms.
    pub fn from_terms(mut terms: Vec<(Mono, Rat)>) -> Poly {
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Less => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().cloned());
        Poly { terms: out }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        if other.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = other.clone();
            return;
        }
        *self = self.add(other);
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return Poly {
                terms: self.terms.iter().map(|(ma, ca)| (ma.mul(m), ca * c)).collect(),
            };
        }
        if self.terms.len() == 1 {
            return other.mul(self);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                prods.push((ma.mul(mb), ca * cb));
            }
        }
        Poly::from_terms(prods)
    }

    pub fn mul_mono(&self, m: &Mono, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(ma, ca)| (ma.mul(m), ca * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Partial derivative with respect to a variable.
    pub fn deriv(&self, v: Var) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp_of(v);
            if e == 0 {
                continue;
            }
            let mut nm: SmallVec<[(Var, u16); 4]> = SmallVec::new();
            for &(w, d) in &m.0 {
                if w == v {
                    if d > 1 {
                        nm.push((w, d - 1));
                    }
                } else {
                    nm.push((w, d));
                }
            }
            terms.push((Mono(nm), c * &Rat::int(e as i64)));
        }
        Poly { terms }
    }

    /// Substitute variables by polynomials. Variables not in the map stay.
    pub fn substitute(&self, map: &dyn Fn(Var) -> Option<Poly>) -> Poly {
        let mut cache: std::collections::HashMap<(Var, u16), Poly> = std::collections::HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            let mut plain = Mono::one();
            for &(v, e) in &m.0 {
                match map(v) {
                    None => plain = plain.mul(&Mono::var_pow(v, e)),
                    Some(p) => {
                        let pe = cache
                            .entry((v, e))
                            .or_insert_with(|| p.pow(e as u32))
                            .clone();
                        term = term.mul(&pe);
                    }
                }
            }
            out.add_assign(&term.mul_mono(&plain, &Rat::ONE));
        }
        out
    }

    /// Substitute a single variable by a polynomial.
    pub fn substitute_var(&self, v: Var, p: &Poly) -> Poly {
        self.substitute(&|w| (w == v).then(|| p.clone()))
    }

    /// Evaluate fully at a point.
    pub fn eval(&self, point: &dyn Fn(Var) -> Rat) -> Rat {
        let mut acc = Rat::ZERO;
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t *= &point(v).pow(e as u32);
            }
            acc += &t;
        }
        acc
    }

    pub fn vars_used(&self) -> std::collections::BTreeSet<Var> {
        let mut s = std::collections::BTreeSet::new();
        for (m, _) in &self.terms {
            for &(v, _) in &m.0 {
                s.insert(v);
            }
        }
        s
    }

    pub fn max_exp_of(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp_of(v)).max().unwrap_or(0)
    }

    /// Coefficient polynomials of powers of `v`: result[k] = coeff of v^k.
    pub fn coeffs_in_var(&self, v: Var) -> Vec<Poly> {
        let d = self.max_exp_of(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp_of(v) as usize;
            let mut nm: SmallVec<[(Var, u16); 4]> = SmallVec::new();
            for &(w, d2) in &m.0 {
                if w != v {
                    nm.push((w, d2));
                }
            }
            out[e].add_assign(&Poly::monomial(Mono(nm), c.clone()));
        }
        out
    }

    /// Weighted degree of the highest term; None for the zero polynomial.
    pub fn wdeg(&self, weight: &dyn Fn(Var) -> i64) -> Option<i64> {
        self.terms.iter().map(|(m, _)| m.wdeg(weight)).max()
    }

    /// Check all terms share one weighted degree; returns it (None if zero poly).
    pub fn homogeneous_degree(&self, weight: &dyn Fn(Var) -> i64) -> Result<Option<i64>, (i64, i64)> {
        let mut deg = None;
        for (m, _) in &self.terms {
            let d = m.wdeg(weight);
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return Err((d0, d)),
                _ => {}
            }
        }
        Ok(deg)
    }

    /// The part of the polynomial of exact weighted degree d.
    pub fn wdeg_part(&self, weight: &dyn Fn(Var) -> i64, d: i64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.wdeg(weight) == d)
                .cloned()
                .collect(),
        }
    }

    /// Exact division; returns None if not divisible.
    pub fn exact_div(&self, div: &Poly) -> Option<Poly> {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (dm, dc) = div.terms.last().unwrap();
        let mut rem = self.clone();
        let mut quo: Vec<(Mono, Rat)> = Vec::new();
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.last().unwrap();
            let qm = rm.try_div(dm)?;
            let qc = rc / dc;
            quo.push((qm.clone(), qc.clone()));
            rem = rem.sub(&div.mul_mono(&qm, &qc));
        }
        quo.reverse();
        Some(Poly::from_terms(quo))
    }

    /// Render with a variable-name function, terms in a stable order.
    pub fn render(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate().rev() {
            let neg = c.signum() < 0;
            let mag = c.abs();
            if k + 1 == self.terms.len() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coeff_str = mag.to_string();
            if m.is_one() {
                s.push_str(&coeff_str);
            } else {
                if !mag.is_one() {
                    s.push_str(&coeff_str);
                    s.push('*');
                }
                for (j, &(v, e)) in m.0.iter().enumerate() {
                    if j > 0 {
                        s.push('*');
                    }
                    s.push_str(&name(v));
                    if e > 1 {
                        s.push_str(&format!("^{}", e));
                    }
                }
            }
        }
        s
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self.render(&|v| format!("x{}", v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: Var) -> Poly {
        Poly::var(v)
    }

    #[test]
    fn ring_ops() {
        // (z1 + z2)(z1 - z2) = z1^2 - z2^2
        let p = x(0).add(&x(1)).mul(&x(0).sub(&x(1)));
        let q = x(0).mul(&x(0)).sub(&x(1).mul(&x(1)));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn derivative_and_substitution() {
        // d/dx0 (x0^3 x1 + x1) = 3 x0^2 x1
        let p = x(0).pow(3).mul(&x(1)).add(&x(1));
        assert_eq!(p.deriv(0), x(0).pow(2).mul(&x(1)).scale(&Rat::int(3)));
        // substitute x1 -> 0 keeps nothing
        assert!(p.substitute_var(1, &Poly::zero()).is_zero());
        // substitute x1 -> x0
        assert_eq!(p.substitute_var(1, &x(0)), x(0).pow(4).add(&x(0)));
    }

    #[test]
    fn exact_division() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&x(1));
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(prod.exact_div(&x(0).add(&Poly::one())).is_none());
    }

    #[test]
    fn weighted_degree() {
        let w = |v: Var| -> i64 { [2, 3][v as usize] };
        let p = x(0).pow(3).add(&x(1).pow(2));
        assert_eq!(p.homogeneous_degree(&w).unwrap(), Some(6));
        let q = p.add(&x(0));
        assert!(q.homogeneous_degree(&w).is_err());
        assert_eq!(q.wdeg_part(&w, 2), x(0));
    }

    #[test]
    fn coeffs_in_var() {
        let p = x(0).pow(2).mul(&x(1)).add(&x(0).scale(&Rat::int(2))).add(&Poly::one());
        let cs = p.coeffs_in_var(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], Poly::one());
        assert_eq!(cs[1], Poly::int(2));
        assert_eq!(cs[2], x(1));
    }
}
