//! Differential polynomials in jet variables and the associated
//! lambda-calculus used for local Poisson brackets.
//!
//! A jet variable is a pair (field, order) packed into a `Var`. A field of
//! weight w gives its order-k jet the weight w + k, so quasihomogeneity is a
//! per-term assertion. A local bracket entry {u(x), v(y)} = sum A_m(x)
//! delta^(m)(x-y) is carried as the polynomial sum A_m lambda^m in a formal
//! variable lambda ("LPoly"); skew-symmetry and Leibniz expansions become
//! algebra on that representation.

use super::poly::{Mono, Poly, Var};
use super::rat::{binomial, Rat};
use smallvec::SmallVec;

pub const MAX_ORD: u32 = 64;

pub fn jet(field: usize, order: u32) -> Var {
    debug_assert!(order < MAX_ORD);
    field as u32 * MAX_ORD + order
}

pub fn jet_field(v: Var) -> usize {
    (v / MAX_ORD) as usize
}

pub fn jet_order(v: Var) -> u32 {
    v % MAX_ORD
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JetField {
    pub name: String,
    pub weight: i64,
}

/// A ring of differential polynomials in a fixed set of fields.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JetRing {
    pub fields: Vec<JetField>,
}

impl JetRing {
    pub fn new(fields: Vec<JetField>) -> JetRing {
        JetRing { fields }
    }

    pub fn weight(&self, v: Var) -> i64 {
        self.fields[jet_field(v)].weight + jet_order(v) as i64
    }

    pub fn weight_fn(&self) -> impl Fn(Var) -> i64 + '_ {
        move |v| self.weight(v)
    }

    pub fn name(&self, v: Var) -> String {
        let k = jet_order(v);
        let base = &self.fields[jet_field(v)].name;
        match k {
            0 => base.clone(),
            1 => format!("{}_x", base),
            _ => format!("{}_{}x", base, k),
        }
    }

    pub fn render(&self, p: &Poly) -> String {
        p.render(&|v| self.name(v))
    }

    /// Total x-derivative: raises one jet order in every term via Leibniz.
    pub fn total_der(&self, p: &Poly) -> Poly {
        let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(p.terms.len() * 2);
        for (m, c) in &p.terms {
            for idx in 0..m.0.len() {
                let (v, e) = m.0[idx];
                let mut nm: SmallVec<[(Var, u16); 4]> = SmallVec::new();
                for (j, &(w, d)) in m.0.iter().enumerate() {
                    if j == idx {
                        if d > 1 {
                            nm.push((w, d - 1));
                        }
                    } else {
                        nm.push((w, d));
                    }
                }
                let bumped = Mono(nm).mul(&Mono::var(v + 1));
                out.push((bumped, c * &Rat::int(e as i64)));
            }
        }
        Poly::from_terms(out)
    }

    pub fn total_der_n(&self, p: &Poly, n: u32) -> Poly {
        let mut out = p.clone();
        for _ in 0..n {
            out = self.total_der(&out);
        }
        out
    }

    /// Partial derivative with respect to jet (field, order).
    pub fn pd(&self, p: &Poly, field: usize, order: u32) -> Poly {
        p.deriv(jet(field, order))
    }

    /// All jets (field, order) appearing in p.
    pub fn jets_used(&self, p: &Poly) -> Vec<(usize, u32)> {
        p.vars_used()
            .into_iter()
            .map(|v| (jet_field(v), jet_order(v)))
            .collect()
    }

    /// Substitute each field by a differential polynomial of the target ring;
    /// order-k jets go to the k-th total derivative of the image.
    pub fn substitute_fields(&self, p: &Poly, target: &JetRing, image: &dyn Fn(usize) -> Poly) -> Poly {
        let mut ders: Vec<Vec<Poly>> = (0..self.fields.len())
            .map(|f| vec![image(f)])
            .collect();
        let mut need: Vec<u32> = vec![0; self.fields.len()];
        for (m, _) in &p.terms {
            for &(v, _) in &m.0 {
                let f = jet_field(v);
                need[f] = need[f].max(jet_order(v));
            }
        }
        for (f, reach) in need.iter().enumerate() {
            for _ in 0..*reach {
                let last = ders[f].last().unwrap();
                let d = target.total_der(last);
                ders[f].push(d);
            }
        }
        p.substitute(&|v| Some(ders[jet_field(v)][jet_order(v) as usize].clone()))
    }

    /// Evaluate at a jet assignment (for randomized spot checks).
    pub fn eval(&self, p: &Poly, point: &dyn Fn(usize, u32) -> Rat) -> Rat {
        p.eval(&|v| point(jet_field(v), jet_order(v)))
    }
}

/// Polynomial in a formal variable lambda with differential-polynomial
/// coefficients; coeffs[m] multiplies lambda^m.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LPoly {
    pub coeffs: Vec<Poly>,
}

impl LPoly {
    pub fn zero() -> LPoly {
        LPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Poly>) -> LPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LPoly { coeffs }
    }

    pub fn constant_in_lambda(p: Poly) -> LPoly {
        LPoly::from_coeffs(vec![p])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn coeff(&self, m: usize) -> Poly {
        self.coeffs.get(m).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn add(&self, other: &LPoly) -> LPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        LPoly::from_coeffs(
            (0..n)
                .map(|m| self.coeff(m).add(&other.coeff(m)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &LPoly) -> LPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LPoly {
        LPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> LPoly {
        LPoly::from_coeffs(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiply by a plain differential polynomial.
    pub fn mul_poly(&self, p: &Poly) -> LPoly {
        LPoly::from_coeffs(self.coeffs.iter().map(|c| c.mul(p)).collect())
    }

    pub fn mul_lambda(&self) -> LPoly {
        if self.is_zero() {
            return LPoly::zero();
        }
        let mut coeffs = vec![Poly::zero()];
        coeffs.extend(self.coeffs.iter().cloned());
        LPoly { coeffs }
    }

    /// Apply (lambda + total derivative) once.
    pub fn shift_op(&self, ring: &JetRing) -> LPoly {
        let der = LPoly::from_coeffs(self.coeffs.iter().map(|c| ring.total_der(c)).collect());
        self.mul_lambda().add(&der)
    }

    /// Apply (lambda + total derivative) n times.
    pub fn shift_op_n(&self, ring: &JetRing, n: u32) -> LPoly {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.shift_op(ring);
        }
        out
    }

    /// Replace lambda by (-lambda - total derivative), the skew transform:
    /// sum_m (-lambda - d)^m (c_m).
    pub fn skew_transform(&self, ring: &JetRing) -> LPoly {
        let mut acc = LPoly::zero();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = LPoly::constant_in_lambda(c.clone());
            for _ in 0..m {
                t = t.shift_op(ring).neg();
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn max_lambda_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl std::fmt::Debug for LPoly {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(fm, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| format!("({:?})L^{}", c, m))
            .collect();
        write!(fm, "{}", parts.join(" + "))
    }
}

/// One-sided kernel of a formal distribution sum f(x-jets) g(y-jets)
/// delta^(m)(x-y); `delta_normal_form` re-expands all y-jet prefactors at x.
#[derive(Clone, Debug, Default)]
pub struct TwoPoint {
    /// (coefficient at x, coefficient at y, delta derivative order)
    pub terms: Vec<(Poly, Poly, u32)>,
}

impl TwoPoint {
    pub fn new() -> TwoPoint {
        TwoPoint { terms: Vec::new() }
    }

    pub fn push(&mut self, fx: Poly, gy: Poly, m: u32) {
        self.terms.push((fx, gy, m));
    }

    /// Normal form: g(y) delta^(m)(x-y) = sum_k C(m,k) (d^k g)(x) delta^(m-k)(x-y).
    pub fn delta_normal_form(&self, ring: &JetRing) -> DeltaDist {
        let mut acc: Vec<Poly> = Vec::new();
        for (fx, gy, m) in &self.terms {
            let mut der = gy.clone();
            for k in 0..=*m {
                let c = binomial(*m as i64, k as i64);
                let part = fx.mul(&der.scale(&c));
                let ord = (*m - k) as usize;
                if acc.len() <= ord {
                    acc.resize(ord + 1, Poly::zero());
                }
                acc[ord].add_assign(&part);
                if k < *m {
                    der = ring.total_der(&der);
                }
            }
        }
        DeltaDist::from_coeffs(acc)
    }
}

/// Normal-formed distribution kernel: coeffs[m] multiplies delta^(m)(x-y),
/// all coefficients functions of x-jets only.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DeltaDist {
    pub coeffs: Vec<Poly>,
}

impl DeltaDist {
    pub fn from_coeffs(mut coeffs: Vec<Poly>) -> DeltaDist {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DeltaDist { coeffs }
    }

    pub fn from_lpoly(l: &LPoly) -> DeltaDist {
        DeltaDist::from_coeffs(l.coeffs.clone())
    }

    pub fn to_lpoly(&self) -> LPoly {
        LPoly::from_coeffs(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> JetRing {
        JetRing::new(vec![
            JetField { name: "u".into(), weight: 2 },
            JetField { name: "v".into(), weight: 3 },
        ])
    }

    #[test]
    fn total_derivative_is_a_derivation() {
        let r = ring2();
        let u = Poly::var(jet(0, 0));
        let v = Poly::var(jet(1, 0));
        let fg = u.mul(&v);
        let lhs = r.total_der(&fg);
        let rhs = r.total_der(&u).mul(&v).add(&u.mul(&r.total_der(&v)));
        assert_eq!(lhs, rhs);
        // d/dx (u*u) = 2 u u_x
        let uu = u.mul(&u);
        assert_eq!(
            r.total_der(&uu),
            u.mul(&Poly::var(jet(0, 1))).scale(&Rat::int(2))
        );
    }

    #[test]
    fn total_derivative_raises_weight_by_one() {
        let r = ring2();
        let p = Poly::var(jet(0, 1)).mul(&Poly::var(jet(1, 0))); // weight 3+3=6
        let w = r.weight_fn();
        assert_eq!(p.homogeneous_degree(&w).unwrap(), Some(6));
        assert_eq!(r.total_der(&p).homogeneous_degree(&w).unwrap(), Some(7));
    }

    #[test]
    fn delta_normal_form_basics() {
        let r = ring2();
        let f = Poly::var(jet(0, 0));
        // f(y) delta(x-y) -> f(x) delta
        let mut tp = TwoPoint::new();
        tp.push(Poly::one(), f.clone(), 0);
        let nf = tp.delta_normal_form(&r);
        assert_eq!(nf.coeffs, vec![f.clone()]);
        // f(y) delta'(x-y) -> f(x) delta' + f_x delta
        let mut tp = TwoPoint::new();
        tp.push(Poly::one(), f.clone(), 1);
        let nf = tp.delta_normal_form(&r);
        assert_eq!(nf.coeffs, vec![r.total_der(&f), f.clone()]);
    }

    #[test]
    fn delta_normal_form_idempotent_and_linear() {
        let r = ring2();
        let f = Poly::var(jet(0, 0)).mul(&Poly::var(jet(1, 1)));
        let mut tp = TwoPoint::new();
        tp.push(f.clone(), Poly::one(), 2);
        let nf = tp.delta_normal_form(&r);
        // already normal: re-normalizing is the identity
        let mut tp2 = TwoPoint::new();
        for (m, c) in nf.coeffs.iter().enumerate() {
            tp2.push(c.clone(), Poly::one(), m as u32);
        }
        assert_eq!(tp2.delta_normal_form(&r), nf);
    }

    #[test]
    fn skew_transform_is_an_involution() {
        let r = ring2();
        let u = Poly::var(jet(0, 0));
        let l = LPoly::from_coeffs(vec![r.total_der(&u), u.scale(&Rat::int(2)), Poly::zero(), Poly::one()]);
        // KdV-type kernel is skew: -skew(l) == l
        assert_eq!(l.skew_transform(&r).neg(), l);
        // and the transform is an involution on arbitrary kernels
        let m = LPoly::from_coeffs(vec![u.mul(&u), Poly::var(jet(1, 2))]);
        assert_eq!(m.skew_transform(&r).skew_transform(&r), m);
    }
}
