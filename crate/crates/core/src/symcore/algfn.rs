//! Quotient rings with algebraic auxiliaries.
//!
//! Functions on the equilibrium locus are polynomials in base coordinates
//! together with auxiliary roots T_j of monic minimal polynomials m_j(T_j; s).
//! The relation system is triangular (each m_j involves only base variables
//! and T_j), which keeps reduction a sequence of univariate divisions and
//! avoids Groebner machinery. Division is supported through a factored,
//! auxiliary-free denominator.

use super::linalg::poly_bareiss_solve;
use super::poly::{Mono, Poly, Var};
use super::rat::Rat;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BaseVar {
    pub name: String,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxVar {
    pub name: String,
    pub weight: i64,
    /// Monic in the auxiliary variable; involves only base variables and it.
    pub min_poly: Poly,
    pub degree: u16,
}

#[derive(Debug, thiserror::Error)]
pub enum AlgError {
    #[error("relation for {0} is not monic in its auxiliary variable")]
    NonMonic(String),
    #[error("relation for {aux} involves auxiliary {other}; system must be triangular")]
    NotTriangular { aux: String, other: String },
    #[error("element is not invertible modulo the relations (branch point): {0}")]
    NotInvertible(String),
}

/// Base variables take ids 0..base.len(); auxiliary j takes id base.len()+j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    pub base: Vec<BaseVar>,
    pub auxs: Vec<AuxVar>,
}

impl QuotientRing {
    pub fn polynomial_ring(base: Vec<BaseVar>) -> Arc<QuotientRing> {
        Arc::new(QuotientRing { base, auxs: Vec::new() })
    }

    pub fn new(base: Vec<BaseVar>, mut auxs: Vec<AuxVar>) -> Result<Arc<QuotientRing>, AlgError> {
        let nb = base.len();
        for j in 0..auxs.len() {
            let v = (nb + j) as Var;
            let d = auxs[j].min_poly.max_exp_of(v);
            if d == 0 {
                return Err(AlgError::NonMonic(auxs[j].name.clone()));
            }
            let lead = auxs[j].min_poly.coeffs_in_var(v)[d as usize].clone();
            if !lead.is_constant() {
                return Err(AlgError::NonMonic(auxs[j].name.clone()));
            }
            let c = lead.constant_term();
            if c.is_zero() {
                return Err(AlgError::NonMonic(auxs[j].name.clone()));
            }
            if !c.is_one() {
                auxs[j].min_poly = auxs[j].min_poly.scale(&c.inv());
            }
            auxs[j].degree = d;
            for w in auxs[j].min_poly.vars_used() {
                if w as usize >= nb && w != v {
                    return Err(AlgError::NotTriangular {
                        aux: auxs[j].name.clone(),
                        other: format!("var{}", w),
                    });
                }
            }
        }
        Ok(Arc::new(QuotientRing { base, auxs }))
    }

    pub fn aux_var(&self, j: usize) -> Var {
        (self.base.len() + j) as Var
    }

    pub fn weight(&self, v: Var) -> i64 {
        let v = v as usize;
        if v < self.base.len() {
            self.base[v].weight
        } else {
            self.auxs[v - self.base.len()].weight
        }
    }

    pub fn name(&self, v: Var) -> String {
        let v = v as usize;
        if v < self.base.len() {
            self.base[v].name.clone()
        } else {
            self.auxs[v - self.base.len()].name.clone()
        }
    }

    pub fn render(&self, p: &Poly) -> String {
        p.render(&|v| self.name(v))
    }

    /// Normal form: every auxiliary exponent below its relation degree.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut out = p.clone();
        loop {
            let mut changed = false;
            for j in 0..self.auxs.len() {
                let v = self.aux_var(j);
                let d = self.auxs[j].degree;
                while out.max_exp_of(v) >= d {
                    // divide the top slice by the monic relation
                    let e = out.max_exp_of(v);
                    let top = out.coeffs_in_var(v)[e as usize].clone();
                    let shift = Poly::monomial(Mono::var_pow(v, e - d), Rat::ONE);
                    let corr = top.mul(&shift).mul(&self.auxs[j].min_poly);
                    let lead = top.mul(&Poly::monomial(Mono::var_pow(v, e), Rat::ONE));
                    out = out.sub(&lead).add(&lead.sub(&corr));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        out
    }

    /// All monomials in the auxiliaries with exponents below the relation
    /// degrees; index 0 is the unit.
    pub fn aux_basis(&self) -> Vec<Mono> {
        let mut basis = vec![Mono::one()];
        for j in 0..self.auxs.len() {
            let v = self.aux_var(j);
            let d = self.auxs[j].degree;
            let mut next = Vec::with_capacity(basis.len() * d as usize);
            for e in 0..d {
                for m in &basis {
                    next.push(m.mul(&Mono::var_pow(v, e)));
                }
            }
            basis = next;
        }
        basis
    }

    /// Split a reduced polynomial into base-only coefficients per aux-basis
    /// monomial.
    fn aux_components(&self, p: &Poly, basis: &[Mono]) -> Vec<Poly> {
        let idx: std::collections::HashMap<&Mono, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let nb = self.base.len();
        let mut out = vec![Poly::zero(); basis.len()];
        for (m, c) in &p.terms {
            let mut auxm = Mono::one();
            let mut basem: smallvec::SmallVec<[(Var, u16); 4]> = smallvec::SmallVec::new();
            for &(v, e) in &m.0 {
                if (v as usize) < nb {
                    basem.push((v, e));
                } else {
                    auxm = auxm.mul(&Mono::var_pow(v, e));
                }
            }
            let i = *idx.get(&auxm).expect("reduced polynomial");
            out[i].add_assign(&Poly::monomial(Mono(basem), c.clone()));
        }
        out
    }
}

/// An element of the quotient ring: reduced numerator over a product of
/// auxiliary-free polynomial factors.
#[derive(Clone, Debug)]
pub struct AlgFn {
    pub ring: Arc<QuotientRing>,
    pub num: Poly,
    /// Factored denominator (factor, multiplicity); factors are primitive,
    /// auxiliary-free, deduplicated.
    pub den: Vec<(Poly, u32)>,
}

fn primitive_normalize(p: &Poly) -> (Poly, Rat) {
    // scale so the leading coefficient is 1; return (normalized, scale)
    let lead = p.terms.last().expect("nonzero factor").1.clone();
    (p.scale(&lead.inv()), lead)
}

impl AlgFn {
    pub fn from_poly(ring: Arc<QuotientRing>, p: Poly) -> AlgFn {
        let num = ring.reduce(&p);
        AlgFn { ring, num, den: Vec::new() }
    }

    pub fn zero(ring: Arc<QuotientRing>) -> AlgFn {
        AlgFn::from_poly(ring, Poly::zero())
    }

    pub fn one(ring: Arc<QuotientRing>) -> AlgFn {
        AlgFn::from_poly(ring, Poly::one())
    }

    pub fn var(ring: Arc<QuotientRing>, v: Var) -> AlgFn {
        AlgFn::from_poly(ring, Poly::var(v))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn simplify(mut self) -> AlgFn {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut den = Vec::new();
        for (f, mut e) in std::mem::take(&mut self.den) {
            while e > 0 {
                if let Some(q) = self.num.exact_div(&f) {
                    self.num = q;
                    e -= 1;
                } else {
                    break;
                }
            }
            if e > 0 {
                den.push((f, e));
            }
        }
        self.den = den;
        self
    }

    fn merge_den(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
        let mut out: Vec<(Poly, u32)> = a.to_vec();
        for (f, e) in b {
            match out.iter_mut().find(|(g, _)| g == f) {
                Some((_, e0)) => *e0 = (*e0).max(*e),
                None => out.push((f.clone(), *e)),
            }
        }
        out
    }

    fn den_quotient(den: &[(Poly, u32)], sub: &[(Poly, u32)]) -> Poly {
        // product of den / sub (sub must divide den factorwise)
        let mut out = Poly::one();
        for (f, e) in den {
            let e_sub = sub.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
            for _ in e_sub..*e {
                out = out.mul(f);
            }
        }
        out
    }

    pub fn add(&self, other: &AlgFn) -> AlgFn {
        let den = Self::merge_den(&self.den, &other.den);
        let na = self.num.mul(&Self::den_quotient(&den, &self.den));
        let nb = other.num.mul(&Self::den_quotient(&den, &other.den));
        AlgFn {
            ring: self.ring.clone(),
            num: self.ring.reduce(&na.add(&nb)),
            den,
        }
        .simplify()
    }

    pub fn sub(&self, other: &AlgFn) -> AlgFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgFn {
        AlgFn {
            ring: self.ring.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rat) -> AlgFn {
        AlgFn {
            ring: self.ring.clone(),
            num: self.num.scale(c),
            den: if c.is_zero() { Vec::new() } else { self.den.clone() },
        }
    }

    pub fn mul(&self, other: &AlgFn) -> AlgFn {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, e0)) => *e0 += e,
                None => den.push((f.clone(), *e)),
            }
        }
        AlgFn {
            ring: self.ring.clone(),
            num: self.ring.reduce(&self.num.mul(&other.num)),
            den,
        }
        .simplify()
    }

    pub fn eq(&self, other: &AlgFn) -> bool {
        self.sub(other).is_zero()
    }

    /// Multiplicative inverse modulo the relations.
    pub fn inv(&self) -> Result<AlgFn, AlgError> {
        if self.is_zero() {
            return Err(AlgError::NotInvertible("zero".into()));
        }
        let ring = &self.ring;
        let basis = ring.aux_basis();
        let d = basis.len();
        // multiplication-by-num matrix over the base polynomial ring
        let mut m = vec![vec![Poly::zero(); d]; d];
        for (k, bm) in basis.iter().enumerate() {
            let prod = ring.reduce(&self.num.mul_mono(bm, &Rat::ONE));
            let comps = ring.aux_components(&prod, &basis);
            for (j, c) in comps.into_iter().enumerate() {
                m[j][k] = c;
            }
        }
        let mut rhs = vec![Poly::zero(); d];
        rhs[0] = Poly::one();
        let (nums, det) = poly_bareiss_solve(&m, &rhs)
            .ok_or_else(|| AlgError::NotInvertible(format!("det vanishes: {:?}", self.num)))?;
        let mut inv_num = Poly::zero();
        for (k, bm) in basis.iter().enumerate() {
            inv_num.add_assign(&nums[k].mul_mono(bm, &Rat::ONE));
        }
        // 1/self = (inv_num / det) * den
        for (f, e) in &self.den {
            for _ in 0..*e {
                inv_num = inv_num.mul(f);
            }
        }
        let (dnorm, dscale) = primitive_normalize(&det);
        let out = AlgFn {
            ring: ring.clone(),
            num: ring.reduce(&inv_num.scale(&dscale.inv())),
            den: if dnorm.is_constant() { Vec::new() } else { vec![(dnorm, 1)] },
        }
        .simplify();
        Ok(out)
    }

    pub fn div(&self, other: &AlgFn) -> Result<AlgFn, AlgError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Partial derivative with respect to base variable k, differentiating
    /// through the auxiliaries implicitly.
    pub fn deriv(&self, k: Var) -> Result<AlgFn, AlgError> {
        let ring = &self.ring;
        debug_assert!((k as usize) < ring.base.len());
        // dT_j = -(d m_j / d s_k) / (d m_j / d T_j)
        let mut daux: Vec<Option<AlgFn>> = vec![None; ring.auxs.len()];
        let need: Vec<usize> = (0..ring.auxs.len())
            .filter(|&j| self.num.max_exp_of(ring.aux_var(j)) > 0 || ring.auxs[j].min_poly.max_exp_of(k) > 0)
            .collect();
        for j in need {
            let v = ring.aux_var(j);
            let mj = &ring.auxs[j].min_poly;
            let dk = AlgFn::from_poly(ring.clone(), mj.deriv(k));
            if dk.is_zero() {
                daux[j] = Some(AlgFn::zero(ring.clone()));
                continue;
            }
            let dt = AlgFn::from_poly(ring.clone(), mj.deriv(v));
            daux[j] = Some(dk.neg().div(&dt)?);
        }
        // numerator part
        let mut out = AlgFn {
            ring: ring.clone(),
            num: ring.reduce(&self.num.deriv(k)),
            den: self.den.clone(),
        };
        for (j, d) in daux.iter().enumerate() {
            if let Some(d) = d {
                if !d.is_zero() {
                    let pt = AlgFn {
                        ring: ring.clone(),
                        num: ring.reduce(&self.num.deriv(ring.aux_var(j))),
                        den: self.den.clone(),
                    };
                    out = out.add(&pt.mul(d));
                }
            }
        }
        // denominator part: d(1/f^e) = -e f' / f^(e+1)
        for (i, (f, e)) in self.den.iter().enumerate() {
            let fk = f.deriv(k);
            if fk.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[i].1 += 1;
            let part = AlgFn {
                ring: ring.clone(),
                num: ring.reduce(&self.num.mul(&fk).scale(&-Rat::int(*e as i64))),
                den,
            };
            out = out.add(&part);
        }
        Ok(out.simplify())
    }

    /// Substitute base variables by polynomials (auxiliaries untouched).
    pub fn substitute_base(&self, map: &dyn Fn(Var) -> Option<Poly>) -> AlgFn {
        let num = self.num.substitute(map);
        let den = self
            .den
            .iter()
            .map(|(f, e)| (f.substitute(map), *e))
            .collect();
        AlgFn {
            ring: self.ring.clone(),
            num: self.ring.reduce(&num),
            den,
        }
        .simplify()
    }

    /// Weighted degree check against the ring's grading; error gives the two
    /// clashing degrees.
    pub fn homogeneous_degree(&self) -> Result<Option<i64>, (i64, i64)> {
        let w = |v: Var| self.ring.weight(v);
        let nd = self.num.homogeneous_degree(&w)?;
        let mut dd = 0i64;
        for (f, e) in &self.den {
            match f.homogeneous_degree(&w)? {
                Some(d) => dd += d * *e as i64,
                None => {}
            }
        }
        Ok(nd.map(|n| n - dd))
    }

    pub fn render(&self) -> String {
        let n = self.ring.render(&self.num);
        if self.den.is_empty() {
            n
        } else {
            let d: Vec<String> = self
                .den
                .iter()
                .map(|(f, e)| {
                    if *e == 1 {
                        format!("({})", self.ring.render(f))
                    } else {
                        format!("({})^{}", self.ring.render(f), e)
                    }
                })
                .collect();
            format!("({}) / [{}]", n, d.join(" * "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_ring() -> Arc<QuotientRing> {
        // base s0; aux T with T^2 - 2 = 0
        QuotientRing::new(
            vec![BaseVar { name: "s".into(), weight: 1 }],
            vec![AuxVar {
                name: "T".into(),
                weight: 1,
                min_poly: Poly::var(1).pow(2).sub(&Poly::int(2)),
                degree: 0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn reduction_and_inverse() {
        let ring = sqrt2_ring();
        let t = AlgFn::var(ring.clone(), 1);
        let t2 = t.mul(&t);
        assert_eq!(t2.num, Poly::int(2));
        // (1+T)(T-1) = T^2 - 1 = 1
        let one = AlgFn::one(ring.clone());
        let a = t.add(&one);
        let ainv = a.inv().unwrap();
        assert!(a.mul(&ainv).eq(&one));
        // 1/(1+T) = T - 1  (since (1+T)(T-1)=1)
        assert!(ainv.eq(&t.sub(&one)));
    }

    #[test]
    fn triangular_cubic_with_parameters() {
        // base s0, s1; aux T with T^3 - s0 T - s1 = 0 (monic)
        let t_var = 2;
        let m = Poly::var(t_var)
            .pow(3)
            .sub(&Poly::var(0).mul(&Poly::var(t_var)))
            .sub(&Poly::var(1));
        let ring = QuotientRing::new(
            vec![
                BaseVar { name: "s0".into(), weight: 2 },
                BaseVar { name: "s1".into(), weight: 3 },
            ],
            vec![AuxVar { name: "T".into(), weight: 1, min_poly: m.clone(), degree: 0 }],
        )
        .unwrap();
        let t = AlgFn::var(ring.clone(), t_var);
        // reduce T^3 -> s0 T + s1
        let t3 = t.mul(&t).mul(&t);
        let expect = AlgFn::from_poly(
            ring.clone(),
            Poly::var(0).mul(&Poly::var(t_var)).add(&Poly::var(1)),
        );
        assert!(t3.eq(&expect));
        // m(T) reduces to zero; f*m too
        let f = Poly::var(0).add(&Poly::var(t_var).pow(2));
        assert!(AlgFn::from_poly(ring.clone(), f.mul(&m)).is_zero());
        // implicit derivative: d/ds1 of m(T(s); s) = 0 means
        // 3T^2 dT - s0 dT - T ds0... check dT/ds1 satisfies (3T^2 - s0) dT = 1
        let dt = t.deriv(1).unwrap();
        let lhs = AlgFn::from_poly(ring.clone(), Poly::var(t_var).pow(2).scale(&Rat::int(3)).sub(&Poly::var(0)));
        assert!(lhs.mul(&dt).eq(&AlgFn::one(ring.clone())));
        // homogeneity: T has weight 1: T^3 - s0 T - s1 needs weights (3, 2+1, 3) consistent
        assert_eq!(
            AlgFn::from_poly(ring.clone(), m).homogeneous_degree().unwrap(),
            None // reduces to zero
        );
    }

    #[test]
    fn mixed_partials_commute() {
        let t_var = 2;
        let m = Poly::var(t_var)
            .pow(3)
            .sub(&Poly::var(0).mul(&Poly::var(t_var)))
            .sub(&Poly::var(1));
        let ring = QuotientRing::new(
            vec![
                BaseVar { name: "s0".into(), weight: 2 },
                BaseVar { name: "s1".into(), weight: 3 },
            ],
            vec![AuxVar { name: "T".into(), weight: 1, min_poly: m, degree: 0 }],
        )
        .unwrap();
        let a = AlgFn::from_poly(
            ring.clone(),
            Poly::var(t_var).pow(2).mul(&Poly::var(0)).add(&Poly::var(1).mul(&Poly::var(t_var))),
        );
        let d01 = a.deriv(0).unwrap().deriv(1).unwrap();
        let d10 = a.deriv(1).unwrap().deriv(0).unwrap();
        assert!(d01.eq(&d10));
    }
}
