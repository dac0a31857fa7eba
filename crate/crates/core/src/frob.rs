//! Flat pencil verification, flat coordinates, reconstruction of the
//! potential, and the quasihomogeneity / associativity certificates.

use crate::dsred::ReducedLeading;
use crate::symcore::algfn::{AlgFn, QuotientRing};
use crate::symcore::linalg::RatMat;
use crate::symcore::poly::{Mono, Poly, Var};
use crate::symcore::rat::Rat;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum FrobError {
    #[error("flat-coordinate ansatz is inconsistent: {0}")]
    FlatAnsatz(String),
    #[error("pencil identity fails: {0}")]
    Pencil(String),
    #[error("potential reconstruction fails: {0}")]
    Potential(String),
    #[error("associativity residual ({0},{1},{2},{3}) is nonzero")]
    Wdvv(usize, usize, usize, usize),
    #[error("quasihomogeneity identity fails")]
    Euler,
    #[error(transparent)]
    Alg(#[from] crate::symcore::algfn::AlgError),
}

/// Flat-pencil data over the equilibrium locus in flat coordinates of the
/// frozen metric.
pub struct FlatPencil {
    pub ring: Arc<QuotientRing>,
    pub r: usize,
    /// exponents eta_1..eta_r
    pub eta: Vec<i64>,
    /// flat coordinates as polynomials in the original ones
    pub s_of_t: Vec<Poly>,
    pub t_of_s: Vec<Poly>,
    pub omega2: Vec<Vec<AlgFn>>,
    pub omega1: Vec<Vec<AlgFn>>,
    pub gamma2: Vec<Vec<Vec<AlgFn>>>,
    pub gamma1: Vec<Vec<Vec<AlgFn>>>,
}

impl FlatPencil {
    pub fn order(&self) -> i64 {
        self.eta[self.r - 1] + 1
    }

    /// charge d = (eta_r - 1)/(eta_r + 1)
    pub fn charge(&self) -> Rat {
        Rat::new(self.eta[self.r - 1] - 1, self.eta[self.r - 1] + 1)
    }

    /// degrees d_i = (eta_i + 1)/(eta_r + 1)
    pub fn degrees(&self) -> Vec<Rat> {
        self.eta.iter().map(|e| Rat::new(e + 1, self.order())).collect()
    }
}

/// quasihomogeneous monomials of the given weighted degree in the base
/// variables (optionally including auxiliaries), total degree >= 2
fn nonlinear_monomials(ring: &QuotientRing, degree: i64, with_aux: bool) -> Vec<Mono> {
    let nvars = ring.base.len() + if with_aux { ring.auxs.len() } else { 0 };
    let caps: Vec<u16> = (0..nvars)
        .map(|v| {
            if (v as usize) >= ring.base.len() {
                (ring.auxs[v - ring.base.len()].degree as u16).saturating_sub(1)
            } else {
                u16::MAX
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Mono, i64)> = vec![(0, Mono::one(), degree)];
    while let Some((v, m, rem)) = stack.pop() {
        if rem == 0 {
            if m.total_degree() >= 2 {
                out.push(m);
            }
            continue;
        }
        if v >= nvars {
            continue;
        }
        let w = ring.weight(v as Var);
        let maxe = if w > 0 { (rem / w).min(caps[v] as i64) } else { 0 };
        for e in 0..=maxe {
            stack.push((v + 1, m.mul(&Mono::var_pow(v as Var, e as u16)), rem - e * w));
        }
    }
    out.sort();
    out
}

/// Solve for quasihomogeneous polynomial flat coordinates s^i = t^i +
/// nonlinear, making the frozen metric equal (eta_r+1) times the
/// antidiagonal unit.
pub fn flat_coordinates(ld: &ReducedLeading, eta: &[i64]) -> Result<FlatPencil, FrobError> {
    let r = ld.r;
    let ring = ld.omega1[0][0].ring.clone();
    let order = eta[r - 1] + 1;

    // ansatz: s^i = t^i + sum c_m m over nonlinear monomials of weight eta_i+1
    let mut slots: Vec<Vec<Mono>> = Vec::with_capacity(r);
    let mut unknowns = 0usize;
    for i in 0..r {
        let mons = nonlinear_monomials(&ring, eta[i] + 1, false);
        unknowns += mons.len();
        slots.push(mons);
    }

    // target entries: omega1(s)^{uv} = order * delta_{u+v,r+1}
    // transformed entry: omega1^{uv} + sum_a d_a phi_u omega1^{av}
    //                    + sum_b d_b phi_v omega1^{ub} + quadratic terms;
    // we solve the linearized system and verify the full equations afterwards
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    // collect linear equations: for each (u,v), the residual must vanish
    let residual = |phis: &[Poly]| -> Result<Vec<Vec<AlgFn>>, FrobError> {
        let s: Vec<Poly> = (0..r)
            .map(|i| Poly::var(i as Var).add(&phis[i]))
            .collect();
        let mut out = vec![vec![AlgFn::zero(ring.clone()); r]; r];
        for u in 0..r {
            for v in 0..r {
                let mut acc = AlgFn::zero(ring.clone());
                for a in 0..r {
                    let da = s[u].deriv(a as Var);
                    if da.is_zero() {
                        continue;
                    }
                    let da = AlgFn::from_poly(ring.clone(), da);
                    for b in 0..r {
                        if ld.omega1[a][b].is_zero() {
                            continue;
                        }
                        let db = s[v].deriv(b as Var);
                        if db.is_zero() {
                            continue;
                        }
                        let db = AlgFn::from_poly(ring.clone(), db);
                        acc = acc.add(&da.mul(&db).mul(&ld.omega1[a][b]));
                    }
                }
                let want = if u + v == r - 1 { Rat::int(order) } else { Rat::ZERO };
                out[u][v] = acc.sub(&AlgFn::from_poly(ring.clone(), Poly::constant(want)));
            }
        }
        Ok(out)
    };
    let zero_phis: Vec<Poly> = vec![Poly::zero(); r];
    let base_res = residual(&zero_phis)?;
    // basis responses: unit coefficient on each candidate monomial
    let mut columns: Vec<Vec<Vec<AlgFn>>> = Vec::with_capacity(unknowns);
    for i in 0..r {
        for m in &slots[i] {
            let mut phis = zero_phis.clone();
            phis[i] = Poly::monomial(m.clone(), Rat::ONE);
            let res = residual(&phis)?;
            // linear response
            let mut col = vec![vec![AlgFn::zero(ring.clone()); r]; r];
            for u in 0..r {
                for v in 0..r {
                    col[u][v] = res[u][v].sub(&base_res[u][v]);
                }
            }
            columns.push(col);
        }
    }
    // flatten into scalar equations by matching monomials of the reduced
    // numerators (entries here are polynomial: omega entries carry no
    // denominators)
    let mut mono_index: std::collections::HashMap<(usize, usize, Mono), usize> = Default::default();
    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for u in 0..r {
        for v in u..r {
            let mut monos: std::collections::BTreeSet<Mono> = Default::default();
            for (m, _) in &base_res[u][v].num.terms {
                monos.insert(m.clone());
            }
            for col in &columns {
                for (m, _) in &col[u][v].num.terms {
                    monos.insert(m.clone());
                }
            }
            for m in monos {
                let row: Vec<Rat> = columns
                    .iter()
                    .map(|col| col[u][v].num.coeff_of(&m))
                    .collect();
                let b = -&base_res[u][v].num.coeff_of(&m);
                mono_index.insert((u, v, m), eqs.len());
                eqs.push((row, b));
            }
        }
    }
    let mat = RatMat::from_rows(eqs.iter().map(|(row, _)| row.clone()).collect());
    let bvec: Vec<Rat> = eqs.iter().map(|(_, b)| b.clone()).collect();
    let sol = mat
        .solve(&bvec)
        .ok_or_else(|| FrobError::FlatAnsatz("linearized system inconsistent".into()))?;

    let mut phis = zero_phis;
    let mut k = 0;
    for i in 0..r {
        for m in &slots[i] {
            if !sol[k].is_zero() {
                phis[i].add_assign(&Poly::monomial(m.clone(), sol[k].clone()));
            }
            k += 1;
        }
    }
    // verify the full (not just linearized) equations
    let final_res = residual(&phis)?;
    for u in 0..r {
        for v in 0..r {
            if !final_res[u][v].is_zero() {
                return Err(FrobError::FlatAnsatz(format!(
                    "entry ({},{}) residual nonzero after solve",
                    u + 1,
                    v + 1
                )));
            }
        }
    }

    let s_of_t: Vec<Poly> = (0..r)
        .map(|i| Poly::var(i as Var).add(&phis[i]))
        .collect();
    // inverse: t = s - phi(t): triangular by degree
    let t_of_s = invert_unitriangular(&s_of_t, eta);

    // transform the tensors
    let jac: Vec<Vec<AlgFn>> = (0..r)
        .map(|u| {
            (0..r)
                .map(|a| AlgFn::from_poly(ring.clone(), s_of_t[u].deriv(a as Var)))
                .collect()
        })
        .collect();
    let subst = |f: &AlgFn| -> AlgFn {
        f.substitute_base(&|v| {
            if (v as usize) < r {
                Some(t_of_s[v as usize].clone())
            } else {
                None
            }
        })
    };
    let mut omega2 = vec![vec![AlgFn::zero(ring.clone()); r]; r];
    let mut omega1 = vec![vec![AlgFn::zero(ring.clone()); r]; r];
    for u in 0..r {
        for v in 0..r {
            let mut acc2 = AlgFn::zero(ring.clone());
            let mut acc1 = AlgFn::zero(ring.clone());
            for a in 0..r {
                if jac[u][a].is_zero() {
                    continue;
                }
                for b in 0..r {
                    if jac[v][b].is_zero() {
                        continue;
                    }
                    let j = jac[u][a].mul(&jac[v][b]);
                    if !ld.omega2[a][b].is_zero() {
                        acc2 = acc2.add(&j.mul(&ld.omega2[a][b]));
                    }
                    if !ld.omega1[a][b].is_zero() {
                        acc1 = acc1.add(&j.mul(&ld.omega1[a][b]));
                    }
                }
            }
            omega2[u][v] = subst(&acc2);
            omega1[u][v] = subst(&acc1);
        }
    }
    // Christoffel transformation:
    // Gamma^{uv}_k(s) = [ d_a s^u (d_c d_b s^v Omega^{ab} + d_b s^v Gamma^{ab}_c) ] dt^c/ds^k
    let tjac: Vec<Vec<AlgFn>> = (0..r)
        .map(|c| {
            (0..r)
                .map(|k| {
                    AlgFn::from_poly(ring.clone(), t_of_s[c].deriv(k as Var)).substitute_base(
                        &|v| {
                            if (v as usize) < r {
                                Some(s_of_t[v as usize].clone())
                            } else {
                                None
                            }
                        },
                    )
                })
                .collect()
        })
        .collect();
    // note: dt^c/ds^k as a function of t (computed by substituting s(t))
    let mut gamma2 = vec![vec![vec![AlgFn::zero(ring.clone()); r]; r]; r];
    let mut gamma1 = vec![vec![vec![AlgFn::zero(ring.clone()); r]; r]; r];
    for u in 0..r {
        for v in 0..r {
            for c in 0..r {
                let mut acc2 = AlgFn::zero(ring.clone());
                let mut acc1 = AlgFn::zero(ring.clone());
                for a in 0..r {
                    if jac[u][a].is_zero() {
                        continue;
                    }
                    for b in 0..r {
                        let hess = AlgFn::from_poly(
                            ring.clone(),
                            s_of_t[v].deriv(b as Var).deriv(c as Var),
                        );
                        if !hess.is_zero() && !ld.omega2[a][b].is_zero() {
                            acc2 = acc2.add(&jac[u][a].mul(&hess).mul(&ld.omega2[a][b]));
                        }
                        if !hess.is_zero() && !ld.omega1[a][b].is_zero() {
                            acc1 = acc1.add(&jac[u][a].mul(&hess).mul(&ld.omega1[a][b]));
                        }
                        let db = &jac[v][b];
                        if db.is_zero() {
                            continue;
                        }
                        if !ld.gamma2[a][b][c].is_zero() {
                            acc2 = acc2.add(&jac[u][a].mul(db).mul(&ld.gamma2[a][b][c]));
                        }
                        if !ld.gamma1[a][b][c].is_zero() {
                            acc1 = acc1.add(&jac[u][a].mul(db).mul(&ld.gamma1[a][b][c]));
                        }
                    }
                }
                // contract with dt^c/ds^k and substitute t(s)... the factor
                // dt^c/ds^k is already in t; combine then substitute
                for k in 0..r {
                    if tjac[c][k].is_zero() {
                        continue;
                    }
                    let add2 = acc2.mul(&tjac[c][k]);
                    let add1 = acc1.mul(&tjac[c][k]);
                    gamma2[u][v][k] = gamma2[u][v][k].add(&add2);
                    gamma1[u][v][k] = gamma1[u][v][k].add(&add1);
                }
            }
        }
    }
    for u in 0..r {
        for v in 0..r {
            for k in 0..r {
                gamma2[u][v][k] = subst(&gamma2[u][v][k]);
                gamma1[u][v][k] = subst(&gamma1[u][v][k]);
                if !gamma1[u][v][k].is_zero() {
                    return Err(FrobError::FlatAnsatz(format!(
                        "frozen Christoffel ({},{},{}) nonzero in the flat chart",
                        u + 1,
                        v + 1,
                        k + 1
                    )));
                }
            }
        }
    }
    Ok(FlatPencil {
        ring,
        r,
        eta: eta.to_vec(),
        s_of_t,
        t_of_s,
        omega2,
        omega1,
        gamma2,
        gamma1,
    })
}

fn invert_unitriangular(s_of_t: &[Poly], eta: &[i64]) -> Vec<Poly> {
    let r = s_of_t.len();
    let nonlinear: Vec<Poly> = s_of_t
        .iter()
        .enumerate()
        .map(|(i, s)| s.sub(&Poly::var(i as Var)))
        .collect();
    let mut t: Vec<Poly> = (0..r).map(|i| Poly::var(i as Var)).collect();
    let maxw = eta.iter().max().copied().unwrap_or(0) + 1;
    for _ in 0..=maxw {
        let mut next = Vec::with_capacity(r);
        for i in 0..r {
            let sub = nonlinear[i].substitute(&|v| {
                if (v as usize) < r {
                    Some(t[v as usize].clone())
                } else {
                    None
                }
            });
            next.push(Poly::var(i as Var).sub(&sub));
        }
        if next == t {
            break;
        }
        t = next;
    }
    t
}

/// Certificate for the flat-pencil axioms, checked identically in a formal
/// pencil parameter.
pub fn pencil_verify(fp: &FlatPencil) -> Result<(), FrobError> {
    let r = fp.r;
    let ring = &fp.ring;
    let pairs: [(&Vec<Vec<AlgFn>>, &Vec<Vec<Vec<AlgFn>>>, &str); 2] = [
        (&fp.omega2, &fp.gamma2, "transverse"),
        (&fp.omega1, &fp.gamma1, "frozen"),
    ];
    // symmetry and metric compatibility for both components
    for (om, gam, name) in pairs {
        for i in 0..r {
            for j in 0..r {
                if !om[i][j].eq(&om[j][i]) {
                    return Err(FrobError::Pencil(format!("{} metric not symmetric", name)));
                }
                for k in 0..r {
                    let lhs = om[i][j].deriv(k as Var)?;
                    let rhs = gam[i][j][k].add(&gam[j][i][k]);
                    if !lhs.eq(&rhs) {
                        return Err(FrobError::Pencil(format!(
                            "{} metric compatibility fails at ({},{},{})",
                            name, i, j, k
                        )));
                    }
                }
            }
        }
    }
    // torsion-free in contravariant form, linear in the pencil parameter:
    // (om2 + l om1)^{is} (g2 + l g1)^{jk}_s symmetric in i <-> j, per power of l
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for part in 0..=2 {
                    let mut acc = AlgFn::zero(ring.clone());
                    for s in 0..r {
                        let combos: &[(&AlgFn, &AlgFn)] = match part {
                            0 => &[(&fp.omega2[i][s], &fp.gamma2[j][k][s])],
                            1 => &[
                                (&fp.omega2[i][s], &fp.gamma1[j][k][s]),
                                (&fp.omega1[i][s], &fp.gamma2[j][k][s]),
                            ],
                            _ => &[(&fp.omega1[i][s], &fp.gamma1[j][k][s])],
                        };
                        for (a, b) in combos {
                            acc = acc.add(&a.mul(b));
                        }
                        let combos_t: &[(&AlgFn, &AlgFn)] = match part {
                            0 => &[(&fp.omega2[j][s], &fp.gamma2[i][k][s])],
                            1 => &[
                                (&fp.omega2[j][s], &fp.gamma1[i][k][s]),
                                (&fp.omega1[j][s], &fp.gamma2[i][k][s]),
                            ],
                            _ => &[(&fp.omega1[j][s], &fp.gamma1[i][k][s])],
                        };
                        for (a, b) in combos_t {
                            acc = acc.sub(&a.mul(b));
                        }
                    }
                    if !acc.is_zero() {
                        return Err(FrobError::Pencil(format!(
                            "torsion symmetry fails at ({},{},{}) lambda^{}",
                            i, j, k, part
                        )));
                    }
                }
            }
        }
    }
    // curvature in contravariant form, per power of the parameter:
    // R^{ijk}_l = om^{is}(d_s g^{jk}_l - d_l g^{jk}_s) + g^{ij}_s g^{sk}_l - g^{ik}_s g^{sj}_l
    let curv = |om: &Vec<Vec<AlgFn>>,
                ga: &Vec<Vec<Vec<AlgFn>>>,
                gb_for_quad: &Vec<Vec<Vec<AlgFn>>>|
     -> Result<Vec<Vec<Vec<Vec<AlgFn>>>>, FrobError> {
        // mixed pieces handled by calling twice with (ga, gb) swapped
        let mut out =
            vec![vec![vec![vec![AlgFn::zero(ring.clone()); r]; r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let mut acc = AlgFn::zero(ring.clone());
                        for s in 0..r {
                            if !om[i][s].is_zero() {
                                let d1 = ga[j][k][l].deriv(s as Var)?;
                                let d2 = ga[j][k][s].deriv(l as Var)?;
                                acc = acc.add(&om[i][s].mul(&d1.sub(&d2)));
                            }
                            acc = acc.add(&ga[i][j][s].mul(&gb_for_quad[s][k][l]));
                            acc = acc.sub(&ga[i][k][s].mul(&gb_for_quad[s][j][l]));
                        }
                        out[i][j][k][l] = acc;
                    }
                }
            }
        }
        Ok(out)
    };
    // lambda^0: R(om2, g2, g2); lambda^2: R(om1, g1, g1);
    // lambda^1: om1-part with g2 derivatives + om2-part with g1 derivatives
    //           + bilinear cross terms
    let r22 = curv(&fp.omega2, &fp.gamma2, &fp.gamma2)?;
    let r11 = curv(&fp.omega1, &fp.gamma1, &fp.gamma1)?;
    for (tag, rr) in [("l^0", &r22), ("l^2", &r11)] {
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        if !rr[i][j][k][l].is_zero() {
                            return Err(FrobError::Pencil(format!(
                                "curvature {} fails at ({},{},{},{})",
                                tag, i, j, k, l
                            )));
                        }
                    }
                }
            }
        }
    }
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let mut acc = AlgFn::zero(ring.clone());
                    for s in 0..r {
                        if !fp.omega1[i][s].is_zero() {
                            let d1 = fp.gamma2[j][k][l].deriv(s as Var)?;
                            let d2 = fp.gamma2[j][k][s].deriv(l as Var)?;
                            acc = acc.add(&fp.omega1[i][s].mul(&d1.sub(&d2)));
                        }
                        if !fp.omega2[i][s].is_zero() {
                            let d1 = fp.gamma1[j][k][l].deriv(s as Var)?;
                            let d2 = fp.gamma1[j][k][s].deriv(l as Var)?;
                            acc = acc.add(&fp.omega2[i][s].mul(&d1.sub(&d2)));
                        }
                        acc = acc.add(&fp.gamma1[i][j][s].mul(&fp.gamma2[s][k][l]));
                        acc = acc.add(&fp.gamma2[i][j][s].mul(&fp.gamma1[s][k][l]));
                        acc = acc.sub(&fp.gamma1[i][k][s].mul(&fp.gamma2[s][j][l]));
                        acc = acc.sub(&fp.gamma2[i][k][s].mul(&fp.gamma1[s][j][l]));
                    }
                    if !acc.is_zero() {
                        return Err(FrobError::Pencil(format!(
                            "curvature l^1 fails at ({},{},{},{})",
                            i, j, k, l
                        )));
                    }
                }
            }
        }
    }
    // quasihomogeneity of the entries
    let order = fp.order();
    for i in 0..r {
        for j in 0..r {
            if let Ok(Some(d)) = fp.omega2[i][j].homogeneous_degree() {
                if d != fp.eta[i] + fp.eta[j] {
                    return Err(FrobError::Pencil(format!(
                        "omega2[{}][{}] degree {} (expected {})",
                        i,
                        j,
                        d,
                        fp.eta[i] + fp.eta[j]
                    )));
                }
            }
            for k in 0..r {
                if let Ok(Some(d)) = fp.gamma2[i][j][k].homogeneous_degree() {
                    if d != fp.eta[i] + fp.eta[j] - (fp.eta[k] + 1) {
                        return Err(FrobError::Pencil(format!(
                            "gamma2[{}][{}][{}] degree {}",
                            i, j, k, d
                        )));
                    }
                }
            }
        }
    }
    // frozen metric is the exact antidiagonal form
    for i in 0..r {
        for j in 0..r {
            let want = if i + j == r - 1 {
                AlgFn::from_poly(ring.clone(), Poly::int(order))
            } else {
                AlgFn::zero(ring.clone())
            };
            if !fp.omega1[i][j].eq(&want) {
                return Err(FrobError::Pencil("frozen metric not antidiagonal".into()));
            }
        }
    }
    // unit row of the transverse metric: omega2^{1v} = (eta_v+1) s^v,
    // gamma2^{1v}_k = eta_v delta^v_k
    for v in 0..r {
        let want = AlgFn::from_poly(
            ring.clone(),
            Poly::var(v as Var).scale(&Rat::int(fp.eta[v] + 1)),
        );
        if !fp.omega2[0][v].eq(&want) {
            return Err(FrobError::Pencil(format!("unit row omega fails at {}", v)));
        }
        for k in 0..r {
            let want = if k == v {
                AlgFn::from_poly(ring.clone(), Poly::constant(Rat::int(fp.eta[v])))
            } else {
                AlgFn::zero(ring.clone())
            };
            if !fp.gamma2[0][v][k].eq(&want) {
                return Err(FrobError::Pencil(format!(
                    "unit row Christoffel fails at ({},{})",
                    v, k
                )));
            }
        }
    }
    Ok(())
}

/// The reconstructed potential with its structure data.
pub struct FrobeniusPotential {
    pub ring: Arc<QuotientRing>,
    pub r: usize,
    pub eta: Vec<i64>,
    pub potential: AlgFn,
    /// second derivatives (Hessian of the potential)
    pub hessian: Vec<Vec<AlgFn>>,
    pub charge: Rat,
    pub degrees: Vec<Rat>,
}

/// Integrate the potential from the transverse metric by Euler-operator
/// division.
pub fn potential_reconstruct(fp: &FlatPencil) -> Result<FrobeniusPotential, FrobError> {
    let r = fp.r;
    let ring = &fp.ring;
    let order = fp.order();
    let d = fp.charge();
    let degs = fp.degrees();
    // eta-matrix is the antidiagonal unit: eta_{ij} = delta_{i+j,r+1};
    // H_{ab} = omega2hat^{(r-1-a)(r-1-b)} / (d - 1 + d_i + d_j)
    let mut hessian = vec![vec![AlgFn::zero(ring.clone()); r]; r];
    for a in 0..r {
        for b in 0..r {
            let i = r - 1 - a;
            let j = r - 1 - b;
            let denom = &(&d - &Rat::ONE) + &(&degs[i] + &degs[j]);
            if denom.is_zero() {
                return Err(FrobError::Potential("resonant degree pair".into()));
            }
            let scale = &Rat::new(1, order) / &denom;
            hessian[a][b] = fp.omega2[i][j].scale(&scale);
        }
    }
    // symmetry of the Hessian
    for a in 0..r {
        for b in 0..r {
            if !hessian[a][b].eq(&hessian[b][a]) {
                return Err(FrobError::Potential("Hessian not symmetric".into()));
            }
        }
    }
    // closedness: d_c H_{ab} fully symmetric under (c, a)
    for a in 0..r {
        for b in 0..r {
            for c in a + 1..r {
                let lhs = hessian[a][b].deriv(c as Var)?;
                let rhs = hessian[c][b].deriv(a as Var)?;
                if !lhs.eq(&rhs) {
                    return Err(FrobError::Potential(format!(
                        "mixed-partial mismatch at ({},{},{})",
                        a, b, c
                    )));
                }
            }
        }
    }
    // Euler integration: each monomial of weighted degree D (in the graded
    // ring) integrates by dividing by D/order - adjusting: here we integrate
    // twice: G_b = sum_a d_a s^a H_{ab} / (3 - d - d_b), F = sum_b d_b s^b G_b / (3-d)
    let euler_mul = |f: &AlgFn| -> AlgFn {
        // sum_a d_a s^a f ... as multiplication then use grading: for
        // quasihomogeneous f of normalized degree D, sum d_a s^a d_a(F)=D F;
        // here we need the product form directly
        let mut acc = AlgFn::zero(ring.clone());
        for a in 0..r {
            let sa = AlgFn::var(ring.clone(), a as Var);
            acc = acc.add(&sa.mul(f).scale(&degs[a]));
        }
        acc
    };
    let _ = &euler_mul;
    let three_minus_d = &Rat::int(3) - &d;
    let mut grad = Vec::with_capacity(r);
    for b in 0..r {
        let denom = &three_minus_d - &degs[b];
        let mut acc = AlgFn::zero(ring.clone());
        for a in 0..r {
            let sa = AlgFn::var(ring.clone(), a as Var);
            acc = acc.add(&sa.mul(&hessian[a][b]).scale(&degs[a]));
        }
        grad.push(acc.scale(&denom.inv()));
    }
    let mut potential = AlgFn::zero(ring.clone());
    for (b, g) in grad.iter().enumerate() {
        let sb = AlgFn::var(ring.clone(), b as Var);
        potential = potential.add(&sb.mul(g).scale(&degs[b]));
    }
    potential = potential.scale(&three_minus_d.inv());
    // verify gradient and Hessian
    for b in 0..r {
        let db = potential.deriv(b as Var)?;
        if !db.eq(&grad[b]) {
            return Err(FrobError::Potential(format!("gradient mismatch at {}", b)));
        }
        for a in 0..r {
            let dab = grad[b].deriv(a as Var)?;
            if !dab.eq(&hessian[a][b]) {
                return Err(FrobError::Potential(format!(
                    "Hessian mismatch at ({},{})",
                    a, b
                )));
            }
        }
    }
    // unit-direction normalization: d_r d_i d_j F = delta_{i+j,r+1}
    for i in 0..r {
        for j in 0..r {
            let v = hessian[i][j].deriv((r - 1) as Var)?;
            let want = if i + j == r - 1 {
                AlgFn::from_poly(ring.clone(), Poly::one())
            } else {
                AlgFn::zero(ring.clone())
            };
            if !v.eq(&want) {
                return Err(FrobError::Potential(format!(
                    "unit pairing fails at ({},{})",
                    i, j
                )));
            }
        }
    }
    Ok(FrobeniusPotential {
        ring: ring.clone(),
        r,
        eta: fp.eta.clone(),
        potential,
        hessian,
        charge: d,
        degrees: degs,
    })
}

impl FrobeniusPotential {
    /// Euler identity: sum d_i s^i d_i F = (3 - d) F.
    pub fn euler_check(&self) -> Result<(), FrobError> {
        let mut acc = AlgFn::zero(self.ring.clone());
        for i in 0..self.r {
            let si = AlgFn::var(self.ring.clone(), i as Var);
            acc = acc.add(&si.mul(&self.potential.deriv(i as Var)?).scale(&self.degrees[i]));
        }
        let want = self.potential.scale(&(&Rat::int(3) - &self.charge));
        if acc.eq(&want) {
            Ok(())
        } else {
            Err(FrobError::Euler)
        }
    }

    /// All associativity residuals reduce to zero.
    pub fn wdvv_check(&self) -> Result<(), FrobError> {
        let r = self.r;
        // third derivatives
        let mut third = vec![vec![vec![AlgFn::zero(self.ring.clone()); r]; r]; r];
        for i in 0..r {
            for j in i..r {
                for k in 0..r {
                    let v = self.hessian[i][j].deriv(k as Var)?;
                    third[i][j][k] = v.clone();
                    third[j][i][k] = v;
                }
            }
        }
        // eta^{kp} = delta_{k+p, r+1}
        for i in 0..r {
            for j in 0..r {
                for q in 0..r {
                    for s in i + 1..r {
                        let mut acc = AlgFn::zero(self.ring.clone());
                        for k in 0..r {
                            let p = r - 1 - k;
                            acc = acc.add(&third[i][j][k].mul(&third[p][q][s]));
                            acc = acc.sub(&third[s][j][k].mul(&third[p][q][i]));
                        }
                        if !acc.is_zero() {
                            return Err(FrobError::Wdvv(i, j, q, s));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
