//! sl2 triples, Dynkin gradings, module decompositions with the dual basis,
//! the opposite Cartan subalgebra with its normalized basis, and the orbit
//! catalog.

pub mod catalog;
pub mod charts;

use crate::liealg::{elt_add, elt_is_zero, elt_scale, Elt, MatrixLieAlgebra, SpMat};
use crate::symcore::linalg::RatMat;
use crate::symcore::rat::{factorial, Rat};
use catalog::OrbitDescriptor;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum NilError {
    #[error("sl2 relations fail: {0}")]
    BadTriple(String),
    #[error("no sl2 completion found: {0}")]
    NoCompletion(String),
    #[error("grading failure: {0}")]
    Grading(String),
    #[error("cyclic element is not regular semisimple ({0})")]
    NotRegularSemisimple(String),
    #[error("dual basis solve is singular")]
    DualSingular,
    #[error("normalization failure: {0}")]
    Normalization(String),
    #[error("weights disagree with the catalog: {0}")]
    CatalogMismatch(String),
    #[error(transparent)]
    Lie(#[from] crate::liealg::LieError),
}

/// ad_h eigenspace decomposition with projection data.
pub struct Grading {
    pub degrees: Vec<i64>,
    pub pieces: BTreeMap<i64, Vec<Elt>>,
    /// columns of all graded basis vectors, and the inverse
    cols: Vec<(i64, Elt)>,
    inv: RatMat,
}

impl Grading {
    pub fn new(alg: &MatrixLieAlgebra, h: &Elt) -> Result<Grading, NilError> {
        let ad = alg.ad(h);
        let mut pieces: BTreeMap<i64, Vec<Elt>> = BTreeMap::new();
        let mut total = 0;
        // distinguished orbits have integer ad_h spectrum; scan a safe window
        let bound = 2 * alg.dim as i64;
        for d in -bound..=bound {
            let mut m = ad.clone();
            for i in 0..alg.dim {
                *m.at_mut(i, i) = m.at(i, i) - &Rat::int(d);
            }
            let ker = m.kernel();
            if !ker.is_empty() {
                total += ker.len();
                pieces.insert(d, ker);
            }
            if total == alg.dim {
                break;
            }
        }
        if total != alg.dim {
            return Err(NilError::Grading(format!(
                "integer eigenspaces span {} of {}",
                total, alg.dim
            )));
        }
        let mut cols = Vec::with_capacity(alg.dim);
        for (d, basis) in &pieces {
            for b in basis {
                cols.push((*d, b.clone()));
            }
        }
        let mut mat = RatMat::zeros(alg.dim, alg.dim);
        for (j, (_, c)) in cols.iter().enumerate() {
            for i in 0..alg.dim {
                *mat.at_mut(i, j) = c[i].clone();
            }
        }
        let inv = mat.inverse().ok_or_else(|| NilError::Grading("projection".into()))?;
        Ok(Grading {
            degrees: pieces.keys().copied().collect(),
            pieces,
            cols,
            inv,
        })
    }

    pub fn dim_of(&self, d: i64) -> usize {
        self.pieces.get(&d).map_or(0, |v| v.len())
    }

    /// Graded components of an element, as (degree, component) pairs.
    pub fn decompose(&self, x: &Elt) -> Vec<(i64, Elt)> {
        let coords = self.inv.mul_vec(x);
        let mut parts: BTreeMap<i64, Elt> = BTreeMap::new();
        let n = x.len();
        for (j, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (d, col) = &self.cols[j];
            let p = parts.entry(*d).or_insert_with(|| vec![Rat::ZERO; n]);
            for i in 0..n {
                p[i] += &(&col[i] * c);
            }
        }
        parts.into_iter().filter(|(_, p)| !elt_is_zero(p)).collect()
    }

    pub fn component(&self, x: &Elt, d: i64) -> Elt {
        self.decompose(x)
            .into_iter()
            .find_map(|(deg, p)| (deg == d).then_some(p))
            .unwrap_or_else(|| vec![Rat::ZERO; self.inv.rows])
    }
}

/// Opposite Cartan subalgebra data: the normalized commuting family
/// Y_i = L_i + K_i with <Y_i|Y_j> = (eta_r+1) delta_{i+j,r+1}.
pub struct OppositeCartan {
    pub k1: Elt,
    pub y: Vec<Elt>,
    pub l_parts: Vec<Elt>,
    pub k_parts: Vec<Elt>,
}

/// sl2 triple with all derived structure for one nilpotent orbit.
pub struct Sl2Data {
    pub alg: Arc<MatrixLieAlgebra>,
    pub orbit: OrbitDescriptor,
    pub kappa: Rat,
    pub l1: Elt,
    pub h: Elt,
    pub f: Elt,
    pub r: usize,
    pub n: usize,
    /// weights eta_1..eta_n in chart order (first r are the exponents)
    pub eta: Vec<i64>,
    /// highest-weight vectors L_1..L_n
    pub hw: Vec<Elt>,
    /// dual basis gamma_1..gamma_n of g^f: <gamma_i|L_j> = delta_ij
    pub gamma: Vec<Elt>,
    /// theta[i][cap_i] = <ad_f^I L_i | (1/I!) ad_{L1}^I gamma_i>
    pub theta: Vec<Vec<Rat>>,
    pub grading: Grading,
    pub oc: OppositeCartan,
}

/// Optional explicit chart: a pinned basis choice reproducing a published
/// coordinate system bit-exactly.
pub struct ExplicitChart {
    pub k1: Elt,
    /// all n highest-weight vectors in chart order (L_1 must equal l1)
    pub hw: Vec<Elt>,
}

impl Sl2Data {
    /// Validate the triple, normalize the form, build gradings, the opposite
    /// Cartan subalgebra, the module decomposition and the dual basis.
    pub fn build(
        mut alg: MatrixLieAlgebra,
        orbit: OrbitDescriptor,
        l1: Elt,
        h: Elt,
        f: Elt,
        chart: Option<ExplicitChart>,
    ) -> Result<Sl2Data, NilError> {
        let check = |name: &str, got: &Elt, want: &Elt| -> Result<(), NilError> {
            if elt_add(got, &elt_scale(want, &-Rat::ONE))
                .iter()
                .all(|c| c.is_zero())
            {
                Ok(())
            } else {
                Err(NilError::BadTriple(name.to_string()))
            }
        };
        check("[h,L1]=L1", &alg.bracket(&h, &l1), &l1)?;
        check("[h,f]=-f", &alg.bracket(&h, &f), &elt_scale(&f, &-Rat::ONE))?;
        check("[L1,f]=2h", &alg.bracket(&l1, &f), &elt_scale(&h, &Rat::int(2)))?;

        let kappa = alg.normalize_form(&l1, &f)?;
        let alg = Arc::new(alg);
        let grading = Grading::new(&alg, &h)?;
        if grading.dim_of(0) != grading.dim_of(1) {
            return Err(NilError::Grading(format!(
                "dim g_0 = {} != dim g_1 = {}: orbit not distinguished",
                grading.dim_of(0),
                grading.dim_of(1)
            )));
        }
        let eta_max = *grading.degrees.last().unwrap();
        if eta_max != orbit.eta_max() {
            return Err(NilError::CatalogMismatch(format!(
                "max ad_h eigenvalue {} vs catalog {}",
                eta_max,
                orbit.eta_max()
            )));
        }

        let r = orbit.r();
        let n = orbit.n();

        // The centralizer of L1 graded by weight: highest-weight spaces.
        let hw_space = hw_spaces(&alg, &grading, &l1);
        let total: usize = hw_space.values().map(|v| v.len()).sum();
        if total != n {
            return Err(NilError::CatalogMismatch(format!(
                "dim g^L1 = {} but catalog says n = {}",
                total, n
            )));
        }
        {
            let mut weights: Vec<i64> = Vec::new();
            for (d, v) in &hw_space {
                weights.extend(std::iter::repeat(*d).take(v.len()));
            }
            weights.sort_unstable();
            let mut want = orbit.all_weights();
            want.sort_unstable();
            if weights != want {
                return Err(NilError::CatalogMismatch(format!(
                    "ad_h spectrum on g^L1 {:?} vs catalog {:?}",
                    weights, want
                )));
            }
        }

        // Opposite Cartan: supplied L-parts (chart) or computed normalization.
        let (oc, hw, eta) = match chart {
            Some(chart) => {
                let oc = opposite_cartan_with_l_parts(
                    &alg,
                    &grading,
                    &orbit,
                    &l1,
                    &chart.k1,
                    &chart.hw[..r],
                )?;
                let mut eta = Vec::with_capacity(n);
                for (i, v) in chart.hw.iter().enumerate() {
                    let d = hw_weight(&alg, &grading, &l1, &h, v).ok_or_else(|| {
                        NilError::BadTriple(format!("chart vector {} is not a highest-weight vector", i))
                    })?;
                    eta.push(d);
                }
                (oc, chart.hw, eta)
            }
            None => {
                let k1 = find_k1(&alg, &grading, &l1, eta_max)?;
                let oc = opposite_cartan(&alg, &grading, &orbit, &l1, &k1)?;
                // extend the r opposite-Cartan L-parts to all n highest-weight
                // vectors, ordered by the catalog weight list
                let mut hw = oc.l_parts.clone();
                let mut eta: Vec<i64> = orbit.eta.clone();
                let mut used: BTreeMap<i64, Vec<Elt>> = BTreeMap::new();
                for (i, v) in hw.iter().enumerate() {
                    used.entry(eta[i]).or_default().push(v.clone());
                }
                for &d in &orbit.extra {
                    let space = hw_space.get(&d).ok_or_else(|| {
                        NilError::CatalogMismatch(format!("no highest-weight space of weight {}", d))
                    })?;
                    let taken = used.entry(d).or_default();
                    let next = extend_independent(space, taken).ok_or_else(|| {
                        NilError::CatalogMismatch(format!("weight-{} multiplicity exhausted", d))
                    })?;
                    taken.push(next.clone());
                    hw.push(next);
                    eta.push(d);
                }
                (oc, hw, eta)
            }
        };

        // Dual basis gamma_i in g^f.
        let gf = alg.centralizer(&f);
        if gf.len() != n {
            return Err(NilError::CatalogMismatch(format!(
                "dim g^f = {} != n = {}",
                gf.len(),
                n
            )));
        }
        let mut gram = RatMat::zeros(n, n);
        for (a, basis_vec) in gf.iter().enumerate() {
            for j in 0..n {
                *gram.at_mut(a, j) = alg.pair(basis_vec, &hw[j]);
            }
        }
        let gram_inv = gram.inverse().ok_or(NilError::DualSingular)?;
        let mut gamma = Vec::with_capacity(n);
        for j in 0..n {
            let mut g = alg.zero_elt();
            for (a, basis_vec) in gf.iter().enumerate() {
                let c = gram_inv.at(j, a);
                if !c.is_zero() {
                    g = elt_add(&g, &elt_scale(basis_vec, c));
                }
            }
            gamma.push(g);
        }
        for (i, g) in gamma.iter().enumerate() {
            let hg = alg.bracket(&h, g);
            if !elt_is_zero(&elt_add(&hg, &elt_scale(g, &Rat::int(eta[i])))) {
                return Err(NilError::BadTriple(format!(
                    "gamma_{} is not an ad_h eigenvector of weight {}",
                    i + 1,
                    -eta[i]
                )));
            }
        }

        // pairing constants theta[i][I] = <ad_f^I L_i | (1/I!) ad_{L1}^I gamma_i>
        let mut theta = Vec::with_capacity(n);
        for i in 0..n {
            let cap = eta[i] as usize;
            let mut row = Vec::with_capacity(cap + 1);
            let mut up = gamma[i].clone();
            let mut down = hw[i].clone();
            for step in 0..=cap {
                if step > 0 {
                    up = alg.bracket(&l1, &up);
                    down = alg.bracket(&f, &down);
                }
                let fact = factorial(step as u32);
                row.push(&alg.pair(&down, &up) / &fact);
            }
            theta.push(row);
        }

        Ok(Sl2Data {
            alg,
            orbit,
            kappa,
            l1,
            h,
            f,
            r,
            n,
            eta,
            hw,
            gamma,
            theta,
            grading,
            oc,
        })
    }

    pub fn pair(&self, x: &Elt, y: &Elt) -> Rat {
        self.alg.pair(x, y)
    }

    /// iterated ad: ad_x^k(y)
    pub fn ad_pow(&self, x: &Elt, y: &Elt, k: u32) -> Elt {
        let mut out = y.clone();
        for _ in 0..k {
            out = self.alg.bracket(x, &out);
        }
        out
    }

    /// basis element (1/I!) ad_{L1}^I gamma_i of the lower Borel
    pub fn gamma_ladder(&self, i: usize, cap_i: u32) -> Elt {
        elt_scale(
            &self.ad_pow(&self.l1, &self.gamma[i], cap_i),
            &factorial(cap_i).inv(),
        )
    }

    /// basis element ad_f^J L_j of the upper Borel
    pub fn hw_ladder(&self, j: usize, cap_j: u32) -> Elt {
        self.ad_pow(&self.f, &self.hw[j], cap_j)
    }
}

/// highest-weight spaces: g^{L1} intersected with each graded piece
fn hw_spaces(
    alg: &MatrixLieAlgebra,
    grading: &Grading,
    l1: &Elt,
) -> BTreeMap<i64, Vec<Elt>> {
    let ad = alg.ad(l1);
    let mut out = BTreeMap::new();
    for (&d, basis) in &grading.pieces {
        if d < 0 {
            // distinguished nilpotents have no nonpositive-weight hw vectors;
            // skip early for speed, checked against the catalog later
            continue;
        }
        let mut m = RatMat::zeros(alg.dim, basis.len());
        for (j, b) in basis.iter().enumerate() {
            let img = ad.mul_vec(b);
            for i in 0..alg.dim {
                *m.at_mut(i, j) = img[i].clone();
            }
        }
        let ker = m.kernel();
        if ker.is_empty() {
            continue;
        }
        let vecs: Vec<Elt> = ker
            .iter()
            .map(|coef| {
                let mut v = alg.zero_elt();
                for (j, c) in coef.iter().enumerate() {
                    if !c.is_zero() {
                        v = elt_add(&v, &elt_scale(&basis[j], c));
                    }
                }
                v
            })
            .collect();
        out.insert(d, vecs);
    }
    out
}

/// weight of a claimed highest-weight vector; None if it is not one
fn hw_weight(
    alg: &MatrixLieAlgebra,
    _grading: &Grading,
    l1: &Elt,
    h: &Elt,
    v: &Elt,
) -> Option<i64> {
    if !elt_is_zero(&alg.bracket(l1, v)) {
        return None;
    }
    let hv = alg.bracket(h, v);
    let k = (0..v.len()).find(|&k| !v[k].is_zero())?;
    let lam = &hv[k] / &v[k];
    let check = elt_add(&hv, &elt_scale(v, &-&lam));
    (elt_is_zero(&check) && lam.is_integer()).then(|| lam.to_i64().unwrap())
}

/// extend `taken` by a vector from `space` keeping independence; pick the
/// first basis vector that works (deterministic)
fn extend_independent(space: &[Elt], taken: &[Elt]) -> Option<Elt> {
    let dim = space.first()?.len();
    for cand in space {
        let mut m = RatMat::zeros(dim, taken.len() + 1);
        for (j, t) in taken.iter().enumerate() {
            for i in 0..dim {
                *m.at_mut(i, j) = t[i].clone();
            }
        }
        for i in 0..dim {
            *m.at_mut(i, taken.len()) = cand[i].clone();
        }
        if m.rank() == taken.len() + 1 {
            return Some(cand.clone());
        }
    }
    None
}

/// minimal polynomial of the representation matrix (for the squarefree test)
fn minimal_polynomial(alg: &MatrixLieAlgebra, x: &Elt) -> Vec<Rat> {
    let m = alg.matrix_of(x);
    let n2 = alg.rep_dim * alg.rep_dim;
    let flatten = |s: &SpMat| {
        let mut v = vec![Rat::ZERO; n2];
        for (i, j, c) in &s.entries {
            v[*i as usize * alg.rep_dim + *j as usize] = c.clone();
        }
        v
    };
    // Krylov sequence I, M, M^2, ... until dependence
    let mut powers: Vec<SpMat> = vec![{
        let mut e = Vec::new();
        for i in 0..alg.rep_dim {
            e.push((i as u16, i as u16, Rat::ONE));
        }
        SpMat::from_entries(alg.rep_dim, e)
    }];
    loop {
        let k = powers.len();
        let mut mat = RatMat::zeros(n2, k);
        for (j, p) in powers.iter().enumerate() {
            let fl = flatten(p);
            for i in 0..n2 {
                *mat.at_mut(i, j) = fl[i].clone();
            }
        }
        let next = powers.last().unwrap().mul(&m);
        let b = flatten(&next);
        if let Some(coef) = mat.solve(&b) {
            // M^k = sum coef_j M^j  =>  minimal poly x^k - sum coef_j x^j
            let mut p = vec![Rat::ZERO; k + 1];
            p[k] = Rat::ONE;
            for (j, c) in coef.iter().enumerate() {
                p[j] = -c;
            }
            return p;
        }
        powers.push(next);
    }
}

fn poly1_derivative(p: &[Rat]) -> Vec<Rat> {
    (1..p.len()).map(|k| &p[k] * &Rat::int(k as i64)).collect()
}

fn poly1_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r: Vec<Rat> = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let da = r.len() - 1;
        let c = &r[da] / &lead;
        if !c.is_zero() {
            for j in 0..=db {
                let idx = da - db + j;
                let v = &r[idx] - &(&c * &b[j]);
                r[idx] = v;
            }
        }
        r.pop();
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly1_gcd_degree(mut a: Vec<Rat>, mut b: Vec<Rat>) -> usize {
    while !b.is_empty() {
        let r = poly1_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// regular semisimple test: centralizer dimension = rank and squarefree
/// minimal polynomial in the representation
pub fn is_regular_semisimple(alg: &MatrixLieAlgebra, x: &Elt, rank: usize) -> bool {
    if alg.centralizer(x).len() != rank {
        return false;
    }
    let mp = minimal_polynomial(alg, x);
    let dp = poly1_derivative(&mp);
    poly1_gcd_degree(mp, dp) == 0
}

/// deterministic search for K1 in g_{-eta_max} making L1 + K1 regular
/// semisimple
fn find_k1(
    alg: &MatrixLieAlgebra,
    grading: &Grading,
    l1: &Elt,
    eta_max: i64,
) -> Result<Elt, NilError> {
    let rank = alg.kind.rank();
    let bottom = grading
        .pieces
        .get(&-eta_max)
        .ok_or_else(|| NilError::Grading("empty lowest graded piece".into()))?;
    let mut candidates: Vec<Elt> = bottom.clone();
    // small deterministic combinations if single vectors fail
    for k in 1..bottom.len() {
        let mut acc = bottom[0].clone();
        for v in &bottom[1..=k] {
            acc = elt_add(&acc, v);
        }
        candidates.push(acc);
    }
    for scale in [1i64, 2, 3, -1] {
        for cand in &candidates {
            let k1 = elt_scale(cand, &Rat::int(scale));
            let y1 = elt_add(l1, &k1);
            if is_regular_semisimple(alg, &y1, rank) {
                return Ok(k1);
            }
        }
    }
    Err(NilError::NoCompletion(
        "no regular semisimple cyclic completion in the deterministic sequence".into(),
    ))
}

/// the commuting family in ker ad_{Y1} whose L-parts are prescribed
fn opposite_cartan_with_l_parts(
    alg: &MatrixLieAlgebra,
    grading: &Grading,
    orbit: &OrbitDescriptor,
    l1: &Elt,
    k1: &Elt,
    l_parts: &[Elt],
) -> Result<OppositeCartan, NilError> {
    let r = orbit.r();
    let y1 = elt_add(l1, k1);
    if !is_regular_semisimple(alg, &y1, r) {
        return Err(NilError::NotRegularSemisimple("L1 + K1".into()));
    }
    let kernel = alg.centralizer(&y1);
    // solve for Y in span(kernel) with positive-degree part = prescribed L_i
    let dim = alg.dim;
    let pos_rows: Vec<usize> = (0..dim).collect();
    let mut y = Vec::with_capacity(r);
    for (idx, l) in l_parts.iter().enumerate() {
        // matrix: positive-degree components of kernel vectors
        let mut cols: Vec<Elt> = Vec::with_capacity(kernel.len());
        for kv in &kernel {
            let mut pos = alg.zero_elt();
            for (d, comp) in grading.decompose(kv) {
                if d > 0 {
                    pos = elt_add(&pos, &comp);
                }
            }
            cols.push(pos);
        }
        let mut m = RatMat::zeros(pos_rows.len(), kernel.len());
        for (j, c) in cols.iter().enumerate() {
            for (ri, &i) in pos_rows.iter().enumerate() {
                *m.at_mut(ri, j) = c[i].clone();
            }
        }
        let rhs: Vec<Rat> = pos_rows.iter().map(|&i| l[i].clone()).collect();
        let sol = m.solve(&rhs).ok_or_else(|| {
            NilError::Normalization(format!("no opposite-Cartan element has L-part #{}", idx + 1))
        })?;
        let mut yv = alg.zero_elt();
        for (j, c) in sol.iter().enumerate() {
            if !c.is_zero() {
                yv = elt_add(&yv, &elt_scale(&kernel[j], c));
            }
        }
        y.push(yv);
    }
    finish_opposite_cartan(alg, grading, orbit, k1, y)
}

/// normalize a basis of ker ad_{Y1} to the antidiagonal Gram form
fn opposite_cartan(
    alg: &MatrixLieAlgebra,
    grading: &Grading,
    orbit: &OrbitDescriptor,
    l1: &Elt,
    k1: &Elt,
) -> Result<OppositeCartan, NilError> {
    let r = orbit.r();
    let y1 = elt_add(l1, k1);
    if !is_regular_semisimple(alg, &y1, r) {
        return Err(NilError::NotRegularSemisimple("L1 + K1".into()));
    }
    let kernel = alg.centralizer(&y1);
    let order = orbit.order();

    // split the kernel into exponent blocks: h'_eta = h' /\ (g_eta + g_{eta-order})
    let mut blocks: BTreeMap<i64, Vec<Elt>> = BTreeMap::new();
    for &e in &orbit.eta {
        blocks.entry(e).or_default();
    }
    for (&e, block) in blocks.iter_mut() {
        // constrain kernel combinations to live in the two graded pieces
        let dim = alg.dim;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for kv in &kernel {
            let mut bad = alg.zero_elt();
            for (d, comp) in grading.decompose(kv) {
                if d != e && d != e - order {
                    bad = elt_add(&bad, &comp);
                }
            }
            rows.push(bad);
        }
        let mut m = RatMat::zeros(dim, kernel.len());
        for (j, row) in rows.iter().enumerate() {
            for i in 0..dim {
                *m.at_mut(i, j) = row[i].clone();
            }
        }
        for combo in m.kernel() {
            let mut v = alg.zero_elt();
            for (j, c) in combo.iter().enumerate() {
                if !c.is_zero() {
                    v = elt_add(&v, &elt_scale(&kernel[j], c));
                }
            }
            block.push(v);
        }
        let mult = orbit.eta.iter().filter(|&&x| x == e).count();
        if block.len() != mult {
            return Err(NilError::Normalization(format!(
                "exponent-{} block has dimension {} (expected {})",
                e,
                block.len(),
                mult
            )));
        }
    }

    // make Y1 = L1 + K1 the first vector of the lowest block
    {
        let first = blocks.get_mut(&orbit.eta[0]).unwrap();
        let y1v = elt_add(l1, k1);
        // replace the member with nonzero coefficient along y1 by y1 itself
        let mut m = RatMat::zeros(alg.dim, first.len());
        for (j, v) in first.iter().enumerate() {
            for i in 0..alg.dim {
                *m.at_mut(i, j) = v[i].clone();
            }
        }
        let sol = m
            .solve(&y1v)
            .ok_or_else(|| NilError::Normalization("Y1 not in its exponent block".into()))?;
        let pos = sol
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| NilError::Normalization("Y1 decomposition empty".into()))?;
        first[pos] = y1v;
        first.swap(0, pos);
    }

    // pair blocks (eta, order - eta) and transform the partner block so the
    // Gram matrix is (order) * antidiagonal
    let exps: Vec<i64> = blocks.keys().copied().collect();
    let mut y: Vec<Option<Elt>> = vec![None; r];
    // global slots: ascending exponents; slot ranges per exponent
    let mut slot_of: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    {
        let mut pos = 0;
        for &e in &orbit.eta {
            slot_of.entry(e).or_default().push(pos);
            pos += 1;
        }
    }
    for &e in &exps {
        let e2 = order - e;
        if e > e2 {
            continue;
        }
        if e == e2 {
            // self-paired block: normalize the symmetric Gram to
            // (order) * antidiagonal; implemented for multiplicity 1
            let block = &blocks[&e];
            if block.len() != 1 {
                return Err(NilError::Normalization(format!(
                    "self-paired exponent {} with multiplicity {} is not supported",
                    e,
                    block.len()
                )));
            }
            let c = alg.pair(&block[0], &block[0]);
            let target = &Rat::int(order) / &c;
            let s = target.sqrt_exact().ok_or_else(|| {
                NilError::Normalization(format!(
                    "self-paired normalization needs sqrt({})",
                    target
                ))
            })?;
            let slot = slot_of[&e][0];
            y[slot] = Some(elt_scale(&block[0], &s));
            continue;
        }
        let a = &blocks[&e];
        let b = &blocks[&e2];
        let m = a.len();
        let mut g = RatMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                *g.at_mut(i, j) = alg.pair(&a[i], &b[j]);
            }
        }
        let ginv = g
            .inverse()
            .ok_or_else(|| NilError::Normalization("degenerate block pairing".into()))?;
        // partner_b paired against a_i: normalized v'_i = order * sum_c ginv[c][i] b_c
        for i in 0..m {
            let slot_a = slot_of[&e][i];
            let slot_b = r - 1 - slot_a; // i + j = r + 1 in 1-based indices
            y[slot_a] = Some(a[i].clone());
            let mut v = alg.zero_elt();
            for c in 0..m {
                let coef = &Rat::int(order) * ginv.at(c, i);
                if !coef.is_zero() {
                    v = elt_add(&v, &elt_scale(&b[c], &coef));
                }
            }
            y[slot_b] = Some(v);
        }
    }
    let y: Vec<Elt> = y
        .into_iter()
        .map(|v| v.ok_or_else(|| NilError::Normalization("unfilled slot".into())))
        .collect::<Result<_, _>>()?;
    finish_opposite_cartan(alg, grading, orbit, k1, y)
}

fn finish_opposite_cartan(
    alg: &MatrixLieAlgebra,
    grading: &Grading,
    orbit: &OrbitDescriptor,
    k1: &Elt,
    y: Vec<Elt>,
) -> Result<OppositeCartan, NilError> {
    let r = orbit.r();
    let order = orbit.order();
    // commutation and Gram checks
    for i in 0..r {
        for j in 0..r {
            if !elt_is_zero(&alg.bracket(&y[i], &y[j])) {
                return Err(NilError::Normalization(format!(
                    "[Y_{}, Y_{}] != 0",
                    i + 1,
                    j + 1
                )));
            }
            let want = if i + j == r - 1 { Rat::int(order) } else { Rat::ZERO };
            let got = alg.pair(&y[i], &y[j]);
            if got != want {
                return Err(NilError::Normalization(format!(
                    "<Y_{}|Y_{}> = {} (expected {})",
                    i + 1,
                    j + 1,
                    got,
                    want
                )));
            }
        }
    }
    let mut l_parts = Vec::with_capacity(r);
    let mut k_parts = Vec::with_capacity(r);
    for (i, yv) in y.iter().enumerate() {
        let e = orbit.eta[i];
        let lp = grading.component(yv, e);
        let kp = grading.component(yv, e - order);
        if !elt_is_zero(&elt_add(
            &elt_add(&lp, &kp),
            &elt_scale(yv, &-Rat::ONE),
        )) {
            return Err(NilError::Normalization(format!(
                "Y_{} has components outside degrees {} and {}",
                i + 1,
                e,
                e - order
            )));
        }
        l_parts.push(lp);
        k_parts.push(kp);
    }
    Ok(OppositeCartan {
        k1: k1.clone(),
        y,
        l_parts,
        k_parts,
    })
}

/// Complete a nilpotent element to an sl2 triple with [h,L1]=L1, [h,f]=-f,
/// [L1,f]=2h. A supplied hint (h, f) is validated and used.
pub fn sl2_complete(
    alg: &MatrixLieAlgebra,
    l1: &Elt,
    hint: Option<(Elt, Elt)>,
) -> Result<(Elt, Elt), NilError> {
    if let Some((h, f)) = hint {
        let ok = |x: &Elt, y: &Elt| elt_is_zero(&elt_add(x, &elt_scale(y, &-Rat::ONE)));
        if ok(&alg.bracket(&h, l1), l1)
            && ok(&alg.bracket(&h, &f), &elt_scale(&f, &-Rat::ONE))
            && ok(&alg.bracket(l1, &f), &elt_scale(&h, &Rat::int(2)))
        {
            return Ok((h, f));
        }
        return Err(NilError::BadTriple("hint fails the sl2 relations".into()));
    }
    // nilpotency of ad_{L1}
    {
        let ad = alg.ad(l1);
        let mut p = ad.clone();
        for _ in 0..alg.dim {
            if p.a.iter().all(|c| c.is_zero()) {
                break;
            }
            p = p.mul(&ad);
        }
        if !p.a.iter().all(|c| c.is_zero()) {
            return Err(NilError::NoCompletion("L1 is not nilpotent".into()));
        }
    }
    // h = [L1, u] with [[L1, u], L1] = L1, i.e. -ad_{L1}^2 u = L1
    let ad = alg.ad(l1);
    let ad2 = ad.mul(&ad);
    let neg = {
        let mut m = ad2;
        for v in m.a.iter_mut() {
            *v = -&*v;
        }
        m
    };
    let u = neg
        .solve(l1)
        .ok_or_else(|| NilError::NoCompletion("no neutral element in the image".into()))?;
    let h = alg.bracket(l1, &u);
    // f from the joint linear system [L1,f]=2h, [h,f]=-f
    let dim = alg.dim;
    let adh = alg.ad(&h);
    let mut m = RatMat::zeros(2 * dim, dim);
    for j in 0..dim {
        let col = alg.bracket(l1, &alg.basis_elt(j));
        for i in 0..dim {
            *m.at_mut(i, j) = col[i].clone();
        }
        for i in 0..dim {
            let diag = if i == j { Rat::ONE } else { Rat::ZERO };
            *m.at_mut(dim + i, j) = adh.at(i, j) + &diag;
        }
    }
    let mut rhs = vec![Rat::ZERO; 2 * dim];
    for i in 0..dim {
        rhs[i] = &h[i] * &Rat::int(2);
    }
    let f = m
        .solve(&rhs)
        .ok_or_else(|| NilError::NoCompletion("no f for the chosen h".into()))?;
    Ok((h, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::build_sl;

    #[test]
    fn sl2_regular_complete() {
        let alg = build_sl(1).unwrap();
        let e = alg.coords_of(&SpMat::unit(2, 0, 1, Rat::ONE)).unwrap();
        let (h, f) = sl2_complete(&alg, &e, None).unwrap();
        // [h, e] = e with h = diag(1/2, -1/2)
        let hm = alg.matrix_of(&h);
        assert_eq!(
            hm,
            SpMat::from_entries(
                2,
                vec![(0, 0, Rat::new(1, 2)), (1, 1, Rat::new(-1, 2))]
            )
        );
        let fm = alg.matrix_of(&f);
        assert_eq!(fm, SpMat::unit(2, 1, 0, Rat::ONE));
    }

    #[test]
    fn sl3_regular_sl2data() {
        let data = charts::regular_sl(2).unwrap();
        assert_eq!(data.r, 2);
        assert_eq!(data.n, 2);
        assert_eq!(data.eta, vec![1, 2]);
        // gamma duality
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { Rat::ONE } else { Rat::ZERO };
                assert_eq!(data.pair(&data.gamma[i], &data.hw[j]), want);
            }
        }
        // eigenvalues of ad_h on g^f are -eta_i
        for (i, g) in data.gamma.iter().enumerate() {
            let hg = data.alg.bracket(&data.h, g);
            assert!(elt_is_zero(&elt_add(
                &hg,
                &elt_scale(g, &Rat::int(data.eta[i]))
            )));
        }
        // opposite Cartan Gram
        for i in 0..2 {
            for j in 0..2 {
                let want = if i + j == 1 { Rat::int(3) } else { Rat::ZERO };
                assert_eq!(data.pair(&data.oc.y[i], &data.oc.y[j]), want);
            }
        }
    }
}
