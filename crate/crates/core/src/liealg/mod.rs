//! Simple Lie algebras in faithful exact-rational matrix representations:
//! bracket, normalized invariant form, adjoint operators and centralizers.

pub mod f4;

use crate::symcore::linalg::RatMat;
use crate::symcore::poly::Poly;
use crate::symcore::rat::Rat;
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum LieError {
    #[error("basis does not close under the bracket: [{0}, {1}] leaves the span")]
    ClosureFailure(String, String),
    #[error("element lies outside the algebra span")]
    OutsideSpan,
    #[error("degenerate pairing: Tr(L1 f) = 0")]
    DegeneratePairing,
    #[error("unsupported rank {0} for series {1}")]
    UnsupportedRank(usize, char),
}

/// Sparse exact matrix, entries sorted by (row, col).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SpMat {
    pub n: usize,
    pub entries: Vec<(u16, u16, Rat)>,
}

impl SpMat {
    pub fn zero(n: usize) -> SpMat {
        SpMat { n, entries: Vec::new() }
    }

    pub fn from_entries(n: usize, mut entries: Vec<(u16, u16, Rat)>) -> SpMat {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut out: Vec<(u16, u16, Rat)> = Vec::with_capacity(entries.len());
        for (i, j, c) in entries {
            match out.last_mut() {
                Some((li, lj, lc)) if *li == i && *lj == j => *lc += &c,
                _ => out.push((i, j, c)),
            }
        }
        out.retain(|(_, _, c)| !c.is_zero());
        SpMat { n, entries: out }
    }

    pub fn unit(n: usize, i: u16, j: u16, c: Rat) -> SpMat {
        SpMat::from_entries(n, vec![(i, j, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_scaled(&self, other: &SpMat, c: &Rat) -> SpMat {
        let mut e = self.entries.clone();
        e.extend(other.entries.iter().map(|(i, j, v)| (*i, *j, v * c)));
        SpMat::from_entries(self.n, e)
    }

    pub fn scale(&self, c: &Rat) -> SpMat {
        if c.is_zero() {
            return SpMat::zero(self.n);
        }
        SpMat {
            n: self.n,
            entries: self.entries.iter().map(|(i, j, v)| (*i, *j, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &SpMat) -> SpMat {
        let mut by_row: HashMap<u16, Vec<(u16, &Rat)>> = HashMap::new();
        for (i, j, v) in &other.entries {
            by_row.entry(*i).or_default().push((*j, v));
        }
        let mut acc: Vec<(u16, u16, Rat)> = Vec::new();
        for (i, k, v) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (j, w) in row {
                    acc.push((*i, *j, v * *w));
                }
            }
        }
        SpMat::from_entries(self.n, acc)
    }

    pub fn bracket(&self, other: &SpMat) -> SpMat {
        self.mul(other).add_scaled(&other.mul(self), &-Rat::ONE)
    }

    pub fn transpose(&self) -> SpMat {
        SpMat::from_entries(
            self.n,
            self.entries.iter().map(|(i, j, v)| (*j, *i, v.clone())).collect(),
        )
    }

    pub fn trace(&self) -> Rat {
        let mut t = Rat::ZERO;
        for (i, j, v) in &self.entries {
            if i == j {
                t += v;
            }
        }
        t
    }

    pub fn trace_prod(&self, other: &SpMat) -> Rat {
        let mut idx: HashMap<(u16, u16), &Rat> = HashMap::new();
        for (i, j, v) in &other.entries {
            idx.insert((*i, *j), v);
        }
        let mut t = Rat::ZERO;
        for (i, j, v) in &self.entries {
            if let Some(w) = idx.get(&(*j, *i)) {
                t += &(v * *w);
            }
        }
        t
    }
}

/// Coordinates of an algebra element over the chosen basis.
pub type Elt = Vec<Rat>;

pub fn elt_add(a: &Elt, b: &Elt) -> Elt {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn elt_scale(a: &Elt, c: &Rat) -> Elt {
    a.iter().map(|x| x * c).collect()
}

pub fn elt_is_zero(a: &Elt) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Expresses arbitrary representation matrices in basis coordinates.
struct Flattener {
    /// flattened coordinate ids of the pivot positions
    pivots: Vec<usize>,
    /// inverse of the basis matrix restricted to pivot coordinates
    inv: RatMat,
}

#[derive(Clone, serde::Serialize, serde::Deserialize, PartialEq, Eq, Debug)]
pub enum AlgebraKind {
    TypeA { rank: usize },
    TypeB { rank: usize },
    TypeC { rank: usize },
    TypeD { rank: usize },
    F4,
    Custom(String),
}

impl AlgebraKind {
    pub fn rank(&self) -> usize {
        match self {
            AlgebraKind::TypeA { rank }
            | AlgebraKind::TypeB { rank }
            | AlgebraKind::TypeC { rank }
            | AlgebraKind::TypeD { rank } => *rank,
            AlgebraKind::F4 => 4,
            AlgebraKind::Custom(_) => 0,
        }
    }
}

pub struct MatrixLieAlgebra {
    pub kind: AlgebraKind,
    pub rep_dim: usize,
    pub dim: usize,
    pub basis: Vec<SpMat>,
    pub basis_names: Vec<String>,
    /// trace-form scale: <a|b> = kappa * Tr(ab); set to 1 until normalized
    pub kappa: Rat,
    flat: Flattener,
    /// structure constants: sc[a][b] = sparse coords of [X_a, X_b]
    sc: Vec<Vec<Vec<(usize, Rat)>>>,
    /// gram[a][b] = Tr(X_a X_b) (unscaled)
    gram: RatMat,
    /// named generators (root vectors etc.) for chart construction
    pub named: HashMap<String, Elt>,
}

impl MatrixLieAlgebra {
    pub fn new(
        kind: AlgebraKind,
        rep_dim: usize,
        basis: Vec<SpMat>,
        basis_names: Vec<String>,
    ) -> Result<MatrixLieAlgebra, LieError> {
        let dim = basis.len();
        // independence + pivot data
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for b in &basis {
            let mut row = vec![Rat::ZERO; rep_dim * rep_dim];
            for (i, j, v) in &b.entries {
                row[*i as usize * rep_dim + *j as usize] = v.clone();
            }
            rows.push(row);
        }
        let big = RatMat::from_rows(rows.clone());
        let mut ech = big.clone();
        let pivots = ech.rref();
        if pivots.len() != dim {
            return Err(LieError::ClosureFailure(
                "basis".into(),
                "not linearly independent".into(),
            ));
        }
        let mut sq = RatMat::zeros(dim, dim);
        for (bi, row) in rows.iter().enumerate() {
            for (k, &p) in pivots.iter().enumerate() {
                *sq.at_mut(bi, k) = row[p].clone();
            }
        }
        // coords x of matrix m satisfy x^T sq = m[pivots], so invert sq^T
        let inv = sq.transpose().inverse().expect("pivot block invertible");
        let flat = Flattener { pivots, inv };

        let mut alg = MatrixLieAlgebra {
            kind,
            rep_dim,
            dim,
            basis,
            basis_names,
            kappa: Rat::ONE,
            flat,
            sc: Vec::new(),
            gram: RatMat::zeros(dim, dim),
            named: HashMap::new(),
        };
        // structure constants, checking closure
        let mut sc = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in a + 1..dim {
                let m = alg.basis[a].bracket(&alg.basis[b]);
                let coords = alg.coords_of(&m).ok_or_else(|| {
                    LieError::ClosureFailure(alg.basis_names[a].clone(), alg.basis_names[b].clone())
                })?;
                let sparse: Vec<(usize, Rat)> = coords
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k, c.clone()))
                    .collect();
                sc[b][a] = sparse.iter().map(|(k, c)| (*k, -c)).collect();
                sc[a][b] = sparse;
            }
        }
        alg.sc = sc;
        for a in 0..dim {
            for b in a..dim {
                let t = alg.basis[a].trace_prod(&alg.basis[b]);
                *alg.gram.at_mut(a, b) = t.clone();
                *alg.gram.at_mut(b, a) = t;
            }
        }
        Ok(alg)
    }

    /// Express a representation matrix in basis coordinates; None if outside
    /// the span.
    pub fn coords_of(&self, m: &SpMat) -> Option<Elt> {
        let mut flatv = vec![Rat::ZERO; self.rep_dim * self.rep_dim];
        for (i, j, v) in &m.entries {
            flatv[*i as usize * self.rep_dim + *j as usize] = v.clone();
        }
        let rhs: Vec<Rat> = self.flat.pivots.iter().map(|&p| flatv[p].clone()).collect();
        let coords = self.flat.inv.mul_vec(&rhs);
        // verify (detects vectors outside the span)
        let mut check = SpMat::zero(self.rep_dim);
        for (k, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                check = check.add_scaled(&self.basis[k], c);
            }
        }
        if &check == m {
            Some(coords)
        } else {
            None
        }
    }

    pub fn matrix_of(&self, x: &Elt) -> SpMat {
        let mut m = SpMat::zero(self.rep_dim);
        for (k, c) in x.iter().enumerate() {
            if !c.is_zero() {
                m = m.add_scaled(&self.basis[k], c);
            }
        }
        m
    }

    pub fn zero_elt(&self) -> Elt {
        vec![Rat::ZERO; self.dim]
    }

    pub fn basis_elt(&self, k: usize) -> Elt {
        let mut e = self.zero_elt();
        e[k] = Rat::ONE;
        e
    }

    pub fn named_elt(&self, name: &str) -> Elt {
        self.named
            .get(name)
            .unwrap_or_else(|| panic!("no generator named {}", name))
            .clone()
    }

    pub fn bracket(&self, x: &Elt, y: &Elt) -> Elt {
        let mut out = self.zero_elt();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let f = xa * yb;
                for (k, c) in &self.sc[a][b] {
                    out[*k] += &(c * &f);
                }
            }
        }
        out
    }

    /// Bracket of elements with polynomial coefficients (used on loop spaces).
    pub fn bracket_poly(&self, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() || self.sc[a][b].is_empty() {
                    continue;
                }
                let f = xa.mul(yb);
                for (k, c) in &self.sc[a][b] {
                    out[*k].add_assign(&f.scale(c));
                }
            }
        }
        out
    }

    /// ad(x) as a dim x dim matrix acting on coordinates.
    pub fn ad(&self, x: &Elt) -> RatMat {
        let mut m = RatMat::zeros(self.dim, self.dim);
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for b in 0..self.dim {
                for (k, c) in &self.sc[a][b] {
                    *m.at_mut(*k, b) += &(c * xa);
                }
            }
        }
        m
    }

    /// Basis of the centralizer ker ad(x).
    pub fn centralizer(&self, x: &Elt) -> Vec<Elt> {
        self.ad(x).kernel()
    }

    /// Invariant form <x|y> = kappa Tr(xy).
    pub fn pair(&self, x: &Elt, y: &Elt) -> Rat {
        let mut acc = Rat::ZERO;
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let g = self.gram.at(a, b);
                if !g.is_zero() {
                    acc += &(&(xa * yb) * g);
                }
            }
        }
        &acc * &self.kappa
    }

    /// Fix kappa so that <L1|f> = 1.
    pub fn normalize_form(&mut self, l1: &Elt, f: &Elt) -> Result<Rat, LieError> {
        let prev = std::mem::replace(&mut self.kappa, Rat::ONE);
        let t = self.pair(l1, f);
        if t.is_zero() {
            self.kappa = prev;
            return Err(LieError::DegeneratePairing);
        }
        self.kappa = t.inv();
        Ok(self.kappa.clone())
    }

    /// Gram matrix of the invariant form on the whole basis.
    pub fn gram_scaled(&self) -> RatMat {
        let mut g = self.gram.clone();
        for v in g.a.iter_mut() {
            *v *= &self.kappa;
        }
        g
    }
}

fn idx(i: usize) -> u16 {
    i as u16
}

/// sl(r+1): trace-free matrices.
pub fn build_sl(rank: usize) -> Result<MatrixLieAlgebra, LieError> {
    if rank < 1 {
        return Err(LieError::UnsupportedRank(rank, 'A'));
    }
    let n = rank + 1;
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(SpMat::unit(n, idx(i), idx(j), Rat::ONE));
                names.push(format!("E{}{}", i + 1, j + 1));
            }
        }
    }
    for k in 0..rank {
        basis.push(SpMat::from_entries(
            n,
            vec![(idx(k), idx(k), Rat::ONE), (idx(k + 1), idx(k + 1), -Rat::ONE)],
        ));
        names.push(format!("H{}", k + 1));
    }
    MatrixLieAlgebra::new(AlgebraKind::TypeA { rank }, n, basis, names)
}

/// so(B) for a symmetric invertible Gram matrix B: {X : X^T B = -B X}.
pub fn build_so_with_form(kind: AlgebraKind, b: &RatMat) -> Result<MatrixLieAlgebra, LieError> {
    let n = b.rows;
    let binv = b.inverse().expect("form must be invertible");
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // B^{-1} (E_ij - E_ji)
            let mut entries = Vec::new();
            for k in 0..n {
                let ci = binv.at(k, i);
                let cj = binv.at(k, j);
                if !ci.is_zero() {
                    entries.push((idx(k), idx(j), ci.clone()));
                }
                if !cj.is_zero() {
                    entries.push((idx(k), idx(i), -cj));
                }
            }
            basis.push(SpMat::from_entries(n, entries));
            names.push(format!("M{}{}", i + 1, j + 1));
        }
    }
    MatrixLieAlgebra::new(kind, n, basis, names)
}

/// sp(Omega) for an antisymmetric invertible Omega: {X : X^T Omega = -Omega X}.
pub fn build_sp_with_form(kind: AlgebraKind, om: &RatMat) -> Result<MatrixLieAlgebra, LieError> {
    let n = om.rows;
    let oinv = om.inverse().expect("form must be invertible");
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in i..n {
            // Omega^{-1} (E_ij + E_ji)
            let mut entries = Vec::new();
            for k in 0..n {
                let ci = oinv.at(k, i);
                let cj = oinv.at(k, j);
                if !ci.is_zero() {
                    entries.push((idx(k), idx(j), ci.clone()));
                }
                if !cj.is_zero() {
                    entries.push((idx(k), idx(i), cj.clone()));
                }
            }
            basis.push(SpMat::from_entries(n, entries));
            names.push(format!("S{}{}", i + 1, j + 1));
        }
    }
    MatrixLieAlgebra::new(kind, n, basis, names)
}

/// Antidiagonal identity, the default orthogonal/symplectic reference form.
pub fn antidiag(n: usize) -> RatMat {
    let mut m = RatMat::zeros(n, n);
    for i in 0..n {
        *m.at_mut(i, n - 1 - i) = Rat::ONE;
    }
    m
}

/// Classical series by rank: A -> sl(r+1), B -> so(2r+1), C -> sp(2r),
/// D -> so(2r).
pub fn build_classical(series: char, rank: usize) -> Result<MatrixLieAlgebra, LieError> {
    match series {
        'A' => build_sl(rank),
        'B' => {
            if rank < 1 {
                return Err(LieError::UnsupportedRank(rank, 'B'));
            }
            build_so_with_form(AlgebraKind::TypeB { rank }, &antidiag(2 * rank + 1))
        }
        'D' => {
            if rank < 3 {
                return Err(LieError::UnsupportedRank(rank, 'D'));
            }
            build_so_with_form(AlgebraKind::TypeD { rank }, &antidiag(2 * rank))
        }
        'C' => {
            if rank < 1 {
                return Err(LieError::UnsupportedRank(rank, 'C'));
            }
            let n = 2 * rank;
            let mut om = RatMat::zeros(n, n);
            for i in 0..rank {
                *om.at_mut(i, n - 1 - i) = Rat::ONE;
                *om.at_mut(n - 1 - i, i) = -Rat::ONE;
            }
            build_sp_with_form(AlgebraKind::TypeC { rank }, &om)
        }
        _ => Err(LieError::UnsupportedRank(rank, series)),
    }
}

/// The 52-dimensional F4 algebra in its minimal 27-dimensional representation.
///
/// `corrected_labels` selects the grading-consistent reading of the two
/// ambiguous three-digit labels in the source table; the raw reading is kept
/// selectable for comparison.
pub fn build_f4_minimal() -> Result<MatrixLieAlgebra, LieError> {
    let n = 27;
    let mut by_label: HashMap<String, SpMat> = HashMap::new();
    for (label, entries) in f4::SIMPLE_ROOTS.iter() {
        let m = SpMat::from_entries(
            n,
            entries.iter().map(|&(c, i, j)| (i - 1, j - 1, Rat::int(c))).collect(),
        );
        by_label.insert(label.to_string(), m);
    }
    for (label, a, b) in f4::ROOT_CHAIN.iter() {
        let m = by_label[*a].bracket(&by_label[*b]);
        by_label.insert(label.to_string(), m);
    }
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for label in f4::positive_roots() {
        basis.push(by_label[label].clone());
        names.push(format!("E{}", label));
    }
    for label in f4::positive_roots() {
        basis.push(by_label[label].transpose());
        names.push(format!("F{}", label));
    }
    for (label, _) in f4::SIMPLE_ROOTS.iter() {
        let e = &by_label[*label];
        basis.push(e.bracket(&e.transpose()));
        names.push(format!("H{}", label));
    }
    let mut alg = MatrixLieAlgebra::new(AlgebraKind::F4, n, basis, names)?;
    let named: Vec<(String, Elt)> = (0..alg.dim)
        .map(|k| (alg.basis_names[k].clone(), alg.basis_elt(k)))
        .collect();
    alg.named = named.into_iter().collect();
    Ok(alg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_basics() {
        let g = build_sl(1).unwrap();
        assert_eq!(g.dim, 3);
        // [e, f] = h_std
        let e = g.coords_of(&SpMat::unit(2, 0, 1, Rat::ONE)).unwrap();
        let f = g.coords_of(&SpMat::unit(2, 1, 0, Rat::ONE)).unwrap();
        let h = g.bracket(&e, &f);
        let hm = g.matrix_of(&h);
        assert_eq!(
            hm,
            SpMat::from_entries(2, vec![(0, 0, Rat::ONE), (1, 1, -Rat::ONE)])
        );
    }

    #[test]
    fn jacobi_and_antisymmetry_sl3() {
        let g = build_sl(2).unwrap();
        assert_eq!(g.dim, 8);
        for a in 0..g.dim {
            for b in 0..g.dim {
                let ab = g.bracket(&g.basis_elt(a), &g.basis_elt(b));
                let ba = g.bracket(&g.basis_elt(b), &g.basis_elt(a));
                assert!(elt_is_zero(&elt_add(&ab, &ba)));
            }
        }
        // Jacobi on a few triples
        for (a, b, c) in [(0, 1, 2), (1, 3, 5), (2, 4, 7), (0, 6, 7)] {
            let (x, y, z) = (g.basis_elt(a), g.basis_elt(b), g.basis_elt(c));
            let mut s = g.bracket(&g.bracket(&x, &y), &z);
            s = elt_add(&s, &g.bracket(&g.bracket(&y, &z), &x));
            s = elt_add(&s, &g.bracket(&g.bracket(&z, &x), &y));
            assert!(elt_is_zero(&s));
        }
    }

    #[test]
    fn form_invariance_sl3() {
        let g = build_sl(2).unwrap();
        for (a, b, c) in [(0, 1, 2), (3, 4, 5), (0, 5, 7)] {
            let (x, y, z) = (g.basis_elt(a), g.basis_elt(b), g.basis_elt(c));
            let lhs = g.pair(&g.bracket(&x, &y), &z);
            let rhs = g.pair(&y, &g.bracket(&x, &z));
            assert_eq!(lhs, -rhs);
        }
    }

    #[test]
    fn classical_dimensions() {
        assert_eq!(build_classical('A', 1).unwrap().dim, 3);
        assert_eq!(build_classical('B', 2).unwrap().dim, 10); // so_5
        assert_eq!(build_classical('C', 3).unwrap().dim, 21); // sp_6
        assert_eq!(build_classical('D', 4).unwrap().dim, 28); // so_8
        // so_9 (B4): (4m+1)4m/2 with m=2
        assert_eq!(build_classical('B', 4).unwrap().dim, 36);
    }

    #[test]
    fn f4_minimal_dimension_and_closure() {
        let g = build_f4_minimal().unwrap();
        assert_eq!(g.dim, 52);
        assert_eq!(g.rep_dim, 27);
        // centralizer of 0 is everything
        let z = g.zero_elt();
        assert_eq!(g.centralizer(&z).len(), 52);
    }

    #[test]
    fn f4_cartan_eigenvalues_integral() {
        let g = build_f4_minimal().unwrap();
        // every root vector is an ad-eigenvector of each Cartan element with
        // integer eigenvalue
        let cartans: Vec<Elt> = (0..4).map(|k| g.basis_elt(48 + k)).collect();
        for r in 0..48 {
            let x = g.basis_elt(r);
            for h in &cartans {
                let hx = g.bracket(h, &x);
                // hx = c x for an integer c
                let c = (0..g.dim)
                    .find_map(|k| (!x[k].is_zero()).then(|| &hx[k] / &x[k]))
                    .unwrap();
                assert!(c.is_integer(), "non-integer root eigenvalue");
                assert!(elt_is_zero(&elt_add(&hx, &elt_scale(&x, &-c))));
            }
        }
    }
}
