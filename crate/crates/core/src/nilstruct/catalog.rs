//! Catalog of distinguished nilpotent orbits of semisimple type: exponents,
//! extra weights, shift multiplicities and Lie-algebra exponents per orbit.
//!
//! Every row satisfies four mechanical laws (checked by `validate`):
//!   eta_i + eta_{r-i+1} = eta_r + 1,
//!   extra_i + extra_{(n-r)-i+1} = eta_r,
//!   n = r + 2 sum(mu),
//!   {nu_i - mu_i (eta_r+1)} = {eta_i} as multisets.
//! Two shift-multiplicity vectors in the source table fail these laws as
//! printed (B_{2m}(a_m) and E8(a4)); the catalog stores the unique corrected
//! vectors, which the laws pin down.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub series: String,
    pub rank: usize,
    pub label: String,
    /// exponents eta_1 <= ... <= eta_r
    pub eta: Vec<i64>,
    /// extra weights eta_{r+1} <= ... <= eta_n
    pub extra: Vec<i64>,
    /// shift multiplicities mu_1..mu_r (aligned with nu ascending)
    pub mu: Vec<i64>,
    /// Lie-algebra exponents nu_1 <= ... <= nu_r
    pub nu: Vec<i64>,
}

impl OrbitDescriptor {
    pub fn r(&self) -> usize {
        self.eta.len()
    }

    pub fn n(&self) -> usize {
        self.eta.len() + self.extra.len()
    }

    pub fn eta_max(&self) -> i64 {
        *self.eta.last().unwrap()
    }

    /// Order of the associated Weyl-group element.
    pub fn order(&self) -> i64 {
        self.eta_max() + 1
    }

    /// Full weight multiset eta_1..eta_n in chart order (exponents then extra).
    pub fn all_weights(&self) -> Vec<i64> {
        let mut v = self.eta.clone();
        v.extend(&self.extra);
        v
    }

    /// Number of s in the type label Z_r(a_s): count of nonzero mu.
    pub fn s(&self) -> usize {
        self.mu.iter().filter(|&&m| m != 0).count()
    }

    pub fn name(&self) -> String {
        format!("{}{}({})", self.series, self.rank, self.label)
    }

    pub fn validate(&self) -> Result<(), String> {
        let r = self.r();
        if self.mu.len() != r || self.nu.len() != r {
            return Err(format!("{}: mu/nu length mismatch", self.name()));
        }
        if self.eta.windows(2).any(|w| w[0] > w[1])
            || self.extra.windows(2).any(|w| w[0] > w[1])
            || self.nu.windows(2).any(|w| w[0] > w[1])
        {
            return Err(format!("{}: weights not sorted", self.name()));
        }
        let h = self.eta_max();
        for i in 0..r {
            if self.eta[i] + self.eta[r - 1 - i] != h + 1 {
                return Err(format!("{}: exponent duality fails at {}", self.name(), i));
            }
        }
        let m = self.extra.len();
        for i in 0..m {
            if self.extra[i] + self.extra[m - 1 - i] != h {
                return Err(format!("{}: extra-weight duality fails at {}", self.name(), i));
            }
        }
        let musum: i64 = self.mu.iter().sum();
        if (self.n() - r) as i64 != 2 * musum {
            return Err(format!("{}: n != r + 2 sum(mu)", self.name()));
        }
        let mut shifted: Vec<i64> = self
            .nu
            .iter()
            .zip(&self.mu)
            .map(|(nu, mu)| nu - mu * (h + 1))
            .collect();
        shifted.sort_unstable();
        if shifted != self.eta {
            return Err(format!(
                "{}: {{nu_i - mu_i (eta_r+1)}} != {{eta_i}} ({:?} vs {:?})",
                self.name(),
                shifted,
                self.eta
            ));
        }
        Ok(())
    }
}

fn row(series: &str, rank: usize, label: &str, eta: Vec<i64>, extra: Vec<i64>, mu: Vec<i64>, nu: Vec<i64>) -> OrbitDescriptor {
    OrbitDescriptor {
        series: series.into(),
        rank,
        label: label.into(),
        eta,
        extra,
        mu,
        nu,
    }
}

fn lie_exponents(series: &str, rank: usize) -> Vec<i64> {
    let r = rank as i64;
    let mut nu: Vec<i64> = match series {
        "A" => (1..=r).collect(),
        "B" | "C" => (0..r).map(|k| 2 * k + 1).collect(),
        "D" => {
            let mut v: Vec<i64> = (0..r - 1).map(|k| 2 * k + 1).collect();
            v.push(r - 1);
            v
        }
        "G2" => vec![1, 5],
        "F4" => vec![1, 5, 7, 11],
        "E6" => vec![1, 4, 5, 7, 8, 11],
        "E7" => vec![1, 5, 7, 9, 11, 13, 17],
        "E8" => vec![1, 7, 11, 13, 17, 19, 23, 29],
        _ => vec![],
    };
    nu.sort_unstable();
    nu
}

/// Descriptor for a given (series, rank, label); None if not in the catalog.
pub fn orbit_descriptor(series: &str, rank: usize, label: &str) -> Option<OrbitDescriptor> {
    let nu = lie_exponents(series, rank);
    match (series, label) {
        ("A", "a0") if rank >= 1 => {
            Some(row("A", rank, "a0", nu.clone(), vec![], vec![0; rank], nu))
        }
        ("B", "a0") if rank >= 2 => {
            Some(row("B", rank, "a0", nu.clone(), vec![], vec![0; rank], nu))
        }
        ("C", "a0") if rank >= 2 => {
            Some(row("C", rank, "a0", nu.clone(), vec![], vec![0; rank], nu))
        }
        ("D", "a0") if rank >= 3 => {
            Some(row("D", rank, "a0", nu.clone(), vec![], vec![0; rank], nu))
        }
        ("G2", "a0") if rank == 2 => Some(row("G2", 2, "a0", vec![1, 5], vec![], vec![0, 0], vec![1, 5])),
        // B_{2m}(a_m), so_{4m+1}, partition [2m+1, 2m-1, 1]
        ("B", _) if rank % 2 == 0 && rank >= 4 && label == format!("a{}", rank / 2) => {
            let m = (rank / 2) as i64;
            let mut eta: Vec<i64> = Vec::new();
            for k in 0..m {
                eta.push(2 * k + 1);
                eta.push(2 * k + 1);
            }
            let mut extra: Vec<i64> = (1..m).collect();
            extra.extend([m - 1, m]);
            extra.extend(m..=(2 * m - 2));
            extra.sort_unstable();
            let mut mu = vec![0i64; m as usize];
            mu.extend(vec![1i64; m as usize]);
            Some(row("B", rank, label, eta, extra, mu, lie_exponents("B", rank)))
        }
        // D_{2m}(a_{m-1}), so_{4m}, partition [2m+1, 2m-1]
        ("D", _) if rank % 2 == 0 && rank >= 4 && label == format!("a{}", rank / 2 - 1) => {
            let m = (rank / 2) as i64;
            let mut eta: Vec<i64> = Vec::new();
            for k in 0..m {
                eta.push(2 * k + 1);
                eta.push(2 * k + 1);
            }
            let extra: Vec<i64> = (1..=(2 * m - 2)).collect();
            let mut mu = vec![0i64; (m + 1) as usize];
            mu.extend(vec![1i64; (m - 1) as usize]);
            Some(row("D", rank, label, eta, extra, mu, lie_exponents("D", rank)))
        }
        ("F4", "a0") if rank == 4 => Some(row("F4", 4, "a0", vec![1, 5, 7, 11], vec![], vec![0; 4], nu)),
        ("F4", "a1") if rank == 4 => Some(row(
            "F4", 4, "a1",
            vec![1, 3, 5, 7],
            vec![2, 5],
            vec![0, 0, 0, 1],
            nu,
        )),
        ("F4", "a2") if rank == 4 => Some(row(
            "F4", 4, "a2",
            vec![1, 1, 5, 5],
            vec![1, 2, 3, 4],
            vec![0, 0, 1, 1],
            nu,
        )),
        ("F4", "a3") if rank == 4 => Some(row(
            "F4", 4, "a3",
            vec![1, 1, 3, 3],
            vec![1, 1, 1, 1, 2, 2, 2, 2],
            vec![0, 1, 1, 2],
            nu,
        )),
        ("E6", "a0") if rank == 6 => Some(row("E6", 6, "a0", nu.clone(), vec![], vec![0; 6], nu)),
        ("E6", "a1") if rank == 6 => Some(row(
            "E6", 6, "a1",
            vec![1, 2, 4, 5, 7, 8],
            vec![3, 5],
            vec![0, 0, 0, 0, 0, 1],
            nu,
        )),
        ("E6", "a3") if rank == 6 => Some(row(
            "E6", 6, "a3",
            vec![1, 1, 2, 4, 5, 5],
            vec![1, 2, 2, 3, 3, 4],
            vec![0, 0, 0, 1, 1, 1],
            nu,
        )),
        ("E7", "a0") if rank == 7 => Some(row("E7", 7, "a0", nu.clone(), vec![], vec![0; 7], nu)),
        ("E7", "a1") if rank == 7 => Some(row(
            "E7", 7, "a1",
            vec![1, 3, 5, 7, 9, 11, 13],
            vec![5, 8],
            vec![0, 0, 0, 0, 0, 0, 1],
            nu,
        )),
        ("E7", "a5") if rank == 7 => Some(row(
            "E7", 7, "a5",
            vec![1, 1, 1, 3, 5, 5, 5],
            vec![1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4],
            vec![0, 0, 1, 1, 1, 2, 2],
            nu,
        )),
        ("E8", "a0") if rank == 8 => Some(row("E8", 8, "a0", nu.clone(), vec![], vec![0; 8], nu)),
        ("E8", "a1") if rank == 8 => Some(row(
            "E8", 8, "a1",
            vec![1, 5, 7, 11, 13, 17, 19, 23],
            vec![9, 14],
            vec![0, 0, 0, 0, 0, 0, 0, 1],
            nu,
        )),
        ("E8", "a2") if rank == 8 => Some(row(
            "E8", 8, "a2",
            vec![1, 3, 7, 9, 11, 13, 17, 19],
            vec![5, 8, 11, 14],
            vec![0, 0, 0, 0, 0, 0, 1, 1],
            nu,
        )),
        ("E8", "a4") if rank == 8 => Some(row(
            "E8", 8, "a4",
            vec![1, 2, 4, 7, 8, 11, 13, 14],
            vec![3, 5, 5, 7, 7, 9, 9, 11],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            nu,
        )),
        ("E8", "a5") if rank == 8 => Some(row(
            "E8", 8, "a5",
            vec![1, 1, 5, 5, 7, 7, 11, 11],
            vec![1, 2, 3, 4, 5, 5, 6, 6, 7, 8, 9, 10],
            vec![0, 0, 0, 1, 1, 1, 1, 2],
            nu,
        )),
        ("E8", "a6") if rank == 8 => Some(row(
            "E8", 8, "a6",
            vec![1, 1, 3, 3, 7, 7, 9, 9],
            vec![1, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 6, 7, 8],
            vec![0, 0, 1, 1, 1, 1, 2, 2],
            nu,
        )),
        ("E8", "a7") if rank == 8 => Some(row(
            "E8", 8, "a7",
            vec![1, 1, 1, 1, 5, 5, 5, 5],
            vec![
                1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 4,
                4, 4, 4, 4, 4,
            ],
            vec![0, 1, 1, 2, 2, 3, 3, 4],
            nu,
        )),
        _ => None,
    }
}

/// All catalog rows with rank bounded by `max_rank` (classical families are
/// infinite; exceptional rows appear once).
pub fn catalog(max_rank: usize) -> Vec<OrbitDescriptor> {
    let mut out = Vec::new();
    for r in 1..=max_rank {
        out.extend(orbit_descriptor("A", r, "a0"));
    }
    for r in 2..=max_rank {
        out.extend(orbit_descriptor("B", r, "a0"));
        out.extend(orbit_descriptor("C", r, "a0"));
    }
    for r in 3..=max_rank {
        out.extend(orbit_descriptor("D", r, "a0"));
    }
    for m in 2..=(max_rank / 2) {
        out.extend(orbit_descriptor("B", 2 * m, &format!("a{}", m)));
        out.extend(orbit_descriptor("D", 2 * m, &format!("a{}", m - 1)));
    }
    out.extend(orbit_descriptor("G2", 2, "a0"));
    for l in ["a0", "a1", "a2", "a3"] {
        out.extend(orbit_descriptor("F4", 4, l));
    }
    for l in ["a0", "a1", "a3"] {
        out.extend(orbit_descriptor("E6", 6, l));
    }
    for l in ["a0", "a1", "a5"] {
        out.extend(orbit_descriptor("E7", 7, l));
    }
    for l in ["a0", "a1", "a2", "a4", "a5", "a6", "a7"] {
        out.extend(orbit_descriptor("E8", 8, l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_rows_satisfy_the_laws() {
        let rows = catalog(12);
        assert!(rows.len() > 30);
        for row in &rows {
            row.validate().unwrap_or_else(|e| panic!("{}", e));
        }
    }

    #[test]
    fn f4a2_row() {
        let d = orbit_descriptor("F4", 4, "a2").unwrap();
        assert_eq!(d.eta, vec![1, 1, 5, 5]);
        assert_eq!(d.extra, vec![1, 2, 3, 4]);
        assert_eq!(d.mu, vec![0, 0, 1, 1]);
        assert_eq!(d.n(), 8);
        assert_eq!(d.s(), 2);
        assert_eq!(d.order(), 6);
    }

    #[test]
    fn e7a5_shift_multiset() {
        let d = orbit_descriptor("E7", 7, "a5").unwrap();
        let shifted: Vec<i64> = d
            .nu
            .iter()
            .zip(&d.mu)
            .map(|(nu, mu)| nu - mu * d.order())
            .collect();
        assert_eq!(shifted, vec![1, 5, 1, 3, 5, 1, 5]);
        let mut sorted = shifted;
        sorted.sort_unstable();
        assert_eq!(sorted, d.eta);
    }

    #[test]
    fn e8a7_and_b4_rows() {
        let d = orbit_descriptor("E8", 8, "a7").unwrap();
        assert_eq!(d.eta, vec![1, 1, 1, 1, 5, 5, 5, 5]);
        assert_eq!(d.n(), 40);
        let b = orbit_descriptor("B", 4, "a2").unwrap();
        assert_eq!(b.eta, vec![1, 1, 3, 3]);
        assert_eq!(b.extra, vec![1, 1, 2, 2]);
        assert_eq!(b.mu, vec![0, 0, 1, 1]);
        assert!(orbit_descriptor("F4", 4, "a9").is_none());
    }
}
