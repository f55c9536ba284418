//! Dissipation times of toral automorphisms from exact orbit sums.
//!
//! The n-step operator is a weighted relabeling, so its norm is
//! exp(−ν min_k S_n(k)) with S_n(k) = Σ_{j=1}^n λ(A_*^j k). In the lattice
//! convention S_n(k) = kᵀG_n k with G_n = Σ_j (A_*^j)ᵀ A_*^j, and the
//! minimum over ℤ^d∖0 is found by exact ellipsoid enumeration.

use num_traits::ToPrimitive;

use crate::algebra::{IntMatrix, ToralAutomorphism};
use crate::convention::SpectralConvention;
use crate::error::{Error, Result};
use crate::lattice::Ellipsoid;

#[derive(Clone, Debug)]
pub struct OrbitSumTable {
    convention: SpectralConvention,
    a_star: Vec<Vec<i128>>,
    power: Vec<Vec<i128>>,
    gram: Vec<Vec<i128>>,
    /// min_k S_n(k) in the lattice convention, index n − 1.
    mins: Vec<i128>,
    argmins: Vec<Vec<i64>>,
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = a.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s: i128 = 0;
            for (l, bl) in b.iter().enumerate() {
                s = s.checked_add(a[i][l].checked_mul(bl[j])?)?;
            }
            out[i][j] = s;
        }
    }
    Some(out)
}

fn gram_of(p: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = p.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s: i128 = 0;
            for row in p {
                s = s.checked_add(row[i].checked_mul(row[j])?)?;
            }
            out[i][j] = s;
        }
    }
    Some(out)
}

impl OrbitSumTable {
    pub fn new(t: &ToralAutomorphism, convention: SpectralConvention) -> Result<Self> {
        if convention.dimension != t.dim() {
            return Err(Error::validation("convention dimension differs from the map"));
        }
        let a_star = t.a_star().to_i128();
        let n = t.dim();
        let identity = IntMatrix::identity(n).to_i128();
        Ok(OrbitSumTable {
            convention,
            a_star,
            power: identity,
            gram: vec![vec![0; n]; n],
            mins: Vec::new(),
            argmins: Vec::new(),
        })
    }

    pub fn convention(&self) -> SpectralConvention {
        self.convention
    }

    pub fn computed(&self) -> usize {
        self.mins.len()
    }

    fn extend(&mut self) -> Result<()> {
        let ovf = || Error::overflow(format!("forming orbit sums at n = {}", self.mins.len() + 1));
        let next = mat_mul(&self.a_star, &self.power).ok_or_else(ovf)?;
        let g = gram_of(&next).ok_or_else(ovf)?;
        let mut sum = self.gram.clone();
        for i in 0..sum.len() {
            for j in 0..sum.len() {
                sum[i][j] = sum[i][j].checked_add(g[i][j]).ok_or_else(ovf)?;
            }
        }
        let e = Ellipsoid::new(&sum)?;
        let (arg, val) = e.shortest()?;
        let val = val.to_i128().ok_or_else(ovf)?;
        self.power = next;
        self.gram = sum;
        self.mins.push(val);
        self.argmins.push(arg);
        Ok(())
    }

    fn ensure(&mut self, n: usize) -> Result<()> {
        while self.mins.len() < n {
            self.extend()?;
        }
        Ok(())
    }

    /// min_k S_n(k) in the lattice convention (|m|² per orbit point).
    pub fn min_sum_lattice(&mut self, n: usize) -> Result<i128> {
        if n == 0 {
            return Err(Error::validation("n must be at least 1"));
        }
        self.ensure(n)?;
        Ok(self.mins[n - 1])
    }

    /// min_k S_n(k) in the table's convention.
    pub fn min_sum(&mut self, n: usize) -> Result<f64> {
        let s = self.min_sum_lattice(n)?;
        Ok(self.convention.from_norm_sq(s as f64))
    }

    pub fn argmin(&mut self, n: usize) -> Result<Vec<i64>> {
        self.min_sum_lattice(n)?;
        Ok(self.argmins[n - 1].clone())
    }

    /// Gram matrix G_n (lattice convention).
    pub fn gram(&mut self, n: usize) -> Result<Vec<Vec<i128>>> {
        // recompute from scratch: the table only stores the latest sum
        let mut p = IntMatrix::identity(self.a_star.len()).to_i128();
        let mut g = vec![vec![0i128; p.len()]; p.len()];
        let ovf = || Error::overflow("forming orbit sums");
        for _ in 0..n {
            p = mat_mul(&self.a_star, &p).ok_or_else(ovf)?;
            let h = gram_of(&p).ok_or_else(ovf)?;
            for i in 0..g.len() {
                for j in 0..g.len() {
                    g[i][j] = g[i][j].checked_add(h[i][j]).ok_or_else(ovf)?;
                }
            }
        }
        Ok(g)
    }

    /// ln ‖(e^{νΔ}U)ⁿ‖ = −ν min S_n.
    pub fn log_norm(&mut self, nu: f64, n: usize) -> Result<f64> {
        Ok(-nu * self.min_sum(n)?)
    }

    /// Smallest n with ν min S_n > 1. A tie at exactly 1 takes the next n.
    pub fn tau_d(&mut self, nu: f64) -> Result<usize> {
        if !(nu > 0.0) {
            return Err(Error::validation(format!("nu must be positive, got {nu}")));
        }
        let mut n = 1;
        loop {
            match self.min_sum(n) {
                Ok(s) => {
                    if nu * s > 1.0 {
                        return Ok(n);
                    }
                }
                Err(Error::Overflow { context, .. }) => {
                    let last = if self.mins.is_empty() {
                        None
                    } else {
                        Some(1.0 / self.convention.from_norm_sq(*self.mins.last().unwrap() as f64))
                    };
                    return Err(Error::Overflow {
                        context,
                        max_feasible_nu: last,
                    });
                }
                Err(e) => return Err(e),
            }
            n += 1;
        }
    }
}

/// τ_d for a toral automorphism. Requires that no eigenvalue is a root of
/// unity; otherwise S_n need not grow and the search has no horizon.
pub fn tau_d_exact(t: &ToralAutomorphism, nu: f64, convention: SpectralConvention) -> Result<usize> {
    let c = t.conditions()?;
    if !c.c1_no_root_of_unity {
        return Err(Error::Condition(format!(
            "an eigenvalue is a root of unity (divisor {})",
            c.cyclotomic_witness.map(|w| w.poly).unwrap_or_default()
        )));
    }
    OrbitSumTable::new(t, convention)?.tau_d(nu)
}

/// ⌊1/(νλ₁)⌋ + 1, the horizon after which pure heat decay alone suffices.
pub fn trivial_bound(nu: f64, convention: SpectralConvention) -> usize {
    (1.0 / (nu * convention.lambda1())).floor() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convention::Mode;

    /// Naive minimum over a ball whose radius is certified by
    /// S_n(k) ≥ |A_* k|² ≥ σ_min(A_*)² |k|².
    fn naive_min(t: &ToralAutomorphism, n: usize) -> i128 {
        let s = |k: &Mode| {
            let mut m = *k;
            let mut tot = 0i128;
            for _ in 0..n {
                m = t.push_mode(&m).unwrap();
                tot += m.norm_sq();
            }
            tot
        };
        let mut best = s(&Mode::new(&[1, 0])).min(s(&Mode::new(&[0, 1])));
        let sigma = t.a_star().min_singular_value();
        let r = ((best as f64).sqrt() / sigma).ceil() as i64 + 1;
        for a in -r..=r {
            for b in -r..=r {
                if a == 0 && b == 0 {
                    continue;
                }
                best = best.min(s(&Mode::new(&[a, b])));
            }
        }
        best
    }

    #[test]
    fn cat_map_small_sums() {
        let t = ToralAutomorphism::cat_map();
        let mut tab = OrbitSumTable::new(&t, SpectralConvention::lattice(2)).unwrap();
        assert_eq!(tab.min_sum_lattice(3).unwrap(), 8);
        assert_eq!(tab.min_sum_lattice(4).unwrap(), 21);
        for n in 1..=7 {
            assert_eq!(tab.min_sum_lattice(n).unwrap(), naive_min(&t, n), "n={n}");
        }
    }

    #[test]
    fn cat_map_tau_at_tenth() {
        let t = ToralAutomorphism::cat_map();
        assert_eq!(tau_d_exact(&t, 0.1, SpectralConvention::lattice(2)).unwrap(), 4);
    }

    #[test]
    fn large_nu_gives_one() {
        let t = ToralAutomorphism::parse("3,2,1,1").unwrap();
        let mut tab = OrbitSumTable::new(&t, SpectralConvention::lattice(2)).unwrap();
        let s1 = tab.min_sum(1).unwrap();
        assert_eq!(tab.tau_d(1.01 / s1).unwrap(), 1);
    }

    #[test]
    fn tie_takes_next_step() {
        let t = ToralAutomorphism::cat_map();
        let mut tab = OrbitSumTable::new(&t, SpectralConvention::lattice(2)).unwrap();
        // min S_3 = 8 exactly at ν = 1/8
        assert_eq!(tab.tau_d(0.125).unwrap(), 4);
    }

    #[test]
    fn root_of_unity_rejected() {
        let t = ToralAutomorphism::parse("0,-1,1,0").unwrap();
        assert!(matches!(
            tau_d_exact(&t, 0.1, SpectralConvention::lattice(2)),
            Err(Error::Condition(_))
        ));
    }

    #[test]
    fn overflow_reports_feasible_nu() {
        let t = ToralAutomorphism::cat_map();
        match tau_d_exact(&t, 1e-40, SpectralConvention::lattice(2)) {
            Err(Error::Overflow { max_feasible_nu: Some(v), .. }) => assert!(v > 1e-40 && v < 1e-15, "{v}"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn sums_are_monotone() {
        let t = ToralAutomorphism::parse("0,0,1,1,0,1,0,1,0").unwrap();
        let mut tab = OrbitSumTable::new(&t, SpectralConvention::lattice(t.dim())).unwrap();
        let mut prev = 0;
        for n in 1..12 {
            let s = tab.min_sum_lattice(n).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }
}
