use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{coordinate_index, slot_indices};

/// Exponents of `(s1, s2, s3, s4)` in a torus monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVector(pub [i32; 4]);

impl Add for WeightVector {
    type Output = WeightVector;
    fn add(self, o: WeightVector) -> WeightVector {
        WeightVector(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Neg for WeightVector {
    type Output = WeightVector;
    fn neg(self) -> WeightVector {
        WeightVector(self.0.map(|e| -e))
    }
}

impl WeightVector {
    pub const ONE: WeightVector = WeightVector([0; 4]);

    /// Only `s_k` occurs.
    pub fn is_pure_power_of(&self, k: usize) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| (i == k) == (e != 0))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| if e == 1 { format!("s{}", i + 1) } else { format!("s{}^{}", i + 1, e) })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Diagonal torus characters `t_1..t_4` in the `s`-exponents; they multiply to 1.
pub const TORUS_CHARACTERS: [WeightVector; 4] = [
    WeightVector([0, -3, -1, -1]),
    WeightVector([0, 1, -1, -1]),
    WeightVector([0, 1, 1, -1]),
    WeightVector([0, 1, 1, 3]),
];

/// Exponents of the Haar measure `dg` on the torus part.
pub const HAAR_EXPONENTS: WeightVector = WeightVector([-2, -12, -8, -12]);

/// `w(a_ij) = s1^-1 t_i t_j`, `w(b_ij) = s1 t_i t_j`.
pub fn coordinate_weight(label: &str) -> Result<WeightVector> {
    let k = coordinate_index(label)?;
    let (i, j) = slot_indices(k % 10);
    let s1 = WeightVector([if k < 10 { -1 } else { 1 }, 0, 0, 0]);
    Ok(s1 + TORUS_CHARACTERS[i] + TORUS_CHARACTERS[j])
}

/// A bound `monomial = O(X^(power/24))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Estimate {
    pub monomial: WeightVector,
    pub power: i32,
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { monomial: self.monomial + o.monomial, power: self.power + o.power }
    }
}

/// The estimates `X^(1/24) w(t) >> 1` for `t = a14, a23, b13, b22`, as upper bounds
/// on the inverse weights.
pub fn sibound_estimates() -> [Estimate; 4] {
    ["a14", "a23", "b13", "b22"].map(|l| Estimate { monomial: -coordinate_weight(l).expect("label"), power: 1 })
}

/// Re-derives `s_i = O(X^(1/24))`: (1)(2) bounds `s1`; with it, (3) bounds `s2 s4`,
/// hence `s2` and `s4` since every `s_i` is bounded below; (1)(4) bounds `s3`.
pub fn verify_sibound_products() -> bool {
    let [e1, e2, e3, e4] = sibound_estimates();
    let printed = [[1, 2, 0, -2], [1, -2, 0, 2], [-1, 2, 0, 2], [-1, -2, 2, 2]];
    if [e1, e2, e3, e4].iter().zip(printed).any(|(e, m)| e.monomial != WeightVector(m)) {
        return false;
    }
    let s1_squared = e1 + e2;
    let s1 = Estimate { monomial: WeightVector([1, 0, 0, 0]), power: 1 };
    let s2s4_squared = e3 + s1;
    let s3_squared = e1 + e4;
    s1_squared == Estimate { monomial: WeightVector([2, 0, 0, 0]), power: 2 }
        && s2s4_squared == Estimate { monomial: WeightVector([0, 2, 0, 2]), power: 2 }
        && s3_squared == Estimate { monomial: WeightVector([0, 0, 2, 0]), power: 2 }
}
