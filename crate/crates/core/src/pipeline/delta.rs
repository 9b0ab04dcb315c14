use std::collections::BTreeSet;

use crate::ntcore::PrimeBasis;

/// Residues mod 8 showing that `x^2 + S` never vanishes mod 8.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueWitness {
    /// `x^2 mod 8` for odd `x`; `x` is odd because `S` is odd and the
    /// right-hand side is even.
    pub square_residues: Vec<u64>,
    /// Residues of basis products mod 8.
    pub unit_residues: Vec<u64>,
    /// Every possible `x^2 + S mod 8`.
    pub sums: Vec<u64>,
}

impl ResidueWitness {
    pub fn excludes_zero(&self) -> bool {
        !self.sums.contains(&0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaReduction {
    Feasible {
        lambda: u32,
    },
    StructurallyEmpty(ResidueWitness),
    /// `delta >= 3` and the mod 8 argument fails for this basis.
    Unresolved(ResidueWitness),
}

/// Residue witness mod 8 for the given basis.
pub fn mod8_witness(basis: &PrimeBasis) -> ResidueWitness {
    let square_residues: BTreeSet<u64> = (1..8u64).step_by(2).map(|x| x * x % 8).collect();
    let mut units = BTreeSet::from([1u64]);
    loop {
        let next: BTreeSet<u64> =
            units.iter().flat_map(|u| basis.primes().iter().map(move |p| u * (p % 8) % 8)).chain(units.iter().copied()).collect();
        if next == units {
            break;
        }
        units = next;
    }
    let sums: BTreeSet<u64> = square_residues.iter().flat_map(|s| units.iter().map(move |u| (s + u) % 8)).collect();
    ResidueWitness {
        square_residues: square_residues.into_iter().collect(),
        unit_residues: units.into_iter().collect(),
        sums: sums.into_iter().collect(),
    }
}

/// Classifies `2^delta y^n` right-hand sides.
pub fn check_delta_reduction(delta: u32, basis: &PrimeBasis) -> DeltaReduction {
    if delta <= 2 {
        return DeltaReduction::Feasible { lambda: 1 << delta };
    }
    let w = mod8_witness(basis);
    if w.excludes_zero() {
        DeltaReduction::StructurallyEmpty(w)
    } else {
        DeltaReduction::Unresolved(w)
    }
}
