use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::setalg::FSet;
use crate::Rational;

/// `A = Ā ∪ Ã` with `Ā = {a ∈ A : -a ∈ A}` and `Ã = A \ Ā`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSplit {
    pub sym: FSet,
    pub antisym: FSet,
    /// `|Ã| / |A|`.
    pub u: Rational,
}

impl SymSplit {
    pub fn is_symmetric(&self) -> bool {
        self.antisym.is_empty()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.sym.is_empty()
    }
}

pub fn sym_split(a: &FSet) -> Result<SymSplit> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let sym = a.intersection(&a.negate())?;
    let antisym = a.without(&sym)?;
    let u = Rational::new(antisym.len() as i128, a.len() as i128);
    Ok(SymSplit { sym, antisym, u })
}

/// The nine sets built from the symmetric and antisymmetric parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NineLabel {
    /// `Ã + ξB̃`
    AntiPlusAnti,
    /// `Ã − ξB̃`
    AntiMinusAnti,
    /// `−Ã + ξB̃`
    NegAntiPlusAnti,
    /// `−Ã − ξB̃`
    NegAntiMinusAnti,
    /// `Ā + ξB̃`
    SymPlusAnti,
    /// `Ā − ξB̃`
    SymMinusAnti,
    /// `Ã + ξB̄`
    AntiPlusSym,
    /// `−Ã + ξB̄`
    NegAntiPlusSym,
    /// `Ā + ξB̄`
    SymPlusSym,
}

impl NineLabel {
    pub const ALL: [NineLabel; 9] = [
        NineLabel::AntiPlusAnti,
        NineLabel::AntiMinusAnti,
        NineLabel::NegAntiPlusAnti,
        NineLabel::NegAntiMinusAnti,
        NineLabel::SymPlusAnti,
        NineLabel::SymMinusAnti,
        NineLabel::AntiPlusSym,
        NineLabel::NegAntiPlusSym,
        NineLabel::SymPlusSym,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            NineLabel::AntiPlusAnti => "Ã+ξB̃",
            NineLabel::AntiMinusAnti => "Ã-ξB̃",
            NineLabel::NegAntiPlusAnti => "-Ã+ξB̃",
            NineLabel::NegAntiMinusAnti => "-Ã-ξB̃",
            NineLabel::SymPlusAnti => "Ā+ξB̃",
            NineLabel::SymMinusAnti => "Ā-ξB̃",
            NineLabel::AntiPlusSym => "Ã+ξB̄",
            NineLabel::NegAntiPlusSym => "-Ã+ξB̄",
            NineLabel::SymPlusSym => "Ā+ξB̄",
        }
    }
}

impl fmt::Display for NineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug)]
pub struct NineSets {
    pub xi: Elem,
    pub sets: Vec<(NineLabel, FSet)>,
    /// `overlaps[i][j] = |S_i ∩ S_j|`; the diagonal holds `|S_i|`.
    pub overlaps: [[usize; 9]; 9],
}

impl NineSets {
    pub fn get(&self, label: NineLabel) -> &FSet {
        &self.sets.iter().find(|(l, _)| *l == label).expect("all nine labels present").1
    }

    pub fn pairwise_disjoint(&self) -> bool {
        (0..9).all(|i| (0..9).all(|j| i == j || self.overlaps[i][j] == 0))
    }

    pub fn total_size(&self) -> usize {
        (0..9).map(|i| self.overlaps[i][i]).sum()
    }

    pub fn union(&self) -> FSet {
        let mut acc = FSet::empty(self.sets[0].1.field());
        for (_, s) in &self.sets {
            acc = acc.union(s).expect("same field");
        }
        acc
    }
}

pub fn nine_sets(split_a: &SymSplit, split_b: &SymSplit, xi: Elem) -> Result<NineSets> {
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let field = split_a.sym.field();
    let (at, ab) = (&split_a.antisym, &split_a.sym);
    let (bt, bb) = (&split_b.antisym, &split_b.sym);
    let neg_at = at.negate();
    let xbt = bt.dilate(xi);
    let nxbt = bt.dilate(field.neg(xi));
    let xbb = bb.dilate(xi);
    let sets = vec![
        (NineLabel::AntiPlusAnti, at.sumset(&xbt)?),
        (NineLabel::AntiMinusAnti, at.sumset(&nxbt)?),
        (NineLabel::NegAntiPlusAnti, neg_at.sumset(&xbt)?),
        (NineLabel::NegAntiMinusAnti, neg_at.sumset(&nxbt)?),
        (NineLabel::SymPlusAnti, ab.sumset(&xbt)?),
        (NineLabel::SymMinusAnti, ab.sumset(&nxbt)?),
        (NineLabel::AntiPlusSym, at.sumset(&xbb)?),
        (NineLabel::NegAntiPlusSym, neg_at.sumset(&xbb)?),
        (NineLabel::SymPlusSym, ab.sumset(&xbb)?),
    ];
    let mut overlaps = [[0usize; 9]; 9];
    for i in 0..9 {
        for j in 0..9 {
            overlaps[i][j] = sets[i].1.intersection(&sets[j].1)?.len();
        }
    }
    Ok(NineSets { xi, sets, overlaps })
}
