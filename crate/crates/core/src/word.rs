//! Words over a generating list and its inverses.

use serde::{Deserialize, Serialize};

use crate::gf::Field;
use crate::linalg::Matrix;

/// Generator `index`, or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(index: usize) -> Letter {
        Letter {
            index,
            inverse: false,
        }
    }

    pub fn inv(index: usize) -> Letter {
        Letter {
            index,
            inverse: true,
        }
    }

    pub fn invert(self) -> Letter {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// `i` for a generator, `-(i+1)` for its inverse.
    pub fn signed(self) -> i64 {
        if self.inverse {
            -(self.index as i64) - 1
        } else {
            self.index as i64
        }
    }

    pub fn from_signed(s: i64) -> Letter {
        if s < 0 {
            Letter::inv((-s - 1) as usize)
        } else {
            Letter::gen(s as usize)
        }
    }
}

pub type Word = Vec<Letter>;

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.invert()).collect()
}

pub fn signed_word(w: &[Letter]) -> Vec<i64> {
    w.iter().map(|l| l.signed()).collect()
}

/// Left-to-right product of the letters; `inverses[i]` must invert `gens[i]`.
pub fn evaluate(field: &Field, n: usize, gens: &[Matrix], inverses: &[Matrix], w: &[Letter]) -> Matrix {
    w.iter().fold(Matrix::identity(field, n), |acc, l| {
        let g = if l.inverse { &inverses[l.index] } else { &gens[l.index] };
        acc.mul(g)
    })
}
