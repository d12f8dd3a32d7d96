//! Three-valued truth and the Kleene connectives.

use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tv {
    F,
    U,
    T,
}

impl Tv {
    pub const ALL: [Tv; 3] = [Tv::F, Tv::U, Tv::T];

    pub fn from_bool(b: bool) -> Tv {
        if b {
            Tv::T
        } else {
            Tv::F
        }
    }

    /// Reads a (certain, possible) bilattice pair. `None` for the inconsistent corner.
    pub fn from_bounds(certain: bool, possible: bool) -> Option<Tv> {
        match (certain, possible) {
            (true, true) => Some(Tv::T),
            (false, false) => Some(Tv::F),
            (false, true) => Some(Tv::U),
            (true, false) => None,
        }
    }

    pub fn not(self) -> Tv {
        match self {
            Tv::T => Tv::F,
            Tv::F => Tv::T,
            Tv::U => Tv::U,
        }
    }

    pub fn and(self, other: Tv) -> Tv {
        self.min(other)
    }

    pub fn or(self, other: Tv) -> Tv {
        self.max(other)
    }

    /// Truth order f < u < t.
    pub fn le_truth(self, other: Tv) -> bool {
        self <= other
    }

    /// Precision order: u below both t and f.
    pub fn le_precision(self, other: Tv) -> bool {
        self == Tv::U || self == other
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Tv::T => "t",
            Tv::F => "f",
            Tv::U => "u",
        }
    }
}

impl fmt::Display for Tv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Tv {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

/// Truth value in the four-valued bilattice, stored as lower and upper bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub certain: bool,
    pub possible: bool,
}

impl Bounds {
    pub const TRUE: Bounds = Bounds { certain: true, possible: true };
    pub const FALSE: Bounds = Bounds { certain: false, possible: false };

    pub fn exact(b: bool) -> Bounds {
        Bounds { certain: b, possible: b }
    }

    pub fn from_tv(v: Tv) -> Bounds {
        match v {
            Tv::T => Bounds::TRUE,
            Tv::F => Bounds::FALSE,
            Tv::U => Bounds { certain: false, possible: true },
        }
    }

    pub fn not(self) -> Bounds {
        Bounds { certain: !self.possible, possible: !self.certain }
    }

    pub fn and(self, o: Bounds) -> Bounds {
        Bounds { certain: self.certain && o.certain, possible: self.possible && o.possible }
    }

    pub fn tv(self) -> Option<Tv> {
        Tv::from_bounds(self.certain, self.possible)
    }
}
