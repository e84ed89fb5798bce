//! Semantic place identifiers.
//!
//! Places follow a small textual grammar: `O<k>` an office, `EO<k>` the
//! entrance of office `k`, `C<j>l` / `C<j>r` the two traversal directions of
//! corridor `j`, and `H<i>` a hall. All numeric ids are positive.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One of the two traversal directions of a corridor.
///
/// `R` is travel toward the end with the greater axis coordinate (east for
/// horizontal corridors, north for vertical ones); `L` is the opposite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::L => 'l',
            Side::R => 'r',
        }
    }
}

/// A semantic place label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceId {
    /// `O<k>`: office k.
    Office(u32),
    /// `EO<k>`: the entrance of office k, on the corridor side of its door.
    Entrance(u32),
    /// `C<j>l` / `C<j>r`: corridor j traversed in direction l or r.
    Corridor(u32, Side),
    /// `H<i>`: hall i.
    Hall(u32),
}

impl PlaceId {
    pub fn is_office(&self) -> bool {
        matches!(self, PlaceId::Office(_))
    }

    pub fn is_entrance(&self) -> bool {
        matches!(self, PlaceId::Entrance(_))
    }

    pub fn is_corridor(&self) -> bool {
        matches!(self, PlaceId::Corridor(..))
    }

    pub fn is_hall(&self) -> bool {
        matches!(self, PlaceId::Hall(_))
    }
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceId::Office(k) => write!(f, "O{k}"),
            PlaceId::Entrance(k) => write!(f, "EO{k}"),
            PlaceId::Corridor(j, side) => write!(f, "C{j}{}", side.as_char()),
            PlaceId::Hall(i) => write!(f, "H{i}"),
        }
    }
}

/// Error parsing a place label.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid place id {0:?}")]
pub struct ParsePlaceError(pub String);

impl FromStr for PlaceId {
    type Err = ParsePlaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePlaceError(s.to_string());
        let parse_num = |digits: &str| -> Result<u32, ParsePlaceError> {
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let n: u32 = digits.parse().map_err(|_| err())?;
            if n == 0 {
                return Err(err());
            }
            Ok(n)
        };
        if let Some(rest) = s.strip_prefix("EO") {
            Ok(PlaceId::Entrance(parse_num(rest)?))
        } else if let Some(rest) = s.strip_prefix('O') {
            Ok(PlaceId::Office(parse_num(rest)?))
        } else if let Some(rest) = s.strip_prefix('H') {
            Ok(PlaceId::Hall(parse_num(rest)?))
        } else if let Some(rest) = s.strip_prefix('C') {
            let side = match rest.as_bytes().last() {
                Some(b'l') => Side::L,
                Some(b'r') => Side::R,
                _ => return Err(err()),
            };
            Ok(PlaceId::Corridor(parse_num(&rest[..rest.len() - 1])?, side))
        } else {
            Err(err())
        }
    }
}
