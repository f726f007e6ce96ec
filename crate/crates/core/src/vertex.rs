//! Vertex labels of the BIT model.
//!
//! In the BIT graph two naturals `m < n` are adjacent iff bit `m` of `n` is
//! set. Greedy constructions quickly leave machine range: every new member of a
//! clique must have the previous member as a bit position, so a clique of size
//! `k` needs labels that are towers of twos of height about `k`. A [`Vertex`]
//! therefore stores a large label as the ascending list of its one-bit
//! positions, each position being a [`Vertex`] again. Labels below `2^64` are
//! kept inline.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

/// A natural number, used as a vertex label of the BIT model.
#[derive(Clone)]
pub struct Vertex(Repr);

#[derive(Clone)]
enum Repr {
    Small(u64),
    Large(Arc<Large>),
}

struct Large {
    /// Ascending one-bit positions; the last one is at least 64.
    bits: Vec<Vertex>,
    fingerprint: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Vertex {
    pub const ZERO: Vertex = Vertex(Repr::Small(0));

    pub const fn new(value: u64) -> Self {
        Vertex(Repr::Small(value))
    }

    /// The natural whose one-bits are exactly `positions` (duplicates ignored).
    pub fn from_bits(mut positions: Vec<Vertex>) -> Self {
        positions.sort();
        positions.dedup();
        match positions.last() {
            None => Vertex::ZERO,
            Some(top) if top.as_u64().is_some_and(|t| t < 64) => {
                let value = positions
                    .iter()
                    .fold(0u64, |acc, p| acc | (1u64 << p.as_u64().unwrap_or(0)));
                Vertex(Repr::Small(value))
            }
            Some(_) => {
                let fingerprint = positions
                    .iter()
                    .fold(0x5151_u64, |acc, p| mix(acc ^ p.fingerprint()));
                Vertex(Repr::Large(Arc::new(Large {
                    bits: positions,
                    fingerprint,
                })))
            }
        }
    }

    /// The value, if it fits in a `u64`.
    pub fn as_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Large(_) => None,
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }

    /// Whether bit `position` of this natural is one.
    pub fn bit(&self, position: &Vertex) -> bool {
        match &self.0 {
            Repr::Small(v) => match position.as_u64() {
                Some(p) if p < 64 => (v >> p) & 1 == 1,
                _ => false,
            },
            Repr::Large(large) => large.bits.binary_search(position).is_ok(),
        }
    }

    /// The one-bit positions in ascending order.
    pub fn bits(&self) -> Vec<Vertex> {
        match &self.0 {
            Repr::Small(v) => (0..64u64)
                .filter(|p| (v >> p) & 1 == 1)
                .map(Vertex::new)
                .collect(),
            Repr::Large(large) => large.bits.clone(),
        }
    }

    /// Number of one-bits.
    pub fn popcount(&self) -> usize {
        match &self.0 {
            Repr::Small(v) => v.count_ones() as usize,
            Repr::Large(large) => large.bits.len(),
        }
    }

    /// `self + 1`.
    pub fn succ(&self) -> Vertex {
        match &self.0 {
            Repr::Small(v) if *v < u64::MAX => Vertex::new(v + 1),
            Repr::Small(_) => Vertex::from_bits(vec![Vertex::new(64)]),
            Repr::Large(large) => {
                // The trailing ones 0..t-1 carry into position t.
                let t = large
                    .bits
                    .iter()
                    .enumerate()
                    .take_while(|(i, b)| b.as_u64() == Some(*i as u64))
                    .count();
                let mut bits = Vec::with_capacity(large.bits.len() - t + 1);
                bits.push(Vertex::new(t as u64));
                bits.extend(large.bits[t..].iter().cloned());
                Vertex::from_bits(bits)
            }
        }
    }

    /// Nesting depth of the sparse representation (0 for inline values).
    pub fn height(&self) -> usize {
        match &self.0 {
            Repr::Small(_) => 0,
            Repr::Large(large) => 1 + large.bits.iter().map(Vertex::height).max().unwrap_or(0),
        }
    }

    fn fingerprint(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => mix(*v),
            Repr::Large(large) => large.fingerprint,
        }
    }
}

impl Default for Vertex {
    fn default() -> Self {
        Vertex::ZERO
    }
}

impl From<u64> for Vertex {
    fn from(v: u64) -> Self {
        Vertex::new(v)
    }
}

impl From<u32> for Vertex {
    fn from(v: u32) -> Self {
        Vertex::new(v as u64)
    }
}

impl From<usize> for Vertex {
    fn from(v: usize) -> Self {
        Vertex::new(v as u64)
    }
}

impl From<i32> for Vertex {
    fn from(v: i32) -> Self {
        assert!(v >= 0, "vertex labels are naturals");
        Vertex::new(v as u64)
    }
}

impl PartialEq for Vertex {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Large(a), Repr::Large(b)) => {
                Arc::ptr_eq(a, b) || (a.fingerprint == b.fingerprint && a.bits == b.bits)
            }
            _ => false,
        }
    }
}

impl Eq for Vertex {}

impl Hash for Vertex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.fingerprint());
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Large(_)) => Ordering::Less,
            (Repr::Large(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Large(a), Repr::Large(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                for (x, y) in a.bits.iter().rev().zip(b.bits.iter().rev()) {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                a.bits.len().cmp(&b.bits.len())
            }
        }
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Large(large) => {
                // Top bits as powers of two, the low part folded into one number.
                let mut low = 0u64;
                let mut first = true;
                for b in large.bits.iter().rev() {
                    match b.as_u64() {
                        Some(p) if p < 64 => low |= 1 << p,
                        _ => {
                            if !first {
                                write!(f, "+")?;
                            }
                            first = false;
                            if b.is_small() {
                                write!(f, "2^{b}")?;
                            } else {
                                write!(f, "2^({b})")?;
                            }
                        }
                    }
                }
                if low != 0 {
                    write!(f, "+{low}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Inline values serialize as JSON integers, larger ones as `{"bits": [..]}`.
impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Small(v) => serializer.serialize_u64(*v),
            Repr::Large(large) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("bits", &large.bits)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VertexVisitor;

        impl<'de> Visitor<'de> for VertexVisitor {
            type Value = Vertex;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a natural number or {\"bits\": [...]}")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Vertex, E> {
                Ok(Vertex::new(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Vertex, E> {
                u64::try_from(v)
                    .map(Vertex::new)
                    .map_err(|_| E::custom("negative vertex label"))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Vertex, A::Error> {
                let mut bits: Option<Vec<Vertex>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    if key == "bits" {
                        bits = Some(map.next_value()?);
                    } else {
                        return Err(de::Error::unknown_field(&key, &["bits"]));
                    }
                }
                bits.map(Vertex::from_bits)
                    .ok_or_else(|| de::Error::missing_field("bits"))
            }
        }

        deserializer.deserialize_any(VertexVisitor)
    }
}
