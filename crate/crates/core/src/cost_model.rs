//! Search and cleanup cost primitives.
//!
//! The list is binary searched and the pile is scanned sequentially. Costs are
//! the smooth averages `b(j)`, `b_f(j)` and `s(j)` for successful binary,
//! failed binary and successful sequential searches on `j` objects; for
//! `j + 1` a power of two the binary ones coincide with exact comparison
//! counts.
//!
//! Every pile-dependent function here takes the *pile size* `j` (not the list
//! size), so a list search with `j` objects on the desk costs
//! `list_search_cost(model, n, j)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

/// Whether the searcher knows which objects are on the pile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Memory {
    None,
    Complete,
}

/// Whether every object owns a fixed slot on the shelves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shelves {
    Unnumbered,
    Numbered,
}

/// One of the four search models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Model {
    pub memory: Memory,
    pub shelves: Shelves,
}

impl Model {
    /// No memory, unnumbered shelves.
    pub const M1: Model = Model::new(Memory::None, Shelves::Unnumbered);
    /// No memory, numbered shelves.
    pub const M2: Model = Model::new(Memory::None, Shelves::Numbered);
    /// Complete memory, unnumbered shelves.
    pub const M3: Model = Model::new(Memory::Complete, Shelves::Unnumbered);
    /// Complete memory, numbered shelves.
    pub const M4: Model = Model::new(Memory::Complete, Shelves::Numbered);

    pub const ALL: [Model; 4] = [Model::M1, Model::M2, Model::M3, Model::M4];

    pub const fn new(memory: Memory, shelves: Shelves) -> Self {
        Model { memory, shelves }
    }

    pub fn is_numbered(self) -> bool {
        self.shelves == Shelves::Numbered
    }

    pub fn has_memory(self) -> bool {
        self.memory == Memory::Complete
    }

    /// Canonical short name, `m1` through `m4`.
    pub fn name(self) -> &'static str {
        match (self.memory, self.shelves) {
            (Memory::None, Shelves::Unnumbered) => "m1",
            (Memory::None, Shelves::Numbered) => "m2",
            (Memory::Complete, Shelves::Unnumbered) => "m3",
            (Memory::Complete, Shelves::Numbered) => "m4",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m1" => Ok(Model::M1),
            "m2" => Ok(Model::M2),
            "m3" => Ok(Model::M3),
            "m4" => Ok(Model::M4),
            other => Err(Error::Domain(format!(
                "unknown model {other:?}, expected one of m1, m2, m3, m4"
            ))),
        }
    }
}

// Unchecked primitives. `b_f(0) = 0` is meaningful (a failed search over an
// empty list costs nothing) and shows up when the pile holds every object.

#[inline]
pub(crate) fn b(j: usize) -> f64 {
    let j = j as f64;
    (1.0 + 1.0 / j) * (j + 1.0).log2() - 1.0
}

#[inline]
pub(crate) fn b_fail(j: usize) -> f64 {
    ((j + 1) as f64).log2()
}

#[inline]
pub(crate) fn seq(j: usize) -> f64 {
    (j as f64 + 1.0) / 2.0
}

/// `b(j) = (1 + 1/j) log2(j + 1) - 1`, the average successful binary search
/// cost on `j` objects.
pub fn binary_success_cost(j: usize) -> Result<f64> {
    ensure!(j >= 1, "binary search cost needs j >= 1, got {j}");
    Ok(b(j))
}

/// `b_f(j) = log2(j + 1)`, the failed binary search cost on `j` objects.
pub fn binary_fail_cost(j: usize) -> Result<f64> {
    ensure!(j >= 1, "failed binary search cost needs j >= 1, got {j}");
    Ok(b_fail(j))
}

/// `s(j) = (j + 1) / 2`, the successful sequential search cost.
pub fn sequential_cost(j: usize) -> Result<f64> {
    ensure!(j >= 1, "sequential search cost needs j >= 1, got {j}");
    Ok(seq(j))
}

#[inline]
pub(crate) fn list_cost(model: Model, n: usize, pile: usize) -> f64 {
    match model.shelves {
        Shelves::Unnumbered => b(n - pile),
        Shelves::Numbered => b(n),
    }
}

#[inline]
pub(crate) fn pile_cost(model: Model, n: usize, pile: usize) -> f64 {
    match (model.memory, model.shelves) {
        (Memory::None, Shelves::Unnumbered) => b_fail(n - pile) + seq(pile),
        (Memory::None, Shelves::Numbered) => b_fail(n) + seq(pile),
        (Memory::Complete, _) => seq(pile),
    }
}

pub(crate) fn cleanup(model: Model, n: usize, m: usize) -> f64 {
    match model.shelves {
        Shelves::Numbered => m as f64 * b(n),
        Shelves::Unnumbered => (1..=m).map(|j| b_fail(n - j)).sum(),
    }
}

/// Cost of searching the list for an object that is on it, while the pile
/// holds `pile` objects.
pub fn list_search_cost(model: Model, n: usize, pile: usize) -> Result<f64> {
    ensure!(pile < n, "list search needs pile size < n (pile {pile}, n {n})");
    Ok(list_cost(model, n, pile))
}

/// Cost of finding an object that is on a pile of `pile` objects. For the
/// memoryless models this includes the failed list search that precedes the
/// scan.
pub fn pile_search_cost(model: Model, n: usize, pile: usize) -> Result<f64> {
    ensure!(
        (1..=n).contains(&pile),
        "pile search needs 1 <= pile <= n (pile {pile}, n {n})"
    );
    Ok(pile_cost(model, n, pile))
}

/// Average cost `C_m` of putting a pile of `m` objects back.
///
/// Numbered shelves: `m b(n)`. Unnumbered shelves: the objects are inserted
/// one at a time into a growing list, `sum_{j=1..m} b_f(n - j)`.
pub fn cleanup_cost(model: Model, n: usize, m: usize) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "cleanup needs 1 <= m <= n (m {m}, n {n})");
    Ok(cleanup(model, n, m))
}

/// Average total cost of taking one object out of the list when cleaning at
/// pile size `m`: its list search plus its share of the cleanup.
pub fn star_cost(model: Model, n: usize, m: usize) -> Result<f64> {
    ensure!(
        m >= 1 && m <= n,
        "star cost needs 1 <= m <= n (m {m}, n {n})"
    );
    let searches: f64 = (0..m).map(|j| list_cost(model, n, j)).sum();
    Ok((searches + cleanup(model, n, m)) / m as f64)
}
