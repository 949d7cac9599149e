use serde::Serialize;

/// Where a `k`-block sits relative to the Fibonacci term that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Leading,
    Trailing,
    Middle,
    Boundary,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Leading,
        Category::Trailing,
        Category::Middle,
        Category::Boundary,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Leading => "leading",
            Category::Trailing => "trailing",
            Category::Middle => "middle",
            Category::Boundary => "boundary",
        }
    }
}

/// Start of a block: an offset inside one term, or a start in an earlier
/// term so that the block crosses at least one junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStart {
    InTerm(usize),
    Straddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPosition {
    /// Index of the term holding the block's first digit.
    pub term: u64,
    pub start: BlockStart,
    /// Digit length of that term.
    pub term_len: usize,
}

/// Assigns a block to exactly one positional category.
///
/// A block spanning two or more terms is `Boundary`. Inside a term, offset 0
/// is `Leading`; offset `L - k` is `Trailing` unless it is also offset 0.
pub fn classify_block(p: &BlockPosition, k: usize) -> Category {
    match p.start {
        BlockStart::Straddle => Category::Boundary,
        BlockStart::InTerm(offset) => {
            if offset + k > p.term_len {
                Category::Boundary
            } else if offset == 0 {
                Category::Leading
            } else if offset + k == p.term_len {
                Category::Trailing
            } else {
                Category::Middle
            }
        }
    }
}

/// Category of the `k`-block that ends at digit `end` (0-based) of a term of
/// length `len`. `None` when the block would start before the stream.
#[inline]
pub(crate) fn classify_ending(end: usize, len: usize, k: usize, emitted_before: u64) -> Option<Category> {
    if end + 1 >= k {
        let start = end + 1 - k;
        Some(classify_block(
            &BlockPosition {
                term: 0,
                start: BlockStart::InTerm(start),
                term_len: len,
            },
            k,
        ))
    } else if emitted_before + end as u64 + 1 >= k as u64 {
        Some(Category::Boundary)
    } else {
        None
    }
}
