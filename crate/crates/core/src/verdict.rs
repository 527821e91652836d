use std::cmp::Ordering;

use serde::Serialize;

/// Outcome of a test carried out in ball arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The property is certified to hold.
    Holds,
    /// The property is certified to fail.
    Violated,
    /// The enclosures are too wide to decide.
    Undecided,
}

impl Verdict {
    /// Conjunction: one certified failure decides; otherwise any doubt remains.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Violated, _) | (_, Verdict::Violated) => Verdict::Violated,
            (Verdict::Undecided, _) | (_, Verdict::Undecided) => Verdict::Undecided,
            _ => Verdict::Holds,
        }
    }

    pub fn all<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        it.into_iter().fold(Verdict::Holds, Verdict::and)
    }

    /// Verdict for "x > 0" given a certified sign (or none).
    pub fn positive(sign: Option<Ordering>) -> Verdict {
        match sign {
            Some(Ordering::Greater) => Verdict::Holds,
            Some(_) => Verdict::Violated,
            None => Verdict::Undecided,
        }
    }

    /// Verdict for "x ≥ 0"; an enclosure touching zero from above is undecided.
    pub fn nonnegative(sign: Option<Ordering>) -> Verdict {
        match sign {
            Some(Ordering::Greater) | Some(Ordering::Equal) => Verdict::Holds,
            Some(Ordering::Less) => Verdict::Violated,
            None => Verdict::Undecided,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Violated => 1,
            Verdict::Undecided => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction() {
        use Verdict::*;
        assert_eq!(Verdict::all([Holds, Holds]), Holds);
        assert_eq!(Verdict::all([Holds, Undecided]), Undecided);
        assert_eq!(Verdict::all([Undecided, Violated, Holds]), Violated);
        assert_eq!(Verdict::all([]), Holds);
    }
}
