/// Outcome of checking a candidate object against a definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W, V> {
    Verified(W),
    Violated(V),
}

impl<W, V> Verdict<W, V> {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified(_))
    }

    pub fn verified(self) -> Option<W> {
        match self {
            Verdict::Verified(w) => Some(w),
            Verdict::Violated(_) => None,
        }
    }

    pub fn violation(self) -> Option<V> {
        match self {
            Verdict::Verified(_) => None,
            Verdict::Violated(v) => Some(v),
        }
    }
}
