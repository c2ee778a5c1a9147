//! Two-mode truncated Fock bases.

/// Enumeration of two-mode number states |n_a, n_b> with per-mode
/// cutoffs and an optional cap on the total excitation. The capped
/// variant is exact for the post-pulse dynamics, which never raise the
/// total excitation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n_max_a: usize,
    n_max_b: usize,
    cap: Option<usize>,
    states: Vec<(u32, u32)>,
    index: Vec<u32>,
}

const NO_STATE: u32 = u32::MAX;

impl FockBasis {
    /// All |n_a, n_b> with n_a <= n_max_a, n_b <= n_max_b.
    pub fn rectangular(n_max_a: usize, n_max_b: usize) -> Self {
        Self::build(n_max_a, n_max_b, None)
    }

    /// Equal cutoffs with n_a + n_b <= n_max.
    pub fn capped(n_max: usize) -> Self {
        Self::build(n_max, n_max, Some(n_max))
    }

    fn build(n_max_a: usize, n_max_b: usize, cap: Option<usize>) -> Self {
        let width = n_max_b + 1;
        let mut states = Vec::new();
        let mut index = vec![NO_STATE; (n_max_a + 1) * width];
        for n_a in 0..=n_max_a {
            for n_b in 0..=n_max_b {
                if let Some(c) = cap {
                    if n_a + n_b > c {
                        continue;
                    }
                }
                index[n_a * width + n_b] = states.len() as u32;
                states.push((n_a as u32, n_b as u32));
            }
        }
        Self { n_max_a, n_max_b, cap, states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_max_a(&self) -> usize {
        self.n_max_a
    }

    pub fn n_max_b(&self) -> usize {
        self.n_max_b
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    /// Index of |n_a, n_b>, or None when outside the basis.
    pub fn index_of(&self, n_a: i64, n_b: i64) -> Option<usize> {
        if n_a < 0 || n_b < 0 || n_a > self.n_max_a as i64 || n_b > self.n_max_b as i64 {
            return None;
        }
        let flat = self.index[n_a as usize * (self.n_max_b + 1) + n_b as usize];
        if flat == NO_STATE {
            None
        } else {
            Some(flat as usize)
        }
    }
}
