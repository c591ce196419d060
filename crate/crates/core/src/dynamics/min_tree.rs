/// Tournament tree over agent indices that tracks the argmin of an external
/// value slice. Ties resolve to the lower index.
#[derive(Clone, Debug)]
pub(crate) struct MinTree {
    leaves: usize,
    nodes: Vec<u32>,
}

const EMPTY: u32 = u32::MAX;

impl MinTree {
    pub(crate) fn build(values: &[f64]) -> Self {
        let leaves = values.len().next_power_of_two().max(1);
        let mut nodes = vec![EMPTY; 2 * leaves];
        for i in 0..values.len() {
            nodes[leaves + i] = i as u32;
        }
        let mut tree = MinTree { leaves, nodes };
        for k in (1..leaves).rev() {
            tree.nodes[k] = tree.pick(2 * k, 2 * k + 1, values);
        }
        tree
    }

    #[inline]
    fn pick(&self, left: usize, right: usize, values: &[f64]) -> u32 {
        let (a, b) = (self.nodes[left], self.nodes[right]);
        if a == EMPTY {
            return b;
        }
        if b == EMPTY {
            return a;
        }
        if values[b as usize] < values[a as usize] {
            b
        } else {
            a
        }
    }

    /// Re-seats `index` after its value changed.
    pub(crate) fn update(&mut self, index: usize, values: &[f64]) {
        let mut k = (self.leaves + index) / 2;
        while k >= 1 {
            self.nodes[k] = self.pick(2 * k, 2 * k + 1, values);
            k /= 2;
        }
    }

    pub(crate) fn argmin(&self) -> usize {
        self.nodes[1.min(self.nodes.len() - 1)] as usize
    }
}
