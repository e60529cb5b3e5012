/// Dense grid of per-index values for a contiguous range of orders.
///
/// Row `m` holds the `N` values of order `m`; `first_order` is 0 for tables
/// that materialize the trivial order-0 row and 1 otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderTable {
    first_order: usize,
    n: usize,
    data: Vec<f64>,
}

impl OrderTable {
    pub fn zeros(first_order: usize, max_order: usize, n: usize) -> Self {
        assert!(max_order + 1 >= first_order);
        let rows = max_order + 1 - first_order;
        Self {
            first_order,
            n,
            data: vec![0.0; rows * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first_order(&self) -> usize {
        self.first_order
    }

    pub fn max_order(&self) -> usize {
        self.first_order + self.data.len() / self.n.max(1) - 1
    }

    #[inline]
    fn offset(&self, order: usize) -> usize {
        debug_assert!(order >= self.first_order && order <= self.max_order());
        (order - self.first_order) * self.n
    }

    /// The `N` values of one order.
    #[inline]
    pub fn order(&self, order: usize) -> &[f64] {
        let start = self.offset(order);
        &self.data[start..start + self.n]
    }

    #[inline]
    pub fn order_mut(&mut self, order: usize) -> &mut [f64] {
        let start = self.offset(order);
        let n = self.n;
        &mut self.data[start..start + n]
    }

    /// Value at `order` and 0-based index `i`.
    #[inline]
    pub fn get(&self, order: usize, i: usize) -> f64 {
        self.data[self.offset(order) + i]
    }

    #[inline]
    pub fn set(&mut self, order: usize, i: usize, value: f64) {
        let at = self.offset(order) + i;
        self.data[at] = value;
    }

    /// Drops every order above `max_order`.
    pub fn truncate(&mut self, max_order: usize) {
        let rows = max_order + 1 - self.first_order;
        self.data.truncate(rows * self.n);
    }

    /// Sum over indices of one order.
    pub fn order_sum(&self, order: usize) -> f64 {
        self.order(order).iter().sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Iterates `(order, row)` pairs in increasing order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[f64])> {
        let first = self.first_order;
        self.data
            .chunks(self.n.max(1))
            .enumerate()
            .map(move |(k, row)| (first + k, row))
    }
}

/// Diagonal entries `v_i^{(m)}` of `(B^T B)^{-m}` and `w_i^{(m)}` of
/// `(B B^T)^{-m}` for `m = 0..=order_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagTable {
    pub order_max: usize,
    pub v: OrderTable,
    pub w: OrderTable,
    /// `z_i^{(q)}` for `q = 0..order_max-1`; only the subtractive engine has one.
    pub z: Option<OrderTable>,
    pub method: crate::Method,
    pub warnings: Vec<CancellationWarning>,
}

impl DiagTable {
    /// `Tr((B^T B)^{-m})` as the sum of `v^{(m)}`.
    pub fn trace_upper(&self, m: usize) -> f64 {
        self.v.order_sum(m)
    }

    /// `Tr((B B^T)^{-m})` as the sum of `w^{(m)}`.
    pub fn trace_lower(&self, m: usize) -> f64 {
        self.w.order_sum(m)
    }
}

/// A computed diagonal entry that came out nonpositive although its exact
/// value is positive: proof of catastrophic cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancellationWarning {
    pub order: usize,
    /// 1-based index.
    pub index: usize,
    pub table: DiagKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagKind {
    V,
    W,
}

impl std::fmt::Display for CancellationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.table {
            DiagKind::V => "v",
            DiagKind::W => "w",
        };
        write!(
            f,
            "cancellation: {name}_{}^({}) = {:e} is not positive",
            self.index, self.order, self.value
        )
    }
}
