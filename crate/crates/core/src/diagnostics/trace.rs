use std::time::Duration;

/// Sample record of one chain: every iterate, its hold flag, and run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub model: String,
    pub seed: u64,
    pub zeta: f64,
    pub n: usize,
    pub d: usize,
    /// Whether a variance column follows the `d` coefficient columns.
    pub has_v: bool,
    pub ns_per_iter: f64,
    /// MALA acceptance rate, when applicable.
    pub accept_rate: Option<f64>,
    samples: Vec<f64>,
    held: Vec<bool>,
}

impl Trace {
    pub fn new(model: &str, seed: u64, zeta: f64, n: usize, d: usize, has_v: bool) -> Self {
        Self {
            model: model.to_string(),
            seed,
            zeta,
            n,
            d,
            has_v,
            ns_per_iter: 0.0,
            accept_rate: None,
            samples: Vec::new(),
            held: Vec::new(),
        }
    }

    /// Builds a trace from rows of samples, none held.
    pub fn from_rows<I: IntoIterator<Item = Vec<f64>>>(model: &str, d: usize, has_v: bool, rows: I) -> Self {
        let mut t = Self::new(model, 0, 0.0, 0, d, has_v);
        for r in rows {
            t.push(r, false);
        }
        t
    }

    pub fn reserve(&mut self, iters: usize) {
        self.samples.reserve(iters * self.cols());
        self.held.reserve(iters);
    }

    /// Appends one row; panics if it has the wrong width.
    pub fn push<I: IntoIterator<Item = f64>>(&mut self, row: I, held: bool) {
        let before = self.samples.len();
        self.samples.extend(row);
        assert_eq!(self.samples.len() - before, self.cols(), "trace row width");
        self.held.push(held);
    }

    pub fn set_runtime(&mut self, elapsed: Duration, iters: usize) {
        self.ns_per_iter = if iters == 0 { 0.0 } else { elapsed.as_nanos() as f64 / iters as f64 };
    }

    pub fn cols(&self) -> usize {
        self.d + self.has_v as usize
    }

    pub fn len(&self) -> usize {
        self.held.len()
    }

    pub fn is_empty(&self) -> bool {
        self.held.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.samples[i * c..(i + 1) * c]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.column_from(j, 0)
    }

    /// Column `j` from row `start` on.
    pub fn column_from(&self, j: usize, start: usize) -> Vec<f64> {
        (start..self.len()).map(|i| self.row(i)[j]).collect()
    }

    pub fn held(&self) -> &[bool] {
        &self.held
    }

    /// `beta_1..beta_d` and, for lasso traces, `v`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.d).map(|j| format!("beta_{j}")).collect();
        if self.has_v {
            names.push("v".into());
        }
        names
    }
}
