//! Tape-based reverse-mode differentiation over row-major matrices.
//!
//! Every value on a [`Tape`] is a `rows × cols` matrix; batches are laid out
//! one sample per row. Forward operations append nodes in topological order,
//! so [`Tape::backward`] is a single reverse sweep. Nodes that cannot reach a
//! trainable leaf are skipped during the sweep.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};

static NEXT_TAPE_ID: AtomicU32 = AtomicU32::new(1);

/// Handle to a node on a specific tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var {
    tape: u32,
    idx: u32,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Leaf,
    /// `x · wᵀ` with `x: r×k`, `w: c×k`.
    MatMulT(Var, Var),
    /// Adds a `1×c` row to every row of `x`.
    AddRow(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Min(Var, Var),
    Scale(Var, f64),
    AddScalar(Var),
    Relu(Var),
    Tanh(Var),
    Sigmoid(Var),
    Exp(Var),
    Square(Var),
    Clamp(Var, f64, f64),
    ConcatCols(Var, Var),
    SliceCols(Var, usize),
    SliceRows(Var, usize),
    /// LSTM gate activations: sigmoid on (input, forget, output), tanh on the candidate.
    LstmGates(Var),
    /// `c' = f ⊙ c + i ⊙ g` from activated gates.
    LstmCell(Var, Var),
    /// `h' = o ⊙ tanh(c')` from activated gates and the new cell.
    LstmHidden(Var, Var),
    /// `ln(1 − tanh(u)² + eps)` element-wise.
    SquashCorrection(Var, f64),
    SumRows(Var),
    Sum(Var),
    Mean(Var),
}

#[derive(Debug)]
struct Node {
    rows: usize,
    cols: usize,
    value: Vec<f64>,
    op: Op,
    requires_grad: bool,
}

/// Records forward computations and replays them backwards.
#[derive(Debug)]
pub struct Tape {
    id: u32,
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f64>>>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `c += a · b` with explicit strides; `c` is row-major `m × n`.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_strides: (usize, usize),
    b: &[f64],
    b_strides: (usize, usize),
    c: &mut [f64],
    beta: f64,
) {
    debug_assert!(c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: callers pass slices whose extents cover the strided views
    // (checked by the shape validation in the forward ops).
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            a_strides.0 as isize,
            a_strides.1 as isize,
            b.as_ptr(),
            b_strides.0 as isize,
            b_strides.1 as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

impl Tape {
    pub fn new() -> Self {
        Self {
            id: NEXT_TAPE_ID.fetch_add(1, Ordering::Relaxed),
            nodes: Vec::new(),
            grads: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn node(&self, v: Var) -> Result<&Node> {
        if v.tape != self.id {
            return Err(Error::Graph(format!(
                "variable belongs to tape {} but was used on tape {}",
                v.tape, self.id
            )));
        }
        self.nodes
            .get(v.idx as usize)
            .ok_or_else(|| Error::Graph(format!("unknown node {}", v.idx)))
    }

    fn push(
        &mut self,
        rows: usize,
        cols: usize,
        value: Vec<f64>,
        op: Op,
        requires_grad: bool,
    ) -> Var {
        debug_assert_eq!(rows * cols, value.len());
        let idx = self.nodes.len() as u32;
        self.nodes.push(Node {
            rows,
            cols,
            value,
            op,
            requires_grad,
        });
        Var { tape: self.id, idx }
    }

    /// A trainable leaf; gradients are collected for it by [`Tape::backward`].
    pub fn param(&mut self, rows: usize, cols: usize, value: Vec<f64>) -> Result<Var> {
        self.leaf(rows, cols, value, true)
    }

    /// A leaf that never receives gradient.
    pub fn constant(&mut self, rows: usize, cols: usize, value: Vec<f64>) -> Result<Var> {
        self.leaf(rows, cols, value, false)
    }

    /// A leaf that receives gradient without being a parameter (for example an
    /// action fed into a frozen critic).
    pub fn input(&mut self, rows: usize, cols: usize, value: Vec<f64>) -> Result<Var> {
        self.leaf(rows, cols, value, true)
    }

    fn leaf(
        &mut self,
        rows: usize,
        cols: usize,
        value: Vec<f64>,
        requires_grad: bool,
    ) -> Result<Var> {
        if rows * cols != value.len() {
            return Err(Error::shape(
                "leaf",
                format!(
                    "{rows}x{cols} needs {} values, got {}",
                    rows * cols,
                    value.len()
                ),
            ));
        }
        Ok(self.push(rows, cols, value, Op::Leaf, requires_grad))
    }

    pub fn value(&self, v: Var) -> &[f64] {
        &self.nodes[v.idx as usize].value
    }

    pub fn dims(&self, v: Var) -> (usize, usize) {
        let n = &self.nodes[v.idx as usize];
        (n.rows, n.cols)
    }

    /// Gradient of the last backward sweep, if the node received any.
    pub fn grad(&self, v: Var) -> Option<&[f64]> {
        if v.tape != self.id {
            return None;
        }
        self.grads.get(v.idx as usize)?.as_deref()
    }

    fn unary(&mut self, x: Var, op: Op, f: impl Fn(f64) -> f64) -> Result<Var> {
        let n = self.node(x)?;
        let (rows, cols, rg) = (n.rows, n.cols, n.requires_grad);
        let value = n.value.iter().map(|&a| f(a)).collect();
        Ok(self.push(rows, cols, value, op, rg))
    }

    fn binary(
        &mut self,
        a: Var,
        b: Var,
        name: &'static str,
        op: Op,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Var> {
        let (na, nb) = (self.node(a)?, self.node(b)?);
        if (na.rows, na.cols) != (nb.rows, nb.cols) {
            return Err(Error::shape(
                name,
                format!("{}x{} vs {}x{}", na.rows, na.cols, nb.rows, nb.cols),
            ));
        }
        let value = na
            .value
            .iter()
            .zip(&nb.value)
            .map(|(&x, &y)| f(x, y))
            .collect();
        let (rows, cols, rg) = (na.rows, na.cols, na.requires_grad || nb.requires_grad);
        Ok(self.push(rows, cols, value, op, rg))
    }

    pub fn matmul_t(&mut self, x: Var, w: Var) -> Result<Var> {
        let (nx, nw) = (self.node(x)?, self.node(w)?);
        if nx.cols != nw.cols {
            return Err(Error::shape(
                "matmul_t",
                format!("input has {} columns, weight expects {}", nx.cols, nw.cols),
            ));
        }
        let (r, k, c) = (nx.rows, nx.cols, nw.rows);
        let mut out = vec![0.0; r * c];
        gemm(r, k, c, &nx.value, (k, 1), &nw.value, (1, k), &mut out, 0.0);
        let rg = nx.requires_grad || nw.requires_grad;
        Ok(self.push(r, c, out, Op::MatMulT(x, w), rg))
    }

    pub fn add_row(&mut self, x: Var, row: Var) -> Result<Var> {
        let (nx, nr) = (self.node(x)?, self.node(row)?);
        if nr.rows * nr.cols != nx.cols {
            return Err(Error::shape(
                "add_row",
                format!(
                    "row of {} values added to {} columns",
                    nr.rows * nr.cols,
                    nx.cols
                ),
            ));
        }
        let mut value = nx.value.clone();
        for chunk in value.chunks_mut(nx.cols) {
            chunk.iter_mut().zip(&nr.value).for_each(|(v, b)| *v += b);
        }
        let (rows, cols, rg) = (nx.rows, nx.cols, nx.requires_grad || nr.requires_grad);
        Ok(self.push(rows, cols, value, Op::AddRow(x, row), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, "add", Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, "sub", Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, "mul", Op::Mul(a, b), |x, y| x * y)
    }

    /// Element-wise minimum; ties route the gradient to `a`.
    pub fn min(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(
            a,
            b,
            "min",
            Op::Min(a, b),
            |x, y| if x <= y { x } else { y },
        )
    }

    pub fn scale(&mut self, x: Var, factor: f64) -> Result<Var> {
        self.unary(x, Op::Scale(x, factor), |a| a * factor)
    }

    pub fn add_scalar(&mut self, x: Var, offset: f64) -> Result<Var> {
        self.unary(x, Op::AddScalar(x), |a| a + offset)
    }

    pub fn relu(&mut self, x: Var) -> Result<Var> {
        self.unary(x, Op::Relu(x), |a| a.max(0.0))
    }

    pub fn tanh(&mut self, x: Var) -> Result<Var> {
        self.unary(x, Op::Tanh(x), f64::tanh)
    }

    pub fn sigmoid(&mut self, x: Var) -> Result<Var> {
        self.unary(x, Op::Sigmoid(x), sigmoid)
    }

    pub fn exp(&mut self, x: Var) -> Result<Var> {
        self.unary(x, Op::Exp(x), f64::exp)
    }

    pub fn square(&mut self, x: Var) -> Result<Var> {
        self.unary(x, Op::Square(x), |a| a * a)
    }

    /// Clamp with zero gradient outside `[lo, hi]`.
    pub fn clamp(&mut self, x: Var, lo: f64, hi: f64) -> Result<Var> {
        self.unary(x, Op::Clamp(x, lo, hi), |a| a.clamp(lo, hi))
    }

    pub fn squash_correction(&mut self, u: Var, eps: f64) -> Result<Var> {
        self.unary(u, Op::SquashCorrection(u, eps), |a| {
            let t = a.tanh();
            (1.0 - t * t + eps).ln()
        })
    }

    pub fn concat_cols(&mut self, a: Var, b: Var) -> Result<Var> {
        let (na, nb) = (self.node(a)?, self.node(b)?);
        if na.rows != nb.rows {
            return Err(Error::shape(
                "concat_cols",
                format!("{} rows vs {} rows", na.rows, nb.rows),
            ));
        }
        let cols = na.cols + nb.cols;
        let mut value = Vec::with_capacity(na.rows * cols);
        for r in 0..na.rows {
            value.extend_from_slice(&na.value[r * na.cols..(r + 1) * na.cols]);
            value.extend_from_slice(&nb.value[r * nb.cols..(r + 1) * nb.cols]);
        }
        let (rows, rg) = (na.rows, na.requires_grad || nb.requires_grad);
        Ok(self.push(rows, cols, value, Op::ConcatCols(a, b), rg))
    }

    pub fn slice_cols(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let n = self.node(x)?;
        if start + len > n.cols {
            return Err(Error::shape(
                "slice_cols",
                format!("columns {start}..{} of {}", start + len, n.cols),
            ));
        }
        let mut value = Vec::with_capacity(n.rows * len);
        for r in 0..n.rows {
            value.extend_from_slice(&n.value[r * n.cols + start..r * n.cols + start + len]);
        }
        let (rows, rg) = (n.rows, n.requires_grad);
        Ok(self.push(rows, len, value, Op::SliceCols(x, start), rg))
    }

    pub fn slice_rows(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let n = self.node(x)?;
        if start + len > n.rows {
            return Err(Error::shape(
                "slice_rows",
                format!("rows {start}..{} of {}", start + len, n.rows),
            ));
        }
        let value = n.value[start * n.cols..(start + len) * n.cols].to_vec();
        let (cols, rg) = (n.cols, n.requires_grad);
        Ok(self.push(len, cols, value, Op::SliceRows(x, start), rg))
    }

    /// Activates a `B × 4H` block of gate pre-activations laid out as
    /// (input, forget, cell-candidate, output).
    pub fn lstm_gates(&mut self, pre: Var) -> Result<Var> {
        let n = self.node(pre)?;
        if n.cols % 4 != 0 {
            return Err(Error::shape(
                "lstm_gates",
                format!("{} columns is not 4·hidden", n.cols),
            ));
        }
        let h = n.cols / 4;
        let mut value = n.value.clone();
        for row in value.chunks_mut(4 * h) {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if j / h == 2 { v.tanh() } else { sigmoid(*v) };
            }
        }
        let (rows, cols, rg) = (n.rows, n.cols, n.requires_grad);
        Ok(self.push(rows, cols, value, Op::LstmGates(pre), rg))
    }

    pub fn lstm_cell(&mut self, gates: Var, c_prev: Var) -> Result<Var> {
        let (ng, nc) = (self.node(gates)?, self.node(c_prev)?);
        if ng.rows != nc.rows || ng.cols != 4 * nc.cols {
            return Err(Error::shape(
                "lstm_cell",
                format!(
                    "gates {}x{} with cell {}x{}",
                    ng.rows, ng.cols, nc.rows, nc.cols
                ),
            ));
        }
        let h = nc.cols;
        let mut value = vec![0.0; nc.rows * h];
        for r in 0..nc.rows {
            let g = &ng.value[r * 4 * h..(r + 1) * 4 * h];
            let c = &nc.value[r * h..(r + 1) * h];
            for j in 0..h {
                value[r * h + j] = g[h + j] * c[j] + g[j] * g[2 * h + j];
            }
        }
        let (rows, rg) = (nc.rows, ng.requires_grad || nc.requires_grad);
        Ok(self.push(rows, h, value, Op::LstmCell(gates, c_prev), rg))
    }

    pub fn lstm_hidden(&mut self, gates: Var, cell: Var) -> Result<Var> {
        let (ng, nc) = (self.node(gates)?, self.node(cell)?);
        if ng.rows != nc.rows || ng.cols != 4 * nc.cols {
            return Err(Error::shape(
                "lstm_hidden",
                format!(
                    "gates {}x{} with cell {}x{}",
                    ng.rows, ng.cols, nc.rows, nc.cols
                ),
            ));
        }
        let h = nc.cols;
        let mut value = vec![0.0; nc.rows * h];
        for r in 0..nc.rows {
            let g = &ng.value[r * 4 * h..(r + 1) * 4 * h];
            let c = &nc.value[r * h..(r + 1) * h];
            for j in 0..h {
                value[r * h + j] = g[3 * h + j] * c[j].tanh();
            }
        }
        let (rows, rg) = (nc.rows, ng.requires_grad || nc.requires_grad);
        Ok(self.push(rows, h, value, Op::LstmHidden(gates, cell), rg))
    }

    /// Per-row sum, producing an `r × 1` column.
    pub fn sum_rows(&mut self, x: Var) -> Result<Var> {
        let n = self.node(x)?;
        let value = n
            .value
            .chunks(n.cols.max(1))
            .map(|c| c.iter().sum())
            .collect();
        let (rows, rg) = (n.rows, n.requires_grad);
        Ok(self.push(rows, 1, value, Op::SumRows(x), rg))
    }

    pub fn sum(&mut self, x: Var) -> Result<Var> {
        let n = self.node(x)?;
        let s = n.value.iter().sum();
        let rg = n.requires_grad;
        Ok(self.push(1, 1, vec![s], Op::Sum(x), rg))
    }

    pub fn mean(&mut self, x: Var) -> Result<Var> {
        let n = self.node(x)?;
        let s = n.value.iter().sum::<f64>() / n.value.len().max(1) as f64;
        let rg = n.requires_grad;
        Ok(self.push(1, 1, vec![s], Op::Mean(x), rg))
    }

    /// Reverse sweep from a scalar. Gradients from earlier sweeps are discarded.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let n = self.node(loss)?;
        if n.rows * n.cols != 1 {
            return Err(Error::Graph(format!(
                "backward needs a scalar, got {}x{}",
                n.rows, n.cols
            )));
        }
        if matches!(n.op, Op::Leaf) {
            return Err(Error::Graph(
                "backward called on a leaf that no recorded operation produced".into(),
            ));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        let root = loss.idx as usize;
        grads[root] = Some(vec![1.0]);
        for i in (0..=root).rev() {
            if !self.nodes[i].requires_grad {
                continue;
            }
            let Some(g) = grads[i].take() else {
                continue;
            };
            propagate(&self.nodes, &mut grads, i, &g);
            grads[i] = Some(g);
        }
        self.grads = grads;
        Ok(())
    }
}

type Grads = [Option<Vec<f64>>];

fn slot<'a>(nodes: &[Node], grads: &'a mut Grads, v: Var) -> Option<&'a mut [f64]> {
    let i = v.idx as usize;
    if !nodes[i].requires_grad {
        return None;
    }
    let len = nodes[i].value.len();
    Some(
        grads[i]
            .get_or_insert_with(|| vec![0.0; len])
            .as_mut_slice(),
    )
}

fn accumulate(nodes: &[Node], grads: &mut Grads, v: Var, f: impl Fn(usize) -> f64) {
    if let Some(s) = slot(nodes, grads, v) {
        s.iter_mut().enumerate().for_each(|(j, x)| *x += f(j));
    }
}

fn propagate(nodes: &[Node], grads: &mut Grads, i: usize, g: &[f64]) {
    let node = &nodes[i];
    let (rows, cols) = (node.rows, node.cols);
    let val = |v: Var| -> &[f64] { &nodes[v.idx as usize].value };
    match node.op {
        Op::Leaf => {}
        Op::MatMulT(x, w) => {
            let k = nodes[x.idx as usize].cols;
            if let Some(s) = slot(nodes, grads, x) {
                gemm(rows, cols, k, g, (cols, 1), val(w), (k, 1), s, 1.0);
            }
            if let Some(s) = slot(nodes, grads, w) {
                gemm(cols, rows, k, g, (1, cols), val(x), (k, 1), s, 1.0);
            }
        }
        Op::AddRow(x, row) => {
            accumulate(nodes, grads, x, |j| g[j]);
            if let Some(s) = slot(nodes, grads, row) {
                for r in g.chunks(cols) {
                    s.iter_mut().zip(r).for_each(|(a, b)| *a += b);
                }
            }
        }
        Op::Add(a, b) => {
            accumulate(nodes, grads, a, |j| g[j]);
            accumulate(nodes, grads, b, |j| g[j]);
        }
        Op::Sub(a, b) => {
            accumulate(nodes, grads, a, |j| g[j]);
            accumulate(nodes, grads, b, |j| -g[j]);
        }
        Op::Mul(a, b) => {
            let (av, bv) = (val(a), val(b));
            accumulate(nodes, grads, a, |j| g[j] * bv[j]);
            accumulate(nodes, grads, b, |j| g[j] * av[j]);
        }
        Op::Min(a, b) => {
            let (av, bv) = (val(a), val(b));
            accumulate(nodes, grads, a, |j| if av[j] <= bv[j] { g[j] } else { 0.0 });
            accumulate(nodes, grads, b, |j| if av[j] <= bv[j] { 0.0 } else { g[j] });
        }
        Op::Scale(x, k) => accumulate(nodes, grads, x, |j| g[j] * k),
        Op::AddScalar(x) => accumulate(nodes, grads, x, |j| g[j]),
        Op::Relu(x) => {
            let y = &node.value;
            accumulate(nodes, grads, x, |j| if y[j] > 0.0 { g[j] } else { 0.0 });
        }
        Op::Tanh(x) => {
            let y = &node.value;
            accumulate(nodes, grads, x, |j| g[j] * (1.0 - y[j] * y[j]));
        }
        Op::Sigmoid(x) => {
            let y = &node.value;
            accumulate(nodes, grads, x, |j| g[j] * y[j] * (1.0 - y[j]));
        }
        Op::Exp(x) => {
            let y = &node.value;
            accumulate(nodes, grads, x, |j| g[j] * y[j]);
        }
        Op::Square(x) => {
            let xv = val(x);
            accumulate(nodes, grads, x, |j| 2.0 * g[j] * xv[j]);
        }
        Op::Clamp(x, lo, hi) => {
            let xv = val(x);
            accumulate(nodes, grads, x, |j| {
                if xv[j] >= lo && xv[j] <= hi {
                    g[j]
                } else {
                    0.0
                }
            });
        }
        Op::SquashCorrection(u, eps) => {
            let uv = val(u);
            accumulate(nodes, grads, u, |j| {
                let t = uv[j].tanh();
                let s = 1.0 - t * t;
                g[j] * (-2.0 * t * s) / (s + eps)
            });
        }
        Op::ConcatCols(a, b) => {
            let ca = nodes[a.idx as usize].cols;
            let cb = cols - ca;
            accumulate(nodes, grads, a, |j| g[(j / ca) * cols + j % ca]);
            accumulate(nodes, grads, b, |j| g[(j / cb) * cols + ca + j % cb]);
        }
        Op::SliceCols(x, start) => {
            let xc = nodes[x.idx as usize].cols;
            if let Some(s) = slot(nodes, grads, x) {
                for r in 0..rows {
                    let dst = &mut s[r * xc + start..r * xc + start + cols];
                    dst.iter_mut()
                        .zip(&g[r * cols..(r + 1) * cols])
                        .for_each(|(a, b)| *a += b);
                }
            }
        }
        Op::SliceRows(x, start) => {
            if let Some(s) = slot(nodes, grads, x) {
                let dst = &mut s[start * cols..(start + rows) * cols];
                dst.iter_mut().zip(g).for_each(|(a, b)| *a += b);
            }
        }
        Op::LstmGates(pre) => {
            let y = &node.value;
            let h = cols / 4;
            if let Some(s) = slot(nodes, grads, pre) {
                for ((srow, yrow), grow) in
                    s.chunks_mut(cols).zip(y.chunks(cols)).zip(g.chunks(cols))
                {
                    for j in 0..cols {
                        let a = yrow[j];
                        srow[j] += if j / h == 2 {
                            grow[j] * (1.0 - a * a)
                        } else {
                            grow[j] * a * (1.0 - a)
                        };
                    }
                }
            }
        }
        Op::LstmCell(gates, c_prev) => {
            let h = cols;
            let (gv, cv) = (val(gates), val(c_prev));
            if let Some(s) = slot(nodes, grads, c_prev) {
                for r in 0..rows {
                    for k in 0..h {
                        s[r * h + k] += g[r * h + k] * gv[r * 4 * h + h + k];
                    }
                }
            }
            if let Some(s) = slot(nodes, grads, gates) {
                for r in 0..rows {
                    let gr = &gv[r * 4 * h..(r + 1) * 4 * h];
                    let sr = &mut s[r * 4 * h..(r + 1) * 4 * h];
                    for k in 0..h {
                        let dc = g[r * h + k];
                        sr[k] += dc * gr[2 * h + k];
                        sr[h + k] += dc * cv[r * h + k];
                        sr[2 * h + k] += dc * gr[k];
                    }
                }
            }
        }
        Op::LstmHidden(gates, cell) => {
            let h = cols;
            let gv = val(gates);
            let tc: Vec<f64> = val(cell).iter().map(|c| c.tanh()).collect();
            if let Some(s) = slot(nodes, grads, cell) {
                for r in 0..rows {
                    for k in 0..h {
                        let j = r * h + k;
                        s[j] += g[j] * gv[r * 4 * h + 3 * h + k] * (1.0 - tc[j] * tc[j]);
                    }
                }
            }
            if let Some(s) = slot(nodes, grads, gates) {
                for r in 0..rows {
                    for k in 0..h {
                        s[r * 4 * h + 3 * h + k] += g[r * h + k] * tc[r * h + k];
                    }
                }
            }
        }
        Op::SumRows(x) => {
            let xc = nodes[x.idx as usize].cols;
            accumulate(nodes, grads, x, |j| g[j / xc]);
        }
        Op::Sum(x) => accumulate(nodes, grads, x, |_| g[0]),
        Op::Mean(x) => {
            let n = nodes[x.idx as usize].value.len().max(1) as f64;
            accumulate(nodes, grads, x, |_| g[0] / n);
        }
    }
}
