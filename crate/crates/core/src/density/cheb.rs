//! Piecewise Chebyshev fits used to amortize quadrature cost across
//! Monte-Carlo samples: the per-block integral depends on a sample only
//! through one or two scalars, so a per-parameter-point table plus
//! Clenshaw evaluation replaces per-sample quadrature.

/// Chebyshev points of the first kind on [-1, 1], degree `n - 1`.
fn cheb_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Coefficients a_k with f(t) ≈ Σ a_k T_k(t) from values at the nodes.
fn cheb_coeffs(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut coeffs = vec![0.0; n];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, v) in values.iter().enumerate() {
            acc += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        *c = 2.0 * acc / n as f64;
    }
    coeffs[0] *= 0.5;
    coeffs
}

fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &a in coeffs.iter().skip(1).rev() {
        let b0 = a + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

/// Piecewise Chebyshev interpolant on [lo, hi], uniform pieces.
#[derive(Debug, Clone)]
pub struct Cheb1d {
    lo: f64,
    width: f64,
    pieces: Vec<Vec<f64>>,
}

impl Cheb1d {
    pub fn fit<E>(
        lo: f64,
        hi: f64,
        n_pieces: usize,
        degree: usize,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let width = (hi - lo) / n_pieces as f64;
        let nodes = cheb_nodes(degree + 1);
        let mut pieces = Vec::with_capacity(n_pieces);
        for i in 0..n_pieces {
            let a = lo + i as f64 * width;
            let mid = a + 0.5 * width;
            let half = 0.5 * width;
            let vals: Vec<f64> = nodes
                .iter()
                .map(|&t| f(mid + half * t))
                .collect::<Result<_, E>>()?;
            pieces.push(cheb_coeffs(&vals));
        }
        Ok(Cheb1d { lo, width, pieces })
    }

    /// None outside the fitted domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let rel = (x - self.lo) / self.width;
        if !(0.0..=(self.pieces.len() as f64)).contains(&rel) {
            return None;
        }
        let idx = (rel as usize).min(self.pieces.len() - 1);
        let a = self.lo + idx as f64 * self.width;
        let t = 2.0 * (x - a) / self.width - 1.0;
        Some(clenshaw(&self.pieces[idx], t))
    }
}

/// Tensor-product piecewise Chebyshev interpolant on [ulo, uhi] × [vlo, vhi].
#[derive(Debug, Clone)]
pub struct Cheb2d {
    u_lo: f64,
    u_width: f64,
    v_lo: f64,
    v_width: f64,
    n_u: usize,
    n_v: usize,
    /// coeff matrices, row-major over (piece_u, piece_v); each is
    /// (deg_u+1) x (deg_v+1) row-major.
    pieces: Vec<Vec<f64>>,
    deg_u: usize,
    deg_v: usize,
}

impl Cheb2d {
    #[allow(clippy::too_many_arguments)]
    pub fn fit<E>(
        (u_lo, u_hi, n_u, deg_u): (f64, f64, usize, usize),
        (v_lo, v_hi, n_v, deg_v): (f64, f64, usize, usize),
        mut f: impl FnMut(f64, f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let u_width = (u_hi - u_lo) / n_u as f64;
        let v_width = (v_hi - v_lo) / n_v as f64;
        let un = cheb_nodes(deg_u + 1);
        let vn = cheb_nodes(deg_v + 1);
        let mut pieces = Vec::with_capacity(n_u * n_v);
        for iu in 0..n_u {
            let ua = u_lo + iu as f64 * u_width;
            let (umid, uhalf) = (ua + 0.5 * u_width, 0.5 * u_width);
            for iv in 0..n_v {
                let va = v_lo + iv as f64 * v_width;
                let (vmid, vhalf) = (va + 0.5 * v_width, 0.5 * v_width);
                // values on the tensor grid
                let mut vals = vec![0.0; un.len() * vn.len()];
                for (j, &tu) in un.iter().enumerate() {
                    for (l, &tv) in vn.iter().enumerate() {
                        vals[j * vn.len() + l] = f(umid + uhalf * tu, vmid + vhalf * tv)?;
                    }
                }
                // transform rows (v direction), then columns (u direction)
                let mut row_c = vec![0.0; un.len() * vn.len()];
                for j in 0..un.len() {
                    let c = cheb_coeffs(&vals[j * vn.len()..(j + 1) * vn.len()]);
                    row_c[j * vn.len()..(j + 1) * vn.len()].copy_from_slice(&c);
                }
                let mut coeffs = vec![0.0; un.len() * vn.len()];
                let mut col = vec![0.0; un.len()];
                for l in 0..vn.len() {
                    for j in 0..un.len() {
                        col[j] = row_c[j * vn.len() + l];
                    }
                    let c = cheb_coeffs(&col);
                    for j in 0..un.len() {
                        coeffs[j * vn.len() + l] = c[j];
                    }
                }
                pieces.push(coeffs);
            }
        }
        Ok(Cheb2d {
            u_lo,
            u_width,
            v_lo,
            v_width,
            n_u,
            n_v,
            pieces,
            deg_u,
            deg_v,
        })
    }

    pub fn eval(&self, u: f64, v: f64) -> Option<f64> {
        let ru = (u - self.u_lo) / self.u_width;
        let rv = (v - self.v_lo) / self.v_width;
        if !(0.0..=(self.n_u as f64)).contains(&ru) || !(0.0..=(self.n_v as f64)).contains(&rv)
        {
            return None;
        }
        let iu = (ru as usize).min(self.n_u - 1);
        let iv = (rv as usize).min(self.n_v - 1);
        let ua = self.u_lo + iu as f64 * self.u_width;
        let va = self.v_lo + iv as f64 * self.v_width;
        let tu = 2.0 * (u - ua) / self.u_width - 1.0;
        let tv = 2.0 * (v - va) / self.v_width - 1.0;
        let coeffs = &self.pieces[iu * self.n_v + iv];
        let nv = self.deg_v + 1;
        let mut inner = vec![0.0; self.deg_u + 1];
        for (j, slot) in inner.iter_mut().enumerate() {
            *slot = clenshaw(&coeffs[j * nv..(j + 1) * nv], tv);
        }
        Some(clenshaw(&inner, tu))
    }
}
