//! Small dense regression network with hand-written backpropagation.
//!
//! Layout: input affine + tanh, `residual_blocks` blocks (two tanh affine
//! layers with a skip connection), linear scalar head. Parameters live in
//! one flat vector so the optimizer and the finite-difference checks can
//! index them uniformly.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::rng::Rng;

/// Layer widths and residual-block layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchDescriptor {
    pub input_dim: usize,
    pub width: usize,
    pub residual_blocks: usize,
}

impl Default for ArchDescriptor {
    fn default() -> Self {
        // smallest architecture consistent with "residual blocks": one
        // input layer to width 64, two blocks, scalar head
        ArchDescriptor {
            input_dim: 4,
            width: 64,
            residual_blocks: 2,
        }
    }
}

impl ArchDescriptor {
    pub fn param_count(&self) -> usize {
        let (d, w) = (self.input_dim, self.width);
        d * w + w + self.residual_blocks * (2 * (w * w + w)) + w + 1
    }

    fn block_offset(&self, block: usize) -> usize {
        let (d, w) = (self.input_dim, self.width);
        d * w + w + block * (2 * (w * w + w))
    }

    fn head_offset(&self) -> usize {
        self.block_offset(self.residual_blocks)
    }

    /// Flat-parameter index ranges belonging to the residual blocks (the
    /// l2-regularized subset).
    pub fn residual_range(&self) -> core::ops::Range<usize> {
        self.block_offset(0)..self.head_offset()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub arch: ArchDescriptor,
    pub params: Vec<f64>,
}

/// Scratch buffers for one forward/backward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    x: Vec<f64>,
    h0: Vec<f64>,
    block_in: Vec<Vec<f64>>,
    block_a: Vec<Vec<f64>>,
    block_b: Vec<Vec<f64>>,
    h_final: Vec<f64>,
    // backward scratch
    dh: Vec<f64>,
    da: Vec<f64>,
    db: Vec<f64>,
}

impl Cache {
    pub fn new(arch: &ArchDescriptor) -> Cache {
        let w = arch.width;
        Cache {
            x: vec![0.0; arch.input_dim],
            h0: vec![0.0; w],
            block_in: vec![vec![0.0; w]; arch.residual_blocks],
            block_a: vec![vec![0.0; w]; arch.residual_blocks],
            block_b: vec![vec![0.0; w]; arch.residual_blocks],
            h_final: vec![0.0; w],
            dh: vec![0.0; w],
            da: vec![0.0; w],
            db: vec![0.0; w],
        }
    }
}

/// `out[k] = tanh(sum_j in[j] W[j*w + k] + b[k])`
fn affine_tanh(input: &[f64], weights: &[f64], bias: &[f64], out: &mut [f64]) {
    let w = out.len();
    out.copy_from_slice(bias);
    for (j, &inj) in input.iter().enumerate() {
        let row = &weights[j * w..(j + 1) * w];
        for k in 0..w {
            out[k] += inj * row[k];
        }
    }
    for v in out.iter_mut() {
        *v = v.tanh();
    }
}

impl Mlp {
    /// Seeded Gaussian init, std `1/sqrt(fan_in)` per weight matrix, zero
    /// biases.
    pub fn init(arch: ArchDescriptor, seed: u64) -> Mlp {
        let mut rng = Rng::new(seed);
        let mut params = vec![0.0; arch.param_count()];
        let (d, w) = (arch.input_dim, arch.width);
        let mut fill = |range: core::ops::Range<usize>, fan_in: usize, rng: &mut Rng| {
            let std = (1.0 / fan_in as f64).sqrt();
            for i in range {
                params[i] = std * rng.standard_normal();
            }
        };
        fill(0..d * w, d, &mut rng);
        for blk in 0..arch.residual_blocks {
            let o = arch.block_offset(blk);
            fill(o..o + w * w, w, &mut rng);
            fill(o + w * w + w..o + 2 * w * w + w, w, &mut rng);
        }
        let ho = arch.head_offset();
        fill(ho..ho + w, w, &mut rng);
        Mlp { arch, params }
    }

    pub fn zeros(arch: ArchDescriptor) -> Mlp {
        Mlp {
            params: vec![0.0; arch.param_count()],
            arch,
        }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut cache = Cache::new(&self.arch);
        self.forward_cached(x, &mut cache)
    }

    pub fn forward_cached(&self, x: &[f64], cache: &mut Cache) -> f64 {
        let arch = &self.arch;
        let (d, w) = (arch.input_dim, arch.width);
        debug_assert_eq!(x.len(), d);
        cache.x.copy_from_slice(x);
        let p = &self.params;
        affine_tanh(x, &p[0..d * w], &p[d * w..d * w + w], &mut cache.h0);
        let mut h = cache.h0.clone();
        for blk in 0..arch.residual_blocks {
            let o = arch.block_offset(blk);
            cache.block_in[blk].copy_from_slice(&h);
            let (wa, rest) = p[o..].split_at(w * w);
            let (ba, rest) = rest.split_at(w);
            let (wb, rest) = rest.split_at(w * w);
            let bb = &rest[..w];
            // a = tanh(Wa h + ba); b = tanh(Wb a + bb); h <- h + b
            let mut a = vec![0.0; w];
            affine_tanh(&h, wa, ba, &mut a);
            let mut b = vec![0.0; w];
            affine_tanh(&a, wb, bb, &mut b);
            for k in 0..w {
                h[k] += b[k];
            }
            cache.block_a[blk].copy_from_slice(&a);
            cache.block_b[blk].copy_from_slice(&b);
        }
        cache.h_final.copy_from_slice(&h);
        let ho = arch.head_offset();
        let mut y = p[ho + w];
        for k in 0..w {
            y += p[ho + k] * h[k];
        }
        y
    }

    /// Accumulate `dy * d y / d params` into `grad_params` and, if given,
    /// write `dy * d y / d x` into `grad_input`.
    pub fn backward(
        &self,
        cache: &mut Cache,
        dy: f64,
        grad_params: &mut [f64],
        mut grad_input: Option<&mut [f64]>,
    ) {
        let arch = &self.arch;
        let (d, w) = (arch.input_dim, arch.width);
        let p = &self.params;
        let ho = arch.head_offset();

        // head: y = Wh . h + bh
        for k in 0..w {
            grad_params[ho + k] += dy * cache.h_final[k];
        }
        grad_params[ho + w] += dy;
        for k in 0..w {
            cache.dh[k] = dy * p[ho + k];
        }

        for blk in (0..arch.residual_blocks).rev() {
            let o = arch.block_offset(blk);
            let (wa, rest) = p[o..].split_at(w * w);
            let ba_len = w;
            let (_ba, rest) = rest.split_at(ba_len);
            let (wb, _rest) = rest.split_at(w * w);
            let a = &cache.block_a[blk];
            let b = &cache.block_b[blk];
            let hin = &cache.block_in[blk];

            // db = dh * (1 - b^2)
            for k in 0..w {
                cache.db[k] = cache.dh[k] * (1.0 - b[k] * b[k]);
            }
            // Wb grads and da = Wb db * (1 - a^2)
            let wb_off = o + w * w + w;
            let bb_off = wb_off + w * w;
            for j in 0..w {
                let aj = a[j];
                let row = &wb[j * w..(j + 1) * w];
                let grow = &mut grad_params[wb_off + j * w..wb_off + (j + 1) * w];
                let mut acc = 0.0;
                for k in 0..w {
                    grow[k] += aj * cache.db[k];
                    acc += row[k] * cache.db[k];
                }
                cache.da[j] = acc * (1.0 - aj * aj);
            }
            for k in 0..w {
                grad_params[bb_off + k] += cache.db[k];
            }
            // Wa grads and dhin = dh + Wa da
            let ba_off = o + w * w;
            for j in 0..w {
                let hj = hin[j];
                let row = &wa[j * w..(j + 1) * w];
                let grow = &mut grad_params[o + j * w..o + (j + 1) * w];
                let mut acc = 0.0;
                for k in 0..w {
                    grow[k] += hj * cache.da[k];
                    acc += row[k] * cache.da[k];
                }
                cache.dh[j] += acc; // skip connection adds identity
            }
            for k in 0..w {
                grad_params[ba_off + k] += cache.da[k];
            }
        }

        // input layer: h0 = tanh(W0 x + b0)
        for k in 0..w {
            cache.db[k] = cache.dh[k] * (1.0 - cache.h0[k] * cache.h0[k]);
        }
        for j in 0..d {
            let xj = cache.x[j];
            let row = &p[j * w..(j + 1) * w];
            let grow = &mut grad_params[j * w..(j + 1) * w];
            let mut acc = 0.0;
            for k in 0..w {
                grow[k] += xj * cache.db[k];
                acc += row[k] * cache.db[k];
            }
            if let Some(gi) = grad_input.as_deref_mut() {
                gi[j] = acc;
            }
        }
        for k in 0..w {
            grad_params[d * w + k] += cache.db[k];
        }
    }

    /// Exact gradient of the scalar output with respect to the inputs.
    pub fn input_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut cache = Cache::new(&self.arch);
        self.forward_cached(x, &mut cache);
        let mut sink = vec![0.0; self.arch.param_count()];
        let mut gi = vec![0.0; self.arch.input_dim];
        self.backward(&mut cache, 1.0, &mut sink, Some(&mut gi));
        gi
    }
}

/// Adam with the standard moment coefficients.
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Adam {
    pub fn new(n_params: usize) -> Adam {
        Adam {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr * mh / (vh.sqrt() + self.epsilon);
        }
    }
}
