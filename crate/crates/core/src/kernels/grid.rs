//! `K_h` on a tensor grid of lateral points and time offsets around one
//! target, as needed by the localized reconstruction.
//!
//! Points are grouped into bins of `|x - x0|`; each bin gets its own contour
//! height (the saddle-point choice `c = |x - x0|/2` at the bin centre), and
//! a Gauss–Kronrod rule in `Re k` adapted on a handful of proxy entries.
//! One Jost solve per node then serves every `(x, t)` pair of the bin, and
//! the symmetry `k ↦ -k̄` halves the contour.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rayon::prelude::*;

use super::bessel::{light_cone_depth, r_pair_scaled};
use super::contour::{integrand_factor, truncation_point, KernelEvaluator};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_kronrod, AdaptiveOptions};
use crate::scalar::{cplx, Real};
use crate::spectral1d::resolvent_solution;

/// Real kernels `K^D`, `K^N` stored row-major as `[t index][x index]`.
#[derive(Debug, Clone)]
pub struct KernelGrid<T> {
    pub xs: Vec<T>,
    pub ts: Vec<T>,
    pub dirichlet: Vec<T>,
    pub neumann: Vec<T>,
    /// Number of Jost solves spent, for diagnostics.
    pub solves: usize,
}

impl<T: Real> KernelGrid<T> {
    #[inline]
    pub fn at(&self, it: usize, ix: usize) -> (T, T) {
        let i = it * self.xs.len() + ix;
        (self.dirichlet[i], self.neumann[i])
    }
}

/// Order-of-magnitude bound of `|K^N_h|` over the light disk, used to set
/// absolute tolerances.
pub fn neumann_scale<T: Real>(h: T, y0: T) -> T {
    (y0 * y0 / (T::lit(4.0) * h)).exp() / (T::lit(4.0) * (T::PI() * h).sqrt())
}

type RowCache<T> = Mutex<HashMap<u64, Arc<Vec<Complex<T>>>>>;

impl<T: Real> KernelEvaluator<T> {
    /// `(K^D, K^N)(x0, x; y0, t)` for every `x` in `xs` and `t` in `ts`.
    pub fn kernel_grid(
        &self,
        x0: T,
        y0: T,
        h: T,
        xs: &[T],
        ts: &[T],
        rtol: T,
    ) -> Result<KernelGrid<T>> {
        if !(h > T::zero()) || !(y0 > T::zero()) || xs.is_empty() || ts.is_empty() {
            return Err(Error::invalid(
                "kernel grid needs h > 0, y0 > 0 and non-empty point sets",
            ));
        }
        // Distinct |t| values; the kernels are even in t.
        let mut abs_t: Vec<T> = ts.iter().map(|t| t.abs()).collect();
        abs_t.sort_by(|a, b| a.partial_cmp(b).expect("finite t"));
        abs_t.dedup();
        let zs = abs_t
            .iter()
            .map(|&t| light_cone_depth(y0, t))
            .collect::<Result<Vec<T>>>()?;
        let t_slot: Vec<usize> = ts
            .iter()
            .map(|t| {
                abs_t
                    .binary_search_by(|a| a.partial_cmp(&t.abs()).expect("finite t"))
                    .expect("present")
            })
            .collect();

        let reach = xs.iter().fold(T::zero(), |m, x| m.max((*x - x0).abs()));
        let bins = if reach > T::zero() {
            (reach / (T::lit(32.0) * h).sqrt())
                .ceil()
                .to_usize()
                .unwrap_or(1)
                .max(1)
        } else {
            1
        };
        let bin_of = |x: T| -> usize {
            if reach == T::zero() {
                0
            } else {
                ((x - x0).abs() / reach * T::of(bins))
                    .floor()
                    .to_usize()
                    .unwrap_or(0)
                    .min(bins - 1)
            }
        };
        let nt = abs_t.len();
        let mut half_d = vec![T::zero(); nt * xs.len()];
        let mut half_n = vec![T::zero(); nt * xs.len()];
        let mut solves = 0;
        for b in 0..bins {
            let members: Vec<usize> = (0..xs.len()).filter(|&i| bin_of(xs[i]) == b).collect();
            if members.is_empty() {
                continue;
            }
            let lo = reach * T::of(b) / T::of(bins);
            let hi = reach * T::of(b + 1) / T::of(bins);
            let c = self.contour_height(h, (lo + hi) / T::lit(2.0));
            let bin = BinJob {
                ev: self,
                x0,
                y0,
                h,
                c,
                xs: members.iter().map(|&i| xs[i]).collect(),
                zs: &zs,
            };
            let (d, n, count) = bin.run(&abs_t, rtol)?;
            solves += count;
            for (j, &i) in members.iter().enumerate() {
                for it in 0..nt {
                    half_d[it * xs.len() + i] = d[it * members.len() + j];
                    half_n[it * xs.len() + i] = n[it * members.len() + j];
                }
            }
        }
        let mut dirichlet = Vec::with_capacity(ts.len() * xs.len());
        let mut neumann = Vec::with_capacity(ts.len() * xs.len());
        for &slot in &t_slot {
            dirichlet.extend_from_slice(&half_d[slot * xs.len()..(slot + 1) * xs.len()]);
            neumann.extend_from_slice(&half_n[slot * xs.len()..(slot + 1) * xs.len()]);
        }
        Ok(KernelGrid {
            xs: xs.to_vec(),
            ts: ts.to_vec(),
            dirichlet,
            neumann,
            solves,
        })
    }
}

struct BinJob<'a, T> {
    ev: &'a KernelEvaluator<T>,
    x0: T,
    y0: T,
    h: T,
    c: T,
    xs: Vec<T>,
    zs: &'a [T],
}

impl<T: Real> BinJob<'_, T> {
    fn green_row(&self, cache: &RowCache<T>, kr: T) -> Result<Arc<Vec<Complex<T>>>> {
        let key = kr.to_f64_lossy().to_bits();
        if let Some(row) = cache.lock().expect("cache lock").get(&key) {
            return Ok(row.clone());
        }
        let k = cplx(kr, self.c / self.h);
        let row = Arc::new(resolvent_solution(self.ev.solver(), k)?.green_row(self.x0, &self.xs));
        cache.lock().expect("cache lock").insert(key, row.clone());
        Ok(row)
    }

    /// `(2/π) e^{-hk²} (r, ∂_y r)(k, y0, z) k` for every depth `z`.
    fn weights(&self, kr: T, w: T) -> Vec<(Complex<T>, Complex<T>)> {
        let k = cplx(kr, self.c / self.h);
        let scale = w * T::lit(2.0) * T::FRAC_1_PI();
        self.zs
            .iter()
            .map(|&z| {
                let f = integrand_factor(k, self.h, z) * k * scale;
                let (r, dr) = r_pair_scaled(k, self.y0, z);
                (f * dr, f * r)
            })
            .collect()
    }

    /// Returns `K^D`, `K^N` as `[|t| slot][member]` and the solve count.
    fn run(&self, abs_t: &[T], rtol: T) -> Result<(Vec<T>, Vec<T>, usize)> {
        let sigma = self.c / self.h;
        let kappa = self.ev.kappa_max();
        if !(sigma > kappa) {
            return Err(Error::ContourTooLow {
                height: sigma.to_f64_lossy(),
                kappa: kappa.to_f64_lossy(),
            });
        }
        let nx = self.xs.len();
        let nt = abs_t.len();
        let proxy_x = spread(nx, 3);
        let proxy_t: Vec<usize> = {
            let fr = [0.0, 0.5, 0.8, 0.95, 1.0];
            let mut v: Vec<usize> = fr
                .iter()
                .map(|f| {
                    let target = self.y0 * T::lit(*f);
                    (0..nt)
                        .min_by(|&a, &b| {
                            (abs_t[a] - target)
                                .abs()
                                .partial_cmp(&(abs_t[b] - target).abs())
                                .expect("finite")
                        })
                        .expect("non-empty")
                })
                .collect();
            v.dedup();
            v
        };
        let proxies: Vec<(usize, usize)> = proxy_t
            .iter()
            .flat_map(|&it| proxy_x.iter().map(move |&ix| (it, ix)))
            .collect();

        let cache: RowCache<T> = Mutex::new(HashMap::new());
        let integrand = |kr: T| -> Result<Vec<T>> {
            let row = self.green_row(&cache, kr)?;
            let w = self.weights(kr, T::one());
            let mut out = Vec::with_capacity(2 * proxies.len());
            for &(it, ix) in &proxies {
                let (d, n) = w[it];
                let g = row[ix];
                out.push((d * g).im);
                out.push((n * g).im);
            }
            Ok(out)
        };
        let s_n = neumann_scale(self.h, self.y0);
        let s_d = s_n * (T::one() + self.y0 / (T::lit(2.0) * self.h));
        let abs_tol: Vec<T> = proxies
            .iter()
            .flat_map(|_| [rtol * s_d, rtol * s_n])
            .collect();
        let kmax = truncation_point(self.h, self.y0, rtol.min(T::lit(1e-10)));
        let reach = self
            .xs
            .iter()
            .fold(T::zero(), |m, x| m.max((*x - self.x0).abs()));
        let rate = reach + T::lit(2.0) * self.c + T::one();
        let initial = ((kmax * rate / T::lit(6.0)).ceil().to_usize().unwrap_or(8)).clamp(8, 512);
        let opts = AdaptiveOptions {
            rel_tol: T::zero(),
            group: 1,
            abs_tol,
            initial_panels: initial,
            max_panels: 4000,
        };
        let adapted = adaptive_kronrod(T::zero(), kmax, 2 * proxies.len(), integrand, &opts)?;
        let (nodes, weights) = adapted.rule();

        // Rows for nodes not yet seen (none in practice) are solved here.
        let rows = nodes
            .par_iter()
            .map(|&kr| self.green_row(&cache, kr))
            .collect::<Result<Vec<_>>>()?;
        let solves = cache.lock().expect("cache lock").len();
        let coeffs: Vec<Vec<(Complex<T>, Complex<T>)>> = nodes
            .par_iter()
            .zip(&weights)
            .map(|(&kr, &w)| self.weights(kr, w))
            .collect();

        let blocks: Vec<(Vec<T>, Vec<T>)> = (0..nt)
            .into_par_iter()
            .map(|it| {
                let mut d = vec![T::zero(); nx];
                let mut n = vec![T::zero(); nx];
                for (row, co) in rows.iter().zip(&coeffs) {
                    let (a_d, a_n) = co[it];
                    for ix in 0..nx {
                        let g = row[ix];
                        d[ix] += a_d.re * g.im + a_d.im * g.re;
                        n[ix] += a_n.re * g.im + a_n.im * g.re;
                    }
                }
                (d, n)
            })
            .collect();
        let mut d = Vec::with_capacity(nt * nx);
        let mut n = Vec::with_capacity(nt * nx);
        for (bd, bn) in blocks {
            d.extend(bd);
            n.extend(bn);
        }
        Ok((d, n, solves))
    }
}

/// Up to `count` indices spread evenly over `0..n`, including both ends.
fn spread(n: usize, count: usize) -> Vec<usize> {
    if n <= count {
        return (0..n).collect();
    }
    let mut v: Vec<usize> = (0..count).map(|i| i * (n - 1) / (count - 1)).collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelParams;
    use crate::spectral1d::Potential;

    #[test]
    fn grid_matches_pointwise_kernels() {
        let q = Potential::<f64>::poschl_teller(1.0, 8.0).unwrap();
        let ev = KernelEvaluator::new(&q).unwrap();
        let (x0, y0, h) = (0.3, 0.6, 0.02);
        let xs: Vec<f64> = (0..=16).map(|i| x0 - 0.8 + 0.1 * i as f64).collect();
        let ts: Vec<f64> = vec![-0.6, -0.3, 0.0, 0.15, 0.3, 0.55, 0.6];
        let grid = ev.kernel_grid(x0, y0, h, &xs, &ts, 1e-12).unwrap();
        let scale = neumann_scale(h, y0);
        for (it, &t) in ts.iter().enumerate() {
            for ix in [0usize, 3, 8, 11, 16] {
                let p = ev.kernel(&KernelParams::new(h, y0, t, x0, xs[ix])).unwrap();
                let (d, n) = grid.at(it, ix);
                assert!(
                    (n - p.neumann.re).abs() <= 1e-9 * scale,
                    "N t={t} x={}: {n} vs {}",
                    xs[ix],
                    p.neumann
                );
                assert!(
                    (d - p.dirichlet.re).abs() <= 1e-9 * scale * y0 / h,
                    "D t={t} x={}",
                    xs[ix]
                );
            }
        }
    }
}
