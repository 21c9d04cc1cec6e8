//! Characteristic (Goursat) march for the conjugated mode unknown W on
//! {x′ ≥ 0, t′ ≥ 0, x′t′ ≤ X_MAX}, with W = 0 on the cap hyperbola.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{CauchyData, GridSpec, ModeData};
use crate::math::{lagrange4, stencil_start, C64};
use crate::metric::{Mode, WarpedMetric};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Parity of a mode field across the diagonal x′ = t′.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// From data (0, f₂): W(t′, x′) = −W(x′, t′).
    Odd,
    /// From data (f₁, 0): W(t′, x′) = W(x′, t′).
    Even,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Odd => -1.0,
            Parity::Even => 1.0,
        }
    }
}

/// Coefficients of ∂ₓ'∂ₜ'W + q(x′t′)W = 0 for one mode, tabulated at p = mΔ².
#[derive(Clone, Debug)]
pub struct ModeProblem {
    pub mode: Mode,
    pub metric: WarpedMetric,
    pub delta: f64,
    /// Index of the last t′ column.
    pub columns: usize,
    /// X_MAX/Δ².
    cap: f64,
    cap_index: usize,
    q: Vec<f64>,
}

impl ModeProblem {
    pub fn assemble(m: &WarpedMetric, k: Mode, grid: &GridSpec) -> Self {
        let d2 = grid.delta * grid.delta;
        let cap = m.x_max / d2;
        let cap_index = (cap * (1.0 + 1e-12)).floor() as usize;
        let q = (0..=cap_index).map(|i| m.goursat_potential(k, (i as f64 * d2).min(m.x_max))).collect();
        ModeProblem { mode: k, metric: *m, delta: grid.delta, columns: grid.last_column(), cap, cap_index, q }
    }

    /// G = x′t′ ω²(x′t′).
    pub fn g_coef(&self, xp: f64, tp: f64) -> f64 {
        let p = xp * tp;
        p * self.metric.mode_frequency_sq(self.mode, p)
    }

    /// C(x′t′), the conjugation remainder.
    pub fn c_coef(&self, xp: f64, tp: f64) -> f64 {
        self.metric.conjugation_potential(xp * tp)
    }

    /// q = C − G at p = x′t′.
    pub fn potential(&self, p: f64) -> f64 {
        self.metric.goursat_potential(self.mode, p)
    }

    #[inline]
    fn q_at(&self, m: usize) -> f64 {
        self.q[m]
    }

    /// Index of the last diagonal node inside the cap.
    pub fn last_diagonal(&self) -> usize {
        let mut b = (self.cap.sqrt() as usize).saturating_sub(1);
        while (b + 1) * (b + 1) <= self.cap_index {
            b += 1;
        }
        b
    }

    /// Highest row index present in column b.
    pub fn top(&self, b: usize) -> usize {
        if b == 0 {
            0
        } else {
            (self.cap_index / b).min(b)
        }
    }

    /// x′-position (in units of Δ) where column b meets the cap.
    fn cap_position(&self, b: usize) -> f64 {
        self.cap / b as f64
    }
}

/// W-data on the diagonal: values D and transverse derivative N = (∂ₜ' − ∂ₓ')W at μ = aΔ.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalData {
    pub d: Vec<C64>,
    pub n: Vec<C64>,
}

impl DiagonalData {
    pub fn zeros(len: usize) -> Self {
        DiagonalData { d: vec![ZERO; len], n: vec![ZERO; len] }
    }
}

/// Diagonal W-data for one parity of the Cauchy data on mode k.
pub fn diagonal_data(
    m: &WarpedMetric,
    d: &CauchyData,
    k: Mode,
    grid: &GridSpec,
    parity: Parity,
) -> Result<DiagonalData> {
    d.check_support(m, grid)?;
    let len = grid.last_diagonal(m) + 1;
    let Some(md) = d.mode(k) else {
        return Ok(DiagonalData::zeros(len));
    };
    let mut out = diagonal_lines(m, md, len, grid.delta);
    match parity {
        Parity::Odd => out.d.iter_mut().for_each(|v| *v = ZERO),
        Parity::Even => out.n.iter_mut().for_each(|v| *v = ZERO),
    }
    Ok(out)
}

/// Diagonal W-data of both parities: D from f₁, N from f₂. No support checks.
pub fn diagonal_lines(m: &WarpedMetric, md: &ModeData, len: usize, delta: f64) -> DiagonalData {
    let mut out = DiagonalData::zeros(len);
    let nf = m.n as i32;
    for a in 1..len.min(md.f1.len()) {
        let mu = a as f64 * delta;
        let phi = m.quarter_det(mu * mu);
        out.n[a] = md.f2[a] * (2.0 * phi * mu.powi(-nf - 1));
        out.d[a] = md.f1[a] * (phi * mu.powi(-nf));
    }
    out
}

/// Cauchy samples (f₁ or f₂) recovered from diagonal W-data of one parity.
pub fn cauchy_from_diagonal(m: &WarpedMetric, diag: &DiagonalData, delta: f64, parity: Parity) -> Vec<C64> {
    let nf = m.n as i32;
    (0..diag.d.len())
        .map(|a| {
            if a == 0 {
                return ZERO;
            }
            let mu = a as f64 * delta;
            let phi = m.quarter_det(mu * mu);
            match parity {
                Parity::Odd => diag.n[a] * (mu.powi(nf + 1) / (2.0 * phi)),
                Parity::Even => diag.d[a] * (mu.powi(nf) / phi),
            }
        })
        .collect()
}

/// Value and positions of the four points nearest to `u` among rows `0..=top`
/// plus an optional zero at the cap position.
fn interp_with_cap(vals: &[C64], top: usize, cap: Option<f64>, u: f64) -> C64 {
    let mut pts: [(f64, C64); 8] = [(0.0, ZERO); 8];
    let mut count = 0;
    let lo = (u.floor() as isize - 3).max(0) as usize;
    let hi = ((u.floor() as usize) + 3).min(top);
    let mut node_hi = hi;
    if let Some(c) = cap {
        if hi == top && c - (top as f64) < 0.25 && top > 0 {
            node_hi = top - 1;
        }
    }
    for i in lo..=node_hi {
        if count < 7 {
            pts[count] = (i as f64, vals[i]);
            count += 1;
        }
    }
    if let Some(c) = cap {
        if node_hi + 4 > top {
            pts[count] = (c, ZERO);
            count += 1;
        }
    }
    if count < 4 {
        let mut acc = ZERO;
        let mut best = f64::INFINITY;
        for &(x, v) in &pts[..count] {
            if (x - u).abs() < best {
                best = (x - u).abs();
                acc = v;
            }
        }
        return acc;
    }
    let pts = &mut pts[..count];
    pts.sort_by(|a, b| (a.0 - u).abs().partial_cmp(&(b.0 - u).abs()).unwrap());
    let mut sel = [pts[0], pts[1], pts[2], pts[3]];
    sel.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let xs = [sel[0].0, sel[1].0, sel[2].0, sel[3].0];
    let (w, _) = lagrange4(&xs, u);
    sel.iter().zip(w.iter()).fold(ZERO, |acc, (p, w)| acc + p.1 * *w)
}

/// Forward march from diagonal data; `sink(b, column)` receives each column.
pub fn march_forward(p: &ModeProblem, data: &DiagonalData, mut sink: impl FnMut(usize, &[C64])) -> Result<()> {
    let delta = p.delta;
    let k = 0.25 * delta * delta;
    let k6 = delta * delta / 6.0;
    let dget = |v: &Vec<C64>, a: usize| if a < v.len() { v[a] } else { ZERO };
    let mut prev: Vec<C64> = vec![dget(&data.d, 0)];
    sink(0, &prev);
    let mut cur: Vec<C64> = Vec::new();
    for b in 1..=p.columns {
        let top = p.top(b);
        let prev_top = p.top(b - 1);
        cur.clear();
        cur.resize(top + 1, ZERO);
        let start;
        if top == b {
            let da = dget(&data.d, b - 1);
            let db = dget(&data.d, b);
            let na = dget(&data.n, b - 1);
            let nb = dget(&data.n, b);
            cur[b] = db;
            let qa = p.q_at((b - 1) * (b - 1));
            let qb = p.q_at(b * b);
            let qp = p.q_at((b - 1) * b);
            cur[b - 1] = ((da + db) * 0.5 + (na + nb) * (0.25 * delta) + (da * qa + db * qb) * k6) / (1.0 - k6 * qp);
            start = b as isize - 2;
        } else if top == b - 1 && p.cap_position(b) > (b - 1) as f64 && prev_top == b - 1 {
            // Cap crosses the diagonal between columns b-1 and b: mirrored data there vanish.
            let da = dget(&data.d, b - 1);
            let na = dget(&data.n, b - 1);
            let qa = p.q_at((b - 1) * (b - 1));
            let qp = p.q_at((b - 1) * b);
            cur[b - 1] = (da * 0.5 + na * (0.25 * delta) + da * (qa * k6)) / (1.0 - k6 * qp);
            start = b as isize - 2;
        } else {
            let xh = p.cap_position(b);
            let prev_cap = if prev_top < b - 1 { Some(p.cap_position(b - 1)) } else { None };
            let wa = interp_with_cap(&prev, prev_top, prev_cap, xh);
            let wb = prev[top];
            let area = (xh - top as f64) * delta * delta;
            let qb = p.q_at(top * (b - 1));
            let qa = p.potential(p.metric.x_max * (b - 1) as f64 / b as f64);
            let qp = p.q_at(top * b);
            let kk = 0.25 * area;
            cur[top] = (wb - wa + (wb * qb + wa * qa) * kk) / (1.0 - kk * qp);
            start = top as isize - 1;
        }
        let mut a = start;
        while a >= 0 {
            let i = a as usize;
            let q_ne = p.q_at((i + 1) * b);
            let q_sw = p.q_at(i * (b - 1));
            let q_se = p.q_at((i + 1) * (b - 1));
            let q_nw = p.q_at(i * b);
            cur[i] = (cur[i + 1] * (1.0 + k * q_ne) + prev[i] * (1.0 + k * q_sw) - prev[i + 1] * (1.0 - k * q_se))
                / (1.0 - k * q_nw);
            a -= 1;
        }
        if !cur.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteField { column: b });
        }
        sink(b, &cur);
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(())
}

/// Mode field W on the computed region, stored by t′ column.
#[derive(Clone, Debug)]
pub struct ModeField {
    pub mode: Mode,
    pub parity: Parity,
    pub delta: f64,
    pub x_max: f64,
    offsets: Vec<usize>,
    tops: Vec<usize>,
    values: Vec<C64>,
}

impl ModeField {
    fn from_columns(p: &ModeProblem, parity: Parity, cols: usize) -> Self {
        ModeField {
            mode: p.mode,
            parity,
            delta: p.delta,
            x_max: p.metric.x_max,
            offsets: Vec::with_capacity(cols + 1),
            tops: Vec::with_capacity(cols + 1),
            values: Vec::new(),
        }
    }

    fn push_column(&mut self, col: &[C64]) {
        self.offsets.push(self.values.len());
        self.tops.push(col.len() - 1);
        self.values.extend_from_slice(col);
    }

    /// Index of the last stored column.
    pub fn columns(&self) -> usize {
        self.tops.len() - 1
    }

    pub fn top(&self, b: usize) -> usize {
        self.tops[b]
    }

    /// W at node (a, b) with x′ = aΔ, t′ = bΔ, extended across the diagonal by parity.
    pub fn get(&self, a: usize, b: usize) -> Option<C64> {
        if a <= b {
            if b < self.tops.len() && a <= self.tops[b] {
                Some(self.values[self.offsets[b] + a])
            } else {
                None
            }
        } else {
            self.get(b, a).map(|v| v * self.parity.sign())
        }
    }

    /// Column b as a slice (rows 0..=top(b)).
    pub fn column(&self, b: usize) -> &[C64] {
        &self.values[self.offsets[b]..self.offsets[b] + self.tops[b] + 1]
    }

    /// Boundary row W(0, bΔ).
    pub fn boundary_row(&self) -> Vec<C64> {
        self.offsets.iter().map(|&o| self.values[o]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Iterates over stored nodes as (a, b, W).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.tops.len())
            .flat_map(move |b| (0..=self.tops[b]).map(move |a| (a, b, self.values[self.offsets[b] + a])))
    }

    /// W and (∂ₓ'W, ∂ₜ'W) at an arbitrary point by tensor cubic interpolation.
    pub fn interpolate(&self, xp: f64, tp: f64) -> Option<(C64, C64, C64)> {
        let d = self.delta;
        let cols = self.tops.len();
        let v = tp / d;
        let u = xp / d;
        if !(u >= 0.0 && v >= 0.0) || cols < 4 {
            return None;
        }
        let hi = u.max(v);
        if hi > (cols - 1) as f64 + 1e-9 || xp * tp > self.x_max * (1.0 + 1e-12) {
            return None;
        }
        let b0 = stencil_start(v, cols);
        let mut col_vals = [ZERO; 4];
        let mut col_dx = [ZERO; 4];
        for (j, b) in (b0..b0 + 4).enumerate() {
            let mut a0 = stencil_start(u, cols);
            while a0 > 0 && self.get(a0 + 3, b).is_none() {
                a0 -= 1;
            }
            let mut pts = [ZERO; 4];
            for i in 0..4 {
                pts[i] = self.get(a0 + i, b)?;
            }
            let xs = [a0 as f64, (a0 + 1) as f64, (a0 + 2) as f64, (a0 + 3) as f64];
            let (w, dw) = lagrange4(&xs, u);
            for i in 0..4 {
                col_vals[j] += pts[i] * w[i];
                col_dx[j] += pts[i] * (dw[i] / d);
            }
        }
        let xs = [b0 as f64, (b0 + 1) as f64, (b0 + 2) as f64, (b0 + 3) as f64];
        let (w, dw) = lagrange4(&xs, v);
        let mut val = ZERO;
        let mut dx = ZERO;
        let mut dt = ZERO;
        for j in 0..4 {
            val += col_vals[j] * w[j];
            dx += col_dx[j] * w[j];
            dt += col_vals[j] * (dw[j] / d);
        }
        Some((val, dx, dt))
    }
}

/// Solves the forward Goursat problem and stores the whole field.
pub fn solve_forward(p: &ModeProblem, data: &DiagonalData, parity: Parity) -> Result<ModeField> {
    let mut f = ModeField::from_columns(p, parity, p.columns);
    march_forward(p, data, |_, col| f.push_column(col))?;
    Ok(f)
}

/// Solves the forward problem keeping only the boundary row W(0, bΔ).
pub fn boundary_row_forward(p: &ModeProblem, data: &DiagonalData) -> Result<Vec<C64>> {
    let mut row = Vec::with_capacity(p.columns + 1);
    march_forward(p, data, |_, col| row.push(col[0]))?;
    Ok(row)
}

/// Relative tolerance for the corner compatibility of an inward boundary row.
pub const PARITY_TOL: f64 = 1e-6;

/// Inward march from the boundary row on the pre-cap triangle t′ ≤ √X_MAX,
/// closing the diagonal with the parity constraint. Returns the field and the
/// diagonal data that reproduce it under [`solve_forward`].
pub fn solve_inward(p: &ModeProblem, boundary_row: &[C64], parity: Parity) -> Result<(ModeField, DiagonalData)> {
    let nb = p.last_diagonal().min(p.columns);
    if boundary_row.len() < nb + 1 {
        return Err(Error::GridMismatch(alloc::format!(
            "boundary row has {} samples, need {}",
            boundary_row.len(),
            nb + 1
        )));
    }
    let scale = boundary_row[..=nb].iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if boundary_row[0].norm() > PARITY_TOL * scale {
        return Err(Error::ParityViolation { deviation: boundary_row[0].norm() / scale });
    }
    let delta = p.delta;
    let k = 0.25 * delta * delta;
    let k6 = delta * delta / 6.0;
    // rows[a][b - a] = W(a, b) for a ≤ b ≤ nb
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(nb + 1);
    let mut row0: Vec<C64> = boundary_row[..=nb].to_vec();
    row0[0] = ZERO;
    rows.push(row0);
    let mut diag = DiagonalData::zeros(nb + 1);
    for a in 0..nb {
        let prev = &rows[a];
        let w_seed = prev[1];
        let qp = p.q_at(a * (a + 1));
        let qa = p.q_at(a * a);
        let qb = p.q_at((a + 1) * (a + 1));
        let lhs = w_seed * (1.0 - k6 * qp);
        let next_diag = match parity {
            Parity::Odd => {
                diag.n[a + 1] = (lhs - diag.d[a] * 0.5 - diag.d[a] * (k6 * qa)) * (4.0 / delta) - diag.n[a];
                ZERO
            }
            Parity::Even => {
                let d_next = (lhs - diag.d[a] * 0.5 - diag.d[a] * (k6 * qa)) / (0.5 + k6 * qb);
                diag.d[a + 1] = d_next;
                d_next
            }
        };
        let mut row = Vec::with_capacity(nb - a);
        row.push(next_diag);
        for b in (a + 2)..=nb {
            let i = a;
            let nw = prev[b - i];
            let sw = prev[b - 1 - i];
            let se = row[b - 1 - (a + 1)];
            let v = (nw * (1.0 - k * p.q_at(i * b)) - sw * (1.0 + k * p.q_at(i * (b - 1)))
                + se * (1.0 - k * p.q_at((i + 1) * (b - 1))))
                / (1.0 + k * p.q_at((i + 1) * b));
            row.push(v);
        }
        if !row.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteField { column: a + 1 });
        }
        rows.push(row);
    }
    let mut f = ModeField::from_columns(p, parity, nb);
    let mut col = Vec::with_capacity(nb + 1);
    for b in 0..=nb {
        col.clear();
        for (a, row) in rows.iter().enumerate().take(b + 1) {
            col.push(row[b - a]);
        }
        f.push_column(&col);
    }
    Ok((f, diag))
}

/// Reverse characteristic march from the boundary row, which is known for all
/// t′ through `row0(b)`, with the cap as the second boundary. Recovers both
/// parities of the diagonal data at once (no parity assumption).
pub fn solve_from_boundary(p: &ModeProblem, row0: impl Fn(usize) -> C64) -> Result<DiagonalData> {
    let nb = p.last_diagonal();
    let delta = p.delta;
    let k = 0.25 * delta * delta;
    let cap_idx = p.cap_index;
    // Row 0 extends to the largest index any later row needs.
    let mut prev: Vec<C64> = (0..=cap_idx + 2).map(&row0).collect();
    // (W(a, a-1), W(a, a), W(a, a+1)) per row
    let mut near: Vec<[C64; 3]> = Vec::with_capacity(nb + 2);
    near.push([ZERO, prev[0], prev[1]]);
    let mut prev_top = cap_idx + 2;
    let mut prev_cap: Option<f64> = None;
    let last_row = nb + 1;
    let mut cur: Vec<C64> = Vec::new();
    for a in 0..last_row {
        let r = a + 1;
        let top = (cap_idx / r).max(a);
        let low = a;
        cur.clear();
        cur.resize(top + 1, ZERO);
        // cut cell against the cap on row r
        let th = p.cap / r as f64;
        if top as f64 <= th && top >= low {
            let nw = interp_with_cap(&prev, prev_top, prev_cap, th);
            let sw = prev[top];
            let kk = 0.25 * delta * delta * (th - top as f64);
            let q_se = if r * top <= cap_idx { p.q_at(r * top) } else { 0.0 };
            let q_sw = p.q_at((a * top).min(cap_idx));
            let q_nw = p.potential(p.metric.x_max * a as f64 / r as f64);
            cur[top] = (sw * (1.0 + kk * q_sw) - nw * (1.0 - kk * q_nw)) / (1.0 - kk * q_se);
        }
        let mut b = top;
        while b > low {
            b -= 1;
            let q_se = p.q_at((r * b).min(cap_idx));
            let q_ne = p.q_at((r * (b + 1)).min(cap_idx));
            let q_nw = p.q_at((a * (b + 1)).min(cap_idx));
            let q_sw = p.q_at((a * b).min(cap_idx));
            cur[b] = (cur[b + 1] * (1.0 + k * q_ne) - prev[b + 1] * (1.0 - k * q_nw) + prev[b] * (1.0 + k * q_sw))
                / (1.0 - k * q_se);
        }
        if !cur[low..].iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteField { column: r });
        }
        let at = |i: usize| if i < cur.len() { cur[i] } else { ZERO };
        near.push([at(r - 1), at(r), at(r + 1)]);
        prev_top = top;
        prev_cap = Some(th);
        core::mem::swap(&mut prev, &mut cur);
    }
    let mut diag = DiagonalData::zeros(nb + 1);
    for a in 1..=nb {
        diag.d[a] = near[a][1];
        let wt = (near[a][2] - near[a][0]) / (2.0 * delta);
        let wx = (near[a + 1][0] - near[a - 1][2]) / (2.0 * delta);
        diag.n[a] = wt - wx;
    }
    Ok(diag)
}

/// Lemma-type weighted energy of V = W/|h|^{1/4} over the pre-cap triangle, doubled to the square.
pub fn energy_functional(f: &ModeField, p: &ModeProblem) -> f64 {
    let m = &p.metric;
    let d = f.delta;
    let nb = p.last_diagonal().min(f.columns());
    let mut total = 0.0;
    for b in 0..=nb {
        for a in 0..=b {
            let (xp, tp) = (a as f64 * d, b as f64 * d);
            let pp = xp * tp;
            let w = f.get(a, b).unwrap_or(ZERO);
            let deriv = |ap: usize, am: usize, bp: usize, bm: usize, h: f64| {
                let hi = f.get(ap, bp).unwrap_or(ZERO);
                let lo = f.get(am, bm).unwrap_or(ZERO);
                (hi - lo) / h
            };
            let (wx, wt) = {
                let (ap, am, hx) = if a == 0 { (1, 0, d) } else { (a + 1, a - 1, 2.0 * d) };
                let (bp, bm, ht) = if b == 0 { (1, 0, d) } else { (b + 1, b - 1, 2.0 * d) };
                let bp = bp.min(f.columns());
                let ht = if bp == b { ht * 0.5 } else { ht };
                (deriv(ap, am, b, b, hx), deriv(a, a, bp, bm, ht))
            };
            let phi = m.quarter_det(pp);
            let amc = m.mean_curvature(pp);
            let v = w / phi;
            let vx = (wx - w * (0.5 * amc * tp)) / phi;
            let vt = (wt - w * (0.5 * amc * xp)) / phi;
            let grad = m.mode_frequency_sq(p.mode, pp) * v.norm_sqr();
            let integrand =
                (v.norm_sqr() + pp * (xp + tp) * grad + xp * vx.norm_sqr() + tp * vt.norm_sqr()) * m.det_h(pp).sqrt();
            let mut weight = d * d;
            if a == b {
                weight *= 0.5;
            }
            if a == 0 || b == nb {
                weight *= 0.5;
            }
            total += integrand * weight;
        }
    }
    2.0 * total * m.boundary_measure()
}

/// Data-side functional ∫(x′|f₁|² + x′|f₂|² + x′³|∇f₁|²)√h(x′²) dx′ with
/// f₁ = V and f₂ = ∂ₓ'V on the diagonal.
pub fn energy_data_functional(p: &ModeProblem, data: &DiagonalData) -> f64 {
    let m = &p.metric;
    let d = p.delta;
    let len = data.d.len();
    let mut vals = Vec::with_capacity(len);
    for a in 0..len {
        let mu = a as f64 * d;
        let x = mu * mu;
        let phi = m.quarter_det(x);
        let dd = if a == 0 || a + 1 == len { ZERO } else { (data.d[a + 1] - data.d[a - 1]) / (2.0 * d) };
        let wx = (dd - data.n[a]) * 0.5;
        let f1 = data.d[a] / phi;
        let f2 = (wx - data.d[a] * (0.5 * m.mean_curvature(x) * mu)) / phi;
        let grad = m.mode_frequency_sq(p.mode, x) * f1.norm_sqr();
        vals.push((mu * f1.norm_sqr() + mu * f2.norm_sqr() + mu * mu * mu * grad) * m.det_h(x).sqrt());
    }
    crate::math::trapezoid(&vals, d) * m.boundary_measure()
}

/// (u_k, ∂ₜu_k) at (t, x) from the fields of both parities.
pub fn sample_interior(fields: &[&ModeField], m: &WarpedMetric, t: f64, x: f64) -> Result<(C64, C64)> {
    let rt = x.sqrt();
    let xp = rt * (-0.5 * t).exp();
    let tp = rt * (0.5 * t).exp();
    let mut w = ZERO;
    let mut wt = ZERO;
    for f in fields {
        let (v, dx, dt) = f.interpolate(xp, tp).ok_or(Error::OutsideTriangle { t, x })?;
        w += v;
        wt += (dt * tp - dx * xp) * 0.5;
    }
    let scale = x.powf(0.5 * m.n as f64) / m.quarter_det(x);
    Ok((w * scale, wt * scale))
}
