//! Naive reference implementations of every catalog feature, written
//! directly from the formula definitions with index loops.

#![allow(dead_code, clippy::needless_range_loop)]

pub const EPS: f64 = 1e-12;

pub struct Th {
    pub zc: f64,
    pub ssc: f64,
    pub wamp: f64,
    pub myop: f64,
}

fn abs_mean(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i].abs();
    }
    s / x.len() as f64
}

fn first_diff(x: &[f64]) -> Vec<f64> {
    let mut d = Vec::new();
    for i in 0..x.len() - 1 {
        d.push(x[i + 1] - x[i]);
    }
    d
}

fn population_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i];
    }
    let m = s / n;
    let mut v = 0.0;
    for i in 0..x.len() {
        v += (x[i] - m) * (x[i] - m);
    }
    v / n
}

pub fn mav(x: &[f64]) -> f64 {
    abs_mean(x)
}

pub fn iemg(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i].abs();
    }
    s
}

pub fn wl(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() - 1 {
        s += (x[i + 1] - x[i]).abs();
    }
    s
}

pub fn wamp(x: &[f64], th: &Th) -> f64 {
    let mut c = 0;
    for i in 0..x.len() - 1 {
        if (x[i + 1] - x[i]).abs() > th.wamp {
            c += 1;
        }
    }
    c as f64
}

pub fn zc(x: &[f64], th: &Th) -> f64 {
    let mut c = 0;
    for i in 0..x.len() - 1 {
        let crosses = (x[i] > 0.0 && x[i + 1] < 0.0) || (x[i] < 0.0 && x[i + 1] > 0.0);
        if crosses && (x[i] - x[i + 1]).abs() >= th.zc {
            c += 1;
        }
    }
    c as f64
}

pub fn ssc(x: &[f64], th: &Th) -> f64 {
    let mut c = 0;
    for i in 1..x.len() - 1 {
        if (x[i] - x[i - 1]) * (x[i] - x[i + 1]) > th.ssc {
            c += 1;
        }
    }
    c as f64
}

pub fn var(x: &[f64]) -> f64 {
    population_variance(x) * x.len() as f64 / (x.len() - 1) as f64
}

pub fn rms(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i] * x[i];
    }
    (s / x.len() as f64).sqrt()
}

pub fn log_detector(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += (x[i].abs() + EPS).ln();
    }
    (s / x.len() as f64).exp()
}

pub fn damv(x: &[f64]) -> f64 {
    wl(x) / (x.len() - 1) as f64
}

pub fn dasdv(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() - 1 {
        s += (x[i + 1] - x[i]).powi(2);
    }
    (s / (x.len() - 1) as f64).sqrt()
}

pub fn myop(x: &[f64], th: &Th) -> f64 {
    let mut c = 0;
    for i in 0..x.len() {
        if x[i].abs() > th.myop {
            c += 1;
        }
    }
    c as f64 / x.len() as f64
}

/// Adjusted Fisher–Pearson skewness G1.
pub fn skw(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i];
    }
    let m = s / n;
    let (mut s2, mut s3) = (0.0, 0.0);
    for i in 0..x.len() {
        let d = x[i] - m;
        s2 += d * d;
        s3 += d * d * d;
    }
    let (m2, m3) = (s2 / n, s3 / n);
    if m2 < EPS {
        return 0.0;
    }
    (m3 / m2.powf(1.5)) * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

pub fn mob(x: &[f64]) -> f64 {
    let vx = population_variance(x);
    if vx < EPS {
        return 0.0;
    }
    (population_variance(&first_diff(x)) / vx).sqrt()
}

pub fn com(x: &[f64]) -> f64 {
    let m = mob(x);
    if m < EPS {
        return 0.0;
    }
    mob(&first_diff(x)) / m
}

pub fn mfl(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() - 1 {
        s += (x[i + 1] - x[i]).powi(2);
    }
    let v = s.sqrt();
    (if v < EPS { EPS } else { v }).log10()
}

pub fn tkeo(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..x.len() - 1 {
        s += x[i] * x[i] - x[i - 1] * x[i + 1];
    }
    s / (x.len() - 2) as f64
}

pub fn cov(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i];
    }
    var(x).sqrt() / ((s / n).abs() + EPS)
}

pub fn lmav(x: &[f64]) -> f64 {
    let m = abs_mean(x);
    (if m < EPS { EPS } else { m }).sqrt().ln()
}

pub fn nsv(x: &[f64]) -> f64 {
    let m = abs_mean(x);
    let mut s = 0.0;
    for i in 0..x.len() {
        let d = m - x[i].abs().powf(1.0 / 3.0);
        s += d * d;
    }
    let msd = s / x.len() as f64;
    (if msd < EPS { EPS } else { msd }).sqrt().ln()
}

/// Yule–Walker coefficients: solve the Toeplitz normal equations of the
/// biased autocorrelation by Gaussian elimination with partial pivoting.
pub fn ar(x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut r = vec![0.0; order + 1];
    for k in 0..=order {
        for t in k..n {
            r[k] += x[t] * x[t - k];
        }
        r[k] /= n as f64;
    }
    if r[0] == 0.0 {
        return vec![0.0; order];
    }
    let mut a = vec![vec![0.0; order + 1]; order];
    for i in 0..order {
        for j in 0..order {
            a[i][j] = r[(i as isize - j as isize).unsigned_abs()];
        }
        a[i][order] = r[i + 1];
    }
    for col in 0..order {
        let mut piv = col;
        for row in col + 1..order {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        for row in col + 1..order {
            let f = a[row][col] / a[col][col];
            for j in col..=order {
                a[row][j] -= f * a[col][j];
            }
        }
    }
    let mut coef = vec![0.0; order];
    for i in (0..order).rev() {
        let mut s = a[i][order];
        for j in i + 1..order {
            s -= a[i][j] * coef[j];
        }
        coef[i] = s / a[i][i];
    }
    coef
}

fn root_sum_sq(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i] * x[i];
    }
    s.sqrt()
}

/// `[M0, M2, M4, SPARSENESS, IRREGULARITY_FACTOR, WL_RATIO]`.
pub fn tdpsd(x: &[f64]) -> [f64; 6] {
    let d1 = first_diff(x);
    let d2 = first_diff(&d1);
    let m0 = root_sum_sq(x);
    let m2 = root_sum_sq(&d1);
    let m4 = root_sum_sq(&d2);
    let h0 = m0.powf(0.1) / 0.1;
    let h2 = m2.powf(0.1) / 0.1;
    let h4 = m4.powf(0.1) / 0.1;
    let sp_den = ((m0 - m2).abs() * (m0 - m4).abs()).sqrt();
    let sparseness = if sp_den > 0.0 { m0 / sp_den } else { 0.0 };
    let if_den = (m0 * m4).sqrt();
    let irregularity = if if_den > 0.0 { m2 / if_den } else { 0.0 };
    [
        (h0 + EPS).ln(),
        ((h0 - h2).abs() + EPS).ln(),
        ((h0 - h4).abs() + EPS).ln(),
        (sparseness + EPS).ln(),
        (irregularity + EPS).ln(),
        (wl(x) / (wl(&d1) + EPS) + EPS).ln(),
    ]
}

/// Reference value of a feature by catalog name (`AR3` etc.).
pub fn feature(name: &str, x: &[f64], th: &Th, ar_order: usize) -> f64 {
    if let Some(k) = name.strip_prefix("AR") {
        let k: usize = k.parse().unwrap();
        return ar(x, ar_order)[k - 1];
    }
    match name {
        "MAV" => mav(x),
        "IEMG" => iemg(x),
        "WL" => wl(x),
        "WAMP" => wamp(x, th),
        "ZC" => zc(x, th),
        "SSC" => ssc(x, th),
        "VAR" => var(x),
        "RMS" => rms(x),
        "LOG" => log_detector(x),
        "DAMV" => damv(x),
        "DASDV" => dasdv(x),
        "MYOP" => myop(x, th),
        "SKW" => skw(x),
        "MOB" => mob(x),
        "COM" => com(x),
        "MFL" => mfl(x),
        "M0" => tdpsd(x)[0],
        "M2" => tdpsd(x)[1],
        "M4" => tdpsd(x)[2],
        "SPARSENESS" => tdpsd(x)[3],
        "IRREGULARITY_FACTOR" => tdpsd(x)[4],
        "WL_RATIO" => tdpsd(x)[5],
        "COV" => cov(x),
        "TKEO" => tkeo(x),
        "LMAV" => lmav(x),
        "NSV" => nsv(x),
        other => panic!("no reference for {other}"),
    }
}

/// `|a − b| ≤ 1e−9·max(|a|, |b|)`, or `≤ 1e−12` near zero.
pub fn close(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d <= 1e-12 || d <= 1e-9 * a.abs().max(b.abs())
}
