//! Yule–Walker autoregressive coefficients via the Levinson–Durbin recursion.

/// Biased autocorrelation `r[k] = (1/N) Σ x[t] x[t+k]` for lags `0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..=max_lag)
        .map(|k| {
            if k >= x.len() {
                0.0
            } else {
                x.iter().zip(&x[k..]).map(|(a, b)| a * b).sum::<f64>() / n
            }
        })
        .collect()
}

/// Solve the Yule–Walker equations for every order `1..=order`.
///
/// `result[p - 1]` holds `[a_1, ..., a_p]` of the order-`p` model
/// `x_t = Σ a_k x_{t-k} + e_t`. If the prediction error vanishes (for
/// example an all-zero window) the remaining reflection coefficients are 0.
pub fn levinson_durbin(r: &[f64], order: usize) -> Vec<Vec<f64>> {
    assert!(r.len() > order, "need {} autocorrelation lags", order + 1);
    let mut models = Vec::with_capacity(order);
    let mut a: Vec<f64> = Vec::with_capacity(order);
    let mut err = r[0];
    for m in 1..=order {
        let kappa = if err > r[0] * 1e-14 && err > 0.0 {
            let acc = r[m] - (1..m).map(|k| a[k - 1] * r[m - k]).sum::<f64>();
            acc / err
        } else {
            0.0
        };
        let prev = a.clone();
        for k in 1..m {
            a[k - 1] = prev[k - 1] - kappa * prev[m - k - 1];
        }
        a.push(kappa);
        err *= 1.0 - kappa * kappa;
        models.push(a.clone());
    }
    models
}

/// Coefficients of the order-`order` model fitted to `x`.
pub fn ar_coefficients(x: &[f64], order: usize) -> Vec<f64> {
    let r = autocorrelation(x, order);
    levinson_durbin(&r, order).pop().unwrap_or_default()
}
