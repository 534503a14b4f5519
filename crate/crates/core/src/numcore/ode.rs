use crate::{Error, Result};

/// Classical fixed-step RK4. Returns `steps + 1` samples including both
/// endpoints.
pub fn rk4(
    mut rhs: impl FnMut(f64, &[f64]) -> Vec<f64>,
    t0: f64,
    state0: &[f64],
    t1: f64,
    steps: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if steps == 0 {
        return Err(Error::InvalidParams("rk4 needs at least one step".into()));
    }
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = state0.to_vec();
    // Kahan compensation of the state update; long runs near a pole are
    // otherwise limited by accumulated rounding.
    let mut carry = vec![0.0; y.len()];
    out.push((t0, y.clone()));
    let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(t + h, &axpy(&y, &k3, h));
        let mut next = y.clone();
        let mut next_carry = carry.clone();
        for j in 0..y.len() {
            let inc = h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) - carry[j];
            next[j] = y[j] + inc;
            next_carry[j] = (next[j] - y[j]) - inc;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t, state: y });
        }
        y = next;
        carry = next_carry;
        let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
        out.push((t_next, y.clone()));
    }
    Ok(out)
}

/// Final state of an RK4 run.
pub fn rk4_endpoint(
    rhs: impl FnMut(f64, &[f64]) -> Vec<f64>,
    t0: f64,
    state0: &[f64],
    t1: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let mut traj = rk4(rhs, t0, state0, t1, steps)?;
    Ok(traj.pop().expect("non-empty trajectory").1)
}
