//! Mathematical entropy `S = -ρ s` with `s = ln p - γ ln ρ`, and its
//! entropy variables `w = ∂S/∂u`.
//!
//! No `1/(γ-1)` normalisation is applied, so the entropy potential of the
//! Euler flux is `ψ = (γ-1) ρ v`.

use super::{inadmissible, primitive_from_conservative, GasProperties, State};
use crate::error::Result;
use crate::linalg::dot3;

pub fn entropy(u: &State, gas: &GasProperties) -> Result<f64> {
    let q = primitive_from_conservative(u, gas)?;
    Ok(-q.rho * (q.p.ln() - gas.gamma * q.rho.ln()))
}

pub fn entropy_variables(u: &State, gas: &GasProperties) -> Result<State> {
    let q = primitive_from_conservative(u, gas)?;
    let g = gas.gamma;
    let s = q.p.ln() - g * q.rho.ln();
    let beta = (g - 1.0) * q.rho / q.p;
    Ok(State([
        g - s - 0.5 * beta * dot3(q.v, q.v),
        beta * q.v[0],
        beta * q.v[1],
        beta * q.v[2],
        -beta,
    ]))
}

/// Inverse of [`entropy_variables`].
pub fn conservative_from_entropy(w: &State, gas: &GasProperties) -> Result<State> {
    let g = gas.gamma;
    if !(w[4] < 0.0) {
        return Err(inadmissible(w, "entropy variable w5 must be negative"));
    }
    let beta = -w[4];
    let v = [w[1] / beta, w[2] / beta, w[3] / beta];
    let s = g - w[0] - 0.5 * beta * dot3(v, v);
    let rho_over_p = beta / (g - 1.0);
    let rho = ((s + rho_over_p.ln()) / (1.0 - g)).exp();
    Ok(gas.state_from_primitive(rho, v, rho / rho_over_p))
}

/// Entropy flux `S v_d`.
pub fn entropy_flux(u: &State, gas: &GasProperties) -> Result<[f64; 3]> {
    let q = primitive_from_conservative(u, gas)?;
    let s = -q.rho * (q.p.ln() - gas.gamma * q.rho.ln());
    Ok(q.v.map(|v| s * v))
}

/// Entropy flux potential `ψ_d = w·F_d - q_d = (γ-1) ρ v_d`.
pub fn entropy_potential(u: &State, gas: &GasProperties) -> Result<[f64; 3]> {
    let q = primitive_from_conservative(u, gas)?;
    Ok(q.v.map(|v| (gas.gamma - 1.0) * q.rho * v))
}

#[cfg(test)]
mod tests {
    use super::super::euler_flux;
    use super::*;
    use proptest::prelude::*;

    fn gas() -> GasProperties {
        GasProperties::inviscid(1.4)
    }

    #[test]
    fn reference_state_entropy_variables() {
        let g = gas();
        let w = entropy_variables(&g.state_from_primitive(1.0, [0.0; 3], 1.0), &g).unwrap();
        let expect = [1.4, 0.0, 0.0, 0.0, -0.4];
        for i in 0..5 {
            assert!((w[i] - expect[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn isentropic_scaling_keeps_w5_closed_form() {
        let g = gas();
        // p = ρ^γ keeps s = 0
        for rho in [0.5_f64, 2.0, 3.7] {
            let p = rho.powf(1.4);
            let w = entropy_variables(&g.state_from_primitive(rho, [0.0; 3], p), &g).unwrap();
            assert!((w[4] + 0.4 * rho / p).abs() < 1e-14);
            assert!((w[0] - 1.4).abs() < 1e-13);
        }
    }

    fn admissible() -> impl Strategy<Value = State> {
        (0.2..3.0f64, -1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64, 0.2..4.0f64).prop_map(
            |(rho, a, b, c, p)| GasProperties::inviscid(1.4).state_from_primitive(rho, [a, b, c], p),
        )
    }

    proptest! {
        #[test]
        fn entropy_variables_match_finite_differences(u in admissible()) {
            let g = gas();
            let w = entropy_variables(&u, &g).unwrap();
            for k in 0..5 {
                let h = 1e-6 * u[k].abs().max(1.0);
                let mut up = u; up[k] += h;
                let mut dn = u; dn[k] -= h;
                let fd = (entropy(&up, &g).unwrap() - entropy(&dn, &g).unwrap()) / (2.0 * h);
                prop_assert!((fd - w[k]).abs() <= 1e-6 * w[k].abs().max(1.0));
            }
        }

        #[test]
        fn entropy_map_round_trip(u in admissible()) {
            let g = gas();
            let back = conservative_from_entropy(&entropy_variables(&u, &g).unwrap(), &g).unwrap();
            for k in 0..5 {
                prop_assert!((back[k] - u[k]).abs() < 1e-10 * u[k].abs().max(1.0));
            }
        }

        #[test]
        fn potential_is_w_dot_f_minus_entropy_flux(u in admissible()) {
            let g = gas();
            let w = entropy_variables(&u, &g).unwrap();
            let f = euler_flux(&u, &g).unwrap();
            let q = entropy_flux(&u, &g).unwrap();
            let psi = entropy_potential(&u, &g).unwrap();
            for d in 0..3 {
                prop_assert!((w.dot(&f[d]) - q[d] - psi[d]).abs() < 1e-11);
            }
        }
    }
}
