use super::{scalar_sample, Discretization};
use crate::error::{Error, Result};
use crate::fem::quadrature::{triangle_quadrature, NORM_DEGREE};
use crate::fem::{ElementGeometry, FeSpace, SpaceKind, Tabulation};
use crate::scheme::Params;

/// `E1h = int F(phi_h) + C1` and `E2h = 1/2 |u_h|^2 + C2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEnergies {
    pub e1: f64,
    pub e2: f64,
}

impl Discretization {
    /// `int_Omega F(phi_h)`, with `F` evaluated pointwise.
    pub fn potential_integral(&self, phi: &[f64], params: &Params) -> Result<f64> {
        self.check_p1("potential_integral: phi", phi)?;
        let tab = self.assembly_tab();
        let mut sum = 0.0;
        for t in 0..self.num_triangles() {
            let det = self.geometry(t).det;
            for q in 0..tab.rule.len() {
                let (v, _) = self.p1_sample(tab, t, q, phi);
                sum += tab.rule.weights[q] * det * params.potential(v);
            }
        }
        Ok(sum)
    }

    pub fn compute_discrete_energies(
        &self,
        phi: &[f64],
        u: &[f64],
        params: &Params,
    ) -> Result<DiscreteEnergies> {
        self.check_velocity("compute_discrete_energies: u", u)?;
        let e1 = self.potential_integral(phi, params)? + params.c1;
        let e2 = 0.5 * self.forms.mass_v.bilinear(u, u) + params.c2;
        if !(e1 > 0.0 && e1.is_finite()) {
            return Err(Error::StateCorruption(format!(
                "E1h = {e1} is not positive"
            )));
        }
        if !(e2 > 0.0 && e2.is_finite()) {
            return Err(Error::StateCorruption(format!(
                "E2h = {e2} is not positive"
            )));
        }
        Ok(DiscreteEnergies { e1, e2 })
    }
}

/// L2 norm and H1 seminorm of an error (or of a field, against zero).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

impl ErrorNorms {
    /// Full H1 norm `sqrt(L2^2 + |.|_1^2)`.
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

fn norm_tab() -> Result<Tabulation> {
    Ok(Tabulation::new(triangle_quadrature(NORM_DEGREE)?))
}

/// Error of a scalar field against `value`/`grad`, with the high-order rule.
pub fn scalar_error_norms(
    space: &FeSpace,
    coeffs: &[f64],
    value: impl Fn(f64, f64) -> f64,
    grad: impl Fn(f64, f64) -> [f64; 2],
) -> Result<ErrorNorms> {
    if space.kind.is_vector() {
        return Err(Error::InvalidArgument(
            "scalar norm of a vector space".into(),
        ));
    }
    space.check("scalar_error_norms: coeffs", coeffs)?;
    let tab = norm_tab()?;
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for t in 0..space.mesh.num_triangles() {
        let geom = ElementGeometry::new(&space.mesh, t);
        for q in 0..tab.rule.len() {
            let w = tab.rule.weights[q] * geom.det;
            let [x, y] = geom.map(tab.rule.points[q]);
            let (v, g) = scalar_sample(space, &geom, &tab, t, q, coeffs)?;
            let gr = grad(x, y);
            l2 += w * (v - value(x, y)).powi(2);
            semi += w * ((g[0] - gr[0]).powi(2) + (g[1] - gr[1]).powi(2));
        }
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
    })
}

/// Error of a velocity field; `grad[c][d] = d u_c / d x_d`.
pub fn vector_error_norms(
    space: &FeSpace,
    coeffs: &[f64],
    value: impl Fn(f64, f64) -> [f64; 2],
    grad: impl Fn(f64, f64) -> [[f64; 2]; 2],
) -> Result<ErrorNorms> {
    if space.kind != SpaceKind::P2Vector {
        return Err(Error::InvalidArgument(
            "vector norm of a scalar space".into(),
        ));
    }
    space.check("vector_error_norms: coeffs", coeffs)?;
    let tab = norm_tab()?;
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for t in 0..space.mesh.num_triangles() {
        let geom = ElementGeometry::new(&space.mesh, t);
        let dofs = space.cell_dofs(t);
        for q in 0..tab.rule.len() {
            let w = tab.rule.weights[q] * geom.det;
            let [x, y] = geom.map(tab.rule.points[q]);
            let mut v = [0.0; 2];
            let mut g = [[0.0; 2]; 2];
            for a in 0..6 {
                let ga = geom.grad(tab.p2_grad[q][a]);
                for c in 0..2 {
                    let u = coeffs[dofs[2 * a + c]];
                    v[c] += u * tab.p2_val[q][a];
                    g[c][0] += u * ga[0];
                    g[c][1] += u * ga[1];
                }
            }
            let vr = value(x, y);
            let gr = grad(x, y);
            for c in 0..2 {
                l2 += w * (v[c] - vr[c]).powi(2);
                semi += w * ((g[c][0] - gr[c][0]).powi(2) + (g[c][1] - gr[c][1]).powi(2));
            }
        }
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
    })
}

fn field_norms(space: &FeSpace, coeffs: &[f64]) -> Result<ErrorNorms> {
    if space.kind.is_vector() {
        vector_error_norms(space, coeffs, |_, _| [0.0; 2], |_, _| [[0.0; 2]; 2])
    } else {
        scalar_error_norms(space, coeffs, |_, _| 0.0, |_, _| [0.0; 2])
    }
}

pub fn l2_norm(space: &FeSpace, coeffs: &[f64]) -> Result<f64> {
    Ok(field_norms(space, coeffs)?.l2)
}

pub fn h1_seminorm(space: &FeSpace, coeffs: &[f64]) -> Result<f64> {
    Ok(field_norms(space, coeffs)?.h1_semi)
}

pub fn l2_error(space: &FeSpace, coeffs: &[f64], value: impl Fn(f64, f64) -> f64) -> Result<f64> {
    Ok(scalar_error_norms(space, coeffs, value, |_, _| [0.0; 2])?.l2)
}

pub fn h1_error(
    space: &FeSpace,
    coeffs: &[f64],
    value: impl Fn(f64, f64) -> f64,
    grad: impl Fn(f64, f64) -> [f64; 2],
) -> Result<f64> {
    Ok(scalar_error_norms(space, coeffs, value, grad)?.h1())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn energy_examples() {
        let d = Discretization::unit_square(4).unwrap();
        let mut p = Params::relaxation_preset();
        p.gamma = 1.0;
        p.c1 = 1.0;
        p.c2 = 0.1;
        let zero_u = vec![0.0; d.velocity.ndofs];
        let e = d
            .compute_discrete_energies(&vec![1.0; d.p1.ndofs], &zero_u, &p)
            .unwrap();
        assert!((e.e1 - 0.5).abs() < 1e-13);
        assert!((e.e2 - 0.1).abs() < 1e-15);

        let mut p = Params::convergence_preset();
        p.c1 = 0.1;
        let e = d
            .compute_discrete_energies(&vec![0.0; d.p1.ndofs], &zero_u, &p)
            .unwrap();
        assert!((e.e1 - 156.35).abs() < 1e-10);
        assert_eq!(e.e2, p.c2);

        // phi = 1 with a tiny shift drives E1h negative.
        let mut p = Params::relaxation_preset();
        p.c1 = 0.4;
        assert!(matches!(
            d.compute_discrete_energies(&vec![1.0; d.p1.ndofs], &zero_u, &p),
            Err(Error::StateCorruption(_))
        ));
    }

    #[test]
    fn kinetic_energy_of_unit_field() {
        let d = Discretization::unit_square(3).unwrap();
        let u = d.velocity.interpolate_vector(|_, _| [1.0, 1.0]).unwrap();
        let e = d
            .compute_discrete_energies(&vec![1.0; d.p1.ndofs], &u, &Params::relaxation_preset())
            .unwrap();
        assert!((e.e2 - (1.0 + 0.1)).abs() < 1e-13);
    }

    #[test]
    fn norm_examples() {
        let d = Discretization::unit_square(32).unwrap();
        let zeros = vec![0.0; d.p1.ndofs];
        assert_eq!(l2_error(&d.p1, &zeros, |_, _| 0.0).unwrap(), 0.0);
        let sine = l2_error(&d.p1, &zeros, |x, y| (PI * x).sin() * (PI * y).sin()).unwrap();
        assert!((sine - 0.5).abs() < 1e-6);

        let c = Discretization::unit_square(4).unwrap();
        let lin = c.p1.interpolate(|x, y| 2.0 * x - y + 0.5).unwrap();
        let e = h1_error(&c.p1, &lin, |x, y| 2.0 * x - y + 0.5, |_, _| [2.0, -1.0]).unwrap();
        assert!(e <= 1e-12);
        let quad = c
            .velocity
            .interpolate_vector(|x, y| [x * y, x * x - y])
            .unwrap();
        let e = vector_error_norms(
            &c.velocity,
            &quad,
            |x, y| [x * y, x * x - y],
            |x, y| [[y, x], [2.0 * x, -1.0]],
        )
        .unwrap();
        assert!(e.h1() <= 1e-12);
        // |grad (x, 0)|^2 = 1 over the unit square.
        let ux = c.velocity.interpolate_vector(|x, _| [x, 0.0]).unwrap();
        assert!((h1_seminorm(&c.velocity, &ux).unwrap() - 1.0).abs() < 1e-13);
    }
}
