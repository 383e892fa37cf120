//! Reflection amplitudes of layered planar stacks at imaginary frequency.
//!
//! On the imaginary axis every medium wavevector
//! kappa = sqrt(eps * (xi/hbar c)^2 + Q^2) is real and positive, so
//! reflection amplitudes are real and interference factors e^(-2 delta)
//! decay monotonically. A [`Stack`] is a list of finite layers (outermost
//! first) on a semi-infinite substrate; its amplitude is the standard
//! interface recursion
//!
//! r = (r_top + r_below e^(-2 delta)) / (1 + r_top r_below e^(-2 delta))
//!
//! folded from the substrate outward. A vacuum layer therefore just
//! attenuates the substrate amplitude by its propagation factor, which is
//! exactly what moving the substrate further away must do.

use crate::constants::HBAR_C_EV_NM;
use crate::materials::{DielectricModel, MaterialError};

/// One spectral evaluation point of the Lifshitz integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    /// Imaginary photon energy xi in eV, strictly positive.
    pub xi: f64,
    /// Wavevector component parallel to the interfaces, in 1/nm,
    /// nonnegative.
    pub q_parallel: f64,
    /// Vacuum wavevector magnitude sqrt((xi/hbar c)^2 + q_parallel^2) in
    /// 1/nm. Never below `q_parallel`.
    pub k_vac: f64,
}

impl SpectralPoint {
    /// Builds a point from energy and parallel wavevector, deriving `k_vac`.
    ///
    /// Panics on xi <= 0 or q_parallel < 0; integration grids keep both
    /// strictly inside their domains.
    pub fn new(xi_ev: f64, q_parallel: f64) -> Self {
        assert!(xi_ev > 0.0, "xi must be positive, got {xi_ev}");
        assert!(q_parallel >= 0.0, "q_parallel must be nonnegative, got {q_parallel}");
        let q = xi_ev / HBAR_C_EV_NM;
        // Written as the eps = 1 case of medium_wavevector so that the two
        // agree bitwise.
        let k_vac = (q * q + q_parallel * q_parallel).sqrt();
        SpectralPoint {
            xi: xi_ev,
            q_parallel,
            k_vac,
        }
    }
}

/// s and p reflection amplitudes at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_s: f64,
    pub r_p: f64,
}

impl ReflectionPair {
    /// Amplitudes of an ideal mirror in this crate's sign convention: a
    /// perfect conductor reflects with r_s = -1 and r_p = +1.
    pub const IDEAL_MIRROR: ReflectionPair = ReflectionPair { r_s: -1.0, r_p: 1.0 };
}

/// A finite homogeneous film.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: DielectricModel,
    /// Thickness in nm, strictly positive.
    pub thickness_nm: f64,
}

/// Layers (outermost first, i.e. nearest the vacuum gap) on a semi-infinite
/// substrate. An empty layer list is a bare half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub layers: Vec<Layer>,
    pub substrate: DielectricModel,
}

impl Stack {
    /// Bare half-space of one material.
    pub fn half_space(material: DielectricModel) -> Self {
        Stack {
            layers: Vec::new(),
            substrate: material,
        }
    }

    /// Empty space; reflects nothing.
    pub fn vacuum() -> Self {
        Stack::half_space(DielectricModel::Vacuum)
    }

    /// Single film on a substrate.
    pub fn coated(material: DielectricModel, thickness_nm: f64, substrate: DielectricModel) -> Self {
        Stack {
            layers: vec![Layer {
                material,
                thickness_nm,
            }],
            substrate,
        }
    }
}

/// Wavevector magnitude inside a medium of permittivity `eps`:
/// sqrt(eps * (xi / hbar c)^2 + q_parallel^2), in 1/nm.
pub fn medium_wavevector(eps: f64, point: &SpectralPoint) -> f64 {
    debug_assert!(eps >= 1.0, "passive media have eps(i xi) >= 1, got {eps}");
    let q = point.xi / HBAR_C_EV_NM;
    (eps * (q * q) + point.q_parallel * point.q_parallel).sqrt()
}

/// Fresnel amplitudes for light going from medium `eps_i` into `eps_j`.
///
/// Identical media give exactly zero; a much denser medium j approaches the
/// ideal-mirror pair (r_s -> -1, r_p -> +1).
pub fn fresnel(eps_i: f64, eps_j: f64, point: &SpectralPoint) -> ReflectionPair {
    let ki = medium_wavevector(eps_i, point);
    let kj = medium_wavevector(eps_j, point);
    let r_s = (ki - kj) / (ki + kj);
    let r_p = (eps_j * ki - eps_i * kj) / (eps_j * ki + eps_i * kj);
    ReflectionPair { r_s, r_p }
}

/// Optical length delta of a layer at a spectral point: thickness times the
/// in-layer wavevector. The interference factor across the layer is
/// e^(-2 delta).
pub fn optical_length(layer: &Layer, point: &SpectralPoint) -> Result<f64, MaterialError> {
    let eps = layer.material.eval(point.xi)?;
    Ok(layer.thickness_nm * medium_wavevector(eps, point))
}

/// One Moebius composition step of the interface recursion, per
/// polarization.
fn compose(r_top: f64, r_below: f64, attenuation: f64) -> f64 {
    let x = r_below * attenuation;
    (r_top + x) / (1.0 + r_top * x)
}

/// A stack with all permittivities evaluated at one imaginary frequency.
///
/// The Lifshitz integrator fixes xi on the outer integration axis and sweeps
/// many Q values on the inner one; resolving materials once per xi keeps
/// potentially expensive models (Kramers-Kronig transforms of long tables)
/// out of the inner loop.
#[derive(Debug, Clone)]
pub struct ResolvedStack {
    /// (thickness_nm, eps) per layer, outermost first.
    layers: Vec<(f64, f64)>,
    substrate_eps: f64,
}

impl ResolvedStack {
    pub fn new(stack: &Stack, xi_ev: f64) -> Result<Self, MaterialError> {
        let layers = stack
            .layers
            .iter()
            .map(|layer| Ok((layer.thickness_nm, layer.material.eval(xi_ev)?)))
            .collect::<Result<Vec<_>, MaterialError>>()?;
        Ok(ResolvedStack {
            layers,
            substrate_eps: stack.substrate.eval(xi_ev)?,
        })
    }

    /// Reflection amplitudes of the whole stack, seen from the vacuum side.
    pub fn reflection(&self, point: &SpectralPoint) -> ReflectionPair {
        let deepest_eps = self.layers.last().map_or(1.0, |&(_, eps)| eps);
        let mut r = fresnel(deepest_eps, self.substrate_eps, point);
        for index in (0..self.layers.len()).rev() {
            let (thickness, eps) = self.layers[index];
            let eps_above = if index == 0 {
                1.0
            } else {
                self.layers[index - 1].1
            };
            let attenuation = (-2.0 * thickness * medium_wavevector(eps, point)).exp();
            let top = fresnel(eps_above, eps, point);
            r = ReflectionPair {
                r_s: compose(top.r_s, r.r_s, attenuation),
                r_p: compose(top.r_p, r.r_p, attenuation),
            };
        }
        r
    }
}

/// Reflection of a single film on a substrate.
pub fn slab_reflection(
    layer: &Layer,
    substrate: &DielectricModel,
    point: &SpectralPoint,
) -> Result<ReflectionPair, MaterialError> {
    let stack = Stack {
        layers: vec![layer.clone()],
        substrate: substrate.clone(),
    };
    stack_reflection(&stack, point)
}

/// Reflection of an arbitrary layered stack.
pub fn stack_reflection(stack: &Stack, point: &SpectralPoint) -> Result<ReflectionPair, MaterialError> {
    Ok(ResolvedStack::new(stack, point.xi)?.reflection(point))
}
