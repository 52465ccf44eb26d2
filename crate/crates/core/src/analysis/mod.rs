//! Region energies, the monotonicity profile, the Pohozaev balance and
//! growth-law fits.

mod energy;
mod growth;
mod pohozaev;

pub use energy::{
    energy_cylinder, energy_halfball, energy_window, halfball_dirichlet_integral, phi_profile, rescale_field,
    EnergyBreakdown, Region,
};
pub use growth::{growth_fit, GrowthFit, Regime};
pub use pohozaev::{nodal_gradient_at, pohozaev_residual, PohozaevReport};
