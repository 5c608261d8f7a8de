//! Pseudohermitian geometry of the Heisenberg groups `H_n`: p-areas of
//! hypersurfaces, Pansu spheres, and the projected p-areas that enter a
//! Cauchy-type surface area formula.

pub mod error;
pub mod expr;
pub mod heisenberg;
pub mod integrate;
pub mod projection;
pub mod schema;
pub mod special;
pub mod surfaces;
pub mod verify;

pub use error::{Error, Result};
pub use heisenberg::{AmbientVector, Constants, ContactVector, Dim, HPoint};
pub use integrate::{IntegralResult, QuadratureSpec, SphereRule};
pub use projection::{AmbientDirection, PansuDirection, ProjectionDecomposition};
pub use schema::{load_surface, parse_surface, SurfaceSpec};
pub use surfaces::{
    GraphSurface, PansuSphere, Profile, RotationalSurface, Sheet, Side, Surface, SurfacePoint,
};
pub use verify::{Report, ReportRow, VerifyConfig, Which};
