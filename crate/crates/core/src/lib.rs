//! Structure-preserving finite elements for inhomogeneous incompressible MHD.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod mms;
pub mod quadrature;
pub mod spaces;
pub mod stepper;

pub use error::{Error, Result};
pub use mesh::{build_box_mesh, BoxSpec, Mesh, Point};
pub use spaces::{Discretization, Family, Field, Space, Value};
