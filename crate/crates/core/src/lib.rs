//! Certification engine for tangential joins of Veronese varieties.

pub mod certifier;
pub mod error;
pub mod field;
pub mod forms;
pub mod interp;
pub mod lab;
pub mod linalg;
pub mod params;
pub mod schemes;
pub mod singular;
pub mod tangent;
pub mod upoly;

pub use error::{Error, Result};
pub use field::{Domain, Field, PrimeField, Rationals, Reals, DEFAULT_PRIME, SECONDARY_PRIME};
pub use forms::{power_form, tangent_form, DenseForm, LinearForm, MonomialIndex, ProjPoint};
pub use params::{parameter_table, ParameterTable, Params};
pub use interp::{derive_seed, Certificate, TrialPolicy, Verdict};
pub use certifier::DripReport;
pub use lab::{PlantedInstance, RecoveryResult};
