//! The spectral presheaf, its clopen sub-objects, sieves and the classifier Ω.

mod sections;
mod sieve;
mod spectrum;
mod subobject;

pub use sections::{global_sections_limited, global_sections_sigma, has_global_section, GlobalSection};
pub use sieve::{omega_restrict, GlobalOmegaElement, Sieve};
pub use spectrum::{evaluate_point, restrict_point, spectrum, SpectralPoint};
pub use subobject::ClopenSubobject;
