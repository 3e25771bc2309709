pub mod certificate;
pub mod presentation;
pub mod rep;
pub mod rewrite;
pub mod search;
pub mod word;

pub use presentation::{GroupPresentation, TwistKnotParams};
pub use word::{Alphabet, Letter, Word, WordError};

// Concrete scalar choices for the generic representation code.
pub use rep::{Matrix2F64, Matrix2Mp, RepresentationF64, RepresentationMp};
