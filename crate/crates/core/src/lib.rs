pub mod assembly;
pub mod bath;
pub mod checks;
pub mod dyson;
pub mod error;
pub mod fga;
pub mod inchworm;
pub mod model;
pub mod output;
pub mod pipeline;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/configuration.md")]
mod book_configuration {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bath.md")]
mod book_bath {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/beams.md")]
mod book_beams {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/inchworm.md")]
mod book_inchworm {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/running.md")]
mod book_running {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/validation.md")]
mod book_validation {}
