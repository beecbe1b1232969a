pub mod diagram;
pub mod error;
pub mod free_calculus;
pub mod limit_shapes;
pub mod markov_krein;
pub mod measure;
pub mod numeric;
pub mod symmetric_group;
pub mod young_measures;

pub use error::{Error, Result};

// Compile and run the book's snippets as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/markov_krein.md")]
    mod markov_krein {}
    #[doc = include_str!("../../../book/src/free_calculus.md")]
    mod free_calculus {}
    #[doc = include_str!("../../../book/src/limit_shapes.md")]
    mod limit_shapes {}
    #[doc = include_str!("../../../book/src/symmetric_group.md")]
    mod symmetric_group {}
    #[doc = include_str!("../../../book/src/young_measures.md")]
    mod young_measures {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
