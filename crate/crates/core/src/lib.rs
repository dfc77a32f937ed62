pub mod assess;
pub mod error;
pub mod exec;
pub mod ext;
pub mod growth;
pub mod io;
pub mod lab;
pub mod numeric;
pub mod process;
pub mod scenarios;
pub mod space;
pub mod variable;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use ext::ExtReal;
pub use space::FilteredSpace;
pub use variable::RandomVariable;
