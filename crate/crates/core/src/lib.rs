pub mod bounds;
pub mod codes;
pub mod ffield;
pub mod harness;
pub mod linalg;
pub mod specfile;
pub mod textio;
