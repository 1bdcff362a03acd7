pub mod area;
pub mod error;
pub mod export;
pub mod moduli;
pub mod norm;
pub mod search;
pub mod triangle;
pub mod vector;
pub mod verify;
