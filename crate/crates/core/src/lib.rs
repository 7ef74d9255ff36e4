//! Exact enumeration toolkit for the degree of asymmetry of combinatorial
//! objects: compositions, words, balanced binary words, binary trees,
//! perfect matchings, permutations and unimodal compositions.

pub mod bijections;
pub mod catalog;
pub mod combinat;
pub mod moments;
pub mod series;
pub mod verify;
