#![allow(dead_code)]

pub mod clique;
pub mod paths;
