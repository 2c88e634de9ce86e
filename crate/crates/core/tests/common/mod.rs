#![allow(dead_code)]

pub mod bigfloat;
pub mod brute_trees;
