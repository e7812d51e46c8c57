//! Holds the acceptance suite (`cargo test -p cdl-validation --test acceptance`).
//! It lives in its own package so that the rest of the workspace tests run
//! before it.
