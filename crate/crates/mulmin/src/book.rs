//! Compile-checks the guide: every chapter under `book/src`, plus the
//! project README, is attached here as a documentation test, so the code
//! blocks they contain build and run under `cargo test`.

#![cfg(doctest)]

macro_rules! chapter {
    ($item:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub struct $item;
    };
}

chapter!(Readme, "../../../README.md");
chapter!(Introduction, "../../../book/src/introduction.md");
chapter!(Games, "../../../book/src/games.md");
chapter!(Solving, "../../../book/src/solving.md");
chapter!(Guarantees, "../../../book/src/guarantees.md");
chapter!(Improvement, "../../../book/src/improvement.md");
chapter!(Reweighting, "../../../book/src/reweighting.md");
chapter!(Oracle, "../../../book/src/oracle.md");
chapter!(Cli, "../../../book/src/cli.md");
