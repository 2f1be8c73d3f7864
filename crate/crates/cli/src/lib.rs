pub use distilforge_core as core;
