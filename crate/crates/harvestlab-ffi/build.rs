use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    println!("cargo:rerun-if-changed=tests/c/smoke.c");
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("cbindgen.toml");
    cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
        .expect("header generation")
        .write_to_file(dir.join("include/harvestlab.h"));

    // C client used by the integration tests, built against the fresh header
    cc::Build::new()
        .file(dir.join("tests/c/smoke.c"))
        .include(dir.join("include"))
        .flag("-std=c99")
        .warnings_into_errors(true)
        .cargo_metadata(false)
        .compile("hlsmoke");
    println!("cargo:rustc-link-search=native={}", std::env::var("OUT_DIR").unwrap());
}
