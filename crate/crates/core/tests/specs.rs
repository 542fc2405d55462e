use std::path::{Path, PathBuf};

use roby_core::pipeline::{examples, run};
use roby_core::freealg::FreeAlgebra;
use roby_core::roby::{char_morphism, split_roby, verify_roby};
use roby_core::specfile::{self, AlgebraFile, ModuleFile, P1ModuleFile, PipelineFile};

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

#[test]
fn shipped_pipelines_pass() {
    for name in ["quadric.toml", "quadric_skew_line.toml", "quadric_module_seed.toml"] {
        let file: PipelineFile = specfile::read(&spec(name)).unwrap();
        let out = run(&file.build().unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(out.passed(), "{name}");
        assert!(out.line_splitting_type.iter().all(|k| *k == 0), "{name}");
    }
}

#[test]
fn skew_line_needs_a_coordinate_change() {
    let file: PipelineFile = specfile::read(&spec("quadric_skew_line.toml")).unwrap();
    let out = run(&file.build().unwrap()).unwrap();
    assert!(out.coordinate_change);
    let straight = run(&examples::quadric()).unwrap();
    assert!(!straight.coordinate_change);
}

#[test]
fn split_algebra_file_matches_the_builtin() {
    let a = specfile::read::<AlgebraFile>(&spec("split3.toml")).unwrap().algebra.build().unwrap();
    assert_eq!(a.char_poly(), FreeAlgebra::split(3).char_poly());
    let m = split_roby(3);
    let text = specfile::to_string(&ModuleFile::from_module(&m)).unwrap();
    let back = specfile::from_str::<ModuleFile>(&text).unwrap().build().unwrap();
    assert!(verify_roby(&back).passed());
    assert_eq!(char_morphism(&back).unwrap().matrices(), char_morphism(&m).unwrap().matrices());
}

#[test]
fn bundle_files_read_back() {
    let t = specfile::read::<P1ModuleFile>(&spec("bundle_trivial.toml")).unwrap().build().unwrap();
    let u = specfile::read::<P1ModuleFile>(&spec("bundle_unbalanced.toml")).unwrap().build().unwrap();
    assert_ne!(t.splitting_type().unwrap(), u.splitting_type().unwrap());
    assert_eq!(t.splitting_type().unwrap().degree(), u.splitting_type().unwrap().degree());
}

#[test]
fn cubic_seeds() {
    // the naive 9-dimensional seed does not see z2 and is rejected
    assert!(run(&examples::cubic_naive()).is_err());
}
