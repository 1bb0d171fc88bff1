mod fit_comparison_density {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/fit_comparison_density.rs"
    ));
}

mod find_modes {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/find_modes.rs"
    ));
}

mod bootstrap_modes {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/bootstrap_modes.rs"
    ));
}

mod sample_fitted_density {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/sample_fitted_density.rs"
    ));
}

mod batch_screen {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/batch_screen.rs"
    ));
}

mod benchmark_table {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/benchmark_table.rs"
    ));
}

mod kernel_smoother {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/kernel_smoother.rs"
    ));
}

mod maxent_moments {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/maxent_moments.rs"
    ));
}

#[test]
fn fit_comparison_density_runs() {
    fit_comparison_density::run_example().expect("fit_comparison_density example should run");
}

#[test]
fn find_modes_runs() {
    find_modes::run_example().expect("find_modes example should run");
}

#[test]
fn bootstrap_modes_runs() {
    bootstrap_modes::run_example().expect("bootstrap_modes example should run");
}

#[test]
fn sample_fitted_density_runs() {
    sample_fitted_density::run_example().expect("sample_fitted_density example should run");
}

#[test]
fn batch_screen_runs() {
    batch_screen::run_example().expect("batch_screen example should run");
}

#[test]
fn benchmark_table_runs() {
    benchmark_table::run_example().expect("benchmark_table example should run");
}

#[test]
fn kernel_smoother_runs() {
    kernel_smoother::run_example().expect("kernel_smoother example should run");
}

#[test]
fn maxent_moments_runs() {
    maxent_moments::run_example().expect("maxent_moments example should run");
}
