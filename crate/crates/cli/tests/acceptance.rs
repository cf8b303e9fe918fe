//! The acceptance gate: every criterion runs at its pinned tolerance and
//! prints one pass/fail line. Run with `cargo test --test acceptance` (add
//! `-- --nocapture` to see the lines as they pass).

use prodsys_cli::criteria;
use prodsys_cli::report::Report;

const SEED: u64 = 42;

fn gate(name: &str, report: Report) {
    let status = if report.all_pass() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] {name}: {status} ({} assertions, max residual {:.3e})",
        report.rows().len(),
        report.max_residual()
    );
    if !report.all_pass() {
        for row in report.failures() {
            eprintln!(
                "  FAIL [{}] {}: residual {:.6e} > tolerance {:.1e}",
                row.theorem, row.assertion, row.residual, row.tolerance
            );
        }
        panic!("{name} failed");
    }
}

#[test]
fn c01_semigroup_law() {
    gate(
        "C01 semigroup law (Eq3.1)",
        criteria::c01_semigroup_law(SEED),
    );
}

#[test]
fn c02_cpd_certification_and_kolmogorov_roundtrip() {
    gate(
        "C02 CPD certification + Kolmogorov round-trip (Sec3)",
        criteria::c02_cpd_kolmogorov(SEED),
    );
}

#[test]
fn c03_ce_split() {
    gate("C03 CE-split (Eq4.2)", criteria::c03_ce_split(SEED));
}

#[test]
fn c04_trotter_convergence() {
    gate(
        "C04 Trotter convergence (Eq4.1, LemA.5)",
        criteria::c04_trotter_convergence(SEED),
    );
}

#[test]
fn c05_trotter_algebra() {
    gate(
        "C05 Trotter algebra (Def4.4, Prop4.5, Cor4.6)",
        criteria::c05_trotter_algebra(SEED),
    );
}

#[test]
fn c06_index_additivity() {
    gate(
        "C06 index additivity (Thm6.7)",
        criteria::c06_index_additivity(SEED),
    );
}

#[test]
fn c07_unit_decomposition() {
    gate(
        "C07 unit decomposition (Thm5.6)",
        criteria::c07_unit_decomposition(SEED),
    );
}

#[test]
fn c08_automorphisms() {
    gate(
        "C08 automorphisms (Prop6.6)",
        criteria::c08_automorphisms(SEED),
    );
}

#[test]
fn c09_tuple_decomposition_exhaustive() {
    gate(
        "C09 tuple decomposition (Prop9.1)",
        criteria::c09_tuple_decomposition(SEED),
    );
}

#[test]
fn c10_free_flow_isomorphism() {
    gate(
        "C10 free flow isomorphism (Thm9.3, Cor9.2)",
        criteria::c10_free_flow_isomorphism(SEED),
    );
}

#[test]
fn c11_unit_recursion() {
    gate(
        "C11 unit recursion (Eq9.1)",
        criteria::c11_unit_recursion(SEED),
    );
}

#[test]
fn c12_scalar_tensor_factorization() {
    gate(
        "C12 scalar tensor factorization (Prop6.8)",
        criteria::c12_scalar_tensor(SEED),
    );
}
