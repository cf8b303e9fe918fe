//! The named experiments of the batch driver. Each one loads its inputs
//! (explicit paths or the bundled fixtures), runs the verification and
//! returns a report.

use num_complex::Complex64;
use prodsys::free_flow::TimeTuple;
use prodsys::io::{BimoduleDesc, FreeUnitDesc, KernelDesc, UnitDesc};
use prodsys::kernel::PSD_TOL;
use prodsys::product::ProductSystemPair;
use prodsys::trotter::{convergence_report, cross_convergence_report, WeightedUnits};
use prodsys::units::TimeOrderedSystem;
use prodsys::{Bimodule, CpdKernel};

use crate::config::ExperimentConfig;
use crate::criteria;
use crate::report::Report;
use crate::DriverError;

/// Bundled fixtures, compiled into the binary so the driver runs anywhere.
pub mod fixtures {
    pub const KERNEL_M2_KOLMOGOROV: &str = include_str!("../fixtures/kernel_m2_kolmogorov.json");
    pub const KERNEL_M2_UNITS: &str = include_str!("../fixtures/kernel_m2_units.json");
    pub const UNIT_M2_A: &str = include_str!("../fixtures/unit_m2_a.json");
    pub const UNIT_M2_B: &str = include_str!("../fixtures/unit_m2_b.json");
    pub const BIMODULE_M2: &str = include_str!("../fixtures/bimodule_m2.json");
    pub const FREE_UNIT_M2: &str = include_str!("../fixtures/free_unit_m2.json");
}

fn load_text(config: &ExperimentConfig, role: &str, fallback: &str) -> Result<String, DriverError> {
    match config.inputs.get(role) {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| DriverError::Io(path.clone(), e.to_string()))
        }
        None => Ok(fallback.to_string()),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(role: &str, text: &str) -> Result<T, DriverError> {
    serde_json::from_str(text).map_err(|e| {
        DriverError::Parse(format!(
            "{role}: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn load_kernel(config: &ExperimentConfig, fallback: &str) -> Result<CpdKernel, DriverError> {
    let text = load_text(config, "kernel", fallback)?;
    let desc: KernelDesc = parse_json("kernel", &text)?;
    Ok(desc.to_kernel()?)
}

/// check-cpd: hermitian symmetry and complete positive definiteness of a
/// kernel file.
pub fn check_cpd(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let kernel = load_kernel(config, fixtures::KERNEL_M2_KOLMOGOROV)?;
    let tol = config.tolerance("psd", PSD_TOL);
    let mut report = Report::new();
    report.check(
        "Sec3-CPD",
        "hermitian symmetry of the kernel",
        kernel.symmetry_residual(),
        config.tolerance("symmetry", 1e-12),
    );
    report.check_bool(
        "Sec3-CPD",
        "kernel is completely positive definite",
        kernel.is_cpd(tol)?,
    );
    Ok(report)
}

/// kolmogorov: decomposition of a kernel file with round-trip residual and
/// rank report.
pub fn kolmogorov(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let kernel = load_kernel(config, fixtures::KERNEL_M2_KOLMOGOROV)?;
    let mut report = Report::new();
    let dec = kernel.kolmogorov()?;
    let back = dec.kernel()?;
    report.check(
        "Sec3-Kolmogorov",
        "kernel round-trip through the decomposition",
        kernel.distance(&back),
        config.tolerance("roundtrip", 1e-9),
    );
    report.check_bool(
        "Sec3-Kolmogorov",
        &format!(
            "module dimension {} with block ranks {:?}",
            dec.module.complex_dimension(),
            dec.block_ranks
        ),
        true,
    );
    Ok(report)
}

/// ce-split: Christensen-Evans split of a generator kernel at the reference
/// label (default "w").
pub fn ce_split(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let kernel = load_kernel(config, fixtures::KERNEL_M2_UNITS)?;
    let reference = config
        .params
        .reference
        .clone()
        .unwrap_or_else(|| "w".to_string());
    let tol = config.tolerance("ce_row", 1e-10);
    let mut report = Report::new();
    let split = kernel.ce_split(&reference, tol)?;
    let w = kernel.label_index(&reference)?;
    report.check(
        "Eq4.2",
        "β at the reference label vanishes",
        split.betas[w].operator_norm(),
        config.tolerance("beta_reference", 1e-12),
    );
    report.check(
        "Eq4.2",
        "reconstruction L = L0 + β*(·) + (·)β",
        split.reassemble().distance(&kernel),
        config.tolerance("reconstruction", 1e-12),
    );
    report.check_bool(
        "Eq4.2",
        "L0 is completely positive definite",
        split.l0.is_cpd(PSD_TOL)?,
    );
    Ok(report)
}

/// semigroup: entrywise semigroup law of a generator kernel at the
/// configured times.
pub fn semigroup(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let kernel = load_kernel(config, fixtures::KERNEL_M2_UNITS)?;
    let times = config.params.times.clone().unwrap_or(vec![0.3, 0.7]);
    let tol = config.tolerance("semigroup", 1e-10);
    let mut report = Report::new();
    for &s in &times {
        for &t in &times {
            let lhs = kernel.at_time(s + t)?;
            let rhs = kernel.at_time(t)?.compose_entrywise(&kernel.at_time(s)?)?;
            report.check(
                "Eq3.1",
                &format!("exp(({s}+{t})L) = exp({t}L)∘exp({s}L)"),
                lhs.distance(&rhs),
                tol,
            );
        }
    }
    Ok(report)
}

fn m2_unit_system() -> TimeOrderedSystem {
    TimeOrderedSystem::new(Bimodule::free(&prodsys::Algebra::full_matrix(2), 1))
}

/// trotter-converge: convergence report of the mean and cross approximants
/// for two units loaded from files (defaults bundled).
pub fn trotter_converge(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let system = m2_unit_system();
    let unit_a: UnitDesc =
        parse_json("unit_a", &load_text(config, "unit_a", fixtures::UNIT_M2_A)?)?;
    let unit_b: UnitDesc =
        parse_json("unit_b", &load_text(config, "unit_b", fixtures::UNIT_M2_B)?)?;
    let p1 = unit_a.to_unit(&system)?;
    let p2 = unit_b.to_unit(&system)?;
    let t = config.params.t.unwrap_or(1.0);
    let ns = config
        .params
        .ns
        .clone()
        .unwrap_or(vec![64, 128, 256, 512, 1024, 2048, 4096]);
    let kappa = config.params.kappa.clone().unwrap_or(vec![0.5, 0.5]);
    if kappa.len() != 2 {
        return Err(DriverError::Parse("kappa must have two entries".into()));
    }
    let w = WeightedUnits::new(
        kappa.iter().map(|&k| Complex64::new(k, 0.0)).collect(),
        vec![p1.clone(), p2],
    )?;
    let mut report = Report::new();
    // each row asserts the mesh-linear envelope anchored at the first row;
    // consecutive rows assert the halving rate
    let rows = convergence_report(&system, &w, t, &ns)?;
    let anchor = rows.first().map(|r| r.error * r.n as f64).unwrap_or(0.0);
    for row in &rows {
        report.check(
            "LemA.5-rate",
            &format!(
                "n = {}, mesh = {:.6e}, ratio = {:.3}",
                row.n, row.mesh, row.ratio
            ),
            row.error,
            2.0 * anchor / row.n as f64 + 1e-13,
        );
    }
    for pair in rows.windows(2) {
        report.check(
            "LemA.5-rate",
            &format!("error({}) ≤ 0.75·error({})", pair[1].n, pair[0].n),
            pair[1].error,
            0.75 * pair[0].error + 1e-13,
        );
    }
    if let Some(last) = rows.last() {
        report.check(
            "LemA.5-rate",
            &format!("final error at n = {}", last.n),
            last.error,
            config.tolerance("trotter_error", 1e-3),
        );
    }
    let cross_rows = cross_convergence_report(&system, &p1, &w, t, &ns)?;
    let cross_anchor = cross_rows
        .first()
        .map(|r| r.error * r.n as f64)
        .unwrap_or(0.0);
    for row in &cross_rows {
        report.check(
            "LemA.5-cross",
            &format!(
                "n = {}, mesh = {:.6e}, ratio = {:.3}",
                row.n, row.mesh, row.ratio
            ),
            row.error,
            2.0 * cross_anchor / row.n as f64 + 1e-13,
        );
    }
    for pair in cross_rows.windows(2) {
        report.check(
            "LemA.5-cross",
            &format!("cross error({}) ≤ 0.75·error({})", pair[1].n, pair[0].n),
            pair[1].error,
            0.75 * pair[0].error + 1e-13,
        );
    }
    Ok(report)
}

/// product-index: builds the product of two module descriptors and verifies
/// rank additivity plus the structural maps.
pub fn product_index(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let left: BimoduleDesc = parse_json(
        "bimodule_left",
        &load_text(config, "bimodule_left", fixtures::BIMODULE_M2)?,
    )?;
    let right: BimoduleDesc = parse_json(
        "bimodule_right",
        &load_text(config, "bimodule_right", fixtures::BIMODULE_M2)?,
    )?;
    let f1 = left.to_bimodule()?;
    let f2 = right.to_bimodule()?;
    let pair = ProductSystemPair::new(&f1, &f2)?;
    let mut report = Report::new();
    report.check_bool(
        "Thm6.7",
        &format!(
            "index ranks add: {} + {} = {}",
            f1.rank(),
            f2.rank(),
            pair.product().index().rank()
        ),
        f1.rank() + f2.rank() == pair.product().index().rank(),
    );
    report.check_bool(
        "Thm6.7",
        &format!(
            "complex dimensions add: {} + {} = {}",
            f1.complex_dimension(),
            f2.complex_dimension(),
            pair.product().index().complex_dimension()
        ),
        f1.complex_dimension() + f2.complex_dimension()
            == pair.product().index().complex_dimension(),
    );
    report.check(
        "Thm5.6",
        "the product vacuum decomposes",
        pair.decompose_residual(&pair.product().vacuum())?,
        1e-12,
    );
    Ok(report)
}

/// decompose-tuple: decomposes the configured tuple, verifies it against the
/// exhaustive oracle (for short tuples) and prints the bracket form.
pub fn decompose_tuple(config: &ExperimentConfig) -> Result<(Report, String), DriverError> {
    let entries = config
        .params
        .tuple
        .clone()
        .unwrap_or(vec![3.0, 1.0, 2.0, 2.0, 1.0]);
    let tuple = TimeTuple::new(entries.clone())?;
    let decomposition = prodsys::free_flow::decompose(&tuple);
    let mut report = Report::new();
    report.check_bool(
        "Prop9.1",
        "decomposition satisfies the leader conditions",
        decomposition.is_valid_for(&entries),
    );
    report.check_bool(
        "Prop9.1",
        &format!(
            "subtuple offsets for exact replay: {:?}",
            decomposition.offsets()
        ),
        decomposition.offsets().first() == Some(&0),
    );
    if entries.len() <= 12 {
        let valid = prodsys::free_flow::enumerate_valid_segmentations(&entries);
        report.check_bool(
            "Prop9.1",
            "the oracle finds exactly this segmentation",
            valid.len() == 1 && valid[0] == decomposition,
        );
    }
    Ok((report, decomposition.bracket_string()))
}

/// free-flow-verify: the closed overlap series against the unit inner
/// product over the Kolmogorov-realized index, for a free unit file.
pub fn free_flow_verify(config: &ExperimentConfig) -> Result<Report, DriverError> {
    let algebra = prodsys::Algebra::full_matrix(2);
    let base = Bimodule::free(&algebra, 1);
    let desc: FreeUnitDesc = parse_json(
        "free_unit",
        &load_text(config, "free_unit", fixtures::FREE_UNIT_M2)?,
    )?;
    let zeta = desc.to_param(&base)?;
    let n = zeta.max_particles();
    let t = config.params.t.unwrap_or(1.0);
    let mut report = Report::new();
    let o = prodsys::free_flow::overlap_superop(&zeta, &zeta, n)?;
    let kernel = CpdKernel::new(&algebra, vec!["z".into()], vec![o])?;
    let dec = kernel.kolmogorov()?;
    let system = TimeOrderedSystem::new(dec.module.clone());
    let p = system.unit(
        prodsys::AlgebraElement::zero(&algebra),
        dec.vectors[0].clone(),
    )?;
    for pidx in 0..algebra.dim() {
        let b = algebra.basis_element(pidx);
        let closed = prodsys::free_flow::free_inner_closed(&zeta, &zeta, &b, t, n)?;
        let via_units = system.unit_inner(&p, &p, t, &b)?;
        report.check(
            "Thm9.3",
            &format!("closed series = unit inner product at basis {pidx}"),
            closed.distance(&via_units),
            config.tolerance("free_flow", 1e-9),
        );
    }
    let h = config.params.h.unwrap_or(1.0 / 16.0);
    let one = algebra.unit();
    let closed = prodsys::free_flow::free_inner_closed(&zeta, &zeta, &one, t, n)?;
    let coarse =
        prodsys::free_flow::free_inner_quadrature(&zeta, &zeta, &one, t, n, h)?.distance(&closed);
    let fine = prodsys::free_flow::free_inner_quadrature(&zeta, &zeta, &one, t, n, h / 2.0)?
        .distance(&closed);
    report.check(
        "Cor9.2-quadrature",
        &format!("halving h = {h} keeps at least order 0.9"),
        (0.9 - (coarse / fine).log2()).max(0.0),
        1e-12,
    );
    // structural zeros past the horizon are flagged as such, distinct from
    // numerically zero values
    let beyond = prodsys::free_flow::TimeTuple::new(vec![t + 0.5])?;
    report.check_bool(
        "Eq9.2",
        "component beyond the horizon is a structural zero",
        prodsys::free_flow::free_unit_component(&zeta, t, &beyond)?.is_structural_zero(),
    );
    Ok(report)
}

/// suite: all acceptance criteria with the given seed.
pub fn suite(seed: u64) -> Report {
    criteria::run_suite(seed)
}
