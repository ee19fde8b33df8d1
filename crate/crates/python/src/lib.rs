//! Python bindings: groups, effective dimensions, entropies and the
//! verification runner.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use qrf_core::config::{parse_config, preset, presets as bundled, to_toml};
use qrf_core::entropy::{effective_dimension as deff, renyi_of_probabilities, EntropyParams, LogBase};
use qrf_core::group::{GroupKind, GroupTable};
use qrf_core::irreps::IrrepTable;
use qrf_core::verify::{reverify_witness, run_checks, ExperimentSpec, InvariantReport};

fn err(e: qrf_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn group_kind(kind: &str, n: usize) -> PyResult<GroupKind> {
    match kind {
        "cyclic" => Ok(GroupKind::Cyclic(n)),
        "dihedral" => Ok(GroupKind::Dihedral(n)),
        "symmetric" => Ok(GroupKind::Symmetric(n)),
        other => Err(PyValueError::new_err(format!(
            "unknown group kind {other:?}; expected cyclic, dihedral or symmetric"
        ))),
    }
}

/// A finite group together with its irreducible representations.
#[pyclass(frozen)]
struct Group {
    irreps: IrrepTable,
}

#[pymethods]
impl Group {
    #[new]
    fn new(kind: &str, n: usize) -> PyResult<Self> {
        let table = GroupTable::from_kind(group_kind(kind, n)?).map_err(err)?;
        Ok(Self {
            irreps: IrrepTable::for_group(&table).map_err(err)?,
        })
    }

    #[getter]
    fn order(&self) -> usize {
        self.irreps.group().order()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.irreps.group().labels().to_vec()
    }

    /// Dimensions of the irreps, in table order.
    #[getter]
    fn irrep_dims(&self) -> Vec<usize> {
        self.irreps.dims()
    }

    fn multiply(&self, g: usize, h: usize) -> PyResult<usize> {
        let n = self.order();
        if g >= n || h >= n {
            return Err(PyValueError::new_err(format!("element index out of range 0..{n}")));
        }
        Ok(self.irreps.group().mul(g, h))
    }

    /// Character of irrep `q` at element `g` as `(re, im)`.
    fn character(&self, q: usize, g: usize) -> PyResult<(f64, f64)> {
        if q >= self.irreps.len() || g >= self.order() {
            return Err(PyValueError::new_err("irrep or element index out of range"));
        }
        let c = self.irreps.character(q, g);
        Ok((c.re, c.im))
    }

    /// Multiplicity of irrep `c` in `a ⊗ b`.
    fn fusion(&self, a: usize, b: usize, c: usize) -> PyResult<usize> {
        self.irreps.fusion_coefficient(a, b, c).map_err(err)
    }

    /// `d_eff(target | cond)` for the given irrep multiplicities.
    fn effective_dimension(&self, target: Vec<usize>, cond: Vec<usize>, system: Vec<usize>) -> PyResult<usize> {
        deff(&self.irreps, &target, &cond, &system).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Group({})", self.irreps.group().kind())
    }
}

/// Rényi entropy of a probability vector; `alpha = 1` gives Shannon.
#[pyfunction]
#[pyo3(signature = (probs, alpha, base = "e"))]
fn renyi_entropy(probs: Vec<f64>, alpha: f64, base: &str) -> PyResult<f64> {
    let log_base = match base {
        "e" => LogBase::Natural,
        "2" => LogBase::Two,
        other => return Err(PyValueError::new_err(format!("unknown log base {other:?}; expected \"e\" or \"2\""))),
    };
    if probs.iter().any(|p| p.is_nan() || *p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(PyValueError::new_err("probabilities must be non-negative and sum to 1"));
    }
    let params = EntropyParams::with_base(alpha, log_base).map_err(err)?;
    renyi_of_probabilities(&probs, &params).map_err(err)
}

/// `(name, description)` for every bundled preset.
#[pyfunction]
fn presets() -> Vec<(&'static str, &'static str)> {
    bundled().iter().map(|p| (p.name, p.description)).collect()
}

/// A validated experiment, loaded from TOML or a preset.
#[pyclass]
struct Experiment {
    spec: ExperimentSpec,
}

#[pymethods]
impl Experiment {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self {
            spec: parse_config(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            spec: preset(name).map_err(|e| PyKeyError::new_err(e.to_string()))?,
        })
    }

    #[getter]
    fn trials(&self) -> usize {
        self.spec.trials
    }

    #[setter]
    fn set_trials(&mut self, trials: usize) -> PyResult<()> {
        let mut spec = self.spec.clone();
        spec.trials = trials;
        spec.validate().map_err(err)?;
        self.spec = spec;
        Ok(())
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.spec.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.spec.seed = seed;
    }

    #[getter]
    fn checks(&self) -> Vec<&'static str> {
        self.spec.checks.iter().map(|c| c.name()).collect()
    }

    fn to_toml(&self) -> PyResult<String> {
        to_toml(&self.spec).map_err(err)
    }

    /// Runs every configured check. The GIL is released while sampling.
    fn run(&self, py: Python<'_>) -> PyResult<Report> {
        let spec = self.spec.clone();
        let report = py.detach(move || run_checks(&spec)).map_err(err)?;
        Ok(Report { report })
    }
}

/// Result of a verification run.
#[pyclass(frozen)]
struct Report {
    report: InvariantReport,
}

#[pymethods]
impl Report {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            report: InvariantReport::from_json(text).map_err(err)?,
        })
    }

    #[getter]
    fn passed(&self) -> bool {
        self.report.passed
    }

    #[getter]
    fn spec_hash(&self) -> &str {
        &self.report.provenance.spec_hash
    }

    /// Per-check `(passed, max_residual, tolerance)` keyed by check name.
    fn summary(&self) -> BTreeMap<&'static str, (bool, f64, f64)> {
        self.report
            .checks
            .iter()
            .map(|c| (c.name.name(), (c.passed, c.max_residual, c.tolerance)))
            .collect()
    }

    /// `(attempt, frames, gap)` of the tradeoff witness, if one was found.
    fn witness(&self) -> Option<(usize, (String, String), f64)> {
        self.report
            .witness
            .as_ref()
            .map(|w| (w.attempt, (w.frames[0].clone(), w.frames[1].clone()), w.gap))
    }

    /// Recomputes the witness gap from its stored amplitudes.
    fn reverify_witness(&self) -> PyResult<Option<f64>> {
        let Some(w) = &self.report.witness else {
            return Ok(None);
        };
        let space = self.report.spec.build_space().map_err(err)?;
        reverify_witness(&space, w).map(Some).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.report.to_json().map_err(err)
    }
}

#[pymodule]
fn qrf_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Experiment>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(renyi_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    Ok(())
}
