use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cmdiv::io::{self, FunctionFile};
use cmdiv::lattice::catalog;
use cmdiv::{gen, FiniteLattice, LatticeFunction, RandomSubset, Rational, Scalar};

use crate::output::{CliError, CliResult};
use crate::RunConfig;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Tags parse errors with the file they came from.
fn in_file<T>(path: &Path, r: cmdiv::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        cmdiv::Error::Parse { .. } => CliError::Usage(format!("{}: {e}", path.display())),
        other => CliError::Core(other),
    })
}

/// A lattice file if `spec` names an existing path, otherwise a built-in name.
pub fn lattice(spec: &str) -> CliResult<Arc<FiniteLattice>> {
    let path = Path::new(spec);
    let l = if path.is_file() {
        in_file(path, io::parse_lattice(&read(path)?))?
    } else {
        catalog::by_name(spec)?
    };
    Ok(Arc::new(l))
}

/// Loads `--fn`, resolving the lattice from `--lattice` or the file header.
pub fn function<S: Scalar>(
    lattice_arg: Option<&str>,
    function_arg: &str,
    config: &RunConfig,
) -> CliResult<LatticeFunction<S>> {
    if function_arg == "random" {
        let l = lattice(lattice_arg.ok_or_else(|| {
            CliError::Usage("--fn random needs --lattice".into())
        })?)?;
        let f = gen::random_function(&l, &mut gen::rng(config.seed));
        let values = f.values().iter().map(|v| convert::<S>(v)).collect();
        return Ok(LatticeFunction::new(l, values)?);
    }
    let path = Path::new(function_arg);
    let file: FunctionFile<S> = in_file(path, io::parse_function(&read(path)?))?;
    let l = match (lattice_arg, &file.lattice) {
        (Some(spec), _) => lattice(spec)?,
        (None, Some(header)) => {
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let resolved: PathBuf = base.join(header);
            if resolved.is_file() {
                lattice(resolved.to_str().unwrap_or(header))?
            } else {
                lattice(header)?
            }
        }
        (None, None) => {
            return Err(CliError::Usage(
                "no --lattice given and the function file has no 'lattice' header".into(),
            ))
        }
    };
    let values = file.values(l.len())?;
    Ok(LatticeFunction::new(l, values)?)
}

/// Function file entries keyed by arbitrary element ids (used for sublattices).
pub fn function_entries<S: Scalar>(function_arg: &str) -> CliResult<Vec<(usize, S)>> {
    let path = Path::new(function_arg);
    let file: FunctionFile<S> = in_file(path, io::parse_function(&read(path)?))?;
    Ok(file.entries)
}

fn convert<S: Scalar>(v: &Rational) -> S {
    S::parse_scalar(&v.to_string()).expect("rational text parses in either mode")
}

/// A distribution file, a named spec, or `random:N`.
pub fn distribution(spec: &str, config: &RunConfig) -> CliResult<RandomSubset<Rational>> {
    let path = Path::new(spec);
    if path.is_file() {
        return in_file(path, io::parse_distribution(&read(path)?));
    }
    if let Some(n) = spec.strip_prefix("random:") {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::Usage(format!("--dist random:N needs an integer, got '{n}'")))?;
        if !(1..=12).contains(&n) {
            return Err(CliError::Usage("--dist random:N needs 1 <= N <= 12".into()));
        }
        return Ok(gen::random_distribution(n, &mut gen::rng(config.seed)));
    }
    Ok(io::parse_dist_spec(spec)?)
}
