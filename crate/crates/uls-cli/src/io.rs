//! File layout for sensing artifacts: matrices and transform lists in the
//! text formats of the core library, and instance directories bundling a
//! sensing matrix `A`, an observation `y`, a transform list, and an
//! optional recorded truth.
//!
//! An instance directory holds:
//!
//! ```text
//! A           m x n matrix block
//! y           m x 1 matrix block
//! transforms  one transform per line
//! truth       optional: "index <k>" line, then an n x 1 matrix block
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use uls_core::decode::SensingInstance;
use uls_core::text;
use uls_core::{Matrix, TransformSpec};

use crate::CliError;

pub fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    let contents = read(path)?;
    Ok(text::parse_complex_matrix(&contents)?)
}

pub fn save_matrix(path: &Path, m: &Matrix) -> Result<(), CliError> {
    write(path, &text::format_complex_matrix(m))
}

/// Loads an `m x 1` matrix block as a vector.
pub fn load_vector(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let m = load_matrix(path)?;
    if m.cols() != 1 {
        return Err(CliError::Config(format!(
            "{} must be a single-column matrix, got {} columns",
            path.display(),
            m.cols()
        )));
    }
    Ok((0..m.rows()).map(|i| m.get(i, 0)).collect())
}

pub fn save_vector(path: &Path, v: &[Complex64]) -> Result<(), CliError> {
    let column = Matrix::from_fn(v.len(), 1, |i, _| v[i]);
    save_matrix(path, &column)
}

pub fn load_transforms(path: &Path) -> Result<Vec<TransformSpec>, CliError> {
    let contents = read(path)?;
    Ok(text::parse_transforms(&contents)?)
}

pub fn save_transforms(path: &Path, transforms: &[TransformSpec]) -> Result<(), CliError> {
    write(path, &text::format_transforms(transforms))
}

/// Loads a single transform from a file holding either one transform line
/// or a dense matrix block.
pub fn load_transform_block(path: &Path) -> Result<TransformSpec, CliError> {
    let contents = read(path)?;
    Ok(text::parse_transform_block(&contents)?)
}

pub fn save_instance(dir: &Path, instance: &SensingInstance) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| annotate(dir, e))?;
    save_matrix(&dir.join("A"), instance.a())?;
    save_vector(&dir.join("y"), instance.y())?;
    save_transforms(&dir.join("transforms"), instance.transforms())?;
    if let Some((index, x)) = instance.truth() {
        let column = Matrix::from_fn(x.len(), 1, |i, _| x[i]);
        let body = format!("index {index}\n{}", text::format_complex_matrix(&column));
        write(&dir.join("truth"), &body)?;
    }
    Ok(())
}

pub fn load_instance(dir: &Path) -> Result<SensingInstance, CliError> {
    let a = load_matrix(&dir.join("A"))?;
    let y = load_vector(&dir.join("y"))?;
    let transforms = load_transforms(&dir.join("transforms"))?;
    let truth_path = dir.join("truth");
    let truth = if truth_path.exists() {
        Some(load_truth(&truth_path)?)
    } else {
        None
    };
    Ok(SensingInstance::new(a, transforms, y, truth)?)
}

/// Parses a truth file: an `index <k>` line followed by an `n x 1` block.
fn load_truth(path: &Path) -> Result<(usize, Vec<Complex64>), CliError> {
    let contents = read(path)?;
    let mut lines = contents.lines();
    let header = loop {
        match lines.next() {
            Some(line) if line.trim().is_empty() => continue,
            Some(line) => break line.trim(),
            None => {
                return Err(CliError::Config(format!(
                    "{}: empty truth file",
                    path.display()
                )))
            }
        }
    };
    let index = header
        .strip_prefix("index")
        .map(str::trim)
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: truth file must start with 'index <k>', got '{header}'",
                path.display()
            ))
        })?;
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let column = text::parse_complex_matrix(&rest)?;
    if column.cols() != 1 {
        return Err(CliError::Config(format!(
            "{}: truth signal must be a single column",
            path.display()
        )));
    }
    let x = (0..column.rows()).map(|i| column.get(i, 0)).collect();
    Ok((index, x))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| annotate(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| annotate(path, e))
}

fn annotate(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;
    use uls_core::decode::simulate_instance;
    use uls_core::{random_gaussian_matrix, Field, Permutation};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matrices_round_trip_through_files() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("M");
        let m = random_gaussian_matrix(4, 3, Field::Complex, 42);
        save_matrix(&path, &m).unwrap();
        let back = load_matrix(&path).unwrap();
        assert_eq!(m.rows(), back.rows());
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), back.get(i, j));
            }
        }
    }

    #[test]
    fn instances_round_trip_with_and_without_truth() {
        let dir = tempdir().unwrap();
        let a = random_gaussian_matrix(4, 2, Field::Complex, 7);
        let transforms = vec![
            TransformSpec::identity(4),
            TransformSpec::Permutation(Permutation::cyclic_shift(4)),
        ];
        let x = vec![c(1.0, -2.0), c(0.5, 0.25)];
        let instance = simulate_instance(a, transforms, &x, 1).unwrap();

        let with_truth = dir.path().join("with");
        save_instance(&with_truth, &instance).unwrap();
        let back = load_instance(&with_truth).unwrap();
        assert_eq!(back.y(), instance.y());
        let (index, x_back) = back.truth().unwrap();
        assert_eq!(index, 1);
        assert_eq!(x_back, &x[..]);

        // Dropping the truth file makes the reloaded instance truthless.
        std::fs::remove_file(with_truth.join("truth")).unwrap();
        let blind = load_instance(&with_truth).unwrap();
        assert!(blind.truth().is_none());
    }

    #[test]
    fn wide_observations_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("y");
        let wide = Matrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        save_matrix(&path, &wide).unwrap();
        let err = load_vector(&path).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn malformed_truth_headers_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("truth");
        std::fs::write(&path, "position 3\ncomplex-matrix 1 1\n1\n").unwrap();
        let err = load_truth(&path).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }
}
