use crate::error::{QdlcError, Result};
use crate::types::C64;

fn check_len(a: &[C64], b: &[C64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(QdlcError::Dimension(format!("lengths {} and {} differ", a.len(), b.len())));
    }
    Ok(())
}

pub fn l2_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    check_len(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

pub fn linf_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    check_len(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

pub fn l2_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn linf_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn l2_distance_real(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(QdlcError::Dimension(format!("lengths {} and {} differ", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

pub fn to_complex(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}
