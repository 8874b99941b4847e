//! Chains, forms and certificates named on the command line.

use std::fs;
use std::path::Path;

use chainlet::elements::qcube;
use chainlet::forms::{builtin_form, builtin_names, FormJson};
use chainlet::harness::{gen_cube_sequence, gen_disk, gen_koch};
use chainlet::norms::Decomposition;
use chainlet::{FormField, KDirection, PolyChain};

use crate::Failure;

const FIXED: &[&str] = &["unit_segment", "segment2", "two_segments", "unit_square", "unit_square3", "unit_cube3"];
const LEVELLED: &[&str] = &["disk", "koch", "qcube"];

type Levelled = fn(u32) -> chainlet::Result<PolyChain>;

/// A chain that is either fixed or generated per approximation level.
pub enum ChainSource {
    Fixed(PolyChain),
    Levelled(Levelled),
}

impl ChainSource {
    pub fn at(&self, level: u32) -> chainlet::Result<PolyChain> {
        match self {
            ChainSource::Fixed(p) => Ok(p.clone()),
            ChainSource::Levelled(f) => f(level),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn fixed(name: &str) -> chainlet::Result<Option<PolyChain>> {
    let seg = |a: Vec<f64>, b: Vec<f64>| PolyChain::simplex(vec![a, b]);
    Ok(Some(match name {
        "unit_segment" => seg(vec![0.0], vec![1.0])?,
        "segment2" => seg(vec![0.0, 0.0], vec![1.0, 0.0])?,
        "two_segments" => seg(vec![0.0], vec![1.0])?.add(&seg(vec![2.0], vec![3.0])?)?,
        "unit_square" => PolyChain::unit_cube(2, &[0, 1])?,
        "unit_square3" => PolyChain::unit_cube(3, &[0, 1])?,
        "unit_cube3" => PolyChain::unit_cube(3, &[0, 1, 2])?,
        _ => return Ok(None),
    }))
}

fn levelled(name: &str) -> Option<Levelled> {
    match name {
        "disk" => Some(gen_disk::<f64>),
        "koch" => Some(|l| gen_koch::<f64>(l, 1.0).map(|k| k.polygon)),
        "qcube" => Some(|l| gen_cube_sequence::<f64>(l as i32)),
        _ => None,
    }
}

/// A chain JSON file, a built-in chain, or `NAME:LEVEL` for one level of a
/// generated family.
pub fn load_chain(arg: &str) -> Result<ChainSource, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(ChainSource::Fixed(PolyChain::from_json(&read(path)?)?));
    }
    if let Some(p) = fixed(arg)? {
        return Ok(ChainSource::Fixed(p));
    }
    if let Some(f) = levelled(arg) {
        return Ok(ChainSource::Levelled(f));
    }
    if let Some((name, level)) = arg.split_once(':') {
        if let (Some(f), Ok(l)) = (levelled(name), level.parse::<u32>()) {
            return Ok(ChainSource::Fixed(f(l)?));
        }
    }
    Err(Failure::input(format!(
        "unknown chain `{arg}`: not a file, and not one of {}, {} (optionally NAME:LEVEL)",
        FIXED.join(", "),
        LEVELLED.join(", ")
    )))
}

/// A built-in form in `R^n` or a JSON form file.
pub fn load_form(arg: &str, n: usize) -> Result<FormField, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let name = path.file_stem().map_or(arg.into(), |s| s.to_string_lossy().into_owned());
        return Ok(FormJson::parse(&read(path)?)?.to_form()?.with_name(name));
    }
    builtin_form(arg, n).ok_or_else(|| {
        Failure::input(format!("unknown form `{arg}` in R^{n}: not a file, and not one of {}", builtin_names().join(", ")))
    })
}

pub fn load_decomposition(path: &Path) -> Result<Decomposition, Failure> {
    Ok(Decomposition::from_json(&read(path)?)?)
}

/// `Q_level(0, e_1 ∧ … ∧ e_k)` in `R^n`, minus the same at `minus` if given.
pub fn qcube_chain(n: usize, k: usize, level: u32, minus: Option<u32>) -> Result<PolyChain, Failure> {
    let axes: Vec<usize> = (0..k).collect();
    let dir = KDirection::axis(n, &axes)?;
    let o = vec![0.0; n];
    let q = qcube(&o, &dir, level as i32)?;
    Ok(match minus {
        Some(m) => q.sub(&qcube(&o, &dir, m as i32)?)?,
        None => q,
    })
}
