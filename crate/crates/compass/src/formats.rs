//! On-disk formats: distance matrices (JSON or CSV), weighted graphs,
//! point maps, lattices, piecewise-min functions, cone points, curvature
//! profiles and volume curves.

use std::fmt;
use std::fs;
use std::path::Path;

use compass_core::cones_products::ConePoint;
use compass_core::finite_metric::{from_graph, validate_metric};
use compass_core::jacobi_riccati::CurvatureProfile;
use compass_core::lattice_short_basis::Lattice;
use compass_core::semiconcave_flow::{Branch, PiecewiseMinFunction};
use compass_core::volume_comparison::EmpiricalVolumeCurve;
use compass_core::DistanceMatrix;
use serde::{Deserialize, Serialize};

/// Anything wrong with user input. Always maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<compass_core::Error> for InputError {
    fn from(e: compass_core::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

fn at(path: &Path, e: impl fmt::Display) -> InputError {
    InputError(format!("{}: {e}", path.display()))
}

/// Raw bytes of an input file; kept so reports can digest exactly what
/// was read.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| at(path, e))
}

fn utf8<'a>(path: &Path, bytes: &'a [u8]) -> Result<&'a str> {
    std::str::from_utf8(bytes).map_err(|e| at(path, e))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    #[serde(default)]
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MetricFile {
    Matrix(MatrixFile),
    Graph(GraphFile),
}

/// Reads a finite metric space. `.csv` files hold a header row of labels
/// followed by the matrix rows; anything else is JSON, either
/// `{"labels", "d"}` or a graph `{"vertices", "edges": [[u, v, w]]}`
/// whose shortest-path metric is used.
/// Empty spaces are rejected.
pub fn parse_metric(path: &Path, bytes: &[u8]) -> Result<DistanceMatrix> {
    let text = utf8(path, bytes)?;
    let m = if is_csv(path) {
        parse_matrix_csv(text).map_err(|e| at(path, e))?
    } else {
        let file: MetricFile = serde_json::from_str(text)
            .map_err(|_| at(path, "expected a matrix {\"labels\", \"d\"} or a graph {\"vertices\", \"edges\"}"))?;
        match file {
            MetricFile::Matrix(m) => validate_metric(m.labels, &m.d).map_err(|e| at(path, e))?,
            MetricFile::Graph(g) => from_graph(g.vertices, &g.edges).map_err(|e| at(path, e))?,
        }
    };
    if m.is_empty() {
        return Err(at(path, compass_core::Error::EmptySet));
    }
    Ok(m)
}

/// Reads a graph file only.
pub fn parse_graph(path: &Path, bytes: &[u8]) -> Result<DistanceMatrix> {
    let g: GraphFile = serde_json::from_str(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    from_graph(g.vertices, &g.edges).map_err(|e| at(path, e))
}

fn parse_matrix_csv(text: &str) -> std::result::Result<DistanceMatrix, String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let labels: Vec<String> = rdr.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, s)| s.parse::<f64>().map_err(|_| format!("row {} column {}: not a number: {s:?}", i + 1, j + 1)))
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    validate_metric(labels, &rows).map_err(|e| e.to_string())
}

/// `{"labels": [...], "d": [[...]]}` with one matrix row per line,
/// readable by [`parse_metric`].
pub fn matrix_json(m: &DistanceMatrix) -> String {
    let rows: Vec<String> = m.rows().iter().map(|r| format!("    {}", compact(r))).collect();
    format!("{{\n  \"labels\": {},\n  \"d\": [\n{}\n  ]\n}}\n", compact(m.labels()), rows.join(",\n"))
}

fn compact<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("finite data serializes")
}

pub fn matrix_csv(m: &DistanceMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(m.labels()).expect("in-memory write");
    for row in m.rows() {
        w.write_record(row.iter().map(|v| fmt_f64(*v))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Shortest round-trip form, the same one used in JSON output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    assignment: Vec<usize>,
}

pub fn parse_assignment(path: &Path, bytes: &[u8]) -> Result<Vec<usize>> {
    let f: MapFile = serde_json::from_str(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    Ok(f.assignment)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    basis: Vec<Vec<f64>>,
}

pub fn parse_lattice(path: &Path, bytes: &[u8]) -> Result<Lattice> {
    let f: LatticeFile = serde_json::from_str(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    Lattice::new(f.basis).map_err(|e| at(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    branches: Vec<Branch>,
}

pub fn parse_function(path: &Path, bytes: &[u8]) -> Result<PiecewiseMinFunction> {
    let f: FunctionFile = serde_json::from_str(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    PiecewiseMinFunction::new(f.branches).map_err(|e| at(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeFile {
    points: Vec<ConePoint>,
}

pub fn parse_cone_points(path: &Path, bytes: &[u8]) -> Result<Vec<ConePoint>> {
    let f: ConeFile = serde_json::from_str(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    Ok(f.points)
}

/// Two numeric columns; a non-numeric first row is taken as a header.
fn two_columns(text: &str) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 2 {
            return Err(format!("row {}: expected 2 columns, found {}", i + 1, rec.len()));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                a.push(x);
                b.push(y);
            }
            _ if i == 0 => continue,
            _ => return Err(format!("row {}: not a number", i + 1)),
        }
    }
    Ok((a, b))
}

/// `(t, kappa)` rows.
pub fn parse_profile(path: &Path, bytes: &[u8]) -> Result<CurvatureProfile> {
    let (t, k) = two_columns(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    CurvatureProfile::from_samples(t, k).map_err(|e| at(path, e))
}

/// `(radius, volume)` rows.
pub fn parse_volume_curve(path: &Path, bytes: &[u8]) -> Result<EmpiricalVolumeCurve> {
    let (r, v) = two_columns(utf8(path, bytes)?).map_err(|e| at(path, e))?;
    EmpiricalVolumeCurve::new(r, v).map_err(|e| at(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trips() {
        let m = validate_metric(vec!["a".into(), "b".into()], &[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
        let p = Path::new("m.json");
        assert_eq!(parse_metric(p, matrix_json(&m).as_bytes()).unwrap(), m);
        let p = Path::new("m.csv");
        assert_eq!(parse_metric(p, matrix_csv(&m).as_bytes()).unwrap(), m);
    }

    #[test]
    fn graphs_are_metrics() {
        let g = br#"{"vertices": ["x", "y", "z"], "edges": [[0, 1, 1.0], [1, 2, 2.0]]}"#;
        let m = parse_metric(Path::new("g.json"), g).unwrap();
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(parse_graph(Path::new("g.json"), g).unwrap(), m);
    }

    #[test]
    fn headers_are_optional_in_two_column_files() {
        let p = Path::new("p.csv");
        assert!(parse_profile(p, b"t,kappa\n0,1\n1,1\n").is_ok());
        assert!(parse_profile(p, b"0,1\n1,1\n").is_ok());
        assert!(parse_profile(p, b"0,1\nx,1\n").is_err());
        assert!(parse_volume_curve(p, b"radius,volume\n1,2\n2,1\n").is_err());
    }

    #[test]
    fn errors_name_the_file() {
        let e = parse_metric(Path::new("bad.json"), b"{").unwrap_err();
        assert!(e.0.starts_with("bad.json"));
        let e = parse_metric(Path::new("bad.csv"), b"a,b\n0,1\n2,0\n").unwrap_err();
        assert!(e.0.contains("differ"), "{e}");
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1e-300), "1e-300");
        assert_eq!(fmt_f64(2.0), "2.0");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }
}
