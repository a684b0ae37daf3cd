use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use mhdfem::cli::render_vtk;
use mhdfem::diagnostics::CSV_HEADER;
use mhdfem::stepper::State;
use mhdfem::{Discretization, Mesh, Point};

fn mhd(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mhd")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, format!("{body}\noutput = {}\n", dir.join(format!("{name}.out")).display())).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn zero_final_time_writes_initial_row_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t0", "T = 0\nn = 2");
    let (code, _, err) = mhd(&["run", "--config", &cfg]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&dir.path().join("t0.out/invariants.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows[0][5].is_nan());
}

#[test]
fn preset_energy_is_conserved_over_ten_steps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p", "dim = 3\nn = 2\ninit = preset3d-variable\nscheme = B\ndt = 0.02\nT = 0.2");
    let (code, _, err) = mhd(&["run", "--config", &cfg]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&dir.path().join("p.out/invariants.csv"));
    assert_eq!(rows.len(), 11);
    let e0 = rows[0][3];
    let drift = rows.iter().map(|r| (r[3] - e0).abs() / e0).fold(0.0, f64::max);
    assert!(drift <= 1e-10, "{drift:e}");
    assert!(rows.iter().skip(1).all(|r| r[8] >= 1.0));
    assert!(rows.iter().all(|r| r[5].is_finite()));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let body = "n = 3\nscheme = A\nupwind = smooth\ndt = 0.02\nT = 0.1\nsnapshot_every = 5";
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let cfg = write_config(dir.path(), name, body);
        assert_eq!(mhd(&["run", "--config", &cfg]).0, 0);
        let out = dir.path().join(format!("{name}.out"));
        outputs.push((
            fs::read(out.join("invariants.csv")).unwrap(),
            fs::read(out.join("snapshot_00005.vtk")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for (body, needle) in [
        ("scheme = C", "A, B"),
        ("upwind = smooth\nc = 0.7", "range"),
        ("foo = 1", "unknown key"),
    ] {
        let cfg = write_config(dir.path(), "bad", body);
        let (code, _, err) = mhd(&["run", "--config", &cfg]);
        assert_eq!(code, 2);
        assert!(err.contains(needle) && err.contains("line"), "{err}");
    }
    let (code, _, _) = mhd(&["mms", "--config", &write_config(dir.path(), "m", "dim = 3\ninit = zero"), "--levels", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn step_failure_exits_with_3_and_keeps_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f", "n = 3\ndt = 0.05\nT = 0.5\nfp_maxiter = 1");
    let (code, _, err) = mhd(&["run", "--config", &cfg]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("did not converge"));
    let rows = csv_rows(&dir.path().join("f.out/invariants.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn io_failures_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = mhd(&["run", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("missing.cfg"));
    fs::write(dir.path().join("blocker"), "").unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, format!("T = 0\noutput = {}/blocker/out\n", dir.path().display())).unwrap();
    assert_eq!(mhd(&["run", "--config", cfg.to_str().unwrap()]).0, 4);
}

#[test]
fn mms_single_level_and_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m", "dt = 0.05\nT = 0.1");
    let (code, stdout, err) = mhd(&["mms", "--config", &cfg, "--levels", "1"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(stdout.lines().count(), 2);
    let csv = fs::read_to_string(dir.path().join("m.out/mms.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "j,n,h,err_u,err_B,err_rho,err_p");
    assert_eq!(csv.lines().count(), 2);

    let (code, stdout, _) = mhd(&["mms", "--config", &cfg, "--levels", "1,2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("o(u)"));
    let csv = fs::read_to_string(dir.path().join("m.out/mms.csv")).unwrap();
    let last: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(last.len(), 11);
    let (e1, e2): (f64, f64) = (
        csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap(),
        last[3].parse().unwrap(),
    );
    let order: f64 = last[7].parse().unwrap();
    assert!((order - (e1 / e2).log2()).abs() < 1e-12);
}

#[test]
fn preset3d_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let (code, _, err) = mhd(&[
        "preset3d", "--density", "constant", "--scheme", "A", "--upwind", "--n", "1", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(csv_rows(&out.join("invariants.csv")).len(), 51);
    assert_ne!(mhd(&["preset3d", "--density", "heavy", "--scheme", "A"]).0, 0);
}

/// Minimal reader for the legacy unstructured-grid subset written by the
/// solver: point count, cells and named scalar cell arrays.
struct Vtk {
    points: usize,
    cells: Vec<Vec<usize>>,
    types: Vec<u32>,
    scalars: Vec<(String, Vec<String>)>,
    vectors: Vec<(String, Vec<[f64; 3]>)>,
}

fn parse_vtk(text: &str) -> Vtk {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# vtk DataFile"));
    lines.next();
    assert_eq!(lines.next(), Some("ASCII"));
    assert_eq!(lines.next(), Some("DATASET UNSTRUCTURED_GRID"));
    let mut vtk = Vtk {
        points: 0,
        cells: vec![],
        types: vec![],
        scalars: vec![],
        vectors: vec![],
    };
    let mut ncells = 0;
    while let Some(line) = lines.next() {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "POINTS" => {
                vtk.points = tok[1].parse().unwrap();
                for _ in 0..vtk.points {
                    assert_eq!(lines.next().unwrap().split_whitespace().count(), 3);
                }
            }
            "CELLS" => {
                let n: usize = tok[1].parse().unwrap();
                let mut total = 0;
                for _ in 0..n {
                    let ids: Vec<usize> = lines.next().unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect();
                    assert_eq!(ids[0], ids.len() - 1);
                    total += ids.len();
                    vtk.cells.push(ids[1..].to_vec());
                }
                assert_eq!(total, tok[2].parse::<usize>().unwrap());
            }
            "CELL_TYPES" => {
                for _ in 0..tok[1].parse().unwrap() {
                    vtk.types.push(lines.next().unwrap().trim().parse().unwrap());
                }
            }
            "CELL_DATA" => ncells = tok[1].parse().unwrap(),
            "SCALARS" => {
                assert_eq!(lines.next(), Some("LOOKUP_TABLE default"));
                let vals = (0..ncells).map(|_| lines.next().unwrap().to_string()).collect();
                vtk.scalars.push((tok[1].to_string(), vals));
            }
            "VECTORS" => {
                let vals = (0..ncells)
                    .map(|_| {
                        let v: Vec<f64> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
                        [v[0], v[1], v[2]]
                    })
                    .collect();
                vtk.vectors.push((tok[1].to_string(), vals));
            }
            other => panic!("unexpected section {other}"),
        }
    }
    vtk
}

#[test]
fn vtk_round_trip_on_two_triangles() {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
    ];
    let mesh = Mesh::from_cells(2, verts, vec![vec![0, 1, 2], vec![0, 2, 3]]);
    let disc = Discretization::new(Arc::new(mesh)).unwrap();
    let nr = disc.rt.ndofs();
    let state = State {
        k: 3,
        t: 0.5,
        u: vec![0.0; nr],
        b: vec![0.0; nr],
        rho: vec![2.0, 2.0],
        p: vec![0.1, -0.1],
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.vtk");
    mhdfem::cli::write_vtk(&disc, &state, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, render_vtk(&disc, &state));
    let vtk = parse_vtk(&text);
    assert_eq!(vtk.points, 4);
    assert_eq!(vtk.cells.len(), 2);
    assert_eq!(vtk.types, vec![5, 5]);
    let names: Vec<&str> = vtk.scalars.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["rho", "p", "div_u", "div_B"]);
    assert_eq!(vtk.scalars[0].1, ["2", "2"]);
    let p: Vec<f64> = vtk.scalars[1].1.iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(p, state.p);
    assert_eq!(vtk.vectors.len(), 2);
}

#[test]
fn vtk_round_trip_preserves_bits_in_3d() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v", "dim = 3\nn = 1\ninit = preset3d-variable\ndt = 0.02\nT = 0.02\nsnapshot_every = 1");
    assert_eq!(mhd(&["run", "--config", &cfg]).0, 0);
    let vtk = parse_vtk(&fs::read_to_string(dir.path().join("v.out/snapshot_00001.vtk")).unwrap());
    assert_eq!(vtk.cells.len(), 6);
    assert!(vtk.types.iter().all(|&t| t == 10));
    let rho: Vec<f64> = vtk.scalars[0].1.iter().map(|v| v.parse().unwrap()).collect();
    for v in &rho {
        assert_eq!(v.to_string().parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
    let mass: f64 = rho.iter().sum::<f64>() * 8.0 / 6.0;
    let csv = csv_rows(&dir.path().join("v.out/invariants.csv"));
    assert!((mass - csv[1][1]).abs() < 1e-13 * mass);
}
