use isolab::scan::{scan_tetrahedron, tetrahedron_grid, write_csv};
use isolab::Tolerance;

#[test]
fn exact_and_infinitesimal_smoothing_agree() {
    let tol = Tolerance::default();
    let exact = scan_tetrahedron(12, 0.0, &tol, None).unwrap();
    let tiny = scan_tetrahedron(12, 1e-9, &tol, None).unwrap();
    assert_eq!(exact.rows.len(), tiny.rows.len());
    let mut compared = 0;
    for (a, b) in exact.rows.iter().zip(&tiny.rows) {
        assert_eq!(a.point, b.point);
        if let (Some(x), Some(y)) = (a.class, b.class) {
            assert_eq!(x, y, "{:?}", a.point);
            compared += 1;
        }
    }
    assert_eq!(compared, tetrahedron_grid(12).len());
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let tol = Tolerance::default();
    let render = |threads| {
        let scan = scan_tetrahedron(8, 0.04, &tol, Some(threads)).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &scan.rows).unwrap();
        buf
    };
    assert_eq!(render(1), render(3));
}
