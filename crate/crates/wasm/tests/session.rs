use ist_wasm::{env_by_name, informed_points, radius, Session};

#[test]
fn session_steps_and_renders() {
    let mut s = Session::new("center_obstacle", 4, 50, 3).unwrap();
    let mut last = String::new();
    for _ in 0..5 {
        last = s.step().unwrap();
    }
    assert!(last.starts_with(r#"{"iteration":5,"samples":250"#), "{last}");
    let svg = s.svg().unwrap();
    assert!(svg.contains(r#"<g id="terminals""#));
    assert_eq!(svg.matches(r#"r="5""#).count(), 4);
}

#[test]
fn sessions_are_deterministic() {
    let run = || {
        let mut s = Session::new("empty", 3, 30, 9).unwrap();
        (0..4).map(|_| s.step().unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn unknown_environment_rejected() {
    assert!(env_by_name("maze").is_err());
    assert!(Session::new("empty", 1, 10, 0).is_err());
}

#[test]
fn informed_points_stay_inside_the_ellipse() {
    let (a, b, c) = ((0.2, 0.3), (0.7, 0.6), 0.8);
    let pts = informed_points(a, b, c, 500, 1).unwrap();
    assert_eq!(pts.len(), 1000);
    for p in pts.chunks(2) {
        let d = (p[0] - a.0).hypot(p[1] - a.1) + (p[0] - b.0).hypot(p[1] - b.1);
        assert!(d <= c + 1e-9);
        assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
    }
    assert!(informed_points(a, b, 0.1, 5, 1).is_err());
}

#[test]
fn radius_wrapper() {
    let r = radius(1000, 1.1, 1.0, 2).unwrap();
    let expected = 1.1 * (3.0 / std::f64::consts::PI * 1000f64.ln() / 1000.0).sqrt();
    assert!((r - expected).abs() < 1e-12, "{r} vs {expected}");
    assert!(radius(1, 1.1, 1.0, 2).is_err());
}
