use liouville::*;
fn main() {
    env_logger::init();
    let cases = [
        ("dy/dx = (3*x^2*y^2 + x^3 + 1)/(4*(x+1)*(x^2-x+1)*y)", vec![]),
        ("dy/dx = y^2 + y*x + x - 1", vec![]),
        ("(x + 1) * dy/dx + y*(y - x) = 0", vec![]),
        ("dy/dx = y^2*(y + x - 1)/x^2", vec![]),
        ("dy/dx = (-b*y)/(x*y + 1)", vec!["b".to_string()]),
        ("dy/dx = (y + 1)/(x*y - x^2)", vec![]),
        ("dy/dx = y/x", vec![]),
    ];
    for (src, params) in cases {
        let eq = parse_foode(src, &params).unwrap();
        let t = std::time::Instant::now();
        let report = solve(&eq, &SolveConfig::default());
        let method = report.method.map(|m| m.to_string()).unwrap_or("none".into());
        let factor = report
            .factor
            .as_ref()
            .map(|f| f.render(Style::Plain, eq.param()))
            .unwrap_or("-".into());
        println!(
            "{:55} {:?} {:14} d={} {:?}  R = {}",
            src, report.status, method, report.degree_bound, t.elapsed(), factor
        );
    }
}
