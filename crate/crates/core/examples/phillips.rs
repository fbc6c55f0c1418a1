//! Separable Fredholm integral equation of the first kind (the Phillips
//! test problem) solved as a TV/L2 matrix equation.

use tv_gmks::experiments::metrics::relative_error;
use tv_gmks::experiments::noise::add_gaussian_white;
use tv_gmks::operators::phillips_problem;
use tv_gmks::{separable_blur, solve_tvl2, SolverParams};

fn main() -> tv_gmks::Result<()> {
    let n = std::env::args().nth(1).map_or(120, |s| s.parse().expect("n"));
    let p = phillips_problem(n)?;
    let clean = separable_blur(&p.h1, &p.h2)?.apply(&p.x_true)?;

    for (nu, mu, beta) in [(0.001, 1e-4, 0.1), (0.01, 1e-3, 30.0), (0.1, 0.1, 40.0)] {
        let b = add_gaussian_white(&clean, nu, 11)?;
        let params = SolverParams::new(mu, beta, 1.0, 1e-3).with_max_iter(300);
        let (x, trace) = solve_tvl2(&p.h1, &p.h2, &b, params)?;
        println!(
            "noise {nu:<6} mu {mu:<7} beta {beta:<5} -> {:3} iterations, relative error {:.3e}",
            trace.iterations(),
            relative_error(&x, &p.x_true)?
        );
    }
    Ok(())
}
