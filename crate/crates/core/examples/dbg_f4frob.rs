use dswalg::nilstruct::charts;
use dswalg::slice::*;
use dswalg::dsred::*;
use dswalg::frob::*;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let sl2 = Arc::new(charts::f4a2().unwrap());
    let chart = SliceChart::new(sl2.clone());
    let inv = restricted_invariants(&chart).unwrap();
    let coords = special_coordinates(&chart, &inv).unwrap();
    let gs = gauge_fix(&sl2).unwrap();
    let kernels = base_brackets(&sl2, &gs);
    let wb = w_brackets(&sl2, &gs, &kernels, &coords).unwrap();
    println!("[{:?}] brackets", t0.elapsed());
    let fb = finite_brackets(&chart, &coords).unwrap();
    let sys = equilibrium_equations(&chart, &inv, &coords, &fb).unwrap();
    let nsol = solve_equilibrium(&chart, &sys).unwrap();
    let ld = leading_terms(&wb);
    let red = dirac_to_locus(&wb, &ld, &nsol).unwrap();
    println!("[{:?}] restricted to the locus", t0.elapsed());
    for u in 0..4 { for v in 0..4 {
        let d = red.omega2[u][v].homogeneous_degree();
        println!("omega2[{}][{}]: deg {:?}, {} num terms, den {}", u, v, d,
            red.omega2[u][v].num.num_terms(), red.omega2[u][v].den.len());
    }}
    let fp = flat_coordinates(&red, &sl2.eta[..4]).unwrap();
    println!("[{:?}] flat coordinates:", t0.elapsed());
    for i in 0..4 {
        println!("  s{} = {}", i + 1, fp.s_of_t[i].render(&|v| format!("t{}", v + 1)));
    }
    pencil_verify(&fp).unwrap();
    println!("[{:?}] pencil verified", t0.elapsed());
    let pot = potential_reconstruct(&fp).unwrap();
    pot.euler_check().unwrap();
    println!("[{:?}] potential + Euler identity", t0.elapsed());
    pot.wdvv_check().unwrap();
    println!("[{:?}] WDVV residuals all zero", t0.elapsed());
    println!("minimal polynomial: {}", pot.ring.render(&pot.ring.auxs[0].min_poly));
    println!("potential ({} terms): {}", pot.potential.num.num_terms(), pot.potential.render());
}
