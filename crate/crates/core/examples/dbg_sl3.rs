use dswalg::nilstruct::charts;
use dswalg::slice::{restricted_invariants, special_coordinates, SliceChart};
use dswalg::dsred::{gauge_fix, base_brackets, w_brackets};
use std::sync::Arc;

fn main() {
    let sl2 = Arc::new(charts::regular_sl(2).unwrap());
    let chart = SliceChart::new(sl2.clone());
    let inv = restricted_invariants(&chart).unwrap();
    let coords = special_coordinates(&chart, &inv).unwrap();
    let gs = gauge_fix(&sl2).unwrap();
    let kernels = base_brackets(&sl2, &gs);
    let wb = w_brackets(&sl2, &gs, &kernels, &coords).unwrap();
    for u in 0..2 {
        for v in 0..2 {
            println!("({},{}):", u, v);
            for (m, c) in wb.entries[u][v].p2.coeffs.iter().enumerate() {
                if !c.is_zero() { println!("  p2 L^{}: {}", m, wb.ring.render(c)); }
            }
            for (m, c) in wb.entries[u][v].p1.coeffs.iter().enumerate() {
                if !c.is_zero() { println!("  p1 L^{}: {}", m, wb.ring.render(c)); }
            }
        }
    }
}
