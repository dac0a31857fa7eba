use dswalg::nilstruct::charts;
use dswalg::slice::*;
use dswalg::dsred::*;
use dswalg::symcore::jet::jet;
use std::sync::Arc;

fn main() {
    let sl2 = Arc::new(charts::f4a2().unwrap());
    let chart = SliceChart::new(sl2.clone());
    let inv = restricted_invariants(&chart).unwrap();
    let coords = special_coordinates(&chart, &inv).unwrap();
    let gs = gauge_fix(&sl2).unwrap();
    let kernels = base_brackets(&sl2, &gs);
    let wb = w_brackets(&sl2, &gs, &kernels, &coords).unwrap();
    let vr = jet(3, 0);
    let mut bad = 0;
    for u in 0..8 {
        for v in 0..8 {
            let e = &wb.entries[u][v];
            for m in 0..=e.p2.max_lambda_degree().max(e.p1.max_lambda_degree()) {
                let shifted = e.p2.coeff(m).deriv(vr);
                let d = shifted.sub(&e.p1.coeff(m));
                if !d.is_zero() {
                    bad += 1;
                    if bad < 4 {
                        println!("entry ({},{}) lambda^{}: diff {} terms, e.g. {}",
                            u, v, m, d.num_terms(),
                            wb.ring.render(&dswalg::symcore::poly::Poly{terms: d.terms[..d.terms.len().min(3)].to_vec()}));
                    }
                }
                if !e.p1.coeff(m).deriv(vr).is_zero() {
                    println!("entry ({},{}) lambda^{}: p1 depends on t4", u, v, m);
                }
            }
        }
    }
    println!("bad coefficient pairs: {}", bad);
}
