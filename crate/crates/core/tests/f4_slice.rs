//! End-to-end slice-level checks for the F4(a2) chart: restricted
//! invariants, argument shift, special coordinates, the finite pencil and
//! the equilibrium locus, against the published coordinate expressions.

use dswalg::nilstruct::charts;
use dswalg::slice::{
    equilibrium_equations, finite_brackets, restricted_invariants, solve_equilibrium,
    special_coordinates, FiniteBrackets, SliceChart,
};
use dswalg::symcore::poly::{Mono, Poly, Var};
use dswalg::symcore::rat::Rat;
use std::sync::Arc;

fn mono(pairs: &[(u32, u16)]) -> Mono {
    let mut m = Mono::one();
    for &(v, e) in pairs {
        m = m.mul(&Mono::var_pow(v, e));
    }
    m
}

#[test]
fn f4a2_slice_pipeline() {
    let sl2 = Arc::new(charts::f4a2().unwrap());
    let chart = SliceChart::new(sl2.clone());
    assert_eq!(chart.weights, vec![2, 2, 6, 6, 5, 4, 3, 2]);

    let inv = restricted_invariants(&chart).unwrap();
    assert_eq!(inv.mu, vec![0, 0, 1, 1]);

    // P_1 = Tr(Q^2) = 432 z1
    assert_eq!(inv.pbar[0], Poly::var(0).scale(&Rat::int(432)));

    // P_2 = Tr(Q^6): the published leading monomial and two more
    let p2 = &inv.pbar[1];
    assert_eq!(p2.coeff_of(&mono(&[(0, 3)])), Rat::int(744192));
    assert_eq!(p2.coeff_of(&mono(&[(1, 2), (0, 1)])), Rat::new(-866970, 49));
    assert_eq!(p2.coeff_of(&mono(&[(2, 1)])), Rat::new(165888, 13));
    assert_eq!(p2.coeff_of(&mono(&[(3, 1)])), Rat::int(-3456));
    assert_eq!(p2.coeff_of(&mono(&[(6, 2)])), Rat::new(150984, 49));
    // quasihomogeneous of degree nu_2 + 1 = 6
    let w = chart.weight_fn();
    assert_eq!(p2.homogeneous_degree(&w).unwrap(), Some(6));

    // P_3 = Tr(Q^8): selected published coefficients
    let p3 = &inv.pbar[2];
    assert_eq!(p3.coeff_of(&mono(&[(0, 4)])), Rat::int(40799232));
    assert_eq!(p3.coeff_of(&mono(&[(4, 1), (6, 1)])), Rat::int(311040));
    assert_eq!(p3.coeff_of(&mono(&[(1, 1), (3, 1)])), Rat::int(-149760));
    assert_eq!(p3.homogeneous_degree(&w).unwrap(), Some(8));
    assert_eq!(inv.pbar[3].homogeneous_degree(&w).unwrap(), Some(12));

    // d/dz4 P_4: published coefficients of z1^3 and z3
    let dp4 = inv.pbar[3].deriv(3);
    assert_eq!(dp4.coeff_of(&mono(&[(0, 3)])), Rat::int(-4505960448));
    assert_eq!(dp4.coeff_of(&mono(&[(2, 1)])), Rat::new(-76972032, 13));

    // special coordinates: t1 = z1, t2 = z2, t_i = z_i for i >= 5
    let coords = special_coordinates(&chart, &inv).unwrap();
    assert_eq!(coords.t_of_z[0], Poly::var(0));
    assert_eq!(coords.t_of_z[1], Poly::var(1));
    for i in 4..8 {
        assert_eq!(coords.t_of_z[i], Poly::var(i as Var));
    }
    // published combination: t2 = -(1/149760) dP3/dz4 - (224/65) z1
    let t2 = inv.pbar[2]
        .deriv(3)
        .scale(&Rat::new(-1, 149760))
        .sub(&Poly::var(0).scale(&Rat::new(224, 65)));
    assert_eq!(t2, coords.t_of_z[1]);
    // t3, t4 are z + nonlinear and quasihomogeneous of degree 6
    for i in [2usize, 3] {
        assert_eq!(
            coords.t_of_z[i].coeff_of(&Mono::var(i as Var)),
            Rat::ONE
        );
        assert_eq!(coords.t_of_z[i].homogeneous_degree(&w).unwrap(), Some(6));
    }
    // inverse map round-trips
    for i in 0..8 {
        let back = coords.t_of_z[i].substitute(&|v| Some(coords.z_of_t[v as usize].clone()));
        assert_eq!(back, Poly::var(i as Var), "t(z(t)) != t at {}", i);
    }

    // finite pencil
    let fb = finite_brackets(&chart, &coords).unwrap();
    // antisymmetry is structural; t^1..t^4 are Casimirs of the frozen bracket
    for i in 0..4 {
        for j in 0..8 {
            assert!(fb.b1_t[i][j].is_zero(), "t{} not a Casimir of B1", i + 1);
        }
    }
    // the frozen bracket in t-coordinates is constant in t^4 and equals the
    // t4-derivative of the transverse one (finite exactness shadow)
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(fb.b2_t[i][j].deriv(3), fb.b1_t[i][j]);
            assert!(fb.b1_t[i][j].deriv(3).is_zero());
        }
    }
    // rank of B1 at a generic point is n - r = 4
    {
        let pt = dswalg::slice::sample_points(8, 1).pop().unwrap();
        let mut m = dswalg::symcore::linalg::RatMat::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                *m.at_mut(i, j) = fb.b1_t[i][j].eval(&|v| pt[v as usize].clone());
            }
        }
        assert_eq!(m.rank(), 4);
    }
    // Jacobi for both structures and the pencil on a few triples
    for (i, j, k) in [(0, 1, 2), (2, 3, 7), (4, 5, 6), (1, 5, 7)] {
        assert!(FiniteBrackets::jacobi_defect(&fb.b2_t, i, j, k).is_zero());
        assert!(FiniteBrackets::jacobi_defect(&fb.b1_t, i, j, k).is_zero());
    }
    // Casimir property of the restricted invariants under B2
    let p2_t = inv.pbar[1].substitute(&|v| Some(coords.z_of_t[v as usize].clone()));
    for j in 0..8 {
        let mut acc = Poly::zero();
        for a in 0..8 {
            let da = p2_t.deriv(a as Var);
            if !da.is_zero() && !fb.b2_t[a][j].is_zero() {
                acc.add_assign(&da.mul(&fb.b2_t[a][j]));
            }
        }
        assert!(acc.is_zero(), "P2 is not a Casimir of B2 (column {})", j);
    }

    // equilibrium system: published normal forms
    let sys = equilibrium_equations(&chart, &inv, &coords, &fb).unwrap();
    let find = |j: usize, beta: usize| -> &Poly {
        &sys.grad_eqs
            .iter()
            .find(|(jj, bb, _)| *jj == j && *bb == beta)
            .unwrap()
            .2
    };
    // dP3/dt5 = 311040 t7
    assert_eq!(find(2, 4), &Poly::var(6).scale(&Rat::int(311040)));
    // dP3/dt7 = 311040 t5 - (1866240/7) t1 t7 - (9401184/49) t2 t7 + (5598720/49) t7 t8
    let expect = Poly::var(4)
        .scale(&Rat::int(311040))
        .add(&Poly::var(0).mul(&Poly::var(6)).scale(&Rat::new(-1866240, 7)))
        .add(&Poly::var(1).mul(&Poly::var(6)).scale(&Rat::new(-9401184, 49)))
        .add(&Poly::var(6).mul(&Poly::var(7)).scale(&Rat::new(5598720, 49)));
    assert_eq!(find(2, 6), &expect);
    // dP3/dt6 coefficient spot checks
    let d6 = find(2, 5);
    assert_eq!(d6.coeff_of(&Mono::var(5)), Rat::int(51840));
    assert_eq!(d6.coeff_of(&mono(&[(1, 2)])), Rat::new(-1478412, 35));

    // solve: t7 = 0, t5 = 0, t6 polynomial in (t1, t2, t8), t8 cubic
    let sol = solve_equilibrium(&chart, &sys).unwrap();
    assert_eq!(sol.aux_sources, vec![7]);
    assert!(sol.sigma[0].is_zero(), "t5 = 0 on the locus");
    assert!(sol.sigma[2].is_zero(), "t7 = 0 on the locus");
    let ring = &sol.ring;
    assert_eq!(ring.auxs.len(), 1);
    assert_eq!(ring.auxs[0].degree, 3);
    // every equation of both presentations vanishes on the locus
    for (_, _, p) in sys.grad_eqs.iter().chain(sys.bracket_eqs.iter()) {
        assert!(sol.restrict(p).is_zero(), "equation fails to vanish on N");
    }
    // print the cubic for inspection
    println!("minimal cubic: {}", ring.render(&ring.auxs[0].min_poly));
}
